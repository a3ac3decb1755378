#pragma once
// qsep/theory.hpp — hydrodynamic-side calculus for the open chain: the flux
// function, the boundary-driven variational current, the quasi-static phase
// diagram, exact product-form stationary profiles, and the entropy pairs
// used by the entropy-production estimator.

#include <algorithm>
#include <cmath>
#include <string>

#include "qsep/errors.hpp"

namespace qsep {

// ===== Flux =====

/// Macroscopic flux J(rho) = pbar * rho * (1 - rho).
inline double flux(double p_bar, double rho) { return p_bar * rho * (1.0 - rho); }

inline double flux_derivative(double p_bar, double rho) {
  return p_bar * (1.0 - 2.0 * rho);
}

/// Godunov numerical flux for the concave flux J: minimum over [l, r] when
/// l <= r (rarefaction side), maximum over [r, l] otherwise (shock side —
/// equals J(1/2) whenever the interval straddles the critical density).
inline double godunov_flux(double p_bar, double left, double right) {
  if (left <= right) {
    // Minimum of a concave function over an interval sits at an endpoint.
    return std::min(flux(p_bar, left), flux(p_bar, right));
  }
  if (right <= 0.5 && 0.5 <= left) return flux(p_bar, 0.5);
  return std::max(flux(p_bar, left), flux(p_bar, right));
}

/// Steady current selected by the boundary densities: the inf/sup variational
/// rule collapses to the Godunov flux of the pair (rho_minus, rho_plus).
inline double variational_current(double p_bar, double rho_minus, double rho_plus) {
  return godunov_flux(p_bar, rho_minus, rho_plus);
}

// ===== Quasi-static phase diagram =====

enum class phase_label {
  low_density,        // bulk pinned to the left reservoir, rho* = rho_minus
  high_density,       // bulk pinned to the right reservoir, rho* = rho_plus
  max_current,        // bulk at the critical density 1/2
  critical_non_unique // coexistence line: flux determined, profile not
};

inline const char* phase_name(phase_label label) {
  switch (label) {
    case phase_label::low_density: return "LowDensity";
    case phase_label::high_density: return "HighDensity";
    case phase_label::max_current: return "MaxCurrent";
    case phase_label::critical_non_unique: return "CriticalNonUnique";
  }
  return "?";
}

struct quasi_static_point {
  phase_label label = phase_label::low_density;
  double bulk_density = 0.0;  // rho* (meaningless on the coexistence line)
  double current = 0.0;       // J(rho*), always well defined
  bool unique = true;         // false exactly on the coexistence line
};

/// Classifies the quasi-static state selected by reservoir densities
/// (rho_minus, rho_plus). On the coexistence segment rho_minus + rho_plus = 1
/// with rho_minus < 1/2 the current is still J(rho_minus) but the profile is
/// not unique.
inline quasi_static_point quasi_static_profile(double p_bar, double rho_minus,
                                               double rho_plus,
                                               double coexistence_tol = 1e-12) {
  if (rho_minus < 0.0 || rho_minus > 1.0 || rho_plus < 0.0 || rho_plus > 1.0)
    throw config_error("quasi_static_profile: densities must lie in [0, 1]");
  quasi_static_point out;
  if (rho_minus < 0.5 && std::abs(rho_minus + rho_plus - 1.0) <= coexistence_tol) {
    out.label = phase_label::critical_non_unique;
    out.unique = false;
    out.bulk_density = rho_minus;  // representative value; profile not unique
    out.current = flux(p_bar, rho_minus);
    return out;
  }
  if (rho_minus == rho_plus) {  // degenerate: flat datum, bulk follows it
    out.bulk_density = rho_minus;
    out.current = flux(p_bar, rho_minus);
    out.label = rho_minus < 0.5 ? phase_label::low_density
              : rho_minus > 0.5 ? phase_label::high_density
                                : phase_label::max_current;
    return out;
  }
  if (rho_plus <= 0.5 && 0.5 <= rho_minus) {
    // Decreasing datum straddling the critical density: sup attained at 1/2.
    out.label = phase_label::max_current;
    out.bulk_density = 0.5;
    out.current = flux(p_bar, 0.5);
    return out;
  }
  // Otherwise the extremizer is one of the two data; off the coexistence
  // line the extremizing side is unique, and the bulk density equals it.
  // The left datum can only extremize below 1/2 and the right one above.
  const double jl = flux(p_bar, rho_minus);
  const double jr = flux(p_bar, rho_plus);
  const bool left_wins = rho_minus <= rho_plus ? jl <= jr : jl >= jr;
  out.bulk_density = left_wins ? rho_minus : rho_plus;
  out.current = left_wins ? jl : jr;
  out.label = left_wins ? phase_label::low_density : phase_label::high_density;
  return out;
}

// ===== Exact stationary product profiles =====

/// Result of the product-measure test for constant boundary rates: when the
/// fugacity equation tau_minus * tau_plus = 1 holds, the stationary state is
/// a homogeneous product Bernoulli(rho) measure.
struct product_stationarity {
  bool is_product = false;
  double density = 0.0;    // the common site density when is_product
  double tau_minus = 0.0;  // left fugacity candidate
  double tau_plus = 0.0;   // right fugacity candidate
};

/// For constant rates (alpha, beta, gamma, delta) and jump probability p,
/// decide whether a homogeneous product measure is stationary and return its
/// density. tau solves the quadratic matching the boundary injection against
/// the bulk drift on each side; the product condition is tau- * tau+ = 1.
inline product_stationarity stationary_product_density(double p, double alpha,
                                                       double beta, double gamma,
                                                       double delta,
                                                       double match_tol = 1e-9) {
  product_stationarity out;
  const double drift = 2.0 * p - 1.0;
  if (!(alpha > 0.0) || !(beta > 0.0)) return out;  // fugacities undefined
  const double bm = drift - alpha + gamma;
  const double bp = drift - beta + delta;
  out.tau_minus = (bm + std::sqrt(bm * bm + 4.0 * alpha * gamma)) / (2.0 * alpha);
  out.tau_plus = (bp + std::sqrt(bp * bp + 4.0 * beta * delta)) / (2.0 * beta);
  if (std::abs(out.tau_minus * out.tau_plus - 1.0) <= match_tol) {
    out.is_product = true;
    out.density = 1.0 / (out.tau_minus + 1.0);
  }
  return out;
}

// ===== Entropy pairs =====

/// An entropy pair (F, Q) for the conservation law with flux J: F(u; w) is
/// convex in u, Q is the matching entropy flux with Q_u = F_u J_u, and both
/// may depend on the boundary datum w. Three families are provided:
///  * kruzkov:  F = |u - w|,        Q = sign(u - w) (J(u) - J(w))
///  * lower:    F = (w /\ 1/2 - u)+, Q = (J(w /\ 1/2) - J(u)) 1{u < w /\ 1/2}
///  * upper:    F = (u - w \/ 1/2)+, Q = (J(u) - J(w \/ 1/2)) 1{u > w \/ 1/2}
/// The lower pair has Q >= 0, the upper pair Q <= 0, which is what turns the
/// entropy inequality into one-sided boundary control.
enum class entropy_pair_kind { kruzkov, lower, upper };

inline const char* entropy_pair_name(entropy_pair_kind k) {
  switch (k) {
    case entropy_pair_kind::kruzkov: return "kruzkov";
    case entropy_pair_kind::lower: return "lower";
    case entropy_pair_kind::upper: return "upper";
  }
  return "?";
}

struct entropy_pair {
  entropy_pair_kind kind = entropy_pair_kind::kruzkov;
  double p_bar = 1.0;

  double F(double u, double w) const {
    switch (kind) {
      case entropy_pair_kind::kruzkov:
        return std::abs(u - w);
      case entropy_pair_kind::lower: {
        const double wc = std::min(w, 0.5);
        return std::max(wc - u, 0.0);
      }
      case entropy_pair_kind::upper: {
        const double wc = std::max(w, 0.5);
        return std::max(u - wc, 0.0);
      }
    }
    return 0.0;
  }

  double Q(double u, double w) const {
    switch (kind) {
      case entropy_pair_kind::kruzkov: {
        const double s = u > w ? 1.0 : (u < w ? -1.0 : 0.0);
        return s * (flux(p_bar, u) - flux(p_bar, w));
      }
      case entropy_pair_kind::lower: {
        const double wc = std::min(w, 0.5);
        return u < wc ? flux(p_bar, wc) - flux(p_bar, u) : 0.0;
      }
      case entropy_pair_kind::upper: {
        const double wc = std::max(w, 0.5);
        return u > wc ? flux(p_bar, u) - flux(p_bar, wc) : 0.0;
      }
    }
    return 0.0;
  }

  /// Subgradient of F in u; 0 is reported at the kink (a valid subgradient).
  double dF_du(double u, double w) const {
    switch (kind) {
      case entropy_pair_kind::kruzkov:
        return u > w ? 1.0 : (u < w ? -1.0 : 0.0);
      case entropy_pair_kind::lower:
        return u < std::min(w, 0.5) ? -1.0 : 0.0;
      case entropy_pair_kind::upper:
        return u > std::max(w, 0.5) ? 1.0 : 0.0;
    }
    return 0.0;
  }

  /// Partial derivative of F in the datum w (defined off the kinks; at a
  /// kink the convention mirrors dF_du: report 0).
  double dF_dw(double u, double w) const {
    switch (kind) {
      case entropy_pair_kind::kruzkov:
        return u > w ? -1.0 : (u < w ? 1.0 : 0.0);
      case entropy_pair_kind::lower:
        return (u < std::min(w, 0.5) && w < 0.5) ? 1.0 : 0.0;
      case entropy_pair_kind::upper:
        return (u > std::max(w, 0.5) && w > 0.5) ? -1.0 : 0.0;
    }
    return 0.0;
  }
};

}  // namespace qsep
