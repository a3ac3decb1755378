#pragma once
// qsep/model.hpp — model definition for the open asymmetric exclusion chain:
// bulk bias, boundary reservoir families, time acceleration, and the scaling
// diagnostics that say whether a parameter choice sits in the asymptotic
// regime the theory assumes.
//
// Two reservoir families are supported.
//  * liggett:    unit bulk clock, jump probability p = (1 + pbar)/2; the
//                boundary injection/extraction rates are built from the
//                reservoir densities so that a constant-density reservoir
//                pair makes a product measure stationary in the maximal
//                current phase and matches the classical open-ASEP rates.
//  * reversible: bulk clock sigma with jump probability 1/2 + pbar/(2 sigma)
//                (weak asymmetry), boundary entry/exit rates sigma_tilde *
//                lambda * rho and sigma_tilde * lambda * (1 - rho); the
//                boundary dynamics alone are reversible w.r.t. the product
//                Bernoulli(rho) measure.

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <variant>
#include <vector>

#include "qsep/errors.hpp"
#include "qsep/schedule.hpp"

namespace qsep {

// ===== Boundary rate tuples =====

/// Instantaneous boundary rates (left: alpha creation / gamma annihilation,
/// right: delta creation / beta annihilation) together with the total
/// boundary clocks and the effective reservoir densities they encode.
struct rate_tuple {
  double alpha = 0.0;  // left creation      (site 1 in 1-based terms)
  double beta = 0.0;   // right annihilation (site N)
  double gamma = 0.0;  // left annihilation
  double delta = 0.0;  // right creation
  double lambda_minus = 0.0;  // alpha + gamma
  double lambda_plus = 0.0;   // beta + delta
  double rho_minus = 0.0;     // alpha / lambda_minus
  double rho_plus = 0.0;      // delta / lambda_plus
};

/// Liggett-family boundary rates for reservoir densities (rho_bar_minus,
/// rho_bar_plus) and jump probability p = (1 + pbar)/2.
inline rate_tuple liggett_rates(double p, double rho_bar_minus, double rho_bar_plus) {
  if (!(p > 0.5) || !(p <= 1.0))
    throw config_error("liggett_rates: jump probability must lie in (1/2, 1]");
  if (rho_bar_minus < 0.0 || rho_bar_minus > 1.0 || rho_bar_plus < 0.0 ||
      rho_bar_plus > 1.0)
    throw config_error("liggett_rates: reservoir densities must lie in [0, 1]");
  rate_tuple r;
  r.alpha = p * rho_bar_minus;
  r.beta = p * (1.0 - rho_bar_plus);
  r.gamma = (1.0 - p) * (1.0 - rho_bar_minus);
  r.delta = (1.0 - p) * rho_bar_plus;
  r.lambda_minus = r.alpha + r.gamma;
  r.lambda_plus = r.beta + r.delta;
  r.rho_minus = r.lambda_minus > 0.0 ? r.alpha / r.lambda_minus : 0.0;
  r.rho_plus = r.lambda_plus > 0.0 ? r.delta / r.lambda_plus : 0.0;
  return r;
}

/// Reversible-family boundary rates: entry sigma_tilde * lambda * rho and
/// exit sigma_tilde * lambda * (1 - rho) on each side. The encoded reservoir
/// densities are exactly rho_minus / rho_plus.
inline rate_tuple reversible_rates(double sigma_tilde, double lambda_bar_minus,
                                   double lambda_bar_plus, double rho_minus,
                                   double rho_plus) {
  if (!(sigma_tilde > 0.0) || !(lambda_bar_minus > 0.0) || !(lambda_bar_plus > 0.0))
    throw config_error("reversible_rates: clock factors must be positive");
  if (rho_minus < 0.0 || rho_minus > 1.0 || rho_plus < 0.0 || rho_plus > 1.0)
    throw config_error("reversible_rates: reservoir densities must lie in [0, 1]");
  rate_tuple r;
  r.alpha = sigma_tilde * lambda_bar_minus * rho_minus;
  r.gamma = sigma_tilde * lambda_bar_minus * (1.0 - rho_minus);
  r.delta = sigma_tilde * lambda_bar_plus * rho_plus;
  r.beta = sigma_tilde * lambda_bar_plus * (1.0 - rho_plus);
  r.lambda_minus = r.alpha + r.gamma;
  r.lambda_plus = r.beta + r.delta;
  r.rho_minus = rho_minus;
  r.rho_plus = rho_plus;
  return r;
}

// ===== Boundary family descriptors =====

/// Liggett family: reservoir density schedules; p fixed by the bulk bias.
struct liggett_boundary {
  schedule rho_bar_minus;
  schedule rho_bar_plus;
};

/// Reversible family: density schedules plus the clock factors. lambda_bar
/// on each side scales that reservoir's total clock.
struct reversible_boundary {
  schedule rho_minus;
  schedule rho_plus;
  double sigma = 0.0;        // bulk clock; <= 0 means "use default_sigma(n)"
  double sigma_tilde = 0.0;  // boundary clock; <= 0 means default
  double lambda_bar_minus = 1.0;
  double lambda_bar_plus = 1.0;
};

inline double default_sigma(int n) { return std::pow(double(n), 0.25); }
inline double default_sigma_tilde(int n) { return std::sqrt(double(n)); }

// ===== Model spec =====

/// Full description of one accelerated open-chain run.
struct model_spec {
  int n = 0;           // number of sites
  double a = 1.0;      // acceleration exponent: clock speed-up N^(1+a) overall
  double p_bar = 0.0;  // bulk drift 2p - 1 (positive: rightward)
  double horizon = 1.0;
  std::variant<liggett_boundary, reversible_boundary> boundary;

  bool is_liggett() const { return std::holds_alternative<liggett_boundary>(boundary); }

  /// Bulk jump probability p (right), as set by the family.
  double jump_probability() const {
    if (is_liggett()) return 0.5 * (1.0 + p_bar);
    const auto& rb = std::get<reversible_boundary>(boundary);
    return 0.5 + p_bar / (2.0 * sigma_value(rb));
  }

  /// Bulk clock lambda0: 1 for liggett, sigma for reversible.
  double lambda0() const {
    if (is_liggett()) return 1.0;
    return sigma_value(std::get<reversible_boundary>(boundary));
  }

  /// Overall time acceleration N^(1+a) applied to the whole generator.
  double acceleration() const { return std::pow(double(n), 1.0 + a); }

  double sigma() const {
    return is_liggett() ? 0.0 : sigma_value(std::get<reversible_boundary>(boundary));
  }
  double sigma_tilde() const {
    if (is_liggett()) return 0.0;
    const auto& rb = std::get<reversible_boundary>(boundary);
    return rb.sigma_tilde > 0.0 ? rb.sigma_tilde : default_sigma_tilde(n);
  }

  /// Boundary rates at (unaccelerated) model time t.
  rate_tuple rates_at(double t) const {
    if (is_liggett()) {
      const auto& lb = std::get<liggett_boundary>(boundary);
      return liggett_rates(jump_probability(), lb.rho_bar_minus.value(t),
                           lb.rho_bar_plus.value(t));
    }
    const auto& rb = std::get<reversible_boundary>(boundary);
    return reversible_rates(sigma_tilde(), rb.lambda_bar_minus, rb.lambda_bar_plus,
                            rb.rho_minus.value(t), rb.rho_plus.value(t));
  }

  /// Reservoir density schedules (the dial the user actually turns).
  double left_density_at(double t) const {
    if (is_liggett()) return std::get<liggett_boundary>(boundary).rho_bar_minus.value(t);
    return std::get<reversible_boundary>(boundary).rho_minus.value(t);
  }
  double right_density_at(double t) const {
    if (is_liggett()) return std::get<liggett_boundary>(boundary).rho_bar_plus.value(t);
    return std::get<reversible_boundary>(boundary).rho_plus.value(t);
  }

  const schedule& left_schedule() const {
    return is_liggett() ? std::get<liggett_boundary>(boundary).rho_bar_minus
                        : std::get<reversible_boundary>(boundary).rho_minus;
  }
  const schedule& right_schedule() const {
    return is_liggett() ? std::get<liggett_boundary>(boundary).rho_bar_plus
                        : std::get<reversible_boundary>(boundary).rho_plus;
  }

  void validate() const {
    if (n < 1) throw config_error("model_spec: n must be at least 1");
    if (!(a > 0.0)) throw config_error("model_spec: acceleration exponent a must be positive");
    if (!(horizon > 0.0)) throw config_error("model_spec: horizon must be positive");
    if (!(p_bar > 0.0))
      throw config_error("model_spec: bulk drift p_bar must be positive");
    if (p_bar > 1.0) throw config_error("model_spec: bulk drift p_bar must be at most 1");
    const auto check_density_schedule = [&](const schedule& s, const char* which) {
      if (s.empty())
        throw config_error(std::string("model_spec: missing ") + which + " schedule");
      if (std::abs(s.horizon() - horizon) > 1e-9 * std::max(1.0, horizon))
        throw config_error(std::string("model_spec: ") + which +
                           " schedule horizon disagrees with the run horizon");
      if (s.global_min() < -1e-12 || s.global_max() > 1.0 + 1e-12)
        throw config_error(std::string("model_spec: ") + which +
                           " density schedule leaves [0, 1]");
    };
    if (is_liggett()) {
      const auto& lb = std::get<liggett_boundary>(boundary);
      check_density_schedule(lb.rho_bar_minus, "left reservoir density");
      check_density_schedule(lb.rho_bar_plus, "right reservoir density");
    } else {
      const auto& rb = std::get<reversible_boundary>(boundary);
      check_density_schedule(rb.rho_minus, "left reservoir density");
      check_density_schedule(rb.rho_plus, "right reservoir density");
      const double s = sigma_value(rb);
      if (!(s >= p_bar))
        throw config_error(
            "model_spec: reversible family needs sigma >= p_bar so the left "
            "jump probability stays nonnegative");
      if (!(rb.lambda_bar_minus > 0.0) || !(rb.lambda_bar_plus > 0.0))
        throw config_error("model_spec: lambda_bar factors must be positive");
      if (rb.sigma_tilde < 0.0)
        throw config_error("model_spec: sigma_tilde must be positive (or 0 for default)");
    }
  }

 private:
  double sigma_value(const reversible_boundary& rb) const {
    return rb.sigma > 0.0 ? rb.sigma : default_sigma(n);
  }
};

/// Liggett-family model with the standard acceleration.
inline model_spec make_liggett_spec(int n, double a, double p_bar, schedule rho_bar_minus,
                                    schedule rho_bar_plus, double horizon) {
  model_spec spec;
  spec.n = n;
  spec.a = a;
  spec.p_bar = p_bar;
  spec.horizon = horizon;
  spec.boundary = liggett_boundary{std::move(rho_bar_minus), std::move(rho_bar_plus)};
  spec.validate();
  return spec;
}

/// Constant-density convenience overload.
inline model_spec make_liggett_spec(int n, double a, double p_bar, double rho_bar_minus,
                                    double rho_bar_plus, double horizon) {
  return make_liggett_spec(n, a, p_bar, schedule::constant(rho_bar_minus, horizon),
                           schedule::constant(rho_bar_plus, horizon), horizon);
}

/// Reversible-family model; sigma / sigma_tilde <= 0 choose the defaults
/// N^(1/4) and N^(1/2).
inline model_spec make_reversible_spec(int n, double a, double p_bar, schedule rho_minus,
                                       schedule rho_plus, double horizon,
                                       double sigma = 0.0, double sigma_tilde = 0.0,
                                       double lambda_bar_minus = 1.0,
                                       double lambda_bar_plus = 1.0) {
  model_spec spec;
  spec.n = n;
  spec.a = a;
  spec.p_bar = p_bar;
  spec.horizon = horizon;
  reversible_boundary rb;
  rb.rho_minus = std::move(rho_minus);
  rb.rho_plus = std::move(rho_plus);
  rb.sigma = sigma > 0.0 ? sigma : default_sigma(n);
  rb.sigma_tilde = sigma_tilde > 0.0 ? sigma_tilde : default_sigma_tilde(n);
  rb.lambda_bar_minus = lambda_bar_minus;
  rb.lambda_bar_plus = lambda_bar_plus;
  spec.boundary = std::move(rb);
  spec.validate();
  return spec;
}

/// Constant-density convenience overload.
inline model_spec make_reversible_spec(int n, double a, double p_bar, double rho_minus,
                                       double rho_plus, double horizon,
                                       double sigma = 0.0, double sigma_tilde = 0.0,
                                       double lambda_bar_minus = 1.0,
                                       double lambda_bar_plus = 1.0) {
  return make_reversible_spec(n, a, p_bar, schedule::constant(rho_minus, horizon),
                              schedule::constant(rho_plus, horizon), horizon, sigma,
                              sigma_tilde, lambda_bar_minus, lambda_bar_plus);
}

// ===== Scaling diagnostics =====

/// One asymptotic-regime proxy check: the inequality lhs > rhs stands in for
/// a limit statement, with ratio = lhs / rhs as the margin.
struct scaling_check {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  bool ok = false;
  bool borderline = false;
};

struct scaling_report {
  std::vector<scaling_check> checks;
  int block_width = 0;   // recommended smoothing half-width K
  double window_low = 0.0;
  double window_high = 0.0;
  bool window_ok = false;
  bool all_ok = false;

  std::vector<std::string> violations() const {
    std::vector<std::string> v;
    for (const auto& c : checks) {
      if (!c.ok) v.push_back(c.name);
      else if (c.borderline) v.push_back(c.name + " (borderline, flagged)");
    }
    if (!window_ok) v.push_back("block width window is empty");
    return v;
  }
};

/// Checks the separation-of-scales conditions behind the quasi-static
/// approximation and recommends a smoothing block width K sitting at the
/// geometric middle of its admissible window.
inline scaling_report validate_scaling(const model_spec& spec) {
  scaling_report rep;
  const double n = double(spec.n);
  const auto add = [&](std::string name, double lhs, double rhs) {
    scaling_check c;
    c.name = std::move(name);
    c.lhs = lhs;
    c.rhs = rhs;
    c.ratio = rhs > 0.0 ? lhs / rhs : std::numeric_limits<double>::infinity();
    // Exactly meeting the proxy counts as "in regime" but is flagged.
    c.borderline = std::abs(c.ratio - 1.0) <= 1e-9;
    c.ok = lhs > rhs || c.borderline;
    rep.checks.push_back(c);
  };

  if (spec.is_liggett()) {
    // a > 1/2 is what lets boundary-layer relaxation outrun the slow drive.
    scaling_check c;
    c.name = "a > 1/2 required";
    c.lhs = spec.a;
    c.rhs = 0.5;
    c.ratio = spec.a / 0.5;
    c.ok = spec.a > 0.5;
    rep.checks.push_back(c);
    // Window: sqrt(N) << K << N, realized as the geometric middle
    // K = N^((1/2 + min(a, 1)) / 2).
    rep.window_low = std::sqrt(n);
    rep.window_high = n;
    const double expo = 0.5 * (0.5 + std::min(spec.a, 1.0));
    rep.block_width = int(std::lround(std::pow(n, expo)));
    rep.window_ok = rep.window_low < double(rep.block_width) &&
                    double(rep.block_width) < rep.window_high;
  } else {
    const double sigma = spec.sigma();
    const double sigma_tilde = spec.sigma_tilde();
    // sigma << N: weak asymmetry but still a mesoscopic bulk clock.
    add("sigma << N (proxy: sigma < N/4)", n / 4.0, sigma);
    // sigma * sigma_tilde >> sqrt(N): boundary clock fast enough to pin
    // the reservoir densities.
    add("sigma * sigma_tilde >> sqrt(N) (proxy: > 2 sqrt(N))", sigma * sigma_tilde,
        2.0 * std::sqrt(n));
    // N^a * sigma >> sqrt(N): acceleration beats the diffusive scale.
    add("N^a * sigma >> sqrt(N) (proxy: N^(a - 1/2) sigma > 4)",
        std::pow(n, spec.a - 0.5) * sigma, 4.0);
    // Window: max(sqrt(N), sigma) << K << min(N^a sigma, sigma_tilde sigma, N).
    rep.window_low = std::max(std::sqrt(n), sigma);
    rep.window_high =
        std::min({std::pow(n, spec.a) * sigma, sigma_tilde * sigma, n});
    rep.block_width =
        int(std::lround(std::sqrt(rep.window_low * rep.window_high)));
    rep.window_ok = rep.window_low < double(rep.block_width) &&
                    double(rep.block_width) < rep.window_high;
  }

  rep.all_ok = rep.window_ok;
  for (const auto& c : rep.checks) rep.all_ok = rep.all_ok && c.ok;
  return rep;
}

}  // namespace qsep
