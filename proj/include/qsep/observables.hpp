#pragma once
// qsep/observables.hpp — measurements on configurations and trajectories:
// block and triangular smoothing, piecewise-constant density fields on the
// unit interval, instantaneous and time-averaged currents, Young-measure
// histograms, and the discrete entropy-production functional whose sign and
// decay certify convergence to the quasi-static entropy solution.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "qsep/engine.hpp"
#include "qsep/errors.hpp"
#include "qsep/model.hpp"
#include "qsep/schedule.hpp"
#include "qsep/theory.hpp"

namespace qsep {

// ===== Block and triangular averages =====

/// Mean occupation of the k sites ending at i (inclusive): sites i-k+1 .. i.
inline double left_block_average(const configuration& eta, int i, int k) {
  const int n = int(eta.size());
  if (k < 1 || i < k - 1 || i >= n)
    throw config_error("left_block_average: window leaves the lattice");
  int sum = 0;
  for (int s = i - k + 1; s <= i; ++s) sum += eta[std::size_t(s)];
  return double(sum) / double(k);
}

/// Triangular smoothing of half-width K centered at c:
///   sum_{|j| < K} (K - |j|) / K^2 * eta_{c+j},
/// the two-fold block average. Valid centers are K <= c <= n - K - 1.
inline double smoothed_average(const configuration& eta, int c, int K) {
  const int n = int(eta.size());
  if (K < 1 || c < K || c > n - K - 1)
    throw config_error("smoothed_average: center too close to the boundary");
  double sum = 0.0;
  for (int j = -(K - 1); j <= K - 1; ++j)
    sum += double(K - std::abs(j)) * eta[std::size_t(c + j)];
  return sum / (double(K) * double(K));
}

// ===== Density fields =====

/// Piecewise-constant function on [0, 1]: cells [edges[i], edges[i+1]) with
/// constant values (the last cell is closed at 1).
struct density_field {
  std::vector<double> edges;   // ascending, edges.front() == 0, back() == 1
  std::vector<double> values;  // one per cell

  int cells() const { return int(values.size()); }

  double value_at(double x) const {
    if (x <= edges.front()) return values.front();
    if (x >= edges.back()) return values.back();
    const auto it = std::upper_bound(edges.begin(), edges.end(), x);
    return values[std::size_t(it - edges.begin()) - 1];
  }

  double integral() const {
    double s = 0.0;
    for (int i = 0; i < cells(); ++i)
      s += values[std::size_t(i)] * (edges[std::size_t(i) + 1] - edges[std::size_t(i)]);
    return s;
  }

  /// Raw empirical field: cell [s/n, (s+1)/n) carries site s's value, so the
  /// integral equals (particle count)/n exactly.
  static density_field per_site(const std::vector<double>& site_value) {
    const int n = int(site_value.size());
    if (n < 1) throw config_error("density_field: empty site list");
    density_field f;
    f.edges.resize(std::size_t(n) + 1);
    for (int i = 0; i <= n; ++i) f.edges[std::size_t(i)] = double(i) / double(n);
    f.values = site_value;
    return f;
  }

  static density_field per_site(const configuration& eta) {
    std::vector<double> v(eta.begin(), eta.end());
    return per_site(v);
  }

  /// Triangularly smoothed field: the width-1/n cell between the centers of
  /// sites c and c+1 carries the smoothed average at c; the two boundary
  /// strips where the smoothing window does not fit carry the value 0.
  static density_field smoothed(const std::vector<double>& site_value, int K) {
    const int n = int(site_value.size());
    if (K < 1 || 2 * K + 1 > n)
      throw config_error("density_field: smoothing width does not fit the lattice");
    density_field f;
    f.edges.push_back(0.0);
    f.values.push_back(0.0);  // left strip [0, (2K+1)/(2n))
    f.edges.push_back(double(2 * K + 1) / double(2 * n));
    for (int c = K; c <= n - K - 1; ++c) {
      double sum = 0.0;
      for (int j = -(K - 1); j <= K - 1; ++j)
        sum += double(K - std::abs(j)) * site_value[std::size_t(c + j)];
      f.values.push_back(sum / (double(K) * double(K)));
      f.edges.push_back(double(2 * (c + 1) + 1) / double(2 * n));
    }
    f.edges.back() = 1.0 - double(2 * K - 1) / double(2 * n);
    f.values.push_back(0.0);  // right strip
    f.edges.push_back(1.0);
    return f;
  }

  static density_field smoothed(const configuration& eta, int K) {
    std::vector<double> v(eta.begin(), eta.end());
    return smoothed(v, K);
  }
};

// ===== Currents =====

/// Instantaneous microscopic current across bond b in generator (slow-clock)
/// units, i.e. without the overall acceleration factor: positive means net
/// rightward particle flow given the current state and boundary data.
inline double microscopic_current(const model_spec& spec, const configuration& eta,
                                  double t, int b) {
  const int n = spec.n;
  if (b < 0 || b > n) throw config_error("microscopic_current: bond out of range");
  const rate_tuple r = spec.rates_at(t);
  if (b == 0) return r.alpha * (1 - eta.front()) - r.gamma * eta.front();
  if (b == n) return r.beta * eta.back() - r.delta * (1 - eta.back());
  const double p = spec.jump_probability();
  const double e0 = eta[std::size_t(b - 1)], e1 = eta[std::size_t(b)];
  return spec.lambda0() * (p * e0 * (1.0 - e1) - (1.0 - p) * e1 * (1.0 - e0));
}

/// Empirical time-averaged current across bond b between two recorded marks,
/// in the same slow-clock units as microscopic_current: the net crossing
/// count divided by acceleration * elapsed time.
inline double time_averaged_current(const snapshot& from, const snapshot& to,
                                    double acceleration, int b) {
  const double dt = to.t - from.t;
  if (!(dt > 0.0)) throw config_error("time_averaged_current: marks must be ordered");
  const std::int64_t dh = (to.counts.h(b)) - (from.counts.h(b));
  return double(dh) / (acceleration * dt);
}

// ===== Young-measure histogram =====

/// Empirical Young measure: for each space-time cell, the distribution of
/// the smoothed density values observed there. Values land in `bins` equal
/// bins over [0, 1]; masses are normalized per cell on read-out.
class young_histogram {
 public:
  young_histogram(double horizon, int t_cells = 20, int x_cells = 20, int bins = 20)
      : horizon_(horizon), t_cells_(t_cells), x_cells_(x_cells), bins_(bins),
        mass_(std::size_t(t_cells) * std::size_t(x_cells) * std::size_t(bins), 0.0) {
    if (!(horizon > 0.0) || t_cells < 1 || x_cells < 1 || bins < 1)
      throw config_error("young_histogram: bad shape");
  }

  int t_cells() const { return t_cells_; }
  int x_cells() const { return x_cells_; }
  int bins() const { return bins_; }
  double bin_width() const { return 1.0 / double(bins_); }

  void add(double t, double x, double value, double weight = 1.0) {
    const int tc = clamp_cell(t / horizon_, t_cells_);
    const int xc = clamp_cell(x, x_cells_);
    const int b = clamp_cell(value, bins_);
    mass_[index(tc, xc, b)] += weight;
  }

  double cell_weight(int tc, int xc) const {
    double s = 0.0;
    for (int b = 0; b < bins_; ++b) s += mass_[index(tc, xc, b)];
    return s;
  }

  /// Normalized mass of one value-bin within a space-time cell.
  double mass(int tc, int xc, int b) const {
    const double s = cell_weight(tc, xc);
    return s > 0.0 ? mass_[index(tc, xc, b)] / s : 0.0;
  }

  /// Mass within one bin width of the target value: a bin counts when every
  /// point of it is within bin_width of the target interval's distance rule
  /// (inf-distance from the bin to the target <= bin_width).
  double concentration(int tc, int xc, double target) const {
    const double w = bin_width();
    double s = 0.0;
    for (int b = 0; b < bins_; ++b) {
      const double lo = b * w, hi = (b + 1) * w;
      const double dist = target < lo ? lo - target : (target > hi ? target - hi : 0.0);
      if (dist <= w + 1e-12) s += mass(tc, xc, b);
    }
    return s;
  }

 private:
  static int clamp_cell(double u, int cells) {
    int c = int(std::floor(u * cells));
    if (c < 0) c = 0;
    if (c >= cells) c = cells - 1;
    return c;
  }
  std::size_t index(int tc, int xc, int b) const {
    return (std::size_t(tc) * std::size_t(x_cells_) + std::size_t(xc)) * std::size_t(bins_) +
           std::size_t(b);
  }

  double horizon_;
  int t_cells_, x_cells_, bins_;
  std::vector<double> mass_;
};

// ===== Test functions for the entropy functional =====

/// Space-time test function psi(x, t) on [0,1] x [0,T], vanishing at x = 0,
/// x = 1, t = 0 and t = T. Implementations may provide analytic cell
/// integrals in x; the defaults use the midpoint rule, which is exact enough
/// once cells are O(1/n) wide.
class test_function {
 public:
  virtual ~test_function() = default;
  virtual double value(double x, double t) const = 0;
  virtual double dt(double x, double t) const = 0;

  /// integral of psi(., t) over [xl, xr]
  virtual double cell_integral(double xl, double xr, double t) const {
    return value(0.5 * (xl + xr), t) * (xr - xl);
  }
  /// integral of d/dt psi(., t) over [xl, xr]
  virtual double cell_integral_dt(double xl, double xr, double t) const {
    return dt(0.5 * (xl + xr), t) * (xr - xl);
  }
};

/// The standard bump psi = sin(pi x) sin^2(pi t / T), with exact x-cell
/// integrals.
class bump_test_function final : public test_function {
 public:
  explicit bump_test_function(double horizon) : T_(horizon) {
    if (!(horizon > 0.0)) throw config_error("bump_test_function: bad horizon");
  }
  double value(double x, double t) const override {
    return std::sin(pi * x) * square(std::sin(pi * t / T_));
  }
  double dt(double x, double t) const override {
    return std::sin(pi * x) * (pi / T_) * std::sin(2.0 * pi * t / T_);
  }
  double cell_integral(double xl, double xr, double t) const override {
    return x_part(xl, xr) * square(std::sin(pi * t / T_));
  }
  double cell_integral_dt(double xl, double xr, double t) const override {
    return x_part(xl, xr) * (pi / T_) * std::sin(2.0 * pi * t / T_);
  }

 private:
  static constexpr double pi = 3.14159265358979323846;
  static double square(double v) { return v * v; }
  static double x_part(double xl, double xr) {
    return (std::cos(pi * xl) - std::cos(pi * xr)) / pi;
  }
  double T_;
};

// ===== Entropy production =====

struct entropy_production_options {
  int block_width = 0;  // smoothing half-width K; <= 0 uses validate_scaling
};

/// Discrete entropy-production functional of a recorded trajectory against
/// an entropy pair (F, Q) with moving datum w(t) and test function psi:
///
///   X = n^{-a} int int [ F(u; w) d_t psi + dF/dw(u; w) w'(t) psi ] dx dt
///       + int int Q(u; w) d_x psi dx dt
///
/// where u is the triangularly smoothed empirical density field. The x
/// integrals are exact per cell (u is piecewise constant, so the Q term
/// telescopes through psi), the time integral is a trapezoid over the
/// recorded marks. For an entropy solution the Q-term's limit has a sign
/// (nonnegative for the lower pairs, nonpositive for the upper ones) and the
/// F-terms vanish with the acceleration.
inline double entropy_production(const model_spec& spec, const trajectory& traj,
                                 const entropy_pair& pair, const schedule& datum,
                                 const test_function& psi,
                                 entropy_production_options opt = {}) {
  if (traj.marks.size() < 2)
    throw config_error("entropy_production: need at least two recorded marks");
  int K = opt.block_width;
  if (K <= 0) K = validate_scaling(spec).block_width;
  const double na = std::pow(double(spec.n), -spec.a);

  // Integrand values at each recorded time.
  std::vector<double> f_term(traj.marks.size());
  std::vector<double> q_term(traj.marks.size());
  for (std::size_t m = 0; m < traj.marks.size(); ++m) {
    const snapshot& snap = traj.marks[m];
    const density_field u = density_field::smoothed(snap.state, K);
    const double w = datum.value(snap.t);
    const double wdot = datum.derivative(snap.t);
    double ft = 0.0, q = 0.0;
    for (int c = 0; c < u.cells(); ++c) {
      const double xl = u.edges[std::size_t(c)];
      const double xr = u.edges[std::size_t(c) + 1];
      const double uc = u.values[std::size_t(c)];
      ft += pair.F(uc, w) * psi.cell_integral_dt(xl, xr, snap.t);
      ft += pair.dF_dw(uc, w) * wdot * psi.cell_integral(xl, xr, snap.t);
      // integral of Q(u) d_x psi over the cell: Q is constant there.
      q += pair.Q(uc, w) * (psi.value(xr, snap.t) - psi.value(xl, snap.t));
    }
    f_term[m] = ft;
    q_term[m] = q;
  }

  double x_value = 0.0;
  for (std::size_t m = 0; m + 1 < traj.marks.size(); ++m) {
    const double dt = traj.marks[m + 1].t - traj.marks[m].t;
    x_value += 0.5 * dt * (na * (f_term[m] + f_term[m + 1]) +
                           (q_term[m] + q_term[m + 1]));
  }
  return x_value;
}

}  // namespace qsep
