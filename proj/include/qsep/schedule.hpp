#pragma once
// qsep/schedule.hpp — piecewise-C^1 time profiles for boundary data, and the
// constant-sign decomposition of the difference of two profiles.
//
// A schedule is a list of segments tiling [0, T]; each segment is constant, a
// linear ramp, or a half-cosine ramp. All three shapes are monotone inside
// their segment, so exact minima/maxima over any subinterval come from
// endpoint evaluation — that is what makes thinning envelopes exact.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "qsep/errors.hpp"

namespace qsep {

// ===== Segments =====

enum class segment_shape { constant, linear_ramp, cosine_ramp };

/// One piece of a schedule on [t_begin, t_end]; v0/v1 are the endpoint
/// values (a constant piece stores its value in both).
struct schedule_segment {
  double t_begin = 0.0;
  double t_end = 0.0;
  segment_shape shape = segment_shape::constant;
  double v0 = 0.0;
  double v1 = 0.0;
};

// ===== Schedule =====

class schedule {
 public:
  schedule() = default;  // empty schedule; horizon 0, value undefined

  explicit schedule(std::vector<schedule_segment> segments)
      : segments_(std::move(segments)) {
    validate();
  }

  static schedule constant(double v, double horizon) {
    return schedule({{0.0, horizon, segment_shape::constant, v, v}});
  }
  static schedule linear_ramp(double v0, double v1, double horizon) {
    return schedule({{0.0, horizon, segment_shape::linear_ramp, v0, v1}});
  }
  static schedule cosine_ramp(double v0, double v1, double horizon) {
    return schedule({{0.0, horizon, segment_shape::cosine_ramp, v0, v1}});
  }

  bool empty() const { return segments_.empty(); }
  double horizon() const { return segments_.empty() ? 0.0 : segments_.back().t_end; }
  const std::vector<schedule_segment>& segments() const { return segments_; }

  /// Value at time t (clamped to [0, T]).
  double value(double t) const { return eval(segment_at(t), t); }

  /// Analytic time derivative at t; at a segment joint the right-hand
  /// segment wins (the left-hand one at t = T).
  double derivative(double t) const {
    const schedule_segment& s = segment_at(t);
    const double width = s.t_end - s.t_begin;
    switch (s.shape) {
      case segment_shape::constant:
        return 0.0;
      case segment_shape::linear_ramp:
        return (s.v1 - s.v0) / width;
      case segment_shape::cosine_ramp: {
        const double u = clamp01((t - s.t_begin) / width);
        const double pi = 3.14159265358979323846;
        return (s.v1 - s.v0) * 0.5 * pi * std::sin(pi * u) / width;
      }
    }
    return 0.0;
  }

  /// Exact extrema over [a, b] ∩ [0, T]: segment shapes are monotone, so the
  /// extremum over each overlapped piece sits at a clipped endpoint.
  double max_on(double a, double b) const { return extremum(a, b, /*want_max=*/true); }
  double min_on(double a, double b) const { return extremum(a, b, /*want_max=*/false); }

  /// True when every segment is constant with one common value.
  bool is_constant() const {
    for (const auto& s : segments_) {
      if (s.v0 != s.v1) return false;
      if (s.v0 != segments_.front().v0) return false;
    }
    return true;
  }

  /// Segment boundaries (including 0 and T), ascending.
  std::vector<double> breakpoints() const {
    std::vector<double> b;
    b.reserve(segments_.size() + 1);
    b.push_back(0.0);
    for (const auto& s : segments_) b.push_back(s.t_end);
    return b;
  }

  /// Global value range over [0, T].
  double global_min() const { return min_on(0.0, horizon()); }
  double global_max() const { return max_on(0.0, horizon()); }

 private:
  static double clamp01(double u) { return u < 0.0 ? 0.0 : (u > 1.0 ? 1.0 : u); }

  static double eval(const schedule_segment& s, double t) {
    const double width = s.t_end - s.t_begin;
    const double u = width > 0.0 ? clamp01((t - s.t_begin) / width) : 0.0;
    switch (s.shape) {
      case segment_shape::constant:
        return s.v0;
      case segment_shape::linear_ramp:
        return s.v0 + (s.v1 - s.v0) * u;
      case segment_shape::cosine_ramp: {
        const double pi = 3.14159265358979323846;
        return s.v0 + (s.v1 - s.v0) * 0.5 * (1.0 - std::cos(pi * u));
      }
    }
    return s.v0;
  }

  const schedule_segment& segment_at(double t) const {
    if (segments_.empty()) throw config_error("schedule: empty schedule has no value");
    // Few segments in practice; linear scan keeps the hot path branch-cheap.
    for (const auto& s : segments_)
      if (t < s.t_end) return s;
    return segments_.back();
  }

  double extremum(double a, double b, bool want_max) const {
    if (segments_.empty()) throw config_error("schedule: empty schedule has no value");
    if (b < a) std::swap(a, b);
    bool seen = false;
    double best = 0.0;
    for (const auto& s : segments_) {
      const double lo = std::max(a, s.t_begin);
      const double hi = std::min(b, s.t_end);
      if (lo > hi) continue;
      for (double t : {lo, hi}) {
        const double v = eval(s, t);
        if (!seen || (want_max ? v > best : v < best)) best = v, seen = true;
      }
    }
    if (!seen) {  // window outside [0, T]: clamp to the nearer horizon end
      const double t = a > horizon() ? horizon() : 0.0;
      best = value(t);
    }
    return best;
  }

  void validate() {
    if (segments_.empty()) throw config_error("schedule: needs at least one segment");
    const double scale = std::max(1.0, std::abs(segments_.back().t_end));
    const double tol = 1e-9 * scale;
    if (std::abs(segments_.front().t_begin) > tol)
      throw config_error("schedule: first segment must start at t = 0");
    segments_.front().t_begin = 0.0;
    for (std::size_t i = 0; i < segments_.size(); ++i) {
      auto& s = segments_[i];
      if (!(s.t_end > s.t_begin))
        throw config_error("schedule: segment " + std::to_string(i) +
                           " has nonpositive width");
      if (i + 1 < segments_.size()) {
        auto& next = segments_[i + 1];
        if (std::abs(next.t_begin - s.t_end) > tol)
          throw config_error("schedule: gap or overlap between segments " +
                             std::to_string(i) + " and " + std::to_string(i + 1));
        next.t_begin = s.t_end;  // snap away rounding slack
      }
    }
  }

  std::vector<schedule_segment> segments_;
};

// ===== Sign decomposition =====

/// Sign of plus(t) − minus(t) on one interval of the decomposition.
enum class interval_sign { plus_ge_minus, plus_le_minus, balanced };

struct sign_interval {
  double t_begin = 0.0;
  double t_end = 0.0;
  interval_sign sign = interval_sign::balanced;
};

struct sign_decomposition_options {
  double min_width = -1.0;    // < 0: horizon * 1e-3
  double balance_tol = 1e-12; // |difference| below this counts as zero
  int probes_per_piece = 64;  // sampling density for root bracketing
};

/// Splits [0, T] into closed intervals on which plus − minus has constant
/// sign (or is identically zero — "balanced"). Exact for constant and linear
/// pieces; cosine pieces are root-bracketed by dense probing plus bisection.
/// Throws config_error if a constant-sign interval would be narrower than
/// the configured minimum width (the difference oscillates too fast).
inline std::vector<sign_interval> sign_decomposition(
    const schedule& minus, const schedule& plus, double horizon,
    sign_decomposition_options opt = {}) {
  if (minus.empty() || plus.empty())
    throw config_error("sign_decomposition: schedules must be nonempty");
  const double min_width = opt.min_width >= 0.0 ? opt.min_width : horizon * 1e-3;
  const auto diff = [&](double t) { return plus.value(t) - minus.value(t); };
  const auto sign_of = [&](double d) {
    if (std::abs(d) <= opt.balance_tol) return 0;
    return d > 0.0 ? 1 : -1;
  };

  // Merge the two breakpoint grids; the difference is smooth inside pieces.
  std::vector<double> marks = minus.breakpoints();
  for (double b : plus.breakpoints()) marks.push_back(b);
  marks.push_back(0.0);
  marks.push_back(horizon);
  std::sort(marks.begin(), marks.end());
  marks.erase(std::unique(marks.begin(), marks.end(),
                          [&](double x, double y) {
                            return std::abs(x - y) <= 1e-12 * std::max(1.0, horizon);
                          }),
              marks.end());

  // Collect sign-change points by probing each piece and bisecting brackets.
  std::vector<double> cuts{0.0};
  for (std::size_t m = 0; m + 1 < marks.size(); ++m) {
    const double a = marks[m], b = marks[m + 1];
    if (b <= 0.0 || a >= horizon) continue;
    const int probes = std::max(2, opt.probes_per_piece);
    double prev_t = a;
    int prev_s = sign_of(diff(a));
    for (int k = 1; k <= probes; ++k) {
      const double t = a + (b - a) * k / probes;
      const int s = sign_of(diff(t));
      if (s != 0 && prev_s != 0 && s != prev_s) {
        double lo = prev_t, hi = t;  // bisect the bracketed crossing
        for (int it = 0; it < 100 && hi - lo > 1e-13 * std::max(1.0, horizon); ++it) {
          const double mid = 0.5 * (lo + hi);
          (sign_of(diff(mid)) == prev_s ? lo : hi) = mid;
        }
        cuts.push_back(0.5 * (lo + hi));
      }
      if (s != 0) prev_s = s, prev_t = t;
    }
    cuts.push_back(b);
  }
  cuts.push_back(horizon);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end(),
                         [&](double x, double y) {
                           return std::abs(x - y) <= 1e-12 * std::max(1.0, horizon);
                         }),
             cuts.end());

  // Classify each piece by interior probing, then merge equal neighbors.
  std::vector<sign_interval> out;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i], b = cuts[i + 1];
    int s = 0;
    for (int k = 1; k <= 8 && s == 0; ++k)  // skip isolated tangency zeros
      s = sign_of(diff(a + (b - a) * k / 9.0));
    const interval_sign sig = s > 0   ? interval_sign::plus_ge_minus
                              : s < 0 ? interval_sign::plus_le_minus
                                      : interval_sign::balanced;
    if (!out.empty() && out.back().sign == sig)
      out.back().t_end = b;
    else
      out.push_back({a, b, sig});
  }
  for (const auto& iv : out)
    if (iv.sign != interval_sign::balanced && iv.t_end - iv.t_begin < min_width)
      throw config_error(
          "sign_decomposition: sign interval narrower than the configured "
          "minimum width — boundary difference oscillates too fast");
  return out;
}

}  // namespace qsep
