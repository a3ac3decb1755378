#pragma once
// qsep/engine.hpp — exact stochastic simulation of the accelerated open
// exclusion chain. The sampler is a thinning (rejection) scheme: candidate
// event times are drawn from a Poisson clock whose rate dominates the true
// total jump rate over a time window, and each candidate is accepted with
// the exact ratio of instantaneous rate to envelope. Because the bulk rates
// are piecewise constant in the state and the boundary rates are monotone
// within schedule pieces, the envelope is exact for bulk moves (no bulk
// rejections) and tight at window endpoints for boundary moves, so the
// simulated law is exact — including at requested stop times, where the
// memorylessness of the exponential lets the clock be re-armed for free.
//
// Site/bond indexing: sites are 0..n-1; bonds are 0..n, where bond b for
// 1 <= b <= n-1 joins sites b-1 and b, bond 0 is the left reservoir link and
// bond n the right one. h_plus(b) counts rightward crossings of bond b
// (creation at the left reservoir, bulk jumps right, annihilation at the
// right reservoir); h_minus(b) counts leftward crossings. Particle
// conservation then reads, per site s,
//   eta_s(t) - eta_s(0) = [h(s) - h(s+1)]   with   h = h_plus - h_minus.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "qsep/errors.hpp"
#include "qsep/model.hpp"
#include "qsep/rng.hpp"

namespace qsep {

// ===== State =====

/// Occupation variables, one byte per site (0 or 1).
using configuration = std::vector<std::uint8_t>;

inline int particle_count(const configuration& eta) {
  int c = 0;
  for (auto v : eta) c += v;
  return c;
}

/// Cumulative crossing counts per bond; see the header comment for the
/// indexing and orientation conventions.
struct counting_processes {
  std::vector<std::uint64_t> h_plus;
  std::vector<std::uint64_t> h_minus;

  void reset(int n) {
    h_plus.assign(std::size_t(n) + 1, 0);
    h_minus.assign(std::size_t(n) + 1, 0);
  }
  int bonds() const { return int(h_plus.size()); }  // == n + 1
  std::int64_t h(int b) const {
    return std::int64_t(h_plus[std::size_t(b)]) - std::int64_t(h_minus[std::size_t(b)]);
  }
};

/// Checks the pathwise conservation law linking occupations to crossing
/// counts, and the 1-Lipschitz property of b -> h(b) it implies. Returns
/// true when both hold exactly; on failure, *detail names the first bad site.
inline bool verify_conservation(const configuration& initial,
                                const configuration& final_state,
                                const counting_processes& counts,
                                std::string* detail = nullptr) {
  const int n = int(initial.size());
  if (int(final_state.size()) != n || counts.bonds() != n + 1) {
    if (detail) *detail = "size mismatch between configurations and counts";
    return false;
  }
  for (int s = 0; s < n; ++s) {
    const std::int64_t through = counts.h(s) - counts.h(s + 1);
    const std::int64_t change =
        std::int64_t(final_state[std::size_t(s)]) - std::int64_t(initial[std::size_t(s)]);
    if (through != change) {
      if (detail)
        *detail = "conservation violated at site " + std::to_string(s) +
                  ": occupation change " + std::to_string(change) +
                  " vs net inflow " + std::to_string(through);
      return false;
    }
    if (std::abs(counts.h(s) - counts.h(s + 1)) > 1) {
      if (detail)
        *detail = "height field not 1-Lipschitz across site " + std::to_string(s);
      return false;
    }
  }
  return true;
}

struct snapshot {
  double t = 0.0;
  configuration state;
  counting_processes counts;  // cumulative counts at time t
};

struct trajectory {
  configuration initial_state;
  std::vector<snapshot> marks;  // ascending times; first is t = 0, last t = T
  std::uint64_t accepted = 0;
  std::uint64_t candidates = 0;

  const snapshot& final_mark() const { return marks.back(); }
};

// ===== Initial conditions =====

/// Recipe for the state at t = 0: a fixed configuration, a homogeneous
/// product Bernoulli measure, or a site-dependent product measure given by a
/// density profile on (0, 1) evaluated at cell centers (s + 1/2)/n.
class initial_condition {
 public:
  static initial_condition deterministic(configuration state) {
    initial_condition ic;
    ic.kind_ = kind::deterministic;
    ic.state_ = std::move(state);
    return ic;
  }
  static initial_condition bernoulli(double density) {
    if (density < 0.0 || density > 1.0)
      throw config_error("initial_condition: density must lie in [0, 1]");
    initial_condition ic;
    ic.kind_ = kind::bernoulli;
    ic.density_ = density;
    return ic;
  }
  static initial_condition bernoulli_profile(std::function<double(double)> profile) {
    if (!profile) throw config_error("initial_condition: empty profile");
    initial_condition ic;
    ic.kind_ = kind::profile;
    ic.profile_ = std::move(profile);
    return ic;
  }

  /// Bernoulli parameter of site s on a lattice of n sites (a deterministic
  /// state reads as densities 0/1). Thresholding one uniform per site
  /// against this reproduces sample(); thresholding a shared uniform against
  /// two recipes yields the monotone coupling of their initial laws.
  double site_density(int s, int n) const {
    switch (kind_) {
      case kind::deterministic:
        if (int(state_.size()) != n)
          throw config_error("initial_condition: configuration size mismatch");
        return double(state_[std::size_t(s)]);
      case kind::bernoulli:
        return density_;
      case kind::profile: {
        const double rho = profile_((s + 0.5) / double(n));
        if (rho < 0.0 || rho > 1.0)
          throw config_error("initial_condition: profile leaves [0, 1]");
        return rho;
      }
    }
    return 0.0;
  }

  configuration sample(int n, philox4x32& rng) const {
    configuration eta(std::size_t(n), 0);
    switch (kind_) {
      case kind::deterministic:
        if (int(state_.size()) != n)
          throw config_error("initial_condition: configuration size mismatch");
        eta = state_;
        for (auto v : eta)
          if (v > 1) throw config_error("initial_condition: occupations must be 0/1");
        break;
      case kind::bernoulli:
        for (int s = 0; s < n; ++s)
          eta[std::size_t(s)] = rng.next_double() < density_ ? 1 : 0;
        break;
      case kind::profile:
        for (int s = 0; s < n; ++s) {
          const double rho = profile_((s + 0.5) / double(n));
          if (rho < 0.0 || rho > 1.0)
            throw config_error("initial_condition: profile leaves [0, 1]");
          eta[std::size_t(s)] = rng.next_double() < rho ? 1 : 0;
        }
        break;
    }
    return eta;
  }

 private:
  enum class kind { deterministic, bernoulli, profile };
  kind kind_ = kind::bernoulli;
  configuration state_;
  double density_ = 0.0;
  std::function<double(double)> profile_;
};

// ===== Run options =====

struct run_options {
  /// Spacing of recorded snapshots; <= 0 records only t = 0 and t = T.
  double snapshot_cadence = 0.0;
  /// Cap on the thinning window width (model time); <= 0 lets windows run to
  /// the next schedule breakpoint or stop time. Narrower windows tighten the
  /// boundary envelope at the cost of more clock re-arms.
  double max_window_width = 0.0;
  /// Hard bound on the envelope rate; exceeding it is a configuration error.
  double max_envelope = 1e15;
  /// Safety cap on candidate draws for one run.
  std::uint64_t max_candidates = std::uint64_t(1) << 62;
  /// Debug: re-derive the instantaneous total rate at every candidate and
  /// verify it never exceeds the envelope.
  bool check_envelope = false;
};

// ===== Packed bond set =====

/// Set of bond indices with O(1) insert/erase/uniform-sample, stored as a
/// dense array plus a position table.
class bond_set {
 public:
  explicit bond_set(int capacity) : pos_(std::size_t(capacity), -1) {}

  int size() const { return int(items_.size()); }
  bool contains(int b) const { return pos_[std::size_t(b)] >= 0; }
  int at(int i) const { return items_[std::size_t(i)]; }

  void insert(int b) {
    if (pos_[std::size_t(b)] >= 0) return;
    pos_[std::size_t(b)] = int(items_.size());
    items_.push_back(b);
  }
  void erase(int b) {
    const int i = pos_[std::size_t(b)];
    if (i < 0) return;
    const int last = items_.back();
    items_[std::size_t(i)] = last;
    pos_[std::size_t(last)] = i;
    items_.pop_back();
    pos_[std::size_t(b)] = -1;
  }

 private:
  std::vector<int> items_;
  std::vector<int> pos_;
};

// ===== Stepper =====

class stepper {
 public:
  stepper(model_spec spec, configuration init)
      : spec_(std::move(spec)),
        eta_(std::move(init)),
        right_bonds_(spec_.n + 1),
        left_bonds_(spec_.n + 1) {
    spec_.validate();
    if (int(eta_.size()) != spec_.n)
      throw config_error("stepper: initial configuration size mismatch");
    counts_.reset(spec_.n);
    for (int b = 1; b < spec_.n; ++b) refresh_bond(b);
    breaks_ = spec_.left_schedule().breakpoints();
    for (double t : spec_.right_schedule().breakpoints()) breaks_.push_back(t);
    std::sort(breaks_.begin(), breaks_.end());
    breaks_.erase(std::unique(breaks_.begin(), breaks_.end()), breaks_.end());
  }

  const model_spec& spec() const { return spec_; }
  double time() const { return t_; }
  const configuration& state() const { return eta_; }
  const counting_processes& counts() const { return counts_; }
  std::uint64_t accepted_events() const { return accepted_; }
  std::uint64_t candidate_events() const { return candidates_; }

  /// Advances the chain to exactly stop_time (model time, within the
  /// horizon). The state afterwards is an exact sample of the law at that
  /// instant; stopping and resuming introduces no bias.
  void advance_to(philox4x32& rng, double stop_time, const run_options& opt = {}) {
    loop(rng, stop_time, opt, /*single_event=*/false);
  }

  /// Advances until exactly one event is accepted (or the horizon is hit).
  /// Returns true when an event fired.
  bool step_event(philox4x32& rng, const run_options& opt = {}) {
    return loop(rng, spec_.horizon, opt, /*single_event=*/true);
  }

 private:
  // Envelope (sup over [t0, t1]) of the four boundary channel rates. The
  // channel rates are monotone images of the density schedules, so the sups
  // come from exact schedule extrema.
  struct boundary_envelope {
    double alpha, beta, gamma, delta;
  };
  boundary_envelope boundary_sup(double t0, double t1) const {
    boundary_envelope e{};
    if (spec_.is_liggett()) {
      const auto& lb = std::get<liggett_boundary>(spec_.boundary);
      const double p = spec_.jump_probability();
      e.alpha = p * lb.rho_bar_minus.max_on(t0, t1);
      e.gamma = (1.0 - p) * (1.0 - lb.rho_bar_minus.min_on(t0, t1));
      e.beta = p * (1.0 - lb.rho_bar_plus.min_on(t0, t1));
      e.delta = (1.0 - p) * lb.rho_bar_plus.max_on(t0, t1);
    } else {
      const auto& rb = std::get<reversible_boundary>(spec_.boundary);
      const double cm = spec_.sigma_tilde() * rb.lambda_bar_minus;
      const double cp = spec_.sigma_tilde() * rb.lambda_bar_plus;
      e.alpha = cm * rb.rho_minus.max_on(t0, t1);
      e.gamma = cm * (1.0 - rb.rho_minus.min_on(t0, t1));
      e.delta = cp * rb.rho_plus.max_on(t0, t1);
      e.beta = cp * (1.0 - rb.rho_plus.min_on(t0, t1));
    }
    return e;
  }

  double instantaneous_total_rate(double t) const {
    const rate_tuple r = spec_.rates_at(t);
    const double p = spec_.jump_probability();
    const double bulk = spec_.lambda0() * (p * right_bonds_.size() +
                                           (1.0 - p) * left_bonds_.size());
    const double left = r.alpha * (1 - eta_.front()) + r.gamma * eta_.front();
    const double right = r.delta * (1 - eta_.back()) + r.beta * eta_.back();
    return spec_.acceleration() * (bulk + left + right);
  }

  bool loop(philox4x32& rng, double stop_time, const run_options& opt,
            bool single_event) {
    const double horizon = spec_.horizon;
    if (stop_time < t_ - 1e-12 * std::max(1.0, horizon) || stop_time > horizon * (1.0 + 1e-12))
      throw config_error("stepper: stop time outside [current time, horizon]");
    stop_time = std::min(stop_time, horizon);
    const double accel = spec_.acceleration();
    const double lambda0 = spec_.lambda0();
    const double p = spec_.jump_probability();

    while (t_ < stop_time) {
      // Window: up to the next schedule breakpoint (boundary envelopes are
      // exact at piece endpoints), the stop time, and the optional cap.
      double window_end = stop_time;
      auto it = std::upper_bound(breaks_.begin(), breaks_.end(), t_);
      if (it != breaks_.end()) window_end = std::min(window_end, *it);
      if (opt.max_window_width > 0.0)
        window_end = std::min(window_end, t_ + opt.max_window_width);

      const boundary_envelope env = boundary_sup(t_, window_end);
      const double rate_right = accel * lambda0 * p * right_bonds_.size();
      const double rate_left = accel * lambda0 * (1.0 - p) * left_bonds_.size();
      const double env_alpha = accel * env.alpha;
      const double env_gamma = accel * env.gamma;
      const double env_delta = accel * env.delta;
      const double env_beta = accel * env.beta;
      const double total =
          rate_right + rate_left + env_alpha + env_gamma + env_delta + env_beta;
      if (total > opt.max_envelope)
        throw config_error("stepper: envelope rate exceeds the configured cap");
      if (!(total > 0.0)) {  // nothing can move in this window
        t_ = window_end;
        continue;
      }

      const double wait = rng.next_exponential(total);
      if (t_ + wait >= window_end) {
        // No candidate inside the window: the exponential clock is
        // memoryless, so jumping to the window end and re-arming is exact.
        t_ = window_end;
        continue;
      }
      const double t_cand = t_ + wait;
      if (++candidates_ > opt.max_candidates)
        throw assertion_error("stepper: candidate budget exhausted");
      if (opt.check_envelope &&
          instantaneous_total_rate(t_cand) > total * (1.0 + 1e-12))
        throw assertion_error("stepper: envelope bound violated");

      // One uniform selects the channel and doubles as the thinning
      // acceptance variable: P(channel slot and accept) = rate / total.
      double u = rng.next_double() * total;
      bool fired = false;
      if (u < rate_right) {
        apply_bulk(right_bonds_.at(int(rng.next_below(std::uint64_t(right_bonds_.size())))),
                   /*rightward=*/true);
        fired = true;
      } else if ((u -= rate_right) < rate_left) {
        apply_bulk(left_bonds_.at(int(rng.next_below(std::uint64_t(left_bonds_.size())))),
                   /*rightward=*/false);
        fired = true;
      } else if ((u -= rate_left) < env_alpha) {
        const rate_tuple r = spec_.rates_at(t_cand);
        if (u < accel * r.alpha * (1 - eta_.front())) {
          eta_.front() = 1;
          ++counts_.h_plus[0];
          if (spec_.n > 1) refresh_bond(1);
          fired = true;
        }
      } else if ((u -= env_alpha) < env_gamma) {
        const rate_tuple r = spec_.rates_at(t_cand);
        if (u < accel * r.gamma * eta_.front()) {
          eta_.front() = 0;
          ++counts_.h_minus[0];
          if (spec_.n > 1) refresh_bond(1);
          fired = true;
        }
      } else if ((u -= env_gamma) < env_delta) {
        const rate_tuple r = spec_.rates_at(t_cand);
        if (u < accel * r.delta * (1 - eta_.back())) {
          eta_.back() = 1;
          ++counts_.h_minus[std::size_t(spec_.n)];
          if (spec_.n > 1) refresh_bond(spec_.n - 1);
          fired = true;
        }
      } else {
        u -= env_delta;
        const rate_tuple r = spec_.rates_at(t_cand);
        if (u < accel * r.beta * eta_.back()) {
          eta_.back() = 0;
          ++counts_.h_plus[std::size_t(spec_.n)];
          if (spec_.n > 1) refresh_bond(spec_.n - 1);
          fired = true;
        }
      }

      t_ = t_cand;
      if (fired) {
        ++accepted_;
        if (single_event) return true;
      }
    }
    t_ = stop_time;
    return false;
  }

  void apply_bulk(int b, bool rightward) {
    // Bond b joins sites b-1 and b.
    if (rightward) {
      eta_[std::size_t(b - 1)] = 0;
      eta_[std::size_t(b)] = 1;
      ++counts_.h_plus[std::size_t(b)];
    } else {
      eta_[std::size_t(b - 1)] = 1;
      eta_[std::size_t(b)] = 0;
      ++counts_.h_minus[std::size_t(b)];
    }
    for (int nb = b - 1; nb <= b + 1; ++nb)
      if (nb >= 1 && nb <= spec_.n - 1) refresh_bond(nb);
  }

  void refresh_bond(int b) {
    const std::uint8_t a = eta_[std::size_t(b - 1)];
    const std::uint8_t c = eta_[std::size_t(b)];
    if (a == 1 && c == 0) {
      right_bonds_.insert(b);
      left_bonds_.erase(b);
    } else if (a == 0 && c == 1) {
      left_bonds_.insert(b);
      right_bonds_.erase(b);
    } else {
      right_bonds_.erase(b);
      left_bonds_.erase(b);
    }
  }

  model_spec spec_;
  configuration eta_;
  counting_processes counts_;
  bond_set right_bonds_;  // bonds with pattern (1, 0): a particle can hop right
  bond_set left_bonds_;   // bonds with pattern (0, 1): a particle can hop left
  std::vector<double> breaks_;
  double t_ = 0.0;
  std::uint64_t accepted_ = 0;
  std::uint64_t candidates_ = 0;
};

// ===== One-call driver =====

/// Runs one replica from t = 0 to the horizon, recording snapshots at the
/// requested cadence (always including t = 0 and t = T exactly). The RNG is
/// seeded from (seed, replica), so replicas are independent streams and each
/// run is reproducible bit-for-bit.
inline trajectory run(const model_spec& spec, const initial_condition& init,
                      std::uint64_t seed, std::uint64_t replica = 0,
                      const run_options& opt = {}) {
  spec.validate();
  philox4x32 rng(seed, replica);
  stepper s(spec, init.sample(spec.n, rng));

  trajectory out;
  out.initial_state = s.state();
  std::vector<double> marks{0.0};
  if (opt.snapshot_cadence > 0.0) {
    for (double t = opt.snapshot_cadence; t < spec.horizon * (1.0 - 1e-12);
         t += opt.snapshot_cadence)
      marks.push_back(t);
  }
  marks.push_back(spec.horizon);

  for (double mark : marks) {
    s.advance_to(rng, mark, opt);
    out.marks.push_back({mark, s.state(), s.counts()});
  }
  out.accepted = s.accepted_events();
  out.candidates = s.candidate_events();
  return out;
}

}  // namespace qsep
