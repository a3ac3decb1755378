#pragma once
// qsep/coupling.hpp — monotone coupling of two open chains. The two chains
// share the bulk clocks (basic coupling: every bond-direction alarm lets each
// chain jump if it can) and use a boundary coupling that keeps the sitewise
// order eta <= eta' whenever the boundary rates are ordered
//
//   alpha <= alpha*,  gamma >= gamma*,  beta >= beta*,  delta <= delta*
//
// (starred = upper chain): the upper chain injects at least as much and
// extracts at most as much. The boundary generator splits each side into a
// joint part, run at the smaller injection (resp. the smaller extraction)
// rate and moving both chains, plus a single-chain remainder:
//
//   left:   joint create  alpha (1 - eta_1)         both chains
//           upper create  (alpha* - alpha)(1 - eta'_1)
//           joint kill    gamma* eta'_1              both chains
//           lower kill    (gamma - gamma*) eta_1
//   right:  joint create  delta (1 - eta_n)          both chains
//           upper create  (delta* - delta)(1 - eta'_n)
//           joint kill    beta* eta'_n               both chains
//           lower kill    (beta - beta*) eta_n
//
// Each chain's marginal law is exactly its own open-chain dynamics (the
// joint + remainder rates add up to the single-chain rates on every
// configuration with eta <= eta'), and no event can break the order.
//
// Alongside the two chains' crossing counts, the coupling tracks the
// discrepancy flow hdelta: hdelta_plus(b) counts events that raise
// h'(b) - h(b) (an upper-only rightward crossing or a lower-only leftward
// one), hdelta_minus(b) the opposite, so that
//   h'(b) - h(b) = hdelta_plus(b) - hdelta_minus(b)   for every bond, always.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "qsep/engine.hpp"
#include "qsep/errors.hpp"
#include "qsep/model.hpp"
#include "qsep/rng.hpp"

namespace qsep {

// ===== Compatibility and ordering validation =====

/// Checks that the two specs can be coupled (same lattice, clocks, bulk
/// drift, family, horizon) and that the boundary rates are ordered so the
/// coupling is monotone. Rate ordering is probed on the merged schedule
/// grid; constant and shared schedules are therefore checked exactly.
inline void validate_coupling(const model_spec& lower, const model_spec& upper) {
  if (lower.n != upper.n) throw config_error("coupling: chains must share n");
  if (lower.a != upper.a || lower.p_bar != upper.p_bar)
    throw config_error("coupling: chains must share the bulk dynamics");
  if (lower.horizon != upper.horizon)
    throw config_error("coupling: chains must share the horizon");
  if (lower.is_liggett() != upper.is_liggett())
    throw config_error("coupling: chains must use the same boundary family");
  if (std::abs(lower.lambda0() - upper.lambda0()) > 1e-12 ||
      std::abs(lower.jump_probability() - upper.jump_probability()) > 1e-12)
    throw config_error("coupling: chains must share the bulk clock");

  std::vector<double> marks = lower.left_schedule().breakpoints();
  for (const schedule* s : {&lower.right_schedule(), &upper.left_schedule(),
                            &upper.right_schedule()})
    for (double t : s->breakpoints()) marks.push_back(t);
  std::sort(marks.begin(), marks.end());
  marks.erase(std::unique(marks.begin(), marks.end()), marks.end());

  const auto check = [&](double t) {
    const rate_tuple lo = lower.rates_at(t);
    const rate_tuple up = upper.rates_at(t);
    const double tol = 1e-12;
    if (lo.alpha > up.alpha + tol || lo.gamma < up.gamma - tol ||
        lo.beta < up.beta - tol || lo.delta > up.delta + tol)
      throw config_error(
          "coupling: boundary rates are not ordered (need alpha <= alpha*, "
          "gamma >= gamma*, beta >= beta*, delta <= delta*) at t = " +
          std::to_string(t));
  };
  for (std::size_t m = 0; m + 1 < marks.size(); ++m) {
    const int probes = 16;
    for (int k = 0; k <= probes; ++k)
      check(marks[m] + (marks[m + 1] - marks[m]) * k / double(probes));
  }
}

// ===== Coupled trajectory record =====

struct coupled_snapshot {
  double t = 0.0;
  configuration lower;
  configuration upper;
  counting_processes counts_lower;
  counting_processes counts_upper;
  counting_processes hdelta;  // discrepancy flow; see header comment
};

struct coupled_trajectory {
  configuration initial_lower;
  configuration initial_upper;
  std::vector<coupled_snapshot> marks;
  std::uint64_t accepted = 0;
  std::uint64_t candidates = 0;

  const coupled_snapshot& final_mark() const { return marks.back(); }
};

// ===== Coupled stepper =====

class coupled_stepper {
 public:
  coupled_stepper(model_spec lower_spec, model_spec upper_spec, configuration lower,
                  configuration upper)
      : lower_spec_(std::move(lower_spec)), upper_spec_(std::move(upper_spec)),
        lower_(std::move(lower)), upper_(std::move(upper)) {
    lower_spec_.validate();
    upper_spec_.validate();
    validate_coupling(lower_spec_, upper_spec_);
    const int n = lower_spec_.n;
    if (int(lower_.size()) != n || int(upper_.size()) != n)
      throw config_error("coupled_stepper: configuration size mismatch");
    for (int s = 0; s < n; ++s)
      if (lower_[std::size_t(s)] > upper_[std::size_t(s)])
        throw config_error("coupled_stepper: initial states must be ordered");
    counts_lower_.reset(n);
    counts_upper_.reset(n);
    hdelta_.reset(n);
    breaks_ = lower_spec_.left_schedule().breakpoints();
    for (const schedule* s :
         {&lower_spec_.right_schedule(), &upper_spec_.left_schedule(),
          &upper_spec_.right_schedule()})
      for (double t : s->breakpoints()) breaks_.push_back(t);
    std::sort(breaks_.begin(), breaks_.end());
    breaks_.erase(std::unique(breaks_.begin(), breaks_.end()), breaks_.end());
  }

  double time() const { return t_; }
  const configuration& lower_state() const { return lower_; }
  const configuration& upper_state() const { return upper_; }
  const counting_processes& lower_counts() const { return counts_lower_; }
  const counting_processes& upper_counts() const { return counts_upper_; }
  const counting_processes& discrepancy_counts() const { return hdelta_; }
  std::uint64_t accepted_events() const { return accepted_; }
  std::uint64_t candidate_events() const { return candidates_; }

  /// Sitewise order eta <= eta' (an invariant of the dynamics).
  bool ordered() const {
    for (std::size_t s = 0; s < lower_.size(); ++s)
      if (lower_[s] > upper_[s]) return false;
    return true;
  }

  /// h'(b) - h(b) == hdelta(b) for every bond (an invariant by construction;
  /// exposed so tests can assert the bookkeeping never drifts).
  bool discrepancy_consistent() const {
    for (int b = 0; b <= lower_spec_.n; ++b)
      if (counts_upper_.h(b) - counts_lower_.h(b) != hdelta_.h(b)) return false;
    return true;
  }

  void advance_to(philox4x32& rng, double stop_time, const run_options& opt = {}) {
    const double horizon = lower_spec_.horizon;
    if (stop_time < t_ - 1e-12 * std::max(1.0, horizon) ||
        stop_time > horizon * (1.0 + 1e-12))
      throw config_error("coupled_stepper: stop time outside [current time, horizon]");
    stop_time = std::min(stop_time, horizon);
    const int n = lower_spec_.n;
    const double accel = lower_spec_.acceleration();
    const double lambda0 = lower_spec_.lambda0();
    const double p = lower_spec_.jump_probability();

    while (t_ < stop_time) {
      double window_end = stop_time;
      auto it = std::upper_bound(breaks_.begin(), breaks_.end(), t_);
      if (it != breaks_.end()) window_end = std::min(window_end, *it);
      if (opt.max_window_width > 0.0)
        window_end = std::min(window_end, t_ + opt.max_window_width);

      // Bulk alarms ring on every bond regardless of occupation (each chain
      // then moves if it can), so the bulk envelope is exact and state-free.
      const double bulk_right = accel * lambda0 * p * double(n - 1);
      const double bulk_left = accel * lambda0 * (1.0 - p) * double(n - 1);
      const auto env = boundary_sup(t_, window_end);
      double total = bulk_right + bulk_left;
      for (double e : env.slots) total += accel * e;
      if (total > opt.max_envelope)
        throw config_error("coupled_stepper: envelope rate exceeds the configured cap");
      if (!(total > 0.0)) {
        t_ = window_end;
        continue;
      }

      const double wait = rng.next_exponential(total);
      if (t_ + wait >= window_end) {
        t_ = window_end;
        continue;
      }
      const double t_cand = t_ + wait;
      if (++candidates_ > opt.max_candidates)
        throw assertion_error("coupled_stepper: candidate budget exhausted");

      double u = rng.next_double() * total;
      bool fired = false;
      if (u < bulk_right) {
        fired = bulk_move(1 + int(rng.next_below(std::uint64_t(n - 1))), true);
      } else if ((u -= bulk_right) < bulk_left) {
        fired = bulk_move(1 + int(rng.next_below(std::uint64_t(n - 1))), false);
      } else {
        u -= bulk_left;
        const rate_tuple lo = lower_spec_.rates_at(t_cand);
        const rate_tuple up = upper_spec_.rates_at(t_cand);
        const double scaled = u / accel;  // envelopes were accumulated unscaled
        fired = boundary_move(env, scaled, lo, up);
      }

      t_ = t_cand;
      if (fired) ++accepted_;
    }
    t_ = stop_time;
  }

 private:
  // Envelope slots, unscaled by the acceleration: joint-create-left,
  // upper-create-left, joint-kill-left, lower-kill-left, then the same four
  // on the right.
  struct boundary_envelopes {
    double slots[8] = {0, 0, 0, 0, 0, 0, 0, 0};
  };

  boundary_envelopes boundary_sup(double t0, double t1) const {
    const auto sup = [&](const model_spec& s, bool left, bool create) {
      // sup over [t0,t1] of one channel rate, exact because channel rates
      // are monotone images of the density schedules.
      const schedule& sch = left ? s.left_schedule() : s.right_schedule();
      const double rho_max = sch.max_on(t0, t1);
      const double rho_min = sch.min_on(t0, t1);
      if (s.is_liggett()) {
        const double p = s.jump_probability();
        if (left) return create ? p * rho_max : (1.0 - p) * (1.0 - rho_min);
        return create ? (1.0 - p) * rho_max : p * (1.0 - rho_min);
      }
      const auto& rb = std::get<reversible_boundary>(s.boundary);
      const double c = s.sigma_tilde() * (left ? rb.lambda_bar_minus : rb.lambda_bar_plus);
      return create ? c * rho_max : c * (1.0 - rho_min);
    };
    const auto inf = [&](const model_spec& s, bool left, bool create) {
      const schedule& sch = left ? s.left_schedule() : s.right_schedule();
      const double rho_max = sch.max_on(t0, t1);
      const double rho_min = sch.min_on(t0, t1);
      if (s.is_liggett()) {
        const double p = s.jump_probability();
        if (left) return create ? p * rho_min : (1.0 - p) * (1.0 - rho_max);
        return create ? (1.0 - p) * rho_min : p * (1.0 - rho_max);
      }
      const auto& rb = std::get<reversible_boundary>(s.boundary);
      const double c = s.sigma_tilde() * (left ? rb.lambda_bar_minus : rb.lambda_bar_plus);
      return create ? c * rho_min : c * (1.0 - rho_max);
    };

    boundary_envelopes e;
    // Left: joint create at the lower alpha, joint kill at the upper gamma.
    e.slots[0] = sup(lower_spec_, true, true);                                   // alpha
    e.slots[1] = std::max(0.0, sup(upper_spec_, true, true) - inf(lower_spec_, true, true));
    e.slots[2] = sup(upper_spec_, true, false);                                  // gamma*
    e.slots[3] = std::max(0.0, sup(lower_spec_, true, false) - inf(upper_spec_, true, false));
    // Right: joint create at the lower delta, joint kill at the upper beta.
    e.slots[4] = sup(lower_spec_, false, true);                                  // delta
    e.slots[5] = std::max(0.0, sup(upper_spec_, false, true) - inf(lower_spec_, false, true));
    e.slots[6] = sup(upper_spec_, false, false);                                 // beta*
    e.slots[7] = std::max(0.0, sup(lower_spec_, false, false) - inf(upper_spec_, false, false));
    return e;
  }

  bool bulk_move(int b, bool rightward) {
    bool any = false;
    const auto able = [&](const configuration& eta) {
      const std::uint8_t a = eta[std::size_t(b - 1)], c = eta[std::size_t(b)];
      return rightward ? (a == 1 && c == 0) : (a == 0 && c == 1);
    };
    const bool lo = able(lower_), up = able(upper_);
    if (lo) {
      move(lower_, b, rightward);
      (rightward ? counts_lower_.h_plus : counts_lower_.h_minus)[std::size_t(b)]++;
      any = true;
    }
    if (up) {
      move(upper_, b, rightward);
      (rightward ? counts_upper_.h_plus : counts_upper_.h_minus)[std::size_t(b)]++;
      any = true;
    }
    if (lo != up) {
      // One-chain move shifts the discrepancy: an upper-only rightward (or
      // lower-only leftward) crossing raises h' - h at this bond.
      const bool raises = (up && rightward) || (lo && !rightward);
      (raises ? hdelta_.h_plus : hdelta_.h_minus)[std::size_t(b)]++;
    }
    return any;
  }

  static void move(configuration& eta, int b, bool rightward) {
    eta[std::size_t(b - 1)] = rightward ? 0 : 1;
    eta[std::size_t(b)] = rightward ? 1 : 0;
  }

  bool boundary_move(const boundary_envelopes& env, double u, const rate_tuple& lo,
                     const rate_tuple& up) {
    const int n = lower_spec_.n;
    const std::size_t last = std::size_t(n) - 1;
    // Walk the eight slots; within each, u acts as the thinning variable.
    // slot 0: joint left create, rate alpha_lower * (1 - eta_1)
    if (u < env.slots[0]) {
      if (u < lo.alpha * (1 - lower_.front())) {
        const bool upper_was_empty = upper_.front() == 0;
        lower_.front() = 1;
        ++counts_lower_.h_plus[0];
        if (upper_was_empty) {
          upper_.front() = 1;
          ++counts_upper_.h_plus[0];
        } else {
          ++hdelta_.h_minus[0];  // lower-only rightward crossing of bond 0
        }
        return true;
      }
      return false;
    }
    u -= env.slots[0];
    // slot 1: upper-only left create, rate (alpha* - alpha) * (1 - eta'_1)
    if (u < env.slots[1]) {
      if (u < std::max(0.0, up.alpha - lo.alpha) * (1 - upper_.front())) {
        upper_.front() = 1;
        ++counts_upper_.h_plus[0];
        ++hdelta_.h_plus[0];
        return true;
      }
      return false;
    }
    u -= env.slots[1];
    // slot 2: joint left kill, rate gamma* * eta'_1
    if (u < env.slots[2]) {
      if (u < up.gamma * upper_.front()) {
        const bool lower_was_full = lower_.front() == 1;
        upper_.front() = 0;
        ++counts_upper_.h_minus[0];
        if (lower_was_full) {
          lower_.front() = 0;
          ++counts_lower_.h_minus[0];
        } else {
          ++hdelta_.h_minus[0];  // upper-only leftward crossing of bond 0
        }
        return true;
      }
      return false;
    }
    u -= env.slots[2];
    // slot 3: lower-only left kill, rate (gamma - gamma*) * eta_1
    if (u < env.slots[3]) {
      if (u < std::max(0.0, lo.gamma - up.gamma) * lower_.front()) {
        lower_.front() = 0;
        ++counts_lower_.h_minus[0];
        ++hdelta_.h_plus[0];
        return true;
      }
      return false;
    }
    u -= env.slots[3];
    // slot 4: joint right create, rate delta_lower * (1 - eta_n)
    if (u < env.slots[4]) {
      if (u < lo.delta * (1 - lower_[last])) {
        const bool upper_was_empty = upper_[last] == 0;
        lower_[last] = 1;
        ++counts_lower_.h_minus[std::size_t(n)];
        if (upper_was_empty) {
          upper_[last] = 1;
          ++counts_upper_.h_minus[std::size_t(n)];
        } else {
          ++hdelta_.h_plus[std::size_t(n)];  // lower-only leftward crossing
        }
        return true;
      }
      return false;
    }
    u -= env.slots[4];
    // slot 5: upper-only right create, rate (delta* - delta) * (1 - eta'_n)
    if (u < env.slots[5]) {
      if (u < std::max(0.0, up.delta - lo.delta) * (1 - upper_[last])) {
        upper_[last] = 1;
        ++counts_upper_.h_minus[std::size_t(n)];
        ++hdelta_.h_minus[std::size_t(n)];
        return true;
      }
      return false;
    }
    u -= env.slots[5];
    // slot 6: joint right kill, rate beta* * eta'_n
    if (u < env.slots[6]) {
      if (u < up.beta * upper_[last]) {
        const bool lower_was_full = lower_[last] == 1;
        upper_[last] = 0;
        ++counts_upper_.h_plus[std::size_t(n)];
        if (lower_was_full) {
          lower_[last] = 0;
          ++counts_lower_.h_plus[std::size_t(n)];
        } else {
          ++hdelta_.h_plus[std::size_t(n)];  // upper-only rightward crossing
        }
        return true;
      }
      return false;
    }
    u -= env.slots[6];
    // slot 7: lower-only right kill, rate (beta - beta*) * eta_n
    if (u < std::max(0.0, lo.beta - up.beta) * lower_[last]) {
      lower_[last] = 0;
      ++counts_lower_.h_plus[std::size_t(n)];
      ++hdelta_.h_minus[std::size_t(n)];
      return true;
    }
    return false;
  }

  model_spec lower_spec_;
  model_spec upper_spec_;
  configuration lower_;
  configuration upper_;
  counting_processes counts_lower_;
  counting_processes counts_upper_;
  counting_processes hdelta_;
  std::vector<double> breaks_;
  double t_ = 0.0;
  std::uint64_t accepted_ = 0;
  std::uint64_t candidates_ = 0;
};

// ===== One-call driver =====

inline coupled_trajectory run_coupled(const model_spec& lower_spec,
                                      const model_spec& upper_spec,
                                      const initial_condition& lower_init,
                                      const initial_condition& upper_init,
                                      std::uint64_t seed, std::uint64_t replica = 0,
                                      const run_options& opt = {}) {
  philox4x32 rng(seed, replica);
  // Monotone coupling of the initial laws: one shared uniform per site,
  // thresholded against each recipe's density. Each marginal is exact, and
  // the pair starts ordered whenever the densities are pointwise ordered.
  const int n = lower_spec.n;
  configuration lo(static_cast<std::size_t>(n)), up(static_cast<std::size_t>(n));
  for (int s = 0; s < n; ++s) {
    const double u = rng.next_double();
    lo[std::size_t(s)] = u < lower_init.site_density(s, n) ? 1 : 0;
    up[std::size_t(s)] = u < upper_init.site_density(s, n) ? 1 : 0;
  }
  coupled_stepper cs(lower_spec, upper_spec, std::move(lo), std::move(up));

  coupled_trajectory out;
  out.initial_lower = cs.lower_state();
  out.initial_upper = cs.upper_state();
  std::vector<double> marks{0.0};
  if (opt.snapshot_cadence > 0.0) {
    for (double t = opt.snapshot_cadence; t < lower_spec.horizon * (1.0 - 1e-12);
         t += opt.snapshot_cadence)
      marks.push_back(t);
  }
  marks.push_back(lower_spec.horizon);
  for (double mark : marks) {
    cs.advance_to(rng, mark, opt);
    out.marks.push_back({mark, cs.lower_state(), cs.upper_state(), cs.lower_counts(),
                         cs.upper_counts(), cs.discrepancy_counts()});
  }
  out.accepted = cs.accepted_events();
  out.candidates = cs.candidate_events();
  return out;
}

}  // namespace qsep
