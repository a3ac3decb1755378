// ===== Monotone coupling tests: order, marginals, discrepancy flow =====

#include <catch2/catch_amalgamated.hpp>

#include <cstdint>
#include <vector>

#include "qsep/coupling.hpp"
#include "qsep/engine.hpp"
#include "qsep/errors.hpp"
#include "qsep/master_equation.hpp"
#include "qsep/model.hpp"
#include "qsep/stats.hpp"

using namespace qsep;

namespace {
bool sitewise_ordered(const configuration& lo, const configuration& up) {
  for (std::size_t s = 0; s < lo.size(); ++s)
    if (lo[s] > up[s]) return false;
  return true;
}

void check_invariants(const model_spec& lower_spec, const coupled_trajectory& traj) {
  for (const auto& m : traj.marks) {
    CAPTURE(m.t);
    CHECK(sitewise_ordered(m.lower, m.upper));
    for (int b = 0; b <= lower_spec.n; ++b) {
      CAPTURE(b);
      CHECK(m.counts_upper.h(b) - m.counts_lower.h(b) == m.hdelta.h(b));
    }
    std::string detail;
    CHECK(verify_conservation(traj.initial_lower, m.lower, m.counts_lower, &detail));
    CHECK(verify_conservation(traj.initial_upper, m.upper, m.counts_upper, &detail));
  }
}
}  // namespace

TEST_CASE("coupling validation enforces compatibility and ordering",
          "[coupling]") {
  const model_spec lo = make_liggett_spec(8, 1.0, 0.8, 0.2, 0.5, 1.0);
  const model_spec up = make_liggett_spec(8, 1.0, 0.8, 0.6, 0.5, 1.0);
  CHECK_NOTHROW(validate_coupling(lo, up));
  // Swapped roles break alpha <= alpha*.
  CHECK_THROWS_AS(validate_coupling(up, lo), config_error);
  // Mismatched lattices, horizons, drifts, families.
  CHECK_THROWS_AS(
      validate_coupling(lo, make_liggett_spec(9, 1.0, 0.8, 0.6, 0.5, 1.0)),
      config_error);
  CHECK_THROWS_AS(
      validate_coupling(lo, make_liggett_spec(8, 1.0, 0.8, 0.6, 0.5, 2.0)),
      config_error);
  CHECK_THROWS_AS(
      validate_coupling(lo, make_liggett_spec(8, 1.0, 0.9, 0.6, 0.5, 1.0)),
      config_error);
  CHECK_THROWS_AS(
      validate_coupling(lo, make_reversible_spec(8, 1.0, 0.8, 0.6, 0.5, 1.0)),
      config_error);
  // Ramped lower dial that stays below the upper one is accepted.
  model_spec ramped = lo;
  std::get<liggett_boundary>(ramped.boundary).rho_bar_minus =
      schedule::linear_ramp(0.2, 0.4, 1.0);
  CHECK_NOTHROW(validate_coupling(ramped, up));
  // Ramped dial that crosses is rejected.
  std::get<liggett_boundary>(ramped.boundary).rho_bar_minus =
      schedule::linear_ramp(0.2, 0.7, 1.0);
  CHECK_THROWS_AS(validate_coupling(ramped, up), config_error);
}

TEST_CASE("coupled stepper requires an ordered start", "[coupling]") {
  const model_spec lo = make_liggett_spec(3, 1.0, 0.8, 0.2, 0.5, 1.0);
  const model_spec up = make_liggett_spec(3, 1.0, 0.8, 0.6, 0.5, 1.0);
  CHECK_THROWS_AS(coupled_stepper(lo, up, {1, 0, 0}, {0, 1, 1}), config_error);
  CHECK_NOTHROW(coupled_stepper(lo, up, {0, 1, 0}, {1, 1, 0}));
}

TEST_CASE("coupled run preserves order, counts, and conservation",
          "[coupling]") {
  model_spec lo = make_liggett_spec(16, 1.0, 0.8, 0.2, 0.6, 1.0);
  model_spec up = make_liggett_spec(16, 1.0, 0.8, 0.5, 0.6, 1.0);
  std::get<liggett_boundary>(lo.boundary).rho_bar_minus =
      schedule::linear_ramp(0.2, 0.4, 1.0);
  run_options opt;
  opt.snapshot_cadence = 0.25;
  const coupled_trajectory traj =
      run_coupled(lo, up, initial_condition::bernoulli(0.3),
                  initial_condition::bernoulli(0.5), 2024, 0, opt);
  REQUIRE(traj.marks.size() == 5);
  check_invariants(lo, traj);
  CHECK(traj.accepted <= traj.candidates);
}

TEST_CASE("reversible chains couple the same way", "[coupling]") {
  const model_spec lo = make_reversible_spec(12, 0.5, 0.6, 0.2, 0.5, 0.5);
  const model_spec up = make_reversible_spec(12, 0.5, 0.6, 0.6, 0.5, 0.5);
  run_options opt;
  opt.snapshot_cadence = 0.1;
  const coupled_trajectory traj =
      run_coupled(lo, up, initial_condition::bernoulli(0.2),
                  initial_condition::bernoulli(0.6), 99, 0, opt);
  check_invariants(lo, traj);
}

TEST_CASE("shared boundaries freeze one discrepancy direction", "[coupling]") {
  SECTION("shared right boundary: h-delta across it never decreases") {
    const model_spec lo = make_liggett_spec(6, 1.0, 0.8, 0.2, 0.5, 1.0);
    const model_spec up = make_liggett_spec(6, 1.0, 0.8, 0.6, 0.5, 1.0);
    for (std::uint64_t r = 0; r < 8; ++r) {
      const coupled_trajectory traj =
          run_coupled(lo, up, initial_condition::bernoulli(0.3),
                      initial_condition::bernoulli(0.5), 555, r);
      CHECK(traj.final_mark().hdelta.h_minus[6] == 0);
    }
  }
  SECTION("shared left boundary: h-delta across it never increases") {
    const model_spec lo = make_liggett_spec(6, 1.0, 0.8, 0.3, 0.4, 1.0);
    const model_spec up = make_liggett_spec(6, 1.0, 0.8, 0.3, 0.8, 1.0);
    for (std::uint64_t r = 0; r < 8; ++r) {
      const coupled_trajectory traj =
          run_coupled(lo, up, initial_condition::bernoulli(0.2),
                      initial_condition::bernoulli(0.4), 556, r);
      CHECK(traj.final_mark().hdelta.h_plus[0] == 0);
    }
  }
}

TEST_CASE("each coupled marginal follows its own law",
          "[coupling][statistical]") {
  const model_spec lo = make_liggett_spec(3, 1.0, 0.8, 0.2, 0.5, 0.4);
  const model_spec up = make_liggett_spec(3, 1.0, 0.8, 0.6, 0.5, 0.4);
  const double rho_lo = 0.3, rho_up = 0.5;

  master_equation me_lo(lo), me_up(up);
  const Eigen::VectorXd mu_lo = me_lo.evolve(
      master_equation::product_distribution(3, {rho_lo, rho_lo, rho_lo}), 0.4);
  const Eigen::VectorXd mu_up = me_up.evolve(
      master_equation::product_distribution(3, {rho_up, rho_up, rho_up}), 0.4);

  const int replicas = 20000;
  std::vector<std::uint64_t> obs_lo(8, 0), obs_up(8, 0);
  for (int r = 0; r < replicas; ++r) {
    const coupled_trajectory traj =
        run_coupled(lo, up, initial_condition::bernoulli(rho_lo),
                    initial_condition::bernoulli(rho_up), 424242, std::uint64_t(r));
    ++obs_lo[master_equation::state_index(traj.final_mark().lower)];
    ++obs_up[master_equation::state_index(traj.final_mark().upper)];
  }
  std::vector<double> exp_lo(8), exp_up(8);
  for (int s = 0; s < 8; ++s) {
    exp_lo[std::size_t(s)] = mu_lo[s] * replicas;
    exp_up[std::size_t(s)] = mu_up[s] * replicas;
  }
  const chi_square_result g_lo = chi_square_gof(exp_lo, obs_lo);
  const chi_square_result g_up = chi_square_gof(exp_up, obs_up);
  CAPTURE(g_lo.statistic, g_lo.p_value, g_up.statistic, g_up.p_value);
  CHECK(g_lo.p_value >= 1e-3);
  CHECK(g_up.p_value >= 1e-3);
}
