// ===== Event engine tests: conservation, exactness, small-system law =====

#include <catch2/catch_amalgamated.hpp>

#include <cstdint>
#include <vector>

#include "qsep/engine.hpp"
#include "qsep/errors.hpp"
#include "qsep/master_equation.hpp"
#include "qsep/model.hpp"
#include "qsep/rng.hpp"
#include "qsep/stats.hpp"

using namespace qsep;

TEST_CASE("bond_set basic operations", "[engine]") {
  bond_set s(10);
  CHECK(s.size() == 0);
  s.insert(3);
  s.insert(7);
  s.insert(3);  // idempotent
  CHECK(s.size() == 2);
  CHECK(s.contains(3));
  CHECK(s.contains(7));
  CHECK_FALSE(s.contains(4));
  s.erase(3);
  CHECK_FALSE(s.contains(3));
  CHECK(s.size() == 1);
  CHECK(s.at(0) == 7);
  s.erase(3);  // idempotent
  CHECK(s.size() == 1);
}

TEST_CASE("conservation law holds pathwise", "[engine]") {
  struct case_spec {
    model_spec spec;
    double density;
  };
  std::vector<case_spec> cases;
  // Liggett, constant boundaries, several sizes and asymmetries.
  cases.push_back({make_liggett_spec(8, 1.0, 1.0, 0.3, 0.6, 0.5), 0.4});
  cases.push_back({make_liggett_spec(16, 0.75, 0.7, 0.8, 0.2, 0.5), 0.5});
  cases.push_back({make_liggett_spec(5, 1.0, 1.0, 0.5, 0.5, 1.0), 0.2});
  // Liggett with ramped boundaries.
  {
    model_spec spec = make_liggett_spec(12, 1.0, 1.0, 0.3, 0.6, 1.0);
    auto& lb = std::get<liggett_boundary>(spec.boundary);
    lb.rho_bar_minus = schedule::linear_ramp(0.2, 0.8, 1.0);
    lb.rho_bar_plus = schedule::cosine_ramp(0.7, 0.3, 1.0);
    cases.push_back({spec, 0.5});
  }
  // Reversible, defaults and explicit dials.
  cases.push_back({make_reversible_spec(8, 1.0, 1.0, 0.3, 0.6, 0.5), 0.4});
  cases.push_back({make_reversible_spec(10, 0.5, 0.6, 0.2, 0.9, 0.5, 4.0, 2.0), 0.6});
  {
    model_spec spec = make_reversible_spec(9, 1.0, 1.0, 0.4, 0.6, 1.0);
    auto& rb = std::get<reversible_boundary>(spec.boundary);
    rb.rho_minus = schedule::linear_ramp(0.1, 0.9, 1.0);
    cases.push_back({spec, 0.3});
  }

  std::uint64_t seed = 2026'0101;
  int idx = 0;
  for (const auto& c : cases) {
    CAPTURE(idx, c.spec.n, c.spec.is_liggett());
    run_options opt;
    opt.snapshot_cadence = c.spec.horizon / 4.0;
    const trajectory traj =
        run(c.spec, initial_condition::bernoulli(c.density), seed + idx, 0, opt);
    REQUIRE(traj.marks.size() >= 2);
    for (const auto& mark : traj.marks) {
      std::string detail;
      const bool ok =
          verify_conservation(traj.initial_state, mark.state, mark.counts, &detail);
      CAPTURE(mark.t, detail);
      CHECK(ok);
    }
    CHECK(traj.final_mark().t == c.spec.horizon);
    ++idx;
  }
}

TEST_CASE("advance_to hits the stop time exactly", "[engine]") {
  const model_spec spec = make_liggett_spec(6, 1.0, 1.0, 0.3, 0.6, 1.0);
  stepper st(spec, configuration{1, 0, 1, 0, 0, 1});
  philox4x32 rng(99, 0);
  st.advance_to(rng, 0.375);
  CHECK(st.time() == 0.375);
  st.advance_to(rng, 0.375);  // no-op
  CHECK(st.time() == 0.375);
  st.advance_to(rng, 1.0);
  CHECK(st.time() == 1.0);
  CHECK(st.accepted_events() <= st.candidate_events());
}

TEST_CASE("envelope self-check accepts valid runs", "[engine]") {
  model_spec spec = make_liggett_spec(10, 1.0, 0.8, 0.3, 0.6, 0.5);
  auto& lb = std::get<liggett_boundary>(spec.boundary);
  lb.rho_bar_minus = schedule::cosine_ramp(0.1, 0.9, 0.5);
  run_options opt;
  opt.check_envelope = true;
  CHECK_NOTHROW(run(spec, initial_condition::bernoulli(0.5), 7, 0, opt));

  model_spec rev = make_reversible_spec(10, 0.5, 0.6, 0.2, 0.8, 0.5);
  auto& rb = std::get<reversible_boundary>(rev.boundary);
  rb.rho_plus = schedule::linear_ramp(0.8, 0.2, 0.5);
  CHECK_NOTHROW(run(rev, initial_condition::bernoulli(0.5), 8, 0, opt));
}

TEST_CASE("candidate budget guard trips", "[engine]") {
  const model_spec spec = make_liggett_spec(32, 1.0, 1.0, 0.3, 0.6, 1.0);
  run_options opt;
  opt.max_candidates = 10;
  CHECK_THROWS_AS(run(spec, initial_condition::bernoulli(0.5), 5, 0, opt),
                  assertion_error);
}

TEST_CASE("step_event advances one accepted event at a time", "[engine]") {
  const model_spec spec = make_liggett_spec(8, 1.0, 1.0, 0.4, 0.5, 1.0);
  stepper st(spec, configuration{1, 1, 0, 0, 1, 0, 1, 0});
  philox4x32 rng(11, 0);
  const std::uint64_t before = st.accepted_events();
  const bool moved = st.step_event(rng);
  if (moved) CHECK(st.accepted_events() == before + 1);
  CHECK(st.time() > 0.0);
  CHECK(st.time() <= spec.horizon);
}

TEST_CASE("two-site law matches the master equation", "[engine][statistical]") {
  // Small enough to enumerate: 4 states, moderate time, fixed seed.
  const model_spec spec = make_liggett_spec(2, 1.0, 0.8, 0.35, 0.55, 0.3);
  master_equation me(spec);

  const double density = 0.5;
  Eigen::VectorXd mu0 =
      master_equation::product_distribution(2, {density, density});
  const Eigen::VectorXd mu_t = me.evolve(mu0, spec.horizon);

  const int replicas = 20000;
  std::vector<std::uint64_t> observed(4, 0);
  for (int r = 0; r < replicas; ++r) {
    const trajectory traj =
        run(spec, initial_condition::bernoulli(density), 31337, r);
    ++observed[master_equation::state_index(traj.final_mark().state)];
  }
  std::vector<double> expected(4);
  for (int s = 0; s < 4; ++s) expected[s] = mu_t[s] * replicas;

  const chi_square_result gof = chi_square_gof(expected, observed);
  CAPTURE(gof.statistic, gof.dof, gof.p_value);
  CHECK(gof.p_value >= 1e-3);
}
