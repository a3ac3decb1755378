// ===== Finite-volume solver tests =====

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "qsep/burgers.hpp"
#include "qsep/errors.hpp"
#include "qsep/schedule.hpp"

using namespace qsep;

namespace {
burgers_solver make_solver(double rho_l, double rho_r, burgers_options opt) {
  return burgers_solver(1.0, schedule::constant(rho_l, 1.0),
                        schedule::constant(rho_r, 1.0), opt);
}
}  // namespace

TEST_CASE("two-cell hand example", "[burgers]") {
  burgers_options opt;
  opt.cells = 2;
  opt.epsilon = 1.0;
  burgers_solver solver = make_solver(0.3, 0.6, opt);

  // Default initialization interpolates the boundary data at cell centers.
  CHECK(solver.state()[0] == Catch::Approx(0.375));
  CHECK(solver.state()[1] == Catch::Approx(0.525));
  CHECK(solver.dx() == 0.5);
  CHECK(solver.max_stable_dt() == Catch::Approx(0.45));

  solver.set_state({0.3, 0.6});
  const std::vector<double> f = solver.interface_fluxes();
  REQUIRE(f.size() == 3);
  CHECK(f[0] == Catch::Approx(0.21));
  CHECK(f[1] == Catch::Approx(0.21));
  CHECK(f[2] == Catch::Approx(0.24));

  solver.step(0.1);
  CHECK(solver.time() == Catch::Approx(0.1));
  CHECK(solver.state()[0] == Catch::Approx(0.3));
  CHECK(solver.state()[1] == Catch::Approx(0.594));

  CHECK_THROWS_AS(solver.set_state({0.3}), config_error);
  CHECK_THROWS_AS(solver.set_state({0.3, 1.2}), config_error);
  CHECK_THROWS_AS(solver.step(0.0), config_error);
}

TEST_CASE("steady solve: low-density data relax to the left reservoir",
          "[burgers]") {
  burgers_options opt;
  opt.cells = 50;
  opt.epsilon = 0.01;
  burgers_solver solver = make_solver(0.3, 0.6, opt);
  const auto res = solver.run_to_steady(1e-12, 2'000'000, 2000);
  REQUIRE(res.converged);
  CHECK(res.flux_spread <= 1e-12);
  CHECK(res.flux_mean == Catch::Approx(0.21).margin(1e-9));
  for (double v : solver.state()) CHECK(std::abs(v - 0.3) < 1e-10);
}

TEST_CASE("steady solve: straddling data relax to the critical flux",
          "[burgers]") {
  burgers_options opt;
  opt.cells = 50;
  opt.epsilon = 0.01;
  burgers_solver solver = make_solver(0.8, 0.2, opt);
  const auto res = solver.run_to_steady(1e-6, 2'000'000, 2000);
  REQUIRE(res.converged);
  CHECK(std::abs(res.flux_mean - 0.25) <= 1e-3);
  // The bulk sits at the critical density.
  CHECK(std::abs(solver.state()[25] - 0.5) < 0.01);
}

TEST_CASE("advance_to lands exactly and respects the maximum principle",
          "[burgers]") {
  burgers_options opt;
  opt.cells = 32;
  opt.epsilon = 0.05;
  burgers_solver solver(1.0, schedule::linear_ramp(0.3, 0.7, 1.0),
                        schedule::constant(0.1, 1.0), opt);
  solver.advance_to(0.37);
  CHECK(solver.time() == 0.37);
  solver.advance_to(0.37);  // no-op
  CHECK(solver.time() == 0.37);
  solver.advance_to(1.0);
  CHECK(solver.time() == 1.0);
  for (double v : solver.state()) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
  CHECK_THROWS_AS(solver.advance_to(0.5), config_error);
}

TEST_CASE("constructor validation", "[burgers]") {
  burgers_options opt;
  opt.cells = 0;
  CHECK_THROWS_AS(make_solver(0.3, 0.6, opt), config_error);
  opt.cells = 10;
  opt.epsilon = 0.0;
  CHECK_THROWS_AS(make_solver(0.3, 0.6, opt), config_error);
  opt.epsilon = 0.01;
  opt.cfl = 1.5;
  CHECK_THROWS_AS(make_solver(0.3, 0.6, opt), config_error);
}
