// ===== Observable tests: averages, fields, currents, Young, entropy =====

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "qsep/engine.hpp"
#include "qsep/errors.hpp"
#include "qsep/model.hpp"
#include "qsep/observables.hpp"
#include "qsep/rng.hpp"
#include "qsep/theory.hpp"

using namespace qsep;

namespace {
configuration random_config(int n, double density, std::uint64_t seed) {
  philox4x32 rng(seed, 0);
  configuration eta(static_cast<std::size_t>(n));
  for (auto& s : eta) s = rng.next_bernoulli(density) ? 1 : 0;
  return eta;
}
}  // namespace

TEST_CASE("left block average hand values and preconditions", "[observables]") {
  const configuration eta{1, 0, 1, 1, 0};
  CHECK(left_block_average(eta, 2, 3) == Catch::Approx(2.0 / 3.0));
  CHECK(left_block_average(eta, 0, 1) == 1.0);
  CHECK(left_block_average(eta, 4, 5) == Catch::Approx(0.6));
  CHECK_THROWS_AS(left_block_average(eta, 1, 3), config_error);
  CHECK_THROWS_AS(left_block_average(eta, 5, 1), config_error);
  CHECK_THROWS_AS(left_block_average(eta, 2, 0), config_error);
}

TEST_CASE("triangular smoothing: constants, range, telescoping",
          "[observables]") {
  SECTION("constant configurations are fixed points") {
    const configuration ones(20, 1);
    const configuration zeros(20, 0);
    for (int c = 5; c <= 14; ++c) {
      CHECK(smoothed_average(ones, c, 5) == 1.0);
      CHECK(smoothed_average(zeros, c, 5) == 0.0);
    }
    CHECK_THROWS_AS(smoothed_average(ones, 4, 5), config_error);
    CHECK_THROWS_AS(smoothed_average(ones, 15, 5), config_error);
  }
  SECTION("the increment telescopes through block averages") {
    const int n = 64, K = 8;
    const configuration eta = random_config(n, 0.5, 404);
    for (int c = K; c <= n - K - 2; ++c) {
      const double lhs = smoothed_average(eta, c + 1, K) - smoothed_average(eta, c, K);
      const double rhs =
          (left_block_average(eta, c + K, K) - left_block_average(eta, c, K)) / K;
      CHECK(std::abs(lhs - rhs) <= 1e-15);
    }
  }
}

TEST_CASE("per-site density field integrates to the particle count",
          "[observables]") {
  const int n = 64;
  const configuration eta = random_config(n, 0.4, 17);
  const density_field f = density_field::per_site(eta);
  REQUIRE(f.cells() == n);
  CHECK(f.edges.front() == 0.0);
  CHECK(f.edges.back() == 1.0);
  CHECK(f.integral() ==
        Catch::Approx(double(particle_count(eta)) / n).margin(1e-12));
  CHECK(f.value_at(0.0) == double(eta[0]));
  CHECK(f.value_at((n - 0.5) / n) == double(eta[std::size_t(n) - 1]));
}

TEST_CASE("smoothed density field: strips, edges, mass", "[observables]") {
  const int n = 16, K = 3;
  const configuration ones(std::size_t(n), 1);
  const density_field f = density_field::smoothed(ones, K);
  REQUIRE(f.cells() == 2 + (n - 2 * K));
  const double e1 = double(2 * K + 1) / (2.0 * n);
  const double e2 = 1.0 - double(2 * K - 1) / (2.0 * n);
  CHECK(f.edges.front() == 0.0);
  CHECK(f.edges.back() == 1.0);
  CHECK(f.edges[1] == Catch::Approx(e1));
  CHECK(f.edges[f.edges.size() - 2] == Catch::Approx(e2));
  // Zero strips outside, exact ones inside.
  CHECK(f.value_at(0.0) == 0.0);
  CHECK(f.value_at(e1 - 1e-9) == 0.0);
  CHECK(f.value_at(e1) == 1.0);
  CHECK(f.value_at(e2 - 1e-9) == 1.0);
  CHECK(f.value_at(e2) == 0.0);
  CHECK(f.value_at(1.0) == 0.0);
  CHECK(f.integral() == Catch::Approx(e2 - e1).margin(1e-12));
  CHECK_THROWS_AS(density_field::smoothed(configuration(9, 1), 5), config_error);
}

TEST_CASE("microscopic current hand values", "[observables]") {
  SECTION("totally asymmetric") {
    const model_spec spec = make_liggett_spec(4, 1.0, 1.0, 0.3, 0.6, 1.0);
    const configuration eta{0, 1, 1, 0};
    CHECK(microscopic_current(spec, eta, 0.0, 0) == Catch::Approx(0.3));
    CHECK(microscopic_current(spec, eta, 0.0, 1) == 0.0);
    CHECK(microscopic_current(spec, eta, 0.0, 2) == 0.0);
    CHECK(microscopic_current(spec, eta, 0.0, 3) == Catch::Approx(1.0));
    CHECK(microscopic_current(spec, eta, 0.0, 4) == 0.0);
    CHECK_THROWS_AS(microscopic_current(spec, eta, 0.0, 5), config_error);
  }
  SECTION("partially asymmetric sees back flow") {
    const model_spec spec = make_liggett_spec(4, 1.0, 0.5, 0.3, 0.6, 1.0);
    const configuration eta{0, 1, 1, 0};
    // Only the reversed jump 1 -> 0 is possible across the first bulk bond.
    CHECK(microscopic_current(spec, eta, 0.0, 1) == Catch::Approx(-0.25));
  }
}

TEST_CASE("time-averaged current from crossing counts", "[observables]") {
  snapshot from, to;
  from.t = 1.0;
  to.t = 1.5;
  from.counts.reset(4);
  to.counts.reset(4);
  to.counts.h_plus[2] = 5;
  to.counts.h_minus[2] = 2;
  CHECK(time_averaged_current(from, to, 10.0, 2) == Catch::Approx(0.6));
  CHECK_THROWS_AS(time_averaged_current(to, from, 10.0, 2), config_error);
}

TEST_CASE("young histogram routing and concentration", "[observables]") {
  SECTION("cell routing") {
    young_histogram h(2.0, 4, 5, 10);
    h.add(1.1, 0.55, 0.3);
    CHECK(h.cell_weight(2, 2) == 1.0);
    CHECK(h.mass(2, 2, 3) == 1.0);
    CHECK(h.cell_weight(0, 0) == 0.0);
    h.add(2.0, 1.0, 1.0);  // top edges clamp into the last cells
    CHECK(h.cell_weight(3, 4) == 1.0);
    CHECK(h.mass(3, 4, 9) == 1.0);
  }
  SECTION("point mass concentrates fully") {
    young_histogram h(1.0, 1, 1, 20);
    h.add(0.3, 0.2, 0.512);
    CHECK(h.concentration(0, 0, 0.512) == 1.0);
  }
  SECTION("window admits adjacent bins only") {
    young_histogram h(1.0, 1, 1, 20);
    h.add(0.1, 0.5, 0.5, 3.0);
    h.add(0.1, 0.5, 0.62, 1.0);  // bin [0.60, 0.65): outside the window
    CHECK(h.concentration(0, 0, 0.5) == Catch::Approx(0.75));
    h.add(0.1, 0.5, 0.58, 1.0);  // bin [0.55, 0.60): boundary of the window
    CHECK(h.concentration(0, 0, 0.5) == Catch::Approx(0.8));
  }
  SECTION("smoothed coin-flip profiles concentrate near one half") {
    const int n = 256, K = 64, samples = 500;
    young_histogram h(1.0, 1, 1, 20);
    for (int s = 0; s < samples; ++s) {
      const configuration eta = random_config(n, 0.5, 900 + std::uint64_t(s));
      h.add(0.5, 0.5, smoothed_average(eta, n / 2, K));
    }
    CHECK(h.concentration(0, 0, 0.5) >= 0.9);
  }
}

TEST_CASE("bump test function calculus", "[observables]") {
  const double T = 2.0;
  bump_test_function psi(T);
  CHECK(psi.value(0.0, 1.0) == Catch::Approx(0.0).margin(1e-15));
  CHECK(psi.value(0.5, T / 2) == Catch::Approx(1.0));
  CHECK(psi.value(0.5, 0.0) == Catch::Approx(0.0).margin(1e-15));
  // d/dt at quarter period: sin(pi x) * (pi/T) sin(pi/..) — spot value.
  CHECK(psi.dt(0.5, T / 4) == Catch::Approx((3.14159265358979323846 / T)));
  // Exact x integral over a cell matches fine midpoint sums.
  const double xl = 0.3, xr = 0.42, t = 0.7;
  double mid = 0.0;
  const int pieces = 2000;
  for (int i = 0; i < pieces; ++i) {
    const double a = xl + (xr - xl) * i / pieces;
    const double b = xl + (xr - xl) * (i + 1) / pieces;
    mid += psi.value(0.5 * (a + b), t) * (b - a);
  }
  CHECK(psi.cell_integral(xl, xr, t) == Catch::Approx(mid).epsilon(1e-8));
  double mid_dt = 0.0;
  for (int i = 0; i < pieces; ++i) {
    const double a = xl + (xr - xl) * i / pieces;
    const double b = xl + (xr - xl) * (i + 1) / pieces;
    mid_dt += psi.dt(0.5 * (a + b), t) * (b - a);
  }
  CHECK(psi.cell_integral_dt(xl, xr, t) == Catch::Approx(mid_dt).epsilon(1e-8));
}

TEST_CASE("entropy production matches a closed form on a frozen trajectory",
          "[observables]") {
  // All-ones state, constant datum, uniform marks: the dpsi/dt trapezoid
  // vanishes, the sin^2 trapezoid is exactly T/2, and the Q term reduces to
  // three boundary evaluations of psi.
  const int n = 32, K = 4, steps = 16;
  const double T = 2.0;
  const model_spec spec = make_liggett_spec(n, 1.0, 1.0, 0.3, 0.6, T);

  trajectory traj;
  traj.initial_state = configuration(std::size_t(n), 1);
  for (int k = 0; k <= steps; ++k) {
    snapshot s;
    s.t = T * k / steps;
    s.state = traj.initial_state;
    s.counts.reset(n);
    traj.marks.push_back(s);
  }

  const double w = 0.3;
  const entropy_pair pair{entropy_pair_kind::kruzkov, 1.0};
  bump_test_function psi(T);
  entropy_production_options opt;
  opt.block_width = K;
  const double x_value =
      entropy_production(spec, traj, pair, schedule::constant(w, T), psi, opt);

  const double pi = 3.14159265358979323846;
  const double e1 = double(2 * K + 1) / (2.0 * n);
  const double e2 = 1.0 - double(2 * K - 1) / (2.0 * n);
  const double q_zero = pair.Q(0.0, w);
  const double q_one = pair.Q(1.0, w);
  const double q_sum = q_zero * (std::sin(pi * e1) - std::sin(0.0)) +
                       q_one * (std::sin(pi * e2) - std::sin(pi * e1)) +
                       q_zero * (std::sin(pi * 1.0) - std::sin(pi * e2));
  const double expected = 0.5 * T * q_sum;
  CHECK(std::abs(x_value - expected) < 1e-12);
}

TEST_CASE("entropy production needs marks", "[observables]") {
  const model_spec spec = make_liggett_spec(16, 1.0, 1.0, 0.3, 0.6, 1.0);
  trajectory traj;
  traj.initial_state = configuration(16, 0);
  const entropy_pair pair{entropy_pair_kind::lower, 1.0};
  bump_test_function psi(1.0);
  CHECK_THROWS_AS(
      entropy_production(spec, traj, pair, schedule::constant(0.3, 1.0), psi),
      config_error);
}
