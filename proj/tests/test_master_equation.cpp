// ===== Dense master-equation oracle tests =====

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "qsep/errors.hpp"
#include "qsep/master_equation.hpp"
#include "qsep/model.hpp"

using namespace qsep;

TEST_CASE("single site relaxes along the closed form", "[master_equation]") {
  // One site, two states: fill rate alpha + delta, drain rate beta + gamma.
  const model_spec spec = make_liggett_spec(1, 1.0, 0.8, 0.3, 0.6, 0.7);
  const rate_tuple r = spec.rates_at(0.0);
  const double fill = r.alpha + r.delta;
  const double drain = r.beta + r.gamma;
  const double lambda = fill + drain;  // acceleration is 1 for a single site
  const double rho_inf = fill / lambda;

  master_equation me(spec);
  REQUIRE(me.states() == 2);

  const Eigen::VectorXd mu0 = master_equation::point_distribution({0});
  for (double t : {0.05, 0.2, 0.7}) {
    const Eigen::VectorXd mu_t = me.evolve(mu0, t);
    const double p1 = mu_t[1];
    const double exact = rho_inf * (1.0 - std::exp(-lambda * t));
    CHECK(std::abs(p1 - exact) < 1e-12);
    CHECK(std::abs(mu_t.sum() - 1.0) < 1e-12);
  }
}

TEST_CASE("evolution preserves total mass and positivity", "[master_equation]") {
  const model_spec spec = make_liggett_spec(4, 1.0, 0.9, 0.2, 0.7, 0.5);
  master_equation me(spec);
  const Eigen::VectorXd mu0 =
      master_equation::product_distribution(4, {0.3, 0.3, 0.3, 0.3});
  CHECK(std::abs(mu0.sum() - 1.0) < 1e-14);
  const Eigen::VectorXd mu_t = me.evolve(mu0, 0.5);
  CHECK(std::abs(mu_t.sum() - 1.0) < 1e-12);
  for (int s = 0; s < mu_t.size(); ++s) CHECK(mu_t[s] >= 0.0);
}

TEST_CASE("balanced reservoirs give a flat stationary profile",
          "[master_equation]") {
  const model_spec spec = make_liggett_spec(3, 1.0, 0.7, 0.4, 0.4, 1.0);
  master_equation me(spec);
  const Eigen::VectorXd pi = me.stationary();
  CHECK(std::abs(pi.sum() - 1.0) < 1e-12);
  const Eigen::VectorXd rho = me.site_densities(pi);
  for (int s = 0; s < rho.size(); ++s) CHECK(std::abs(rho(s) - 0.4) < 1e-10);
}

TEST_CASE("long-time evolution reaches the stationary law",
          "[master_equation]") {
  const model_spec spec = make_liggett_spec(3, 1.0, 0.8, 0.25, 0.65, 50.0);
  master_equation me(spec);
  const Eigen::VectorXd pi = me.stationary();
  const Eigen::VectorXd mu0 = master_equation::point_distribution({1, 0, 1});
  const Eigen::VectorXd mu_t = me.evolve(mu0, 50.0);
  CHECK((mu_t - pi).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("state indexing round-trips", "[master_equation]") {
  const int n = 5;
  for (int idx = 0; idx < (1 << n); ++idx) {
    const configuration eta = master_equation::state_of(idx, n);
    CHECK(master_equation::state_index(eta) == idx);
  }
  CHECK(master_equation::state_index({1, 0, 0}) == 1);
  CHECK(master_equation::state_index({0, 0, 1}) == 4);
}

TEST_CASE("distribution constructors normalize", "[master_equation]") {
  const Eigen::VectorXd prod =
      master_equation::product_distribution(3, {0.2, 0.5, 0.9});
  CHECK(std::abs(prod.sum() - 1.0) < 1e-14);
  // P(eta = (1,0,1)) = 0.2 * 0.5 * 0.9.
  CHECK(prod[master_equation::state_index({1, 0, 1})] ==
        Catch::Approx(0.2 * 0.5 * 0.9));

  const Eigen::VectorXd point = master_equation::point_distribution({0, 1});
  CHECK(point.sum() == 1.0);
  CHECK(point[master_equation::state_index({0, 1})] == 1.0);
}

TEST_CASE("oracle rejects unsupported inputs", "[master_equation]") {
  CHECK_THROWS_AS(master_equation(make_liggett_spec(11, 1.0, 1.0, 0.3, 0.6, 1.0)),
                  config_error);
  model_spec ramped = make_liggett_spec(3, 1.0, 1.0, 0.3, 0.6, 1.0);
  std::get<liggett_boundary>(ramped.boundary).rho_bar_minus =
      schedule::linear_ramp(0.2, 0.8, 1.0);
  CHECK_THROWS_AS(master_equation(ramped), config_error);
}
