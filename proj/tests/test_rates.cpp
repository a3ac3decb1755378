// ===== Boundary rate family and scaling diagnostic tests =====

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <string>

#include "qsep/errors.hpp"
#include "qsep/model.hpp"

using namespace qsep;

TEST_CASE("liggett rates reproduce hand values", "[rates]") {
  SECTION("balanced-side example") {
    // p = 0.7, left reservoir density 0.5.
    const rate_tuple r = liggett_rates(0.7, 0.5, 0.5);
    CHECK(r.alpha == Catch::Approx(0.35));
    CHECK(r.gamma == Catch::Approx(0.15));
    CHECK(r.lambda_minus == Catch::Approx(0.5));
    CHECK(r.rho_minus == Catch::Approx(0.7));
  }
  SECTION("asymmetric example") {
    const rate_tuple r = liggett_rates(0.7, 0.2, 0.9);
    CHECK(r.alpha == Catch::Approx(0.14));
    CHECK(r.beta == Catch::Approx(0.07));
    CHECK(r.gamma == Catch::Approx(0.24));
    CHECK(r.delta == Catch::Approx(0.27));
    CHECK(r.lambda_minus == Catch::Approx(0.38));
    CHECK(r.lambda_plus == Catch::Approx(0.34));
  }
  SECTION("validation") {
    CHECK_THROWS_AS(liggett_rates(0.5, 0.3, 0.3), config_error);  // p must exceed 1/2
    CHECK_THROWS_AS(liggett_rates(0.7, -0.1, 0.3), config_error);
    CHECK_THROWS_AS(liggett_rates(0.7, 0.3, 1.1), config_error);
  }
}

TEST_CASE("effective reservoir densities converge to the dial values as p -> 1/2",
          "[rates]") {
  const double p = 0.5 + 1e-6;
  const rate_tuple r = liggett_rates(p, 0.3, 0.8);
  CHECK(std::abs(r.rho_minus - 0.3) < 1e-5);
  CHECK(std::abs(r.rho_plus - 0.8) < 1e-5);
}

TEST_CASE("reversible rates: entry and exit split by density", "[rates]") {
  const rate_tuple r = reversible_rates(10.0, 1.0, 1.0, 0.3, 0.3);
  CHECK(r.alpha == Catch::Approx(3.0));
  CHECK(r.gamma == Catch::Approx(7.0));
  CHECK(r.rho_minus == Catch::Approx(0.3));
  CHECK(r.lambda_minus == Catch::Approx(10.0));
  CHECK_THROWS_AS(reversible_rates(0.0, 1.0, 1.0, 0.3, 0.3), config_error);
}

TEST_CASE("model_spec wires family parameters together", "[rates]") {
  const model_spec liggett = make_liggett_spec(
      256, 1.0, 1.0, schedule::constant(0.3, 1.0), schedule::constant(0.7, 1.0), 1.0);
  CHECK(liggett.jump_probability() == Catch::Approx(1.0));
  CHECK(liggett.lambda0() == Catch::Approx(1.0));
  CHECK(liggett.acceleration() == Catch::Approx(65536.0));
  CHECK(liggett.left_density_at(0.5) == Catch::Approx(0.3));

  const model_spec rev = make_reversible_spec(
      128, 1.0, 1.0, schedule::constant(0.3, 1.0), schedule::constant(0.6, 1.0), 1.0);
  CHECK(rev.sigma() == Catch::Approx(std::pow(128.0, 0.25)));
  CHECK(rev.sigma_tilde() == Catch::Approx(std::sqrt(128.0)));
  CHECK(rev.jump_probability() ==
        Catch::Approx(0.5 + 1.0 / (2.0 * std::pow(128.0, 0.25))));
  CHECK(rev.lambda0() == Catch::Approx(std::pow(128.0, 0.25)));
  // Effective bulk jump rates (sigma +- pbar)/2.
  const double right = rev.lambda0() * rev.jump_probability();
  const double left = rev.lambda0() * (1.0 - rev.jump_probability());
  CHECK(right == Catch::Approx((rev.sigma() + 1.0) / 2.0));
  CHECK(left == Catch::Approx((rev.sigma() - 1.0) / 2.0));

  // sigma >= pbar is required for a nonnegative left jump rate.
  CHECK_THROWS_AS(make_reversible_spec(16, 1.0, 1.0, schedule::constant(0.3, 1.0),
                                       schedule::constant(0.6, 1.0), 1.0, 0.5),
                  config_error);
}

TEST_CASE("scaling report: liggett window and block width", "[rates]") {
  const model_spec spec = make_liggett_spec(
      256, 1.0, 1.0, schedule::constant(0.3, 1.0), schedule::constant(0.7, 1.0), 1.0);
  const scaling_report rep = validate_scaling(spec);
  CHECK(rep.block_width == 64);
  CHECK(rep.window_low == Catch::Approx(16.0));
  CHECK(rep.window_high == Catch::Approx(256.0));
  CHECK(rep.window_ok);
  CHECK(rep.all_ok);
  CHECK(rep.violations().empty());
}

TEST_CASE("scaling report: liggett needs a > 1/2", "[rates]") {
  const model_spec spec = make_liggett_spec(
      256, 0.4, 1.0, schedule::constant(0.3, 1.0), schedule::constant(0.7, 1.0), 1.0);
  const scaling_report rep = validate_scaling(spec);
  CHECK_FALSE(rep.all_ok);
  bool found = false;
  for (const auto& v : rep.violations())
    found = found || v.find("a > 1/2 required") != std::string::npos;
  CHECK(found);
}

TEST_CASE("scaling report: reversible defaults at n = 128", "[rates]") {
  const model_spec spec = make_reversible_spec(
      128, 1.0, 1.0, schedule::constant(0.3, 1.0), schedule::constant(0.6, 1.0), 1.0);
  const scaling_report rep = validate_scaling(spec);
  CHECK(rep.block_width == 21);
  CHECK(rep.window_ok);
  CHECK(rep.all_ok);
}

TEST_CASE("scaling report: exactly meeting a proxy is flagged as borderline",
          "[rates]") {
  // n = 16, sigma = 2, sigma_tilde = 4: sigma * sigma_tilde == 2 sqrt(n).
  const model_spec spec = make_reversible_spec(
      16, 1.0, 1.0, schedule::constant(0.3, 1.0), schedule::constant(0.6, 1.0), 1.0,
      2.0, 4.0);
  const scaling_report rep = validate_scaling(spec);
  CHECK(rep.all_ok);
  bool flagged = false;
  for (const auto& v : rep.violations())
    flagged = flagged || v.find("borderline") != std::string::npos;
  CHECK(flagged);
}
