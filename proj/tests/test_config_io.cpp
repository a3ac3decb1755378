// ===== Configuration parsing, hashing, and manifest tests =====

#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "qsep/config_io.hpp"
#include "qsep/errors.hpp"

using namespace qsep;
using Catch::Matchers::ContainsSubstring;

TEST_CASE("strict json flags unknown and missing keys", "[config_io]") {
  const json j = {{"family", "liggett"}, {"typo_key", 1}};
  strict_json v(j, "config");
  model_config mc;
  mc.read(v);
  CHECK_THROWS_WITH(v.finish(), ContainsSubstring("typo_key"));

  strict_json w(j, "config");
  CHECK_THROWS_WITH(w.take("nope"), ContainsSubstring("nope"));
  CHECK_THROWS_AS(strict_json(json(3), "config"), config_error);
}

TEST_CASE("schedules parse from numbers, objects, and segment arrays",
          "[config_io]") {
  SECTION("bare number is a constant") {
    const schedule s = schedule_from_json(json(0.42), 2.0, "x");
    CHECK(s.is_constant());
    CHECK(s.horizon() == 2.0);
    CHECK(s.value(1.3) == 0.42);
  }
  SECTION("object spans the horizon") {
    const schedule s =
        schedule_from_json(json{{"shape", "cosine"}, {"from", 0.2}, {"to", 0.8}},
                           1.5, "x");
    CHECK(s.value(0.0) == Catch::Approx(0.2));
    CHECK(s.value(0.75) == Catch::Approx(0.5));
    CHECK(s.value(1.5) == Catch::Approx(0.8));
    const schedule c = schedule_from_json(
        json{{"shape", "constant"}, {"value", 0.7}}, 1.0, "x");
    CHECK(c.is_constant());
    CHECK(c.value(0.5) == 0.7);
  }
  SECTION("segment array tiles the horizon") {
    const json j = json::array(
        {json{{"t0", 0.0}, {"t1", 0.5}, {"shape", "constant"}, {"from", 0.3}},
         json{{"t0", 0.5}, {"t1", 1.0}, {"shape", "linear"}, {"from", 0.3}, {"to", 0.7}}});
    const schedule s = schedule_from_json(j, 1.0, "x");
    CHECK(s.value(0.25) == Catch::Approx(0.3));
    CHECK(s.value(0.75) == Catch::Approx(0.5));
    CHECK(s.value(1.0) == Catch::Approx(0.7));
    // Round trip through the serializer.
    const schedule back = schedule_from_json(schedule_to_json(s), 1.0, "x");
    for (double t : {0.0, 0.2, 0.5, 0.6, 0.9, 1.0})
      CHECK(back.value(t) == Catch::Approx(s.value(t)));
  }
  SECTION("rejections") {
    CHECK_THROWS_AS(schedule_from_json(json{{"shape", "quadratic"}}, 1.0, "x"),
                    config_error);
    CHECK_THROWS_WITH(
        schedule_from_json(
            json{{"shape", "linear"}, {"from", 0.0}, {"to", 1.0}, {"slope", 2.0}},
            1.0, "x"),
        ContainsSubstring("slope"));
    CHECK_THROWS_AS(schedule_from_json(json("fast"), 1.0, "x"), config_error);
  }
}

TEST_CASE("model config reads, serializes, and builds specs", "[config_io]") {
  SECTION("defaults survive an empty object") {
    const json j = json::object();
    strict_json v(j, "config");
    model_config mc;
    mc.read(v);
    v.finish();
    const model_spec spec = mc.to_spec();
    CHECK(spec.n == 128);
    CHECK(spec.is_liggett());
    CHECK(spec.jump_probability() == 1.0);
    CHECK(spec.left_density_at(0.0) == Catch::Approx(0.3));
  }
  SECTION("reversible round trip") {
    const json j = {{"family", "reversible"},
                    {"n", 64},
                    {"a", 0.5},
                    {"pbar", 0.6},
                    {"horizon", 2.0},
                    {"rho_minus", 0.25},
                    {"rho_plus", json{{"shape", "linear"}, {"from", 0.6}, {"to", 0.4}}},
                    {"sigma", 3.0},
                    {"sigma_tilde", 5.0},
                    {"lambda_bar_minus", 1.5},
                    {"lambda_bar_plus", 0.5}};
    strict_json v(j, "config");
    model_config mc;
    mc.read(v);
    v.finish();
    const model_spec spec = mc.to_spec();
    CHECK_FALSE(spec.is_liggett());
    CHECK(spec.sigma() == 3.0);
    CHECK(spec.sigma_tilde() == 5.0);
    CHECK(spec.right_density_at(2.0) == Catch::Approx(0.4));
    const rate_tuple r = spec.rates_at(0.0);
    CHECK(r.alpha == Catch::Approx(1.875));
    CHECK(r.gamma == Catch::Approx(5.625));
    CHECK(r.beta == Catch::Approx(1.0));
    CHECK(r.delta == Catch::Approx(1.5));

    model_config back;
    strict_json v2(mc.to_json(), "config");
    back.read(v2);
    v2.finish();
    CHECK(back.to_json() == mc.to_json());
  }
  SECTION("horizon change re-spans default schedules") {
    const json j = {{"horizon", 3.0}};
    strict_json v(j, "config");
    model_config mc;
    mc.read(v);
    v.finish();
    const model_spec spec = mc.to_spec();  // validates schedule horizons
    CHECK(spec.horizon == 3.0);
    CHECK(spec.left_density_at(2.5) == Catch::Approx(0.3));
  }
}

TEST_CASE("fnv1a hashing is canonical", "[config_io]") {
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");

  json j1, j2;
  j1["beta"] = 1;
  j1["alpha"] = 2;
  j2["alpha"] = 2;
  j2["beta"] = 1;
  CHECK(config_hash(j1) == config_hash(j2));  // key order is canonicalized
  CHECK(config_hash(j1) == fnv1a_hex(j1.dump()));
}

TEST_CASE("manifest is written and parseable", "[config_io]") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "qsep_manifest_test";
  fs::create_directories(dir);

  json cfg;
  cfg["family"] = "liggett";
  cfg["n"] = 16;
  write_manifest(dir, cfg, 777, 1.25, "2026-01-01T00:00:00Z");

  const json m = load_json_file(dir / "manifest.json");
  CHECK(m.at("config_hash").get<std::string>() == config_hash(cfg));
  CHECK(m.at("seed").get<std::uint64_t>() == 777);
  CHECK(m.at("versions").at("qsep").get<std::string>() == version_string);
  CHECK(m.at("wall_time_seconds").get<double>() == Catch::Approx(1.25));
  CHECK(m.at("started_at_utc").get<std::string>() == "2026-01-01T00:00:00Z");

  fs::remove_all(dir);
  CHECK_THROWS_AS(load_json_file(dir / "manifest.json"), config_error);
}
