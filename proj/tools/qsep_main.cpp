// ===== qsep command-line front end =====
//
// Verbs:
//   simulate   replica runs of one chain; snapshots, counts, profiles, currents
//   phase      steady-profile classification for given reservoir densities
//   sweep      phase classification over a density grid
//   burgers    finite-volume solver (steady or transient)
//   couple     monotone two-chain coupling runs
//   entropy    entropy-production samples over replicas
//   oracle     exact master-equation reference for small systems
//
// Exit codes: 0 success, 1 configuration error, 2 internal assertion or
// unexpected failure. Diagnostics are one-line JSON objects on stderr. Data
// files are byte-reproducible for a fixed config and seed; wall-clock
// information goes only into manifest.json.

#include <chrono>
#include <cstdint>
#include <ctime>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qsep/burgers.hpp"
#include "qsep/config_io.hpp"
#include "qsep/coupling.hpp"
#include "qsep/csv.hpp"
#include "qsep/engine.hpp"
#include "qsep/errors.hpp"
#include "qsep/master_equation.hpp"
#include "qsep/model.hpp"
#include "qsep/observables.hpp"
#include "qsep/parallel.hpp"
#include "qsep/stats.hpp"
#include "qsep/theory.hpp"

namespace {

using namespace qsep;

void diag(const std::string& level, const std::string& message) {
  json d;
  d["level"] = level;
  d["message"] = message;
  std::cerr << d.dump() << '\n';
}

std::string utc_now() {
  const std::time_t tt =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

double elapsed_seconds(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ===== Flag-over-config merging =====
//
// Every option that mirrors a config key registers an applier; after parsing,
// appliers copy the values the user actually passed into the config object,
// so flags override the file and the merged object is re-validated strictly.

struct verb_context {
  std::string config_path;
  std::string out_dir = "qsep_out";
  bool emit_config = false;
  std::vector<std::function<void(json&)>> appliers;

  json merged() const {
    json cfg = config_path.empty() ? json::object() : load_json_file(config_path);
    if (!cfg.is_object()) throw config_error("config: top level must be a JSON object");
    for (const auto& apply : appliers) apply(cfg);
    return cfg;
  }
};

template <typename T>
void track(verb_context& ctx, CLI::Option* opt, const std::string& key, const T& storage) {
  ctx.appliers.push_back([opt, key, &storage](json& cfg) {
    if (opt->count() > 0) cfg[key] = storage;
  });
}

void add_common_options(CLI::App* cmd, verb_context& ctx, bool writes_files) {
  cmd->add_option("--config", ctx.config_path, "JSON configuration file (strict keys)");
  if (writes_files)
    cmd->add_option("--out", ctx.out_dir, "output directory (created if missing)");
  cmd->add_flag("--emit-config", ctx.emit_config,
                "print the effective configuration and exit");
}

struct model_flag_storage {
  std::string family;
  int n = 0;
  double a = 0, pbar = 0, horizon = 0;
  double rho_minus = 0, rho_plus = 0;
  double sigma = 0, sigma_tilde = 0;
};

void add_model_options(CLI::App* cmd, verb_context& ctx, model_flag_storage& s) {
  track(ctx, cmd->add_option("--family", s.family, "boundary family: liggett or reversible"),
        "family", s.family);
  track(ctx, cmd->add_option("--n", s.n, "number of sites"), "n", s.n);
  track(ctx, cmd->add_option("--a", s.a, "acceleration exponent"), "a", s.a);
  track(ctx, cmd->add_option("--pbar", s.pbar, "bulk drift 2p - 1"), "pbar", s.pbar);
  track(ctx, cmd->add_option("--horizon", s.horizon, "time horizon"), "horizon", s.horizon);
  track(ctx, cmd->add_option("--rho-minus", s.rho_minus, "left reservoir density (constant)"),
        "rho_minus", s.rho_minus);
  track(ctx, cmd->add_option("--rho-plus", s.rho_plus, "right reservoir density (constant)"),
        "rho_plus", s.rho_plus);
  track(ctx, cmd->add_option("--sigma", s.sigma, "reversible boundary scale (0 = default)"),
        "sigma", s.sigma);
  track(ctx, cmd->add_option("--sigma-tilde", s.sigma_tilde,
                             "reversible boundary intensity (0 = default)"),
        "sigma_tilde", s.sigma_tilde);
}

std::filesystem::path prepare_out_dir(const verb_context& ctx) {
  const std::filesystem::path dir(ctx.out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw config_error("cannot create output directory " + dir.string());
  return dir;
}

int emit_and_exit(const json& effective) {
  std::cout << effective.dump(2) << '\n';
  return 0;
}

// ===== simulate =====

int run_simulate(const verb_context& ctx) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::string started = utc_now();
  json cfg = ctx.merged();
  strict_json v(cfg, "config");
  model_config mc;
  mc.read(v);
  const int replicas = v.take_or<int>("replicas", 4);
  const std::uint64_t seed = v.take_or<std::uint64_t>("seed", 12345);
  double cadence = v.take_or<double>("cadence", 0.0);
  const double init_density = v.take_or<double>("init_density", 0.5);
  const int bond_groups = v.take_or<int>("bond_groups", 4);
  v.finish();
  if (replicas < 1) throw config_error("config: replicas must be >= 1");
  if (init_density < 0.0 || init_density > 1.0)
    throw config_error("config: init_density must lie in [0, 1]");

  const model_spec spec = mc.to_spec();
  if (cadence <= 0.0) cadence = spec.horizon / 10.0;
  if (bond_groups < 1 || bond_groups > spec.n + 1)
    throw config_error("config: bond_groups must lie in [1, n + 1]");

  json effective = mc.to_json();
  effective["replicas"] = replicas;
  effective["seed"] = seed;
  effective["cadence"] = cadence;
  effective["init_density"] = init_density;
  effective["bond_groups"] = bond_groups;
  if (ctx.emit_config) return emit_and_exit(effective);

  run_options opt;
  opt.snapshot_cadence = cadence;
  std::vector<trajectory> trajs(static_cast<std::size_t>(replicas));
  parallel_for(replicas, [&](int r) {
    trajs[std::size_t(r)] =
        run(spec, initial_condition::bernoulli(init_density), seed, std::uint64_t(r), opt);
  });

  const auto dir = prepare_out_dir(ctx);
  const int n = spec.n;
  const std::size_t marks = trajs.front().marks.size();

  csv_writer snaps(dir / "snapshots.csv", {"replica", "t", "site", "eta"});
  csv_writer counts(dir / "counts.csv", {"replica", "t", "bond", "h_plus", "h_minus"});
  for (int r = 0; r < replicas; ++r) {
    for (const auto& m : trajs[std::size_t(r)].marks) {
      for (int s = 0; s < n; ++s) snaps.row(r, m.t, s, int(m.state[std::size_t(s)]));
      for (int b = 0; b <= n; ++b)
        counts.row(r, m.t, b, m.counts.h_plus[std::size_t(b)],
                   m.counts.h_minus[std::size_t(b)]);
    }
  }

  csv_writer profile(dir / "density_profile.csv", {"t", "x_cell", "mean", "stderr"});
  for (std::size_t m = 0; m < marks; ++m) {
    for (int s = 0; s < n; ++s) {
      running_stats stat;
      for (int r = 0; r < replicas; ++r)
        stat.add(double(trajs[std::size_t(r)].marks[m].state[std::size_t(s)]));
      profile.row(trajs.front().marks[m].t, (s + 0.5) / double(n), stat.mean(),
                  stat.standard_error());
    }
  }

  csv_writer current(dir / "current.csv", {"t_window", "bond_group", "flux", "stderr"});
  const double accel = spec.acceleration();
  for (std::size_t m = 0; m + 1 < marks; ++m) {
    for (int g = 0; g < bond_groups; ++g) {
      const int b_lo = g * (n + 1) / bond_groups;
      const int b_hi = (g + 1) * (n + 1) / bond_groups;
      running_stats stat;
      for (int r = 0; r < replicas; ++r) {
        const auto& from = trajs[std::size_t(r)].marks[m];
        const auto& to = trajs[std::size_t(r)].marks[m + 1];
        double flux = 0.0;
        for (int b = b_lo; b < b_hi; ++b)
          flux += time_averaged_current(from, to, accel, b);
        stat.add(flux / double(b_hi - b_lo));
      }
      current.row(trajs.front().marks[m + 1].t, g, stat.mean(), stat.standard_error());
    }
  }

  write_manifest(dir, effective, seed, elapsed_seconds(t0), started);
  std::uint64_t accepted = 0;
  for (const auto& tr : trajs) accepted += tr.accepted;
  std::cout << "simulate: replicas=" << replicas << " marks=" << marks
            << " accepted_events=" << accepted << " out=" << dir.string() << '\n';
  return 0;
}

// ===== phase =====

int run_phase(const verb_context& ctx) {
  json cfg = ctx.merged();
  strict_json v(cfg, "config");
  model_config mc;
  mc.read(v);
  const double t_eval = v.take_or<double>("t", 0.0);
  v.finish();

  const model_spec spec = mc.to_spec();
  json effective = mc.to_json();
  effective["t"] = t_eval;
  if (ctx.emit_config) return emit_and_exit(effective);

  const double rm = spec.left_density_at(t_eval);
  const double rp = spec.right_density_at(t_eval);
  const quasi_static_point q = quasi_static_profile(spec.p_bar, rm, rp);
  std::cout << phase_name(q.label) << " bulk_density=" << format_double(q.bulk_density)
            << " current=" << format_double(q.current) << " unique=" << (q.unique ? 1 : 0)
            << '\n';
  return 0;
}

// ===== sweep =====

int run_sweep(const verb_context& ctx) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::string started = utc_now();
  json cfg = ctx.merged();
  strict_json v(cfg, "config");
  model_config mc;
  mc.read(v);
  const std::vector<double> default_grid{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  const auto rm_values = v.take_or<std::vector<double>>("rho_minus_values", default_grid);
  const auto rp_values = v.take_or<std::vector<double>>("rho_plus_values", default_grid);
  v.finish();
  if (rm_values.empty() || rp_values.empty())
    throw config_error("config: sweep grids must be nonempty");

  json effective = mc.to_json();
  effective["rho_minus_values"] = rm_values;
  effective["rho_plus_values"] = rp_values;
  if (ctx.emit_config) return emit_and_exit(effective);

  const auto dir = prepare_out_dir(ctx);
  csv_writer out(dir / "sweep.csv",
                 {"rho_minus", "rho_plus", "label", "bulk_density", "current"});
  for (double rm : rm_values)
    for (double rp : rp_values) {
      const quasi_static_point q = quasi_static_profile(mc.p_bar, rm, rp);
      out.row(rm, rp, phase_name(q.label), q.bulk_density, q.current);
    }
  write_manifest(dir, effective, 0, elapsed_seconds(t0), started);
  std::cout << "sweep: points=" << rm_values.size() * rp_values.size()
            << " out=" << dir.string() << '\n';
  return 0;
}

// ===== burgers =====

int run_burgers(const verb_context& ctx) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::string started = utc_now();
  json cfg = ctx.merged();
  strict_json v(cfg, "config");
  model_config mc;
  mc.read(v);
  burgers_options opt;
  opt.cells = v.take_or<int>("cells", opt.cells);
  opt.epsilon = v.take_or<double>("epsilon", opt.epsilon);
  opt.cfl = v.take_or<double>("cfl", opt.cfl);
  const std::string mode = v.take_or<std::string>("mode", "steady");
  const double flux_tol = v.take_or<double>("flux_tol", 1e-8);
  const std::uint64_t max_steps = v.take_or<std::uint64_t>("max_steps", 20'000'000);
  const std::uint64_t check_every = v.take_or<std::uint64_t>("check_every", 1000);
  double cadence = v.take_or<double>("cadence", 0.0);
  v.finish();
  if (mode != "steady" && mode != "transient")
    throw config_error("config: mode must be \"steady\" or \"transient\"");

  json effective = mc.to_json();
  effective["cells"] = opt.cells;
  effective["epsilon"] = opt.epsilon;
  effective["cfl"] = opt.cfl;
  effective["mode"] = mode;
  if (mode == "steady") {
    effective["flux_tol"] = flux_tol;
    effective["max_steps"] = max_steps;
    effective["check_every"] = check_every;
  } else {
    if (cadence <= 0.0) cadence = mc.horizon / 10.0;
    effective["cadence"] = cadence;
  }
  if (ctx.emit_config) return emit_and_exit(effective);

  burgers_solver solver(mc.p_bar, mc.rho_minus, mc.rho_plus, opt);
  const auto dir = prepare_out_dir(ctx);
  csv_writer state_csv(dir / "burgers.csv", {"epsilon", "t", "cell", "rho"});
  csv_writer flux_csv(dir / "burgers_flux.csv", {"epsilon", "t", "interface", "flux"});
  const auto dump = [&]() {
    const auto& rho = solver.state();
    for (int m = 0; m < solver.cells(); ++m)
      state_csv.row(opt.epsilon, solver.time(), m, rho[std::size_t(m)]);
    const auto f = solver.interface_fluxes();
    for (std::size_t i = 0; i < f.size(); ++i)
      flux_csv.row(opt.epsilon, solver.time(), int(i), f[i]);
  };

  if (mode == "steady") {
    const auto res = solver.run_to_steady(flux_tol, max_steps, check_every);
    dump();
    write_manifest(dir, effective, 0, elapsed_seconds(t0), started);
    std::cout << "burgers steady: converged=" << (res.converged ? 1 : 0)
              << " steps=" << res.steps << " flux_mean=" << format_double(res.flux_mean)
              << " flux_spread=" << format_double(res.flux_spread)
              << " out=" << dir.string() << '\n';
    if (!res.converged)
      diag("warning", "burgers steady solve did not reach flux_tol before max_steps");
  } else {
    dump();
    for (double t = cadence; t < mc.horizon * (1.0 - 1e-12); t += cadence) {
      solver.advance_to(t);
      dump();
    }
    solver.advance_to(mc.horizon);
    dump();
    write_manifest(dir, effective, 0, elapsed_seconds(t0), started);
    std::cout << "burgers transient: t=" << format_double(solver.time())
              << " out=" << dir.string() << '\n';
  }
  return 0;
}

// ===== couple =====

int run_couple(const verb_context& ctx) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::string started = utc_now();
  json cfg = ctx.merged();
  strict_json v(cfg, "config");
  model_config mc;  // the lower chain
  mc.read(v);
  json upper_rm_json = v.has("upper_rho_minus") ? v.take("upper_rho_minus") : json();
  json upper_rp_json = v.has("upper_rho_plus") ? v.take("upper_rho_plus") : json();
  const int replicas = v.take_or<int>("replicas", 4);
  const std::uint64_t seed = v.take_or<std::uint64_t>("seed", 12345);
  double cadence = v.take_or<double>("cadence", 0.0);
  const double init_lower = v.take_or<double>("init_density_lower", 0.3);
  const double init_upper = v.take_or<double>("init_density_upper", 0.6);
  v.finish();
  if (replicas < 1) throw config_error("config: replicas must be >= 1");
  if (init_lower > init_upper)
    throw config_error("config: init_density_lower must not exceed init_density_upper");

  const model_spec lower = mc.to_spec();
  model_config upper_mc = mc;
  if (!upper_rm_json.is_null())
    upper_mc.rho_minus = schedule_from_json(upper_rm_json, mc.horizon, "upper_rho_minus");
  if (!upper_rp_json.is_null())
    upper_mc.rho_plus = schedule_from_json(upper_rp_json, mc.horizon, "upper_rho_plus");
  const model_spec upper = upper_mc.to_spec();
  validate_coupling(lower, upper);
  if (cadence <= 0.0) cadence = lower.horizon / 4.0;

  json effective = mc.to_json();
  effective["upper_rho_minus"] = schedule_to_json(upper_mc.rho_minus);
  effective["upper_rho_plus"] = schedule_to_json(upper_mc.rho_plus);
  effective["replicas"] = replicas;
  effective["seed"] = seed;
  effective["cadence"] = cadence;
  effective["init_density_lower"] = init_lower;
  effective["init_density_upper"] = init_upper;
  if (ctx.emit_config) return emit_and_exit(effective);

  run_options opt;
  opt.snapshot_cadence = cadence;
  std::vector<coupled_trajectory> trajs(static_cast<std::size_t>(replicas));
  parallel_for(replicas, [&](int r) {
    trajs[std::size_t(r)] =
        run_coupled(lower, upper, initial_condition::bernoulli(init_lower),
                    initial_condition::bernoulli(init_upper), seed, std::uint64_t(r), opt);
  });

  const auto dir = prepare_out_dir(ctx);
  csv_writer out(dir / "coupling.csv", {"replica", "t", "site", "eta_lower", "eta_upper"});
  std::int64_t final_hdelta = 0;
  for (int r = 0; r < replicas; ++r) {
    for (const auto& m : trajs[std::size_t(r)].marks)
      for (int s = 0; s < lower.n; ++s)
        out.row(r, m.t, s, int(m.lower[std::size_t(s)]), int(m.upper[std::size_t(s)]));
    final_hdelta += trajs[std::size_t(r)].final_mark().hdelta.h(lower.n / 2);
  }
  write_manifest(dir, effective, seed, elapsed_seconds(t0), started);
  std::cout << "couple: replicas=" << replicas
            << " mean_central_hdelta=" << format_double(double(final_hdelta) / replicas)
            << " out=" << dir.string() << '\n';
  return 0;
}

// ===== entropy =====

int run_entropy(const verb_context& ctx) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::string started = utc_now();
  json cfg = ctx.merged();
  strict_json v(cfg, "config");
  model_config mc;
  mc.read(v);
  const std::string pair_name = v.take_or<std::string>("pair", "all");
  const int replicas = v.take_or<int>("replicas", 8);
  const std::uint64_t seed = v.take_or<std::uint64_t>("seed", 12345);
  double cadence = v.take_or<double>("cadence", 0.0);
  const json datum_json = v.has("datum") ? v.take("datum") : json("left");
  const int block_width = v.take_or<int>("block_width", 0);
  const double init_density = v.take_or<double>("init_density", -1.0);
  v.finish();
  if (replicas < 1) throw config_error("config: replicas must be >= 1");

  std::vector<entropy_pair_kind> kinds;
  if (pair_name == "all")
    kinds = {entropy_pair_kind::kruzkov, entropy_pair_kind::lower,
             entropy_pair_kind::upper};
  else if (pair_name == "kruzkov")
    kinds = {entropy_pair_kind::kruzkov};
  else if (pair_name == "lower")
    kinds = {entropy_pair_kind::lower};
  else if (pair_name == "upper")
    kinds = {entropy_pair_kind::upper};
  else
    throw config_error("config: pair must be kruzkov, lower, upper, or all");

  const model_spec spec = mc.to_spec();
  if (cadence <= 0.0) cadence = spec.horizon / 64.0;
  schedule datum;
  std::string datum_label;
  if (datum_json.is_string()) {
    datum_label = datum_json.get<std::string>();
    if (datum_label == "left")
      datum = spec.left_schedule();
    else if (datum_label == "right")
      datum = spec.right_schedule();
    else
      throw config_error("config: datum must be \"left\", \"right\", or a number");
  } else if (datum_json.is_number()) {
    datum = schedule::constant(datum_json.get<double>(), spec.horizon);
    datum_label = format_double(datum_json.get<double>());
  } else {
    throw config_error("config: datum must be \"left\", \"right\", or a number");
  }
  const double init =
      init_density >= 0.0 ? init_density : spec.left_density_at(0.0);

  json effective = mc.to_json();
  effective["pair"] = pair_name;
  effective["replicas"] = replicas;
  effective["seed"] = seed;
  effective["cadence"] = cadence;
  effective["datum"] = datum_json;
  effective["block_width"] = block_width;
  effective["init_density"] = init;
  if (ctx.emit_config) return emit_and_exit(effective);

  run_options opt;
  opt.snapshot_cadence = cadence;
  entropy_production_options ep_opt;
  ep_opt.block_width = block_width;
  bump_test_function psi(spec.horizon);

  std::vector<std::vector<double>> x_values(kinds.size(),
                                            std::vector<double>(std::size_t(replicas)));
  parallel_for(replicas, [&](int r) {
    const trajectory traj =
        run(spec, initial_condition::bernoulli(init), seed, std::uint64_t(r), opt);
    for (std::size_t k = 0; k < kinds.size(); ++k) {
      const entropy_pair pair{kinds[k], spec.p_bar};
      x_values[k][std::size_t(r)] =
          entropy_production(spec, traj, pair, datum, psi, ep_opt);
    }
  });

  const auto dir = prepare_out_dir(ctx);
  csv_writer out(dir / "entropy.csv", {"N", "pair", "replica", "X_value"});
  for (std::size_t k = 0; k < kinds.size(); ++k)
    for (int r = 0; r < replicas; ++r)
      out.row(spec.n, entropy_pair_name(kinds[k]), r, x_values[k][std::size_t(r)]);
  write_manifest(dir, effective, seed, elapsed_seconds(t0), started);

  for (std::size_t k = 0; k < kinds.size(); ++k) {
    running_stats stat;
    for (double x : x_values[k]) stat.add(x);
    std::cout << "entropy " << entropy_pair_name(kinds[k]) << " datum=" << datum_label
              << ": mean=" << format_double(stat.mean())
              << " stderr=" << format_double(stat.standard_error())
              << " replicas=" << replicas << '\n';
  }
  return 0;
}

// ===== oracle =====

int run_oracle(const verb_context& ctx) {
  json cfg = ctx.merged();
  strict_json v(cfg, "config");
  model_config mc;
  mc.read(v);
  const std::string mode = v.take_or<std::string>("mode", "evolve");
  const double init_density = v.take_or<double>("init_density", 0.5);
  const double t_eval = v.take_or<double>("t", -1.0);
  v.finish();
  if (mode != "evolve" && mode != "stationary")
    throw config_error("config: mode must be \"evolve\" or \"stationary\"");

  const model_spec spec = mc.to_spec();
  json effective = mc.to_json();
  effective["mode"] = mode;
  effective["init_density"] = init_density;
  effective["t"] = t_eval < 0.0 ? spec.horizon : t_eval;
  if (ctx.emit_config) return emit_and_exit(effective);

  master_equation me(spec);
  Eigen::VectorXd mu;
  if (mode == "stationary") {
    mu = me.stationary();
  } else {
    const std::vector<double> site_density(std::size_t(spec.n), init_density);
    mu = me.evolve(master_equation::product_distribution(spec.n, site_density),
                   t_eval < 0.0 ? spec.horizon : t_eval);
  }
  const Eigen::VectorXd rho = me.site_densities(mu);
  std::cout << "oracle " << mode << ": n=" << spec.n << " states=" << me.states() << '\n';
  for (int s = 0; s < spec.n; ++s)
    std::cout << "site=" << s << " rho=" << format_double(rho(s)) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"open asymmetric exclusion in the quasi-static scaling"};
  app.require_subcommand(1);

  verb_context sim_ctx, phase_ctx, sweep_ctx, burgers_ctx, couple_ctx, entropy_ctx,
      oracle_ctx;
  model_flag_storage sim_m, phase_m, sweep_m, burgers_m, couple_m, entropy_m, oracle_m;

  CLI::App* sim = app.add_subcommand("simulate", "replica runs of one open chain");
  add_common_options(sim, sim_ctx, true);
  add_model_options(sim, sim_ctx, sim_m);
  int sim_replicas = 0;
  std::uint64_t sim_seed = 0;
  double sim_cadence = 0, sim_init = 0;
  track(sim_ctx, sim->add_option("--replicas", sim_replicas, "independent replicas"),
        "replicas", sim_replicas);
  track(sim_ctx, sim->add_option("--seed", sim_seed, "base RNG seed"), "seed", sim_seed);
  track(sim_ctx, sim->add_option("--cadence", sim_cadence, "snapshot spacing"),
        "cadence", sim_cadence);
  track(sim_ctx, sim->add_option("--init-density", sim_init, "initial Bernoulli density"),
        "init_density", sim_init);

  CLI::App* phase = app.add_subcommand("phase", "steady-profile classification");
  add_common_options(phase, phase_ctx, false);
  add_model_options(phase, phase_ctx, phase_m);
  double phase_t = 0;
  track(phase_ctx, phase->add_option("--t", phase_t, "evaluation time for the schedules"),
        "t", phase_t);

  CLI::App* sweep = app.add_subcommand("sweep", "phase classification over a grid");
  add_common_options(sweep, sweep_ctx, true);
  add_model_options(sweep, sweep_ctx, sweep_m);

  CLI::App* burgers = app.add_subcommand("burgers", "finite-volume solver");
  add_common_options(burgers, burgers_ctx, true);
  add_model_options(burgers, burgers_ctx, burgers_m);
  int b_cells = 0;
  double b_eps = 0;
  std::string b_mode;
  track(burgers_ctx, burgers->add_option("--cells", b_cells, "finite-volume cells"),
        "cells", b_cells);
  track(burgers_ctx, burgers->add_option("--epsilon", b_eps, "quasi-static rate"),
        "epsilon", b_eps);
  track(burgers_ctx, burgers->add_option("--mode", b_mode, "steady or transient"),
        "mode", b_mode);

  CLI::App* couple = app.add_subcommand("couple", "monotone two-chain coupling");
  add_common_options(couple, couple_ctx, true);
  add_model_options(couple, couple_ctx, couple_m);
  int c_replicas = 0;
  std::uint64_t c_seed = 0;
  double c_upper_rm = 0, c_upper_rp = 0;
  track(couple_ctx, couple->add_option("--replicas", c_replicas, "independent replicas"),
        "replicas", c_replicas);
  track(couple_ctx, couple->add_option("--seed", c_seed, "base RNG seed"), "seed", c_seed);
  track(couple_ctx,
        couple->add_option("--upper-rho-minus", c_upper_rm,
                           "upper chain left density (constant)"),
        "upper_rho_minus", c_upper_rm);
  track(couple_ctx,
        couple->add_option("--upper-rho-plus", c_upper_rp,
                           "upper chain right density (constant)"),
        "upper_rho_plus", c_upper_rp);

  CLI::App* entropy = app.add_subcommand("entropy", "entropy-production samples");
  add_common_options(entropy, entropy_ctx, true);
  add_model_options(entropy, entropy_ctx, entropy_m);
  int e_replicas = 0;
  std::uint64_t e_seed = 0;
  std::string e_pair;
  track(entropy_ctx, entropy->add_option("--replicas", e_replicas, "independent replicas"),
        "replicas", e_replicas);
  track(entropy_ctx, entropy->add_option("--seed", e_seed, "base RNG seed"), "seed", e_seed);
  track(entropy_ctx,
        entropy->add_option("--pair", e_pair, "kruzkov, lower, upper, or all"), "pair",
        e_pair);

  CLI::App* oracle = app.add_subcommand("oracle", "exact small-system reference");
  add_common_options(oracle, oracle_ctx, false);
  add_model_options(oracle, oracle_ctx, oracle_m);
  std::string o_mode;
  double o_t = 0;
  track(oracle_ctx, oracle->add_option("--mode", o_mode, "evolve or stationary"), "mode",
        o_mode);
  track(oracle_ctx, oracle->add_option("--t", o_t, "evolution time"), "t", o_t);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (sim->parsed()) return run_simulate(sim_ctx);
    if (phase->parsed()) return run_phase(phase_ctx);
    if (sweep->parsed()) return run_sweep(sweep_ctx);
    if (burgers->parsed()) return run_burgers(burgers_ctx);
    if (couple->parsed()) return run_couple(couple_ctx);
    if (entropy->parsed()) return run_entropy(entropy_ctx);
    if (oracle->parsed()) return run_oracle(oracle_ctx);
    diag("config_error", "no subcommand selected");
    return 1;
  } catch (const config_error& e) {
    diag("config_error", e.what());
    return 1;
  } catch (const assertion_error& e) {
    diag("assertion_error", e.what());
    return 2;
  } catch (const std::exception& e) {
    diag("unexpected_error", e.what());
    return 2;
  }
}
