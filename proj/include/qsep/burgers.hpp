#pragma once
// qsep/burgers.hpp — finite-volume Godunov solver for the boundary-driven
// conservation law in the quasi-static scaling,
//
//   eps * d_t rho + d_x J(rho) = 0  on (0, 1),   J(rho) = pbar rho (1 - rho),
//
// with reservoir densities imposed through ghost cells. With slowly varying
// data and small eps the solution tracks the steady entropy profile selected
// by the variational current, which is what the particle system converges
// to; this solver provides the deterministic side of that comparison.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "qsep/errors.hpp"
#include "qsep/schedule.hpp"
#include "qsep/theory.hpp"

namespace qsep {

struct burgers_options {
  int cells = 200;
  double epsilon = 0.01;
  double cfl = 0.9;  // fraction of the stability limit used by advance_to
};

class burgers_solver {
 public:
  burgers_solver(double p_bar, schedule rho_minus, schedule rho_plus,
                 burgers_options opt = {})
      : p_bar_(p_bar), rho_minus_(std::move(rho_minus)), rho_plus_(std::move(rho_plus)),
        opt_(opt) {
    if (!(p_bar > 0.0)) throw config_error("burgers_solver: p_bar must be positive");
    if (opt_.cells < 1) throw config_error("burgers_solver: need at least one cell");
    if (!(opt_.epsilon > 0.0)) throw config_error("burgers_solver: epsilon must be positive");
    if (!(opt_.cfl > 0.0) || opt_.cfl > 1.0)
      throw config_error("burgers_solver: cfl must lie in (0, 1]");
    if (rho_minus_.empty() || rho_plus_.empty())
      throw config_error("burgers_solver: boundary schedules must be nonempty");
    // Default initial state: linear interpolation of the initial data.
    const double l = rho_minus_.value(0.0), r = rho_plus_.value(0.0);
    rho_.resize(std::size_t(opt_.cells));
    for (int m = 0; m < opt_.cells; ++m)
      rho_[std::size_t(m)] = l + (r - l) * (m + 0.5) / double(opt_.cells);
  }

  int cells() const { return opt_.cells; }
  double dx() const { return 1.0 / double(opt_.cells); }
  double epsilon() const { return opt_.epsilon; }
  double time() const { return t_; }
  const std::vector<double>& state() const { return rho_; }

  void set_state(std::vector<double> rho) {
    if (int(rho.size()) != opt_.cells)
      throw config_error("burgers_solver: state size mismatch");
    for (double v : rho)
      if (v < 0.0 || v > 1.0)
        throw config_error("burgers_solver: density outside [0, 1]");
    rho_ = std::move(rho);
  }

  /// Largest stable step: |J'| <= p_bar, so dt <= cfl * eps * dx / p_bar.
  double max_stable_dt() const { return opt_.cfl * opt_.epsilon * dx() / p_bar_; }

  /// Godunov fluxes at the cells() + 1 interfaces for the current state and
  /// the boundary data at the current time.
  std::vector<double> interface_fluxes() const {
    std::vector<double> f(std::size_t(opt_.cells) + 1);
    fill_fluxes(f.data());
    return f;
  }

  /// One explicit Godunov update of size dt (caller keeps dt stable).
  void step(double dt) {
    if (!(dt > 0.0)) throw config_error("burgers_solver: dt must be positive");
    flux_.resize(std::size_t(opt_.cells) + 1);
    fill_fluxes(flux_.data());
    const double c = dt / (opt_.epsilon * dx());
    for (int m = 0; m < opt_.cells; ++m)
      rho_[std::size_t(m)] -= c * (flux_[std::size_t(m) + 1] - flux_[std::size_t(m)]);
    t_ += dt;
  }

  /// Advances to exactly t_stop with stable steps (the last one clipped).
  void advance_to(double t_stop) {
    if (t_stop < t_) throw config_error("burgers_solver: cannot step backwards");
    const double dt = max_stable_dt();
    while (t_ < t_stop) {
      const double h = std::min(dt, t_stop - t_);
      step(h);
      if (h < dt) t_ = t_stop;  // absorb the final roundoff
    }
  }

  struct steady_result {
    bool converged = false;
    std::uint64_t steps = 0;
    double flux_spread = 0.0;  // max - min over interfaces at the end
    double flux_mean = 0.0;
    double max_update = 0.0;   // largest single-cell change in the last step
  };

  /// Runs with frozen-in-time boundary data until the interface fluxes are
  /// uniform to flux_tol (steady state of the conservation law), checking
  /// every check_every steps. The clock t is not advanced (this is a steady
  /// solve, not a transient).
  steady_result run_to_steady(double flux_tol, std::uint64_t max_steps,
                              std::uint64_t check_every = 1000) {
    steady_result out;
    const double dt = max_stable_dt();
    const double c = dt / (opt_.epsilon * dx());
    flux_.resize(std::size_t(opt_.cells) + 1);
    for (out.steps = 0; out.steps < max_steps;) {
      double max_update = 0.0;
      for (std::uint64_t k = 0; k < check_every && out.steps < max_steps; ++k, ++out.steps) {
        fill_fluxes(flux_.data());
        max_update = 0.0;
        for (int m = 0; m < opt_.cells; ++m) {
          const double d = c * (flux_[std::size_t(m) + 1] - flux_[std::size_t(m)]);
          rho_[std::size_t(m)] -= d;
          max_update = std::max(max_update, std::abs(d));
        }
      }
      fill_fluxes(flux_.data());
      const auto [lo, hi] = std::minmax_element(flux_.begin(), flux_.end());
      out.flux_spread = *hi - *lo;
      out.max_update = max_update;
      if (out.flux_spread <= flux_tol) {
        out.converged = true;
        break;
      }
    }
    double mean = 0.0;
    for (double f : flux_) mean += f;
    out.flux_mean = mean / double(flux_.size());
    const auto [lo, hi] = std::minmax_element(flux_.begin(), flux_.end());
    out.flux_spread = *hi - *lo;
    return out;
  }

 private:
  void fill_fluxes(double* f) const {
    const double ghost_l = rho_minus_.value(t_);
    const double ghost_r = rho_plus_.value(t_);
    f[0] = godunov_flux(p_bar_, ghost_l, rho_.front());
    for (int m = 1; m < opt_.cells; ++m)
      f[m] = godunov_flux(p_bar_, rho_[std::size_t(m) - 1], rho_[std::size_t(m)]);
    f[opt_.cells] = godunov_flux(p_bar_, rho_.back(), ghost_r);
  }

  double p_bar_;
  schedule rho_minus_;
  schedule rho_plus_;
  burgers_options opt_;
  std::vector<double> rho_;
  std::vector<double> flux_;  // scratch
  double t_ = 0.0;
};

}  // namespace qsep
