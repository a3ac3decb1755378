#pragma once
// qsep/master_equation.hpp — exact distribution evolution for small chains.
// The full 2^n-state master equation is integrated by uniformization:
//   mu_t = sum_k  Poisson(k; L t) * mu_0 P^k,   P = I + Q / L,
// with L the uniformization rate (max total outflow). P is substochastic-free
// (genuinely stochastic), the Poisson weights are evaluated in log space, and
// the series is truncated once the accumulated weight reaches 1 - tail_tol.
// This gives machine-accurate laws to test the event-driven sampler against.
//
// Restricted to n <= 10 (dense 1024 x 1024 matrices) and constant boundary
// schedules (the generator must be time-independent for the series to apply).

#include <cmath>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "qsep/engine.hpp"
#include "qsep/errors.hpp"
#include "qsep/model.hpp"

namespace qsep {

class master_equation {
 public:
  static constexpr int max_sites = 10;

  explicit master_equation(const model_spec& spec) : n_(spec.n) {
    spec.validate();
    if (spec.n > max_sites)
      throw config_error("master_equation: chain too large for exact evolution");
    if (!spec.left_schedule().is_constant() || !spec.right_schedule().is_constant())
      throw config_error("master_equation: boundary schedules must be constant");

    const int m = 1 << n_;
    const double accel = spec.acceleration();
    const double lambda0 = spec.lambda0();
    const double p = spec.jump_probability();
    const rate_tuple r = spec.rates_at(0.0);

    q_ = Eigen::MatrixXd::Zero(m, m);
    const auto add = [&](int from, int to, double rate) {
      if (rate <= 0.0) return;
      q_(from, to) += rate;
      q_(from, from) -= rate;
    };
    for (int s = 0; s < m; ++s) {
      for (int b = 1; b < n_; ++b) {  // bond b joins sites b-1 and b
        const int lo = (s >> (b - 1)) & 1;
        const int hi = (s >> b) & 1;
        if (lo == 1 && hi == 0)
          add(s, s ^ (1 << (b - 1)) ^ (1 << b), accel * lambda0 * p);
        else if (lo == 0 && hi == 1)
          add(s, s ^ (1 << (b - 1)) ^ (1 << b), accel * lambda0 * (1.0 - p));
      }
      if (((s >> 0) & 1) == 0)
        add(s, s | 1, accel * r.alpha);
      else
        add(s, s & ~1, accel * r.gamma);
      const int top = 1 << (n_ - 1);
      if ((s & top) == 0)
        add(s, s | top, accel * r.delta);
      else
        add(s, s & ~top, accel * r.beta);
    }
  }

  int n() const { return n_; }
  int states() const { return 1 << n_; }
  const Eigen::MatrixXd& generator() const { return q_; }

  /// Distribution at time t started from mu0 (componentwise over states).
  Eigen::VectorXd evolve(Eigen::VectorXd mu0, double t, double tail_tol = 1e-15) const {
    if (t < 0.0) throw config_error("master_equation: negative time");
    const double big = (-q_.diagonal().minCoeff());
    if (big <= 0.0 || t == 0.0) return mu0;
    const double lt = big * t;
    // Transition operator transpose: columns act on column distributions.
    const Eigen::MatrixXd pt =
        Eigen::MatrixXd::Identity(states(), states()) + q_.transpose() / big;

    Eigen::VectorXd term = mu0;  // mu0 (P^k)^T accumulated in place
    Eigen::VectorXd out = Eigen::VectorXd::Zero(states());
    const double log_lt = std::log(lt);
    double covered = 0.0;
    const std::int64_t hard_cap =
        std::int64_t(lt + 12.0 * std::sqrt(lt + 1.0) + 64.0) * 4 + 64;
    for (std::int64_t k = 0; k <= hard_cap; ++k) {
      const double lw = double(k) * log_lt - lt - std::lgamma(double(k) + 1.0);
      const double w = std::exp(lw);
      if (w > 0.0) {
        out += w * term;
        covered += w;
        if (covered >= 1.0 - tail_tol && double(k) > lt) break;
      }
      term = pt * term;
    }
    return out / covered;  // renormalize away the truncated tail
  }

  /// Stationary distribution: solves mu Q = 0 with sum(mu) = 1 by replacing
  /// one balance equation with the normalization.
  Eigen::VectorXd stationary() const {
    const int m = states();
    Eigen::MatrixXd a = q_.transpose();
    a.row(0).setOnes();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
    rhs(0) = 1.0;
    return a.fullPivLu().solve(rhs);
  }

  // ===== State coding and helper distributions =====

  /// Bit s of the index is the occupation of site s.
  static int state_index(const configuration& eta) {
    int idx = 0;
    for (int s = 0; s < int(eta.size()); ++s)
      if (eta[std::size_t(s)]) idx |= 1 << s;
    return idx;
  }

  static configuration state_of(int index, int n) {
    configuration eta(std::size_t(n), 0);
    for (int s = 0; s < n; ++s) eta[std::size_t(s)] = (index >> s) & 1;
    return eta;
  }

  /// Product measure with the given per-site densities.
  static Eigen::VectorXd product_distribution(int n,
                                              const std::vector<double>& site_density) {
    if (int(site_density.size()) != n)
      throw config_error("master_equation: density list size mismatch");
    const int m = 1 << n;
    Eigen::VectorXd mu(m);
    for (int s = 0; s < m; ++s) {
      double w = 1.0;
      for (int site = 0; site < n; ++site) {
        const double rho = site_density[std::size_t(site)];
        w *= ((s >> site) & 1) ? rho : 1.0 - rho;
      }
      mu(s) = w;
    }
    return mu;
  }

  static Eigen::VectorXd point_distribution(const configuration& eta) {
    Eigen::VectorXd mu = Eigen::VectorXd::Zero(1 << int(eta.size()));
    mu(state_index(eta)) = 1.0;
    return mu;
  }

  /// Marginal site densities of a state distribution.
  Eigen::VectorXd site_densities(const Eigen::VectorXd& mu) const {
    Eigen::VectorXd rho = Eigen::VectorXd::Zero(n_);
    for (int s = 0; s < states(); ++s)
      for (int site = 0; site < n_; ++site)
        if ((s >> site) & 1) rho(site) += mu(s);
    return rho;
  }

 private:
  int n_ = 0;
  Eigen::MatrixXd q_;
};

}  // namespace qsep
