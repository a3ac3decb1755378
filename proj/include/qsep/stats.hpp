#pragma once
// qsep/stats.hpp — small statistics toolbox: running moments (Welford),
// standard errors, and a chi-square goodness-of-fit test with the usual
// low-expectation pooling rule.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "qsep/errors.hpp"

namespace qsep {

// ===== Running moments =====

class running_stats {
 public:
  void add(double x) {
    ++count_;
    const double d = x - mean_;
    mean_ += d / double(count_);
    m2_ += d * (x - mean_);
  }
  std::uint64_t count() const { return count_; }
  double mean() const { return mean_; }
  double variance() const {  // sample variance (n - 1 normalization)
    return count_ > 1 ? m2_ / double(count_ - 1) : 0.0;
  }
  double stddev() const { return std::sqrt(variance()); }
  double standard_error() const {
    return count_ > 0 ? stddev() / std::sqrt(double(count_)) : 0.0;
  }

 private:
  std::uint64_t count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

/// |observed - target| / se, with se == 0 mapping to 0 when exact and
/// infinity otherwise.
inline double z_score(double observed, double target, double se) {
  const double d = std::abs(observed - target);
  if (se > 0.0) return d / se;
  return d == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
}

// ===== Chi-square goodness of fit =====

struct chi_square_result {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
  int cells_used = 0;    // after pooling
  int cells_pooled = 0;  // cells merged into the rest cell
};

/// Pearson chi-square test of observed counts against expected counts (same
/// total). Cells with expectation below min_expected are pooled into one
/// rest cell; if the rest cell itself stays below the threshold it is merged
/// into the smallest regular cell. Degrees of freedom: cells - 1.
inline chi_square_result chi_square_gof(const std::vector<double>& expected,
                                        const std::vector<std::uint64_t>& observed,
                                        double min_expected = 5.0) {
  if (expected.size() != observed.size() || expected.empty())
    throw config_error("chi_square_gof: size mismatch");

  std::vector<double> exp_cells;
  std::vector<double> obs_cells;
  double rest_exp = 0.0, rest_obs = 0.0;
  int pooled = 0;
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (expected[i] < 0.0) throw config_error("chi_square_gof: negative expectation");
    if (expected[i] >= min_expected) {
      exp_cells.push_back(expected[i]);
      obs_cells.push_back(double(observed[i]));
    } else {
      rest_exp += expected[i];
      rest_obs += double(observed[i]);
      ++pooled;
    }
  }
  if (pooled > 0) {
    if (rest_exp >= min_expected || exp_cells.empty()) {
      exp_cells.push_back(rest_exp);
      obs_cells.push_back(rest_obs);
    } else {
      // Merge the still-thin rest cell into the smallest regular cell.
      std::size_t smallest = 0;
      for (std::size_t i = 1; i < exp_cells.size(); ++i)
        if (exp_cells[i] < exp_cells[smallest]) smallest = i;
      exp_cells[smallest] += rest_exp;
      obs_cells[smallest] += rest_obs;
    }
  }

  chi_square_result out;
  out.cells_used = int(exp_cells.size());
  out.cells_pooled = pooled;
  for (std::size_t i = 0; i < exp_cells.size(); ++i) {
    if (exp_cells[i] <= 0.0) continue;  // empty rest cell
    const double d = obs_cells[i] - exp_cells[i];
    out.statistic += d * d / exp_cells[i];
  }
  out.dof = std::max(0, out.cells_used - 1);
  if (out.dof == 0) {
    out.p_value = 1.0;
    return out;
  }
  const boost::math::chi_squared dist(double(out.dof));
  out.p_value = boost::math::cdf(boost::math::complement(dist, out.statistic));
  return out;
}

}  // namespace qsep
