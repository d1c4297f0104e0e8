#ifndef SPOK_ESTIMATORS_HPP
#define SPOK_ESTIMATORS_HPP

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "spok/types.hpp"

namespace spok {

/// Frequency table of integer samples.
struct EmpiricalPmf {
  long long n_min = 0;
  std::vector<std::size_t> counts;
  std::size_t total = 0;

  long long n_max() const {
    return n_min + static_cast<long long>(counts.size()) - 1;
  }
  double prob(long long n) const {
    if (total == 0 || n < n_min || n > n_max()) return 0.0;
    return static_cast<double>(counts[static_cast<std::size_t>(n - n_min)]) /
           static_cast<double>(total);
  }
  PmfTable to_table() const;
};

EmpiricalPmf empirical_pmf(std::span<const long long> samples);

/// Total variation distance (1/2) sum |a(n) - b(n)| over the union window,
/// plus (1/2) |truncation_a - truncation_b|.
double tv_distance(const PmfTable& a, const PmfTable& b);
double tv_distance(const PmfTable& a, const EmpiricalPmf& b);

/// Unbiased sample moments of a path batch at two grid indices, with
/// jackknife standard errors.
struct McMoments {
  EstimateWithError mean_s;
  EstimateWithError mean_t;
  EstimateWithError var_t;
  EstimateWithError cov_st;
};

McMoments mc_moments(const std::vector<IntPath>& paths, std::size_t s_index,
                     std::size_t t_index);

/// Least-squares fit of log(value) against log(t).
struct DecayFit {
  double exponent = 0.0;   // slope
  double intercept = 0.0;
  double r_squared = 0.0;
};

DecayFit decay_fit(std::span<const std::pair<double, double>> corr);

}  // namespace spok

#endif  // SPOK_ESTIMATORS_HPP
