#include "spok/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace spok {

PmfTable EmpiricalPmf::to_table() const {
  PmfTable t;
  t.n_min = n_min;
  t.n_max = n_max();
  t.probs.reserve(counts.size());
  for (std::size_t c : counts)
    t.probs.push_back(static_cast<double>(c) / static_cast<double>(total));
  t.truncation_mass = 0.0;
  return t;
}

EmpiricalPmf empirical_pmf(std::span<const long long> samples) {
  if (samples.empty()) throw DomainError("empirical_pmf: empty input");
  const auto [lo_it, hi_it] = std::minmax_element(samples.begin(), samples.end());
  EmpiricalPmf pmf;
  pmf.n_min = *lo_it;
  pmf.counts.assign(static_cast<std::size_t>(*hi_it - *lo_it) + 1, 0);
  pmf.total = samples.size();
  for (long long s : samples)
    ++pmf.counts[static_cast<std::size_t>(s - pmf.n_min)];
  return pmf;
}

double tv_distance(const PmfTable& a, const PmfTable& b) {
  const long long lo = std::min(a.n_min, b.n_min);
  const long long hi = std::max(a.n_max, b.n_max);
  if (hi < lo) throw DomainError("tv_distance: window mismatch");
  double acc = 0.0;
  for (long long n = lo; n <= hi; ++n) acc += std::abs(a.prob(n) - b.prob(n));
  return 0.5 * acc + 0.5 * std::abs(a.truncation_mass - b.truncation_mass);
}

double tv_distance(const PmfTable& a, const EmpiricalPmf& b) {
  return tv_distance(a, b.to_table());
}

namespace {

EstimateWithError mean_with_se(const std::vector<double>& x) {
  const double n = static_cast<double>(x.size());
  double sum = 0.0;
  for (double v : x) sum += v;
  const double mean = sum / n;
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (n - 1.0) / n), x.size()};
}

// Jackknife SE of a statistic with O(1) leave-one-out updates from sums.
template <typename LeaveOneOut>
double jackknife_se(std::size_t n, LeaveOneOut&& theta_i) {
  const double dn = static_cast<double>(n);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += theta_i(i);
  const double mean = sum / dn;
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = theta_i(i) - mean;
    ss += d * d;
  }
  return std::sqrt((dn - 1.0) / dn * ss);
}

}  // namespace

McMoments mc_moments(const std::vector<IntPath>& paths, std::size_t s_index,
                     std::size_t t_index) {
  if (paths.size() < 2)
    throw DomainError("mc_moments: need at least 2 replications");
  const std::size_t n = paths.size();
  std::vector<double> xs(n), ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (s_index >= paths[i].values.size() || t_index >= paths[i].values.size())
      throw DomainError("mc_moments: index out of range");
    xs[i] = static_cast<double>(paths[i].values[s_index]);
    ys[i] = static_cast<double>(paths[i].values[t_index]);
  }
  const double dn = static_cast<double>(n);
  double sx = 0.0, sy = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += xs[i];
    sy += ys[i];
    syy += ys[i] * ys[i];
    sxy += xs[i] * ys[i];
  }

  McMoments out;
  out.mean_s = mean_with_se(xs);
  out.mean_t = mean_with_se(ys);

  const double var_t = (syy - sy * sy / dn) / (dn - 1.0);
  const double cov_st = (sxy - sx * sy / dn) / (dn - 1.0);

  auto var_loo = [&](std::size_t i) {
    const double m = dn - 1.0;
    const double sy_i = sy - ys[i];
    const double syy_i = syy - ys[i] * ys[i];
    return (syy_i - sy_i * sy_i / m) / (m - 1.0);
  };
  auto cov_loo = [&](std::size_t i) {
    const double m = dn - 1.0;
    const double sx_i = sx - xs[i];
    const double sy_i = sy - ys[i];
    const double sxy_i = sxy - xs[i] * ys[i];
    return (sxy_i - sx_i * sy_i / m) / (m - 1.0);
  };
  out.var_t = {var_t, jackknife_se(n, var_loo), n};
  out.cov_st = {cov_st, jackknife_se(n, cov_loo), n};
  return out;
}

DecayFit decay_fit(std::span<const std::pair<double, double>> corr) {
  if (corr.size() < 3)
    throw DomainError("decay_fit: need at least 3 points");
  const double n = static_cast<double>(corr.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& [t, v] : corr) {
    if (!(t > 0.0)) throw DomainError("decay_fit: t values must be > 0");
    if (!(v > 0.0))
      throw DomainError("decay_fit: correlation values must be > 0");
    const double x = std::log(t);
    const double y = std::log(v);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
  }
  const double sxx_c = sxx - sx * sx / n;
  const double sxy_c = sxy - sx * sy / n;
  const double syy_c = syy - sy * sy / n;
  if (!(sxx_c > 0.0)) throw DomainError("decay_fit: degenerate abscissae");
  DecayFit fit;
  fit.exponent = sxy_c / sxx_c;
  fit.intercept = (sy - fit.exponent * sx) / n;
  fit.r_squared =
      syy_c > 0.0 ? (sxy_c * sxy_c) / (sxx_c * syy_c) : 1.0;
  return fit;
}

}  // namespace spok
