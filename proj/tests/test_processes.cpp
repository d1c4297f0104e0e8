#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "spok/analytics.hpp"
#include "spok/estimators.hpp"
#include "spok/processes.hpp"

using namespace spok;

namespace {

// regularized upper incomplete gamma Q(a, x), for the chi-square p-value
double gamma_q(double a, double x) {
  if (x < a + 1.0) {
    // series for P(a,x)
    double term = 1.0 / a, sum = term;
    for (int n = 1; n < 500; ++n) {
      term *= x / (a + n);
      sum += term;
      if (term < 1e-15 * sum) break;
    }
    return 1.0 - sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
  }
  // continued fraction for Q(a,x)
  double b = x + 1.0 - a, c = 1e300, d = 1.0 / b, h = d;
  for (int i = 1; i < 500; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < 1e-300) d = 1e-300;
    c = b + an / c;
    if (std::abs(c) < 1e-300) c = 1e-300;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-14) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double poisson_pmf(long long n, double mean) {
  return std::exp(n * std::log(mean) - mean - std::lgamma(n + 1.0));
}

struct MeanSe {
  double mean, se;
};
MeanSe mean_se(const std::vector<double>& x) {
  const double n = static_cast<double>(x.size());
  double s = 0.0;
  for (double v : x) s += v;
  const double mean = s / n;
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

// tie-aware two-sample Kolmogorov-Smirnov distance (integer data is heavily
// tied, so the ECDFs are compared only at completed jump points)
double ks_distance(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / a.size() -
                             static_cast<double>(j) / b.size()));
  }
  return d;
}

}  // namespace

TEST_CASE("order-1 counting process is Poisson (chi-square GOF)") {
  const std::size_t n = 100000;
  const double lambda = 2.0;
  const TimeGrid grid{{1.0}};
  std::map<long long, std::size_t> counts;
  for (std::size_t i = 0; i < n; ++i) {
    RngStream rng(31, i);
    ++counts[sample_ppok(1, lambda, grid, rng).values[0]];
  }
  // pool cells with expected count < 5 into the tail
  double chi2 = 0.0;
  int cells = 0;
  double tail_expected = static_cast<double>(n);
  std::size_t tail_observed = n;
  for (long long v = 0; v <= 40; ++v) {
    const double expected = n * poisson_pmf(v, lambda);
    if (expected < 5.0) continue;
    const std::size_t observed = counts.count(v) ? counts[v] : 0;
    chi2 += (observed - expected) * (observed - expected) / expected;
    tail_expected -= expected;
    tail_observed -= observed;
    ++cells;
  }
  if (tail_expected > 1.0) {
    chi2 += (tail_observed - tail_expected) * (tail_observed - tail_expected) /
            tail_expected;
    ++cells;
  }
  const double p_value = gamma_q(0.5 * (cells - 1), 0.5 * chi2);
  CHECK(p_value > 0.01);
}

TEST_CASE("counting process basics") {
  RngStream rng(32, 0);
  const TimeGrid grid{{0.0, 0.5, 1.0}};
  const IntPath p = sample_ppok(3, 2.0, grid, rng);
  CHECK(p.values[0] == 0);
  for (std::size_t i = 1; i < p.values.size(); ++i)
    CHECK(p.values[i] >= p.values[i - 1]);

  const std::size_t n = 100000;
  std::vector<double> vals(n);
  const TimeGrid one{{1.0}};
  for (std::size_t i = 0; i < n; ++i) {
    RngStream r(33, i);
    vals[i] = static_cast<double>(sample_ppok(3, 2.0, one, r).values[0]);
  }
  const MeanSe m = mean_se(vals);
  CHECK(std::abs(m.mean - 12.0) < 3.0 * m.se);  // k(k+1) lambda / 2
}

TEST_CASE("difference process: mean, symmetry, start value") {
  const SkellamParams params{2, 1.0, 0.5};
  const auto [r1, r2] = r_constants(params);
  const std::size_t n = 100000;
  std::vector<double> vals(n);
  const TimeGrid one{{1.0}};
  for (std::size_t i = 0; i < n; ++i) {
    RngStream r(34, i);
    vals[i] = static_cast<double>(sample_spok(params, one, r).values[0]);
  }
  const MeanSe m = mean_se(vals);
  CHECK(std::abs(m.mean - r1) < 3.0 * m.se);

  RngStream rng(35, 0);
  const TimeGrid grid{{0.0, 1.0}};
  CHECK(sample_spok(params, grid, rng).values[0] == 0);

  // symmetric intensities: empirical pmf symmetric within noise
  const SkellamParams sym{2, 0.8, 0.8};
  std::vector<long long> draws(n);
  for (std::size_t i = 0; i < n; ++i) {
    RngStream r(36, i);
    draws[i] = sample_spok(sym, one, r).values[0];
  }
  const EmpiricalPmf emp = empirical_pmf(draws);
  for (long long v = 1; v <= 6; ++v) {
    const double p_pos = emp.prob(v), p_neg = emp.prob(-v);
    const double se_diff = std::sqrt((p_pos + p_neg) / static_cast<double>(n));
    CHECK(std::abs(p_pos - p_neg) < 4.0 * se_diff);
  }
}

TEST_CASE("difference process: path covariance matches r2 s") {
  const SkellamParams params{2, 1.0, 0.5};
  const std::size_t n = 30000;
  std::vector<IntPath> paths(n);
  const TimeGrid grid{{0.5, 1.0}};
  for (std::size_t i = 0; i < n; ++i) {
    RngStream r(37, i);
    paths[i] = sample_spok(params, grid, r);
  }
  const McMoments mc = mc_moments(paths, 0, 1);
  CHECK(std::abs(mc.cov_st.value - 3.75) < 3.0 * mc.cov_st.std_error);
}

TEST_CASE("fractional process: identity time change equals the base process") {
  const SkellamParams params{2, 1.0, 0.5};
  const std::size_t n = 10000;
  std::vector<double> a(n), b(n);
  const TimeGrid one{{1.0}};
  for (std::size_t i = 0; i < n; ++i) {
    RngStream r1(38, i), r2(39, i);
    a[i] = static_cast<double>(
        sample_fspok(params, FracParams{1.0}, one, r1).values[0]);
    b[i] = static_cast<double>(sample_spok(params, one, r2).values[0]);
  }
  CHECK(ks_distance(a, b) < 0.02);
}

TEST_CASE("fractional process: mean at t = 1") {
  const SkellamParams params{2, 1.0, 0.5};
  const auto [r1, r2] = r_constants(params);
  const std::size_t n = 30000;
  std::vector<double> vals(n);
  const TimeGrid one{{1.0}};
  for (std::size_t i = 0; i < n; ++i) {
    RngStream r(40, i);
    vals[i] = static_cast<double>(
        sample_fspok(params, FracParams{0.7}, one, r, 1e-3).values[0]);
  }
  const MeanSe m = mean_se(vals);
  CHECK(std::abs(m.mean - r1 / std::tgamma(1.7)) < 3.0 * m.se);
}

TEST_CASE("fractional process: covariance against the analytic form") {
  const SkellamParams params{2, 1.0, 0.5};
  const FracParams frac{0.7};
  const std::size_t n = 30000;
  std::vector<IntPath> paths(n);
  const TimeGrid grid{{0.5, 1.0}};
  for (std::size_t i = 0; i < n; ++i) {
    RngStream r(41, i);
    paths[i] = sample_fspok(params, frac, grid, r, 1e-3);
  }
  const McMoments mc = mc_moments(paths, 0, 1);
  const MomentReport an = fspok_moments(params, frac, 0.5, 1.0);
  CHECK(std::abs(mc.cov_st.value - an.cov) < 3.0 * mc.cov_st.std_error);
  CHECK(std::abs(mc.var_t.value - an.variance) < 3.0 * mc.var_t.std_error);
}

TEST_CASE("subordinated process: hypothesis gate and basic moments") {
  const SkellamParams params{2, 1.0, 0.5};
  const TimeGrid grid{{1.0}};
  RngStream rng(42, 0);
  CHECK_THROWS_AS(sample_tcfspok(params, FracParams{0.7},
                                 SubordinatorSpec::stable(0.5), grid, rng),
                  HypothesisError);

  const TimeGrid with_zero{{0.0, 1.0}};
  const IntPath p =
      sample_tcfspok(params, FracParams{0.7},
                     SubordinatorSpec::gamma(1.0, 1.0), with_zero, rng, 1e-3);
  CHECK(p.values[0] == 0);

  const auto [r1, r2] = r_constants(params);
  const std::size_t n = 30000;
  std::vector<double> vals(n);
  for (std::size_t i = 0; i < n; ++i) {
    RngStream r(43, i);
    vals[i] = static_cast<double>(
        sample_tcfspok(params, FracParams{1.0},
                       SubordinatorSpec::gamma(2.0, 3.0), grid, r)
            .values[0]);
  }
  const MeanSe m = mean_se(vals);
  CHECK(std::abs(m.mean - r1 * 1.5) < 3.0 * m.se);  // r1 * b t / a
}

TEST_CASE("inverse-subordinated process: zero-mean case and smoke property") {
  const SkellamParams sym{2, 0.8, 0.8};
  const std::size_t n = 5000;
  std::vector<double> vals(n);
  const TimeGrid one{{1.0}};
  for (std::size_t i = 0; i < n; ++i) {
    RngStream r(44, i);
    vals[i] = static_cast<double>(
        sample_inverse_tcfspok(sym, FracParams{1.0},
                               SubordinatorSpec::tempered_stable(0.5, 1.0),
                               one, 1e-3, r)
            .values[0]);
  }
  const MeanSe m = mean_se(vals);
  CHECK(std::abs(m.mean) < 3.0 * m.se);

  RngStream rng(45, 0);
  const TimeGrid grid{{0.2, 0.4, 0.6, 0.8, 1.0}};
  const IntPath p = sample_inverse_tcfspok(
      {2, 1.0, 0.5}, FracParams{0.7}, SubordinatorSpec::inverse_gaussian(1.0, 1.0),
      grid, 1e-3, rng, 1e-3);
  CHECK(p.values.size() == grid.times.size());
}

TEST_CASE("fine-grid jumps stay within the order bound") {
  const SkellamParams params{2, 1.0, 0.5};
  const TimeGrid grid = [] {
    TimeGrid g;
    for (int i = 1; i <= 1000; ++i) g.times.push_back(i * 1e-3);
    return g;
  }();
  long long max_jump = 0;
  std::size_t big_jumps = 0, bins = 0;
  for (std::size_t rep = 0; rep < 50; ++rep) {
    RngStream rng(46, rep);
    const IntPath p = sample_spok(params, grid, rng);
    for (std::size_t i = 1; i < p.values.size(); ++i) {
      const long long jump = std::llabs(p.values[i] - p.values[i - 1]);
      max_jump = std::max(max_jump, jump);
      big_jumps += jump > params.order ? 1 : 0;
      ++bins;
    }
  }
  // single events move by at most k; a > k move needs two events in one bin
  CHECK(max_jump <= 2 * params.order);
  CHECK(static_cast<double>(big_jumps) / static_cast<double>(bins) < 1e-4);
}
