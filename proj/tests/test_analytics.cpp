#include <doctest.h>

#include <cmath>
#include <complex>
#include <map>
#include <vector>

#include "spok/analytics.hpp"
#include "spok/estimators.hpp"
#include "spok/processes.hpp"
#include "spok/specfun.hpp"

using namespace spok;

namespace {

// frozen references (80-digit arithmetic)
constexpr double kSpokK1 = 0.34944033492225667776;  // k=1, l=(1,.5), t=1, n=0
constexpr double kSpokK2_0 = 0.150488186340545921;  // k=2, l=(1,.5), t=1
constexpr double kSpokK2_1 = 0.146146832497987055;
constexpr double kSpokK2_m2 = 0.0656051688406297461;
constexpr double kSpokK2_5 = 0.0559508516703314084;
constexpr double kFspok0 = 0.217319750181423376;  // alpha=0.7, t=1, n=0
constexpr double kFspok2 = 0.133857697427389042;
constexpr double kFspokM3 = 0.0258877133520595308;

// Independent oracle: pmf by numeric inversion of the characteristic
// function of the order-k difference process (trapezoid rule on [0, pi];
// exponentially accurate for smooth periodic integrands).
double cf_inversion_pmf(const SkellamParams& p, double t, long long n) {
  const int grid = 1 << 12;
  double acc = 0.0;
  for (int q = 0; q <= grid; ++q) {
    const double u = 3.141592653589793238462643 * q / grid;
    double re = 0.0, im = 0.0;
    for (int j = 1; j <= p.order; ++j) {
      re += (p.lambda1 + p.lambda2) * (std::cos(j * u) - 1.0);
      im += (p.lambda1 - p.lambda2) * std::sin(j * u);
    }
    const std::complex<double> phi =
        std::exp(t * std::complex<double>(re, im));
    const std::complex<double> val =
        phi * std::exp(std::complex<double>(0.0, -static_cast<double>(n) * u));
    acc += (q == 0 || q == grid ? 0.5 : 1.0) * val.real();
  }
  return acc / grid;
}

double rel_err(double got, double want) {
  return std::abs(got - want) / std::abs(want);
}

}  // namespace

TEST_CASE("moment constants") {
  const auto [r1a, r2a] = r_constants({1, 2.0, 0.5});
  CHECK(r1a == doctest::Approx(1.5).epsilon(1e-14));
  CHECK(r2a == doctest::Approx(2.5).epsilon(1e-14));
  const auto [r1b, r2b] = r_constants({2, 0.8, 0.8});
  CHECK(r1b == 0.0);
  const auto [r1c, r2c] = r_constants({2, 1.0, 0.5});
  CHECK(r1c == doctest::Approx(1.5).epsilon(1e-14));
  CHECK(r2c == doctest::Approx(7.5).epsilon(1e-14));
  CHECK(r2b > 0.0);
}

TEST_CASE("order-k pmf: initial condition, symmetry, closed forms") {
  const SkellamParams params{2, 1.0, 0.5};
  CHECK(spok_pmf(params, 0.0, 0) == 1.0);
  CHECK(spok_pmf(params, 0.0, 3) == 0.0);

  const SkellamParams sym{2, 0.8, 0.8};
  for (long long n = 1; n <= 8; ++n) {
    CHECK(spok_pmf(sym, 0.9, n) ==
          doctest::Approx(spok_pmf(sym, 0.9, -n)).epsilon(1e-13));
  }

  // order 1 is the classical closed form e^{-t(l1+l2)} (l1/l2)^{n/2} I_n(.)
  CHECK(rel_err(spok_pmf({1, 1.0, 0.5}, 1.0, 0), kSpokK1) < 1e-12);

  // order 2 against the 80-digit convolution references
  CHECK(rel_err(spok_pmf(params, 1.0, 0), kSpokK2_0) < 1e-11);
  CHECK(rel_err(spok_pmf(params, 1.0, 1), kSpokK2_1) < 1e-11);
  CHECK(rel_err(spok_pmf(params, 1.0, -2), kSpokK2_m2) < 1e-11);
  CHECK(rel_err(spok_pmf(params, 1.0, 5), kSpokK2_5) < 1e-11);
}

TEST_CASE("order-k pmf: characteristic-function inversion oracle") {
  const SkellamParams params{2, 1.0, 0.5};
  for (long long n = -5; n <= 8; ++n) {
    CHECK(std::abs(spok_pmf(params, 1.0, n) -
                   cf_inversion_pmf(params, 1.0, n)) < 1e-10);
  }
  // a long horizon exercises the log-space Bessel path (z > 30)
  const SkellamParams k1{1, 1.0, 0.5};
  for (long long n : {-20LL, 0LL, 45LL}) {
    CHECK(std::abs(spok_pmf(k1, 40.0, n) - cf_inversion_pmf(k1, 40.0, n)) <
          1e-9);
  }
}

TEST_CASE("order-k pmf table: mass and moments") {
  const SkellamParams params{2, 1.0, 0.5};
  const PmfTable table = spok_pmf_table(params, 1.0);
  CHECK(table.truncation_mass < 1e-10);
  CHECK(std::abs(table.sum() + table.truncation_mass - 1.0) < 1e-12);
  double mean = 0.0, second = 0.0;
  for (long long n = table.n_min; n <= table.n_max; ++n) {
    mean += n * table.prob(n);
    second += static_cast<double>(n) * n * table.prob(n);
  }
  const auto [r1, r2] = r_constants(params);
  CHECK(std::abs(mean - r1) < 1e-9);
  CHECK(std::abs(second - mean * mean - r2) < 1e-8);
}

TEST_CASE("pgf of the order-k difference process") {
  const SkellamParams params{2, 1.0, 0.5};
  CHECK(spok_pgf(params, 0.6, 0.0) == 1.0);
  CHECK(std::abs(spok_pgf(params, 1.0 - 1e-10, 1.0) - 1.0) < 1e-8);
  CHECK_THROWS_AS(spok_pgf(params, 1.0, 1.0), DomainError);

  const PmfTable table = spok_pmf_table(params, 1.0);
  const double theta = 0.6;
  double dual = 0.0;
  for (long long n = table.n_min; n <= table.n_max; ++n)
    dual += std::pow(theta, static_cast<double>(n)) * table.prob(n);
  CHECK(std::abs(dual - spok_pgf(params, theta, 1.0)) < 1e-6);
}

TEST_CASE("fractional pmf: frozen references and delegation") {
  const SkellamParams params{2, 1.0, 0.5};
  const FracParams frac{0.7};
  CHECK(std::abs(fspok_pmf(params, frac, 1.0, 0, 1e-11) - kFspok0) < 1e-8);
  CHECK(std::abs(fspok_pmf(params, frac, 1.0, 2, 1e-11) - kFspok2) < 1e-8);
  CHECK(std::abs(fspok_pmf(params, frac, 1.0, -3, 1e-11) - kFspokM3) < 1e-8);

  // alpha = 1 delegates to the base pmf
  CHECK(fspok_pmf(params, FracParams{1.0}, 1.0, 2) ==
        spok_pmf(params, 1.0, 2));
}

TEST_CASE("fractional pmf: symmetry and normalization") {
  const SkellamParams sym{2, 0.8, 0.8};
  const FracParams frac{0.7};
  const std::vector<double> window =
      fspok_pmf_window(sym, frac, 1.0, -6, 6, 1e-10);
  for (std::size_t i = 0; i < window.size() / 2; ++i) {
    CHECK(std::abs(window[i] - window[window.size() - 1 - i]) < 1e-11);
  }
  const PmfTable table = fspok_pmf_table({2, 1.0, 0.5}, frac, 1.0, 1e-7);
  CHECK(table.truncation_mass < 1e-6);
  CHECK(std::abs(table.sum() + table.truncation_mass - 1.0) < 1e-6);
  for (double p : table.probs) CHECK(p >= 0.0);
}

TEST_CASE("fractional pmf: event-count series cross-route") {
  // p_a(n,t) = sum_m R^m J^{*m}(n) t^{a m} E^{m+1}_{a, a m + 1}(-R t^a),
  // an independent route through the three-parameter Mittag-Leffler function
  // (series in the number of jump events).
  const SkellamParams params{2, 1.0, 0.5};
  const double alpha = 0.7, t = 0.55;
  const double rate = params.order * (params.lambda1 + params.lambda2);
  const double ta = std::pow(t, alpha);

  // jump-law convolutions J^{*m}
  std::map<long long, double> conv{{0, 1.0}};
  std::map<long long, std::map<long long, double>> jm;
  for (int m = 0; m <= 60; ++m) {
    jm[m] = conv;
    std::map<long long, double> next;
    for (const auto& [n, p] : conv) {
      for (int j = 1; j <= params.order; ++j) {
        next[n + j] += p * params.lambda1 / rate;
        next[n - j] += p * params.lambda2 / rate;
      }
    }
    conv = std::move(next);
  }
  for (long long n : {-2LL, 0LL, 1LL, 4LL}) {
    double series = 0.0;
    for (int m = 0; m <= 60; ++m) {
      const auto it = jm[m].find(n);
      if (it == jm[m].end()) continue;
      const double ml =
          mittag_leffler(alpha, alpha * m + 1.0, m + 1.0, -rate * ta);
      series += std::pow(rate * ta, m) * it->second * ml;
    }
    CHECK(std::abs(series - fspok_pmf(params, FracParams{alpha}, t, n, 1e-11)) <
          1e-7);
  }
}

TEST_CASE("fractional pgf") {
  const SkellamParams params{2, 1.0, 0.5};
  CHECK(fspok_pgf(params, FracParams{0.7}, 0.4, 0.0) == 1.0);
  for (double theta : {0.3, 0.6, 0.9}) {
    CHECK(rel_err(fspok_pgf(params, FracParams{1.0}, theta, 1.0),
                  spok_pgf(params, theta, 1.0)) < 1e-12);
  }
  // far outside the Mittag-Leffler window the range error propagates
  CHECK_THROWS_AS(fspok_pgf(params, FracParams{0.7}, 0.01, 1.0), RangeError);
}

TEST_CASE("base process moments") {
  const SkellamParams params{2, 1.0, 0.5};
  const MomentReport zero = spok_moments(params, 0.0, 0.0);
  CHECK(zero.mean == 0.0);
  CHECK(zero.variance == 0.0);
  CHECK(zero.cov == 0.0);
  const MomentReport eq = spok_moments(params, 1.0, 1.0);
  CHECK(eq.cov == eq.variance);
  const MomentReport st = spok_moments(params, 0.5, 1.0);
  CHECK(st.cov == doctest::Approx(3.75).epsilon(1e-14));
  CHECK_THROWS_AS(spok_moments(params, 2.0, 1.0), DomainError);
}

TEST_CASE("inverse-stable moments") {
  const MomentReport m = inv_stable_mean_cov(0.5, 1.0, 1.0);
  CHECK(rel_err(m.mean, 1.0 / std::tgamma(1.5)) < 1e-13);
  // s = t reduction equals the simplified variance expression
  for (double alpha : {0.3, 0.5, 0.7, 0.9}) {
    for (double t : {0.4, 1.0, 3.0}) {
      const double ga1 = std::tgamma(alpha + 1.0);
      const double want = (2.0 / std::tgamma(2.0 * alpha + 1.0) -
                           1.0 / (ga1 * ga1)) *
                          std::pow(t, 2.0 * alpha);
      const MomentReport r = inv_stable_mean_cov(alpha, t, t);
      CHECK(rel_err(r.variance, want) < 1e-11);
      CHECK(rel_err(r.cov, want) < 1e-11);
    }
  }
  // near alpha = 1 the time change degenerates and covariance vanishes
  CHECK(std::abs(inv_stable_mean_cov(0.999, 0.5, 1.0).cov) < 1e-2);

  // Monte Carlo check of mean and variance at alpha = 0.7
  const std::size_t n = 200000;
  std::vector<double> draws(n);
  for (std::size_t i = 0; i < n; ++i) {
    RngStream rng(61, i);
    draws[i] = sample_inverse_stable(0.7, 1.3, rng);
  }
  double mean = 0.0;
  for (double v : draws) mean += v;
  mean /= n;
  double var = 0.0, m4 = 0.0;
  for (double v : draws) {
    var += (v - mean) * (v - mean);
    m4 += std::pow(v - mean, 4);
  }
  var /= (n - 1.0);
  m4 /= n;
  const MomentReport an = inv_stable_mean_cov(0.7, 1.3, 1.3);
  const double sd = std::sqrt(var);
  CHECK(std::abs(mean - an.mean) < 3.0 * sd / std::sqrt((double)n));
  CHECK(std::abs(var - an.variance) <
        3.0 * std::sqrt((m4 - var * var) / n));
}

TEST_CASE("fractional process moments: reductions") {
  const SkellamParams params{2, 1.0, 0.5};
  // alpha = 1 reduces exactly to the base moments
  const MomentReport a1 = fspok_moments(params, FracParams{1.0}, 0.5, 1.0);
  const MomentReport base = spok_moments(params, 0.5, 1.0);
  CHECK(rel_err(a1.mean, base.mean) < 1e-12);
  CHECK(rel_err(a1.variance, base.variance) < 1e-10);
  CHECK(std::abs(a1.cov - base.cov) < 1e-10);

  // symmetric intensities: zero mean, variance r2 E Y
  const SkellamParams sym{2, 0.8, 0.8};
  const auto [r1s, r2s] = r_constants(sym);
  const MomentReport ms = fspok_moments(sym, FracParams{0.7}, 1.0, 1.0);
  CHECK(ms.mean == 0.0);
  CHECK(rel_err(ms.variance, r2s / std::tgamma(1.7)) < 1e-12);
}

TEST_CASE("moment reports stay nonnegative across a parameter sweep") {
  RngStream rng(72, 0);
  for (int k : {1, 2, 3}) {
    for (auto [l1, l2] : {std::pair{1.0, 0.5}, {0.8, 0.8}, {0.2, 2.0}}) {
      const SkellamParams p{k, l1, l2};
      for (double alpha : {0.3, 0.5, 0.7, 0.9, 1.0}) {
        for (double t : {0.5, 2.0}) {
          const MomentReport m = fspok_moments(p, FracParams{alpha}, t, t);
          CHECK(m.variance >= 0.0);
        }
      }
      for (double alpha : {0.5, 0.9}) {
        const MomentReport m =
            tcfspok_moments(p, FracParams{alpha}, SubordinatorSpec::gamma(1.5, 2.0),
                            1.0, 1.0, gamma_moment_source(1.5, 2.0), rng);
        CHECK(m.variance >= 0.0);
      }
    }
  }
}

TEST_CASE("fractional long-range dependence report") {
  const SkellamParams params{2, 1.0, 0.5};
  TimeGrid grid;
  for (int i = 0; i < 40; ++i)
    grid.times.push_back(std::pow(10.0, 2.0 + 3.0 * i / 39.0));

  const LrdReport rep = fspok_lrd(params, FracParams{0.7}, 1.0, grid);
  CHECK(!rep.degenerate_r1);
  CHECK(std::abs(rep.exponent - 0.7) < 0.02);
  CHECK(std::abs(rep.asymptote_ratio_at_tmax - 1.0) < 0.05);

  // degenerate branch: exact correlation (s/t)^{a/2}
  const LrdReport deg = fspok_lrd({2, 0.8, 0.8}, FracParams{0.7}, 1.0, grid);
  CHECK(deg.degenerate_r1);
  CHECK(std::abs(deg.exponent - 0.35) < 1e-9);
  CHECK(std::abs(deg.asymptote_ratio_at_tmax - 1.0) < 1e-9);

  TimeGrid tiny{{10.0, 20.0}};
  CHECK_THROWS_AS(fspok_lrd(params, FracParams{0.7}, 1.0, tiny), DomainError);
  CHECK_THROWS_AS(fspok_lrd(params, FracParams{1.0}, 1.0, grid), DomainError);
}

TEST_CASE("subordinated moments: closed reductions") {
  const SkellamParams params{2, 1.0, 0.5};
  const auto [r1, r2] = r_constants(params);
  const SubordinatorSpec spec = SubordinatorSpec::gamma(2.0, 3.0);
  const MomentSource source = gamma_moment_source(2.0, 3.0);
  RngStream rng(62, 0);

  // identity fractional stage: mean r1 * b t / a exactly
  const MomentReport a1 =
      tcfspok_moments(params, FracParams{1.0}, spec, 2.0, 2.0, source, rng);
  CHECK(rel_err(a1.mean, r1 * 3.0 * 2.0 / 2.0) < 1e-12);

  // covariance at s = t is the variance (exact algebraic reduction)
  const MomentReport eq =
      tcfspok_moments(params, FracParams{0.7}, spec, 1.0, 1.0, source, rng);
  CHECK(eq.cov == eq.variance);

  CHECK_THROWS_AS(
      tcfspok_moments(params, FracParams{0.7}, SubordinatorSpec::stable(0.5),
                      1.0, 1.0, source, rng),
      HypothesisError);
}

TEST_CASE("subordinated covariance against a direct path batch") {
  const SkellamParams params{2, 1.0, 0.5};
  const FracParams frac{0.7};
  const SubordinatorSpec spec = SubordinatorSpec::gamma(1.0, 1.0);
  const std::size_t n = 20000;
  std::vector<IntPath> paths(n);
  const TimeGrid grid{{0.5, 1.0}};
  for (std::size_t i = 0; i < n; ++i) {
    RngStream r(63, i);
    paths[i] = sample_tcfspok(params, frac, spec, grid, r, 1e-3);
  }
  const McMoments mc = mc_moments(paths, 0, 1);
  RngStream rng(64, 0);
  TcCovOptions opts;
  opts.n_mc = 100000;
  const MomentReport an = tcfspok_moments(
      params, frac, spec, 0.5, 1.0, gamma_moment_source(1.0, 1.0), rng, opts);
  const double tol = 3.0 * std::sqrt(mc.cov_st.std_error * mc.cov_st.std_error +
                                     an.cov_se * an.cov_se);
  CHECK(std::abs(mc.cov_st.value - an.cov) < tol);
}

TEST_CASE("subordinated LRD check: hypothesis gates") {
  const SkellamParams params{2, 1.0, 0.5};
  const FracParams frac{0.7};
  const SubordinatorSpec spec = SubordinatorSpec::gamma(1.0, 1.0);
  const MomentSource source = gamma_moment_source(1.0, 1.0);
  const TimeGrid grid{{10.0, 100.0, 1000.0}};
  RngStream rng(65, 0);

  CHECK_THROWS_AS(tcfspok_lrd_check(params, frac, spec, 0.7, 1.0, 0.9, 1.0,
                                    grid, source, rng),
                  HypothesisError);
  CHECK_THROWS_AS(tcfspok_lrd_check(params, frac,
                                    SubordinatorSpec::stable(0.5), 0.5, 1.0,
                                    1.0, 1.0, grid, source, rng),
                  HypothesisError);

  // boundary k2 = k1^2 accepted; variance prefactor stays positive
  TcCovOptions fast;
  fast.n_mc = 20000;
  const LrdReport rep = tcfspok_lrd_check(params, frac, spec, 0.7, 1.0, 1.0,
                                          1.0, grid, source, rng, fast);
  CHECK(std::abs(rep.exponent - 0.7) < 0.05);
}

TEST_CASE("iterated-logarithm pieces") {
  CHECK(lil_constant({1, 2.0, 1.0}, FracParams{1.0}, 0.5) ==
        doctest::Approx(0.25).epsilon(1e-12));
  CHECK(lil_constant({2, 0.8, 0.8}, FracParams{0.7}, 0.4) == 0.0);
  const auto [r1, r2] = r_constants({2, 1.0, 0.5});
  CHECK(rel_err(lil_constant({2, 1.0, 0.5}, FracParams{0.7}, 0.5),
                r1 * std::pow(0.25, 0.7)) < 1e-12);

  // stable(alpha): phi(y) = y^{1/alpha}, so g(t) = (log log t)^{1-1/a} t^{1/a}
  const SubordinatorSpec spec = SubordinatorSpec::stable(0.5);
  const double t = 100.0;
  const double ll = std::log(std::log(t));
  CHECK(rel_err(lil_g(spec, t), std::pow(ll, -1.0) * t * t) < 1e-8);
  CHECK_THROWS_AS(lil_g(spec, 2.0), DomainError);

  // monotone growth on [10, 1e6]
  double prev = 0.0;
  for (double x = 10.0; x <= 1e6; x *= 2.0) {
    const double g = lil_g(spec, x);
    CHECK(g > prev);
    prev = g;
  }
}

TEST_CASE("event-count series pmf: gamma closed form") {
  const SkellamParams params{2, 1.0, 0.5};
  const SubordinatorSpec spec = SubordinatorSpec::gamma(1.0, 1.0);
  RngStream rng(66, 0);
  const TcPmfResult res = tc_spok_pmf_table(params, spec, 1.0, 1000, rng);
  CHECK(std::abs(res.table.sum() + res.table.truncation_mass - 1.0) < 1e-6);
  for (double se : res.std_errors) CHECK(se == 0.0);
  double mean = 0.0;
  for (long long n = res.table.n_min; n <= res.table.n_max; ++n)
    mean += n * res.table.prob(n);
  CHECK(std::abs(mean - 1.5) < 1e-9);  // r1 * b t / a
}

TEST_CASE("event-count series pmf: order-1 equivalence with the double series") {
  // at order 1 the event-count series collapses to
  //   sum_x (l1)^{n+x} (l2)^x / ((n+x)! x!) E(e^{-(l1+l2) D} D^{2x+n})
  const SkellamParams params{1, 1.0, 0.5};
  const double a = 1.0, b = 1.0, t = 1.0;
  const double rate = params.lambda1 + params.lambda2;
  const SubordinatorSpec spec = SubordinatorSpec::gamma(a, b);
  RngStream rng(67, 0);
  for (long long n : {-3LL, 0LL, 2LL}) {
    double direct = 0.0;
    for (int x = static_cast<int>(std::max(0LL, -n)); x < 200; ++x) {
      const double coef =
          std::exp((n + x) * std::log(params.lambda1) +
                   x * std::log(params.lambda2) - std::lgamma(n + x + 1.0) -
                   std::lgamma(x + 1.0));
      const double term =
          coef * gamma_exp_moment(a, b, t, rate, 2 * x + static_cast<int>(n));
      direct += term;
      if (x > std::max(0LL, -n) + 5 && term < 1e-16 * direct) break;
    }
    const EstimateWithError series =
        tc_spok_pmf(params, spec, t, n, 1000, rng);
    CHECK(std::abs(series.value - direct) < 1e-12);
  }
}

TEST_CASE("event-count series pmf: Monte Carlo families") {
  const SkellamParams sym{2, 0.8, 0.8};
  const SubordinatorSpec spec = SubordinatorSpec::tempered_stable(0.5, 1.0);
  RngStream rng(68, 0);
  const TcPmfResult res = tc_spok_pmf_table(sym, spec, 1.0, 20000, rng);
  CHECK(std::abs(res.table.sum() + res.table.truncation_mass - 1.0) < 1e-6);
  // symmetric intensities: estimates symmetric within Monte Carlo error
  for (long long n = 1; n <= 5; ++n) {
    const double p = res.table.prob(n), q = res.table.prob(-n);
    const std::size_t i = static_cast<std::size_t>(n - res.table.n_min);
    const std::size_t j = static_cast<std::size_t>(-n - res.table.n_min);
    const double se =
        std::sqrt(res.std_errors[i] * res.std_errors[i] +
                  res.std_errors[j] * res.std_errors[j]);
    CHECK(std::abs(p - q) <= std::max(4.0 * se, 1e-12));
  }

  // inverse variant: first-passage draws; mass still sums to one
  RngStream rng2(69, 0);
  const TcPmfResult inv = tc_spok_pmf_table(
      sym, SubordinatorSpec::stable(0.5), 1.0, 2000, rng2, true, 1e-3);
  CHECK(std::abs(inv.table.sum() + inv.table.truncation_mass - 1.0) < 1e-6);
}

TEST_CASE("inverse-subordinated moments: reductions and stable support") {
  const SkellamParams sym{2, 0.8, 0.8};
  const SubordinatorSpec spec = SubordinatorSpec::stable(0.5);
  const MomentSource source =
      mc_moment_source(MomentKind::inverse, spec, 100000, 70, 0);
  RngStream rng(71, 0);
  const MomentReport rep =
      inverse_tc_moments(sym, FracParams{1.0}, spec, 1.0, 1.0, source, rng);
  CHECK(rep.mean == 0.0);  // r1 = 0
  CHECK(rep.variance > 0.0);
  CHECK(rep.cov == rep.variance);
}

TEST_CASE("inverse-subordinated covariance at distinct times vs a path batch") {
  const SkellamParams params{2, 1.0, 0.5};
  const FracParams frac{0.7};
  const SubordinatorSpec spec = SubordinatorSpec::stable(0.5);
  const double step = 1e-3;

  const std::size_t n = 8000;
  std::vector<IntPath> paths(n);
  const TimeGrid grid{{0.5, 1.0}};
  for (std::size_t i = 0; i < n; ++i) {
    RngStream r(73, i);
    paths[i] = sample_inverse_tcfspok(params, frac, spec, grid, step, r, 1e-3);
  }
  const McMoments mc = mc_moments(paths, 0, 1);

  const MomentSource source =
      mc_moment_source(MomentKind::inverse, spec, 200000, 74, 0);
  RngStream rng(75, 0);
  TcCovOptions opts;
  opts.n_mc = 50000;
  opts.step = step;
  const MomentReport an =
      inverse_tc_moments(params, frac, spec, 0.5, 1.0, source, rng, opts);
  const double tol =
      3.0 * std::sqrt(mc.cov_st.std_error * mc.cov_st.std_error +
                      an.cov_se * an.cov_se);
  CHECK(std::abs(mc.cov_st.value - an.cov) < tol);
}

TEST_CASE("first-passage composition closes the loop with the fractional pmf") {
  // S(H(t)) with H the inverse of the half-stable subordinator has the same
  // one-dimensional law as the fractional process at index 1/2, so the
  // event-count MC table must agree with the Wright-kernel quadrature table.
  const SkellamParams params{2, 1.0, 0.5};
  RngStream rng(76, 0);
  const TcPmfResult mc_table =
      tc_spok_pmf_table(params, SubordinatorSpec::stable(0.5), 1.0, 20000,
                        rng, /*inverse=*/true, 1e-3);
  const PmfTable analytic = fspok_pmf_table(params, FracParams{0.5}, 1.0);
  CHECK(tv_distance(analytic, mc_table.table) < 0.02);
}

TEST_CASE("grunwald-letnikov derivative") {
  const double dt = 1e-3;
  const std::size_t n = 1001;

  // constants map to exactly zero
  std::vector<double> ones(n, 3.7);
  const CaputoResult c0 = caputo_derivative_gl(ones, 0.6, dt);
  for (double v : c0.values) CHECK(v == 0.0);
  CHECK(!c0.coarse_grid_warning);

  // f(t) = t, alpha = 0.5: derivative t^{1/2}/Gamma(1.5) within 1% past the
  // startup layer
  std::vector<double> linear(n);
  for (std::size_t i = 0; i < n; ++i) linear[i] = i * dt;
  const CaputoResult c1 = caputo_derivative_gl(linear, 0.5, dt);
  for (std::size_t i = 50; i < n; ++i) {
    const double t = i * dt;
    const double want = std::sqrt(t) / std::tgamma(1.5);
    CHECK(std::abs(c1.values[i] - want) < 1e-2 * want);
  }

  // eigenfunction identity: d^a E_a(-c t^a) = -c E_a(-c t^a) within 2%
  const double alpha = 0.7, c = 2.0;
  std::vector<double> ml(n);
  for (std::size_t i = 0; i < n; ++i)
    ml[i] = mittag_leffler(alpha, 1.0, 1.0, -c * std::pow(i * dt, alpha));
  const CaputoResult c2 = caputo_derivative_gl(ml, alpha, dt);
  for (std::size_t i = 50; i < n; ++i) {
    const double want = -c * ml[i];
    CHECK(std::abs(c2.values[i] - want) < 2e-2 * std::abs(want));
  }

  // alpha = 1: central differences, exact for quadratics in the interior
  std::vector<double> quad(n);
  for (std::size_t i = 0; i < n; ++i) quad[i] = (i * dt) * (i * dt);
  const CaputoResult c3 = caputo_derivative_gl(quad, 1.0, dt);
  for (std::size_t i = 1; i + 1 < n; ++i)
    CHECK(std::abs(c3.values[i] - 2.0 * i * dt) < 1e-10);

  std::vector<double> coarse{0.0, 1.0, 2.0};
  CHECK(caputo_derivative_gl(coarse, 0.5, 0.02).coarse_grid_warning);
  CHECK_THROWS_AS(caputo_derivative_gl(std::vector<double>{1.0}, 0.5, dt),
                  DomainError);
}

TEST_CASE("governing-system residual: guards and a reduced-size run") {
  const SkellamParams params{2, 1.0, 0.5};
  CHECK_THROWS_AS(fde_residual(params, FracParams{0.7}, -1, 1, 1.0, 1e-3),
                  DomainError);
  CHECK_THROWS_AS(fde_residual(params, FracParams{0.7}, -6, 6, 0.5, 1e-3),
                  DomainError);  // dt > 1e-3 * t_max

  const FdeResidual run =
      fde_residual(params, FracParams{0.7}, -4, 4, 0.25, 2.5e-4, 1e-9);
  CHECK(run.max_pmf > 0.5);
  CHECK(run.max_abs_residual / run.max_pmf < 1e-2);

  // symmetric intensities keep the window symmetric, so the neighbor sums
  // cancel pairwise; the residual stays within the same bound
  const FdeResidual sym =
      fde_residual({2, 0.75, 0.75}, FracParams{0.7}, -4, 4, 0.25, 2.5e-4, 1e-9);
  CHECK(sym.max_abs_residual / sym.max_pmf < 1e-2);
}
