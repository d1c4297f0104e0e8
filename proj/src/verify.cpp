#include "spok/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <optional>
#include <thread>

#include "spok/analytics.hpp"
#include "spok/estimators.hpp"
#include "spok/processes.hpp"
#include "spok/quad.hpp"
#include "spok/specfun.hpp"

namespace spok {
namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

// Disjoint stream-id blocks per criterion keep all draws independent while
// staying reproducible and thread-count invariant.
constexpr std::uint64_t kStreamBlock = 10'000'000;

struct Ctx {
  VerifyOptions opts;
  SkellamParams params{2, 1.0, 0.5};   // the suite's reference parameter point
  std::optional<std::vector<IntPath>> fspok_batch;  // shared by two criteria

  unsigned threads() const {
    if (opts.threads > 0) return opts.threads;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
  }
};

// Runs fn(rep, rng) for rep = 0..n-1 with per-replication streams; results
// must be written into preallocated per-rep slots so the merge order cannot
// matter.
void parallel_reps(std::size_t n, std::uint64_t seed, std::uint64_t base,
                   unsigned threads,
                   const std::function<void(std::size_t, RngStream&)>& fn) {
  threads = std::max(1u, std::min<unsigned>(threads, 64));
  if (threads == 1 || n < 512) {
    for (std::size_t r = 0; r < n; ++r) {
      RngStream rng(seed, base + r);
      fn(r, rng);
    }
    return;
  }
  std::vector<std::thread> pool;
  const std::size_t chunk = (n + threads - 1) / threads;
  for (unsigned w = 0; w < threads; ++w) {
    const std::size_t lo = w * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&, lo, hi]() {
      for (std::size_t r = lo; r < hi; ++r) {
        RngStream rng(seed, base + r);
        fn(r, rng);
      }
    });
  }
  for (auto& th : pool) th.join();
}

CheckLine check_abs(const std::string& name, double expected, double observed,
                    double tol) {
  return {name, expected, observed, tol, std::abs(observed - expected) <= tol};
}

// |observed - expected| <= tol * max(1, |expected|)
CheckLine check_rel(const std::string& name, double expected, double observed,
                    double tol) {
  const double bound = tol * std::max(1.0, std::abs(expected));
  return {name, expected, observed, bound,
          std::abs(observed - expected) <= bound};
}

CheckLine check_3se(const std::string& name, double expected, double observed,
                    double se) {
  const double tol = 3.0 * se;
  return {name, expected, observed, tol,
          std::abs(observed - expected) <= tol};
}

double sample_variance(const std::vector<double>& x, double* se_out) {
  const double n = static_cast<double>(x.size());
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= n;
  double m2 = 0.0, m4 = 0.0;
  for (double v : x) {
    const double d = v - mean;
    m2 += d * d;
    m4 += d * d * d * d;
  }
  const double var = m2 / (n - 1.0);
  m4 /= n;
  if (se_out) *se_out = std::sqrt(std::max(0.0, m4 - var * var) / n);
  return var;
}

const std::vector<IntPath>& fspok_batch(Ctx& ctx) {
  if (!ctx.fspok_batch) {
    const std::size_t n = 100000;
    std::vector<IntPath> paths(n);
    const TimeGrid grid{{0.5, 1.0}};
    const FracParams frac{0.7};
    parallel_reps(n, ctx.opts.seed, 3 * kStreamBlock, ctx.threads(),
                  [&](std::size_t r, RngStream& rng) {
                    paths[r] =
                        sample_fspok(ctx.params, frac, grid, rng, 1e-3);
                  });
    ctx.fspok_batch = std::move(paths);
  }
  return *ctx.fspok_batch;
}

// ---------------------------------------------------------------------- 1
CriterionResult c_special_functions(Ctx&) {
  CriterionResult res{"special-functions", false, 0.0, 1.0, {}};

  double worst = 0.0;
  for (int i = 0; i <= 20; ++i) {
    const double x = -5.0 + 0.5 * i;
    const double want = std::exp(x);
    const double got = mittag_leffler(1.0, 1.0, 1.0, x);
    worst = std::max(worst,
                     std::abs(got - want) / std::max(1.0, std::abs(want)));
  }
  res.checks.push_back({"ml(1,1,1;x) = exp(x), max rel dev on [-5,5]", 0.0,
                        worst, 1e-10, worst <= 1e-10});

  worst = 0.0;
  for (int i = 0; i <= 12; ++i) {
    const double z = 0.5 * i;
    const double want = std::exp(-0.25 * z * z) / std::sqrt(kPi);
    worst = std::max(worst, std::abs(wright_m(0.5, z) - want));
  }
  res.checks.push_back({"wright_m(1/2,z) = exp(-z^2/4)/sqrt(pi), max abs dev",
                        0.0, worst, 1e-8, worst <= 1e-8});

  for (double alpha : {0.3, 0.5, 0.7}) {
    double v = 1.0;
    int guard = 0;
    while (wright_m(alpha, v) > 1e-16 && ++guard < 120) v *= 1.25;
    const double mass = gk_integrate(
        [alpha](double z) { return wright_m(alpha, z); }, 0.0, v, 1e-9, 1e-10);
    res.checks.push_back(check_abs(
        "int wright_m(alpha=" + std::to_string(alpha) + ") dz", 1.0, mass,
        1e-6));
  }

  res.pass = std::all_of(res.checks.begin(), res.checks.end(),
                         [](const CheckLine& c) { return c.pass; });
  return res;
}

// ---------------------------------------------------------------------- 2
CriterionResult c_spok_law(Ctx& ctx) {
  CriterionResult res{"spok-law", false, 0.0, 30.0, {}};
  const std::size_t n = 100000;
  const TimeGrid grid{{0.5, 1.0}};
  std::vector<IntPath> paths(n);
  parallel_reps(n, ctx.opts.seed, 2 * kStreamBlock, ctx.threads(),
                [&](std::size_t r, RngStream& rng) {
                  paths[r] = sample_spok(ctx.params, grid, rng);
                });

  std::vector<long long> at_t(n);
  for (std::size_t r = 0; r < n; ++r) at_t[r] = paths[r].values[1];
  const EmpiricalPmf emp = empirical_pmf(at_t);
  const PmfTable analytic = spok_pmf_table(ctx.params, 1.0);
  const double tv = tv_distance(analytic, emp);
  res.checks.push_back({"TV(empirical, pmf) at t=1", 0.0, tv, 0.01, tv < 0.01});

  const McMoments mc = mc_moments(paths, 0, 1);
  const MomentReport an = spok_moments(ctx.params, 0.5, 1.0);
  res.checks.push_back(
      check_3se("mean at t=1", an.mean, mc.mean_t.value, mc.mean_t.std_error));
  res.checks.push_back(check_3se("variance at t=1", an.variance,
                                 mc.var_t.value, mc.var_t.std_error));
  res.checks.push_back(check_3se("cov(0.5, 1)", an.cov, mc.cov_st.value,
                                 mc.cov_st.std_error));
  res.pass = std::all_of(res.checks.begin(), res.checks.end(),
                         [](const CheckLine& c) { return c.pass; });
  return res;
}

// ---------------------------------------------------------------------- 3
CriterionResult c_fspok_pmf(Ctx& ctx) {
  CriterionResult res{"fspok-pmf", false, 0.0, 120.0, {}};
  const auto& paths = fspok_batch(ctx);
  std::vector<long long> at_t(paths.size());
  for (std::size_t r = 0; r < paths.size(); ++r) at_t[r] = paths[r].values[1];
  const EmpiricalPmf emp = empirical_pmf(at_t);
  const PmfTable analytic =
      fspok_pmf_table(ctx.params, FracParams{0.7}, 1.0, 1e-7);
  const double tv = tv_distance(analytic, emp);
  res.checks.push_back({"TV(empirical, quadrature pmf), t=1, alpha=0.7", 0.0,
                        tv, 0.01, tv < 0.01});
  const double mass = analytic.sum() + analytic.truncation_mass;
  res.checks.push_back(check_abs("pmf total mass + truncation", 1.0, mass,
                                 1e-6));
  res.pass = std::all_of(res.checks.begin(), res.checks.end(),
                         [](const CheckLine& c) { return c.pass; });
  return res;
}

// ---------------------------------------------------------------------- 4
CriterionResult c_pgf_duality(Ctx& ctx) {
  CriterionResult res{"pgf-duality", false, 0.0, 0.0, {}};
  const FracParams frac{0.7};
  const double t = 1.0;

  // dual sum over an adaptively extended window; entries are evaluated with
  // relative accuracy so theta^n amplification of negative-n terms is safe
  auto fspok_dual = [&](double theta) {
    double total = 0.0;
    int small_run = 0;
    for (long long n = 0; n <= 150 && small_run < 3; ++n) {
      const double term =
          std::pow(theta, static_cast<double>(n)) *
          fspok_pmf(ctx.params, frac, t, n, 1e-300);
      total += term;
      small_run = (std::abs(term) <= 1e-10 * std::abs(total)) ? small_run + 1 : 0;
    }
    small_run = 0;
    for (long long n = -1; n >= -150 && small_run < 3; --n) {
      const double term =
          std::pow(theta, static_cast<double>(n)) *
          fspok_pmf(ctx.params, frac, t, n, 1e-300);
      total += term;
      small_run = (std::abs(term) <= 1e-10 * std::abs(total)) ? small_run + 1 : 0;
    }
    return total;
  };
  auto spok_dual = [&](double theta) {
    const PmfTable table = spok_pmf_table(ctx.params, t);
    double total = 0.0;
    for (long long n = table.n_min; n <= table.n_max; ++n)
      total += std::pow(theta, static_cast<double>(n)) * table.prob(n);
    return total;
  };

  for (double theta : {0.3, 0.6, 0.9}) {
    const double pgf = fspok_pgf(ctx.params, frac, theta, t);
    res.checks.push_back(check_abs(
        "fspok pgf vs pmf sum, theta=" + std::to_string(theta), pgf,
        fspok_dual(theta), 1e-5));
    const double spgf = spok_pgf(ctx.params, theta, t);
    res.checks.push_back(check_abs(
        "spok pgf vs pmf sum, theta=" + std::to_string(theta), spgf,
        spok_dual(theta), 1e-5));
    const double ml_at_one = fspok_pgf(ctx.params, FracParams{1.0}, theta, t);
    res.checks.push_back(check_rel(
        "alpha=1 pgf reduction, theta=" + std::to_string(theta), spgf,
        ml_at_one, 1e-12));
  }
  res.pass = std::all_of(res.checks.begin(), res.checks.end(),
                         [](const CheckLine& c) { return c.pass; });
  return res;
}

// ---------------------------------------------------------------------- 5
CriterionResult c_fde_residual(Ctx& ctx) {
  CriterionResult res{"fde-residual", false, 0.0, 300.0, {}};
  const FdeResidual frac_run = fde_residual(ctx.params, FracParams{0.7}, -10,
                                            10, 1.0, 1e-3, 1e-10);
  const double rel = frac_run.max_abs_residual / frac_run.max_pmf;
  res.checks.push_back({"GL residual / max pmf, alpha=0.7, k=2", 0.0, rel,
                        1e-2, rel < 1e-2});

  const SkellamParams k1{1, 1.0, 0.5};
  const FdeResidual ode_run =
      fde_residual(k1, FracParams{1.0}, -10, 10, 1.0, 1e-3);
  const double rel1 = ode_run.max_abs_residual / ode_run.max_pmf;
  res.checks.push_back({"central-difference residual / max pmf, alpha=1, k=1",
                        0.0, rel1, 1e-4, rel1 < 1e-4});
  res.pass = std::all_of(res.checks.begin(), res.checks.end(),
                         [](const CheckLine& c) { return c.pass; });
  return res;
}

// ---------------------------------------------------------------------- 6
CriterionResult c_inverse_stable_moments(Ctx& ctx) {
  CriterionResult res{"inverse-stable-moments", false, 0.0, 0.0, {}};
  const std::size_t n = 1000000;
  int combo = 0;
  for (double alpha : {0.5, 0.7}) {
    for (double t : {0.5, 1.0, 2.0}) {
      std::vector<double> draws(n);
      parallel_reps(n, ctx.opts.seed,
                    6 * kStreamBlock + combo * 2'000'000, ctx.threads(),
                    [&](std::size_t r, RngStream& rng) {
                      draws[r] = sample_inverse_stable(alpha, t, rng);
                    });
      ++combo;
      double mean = 0.0;
      for (double v : draws) mean += v;
      mean /= static_cast<double>(n);
      double sd = 0.0;
      for (double v : draws) sd += (v - mean) * (v - mean);
      sd = std::sqrt(sd / (static_cast<double>(n) - 1.0));
      const double mean_se = sd / std::sqrt(static_cast<double>(n));
      const MomentReport an = inv_stable_mean_cov(alpha, t, t);
      const std::string tag =
          " (alpha=" + std::to_string(alpha) + ", t=" + std::to_string(t) + ")";
      res.checks.push_back(check_3se("mean" + tag, an.mean, mean, mean_se));
      double var_se = 0.0;
      const double var = sample_variance(draws, &var_se);
      res.checks.push_back(check_3se("variance" + tag, an.variance, var,
                                     var_se));
    }
  }
  res.pass = std::all_of(res.checks.begin(), res.checks.end(),
                         [](const CheckLine& c) { return c.pass; });
  return res;
}

// ---------------------------------------------------------------------- 7
CriterionResult c_fspok_moments(Ctx& ctx) {
  CriterionResult res{"fspok-moments", false, 0.0, 0.0, {}};
  const auto& paths = fspok_batch(ctx);
  const McMoments mc = mc_moments(paths, 0, 1);
  const MomentReport an = fspok_moments(ctx.params, FracParams{0.7}, 0.5, 1.0);
  res.checks.push_back(
      check_3se("mean at t=1", an.mean, mc.mean_t.value, mc.mean_t.std_error));
  res.checks.push_back(check_3se("variance at t=1", an.variance,
                                 mc.var_t.value, mc.var_t.std_error));
  res.checks.push_back(
      check_3se("cov(0.5, 1)", an.cov, mc.cov_st.value, mc.cov_st.std_error));
  res.pass = std::all_of(res.checks.begin(), res.checks.end(),
                         [](const CheckLine& c) { return c.pass; });
  return res;
}

// ---------------------------------------------------------------------- 8
CriterionResult c_fspok_lrd(Ctx& ctx) {
  CriterionResult res{"fspok-lrd", false, 0.0, 10.0, {}};
  TimeGrid grid;
  for (int i = 0; i < 40; ++i)
    grid.times.push_back(std::pow(10.0, 2.0 + 3.0 * i / 39.0));
  for (double alpha : {0.3, 0.5, 0.7, 0.9}) {
    const LrdReport rep =
        fspok_lrd(ctx.params, FracParams{alpha}, 1.0, grid);
    res.checks.push_back(check_abs(
        "decay exponent, alpha=" + std::to_string(alpha), alpha, rep.exponent,
        0.02));
    res.checks.push_back(check_abs(
        "asymptote ratio at t=1e5, alpha=" + std::to_string(alpha), 1.0,
        rep.asymptote_ratio_at_tmax, 0.05));
  }
  res.pass = std::all_of(res.checks.begin(), res.checks.end(),
                         [](const CheckLine& c) { return c.pass; });
  return res;
}

// ---------------------------------------------------------------------- 9
CriterionResult c_tcfspok_gamma(Ctx& ctx) {
  CriterionResult res{"tcfspok-gamma", false, 0.0, 0.0, {}};
  const FracParams frac{0.7};
  const SubordinatorSpec spec = SubordinatorSpec::gamma(1.0, 1.0);
  const MomentSource source = gamma_moment_source(1.0, 1.0);

  const std::size_t n = 100000;
  std::vector<IntPath> paths(n);
  const TimeGrid grid{{1.0}};
  parallel_reps(n, ctx.opts.seed, 9 * kStreamBlock, ctx.threads(),
                [&](std::size_t r, RngStream& rng) {
                  paths[r] =
                      sample_tcfspok(ctx.params, frac, spec, grid, rng, 1e-3);
                });
  std::vector<double> vals(n);
  for (std::size_t r = 0; r < n; ++r)
    vals[r] = static_cast<double>(paths[r].values[0]);
  double mean = 0.0;
  for (double v : vals) mean += v;
  mean /= static_cast<double>(n);
  double sd = 0.0;
  for (double v : vals) sd += (v - mean) * (v - mean);
  sd = std::sqrt(sd / (static_cast<double>(n) - 1.0));
  double var_se = 0.0;
  const double var = sample_variance(vals, &var_se);

  RngStream rng(ctx.opts.seed, 9 * kStreamBlock + 5'000'000);
  const MomentReport an =
      tcfspok_moments(ctx.params, frac, spec, 1.0, 1.0, source, rng);
  res.checks.push_back(check_3se("mean at t=1", an.mean, mean,
                                 sd / std::sqrt(static_cast<double>(n))));
  res.checks.push_back(check_3se("variance at t=1", an.variance, var, var_se));

  const TimeGrid lrd_grid{{10.0, 100.0, 1000.0}};
  const LrdReport rep = tcfspok_lrd_check(ctx.params, frac, spec, 0.7, 1.0,
                                          1.0, 1.0, lrd_grid, source, rng);
  res.checks.push_back(
      check_abs("LRD decay exponent (rho=alpha)", 0.7, rep.exponent, 0.05));
  res.pass = std::all_of(res.checks.begin(), res.checks.end(),
                         [](const CheckLine& c) { return c.pass; });
  return res;
}

// --------------------------------------------------------------------- 10
CriterionResult c_series_pmf(Ctx& ctx) {
  CriterionResult res{"series-pmf", false, 0.0, 0.0, {}};
  const SubordinatorSpec spec = SubordinatorSpec::gamma(1.0, 1.0);
  RngStream rng(ctx.opts.seed, 10 * kStreamBlock);
  const TcPmfResult series =
      tc_spok_pmf_table(ctx.params, spec, 1.0, 1000, rng);
  const double mass = series.table.sum() + series.table.truncation_mass;
  res.checks.push_back(check_abs("series mass + truncation", 1.0, mass, 1e-6));

  const std::size_t n = 100000;
  std::vector<long long> vals(n);
  const TimeGrid grid{{1.0}};
  const FracParams identity{1.0};
  parallel_reps(n, ctx.opts.seed, 10 * kStreamBlock + 1'000'000,
                ctx.threads(), [&](std::size_t r, RngStream& stream) {
                  vals[r] = sample_tcfspok(ctx.params, identity, spec, grid,
                                           stream)
                                .values[0];
                });
  const EmpiricalPmf emp = empirical_pmf(vals);
  const double tv = tv_distance(series.table, emp);
  res.checks.push_back(
      {"TV(series pmf, MC) at alpha=1", 0.0, tv, 0.01, tv < 0.01});
  res.pass = std::all_of(res.checks.begin(), res.checks.end(),
                         [](const CheckLine& c) { return c.pass; });
  return res;
}

// --------------------------------------------------------------------- 11
CriterionResult c_inverse_tc_moments(Ctx& ctx) {
  CriterionResult res{"inverse-tc-moments", false, 0.0, 0.0, {}};
  const FracParams frac{0.7};
  const SubordinatorSpec spec = SubordinatorSpec::stable(0.5);
  const double t = 1.0;
  const double step = 1e-3;

  const std::size_t n = 10000;
  std::vector<double> vals(n);
  const TimeGrid grid{{t}};
  parallel_reps(n, ctx.opts.seed, 11 * kStreamBlock, ctx.threads(),
                [&](std::size_t r, RngStream& rng) {
                  vals[r] = static_cast<double>(
                      sample_inverse_tcfspok(ctx.params, frac, spec, grid,
                                             step, rng, 1e-3)
                          .values[0]);
                });
  double mean = 0.0;
  for (double v : vals) mean += v;
  mean /= static_cast<double>(n);
  double sd = 0.0;
  for (double v : vals) sd += (v - mean) * (v - mean);
  sd = std::sqrt(sd / (static_cast<double>(n) - 1.0));
  const double mean_se = sd / std::sqrt(static_cast<double>(n));
  double var_se = 0.0;
  const double var = sample_variance(vals, &var_se);

  // analytic side: inverse moments of the stable subordinator are exact draws
  const MomentSource source = mc_moment_source(
      MomentKind::inverse, spec, 1000000, ctx.opts.seed,
      11 * kStreamBlock + 5'000'000);
  RngStream rng(ctx.opts.seed, 11 * kStreamBlock + 6'000'000);
  const MomentReport an =
      inverse_tc_moments(ctx.params, frac, spec, t, t, source, rng);

  res.checks.push_back(check_3se(
      "mean at t=1", an.mean, mean,
      std::sqrt(mean_se * mean_se + an.mean_se * an.mean_se)));
  res.checks.push_back(check_3se(
      "variance at t=1", an.variance, var,
      std::sqrt(var_se * var_se + an.variance_se * an.variance_se)));
  res.pass = std::all_of(res.checks.begin(), res.checks.end(),
                         [](const CheckLine& c) { return c.pass; });
  return res;
}

// --------------------------------------------------------------------- 12
CriterionResult c_lil(Ctx&) {
  CriterionResult res{"lil", false, 0.0, 0.0, {}};
  for (double alpha : {0.5, 0.7}) {
    const SubordinatorSpec spec = SubordinatorSpec::stable(alpha);
    for (double t : {100.0, 1000.0}) {
      const double ll = std::log(std::log(t));
      const double closed =
          std::pow(ll, 1.0 - 1.0 / alpha) * std::pow(t, 1.0 / alpha);
      const double got = lil_g(spec, t);
      res.checks.push_back(check_rel(
          "normalizer g(t), stable alpha=" + std::to_string(alpha) +
              ", t=" + std::to_string(t),
          closed, got, 1e-8));
    }
  }
  const SkellamParams p1{1, 2.0, 1.0};
  const double c = lil_constant(p1, FracParams{1.0}, 0.5);
  res.checks.push_back(check_abs("liminf constant spot value", 0.25, c, 1e-12));
  res.pass = std::all_of(res.checks.begin(), res.checks.end(),
                         [](const CheckLine& c2) { return c2.pass; });
  return res;
}

using CriterionFn = CriterionResult (*)(Ctx&);

const std::vector<std::pair<std::string, CriterionFn>>& registry() {
  static const std::vector<std::pair<std::string, CriterionFn>> reg = {
      {"special-functions", c_special_functions},
      {"spok-law", c_spok_law},
      {"fspok-pmf", c_fspok_pmf},
      {"pgf-duality", c_pgf_duality},
      {"fde-residual", c_fde_residual},
      {"inverse-stable-moments", c_inverse_stable_moments},
      {"fspok-moments", c_fspok_moments},
      {"fspok-lrd", c_fspok_lrd},
      {"tcfspok-gamma", c_tcfspok_gamma},
      {"series-pmf", c_series_pmf},
      {"inverse-tc-moments", c_inverse_tc_moments},
      {"lil", c_lil},
  };
  return reg;
}

}  // namespace

const std::vector<std::string>& criterion_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [name, fn] : registry()) out.push_back(name);
    return out;
  }();
  return names;
}

std::vector<CriterionResult> run_acceptance(const VerifyOptions& options) {
  Ctx ctx;
  ctx.opts = options;
  std::vector<CriterionResult> results;
  bool matched = options.only.empty();
  for (const auto& [name, fn] : registry()) {
    if (!options.only.empty() && options.only != name) continue;
    matched = true;
    const auto start = std::chrono::steady_clock::now();
    CriterionResult res = fn(ctx);
    res.runtime_sec =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    if (res.runtime_limit_sec > 0.0 && res.runtime_sec > res.runtime_limit_sec)
      res.pass = false;
    results.push_back(std::move(res));
  }
  if (!matched)
    throw DomainError("run_acceptance: unknown criterion '" + options.only +
                      "'");
  return results;
}

}  // namespace spok
