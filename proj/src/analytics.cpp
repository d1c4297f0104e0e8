#include "spok/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "spok/estimators.hpp"
#include "spok/quad.hpp"
#include "spok/specfun.hpp"

namespace spok {
namespace {

double beta_complete(double a, double b) {
  return std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
}

// ---------------------------------------------------------------------------
// Exact order-k Skellam distribution at a fixed operational time.
// ---------------------------------------------------------------------------

struct Dist {
  long long n_min = 0;
  std::vector<double> p;

  long long n_max() const {
    return n_min + static_cast<long long>(p.size()) - 1;
  }
  double prob(long long n) const {
    if (n < n_min || n > n_max()) return 0.0;
    return p[static_cast<std::size_t>(n - n_min)];
  }
};

// Classical Skellam(mu1, mu2) over a window wide enough that the clipped
// tails are below ~1e-18 of the mass.
Dist skellam_component(double mu1, double mu2) {
  const double mean = mu1 - mu2;
  const double sd = std::sqrt(mu1 + mu2);
  const long long lo = static_cast<long long>(std::floor(mean - 12.0 * sd)) - 30;
  const long long hi = static_cast<long long>(std::ceil(mean + 12.0 * sd)) + 30;
  const double z = 2.0 * std::sqrt(mu1 * mu2);
  const double half_log_ratio = 0.5 * (std::log(mu1) - std::log(mu2));
  Dist d;
  d.n_min = lo;
  d.p.resize(static_cast<std::size_t>(hi - lo) + 1);
  for (long long n = lo; n <= hi; ++n) {
    const double lp = -(mu1 + mu2) + n * half_log_ratio +
                      log_bessel_i(static_cast<int>(std::llabs(n)), z);
    d.p[static_cast<std::size_t>(n - lo)] = lp < -745.0 ? 0.0 : std::exp(lp);
  }
  return d;
}

// Distribution of the order-k process at operational time u: the sum over
// jump sizes j = 1..k of j-scaled independent Skellam(lambda1 u, lambda2 u)
// components.
Dist spok_dist(const SkellamParams& params, double u) {
  if (u <= 0.0) return Dist{0, {1.0}};
  const Dist comp = skellam_component(params.lambda1 * u, params.lambda2 * u);
  Dist acc{0, {1.0}};
  for (int j = 1; j <= params.order; ++j) {
    Dist next;
    next.n_min = acc.n_min + j * comp.n_min;
    next.p.assign(acc.p.size() + static_cast<std::size_t>(j) * (comp.p.size() - 1),
                  0.0);
    for (std::size_t a = 0; a < acc.p.size(); ++a) {
      const double pa = acc.p[a];
      if (pa < 1e-305) continue;
      const std::size_t base = a;
      for (std::size_t c = 0; c < comp.p.size(); ++c) {
        next.p[base + static_cast<std::size_t>(j) * c] += pa * comp.p[c];
      }
    }
    acc = std::move(next);
  }
  return acc;
}

// Smallest v beyond which the Wright kernel is below tol.
double wright_cutoff(double alpha, double tol = 1e-15) {
  double v = 1.0;
  int iter = 0;
  while (wright_m(alpha, v) > tol && ++iter < 120) v *= 1.25;
  return 1.05 * v;
}

double pgf_exponent(const SkellamParams& params, double theta) {
  double up = 0.0, down = 0.0;
  double tp = 1.0, tm = 1.0;
  for (int j = 1; j <= params.order; ++j) {
    tp *= theta;
    tm /= theta;
    up += tp;
    down += tm;
  }
  return params.order * (params.lambda1 + params.lambda2) -
         params.lambda1 * up - params.lambda2 * down;
}

// Event-count jump law of the order-k difference process: +j carries
// weight lambda1/R and -j weight lambda2/R, j = 1..k, R = k(l1+l2).
struct JumpLaw {
  int order;
  double p_up, p_down;  // per size
};

Dist jump_convolve(const Dist& d, const JumpLaw& law) {
  Dist next;
  next.n_min = d.n_min - law.order;
  next.p.assign(d.p.size() + 2 * static_cast<std::size_t>(law.order), 0.0);
  for (std::size_t i = 0; i < d.p.size(); ++i) {
    const double pi = d.p[i];
    if (pi == 0.0) continue;
    for (int j = 1; j <= law.order; ++j) {
      next.p[i + static_cast<std::size_t>(law.order + j)] += pi * law.p_up;
      next.p[i + static_cast<std::size_t>(law.order - j)] += pi * law.p_down;
    }
  }
  return next;
}

// Leading coefficients of the governing system's solution: c_m = Q^m e_0 on
// a padded window, where Q is the generator of the order-k difference
// process.  Used to start the Grunwald-Letnikov scheme exactly.
std::vector<std::vector<double>> generator_powers(const SkellamParams& params,
                                                  long long lo, long long hi,
                                                  int max_power) {
  const int k = params.order;
  const long long pad = static_cast<long long>(max_power) * k;
  const long long wlo = lo - pad, whi = hi + pad;
  const std::size_t width = static_cast<std::size_t>(whi - wlo) + 1;
  const double total_rate = k * (params.lambda1 + params.lambda2);

  std::vector<std::vector<double>> powers;
  std::vector<double> cur(width, 0.0);
  cur[static_cast<std::size_t>(-wlo)] = 1.0;  // e_0
  powers.push_back(cur);
  for (int m = 1; m <= max_power; ++m) {
    std::vector<double> nxt(width, 0.0);
    for (std::size_t i = 0; i < width; ++i) {
      if (cur[i] == 0.0) continue;
      nxt[i] -= total_rate * cur[i];
      for (int j = 1; j <= k; ++j) {
        if (i + j < width) nxt[i + j] += params.lambda1 * cur[i];
        if (i >= static_cast<std::size_t>(j))
          nxt[i - j] += params.lambda2 * cur[i];
      }
    }
    powers.push_back(nxt);
    cur = std::move(nxt);
  }
  // re-base each power onto [lo, hi]
  std::vector<std::vector<double>> out(powers.size());
  for (std::size_t m = 0; m < powers.size(); ++m) {
    out[m].resize(static_cast<std::size_t>(hi - lo) + 1);
    for (long long n = lo; n <= hi; ++n)
      out[m][static_cast<std::size_t>(n - lo)] =
          powers[m][static_cast<std::size_t>(n - wlo)];
  }
  return out;
}

EstimateWithError closed_form(double v) { return {v, 0.0, 0}; }

}  // namespace

std::pair<double, double> r_constants(const SkellamParams& params) {
  params.validate();
  const double k = params.order;
  const double r1 = k * (k + 1.0) * (params.lambda1 - params.lambda2) / 2.0;
  const double r2 =
      k * (k + 1.0) * (2.0 * k + 1.0) * (params.lambda1 + params.lambda2) / 6.0;
  return {r1, r2};
}

double spok_pmf(const SkellamParams& params, double t, long long n) {
  params.validate();
  if (!(t >= 0.0)) throw DomainError("spok_pmf: t must be >= 0");
  if (t == 0.0) return n == 0 ? 1.0 : 0.0;
  return spok_dist(params, t).prob(n);
}

PmfTable spok_pmf_table(const SkellamParams& params, double t) {
  params.validate();
  if (!(t >= 0.0)) throw DomainError("spok_pmf_table: t must be >= 0");
  PmfTable out;
  if (t == 0.0) {
    out.n_min = out.n_max = 0;
    out.probs = {1.0};
    return out;
  }
  Dist d = spok_dist(params, t);
  out.n_min = d.n_min;
  out.n_max = d.n_max();
  out.probs = std::move(d.p);
  out.truncation_mass = std::max(0.0, 1.0 - out.sum());
  return out;
}

std::vector<double> spok_pmf_window(const SkellamParams& params, double t,
                                    long long n_lo, long long n_hi) {
  params.validate();
  if (n_hi < n_lo) throw DomainError("spok_pmf_window: empty window");
  std::vector<double> out(static_cast<std::size_t>(n_hi - n_lo) + 1, 0.0);
  if (t == 0.0) {
    if (n_lo <= 0 && 0 <= n_hi) out[static_cast<std::size_t>(-n_lo)] = 1.0;
    return out;
  }
  const Dist d = spok_dist(params, t);
  for (long long n = n_lo; n <= n_hi; ++n)
    out[static_cast<std::size_t>(n - n_lo)] = d.prob(n);
  return out;
}

std::vector<double> fspok_pmf_window(const SkellamParams& params,
                                     const FracParams& frac, double t,
                                     long long n_lo, long long n_hi,
                                     double abs_tol) {
  params.validate();
  frac.validate();
  if (!(t > 0.0)) throw DomainError("fspok_pmf_window: t must be > 0");
  if (n_hi < n_lo) throw DomainError("fspok_pmf_window: empty window");
  if (frac.alpha == 1.0) return spok_pmf_window(params, t, n_lo, n_hi);

  const double alpha = frac.alpha;
  const double ta = std::pow(t, alpha);
  const double v_max = wright_cutoff(alpha);
  const std::size_t dim = static_cast<std::size_t>(n_hi - n_lo) + 1;
  auto f = [&](double v, double* out) {
    const double kernel = wright_m(alpha, v);
    if (kernel <= 0.0) {
      std::fill(out, out + dim, 0.0);
      return;
    }
    const Dist d = spok_dist(params, ta * v);
    for (std::size_t i = 0; i < dim; ++i)
      out[i] = kernel * d.prob(n_lo + static_cast<long long>(i));
  };
  return gk_integrate_vec(f, dim, 0.0, v_max, abs_tol);
}

double fspok_pmf(const SkellamParams& params, const FracParams& frac, double t,
                 long long n, double abs_tol) {
  params.validate();
  frac.validate();
  if (!(t > 0.0)) throw DomainError("fspok_pmf: t must be > 0");
  if (frac.alpha == 1.0) return spok_pmf(params, t, n);
  const double alpha = frac.alpha;
  const double ta = std::pow(t, alpha);
  const double v_max = wright_cutoff(alpha);
  auto f = [&](double v) {
    const double kernel = wright_m(alpha, v);
    if (kernel <= 0.0) return 0.0;
    return kernel * spok_dist(params, ta * v).prob(n);
  };
  // relative control keeps deep-tail values meaningful
  return gk_integrate(f, 0.0, v_max, abs_tol, 1e-11, 4000);
}

PmfTable fspok_pmf_table(const SkellamParams& params, const FracParams& frac,
                         double t, double mass_tol) {
  params.validate();
  frac.validate();
  if (frac.alpha == 1.0) return spok_pmf_table(params, t);
  const auto [r1, r2] = r_constants(params);
  const double u_hi = std::pow(t, frac.alpha) * wright_cutoff(frac.alpha);
  const double spread = 12.0 * std::sqrt(r2 * u_hi) + 20.0;
  long long lo =
      static_cast<long long>(std::floor(std::min(0.0, r1 * u_hi) - spread));
  long long hi =
      static_cast<long long>(std::ceil(std::max(0.0, r1 * u_hi) + spread));
  for (int attempt = 0; attempt < 4; ++attempt) {
    std::vector<double> probs =
        fspok_pmf_window(params, frac, t, lo, hi, mass_tol * 1e-3);
    double sum = 0.0;
    for (double& p : probs) {
      p = std::max(p, 0.0);
      sum += p;
    }
    if (1.0 - sum <= mass_tol) {
      PmfTable out;
      out.n_min = lo;
      out.n_max = hi;
      out.probs = std::move(probs);
      out.truncation_mass = std::max(0.0, 1.0 - sum);
      return out;
    }
    const long long widen = (hi - lo) / 2 + 10;
    lo -= widen;
    hi += widen;
  }
  throw ConvergenceError("fspok_pmf_table: window did not capture the mass");
}

double spok_pgf(const SkellamParams& params, double theta, double t) {
  params.validate();
  if (!(theta > 0.0 && theta < 1.0))
    throw DomainError("spok_pgf: theta must be in (0, 1)");
  if (!(t >= 0.0)) throw DomainError("spok_pgf: t must be >= 0");
  return std::exp(-t * pgf_exponent(params, theta));
}

double fspok_pgf(const SkellamParams& params, const FracParams& frac,
                 double theta, double t) {
  params.validate();
  frac.validate();
  if (!(theta > 0.0 && theta < 1.0))
    throw DomainError("fspok_pgf: theta must be in (0, 1)");
  if (!(t >= 0.0)) throw DomainError("fspok_pgf: t must be >= 0");
  if (t == 0.0) return 1.0;
  const double arg = -pgf_exponent(params, theta) * std::pow(t, frac.alpha);
  return mittag_leffler(frac.alpha, 1.0, 1.0, arg);
}

MomentReport spok_moments(const SkellamParams& params, double s, double t) {
  params.validate();
  if (!(s >= 0.0) || !(t >= s))
    throw DomainError("spok_moments: need 0 <= s <= t");
  const auto [r1, r2] = r_constants(params);
  MomentReport rep;
  rep.mean = r1 * t;
  rep.variance = r2 * t;
  rep.has_cov = true;
  rep.cov = r2 * s;
  return rep;
}

MomentReport inv_stable_mean_cov(double alpha, double s, double t) {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw DomainError("inv_stable_mean_cov: alpha must be in (0, 1]");
  if (!(s > 0.0) || !(t >= s))
    throw DomainError("inv_stable_mean_cov: need 0 < s <= t");
  const double ga1 = std::tgamma(alpha + 1.0);
  const double bc = beta_complete(alpha, alpha + 1.0);
  auto cov_pair = [&](double a, double b) {  // a <= b
    const double binc = incomplete_beta(alpha, alpha + 1.0, a / b);
    return (alpha * std::pow(a, 2.0 * alpha) * bc +
            alpha * std::pow(b, 2.0 * alpha) * binc -
            std::pow(a * b, alpha)) /
           (ga1 * ga1);
  };
  MomentReport rep;
  rep.mean = std::pow(t, alpha) / ga1;
  rep.variance = std::max(0.0, cov_pair(t, t));
  rep.has_cov = true;
  rep.cov = cov_pair(s, t);
  return rep;
}

MomentReport fspok_moments(const SkellamParams& params, const FracParams& frac,
                           double s, double t) {
  params.validate();
  frac.validate();
  if (!(s > 0.0) || !(t >= s))
    throw DomainError("fspok_moments: need 0 < s <= t");
  const auto [r1, r2] = r_constants(params);
  const MomentReport y_t = inv_stable_mean_cov(frac.alpha, s, t);
  const MomentReport y_s = inv_stable_mean_cov(frac.alpha, s, s);
  MomentReport rep;
  rep.mean = r1 * y_t.mean;
  rep.variance = r2 * y_t.mean + r1 * r1 * y_t.variance;
  rep.has_cov = true;
  rep.cov = r2 * y_s.mean + r1 * r1 * y_t.cov;
  return rep;
}

LrdReport fspok_lrd(const SkellamParams& params, const FracParams& frac,
                    double s, const TimeGrid& t_grid) {
  params.validate();
  frac.validate();
  t_grid.validate();
  if (!(frac.alpha < 1.0))
    throw DomainError("fspok_lrd: requires alpha < 1");
  if (t_grid.times.size() < 3)
    throw DomainError("fspok_lrd: need at least 3 grid points");
  if (!(s > 0.0) || !(t_grid.times.front() > s))
    throw DomainError("fspok_lrd: all grid times must exceed s > 0");

  const double alpha = frac.alpha;
  const auto [r1, r2] = r_constants(params);
  LrdReport rep;

  std::vector<std::pair<double, double>> pts;
  pts.reserve(t_grid.times.size());
  if (r1 == 0.0) {
    // lambda1 == lambda2: variance r2 E Y exactly, correlation (s/t)^{a/2}
    rep.degenerate_r1 = true;
    for (double t : t_grid.times)
      pts.emplace_back(t, std::pow(s / t, 0.5 * alpha));
    const DecayFit fit = decay_fit(pts);
    rep.exponent = -fit.exponent;
    rep.constant_c = std::pow(s, 0.5 * alpha);
    const double tmax = t_grid.max();
    rep.asymptote_ratio_at_tmax = pts.back().second /
                                  (rep.constant_c * std::pow(tmax, -0.5 * alpha));
    return rep;
  }

  const double ga1 = std::tgamma(alpha + 1.0);
  const double v_inf =
      2.0 / std::tgamma(2.0 * alpha + 1.0) - 1.0 / (ga1 * ga1);
  auto sigma_asym = [&](double u) {
    return std::abs(r1) * std::sqrt(v_inf) * std::pow(u, alpha);
  };
  for (double t : t_grid.times) {
    const double cov = fspok_moments(params, frac, s, t).cov;
    pts.emplace_back(t, cov / (sigma_asym(s) * sigma_asym(t)));
  }
  const DecayFit fit = decay_fit(pts);
  rep.exponent = -fit.exponent;
  // closed-form constant of the t^{-alpha} asymptote
  const double ga = std::tgamma(alpha);
  rep.constant_c =
      1.0 / (1.0 / std::tgamma(2.0 * alpha) - 1.0 / (alpha * ga * ga)) *
      (alpha * r2 / (ga1 * r1 * r1) +
       alpha * std::pow(s, alpha) / std::tgamma(1.0 + 2.0 * alpha));
  const double tmax = t_grid.max();
  rep.asymptote_ratio_at_tmax =
      pts.back().second / (rep.constant_c * std::pow(tmax, -alpha));
  return rep;
}

MomentSource gamma_moment_source(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0))
    throw DomainError("gamma_moment_source: a, b must be > 0");
  return [a, b](double power, double t) {
    return closed_form(gamma_fractional_moment(a, b, t, power));
  };
}

MomentSource mc_moment_source(MomentKind kind, const SubordinatorSpec& spec,
                              std::size_t n, std::uint64_t seed,
                              std::uint64_t stream_base, double step) {
  auto counter = std::make_shared<std::uint64_t>(0);
  return [=](double power, double t) {
    RngStream rng(seed, stream_base + (*counter)++);
    const FractionalMomentResult res =
        fractional_moment(kind, spec, power, t, n, rng, step);
    if (res.divergent)
      throw HypothesisError("mc_moment_source: divergent fractional moment");
    return res.estimate;
  };
}

namespace {

// Covariance pieces common to the direct and inverse time changes.  The
// incomplete-beta expectation is folded with the product-of-means term:
//   a E(Dt^{2a} B(a,a+1;x)) - E(Ds^a) E(Dt^a)
//     = Cov(Ds^a, Dt^a) - a E(Dt^{2a} Rres(x)),  x = Ds/Dt,
// with Rres(x) = x^a/a - B(a,a+1;x) >= 0, which removes the catastrophic
// cancellation between the two large terms.
struct JointCovTerm {
  double value = 0.0;  // the full T = l1^2 [ ... ] combination
  double se = 0.0;
};

JointCovTerm cov_beta_term(double alpha, double l1,
                           const std::vector<double>& ds,
                           const std::vector<double>& dt) {
  const std::size_t n = ds.size();
  const double dn = static_cast<double>(n);
  std::vector<double> xs(n), ys(n), rr(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = std::pow(ds[i], alpha);
    ys[i] = std::pow(dt[i], alpha);
    const double x = std::min(ds[i] / dt[i], 1.0);
    const double res =
        std::pow(x, alpha) / alpha - incomplete_beta(alpha, alpha + 1.0, x);
    rr[i] = std::pow(dt[i], 2.0 * alpha) * res;
  }
  double sx = 0.0, sy = 0.0, sxy = 0.0, sr = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += xs[i];
    sy += ys[i];
    sxy += xs[i] * ys[i];
    sr += rr[i];
  }
  const double l1sq = l1 * l1;
  auto theta_loo = [&](std::size_t i) {
    const double m = dn - 1.0;
    const double sx_i = sx - xs[i];
    const double sy_i = sy - ys[i];
    const double sxy_i = sxy - xs[i] * ys[i];
    const double sr_i = sr - rr[i];
    const double cov_i = (sxy_i - sx_i * sy_i / m) / (m - 1.0);
    return l1sq * (cov_i - alpha * sr_i / m);
  };
  JointCovTerm out;
  const double cov_full = (sxy - sx * sy / dn) / (dn - 1.0);
  out.value = l1sq * (cov_full - alpha * sr / dn);
  double sum_theta = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum_theta += theta_loo(i);
  const double mean_theta = sum_theta / dn;
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = theta_loo(i) - mean_theta;
    ss += d * d;
  }
  out.se = std::sqrt((dn - 1.0) / dn * ss);
  return out;
}

MomentReport time_changed_moments(const SkellamParams& params,
                                  const FracParams& frac,
                                  const SubordinatorSpec& spec, double s,
                                  double t, const MomentSource& source,
                                  RngStream& rng, const TcCovOptions& opts,
                                  bool inverse) {
  params.validate();
  frac.validate();
  spec.validate();
  if (!(s > 0.0) || !(t >= s))
    throw DomainError("time_changed_moments: need 0 < s <= t");
  if (!inverse && !spec.all_moments_finite())
    throw HypothesisError(
        "time-changed moments need all subordinator moments finite; the raw "
        "stable family is excluded");

  const double alpha = frac.alpha;
  const auto [r1, r2] = r_constants(params);
  const double ga1 = std::tgamma(alpha + 1.0);
  const double l1 = r1 / ga1;
  const double l2 = r2 / ga1;
  const double d_const = l1 * l1 * alpha * beta_complete(alpha, alpha + 1.0);

  const EstimateWithError ea_t = source(alpha, t);
  const EstimateWithError e2a_t = source(2.0 * alpha, t);

  MomentReport rep;
  rep.mean = l1 * ea_t.value;
  rep.mean_se = std::abs(l1) * ea_t.std_error;
  rep.variance = ea_t.value * (l2 - l1 * l1 * ea_t.value) +
                 2.0 * d_const * e2a_t.value;
  rep.variance_se = std::sqrt(
      std::pow((l2 - 2.0 * l1 * l1 * ea_t.value) * ea_t.std_error, 2) +
      std::pow(2.0 * d_const * e2a_t.std_error, 2));
  rep.has_cov = true;
  if (s == t) {
    // exact algebraic reduction of the covariance at equal times
    rep.cov = rep.variance;
    rep.cov_se = rep.variance_se;
    return rep;
  }

  const EstimateWithError ea_s = source(alpha, s);
  const EstimateWithError e2a_s = source(2.0 * alpha, s);

  // joint draws of the time change at (s, t)
  std::vector<double> ds(opts.n_mc), dt(opts.n_mc);
  const TimeGrid pair_grid{{s, t}};
  for (std::size_t i = 0; i < opts.n_mc; ++i) {
    const SamplePath path =
        inverse ? sample_inverse_path(spec, pair_grid, opts.step, rng)
                : sample_path(spec, pair_grid, rng);
    ds[i] = path.values[0];
    dt[i] = path.values[1];
  }
  const JointCovTerm beta_term = cov_beta_term(alpha, l1, ds, dt);
  rep.cov = l2 * ea_s.value + d_const * e2a_s.value + beta_term.value;
  rep.cov_se = std::sqrt(std::pow(beta_term.se, 2) +
                         std::pow(l2 * ea_s.std_error, 2) +
                         std::pow(d_const * e2a_s.std_error, 2));
  return rep;
}

}  // namespace

MomentReport tcfspok_moments(const SkellamParams& params,
                             const FracParams& frac,
                             const SubordinatorSpec& spec, double s, double t,
                             const MomentSource& source, RngStream& rng,
                             const TcCovOptions& opts) {
  return time_changed_moments(params, frac, spec, s, t, source, rng, opts,
                              /*inverse=*/false);
}

MomentReport inverse_tc_moments(const SkellamParams& params,
                                const FracParams& frac,
                                const SubordinatorSpec& spec, double s,
                                double t, const MomentSource& source,
                                RngStream& rng, const TcCovOptions& opts) {
  return time_changed_moments(params, frac, spec, s, t, source, rng, opts,
                              /*inverse=*/true);
}

LrdReport tcfspok_lrd_check(const SkellamParams& params,
                            const FracParams& frac,
                            const SubordinatorSpec& spec, double rho,
                            double k1, double k2, double s,
                            const TimeGrid& t_grid, const MomentSource& source,
                            RngStream& rng, const TcCovOptions& opts) {
  params.validate();
  frac.validate();
  spec.validate();
  t_grid.validate();
  if (!spec.all_moments_finite())
    throw HypothesisError(
        "tcfspok_lrd_check: raw stable subordinator violates the moment "
        "hypothesis");
  if (!(rho > 0.0 && rho < 1.0))
    throw DomainError("tcfspok_lrd_check: rho must be in (0, 1)");
  if (!(k1 > 0.0) || !(k2 > 0.0))
    throw DomainError("tcfspok_lrd_check: k1, k2 must be > 0");
  if (k2 < k1 * k1)
    throw HypothesisError("tcfspok_lrd_check: requires k2 >= k1^2");
  if (!(frac.alpha < 1.0))
    throw DomainError("tcfspok_lrd_check: requires alpha < 1");
  if (t_grid.times.size() < 3)
    throw DomainError("tcfspok_lrd_check: need at least 3 grid points");
  if (!(s > 0.0) || !(t_grid.times.front() > s))
    throw DomainError("tcfspok_lrd_check: grid times must exceed s > 0");

  const double alpha = frac.alpha;
  const auto [r1, r2] = r_constants(params);
  const double ga1 = std::tgamma(alpha + 1.0);
  const double l1 = r1 / ga1;
  const double l2 = r2 / ga1;
  const double d_const = l1 * l1 * alpha * beta_complete(alpha, alpha + 1.0);
  const double prefactor = 2.0 * d_const * k2 - k1 * k1 * l1 * l1;
  if (!(prefactor > 0.0))
    throw HypothesisError(
        "tcfspok_lrd_check: asymptotic variance prefactor must be positive");

  const double var_s =
      time_changed_moments(params, frac, spec, s, s, source, rng, opts, false)
          .variance;
  const double ea_s = source(alpha, s).value;
  const double e2a_s = source(2.0 * alpha, s).value;

  LrdReport rep;
  rep.degenerate_r1 = (r1 == 0.0);
  rep.constant_c =
      (l2 * ea_s + d_const * e2a_s) / std::sqrt(var_s * prefactor);

  std::vector<std::pair<double, double>> pts;
  pts.reserve(t_grid.times.size());
  for (double t : t_grid.times) {
    const MomentReport m =
        time_changed_moments(params, frac, spec, s, t, source, rng, opts,
                             false);
    pts.emplace_back(t, m.cov / (std::sqrt(var_s) * std::sqrt(prefactor) *
                                 std::pow(t, rho)));
  }
  const DecayFit fit = decay_fit(pts);
  rep.exponent = -fit.exponent;
  const double tmax = t_grid.max();
  rep.asymptote_ratio_at_tmax =
      pts.back().second / (rep.constant_c * std::pow(tmax, -rho));
  return rep;
}

double lil_constant(const SkellamParams& params, const FracParams& frac,
                    double gamma_idx) {
  params.validate();
  frac.validate();
  if (!(gamma_idx > 0.0 && gamma_idx < 1.0))
    throw DomainError("lil_constant: index must be in (0, 1)");
  const auto [r1, r2] = r_constants(params);
  (void)r2;
  const double a = frac.alpha;
  return r1 * std::pow(gamma_idx, a) *
         std::pow(1.0 - gamma_idx, a * (1.0 - gamma_idx) / gamma_idx);
}

double lil_g(const SubordinatorSpec& spec, double t) {
  spec.validate();
  if (!(t > 2.718281828459045))
    throw DomainError("lil_g: requires t > e");
  const double ll = std::log(std::log(t));
  return ll / bernstein_inverse(spec, ll / t);
}

TcPmfResult tc_spok_pmf_table(const SkellamParams& params,
                              const SubordinatorSpec& spec, double t,
                              std::size_t mc_n, RngStream& rng, bool inverse,
                              double step, double mass_tol) {
  params.validate();
  spec.validate();
  if (!(t > 0.0)) throw DomainError("tc_spok_pmf_table: t must be > 0");

  const int k = params.order;
  const double total_rate = k * (params.lambda1 + params.lambda2);

  TcPmfResult out;
  if (!inverse && std::holds_alternative<GammaFamily>(spec.family)) {
    // closed-form exponential moments; the event-count weights
    //   w_m = (R^m / m!) E(e^{-R D(t)} D(t)^m)
    // sum to exactly 1, which yields a rigorous series tail bound.
    const auto& fam = std::get<GammaFamily>(spec.family);
    const double log_r = std::log(total_rate);
    const double bt = fam.b * t;
    const double la = std::log(fam.a);
    const double lac = std::log(fam.a + total_rate);

    JumpLaw law{k, params.lambda1 / total_rate, params.lambda2 / total_rate};
    Dist conv{0, {1.0}};
    Dist acc{0, {}};
    double cum = 0.0;
    int m = 0;
    const int m_cap = 100000;
    while (cum < 1.0 - mass_tol * 1e-3 && m < m_cap) {
      const double lw = m * log_r - std::lgamma(m + 1.0) +
                        bt * (la - lac) + std::lgamma(bt + m) -
                        std::lgamma(bt) - m * lac;
      const double w = std::exp(lw);
      cum += w;
      // accumulate w * J^{*m}
      if (acc.p.empty()) {
        acc.n_min = conv.n_min;
        acc.p.assign(conv.p.size(), 0.0);
      }
      if (conv.n_min < acc.n_min ||
          conv.n_max() > acc.n_max()) {
        Dist grown;
        grown.n_min = std::min(acc.n_min, conv.n_min);
        const long long hi = std::max(acc.n_max(), conv.n_max());
        grown.p.assign(static_cast<std::size_t>(hi - grown.n_min) + 1, 0.0);
        for (std::size_t i = 0; i < acc.p.size(); ++i)
          grown.p[static_cast<std::size_t>(acc.n_min - grown.n_min) + i] =
              acc.p[i];
        acc = std::move(grown);
      }
      for (std::size_t i = 0; i < conv.p.size(); ++i)
        acc.p[static_cast<std::size_t>(conv.n_min - acc.n_min) + i] +=
            w * conv.p[i];
      conv = jump_convolve(conv, law);
      ++m;
    }
    if (m >= m_cap)
      throw ConvergenceError("tc_spok_pmf_table: series truncation failed");
    out.table.n_min = acc.n_min;
    out.table.n_max = acc.n_max();
    out.table.probs = std::move(acc.p);
    out.table.truncation_mass = std::max(0.0, 1.0 - out.table.sum());
    out.std_errors.assign(out.table.probs.size(), 0.0);
    return out;
  }

  // Monte Carlo over time-change draws: mean of the exact conditional pmf.
  if (mc_n < 100) throw DomainError("tc_spok_pmf_table: need mc_n >= 100");
  std::vector<double> draws(mc_n);
  const TimeGrid single{{t}};
  double max_draw = 0.0;
  for (std::size_t i = 0; i < mc_n; ++i) {
    draws[i] = inverse
                   ? sample_inverse_path(spec, single, step, rng).values[0]
                   : sample_path(spec, single, rng).values[0];
    max_draw = std::max(max_draw, draws[i]);
  }
  const auto [r1, r2] = r_constants(params);
  const double spread = 12.0 * std::sqrt(r2 * max_draw) + 30.0 + k;
  const long long lo =
      static_cast<long long>(std::floor(std::min(0.0, r1 * max_draw) - spread));
  const long long hi =
      static_cast<long long>(std::ceil(std::max(0.0, r1 * max_draw) + spread));
  const std::size_t width = static_cast<std::size_t>(hi - lo) + 1;
  std::vector<double> sum(width, 0.0), sum_sq(width, 0.0);
  for (std::size_t i = 0; i < mc_n; ++i) {
    const Dist d = spok_dist(params, draws[i]);
    for (long long n = std::max(lo, d.n_min);
         n <= std::min(hi, d.n_max()); ++n) {
      const double p = d.prob(n);
      const std::size_t idx = static_cast<std::size_t>(n - lo);
      sum[idx] += p;
      sum_sq[idx] += p * p;
    }
  }
  const double dn = static_cast<double>(mc_n);
  out.table.n_min = lo;
  out.table.n_max = hi;
  out.table.probs.resize(width);
  out.std_errors.resize(width);
  for (std::size_t i = 0; i < width; ++i) {
    const double mean = sum[i] / dn;
    out.table.probs[i] = mean;
    const double var =
        std::max(0.0, (sum_sq[i] - sum[i] * mean) / (dn - 1.0));
    out.std_errors[i] = std::sqrt(var / dn);
  }
  out.table.truncation_mass = std::max(0.0, 1.0 - out.table.sum());
  return out;
}

EstimateWithError tc_spok_pmf(const SkellamParams& params,
                              const SubordinatorSpec& spec, double t,
                              long long n, std::size_t mc_n, RngStream& rng) {
  const TcPmfResult res = tc_spok_pmf_table(params, spec, t, mc_n, rng);
  if (n < res.table.n_min || n > res.table.n_max) return {0.0, 0.0, mc_n};
  const std::size_t idx = static_cast<std::size_t>(n - res.table.n_min);
  return {res.table.probs[idx], res.std_errors[idx], mc_n};
}

CaputoResult caputo_derivative_gl(std::span<const double> series, double alpha,
                                  double dt) {
  if (series.size() < 2)
    throw DomainError("caputo_derivative_gl: need at least 2 samples");
  if (!(dt > 0.0)) throw DomainError("caputo_derivative_gl: dt must be > 0");
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw DomainError("caputo_derivative_gl: alpha must be in (0, 1]");
  CaputoResult out;
  out.coarse_grid_warning = dt > 0.01;
  const std::size_t n = series.size();
  out.values.assign(n, 0.0);
  if (alpha == 1.0) {
    out.values[0] = (series[1] - series[0]) / dt;
    for (std::size_t i = 1; i + 1 < n; ++i)
      out.values[i] = (series[i + 1] - series[i - 1]) / (2.0 * dt);
    out.values[n - 1] = (series[n - 1] - series[n - 2]) / dt;
    return out;
  }
  std::vector<double> g(n);
  g[0] = 1.0;
  for (std::size_t j = 1; j < n; ++j)
    g[j] = g[j - 1] * (static_cast<double>(j) - 1.0 - alpha) /
           static_cast<double>(j);
  const double scale = std::pow(dt, -alpha);
  const double f0 = series[0];
  for (std::size_t i = 1; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j <= i; ++j) acc += g[j] * (series[i - j] - f0);
    out.values[i] = scale * acc;
  }
  return out;
}

FdeResidual fde_residual(const SkellamParams& params, const FracParams& frac,
                         long long n_lo, long long n_hi, double t_max,
                         double dt, double quad_tol) {
  params.validate();
  frac.validate();
  if (n_hi - n_lo + 1 < 2LL * params.order + 1)
    throw DomainError("fde_residual: window too small for the neighbor sums");
  if (!(t_max > 0.0) || !(dt > 0.0))
    throw DomainError("fde_residual: t_max and dt must be > 0");
  if (dt > 1e-3 * t_max * (1.0 + 1e-9))
    throw DomainError("fde_residual: requires dt <= 1e-3 * t_max");

  const int k = params.order;
  const double alpha = frac.alpha;
  const double total_rate = k * (params.lambda1 + params.lambda2);
  const long long wlo = n_lo - k, whi = n_hi + k;
  const std::size_t width = static_cast<std::size_t>(whi - wlo) + 1;
  const std::size_t m_steps = static_cast<std::size_t>(std::llround(t_max / dt));
  const bool ordinary = (alpha == 1.0);
  const std::size_t rows = m_steps + (ordinary ? 2 : 1);

  // pmf on the grid; row 0 is the initial condition
  std::vector<std::vector<double>> p(rows);
  p[0].assign(width, 0.0);
  if (wlo <= 0 && 0 <= whi) p[0][static_cast<std::size_t>(-wlo)] = 1.0;
  for (std::size_t i = 1; i < rows; ++i) {
    const double t = static_cast<double>(i) * dt;
    p[i] = ordinary ? spok_pmf_window(params, t, wlo, whi)
                    : fspok_pmf_window(params, frac, t, wlo, whi, quad_tol);
  }

  auto rhs_at = [&](std::size_t i, long long n) {
    double acc = -total_rate * p[i][static_cast<std::size_t>(n - wlo)];
    for (int j = 1; j <= k; ++j) {
      acc += params.lambda1 * p[i][static_cast<std::size_t>(n - j - wlo)];
      acc += params.lambda2 * p[i][static_cast<std::size_t>(n + j - wlo)];
    }
    return acc;
  };

  FdeResidual out;
  for (std::size_t i = 1; i <= m_steps; ++i)
    for (long long n = n_lo; n <= n_hi; ++n)
      out.max_pmf = std::max(out.max_pmf, p[i][static_cast<std::size_t>(n - wlo)]);

  if (ordinary) {
    for (long long n = n_lo; n <= n_hi; ++n) {
      const std::size_t col = static_cast<std::size_t>(n - wlo);
      for (std::size_t i = 1; i <= m_steps; ++i) {
        const double deriv = (p[i + 1][col] - p[i - 1][col]) / (2.0 * dt);
        out.max_abs_residual =
            std::max(out.max_abs_residual, std::abs(deriv - rhs_at(i, n)));
      }
    }
    return out;
  }

  // startup correction: subtract the leading t^{m a} head of the solution
  // and differentiate it exactly
  const int head = std::clamp(static_cast<int>(std::ceil(1.0 / alpha)), 1, 4);
  const auto powers = generator_powers(params, n_lo, n_hi, head);
  std::vector<double> t_pow(m_steps + 1);
  for (std::size_t i = 0; i <= m_steps; ++i)
    t_pow[i] = std::pow(static_cast<double>(i) * dt, alpha);

  std::vector<double> column(m_steps + 1), rem(m_steps + 1);
  for (long long n = n_lo; n <= n_hi; ++n) {
    const std::size_t col = static_cast<std::size_t>(n - wlo);
    const std::size_t hcol = static_cast<std::size_t>(n - n_lo);
    for (std::size_t i = 0; i <= m_steps; ++i) column[i] = p[i][col];
    for (std::size_t i = 0; i <= m_steps; ++i) {
      double head_val = 0.0;
      double tp = 1.0;
      for (int m = 1; m <= head; ++m) {
        tp *= t_pow[i];
        head_val += powers[m][hcol] * tp / std::tgamma(1.0 + m * alpha);
      }
      rem[i] = column[i] - column[0] - head_val;
    }
    const CaputoResult gl = caputo_derivative_gl(rem, alpha, dt);
    for (std::size_t i = 1; i <= m_steps; ++i) {
      double head_deriv = 0.0;
      double tp = 1.0;
      for (int m = 1; m <= head; ++m) {
        head_deriv += powers[m][hcol] * tp /
                      std::tgamma(1.0 + (m - 1) * alpha);
        tp *= t_pow[i];
      }
      const double lhs = gl.values[i] + head_deriv;
      out.max_abs_residual =
          std::max(out.max_abs_residual, std::abs(lhs - rhs_at(i, n)));
    }
  }
  return out;
}

}  // namespace spok
