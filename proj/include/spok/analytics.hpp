#ifndef SPOK_ANALYTICS_HPP
#define SPOK_ANALYTICS_HPP

#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "spok/rng.hpp"
#include "spok/subordinators.hpp"
#include "spok/types.hpp"

namespace spok {

/// Mean/variance at time t, plus covariance for a time pair s <= t.
/// *_se fields carry standard errors when a quantity is Monte Carlo
/// estimated; they are 0 for closed forms.
struct MomentReport {
  double mean = 0.0;
  double variance = 0.0;
  bool has_cov = false;
  double cov = 0.0;
  double mean_se = 0.0;
  double variance_se = 0.0;
  double cov_se = 0.0;
};

/// Output of a long-range-dependence check: fitted decay index of the
/// normalized correlation (positive; t^{-exponent} law), the closed-form
/// constant, and the ratio of the normalized correlation to its predicted
/// asymptote at the largest grid time.
struct LrdReport {
  double exponent = 0.0;
  double constant_c = 0.0;
  double asymptote_ratio_at_tmax = 0.0;
  bool degenerate_r1 = false;  // lambda1 == lambda2 branch
};

/// r1 = k(k+1)(l1-l2)/2,  r2 = k(k+1)(2k+1)(l1+l2)/6.
std::pair<double, double> r_constants(const SkellamParams& params);

/// Exact pmf of the order-k Skellam process at time t.  The process is the
/// sum over jump sizes j = 1..k of j-scaled independent classical Skellam
/// components with rates (lambda1 t, lambda2 t); the pmf is the k-fold
/// convolution of the components, each evaluated through the log-space
/// Bessel form  e^{-t(l1+l2)} (l1/l2)^{n/2} I_|n|(2 t sqrt(l1 l2)).
/// For k = 1 this is exactly the Bessel closed form.
double spok_pmf(const SkellamParams& params, double t, long long n);

/// Whole distribution at time t with per-entry truncation below ~1e-15.
PmfTable spok_pmf_table(const SkellamParams& params, double t);

/// Window slice of the order-k Skellam distribution at operational time t.
std::vector<double> spok_pmf_window(const SkellamParams& params, double t,
                                    long long n_lo, long long n_hi);

/// Fractional pmf by adaptive quadrature of the Skellam pmf against the
/// rescaled Wright kernel:  p_a(n,t) = int_0^inf p(n, t^a v) M_a(v) dv.
/// alpha = 1 delegates to spok_pmf.
double fspok_pmf(const SkellamParams& params, const FracParams& frac, double t,
                 long long n, double abs_tol = 1e-10);

/// One adaptive pass for a whole window [n_lo, n_hi] (shared quadrature
/// nodes; error controlled in max norm).
std::vector<double> fspok_pmf_window(const SkellamParams& params,
                                     const FracParams& frac, double t,
                                     long long n_lo, long long n_hi,
                                     double abs_tol = 1e-9);

/// Window chosen automatically so the truncated mass is below mass_tol.
PmfTable fspok_pmf_table(const SkellamParams& params, const FracParams& frac,
                         double t, double mass_tol = 1e-7);

/// pgf of the order-k Skellam process,
///   exp(-t (k(l1+l2) - l1 sum_j theta^j - l2 sum_j theta^-j)).
double spok_pgf(const SkellamParams& params, double theta, double t);

/// pgf of the fractional process: the same exponent argument fed through
/// the one-parameter Mittag-Leffler function with t^alpha scaling.
double fspok_pgf(const SkellamParams& params, const FracParams& frac,
                 double theta, double t);

/// Mean r1 t, variance r2 t, covariance r2 s for 0 <= s <= t.
MomentReport spok_moments(const SkellamParams& params, double s, double t);

/// Inverse-stable subordinator moments: mean t^a/Gamma(a+1), covariance
///   (a s^{2a} B(a,a+1) + a t^{2a} B(a,a+1; s/t) - (ts)^a) / Gamma(a+1)^2,
/// variance = covariance at s = t.
MomentReport inv_stable_mean_cov(double alpha, double s, double t);

/// Fractional Skellam moments composed from the inverse-stable moments:
/// mean r1 E Y, variance r2 E Y + r1^2 Var Y, cov r2 E Y(s) + r1^2 Cov Y.
MomentReport fspok_moments(const SkellamParams& params, const FracParams& frac,
                           double s, double t);

/// Long-range dependence of the fractional Skellam process.  The decay of
///   C(t) = Cov(s,t) / (sigma~(s) sigma~(t)),   sigma~(u) = |r1| sqrt(V) u^a,
/// is fitted on the grid, where V = 2/Gamma(2a+1) - 1/Gamma(a+1)^2 is the
/// large-time variance prefactor of the inverse-stable subordinator; the
/// closed-form constant c(s) satisfies C(t) -> c(s) t^{-a}.  For
/// lambda1 == lambda2 the exact correlation (s/t)^{a/2} is used instead and
/// the degenerate flag is set.
LrdReport fspok_lrd(const SkellamParams& params, const FracParams& frac,
                    double s, const TimeGrid& t_grid);

/// Source of E(D^p(t)) values for a subordinator (closed-form or MC).
using MomentSource = std::function<EstimateWithError(double power, double t)>;

/// Closed-form source for the gamma family.
MomentSource gamma_moment_source(double a, double b);

/// Monte Carlo source via fractional_moment (direct or inverse kind).
MomentSource mc_moment_source(MomentKind kind, const SubordinatorSpec& spec,
                              std::size_t n, std::uint64_t seed,
                              std::uint64_t stream_base, double step = 0.0);

struct TcCovOptions {
  std::size_t n_mc = 200000;  // joint draws for the incomplete-beta term
  double step = 0.0;          // first-passage lattice (inverse variant)
};

/// Moments of the subordinated fractional process Z(t) = S_a(D(t)):
///   mean  l1 E(D^a t),
///   var   E(D^a)(l2 - l1^2 E(D^a)) + 2 d E(D^{2a}),
///   cov   l2 E(D^a s) + d E(D^{2a} s) - l1^2 E(D^a s)E(D^a t)
///         + a l1^2 E(D^{2a} t B(a,a+1; D(s)/D(t))),
/// with l1 = r1/Gamma(a+1), l2 = r2/Gamma(a+1), d = l1^2 a B(a,a+1).
/// The incomplete-beta expectation has no closed form and is estimated
/// over joint subordinator draws (variance-reduced; SE reported).
/// s == t returns cov = variance (the exact algebraic reduction).
MomentReport tcfspok_moments(const SkellamParams& params,
                             const FracParams& frac,
                             const SubordinatorSpec& spec, double s, double t,
                             const MomentSource& source, RngStream& rng,
                             const TcCovOptions& opts = {});

/// Same functional forms with inverse-subordinator (first passage) moments;
/// the raw stable family is allowed here (all inverse moments are finite).
MomentReport inverse_tc_moments(const SkellamParams& params,
                                const FracParams& frac,
                                const SubordinatorSpec& spec, double s,
                                double t, const MomentSource& source,
                                RngStream& rng, const TcCovOptions& opts = {});

/// Long-range dependence check for the subordinated fractional process
/// under the moment-growth hypothesis E(D^{ia}(t)) ~ k_i t^{i rho}
/// (requires 0 < rho < 1, k2 >= k1^2).  Fits the decay of
///   C(t) = Cov(s,t) / (sqrt(Var Z(s)) sqrt(2 d k2 - k1^2 l1^2) t^rho)
/// and reports c1(s) = (l2 E(D^a s) + d E(D^{2a} s)) / sqrt(Var Z(s)
/// (2 d k2 - k1^2 l1^2)) with C(t) -> c1(s) t^{-rho}.
LrdReport tcfspok_lrd_check(const SkellamParams& params,
                            const FracParams& frac,
                            const SubordinatorSpec& spec, double rho,
                            double k1, double k2, double s,
                            const TimeGrid& t_grid, const MomentSource& source,
                            RngStream& rng, const TcCovOptions& opts = {});

/// Deterministic factor of the iterated-logarithm law:
///   r1 * gamma_idx^a (1 - gamma_idx)^{a (1-gamma_idx)/gamma_idx}.
double lil_constant(const SkellamParams& params, const FracParams& frac,
                    double gamma_idx);

/// Normalizer g(t) = log log t / phi(log log t / t), t > e, with phi the
/// inverse Bernstein function.
double lil_g(const SubordinatorSpec& spec, double t);

/// pmf of the order-k Skellam process time-changed by a subordinator
/// (identity fractional stage), as an event-count series
///   p(n) = sum_m (R^m/m!) J^{*m}(n) E(e^{-R D(t)} D(t)^m),  R = k(l1+l2),
/// where J^{*m} is the m-fold convolution of the jump law (+j with weight
/// l1, -j with weight l2, j = 1..k, normalized by R).  Gamma family uses
/// the closed-form exponential moments (zero SE); other families estimate
/// E(.) by Monte Carlo over subordinator draws.
EstimateWithError tc_spok_pmf(const SkellamParams& params,
                              const SubordinatorSpec& spec, double t,
                              long long n, std::size_t mc_n, RngStream& rng);

/// Whole-table variant; `inverse` selects first-passage draws H(t) instead
/// of D(t) (step as in sample_inverse_path).
struct TcPmfResult {
  PmfTable table;
  std::vector<double> std_errors;  // per entry; zeros for closed form
};
TcPmfResult tc_spok_pmf_table(const SkellamParams& params,
                              const SubordinatorSpec& spec, double t,
                              std::size_t mc_n, RngStream& rng,
                              bool inverse = false, double step = 0.0,
                              double mass_tol = 1e-8);

/// Grunwald-Letnikov fractional derivative on a uniform grid.
/// For 0 < alpha < 1:  out[i] = h^-a sum_{j<=i} g_j (f[i-j] - f[0]),
/// the discrete Riemann-Liouville derivative minus the discrete
/// initial-value correction (so constants map to exactly 0); out[0] = 0.
/// For alpha = 1: central differences (one-sided at the ends).
struct CaputoResult {
  std::vector<double> values;
  bool coarse_grid_warning = false;  // set when dt > 0.01
};
CaputoResult caputo_derivative_gl(std::span<const double> series, double alpha,
                                  double dt);

/// Max absolute residual of the governing fractional system over the window
/// [n_lo, n_hi] and the uniform grid {dt, 2 dt, ..., t_max}:
///   | d^a/dt^a p(n,t) + k(l1+l2) p(n,t) - l1 sum_j p(n-j,t) - l2 sum_j p(n+j,t) |.
/// The time derivative is Grunwald-Letnikov with the leading t^{m a} terms
/// of the solution (m <= ceil(1/a)) subtracted and differentiated exactly,
/// which removes the scheme's startup error at small t.  alpha = 1 uses
/// central differences, no correction.
struct FdeResidual {
  double max_abs_residual = 0.0;
  double max_pmf = 0.0;
};
FdeResidual fde_residual(const SkellamParams& params, const FracParams& frac,
                         long long n_lo, long long n_hi, double t_max,
                         double dt, double quad_tol = 1e-10);

}  // namespace spok

#endif  // SPOK_ANALYTICS_HPP
