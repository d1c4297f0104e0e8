#ifndef SPOK_SUBORDINATORS_HPP
#define SPOK_SUBORDINATORS_HPP

#include <cstddef>
#include <string>
#include <variant>

#include "spok/rng.hpp"
#include "spok/types.hpp"

namespace spok {

// Driftless subordinator families, each identified by its Laplace exponent
// (Bernstein function):
//   stable            f(s) = s^alpha
//   tempered stable   f(s) = (eta + s)^nu - eta^nu
//   gamma             f(s) = b log(1 + s/a)
//   inverse Gaussian  f(s) = delta (sqrt(2 s + gamma^2) - gamma)

struct StableFamily {
  double alpha;  // in (0,1)
};
struct TemperedStableFamily {
  double nu;   // in (0,1)
  double eta;  // > 0
};
struct GammaFamily {
  double a;  // rate > 0
  double b;  // shape-per-unit-time > 0
};
struct InverseGaussianFamily {
  double delta;    // > 0
  double gamma_p;  // > 0
};

struct SubordinatorSpec {
  std::variant<StableFamily, TemperedStableFamily, GammaFamily,
               InverseGaussianFamily>
      family;

  static SubordinatorSpec stable(double alpha);
  static SubordinatorSpec tempered_stable(double nu, double eta);
  static SubordinatorSpec gamma(double a, double b);
  static SubordinatorSpec inverse_gaussian(double delta, double gamma_p);

  void validate() const;
  std::string name() const;
  /// False only for the raw stable family (E D^r = inf for r >= alpha).
  bool all_moments_finite() const;
};

/// Bernstein function f(s), s > 0.
double bernstein_eval(const SubordinatorSpec& spec, double s);

/// Inverse phi(y) with f(phi(y)) = y, found by bracketed root search
/// (f is strictly increasing).
double bernstein_inverse(const SubordinatorSpec& spec, double y);

/// One draw of the stable subordinator D_alpha(t) (Laplace transform
/// e^{-t s^alpha}), via the Kanter two-uniform construction.
double sample_stable(double alpha, double t, RngStream& rng);

/// One draw of the inverse stable subordinator at time t, using
/// self-similarity: Y_alpha(t) =d t^alpha D_alpha(1)^{-alpha}.  Exact;
/// returns 0 at t = 0.
double sample_inverse_stable(double alpha, double t, RngStream& rng);

/// Sample a subordinator path on the grid (independent stationary
/// increments per family).  Nondecreasing; value 0 at t = 0.
SamplePath sample_path(const SubordinatorSpec& spec, const TimeGrid& grid,
                       RngStream& rng);

/// First-passage (inverse subordinator) path: D_f is simulated on an
/// operational-time lattice of spacing `step` until it exceeds max(grid);
/// H_f(t) is reported as the first lattice point r with D_f(r) > t.
/// Upward bias <= step by construction.  step <= 0 selects the default
/// 1e-3 * max(grid).
SamplePath sample_inverse_path(const SubordinatorSpec& spec,
                               const TimeGrid& grid, double step,
                               RngStream& rng);

enum class MomentKind { direct, inverse };

struct FractionalMomentResult {
  bool divergent = false;
  EstimateWithError estimate;
};

/// Monte Carlo estimate of E(D_f^power(t)) (direct) or E(H_f^power(t))
/// (inverse).  For the raw stable family, direct moments of order >= alpha
/// diverge and the divergent flag is set instead of returning a number.
/// `step` configures the first-passage lattice where one is needed
/// (non-stable inverse kinds); <= 0 selects 1e-3 * t.
FractionalMomentResult fractional_moment(MomentKind kind,
                                         const SubordinatorSpec& spec,
                                         double power, double t,
                                         std::size_t n, RngStream& rng,
                                         double step = 0.0);

/// Closed form E(e^{-c D(t)} D(t)^m) for the gamma family:
///   (a/(a+c))^{b t} Gamma(b t + m) / (Gamma(b t) (a+c)^m).
double gamma_exp_moment(double a, double b, double t, double c, int m);

/// Closed form E(D^p(t)) = Gamma(b t + p) / (Gamma(b t) a^p) for the gamma
/// family (used where an exact moment source is preferable to MC).
double gamma_fractional_moment(double a, double b, double t, double p);

}  // namespace spok

#endif  // SPOK_SUBORDINATORS_HPP
