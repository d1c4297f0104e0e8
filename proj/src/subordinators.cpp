#include "spok/subordinators.hpp"

#include <algorithm>
#include <cmath>

#include "spok/specfun.hpp"

namespace spok {
namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

// Expected rejection count stays O(e) per part when each part carries
// at most one unit of the tempering exponent.
constexpr double kMaxTiltPerPart = 1.0;
constexpr std::size_t kRejectionCap = 10'000'000;
constexpr std::size_t kLatticeCap = 200'000'000;

double stable_increment(double alpha, double dt, RngStream& rng) {
  // Kanter: D_alpha(dt) =d dt^{1/alpha} (A(pi U)/W)^{(1-alpha)/alpha}
  const double u = rng.uniform_pos() * kPi;
  const double w = rng.exponential();
  const double a = zolotarev_a(alpha, u);
  return std::pow(dt, 1.0 / alpha) * std::pow(a / w, (1.0 - alpha) / alpha);
}

double tempered_stable_increment(double nu, double eta, double dt,
                                 RngStream& rng) {
  // Exponential-tilting rejection against the stable proposal; increments
  // with acceptance below e^{-kMaxTiltPerPart} are sub-split.
  const double tilt = dt * std::pow(eta, nu);
  const std::size_t parts =
      std::max<std::size_t>(1, static_cast<std::size_t>(
                                   std::ceil(tilt / kMaxTiltPerPart)));
  const double sub_dt = dt / static_cast<double>(parts);
  double total = 0.0;
  for (std::size_t p = 0; p < parts; ++p) {
    std::size_t tries = 0;
    for (;;) {
      if (++tries > kRejectionCap)
        throw ConvergenceError(
            "tempered stable sampler: rejection cap exceeded");
      const double x = stable_increment(nu, sub_dt, rng);
      if (rng.uniform_pos() <= std::exp(-eta * x)) {
        total += x;
        break;
      }
    }
  }
  return total;
}

double increment(const SubordinatorSpec& spec, double dt, RngStream& rng) {
  if (dt <= 0.0) return 0.0;
  return std::visit(
      [&](const auto& fam) -> double {
        using T = std::decay_t<decltype(fam)>;
        if constexpr (std::is_same_v<T, StableFamily>) {
          return stable_increment(fam.alpha, dt, rng);
        } else if constexpr (std::is_same_v<T, TemperedStableFamily>) {
          return tempered_stable_increment(fam.nu, fam.eta, dt, rng);
        } else if constexpr (std::is_same_v<T, GammaFamily>) {
          return rng.gamma_draw(fam.b * dt, fam.a);
        } else {
          return rng.inverse_gaussian(fam.delta * dt / fam.gamma_p,
                                      fam.delta * fam.delta * dt * dt);
        }
      },
      spec.family);
}

}  // namespace

SubordinatorSpec SubordinatorSpec::stable(double alpha) {
  SubordinatorSpec s{StableFamily{alpha}};
  s.validate();
  return s;
}
SubordinatorSpec SubordinatorSpec::tempered_stable(double nu, double eta) {
  SubordinatorSpec s{TemperedStableFamily{nu, eta}};
  s.validate();
  return s;
}
SubordinatorSpec SubordinatorSpec::gamma(double a, double b) {
  SubordinatorSpec s{GammaFamily{a, b}};
  s.validate();
  return s;
}
SubordinatorSpec SubordinatorSpec::inverse_gaussian(double delta,
                                                    double gamma_p) {
  SubordinatorSpec s{InverseGaussianFamily{delta, gamma_p}};
  s.validate();
  return s;
}

void SubordinatorSpec::validate() const {
  std::visit(
      [](const auto& fam) {
        using T = std::decay_t<decltype(fam)>;
        if constexpr (std::is_same_v<T, StableFamily>) {
          if (!(fam.alpha > 0.0 && fam.alpha < 1.0))
            throw DomainError("stable family: alpha must be in (0, 1)");
        } else if constexpr (std::is_same_v<T, TemperedStableFamily>) {
          if (!(fam.nu > 0.0 && fam.nu < 1.0))
            throw DomainError("tempered stable family: nu must be in (0, 1)");
          if (!(fam.eta > 0.0))
            throw DomainError("tempered stable family: eta must be > 0");
        } else if constexpr (std::is_same_v<T, GammaFamily>) {
          if (!(fam.a > 0.0) || !(fam.b > 0.0))
            throw DomainError("gamma family: a, b must be > 0");
        } else {
          if (!(fam.delta > 0.0) || !(fam.gamma_p > 0.0))
            throw DomainError(
                "inverse Gaussian family: delta, gamma must be > 0");
        }
      },
      family);
}

std::string SubordinatorSpec::name() const {
  return std::visit(
      [](const auto& fam) -> std::string {
        using T = std::decay_t<decltype(fam)>;
        if constexpr (std::is_same_v<T, StableFamily>)
          return "stable";
        else if constexpr (std::is_same_v<T, TemperedStableFamily>)
          return "tempered_stable";
        else if constexpr (std::is_same_v<T, GammaFamily>)
          return "gamma";
        else
          return "inverse_gaussian";
      },
      family);
}

bool SubordinatorSpec::all_moments_finite() const {
  return !std::holds_alternative<StableFamily>(family);
}

double bernstein_eval(const SubordinatorSpec& spec, double s) {
  if (!(s > 0.0)) throw DomainError("bernstein_eval: s must be > 0");
  return std::visit(
      [&](const auto& fam) -> double {
        using T = std::decay_t<decltype(fam)>;
        if constexpr (std::is_same_v<T, StableFamily>) {
          return std::pow(s, fam.alpha);
        } else if constexpr (std::is_same_v<T, TemperedStableFamily>) {
          return std::pow(fam.eta + s, fam.nu) - std::pow(fam.eta, fam.nu);
        } else if constexpr (std::is_same_v<T, GammaFamily>) {
          return fam.b * std::log1p(s / fam.a);
        } else {
          return fam.delta *
                 (std::sqrt(2.0 * s + fam.gamma_p * fam.gamma_p) -
                  fam.gamma_p);
        }
      },
      spec.family);
}

double bernstein_inverse(const SubordinatorSpec& spec, double y) {
  if (!(y > 0.0)) throw DomainError("bernstein_inverse: y must be > 0");
  double lo = 0.0;
  double hi = 1.0;
  std::size_t expand = 0;
  while (bernstein_eval(spec, hi) < y) {
    lo = hi;
    hi *= 2.0;
    if (++expand > 4000)
      throw ConvergenceError("bernstein_inverse: bracket expansion failed");
  }
  // bisection; f is strictly increasing and continuous
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (bernstein_eval(spec, mid) < y)
      lo = mid;
    else
      hi = mid;
    if (hi - lo <= 1e-14 * hi) break;
  }
  const double root = 0.5 * (lo + hi);
  const double check = bernstein_eval(spec, root);
  if (std::abs(check - y) > 1e-9 * std::abs(y) + 1e-300)
    throw ConvergenceError("bernstein_inverse: root not resolved to 1e-10");
  return root;
}

double sample_stable(double alpha, double t, RngStream& rng) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw DomainError("sample_stable: alpha must be in (0, 1)");
  if (!(t > 0.0)) throw DomainError("sample_stable: t must be > 0");
  return stable_increment(alpha, t, rng);
}

double sample_inverse_stable(double alpha, double t, RngStream& rng) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw DomainError("sample_inverse_stable: alpha must be in (0, 1)");
  if (!(t >= 0.0)) throw DomainError("sample_inverse_stable: t must be >= 0");
  if (t == 0.0) return 0.0;
  const double d1 = stable_increment(alpha, 1.0, rng);
  return std::pow(t, alpha) * std::pow(d1, -alpha);
}

SamplePath sample_path(const SubordinatorSpec& spec, const TimeGrid& grid,
                       RngStream& rng) {
  spec.validate();
  grid.validate();
  SamplePath path;
  path.grid = grid;
  path.values.reserve(grid.times.size());
  double prev_t = 0.0;
  double level = 0.0;
  for (double t : grid.times) {
    level += increment(spec, t - prev_t, rng);
    prev_t = t;
    path.values.push_back(level);
  }
  return path;
}

SamplePath sample_inverse_path(const SubordinatorSpec& spec,
                               const TimeGrid& grid, double step,
                               RngStream& rng) {
  spec.validate();
  grid.validate();
  if (step <= 0.0) step = 1e-3 * std::max(grid.max(), 1e-12);
  SamplePath path;
  path.grid = grid;
  path.values.reserve(grid.times.size());

  double op_time = 0.0;  // lattice position in operational time
  double level = 0.0;    // D_f at op_time
  std::size_t steps = 0;
  for (double target : grid.times) {
    if (target <= 0.0) {
      // passage above level 0 is instantaneous for these strictly
      // increasing families; report the exact value
      path.values.push_back(0.0);
      continue;
    }
    while (!(level > target)) {
      if (++steps > kLatticeCap)
        throw ConvergenceError(
            "sample_inverse_path: lattice cap exceeded before passage");
      op_time += step;
      level += increment(spec, step, rng);
    }
    path.values.push_back(op_time);
  }
  return path;
}

FractionalMomentResult fractional_moment(MomentKind kind,
                                         const SubordinatorSpec& spec,
                                         double power, double t,
                                         std::size_t n, RngStream& rng,
                                         double step) {
  spec.validate();
  if (!(power > 0.0)) throw DomainError("fractional_moment: power must be > 0");
  if (!(t > 0.0)) throw DomainError("fractional_moment: t must be > 0");
  if (n < 100) throw DomainError("fractional_moment: need n >= 100");

  FractionalMomentResult out;
  if (kind == MomentKind::direct &&
      std::holds_alternative<StableFamily>(spec.family)) {
    const double alpha = std::get<StableFamily>(spec.family).alpha;
    if (power >= alpha) {
      out.divergent = true;  // E D^p(t) = inf for p >= alpha
      return out;
    }
  }

  const bool inverse_stable_kind =
      kind == MomentKind::inverse &&
      std::holds_alternative<StableFamily>(spec.family);
  if (step <= 0.0) step = 1e-3 * t;

  double sum = 0.0, sum_sq = 0.0;
  TimeGrid single{{t}};
  for (std::size_t i = 0; i < n; ++i) {
    double x;
    if (kind == MomentKind::direct) {
      x = increment(spec, t, rng);
    } else if (inverse_stable_kind) {
      x = sample_inverse_stable(std::get<StableFamily>(spec.family).alpha, t,
                                rng);
    } else {
      x = sample_inverse_path(spec, single, step, rng).values.front();
    }
    const double v = std::pow(x, power);
    sum += v;
    sum_sq += v * v;
  }
  const double mean = sum / static_cast<double>(n);
  const double var =
      std::max(0.0, (sum_sq - sum * mean) / (static_cast<double>(n) - 1.0));
  out.estimate = {mean, std::sqrt(var / static_cast<double>(n)), n};
  return out;
}

double gamma_exp_moment(double a, double b, double t, double c, int m) {
  if (!(a > 0.0) || !(b > 0.0) || !(t > 0.0))
    throw DomainError("gamma_exp_moment: a, b, t must be > 0");
  if (c < 0.0) throw DomainError("gamma_exp_moment: c must be >= 0");
  if (m < 0) throw DomainError("gamma_exp_moment: m must be >= 0");
  const double bt = b * t;
  const double lv = bt * (std::log(a) - std::log(a + c)) +
                    std::lgamma(bt + m) - std::lgamma(bt) -
                    m * std::log(a + c);
  if (lv > 709.0) throw OverflowError("gamma_exp_moment: overflow");
  return std::exp(lv);
}

double gamma_fractional_moment(double a, double b, double t, double p) {
  if (!(a > 0.0) || !(b > 0.0) || !(t > 0.0) || !(p > 0.0))
    throw DomainError("gamma_fractional_moment: arguments must be > 0");
  return std::exp(std::lgamma(b * t + p) - std::lgamma(b * t) -
                  p * std::log(a));
}

}  // namespace spok
