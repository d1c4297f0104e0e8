#include "spok/processes.hpp"

#include <algorithm>
#include <cmath>

namespace spok {
namespace {

constexpr std::size_t kLatticeCap = 200'000'000;

long long ppok_increment(int order, double lambda, double dt, RngStream& rng) {
  if (dt <= 0.0) return 0;
  const long long events = rng.poisson(order * lambda * dt);
  if (order == 1) return events;
  long long total = 0;
  for (long long e = 0; e < events; ++e) total += rng.uniform_int(1, order);
  return total;
}

}  // namespace

namespace detail {

std::vector<long long> spok_at_times(const SkellamParams& params,
                                     const std::vector<double>& op_times,
                                     RngStream& rng) {
  std::vector<long long> values;
  values.reserve(op_times.size());
  double prev = 0.0;
  long long level = 0;
  for (double u : op_times) {
    const double dt = u - prev;
    level += ppok_increment(params.order, params.lambda1, dt, rng);
    level -= ppok_increment(params.order, params.lambda2, dt, rng);
    prev = u;
    values.push_back(level);
  }
  return values;
}

std::vector<double> inverse_stable_lattice(double alpha,
                                           const std::vector<double>& targets,
                                           double step, RngStream& rng) {
  std::vector<double> out;
  out.reserve(targets.size());
  const double scale = std::pow(step, 1.0 / alpha);
  double op_time = 0.0;
  double level = 0.0;
  std::size_t steps = 0;
  for (double target : targets) {
    if (target <= 0.0) {
      out.push_back(0.0);  // instantaneous passage above 0
      continue;
    }
    while (!(level > target)) {
      if (++steps > kLatticeCap)
        throw ConvergenceError(
            "inverse_stable_lattice: lattice cap exceeded before passage");
      op_time += step;
      level += scale * sample_stable(alpha, 1.0, rng);
    }
    out.push_back(op_time);
  }
  return out;
}

}  // namespace detail

IntPath sample_ppok(int order, double lambda, const TimeGrid& grid,
                    RngStream& rng) {
  if (order < 1) throw DomainError("sample_ppok: order must be >= 1");
  if (!(lambda > 0.0)) throw DomainError("sample_ppok: lambda must be > 0");
  grid.validate();
  IntPath path;
  path.times = grid.times;
  path.values.reserve(grid.times.size());
  double prev = 0.0;
  long long level = 0;
  for (double t : grid.times) {
    level += ppok_increment(order, lambda, t - prev, rng);
    prev = t;
    path.values.push_back(level);
  }
  return path;
}

IntPath sample_spok(const SkellamParams& params, const TimeGrid& grid,
                    RngStream& rng) {
  params.validate();
  grid.validate();
  IntPath path;
  path.times = grid.times;
  path.values = detail::spok_at_times(params, grid.times, rng);
  return path;
}

IntPath sample_fspok(const SkellamParams& params, const FracParams& frac,
                     const TimeGrid& grid, RngStream& rng, double step) {
  params.validate();
  frac.validate();
  grid.validate();
  IntPath path;
  path.times = grid.times;
  if (frac.alpha == 1.0) {
    path.values = detail::spok_at_times(params, grid.times, rng);
    return path;
  }
  if (step <= 0.0) step = 1e-3 * std::max(grid.max(), 1e-12);
  const std::vector<double> op_times =
      detail::inverse_stable_lattice(frac.alpha, grid.times, step, rng);
  path.values = detail::spok_at_times(params, op_times, rng);
  return path;
}

IntPath sample_tcfspok(const SkellamParams& params, const FracParams& frac,
                       const SubordinatorSpec& spec, const TimeGrid& grid,
                       RngStream& rng, double step) {
  params.validate();
  frac.validate();
  spec.validate();
  grid.validate();
  if (!spec.all_moments_finite())
    throw HypothesisError(
        "sample_tcfspok: subordinator must have all moments finite; the raw "
        "stable family is excluded");
  const SamplePath outer = sample_path(spec, grid, rng);
  IntPath path;
  path.times = grid.times;
  if (frac.alpha == 1.0) {
    path.values = detail::spok_at_times(params, outer.values, rng);
    return path;
  }
  const double max_op = outer.values.back();
  double inner_step = step;
  if (inner_step <= 0.0) inner_step = 1e-3 * std::max(max_op, 1e-12);
  const std::vector<double> op_times =
      detail::inverse_stable_lattice(frac.alpha, outer.values, inner_step, rng);
  path.values = detail::spok_at_times(params, op_times, rng);
  return path;
}

IntPath sample_inverse_tcfspok(const SkellamParams& params,
                               const FracParams& frac,
                               const SubordinatorSpec& spec,
                               const TimeGrid& grid, double step,
                               RngStream& rng, double inner_step) {
  params.validate();
  frac.validate();
  spec.validate();
  grid.validate();
  const SamplePath hitting = sample_inverse_path(spec, grid, step, rng);
  IntPath path;
  path.times = grid.times;
  if (frac.alpha == 1.0) {
    path.values = detail::spok_at_times(params, hitting.values, rng);
    return path;
  }
  const double max_op = hitting.values.back();
  if (inner_step <= 0.0) inner_step = 1e-3 * std::max(max_op, 1e-12);
  const std::vector<double> op_times = detail::inverse_stable_lattice(
      frac.alpha, hitting.values, inner_step, rng);
  path.values = detail::spok_at_times(params, op_times, rng);
  return path;
}

}  // namespace spok
