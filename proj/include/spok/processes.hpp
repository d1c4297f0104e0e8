#ifndef SPOK_PROCESSES_HPP
#define SPOK_PROCESSES_HPP

#include "spok/rng.hpp"
#include "spok/subordinators.hpp"
#include "spok/types.hpp"

namespace spok {

/// Poisson process of order k: compound Poisson with event rate k*lambda
/// and iid jumps uniform on {1, ..., k}.  Nondecreasing, 0 at t = 0.
IntPath sample_ppok(int order, double lambda, const TimeGrid& grid,
                    RngStream& rng);

/// Skellam process of order k: pointwise difference of two independent
/// order-k Poisson processes with intensities lambda1 and lambda2.
IntPath sample_spok(const SkellamParams& params, const TimeGrid& grid,
                    RngStream& rng);

/// Fractional version: the Skellam process evaluated at an inverse stable
/// subordinator path.  One operational-time path is drawn per call (shared
/// by all grid points), via the first-passage lattice with spacing `step`
/// (<= 0 selects 1e-3 * max(grid)); the Skellam stage then advances by
/// increments between consecutive operational times.  alpha = 1 is the
/// identity time change.
IntPath sample_fspok(const SkellamParams& params, const FracParams& frac,
                     const TimeGrid& grid, RngStream& rng, double step = 0.0);

/// The fractional process further time-changed by an independent Levy
/// subordinator with all moments finite (the raw stable family is rejected
/// with HypothesisError).  `step` controls the inner inverse-stable lattice.
IntPath sample_tcfspok(const SkellamParams& params, const FracParams& frac,
                       const SubordinatorSpec& spec, const TimeGrid& grid,
                       RngStream& rng, double step = 0.0);

/// The fractional process time-changed by an inverse subordinator
/// (first-passage time of `spec`).  `step` is the first-passage lattice
/// spacing; `inner_step` the inner inverse-stable lattice (<= 0 for
/// default).
IntPath sample_inverse_tcfspok(const SkellamParams& params,
                               const FracParams& frac,
                               const SubordinatorSpec& spec,
                               const TimeGrid& grid, double step,
                               RngStream& rng, double inner_step = 0.0);

namespace detail {
/// Skellam process values at a nondecreasing sequence of operational times
/// (ties allowed; a zero increment leaves the value unchanged).
std::vector<long long> spok_at_times(const SkellamParams& params,
                                     const std::vector<double>& op_times,
                                     RngStream& rng);

/// Inverse-stable first-passage values at nondecreasing target levels.
std::vector<double> inverse_stable_lattice(double alpha,
                                           const std::vector<double>& targets,
                                           double step, RngStream& rng);
}  // namespace detail

}  // namespace spok

#endif  // SPOK_PROCESSES_HPP
