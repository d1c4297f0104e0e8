#ifndef SPOK_QUAD_HPP
#define SPOK_QUAD_HPP

#include <cstddef>
#include <functional>
#include <vector>

namespace spok {

/// Adaptive Gauss-Kronrod (G7,K15) quadrature on [a, b].
/// Bisects the interval with the largest error estimate until
///   total_error <= max(abs_tol, rel_tol * |integral|)
/// or the interval budget is exhausted (then throws ConvergenceError).
double gk_integrate(const std::function<double(double)>& f, double a, double b,
                    double abs_tol, double rel_tol = 0.0,
                    std::size_t max_intervals = 2000);

/// Vector-valued variant: f(x, out) writes `dim` components.  Error control
/// is on the max norm across components.  Used to integrate a whole pmf
/// window against a common kernel in one adaptive pass.
std::vector<double> gk_integrate_vec(
    const std::function<void(double, double*)>& f, std::size_t dim, double a,
    double b, double abs_tol, std::size_t max_intervals = 4000);

}  // namespace spok

#endif  // SPOK_QUAD_HPP
