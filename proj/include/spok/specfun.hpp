#ifndef SPOK_SPECFUN_HPP
#define SPOK_SPECFUN_HPP

#include "spok/options.hpp"

namespace spok {

/// Gamma function on (0, 171].  Throws DomainError for x <= 0 and
/// OverflowError for x > 171 (where the result exceeds double range).
double gamma_fn(double x);

/// log Gamma for x > 0.
double log_gamma(double x);

/// 1/Gamma(y) for any real y; exactly 0 at the poles y = 0, -1, -2, ...
double reciprocal_gamma(double y);

/// Three-parameter Mittag-Leffler function
///   E^g_{a,b}(x) = (1/Gamma(g)) sum_k Gamma(g+k) x^k / (k! Gamma(a k + b)).
/// Contracted window: x in [-10, 50].  For g = b = 1, 0 < a < 1 and x < 0 the
/// power series loses precision; evaluation then switches to the completely
/// monotone spectral form
///   E_a(-y) = sin(a pi)/(a pi) * int_0^inf e^{-(w y)^{1/a}} /
///             (w^2 + 2 w cos(a pi) + 1) dw.
double mittag_leffler(double alpha, double beta, double gamma_p, double x,
                      const EvalOptions& opts = {});

/// Wright function M_a(z) = sum_m (-z)^m / (m! Gamma(1 - m a - a)), a in
/// (0,1), z >= 0.  Reciprocal-gamma convention: terms whose Gamma argument
/// hits a nonpositive integer are 0.  Once the alternating series becomes
/// cancellation-limited the evaluation switches to the positive integral
///   M_a(z) = z^{a/(1-a)}/((1-a) pi) * int_0^pi A(phi) e^{-z^{1/(1-a)} A(phi)} dphi
/// with A the one-sided stable kernel (zolotarev_a below), which also covers
/// the deep tail in log space (underflow returns exactly 0).
double wright_m(double alpha, double z, const EvalOptions& opts = {});

/// Modified Bessel function of the first kind, integer order n >= 0, z >= 0.
/// Throws OverflowError when the value exceeds double range; use
/// log_bessel_i there.
double bessel_i(int n, double z, const EvalOptions& opts = {});

/// log I_n(z); works for all z >= 0 without overflow (series summed around
/// its largest term).  Returns -inf for I_n(0), n > 0.
double log_bessel_i(int n, double z);

/// Lower incomplete beta B(a,b;x) = int_0^x u^{a-1} (1-u)^{b-1} du
/// (NOT regularized).  B(a,b;1) is the complete beta function.
double incomplete_beta(double a, double b, double x);

/// Error function (odd, erf(0)=0, erf(inf)=1).
double erf(double x);

/// Kanter / Zolotarev kernel for the one-sided stable law,
///   A_a(phi) = sin(a phi)^{a/(1-a)} sin((1-a) phi) / sin(phi)^{1/(1-a)},
/// phi in (0, pi), strictly increasing from A_a(0+) = (1-a) a^{a/(1-a)}.
double zolotarev_a(double alpha, double phi);

}  // namespace spok

#endif  // SPOK_SPECFUN_HPP
