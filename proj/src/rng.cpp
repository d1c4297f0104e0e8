#include "spok/rng.hpp"

#include <cmath>

#include "spok/errors.hpp"

namespace spok {
namespace {

inline std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 33)) * 0xFF51AFD7ED558CCDULL;
  z = (z ^ (z >> 33)) * 0xC4CEB9FE1A85EC53ULL;
  return z ^ (z >> 33);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id) {
  std::uint64_t sm = seed ^ mix64(stream_id + 0x9E3779B97F4A7C15ULL);
  for (auto& s : s_) s = splitmix64(sm);
  if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;
}

std::uint64_t RngStream::next_u64() {
  const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double RngStream::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform_pos() { return 1.0 - uniform(); }

long long RngStream::uniform_int(long long lo, long long hi) {
  if (hi < lo) throw DomainError("uniform_int: hi < lo");
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  // rejection to remove modulo bias
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
  std::uint64_t x;
  do {
    x = next_u64();
  } while (x >= limit);
  return lo + static_cast<long long>(x % span);
}

double RngStream::exponential() { return -std::log(uniform_pos()); }

double RngStream::normal() {
  if (have_spare_normal_) {
    have_spare_normal_ = false;
    return spare_normal_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double factor = std::sqrt(-2.0 * std::log(s) / s);
  spare_normal_ = v * factor;
  have_spare_normal_ = true;
  return u * factor;
}

long long RngStream::poisson(double mean) {
  if (!(mean >= 0.0)) throw DomainError("poisson: mean must be >= 0");
  if (mean == 0.0) return 0;
  if (mean < 30.0) {
    // Knuth product-of-uniforms
    const double threshold = std::exp(-mean);
    long long n = 0;
    double prod = uniform_pos();
    while (prod > threshold) {
      ++n;
      prod *= uniform_pos();
    }
    return n;
  }
  // Hormann's PTRD transformed-rejection sampler.
  const double smu = std::sqrt(mean);
  const double b = 0.931 + 2.53 * smu;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    double u;
    double v = uniform();
    if (v <= 0.86 * v_r) {
      u = v / v_r - 0.43;
      return static_cast<long long>(
          std::floor((2.0 * a / (0.5 - std::abs(u)) + b) * u + mean + 0.445));
    }
    if (v >= v_r) {
      u = uniform() - 0.5;
    } else {
      u = v / v_r - 0.93;
      u = (u < 0 ? -0.5 : 0.5) - u;
      v = uniform() * v_r;
    }
    const double us = 0.5 - std::abs(u);
    if (us < 0.013 && v > us) continue;
    const double k = std::floor((2.0 * a / us + b) * u + mean + 0.445);
    v = v * inv_alpha / (a / (us * us) + b);
    const double log_mean = std::log(mean);
    if (k >= 10.0) {
      if (std::log(v * smu) <=
          (k + 0.5) * std::log(mean / k) - mean -
              std::log(std::sqrt(2.0 * 3.141592653589793)) + k -
              (1.0 / 12.0 - 1.0 / (360.0 * k * k)) / k)
        return static_cast<long long>(k);
    } else if (k >= 0.0) {
      if (std::log(v) <= k * log_mean - mean - std::lgamma(k + 1.0))
        return static_cast<long long>(k);
    }
  }
}

double RngStream::gamma_draw(double shape, double rate) {
  if (!(shape > 0.0) || !(rate > 0.0))
    throw DomainError("gamma_draw: shape and rate must be > 0");
  double boost = 1.0;
  double k = shape;
  if (k < 1.0) {
    boost = std::pow(uniform_pos(), 1.0 / k);
    k += 1.0;
  }
  const double d = k - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform_pos();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return boost * d * v / rate;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v)))
      return boost * d * v / rate;
  }
}

double RngStream::inverse_gaussian(double mean, double shape) {
  if (!(mean > 0.0) || !(shape > 0.0))
    throw DomainError("inverse_gaussian: mean and shape must be > 0");
  const double nu = normal();
  const double w = mean * nu * nu;
  // stable version of mean + m^2 y/(2 shape) - (m/(2 shape)) sqrt(4 m shape y + m^2 y^2)
  const double x =
      mean * (1.0 + (w - std::sqrt(w * (4.0 * shape + w))) / (2.0 * shape));
  const double candidate = x > 0.0 ? x : 1e-300;
  if (uniform() <= mean / (mean + candidate)) return candidate;
  return mean * mean / candidate;
}

}  // namespace spok
