#ifndef SPOK_TYPES_HPP
#define SPOK_TYPES_HPP

#include <cstddef>
#include <cstdint>
#include <cmath>
#include <vector>

#include "spok/errors.hpp"

namespace spok {

/// Order and intensities shared by every Skellam-type process here.
struct SkellamParams {
  int order = 1;        // k
  double lambda1 = 1.0;
  double lambda2 = 1.0;

  void validate() const {
    if (order < 1) throw DomainError("SkellamParams: order must be >= 1");
    if (!(lambda1 > 0.0) || !(lambda2 > 0.0))
      throw DomainError("SkellamParams: intensities must be > 0");
  }
};

/// Index of the inverse-stable time change; alpha = 1 means identity.
struct FracParams {
  double alpha = 1.0;

  void validate() const {
    if (!(alpha > 0.0 && alpha <= 1.0))
      throw DomainError("FracParams: alpha must be in (0, 1]");
  }
};

/// Strictly increasing sequence of nonnegative observation times.
struct TimeGrid {
  std::vector<double> times;

  void validate() const {
    if (times.empty()) throw DomainError("TimeGrid: empty grid");
    if (!(times.front() >= 0.0))
      throw DomainError("TimeGrid: times must be >= 0");
    for (std::size_t i = 0; i < times.size(); ++i) {
      if (!std::isfinite(times[i]))
        throw DomainError("TimeGrid: times must be finite");
      if (i > 0 && !(times[i] > times[i - 1]))
        throw DomainError("TimeGrid: times must be strictly increasing");
    }
  }
  double max() const { return times.back(); }
};

/// Real-valued path on a grid (subordinators, inverse subordinators).
struct SamplePath {
  TimeGrid grid;
  std::vector<double> values;
};

/// Integer-valued path on a grid (counting and Skellam-type processes).
struct IntPath {
  std::vector<double> times;
  std::vector<long long> values;
};

/// Monte Carlo scalar with its standard error and replication count.
struct EstimateWithError {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
};

/// Probabilities on an integer window plus the mass left outside it.
struct PmfTable {
  long long n_min = 0;
  long long n_max = 0;
  std::vector<double> probs;
  double truncation_mass = 0.0;

  double prob(long long n) const {
    if (n < n_min || n > n_max) return 0.0;
    return probs[static_cast<std::size_t>(n - n_min)];
  }
  double sum() const {
    double s = 0.0;
    for (double p : probs) s += p;
    return s;
  }
};

}  // namespace spok

#endif  // SPOK_TYPES_HPP
