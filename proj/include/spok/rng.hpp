#ifndef SPOK_RNG_HPP
#define SPOK_RNG_HPP

#include <cstdint>

namespace spok {

/// Counter-seeded xoshiro256++ stream.  Identical (seed, stream_id) pairs
/// reproduce identical variate sequences; distinct stream_ids give
/// statistically independent streams.  All samplers in the library draw
/// exclusively from this class, so every result is replayable.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  std::uint64_t next_u64();

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on (0, 1] (safe under log()).
  double uniform_pos();
  /// Uniform integer on {lo, ..., hi}.
  long long uniform_int(long long lo, long long hi);

  double exponential();             // rate 1
  double normal();                  // standard normal (polar method)
  long long poisson(double mean);   // inversion below 30, PTRD above
  double gamma_draw(double shape, double rate);  // Marsaglia-Tsang
  /// Inverse Gaussian with density parameterized by (mean, shape).
  double inverse_gaussian(double mean, double shape);

 private:
  std::uint64_t s_[4];
  std::uint64_t seed_, stream_id_;
  bool have_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

}  // namespace spok

#endif  // SPOK_RNG_HPP
