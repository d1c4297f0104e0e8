#ifndef SPOK_VERIFY_HPP
#define SPOK_VERIFY_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace spok {

/// One expected-vs-observed comparison inside a criterion.
struct CheckLine {
  std::string name;
  double expected = 0.0;
  double observed = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct CriterionResult {
  std::string name;
  bool pass = false;
  double runtime_sec = 0.0;
  double runtime_limit_sec = 0.0;  // 0 = no budget
  std::vector<CheckLine> checks;
};

struct VerifyOptions {
  std::uint64_t seed = 20240811;
  unsigned threads = 0;        // 0 = hardware concurrency
  std::string only;            // run a single criterion by name
};

const std::vector<std::string>& criterion_names();

/// Runs the full verification suite (or a single criterion) and returns one
/// result per criterion, in suite order.  Output is deterministic in the
/// seed and independent of the thread count.
std::vector<CriterionResult> run_acceptance(const VerifyOptions& options);

}  // namespace spok

#endif  // SPOK_VERIFY_HPP
