#ifndef SPOK_OPTIONS_HPP
#define SPOK_OPTIONS_HPP

#include "spok/errors.hpp"

namespace spok {

/// Accuracy policy shared by all series evaluations.
struct EvalOptions {
  double rel_tol = 1e-12;
  int max_terms = 10000;

  void validate() const {
    if (!(rel_tol > 0.0)) throw DomainError("EvalOptions: rel_tol must be > 0");
    if (max_terms < 1) throw DomainError("EvalOptions: max_terms must be >= 1");
  }
};

}  // namespace spok

#endif  // SPOK_OPTIONS_HPP
