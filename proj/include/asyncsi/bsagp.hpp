#pragma once

#include <stdexcept>

#include "asyncsi/pmf.hpp"

namespace asyncsi {

// Closed-form achievable rate of the binary symmetric AGP channel with
// delay set {0,1}: 1 - h2(2p(1-p))/2. The aligned half-block is clean and
// the misaligned half sees the state-difference process, which is
// Bernoulli(2p(1-p)) per symbol.
inline double bsagp_closed_form(double p) {
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("bsagp_closed_form: p out of [0,1]");
  return 1.0 - 0.5 * binary_entropy(2.0 * p * (1.0 - p));
}

}  // namespace asyncsi
