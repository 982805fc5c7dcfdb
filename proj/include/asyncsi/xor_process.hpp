#pragma once

#include <cmath>
#include <vector>

#include "asyncsi/errors.hpp"
#include "asyncsi/pmf.hpp"

namespace asyncsi {

// Exact finite-n entropies of the state-difference process K_i = S_i xor
// S_{i-1} with S i.i.d. Bernoulli(p), and the multicast capacity estimate
// 1 - H_rate/2 they induce. The conditional entropies H(K_n | K^{n-1})
// decrease toward the entropy rate, so the last one is the estimate.
struct XorProcessResult {
  std::vector<double> conditional_entropies;  // H(K_n|K^{n-1}), n = 1..n_max
  double entropy_rate_estimate = 0.0;
  double capacity_estimate = 0.0;             // 1 - estimate/2
};

namespace detail {

// H(K^n) by evaluating all 2^n sequences. Given k^n and the seed state s_0,
// the whole state path is forced (s_i = s_{i-1} xor k_i), so each sequence
// probability is a two-term sum over s_0 of products of P_S terms - the
// two-state forward recursion in its simplest form.
inline double xor_block_entropy(double p, int n) {
  const double ps[2] = {1.0 - p, p};
  double h = 0.0;
  const std::uint64_t total = 1ull << n;
  for (std::uint64_t k = 0; k < total; ++k) {
    double path0 = ps[0];  // s_0 = 0 branch
    double path1 = ps[1];  // s_0 = 1 branch
    int s0 = 0, s1 = 1;
    for (int i = 0; i < n; ++i) {
      const int ki = static_cast<int>((k >> i) & 1u);
      s0 ^= ki;
      s1 ^= ki;
      path0 *= ps[s0];
      path1 *= ps[s1];
      if (path0 == 0.0 && path1 == 0.0) break;
    }
    h -= plog2p(path0 + path1);
  }
  return h;
}

}  // namespace detail

inline XorProcessResult xor_process_entropy_rate(double p, int n_max) {
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("xor_process_entropy_rate: p out of [0,1]");
  if (n_max < 2 || n_max > 24) {
    throw GuardError("xor_process_entropy_rate: n_max must be in [2, 24] (exact enumeration budget)");
  }
  XorProcessResult res;
  double prev = 0.0;
  for (int n = 1; n <= n_max; ++n) {
    const double hn = detail::xor_block_entropy(p, n);
    res.conditional_entropies.push_back(hn - prev);
    prev = hn;
  }
  res.entropy_rate_estimate = res.conditional_entropies.back();
  res.capacity_estimate = 1.0 - 0.5 * res.entropy_rate_estimate;
  return res;
}

}  // namespace asyncsi
