#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "asyncsi/joint_pmf.hpp"
#include "asyncsi/pmf.hpp"

namespace asyncsi {

// Strong typicality with an additive per-symbol tolerance and the zero-count
// rule (symbols of probability zero must not appear at all). This is the
// textbook "epsilon-strongly typical" definition; weak typicality is
// intentionally not offered.
struct TypicalityParams {
  double epsilon = 0.1;
};

inline bool is_strongly_typical(std::span<const int> seq, const Pmf& p,
                                const TypicalityParams& tp) {
  if (tp.epsilon <= 0.0) throw std::invalid_argument("TypicalityParams: epsilon must be > 0");
  if (seq.empty()) throw std::invalid_argument("is_strongly_typical: empty sequence");
  std::vector<long> counts(static_cast<std::size_t>(p.size()), 0);
  for (int s : seq) {
    if (s < 0 || s >= p.size()) throw std::invalid_argument("is_strongly_typical: symbol out of range");
    ++counts[static_cast<std::size_t>(s)];
  }
  const double n = static_cast<double>(seq.size());
  for (int a = 0; a < p.size(); ++a) {
    const double freq = static_cast<double>(counts[static_cast<std::size_t>(a)]) / n;
    if (p[a] == 0.0) {
      if (counts[static_cast<std::size_t>(a)] != 0) return false;
    } else if (std::abs(freq - p[a]) > tp.epsilon) {
      return false;
    }
  }
  return true;
}

// Joint strong typicality of a tuple of equal-length sequences against a
// joint pmf: the symbol-tuple sequence is tested against the tensor cells.
inline bool jointly_typical(std::span<const std::span<const int>> seqs, const JointPmf& j,
                            const TypicalityParams& tp) {
  if (tp.epsilon <= 0.0) throw std::invalid_argument("TypicalityParams: epsilon must be > 0");
  if (seqs.size() != static_cast<std::size_t>(j.rank())) {
    throw std::invalid_argument("jointly_typical: sequence count does not match axes");
  }
  const std::size_t n = seqs[0].size();
  if (n == 0) throw std::invalid_argument("jointly_typical: empty sequences");
  for (const auto& s : seqs) {
    if (s.size() != n) throw std::invalid_argument("jointly_typical: length mismatch");
  }
  std::vector<long> counts(j.probs().size(), 0);
  std::vector<int> idx(seqs.size());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < seqs.size(); ++k) idx[k] = seqs[k][i];
    ++counts[j.flat_index(idx)];
  }
  const double dn = static_cast<double>(n);
  for (std::size_t c = 0; c < counts.size(); ++c) {
    const double pc = j.probs()[c];
    if (pc == 0.0) {
      if (counts[c] != 0) return false;
    } else if (std::abs(static_cast<double>(counts[c]) / dn - pc) > tp.epsilon) {
      return false;
    }
  }
  return true;
}

inline bool jointly_typical(std::initializer_list<std::span<const int>> seqs, const JointPmf& j,
                            const TypicalityParams& tp) {
  return jointly_typical(std::span<const std::span<const int>>(seqs.begin(), seqs.size()), j, tp);
}

}  // namespace asyncsi
