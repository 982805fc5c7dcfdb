#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "asyncsi/acsitr.hpp"
#include "asyncsi/errors.hpp"
#include "asyncsi/pmf.hpp"
#include "asyncsi/rng.hpp"

namespace asyncsi {

// Binned random codebook: 2^r_exp messages, each holding a bin of 2^j_exp
// length-n codewords drawn i.i.d. from P_U. Bit-identical regeneration from
// the same stream is part of the contract.
class BinCodebook {
 public:
  BinCodebook(int n, int r_exp, int j_exp, const Pmf& pu, Rng rng)
      : n_(n), r_exp_(r_exp), j_exp_(j_exp) {
    if (n <= 0 || r_exp < 0 || j_exp < 0) throw std::invalid_argument("BinCodebook: bad shape");
    if (r_exp + j_exp > 20) {
      throw GuardError("BinCodebook: 2^(nR+nJ) codewords over the 2^20 guard");
    }
    words_.resize((num_messages() * bin_size()) * static_cast<std::size_t>(n_));
    for (std::size_t i = 0; i < words_.size(); ++i) {
      words_[i] = static_cast<std::int8_t>(rng.sample(pu.span()));
    }
  }

  std::size_t num_messages() const { return std::size_t{1} << r_exp_; }
  std::size_t bin_size() const { return std::size_t{1} << j_exp_; }
  int n() const { return n_; }

  std::span<const std::int8_t> word(std::size_t m, std::size_t k) const {
    return {words_.data() + (m * bin_size() + k) * static_cast<std::size_t>(n_),
            static_cast<std::size_t>(n_)};
  }

 private:
  int n_;
  int r_exp_, j_exp_;
  std::vector<std::int8_t> words_;
};

// Strategy-letter codebook: per message a |V| x n matrix whose column-i,
// row-N(v) entry is drawn from P(x|v). The transmitted symbol for message m
// at time i under window value v is x(m, i, N(v)).
class StrategyCodebook {
 public:
  StrategyCodebook(std::size_t num_messages, int n, const StrategyPmf& strat, Rng rng)
      : num_messages_(num_messages), n_(n), nv_(strat.nv) {
    if (num_messages == 0 || n <= 0) throw std::invalid_argument("StrategyCodebook: bad shape");
    entries_.resize(num_messages * static_cast<std::size_t>(nv_) * static_cast<std::size_t>(n_));
    // Column-major in i per the generation order: each column vector b_i has
    // one entry per window value.
    for (std::size_t m = 0; m < num_messages; ++m) {
      for (int i = 0; i < n_; ++i) {
        for (int v = 0; v < nv_; ++v) {
          entries_[offset(m, i, v)] = static_cast<std::int8_t>(
              rng.sample(std::span<const double>(strat.p).subspan(
                  static_cast<std::size_t>(v) * strat.nx, static_cast<std::size_t>(strat.nx))));
        }
      }
    }
  }

  std::size_t num_messages() const { return num_messages_; }
  int n() const { return n_; }
  int nv() const { return nv_; }

  int x(std::size_t m, int i, int v_index) const { return entries_[offset(m, i, v_index)]; }

 private:
  std::size_t offset(std::size_t m, int i, int v) const {
    return (m * static_cast<std::size_t>(n_) + static_cast<std::size_t>(i)) *
               static_cast<std::size_t>(nv_) +
           static_cast<std::size_t>(v);
  }

  std::size_t num_messages_;
  int n_, nv_;
  std::vector<std::int8_t> entries_;
};

// Plain unbinned codebook of i.i.d. Bernoulli(1/2) words for the explicit
// binary scheme.
inline std::vector<std::vector<int>> draw_binary_codebook(std::size_t num_words, int n, Rng rng) {
  std::vector<std::vector<int>> words(num_words, std::vector<int>(static_cast<std::size_t>(n)));
  for (auto& w : words) {
    for (int& b : w) b = static_cast<int>(rng.index(2));
  }
  return words;
}

// Number of codewords ceil(2^(n * rate)), guarded against overflow.
inline unsigned long long codeword_count(int n, double rate) {
  const double exponent = static_cast<double>(n) * rate;
  if (exponent >= 62.0) throw GuardError("codeword_count: 2^(n*rate) exceeds 2^62");
  return static_cast<unsigned long long>(std::ceil(std::exp2(exponent)));
}

}  // namespace asyncsi
