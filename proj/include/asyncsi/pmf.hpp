#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace asyncsi {

// Normalization policy shared by every probability-carrying constructor:
// a sum within kRenormalizeTol of 1 is silently renormalized, anything
// further off is rejected. Validated objects hold sums within kSumTol of 1.
inline constexpr double kSumTol = 1e-12;
inline constexpr double kRenormalizeTol = 1e-9;

namespace detail {

inline void normalize_or_throw(std::vector<double>& probs, const char* what) {
  double sum = 0.0;
  for (double& v : probs) {
    if (v < 0.0) {
      if (v < -1e-15) {
        throw std::invalid_argument(std::string(what) + ": negative probability entry");
      }
      v = 0.0;
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) >= kRenormalizeTol) {
    throw std::invalid_argument(std::string(what) + ": probabilities sum to " +
                                std::to_string(sum) + ", not 1");
  }
  if (sum != 1.0) {
    for (double& v : probs) v /= sum;
  }
}

}  // namespace detail

// Probability mass function over a finite alphabet {0, ..., size-1}.
// Immutable after construction; all operations on it are pure.
class Pmf {
 public:
  explicit Pmf(std::vector<double> probs) : probs_(std::move(probs)) {
    if (probs_.empty()) throw std::invalid_argument("Pmf: empty alphabet");
    detail::normalize_or_throw(probs_, "Pmf");
  }

  static Pmf uniform(int n) {
    return Pmf(std::vector<double>(static_cast<std::size_t>(n), 1.0 / n));
  }

  static Pmf point_mass(int n, int at) {
    std::vector<double> p(static_cast<std::size_t>(n), 0.0);
    p.at(static_cast<std::size_t>(at)) = 1.0;
    return Pmf(std::move(p));
  }

  // Over {0,1} with P(1) = p_one.
  static Pmf bernoulli(double p_one) {
    if (p_one < 0.0 || p_one > 1.0) throw std::invalid_argument("bernoulli: p out of [0,1]");
    return Pmf({1.0 - p_one, p_one});
  }

  int size() const { return static_cast<int>(probs_.size()); }
  double operator[](int i) const { return probs_[static_cast<std::size_t>(i)]; }
  const std::vector<double>& probs() const { return probs_; }
  std::span<const double> span() const { return probs_; }

 private:
  std::vector<double> probs_;
};

// p * log2(p) with the 0 log 0 := 0 convention.
inline double plog2p(double p) { return p > 0.0 ? p * std::log2(p) : 0.0; }

// Shannon entropy in bits.
inline double entropy(const Pmf& p) {
  double h = 0.0;
  for (double v : p.probs()) h -= plog2p(v);
  return h;
}

inline double entropy_of(std::span<const double> probs) {
  double h = 0.0;
  for (double v : probs) h -= plog2p(v);
  return h;
}

// Binary entropy h2(q) in bits; h2(0) = h2(1) = 0.
inline double binary_entropy(double q) {
  if (q < 0.0 || q > 1.0) throw std::invalid_argument("binary_entropy: q out of [0,1]");
  return -plog2p(q) - plog2p(1.0 - q);
}

}  // namespace asyncsi
