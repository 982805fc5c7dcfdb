#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "asyncsi/pmf.hpp"

namespace asyncsi {

// Discrete memoryless state-dependent channel W(y|x,s) with an i.i.d. state
// prior P_S. Rows are validated to sum to 1 (same renormalization policy as
// Pmf). Immutable after construction.
class StateChannel {
 public:
  // `w` is laid out x-major then s: w[(x*ns + s)*ny + y] = W(y|x,s).
  StateChannel(int nx, int ns, int ny, std::vector<double> w, Pmf state_prior)
      : nx_(nx), ns_(ns), ny_(ny), w_(std::move(w)), state_prior_(std::move(state_prior)) {
    if (nx_ <= 0 || ns_ <= 0 || ny_ <= 0) throw std::invalid_argument("StateChannel: empty alphabet");
    if (state_prior_.size() != ns_) throw std::invalid_argument("StateChannel: state prior size != ns");
    if (w_.size() != static_cast<std::size_t>(nx_) * ns_ * ny_) {
      throw std::invalid_argument("StateChannel: transition tensor has wrong size");
    }
    for (int x = 0; x < nx_; ++x) {
      for (int s = 0; s < ns_; ++s) {
        std::vector<double> row(w_.begin() + row_offset(x, s), w_.begin() + row_offset(x, s) + ny_);
        detail::normalize_or_throw(row, "StateChannel row");
        std::copy(row.begin(), row.end(), w_.begin() + row_offset(x, s));
      }
    }
  }

  int nx() const { return nx_; }
  int ns() const { return ns_; }
  int ny() const { return ny_; }
  const Pmf& state_prior() const { return state_prior_; }

  double w(int y, int x, int s) const { return w_[row_offset(x, s) + static_cast<std::size_t>(y)]; }

  std::span<const double> row(int x, int s) const {
    return {w_.data() + row_offset(x, s), static_cast<std::size_t>(ny_)};
  }

  // State-averaged channel: Wbar(y|x) = sum_s P_S(s) W(y|x,s), x-major.
  std::vector<double> averaged() const {
    std::vector<double> wb(static_cast<std::size_t>(nx_) * ny_, 0.0);
    for (int x = 0; x < nx_; ++x) {
      for (int s = 0; s < ns_; ++s) {
        for (int y = 0; y < ny_; ++y) {
          wb[static_cast<std::size_t>(x) * ny_ + y] += state_prior_[s] * w(y, x, s);
        }
      }
    }
    return wb;
  }

  // Y = X xor S over {0,1}, state Bernoulli(p). The paper's main example.
  static StateChannel xor_binary(double p) {
    std::vector<double> w(8, 0.0);
    for (int x = 0; x < 2; ++x)
      for (int s = 0; s < 2; ++s) w[static_cast<std::size_t>((x * 2 + s) * 2 + (x ^ s))] = 1.0;
    return StateChannel(2, 2, 2, std::move(w), Pmf::bernoulli(p));
  }

  // Y = X xor S xor N with N ~ Bernoulli(q) independent of everything else.
  static StateChannel xor_noisy(double p, double q) {
    std::vector<double> w(8, 0.0);
    for (int x = 0; x < 2; ++x) {
      for (int s = 0; s < 2; ++s) {
        w[static_cast<std::size_t>((x * 2 + s) * 2 + (x ^ s))] = 1.0 - q;
        w[static_cast<std::size_t>((x * 2 + s) * 2 + (1 - (x ^ s)))] = q;
      }
    }
    return StateChannel(2, 2, 2, std::move(w), Pmf::bernoulli(p));
  }

 private:
  std::size_t row_offset(int x, int s) const {
    return (static_cast<std::size_t>(x) * ns_ + s) * ny_;
  }

  int nx_, ns_, ny_;
  std::vector<double> w_;
  Pmf state_prior_;
};

// The contiguous delay set D = {-d_min, ..., d_max}; both bounds are
// non-negative, so 0 is always a possible delay.
struct DelaySet {
  int d_min = 0;
  int d_max = 0;

  DelaySet() = default;
  DelaySet(int dmin, int dmax) : d_min(dmin), d_max(dmax) {
    if (d_min < 0 || d_max < 0) throw std::invalid_argument("DelaySet: d_min, d_max must be >= 0");
  }

  int size() const { return d_min + d_max + 1; }
  bool contains(int d) const { return d >= -d_min && d <= d_max; }

  // Ascending: -d_min, ..., d_max.
  std::vector<int> delays() const {
    std::vector<int> ds;
    for (int d = -d_min; d <= d_max; ++d) ds.push_back(d);
    return ds;
  }
};

}  // namespace asyncsi
