#pragma once

#include <algorithm>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "asyncsi/pmf.hpp"

namespace asyncsi {

struct Axis {
  std::string name;
  int size = 0;
};

namespace detail {

// Row-major strides for a list of axis sizes.
inline std::vector<std::size_t> strides_for(std::span<const Axis> axes) {
  std::vector<std::size_t> st(axes.size());
  std::size_t acc = 1;
  for (std::size_t i = axes.size(); i-- > 0;) {
    st[i] = acc;
    acc *= static_cast<std::size_t>(axes[i].size);
  }
  return st;
}

inline std::size_t cell_count(std::span<const Axis> axes) {
  std::size_t n = 1;
  for (const Axis& a : axes) n *= static_cast<std::size_t>(a.size);
  return n;
}

}  // namespace detail

// Dense labeled probability tensor over a product of finite alphabets.
// Storage is row-major in axis order. Immutable after construction.
class JointPmf {
 public:
  JointPmf(std::vector<Axis> axes, std::vector<double> probs)
      : axes_(std::move(axes)), probs_(std::move(probs)) {
    if (axes_.empty()) throw std::invalid_argument("JointPmf: no axes");
    for (const Axis& a : axes_) {
      if (a.size <= 0) throw std::invalid_argument("JointPmf: axis '" + a.name + "' empty");
    }
    if (probs_.size() != detail::cell_count(axes_)) {
      throw std::invalid_argument("JointPmf: entry count does not match axis sizes");
    }
    detail::normalize_or_throw(probs_, "JointPmf");
    strides_ = detail::strides_for(axes_);
  }

  int rank() const { return static_cast<int>(axes_.size()); }
  const std::vector<Axis>& axes() const { return axes_; }
  const std::vector<double>& probs() const { return probs_; }

  double at(std::span<const int> idx) const {
    return probs_[flat_index(idx)];
  }

  std::size_t flat_index(std::span<const int> idx) const {
    if (idx.size() != axes_.size()) throw std::invalid_argument("JointPmf: index rank mismatch");
    std::size_t f = 0;
    for (std::size_t i = 0; i < idx.size(); ++i) {
      if (idx[i] < 0 || idx[i] >= axes_[i].size) {
        throw std::invalid_argument("JointPmf: index out of range on axis '" + axes_[i].name + "'");
      }
      f += static_cast<std::size_t>(idx[i]) * strides_[i];
    }
    return f;
  }

  void unflatten(std::size_t flat, std::span<int> idx) const {
    for (std::size_t i = 0; i < axes_.size(); ++i) {
      idx[i] = static_cast<int>(flat / strides_[i]);
      flat %= strides_[i];
    }
  }

 private:
  std::vector<Axis> axes_;
  std::vector<double> probs_;
  std::vector<std::size_t> strides_;
};

// Marginal onto `keep` (axis indices, in the requested output order).
inline JointPmf marginalize(const JointPmf& j, std::span<const int> keep) {
  if (keep.empty()) throw std::invalid_argument("marginalize: must keep at least one axis");
  std::vector<Axis> out_axes;
  for (int k : keep) {
    if (k < 0 || k >= j.rank()) throw std::invalid_argument("marginalize: bad axis index");
    out_axes.push_back(j.axes()[static_cast<std::size_t>(k)]);
  }
  std::vector<std::size_t> out_strides = detail::strides_for(out_axes);
  std::vector<double> out(detail::cell_count(out_axes), 0.0);
  std::vector<int> idx(static_cast<std::size_t>(j.rank()));
  for (std::size_t f = 0; f < j.probs().size(); ++f) {
    j.unflatten(f, idx);
    std::size_t of = 0;
    for (std::size_t i = 0; i < keep.size(); ++i) {
      of += static_cast<std::size_t>(idx[static_cast<std::size_t>(keep[i])]) * out_strides[i];
    }
    out[of] += j.probs()[f];
  }
  return JointPmf(std::move(out_axes), std::move(out));
}

inline JointPmf marginalize(const JointPmf& j, std::initializer_list<int> keep) {
  return marginalize(j, std::span<const int>(keep.begin(), keep.size()));
}

// Conditional distribution of the remaining axes given axis == value.
// Conditioning on a zero-probability event is an error.
inline JointPmf condition(const JointPmf& j, int axis, int value) {
  if (axis < 0 || axis >= j.rank()) throw std::invalid_argument("condition: bad axis");
  if (j.rank() < 2) throw std::invalid_argument("condition: nothing left to condition on");
  std::vector<Axis> out_axes;
  std::vector<int> rest;
  for (int i = 0; i < j.rank(); ++i) {
    if (i != axis) {
      out_axes.push_back(j.axes()[static_cast<std::size_t>(i)]);
      rest.push_back(i);
    }
  }
  std::vector<std::size_t> out_strides = detail::strides_for(out_axes);
  std::vector<double> out(detail::cell_count(out_axes), 0.0);
  std::vector<int> idx(static_cast<std::size_t>(j.rank()));
  double mass = 0.0;
  for (std::size_t f = 0; f < j.probs().size(); ++f) {
    j.unflatten(f, idx);
    if (idx[static_cast<std::size_t>(axis)] != value) continue;
    std::size_t of = 0;
    for (std::size_t i = 0; i < rest.size(); ++i) {
      of += static_cast<std::size_t>(idx[static_cast<std::size_t>(rest[i])]) * out_strides[i];
    }
    out[of] += j.probs()[f];
    mass += j.probs()[f];
  }
  if (mass <= 0.0) throw std::invalid_argument("condition: zero-probability event");
  for (double& v : out) v /= mass;
  return JointPmf(std::move(out_axes), std::move(out));
}

// Entropy of the whole tensor, in bits.
inline double entropy(const JointPmf& j) { return entropy_of(j.probs()); }

namespace detail {

// Entropy of the marginal over a subset of axes, without materializing it.
inline double marginal_entropy(const JointPmf& j, std::span<const int> axes_subset) {
  if (axes_subset.empty()) return 0.0;
  JointPmf m = marginalize(j, axes_subset);
  return entropy_of(m.probs());
}

}  // namespace detail

// I(X;Y) for a rank-2 joint, in bits.
inline double mutual_information(const JointPmf& j) {
  if (j.rank() != 2) throw std::invalid_argument("mutual_information: needs exactly 2 axes");
  int a0[] = {0};
  int a1[] = {1};
  return detail::marginal_entropy(j, a0) + detail::marginal_entropy(j, a1) - entropy(j);
}

// I(X;Y|Z) for a rank-3 joint over (X, Y, Z), conditioning on the last axis.
// Equals H(X,Z) + H(Y,Z) - H(X,Y,Z) - H(Z); the 0 log(0/q) convention is
// inherited from plog2p.
inline double conditional_mutual_information(const JointPmf& j) {
  if (j.rank() != 3) throw std::invalid_argument("conditional_mutual_information: needs 3 axes");
  int xz[] = {0, 2};
  int yz[] = {1, 2};
  int z[] = {2};
  return detail::marginal_entropy(j, xz) + detail::marginal_entropy(j, yz) -
         entropy(j) - detail::marginal_entropy(j, z);
}

}  // namespace asyncsi
