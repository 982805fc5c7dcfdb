#pragma once

#include <stdexcept>
#include <vector>

#include "asyncsi/pmf.hpp"
#include "asyncsi/rng.hpp"

namespace asyncsi {

// The Gel'fand-Pinsker optimization variable P_{U,X|A}: one distribution
// over (U, X) per observed state symbol a. The auxiliary cardinality is
// capped at |X|*|S|, which is sufficient for the synchronous capacity.
class AuxDistribution {
 public:
  // `p` layout: p[(a*nu + u)*nx + x], each a-slice summing to 1.
  AuxDistribution(int nu, int nx, int ns, std::vector<double> p)
      : nu_(nu), nx_(nx), ns_(ns), p_(std::move(p)) {
    if (nu_ <= 0 || nx_ <= 0 || ns_ <= 0) throw std::invalid_argument("AuxDistribution: empty alphabet");
    if (nu_ > nx_ * ns_) {
      throw std::invalid_argument("AuxDistribution: |U| exceeds |X|*|S| cardinality bound");
    }
    if (p_.size() != static_cast<std::size_t>(ns_) * nu_ * nx_) {
      throw std::invalid_argument("AuxDistribution: tensor size mismatch");
    }
    for (int a = 0; a < ns_; ++a) {
      std::vector<double> slice(p_.begin() + slice_offset(a), p_.begin() + slice_offset(a) + slice_size());
      detail::normalize_or_throw(slice, "AuxDistribution slice");
      std::copy(slice.begin(), slice.end(), p_.begin() + slice_offset(a));
    }
  }

  int nu() const { return nu_; }
  int nx() const { return nx_; }
  int ns() const { return ns_; }

  double p(int u, int x, int a) const {
    return p_[slice_offset(a) + static_cast<std::size_t>(u) * nx_ + x];
  }

  const std::vector<double>& flat() const { return p_; }

  // U uniform and independent of A, X = f(U) deterministic; the "ignore the
  // side information" embedding used in ordering tests.
  static AuxDistribution identity_ignoring_state(int nx, int ns, const std::vector<double>& px) {
    const int nu = nx;
    std::vector<double> p(static_cast<std::size_t>(ns) * nu * nx, 0.0);
    for (int a = 0; a < ns; ++a) {
      for (int u = 0; u < nu; ++u) {
        p[(static_cast<std::size_t>(a) * nu + u) * nx + u] = px[static_cast<std::size_t>(u)];
      }
    }
    return AuxDistribution(nu, nx, ns, std::move(p));
  }

  // Dirichlet(1) slices: uniform random point of each a-simplex.
  static AuxDistribution random(int nu, int nx, int ns, Rng& rng) {
    std::vector<double> p(static_cast<std::size_t>(ns) * nu * nx);
    const std::size_t slice = static_cast<std::size_t>(nu) * nx;
    for (int a = 0; a < ns; ++a) {
      double sum = 0.0;
      for (std::size_t i = 0; i < slice; ++i) {
        double e = -std::log(1.0 - rng.next_double());
        p[static_cast<std::size_t>(a) * slice + i] = e;
        sum += e;
      }
      for (std::size_t i = 0; i < slice; ++i) p[static_cast<std::size_t>(a) * slice + i] /= sum;
    }
    return AuxDistribution(nu, nx, ns, std::move(p));
  }

 private:
  std::size_t slice_offset(int a) const { return static_cast<std::size_t>(a) * slice_size(); }
  std::size_t slice_size() const { return static_cast<std::size_t>(nu_) * nx_; }

  int nu_, nx_, ns_;
  std::vector<double> p_;
};

}  // namespace asyncsi
