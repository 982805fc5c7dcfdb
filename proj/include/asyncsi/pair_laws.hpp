#pragma once

#include <stdexcept>
#include <vector>

#include "asyncsi/aux_dist.hpp"
#include "asyncsi/channel.hpp"
#include "asyncsi/joint_pmf.hpp"

namespace asyncsi {

namespace detail {

inline void check_aux_matches(const StateChannel& ch, const AuxDistribution& aux) {
  if (aux.nx() != ch.nx() || aux.ns() != ch.ns()) {
    throw std::invalid_argument("aux distribution dimensions do not match channel");
  }
}

}  // namespace detail

// p1(u,y) = sum_{a,x} P_S(a) P_{U,X|A}(u,x|a) W(y|x,a): the pair law when the
// observed state symbol is the one actually driving the channel.
inline JointPmf synced_pair_pmf(const StateChannel& ch, const AuxDistribution& aux) {
  detail::check_aux_matches(ch, aux);
  std::vector<double> j(static_cast<std::size_t>(aux.nu()) * ch.ny(), 0.0);
  for (int a = 0; a < ch.ns(); ++a) {
    for (int u = 0; u < aux.nu(); ++u) {
      for (int x = 0; x < ch.nx(); ++x) {
        const double m = ch.state_prior()[a] * aux.p(u, x, a);
        if (m == 0.0) continue;
        for (int y = 0; y < ch.ny(); ++y) {
          j[static_cast<std::size_t>(u) * ch.ny() + y] += m * ch.w(y, x, a);
        }
      }
    }
  }
  return JointPmf({{"U", aux.nu()}, {"Y", ch.ny()}}, std::move(j));
}

// p2(u,y) = sum_{s,a,x} P_A(a) P_{U,X|A}(u,x|a) P_S(s) W(y|x,s): the pair law
// when the channel state is an independent copy (misaligned segments).
inline JointPmf product_pair_pmf(const StateChannel& ch, const AuxDistribution& aux) {
  detail::check_aux_matches(ch, aux);
  const std::vector<double> wbar = ch.averaged();
  std::vector<double> j(static_cast<std::size_t>(aux.nu()) * ch.ny(), 0.0);
  for (int a = 0; a < ch.ns(); ++a) {
    for (int u = 0; u < aux.nu(); ++u) {
      for (int x = 0; x < ch.nx(); ++x) {
        const double m = ch.state_prior()[a] * aux.p(u, x, a);
        if (m == 0.0) continue;
        for (int y = 0; y < ch.ny(); ++y) {
          j[static_cast<std::size_t>(u) * ch.ny() + y] += m * wbar[static_cast<std::size_t>(x) * ch.ny() + y];
        }
      }
    }
  }
  return JointPmf({{"U", aux.nu()}, {"Y", ch.ny()}}, std::move(j));
}

// p_{U,A}(u,a) = P_A(a) sum_x P_{U,X|A}(u,x|a) with P_A = P_S.
inline JointPmf aux_state_pmf(const StateChannel& ch, const AuxDistribution& aux) {
  detail::check_aux_matches(ch, aux);
  std::vector<double> j(static_cast<std::size_t>(aux.nu()) * ch.ns(), 0.0);
  for (int a = 0; a < ch.ns(); ++a) {
    for (int u = 0; u < aux.nu(); ++u) {
      double m = 0.0;
      for (int x = 0; x < ch.nx(); ++x) m += aux.p(u, x, a);
      j[static_cast<std::size_t>(u) * ch.ns() + a] = ch.state_prior()[a] * m;
    }
  }
  return JointPmf({{"U", aux.nu()}, {"A", ch.ns()}}, std::move(j));
}

}  // namespace asyncsi
