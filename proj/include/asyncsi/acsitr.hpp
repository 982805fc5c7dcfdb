#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "asyncsi/channel.hpp"
#include "asyncsi/maximin.hpp"
#include "asyncsi/pmf.hpp"
#include "asyncsi/solve_report.hpp"

namespace asyncsi {

// Encoding strategy P(x|v) over the state window alphabet V = S^D.
struct StrategyPmf {
  int nv = 0;
  int nx = 0;
  std::vector<double> p;  // [v][x], each v-slice summing to 1

  StrategyPmf() = default;
  StrategyPmf(int nv_, int nx_, std::vector<double> p_) : nv(nv_), nx(nx_), p(std::move(p_)) {
    if (p.size() != static_cast<std::size_t>(nv) * nx) {
      throw std::invalid_argument("StrategyPmf: tensor size mismatch");
    }
    for (int v = 0; v < nv; ++v) {
      std::vector<double> slice(p.begin() + static_cast<std::size_t>(v) * nx,
                                p.begin() + static_cast<std::size_t>(v + 1) * nx);
      detail::normalize_or_throw(slice, "StrategyPmf slice");
      std::copy(slice.begin(), slice.end(), p.begin() + static_cast<std::size_t>(v) * nx);
    }
  }

  static StrategyPmf uniform(int nv, int nx) {
    return StrategyPmf(nv, nx, std::vector<double>(static_cast<std::size_t>(nv) * nx, 1.0 / nx));
  }

  double at(int v, int x) const { return p[static_cast<std::size_t>(v) * nx + x]; }
};

namespace detail {

inline int ipow(int base, int exp) {
  int r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

// Window symbol of v (flat mixed-radix index, first entry most significant)
// at 0-based position `pos`.
inline int v_digit(int v_flat, int ns, int window, int pos) {
  const int shift = window - 1 - pos;
  return (v_flat / ipow(ns, shift)) % ns;
}

// Product prior P_V(v) = prod_l P_S(v_l).
inline std::vector<double> product_v_prior(const Pmf& ps, int window) {
  const int nv = ipow(ps.size(), window);
  std::vector<double> prior(static_cast<std::size_t>(nv), 1.0);
  for (int v = 0; v < nv; ++v) {
    for (int k = 0; k < window; ++k) prior[static_cast<std::size_t>(v)] *= ps[v_digit(v, ps.size(), window, k)];
  }
  return prior;
}

inline MaximinProblem acsitr_problem(const StateChannel& ch, const DelaySet& ds) {
  const int window = ds.size();
  const int nv = ipow(ch.ns(), window);
  MaximinProblem prob;
  prob.branches = ds.size();
  prob.nv = nv;
  prob.nx = ch.nx();
  prob.ny = ch.ny();
  prob.v_prior = product_v_prior(ch.state_prior(), window);
  prob.w.resize(static_cast<std::size_t>(prob.branches) * nv * ch.nx() * ch.ny());
  const std::vector<int> delays = ds.delays();
  for (int k = 0; k < prob.branches; ++k) {
    const int pos = ds.d_max - delays[static_cast<std::size_t>(k)];  // window slot holding s_{i-d}
    for (int v = 0; v < nv; ++v) {
      const int s = v_digit(v, ch.ns(), window, pos);
      for (int x = 0; x < ch.nx(); ++x) {
        for (int y = 0; y < ch.ny(); ++y) {
          prob.w[((static_cast<std::size_t>(k) * nv + v) * ch.nx() + x) * ch.ny() + y] = ch.w(y, x, s);
        }
      }
    }
  }
  return prob;
}

}  // namespace detail

// I_d(X;Y|V) = sum_v P(v) sum_{x,y} P_d(x,y|v) log( P_d(x,y|v) /
// (P(x|v) P_d(y|v)) ) with P_d(x,y|v) = P(x|v) W(y|x, v_{dmax-d}) and the
// product prior on V.
inline double acsitr_objective(const StateChannel& ch, const DelaySet& ds, const StrategyPmf& strat,
                               int d) {
  if (!ds.contains(d)) throw std::invalid_argument("acsitr_objective: d not in delay set");
  const int window = ds.size();
  const int nv = detail::ipow(ch.ns(), window);
  if (strat.nv != nv || strat.nx != ch.nx()) {
    throw std::invalid_argument("acsitr_objective: strategy dimensions do not match");
  }
  const std::vector<double> prior = detail::product_v_prior(ch.state_prior(), window);
  const int pos = ds.d_max - d;
  double total = 0.0;
  for (int v = 0; v < nv; ++v) {
    if (prior[static_cast<std::size_t>(v)] == 0.0) continue;
    const int s = detail::v_digit(v, ch.ns(), window, pos);
    std::vector<double> py(static_cast<std::size_t>(ch.ny()), 0.0);
    for (int x = 0; x < ch.nx(); ++x) {
      for (int y = 0; y < ch.ny(); ++y) py[static_cast<std::size_t>(y)] += strat.at(v, x) * ch.w(y, x, s);
    }
    double mi = 0.0;
    for (int x = 0; x < ch.nx(); ++x) {
      const double px = strat.at(v, x);
      if (px == 0.0) continue;
      for (int y = 0; y < ch.ny(); ++y) {
        const double joint = px * ch.w(y, x, s);
        if (joint > 0.0) mi += joint * std::log2(joint / (px * py[static_cast<std::size_t>(y)]));
      }
    }
    total += prior[static_cast<std::size_t>(v)] * mi;
  }
  return total;
}

// C_ACSITR = max_{P(x|v)} min_{d in D} I_d(X;Y|V), solved as a concave
// maximin with a primal-dual gap certificate.
inline SolveReport acsitr_capacity(const StateChannel& ch, const DelaySet& ds,
                                   const MaximinConfig& cfg = {}) {
  MaximinProblem prob = detail::acsitr_problem(ch, ds);
  SolveReport r = solve_maximin(prob, cfg);
  r.method = "acsitr-" + r.method;
  r.argument_shape = "p(x|v) window=" + std::to_string(ds.size()) + " nv=" + std::to_string(prob.nv) +
                     " nx=" + std::to_string(ch.nx());
  return r;
}

inline StrategyPmf strategy_from_report(const StateChannel& ch, const DelaySet& ds,
                                        const SolveReport& r) {
  const int nv = detail::ipow(ch.ns(), ds.size());
  return StrategyPmf(nv, ch.nx(), r.argument);
}

// State-dependent compound channel: same maximin with channels in place of
// delays and the bare state in place of the window.
inline SolveReport compound_capacity(const std::vector<StateChannel>& channels,
                                     const MaximinConfig& cfg = {}) {
  if (channels.empty()) throw std::invalid_argument("compound_capacity: empty channel set");
  const StateChannel& first = channels.front();
  for (const StateChannel& ch : channels) {
    if (ch.nx() != first.nx() || ch.ns() != first.ns() || ch.ny() != first.ny()) {
      throw std::invalid_argument("compound_capacity: inconsistent alphabets");
    }
    for (int s = 0; s < first.ns(); ++s) {
      if (std::abs(ch.state_prior()[s] - first.state_prior()[s]) > 1e-12) {
        throw std::invalid_argument("compound_capacity: channels must share the state prior");
      }
    }
  }
  MaximinProblem prob;
  prob.branches = static_cast<int>(channels.size());
  prob.nv = first.ns();
  prob.nx = first.nx();
  prob.ny = first.ny();
  prob.v_prior = first.state_prior().probs();
  prob.w.resize(static_cast<std::size_t>(prob.branches) * prob.nv * prob.nx * prob.ny);
  for (int k = 0; k < prob.branches; ++k) {
    for (int s = 0; s < prob.nv; ++s) {
      for (int x = 0; x < prob.nx; ++x) {
        for (int y = 0; y < prob.ny; ++y) {
          prob.w[((static_cast<std::size_t>(k) * prob.nv + s) * prob.nx + x) * prob.ny + y] =
              channels[static_cast<std::size_t>(k)].w(y, x, s);
        }
      }
    }
  }
  SolveReport r = solve_maximin(prob, cfg);
  r.method = "compound-" + r.method;
  return r;
}

}  // namespace asyncsi
