#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "asyncsi/acsitr.hpp"
#include "asyncsi/channel.hpp"
#include "asyncsi/errors.hpp"
#include "asyncsi/pmf.hpp"
#include "asyncsi/rng.hpp"
#include "asyncsi/simplex.hpp"
#include "asyncsi/solve_report.hpp"
#include "asyncsi/theorem1.hpp"

namespace asyncsi {

// Optimization variable of the compound-representation rates: a time-sharing
// prior P_T and the conditional P(W, U_1..U_D, X | V, T) over the window
// alphabet V = S^D. Branch k (0-based) transmits through the channel whose
// state is window entry k, i.e. delay -d_min + k under ascending ordering.
class CompoundAuxBundle {
 public:
  CompoundAuxBundle(Pmf p_t, int nw, std::vector<int> nu, int nx, int ns, int window,
                    std::vector<double> theta)
      : p_t_(std::move(p_t)), nw_(nw), nu_(std::move(nu)), nx_(nx), ns_(ns), window_(window),
        theta_(std::move(theta)) {
    if (static_cast<int>(nu_.size()) != window_) {
      throw std::invalid_argument("CompoundAuxBundle: need one |U_k| per window slot");
    }
    if (nw_ <= 0 || nx_ <= 0 || ns_ <= 0 || window_ <= 0) {
      throw std::invalid_argument("CompoundAuxBundle: empty alphabet");
    }
    nv_ = detail::ipow(ns_, window_);
    slice_ = static_cast<std::size_t>(nw_) * nx_;
    for (int k : nu_) {
      if (k <= 0) throw std::invalid_argument("CompoundAuxBundle: empty U alphabet");
      slice_ *= static_cast<std::size_t>(k);
    }
    if (theta_.size() != slice_ * static_cast<std::size_t>(nv_) * p_t_.size()) {
      throw std::invalid_argument("CompoundAuxBundle: tensor size mismatch");
    }
    for (int v = 0; v < nv_; ++v) {
      for (int t = 0; t < p_t_.size(); ++t) {
        const std::size_t off = slice_offset(v, t);
        std::vector<double> s(theta_.begin() + off, theta_.begin() + off + slice_);
        detail::normalize_or_throw(s, "CompoundAuxBundle slice");
        std::copy(s.begin(), s.end(), theta_.begin() + off);
      }
    }
  }

  const Pmf& p_t() const { return p_t_; }
  int nt() const { return p_t_.size(); }
  int nw() const { return nw_; }
  const std::vector<int>& nu() const { return nu_; }
  int nx() const { return nx_; }
  int ns() const { return ns_; }
  int window() const { return window_; }
  int nv() const { return nv_; }
  std::size_t slice_size() const { return slice_; }
  const std::vector<double>& theta() const { return theta_; }

  std::size_t slice_offset(int v, int t) const {
    return (static_cast<std::size_t>(v) * p_t_.size() + t) * slice_;
  }

  // Offset of (w, u_1..u_D, x) within a slice: w slowest, x fastest.
  std::size_t cell_offset(int w, std::span<const int> us, int x) const {
    std::size_t o = static_cast<std::size_t>(w);
    for (int k = 0; k < window_; ++k) o = o * static_cast<std::size_t>(nu_[static_cast<std::size_t>(k)]) + us[static_cast<std::size_t>(k)];
    return o * static_cast<std::size_t>(nx_) + x;
  }

  static CompoundAuxBundle random(int nt, int nw, std::vector<int> nu, int nx, int ns, int window,
                                  Rng& rng) {
    const int nv = detail::ipow(ns, window);
    std::size_t slice = static_cast<std::size_t>(nw) * nx;
    for (int k : nu) slice *= static_cast<std::size_t>(k);
    std::vector<double> theta(slice * static_cast<std::size_t>(nv) * nt);
    for (int v = 0; v < nv; ++v) {
      for (int t = 0; t < nt; ++t) {
        std::span<double> s(theta.data() + (static_cast<std::size_t>(v) * nt + t) * slice, slice);
        sample_simplex(s, rng);
      }
    }
    std::vector<double> pt(static_cast<std::size_t>(nt));
    sample_simplex(pt, rng);
    return CompoundAuxBundle(Pmf(std::move(pt)), nw, std::move(nu), nx, ns, window,
                             std::move(theta));
  }

 private:
  Pmf p_t_;
  int nw_;
  std::vector<int> nu_;
  int nx_, ns_, window_;
  int nv_ = 0;
  std::size_t slice_ = 0;
  std::vector<double> theta_;
};

namespace detail {

// Dense tensor small enough to enumerate; marginal entropies by direct
// accumulation.
struct SmallTensor {
  std::vector<int> sizes;
  std::vector<std::size_t> strides;
  std::vector<double> p;

  void init(std::vector<int> sz) {
    sizes = std::move(sz);
    strides.assign(sizes.size(), 1);
    std::size_t acc = 1;
    for (std::size_t i = sizes.size(); i-- > 0;) {
      strides[i] = acc;
      acc *= static_cast<std::size_t>(sizes[i]);
    }
    p.assign(acc, 0.0);
  }

  std::size_t marginal_size(std::span<const int> keep) const {
    std::size_t m = 1;
    for (int a : keep) m *= static_cast<std::size_t>(sizes[static_cast<std::size_t>(a)]);
    return m;
  }

  void marginal_into(std::span<const int> keep, std::vector<double>& out) const {
    out.assign(marginal_size(keep), 0.0);
    for (std::size_t f = 0; f < p.size(); ++f) {
      if (p[f] == 0.0) continue;
      out[project(f, keep)] += p[f];
    }
  }

  std::size_t project(std::size_t flat, std::span<const int> keep) const {
    std::size_t o = 0;
    for (int a : keep) {
      const std::size_t idx = (flat / strides[static_cast<std::size_t>(a)]) %
                              static_cast<std::size_t>(sizes[static_cast<std::size_t>(a)]);
      o = o * static_cast<std::size_t>(sizes[static_cast<std::size_t>(a)]) + idx;
    }
    return o;
  }

  double marginal_entropy(std::span<const int> keep) const {
    std::vector<double> m;
    marginal_into(keep, m);
    return entropy_of(m);
  }

  // g[cell] += sign * dH(marginal over keep)/dp[cell]
  //          = sign * (-log2(marginal(proj)) - 1/ln2).
  void accumulate_entropy_grad(std::span<const int> keep, double sign,
                               std::vector<double>& g) const {
    constexpr double inv_ln2 = 1.4426950408889634;
    std::vector<double> m;
    marginal_into(keep, m);
    for (std::size_t f = 0; f < p.size(); ++f) {
      const double mv = m[project(f, keep)];
      g[f] += sign * (-std::log2(mv < 1e-300 ? 1e-300 : mv) - inv_ln2);
    }
  }
};

// Joint tensors of the Theorem 2/3 law. Axis ids: T=0, V=1, W=2,
// U_1..U_D = 3..2+D, X = 3+D, and Y = 4+D on the per-branch tensors.
struct BundleJoints {
  SmallTensor base;                     // (T,V,W,U...,X)
  std::vector<SmallTensor> with_y;      // per branch k: (T,V,W,U...,X,Y)

  static BundleJoints build(const StateChannel& ch, const CompoundAuxBundle& b) {
    BundleJoints j;
    std::vector<int> sizes{b.nt(), b.nv(), b.nw()};
    for (int k : b.nu()) sizes.push_back(k);
    sizes.push_back(b.nx());
    j.base.init(sizes);
    sizes.push_back(ch.ny());
    j.with_y.resize(static_cast<std::size_t>(b.window()));
    for (auto& t : j.with_y) t.init(sizes);

    const std::vector<double> pv = product_v_prior(ch.state_prior(), b.window());
    const std::size_t slice = b.slice_size();
    for (int v = 0; v < b.nv(); ++v) {
      for (int t = 0; t < b.nt(); ++t) {
        const double mass = b.p_t()[t] * pv[static_cast<std::size_t>(v)];
        if (mass == 0.0) continue;
        const std::size_t in_off = b.slice_offset(v, t);
        const std::size_t base_off =
            static_cast<std::size_t>(t) * j.base.strides[0] + static_cast<std::size_t>(v) * j.base.strides[1];
        for (std::size_t c = 0; c < slice; ++c) {
          const double val = mass * b.theta()[in_off + c];
          j.base.p[base_off + c] = val;
          if (val == 0.0) continue;
          const int x = static_cast<int>(c % static_cast<std::size_t>(b.nx()));
          for (int k = 0; k < b.window(); ++k) {
            const int s = v_digit(v, b.ns(), b.window(), k);
            SmallTensor& tk = j.with_y[static_cast<std::size_t>(k)];
            const std::size_t y_off = (base_off + c) * static_cast<std::size_t>(ch.ny());
            for (int y = 0; y < ch.ny(); ++y) {
              tk.p[y_off + y] = val * ch.w(y, x, s);
            }
          }
        }
      }
    }
    return j;
  }
};

// I(W,U_k;Y_k|T) - I(W,U_k;V|T) evaluated from the two tensors; the shared
// H(W,U_k,T) and H(T) terms cancel.
inline double branch_expression(const BundleJoints& j, int k, int window) {
  const SmallTensor& jk = j.with_y[static_cast<std::size_t>(k)];
  const int axis_t = 0, axis_v = 1, axis_w = 2;
  const int axis_uk = 3 + k;
  const int axis_y = 4 + window;
  const std::vector<int> yt{axis_y, axis_t};
  const std::vector<int> wuyt{axis_w, axis_uk, axis_y, axis_t};
  const std::vector<int> wuvt{axis_w, axis_uk, axis_v, axis_t};
  const std::vector<int> vt{axis_v, axis_t};
  return jk.marginal_entropy(yt) - jk.marginal_entropy(wuyt) +
         j.base.marginal_entropy(wuvt) - j.base.marginal_entropy(vt);
}

}  // namespace detail

// The three bracketed expressions of the D=2 compound rate and their
// minimum. Expression 3 carries the pairwise redundancy penalty
// I(U_1;U_2|W,V,T).
inline double theorem2_rate_eval(const StateChannel& ch, const CompoundAuxBundle& b) {
  if (b.window() != 2) throw std::invalid_argument("theorem2_rate_eval: needs window D = 2");
  if (b.nx() != ch.nx() || b.ns() != ch.ns()) {
    throw std::invalid_argument("theorem2_rate_eval: bundle does not match channel");
  }
  detail::BundleJoints j = detail::BundleJoints::build(ch, b);
  const double e1 = detail::branch_expression(j, 0, 2);
  const double e2 = detail::branch_expression(j, 1, 2);
  const std::vector<int> u1wvt{3, 2, 1, 0};
  const std::vector<int> u2wvt{4, 2, 1, 0};
  const std::vector<int> u1u2wvt{3, 4, 2, 1, 0};
  const std::vector<int> wvt{2, 1, 0};
  const double i_u1u2 = j.base.marginal_entropy(u1wvt) + j.base.marginal_entropy(u2wvt) -
                        j.base.marginal_entropy(u1u2wvt) - j.base.marginal_entropy(wvt);
  const double e3 = 0.5 * (e1 + e2 - i_u1u2);
  return std::min({e1, e2, e3});
}

// The general-D rate: minimum over all nonempty subsets L of branches of
//   (1/|L|) [ sum_{l in L} I(W,U_l;Y_l|T) - |L| I(W;V|T)
//             + H({U_l}|W,V,T) - sum_{l in L} H(U_l|W,T) ].
inline double theorem3_rate_eval(const StateChannel& ch, const DelaySet& ds,
                                 const CompoundAuxBundle& b) {
  const int D = ds.size();
  if (D > 6) throw GuardError("theorem3_rate_eval: delay window too large (D <= 6)");
  if (b.window() != D) throw std::invalid_argument("theorem3_rate_eval: bundle window mismatch");
  if (b.nx() != ch.nx() || b.ns() != ch.ns()) {
    throw std::invalid_argument("theorem3_rate_eval: bundle does not match channel");
  }
  detail::BundleJoints j = detail::BundleJoints::build(ch, b);

  const int axis_t = 0, axis_v = 1, axis_w = 2;
  const std::vector<int> wt{axis_w, axis_t};
  const std::vector<int> vt{axis_v, axis_t};
  const std::vector<int> wvt{axis_w, axis_v, axis_t};
  const std::vector<int> tt{axis_t};
  const double i_wv = j.base.marginal_entropy(wt) + j.base.marginal_entropy(vt) -
                      j.base.marginal_entropy(wvt) - j.base.marginal_entropy(tt);
  const double h_wvt = j.base.marginal_entropy(wvt);
  const double h_wt = j.base.marginal_entropy(wt);

  std::vector<double> branch_mi(static_cast<std::size_t>(D));
  std::vector<double> h_ul_wt(static_cast<std::size_t>(D));
  for (int l = 0; l < D; ++l) {
    const detail::SmallTensor& jl = j.with_y[static_cast<std::size_t>(l)];
    const int axis_ul = 3 + l;
    const int axis_y = 4 + D;
    const std::vector<int> wult{axis_w, axis_ul, axis_t};
    const std::vector<int> yt{axis_y, axis_t};
    const std::vector<int> wulyt{axis_w, axis_ul, axis_y, axis_t};
    branch_mi[static_cast<std::size_t>(l)] = jl.marginal_entropy(wult) + jl.marginal_entropy(yt) -
                                             jl.marginal_entropy(wulyt) - jl.marginal_entropy(tt);
    const std::vector<int> ulwt{axis_ul, axis_w, axis_t};
    h_ul_wt[static_cast<std::size_t>(l)] = j.base.marginal_entropy(ulwt) - h_wt;
  }

  double best = std::numeric_limits<double>::infinity();
  for (int mask = 1; mask < (1 << D); ++mask) {
    std::vector<int> subset_axes;
    double sum_mi = 0.0, sum_hul = 0.0;
    int size = 0;
    for (int l = 0; l < D; ++l) {
      if (mask & (1 << l)) {
        subset_axes.push_back(3 + l);
        sum_mi += branch_mi[static_cast<std::size_t>(l)];
        sum_hul += h_ul_wt[static_cast<std::size_t>(l)];
        ++size;
      }
    }
    std::vector<int> joint_axes = subset_axes;
    joint_axes.push_back(axis_w);
    joint_axes.push_back(axis_v);
    joint_axes.push_back(axis_t);
    const double h_joint = j.base.marginal_entropy(joint_axes) - h_wvt;
    const double value = (sum_mi - size * i_wv + h_joint - sum_hul) / size;
    best = std::min(best, value);
  }
  return best;
}

struct BundleCardinalities {
  int nt = 1;
  int nw = 2;
  std::vector<int> nu{2, 2};
};

namespace detail {

// Softmin-annealed multi-start ascent for the D=2 search. The three
// expressions share the linear map theta -> joints, so each gradient is a
// pullback of per-tensor dH/dJ accumulations; softmin weights mix them.
class Theorem2Machine {
 public:
  Theorem2Machine(const StateChannel& ch, const BundleCardinalities& cards)
      : ch_(&ch), cards_(cards) {
    if (static_cast<int>(cards_.nu.size()) != 2) {
      throw std::invalid_argument("theorem2 search: need |U_1|, |U_2|");
    }
    nv_ = ipow(ch.ns(), 2);
    slice_ = static_cast<std::size_t>(cards_.nw) * cards_.nu[0] * cards_.nu[1] * ch.nx();
  }

  std::vector<int> blocks() const {
    // One simplex per (v,t) slice; p_t fixed (uniform) unless nt == 1.
    return std::vector<int>(static_cast<std::size_t>(nv_) * cards_.nt,
                            static_cast<int>(slice_));
  }

  CompoundAuxBundle to_bundle(std::span<const double> q) const {
    return CompoundAuxBundle(Pmf::uniform(cards_.nt), cards_.nw, cards_.nu, ch_->nx(), ch_->ns(),
                             2, std::vector<double>(q.begin(), q.end()));
  }

  void expressions(std::span<const double> q, double out[3]) const {
    CompoundAuxBundle b = to_bundle(q);
    BundleJoints j = BundleJoints::build(*ch_, b);
    out[0] = branch_expression(j, 0, 2);
    out[1] = branch_expression(j, 1, 2);
    const std::vector<int> u1wvt{3, 2, 1, 0};
    const std::vector<int> u2wvt{4, 2, 1, 0};
    const std::vector<int> u1u2wvt{3, 4, 2, 1, 0};
    const std::vector<int> wvt{2, 1, 0};
    const double i_u1u2 = j.base.marginal_entropy(u1wvt) + j.base.marginal_entropy(u2wvt) -
                          j.base.marginal_entropy(u1u2wvt) - j.base.marginal_entropy(wvt);
    out[2] = 0.5 * (out[0] + out[1] - i_u1u2);
  }

  double hard_min(std::span<const double> q) const {
    double e[3];
    expressions(q, e);
    return std::min({e[0], e[1], e[2]});
  }

  double softmin_grad(std::span<const double> q, double tau, std::span<double> grad) const {
    CompoundAuxBundle b = to_bundle(q);
    BundleJoints j = BundleJoints::build(*ch_, b);

    double e[3];
    e[0] = branch_expression(j, 0, 2);
    e[1] = branch_expression(j, 1, 2);
    const std::vector<int> u1wvt{3, 2, 1, 0};
    const std::vector<int> u2wvt{4, 2, 1, 0};
    const std::vector<int> u1u2wvt{3, 4, 2, 1, 0};
    const std::vector<int> wvt{2, 1, 0};
    const double i_u1u2 = j.base.marginal_entropy(u1wvt) + j.base.marginal_entropy(u2wvt) -
                          j.base.marginal_entropy(u1u2wvt) - j.base.marginal_entropy(wvt);
    e[2] = 0.5 * (e[0] + e[1] - i_u1u2);

    const double emin = std::min({e[0], e[1], e[2]});
    double wsum = 0.0;
    double wts[3];
    for (int i = 0; i < 3; ++i) {
      wts[i] = std::exp(-(e[i] - emin) / tau);
      wsum += wts[i];
    }
    for (double& w : wts) w /= wsum;
    const double softmin = emin - tau * std::log(wsum);

    // Per-expression weights on the branch terms and the redundancy term.
    // E1 and E2 also appear inside E3 with coefficient 1/2.
    const double c_branch[2] = {wts[0] + 0.5 * wts[2], wts[1] + 0.5 * wts[2]};
    const double c_redund = -0.5 * wts[2];

    std::vector<double> g_base(j.base.p.size(), 0.0);
    std::vector<std::vector<double>> g_y(2);
    const std::vector<int> vt{1, 0};
    for (int k = 0; k < 2; ++k) {
      const SmallTensor& jk = j.with_y[static_cast<std::size_t>(k)];
      g_y[static_cast<std::size_t>(k)].assign(jk.p.size(), 0.0);
      const int axis_uk = 3 + k;
      const std::vector<int> yt{6, 0};
      const std::vector<int> wuyt{2, axis_uk, 6, 0};
      const std::vector<int> wuvt{2, axis_uk, 1, 0};
      jk.accumulate_entropy_grad(yt, c_branch[k], g_y[static_cast<std::size_t>(k)]);
      jk.accumulate_entropy_grad(wuyt, -c_branch[k], g_y[static_cast<std::size_t>(k)]);
      j.base.accumulate_entropy_grad(wuvt, c_branch[k], g_base);
      j.base.accumulate_entropy_grad(vt, -c_branch[k], g_base);
    }
    j.base.accumulate_entropy_grad(u1wvt, c_redund, g_base);
    j.base.accumulate_entropy_grad(u2wvt, c_redund, g_base);
    j.base.accumulate_entropy_grad(u1u2wvt, -c_redund, g_base);
    j.base.accumulate_entropy_grad(wvt, -c_redund, g_base);

    // Pull back to the theta slices: dJ0/dtheta = P_T P_V, and the Y tensors
    // add sum_y W(y|x, v_k) of their accumulated gradients.
    const std::vector<double> pv = product_v_prior(ch_->state_prior(), 2);
    const int nt = cards_.nt;
    const int ny = ch_->ny();
    for (int v = 0; v < nv_; ++v) {
      for (int t = 0; t < nt; ++t) {
        const double mass = (1.0 / nt) * pv[static_cast<std::size_t>(v)];
        const std::size_t base_off = static_cast<std::size_t>(t) * j.base.strides[0] +
                                     static_cast<std::size_t>(v) * j.base.strides[1];
        const std::size_t q_off = (static_cast<std::size_t>(v) * nt + t) * slice_;
        for (std::size_t c = 0; c < slice_; ++c) {
          double g = g_base[base_off + c];
          const int x = static_cast<int>(c % static_cast<std::size_t>(ch_->nx()));
          for (int k = 0; k < 2; ++k) {
            const int s = v_digit(v, ch_->ns(), 2, k);
            const std::size_t y_off = (base_off + c) * static_cast<std::size_t>(ny);
            for (int y = 0; y < ny; ++y) {
              g += ch_->w(y, x, s) * g_y[static_cast<std::size_t>(k)][y_off + y];
            }
          }
          grad[q_off + c] = mass * g;
        }
      }
    }
    return softmin;
  }

 private:
  const StateChannel* ch_;
  BundleCardinalities cards_;
  int nv_ = 0;
  std::size_t slice_ = 0;
};

}  // namespace detail

// Heuristic multi-start search of the D=2 compound rate: softmin-annealed
// projected ascent. The search makes no global-optimality claim; the method
// tag says so and the reported value is the exact hard minimum at the
// returned bundle.
inline SolveReport theorem2_rate_search(const StateChannel& ch, const BundleCardinalities& cards,
                                        const SearchConfig& cfg = {}) {
  if (cards.nt != 1) {
    // P_T enters the entropies as a fixed uniform block; no principled
    // cardinality bound exists for |T|, so the search keeps it degenerate.
    throw std::invalid_argument("theorem2_rate_search: only |T| = 1 searches are supported");
  }
  detail::Theorem2Machine machine(ch, cards);
  const std::vector<int> blocks = machine.blocks();
  std::size_t dim = 0;
  for (int b : blocks) dim += static_cast<std::size_t>(b);

  const double taus[] = {0.3, 0.1, 0.03, 0.01};
  std::vector<AscentResult> results(static_cast<std::size_t>(cfg.ascent.starts));
  std::vector<std::vector<double>> starts(static_cast<std::size_t>(cfg.ascent.starts));
  for (int k = 0; k < cfg.ascent.starts; ++k) {
    Rng rng = Rng::derived(cfg.ascent.seed, {0x5437u, static_cast<std::uint64_t>(k)});
    std::vector<double> p(dim);
    std::size_t off = 0;
    for (int b : blocks) {
      sample_simplex(std::span<double>(p.data() + off, static_cast<std::size_t>(b)), rng);
      off += static_cast<std::size_t>(b);
    }
    starts[static_cast<std::size_t>(k)] = std::move(p);
  }

  auto run_start = [&](std::vector<double> point) {
    AscentResult r;
    long iters = 0;
    for (double tau : taus) {
      BlockObjective obj = [&machine, tau](std::span<const double> q, std::span<double> g) {
        return machine.softmin_grad(q, tau, g);
      };
      r = detail::ascend_from(obj, blocks, std::move(point), cfg.ascent.max_iters / 4,
                              cfg.ascent.value_tol, cfg.ascent.stall_limit);
      point = r.point;
      iters += r.iterations;
    }
    r.iterations = iters;
    r.value = machine.hard_min(r.point);
    return r;
  };

  {
    const int threads = std::min<int>(cfg.ascent.threads > 0 ? cfg.ascent.threads : default_thread_count(),
                                      std::max(1, cfg.ascent.starts));
    std::vector<std::thread> pool;
    std::mutex m;
    std::size_t next = 0;
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&]() {
        for (;;) {
          std::size_t i;
          {
            std::lock_guard<std::mutex> lk(m);
            if (next >= starts.size()) return;
            i = next++;
          }
          results[i] = run_start(std::move(starts[i]));
        }
      });
    }
    for (auto& th : pool) th.join();
  }

  SolveReport report;
  report.method = "theorem2-softmin-multistart (heuristic, no optimality claim)";
  double best = -1e300;
  for (const auto& r : results) {
    report.iterations += r.iterations;
    if (r.value > best) {
      best = r.value;
      report.argument = r.point;
    }
  }
  CompoundAuxBundle arg = machine.to_bundle(report.argument);
  report.value = theorem2_rate_eval(ch, arg);
  report.converged = true;
  report.argument_shape = "p(w,u1,u2,x|v,t) nt=1 nw=" + std::to_string(cards.nw) + " nu1=" +
                          std::to_string(cards.nu[0]) + " nu2=" + std::to_string(cards.nu[1]);
  return report;
}

}  // namespace asyncsi
