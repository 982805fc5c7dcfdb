#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "asyncsi/solve_report.hpp"

namespace asyncsi {

// max over strategies p(x|v) of min over branches k of
//   I_k(X;Y|V) = sum_v P(v) I(p_v, W_kv),
// the common core of the two-sided-side-information capacity (branches are
// delays) and the compound capacity (branches are channels).
struct MaximinProblem {
  int branches = 0;
  int nv = 0;
  int nx = 0;
  int ny = 0;
  std::vector<double> v_prior;  // size nv
  std::vector<double> w;        // w[((k*nv + v)*nx + x)*ny + y]

  double wkv(int k, int v, int x, int y) const {
    return w[((static_cast<std::size_t>(k) * nv + v) * nx + x) * ny + y];
  }
};

struct MaximinConfig {
  int max_outer = 20000;
  double target_gap = 1e-6;
  double inner_tol = 1e-13;
  long inner_max_iters = 50000;
};

namespace detail {

// I(p, W) in bits for one |X| x |Y| channel.
inline double channel_mi(std::span<const double> p, const double* w, int nx, int ny) {
  std::vector<double> q(static_cast<std::size_t>(ny), 0.0);
  for (int x = 0; x < nx; ++x) {
    for (int y = 0; y < ny; ++y) q[static_cast<std::size_t>(y)] += p[static_cast<std::size_t>(x)] * w[x * ny + y];
  }
  double mi = 0.0;
  for (int x = 0; x < nx; ++x) {
    if (p[static_cast<std::size_t>(x)] == 0.0) continue;
    for (int y = 0; y < ny; ++y) {
      const double wv = w[x * ny + y];
      if (wv > 0.0 && q[static_cast<std::size_t>(y)] > 0.0) {
        mi += p[static_cast<std::size_t>(x)] * wv * std::log2(wv / q[static_cast<std::size_t>(y)]);
      }
    }
  }
  return mi;
}

struct InnerSolution {
  std::vector<double> strat;          // p(x|v), [v][x]
  double weighted_value = 0.0;        // sum_k lambda_k I_k at strat (bits)
  double upper_bound = 0.0;           // valid upper bound on max_p sum_k lambda_k I_k
  std::vector<double> branch_values;  // I_k at strat
  long iterations = 0;
};

// Exact inner maximization of sum_k lambda_k I_k over p(x|v). Separable per
// v; each block is a weighted-sum Blahut-Arimoto iteration
//   p'(x) ∝ p(x) exp(sum_k lambda_k D(W_k(.|x) || q_k))
// whose fixed point is the concave maximum. The running
// max_x sum_k lambda_k D(W_k(.|x)||q_k) is a valid upper bound at every
// iterate, so the returned gap certificate is sound even at the iteration cap.
inline InnerSolution inner_weighted_max(const MaximinProblem& prob, std::span<const double> lambda,
                                        const MaximinConfig& cfg) {
  const int K = prob.branches, nx = prob.nx, ny = prob.ny;
  InnerSolution sol;
  sol.strat.assign(static_cast<std::size_t>(prob.nv) * nx, 0.0);
  sol.upper_bound = 0.0;
  std::vector<double> p(static_cast<std::size_t>(nx));
  std::vector<double> q(static_cast<std::size_t>(K) * ny);
  std::vector<double> r(static_cast<std::size_t>(nx));
  for (int v = 0; v < prob.nv; ++v) {
    if (prob.v_prior[static_cast<std::size_t>(v)] == 0.0) {
      for (int x = 0; x < nx; ++x) sol.strat[static_cast<std::size_t>(v) * nx + x] = 1.0 / nx;
      continue;
    }
    for (int x = 0; x < nx; ++x) p[static_cast<std::size_t>(x)] = 1.0 / nx;
    double ub = std::numeric_limits<double>::infinity();
    double lb = -std::numeric_limits<double>::infinity();
    for (long it = 0; it < cfg.inner_max_iters; ++it) {
      ++sol.iterations;
      std::fill(q.begin(), q.end(), 0.0);
      for (int k = 0; k < K; ++k) {
        for (int x = 0; x < nx; ++x) {
          const double px = p[static_cast<std::size_t>(x)];
          if (px == 0.0) continue;
          for (int y = 0; y < ny; ++y) {
            q[static_cast<std::size_t>(k) * ny + y] += px * prob.wkv(k, v, x, y);
          }
        }
      }
      double max_r = -std::numeric_limits<double>::infinity();
      double value = 0.0;
      for (int x = 0; x < nx; ++x) {
        double rx = 0.0;  // nats
        for (int k = 0; k < K; ++k) {
          if (lambda[static_cast<std::size_t>(k)] == 0.0) continue;
          double dk = 0.0;
          for (int y = 0; y < ny; ++y) {
            const double wv = prob.wkv(k, v, x, y);
            if (wv > 0.0) {
              const double qy = q[static_cast<std::size_t>(k) * ny + y];
              dk += wv * std::log(wv / (qy > 0.0 ? qy : 1e-300));
            }
          }
          rx += lambda[static_cast<std::size_t>(k)] * dk;
        }
        r[static_cast<std::size_t>(x)] = rx;
        if (rx > max_r) max_r = rx;
        value += p[static_cast<std::size_t>(x)] * rx;
      }
      ub = std::min(ub, max_r);
      lb = value;
      if (ub - lb < cfg.inner_tol * std::log(2.0)) break;
      double norm = 0.0;
      for (int x = 0; x < nx; ++x) {
        p[static_cast<std::size_t>(x)] *= std::exp(r[static_cast<std::size_t>(x)] - max_r);
        norm += p[static_cast<std::size_t>(x)];
      }
      for (int x = 0; x < nx; ++x) p[static_cast<std::size_t>(x)] /= norm;
    }
    const double pv = prob.v_prior[static_cast<std::size_t>(v)];
    sol.upper_bound += pv * ub / std::log(2.0);
    for (int x = 0; x < nx; ++x) sol.strat[static_cast<std::size_t>(v) * nx + x] = p[static_cast<std::size_t>(x)];
  }
  sol.branch_values.assign(static_cast<std::size_t>(K), 0.0);
  for (int k = 0; k < K; ++k) {
    double ik = 0.0;
    for (int v = 0; v < prob.nv; ++v) {
      const double pv = prob.v_prior[static_cast<std::size_t>(v)];
      if (pv == 0.0) continue;
      ik += pv * channel_mi(std::span<const double>(sol.strat).subspan(
                                static_cast<std::size_t>(v) * nx, static_cast<std::size_t>(nx)),
                            &prob.w[((static_cast<std::size_t>(k) * prob.nv + v) * nx) * ny], nx, ny);
    }
    sol.branch_values[static_cast<std::size_t>(k)] = ik;
  }
  sol.weighted_value = 0.0;
  for (int k = 0; k < K; ++k) sol.weighted_value += lambda[static_cast<std::size_t>(k)] * sol.branch_values[static_cast<std::size_t>(k)];
  return sol;
}

// min_lambda U(lambda) over the weight simplex by nested ternary search;
// U is convex, so this is exact for the small branch counts used here.
inline double refine_dual_ternary(const MaximinProblem& prob, const MaximinConfig& cfg,
                                  std::vector<double>& lambda, int coord, double remaining,
                                  int depth_budget) {
  const int K = prob.branches;
  if (coord == K - 1) {
    lambda[static_cast<std::size_t>(coord)] = remaining;
    return inner_weighted_max(prob, lambda, cfg).upper_bound;
  }
  auto eval = [&](double t) {
    lambda[static_cast<std::size_t>(coord)] = t;
    return refine_dual_ternary(prob, cfg, lambda, coord + 1, remaining - t, depth_budget);
  };
  double lo = 0.0, hi = remaining;
  double best = std::numeric_limits<double>::infinity();
  for (int it = 0; it < depth_budget; ++it) {
    const double m1 = lo + (hi - lo) / 3.0;
    const double m2 = hi - (hi - lo) / 3.0;
    const double f1 = eval(m1);
    const double f2 = eval(m2);
    best = std::min({best, f1, f2});
    if (f1 <= f2) hi = m2; else lo = m1;
  }
  best = std::min(best, eval((lo + hi) / 2.0));
  return best;
}

}  // namespace detail

// Maximin solve: multiplicative weights on the branch mixture (step
// eta = sqrt(ln K / iterations)) around the exact inner concave maximization,
// with vertex dual bounds and, for <= 3 branches, a ternary dual refinement.
// The reported convergence_gap is a true primal-dual certificate.
inline SolveReport solve_maximin(const MaximinProblem& prob, const MaximinConfig& cfg = {}) {
  const int K = prob.branches;
  if (K < 1) throw std::invalid_argument("solve_maximin: no branches");
  SolveReport report;
  report.method = "mw+ba-maximin";
  report.argument_shape = "p(x|v) nv=" + std::to_string(prob.nv) + " nx=" + std::to_string(prob.nx);

  auto primal_value = [&](const std::vector<double>& strat) {
    double worst = std::numeric_limits<double>::infinity();
    for (int k = 0; k < K; ++k) {
      double ik = 0.0;
      for (int v = 0; v < prob.nv; ++v) {
        const double pv = prob.v_prior[static_cast<std::size_t>(v)];
        if (pv == 0.0) continue;
        ik += pv * detail::channel_mi(
                       std::span<const double>(strat).subspan(static_cast<std::size_t>(v) * prob.nx,
                                                              static_cast<std::size_t>(prob.nx)),
                       &prob.w[((static_cast<std::size_t>(k) * prob.nv + v) * prob.nx) * prob.ny],
                       prob.nx, prob.ny);
      }
      worst = std::min(worst, ik);
    }
    return worst;
  };

  // Vertex duals: each branch alone. Also seeds the primal candidates.
  double upper = std::numeric_limits<double>::infinity();
  double best_lower = -std::numeric_limits<double>::infinity();
  std::vector<double> best_strat;
  std::vector<double> lambda(static_cast<std::size_t>(K), 0.0);
  long iterations = 0;
  for (int k = 0; k < K; ++k) {
    std::fill(lambda.begin(), lambda.end(), 0.0);
    lambda[static_cast<std::size_t>(k)] = 1.0;
    detail::InnerSolution s = detail::inner_weighted_max(prob, lambda, cfg);
    iterations += s.iterations;
    upper = std::min(upper, s.upper_bound);
    const double lv = primal_value(s.strat);
    if (lv > best_lower) {
      best_lower = lv;
      best_strat = s.strat;
    }
  }

  if (K > 1 && upper - best_lower >= cfg.target_gap) {
    const double eta = std::sqrt(std::log(static_cast<double>(K)) / cfg.max_outer);
    std::fill(lambda.begin(), lambda.end(), 1.0 / K);
    std::vector<double> avg_strat(static_cast<std::size_t>(prob.nv) * prob.nx, 0.0);
    int outer = 0;
    for (; outer < cfg.max_outer; ++outer) {
      detail::InnerSolution s = detail::inner_weighted_max(prob, lambda, cfg);
      iterations += s.iterations;
      upper = std::min(upper, s.upper_bound);
      const double lv = primal_value(s.strat);
      if (lv > best_lower) {
        best_lower = lv;
        best_strat = s.strat;
      }
      for (std::size_t i = 0; i < avg_strat.size(); ++i) {
        avg_strat[i] = (avg_strat[i] * outer + s.strat[i]) / (outer + 1);
      }
      if ((outer + 1) % 64 == 0) {
        const double av = primal_value(avg_strat);
        if (av > best_lower) {
          best_lower = av;
          best_strat = avg_strat;
        }
      }
      if (upper - best_lower < cfg.target_gap) break;
      double norm = 0.0;
      for (int k = 0; k < K; ++k) {
        lambda[static_cast<std::size_t>(k)] *= std::exp(-eta * s.branch_values[static_cast<std::size_t>(k)]);
        norm += lambda[static_cast<std::size_t>(k)];
      }
      for (double& l : lambda) l /= norm;
    }
    const double av = primal_value(avg_strat);
    if (av > best_lower) {
      best_lower = av;
      best_strat = avg_strat;
    }
    // Dual refinement: U(lambda) is convex, so for small K a nested ternary
    // search pins the upper bound far tighter than the MW trajectory does.
    if (upper - best_lower >= cfg.target_gap && K <= 3) {
      std::vector<double> l2(static_cast<std::size_t>(K), 0.0);
      const double refined = detail::refine_dual_ternary(prob, cfg, l2, 0, 1.0, 80);
      upper = std::min(upper, refined);
    }
    report.iterations = iterations;
    report.converged = upper - best_lower < cfg.target_gap;
  } else {
    report.iterations = iterations;
    report.converged = upper - best_lower < cfg.target_gap;
  }

  report.value = best_lower;
  report.argument = best_strat;
  report.convergence_gap = std::max(0.0, upper - best_lower);
  return report;
}

}  // namespace asyncsi
