#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <mutex>
#include <numeric>
#include <span>
#include <stdexcept>
#include <thread>
#include <vector>

#include "asyncsi/rng.hpp"

namespace asyncsi {

// Euclidean projection onto the probability simplex (sort-based):
// theta = (sum_{j<=rho} u_j - 1)/(rho+1) for the largest rho keeping
// u_rho above the threshold, then clip.
inline void project_to_simplex(std::span<double> v) {
  const std::size_t n = v.size();
  std::vector<double> u(v.begin(), v.end());
  std::sort(u.begin(), u.end(), std::greater<double>());
  double css = 0.0;
  double theta = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    css += u[k];
    const double t = (css - 1.0) / static_cast<double>(k + 1);
    if (u[k] > t) theta = t;
  }
  for (double& x : v) x = std::max(0.0, x - theta);
  // Guard against accumulated drift.
  double s = std::accumulate(v.begin(), v.end(), 0.0);
  if (s <= 0.0) {
    std::fill(v.begin(), v.end(), 1.0 / static_cast<double>(n));
  } else if (std::abs(s - 1.0) > 1e-15) {
    for (double& x : v) x /= s;
  }
}

// Uniform (Dirichlet(1)) sample on the simplex.
inline void sample_simplex(std::span<double> out, Rng& rng) {
  double sum = 0.0;
  for (double& x : out) {
    x = -std::log(1.0 - rng.next_double());
    sum += x;
  }
  for (double& x : out) x /= sum;
}

inline int default_thread_count() {
  if (const char* env = std::getenv("ASYNCSI_THREADS")) {
    const int t = std::atoi(env);
    if (t > 0) return t;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Objective over a product of simplex blocks. Fills `grad` (same layout as
// the point) and returns the value.
using BlockObjective = std::function<double(std::span<const double>, std::span<double>)>;

struct AscentConfig {
  int starts = 64;
  int max_iters = 3000;
  double value_tol = 1e-13;
  int stall_limit = 40;
  std::uint64_t seed = 1;
  int threads = 0;  // 0: take ASYNCSI_THREADS / hardware default
  std::vector<std::vector<double>> warm_starts;
};

struct AscentResult {
  std::vector<double> point;
  double value = -1e300;
  long iterations = 0;
  bool converged = false;
};

namespace detail {

// Projected gradient ascent with an adaptive step, from one start.
inline AscentResult ascend_from(const BlockObjective& f, const std::vector<int>& blocks,
                                std::vector<double> point, int max_iters, double value_tol,
                                int stall_limit) {
  const std::size_t dim = point.size();
  std::vector<double> grad(dim), trial(dim);
  double value = f(point, grad);
  double step = 0.5;
  int stall = 0;
  long iters = 0;
  for (int it = 0; it < max_iters; ++it) {
    ++iters;
    bool improved = false;
    // Backtracking: shrink the step until the projected move improves.
    for (int bt = 0; bt < 40; ++bt) {
      for (std::size_t i = 0; i < dim; ++i) trial[i] = point[i] + step * grad[i];
      std::size_t off = 0;
      for (int b : blocks) {
        project_to_simplex(std::span<double>(trial.data() + off, static_cast<std::size_t>(b)));
        off += static_cast<std::size_t>(b);
      }
      std::vector<double> trial_grad(dim);
      const double tv = f(trial, trial_grad);
      if (tv > value) {
        const double gain = tv - value;
        point.swap(trial);
        grad.swap(trial_grad);
        value = tv;
        step *= 1.6;
        improved = true;
        if (gain < value_tol) {
          ++stall;
        } else {
          stall = 0;
        }
        break;
      }
      step *= 0.5;
      if (step < 1e-15) break;
    }
    if (!improved) ++stall;
    if (stall >= stall_limit || step < 1e-15) {
      AscentResult r{std::move(point), value, iters, true};
      return r;
    }
  }
  return AscentResult{std::move(point), value, iters, false};
}

}  // namespace detail

// Multi-start projected ascent over a product of simplexes. Starts are
// Dirichlet(1) points (plus any caller-provided warm starts), each ascended
// independently with a derived seed; ties break toward the first-found start.
inline AscentResult multistart_ascent(const BlockObjective& f, const std::vector<int>& blocks,
                                      const AscentConfig& cfg) {
  std::size_t dim = 0;
  for (int b : blocks) {
    if (b <= 0) throw std::invalid_argument("multistart_ascent: empty block");
    dim += static_cast<std::size_t>(b);
  }
  std::vector<std::vector<double>> starts;
  for (const auto& w : cfg.warm_starts) {
    if (w.size() != dim) throw std::invalid_argument("multistart_ascent: warm start has wrong size");
    starts.push_back(w);
  }
  for (int k = 0; k < cfg.starts; ++k) {
    Rng rng = Rng::derived(cfg.seed, {0x5741u, static_cast<std::uint64_t>(k)});
    std::vector<double> p(dim);
    std::size_t off = 0;
    for (int b : blocks) {
      sample_simplex(std::span<double>(p.data() + off, static_cast<std::size_t>(b)), rng);
      off += static_cast<std::size_t>(b);
    }
    starts.push_back(std::move(p));
  }

  std::vector<AscentResult> results(starts.size());
  const int threads = std::min<int>(cfg.threads > 0 ? cfg.threads : default_thread_count(),
                                    static_cast<int>(starts.size()));
  if (threads <= 1) {
    for (std::size_t i = 0; i < starts.size(); ++i) {
      results[i] = detail::ascend_from(f, blocks, std::move(starts[i]), cfg.max_iters,
                                       cfg.value_tol, cfg.stall_limit);
    }
  } else {
    std::vector<std::thread> pool;
    std::size_t next = 0;
    std::mutex m;
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&]() {
        for (;;) {
          std::size_t i;
          {
            std::lock_guard<std::mutex> lk(m);
            if (next >= starts.size()) return;
            i = next++;
          }
          results[i] = detail::ascend_from(f, blocks, std::move(starts[i]), cfg.max_iters,
                                           cfg.value_tol, cfg.stall_limit);
        }
      });
    }
    for (auto& th : pool) th.join();
  }

  AscentResult best;
  long total_iters = 0;
  bool all_converged = true;
  for (const auto& r : results) {
    total_iters += r.iterations;
    all_converged = all_converged && r.converged;
    if (r.value > best.value) {
      best.point = r.point;
      best.value = r.value;
    }
  }
  best.iterations = total_iters;
  best.converged = all_converged;
  return best;
}

}  // namespace asyncsi
