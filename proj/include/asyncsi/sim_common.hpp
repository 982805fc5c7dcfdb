#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include "asyncsi/simplex.hpp"
#include "asyncsi/solve_report.hpp"

namespace asyncsi {

// Monte Carlo outcome of a coding-scheme run. Error counts are always
// conditioned on the realized delay; the CSV serialization emits one row per
// delay value seen.
struct TrialReport {
  std::string scheme;
  int n = 0;
  double rate = 0.0;
  std::string channel_id;
  long trials = 0;
  std::map<int, long> trials_per_d;
  std::map<int, long> errors_per_d;
  long e1 = 0, e2 = 0, e3 = 0;  // per-event counts where the scheme defines them
  std::uint64_t seed = 0;

  long total_errors() const {
    long e = 0;
    for (const auto& [d, c] : errors_per_d) e += c;
    return e;
  }

  double error_rate() const {
    return trials > 0 ? static_cast<double>(total_errors()) / static_cast<double>(trials) : 0.0;
  }

  double error_rate_for(int d) const {
    auto it = trials_per_d.find(d);
    if (it == trials_per_d.end() || it->second == 0) return 0.0;
    auto eit = errors_per_d.find(d);
    const long errs = eit == errors_per_d.end() ? 0 : eit->second;
    return static_cast<double>(errs) / static_cast<double>(it->second);
  }

  // 95% binomial confidence half-width at the observed rate.
  static double ci_halfwidth(long errors, long trials) {
    if (trials <= 0) return 0.0;
    const double p = static_cast<double>(errors) / static_cast<double>(trials);
    return 1.96 * std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
  }

  static std::string csv_header() {
    return "scheme,n,rate,channel,d_true,trials,errors,err_rate,ci_halfwidth,seed";
  }

  std::string to_csv_rows() const {
    std::string out;
    for (const auto& [d, td] : trials_per_d) {
      auto eit = errors_per_d.find(d);
      const long errs = eit == errors_per_d.end() ? 0 : eit->second;
      const double rate_d = td > 0 ? static_cast<double>(errs) / static_cast<double>(td) : 0.0;
      out += scheme + "," + std::to_string(n) + "," + format_rate(rate) + "," + channel_id + "," +
             std::to_string(d) + "," + std::to_string(td) + "," + std::to_string(errs) + "," +
             format_rate(rate_d) + "," + format_rate(ci_halfwidth(errs, td)) + "," +
             std::to_string(seed) + "\n";
    }
    return out;
  }
};

namespace detail {

// P(Bin(m, p) in [lo, hi]) computed in log space from the mode outward.
inline double binomial_window_prob(long m, double p, long lo, long hi) {
  if (hi < lo || hi < 0 || lo > m) return 0.0;
  lo = std::max(lo, 0L);
  hi = std::min(hi, m);
  if (p <= 0.0) return lo == 0 ? 1.0 : 0.0;
  if (p >= 1.0) return hi == m ? 1.0 : 0.0;
  const double lp = std::log(p), lq = std::log1p(-p);
  auto log_pmf = [&](long k) {
    return std::lgamma(static_cast<double>(m) + 1.0) - std::lgamma(static_cast<double>(k) + 1.0) -
           std::lgamma(static_cast<double>(m - k) + 1.0) + static_cast<double>(k) * lp +
           static_cast<double>(m - k) * lq;
  };
  double max_log = -1e300;
  for (long k = lo; k <= hi; ++k) max_log = std::max(max_log, log_pmf(k));
  double sum = 0.0;
  for (long k = lo; k <= hi; ++k) sum += std::exp(log_pmf(k) - max_log);
  const double result = std::exp(max_log) * sum;
  return result > 1.0 ? 1.0 : result;
}

// P(at least one of `count` independent events of probability q).
inline double any_of_prob(double q, double count) {
  if (q <= 0.0 || count <= 0.0) return 0.0;
  if (q >= 1.0) return 1.0;
  return -std::expm1(count * std::log1p(-q));
}

// Integer count window for a typicality cell: [n(p-eps), n(p+eps)] with the
// zero-count rule collapsing zero-probability cells to {0}.
struct CellWindow {
  long lo = 0, hi = 0;
};

inline CellWindow cell_window(double cell_prob, double epsilon, long n) {
  if (cell_prob == 0.0) return {0, 0};
  const double lo = (cell_prob - epsilon) * static_cast<double>(n);
  const double hi = (cell_prob + epsilon) * static_cast<double>(n);
  CellWindow w;
  w.lo = static_cast<long>(std::ceil(lo - 1e-9));
  w.hi = static_cast<long>(std::floor(hi + 1e-9));
  if (w.lo < 0) w.lo = 0;
  return w;
}

}  // namespace detail

// One simulated transmission: the realized delay, whether decoding failed,
// and the per-event flags used by the schemes that track them.
struct TrialOutcome {
  int d = 0;
  bool error = false;
  bool e1 = false, e2 = false, e3 = false;
};

// Runs `fn(trial_index) -> TrialOutcome` over all trials and folds the
// outcomes into the report. Each trial derives its own stream from the seed,
// so chunked concurrent execution gives bit-identical reports.
template <typename Fn>
inline void run_trials(long trials, Fn&& fn, TrialReport& report, int threads = 0) {
  report.trials = trials;
  const int t = threads > 0 ? threads : default_thread_count();
  struct Counts {
    std::map<int, long> trials_per_d, errors_per_d;
    long e1 = 0, e2 = 0, e3 = 0;
  };
  std::vector<Counts> partial(static_cast<std::size_t>(std::max(1, t)));
  auto run_range = [&](long lo, long hi, Counts& c) {
    for (long i = lo; i < hi; ++i) {
      const TrialOutcome o = fn(i);
      ++c.trials_per_d[o.d];
      if (o.error) ++c.errors_per_d[o.d];
      c.e1 += o.e1 ? 1 : 0;
      c.e2 += o.e2 ? 1 : 0;
      c.e3 += o.e3 ? 1 : 0;
    }
  };
  if (t <= 1 || trials < 256) {
    run_range(0, trials, partial[0]);
  } else {
    std::vector<std::thread> pool;
    const long chunk = (trials + t - 1) / t;
    for (int k = 0; k < t; ++k) {
      const long lo = k * chunk;
      const long hi = std::min(trials, lo + chunk);
      if (lo >= hi) break;
      pool.emplace_back([&, lo, hi, k]() { run_range(lo, hi, partial[static_cast<std::size_t>(k)]); });
    }
    for (auto& th : pool) th.join();
  }
  for (const Counts& c : partial) {
    for (const auto& [d, v] : c.trials_per_d) report.trials_per_d[d] += v;
    for (const auto& [d, v] : c.errors_per_d) report.errors_per_d[d] += v;
    report.e1 += c.e1;
    report.e2 += c.e2;
    report.e3 += c.e3;
  }
}

}  // namespace asyncsi
