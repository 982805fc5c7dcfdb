#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "asyncsi/acsitr.hpp"
#include "asyncsi/channel.hpp"
#include "asyncsi/codebooks.hpp"
#include "asyncsi/errors.hpp"
#include "asyncsi/sampling.hpp"
#include "asyncsi/sim_common.hpp"

namespace asyncsi {

// Strategy-letter scheme: both ends know s^n, the channel applies an unknown
// delay, and each message is a |V| x n matrix of inputs indexed by the state
// window. Decoding is conditional joint typicality of (v, x(m), y) on the
// interior index window, where the window entries are determined by s^n and
// untouched by boundary filler.
struct AcsitrSimConfig {
  int n = 48;
  double rate = 0.8;
  double epsilon = 0.25;
  long trials = 1000;
  std::uint64_t seed = 1;
  bool fix_delay = false;
  int fixed_delay = 0;
  long codebook_refresh = 100;
  enum class Mode { kAuto, kMaterialized, kEnsemble } mode = Mode::kAuto;
  // Jitter variant: redraw the delay every `jitter_block` symbols instead of
  // once per codeword; the decoder is assumed to track the per-block delays.
  bool jitter = false;
  int jitter_block = 0;
};

namespace detail {

struct AcsitrScheme {
  const StateChannel* ch;
  DelaySet ds;
  const StrategyPmf* strat;
  int n;
  double epsilon;
  int interior_lo, interior_hi;  // [lo, hi) indices untouched by any filler
  std::vector<double> v_prior;

  AcsitrScheme(const StateChannel& channel, const DelaySet& delays, const StrategyPmf& s, int n_,
               double eps)
      : ch(&channel), ds(delays), strat(&s), n(n_), epsilon(eps) {
    interior_lo = ds.d_max;
    interior_hi = n - ds.d_min;
    if (interior_hi - interior_lo < 1) {
      throw std::invalid_argument("acsitr_simulate: block too short for the delay window");
    }
    v_prior = product_v_prior(channel.state_prior(), ds.size());
    if (s.nv != static_cast<int>(v_prior.size()) || s.nx != channel.nx()) {
      throw std::invalid_argument("acsitr_simulate: strategy does not match channel/window");
    }
  }

  // Window index N(v_i) from the raw states; valid only on the interior.
  int v_index_at(const std::vector<int>& s, int i) const {
    int f = 0;
    for (int k = 0; k < ds.size(); ++k) f = f * ch->ns() + s[static_cast<std::size_t>(i - ds.d_max + k)];
    return f;
  }

  // Reference cell law P(v) P(x|v) W(y | x, v_{dmax-d}) for a given delay.
  double cell_law(int v, int x, int y, int d) const {
    const int sv = v_digit(v, ch->ns(), ds.size(), ds.d_max - d);
    return v_prior[static_cast<std::size_t>(v)] * strat->at(v, x) * ch->w(y, x, sv);
  }

  // Typicality test of interior counts N(v,x,y) against the delay-d law;
  // `delay_at(i)` supplies the per-index delay (constant without jitter).
  template <typename XFn, typename DFn>
  bool passes(const std::vector<int>& s, const XFn& x_at, const std::vector<int>& y,
              const DFn& delay_at) const {
    const int nv = static_cast<int>(v_prior.size());
    const int nx = ch->nx(), ny = ch->ny();
    // Group interior cells by delay (one group without jitter).
    std::vector<int> group_len;
    std::vector<std::vector<long>> counts;
    std::vector<int> group_of_delay(static_cast<std::size_t>(ds.size()), -1);
    std::vector<int> group_delays;
    for (int i = interior_lo; i < interior_hi; ++i) {
      const int d = delay_at(i);
      const int di = d + ds.d_min;
      if (group_of_delay[static_cast<std::size_t>(di)] < 0) {
        group_of_delay[static_cast<std::size_t>(di)] = static_cast<int>(group_delays.size());
        group_delays.push_back(d);
        group_len.push_back(0);
        counts.emplace_back(static_cast<std::size_t>(nv) * nx * ny, 0);
      }
      const int g = group_of_delay[static_cast<std::size_t>(di)];
      ++group_len[static_cast<std::size_t>(g)];
      const int v = v_index_at(s, i);
      ++counts[static_cast<std::size_t>(g)]
              [(static_cast<std::size_t>(v) * nx + x_at(i)) * ny + y[static_cast<std::size_t>(i)]];
    }
    for (std::size_t g = 0; g < group_delays.size(); ++g) {
      const long cells = group_len[g];
      for (int v = 0; v < nv; ++v) {
        for (int x = 0; x < nx; ++x) {
          for (int y_ = 0; y_ < ny; ++y_) {
            const double pr = cell_law(v, x, y_, group_delays[g]);
            const long c = counts[g][(static_cast<std::size_t>(v) * nx + x) * ny + y_];
            if (pr == 0.0) {
              if (c != 0) return false;
            } else if (std::abs(static_cast<double>(c) / static_cast<double>(cells) - pr) >
                       epsilon) {
              return false;
            }
          }
        }
      }
    }
    return true;
  }

  // Probability that a fresh strategy word passes the test, given the
  // realized interior (v, y) cells: per (v, y) bucket the candidate's x
  // entries are i.i.d. P(x|v), so the bucket contributes an exact
  // multinomial box probability.
  double competitor_pass_prob(const std::vector<int>& s, const std::vector<int>& y, int d) const {
    const int nv = static_cast<int>(v_prior.size());
    const int nx = ch->nx(), ny = ch->ny();
    const long cells = interior_hi - interior_lo;
    std::vector<long> bucket(static_cast<std::size_t>(nv) * ny, 0);
    for (int i = interior_lo; i < interior_hi; ++i) {
      ++bucket[static_cast<std::size_t>(v_index_at(s, i)) * ny + y[static_cast<std::size_t>(i)]];
    }
    double q = 1.0;
    std::vector<double> probs(static_cast<std::size_t>(nx));
    std::vector<CellWindow> wins(static_cast<std::size_t>(nx));
    for (int v = 0; v < nv && q > 0.0; ++v) {
      for (int y_ = 0; y_ < ny && q > 0.0; ++y_) {
        const long m = bucket[static_cast<std::size_t>(v) * ny + y_];
        if (m == 0) {
          // Empty buckets still enforce the zero-count side implicitly: all
          // cell counts are zero, which any window with lo = 0 accepts.
          for (int x = 0; x < nx; ++x) {
            if (cell_window(cell_law(v, x, y_, d), epsilon, cells).lo > 0) return 0.0;
          }
          continue;
        }
        for (int x = 0; x < nx; ++x) {
          probs[static_cast<std::size_t>(x)] = strat->at(v, x);
          wins[static_cast<std::size_t>(x)] = cell_window(cell_law(v, x, y_, d), epsilon, cells);
        }
        q *= multinomial_box_prob(m, probs, wins);
      }
    }
    return q;
  }

  static double multinomial_box_prob(long m, std::span<const double> probs,
                                     std::span<const CellWindow> wins) {
    // Sequential-binomial DFS over cells with the tail renormalization.
    struct Walker {
      std::span<const double> probs;
      std::span<const CellWindow> wins;
      double total = 0.0;
      void go(std::size_t j, long remaining, double acc, double tail) {
        if (acc == 0.0) return;
        if (j + 1 == probs.size()) {
          if (remaining >= wins[j].lo && remaining <= wins[j].hi) {
            // All remaining mass lands in the last cell with probability 1
            // under the renormalized tail.
            total += acc;
          }
          return;
        }
        const double pj = tail > 0.0 ? probs[j] / tail : 0.0;
        const long lo = std::max(wins[j].lo, 0L);
        const long hi = std::min(wins[j].hi, remaining);
        for (long c = lo; c <= hi; ++c) {
          go(j + 1, remaining - c, acc * binomial_pmf(remaining, pj, c), tail - probs[j]);
        }
      }
      static double binomial_pmf(long n_, double p, long k) {
        if (p <= 0.0) return k == 0 ? 1.0 : 0.0;
        if (p >= 1.0) return k == n_ ? 1.0 : 0.0;
        const double lg = std::lgamma(static_cast<double>(n_) + 1.0) -
                          std::lgamma(static_cast<double>(k) + 1.0) -
                          std::lgamma(static_cast<double>(n_ - k) + 1.0) +
                          static_cast<double>(k) * std::log(p) +
                          static_cast<double>(n_ - k) * std::log1p(-p);
        return std::exp(lg);
      }
    };
    Walker w{probs, wins, 0.0};
    w.go(0, m, 1.0, 1.0);
    return w.total > 1.0 ? 1.0 : w.total;
  }
};

}  // namespace detail

inline Rng acsitr_codebook_stream(std::uint64_t seed, long block) {
  return Rng::derived(seed, {0x5747u, static_cast<std::uint64_t>(block)});
}

inline TrialReport acsitr_simulate(const StateChannel& ch, const DelaySet& ds,
                                   const AcsitrSimConfig& cfg,
                                   const StrategyPmf* strat_opt = nullptr) {
  if (cfg.trials < 1) throw std::invalid_argument("acsitr_simulate: trials must be >= 1");
  StrategyPmf strat = strat_opt != nullptr
                          ? *strat_opt
                          : strategy_from_report(ch, ds, acsitr_capacity(ch, ds));
  detail::AcsitrScheme scheme(ch, ds, strat, cfg.n, cfg.epsilon);
  if (cfg.fix_delay && !ds.contains(cfg.fixed_delay)) {
    throw std::invalid_argument("acsitr_simulate: fixed delay outside the delay set");
  }
  if (cfg.jitter && cfg.jitter_block < 1) {
    throw std::invalid_argument("acsitr_simulate: jitter needs a positive block length");
  }
  const unsigned long long num_words = codeword_count(cfg.n, cfg.rate);

  bool materialized;
  switch (cfg.mode) {
    case AcsitrSimConfig::Mode::kMaterialized:
      if (num_words > (1ull << 26)) {
        throw GuardError("acsitr_simulate: codebook over the 2^26 guard");
      }
      materialized = true;
      break;
    case AcsitrSimConfig::Mode::kEnsemble:
      materialized = false;
      break;
    default:
      materialized = num_words <= (1ull << 14);
  }
  if (!materialized && cfg.jitter) {
    throw GuardError("acsitr_simulate: the jitter variant needs a materialized codebook");
  }

  std::vector<StrategyCodebook> books;
  long blocks = 1;
  if (materialized) {
    blocks = cfg.codebook_refresh > 0 ? (cfg.trials + cfg.codebook_refresh - 1) / cfg.codebook_refresh
                                      : 1;
    books.reserve(static_cast<std::size_t>(blocks));
    for (long b = 0; b < blocks; ++b) {
      books.emplace_back(static_cast<std::size_t>(num_words), cfg.n, strat,
                         acsitr_codebook_stream(cfg.seed, b));
    }
  }

  TrialReport report;
  report.scheme = "acsitr";
  report.n = cfg.n;
  report.rate = cfg.rate;
  report.channel_id = "custom";
  report.seed = cfg.seed;

  const std::vector<int> delay_values = ds.delays();
  auto one_trial = [&](long trial) {
    Rng rng = Rng::derived(cfg.seed, {0xAC51u, static_cast<std::uint64_t>(trial)});
    TrialOutcome out;

    std::vector<int> s = sample_states(ch, cfg.n, rng.child(0).next_u64());
    ExtendedStates phys = extend_states(s, ds.d_max, ds.d_min, ch.state_prior(),
                                        rng.child(1).next_u64());

    // Per-index true delay (constant unless jitter is on).
    std::vector<int> delay_by_block;
    if (cfg.jitter) {
      const int nblocks = (cfg.n + cfg.jitter_block - 1) / cfg.jitter_block;
      for (int b = 0; b < nblocks; ++b) {
        delay_by_block.push_back(delay_values[static_cast<std::size_t>(rng.index(delay_values.size()))]);
      }
      out.d = delay_by_block[0];
    } else {
      out.d = cfg.fix_delay
                  ? cfg.fixed_delay
                  : delay_values[static_cast<std::size_t>(rng.index(delay_values.size()))];
    }
    auto delay_at = [&](int i) {
      return cfg.jitter ? delay_by_block[static_cast<std::size_t>(i / cfg.jitter_block)] : out.d;
    };

    Rng noise = rng.child(2);
    std::vector<int> y(static_cast<std::size_t>(cfg.n));

    if (materialized) {
      const StrategyCodebook& book = books[static_cast<std::size_t>(
          cfg.codebook_refresh > 0 ? trial / cfg.codebook_refresh : 0)];
      const std::size_t m = static_cast<std::size_t>(rng.child(3).index(book.num_messages()));
      // Boundary window entries come from an encoder-private extension; they
      // only influence boundary symbols, which the decoder never tests.
      ExtendedStates venc = extend_states(s, ds.d_max, ds.d_min, ch.state_prior(),
                                          rng.child(4).next_u64());
      std::vector<int> x(static_cast<std::size_t>(cfg.n));
      for (int i = 0; i < cfg.n; ++i) {
        int f = 0;
        for (int k = 0; k < ds.size(); ++k) f = f * ch.ns() + venc.at(i - ds.d_max + k);
        x[static_cast<std::size_t>(i)] = book.x(m, i, f);
      }
      for (int i = 0; i < cfg.n; ++i) {
        y[static_cast<std::size_t>(i)] = noise.sample(ch.row(x[static_cast<std::size_t>(i)],
                                                             phys.at(i - delay_at(i))));
      }
      std::optional<std::size_t> found;
      for (std::size_t mm = 0; mm < book.num_messages(); ++mm) {
        auto x_at = [&](int i) { return book.x(mm, i, scheme.v_index_at(s, i)); };
        if (scheme.passes(s, x_at, y, delay_at)) {
          if (found.has_value()) {
            found.reset();
            break;
          }
          found = mm;
        }
      }
      out.error = !found.has_value() || *found != m;
      return out;
    }

    // Ensemble mode: one strategy word drawn, competitors integrated out.
    std::vector<int> x(static_cast<std::size_t>(cfg.n));
    Rng word = rng.child(5);
    ExtendedStates venc = extend_states(s, ds.d_max, ds.d_min, ch.state_prior(),
                                        rng.child(4).next_u64());
    // Only interior entries matter for decoding; draw the whole block anyway
    // so the transmitted sequence is complete.
    std::vector<int> xcol(static_cast<std::size_t>(strat.nv));
    for (int i = 0; i < cfg.n; ++i) {
      for (int v = 0; v < strat.nv; ++v) {
        xcol[static_cast<std::size_t>(v)] = word.sample(
            std::span<const double>(strat.p).subspan(static_cast<std::size_t>(v) * strat.nx,
                                                     static_cast<std::size_t>(strat.nx)));
      }
      int f = 0;
      for (int k = 0; k < ds.size(); ++k) f = f * ch.ns() + venc.at(i - ds.d_max + k);
      x[static_cast<std::size_t>(i)] = xcol[static_cast<std::size_t>(f)];
    }
    for (int i = 0; i < cfg.n; ++i) {
      y[static_cast<std::size_t>(i)] = noise.sample(ch.row(x[static_cast<std::size_t>(i)],
                                                           phys.at(i - out.d)));
    }
    auto x_at = [&](int i) { return x[static_cast<std::size_t>(i)]; };
    if (!scheme.passes(s, x_at, y, [&](int) { return out.d; })) {
      out.error = true;
      return out;
    }
    const double q = scheme.competitor_pass_prob(s, y, out.d);
    out.error = rng.child(6).bernoulli(detail::any_of_prob(q, static_cast<double>(num_words - 1)));
    return out;
  };

  run_trials(cfg.trials, one_trial, report);
  return report;
}

}  // namespace asyncsi
