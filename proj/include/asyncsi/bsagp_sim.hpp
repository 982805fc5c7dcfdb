#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "asyncsi/channel.hpp"
#include "asyncsi/codebooks.hpp"
#include "asyncsi/errors.hpp"
#include "asyncsi/sampling.hpp"
#include "asyncsi/sim_common.hpp"

namespace asyncsi {

// The explicit binary scheme: Y = X xor S with S ~ Bernoulli(p), delay set D,
// a Bernoulli(1/2) codebook, the timeline split into |D| equal segments,
// segment k compensating hypothesized delay d_k (x_i = u_i xor a_{i+d_k}).
struct BsagpConfig {
  double p = 0.5;
  int n = 64;
  double rate = 0.4;
  DelaySet delays{0, 1};
  long trials = 1000;
  std::uint64_t seed = 1;
  double epsilon = 0.1;
  bool fix_delay = false;
  int fixed_delay = 0;
  long codebook_refresh = 100;  // trials per codebook; 0 keeps one codebook
  enum class Mode { kAuto, kMaterialized, kEnsemble } mode = Mode::kAuto;
};

namespace detail {

// Shared decode geometry and rules, used by the simulator (both modes) and
// by the exact-error oracle so the two measure the same decoder.
struct BsagpScheme {
  int n = 0;
  int seg_len = 0;
  std::vector<int> delays;  // ascending, one per segment
  double p = 0.5;
  double epsilon = 0.1;
  double t = 0.5;           // p2 off-diagonal mass: P(U xor Y = 1) = 2p(1-p)
  bool discriminating = false;

  BsagpScheme(const BsagpConfig& cfg)
      : n(cfg.n), delays(cfg.delays.delays()), p(cfg.p), epsilon(cfg.epsilon) {
    if (cfg.n % cfg.delays.size() != 0) {
      throw std::invalid_argument("bsagp_simulate: n must be divisible by the delay-set size");
    }
    if (cfg.rate >= 1.0 || cfg.rate <= 0.0) {
      throw std::invalid_argument("bsagp_simulate: rate must be in (0, 1)");
    }
    seg_len = cfg.n / cfg.delays.size();
    t = 2.0 * p * (1.0 - p);
    // The misaligned pair law p2(u,y) = (1/2) Bern_t(u xor y) discriminates
    // only when it differs from the product of uniforms; at t = 1/2 the
    // typicality test carries no information about the codeword and is
    // skipped rather than charged against the true one.
    discriminating = std::abs(t - 0.5) > 1e-12;
  }

  int hypothesis(int i) const { return delays[static_cast<std::size_t>(i / seg_len)]; }

  std::vector<int> encode(const std::vector<int>& u, const std::vector<int>& a) const {
    std::vector<int> x(u.size());
    for (int i = 0; i < n; ++i) {
      const int c = i + hypothesis(i);
      const int comp = (c >= 0 && c < n) ? a[static_cast<std::size_t>(c)] : 0;
      x[static_cast<std::size_t>(i)] = u[static_cast<std::size_t>(i)] ^ comp;
    }
    return x;
  }

  // Candidate test, given the true delay d: exact equality on the aligned
  // segment's in-compensation cells, p2-typicality on every other segment's
  // in-compensation cells (when the law discriminates).
  template <typename Word>
  bool passes(const Word& u, const std::vector<int>& y, int d) const {
    const int num_segs = static_cast<int>(delays.size());
    for (int k = 0; k < num_segs; ++k) {
      const int h = delays[static_cast<std::size_t>(k)];
      long counts[2][2] = {{0, 0}, {0, 0}};
      long cells = 0;
      bool aligned_ok = true;
      for (int i = k * seg_len; i < (k + 1) * seg_len; ++i) {
        const int c = i + h;
        if (c < 0 || c >= n) continue;
        ++cells;
        if (h == d) {
          if (u[static_cast<std::size_t>(i)] != y[static_cast<std::size_t>(i)]) {
            aligned_ok = false;
            break;
          }
        } else {
          ++counts[u[static_cast<std::size_t>(i)]][y[static_cast<std::size_t>(i)]];
        }
      }
      if (h == d) {
        if (!aligned_ok) return false;
        continue;
      }
      if (!discriminating || cells == 0) continue;
      const double diag = 0.5 * (1.0 - t), off = 0.5 * t;
      const double probs[2][2] = {{diag, off}, {off, diag}};
      for (int uu = 0; uu < 2; ++uu) {
        for (int yy = 0; yy < 2; ++yy) {
          if (probs[uu][yy] == 0.0) {
            if (counts[uu][yy] != 0) return false;
          } else {
            const double freq = static_cast<double>(counts[uu][yy]) / static_cast<double>(cells);
            if (std::abs(freq - probs[uu][yy]) > epsilon) return false;
          }
        }
      }
    }
    return true;
  }

  // Unique-message rule over a materialized codebook; ambiguity is an error.
  std::optional<std::size_t> decode(const std::vector<std::vector<int>>& codebook,
                                    const std::vector<int>& y, int d) const {
    std::optional<std::size_t> found;
    for (std::size_t m = 0; m < codebook.size(); ++m) {
      if (passes(codebook[m], y, d)) {
        if (found.has_value()) return std::nullopt;
        found = m;
      }
    }
    return found;
  }

  // Probability that one fresh Bernoulli(1/2) word passes all checks given
  // the received block (exact; competitors are independent of y).
  double competitor_pass_prob(const std::vector<int>& y, int d) const {
    double q = 1.0;
    const int num_segs = static_cast<int>(delays.size());
    for (int k = 0; k < num_segs; ++k) {
      const int h = delays[static_cast<std::size_t>(k)];
      long cells = 0, ones = 0;
      for (int i = k * seg_len; i < (k + 1) * seg_len; ++i) {
        const int c = i + h;
        if (c < 0 || c >= n) continue;
        ++cells;
        ones += y[static_cast<std::size_t>(i)];
      }
      if (cells == 0) continue;
      if (h == d) {
        q *= std::exp2(-static_cast<double>(cells));
        continue;
      }
      if (!discriminating) continue;
      const double diag = 0.5 * (1.0 - t), off = 0.5 * t;
      const long m1 = ones, m0 = cells - ones;
      // N(1,1) = j1, N(0,1) = m1 - j1, N(1,0) = j0, N(0,0) = m0 - j0.
      const CellWindow w11 = cell_window(diag, epsilon, cells);
      const CellWindow w01 = cell_window(off, epsilon, cells);
      const CellWindow w10 = cell_window(off, epsilon, cells);
      const CellWindow w00 = cell_window(diag, epsilon, cells);
      const long j1_lo = std::max(w11.lo, m1 - w01.hi);
      const long j1_hi = std::min(w11.hi, m1 - w01.lo);
      const long j0_lo = std::max(w10.lo, m0 - w00.hi);
      const long j0_hi = std::min(w10.hi, m0 - w00.lo);
      q *= binomial_window_prob(m1, 0.5, j1_lo, j1_hi);
      q *= binomial_window_prob(m0, 0.5, j0_lo, j0_hi);
    }
    return q;
  }
};

}  // namespace detail

// Stream used for codebook block b (public so oracle tests can reproduce the
// simulator's codebooks exactly).
inline Rng bsagp_codebook_stream(std::uint64_t seed, long block) {
  return Rng::derived(seed, {0xC0DEu, static_cast<std::uint64_t>(block)});
}

inline TrialReport bsagp_simulate(const BsagpConfig& cfg) {
  detail::BsagpScheme scheme(cfg);
  if (cfg.trials < 1) throw std::invalid_argument("bsagp_simulate: trials must be >= 1");
  if (cfg.fix_delay && !cfg.delays.contains(cfg.fixed_delay)) {
    throw std::invalid_argument("bsagp_simulate: fixed delay outside the delay set");
  }
  const unsigned long long num_words = codeword_count(cfg.n, cfg.rate);

  bool materialized;
  switch (cfg.mode) {
    case BsagpConfig::Mode::kMaterialized:
      if (num_words > (1ull << 26)) {
        throw GuardError("bsagp_simulate: codebook over the 2^26 guard");
      }
      materialized = true;
      break;
    case BsagpConfig::Mode::kEnsemble:
      materialized = false;
      break;
    default:
      materialized = num_words <= (1ull << 16);
  }

  const Pmf prior = Pmf::bernoulli(cfg.p);
  std::vector<std::vector<std::vector<int>>> books;
  long blocks = 1;
  if (materialized) {
    blocks = cfg.codebook_refresh > 0 ? (cfg.trials + cfg.codebook_refresh - 1) / cfg.codebook_refresh
                                      : 1;
    books.reserve(static_cast<std::size_t>(blocks));
    for (long b = 0; b < blocks; ++b) {
      books.push_back(draw_binary_codebook(static_cast<std::size_t>(num_words), cfg.n,
                                           bsagp_codebook_stream(cfg.seed, b)));
    }
  }

  TrialReport report;
  report.scheme = "bsagp";
  report.n = cfg.n;
  report.rate = cfg.rate;
  report.channel_id = "bsagp:p=" + format_rate(cfg.p);
  report.seed = cfg.seed;

  auto one_trial = [&](long trial) {
    Rng rng = Rng::derived(cfg.seed, {0x7121u, static_cast<std::uint64_t>(trial)});
    TrialOutcome out;
    out.d = cfg.fix_delay
                ? cfg.fixed_delay
                : scheme.delays[static_cast<std::size_t>(rng.index(scheme.delays.size()))];

    std::vector<int> s(static_cast<std::size_t>(cfg.n));
    for (int& v : s) v = rng.bernoulli(cfg.p) ? 1 : 0;
    DelayedView view = delayed_view(s, out.d, prior, rng.child(1).next_u64());

    if (materialized) {
      const auto& book = books[static_cast<std::size_t>(
          cfg.codebook_refresh > 0 ? trial / cfg.codebook_refresh : 0)];
      const std::size_t m = static_cast<std::size_t>(rng.index(book.size()));
      std::vector<int> x = scheme.encode(book[m], view.a);
      std::vector<int> y(x.size());
      for (int i = 0; i < cfg.n; ++i) y[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i)] ^ s[static_cast<std::size_t>(i)];
      const auto decoded = scheme.decode(book, y, out.d);
      out.error = !decoded.has_value() || *decoded != m;
      return out;
    }

    // Ensemble mode: draw only the transmitted word; competitors are
    // integrated out exactly over the fresh-codebook ensemble.
    std::vector<int> u(static_cast<std::size_t>(cfg.n));
    for (int& v : u) v = static_cast<int>(rng.index(2));
    std::vector<int> x = scheme.encode(u, view.a);
    std::vector<int> y(x.size());
    for (int i = 0; i < cfg.n; ++i) y[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i)] ^ s[static_cast<std::size_t>(i)];
    if (!scheme.passes(u, y, out.d)) {
      out.error = true;
      return out;
    }
    const double q = scheme.competitor_pass_prob(y, out.d);
    const double p_confuse = detail::any_of_prob(q, static_cast<double>(num_words - 1));
    out.error = rng.bernoulli(p_confuse);
    return out;
  };

  run_trials(cfg.trials, one_trial, report);
  return report;
}

}  // namespace asyncsi
