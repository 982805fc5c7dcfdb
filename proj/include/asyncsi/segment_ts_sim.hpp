#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "asyncsi/aux_dist.hpp"
#include "asyncsi/channel.hpp"
#include "asyncsi/codebooks.hpp"
#include "asyncsi/errors.hpp"
#include "asyncsi/pair_laws.hpp"
#include "asyncsi/sampling.hpp"
#include "asyncsi/sim_common.hpp"

namespace asyncsi {

// Binning + segment time sharing for the delay set {0,1}: bins of
// 2^(nJ) codewords, covering against the observed (possibly shifted) state
// sequence on both half-blocks, and joint per-segment typicality decoding
// under the p1/p2 pair laws of the true delay branch.
struct SegmentTsConfig {
  int n = 32;
  double rate_r = 0.25;  // message exponent R
  double rate_j = 0.125; // bin exponent J
  double epsilon = 0.2;
  int true_delay = 0;    // in {0, 1}
  long trials = 500;
  std::uint64_t seed = 1;
  long codebook_refresh = 100;  // trials per codebook; 0 keeps one codebook
};

namespace detail {

inline bool law_discriminates(const JointPmf& law) {
  JointPmf mu = marginalize(law, {0});
  JointPmf my = marginalize(law, {1});
  const int nu = law.axes()[0].size, ny = law.axes()[1].size;
  double tv = 0.0;
  for (int u = 0; u < nu; ++u) {
    for (int y = 0; y < ny; ++y) {
      const int iuy[2] = {u, y};
      const int iu[1] = {u};
      const int iy[1] = {y};
      tv += std::abs(law.at(iuy) - mu.at(iu) * my.at(iy));
    }
  }
  return tv * 0.5 > 1e-12;
}

struct SegmentTsScheme {
  const StateChannel* ch;
  const AuxDistribution* aux;
  int n;
  double epsilon;
  JointPmf juaw;  // covering law (U, A)
  JointPmf p1, p2;
  bool p1_discriminates, p2_discriminates;
  std::vector<double> p_u_given_a;   // [a][u]
  std::vector<double> p_x_given_ua;  // [u][a][x]
  Pmf pu;

  SegmentTsScheme(const StateChannel& channel, const AuxDistribution& a, int n_, double eps)
      : ch(&channel), aux(&a), n(n_), epsilon(eps),
        juaw(aux_state_pmf(channel, a)),
        p1(synced_pair_pmf(channel, a)),
        p2(product_pair_pmf(channel, a)),
        p1_discriminates(law_discriminates(p1)),
        p2_discriminates(law_discriminates(p2)),
        pu(Pmf::uniform(1)) {
    if (n_ % 2 != 0 || n_ < 4) {
      throw std::invalid_argument("segment_ts_simulate: n must be even and >= 4");
    }
    const int nu = a.nu(), nx = channel.nx(), ns = channel.ns();
    p_u_given_a.assign(static_cast<std::size_t>(ns) * nu, 0.0);
    for (int s = 0; s < ns; ++s) {
      for (int u = 0; u < nu; ++u) {
        double m = 0.0;
        for (int x = 0; x < nx; ++x) m += a.p(u, x, s);
        p_u_given_a[static_cast<std::size_t>(s) * nu + u] = m;
      }
    }
    std::vector<double> pu_raw(static_cast<std::size_t>(nu), 0.0);
    for (int u = 0; u < nu; ++u) {
      for (int s = 0; s < ns; ++s) {
        pu_raw[static_cast<std::size_t>(u)] +=
            channel.state_prior()[s] * p_u_given_a[static_cast<std::size_t>(s) * nu + u];
      }
    }
    pu = Pmf(std::move(pu_raw));
    p_x_given_ua.assign(static_cast<std::size_t>(nu) * ns * nx, 0.0);
    for (int u = 0; u < nu; ++u) {
      for (int s = 0; s < ns; ++s) {
        const double mass = p_u_given_a[static_cast<std::size_t>(s) * nu + u];
        for (int x = 0; x < nx; ++x) {
          // Unreachable (u,a) rows fall back to uniform so the fallback
          // codeword after a covering failure still transmits something.
          p_x_given_ua[(static_cast<std::size_t>(u) * ns + s) * nx + x] =
              mass > 0.0 ? a.p(u, x, s) / mass : 1.0 / nx;
        }
      }
    }
  }

  // Pairing index of the compensated second segment: u_i matches a_{i+1}.
  // Segment 1 covers [0, n/2), segment 2 covers [n/2, n-1).
  bool covering_ok(std::span<const std::int8_t> u, const std::vector<int>& a) const {
    return pair_typical(u, a, 0, n / 2, 0, juaw) &&
           pair_typical(u, a, n / 2, n - 1, 1, juaw);
  }

  template <typename USeq, typename YSeq>
  bool pair_typical(const USeq& u, const YSeq& y, int lo, int hi, int shift,
                    const JointPmf& law) const {
    if (hi <= lo) return true;
    const int nu_sz = law.axes()[0].size, ny_sz = law.axes()[1].size;
    std::vector<long> counts(static_cast<std::size_t>(nu_sz) * ny_sz, 0);
    const long cells = hi - lo;
    for (int i = lo; i < hi; ++i) {
      ++counts[static_cast<std::size_t>(u[static_cast<std::size_t>(i)]) * ny_sz +
               y[static_cast<std::size_t>(i + shift)]];
    }
    for (int uu = 0; uu < nu_sz; ++uu) {
      for (int yy = 0; yy < ny_sz; ++yy) {
        const int iuy[2] = {uu, yy};
        const double pr = law.at(iuy);
        const long c = counts[static_cast<std::size_t>(uu) * ny_sz + yy];
        if (pr == 0.0) {
          if (c != 0) return false;
        } else if (std::abs(static_cast<double>(c) / static_cast<double>(cells) - pr) > epsilon) {
          return false;
        }
      }
    }
    return true;
  }

  // Decoder test for one codeword under true delay d: the d-branch assigns
  // p1 to the segment whose compensation matches and p2 to the other.
  bool passes(std::span<const std::int8_t> u, const std::vector<int>& y, int d) const {
    const JointPmf& first = d == 0 ? p1 : p2;
    const JointPmf& second = d == 0 ? p2 : p1;
    const bool test_first = d == 0 ? p1_discriminates : p2_discriminates;
    const bool test_second = d == 0 ? p2_discriminates : p1_discriminates;
    if (test_first && !pair_typical(u, y, 0, n / 2, 0, first)) return false;
    if (test_second && !pair_typical(u, y, n / 2, n - 1, 0, second)) return false;
    return true;
  }

  std::vector<int> generate_x(std::span<const std::int8_t> u, const std::vector<int>& a,
                              Rng& rng) const {
    std::vector<int> x(static_cast<std::size_t>(n), 0);
    const int nx = ch->nx(), ns = ch->ns();
    for (int i = 0; i < n - 1; ++i) {
      const int ai = i < n / 2 ? a[static_cast<std::size_t>(i)] : a[static_cast<std::size_t>(i + 1)];
      const std::size_t off =
          (static_cast<std::size_t>(u[static_cast<std::size_t>(i)]) * ns + ai) * nx;
      x[static_cast<std::size_t>(i)] =
          rng.sample(std::span<const double>(p_x_given_ua).subspan(off, static_cast<std::size_t>(nx)));
    }
    x[static_cast<std::size_t>(n - 1)] = 0;  // the arbitrary last symbol, fixed
    return x;
  }
};

}  // namespace detail

inline Rng segment_ts_codebook_stream(std::uint64_t seed, long block) {
  return Rng::derived(seed, {0xB17Eu, static_cast<std::uint64_t>(block)});
}

inline TrialReport segment_ts_simulate(const StateChannel& ch, const AuxDistribution& aux,
                                       const SegmentTsConfig& cfg) {
  if (cfg.true_delay != 0 && cfg.true_delay != 1) {
    throw std::invalid_argument("segment_ts_simulate: true delay must be 0 or 1");
  }
  if (cfg.trials < 1) throw std::invalid_argument("segment_ts_simulate: trials must be >= 1");
  detail::SegmentTsScheme scheme(ch, aux, cfg.n, cfg.epsilon);
  const int r_exp = static_cast<int>(std::llround(cfg.n * cfg.rate_r));
  const int j_exp = static_cast<int>(std::llround(cfg.n * cfg.rate_j));

  const long blocks = cfg.codebook_refresh > 0
                          ? (cfg.trials + cfg.codebook_refresh - 1) / cfg.codebook_refresh
                          : 1;
  std::vector<BinCodebook> books;
  books.reserve(static_cast<std::size_t>(blocks));
  for (long b = 0; b < blocks; ++b) {
    books.emplace_back(cfg.n, r_exp, j_exp, scheme.pu, segment_ts_codebook_stream(cfg.seed, b));
  }

  TrialReport report;
  report.scheme = "segment_ts";
  report.n = cfg.n;
  report.rate = cfg.rate_r;
  report.channel_id = "custom";
  report.seed = cfg.seed;

  auto one_trial = [&](long trial) {
    Rng rng = Rng::derived(cfg.seed, {0x5E65u, static_cast<std::uint64_t>(trial)});
    TrialOutcome out;
    out.d = cfg.true_delay;
    const BinCodebook& book = books[static_cast<std::size_t>(
        cfg.codebook_refresh > 0 ? trial / cfg.codebook_refresh : 0)];

    std::vector<int> s = sample_states(ch, cfg.n, rng.child(0).next_u64());
    DelayedView view = delayed_view(s, out.d, ch.state_prior(), rng.child(1).next_u64());
    const std::size_t m = static_cast<std::size_t>(rng.index(book.num_messages()));

    // Covering step: first codeword in the bin typical with both windows.
    std::size_t chosen = 0;
    out.e1 = true;
    for (std::size_t k = 0; k < book.bin_size(); ++k) {
      if (scheme.covering_ok(book.word(m, k), view.a)) {
        chosen = k;
        out.e1 = false;
        break;
      }
    }

    std::span<const std::int8_t> u = book.word(m, chosen);
    Rng xrng = rng.child(2);
    std::vector<int> x = scheme.generate_x(u, view.a, xrng);
    std::vector<int> y = transmit(ch, x, s, rng.child(3).next_u64());

    out.e2 = !scheme.passes(u, y, out.d);
    std::set<std::size_t> decoded;
    for (std::size_t mm = 0; mm < book.num_messages(); ++mm) {
      for (std::size_t k = 0; k < book.bin_size(); ++k) {
        if (scheme.passes(book.word(mm, k), y, out.d)) {
          decoded.insert(mm);
          if (mm != m) out.e3 = true;
          break;
        }
      }
    }
    out.error = decoded.size() != 1 || *decoded.begin() != m;
    return out;
  };

  run_trials(cfg.trials, one_trial, report);
  return report;
}

}  // namespace asyncsi
