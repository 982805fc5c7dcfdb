#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "asyncsi/acsitr_sim.hpp"
#include "asyncsi/bsagp_sim.hpp"
#include "asyncsi/errors.hpp"
#include "asyncsi/segment_ts_sim.hpp"

namespace asyncsi {

// Exact average error probabilities by full enumeration of every random
// element except the (fixed) codebook: message, state block, boundary
// filler, conditional-input draws and channel noise. These are the ground
// truth the Monte Carlo estimators are validated against.

namespace detail {

constexpr long kOracleBudget = 1L << 28;

struct Odometer {
  std::vector<int> digits;
  int radix;
  bool done = false;

  Odometer(std::size_t len, int radix_) : digits(len, 0), radix(radix_) {}

  void advance() {
    for (std::size_t i = 0; i < digits.size(); ++i) {
      if (++digits[i] < radix) return;
      digits[i] = 0;
    }
    done = true;
  }
};

inline double iid_prob(const Pmf& prior, const std::vector<int>& seq) {
  double p = 1.0;
  for (int v : seq) p *= prior[v];
  return p;
}

}  // namespace detail

inline double exact_error_bsagp(const std::vector<std::vector<int>>& codebook, double p,
                                const DelaySet& delays, int d_true, int n, double epsilon) {
  BsagpConfig cfg;
  cfg.p = p;
  cfg.n = n;
  cfg.rate = 0.5;  // layout only; the codebook is taken as given
  cfg.delays = delays;
  cfg.epsilon = epsilon;
  detail::BsagpScheme scheme(cfg);

  const int fill = std::abs(d_true);
  const double budget = static_cast<double>(codebook.size()) * std::exp2(n + fill);
  if (budget > static_cast<double>(detail::kOracleBudget)) {
    throw GuardError("exact_error_bsagp: enumeration over the 2^28 budget");
  }
  const Pmf prior = Pmf::bernoulli(p);

  double err = 0.0;
  std::vector<int> s(static_cast<std::size_t>(n));
  std::vector<int> a(static_cast<std::size_t>(n));
  for (std::size_t m = 0; m < codebook.size(); ++m) {
    for (detail::Odometer so(static_cast<std::size_t>(n), 2); !so.done; so.advance()) {
      s = so.digits;
      const double ps = detail::iid_prob(prior, s);
      if (ps == 0.0) continue;
      for (detail::Odometer fo(static_cast<std::size_t>(fill), 2); !fo.done; fo.advance()) {
        double pf = 1.0;
        for (int b : fo.digits) pf *= prior[b];
        if (pf == 0.0) continue;
        std::size_t fi = 0;
        for (int j = 0; j < n; ++j) {
          const int src = j - d_true;
          a[static_cast<std::size_t>(j)] =
              (src >= 0 && src < n) ? s[static_cast<std::size_t>(src)] : fo.digits[fi++];
        }
        std::vector<int> x = scheme.encode(codebook[m], a);
        std::vector<int> y(x.size());
        for (int i = 0; i < n; ++i) y[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i)] ^ s[static_cast<std::size_t>(i)];
        const auto decoded = scheme.decode(codebook, y, d_true);
        if (!decoded.has_value() || *decoded != m) {
          err += ps * pf / static_cast<double>(codebook.size());
        }
        if (fill == 0) break;
      }
    }
  }
  return err;
}

inline double exact_error_segment_ts(const StateChannel& ch, const AuxDistribution& aux,
                                     const BinCodebook& book, int d_true, double epsilon) {
  const int n = book.n();
  detail::SegmentTsScheme scheme(ch, aux, n, epsilon);
  if (d_true != 0 && d_true != 1) {
    throw std::invalid_argument("exact_error_segment_ts: d must be 0 or 1");
  }

  long leaves = 0;
  double err = 0.0;
  std::vector<int> s_cur(static_cast<std::size_t>(n));
  std::vector<int> a(static_cast<std::size_t>(n));
  std::vector<int> x(static_cast<std::size_t>(n), 0);
  std::vector<int> y(static_cast<std::size_t>(n), 0);

  std::function<void(int, double, std::size_t, std::span<const std::int8_t>)> walk_xy =
      [&](int i, double w, std::size_t m, std::span<const std::int8_t> u) {
        if (w == 0.0) return;
        if (i == n) {
          if (++leaves > detail::kOracleBudget) {
            throw GuardError("exact_error_segment_ts: enumeration over the 2^28 budget");
          }
          bool error;
          std::size_t hits = 0;
          bool hit_self = false;
          for (std::size_t mm = 0; mm < book.num_messages(); ++mm) {
            for (std::size_t k = 0; k < book.bin_size(); ++k) {
              if (scheme.passes(book.word(mm, k), y, d_true)) {
                ++hits;
                if (mm == m) hit_self = true;
                break;
              }
            }
          }
          error = hits != 1 || !hit_self;
          if (error) err += w;
          return;
        }
        // x_i: conditional on (u_i, paired a); the last symbol is fixed to 0.
        const int pair_a = i < n / 2 ? a[static_cast<std::size_t>(i)]
                          : i < n - 1 ? a[static_cast<std::size_t>(i + 1)]
                                      : -1;
        for (int xi = 0; xi < ch.nx(); ++xi) {
          double px;
          if (i == n - 1) {
            px = xi == 0 ? 1.0 : 0.0;
          } else {
            px = scheme.p_x_given_ua[(static_cast<std::size_t>(u[static_cast<std::size_t>(i)]) * ch.ns() +
                                      pair_a) * ch.nx() + xi];
          }
          if (px == 0.0) continue;
          x[static_cast<std::size_t>(i)] = xi;
          for (int yi = 0; yi < ch.ny(); ++yi) {
            const double py = ch.w(yi, xi, s_cur[static_cast<std::size_t>(i)]);
            if (py == 0.0) continue;
            y[static_cast<std::size_t>(i)] = yi;
            walk_xy(i + 1, w * px * py, m, u);
          }
        }
      };

  // Enumerate states and boundary filler.
  const int fill = d_true;
  for (detail::Odometer so(static_cast<std::size_t>(n), ch.ns()); !so.done; so.advance()) {
    s_cur = so.digits;
    const double ps = detail::iid_prob(ch.state_prior(), s_cur);
    if (ps == 0.0) continue;
    for (detail::Odometer fo(static_cast<std::size_t>(fill), ch.ns()); !fo.done; fo.advance()) {
      double pf = 1.0;
      for (int b : fo.digits) pf *= ch.state_prior()[b];
      if (pf == 0.0) continue;
      std::size_t fi = 0;
      for (int j = 0; j < n; ++j) {
        const int src = j - d_true;
        a[static_cast<std::size_t>(j)] =
            (src >= 0 && src < n) ? s_cur[static_cast<std::size_t>(src)] : fo.digits[fi++];
      }
      for (std::size_t m = 0; m < book.num_messages(); ++m) {
        std::size_t chosen = 0;
        bool covered = false;
        for (std::size_t k = 0; k < book.bin_size(); ++k) {
          if (scheme.covering_ok(book.word(m, k), a)) {
            chosen = k;
            covered = true;
            break;
          }
        }
        (void)covered;
        walk_xy(0, ps * pf / static_cast<double>(book.num_messages()), m, book.word(m, chosen));
      }
      if (fill == 0) break;
    }
  }
  return err;
}

inline double exact_error_acsitr(const StateChannel& ch, const DelaySet& ds,
                                 const StrategyCodebook& book, const StrategyPmf& strat,
                                 int d_true, double epsilon) {
  const int n = book.n();
  detail::AcsitrScheme scheme(ch, ds, strat, n, epsilon);
  if (!ds.contains(d_true)) throw std::invalid_argument("exact_error_acsitr: d not in delay set");

  long leaves = 0;
  double err = 0.0;
  std::vector<int> y(static_cast<std::size_t>(n), 0);
  std::vector<int> s(static_cast<std::size_t>(n));
  auto const_d = [&](int) { return d_true; };

  std::function<void(int, double, std::size_t)> walk_y = [&](int i, double w, std::size_t m) {
    if (w == 0.0) return;
    if (i == scheme.interior_hi) {
      if (++leaves > detail::kOracleBudget) {
        throw GuardError("exact_error_acsitr: enumeration over the 2^28 budget");
      }
      std::optional<std::size_t> found;
      for (std::size_t mm = 0; mm < book.num_messages(); ++mm) {
        auto x_at = [&](int ii) { return book.x(mm, ii, scheme.v_index_at(s, ii)); };
        if (scheme.passes(s, x_at, y, const_d)) {
          if (found.has_value()) {
            found.reset();
            break;
          }
          found = mm;
        }
      }
      if (!found.has_value() || *found != m) err += w;
      return;
    }
    const int xi = book.x(m, i, scheme.v_index_at(s, i));
    const int si = s[static_cast<std::size_t>(i - d_true)];
    for (int yi = 0; yi < ch.ny(); ++yi) {
      const double py = ch.w(yi, xi, si);
      if (py == 0.0) continue;
      y[static_cast<std::size_t>(i)] = yi;
      walk_y(i + 1, w * py, m);
    }
  };

  for (detail::Odometer so(static_cast<std::size_t>(n), ch.ns()); !so.done; so.advance()) {
    s = so.digits;
    const double ps = detail::iid_prob(ch.state_prior(), s);
    if (ps == 0.0) continue;
    for (std::size_t m = 0; m < book.num_messages(); ++m) {
      walk_y(scheme.interior_lo, ps / static_cast<double>(book.num_messages()), m);
    }
  }
  return err;
}

}  // namespace asyncsi
