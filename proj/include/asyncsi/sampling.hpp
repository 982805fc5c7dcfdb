#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "asyncsi/channel.hpp"
#include "asyncsi/pmf.hpp"
#include "asyncsi/rng.hpp"

namespace asyncsi {

// n i.i.d. draws from the state prior. Deterministic given the seed.
inline std::vector<int> sample_states(const StateChannel& ch, int n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample_states: n must be >= 1");
  Rng rng(seed);
  std::vector<int> s(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) s[static_cast<std::size_t>(i)] = rng.sample(ch.state_prior().span());
  return s;
}

// The encoder's observation A^n: the state sequence shifted by d, with
// out-of-block positions filled by fresh i.i.d. draws from the prior.
// In paper indexing, a_j = s_{j-d} wherever 1 <= j-d <= n.
struct DelayedView {
  std::vector<int> a;
  int d = 0;
  std::vector<int> z_fill;  // filler symbols, in order of use
};

inline DelayedView delayed_view(const std::vector<int>& s, int d, const Pmf& prior,
                                std::uint64_t seed) {
  const int n = static_cast<int>(s.size());
  if (d >= n || -d >= n) throw std::invalid_argument("delayed_view: |d| must be < n");
  Rng rng(seed);
  DelayedView dv;
  dv.d = d;
  dv.a.resize(s.size());
  for (int j = 0; j < n; ++j) {
    const int src = j - d;
    if (src >= 0 && src < n) {
      dv.a[static_cast<std::size_t>(j)] = s[static_cast<std::size_t>(src)];
    } else {
      const int z = rng.sample(prior.span());
      dv.a[static_cast<std::size_t>(j)] = z;
      dv.z_fill.push_back(z);
    }
  }
  return dv;
}

// Memoryless transmission y_i ~ W(.|x_i, s_i).
inline std::vector<int> transmit(const StateChannel& ch, const std::vector<int>& x,
                                 const std::vector<int>& s, std::uint64_t seed) {
  if (x.size() != s.size()) throw std::invalid_argument("transmit: length mismatch");
  Rng rng(seed);
  std::vector<int> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    y[i] = rng.sample(ch.row(x[i], s[i]));
  }
  return y;
}

// State sequence extended on both sides by i.i.d. filler, so that shifted
// reads s_{i-d} stay consistent across consumers. Index 0 is s_1 of the
// block; negative indices reach into the left padding.
struct ExtendedStates {
  std::vector<int> data;  // covers [-pad_lo, n-1+pad_hi]
  int pad_lo = 0;
  int n = 0;

  int at(int i) const { return data[static_cast<std::size_t>(i + pad_lo)]; }
  bool in_block(int i) const { return i >= 0 && i < n; }
};

inline ExtendedStates extend_states(const std::vector<int>& s, int pad_lo, int pad_hi,
                                    const Pmf& prior, std::uint64_t seed) {
  if (pad_lo < 0 || pad_hi < 0) throw std::invalid_argument("extend_states: negative padding");
  Rng rng(seed);
  ExtendedStates es;
  es.pad_lo = pad_lo;
  es.n = static_cast<int>(s.size());
  es.data.resize(s.size() + static_cast<std::size_t>(pad_lo) + static_cast<std::size_t>(pad_hi));
  for (int i = 0; i < pad_lo; ++i) es.data[static_cast<std::size_t>(i)] = rng.sample(prior.span());
  std::copy(s.begin(), s.end(), es.data.begin() + pad_lo);
  for (std::size_t i = s.size() + static_cast<std::size_t>(pad_lo); i < es.data.size(); ++i) {
    es.data[i] = rng.sample(prior.span());
  }
  return es;
}

// Shifted-state transmission y_i ~ W(.|x_i, s_{i-d}); out-of-block state
// positions are filled with fresh i.i.d. draws.
inline std::vector<int> transmit_with_delay(const StateChannel& ch, const std::vector<int>& x,
                                            const std::vector<int>& s, int d, std::uint64_t seed) {
  if (x.size() != s.size()) throw std::invalid_argument("transmit_with_delay: length mismatch");
  Rng rng(seed);
  ExtendedStates es = extend_states(s, d > 0 ? d : 0, d < 0 ? -d : 0, ch.state_prior(),
                                    rng.child(0).next_u64());
  Rng noise = rng.child(1);
  std::vector<int> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    y[i] = noise.sample(ch.row(x[i], es.at(static_cast<int>(i) - d)));
  }
  return y;
}

inline std::vector<int> transmit_with_extended(const StateChannel& ch, const std::vector<int>& x,
                                               const ExtendedStates& es, int d,
                                               std::uint64_t seed) {
  if (static_cast<int>(x.size()) != es.n) throw std::invalid_argument("transmit_with_extended: length mismatch");
  Rng rng(seed);
  std::vector<int> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    y[i] = rng.sample(ch.row(x[i], es.at(static_cast<int>(i) - d)));
  }
  return y;
}

// The window sequence v_i = (s_{i-d_max}, ..., s_{i+d_min}). Entry
// d_max - d (0-based) of v_i is s_{i-d}; consecutive windows overlap in
// all but one coordinate. Built from a single extended state sequence so
// the overlap identity holds exactly, boundary included.
struct VSequence {
  int d_min = 0;
  int d_max = 0;
  std::vector<std::vector<int>> v;
  ExtendedStates extended;

  int window_size() const { return d_min + d_max + 1; }
  int index_for_delay(int d) const { return d_max - d; }
};

inline VSequence build_v_sequence(const std::vector<int>& s, const DelaySet& ds, const Pmf& prior,
                                  std::uint64_t seed) {
  if (s.empty()) throw std::invalid_argument("build_v_sequence: empty state sequence");
  VSequence vs;
  vs.d_min = ds.d_min;
  vs.d_max = ds.d_max;
  vs.extended = extend_states(s, ds.d_max, ds.d_min, prior, seed);
  const int n = static_cast<int>(s.size());
  const int window = ds.size();
  vs.v.assign(static_cast<std::size_t>(n), std::vector<int>(static_cast<std::size_t>(window)));
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < window; ++k) {
      vs.v[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] =
          vs.extended.at(i - ds.d_max + k);
    }
  }
  return vs;
}

// Ordering function N(v): mixed-radix value of the window, first entry most
// significant. Used to index strategy-codebook rows.
inline int v_flat_index(std::span<const int> window, int ns) {
  int f = 0;
  for (int sym : window) {
    if (sym < 0 || sym >= ns) throw std::invalid_argument("v_flat_index: symbol out of range");
    f = f * ns + sym;
  }
  return f;
}

}  // namespace asyncsi
