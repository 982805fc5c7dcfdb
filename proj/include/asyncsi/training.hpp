#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "asyncsi/channel.hpp"
#include "asyncsi/sampling.hpp"

namespace asyncsi {

// Training prefix for delay identification: one segment per candidate delay,
// each compensating its own hypothesis, with a fixed symbol map f: A -> X.
struct TrainingPlan {
  DelaySet delays;
  int segment_length = 32;
  std::vector<int> f;  // training map, one input symbol per state symbol

  int length() const { return delays.size() * segment_length; }
  int hypothesis(int i) const { return delays.delays()[static_cast<std::size_t>(i / segment_length)]; }
};

struct DelayEstimate {
  int d_hat = 0;
  bool indistinguishable = false;
  std::map<int, double> scores;
};

namespace training_detail {

constexpr double kLogFloor = 1e-12;

inline double safe_log(double p) { return std::log(p < kLogFloor ? kLogFloor : p); }

}  // namespace training_detail

// Transmit the training block in the observation-delay geometry: the encoder
// sees a delayed state view and sends f(a_{i+h}) in the segment hypothesizing
// delay h; the channel itself runs synchronously on s. Returns the received
// block.
inline std::vector<int> run_training_observation(const StateChannel& ch, const TrainingPlan& plan,
                                                 int d_true, std::uint64_t seed) {
  const int tn = plan.length();
  Rng rng(seed);
  std::vector<int> s = sample_states(ch, tn, rng.child(0).next_u64());
  DelayedView view = delayed_view(s, d_true, ch.state_prior(), rng.child(1).next_u64());
  std::vector<int> x(static_cast<std::size_t>(tn));
  for (int i = 0; i < tn; ++i) {
    const int c = i + plan.hypothesis(i);
    const int a = (c >= 0 && c < tn) ? view.a[static_cast<std::size_t>(c)]
                                     : view.a[static_cast<std::size_t>(i)];
    x[static_cast<std::size_t>(i)] = plan.f[static_cast<std::size_t>(a)];
  }
  return transmit(ch, x, s, rng.child(2).next_u64());
}

// Transmit the training block in the channel-delay geometry (states known to
// both ends, channel applies the delay): x_i = f(s_i). Returns {y, s}.
inline std::pair<std::vector<int>, std::vector<int>> run_training_channel_delay(
    const StateChannel& ch, const TrainingPlan& plan, int d_true, std::uint64_t seed) {
  const int tn = plan.length();
  Rng rng(seed);
  std::vector<int> s = sample_states(ch, tn, rng.child(0).next_u64());
  std::vector<int> x(static_cast<std::size_t>(tn));
  for (int i = 0; i < tn; ++i) x[static_cast<std::size_t>(i)] = plan.f[static_cast<std::size_t>(s[static_cast<std::size_t>(i)])];
  std::vector<int> y = transmit_with_delay(ch, x, s, d_true, rng.child(1).next_u64());
  return {std::move(y), std::move(s)};
}

// Delay estimation. With `s` given (the receiver knows the states), the
// estimate is the argmax over d of the log-likelihood of the whole block
// under the shifted states, with out-of-block shifts marginalized over the
// prior. Without `s`, each segment's outputs are scored under the aligned
// marginal q_sync(y) = sum_a P_S(a) W(y|f(a),a) against the misaligned
// q_async(y) = sum_{a,s} P_S(a) P_S(s) W(y|f(a),s); the winning segment names
// the delay. If the two marginals coincide, the delay has no observable
// effect and the estimate says so instead of guessing.
inline DelayEstimate estimate_delay(const StateChannel& ch, const TrainingPlan& plan,
                                    const std::vector<int>& y_train, const std::vector<int>* s,
                                    std::uint64_t /*seed: reserved, estimation is deterministic*/) {
  if (static_cast<int>(y_train.size()) != plan.length()) {
    throw std::invalid_argument("estimate_delay: y_train length does not match the plan");
  }
  if (static_cast<int>(plan.f.size()) != ch.ns()) {
    throw std::invalid_argument("estimate_delay: training map must cover the state alphabet");
  }
  DelayEstimate est;
  const std::vector<int> delays = plan.delays.delays();

  auto better = [](int cand, int best) {
    return std::abs(cand) < std::abs(best) || (std::abs(cand) == std::abs(best) && cand < best);
  };

  if (s != nullptr) {
    // Receiver-knows-s mode.
    const int tn = plan.length();
    for (int d : delays) {
      double score = 0.0;
      for (int i = 0; i < tn; ++i) {
        const int xi = plan.f[static_cast<std::size_t>((*s)[static_cast<std::size_t>(i)])];
        const int src = i - d;
        double lik;
        if (src >= 0 && src < tn) {
          lik = ch.w(y_train[static_cast<std::size_t>(i)], xi, (*s)[static_cast<std::size_t>(src)]);
        } else {
          lik = 0.0;
          for (int ss = 0; ss < ch.ns(); ++ss) {
            lik += ch.state_prior()[ss] * ch.w(y_train[static_cast<std::size_t>(i)], xi, ss);
          }
        }
        score += training_detail::safe_log(lik);
      }
      est.scores[d] = score;
    }
  } else {
    // Receiver-blind mode.
    std::vector<double> q_sync(static_cast<std::size_t>(ch.ny()), 0.0);
    std::vector<double> q_async(static_cast<std::size_t>(ch.ny()), 0.0);
    for (int a = 0; a < ch.ns(); ++a) {
      const int xa = plan.f[static_cast<std::size_t>(a)];
      for (int y = 0; y < ch.ny(); ++y) {
        q_sync[static_cast<std::size_t>(y)] += ch.state_prior()[a] * ch.w(y, xa, a);
        for (int ss = 0; ss < ch.ns(); ++ss) {
          q_async[static_cast<std::size_t>(y)] +=
              ch.state_prior()[a] * ch.state_prior()[ss] * ch.w(y, xa, ss);
        }
      }
    }
    double tv = 0.0;
    for (int y = 0; y < ch.ny(); ++y) tv += std::abs(q_sync[static_cast<std::size_t>(y)] - q_async[static_cast<std::size_t>(y)]);
    if (tv * 0.5 < 1e-12) {
      est.indistinguishable = true;
      est.d_hat = delays.front();
      for (int d : delays) {
        if (better(d, est.d_hat)) est.d_hat = d;
      }
      return est;
    }
    for (std::size_t k = 0; k < delays.size(); ++k) {
      double llr = 0.0;
      for (int i = static_cast<int>(k) * plan.segment_length;
           i < static_cast<int>(k + 1) * plan.segment_length; ++i) {
        const int y = y_train[static_cast<std::size_t>(i)];
        llr += training_detail::safe_log(q_sync[static_cast<std::size_t>(y)]) -
               training_detail::safe_log(q_async[static_cast<std::size_t>(y)]);
      }
      est.scores[delays[k]] = llr;
    }
  }

  est.d_hat = est.scores.begin()->first;
  double best = est.scores.begin()->second;
  for (const auto& [d, sc] : est.scores) {
    if (sc > best + 1e-12 || (std::abs(sc - best) <= 1e-12 && better(d, est.d_hat))) {
      if (sc > best + 1e-12) best = sc;
      est.d_hat = d;
    }
  }
  return est;
}

}  // namespace asyncsi
