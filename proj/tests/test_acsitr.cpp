#include <doctest.h>

#include <cmath>
#include <vector>

#include "asyncsi/acsitr.hpp"
#include "asyncsi/grid.hpp"
#include "asyncsi/no_si.hpp"
#include "test_util.hpp"

using namespace asyncsi;

namespace {

// Z-channel / S-channel pair with trivial state: the compound optimum is the
// crossing point of the two mutual informations, a genuinely mixed saddle.
StateChannel z_channel() {
  return StateChannel(2, 1, 2, {1.0, 0.0, 0.5, 0.5}, Pmf::uniform(1));
}
StateChannel s_channel() {
  return StateChannel(2, 1, 2, {0.5, 0.5, 0.0, 1.0}, Pmf::uniform(1));
}

double min_objective_over_delays(const StateChannel& ch, const DelaySet& ds,
                                 const StrategyPmf& strat) {
  double worst = 1e300;
  for (int d : ds.delays()) worst = std::min(worst, acsitr_objective(ch, ds, strat, d));
  return worst;
}

}  // namespace

TEST_CASE("acsitr objective on the xor channel") {
  StateChannel ch = StateChannel::xor_binary(0.5);
  DelaySet ds(0, 1);
  StrategyPmf uniform = StrategyPmf::uniform(4, 2);
  // Under the window both hypotheses make the channel a bijection.
  CHECK(acsitr_objective(ch, ds, uniform, 0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(acsitr_objective(ch, ds, uniform, 1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(acsitr_objective(ch, ds, uniform, 2), std::invalid_argument);
}

TEST_CASE("acsitr capacity of the xor channel is one bit") {
  StateChannel ch = StateChannel::xor_binary(0.5);
  for (const DelaySet& ds : {DelaySet(0, 1), DelaySet(1, 1)}) {
    SolveReport r = acsitr_capacity(ch, ds);
    CHECK(r.value == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(r.convergence_gap < 1e-6);
    CHECK(r.converged);
    // Evaluator/maximizer split.
    StrategyPmf strat = strategy_from_report(ch, ds, r);
    CHECK(r.value == doctest::Approx(min_objective_over_delays(ch, ds, strat)).epsilon(1e-10));
  }
}

TEST_CASE("acsitr capacity of the noisy xor channel") {
  const double q = 0.1;
  StateChannel ch = StateChannel::xor_noisy(0.5, q);
  for (const DelaySet& ds : {DelaySet(0, 0), DelaySet(0, 1), DelaySet(1, 1)}) {
    SolveReport r = acsitr_capacity(ch, ds);
    CHECK(r.value == doctest::Approx(1.0 - binary_entropy(q)).epsilon(1e-6));
    CHECK(r.convergence_gap < 1e-6);
  }
}

TEST_CASE("acsitr singleton delay reduces to synchronous two-sided SI") {
  // max_{p(x|s)} I(X;Y|S) with an s-dependent channel; certified against the
  // exhaustive grid (one simplex per state value).
  StateChannel ch(2, 2, 2, {0.9, 0.1, 1.0, 0.0, 0.1, 0.9, 0.5, 0.5}, Pmf({0.4, 0.6}));
  DelaySet ds(0, 0);
  SolveReport r = acsitr_capacity(ch, ds);
  CHECK(r.convergence_gap < 1e-6);

  GridSpec spec{{2, 2}, 64};
  GridResult g = grid_maximize(
      [&](std::span<const double> p) {
        StrategyPmf strat(2, 2, std::vector<double>(p.begin(), p.end()));
        return acsitr_objective(ch, ds, strat, 0);
      },
      spec);
  CHECK(std::abs(g.value - r.value) < 5e-3);
}

TEST_CASE("acsitr capacity is monotone as the delay set grows") {
  Rng rng(271);
  StateChannel rc = testutil::random_channel(2, 2, 2, rng);
  const double v1 = acsitr_capacity(rc, DelaySet(0, 0)).value;
  const double v2 = acsitr_capacity(rc, DelaySet(0, 1)).value;
  const double v3 = acsitr_capacity(rc, DelaySet(1, 1)).value;
  CHECK(v1 + 1e-6 >= v2);
  CHECK(v2 + 1e-6 >= v3);
}

TEST_CASE("maximin certificate") {
  StateChannel ch = StateChannel::xor_noisy(0.5, 0.2);
  DelaySet ds(1, 1);
  SolveReport r = acsitr_capacity(ch, ds);
  StrategyPmf strat = strategy_from_report(ch, ds, r);
  double worst = 1e300, bestd = -1e300;
  for (int d : ds.delays()) {
    const double v = acsitr_objective(ch, ds, strat, d);
    worst = std::min(worst, v);
    bestd = std::max(bestd, v);
  }
  // The spread across delays at the optimum bounds the gap from above.
  CHECK(r.convergence_gap <= bestd - worst + 1e-9);
  CHECK(r.convergence_gap < 1e-6);
}

TEST_CASE("compound capacity basics") {
  StateChannel bsc1(2, 1, 2, {0.9, 0.1, 0.1, 0.9}, Pmf::uniform(1));
  StateChannel bsc2(2, 1, 2, {0.8, 0.2, 0.2, 0.8}, Pmf::uniform(1));

  SolveReport single = compound_capacity({bsc1});
  CHECK(single.value == doctest::Approx(1.0 - binary_entropy(0.1)).epsilon(1e-7));

  SolveReport twin = compound_capacity({bsc2, bsc2});
  CHECK(twin.value == doctest::Approx(1.0 - binary_entropy(0.2)).epsilon(1e-7));

  SolveReport both = compound_capacity({bsc1, bsc2});
  CHECK(both.value == doctest::Approx(1.0 - binary_entropy(0.2)).epsilon(1e-7));
  CHECK(both.convergence_gap < 1e-6);

  StateChannel bigger(3, 1, 2, {1, 0, 0, 1, 0.5, 0.5}, Pmf::uniform(1));
  CHECK_THROWS_AS(compound_capacity({bsc1, bigger}), std::invalid_argument);
}

TEST_CASE("compound capacity with a genuinely mixed saddle") {
  // Z vs S channel: the worst-case mixture is interior, so this exercises
  // the multiplicative-weights loop and the dual refinement.
  SolveReport r = compound_capacity({z_channel(), s_channel()});
  CHECK(r.value == doctest::Approx(binary_entropy(0.25) - 0.5).epsilon(1e-5));
  CHECK(r.convergence_gap < 1e-6);
  CHECK(r.converged);
}
