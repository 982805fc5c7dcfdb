#include <doctest.h>

#include <cmath>
#include <vector>

#include "asyncsi/bsagp.hpp"
#include "asyncsi/gp.hpp"
#include "asyncsi/no_si.hpp"
#include "asyncsi/theorem1.hpp"
#include "asyncsi/xor_process.hpp"
#include "test_util.hpp"

using namespace asyncsi;

namespace {

AuxDistribution xor_compensating_aux() {
  // U uniform, X = U xor A.
  std::vector<double> q(8, 0.0);
  for (int a = 0; a < 2; ++a)
    for (int u = 0; u < 2; ++u) q[static_cast<std::size_t>((a * 2 + u) * 2 + (u ^ a))] = 0.5;
  return AuxDistribution(2, 2, 2, std::move(q));
}

}  // namespace

TEST_CASE("gp objective values") {
  StateChannel ch = StateChannel::xor_binary(0.5);
  CHECK(gp_objective(ch, xor_compensating_aux()) == doctest::Approx(1.0).epsilon(1e-12));

  // Constant U carries nothing.
  std::vector<double> qconst(8, 0.0);
  for (int a = 0; a < 2; ++a) {
    qconst[static_cast<std::size_t>((a * 2 + 0) * 2 + 0)] = 0.5;
    qconst[static_cast<std::size_t>((a * 2 + 0) * 2 + 1)] = 0.5;
  }
  AuxDistribution uconst(2, 2, 2, std::move(qconst));
  CHECK(gp_objective(ch, uconst) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("gp capacity on the xor channel") {
  StateChannel ch = StateChannel::xor_binary(0.5);
  SearchConfig cfg;
  cfg.nu = 2;
  cfg.ascent.seed = 2024;
  SolveReport r = gp_capacity(ch, cfg);
  CHECK(r.value == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(r.grid_certified);
  // Evaluator/maximizer split: reported value is the objective at the argmax.
  AuxDistribution arg(cfg.nu, 2, 2, r.argument);
  CHECK(r.value == doctest::Approx(gp_objective(ch, arg)).epsilon(1e-10));
}

TEST_CASE("gp capacity of a useless channel") {
  // Output ignores (x, s) entirely.
  StateChannel useless(2, 2, 2, {0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5}, Pmf::uniform(2));
  SearchConfig cfg;
  cfg.nu = 2;
  cfg.ascent.starts = 16;
  SolveReport r = gp_capacity(useless, cfg);
  CHECK(std::abs(r.value) < 1e-6);
}

TEST_CASE("theorem1 reduces to gp at D=1") {
  Rng rng(1234);
  StateChannel ch = StateChannel::xor_binary(0.5);
  for (int t = 0; t < 100; ++t) {
    AuxDistribution aux = AuxDistribution::random(3, 2, 2, rng);
    CHECK(std::abs(theorem1_objective(ch, 1, aux) - gp_objective(ch, aux)) < 1e-12);
  }
  // Also on a non-binary random channel.
  StateChannel rc = testutil::random_channel(2, 3, 2, rng);
  for (int t = 0; t < 100; ++t) {
    AuxDistribution aux = AuxDistribution::random(4, 2, 3, rng);
    CHECK(std::abs(theorem1_objective(rc, 1, aux) - gp_objective(rc, aux)) < 1e-12);
  }
}

TEST_CASE("theorem1 rate on the binary symmetric AGP channel") {
  StateChannel ch = StateChannel::xor_binary(0.5);
  SearchConfig cfg;
  cfg.ascent.seed = 7;

  SolveReport d2 = agp_theorem1_rate(ch, 2, cfg);
  CHECK(d2.value == doctest::Approx(0.5).epsilon(1e-3));

  SolveReport d4 = agp_theorem1_rate(ch, 4, cfg);
  CHECK(d4.value == doctest::Approx(0.25).epsilon(1e-3));

  // Evaluator/maximizer split.
  AuxDistribution arg(4, 2, 2, d2.argument);
  CHECK(d2.value == doctest::Approx(theorem1_objective(ch, 2, arg)).epsilon(1e-10));
}

TEST_CASE("rate ordering chain") {
  Rng rng(555);
  for (int t = 0; t < 3; ++t) {
    StateChannel ch = testutil::random_channel(2, 2, 2, rng);
    SolveReport nosi = no_si_capacity(ch);

    SearchConfig cfg;
    cfg.ascent.seed = 100 + static_cast<std::uint64_t>(t);
    cfg.ascent.starts = 32;
    const int d_size = 2;

    // Warm start embedding the no-SI maximizer: U = X independent of A,
    // padded with unused auxiliary symbols up to the default |U| = 4.
    std::vector<double> no_adapt(2 * 4 * 2, 0.0);
    for (int a = 0; a < 2; ++a) {
      for (int u = 0; u < 2; ++u) {
        no_adapt[static_cast<std::size_t>((a * 4 + u) * 2 + u)] = nosi.argument[static_cast<std::size_t>(u)];
      }
    }
    SearchConfig t1cfg = cfg;
    t1cfg.ascent.warm_starts.push_back(no_adapt);
    SolveReport t1 = agp_theorem1_rate(ch, d_size, t1cfg);
    CHECK(nosi.value <= t1.value + 1e-6);

    // GP dominates Theorem 1: warm-start GP from the Theorem-1 argmax and
    // from its state-blind mixture (which turns p1 into p2).
    AuxDistribution t1arg(4, 2, 2, t1.argument);
    std::vector<double> blind(t1.argument.size(), 0.0);
    for (int a = 0; a < 2; ++a) {
      for (int i = 0; i < 8; ++i) {
        double mix = 0.0;
        for (int ap = 0; ap < 2; ++ap) {
          mix += ch.state_prior()[ap] * t1.argument[static_cast<std::size_t>(ap * 8 + i)];
        }
        blind[static_cast<std::size_t>(a * 8 + i)] = mix;
      }
    }
    SearchConfig gpcfg = cfg;
    gpcfg.ascent.warm_starts.push_back(t1.argument);
    gpcfg.ascent.warm_starts.push_back(blind);
    SolveReport gp = gp_capacity(ch, gpcfg);
    CHECK(t1.value <= gp.value + 1e-6);
  }
}

TEST_CASE("bsagp closed form") {
  CHECK(bsagp_closed_form(0.5) == 0.5);
  CHECK(bsagp_closed_form(0.0) == 1.0);
  CHECK(bsagp_closed_form(1.0) == 1.0);
  CHECK(bsagp_closed_form(0.1) == doctest::Approx(0.6600).epsilon(1e-3));
  CHECK_THROWS_AS(bsagp_closed_form(-0.1), std::invalid_argument);
  CHECK_THROWS_AS(bsagp_closed_form(1.5), std::invalid_argument);
}

namespace {

// Independent route to H(K^n): group the 2^n sequences by the weight of
// their prefix-xor path. P(k^n) depends only on that weight w, and exactly
// C(n, w) sequences share it.
double xor_block_entropy_by_weight(double p, int n) {
  double h = 0.0;
  double binom = 1.0;
  for (int w = 0; w <= n; ++w) {
    const double pw = (1.0 - p) * std::pow(p, w) * std::pow(1.0 - p, n - w) +
                      p * std::pow(p, n - w) * std::pow(1.0 - p, w);
    h -= binom * plog2p(pw);
    binom = binom * (n - w) / (w + 1);
  }
  return h;
}

}  // namespace

TEST_CASE("xor process entropy rate") {
  // p = 1/2: the difference process is i.i.d. fair bits.
  XorProcessResult half = xor_process_entropy_rate(0.5, 10);
  for (double h : half.conditional_entropies) CHECK(h == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(half.capacity_estimate == doctest::Approx(0.5).epsilon(1e-12));

  // p = 0: constant states, zero entropy.
  XorProcessResult zero = xor_process_entropy_rate(0.0, 8);
  for (double h : zero.conditional_entropies) CHECK(h == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(zero.capacity_estimate == doctest::Approx(1.0).epsilon(1e-12));

  // p = 0.25: the estimate exceeds the single-letter closed form strictly.
  XorProcessResult q = xor_process_entropy_rate(0.25, 16);
  CHECK(q.capacity_estimate > bsagp_closed_form(0.25) + 1e-3);

  // Conditional entropies are non-increasing (data processing), exactly.
  for (std::size_t i = 1; i < q.conditional_entropies.size(); ++i) {
    CHECK(q.conditional_entropies[i] <= q.conditional_entropies[i - 1] + 1e-12);
  }

  // Cross-check the enumeration against the weight-grouped closed form.
  XorProcessResult chk = xor_process_entropy_rate(0.3, 12);
  double block_entropy = 0.0;
  for (int n = 1; n <= 12; ++n) {
    block_entropy += chk.conditional_entropies[static_cast<std::size_t>(n - 1)];
    CHECK(block_entropy == doctest::Approx(xor_block_entropy_by_weight(0.3, n)).epsilon(1e-9));
  }

  CHECK_THROWS_AS(xor_process_entropy_rate(0.3, 1), GuardError);
  CHECK_THROWS_AS(xor_process_entropy_rate(0.3, 25), GuardError);
}

TEST_CASE("no-SI capacity") {
  // XOR channel with Bernoulli(p) state averages to a BSC(p).
  for (double p : {0.1, 0.3}) {
    StateChannel ch = StateChannel::xor_binary(p);
    SolveReport r = no_si_capacity(ch);
    CHECK(r.value == doctest::Approx(1.0 - binary_entropy(p)).epsilon(1e-8));
    CHECK(r.convergence_gap < 1e-9);
    CHECK(r.converged);
  }

  // Noiseless channel that ignores the state: log2 |X|.
  StateChannel ident(2, 2, 2, {1, 0, 1, 0, 0, 1, 0, 1}, Pmf::uniform(2));
  CHECK(no_si_capacity(ident).value == doctest::Approx(1.0).epsilon(1e-9));

  // Uniform state erases the input on the XOR channel.
  StateChannel dead = StateChannel::xor_binary(0.5);
  CHECK(no_si_capacity(dead).value == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("feedback capacity equals synchronous GP") {
  StateChannel ch = StateChannel::xor_binary(0.5);
  SearchConfig cfg;
  cfg.nu = 2;
  cfg.ascent.seed = 3;
  SolveReport r = agp_feedback_capacity(ch, cfg);
  CHECK(r.value == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(r.method.find("feedback") != std::string::npos);

  // State-independent channel: equals the no-SI capacity.
  StateChannel bsc(2, 2, 2, {0.9, 0.1, 0.9, 0.1, 0.1, 0.9, 0.1, 0.9}, Pmf::uniform(2));
  SearchConfig cfg2;
  cfg2.nu = 2;
  cfg2.ascent.starts = 24;
  cfg2.ascent.seed = 4;
  SolveReport fb = agp_feedback_capacity(bsc, cfg2);
  SolveReport nosi = no_si_capacity(bsc);
  CHECK(fb.value == doctest::Approx(nosi.value).epsilon(1e-4));

  // Useless channel: zero.
  StateChannel useless(2, 2, 2, std::vector<double>(8, 0.5), Pmf::uniform(2));
  SearchConfig cfg3;
  cfg3.nu = 2;
  cfg3.ascent.starts = 8;
  CHECK(std::abs(agp_feedback_capacity(useless, cfg3).value) < 1e-6);
}
