#include <doctest.h>

#include <cmath>
#include <vector>

#include "asyncsi/aux_dist.hpp"
#include "asyncsi/channel.hpp"
#include "asyncsi/pair_laws.hpp"
#include "asyncsi/sampling.hpp"
#include "test_util.hpp"

using namespace asyncsi;

TEST_CASE("state channel validation") {
  CHECK_THROWS_AS(StateChannel(2, 2, 2, std::vector<double>(8, 0.4), Pmf::uniform(2)),
                  std::invalid_argument);
  StateChannel ok = StateChannel::xor_binary(0.5);
  CHECK(ok.w(1, 0, 1) == 1.0);
  CHECK(ok.w(0, 0, 1) == 0.0);
  auto wbar = ok.averaged();
  CHECK(wbar[0] == doctest::Approx(0.5));
  CHECK(wbar[1] == doctest::Approx(0.5));
}

TEST_CASE("delay set") {
  DelaySet ds(1, 2);
  CHECK(ds.size() == 4);
  CHECK(ds.contains(-1));
  CHECK(ds.contains(0));
  CHECK(ds.contains(2));
  CHECK_FALSE(ds.contains(-2));
  CHECK_FALSE(ds.contains(3));
  CHECK(ds.delays() == std::vector<int>{-1, 0, 1, 2});
  CHECK_THROWS_AS(DelaySet(-1, 0), std::invalid_argument);
}

TEST_CASE("sample_states") {
  StateChannel point(2, 2, 2, {1, 0, 0, 1, 0, 1, 1, 0}, Pmf::point_mass(2, 1));
  auto s = sample_states(point, 100, 5);
  for (int v : s) CHECK(v == 1);

  StateChannel fair = StateChannel::xor_binary(0.5);
  auto big = sample_states(fair, 100000, 7);
  double mean = 0.0;
  for (int v : big) mean += v;
  mean /= static_cast<double>(big.size());
  CHECK(mean > 0.49);
  CHECK(mean < 0.51);

  CHECK(sample_states(fair, 1000, 42) == sample_states(fair, 1000, 42));
  CHECK(sample_states(fair, 1000, 42) != sample_states(fair, 1000, 43));
  CHECK_THROWS_AS(sample_states(fair, 0, 1), std::invalid_argument);
}

TEST_CASE("delayed_view shifts") {
  StateChannel ch = StateChannel::xor_binary(0.5);
  auto s = sample_states(ch, 32, 9);

  auto d0 = delayed_view(s, 0, ch.state_prior(), 1);
  CHECK(d0.a == s);
  CHECK(d0.z_fill.empty());

  auto d1 = delayed_view(s, 1, ch.state_prior(), 2);
  CHECK(d1.z_fill.size() == 1);
  CHECK(d1.a[0] == d1.z_fill[0]);
  for (int j = 1; j < 32; ++j) CHECK(d1.a[static_cast<std::size_t>(j)] == s[static_cast<std::size_t>(j - 1)]);

  auto dm1 = delayed_view(s, -1, ch.state_prior(), 3);
  CHECK(dm1.z_fill.size() == 1);
  for (int j = 0; j < 31; ++j) CHECK(dm1.a[static_cast<std::size_t>(j)] == s[static_cast<std::size_t>(j + 1)]);
  CHECK(dm1.a[31] == dm1.z_fill[0]);

  CHECK_THROWS_AS(delayed_view(s, 32, ch.state_prior(), 1), std::invalid_argument);

  // Marginal law of A^n stays i.i.d. P_S under any delay.
  StateChannel biased = StateChannel::xor_binary(0.3);
  auto sb = sample_states(biased, 100000, 11);
  for (int d : {-2, 1, 3}) {
    auto view = delayed_view(sb, d, biased.state_prior(), 12 + static_cast<std::uint64_t>(d + 2));
    double ones = 0.0;
    for (int v : view.a) ones += v;
    ones /= static_cast<double>(view.a.size());
    CHECK(std::abs(ones - 0.3) < 0.01);
  }
}

TEST_CASE("transmit") {
  StateChannel ch = StateChannel::xor_binary(0.5);
  std::vector<int> x = {0, 1};
  std::vector<int> s = {1, 1};
  CHECK(transmit(ch, x, s, 1) == std::vector<int>{1, 0});

  // Noiseless identity channel (ignores the state).
  StateChannel ident(2, 2, 2, {1, 0, 1, 0, 0, 1, 0, 1}, Pmf::uniform(2));
  auto xs = sample_states(ch, 64, 3);
  CHECK(transmit(ident, xs, xs, 4) == xs);

  CHECK_THROWS_AS(transmit(ch, x, std::vector<int>{1}, 1), std::invalid_argument);

  // BSC embedded in the state channel: flip rate concentrates near p.
  const double p = 0.2;
  StateChannel bsc(2, 2, 2, {1 - p, p, 1 - p, p, p, 1 - p, p, 1 - p}, Pmf::uniform(2));
  const int n = 100000;
  std::vector<int> zeros(static_cast<std::size_t>(n), 0);
  auto sseq = sample_states(bsc, n, 5);
  auto y = transmit(bsc, zeros, sseq, 6);
  double flips = 0.0;
  for (int v : y) flips += v;
  flips /= n;
  CHECK(std::abs(flips - p) < 0.01);
}

TEST_CASE("transmit_with_delay") {
  StateChannel ch = StateChannel::xor_binary(0.5);
  const int n = 100000;
  auto s = sample_states(ch, n, 21);
  std::vector<int> x(static_cast<std::size_t>(n), 0);

  // d = 0 matches transmit in law: compare empirical output frequencies.
  auto y0 = transmit_with_delay(ch, x, s, 0, 22);
  auto y1 = transmit(ch, x, s, 23);
  double f0 = 0.0, f1 = 0.0;
  for (int i = 0; i < n; ++i) {
    f0 += y0[static_cast<std::size_t>(i)];
    f1 += y1[static_cast<std::size_t>(i)];
  }
  CHECK(std::abs(f0 / n - f1 / n) < 0.01);

  // Exact shift on the XOR channel: y_i = x_i xor s_{i-1} from the second
  // symbol on (0-based index 1).
  auto small_s = sample_states(ch, 64, 31);
  std::vector<int> xs(64);
  for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = static_cast<int>(i % 2);
  auto yd = transmit_with_delay(ch, xs, small_s, 1, 32);
  for (int i = 1; i < 64; ++i) {
    CHECK(yd[static_cast<std::size_t>(i)] == (xs[static_cast<std::size_t>(i)] ^ small_s[static_cast<std::size_t>(i - 1)]));
  }

  // Constant state: the delay cannot matter anywhere.
  StateChannel constant(2, 2, 2, {1, 0, 0, 1, 0, 1, 1, 0}, Pmf::point_mass(2, 1));
  auto cs = sample_states(constant, 32, 1);
  std::vector<int> xc(xs.begin(), xs.begin() + 32);
  auto ya = transmit_with_delay(constant, xc, cs, 2, 2);
  auto yb = transmit(constant, xc, cs, 3);
  CHECK(ya == yb);
}

TEST_CASE("v sequence") {
  StateChannel ch = StateChannel::xor_binary(0.5);

  // Singleton window: v_i = (s_i).
  auto s3 = std::vector<int>{1, 0, 1};
  auto vs0 = build_v_sequence(s3, DelaySet(0, 0), ch.state_prior(), 1);
  for (int i = 0; i < 3; ++i) {
    CHECK(vs0.v[static_cast<std::size_t>(i)] == std::vector<int>{s3[static_cast<std::size_t>(i)]});
  }

  // Window {0,1}: v_i = (s_{i-1}, s_i) with one filler on the left.
  auto vs1 = build_v_sequence(s3, DelaySet(0, 1), ch.state_prior(), 2);
  const int z = vs1.extended.at(-1);
  CHECK(vs1.v[0] == std::vector<int>{z, 1});
  CHECK(vs1.v[1] == std::vector<int>{1, 0});
  CHECK(vs1.v[2] == std::vector<int>{0, 1});
  CHECK(vs1.index_for_delay(1) == 0);
  CHECK(vs1.index_for_delay(0) == 1);

  // Overlap invariant holds on every index for a random sequence.
  auto sr = sample_states(ch, 200, 77);
  DelaySet ds(2, 3);
  auto vsr = build_v_sequence(sr, ds, ch.state_prior(), 3);
  for (std::size_t i = 0; i + 1 < vsr.v.size(); ++i) {
    for (int k = 1; k < ds.size(); ++k) {
      CHECK(vsr.v[i][static_cast<std::size_t>(k)] == vsr.v[i + 1][static_cast<std::size_t>(k - 1)]);
    }
  }
  // Selector: entry d_max - d of v_i is s_{i-d} wherever in range.
  for (int d = -ds.d_min; d <= ds.d_max; ++d) {
    for (int i = 0; i < 200; ++i) {
      const int src = i - d;
      if (src < 0 || src >= 200) continue;
      CHECK(vsr.v[static_cast<std::size_t>(i)][static_cast<std::size_t>(vsr.index_for_delay(d))] ==
            sr[static_cast<std::size_t>(src)]);
    }
  }

  CHECK(v_flat_index(std::vector<int>{1, 0}, 2) == 2);
  CHECK(v_flat_index(std::vector<int>{1, 1}, 2) == 3);
}

TEST_CASE("pair laws") {
  StateChannel ch = StateChannel::xor_binary(0.5);

  // X independent of A with U = X: synchrony is irrelevant, p1 = p2.
  {
    AuxDistribution aux = AuxDistribution::identity_ignoring_state(2, 2, {0.4, 0.6});
    JointPmf p1 = synced_pair_pmf(ch, aux);
    JointPmf p2 = product_pair_pmf(ch, aux);
    for (std::size_t c = 0; c < p1.probs().size(); ++c) {
      CHECK(p1.probs()[c] == doctest::Approx(p2.probs()[c]).epsilon(1e-14));
    }
  }

  // The explicit scheme: U uniform, X = U xor A. Synced output is exactly U;
  // the product law is uniform on both coordinates.
  {
    std::vector<double> q(8, 0.0);
    for (int a = 0; a < 2; ++a)
      for (int u = 0; u < 2; ++u) q[static_cast<std::size_t>((a * 2 + u) * 2 + (u ^ a))] = 0.5;
    AuxDistribution aux(2, 2, 2, std::move(q));
    JointPmf p1 = synced_pair_pmf(ch, aux);
    JointPmf p2 = product_pair_pmf(ch, aux);
    for (int u = 0; u < 2; ++u) {
      for (int y = 0; y < 2; ++y) {
        const int idx[2] = {u, y};
        CHECK(p1.at(idx) == doctest::Approx(u == y ? 0.5 : 0.0).epsilon(1e-14));
        CHECK(p2.at(idx) == doctest::Approx(0.25).epsilon(1e-14));
      }
    }
  }

  // A channel that ignores the state: p1 = p2 for any aux.
  {
    Rng rng(5);
    StateChannel ignore(2, 2, 2, {0.7, 0.3, 0.7, 0.3, 0.1, 0.9, 0.1, 0.9}, Pmf::uniform(2));
    for (int t = 0; t < 20; ++t) {
      AuxDistribution aux = AuxDistribution::random(3, 2, 2, rng);
      JointPmf p1 = synced_pair_pmf(ignore, aux);
      JointPmf p2 = product_pair_pmf(ignore, aux);
      for (std::size_t c = 0; c < p1.probs().size(); ++c) {
        CHECK(p1.probs()[c] == doctest::Approx(p2.probs()[c]).epsilon(1e-13));
      }
    }
  }

  // Both laws sum to one and share the U-marginal.
  {
    Rng rng(6);
    for (int t = 0; t < 20; ++t) {
      StateChannel rc = testutil::random_channel(2, 3, 2, rng);
      AuxDistribution aux = AuxDistribution::random(4, 2, 3, rng);
      JointPmf p1 = synced_pair_pmf(rc, aux);
      JointPmf p2 = product_pair_pmf(rc, aux);
      double s1 = 0.0, s2 = 0.0;
      for (double v : p1.probs()) s1 += v;
      for (double v : p2.probs()) s2 += v;
      CHECK(std::abs(s1 - 1.0) < 1e-12);
      CHECK(std::abs(s2 - 1.0) < 1e-12);
      JointPmf m1 = marginalize(p1, {0});
      JointPmf m2 = marginalize(p2, {0});
      for (int u = 0; u < 4; ++u) {
        const int iu[1] = {u};
        CHECK(std::abs(m1.at(iu) - m2.at(iu)) < 1e-12);
      }
    }
  }

  // Dimension mismatch is rejected.
  AuxDistribution wrong = AuxDistribution::identity_ignoring_state(2, 3, {0.5, 0.5});
  CHECK_THROWS_AS(synced_pair_pmf(ch, wrong), std::invalid_argument);
}

TEST_CASE("aux distribution cardinality bound") {
  CHECK_THROWS_AS(AuxDistribution(5, 2, 2, std::vector<double>(20, 0.05)), std::invalid_argument);
}
