#include <doctest.h>

#include <cmath>
#include <vector>

#include "asyncsi/gp.hpp"
#include "asyncsi/grid.hpp"
#include "asyncsi/no_si.hpp"
#include "asyncsi/pmf.hpp"
#include "asyncsi/theorem1.hpp"

using namespace asyncsi;

TEST_CASE("grid finds vertex maxima of linear objectives") {
  GridSpec spec{{4}, 8};
  const double c[4] = {0.3, -1.0, 2.0, 0.7};
  GridResult g = grid_maximize(
      [&](std::span<const double> p) {
        double v = 0.0;
        for (int i = 0; i < 4; ++i) v += c[i] * p[static_cast<std::size_t>(i)];
        return v;
      },
      spec);
  CHECK(g.value == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(g.argmax[2] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("grid entropy maximum on the binary simplex") {
  GridSpec spec{{2}, 64};
  GridResult g = grid_maximize([](std::span<const double> p) { return entropy_of(p); }, spec);
  CHECK(std::abs(g.value - 1.0) < 1e-3);
  CHECK(g.argmax[0] == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("grid value is monotone in resolution") {
  auto obj = [](std::span<const double> p) { return entropy_of(p); };
  const double v64 = grid_maximize(obj, GridSpec{{3}, 64}).value;
  const double v128 = grid_maximize(obj, GridSpec{{3}, 128}).value;
  CHECK(v128 >= v64 - 1e-12);
}

TEST_CASE("grid guard") {
  GridSpec spec{{8, 8}, 64};
  CHECK_THROWS_AS(spec.check_guard(), GuardError);
  CHECK_THROWS_AS(grid_maximize([](std::span<const double>) { return 0.0; }, spec), GuardError);
}

TEST_CASE("grid agrees with the gp solver on a binary instance") {
  StateChannel ch = StateChannel::xor_binary(0.5);
  SearchConfig cfg;
  cfg.nu = 2;
  cfg.ascent.seed = 5;
  SolveReport r = gp_capacity(ch, cfg);

  detail::Theorem1Machine machine(ch, 2, 1);
  GridSpec spec{machine.blocks(), 16};
  GridResult g = grid_maximize(
      [&](std::span<const double> q) { return machine.value(q); }, spec);
  CHECK(g.value <= r.value + 5e-3);
  CHECK(g.value >= r.value - 5e-3);
}

TEST_CASE("grid agrees with the theorem1 solver on a binary instance") {
  StateChannel ch = StateChannel::xor_binary(0.3);
  SearchConfig cfg;
  cfg.nu = 2;
  cfg.ascent.seed = 6;
  SolveReport r = agp_theorem1_rate(ch, 2, cfg);

  detail::Theorem1Machine machine(ch, 2, 2);
  GridResult g = grid_maximize(
      [&](std::span<const double> q) { return machine.value(q); }, GridSpec{machine.blocks(), 16});
  CHECK(std::abs(g.value - r.value) <= 5e-3);
}

TEST_CASE("solve report serializes to a key/value record") {
  StateChannel bsc(2, 2, 2, {0.9, 0.1, 0.9, 0.1, 0.1, 0.9, 0.1, 0.9}, Pmf::uniform(2));
  SolveReport r = no_si_capacity(bsc);
  const std::string kv = r.to_kv();
  CHECK(kv.find("value=") != std::string::npos);
  CHECK(kv.find("method=blahut-arimoto") != std::string::npos);
  CHECK(kv.find("convergence_gap=") != std::string::npos);
  CHECK(kv.find("argument=") != std::string::npos);
}

TEST_CASE("certification records") {
  StateChannel bsc(2, 2, 2, {0.9, 0.1, 0.9, 0.1, 0.1, 0.9, 0.1, 0.9}, Pmf::uniform(2));
  SolveReport r = no_si_capacity(bsc);
  const std::vector<double> wbar = bsc.averaged();
  auto objective = [&](std::span<const double> p) {
    double mi = 0.0;
    std::vector<double> q(2, 0.0);
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < 2; ++y) q[static_cast<std::size_t>(y)] += p[static_cast<std::size_t>(x)] * wbar[static_cast<std::size_t>(x * 2 + y)];
    for (int x = 0; x < 2; ++x) {
      for (int y = 0; y < 2; ++y) {
        const double j = p[static_cast<std::size_t>(x)] * wbar[static_cast<std::size_t>(x * 2 + y)];
        if (j > 0.0) mi += j * std::log2(j / (p[static_cast<std::size_t>(x)] * q[static_cast<std::size_t>(y)]));
      }
    }
    return mi;
  };

  CertificationRecord pass = certify(r, objective, GridSpec{{2}, 64}, "no_si");
  CHECK(pass.status == "pass");
  CHECK(std::abs(pass.grid_value - (1.0 - binary_entropy(0.1))) < 1e-3);

  // A failed comparison stays failed.
  SolveReport bogus = r;
  bogus.value = 0.1;
  CertificationRecord fail = certify(bogus, objective, GridSpec{{2}, 64}, "no_si");
  CHECK(fail.status == "fail");

  // Oversized grids are reported as uncertified, never silently passed.
  CertificationRecord over = certify(r, objective, GridSpec{{8, 8}, 64}, "no_si");
  CHECK(over.status == "uncertified");
}
