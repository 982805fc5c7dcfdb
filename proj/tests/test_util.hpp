#pragma once

#include <cmath>
#include <vector>

#include "asyncsi/channel.hpp"
#include "asyncsi/joint_pmf.hpp"
#include "asyncsi/rng.hpp"

namespace testutil {

// Dirichlet(1) random joint over the given axis sizes.
inline asyncsi::JointPmf random_joint(const std::vector<asyncsi::Axis>& axes, asyncsi::Rng& rng) {
  std::size_t cells = 1;
  for (const auto& a : axes) cells *= static_cast<std::size_t>(a.size);
  std::vector<double> p(cells);
  double sum = 0.0;
  for (double& v : p) {
    v = -std::log(1.0 - rng.next_double());
    sum += v;
  }
  for (double& v : p) v /= sum;
  return asyncsi::JointPmf(axes, std::move(p));
}

inline std::vector<double> random_simplex(std::size_t cells, asyncsi::Rng& rng) {
  std::vector<double> p(cells);
  double sum = 0.0;
  for (double& v : p) {
    v = -std::log(1.0 - rng.next_double());
    sum += v;
  }
  for (double& v : p) v /= sum;
  return p;
}

// Random state channel with Dirichlet rows and a Dirichlet state prior.
inline asyncsi::StateChannel random_channel(int nx, int ns, int ny, asyncsi::Rng& rng) {
  std::vector<double> w;
  w.reserve(static_cast<std::size_t>(nx) * ns * ny);
  for (int r = 0; r < nx * ns; ++r) {
    auto row = random_simplex(static_cast<std::size_t>(ny), rng);
    w.insert(w.end(), row.begin(), row.end());
  }
  return asyncsi::StateChannel(nx, ns, ny, std::move(w),
                               asyncsi::Pmf(random_simplex(static_cast<std::size_t>(ns), rng)));
}

}  // namespace testutil
