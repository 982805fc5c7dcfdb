#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "asyncsi/errors.hpp"
#include "asyncsi/solve_report.hpp"

namespace asyncsi {

// Exhaustive rational grid over a product of simplexes: every block point has
// coordinates k/resolution. Reproducible and exhaustive, unlike sampling.
struct GridSpec {
  std::vector<int> block_sizes;
  int resolution = 64;

  static constexpr double kMaxPoints = 1e8;

  // Number of grid points: product over blocks of C(res + b - 1, b - 1).
  double total_points() const {
    double total = 1.0;
    for (int b : block_sizes) {
      double c = 1.0;
      for (int i = 1; i < b; ++i) {
        c *= static_cast<double>(resolution + i) / static_cast<double>(i);
      }
      total *= c;
      if (total > 1e18) return total;
    }
    return total;
  }

  void check_guard() const {
    if (block_sizes.empty()) throw GuardError("GridSpec: no blocks");
    if (resolution < 1) throw GuardError("GridSpec: resolution must be >= 1");
    if (total_points() > kMaxPoints) {
      throw GuardError("GridSpec: grid would have " + std::to_string(total_points()) +
                       " points, over the 1e8 guard");
    }
  }
};

struct GridResult {
  double value = -1e300;
  std::vector<double> argmax;
  long evaluations = 0;
  // max |f step| between successively enumerated points, times resolution:
  // a reported (not proven) Lipschitz-style accuracy scale.
  double lipschitz_estimate = 0.0;
};

using GridObjective = std::function<double(std::span<const double>)>;

namespace detail {

struct GridWalker {
  const GridObjective* f = nullptr;
  const GridSpec* spec = nullptr;
  std::vector<double> point;
  std::vector<int> counts;
  GridResult result;
  double prev_value = 0.0;
  bool have_prev = false;

  void run() {
    recurse_block(0, 0);
  }

  void recurse_block(std::size_t block, std::size_t offset) {
    if (block == spec->block_sizes.size()) {
      evaluate();
      return;
    }
    recurse_cell(block, offset, 0, spec->resolution);
  }

  void recurse_cell(std::size_t block, std::size_t offset, int cell, int remaining) {
    const int b = spec->block_sizes[block];
    if (cell == b - 1) {
      counts[offset + static_cast<std::size_t>(cell)] = remaining;
      point[offset + static_cast<std::size_t>(cell)] =
          static_cast<double>(remaining) / spec->resolution;
      recurse_block(block + 1, offset + static_cast<std::size_t>(b));
      return;
    }
    for (int k = remaining; k >= 0; --k) {
      counts[offset + static_cast<std::size_t>(cell)] = k;
      point[offset + static_cast<std::size_t>(cell)] = static_cast<double>(k) / spec->resolution;
      recurse_cell(block, offset, cell + 1, remaining - k);
    }
  }

  void evaluate() {
    const double v = (*f)(point);
    ++result.evaluations;
    if (have_prev) {
      const double step = std::abs(v - prev_value) * spec->resolution;
      if (step > result.lipschitz_estimate) result.lipschitz_estimate = step;
    }
    prev_value = v;
    have_prev = true;
    if (v > result.value) {
      result.value = v;
      result.argmax = point;
    }
  }
};

}  // namespace detail

inline GridResult grid_maximize(const GridObjective& f, const GridSpec& spec) {
  spec.check_guard();
  detail::GridWalker w;
  w.f = &f;
  w.spec = &spec;
  std::size_t dim = 0;
  for (int b : spec.block_sizes) dim += static_cast<std::size_t>(b);
  w.point.assign(dim, 0.0);
  w.counts.assign(dim, 0);
  w.run();
  return w.result;
}

// Certification outcome. `status` is "pass", "fail" or "uncertified"; an
// oversized grid is reported as uncertified, never as a silent pass.
struct CertificationRecord {
  std::string quantity;
  double solver_value = 0.0;
  double grid_value = 0.0;
  double abs_diff = 0.0;
  double tolerance = 5e-3;
  std::string status;
  long grid_evaluations = 0;

  static std::string csv_header() {
    return "quantity,solver_value,grid_value,abs_diff,tolerance,status,grid_evaluations";
  }
  std::string to_csv_row() const {
    return quantity + "," + format_rate(solver_value) + "," + format_rate(grid_value) + "," +
           format_rate(abs_diff) + "," + format_rate(tolerance) + "," + status + "," +
           std::to_string(grid_evaluations);
  }
};

// Re-runs the matching objective on the grid and compares with the solver
// value at `tolerance`. A failed comparison is never upgraded.
inline CertificationRecord certify(const SolveReport& report, const GridObjective& objective,
                                   const GridSpec& spec, const std::string& quantity,
                                   double tolerance = 5e-3) {
  CertificationRecord rec;
  rec.quantity = quantity;
  rec.solver_value = report.value;
  rec.tolerance = tolerance;
  try {
    GridResult g = grid_maximize(objective, spec);
    rec.grid_value = g.value;
    rec.abs_diff = std::abs(g.value - report.value);
    rec.grid_evaluations = g.evaluations;
    rec.status = rec.abs_diff <= tolerance ? "pass" : "fail";
  } catch (const GuardError&) {
    rec.status = "uncertified";
    rec.grid_value = std::numeric_limits<double>::quiet_NaN();
    rec.abs_diff = std::numeric_limits<double>::quiet_NaN();
  }
  return rec;
}

}  // namespace asyncsi
