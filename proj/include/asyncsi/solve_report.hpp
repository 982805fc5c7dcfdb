#pragma once

#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

namespace asyncsi {

// Machine-readable rate formatting: 12 significant digits everywhere.
inline std::string format_rate(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

// Result of a capacity / achievable-rate computation. `convergence_gap` is a
// certificate where the method provides one (duality gap for the convex and
// maximin solvers, grid disagreement for certified searches) and 0 with
// `converged=false` left to tell the honest story otherwise.
struct SolveReport {
  double value = 0.0;
  std::vector<double> argument;
  std::string argument_shape;
  long iterations = 0;
  double convergence_gap = 0.0;
  std::string method;
  bool converged = true;
  bool grid_certified = false;
  double grid_value = std::numeric_limits<double>::quiet_NaN();

  // Flat key/value text record, one "key=value" pair per line.
  std::string to_kv() const {
    std::string out;
    out += "value=" + format_rate(value) + "\n";
    out += "method=" + method + "\n";
    out += "iterations=" + std::to_string(iterations) + "\n";
    out += "convergence_gap=" + format_rate(convergence_gap) + "\n";
    out += "converged=" + std::string(converged ? "true" : "false") + "\n";
    out += "grid_certified=" + std::string(grid_certified ? "true" : "false") + "\n";
    if (!std::isnan(grid_value)) out += "grid_value=" + format_rate(grid_value) + "\n";
    out += "argument_shape=" + argument_shape + "\n";
    out += "argument=";
    for (std::size_t i = 0; i < argument.size(); ++i) {
      if (i) out += ",";
      out += format_rate(argument[i]);
    }
    out += "\n";
    return out;
  }
};

}  // namespace asyncsi
