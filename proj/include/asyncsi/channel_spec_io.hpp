#pragma once

#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "asyncsi/channel.hpp"
#include "asyncsi/errors.hpp"

namespace asyncsi {

// Parsed channel description: the DMC plus its delay set. The text format is
// line oriented ('#' starts a comment):
//
//   nx <int>
//   ns <int>
//   ny <int>
//   state_prior <ns reals>
//   w <ny reals>          one line per (x, s) row, x-major then s
//   d_min <int>
//   d_max <int>
//
// Rows further than 1e-9 from sum 1 are rejected.
struct ChannelSpec {
  StateChannel channel;
  DelaySet delays;
  std::string id;  // shorthand or file path, echoed into CSV output
};

inline ChannelSpec parse_channel_spec(std::istream& in, const std::string& id) {
  int nx = -1, ns = -1, ny = -1, d_min = -1, d_max = -1;
  std::optional<std::vector<double>> prior;
  std::vector<std::vector<double>> w_rows;

  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    auto fail = [&](const std::string& what) -> SpecParseError {
      return SpecParseError(id + ":" + std::to_string(lineno) + ": " + what);
    };
    if (key == "nx" || key == "ns" || key == "ny" || key == "d_min" || key == "d_max") {
      int v;
      if (!(ls >> v)) throw fail("expected an integer after '" + key + "'");
      if (key == "nx") nx = v;
      else if (key == "ns") ns = v;
      else if (key == "ny") ny = v;
      else if (key == "d_min") d_min = v;
      else d_max = v;
    } else if (key == "state_prior") {
      std::vector<double> vals;
      double v;
      while (ls >> v) vals.push_back(v);
      prior = std::move(vals);
    } else if (key == "w") {
      std::vector<double> row;
      double v;
      while (ls >> v) row.push_back(v);
      w_rows.push_back(std::move(row));
    } else {
      throw fail("unknown field '" + key + "'");
    }
    std::string trailing;
    if (ls >> trailing) throw fail("trailing tokens after '" + key + "'");
  }

  if (nx <= 0 || ns <= 0 || ny <= 0) throw SpecParseError(id + ": nx, ns, ny must all be given and positive");
  if (!prior.has_value()) throw SpecParseError(id + ": missing state_prior");
  if (static_cast<int>(prior->size()) != ns) {
    throw SpecParseError(id + ": state_prior must list exactly ns probabilities");
  }
  if (static_cast<int>(w_rows.size()) != nx * ns) {
    throw SpecParseError(id + ": expected " + std::to_string(nx * ns) + " 'w' rows, got " +
                         std::to_string(w_rows.size()));
  }
  std::vector<double> w;
  for (const auto& row : w_rows) {
    if (static_cast<int>(row.size()) != ny) {
      throw SpecParseError(id + ": each 'w' row must list exactly ny probabilities");
    }
    w.insert(w.end(), row.begin(), row.end());
  }
  if (d_min < 0 || d_max < 0) throw SpecParseError(id + ": d_min and d_max must be given and >= 0");

  try {
    return ChannelSpec{StateChannel(nx, ns, ny, std::move(w), Pmf(std::move(*prior))),
                       DelaySet(d_min, d_max), id};
  } catch (const std::invalid_argument& e) {
    throw SpecParseError(id + ": " + e.what());
  }
}

inline ChannelSpec parse_channel_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SpecParseError(path + ": cannot open channel spec file");
  return parse_channel_spec(in, path);
}

// Channel argument: either the built-in shorthand "bsagp:p=<real>" (the XOR
// channel with Bernoulli(p) states and delay set {0,1}) or a spec file path.
inline ChannelSpec parse_channel_arg(const std::string& arg) {
  const std::string prefix = "bsagp:p=";
  if (arg.rfind(prefix, 0) == 0) {
    const std::string ptext = arg.substr(prefix.size());
    double p;
    try {
      std::size_t used = 0;
      p = std::stod(ptext, &used);
      if (used != ptext.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw SpecParseError(arg + ": cannot parse the crossover probability");
    }
    if (p < 0.0 || p > 1.0) throw SpecParseError(arg + ": p must be in [0,1]");
    return ChannelSpec{StateChannel::xor_binary(p), DelaySet(0, 1), arg};
  }
  return parse_channel_spec_file(arg);
}

// Delay-range text "a..b" (a <= 0 <= b), e.g. "0..1" or "-1..2".
inline DelaySet parse_delay_range(const std::string& text) {
  const std::size_t dots = text.find("..");
  if (dots == std::string::npos) throw SpecParseError("delay range must look like a..b");
  try {
    const int lo = std::stoi(text.substr(0, dots));
    const int hi = std::stoi(text.substr(dots + 2));
    if (lo > 0 || hi < 0 || lo > hi) {
      throw SpecParseError("delay range must satisfy a <= 0 <= b");
    }
    return DelaySet(-lo, hi);
  } catch (const SpecParseError&) {
    throw;
  } catch (const std::exception&) {
    throw SpecParseError("cannot parse delay range '" + text + "'");
  }
}

}  // namespace asyncsi
