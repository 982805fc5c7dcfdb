#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "asyncsi/cli.hpp"

using namespace asyncsi;

namespace {

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

// Value of `column` in the first data row matching `key` in column 0.
double csv_value(const std::string& text, const std::string& key, std::size_t column) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!cells.empty() && cells[0] == key && column < cells.size()) {
      return std::stod(cells[column]);
    }
  }
  throw std::runtime_error("csv_value: no row for " + key);
}

std::string write_temp_spec(const std::string& name, const std::string& body) {
  const std::string path = std::string("cli_test_") + name + ".spec";
  std::ofstream f(path);
  f << body;
  return path;
}

}  // namespace

TEST_CASE("cli rates closed form and no_si") {
  CliRun r = run({"rates", "--channel", "bsagp:p=0.5", "--quantity", "closed_form", "--quantity",
                  "no_si"});
  CHECK(r.code == 0);
  CHECK(csv_value(r.out, "closed_form", 1) == 0.5);
  CHECK(std::abs(csv_value(r.out, "no_si", 1)) < 1e-6);
}

TEST_CASE("cli rates gp reaches one bit") {
  CliRun r = run({"rates", "--channel", "bsagp:p=0.5", "--quantity", "gp", "--nu", "2", "--seed",
                  "3"});
  CHECK(r.code == 0);
  CHECK(csv_value(r.out, "gp", 1) == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(r.out.find("certified") != std::string::npos);
}

TEST_CASE("cli error paths") {
  CHECK(run({"rates", "--channel", "bsagp:p=0.5", "--quantity", "nonsense"}).code == 2);
  CHECK(run({"rates", "--channel", "bsagp:p=oops", "--quantity", "gp"}).code == 2);
  CHECK(run({"rates", "--channel", "no_such_file.spec", "--quantity", "gp"}).code == 2);
  // Seed is mandatory for simulations.
  CHECK(run({"simulate", "bsagp", "--p", "0.5", "--n", "16", "--rate", "0.25", "--trials", "10"})
            .code == 2);
  // Guard violations exit with 3.
  CHECK(run({"fig5", "--dmax", "9"}).code == 3);
}

TEST_CASE("cli channel spec files") {
  const std::string good = write_temp_spec("good",
                                           "nx 2\nns 2\nny 2\n"
                                           "state_prior 0.5 0.5\n"
                                           "w 1 0\nw 0 1\nw 0 1\nw 1 0\n"
                                           "d_min 0\nd_max 1\n");
  CliRun r = run({"rates", "--channel", good, "--quantity", "no_si"});
  CHECK(r.code == 0);
  CHECK(std::abs(csv_value(r.out, "no_si", 1)) < 1e-6);

  const std::string bad = write_temp_spec("bad",
                                          "nx 2\nns 2\nny 2\n"
                                          "state_prior 0.5 0.5\n"
                                          "w 0.9 0.2\nw 0 1\nw 0 1\nw 1 0\n"  // row sums to 1.1
                                          "d_min 0\nd_max 1\n");
  CHECK(run({"rates", "--channel", bad, "--quantity", "no_si"}).code == 2);

  const std::string garbled = write_temp_spec("garbled", "nx 2\nwat 3\n");
  CHECK(run({"rates", "--channel", garbled, "--quantity", "no_si"}).code == 2);

  std::remove(good.c_str());
  std::remove(bad.c_str());
  std::remove(garbled.c_str());
}

TEST_CASE("cli fig4 ordering and formula") {
  CliRun r = run({"fig4"});
  CHECK(r.code == 0);
  std::istringstream in(r.out);
  std::string line;
  int rows = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line[0] == 'p') continue;
    std::istringstream ls(line);
    std::string cell;
    std::vector<double> v;
    while (std::getline(ls, cell, ',')) v.push_back(std::stod(cell));
    REQUIRE(v.size() == 4);
    const double p = v[0];
    CHECK(v[1] == doctest::Approx(1.0 - binary_entropy(p)).epsilon(1e-9));
    CHECK(v[2] == doctest::Approx(bsagp_closed_form(p)).epsilon(1e-9));
    CHECK(v[3] == 1.0);
    CHECK(v[1] < v[2]);  // strict at interior p
    CHECK(v[2] < v[3]);
    ++rows;
  }
  CHECK(rows == 9);
}

TEST_CASE("cli fig5 tracks 1/D") {
  CliRun r = run({"fig5", "--dmax", "2", "--starts", "16", "--seed", "2"});
  CHECK(r.code == 0);
  CHECK(csv_value(r.out, "1", 2) == doctest::Approx(1.0).epsilon(1e-2));
  CHECK(csv_value(r.out, "2", 2) == doctest::Approx(0.5).epsilon(1e-2));
}

TEST_CASE("cli simulate output is reproducible byte for byte") {
  const std::vector<std::string> cmd = {"simulate", "bsagp", "--p",     "0.5",  "--n",
                                        "32",       "--rate", "0.25",   "--trials",
                                        "200",      "--seed", "11"};
  CliRun a = run(cmd);
  CliRun b = run(cmd);
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.find("# command: asyncsi simulate bsagp") != std::string::npos);

  // Re-running the echoed command reproduces the output bit-exactly.
  std::istringstream in(a.out);
  std::string echo_line;
  std::getline(in, echo_line);
  const std::string prefix = "# command: asyncsi ";
  REQUIRE(echo_line.rfind(prefix, 0) == 0);
  std::istringstream argstream(echo_line.substr(prefix.size()));
  std::vector<std::string> echoed;
  std::string tok;
  while (argstream >> tok) echoed.push_back(tok);
  CliRun c = run(echoed);
  CHECK(c.code == 0);
  CHECK(c.out == a.out);
}

TEST_CASE("cli certify no_si") {
  CliRun r = run({"certify", "--quantity", "no_si", "--channel", "bsagp:p=0.1"});
  CHECK(r.code == 0);
  CHECK(r.out.find("pass") != std::string::npos);
}

TEST_CASE("cli certify acsitr on the xor channel") {
  const std::string spec = write_temp_spec("xor",
                                           "nx 2\nns 2\nny 2\n"
                                           "state_prior 0.5 0.5\n"
                                           "w 1 0\nw 0 1\nw 0 1\nw 1 0\n"
                                           "d_min 0\nd_max 1\n");
  CliRun r = run({"certify", "--quantity", "acsitr", "--channel", spec, "--resolution", "16"});
  CHECK(r.code == 0);
  CHECK(r.out.find("pass") != std::string::npos);
  std::remove(spec.c_str());
}

TEST_CASE("cli simulate delay") {
  CliRun r = run({"simulate", "delay", "--p", "0.5", "--segment-length", "32", "--runs", "200",
                  "--seed", "5"});
  CHECK(r.code == 0);
  CHECK(csv_value(r.out, "blind", 4) >= 0.99);
}
