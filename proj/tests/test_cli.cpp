#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "mdseries/cli.hpp"
#include "mdseries/runtime.hpp"

using mdseries::cli::run;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome call(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("mdseries_cli_" + name)).string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

/// Drops the wall_seconds, speedup and efficiency columns of a bench CSV.
std::vector<std::string> numeric_columns(const std::string& csv) {
  std::vector<std::string> out;
  for (const auto& l : lines(csv)) {
    std::string kept;
    int col = 0;
    std::istringstream in(l);
    for (std::string f; std::getline(in, f, ',');) {
      if (col < 7) kept += f + ",";
      ++col;
    }
    out.push_back(kept);
  }
  return out;
}

}  // namespace

TEST_CASE("usage errors exit with 2") {
  CHECK(call({}).code == 2);
  CHECK(call({"frobnicate"}).code == 2);
  CHECK(call({"norm-demo", "--precision", "hd"}).code == 2);
  CHECK(call({"circle-demo", "--degree", "7"}).code == 2);
  CHECK(call({"bench", "--workers", "0"}).code == 2);
  CHECK(call({"bench", "--workers", "1,x"}).code == 2);
  CHECK(call({"bench", "--polys", "3", "--vars", "4"}).code == 2);
  CHECK(call({"circle-demo", "--tol", "-1"}).code == 2);
  CHECK(call({"circle-demo", "--max-iters", "0"}).code == 2);
  CHECK(call({"newton"}).code == 2);
  CHECK(call({"newton", "--system", temp_path("missing.txt")}).code == 2);
  const auto bad = call({"norm-demo", "--seed", "abc"});
  CHECK(bad.code == 2);
  CHECK_FALSE(bad.err.empty());
  CHECK(call({"--help"}).code == 0);
}

TEST_CASE("norm demo") {
  const auto r = call({"norm-demo", "--precision", "d,dd,xd"});
  CHECK(r.code == 0);
  const auto l = lines(r.out);
  REQUIRE(l.size() == 3);
  CHECK(l[0].find("double ") == 0);
  CHECK(l[1].find("double double  : 8.00000000000000E+00") == 0);
  CHECK(l[2].find("deca double") == 0);
}

TEST_CASE("circle demo") {
  const auto r = call({"circle-demo"});
  CHECK(r.code == 0);
  CHECK(r.out.find("4.16666666666667E-02*t^4") != std::string::npos);
  CHECK(r.out.find("cosine coefficients match") != std::string::npos);

  const auto dd = call({"circle-demo", "--precision", "dd", "--tol", "1e-30"});
  CHECK(dd.code == 0);

  const auto stuck = call({"circle-demo", "--max-iters", "2"});
  CHECK(stuck.code == 1);
  CHECK(stuck.out.find("iteration  2") != std::string::npos);
}

TEST_CASE("cost report") {
  const auto r = call({"cost-report", "--precision", "d,dd"});
  CHECK(r.code == 0);
  const auto l = lines(r.out);
  REQUIRE(l.size() == 7);
  CHECK(l[1].find("1   add") == 0);
  CHECK(l[4].find("2   add") == 0);
}

TEST_CASE("bench csv, plot data and determinism") {
  const std::vector<std::string> base{"bench", "--polys", "4", "--vars", "4", "--terms", "4",
                                      "--degree", "8", "--precision", "d,dd", "--repetitions",
                                      "1", "--seed", "9"};
  auto one = base;
  one.insert(one.end(), {"--workers", "1"});
  const auto r = call(one);
  REQUIRE(r.code == 0);
  const auto l = lines(r.out);
  REQUIRE(l.size() == 3);
  CHECK(l[0] == mdseries::kBenchCsvHeader);
  for (std::size_t i = 1; i < l.size(); ++i) {
    CHECK(l[i].find("9,4,4,4,8,") == 0);
    CHECK(l[i].substr(l[i].size() - 14) == ",1.0000,1.0000");
  }

  const std::string csv = temp_path("bench.csv");
  const std::string plot = temp_path("bench.plot");
  auto two = base;
  two.insert(two.end(), {"--workers", "1,2", "--out", csv, "--plot", plot});
  REQUIRE(call(two).code == 0);
  const std::string first = slurp(csv);
  REQUIRE(call(two).code == 0);
  const std::string second = slurp(csv);
  CHECK(lines(first).size() == 5);
  CHECK(numeric_columns(first) == numeric_columns(second));
  const auto p = lines(slurp(plot));
  REQUIRE(p.size() == 5);
  CHECK(p[0] == "degree k workers efficiency speedup");
  CHECK(p[1].find("8 1 1 1.0000 1.0000") == 0);
  std::remove(csv.c_str());
  std::remove(plot.c_str());
}

TEST_CASE("configuration file with flags taking precedence") {
  const std::string cfg = temp_path("run.ini");
  {
    std::ofstream os(cfg);
    os << "precision=qd\n";
    os << "seed=2024\n";
  }
  const auto from_file = call({"norm-demo", "--config", cfg});
  CHECK(from_file.code == 0);
  REQUIRE(lines(from_file.out).size() == 1);
  CHECK(from_file.out.find("quad double") == 0);

  const auto flag_wins = call({"norm-demo", "--config", cfg, "--precision", "td"});
  CHECK(flag_wins.code == 0);
  CHECK(flag_wins.out.find("triple double") == 0);

  {
    std::ofstream os(cfg);
    os << "degree=9\n";
  }
  CHECK(call({"circle-demo", "--config", cfg}).code == 2);
  std::remove(cfg.c_str());
}

TEST_CASE("generated system runs through newton") {
  const std::string sys = temp_path("sys.txt");
  REQUIRE(call({"gen-system", "--polys", "3", "--vars", "3", "--terms", "4", "--precision", "dd",
                "--seed", "5", "--out", sys})
              .code == 0);
  CHECK(std::filesystem::exists(sys + ".start"));
  const auto r = call({"newton", "--system", sys, "--tol", "1e-26", "--workers", "2"});
  CHECK(r.code == 0);
  CHECK(r.out.find("iteration,update_norm,wall_seconds\n1,") == 0);
  CHECK(r.err.find("converged after") == 0);

  const auto capped = call({"newton", "--system", sys, "--tol", "1e-26", "--max-iters", "2"});
  CHECK(capped.code == 1);
  std::remove(sys.c_str());
  std::remove((sys + ".start").c_str());
}

TEST_CASE("worker lists") {
  using mdseries::cli::parse_workers;
  CHECK(parse_workers("1,2,4,8") == std::vector<unsigned>{1, 2, 4, 8});
  CHECK(parse_workers(" 3 ") == std::vector<unsigned>{3});
  const auto m = parse_workers("max");
  CHECK(m.front() == 1);
  CHECK(m.back() == mdseries::physical_cores());
  CHECK(m.size() == (mdseries::physical_cores() > 1 ? 2u : 1u));
  CHECK_THROWS(parse_workers(""));
  CHECK_THROWS(parse_workers("2,,4"));
}
