#pragma once

// The demonstrations and benchmarks driven by the command line tool and the
// acceptance checks.

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "mdseries/costs.hpp"
#include "mdseries/newton.hpp"
#include "mdseries/precision.hpp"
#include "mdseries/runtime.hpp"

namespace mdseries {

// --- norm of a unit-modulus vector -------------------------------------------

struct NormDemoRow {
  int k = 1;
  std::string display;   // two-part rendering of the norm
  double residual = 0.0; // |norm - sqrt(n)| from the wide difference
  double threshold = 0.0;
  bool ok = false;
};

/// Largest accepted |norm - 8| at level k for the 64-entry vector.
double norm_demo_threshold(int k);

NormDemoRow norm_demo(int k, std::uint64_t seed = 2024, std::size_t n = 64);

// --- the circle x^2 + y^2 = 1, x = 1 - t^2/2 ... --------------------------------

struct CircleDemoResult {
  int k = 1;
  int degree = 8;
  NewtonTrace trace;
  std::string x_series;
  std::string y_series;
  /// Real parts of the leading limbs of the x coefficients.
  std::vector<double> x_leading;
  std::vector<double> x_odd_modulus;
  /// Coefficients of t^0, t^2, .. t^8 within 1e-13 of the cosine series and
  /// odd ones within 1e-13 of zero; only judged at k = 1, d = 8.
  std::optional<bool> cosine_check;
};

CircleDemoResult circle_demo(int k, int degree, const NewtonConfig& cfg, unsigned workers = 1);

// --- operation counts --------------------------------------------------------

struct CostRow {
  int k = 1;
  CostReport measured;
  PublishedCosts published;
  double add_ratio = 1.0;  // measured totals relative to k = 1
  double mul_ratio = 1.0;
  double div_ratio = 1.0;
};

std::vector<CostRow> cost_table(const std::vector<int>& levels);
void print_cost_table(std::ostream& os, const std::vector<CostRow>& rows);

// --- benchmarks --------------------------------------------------------------

struct BenchConfig {
  std::uint64_t seed = 1;
  int npolys = 64;
  int nvars = 64;
  int terms = 64;
  int max_exponent = 1;
  std::vector<int> degrees{8, 16, 32};
  std::vector<int> levels{1, 2, 3, 4, 5, 8, 10};
  std::vector<unsigned> workers{1, 2, 4, 8};
  double tolerance = 1.0e-32;
  std::optional<int> max_iterations;
  int repetitions = 3;
};

struct BenchRow {
  BenchCase problem;
  BenchResult result;
};

/// Square systems (N = n) are curve systems started at their known point;
/// otherwise the random system is started at a seeded unit-modulus point
/// and run for the full iteration budget.  Rows are handed to `sink` as
/// they are measured.
std::vector<BenchRow> run_bench(const BenchConfig& cfg,
                                const std::function<void(const BenchRow&)>& sink = {});

/// Long format for plotting: one "degree k workers efficiency speedup" line
/// per row, with a header.
void write_plot_data(std::ostream& os, const std::vector<BenchRow>& rows);

// --- precision ladder ----------------------------------------------------------

struct LadderRow {
  int k = 1;
  NewtonTrace trace;
};

/// Newton with the default schedule on balanced_curve_system(seed, n, terms,
/// max_exponent, degree) at every level in `levels`.
std::vector<LadderRow> precision_ladder(std::uint64_t seed, int n, int terms, int max_exponent,
                                        int degree, const std::vector<int>& levels,
                                        const NewtonConfig& cfg, unsigned workers = 1);

}  // namespace mdseries
