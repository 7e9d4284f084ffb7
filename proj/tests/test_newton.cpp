#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "mdseries/newton.hpp"
#include "mdseries/precision.hpp"
#include "test_helpers.hpp"

using namespace mdseries;
using testing_support::inf_norm;
using testing_support::random_matrix;
using testing_support::random_vector;

namespace {

double bound(int k, int extra) { return std::ldexp(1.0, -52 * k + extra); }

template <int K>
constexpr int wider() {
  return K >= 5 ? 10 : (K >= 3 ? 8 : 2 * K);
}

template <int K>
SeriesMatrix<K> random_matrix_series(std::mt19937_64& rng, std::size_t rows, std::size_t cols,
                                     int d) {
  SeriesMatrix<K> a;
  for (int j = 0; j <= d; ++j) a.coeffs.push_back(random_matrix<K>(rng, rows, cols));
  return a;
}

template <int K>
SeriesVector<K> random_vector_series(std::mt19937_64& rng, std::size_t n, int d) {
  SeriesVector<K> b;
  for (int j = 0; j <= d; ++j) b.coeffs.push_back(random_vector<K>(rng, n));
  return b;
}

/// Largest coefficientwise residual of the block product, at wider precision.
template <int K>
double block_residual(const SeriesMatrix<K>& a, const SeriesVector<K>& b,
                      const std::vector<Vector<K>>& dx) {
  constexpr int W = wider<K>();
  double worst = 0.0;
  for (std::size_t j = 0; j < b.coeffs.size(); ++j) {
    Vector<W> r = convert<W>(b.coeffs[j]);
    for (std::size_t i = 0; i <= j; ++i) {
      subtract_matvec<W>(r, convert<W>(a.coeffs[i]), convert<W>(dx[j - i]));
    }
    worst = std::max(worst, max_modulus<W>(r));
  }
  return worst;
}

template <int K>
void check_block_residual(std::uint64_t seed, std::size_t n, int d) {
  std::mt19937_64 rng(seed);
  const auto a = random_matrix_series<K>(rng, n, n, d);
  const auto b = random_vector_series<K>(rng, n, d);
  const auto before = factorization_count();
  const auto dx = forward_substitute(a, b);
  CHECK(factorization_count() - before == 1);
  double anorm = 0.0;
  double xnorm = 0.0;
  for (const auto& m : a.coeffs) anorm = std::max(anorm, inf_norm(m));
  for (const auto& v : dx) xnorm = std::max(xnorm, inf_norm<K>(v));
  const double tol = static_cast<double>(n) * d * bound(K, 14) * anorm * xnorm;
  CHECK(block_residual(a, b, dx) <= tol);
}

template <int K>
std::vector<Series<K>> constant_start(std::initializer_list<double> v, int d) {
  std::vector<Series<K>> x;
  for (double c : v) x.emplace_back(d, Complex<K>(c));
  return x;
}

}  // namespace

TEST_CASE("block-diagonal system decouples") {
  std::mt19937_64 rng(1);
  const std::size_t n = 4;
  const int d = 5;
  SeriesMatrix<2> a;
  a.coeffs.push_back(random_matrix<2>(rng, n, n));
  for (int j = 1; j <= d; ++j) a.coeffs.emplace_back(n, n);
  const auto b = random_vector_series<2>(rng, n, d);
  const auto dx = forward_substitute(a, b);
  const LuFactorization<2> lu(a.coeffs[0]);
  for (int j = 0; j <= d; ++j) {
    CHECK(dx[static_cast<std::size_t>(j)] == lu.solve(b.coeffs[static_cast<std::size_t>(j)]));
  }
}

TEST_CASE("scalar geometric series") {
  const int d = 7;
  SeriesMatrix<3> a;
  SeriesVector<3> b;
  for (int j = 0; j <= d; ++j) {
    Matrix<3> m(1, 1);
    if (j <= 1) m(0, 0) = Complex<3>(1.0);
    a.coeffs.push_back(m);
    b.coeffs.push_back(Vector<3>{Complex<3>(j == 0 ? 1.0 : 0.0)});
  }
  const auto dx = forward_substitute(a, b);
  Series<3> one_plus_t(d);
  one_plus_t[0] = Complex<3>(1.0);
  one_plus_t[1] = Complex<3>(1.0);
  const auto inv = ps_inverse(one_plus_t);
  for (int j = 0; j <= d; ++j) {
    CHECK(dx[static_cast<std::size_t>(j)][0] == Complex<3>(j % 2 == 0 ? 1.0 : -1.0));
    CHECK(dx[static_cast<std::size_t>(j)][0] == inv[j]);
  }
}

TEST_CASE("block residual on random square systems with one factorization") {
  for (std::uint64_t s = 0; s < 3; ++s) {
    check_block_residual<1>(s, 6, 8);
    check_block_residual<2>(s, 6, 8);
    check_block_residual<3>(s, 6, 8);
    check_block_residual<4>(s, 6, 8);
  }
}

TEST_CASE("least squares blocks for consistent overdetermined systems") {
  std::mt19937_64 rng(2);
  const std::size_t rows = 7;
  const std::size_t cols = 4;
  const int d = 4;
  const auto a = random_matrix_series<2>(rng, rows, cols, d);
  std::vector<Vector<2>> want;
  for (int j = 0; j <= d; ++j) want.push_back(random_vector<2>(rng, cols));
  SeriesVector<2> b;
  for (int j = 0; j <= d; ++j) {
    Vector<2> bj(rows);
    for (int i = 0; i <= j; ++i) {
      const auto p = matvec<2>(a.coeffs[static_cast<std::size_t>(i)], want[static_cast<std::size_t>(j - i)]);
      for (std::size_t r = 0; r < rows; ++r) bj[r] += p[r];
    }
    b.coeffs.push_back(bj);
  }
  const auto before = factorization_count();
  const auto dx = forward_substitute(a, b);
  CHECK(factorization_count() - before == 1);
  for (int j = 0; j <= d; ++j) {
    CHECK(testing_support::max_diff<2>(dx[static_cast<std::size_t>(j)], want[static_cast<std::size_t>(j)]) <=
          bound(2, 20));
  }
}

TEST_CASE("singular leading block reports the condition estimate") {
  SeriesMatrix<2> a;
  a.coeffs.emplace_back(2, 2);
  a.coeffs[0](0, 0) = Complex<2>(1.0);
  a.coeffs[0](1, 0) = Complex<2>(1.0);
  SeriesVector<2> b;
  b.coeffs.push_back(Vector<2>(2));
  try {
    (void)forward_substitute(a, b);
    FAIL("expected SingularMatrixError");
  } catch (const SingularMatrixError& e) {
    CHECK(e.pivot() == 1);
    CHECK(e.rcond() == 0.0);
  }
  SeriesMatrix<2> wide;
  wide.coeffs.emplace_back(1, 2);
  SeriesVector<2> b1;
  b1.coeffs.push_back(Vector<2>(1));
  CHECK_THROWS_AS(forward_substitute(wide, b1), ShapeError);
}

TEST_CASE("a linear system is solved in one step") {
  std::mt19937_64 rng(3);
  const int n = 4;
  const int d = 6;
  const auto a = random_matrix<4>(rng, n, n);
  std::vector<Series<4>> sol;
  for (int v = 0; v < n; ++v) {
    Series<4> s(d);
    for (int j = 0; j <= d; ++j) s[j] = Complex<4>(testing_support::uniform(rng), testing_support::uniform(rng));
    sol.push_back(s);
  }
  // f_i = sum_j a_ij x_j - c_i(t) with c = A sol
  std::vector<Polynomial<4>> polys;
  for (int i = 0; i < n; ++i) {
    std::vector<Monomial<4>> ms;
    Series<4> c(d);
    for (int j = 0; j < n; ++j) {
      std::vector<int> e(n, 0);
      e[static_cast<std::size_t>(j)] = 1;
      const auto aij = a(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
      ms.push_back({Series<4>(d, aij), e});
      c = c + ps_scale(sol[static_cast<std::size_t>(j)], aij);
    }
    ms.push_back({-c, std::vector<int>(n, 0)});
    polys.emplace_back(n, d, ms);
  }
  const PolySystem<4> f(n, d, polys);
  const auto step = newton_step<4>(f, sol);
  double scale = 0.0;
  for (const auto& s : sol) {
    for (const auto& z : s.coeffs()) scale = std::max(scale, z.magnitude());
  }
  CHECK(step.update_norm <= bound(4, 14) * scale * inf_norm(a));
}

TEST_CASE("circle demo in double precision") {
  const auto f = circle_system<1>(8);
  NewtonConfig cfg;
  cfg.tolerance = 1e-12;
  const auto res = run_newton<1>(f, Vector<1>{Complex<1>(1.0), Complex<1>(0.0)}, cfg);
  CHECK(res.trace.converged);
  CHECK(res.trace.iterations() <= 8);
  const double cosine[] = {1.0, -0.5, 1.0 / 24, -1.0 / 720, 1.0 / 40320};
  for (int i = 0; i <= 4; ++i) {
    CHECK(std::abs(res.x[0][2 * i].re[0] - cosine[i]) <= 1e-13);
  }
  for (int i = 1; i <= 7; i += 2) CHECK(res.x[0][i].magnitude() <= 1e-13);
  const std::string text = to_string(res.x[0]);
  CHECK(text.find("4.16666666666667E-02*t^4") != std::string::npos);
  // The whole update shrinks at every step; the degree-d part starts at
  // zero and only shrinks once the lower coefficients have settled.
  const auto& rec = res.trace.records;
  for (std::size_t i = 1; i < rec.size(); ++i) {
    CHECK(rec[i].full_norm < rec[i - 1].full_norm);
  }
  CHECK(rec.front().update_norm == 0.0);
  CHECK(rec.back().update_norm <= 1e-12);
}

TEST_CASE("circle demo converges in double double and quad double") {
  NewtonConfig dd;
  dd.tolerance = 1e-30;
  CHECK(run_newton<2>(circle_system<2>(8), Vector<2>{Complex<2>(1.0), Complex<2>(0.0)}, dd)
            .trace.converged);
  NewtonConfig qd;
  const auto res = run_newton<4>(circle_system<4>(8), Vector<4>{Complex<4>(1.0), Complex<4>(0.0)}, qd);
  CHECK(res.trace.converged);
  CHECK((res.x[0][8] - Complex<4>(Expansion<4>(1.0) / 40320.0)).magnitude() <= bound(4, 8));
}

TEST_CASE("newton configuration checks") {
  const auto f = circle_system<1>(8);
  const Vector<1> x0{Complex<1>(1.0), Complex<1>(0.0)};
  NewtonConfig cfg;
  cfg.max_iterations = 0;
  CHECK_THROWS_AS(run_newton<1>(f, x0, cfg), ArgumentError);
  cfg.max_iterations = 2;
  cfg.tolerance = 0.0;
  CHECK_THROWS_AS(run_newton<1>(f, x0, cfg), ArgumentError);
  cfg.tolerance = 1e-300;
  const auto res = run_newton<1>(f, x0, cfg);
  CHECK(res.trace.iterations() == 2);
  CHECK_FALSE(res.trace.converged);

  CHECK(default_max_iterations(8) == 8);
  CHECK(default_max_iterations(16) == 8);
  CHECK(default_max_iterations(24) == 12);
  CHECK(default_max_iterations(32) == 16);
  NewtonConfig dflt;
  dflt.tolerance = 1e-300;
  CHECK(run_newton<1>(circle_system<1>(24), x0, dflt).trace.iterations() <= 12);
}

TEST_CASE("divergence is flagged") {
  // Updates that grow past the configured factor stop the run.
  const auto f = circle_system<2>(8);
  NewtonConfig cfg;
  cfg.tolerance = 1e-300;
  cfg.divergence_factor = 1e-300;
  const auto res = run_newton<2>(f, Vector<2>{Complex<2>(1.0), Complex<2>(0.0)}, cfg);
  CHECK(res.trace.diverged);
  CHECK_FALSE(res.trace.converged);
  CHECK(res.trace.iterations() == 2);
}

TEST_CASE("trace csv") {
  NewtonTrace t;
  t.records.push_back({1, 0.25, 0.5});
  std::ostringstream os;
  write_trace_csv(os, t);
  CHECK(os.str() == "iteration,update_norm,wall_seconds\n1,2.500000E-01,0.5\n");
}

TEST_CASE("curve system converges from its start point") {
  auto [f, z] = balanced_curve_system<2>(5, 6, 6, 2, 8);
  NewtonConfig cfg;
  cfg.tolerance = 1e-26;
  const auto res = run_newton<2>(f, z, cfg);
  CHECK(res.trace.converged);
  CHECK(res.trace.iterations() <= 8);
  for (std::size_t v = 0; v < z.size(); ++v) CHECK(res.x[v][0] == z[v]);
}
