#pragma once

// Newton's method on power series.  One step linearizes the system at the
// current series x(t) and solves the lower triangular block Toeplitz system
// A_0 dx_j = b_j - (A_1 dx_{j-1} + ... + A_j dx_0) with a single
// factorization of A_0.

#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "mdseries/errors.hpp"
#include "mdseries/polysys.hpp"

namespace mdseries {

/// Runs job(0) .. job(count - 1).  Implementations may run jobs
/// concurrently and must return only when all have finished.
using StageRunner =
    std::function<void(std::size_t count, const std::function<void(std::size_t)>& job)>;

inline void run_sequentially(std::size_t count, const std::function<void(std::size_t)>& job) {
  for (std::size_t i = 0; i < count; ++i) job(i);
}

namespace detail {

template <int K>
class BlockFactor {
 public:
  explicit BlockFactor(const Matrix<K>& a0) {
    if (a0.rows() < a0.cols()) throw ShapeError("more variables than equations");
    try {
      if (a0.rows() == a0.cols()) {
        f_.template emplace<LuFactorization<K>>(a0);
      } else {
        f_.template emplace<QrFactorization<K>>(a0);
      }
    } catch (const SingularMatrixError& e) {
      throw SingularMatrixError(e.pivot(), inv_condition_estimate(a0));
    } catch (const RankDeficientError& e) {
      throw RankDeficientError(e.column(), normal_rcond(a0));
    }
  }

  Vector<K> solve(std::span<const Complex<K>> b) const {
    return std::visit([&](const auto& f) -> Vector<K> {
      if constexpr (std::is_same_v<std::decay_t<decltype(f)>, std::monostate>) {
        return {};
      } else {
        return f.solve(b);
      }
    }, f_);
  }

 private:
  // sqrt of the estimate for A^H A.
  static double normal_rcond(const Matrix<K>& a) {
    return std::sqrt(inv_condition_estimate(matmul(adjoint(a), a)));
  }

  std::variant<std::monostate, LuFactorization<K>, QrFactorization<K>> f_;
};

}  // namespace detail

/// Solves the block system for dx_0..dx_d.  A_0 is factored once (LU when
/// square, QR in the least squares sense otherwise).  After dx_j is known,
/// each later right-hand side b_m (m > j) is updated as one job.
template <int K>
std::vector<Vector<K>> forward_substitute(const SeriesMatrix<K>& a, const SeriesVector<K>& b,
                                          const StageRunner& runner = run_sequentially) {
  if (a.coeffs.empty() || a.degree() != b.degree()) {
    throw ShapeError("block system degrees disagree");
  }
  for (const auto& m : a.coeffs) {
    if (m.rows() != a.rows() || m.cols() != a.cols()) throw ShapeError("ragged matrix series");
  }
  for (const auto& v : b.coeffs) {
    if (v.size() != a.rows()) throw ShapeError("right-hand side has the wrong length");
  }
  const auto d = static_cast<std::size_t>(a.degree());
  const detail::BlockFactor<K> factor(a.coeffs[0]);
  std::vector<bool> zero(d + 1);
  for (std::size_t i = 0; i <= d; ++i) zero[i] = a.coeffs[i].is_zero();

  std::vector<Vector<K>> rhs = b.coeffs;
  std::vector<Vector<K>> dx(d + 1);
  for (std::size_t j = 0; j <= d; ++j) {
    dx[j] = factor.solve(rhs[j]);
    if (j == d) break;
    const Vector<K>& step = dx[j];
    runner(d - j, [&](std::size_t job) {
      const std::size_t m = j + 1 + job;
      if (!zero[m - j]) subtract_matvec<K>(rhs[m], a.coeffs[m - j], step);
    });
  }
  return dx;
}

struct NewtonConfig {
  double tolerance = 1.0e-32;
  /// Unset selects the schedule for the degree (see default_max_iterations).
  std::optional<int> max_iterations;
  /// Divergence when the whole update exceeds this multiple of the smallest so far.
  double divergence_factor = 1.0e6;
};

/// 8, 8, 12, 16 iterations for degrees 8, 16, 24, 32; degrees in between
/// take the next scheduled value and larger degrees 16.
inline int default_max_iterations(int degree) {
  if (degree <= 16) return 8;
  if (degree <= 24) return 12;
  return 16;
}

struct NewtonRecord {
  int iteration = 0;
  double update_norm = 0.0;
  double wall_seconds = 0.0;  // cumulative since the start of the run
  double full_norm = 0.0;     // largest modulus over the whole update
};

struct NewtonTrace {
  std::vector<NewtonRecord> records;
  bool converged = false;
  bool diverged = false;
  double wall_seconds = 0.0;

  int iterations() const noexcept { return static_cast<int>(records.size()); }
  double final_update_norm() const {
    return records.empty() ? std::numeric_limits<double>::infinity()
                           : records.back().update_norm;
  }
};

/// CSV with the columns iteration,update_norm,wall_seconds.
void write_trace_csv(std::ostream& os, const NewtonTrace& trace);

template <int K>
struct NewtonStep {
  std::vector<Series<K>> x;
  double update_norm = 0.0;  // degree-d coefficient only
  double full_norm = 0.0;    // all coefficients
};

/// One step from x; the update norm is the largest modulus in the update
/// to the degree-d coefficient vector.  Stage 1 evaluates one polynomial per
/// job, stage 2 runs inside forward_substitute.
template <int K>
NewtonStep<K> newton_step(const PolySystem<K>& f, std::span<const Series<K>> x,
                          const StageRunner& runner = run_sequentially) {
  if (static_cast<int>(x.size()) != f.nvars()) throw ShapeError("argument count mismatch");
  for (const auto& s : x) {
    if (s.degree() != f.degree()) throw ShapeError("argument degree mismatch");
  }
  auto lin = make_linearized<K>(f.size(), x.size(), f.degree());
  runner(f.size(), [&](std::size_t i) { evaluate_row(f, i, x, lin); });
  const std::vector<Vector<K>> dx = forward_substitute(lin.a, lin.b, runner);
  NewtonStep<K> out;
  out.x.assign(x.begin(), x.end());
  for (std::size_t v = 0; v < x.size(); ++v) {
    for (int j = 0; j <= f.degree(); ++j) {
      out.x[v][j] += dx[static_cast<std::size_t>(j)][v];
    }
  }
  out.update_norm = max_modulus<K>(dx.back());
  for (const auto& v : dx) out.full_norm = std::max(out.full_norm, max_modulus<K>(v));
  return out;
}

template <int K>
struct NewtonResult {
  std::vector<Series<K>> x;
  NewtonTrace trace;
};

/// Newton from the constant series x0 until the update norm drops to the
/// tolerance, the iteration limit is hit, or the norm of the whole update
/// grows past divergence_factor times its smallest positive value (or is
/// not finite).  The last coefficient is untouched by the first steps, so
/// an update norm of exactly zero while lower coefficients still move is
/// not convergence.
template <int K>
NewtonResult<K> run_newton(const PolySystem<K>& f, std::span<const Complex<K>> x0,
                           const NewtonConfig& cfg = {},
                           const StageRunner& runner = run_sequentially) {
  if (cfg.max_iterations && *cfg.max_iterations < 1) {
    throw ArgumentError("max_iterations must be at least 1");
  }
  if (!(cfg.tolerance > 0.0)) throw ArgumentError("tolerance must be positive");
  if (static_cast<int>(x0.size()) != f.nvars()) throw ShapeError("start point dimension");
  const int limit = cfg.max_iterations.value_or(default_max_iterations(f.degree()));
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();

  NewtonResult<K> out;
  for (const auto& z : x0) out.x.emplace_back(f.degree(), z);
  double smallest = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= limit; ++it) {
    NewtonStep<K> step = newton_step<K>(f, out.x, runner);
    out.x = std::move(step.x);
    const double elapsed = std::chrono::duration<double>(Clock::now() - start).count();
    out.trace.records.push_back({it, step.update_norm, elapsed, step.full_norm});
    if (!std::isfinite(step.full_norm) || step.full_norm > cfg.divergence_factor * smallest) {
      out.trace.diverged = true;
      break;
    }
    if (step.full_norm > 0.0) smallest = std::min(smallest, step.full_norm);
    if (step.update_norm <= cfg.tolerance && (step.update_norm > 0.0 || step.full_norm == 0.0)) {
      out.trace.converged = true;
      break;
    }
  }
  out.trace.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return out;
}

template <int K>
NewtonResult<K> run_newton(const PolySystem<K>& f, const Vector<K>& x0,
                           const NewtonConfig& cfg = {},
                           const StageRunner& runner = run_sequentially) {
  return run_newton<K>(f, std::span<const Complex<K>>(x0), cfg, runner);
}

/// Power of two s such that the solution series of curve_system with
/// t_scale = s has coefficients of roughly unit size.  The growth rate is
/// estimated from a degree-8 double precision run; 1 when that run fails.
inline double balanced_t_scale(std::uint64_t seed, int n, int terms, int max_exponent) {
  constexpr int kProbeDegree = 8;
  try {
    const auto [f, z] = curve_system<1>(seed, n, terms, max_exponent, kProbeDegree);
    NewtonConfig cfg;
    cfg.tolerance = 1e-300;
    cfg.max_iterations = 6;
    cfg.divergence_factor = std::numeric_limits<double>::infinity();
    const auto res = run_newton<1>(f, z, cfg);
    if (res.trace.diverged) return 1.0;
    double rate = 0.0;
    for (int j = 1; j <= kProbeDegree; ++j) {
      double m = 0.0;
      for (const auto& s : res.x) m = std::max(m, s[j].magnitude());
      if (m > 0.0) rate = std::max(rate, std::pow(m, 1.0 / j));
    }
    if (!(rate > 0.0) || !std::isfinite(rate)) return 1.0;
    return std::ldexp(1.0, -static_cast<int>(std::ceil(std::log2(rate))));
  } catch (const Error&) {
    return 1.0;
  }
}

/// curve_system with t rescaled by balanced_t_scale.
template <int K>
std::pair<PolySystem<K>, Vector<K>> balanced_curve_system(std::uint64_t seed, int n, int terms,
                                                          int max_exponent, int degree) {
  return curve_system<K>(seed, n, terms, max_exponent, degree,
                         balanced_t_scale(seed, n, terms, max_exponent));
}

}  // namespace mdseries
