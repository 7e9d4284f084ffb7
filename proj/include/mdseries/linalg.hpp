#pragma once

// Dense complex vectors and matrices over multiple-double scalars: norms,
// LU with partial pivoting, Householder QR least squares and a one-norm
// condition estimator.

#include <algorithm>
#include <atomic>
#include <complex>
#include <cstdint>
#include <istream>
#include <numbers>
#include <ostream>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mdseries/complex.hpp"
#include "mdseries/errors.hpp"

namespace mdseries {

template <int K>
using Vector = std::vector<Complex<K>>;

template <int K>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = Complex<K>(1.0);
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  Complex<K>& operator()(std::size_t i, std::size_t j) {
    return data_[i * cols_ + j];
  }
  const Complex<K>& operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }

  std::span<Complex<K>> row(std::size_t i) {
    return {data_.data() + i * cols_, cols_};
  }
  std::span<const Complex<K>> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }

  bool is_zero() const {
    return std::all_of(data_.begin(), data_.end(),
                       [](const Complex<K>& z) { return z.is_zero(); });
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Complex<K>> data_;
};

namespace detail {
std::uint64_t bump_factorization_count() noexcept;
}

/// Number of LU and QR factorizations performed so far (all threads).
std::uint64_t factorization_count() noexcept;

/// A x, accumulated in column order.
template <int K>
Vector<K> matvec(const Matrix<K>& a, std::span<const Complex<K>> x) {
  if (a.cols() != x.size()) throw ShapeError("matvec: dimension mismatch");
  Vector<K> y(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    Complex<K> s;
    const auto r = a.row(i);
    for (std::size_t j = 0; j < a.cols(); ++j) s += r[j] * x[j];
    y[i] = s;
  }
  return y;
}

/// b -= A x, row by row with each row sum accumulated in column order.
template <int K>
void subtract_matvec(std::span<Complex<K>> b, const Matrix<K>& a,
                     std::span<const Complex<K>> x) {
  if (a.cols() != x.size() || a.rows() != b.size()) {
    throw ShapeError("subtract_matvec: dimension mismatch");
  }
  for (std::size_t i = 0; i < a.rows(); ++i) {
    Complex<K> s;
    const auto r = a.row(i);
    for (std::size_t j = 0; j < a.cols(); ++j) s += r[j] * x[j];
    b[i] -= s;
  }
}

template <int K>
Matrix<K> matmul(const Matrix<K>& a, const Matrix<K>& b) {
  if (a.cols() != b.rows()) throw ShapeError("matmul: dimension mismatch");
  Matrix<K> c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.cols(); ++j) {
      Complex<K> s;
      for (std::size_t l = 0; l < a.cols(); ++l) s += a(i, l) * b(l, j);
      c(i, j) = s;
    }
  }
  return c;
}

template <int K>
Matrix<K> adjoint(const Matrix<K>& a) {
  Matrix<K> h(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) h(j, i) = conj(a(i, j));
  }
  return h;
}

/// Euclidean norm, summing |v_i|^2 in index order.
template <int K>
Expansion<K> norm2(std::span<const Complex<K>> v) {
  if (v.empty()) throw ShapeError("norm2 of an empty vector");
  Expansion<K> s;
  for (const Complex<K>& z : v) s += norm_sq(z);
  return md_sqrt(s);
}

template <int K>
Expansion<K> norm2(const Vector<K>& v) {
  return norm2(std::span<const Complex<K>>(v));
}

/// n unit-modulus entries (cos t, sin t) for seeded random angles t, each
/// renormalized to modulus one at level K.  The angles do not depend on K.
template <int K>
Vector<K> unit_modulus_vector(std::uint64_t seed, std::size_t n) {
  std::mt19937_64 rng(seed);
  Vector<K> v;
  v.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = std::ldexp(static_cast<double>(rng() >> 11), -53) *
                     (2.0 * std::numbers::pi);
    v.push_back(unit_complex<K>(std::cos(t), std::sin(t)));
  }
  return v;
}

/// Largest modulus, from the leading limbs.
template <int K>
double max_modulus(std::span<const Complex<K>> v) {
  double m = 0.0;
  for (const Complex<K>& z : v) {
    const double a = z.magnitude();
    if (!(a <= m)) m = a;  // NaN wins
  }
  return m;
}

/// Max column sum of moduli (leading limbs).
template <int K>
double one_norm(const Matrix<K>& a) {
  double best = 0.0;
  for (std::size_t j = 0; j < a.cols(); ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) s += a(i, j).magnitude();
    best = std::max(best, s);
  }
  return best;
}

template <int K>
double max_entry(const Matrix<K>& a) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    m = std::max(m, max_modulus<K>(a.row(i)));
  }
  return m;
}

template <int To, int From>
Matrix<To> convert(const Matrix<From>& a) {
  Matrix<To> b(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) b(i, j) = convert<To>(a(i, j));
  }
  return b;
}

template <int To, int From>
Vector<To> convert(const Vector<From>& v) {
  Vector<To> w;
  w.reserve(v.size());
  for (const auto& z : v) w.push_back(convert<To>(z));
  return w;
}

/// PA = LU with partial pivoting on the leading-limb modulus.
template <int K>
class LuFactorization {
 public:
  /// Throws ShapeError for a non-square matrix and SingularMatrixError
  /// when a pivot column is exactly zero.
  explicit LuFactorization(Matrix<K> a) : lu_(std::move(a)) {
    if (lu_.rows() != lu_.cols()) throw ShapeError("LU needs a square matrix");
    detail::bump_factorization_count();
    const std::size_t n = lu_.rows();
    perm_.resize(n);
    for (std::size_t i = 0; i < n; ++i) perm_[i] = i;
    for (std::size_t j = 0; j < n; ++j) {
      std::size_t p = j;
      double best = lu_(j, j).magnitude();
      for (std::size_t i = j + 1; i < n; ++i) {
        const double m = lu_(i, j).magnitude();
        if (m > best) {
          best = m;
          p = i;
        }
      }
      if (best == 0.0) throw SingularMatrixError(j);
      if (p != j) {
        for (std::size_t c = 0; c < n; ++c) std::swap(lu_(p, c), lu_(j, c));
        std::swap(perm_[p], perm_[j]);
      }
      const Complex<K> pivot = lu_(j, j);
      for (std::size_t i = j + 1; i < n; ++i) {
        if (lu_(i, j).is_zero()) continue;
        const Complex<K> m = lu_(i, j) / pivot;
        lu_(i, j) = m;
        for (std::size_t c = j + 1; c < n; ++c) lu_(i, c) -= m * lu_(j, c);
      }
    }
  }

  std::size_t size() const noexcept { return lu_.rows(); }

  Vector<K> solve(std::span<const Complex<K>> b) const {
    const std::size_t n = size();
    if (b.size() != n) throw ShapeError("LU solve: dimension mismatch");
    Vector<K> x(n);
    for (std::size_t i = 0; i < n; ++i) {
      Complex<K> s = b[perm_[i]];
      for (std::size_t j = 0; j < i; ++j) s -= lu_(i, j) * x[j];
      x[i] = s;
    }
    for (std::size_t i = n; i-- > 0;) {
      Complex<K> s = x[i];
      for (std::size_t j = i + 1; j < n; ++j) s -= lu_(i, j) * x[j];
      x[i] = s / lu_(i, i);
    }
    return x;
  }

  /// Solves A^H x = b.
  Vector<K> solve_adjoint(std::span<const Complex<K>> b) const {
    const std::size_t n = size();
    if (b.size() != n) throw ShapeError("LU solve: dimension mismatch");
    // A^H = U^H L^H P, so solve U^H y = b, L^H z = y, x = P^T z.
    Vector<K> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      Complex<K> s = b[i];
      for (std::size_t j = 0; j < i; ++j) s -= conj(lu_(j, i)) * y[j];
      y[i] = s / conj(lu_(i, i));
    }
    for (std::size_t i = n; i-- > 0;) {
      Complex<K> s = y[i];
      for (std::size_t j = i + 1; j < n; ++j) s -= conj(lu_(j, i)) * y[j];
      y[i] = s;
    }
    Vector<K> x(n);
    for (std::size_t i = 0; i < n; ++i) x[perm_[i]] = y[i];
    return x;
  }

  Matrix<K> lower() const {
    const std::size_t n = size();
    Matrix<K> l(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < i; ++j) l(i, j) = lu_(i, j);
      l(i, i) = Complex<K>(1.0);
    }
    return l;
  }

  Matrix<K> upper() const {
    const std::size_t n = size();
    Matrix<K> u(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i; j < n; ++j) u(i, j) = lu_(i, j);
    }
    return u;
  }

  /// Row i of PA is row permutation()[i] of A.
  const std::vector<std::size_t>& permutation() const noexcept {
    return perm_;
  }

 private:
  Matrix<K> lu_;
  std::vector<std::size_t> perm_;
};

/// A = QR by Householder reflections, for N >= n and full column rank.
template <int K>
class QrFactorization {
 public:
  /// Throws ShapeError when rows < cols and RankDeficientError when a
  /// diagonal entry of R is negligible.
  explicit QrFactorization(Matrix<K> a) : r_(std::move(a)) {
    const std::size_t m = r_.rows();
    const std::size_t n = r_.cols();
    if (m < n) throw ShapeError("QR needs at least as many rows as columns");
    detail::bump_factorization_count();
    double col_scale = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        const double v = r_(i, j).magnitude();
        s += v * v;
      }
      col_scale = std::max(col_scale, std::sqrt(s));
    }
    const double tiny =
        std::ldexp(col_scale * static_cast<double>(m), -52 * K + 4);
    reflectors_.reserve(n);
    for (std::size_t j = 0; j < n; ++j) {
      Expansion<K> xnorm_sq;
      for (std::size_t i = j; i < m; ++i) xnorm_sq += norm_sq(r_(i, j));
      const Expansion<K> xnorm = md_sqrt(xnorm_sq);
      if (!(std::abs(xnorm[0]) > tiny)) throw RankDeficientError(j);
      // alpha = -phase(x0) |x|, v = x - alpha e1.
      const Complex<K> x0 = r_(j, j);
      Complex<K> alpha;
      if (x0.is_zero()) {
        alpha = Complex<K>(-xnorm);
      } else {
        const Expansion<K> ax0 = abs(x0);
        alpha = scale_phase(x0, -xnorm / ax0);
      }
      Reflector h;
      h.v.assign(m - j, Complex<K>());
      h.v[0] = x0 - alpha;
      for (std::size_t i = j + 1; i < m; ++i) h.v[i - j] = r_(i, j);
      Expansion<K> vnorm_sq;
      for (const auto& z : h.v) vnorm_sq += norm_sq(z);
      h.beta = Expansion<K>(2.0) / vnorm_sq;
      r_(j, j) = alpha;
      for (std::size_t i = j + 1; i < m; ++i) r_(i, j) = Complex<K>();
      for (std::size_t c = j + 1; c < n; ++c) {
        Complex<K> w;
        for (std::size_t i = j; i < m; ++i) w += conj(h.v[i - j]) * r_(i, c);
        w = scale(w, h.beta);
        for (std::size_t i = j; i < m; ++i) r_(i, c) -= w * h.v[i - j];
      }
      reflectors_.push_back(std::move(h));
    }
  }

  std::size_t rows() const noexcept { return r_.rows(); }
  std::size_t cols() const noexcept { return r_.cols(); }

  /// Q^H b
  Vector<K> apply_adjoint(std::span<const Complex<K>> b) const {
    if (b.size() != rows()) throw ShapeError("QR: dimension mismatch");
    Vector<K> y(b.begin(), b.end());
    for (std::size_t j = 0; j < reflectors_.size(); ++j) {
      const Reflector& h = reflectors_[j];
      Complex<K> w;
      for (std::size_t i = j; i < rows(); ++i) w += conj(h.v[i - j]) * y[i];
      w = scale(w, h.beta);
      for (std::size_t i = j; i < rows(); ++i) y[i] -= w * h.v[i - j];
    }
    return y;
  }

  /// Minimizes |A x - b|.
  Vector<K> solve(std::span<const Complex<K>> b) const {
    const Vector<K> y = apply_adjoint(b);
    const std::size_t n = cols();
    Vector<K> x(n);
    for (std::size_t i = n; i-- > 0;) {
      Complex<K> s = y[i];
      for (std::size_t j = i + 1; j < n; ++j) s -= r_(i, j) * x[j];
      x[i] = s / r_(i, i);
    }
    return x;
  }

  /// The leading rows x cols block of Q, formed explicitly.
  Matrix<K> q() const {
    Matrix<K> out(rows(), cols());
    for (std::size_t c = 0; c < cols(); ++c) {
      Vector<K> e(rows());
      e[c] = Complex<K>(1.0);
      // Q e = H_0 H_1 ... H_{n-1} e
      for (std::size_t j = reflectors_.size(); j-- > 0;) {
        const Reflector& h = reflectors_[j];
        Complex<K> w;
        for (std::size_t i = j; i < rows(); ++i) w += conj(h.v[i - j]) * e[i];
        w = scale(w, h.beta);
        for (std::size_t i = j; i < rows(); ++i) e[i] -= w * h.v[i - j];
      }
      for (std::size_t i = 0; i < rows(); ++i) out(i, c) = e[i];
    }
    return out;
  }

  Matrix<K> r() const {
    Matrix<K> out(cols(), cols());
    for (std::size_t i = 0; i < cols(); ++i) {
      for (std::size_t j = i; j < cols(); ++j) out(i, j) = r_(i, j);
    }
    return out;
  }

 private:
  struct Reflector {
    std::vector<Complex<K>> v;
    Expansion<K> beta;
  };

  static Complex<K> scale_phase(const Complex<K>& z, const Expansion<K>& s) {
    return {z.re * s, z.im * s};
  }

  Matrix<K> r_;
  std::vector<Reflector> reflectors_;
};

template <int K>
Vector<K> lu_solve(const Matrix<K>& a, std::span<const Complex<K>> b) {
  return LuFactorization<K>(a).solve(b);
}

template <int K>
Vector<K> qr_least_squares(const Matrix<K>& a, std::span<const Complex<K>> b) {
  return QrFactorization<K>(a).solve(b);
}

/// Estimate of 1 / cond_1(A) from the LU factors (Hager's method with
/// Higham's alternating-sign safeguard, at most 5 iterations).
template <int K>
double inv_condition_estimate(const Matrix<K>& a,
                              const LuFactorization<K>& lu) {
  const std::size_t n = lu.size();
  const double anorm = one_norm(a);
  if (n == 0 || anorm == 0.0) return 0.0;
  auto to_cd = [](const Complex<K>& z) {
    return std::complex<double>(z.re.to_double(), z.im.to_double());
  };
  auto one_norm_of = [&](const Vector<K>& v) {
    double s = 0.0;
    for (const auto& z : v) s += std::abs(to_cd(z));
    return s;
  };
  Vector<K> x(n, Complex<K>(1.0 / static_cast<double>(n)));
  double estimate = 0.0;
  for (int iter = 0; iter < 5; ++iter) {
    const Vector<K> y = lu.solve(x);
    const double est = one_norm_of(y);
    if (iter > 0 && est <= estimate) break;
    estimate = est;
    Vector<K> xi(n);
    for (std::size_t i = 0; i < n; ++i) {
      const std::complex<double> yi = to_cd(y[i]);
      const double m = std::abs(yi);
      xi[i] = m == 0.0 ? Complex<K>(1.0)
                       : Complex<K>(yi.real() / m, yi.imag() / m);
    }
    const Vector<K> z = lu.solve_adjoint(xi);
    std::size_t jmax = 0;
    double zmax = -1.0;
    std::complex<double> ztx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const std::complex<double> zi = to_cd(z[i]);
      if (std::abs(zi) > zmax) {
        zmax = std::abs(zi);
        jmax = i;
      }
      ztx += std::conj(zi) * to_cd(x[i]);
    }
    if (iter > 0 && zmax <= ztx.real()) break;
    x.assign(n, Complex<K>());
    x[jmax] = Complex<K>(1.0);
  }
  Vector<K> alt(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double mag =
        1.0 + (n > 1 ? static_cast<double>(i) / static_cast<double>(n - 1) : 0.0);
    alt[i] = Complex<K>(i % 2 == 0 ? mag : -mag);
  }
  const double alt_est =
      2.0 * one_norm_of(lu.solve(alt)) / (3.0 * static_cast<double>(n));
  estimate = std::max(estimate, alt_est);
  if (!(estimate > 0.0) || !std::isfinite(estimate)) return 0.0;
  return 1.0 / (anorm * estimate);
}

/// Returns 0 for a singular matrix.
template <int K>
double inv_condition_estimate(const Matrix<K>& a) {
  try {
    const LuFactorization<K> lu(a);
    return inv_condition_estimate(a, lu);
  } catch (const SingularMatrixError&) {
    return 0.0;
  }
}

// Text format: a header line with the dimensions ("rows cols" for a matrix,
// "n" for a vector), then one entry per line as two exact expansion
// renderings "re im", row by row.

template <int K>
void write_vector(std::ostream& os, std::span<const Complex<K>> v) {
  os << v.size() << '\n';
  for (const auto& z : v) {
    os << to_exact_string(z.re) << ' ' << to_exact_string(z.im) << '\n';
  }
}

template <int K>
void write_matrix(std::ostream& os, const Matrix<K>& a) {
  os << a.rows() << ' ' << a.cols() << '\n';
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (const auto& z : a.row(i)) {
      os << to_exact_string(z.re) << ' ' << to_exact_string(z.im) << '\n';
    }
  }
}

namespace detail {
template <int K>
Complex<K> read_complex(std::istream& is) {
  std::string re;
  std::string im;
  if (!(is >> re >> im)) throw ParseError("truncated complex entry");
  return {parse_expansion<K>(re), parse_expansion<K>(im)};
}
}  // namespace detail

template <int K>
Vector<K> read_vector(std::istream& is) {
  std::size_t n = 0;
  if (!(is >> n)) throw ParseError("missing vector dimension");
  Vector<K> v(n);
  for (auto& z : v) z = detail::read_complex<K>(is);
  return v;
}

template <int K>
Matrix<K> read_matrix(std::istream& is) {
  std::size_t rows = 0;
  std::size_t cols = 0;
  if (!(is >> rows >> cols)) throw ParseError("missing matrix dimensions");
  Matrix<K> a(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) a(i, j) = detail::read_complex<K>(is);
  }
  return a;
}

}  // namespace mdseries
