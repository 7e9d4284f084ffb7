#pragma once

// Power series truncated at degree d with complex multiple-double
// coefficients, and the linearized layout that turns a vector (matrix) of
// series into a series with vector (matrix) coefficients.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mdseries/errors.hpp"
#include "mdseries/linalg.hpp"

namespace mdseries {

/// Coefficient-level operation counts for series arithmetic.
struct SeriesOpCounter {
  std::uint64_t mults = 0;     // coefficient multiplications in ps_mul
  std::uint64_t adds = 0;      // coefficient additions in ps_mul
  std::uint64_t products = 0;  // calls to ps_mul

  void reset() noexcept { *this = {}; }
};

/// The calling thread's counter.  Always active; reset before measuring.
inline SeriesOpCounter& series_op_counter() noexcept {
  thread_local SeriesOpCounter counter;
  return counter;
}

template <int K>
class Series {
 public:
  Series() : c_(1) {}
  explicit Series(int degree) : c_(checked(degree) + 1) {}
  Series(int degree, const Complex<K>& constant) : Series(degree) {
    c_[0] = constant;
  }
  explicit Series(std::vector<Complex<K>> coeffs) : c_(std::move(coeffs)) {
    if (c_.empty()) throw ShapeError("a series needs at least one coefficient");
  }

  int degree() const noexcept { return static_cast<int>(c_.size()) - 1; }

  Complex<K>& operator[](int i) { return c_[static_cast<std::size_t>(i)]; }
  const Complex<K>& operator[](int i) const {
    return c_[static_cast<std::size_t>(i)];
  }

  std::span<const Complex<K>> coeffs() const noexcept { return c_; }
  std::span<Complex<K>> coeffs() noexcept { return c_; }

  bool is_zero() const {
    for (const auto& z : c_) {
      if (!z.is_zero()) return false;
    }
    return true;
  }

  /// Keeps coefficients 0..degree.
  Series truncated(int degree) const {
    if (degree < 0 || degree > this->degree()) {
      throw ShapeError("truncation degree out of range");
    }
    return Series(std::vector<Complex<K>>(c_.begin(), c_.begin() + degree + 1));
  }

  friend bool operator==(const Series&, const Series&) = default;

 private:
  static std::size_t checked(int degree) {
    if (degree < 0) throw ShapeError("negative series degree");
    return static_cast<std::size_t>(degree);
  }

  std::vector<Complex<K>> c_;
};

namespace detail {

template <int K>
void require_same_degree(const Series<K>& x, const Series<K>& y) {
  if (x.degree() != y.degree()) throw ShapeError("series degree mismatch");
}

template <int K>
bool complex_less(const Complex<K>& a, const Complex<K>& b) {
  if (canonical_less(a.re, b.re)) return true;
  if (canonical_less(b.re, a.re)) return false;
  return canonical_less(a.im, b.im);
}

/// Lexicographic order on the coefficients starting at degree 0.
template <int K>
bool series_less(const Series<K>& x, const Series<K>& y) {
  for (int i = 0; i <= x.degree(); ++i) {
    if (complex_less(x[i], y[i])) return true;
    if (complex_less(y[i], x[i])) return false;
  }
  return false;
}

}  // namespace detail

template <int K>
Series<K> ps_add(const Series<K>& x, const Series<K>& y) {
  detail::require_same_degree(x, y);
  Series<K> z(x.degree());
  for (int i = 0; i <= x.degree(); ++i) z[i] = x[i] + y[i];
  return z;
}

template <int K>
Series<K> ps_sub(const Series<K>& x, const Series<K>& y) {
  detail::require_same_degree(x, y);
  Series<K> z(x.degree());
  for (int i = 0; i <= x.degree(); ++i) z[i] = x[i] - y[i];
  return z;
}

template <int K>
Series<K> ps_neg(const Series<K>& x) {
  Series<K> z(x.degree());
  for (int i = 0; i <= x.degree(); ++i) z[i] = -x[i];
  return z;
}

template <int K>
Series<K> ps_scale(const Series<K>& x, const Complex<K>& a) {
  Series<K> z(x.degree());
  for (int i = 0; i <= x.degree(); ++i) z[i] = a * x[i];
  return z;
}

/// Truncated Cauchy product.  Operands are put in a canonical order and each
/// coefficient is accumulated by increasing index of the first factor, so
/// ps_mul(x, y) and ps_mul(y, x) agree bit for bit.
template <int K>
Series<K> ps_mul(const Series<K>& x, const Series<K>& y) {
  detail::require_same_degree(x, y);
  const bool swap = detail::series_less(y, x);
  const Series<K>& a = swap ? y : x;
  const Series<K>& b = swap ? x : y;
  const int d = x.degree();
  Series<K> z(d);
  SeriesOpCounter& counter = series_op_counter();
  ++counter.products;
  for (int m = 0; m <= d; ++m) {
    Complex<K> s = a[0] * b[m];
    for (int i = 1; i <= m; ++i) s += a[i] * b[m - i];
    z[m] = s;
    counter.mults += static_cast<std::uint64_t>(m) + 1;
    counter.adds += static_cast<std::uint64_t>(m);
  }
  return z;
}

/// 1/x by the recurrence y_m = -(x_1 y_{m-1} + ... + x_m y_0) / x_0.
/// Throws DomainError when the constant term is zero.
template <int K>
Series<K> ps_inverse(const Series<K>& x) {
  if (x[0].is_zero()) throw DomainError("series with zero constant term is not invertible");
  const int d = x.degree();
  Series<K> y(d);
  y[0] = Complex<K>(1.0) / x[0];
  for (int m = 1; m <= d; ++m) {
    Complex<K> s = x[1] * y[m - 1];
    for (int i = 2; i <= m; ++i) s += x[i] * y[m - i];
    y[m] = -(s / x[0]);
  }
  return y;
}

template <int K>
Series<K> operator+(const Series<K>& x, const Series<K>& y) {
  return ps_add(x, y);
}
template <int K>
Series<K> operator-(const Series<K>& x, const Series<K>& y) {
  return ps_sub(x, y);
}
template <int K>
Series<K> operator-(const Series<K>& x) {
  return ps_neg(x);
}
template <int K>
Series<K> operator*(const Series<K>& x, const Series<K>& y) {
  return ps_mul(x, y);
}

template <int To, int From>
Series<To> convert(const Series<From>& x) {
  Series<To> y(x.degree());
  for (int i = 0; i <= x.degree(); ++i) y[i] = convert<To>(x[i]);
  return y;
}

/// A power series whose coefficients are vectors: b_0 + b_1 t + ... + b_d t^d.
template <int K>
struct SeriesVector {
  std::vector<Vector<K>> coeffs;

  int degree() const noexcept { return static_cast<int>(coeffs.size()) - 1; }
  std::size_t dim() const noexcept { return coeffs.empty() ? 0 : coeffs[0].size(); }

  friend bool operator==(const SeriesVector&, const SeriesVector&) = default;
};

/// A power series whose coefficients are matrices: A_0 + A_1 t + ... + A_d t^d.
template <int K>
struct SeriesMatrix {
  std::vector<Matrix<K>> coeffs;

  int degree() const noexcept { return static_cast<int>(coeffs.size()) - 1; }
  std::size_t rows() const noexcept { return coeffs.empty() ? 0 : coeffs[0].rows(); }
  std::size_t cols() const noexcept { return coeffs.empty() ? 0 : coeffs[0].cols(); }

  friend bool operator==(const SeriesMatrix&, const SeriesMatrix&) = default;
};

/// Transposes a vector of series into a series of vectors.
template <int K>
SeriesVector<K> linearize(std::span<const Series<K>> v) {
  SeriesVector<K> out;
  if (v.empty()) return out;
  const int d = v[0].degree();
  for (const auto& s : v) {
    if (s.degree() != d) throw ShapeError("linearize: ragged degrees");
  }
  out.coeffs.assign(static_cast<std::size_t>(d) + 1, Vector<K>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) {
    for (int j = 0; j <= d; ++j) out.coeffs[static_cast<std::size_t>(j)][i] = v[i][j];
  }
  return out;
}

template <int K>
SeriesVector<K> linearize(const std::vector<Series<K>>& v) {
  return linearize(std::span<const Series<K>>(v));
}

template <int K>
std::vector<Series<K>> delinearize(const SeriesVector<K>& sv) {
  if (sv.coeffs.empty()) return {};
  const std::size_t n = sv.dim();
  for (const auto& c : sv.coeffs) {
    if (c.size() != n) throw ShapeError("delinearize: ragged coefficient vectors");
  }
  std::vector<Series<K>> out(n, Series<K>(sv.degree()));
  for (std::size_t i = 0; i < n; ++i) {
    for (int j = 0; j <= sv.degree(); ++j) {
      out[i][j] = sv.coeffs[static_cast<std::size_t>(j)][i];
    }
  }
  return out;
}

/// Terms in decreasing degree, e.g. "2.48015873015868E-05*t^8 - 5.00000000000000E-01*t^2 + 1.00000000000000E+00".
/// Zero coefficients are skipped; a coefficient with a nonzero imaginary
/// part is written as "(re + im*i)".  Only leading limbs are shown.
template <int K>
std::string to_string(const Series<K>& x) {
  std::string out;
  for (int i = x.degree(); i >= 0; --i) {
    const Complex<K>& c = x[i];
    if (c.is_zero()) continue;
    const double re = c.re[0];
    const double im = c.im[0];
    std::string coef;
    bool negative = false;
    if (im == 0.0) {
      negative = std::signbit(re);
      coef = format_scientific(std::abs(re));
    } else {
      coef = "(" + format_scientific(re) + (std::signbit(im) ? " - " : " + ") +
             format_scientific(std::abs(im)) + "*i)";
    }
    if (out.empty()) {
      if (negative) out += "-";
    } else {
      out += negative ? " - " : " + ";
    }
    out += coef;
    if (i == 1) out += "*t";
    if (i > 1) out += "*t^" + std::to_string(i);
  }
  return out.empty() ? format_scientific(0.0) : out;
}

}  // namespace mdseries
