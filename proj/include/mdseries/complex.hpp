#pragma once

#include <cmath>
#include <string>

#include "mdseries/expansion.hpp"

namespace mdseries {

/// Complex number with multiple-double parts.
template <int K>
struct Complex {
  Expansion<K> re;
  Expansion<K> im;

  constexpr Complex() = default;
  constexpr Complex(const Expansion<K>& r) : re(r) {}  // NOLINT
  constexpr Complex(double r) : re(r) {}               // NOLINT
  constexpr Complex(const Expansion<K>& r, const Expansion<K>& i)
      : re(r), im(i) {}
  constexpr Complex(double r, double i) : re(r), im(i) {}

  bool is_zero() const noexcept { return re.is_zero() && im.is_zero(); }
  bool is_finite() const noexcept { return re.is_finite() && im.is_finite(); }

  /// Modulus from the leading limbs only.
  double magnitude() const noexcept { return std::hypot(re[0], im[0]); }

  Complex operator-() const { return {-re, -im}; }

  friend Complex operator+(const Complex& a, const Complex& b) {
    return {a.re + b.re, a.im + b.im};
  }
  friend Complex operator-(const Complex& a, const Complex& b) {
    return {a.re - b.re, a.im - b.im};
  }
  friend Complex operator*(const Complex& a, const Complex& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  /// Throws DivisionByZero when b is zero.
  friend Complex operator/(const Complex& a, const Complex& b) {
    if (b.im.is_zero()) return {a.re / b.re, a.im / b.re};
    const Expansion<K> den = b.re * b.re + b.im * b.im;
    if (den.is_zero()) throw DivisionByZero();
    const Expansion<K> nre = a.re * b.re + a.im * b.im;
    const Expansion<K> nim = a.im * b.re - a.re * b.im;
    return {nre / den, nim / den};
  }

  Complex& operator+=(const Complex& b) { return *this = *this + b; }
  Complex& operator-=(const Complex& b) { return *this = *this - b; }
  Complex& operator*=(const Complex& b) { return *this = *this * b; }

  friend bool operator==(const Complex&, const Complex&) = default;
};

template <int K>
Complex<K> conj(const Complex<K>& z) {
  return {z.re, -z.im};
}

/// |z|^2
template <int K>
Expansion<K> norm_sq(const Complex<K>& z) {
  return z.re * z.re + z.im * z.im;
}

template <int K>
Expansion<K> abs(const Complex<K>& z) {
  return md_sqrt(norm_sq(z));
}

template <int K>
Complex<K> scale(const Complex<K>& z, const Expansion<K>& s) {
  return {z.re * s, z.im * s};
}

template <int To, int From>
Complex<To> convert(const Complex<From>& z) {
  return {convert<To>(z.re), convert<To>(z.im)};
}

/// Unit-modulus number (a + b i) / sqrt(a^2 + b^2), normalized at level K.
template <int K>
Complex<K> unit_complex(double a, double b) {
  const Complex<K> z(a, b);
  const Expansion<K> r = abs(z);
  return {z.re / r, z.im / r};
}

template <int K>
std::string to_string(const Complex<K>& z) {
  return to_string(z.re) + "  " + to_string(z.im);
}

}  // namespace mdseries
