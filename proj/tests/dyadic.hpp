#pragma once

// Exact dyadic rationals m * 2^e with arbitrary-size integer m.  Every finite
// binary64 value is such a number, so sums and products of doubles can be
// checked exactly.  Test-only; independent of the library arithmetic.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

namespace oracle {

class Dyadic {
 public:
  Dyadic() = default;

  explicit Dyadic(double x) {
    if (x == 0.0) return;
    int e = 0;
    const double m = std::frexp(std::abs(x), &e);  // m in [0.5, 1)
    auto mant = static_cast<std::uint64_t>(std::ldexp(m, 53));
    exp_ = e - 53;
    negative_ = x < 0;
    mag_ = {static_cast<std::uint32_t>(mant),
            static_cast<std::uint32_t>(mant >> 32)};
    trim();
  }

  bool is_zero() const { return mag_.empty(); }
  int sign() const { return is_zero() ? 0 : (negative_ ? -1 : 1); }

  Dyadic operator-() const {
    Dyadic r = *this;
    if (!r.is_zero()) r.negative_ = !r.negative_;
    return r;
  }

  /// Multiplication by 2^p.
  Dyadic scaled(long p) const {
    Dyadic r = *this;
    if (!r.is_zero()) r.exp_ += p;
    return r;
  }

  friend Dyadic operator+(const Dyadic& a, const Dyadic& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    const long e = std::min(a.exp_, b.exp_);
    const std::vector<std::uint32_t> ma = shl(a.mag_, a.exp_ - e);
    const std::vector<std::uint32_t> mb = shl(b.mag_, b.exp_ - e);
    Dyadic r;
    r.exp_ = e;
    if (a.negative_ == b.negative_) {
      r.mag_ = add_mag(ma, mb);
      r.negative_ = a.negative_;
    } else {
      const int c = cmp_mag(ma, mb);
      if (c == 0) return Dyadic();
      if (c > 0) {
        r.mag_ = sub_mag(ma, mb);
        r.negative_ = a.negative_;
      } else {
        r.mag_ = sub_mag(mb, ma);
        r.negative_ = b.negative_;
      }
    }
    r.trim();
    return r;
  }

  friend Dyadic operator-(const Dyadic& a, const Dyadic& b) { return a + (-b); }

  friend Dyadic operator*(const Dyadic& a, const Dyadic& b) {
    if (a.is_zero() || b.is_zero()) return Dyadic();
    Dyadic r;
    r.mag_.assign(a.mag_.size() + b.mag_.size(), 0);
    for (std::size_t i = 0; i < a.mag_.size(); ++i) {
      std::uint64_t carry = 0;
      for (std::size_t j = 0; j < b.mag_.size(); ++j) {
        const std::uint64_t t = static_cast<std::uint64_t>(a.mag_[i]) *
                                    b.mag_[j] +
                                r.mag_[i + j] + carry;
        r.mag_[i + j] = static_cast<std::uint32_t>(t);
        carry = t >> 32;
      }
      std::size_t k = i + b.mag_.size();
      while (carry) {
        const std::uint64_t t = static_cast<std::uint64_t>(r.mag_[k]) + carry;
        r.mag_[k++] = static_cast<std::uint32_t>(t);
        carry = t >> 32;
      }
    }
    r.exp_ = a.exp_ + b.exp_;
    r.negative_ = a.negative_ != b.negative_;
    r.trim();
    return r;
  }

  friend bool operator==(const Dyadic& a, const Dyadic& b) {
    return (a - b).is_zero();
  }

  /// |a| <= |b|
  friend bool abs_le(const Dyadic& a, const Dyadic& b) {
    if (a.is_zero()) return true;
    if (b.is_zero()) return false;
    const long e = std::min(a.exp_, b.exp_);
    return cmp_mag(shl(a.mag_, a.exp_ - e), shl(b.mag_, b.exp_ - e)) <= 0;
  }

  /// floor(log2 |x|) for nonzero x.
  long ilog2() const {
    const std::uint32_t top = mag_.back();
    int bits = 0;
    while ((top >> bits) > 1u) ++bits;
    return exp_ + 32 * static_cast<long>(mag_.size() - 1) + bits;
  }

  /// log2 of |a| / |b| to within about one unit (for reporting).
  friend double log2_ratio(const Dyadic& a, const Dyadic& b) {
    if (a.is_zero()) return -INFINITY;
    return static_cast<double>(a.ilog2() - b.ilog2());
  }

 private:
  static std::vector<std::uint32_t> shl(const std::vector<std::uint32_t>& m,
                                        long bits) {
    const std::size_t words = static_cast<std::size_t>(bits / 32);
    const int rem = static_cast<int>(bits % 32);
    std::vector<std::uint32_t> r(words, 0);
    r.reserve(words + m.size() + 1);
    std::uint32_t carry = 0;
    for (const std::uint32_t w : m) {
      r.push_back(rem ? (w << rem) | carry : w);
      carry = rem ? w >> (32 - rem) : 0;
    }
    if (carry) r.push_back(carry);
    return r;
  }

  static int cmp_mag(const std::vector<std::uint32_t>& a,
                     const std::vector<std::uint32_t>& b) {
    std::size_t na = a.size();
    std::size_t nb = b.size();
    while (na && a[na - 1] == 0) --na;
    while (nb && b[nb - 1] == 0) --nb;
    if (na != nb) return na < nb ? -1 : 1;
    for (std::size_t i = na; i-- > 0;) {
      if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
    }
    return 0;
  }

  static std::vector<std::uint32_t> add_mag(const std::vector<std::uint32_t>& a,
                                            const std::vector<std::uint32_t>& b) {
    std::vector<std::uint32_t> r(std::max(a.size(), b.size()) + 1, 0);
    std::uint64_t carry = 0;
    for (std::size_t i = 0; i < r.size(); ++i) {
      std::uint64_t t = carry;
      if (i < a.size()) t += a[i];
      if (i < b.size()) t += b[i];
      r[i] = static_cast<std::uint32_t>(t);
      carry = t >> 32;
    }
    return r;
  }

  // Requires |a| >= |b|.
  static std::vector<std::uint32_t> sub_mag(const std::vector<std::uint32_t>& a,
                                            const std::vector<std::uint32_t>& b) {
    std::vector<std::uint32_t> r(a.size(), 0);
    std::int64_t borrow = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      std::int64_t t = static_cast<std::int64_t>(a[i]) - borrow;
      if (i < b.size()) t -= b[i];
      borrow = t < 0;
      if (t < 0) t += (std::int64_t{1} << 32);
      r[i] = static_cast<std::uint32_t>(t);
    }
    return r;
  }

  void trim() {
    while (!mag_.empty() && mag_.back() == 0) mag_.pop_back();
    if (mag_.empty()) {
      exp_ = 0;
      negative_ = false;
      return;
    }
    // Strip trailing zero words so exponents stay small.
    std::size_t lead = 0;
    while (mag_[lead] == 0) ++lead;
    if (lead) {
      mag_.erase(mag_.begin(), mag_.begin() + static_cast<long>(lead));
      exp_ += 32 * static_cast<long>(lead);
    }
  }

  std::vector<std::uint32_t> mag_;  // little-endian 32-bit words
  long exp_ = 0;
  bool negative_ = false;
};

/// Exact value of a sequence of limbs.
template <class Limbs>
Dyadic exact_sum(const Limbs& limbs) {
  Dyadic s;
  for (const double v : limbs) s = s + Dyadic(v);
  return s;
}

/// |approx - exact| <= 2^bits_exponent * |exact|
inline bool within_relative(const Dyadic& approx, const Dyadic& exact,
                            long bits_exponent) {
  return abs_le((approx - exact).scaled(-bits_exponent), exact);
}

}  // namespace oracle
