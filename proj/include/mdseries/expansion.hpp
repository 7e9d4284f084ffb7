#pragma once

// Multiple-double numbers: a value is stored as the unevaluated sum of K
// hardware doubles of decreasing magnitude.  K = 2 follows the double-double
// algorithms of Hida, Li and Bailey; the other levels use a generic scheme of
// exact products, diagonal accumulation and renormalization.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mdseries/errors.hpp"

namespace mdseries {

/// Counts of hardware double operations.
struct OpCounter {
  std::uint64_t adds = 0;
  std::uint64_t subs = 0;
  std::uint64_t muls = 0;
  std::uint64_t divs = 0;
  std::uint64_t fmas = 0;
  std::uint64_t sqrts = 0;

  std::uint64_t total() const noexcept {
    return adds + subs + muls + divs + fmas + sqrts;
  }
  void reset() noexcept { *this = OpCounter{}; }

  OpCounter& operator+=(const OpCounter& o) noexcept {
    adds += o.adds;
    subs += o.subs;
    muls += o.muls;
    divs += o.divs;
    fmas += o.fmas;
    sqrts += o.sqrts;
    return *this;
  }
  friend bool operator==(const OpCounter&, const OpCounter&) = default;
};

constexpr bool is_precision_level(int k) noexcept {
  return k == 1 || k == 2 || k == 3 || k == 4 || k == 5 || k == 8 || k == 10;
}

inline constexpr std::array<int, 7> kPrecisionLevels{1, 2, 3, 4, 5, 8, 10};

/// True when two_prod uses a hardware fused multiply-add, false when it
/// falls back to Dekker's splitting.  Fixed per build.
#ifdef FP_FAST_FMA
inline constexpr bool kHardwareFma = true;
#else
inline constexpr bool kHardwareFma = false;
#endif

const char* two_prod_method() noexcept;

/// Throws DomainError unless the floating-point environment rounds to
/// nearest.  Also checked once at program startup.
void require_round_to_nearest();

struct Eft {
  double value;
  double error;
};

namespace detail {

struct PlainOps {
  static double add(double a, double b) noexcept { return a + b; }
  static double sub(double a, double b) noexcept { return a - b; }
  static double mul(double a, double b) noexcept { return a * b; }
  static double div(double a, double b) noexcept { return a / b; }
  static double fma(double a, double b, double c) noexcept {
    return std::fma(a, b, c);
  }
  static double sqrt(double a) noexcept { return std::sqrt(a); }
};

inline thread_local OpCounter* tl_counter = nullptr;

// Only used inside a CountingScope, which installs tl_counter.
struct CountingOps {
  static double add(double a, double b) noexcept {
    ++tl_counter->adds;
    return a + b;
  }
  static double sub(double a, double b) noexcept {
    ++tl_counter->subs;
    return a - b;
  }
  static double mul(double a, double b) noexcept {
    ++tl_counter->muls;
    return a * b;
  }
  static double div(double a, double b) noexcept {
    ++tl_counter->divs;
    return a / b;
  }
  static double fma(double a, double b, double c) noexcept {
    ++tl_counter->fmas;
    return std::fma(a, b, c);
  }
  static double sqrt(double a) noexcept {
    ++tl_counter->sqrts;
    return std::sqrt(a);
  }
};

template <class Ops>
inline Eft two_sum(double a, double b) noexcept {
  const double s = Ops::add(a, b);
  const double bb = Ops::sub(s, a);
  const double e = Ops::add(Ops::sub(a, Ops::sub(s, bb)), Ops::sub(b, bb));
  return {s, e};
}

// Requires |a| >= |b| (or a == 0).
template <class Ops>
inline Eft quick_two_sum(double a, double b) noexcept {
  const double s = Ops::add(a, b);
  const double e = Ops::sub(b, Ops::sub(s, a));
  return {s, e};
}

template <class Ops>
inline Eft split(double a) noexcept {
  constexpr double kSplitter = 134217729.0;  // 2^27 + 1
  const double t = Ops::mul(kSplitter, a);
  const double hi = Ops::sub(t, Ops::sub(t, a));
  const double lo = Ops::sub(a, hi);
  return {hi, lo};
}

template <class Ops>
inline Eft two_prod(double a, double b) noexcept {
  const double p = Ops::mul(a, b);
  if constexpr (kHardwareFma) {
    return {p, Ops::fma(a, b, -p)};
  } else {
    const auto [ahi, alo] = split<Ops>(a);
    const auto [bhi, blo] = split<Ops>(b);
    double e = Ops::sub(Ops::mul(ahi, bhi), p);
    e = Ops::add(e, Ops::mul(ahi, blo));
    e = Ops::add(e, Ops::mul(alo, bhi));
    e = Ops::add(e, Ops::mul(alo, blo));
    return {p, e};
  }
}

// Canonical form: every limb is the rounded sum of itself and its
// successor, so |v[i+1]| <= ulp(v[i]) / 2 <= 2^-53 |v[i]|, and zeros only
// trail.
inline bool nonoverlapping(const double* v, std::size_t n) noexcept {
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (v[i] == 0.0) {
      if (v[i + 1] != 0.0) return false;
    } else if (!(v[i] + v[i + 1] == v[i])) {
      return false;
    }
  }
  return true;
}

inline constexpr int kMaxDistillPasses = 8;

// Rewrites v[0..n) in place into a canonical decreasing sequence with the
// same exact sum.  Every pass is an
// error-free transformation (backward two_sum sweep, then a forward sweep
// that drops zeros); passes repeat until the sequence is nonoverlapping.
// Returns the new length (at least 1).  A non-finite sum is returned as a
// single limb.
template <class Ops>
std::size_t distill(double* v, std::size_t n) noexcept {
  if (n == 0) {
    v[0] = 0.0;
    return 1;
  }
  for (int pass = 0; pass < kMaxDistillPasses; ++pass) {
    for (std::size_t i = n - 1; i > 0; --i) {
      const Eft r = two_sum<Ops>(v[i - 1], v[i]);
      v[i - 1] = r.value;
      v[i] = r.error;
    }
    if (!std::isfinite(v[0])) return 1;
    std::size_t out = 0;
    double carry = v[0];
    for (std::size_t i = 1; i < n; ++i) {
      if (v[i] == 0.0) continue;
      const Eft r = two_sum<Ops>(carry, v[i]);
      if (r.error != 0.0) {
        v[out++] = r.value;
        carry = r.error;
      } else {
        carry = r.value;
      }
    }
    if (carry != 0.0 || out == 0) v[out++] = carry;
    n = out;
    if (nonoverlapping(v, n)) break;
  }
  return n;
}

}  // namespace detail

inline Eft two_sum(double a, double b) noexcept {
  return detail::two_sum<detail::PlainOps>(a, b);
}
inline Eft quick_two_sum(double a, double b) noexcept {
  return detail::quick_two_sum<detail::PlainOps>(a, b);
}
inline Eft two_prod(double a, double b) noexcept {
  return detail::two_prod<detail::PlainOps>(a, b);
}

/// False when a*b leaves the range where the product error is itself a
/// representable double (underflow into the subnormals or overflow).
inline bool two_prod_is_exact(double a, double b) noexcept {
  const double p = a * b;
  if (p == 0.0) return a == 0.0 || b == 0.0;
  return std::isfinite(p) && std::abs(p) >= 0x1p-969;
}

/// Installs a per-thread op counter for the counted entry points.
class CountingScope {
 public:
  explicit CountingScope(OpCounter& counter) noexcept
      : previous_(detail::tl_counter) {
    detail::tl_counter = &counter;
  }
  ~CountingScope() { detail::tl_counter = previous_; }
  CountingScope(const CountingScope&) = delete;
  CountingScope& operator=(const CountingScope&) = delete;

 private:
  OpCounter* previous_;
};

template <int K>
class Expansion {
  static_assert(is_precision_level(K), "unsupported precision level");

 public:
  static constexpr int kLimbs = K;

  constexpr Expansion() noexcept = default;
  constexpr Expansion(double x) noexcept : limbs_{x} {}  // NOLINT

  /// Takes limbs that already satisfy the normalization invariant.
  static constexpr Expansion from_normalized(
      const std::array<double, K>& limbs) noexcept {
    Expansion e;
    e.limbs_ = limbs;
    return e;
  }

  constexpr double operator[](int i) const noexcept { return limbs_[i]; }
  constexpr const std::array<double, K>& limbs() const noexcept {
    return limbs_;
  }
  constexpr double leading() const noexcept { return limbs_[0]; }

  bool is_finite() const noexcept { return std::isfinite(limbs_[0]); }
  constexpr bool is_zero() const noexcept { return limbs_[0] == 0.0; }
  constexpr int sign() const noexcept {
    return limbs_[0] > 0.0 ? 1 : (limbs_[0] < 0.0 ? -1 : 0);
  }

  /// Number of leading nonzero limbs.
  constexpr int size() const noexcept {
    int n = 0;
    while (n < K && limbs_[n] != 0.0) ++n;
    return n;
  }

  double to_double() const noexcept {
    double s = 0.0;
    for (int i = K - 1; i >= 0; --i) s += limbs_[i];
    return s;
  }

  constexpr Expansion operator-() const noexcept {
    Expansion e;
    for (int i = 0; i < K; ++i) e.limbs_[i] = -limbs_[i];
    return e;
  }

  friend Expansion operator+(const Expansion& x, const Expansion& y) {
    return md_add(x, y);
  }
  friend Expansion operator-(const Expansion& x, const Expansion& y) {
    return md_sub(x, y);
  }
  friend Expansion operator*(const Expansion& x, const Expansion& y) {
    return md_mul(x, y);
  }
  friend Expansion operator/(const Expansion& x, const Expansion& y) {
    return md_div(x, y);
  }

  Expansion& operator+=(const Expansion& y) { return *this = *this + y; }
  Expansion& operator-=(const Expansion& y) { return *this = *this - y; }
  Expansion& operator*=(const Expansion& y) { return *this = *this * y; }
  Expansion& operator/=(const Expansion& y) { return *this = *this / y; }

  /// Bitwise equality of the limbs (normalized forms are compared as stored).
  friend constexpr bool operator==(const Expansion&,
                                   const Expansion&) = default;

 private:
  std::array<double, K> limbs_{};
};

namespace detail {

// Deterministic operand order so that binary operations are commutative
// bit for bit.
template <int K>
constexpr bool canonical_less(const Expansion<K>& a,
                              const Expansion<K>& b) noexcept {
  for (int i = 0; i < K; ++i) {
    if (a[i] != b[i]) return a[i] < b[i];
  }
  return false;
}

template <int K, class Ops>
Expansion<K> round_terms(double* v, std::size_t n) noexcept {
  if (n == 0 || !nonoverlapping(v, n)) n = distill<Ops>(v, n);
  std::array<double, K> out{};
  if (!std::isfinite(v[0])) {
    out[0] = v[0];
    return Expansion<K>::from_normalized(out);
  }
  if (n > static_cast<std::size_t>(K)) {
    v[K - 1] = Ops::add(v[K - 1], v[K]);
    n = K;
    if (!nonoverlapping(v, n)) n = distill<Ops>(v, n);
  }
  std::copy_n(v, std::min<std::size_t>(n, K), out.begin());
  return Expansion<K>::from_normalized(out);
}

template <int K, class Ops>
Expansion<K> add(const Expansion<K>& x, const Expansion<K>& y) noexcept {
  if constexpr (K == 1) {
    return Expansion<1>(Ops::add(x[0], y[0]));
  } else if constexpr (K == 2) {
    Eft s = two_sum<Ops>(x[0], y[0]);
    const Eft t = two_sum<Ops>(x[1], y[1]);
    s.error = Ops::add(s.error, t.value);
    s = quick_two_sum<Ops>(s.value, s.error);
    s.error = Ops::add(s.error, t.error);
    s = quick_two_sum<Ops>(s.value, s.error);
    if (!std::isfinite(s.value)) return Expansion<2>(s.value);
    return Expansion<2>::from_normalized({s.value, s.error});
  } else {
    // Merge by decreasing magnitude so one distillation pass usually
    // suffices.
    const int nx = x.size();
    const int ny = y.size();
    std::array<double, 2 * K> t;
    std::size_t n = 0;
    int i = 0;
    int j = 0;
    while (i < nx && j < ny) {
      t[n++] = std::abs(y[j]) > std::abs(x[i]) ? y[j++] : x[i++];
    }
    while (i < nx) t[n++] = x[i++];
    while (j < ny) t[n++] = y[j++];
    return round_terms<K, Ops>(t.data(), n);
  }
}

template <int K, class Ops>
Expansion<K> mul(const Expansion<K>& x, const Expansion<K>& y) noexcept {
  if constexpr (K == 1) {
    return Expansion<1>(Ops::mul(x[0], y[0]));
  } else if constexpr (K == 2) {
    Eft p = two_prod<Ops>(x[0], y[0]);
    p.error = Ops::add(p.error,
                       Ops::add(Ops::mul(x[0], y[1]), Ops::mul(x[1], y[0])));
    p = quick_two_sum<Ops>(p.value, p.error);
    if (!std::isfinite(p.value)) return Expansion<2>(p.value);
    return Expansion<2>::from_normalized({p.value, p.error});
  } else {
    // Diagonal n collects the products x_i y_j with i + j = n together with
    // the rounding errors left over from diagonal n - 1.  Diagonals below K
    // are summed exactly; diagonal K is the guard and is summed plainly.
    const int nx = x.size();
    const int ny = y.size();
    constexpr std::size_t kCap = K * K + 2 * K + 2;
    std::array<double, kCap> buf_a;
    std::array<double, kCap> buf_b;
    double* pending = buf_a.data();
    double* next = buf_b.data();
    std::size_t npending = 0;
    std::array<double, K + 1> sums{};
    for (int n = 0; n < K; ++n) {
      std::size_t nnext = 0;
      double s = 0.0;
      bool first = true;
      auto accumulate = [&](double term) {
        if (first) {
          s = term;
          first = false;
        } else {
          const Eft r = two_sum<Ops>(s, term);
          s = r.value;
          next[nnext++] = r.error;
        }
      };
      for (int i = std::max(0, n - ny + 1); i <= std::min(n, nx - 1); ++i) {
        const Eft p = two_prod<Ops>(x[i], y[n - i]);
        accumulate(p.value);
        next[nnext++] = p.error;
      }
      for (std::size_t j = 0; j < npending; ++j) accumulate(pending[j]);
      sums[n] = s;
      std::swap(pending, next);
      npending = nnext;
    }
    double guard = 0.0;
    for (int i = std::max(0, K - ny + 1); i <= std::min(K, nx - 1); ++i) {
      guard = Ops::add(guard, Ops::mul(x[i], y[K - i]));
    }
    for (std::size_t j = 0; j < npending; ++j) {
      guard = Ops::add(guard, pending[j]);
    }
    sums[K] = guard;
    return round_terms<K, Ops>(sums.data(), K + 1);
  }
}

// x * b for a double b, exact before rounding to K limbs.
template <int K, class Ops>
Expansion<K> mul_double(const Expansion<K>& x, double b) noexcept {
  if constexpr (K == 1) {
    return Expansion<1>(Ops::mul(x[0], b));
  } else if constexpr (K == 2) {
    Eft p = two_prod<Ops>(x[0], b);
    p.error = Ops::add(p.error, Ops::mul(x[1], b));
    p = quick_two_sum<Ops>(p.value, p.error);
    if (!std::isfinite(p.value)) return Expansion<2>(p.value);
    return Expansion<2>::from_normalized({p.value, p.error});
  } else {
    std::array<double, 2 * K> t;
    std::size_t n = 0;
    const int nx = x.size();
    for (int i = 0; i < nx; ++i) {
      const Eft p = two_prod<Ops>(x[i], b);
      t[n++] = p.value;
      t[n++] = p.error;
    }
    return round_terms<K, Ops>(t.data(), n);
  }
}

template <int K, class Ops>
Expansion<K> div(const Expansion<K>& x, const Expansion<K>& y) noexcept {
  if constexpr (K == 1) {
    return Expansion<1>(Ops::div(x[0], y[0]));
  } else if constexpr (K == 2) {
    const double q1 = Ops::div(x[0], y[0]);
    Expansion<2> r = add<2, Ops>(x, -mul_double<2, Ops>(y, q1));
    const double q2 = Ops::div(r[0], y[0]);
    r = add<2, Ops>(r, -mul_double<2, Ops>(y, q2));
    const double q3 = Ops::div(r[0], y[0]);
    const Eft q = quick_two_sum<Ops>(q1, q2);
    Eft s = two_sum<Ops>(q.value, q3);
    s.error = Ops::add(s.error, q.error);
    s = quick_two_sum<Ops>(s.value, s.error);
    if (!std::isfinite(s.value)) return Expansion<2>(s.value);
    return Expansion<2>::from_normalized({s.value, s.error});
  } else {
    // Long division: K + 1 quotient digits, each followed by an exact
    // multiply-and-subtract on the remainder.
    std::array<double, K + 1> q{};
    Expansion<K> r = x;
    const int ny = y.size();
    for (int i = 0; i <= K; ++i) {
      q[i] = Ops::div(r[0], y[0]);
      if (i == K || r.is_zero() || !std::isfinite(q[i])) break;
      std::array<double, 3 * K> t;
      std::size_t n = 0;
      const int nr = r.size();
      for (int j = 0; j < std::max(nr, ny); ++j) {
        if (j < nr) t[n++] = r[j];
        if (j < ny) {
          const Eft p = two_prod<Ops>(q[i], y[j]);
          t[n++] = -p.value;
          t[n++] = -p.error;
        }
      }
      r = round_terms<K, Ops>(t.data(), n);
    }
    return round_terms<K, Ops>(q.data(), K + 1);
  }
}

template <int K, class Ops>
Expansion<K> scale(const Expansion<K>& x, double pow2) noexcept {
  std::array<double, K> out{};
  for (int i = 0; i < K; ++i) {
    out[i] = x[i] == 0.0 ? 0.0 : Ops::mul(x[i], pow2);
  }
  return Expansion<K>::from_normalized(out);
}

constexpr int ceil_log2(int k) noexcept {
  int s = 0;
  while ((1 << s) < k) ++s;
  return s;
}

// Newton iteration on 1/sqrt(x) from the hardware seed, then one
// correction of s = x * y.  ceil(log2 K) + 1 correction steps in total.
template <int K, class Ops>
Expansion<K> sqrt(const Expansion<K>& x) noexcept {
  if constexpr (K == 1) {
    return Expansion<1>(Ops::sqrt(x[0]));
  } else {
    if (x.is_zero()) return Expansion<K>();
    if (!x.is_finite()) return Expansion<K>(std::sqrt(x[0]));
    Expansion<K> y(Ops::div(1.0, Ops::sqrt(x[0])));
    for (int step = 0; step < ceil_log2(K); ++step) {
      const Expansion<K> yy = mul<K, Ops>(y, y);
      const Expansion<K> h = add<K, Ops>(Expansion<K>(1.0), -mul<K, Ops>(x, yy));
      y = add<K, Ops>(y, scale<K, Ops>(mul<K, Ops>(y, h), 0.5));
    }
    const Expansion<K> s = mul<K, Ops>(x, y);
    const Expansion<K> residual = add<K, Ops>(x, -mul<K, Ops>(s, s));
    return add<K, Ops>(s, scale<K, Ops>(mul<K, Ops>(y, residual), 0.5));
  }
}

}  // namespace detail

/// Normalizes an arbitrary finite sequence of doubles to K limbs.  The
/// result is the exact sum rounded to K limbs.
template <int K>
Expansion<K> renormalize(std::span<const double> values) {
  std::array<double, 64> stack;
  std::vector<double> heap;
  double* buf = stack.data();
  if (values.size() > stack.size()) {
    heap.assign(values.begin(), values.end());
    buf = heap.data();
  } else {
    std::copy(values.begin(), values.end(), buf);
  }
  return detail::round_terms<K, detail::PlainOps>(buf, values.size());
}

template <int K>
Expansion<K> md_add(const Expansion<K>& x, const Expansion<K>& y) noexcept {
  return detail::canonical_less(y, x) ? detail::add<K, detail::PlainOps>(y, x)
                                      : detail::add<K, detail::PlainOps>(x, y);
}

template <int K>
Expansion<K> md_sub(const Expansion<K>& x, const Expansion<K>& y) noexcept {
  return md_add(x, -y);
}

template <int K>
Expansion<K> md_mul(const Expansion<K>& x, const Expansion<K>& y) noexcept {
  return detail::canonical_less(y, x) ? detail::mul<K, detail::PlainOps>(y, x)
                                      : detail::mul<K, detail::PlainOps>(x, y);
}

/// Throws DivisionByZero when y is zero.
template <int K>
Expansion<K> md_div(const Expansion<K>& x, const Expansion<K>& y) {
  if (y.is_zero()) throw DivisionByZero();
  return detail::div<K, detail::PlainOps>(x, y);
}

/// Throws DomainError for negative input.
template <int K>
Expansion<K> md_sqrt(const Expansion<K>& x) {
  if (x.sign() < 0) throw DomainError("square root of a negative expansion");
  return detail::sqrt<K, detail::PlainOps>(x);
}

/// Exact multiplication by a power of two.
template <int K>
Expansion<K> md_scale(const Expansion<K>& x, double pow2) noexcept {
  return detail::scale<K, detail::PlainOps>(x, pow2);
}

template <int K>
Expansion<K> abs(const Expansion<K>& x) noexcept {
  return x.sign() < 0 ? -x : x;
}

/// Changes the precision level; exact when To >= From.
template <int To, int From>
Expansion<To> convert(const Expansion<From>& x) {
  if constexpr (To == From) {
    return x;
  } else {
    return renormalize<To>(std::span<const double>(x.limbs().data(), From));
  }
}

/// Sign of x - y.
template <int K>
int compare(const Expansion<K>& x, const Expansion<K>& y) noexcept {
  if (x == y) return 0;
  return md_sub(x, y).sign();
}

/// Variants that tally hardware operations into `counter`.
namespace counted {

template <int K>
Expansion<K> md_add(const Expansion<K>& x, const Expansion<K>& y,
                    OpCounter& counter) {
  CountingScope scope(counter);
  return detail::add<K, detail::CountingOps>(x, y);
}
template <int K>
Expansion<K> md_sub(const Expansion<K>& x, const Expansion<K>& y,
                    OpCounter& counter) {
  CountingScope scope(counter);
  return detail::add<K, detail::CountingOps>(x, -y);
}
template <int K>
Expansion<K> md_mul(const Expansion<K>& x, const Expansion<K>& y,
                    OpCounter& counter) {
  CountingScope scope(counter);
  return detail::mul<K, detail::CountingOps>(x, y);
}
template <int K>
Expansion<K> md_div(const Expansion<K>& x, const Expansion<K>& y,
                    OpCounter& counter) {
  if (y.is_zero()) throw DivisionByZero();
  CountingScope scope(counter);
  return detail::div<K, detail::CountingOps>(x, y);
}
template <int K>
Expansion<K> md_sqrt(const Expansion<K>& x, OpCounter& counter) {
  if (x.sign() < 0) throw DomainError("square root of a negative expansion");
  CountingScope scope(counter);
  return detail::sqrt<K, detail::CountingOps>(x);
}

}  // namespace counted

// ---------------------------------------------------------------------------
// Text forms.
//
//   display:  "8.00000000000000E+00 - 6.47112461314111E-32"  (leading limb
//             with 15 significant digits, then the signed second limb)
//   exact:    "8,-6.471124613141109e-32"  (every nonzero limb, shortest
//             round-trip decimal, comma separated; no spaces)

std::string format_scientific(double x);
std::string format_exact_limbs(std::span<const double> limbs);

template <int K>
std::string to_string(const Expansion<K>& x) {
  std::string s = format_scientific(x[0]);
  if constexpr (K > 1) {
    const double second = x[1];
    s += std::signbit(second) ? " - " : " + ";
    s += format_scientific(std::abs(second));
  }
  return s;
}

template <int K>
std::string to_exact_string(const Expansion<K>& x) {
  // At least two entries, so the text always reads back as a limb list.
  const auto n = static_cast<std::size_t>(x.size());
  std::vector<double> limbs(x.limbs().begin(), x.limbs().begin() + n);
  limbs.resize(std::max<std::size_t>(2, n), 0.0);
  return format_exact_limbs(limbs);
}

namespace detail {
struct DecimalParts {
  bool negative = false;
  std::string digits;   // significant digits, no leading zeros
  long exponent = 0;    // value = digits * 10^exponent
};
DecimalParts parse_decimal(std::string_view text);
std::vector<double> parse_limb_list(std::string_view text);
std::string_view trim(std::string_view s);

template <int K>
Expansion<K> pow10(long e) {
  Expansion<K> result(1.0);
  Expansion<K> base(10.0);
  while (e > 0) {
    if (e & 1) result = md_mul(result, base);
    base = md_mul(base, base);
    e >>= 1;
  }
  return result;
}

template <int K>
Expansion<K> decimal_to_expansion(std::string_view text) {
  const DecimalParts parts = parse_decimal(text);
  Expansion<K> acc;
  long exponent = parts.exponent;
  // Chunks of at most 15 digits are exact doubles.
  std::size_t pos = 0;
  while (pos < parts.digits.size()) {
    const std::size_t len = std::min<std::size_t>(15, parts.digits.size() - pos);
    double chunk = 0.0;
    double scale = 1.0;
    for (std::size_t i = 0; i < len; ++i) {
      chunk = chunk * 10.0 + (parts.digits[pos + i] - '0');
      scale *= 10.0;
    }
    acc = md_add(md_mul(acc, Expansion<K>(scale)), Expansion<K>(chunk));
    pos += len;
  }
  if (exponent > 0) {
    acc = md_mul(acc, pow10<K>(exponent));
  } else if (exponent < 0) {
    // Split very negative exponents so that 10^-e does not overflow.
    while (exponent < -300) {
      acc = md_div(acc, pow10<K>(300));
      exponent += 300;
    }
    acc = md_div(acc, pow10<K>(-exponent));
  }
  return parts.negative ? -acc : acc;
}
}  // namespace detail

/// Accepts a plain decimal ("0.125", "-1.5E-3"), the two-part display form
/// ("8.00000000000000E+00 - 6.47112461314111E-32") or the exact limb list.
/// Throws ParseError on malformed input.
template <int K>
Expansion<K> parse_expansion(std::string_view text) {
  text = detail::trim(text);
  if (text.empty()) throw ParseError("empty number");
  if (text.find(',') != std::string_view::npos) {
    const std::vector<double> limbs = detail::parse_limb_list(text);
    return renormalize<K>(limbs);
  }
  // Two-part form: a sign surrounded by blanks separates the parts.
  for (std::size_t i = 1; i + 1 < text.size(); ++i) {
    if ((text[i] == '+' || text[i] == '-') && text[i - 1] == ' ' &&
        text[i + 1] == ' ') {
      const Expansion<K> first = detail::decimal_to_expansion<K>(text.substr(0, i));
      const Expansion<K> second =
          detail::decimal_to_expansion<K>(text.substr(i + 1));
      return text[i] == '+' ? md_add(first, second) : md_sub(first, second);
    }
  }
  return detail::decimal_to_expansion<K>(text);
}

}  // namespace mdseries
