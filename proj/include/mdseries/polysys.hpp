#pragma once

// Polynomial systems in x_1..x_n whose coefficients are power series in t.
// Evaluation and differentiation at series arguments use cumulative
// forward/backward products per monomial.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "mdseries/errors.hpp"
#include "mdseries/series.hpp"

namespace mdseries {

template <int K>
struct Monomial {
  Series<K> coefficient;
  std::vector<int> exponents;
};

template <int K>
class Polynomial {
 public:
  Polynomial() = default;

  /// Terms with equal exponent vectors are merged into the first occurrence.
  Polynomial(int nvars, int degree, std::vector<Monomial<K>> terms)
      : nvars_(nvars), degree_(degree) {
    if (nvars < 1) throw ShapeError("a polynomial needs at least one variable");
    for (auto& m : terms) add_term(std::move(m));
  }

  int nvars() const noexcept { return nvars_; }
  int degree() const noexcept { return degree_; }
  const std::vector<Monomial<K>>& terms() const noexcept { return terms_; }

  friend bool operator==(const Polynomial& a, const Polynomial& b) {
    if (a.nvars_ != b.nvars_ || a.degree_ != b.degree_) return false;
    if (a.terms_.size() != b.terms_.size()) return false;
    for (std::size_t i = 0; i < a.terms_.size(); ++i) {
      if (a.terms_[i].exponents != b.terms_[i].exponents) return false;
      if (!(a.terms_[i].coefficient == b.terms_[i].coefficient)) return false;
    }
    return true;
  }

 private:
  void add_term(Monomial<K> m) {
    if (static_cast<int>(m.exponents.size()) != nvars_) {
      throw ShapeError("exponent vector length differs from the variable count");
    }
    if (m.coefficient.degree() != degree_) {
      throw ShapeError("coefficient degree differs from the polynomial degree");
    }
    for (int e : m.exponents) {
      if (e < 0) throw ShapeError("negative exponent");
    }
    for (auto& t : terms_) {
      if (t.exponents == m.exponents) {
        t.coefficient = t.coefficient + m.coefficient;
        return;
      }
    }
    terms_.push_back(std::move(m));
  }

  int nvars_ = 0;
  int degree_ = 0;
  std::vector<Monomial<K>> terms_;
};

template <int K>
class PolySystem {
 public:
  PolySystem() = default;

  /// Requires at least as many polynomials as variables, all sharing the
  /// variable count and degree.
  PolySystem(int nvars, int degree, std::vector<Polynomial<K>> polys)
      : nvars_(nvars), degree_(degree), polys_(std::move(polys)) {
    if (static_cast<int>(polys_.size()) < nvars) {
      throw ShapeError("fewer polynomials than variables");
    }
    for (const auto& p : polys_) {
      if (p.nvars() != nvars || p.degree() != degree) {
        throw ShapeError("polynomials disagree on variables or degree");
      }
    }
  }

  int nvars() const noexcept { return nvars_; }
  int degree() const noexcept { return degree_; }
  std::size_t size() const noexcept { return polys_.size(); }
  const Polynomial<K>& operator[](std::size_t i) const { return polys_[i]; }
  const std::vector<Polynomial<K>>& polys() const noexcept { return polys_; }

  friend bool operator==(const PolySystem&, const PolySystem&) = default;

 private:
  int nvars_ = 0;
  int degree_ = 0;
  std::vector<Polynomial<K>> polys_;
};

namespace detail {

template <int K>
void check_argument(const Polynomial<K>& p, std::span<const Series<K>> x) {
  if (static_cast<int>(x.size()) != p.nvars()) {
    throw ShapeError("argument count differs from the variable count");
  }
  for (const auto& s : x) {
    if (s.degree() != p.degree()) throw ShapeError("argument degree mismatch");
  }
}

/// powers[v][e - 1] = x_v^e for 1 <= e <= the largest exponent of x_v in p.
template <int K>
std::vector<std::vector<Series<K>>> power_table(const Polynomial<K>& p,
                                                std::span<const Series<K>> x) {
  std::vector<int> top(x.size(), 0);
  for (const auto& m : p.terms()) {
    for (std::size_t v = 0; v < x.size(); ++v) top[v] = std::max(top[v], m.exponents[v]);
  }
  std::vector<std::vector<Series<K>>> powers(x.size());
  for (std::size_t v = 0; v < x.size(); ++v) {
    if (top[v] == 0) continue;
    powers[v].reserve(static_cast<std::size_t>(top[v]));
    powers[v].push_back(x[v]);
    for (int e = 2; e <= top[v]; ++e) powers[v].push_back(ps_mul(powers[v].back(), x[v]));
  }
  return powers;
}

}  // namespace detail

/// p(x) as the sum over terms of coefficient * x_{v1}^{e1} * x_{v2}^{e2} ...,
/// multiplied left to right in variable order.
template <int K>
Series<K> eval_poly(const Polynomial<K>& p, std::span<const Series<K>> x) {
  detail::check_argument(p, x);
  const auto powers = detail::power_table(p, x);
  Series<K> value(p.degree());
  for (const auto& m : p.terms()) {
    Series<K> prod = m.coefficient;
    for (std::size_t v = 0; v < x.size(); ++v) {
      const int e = m.exponents[v];
      if (e > 0) prod = ps_mul(prod, powers[v][static_cast<std::size_t>(e - 1)]);
    }
    value = value + prod;
  }
  return value;
}

template <int K>
Series<K> eval_poly(const Polynomial<K>& p, const std::vector<Series<K>>& x) {
  return eval_poly(p, std::span<const Series<K>>(x));
}

template <int K>
struct PolyEval {
  Series<K> value;
  std::vector<Series<K>> gradient;
};

/// Value and all partial derivatives.  Per term with factors f_1..f_m
/// (f_j = x_{v_j}^{e_j}) and coefficient c, the prefixes c f_1 ... f_j and
/// suffixes f_j ... f_m give every partial with 3(m - 1) series products;
/// a factor with e_j > 1 adds the exponent rule e_j x^(e_j - 1).
template <int K>
PolyEval<K> eval_and_diff(const Polynomial<K>& p, std::span<const Series<K>> x) {
  detail::check_argument(p, x);
  const int d = p.degree();
  const auto powers = detail::power_table(p, x);
  PolyEval<K> out{Series<K>(d), std::vector<Series<K>>(x.size(), Series<K>(d))};
  std::vector<std::size_t> vars;
  std::vector<Series<K>> prefix;
  std::vector<Series<K>> suffix;
  for (const auto& m : p.terms()) {
    vars.clear();
    for (std::size_t v = 0; v < x.size(); ++v) {
      if (m.exponents[v] > 0) vars.push_back(v);
    }
    const std::size_t nf = vars.size();
    auto factor = [&](std::size_t j) -> const Series<K>& {
      const std::size_t v = vars[j];
      return powers[v][static_cast<std::size_t>(m.exponents[v] - 1)];
    };
    // prefix[j] = c f_0 ... f_{j-1}
    prefix.assign(1, m.coefficient);
    for (std::size_t j = 0; j < nf; ++j) prefix.push_back(ps_mul(prefix.back(), factor(j)));
    out.value = out.value + prefix.back();
    if (nf == 0) continue;
    // suffix[j] = f_j ... f_{nf-1}, needed for j >= 1
    suffix.assign(nf, Series<K>(d));
    suffix[nf - 1] = factor(nf - 1);
    for (std::size_t j = nf - 1; j-- > 1;) suffix[j] = ps_mul(factor(j), suffix[j + 1]);
    for (std::size_t j = 0; j < nf; ++j) {
      Series<K> partial = j + 1 < nf ? ps_mul(prefix[j], suffix[j + 1]) : prefix[j];
      const std::size_t v = vars[j];
      const int e = m.exponents[v];
      if (e > 1) {
        partial = ps_mul(partial, powers[v][static_cast<std::size_t>(e - 2)]);
        partial = ps_scale(partial, Complex<K>(static_cast<double>(e)));
      }
      out.gradient[v] = out.gradient[v] + partial;
    }
  }
  return out;
}

template <int K>
PolyEval<K> eval_and_diff(const Polynomial<K>& p, const std::vector<Series<K>>& x) {
  return eval_and_diff(p, std::span<const Series<K>>(x));
}

/// Right-hand side b = -f(x) and the matrix series A with A_j holding the
/// degree-j coefficients of the Jacobian, both linearized.
template <int K>
struct LinearizedSystem {
  SeriesVector<K> b;
  SeriesMatrix<K> a;
};

template <int K>
LinearizedSystem<K> make_linearized(std::size_t rows, std::size_t cols, int degree) {
  LinearizedSystem<K> out;
  out.b.coeffs.assign(static_cast<std::size_t>(degree) + 1, Vector<K>(rows));
  out.a.coeffs.assign(static_cast<std::size_t>(degree) + 1, Matrix<K>(rows, cols));
  return out;
}

/// Evaluates polynomial i into row i of `out`; rows are independent.
template <int K>
void evaluate_row(const PolySystem<K>& f, std::size_t i, std::span<const Series<K>> x,
                  LinearizedSystem<K>& out) {
  const PolyEval<K> pe = eval_and_diff(f[i], x);
  for (int j = 0; j <= f.degree(); ++j) {
    const auto jj = static_cast<std::size_t>(j);
    out.b.coeffs[jj][i] = -pe.value[j];
    for (std::size_t v = 0; v < x.size(); ++v) out.a.coeffs[jj](i, v) = pe.gradient[v][j];
  }
}

template <int K>
LinearizedSystem<K> system_jacobian(const PolySystem<K>& f, std::span<const Series<K>> x) {
  if (static_cast<int>(x.size()) != f.nvars()) throw ShapeError("argument count mismatch");
  auto out = make_linearized<K>(f.size(), x.size(), f.degree());
  for (std::size_t i = 0; i < f.size(); ++i) evaluate_row(f, i, x, out);
  return out;
}

template <int K>
LinearizedSystem<K> system_jacobian(const PolySystem<K>& f, const std::vector<Series<K>>& x) {
  return system_jacobian(f, std::span<const Series<K>>(x));
}

/// The system
///   t - t^3/6 + t^5/120 - t^7/5040 - y = 0,
///   x^2 + y^2 - 1 = 0
/// in (x, y), truncated at degree d.  Its solution through (1, 0) has the
/// cosine series as x.
template <int K>
PolySystem<K> circle_system(int degree) {
  if (degree < 0) throw ShapeError("negative degree");
  Series<K> sine(degree);
  const Expansion<K> one(1.0);
  const Expansion<K> coeffs[] = {one, -(one / 6.0), one / 120.0, -(one / 5040.0)};
  for (int i = 0; i < 4; ++i) {
    const int power = 2 * i + 1;
    if (power <= degree) sine[power] = Complex<K>(coeffs[i]);
  }
  const Series<K> minus_one(degree, Complex<K>(-1.0));
  const Series<K> plus_one(degree, Complex<K>(1.0));
  Polynomial<K> first(2, degree, {{sine, {0, 0}}, {minus_one, {0, 1}}});
  Polynomial<K> second(2, degree, {{plus_one, {2, 0}}, {plus_one, {0, 2}}, {minus_one, {0, 0}}});
  return PolySystem<K>(2, degree, {std::move(first), std::move(second)});
}

namespace detail {

/// Uniform angle in [0, 2 pi) from the top 53 bits of one generator output.
inline double random_angle(std::mt19937_64& rng) {
  return std::ldexp(static_cast<double>(rng() >> 11), -53) * (2.0 * std::numbers::pi);
}

template <int K>
Complex<K> random_unit(std::mt19937_64& rng) {
  const double t = random_angle(rng);
  return unit_complex<K>(std::cos(t), std::sin(t));
}

}  // namespace detail

/// Reproducible random system: per polynomial, `terms` distinct exponent
/// vectors with entries uniform in 0..max_exponent and unit-modulus constant
/// coefficients.  The draws do not depend on K.
template <int K>
PolySystem<K> random_system(std::uint64_t seed, int npolys, int nvars, int terms,
                            int max_exponent, int degree) {
  if (nvars < 1 || npolys < nvars) throw ArgumentError("need polys >= vars >= 1");
  if (terms < 1) throw ArgumentError("need at least one term");
  if (max_exponent < 0) throw ArgumentError("negative maximum exponent");
  if (degree < 0) throw ArgumentError("negative degree");
  double space = 1.0;
  for (int v = 0; v < nvars && space < static_cast<double>(terms); ++v) {
    space *= static_cast<double>(max_exponent) + 1.0;
  }
  if (static_cast<double>(terms) > space) {
    throw ArgumentError("more terms than distinct exponent vectors");
  }
  std::mt19937_64 rng(seed);
  const auto base = static_cast<std::uint64_t>(max_exponent) + 1;
  std::vector<Polynomial<K>> polys;
  polys.reserve(static_cast<std::size_t>(npolys));
  for (int i = 0; i < npolys; ++i) {
    std::set<std::vector<int>> seen;
    std::vector<Monomial<K>> monomials;
    while (static_cast<int>(monomials.size()) < terms) {
      std::vector<int> e(static_cast<std::size_t>(nvars));
      for (int& x : e) x = static_cast<int>(rng() % base);
      if (!seen.insert(e).second) continue;
      monomials.push_back({Series<K>(degree, detail::random_unit<K>(rng)), std::move(e)});
    }
    polys.emplace_back(nvars, degree, std::move(monomials));
  }
  return PolySystem<K>(nvars, degree, std::move(polys));
}

/// A square random system turned into a family through a known point:
/// f_i(x, t) = p_i(x) - p_i(z) + s g_i t with z and g_i seeded unit-modulus
/// constants and s = t_scale, so that x(0) = z.  Returns the system and z.
template <int K>
std::pair<PolySystem<K>, Vector<K>> curve_system(std::uint64_t seed, int n, int terms,
                                                 int max_exponent, int degree,
                                                 double t_scale = 1.0) {
  if (degree < 1) throw ArgumentError("a curve needs degree >= 1");
  const PolySystem<K> p = random_system<K>(seed, n, n, terms, max_exponent, degree);
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  Vector<K> z;
  std::vector<Series<K>> zs;
  for (int v = 0; v < n; ++v) {
    z.push_back(detail::random_unit<K>(rng));
    zs.emplace_back(degree, z.back());
  }
  std::vector<Polynomial<K>> polys;
  for (std::size_t i = 0; i < p.size(); ++i) {
    Series<K> shift = -eval_poly(p[i], std::span<const Series<K>>(zs));
    shift[1] = scale(detail::random_unit<K>(rng), Expansion<K>(t_scale));
    std::vector<Monomial<K>> terms_i = p[i].terms();
    terms_i.push_back({shift, std::vector<int>(static_cast<std::size_t>(n), 0)});
    polys.emplace_back(n, degree, std::move(terms_i));
  }
  return {PolySystem<K>(n, degree, std::move(polys)), std::move(z)};
}

// Text format: a header "N n d k", then for every polynomial a line with its
// term count followed by one line per term: the n exponents and then the
// d + 1 coefficients as "re im" pairs in exact form.

template <int K>
void write_system(std::ostream& os, const PolySystem<K>& f) {
  os << f.size() << ' ' << f.nvars() << ' ' << f.degree() << ' ' << K << '\n';
  for (const auto& p : f.polys()) {
    os << p.terms().size() << '\n';
    for (const auto& m : p.terms()) {
      for (std::size_t v = 0; v < m.exponents.size(); ++v) {
        os << (v ? " " : "") << m.exponents[v];
      }
      for (const auto& c : m.coefficient.coeffs()) {
        os << ' ' << to_exact_string(c.re) << ' ' << to_exact_string(c.im);
      }
      os << '\n';
    }
  }
}

struct SystemHeader {
  int npolys = 0;
  int nvars = 0;
  int degree = 0;
  int k = 0;
};

inline SystemHeader read_system_header(std::istream& is) {
  SystemHeader h;
  if (!(is >> h.npolys >> h.nvars >> h.degree >> h.k)) {
    throw ParseError("missing system header");
  }
  if (h.npolys < 1 || h.nvars < 1 || h.degree < 0 || !is_precision_level(h.k)) {
    throw ParseError("invalid system header");
  }
  return h;
}

/// Reads the body after read_system_header; coefficients are parsed at K.
template <int K>
PolySystem<K> read_system_body(std::istream& is, const SystemHeader& h) {
  std::vector<Polynomial<K>> polys;
  for (int i = 0; i < h.npolys; ++i) {
    int count = 0;
    if (!(is >> count) || count < 0) throw ParseError("missing term count");
    std::vector<Monomial<K>> terms;
    for (int t = 0; t < count; ++t) {
      Monomial<K> m{Series<K>(h.degree), std::vector<int>(static_cast<std::size_t>(h.nvars))};
      for (int& e : m.exponents) {
        if (!(is >> e)) throw ParseError("truncated exponent vector");
      }
      for (auto& c : m.coefficient.coeffs()) c = detail::read_complex<K>(is);
      terms.push_back(std::move(m));
    }
    polys.emplace_back(h.nvars, h.degree, std::move(terms));
  }
  return PolySystem<K>(h.nvars, h.degree, std::move(polys));
}

template <int K>
PolySystem<K> read_system(std::istream& is) {
  return read_system_body<K>(is, read_system_header(is));
}

}  // namespace mdseries
