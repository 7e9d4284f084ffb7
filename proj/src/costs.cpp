#include "mdseries/costs.hpp"

#include <random>

#include "mdseries/precision.hpp"

namespace mdseries {

namespace {

template <int K>
Expansion<K> sample_operand(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::array<double, K> v{};
  v[0] = 1.0 + 0.5 * u(rng);
  for (int i = 1; i < K; ++i) v[i] = std::ldexp(v[i - 1], -53) * u(rng);
  return renormalize<K>(v);
}

OpCounter row(std::uint64_t add, std::uint64_t sub, std::uint64_t mul,
              std::uint64_t div) {
  OpCounter c;
  c.adds = add;
  c.subs = sub;
  c.muls = mul;
  c.divs = div;
  return c;
}

}  // namespace

CostReport report_costs(int k) {
  return with_level(k, [k](auto level) {
    constexpr int K = decltype(level)::value;
    std::mt19937_64 rng(1234);
    const Expansion<K> x = sample_operand<K>(rng);
    const Expansion<K> y = sample_operand<K>(rng);
    CostReport r;
    r.k = k;
    counted::md_add(x, y, r.add);
    counted::md_mul(x, y, r.mul);
    counted::md_div(x, y, r.div);
    return r;
  });
}

PublishedCosts published_costs(int k) {
  switch (k) {
    case 1: return {row(1, 0, 0, 0), row(0, 0, 1, 0), row(0, 0, 0, 1)};
    case 2: return {row(8, 12, 0, 0), row(5, 9, 9, 0), row(33, 18, 16, 3)};
    case 3: return {row(13, 22, 0, 0), row(83, 84, 42, 0), row(113, 214, 63, 4)};
    case 4: return {row(35, 54, 0, 0), row(99, 164, 73, 0), row(266, 510, 112, 5)};
    case 5: return {row(44, 78, 0, 0), row(162, 283, 109, 0), row(474, 898, 175, 6)};
    case 8: return {row(95, 174, 0, 0), row(529, 954, 259, 0), row(1599, 3070, 448, 9)};
    case 10: return {row(139, 258, 0, 0), row(952, 1743, 394, 0), row(2899, 5598, 700, 11)};
    default:
      throw ArgumentError("no published costs for level " + std::to_string(k));
  }
}

}  // namespace mdseries
