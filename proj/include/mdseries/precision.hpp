#pragma once

#include <string>
#include <string_view>
#include <type_traits>
#include <utility>

#include "mdseries/errors.hpp"
#include "mdseries/expansion.hpp"

namespace mdseries {

template <int K>
using Level = std::integral_constant<int, K>;

/// Calls f(Level<k>{}) for a runtime precision level k.
template <class F>
decltype(auto) with_level(int k, F&& f) {
  switch (k) {
    case 1: return std::forward<F>(f)(Level<1>{});
    case 2: return std::forward<F>(f)(Level<2>{});
    case 3: return std::forward<F>(f)(Level<3>{});
    case 4: return std::forward<F>(f)(Level<4>{});
    case 5: return std::forward<F>(f)(Level<5>{});
    case 8: return std::forward<F>(f)(Level<8>{});
    case 10: return std::forward<F>(f)(Level<10>{});
    default:
      throw ArgumentError("unsupported precision level " + std::to_string(k));
  }
}

/// d, dd, td, qd, pd, od, xd (or the number itself) to the limb count.
int parse_precision(std::string_view text);
std::string_view precision_mnemonic(int k);
/// "double", "double double", ... "deca double".
std::string_view precision_name(int k);

}  // namespace mdseries
