#include "mdseries/precision.hpp"

#include <array>
#include <charconv>

namespace mdseries {

namespace {
struct LevelName {
  int k;
  std::string_view mnemonic;
  std::string_view name;
};
constexpr std::array<LevelName, 7> kNames{{
    {1, "d", "double"},
    {2, "dd", "double double"},
    {3, "td", "triple double"},
    {4, "qd", "quad double"},
    {5, "pd", "penta double"},
    {8, "od", "octo double"},
    {10, "xd", "deca double"},
}};
}  // namespace

int parse_precision(std::string_view text) {
  for (const auto& n : kNames) {
    if (text == n.mnemonic) return n.k;
  }
  int k = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), k);
  if (res.ec == std::errc() && res.ptr == text.data() + text.size() &&
      is_precision_level(k)) {
    return k;
  }
  throw ArgumentError("unknown precision '" + std::string(text) +
                      "' (expected d, dd, td, qd, pd, od, xd)");
}

std::string_view precision_mnemonic(int k) {
  for (const auto& n : kNames) {
    if (n.k == k) return n.mnemonic;
  }
  throw ArgumentError("unsupported precision level " + std::to_string(k));
}

std::string_view precision_name(int k) {
  for (const auto& n : kNames) {
    if (n.k == k) return n.name;
  }
  throw ArgumentError("unsupported precision level " + std::to_string(k));
}

}  // namespace mdseries
