#include "mdseries/expansion.hpp"

#include <cfenv>
#include <charconv>
#include <cstdio>
#include <cstdlib>

namespace mdseries {

const char* two_prod_method() noexcept {
  return kHardwareFma ? "fma" : "dekker";
}

void require_round_to_nearest() {
  if (std::fegetround() != FE_TONEAREST) {
    throw DomainError(
        "multiple-double arithmetic requires round-to-nearest mode");
  }
}

namespace {
// Error-free transformations are only valid under round-to-nearest.
const bool kRoundingChecked = [] {
  if (std::fegetround() != FE_TONEAREST) {
    std::fputs("mdseries: rounding mode is not round-to-nearest\n", stderr);
    std::abort();
  }
  return true;
}();
}  // namespace

std::string format_scientific(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.14E", x);
  return buf;
}

std::string format_exact_limbs(std::span<const double> limbs) {
  std::string out;
  char buf[64];
  for (std::size_t i = 0; i < limbs.size(); ++i) {
    if (i) out += ',';
    const auto res = std::to_chars(buf, buf + sizeof buf, limbs[i]);
    out.append(buf, res.ptr);
  }
  return out;
}

namespace detail {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' ||
                        s.back() == '\r' || s.back() == '\n')) {
    s.remove_suffix(1);
  }
  return s;
}

DecimalParts parse_decimal(std::string_view text) {
  text = trim(text);
  DecimalParts parts;
  std::size_t i = 0;
  if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
    parts.negative = text[i] == '-';
    ++i;
  }
  bool any_digit = false;
  bool seen_point = false;
  for (; i < text.size(); ++i) {
    const char c = text[i];
    if (c >= '0' && c <= '9') {
      any_digit = true;
      if (seen_point) --parts.exponent;
      if (c == '0' && parts.digits.empty()) continue;
      parts.digits.push_back(c);
    } else if (c == '.' && !seen_point) {
      seen_point = true;
    } else {
      break;
    }
  }
  if (!any_digit) throw ParseError("not a number: '" + std::string(text) + "'");
  if (i < text.size()) {
    if (text[i] != 'e' && text[i] != 'E') {
      throw ParseError("trailing characters in '" + std::string(text) + "'");
    }
    ++i;
    std::size_t start = i;
    if (i < text.size() && text[i] == '+') start = ++i;
    long e = 0;
    const auto res = std::from_chars(text.data() + start,
                                     text.data() + text.size(), e);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
      throw ParseError("bad exponent in '" + std::string(text) + "'");
    }
    parts.exponent += e;
  }
  return parts;
}

std::vector<double> parse_limb_list(std::string_view text) {
  std::vector<double> limbs;
  while (true) {
    const std::size_t comma = text.find(',');
    const std::string_view item = trim(text.substr(0, comma));
    double v = 0.0;
    const auto res =
        std::from_chars(item.data(), item.data() + item.size(), v);
    if (item.empty() || res.ec != std::errc() ||
        res.ptr != item.data() + item.size()) {
      throw ParseError("bad limb '" + std::string(item) + "'");
    }
    limbs.push_back(v);
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return limbs;
}

}  // namespace detail
}  // namespace mdseries
