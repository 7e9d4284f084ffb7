#include "mdseries/linalg.hpp"

namespace mdseries {

namespace {
std::atomic<std::uint64_t> g_factorizations{0};
}

namespace detail {
std::uint64_t bump_factorization_count() noexcept {
  return g_factorizations.fetch_add(1, std::memory_order_relaxed) + 1;
}
}  // namespace detail

std::uint64_t factorization_count() noexcept {
  return g_factorizations.load(std::memory_order_relaxed);
}

}  // namespace mdseries
