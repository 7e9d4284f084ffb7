#pragma once

#include "mdseries/expansion.hpp"

namespace mdseries {

/// Hardware operations spent by one addition, multiplication and division.
struct CostReport {
  int k = 1;
  OpCounter add;
  OpCounter mul;
  OpCounter div;
};

struct PublishedCosts {
  OpCounter add;
  OpCounter mul;
  OpCounter div;
};

/// Measures one md_add, md_mul and md_div at level k on fixed operands.
CostReport report_costs(int k);

/// Reference counts for the CAMPARY/QDlib based implementation (k > 1);
/// for k = 1 every operation is a single hardware operation.  Throws
/// ArgumentError for other k.
PublishedCosts published_costs(int k);

}  // namespace mdseries
