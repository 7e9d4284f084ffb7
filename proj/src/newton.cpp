#include "mdseries/newton.hpp"

#include <cstdio>

namespace mdseries {

void write_trace_csv(std::ostream& os, const NewtonTrace& trace) {
  os << "iteration,update_norm,wall_seconds\n";
  char buf[64];
  for (const auto& r : trace.records) {
    std::snprintf(buf, sizeof buf, "%.6E", r.update_norm);
    os << r.iteration << ',' << buf << ',' << r.wall_seconds << '\n';
  }
}

}  // namespace mdseries
