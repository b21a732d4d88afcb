#include "wbx/csv.hpp"

#include <cmath>
#include <cstdio>

namespace wbx::csv {

std::string real(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", value);
  return buf;
}

void row(std::ostream& out, std::initializer_list<std::string_view> fields) {
  bool first = true;
  for (std::string_view f : fields) {
    if (!first) out << ',';
    out << f;
    first = false;
  }
  out << '\n';
}

}  // namespace wbx::csv
