#pragma once

#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>

namespace wbx::csv {

/// Nine significant digits, shortest of %g forms.
std::string real(double value);

/// Writes one comma-joined line. Fields are emitted verbatim.
void row(std::ostream& out, std::initializer_list<std::string_view> fields);

}  // namespace wbx::csv
