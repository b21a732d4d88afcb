#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "wbx/model.hpp"

namespace wbx::cli {

/// Random scenario: group_sizes[x] nodes need file x, g is fixed and w is
/// uniform on [w_lo, w_hi]. Nodes are listed group by group.
struct GeneratorSpec {
  std::vector<std::size_t> group_sizes{10, 10};
  double w_lo = 1.0;
  double w_hi = 2.0;
  double g = 1.0;
  std::uint64_t seed = 1;

  void validate() const;
};

Scenario generate_scenario(const GeneratorSpec& spec);

}  // namespace wbx::cli
