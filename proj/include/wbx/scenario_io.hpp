// JSON scenario files.
//
//   {
//     "files": 2,
//     "seed": 7,                      // optional
//     "nodes": [ {"w": 1.0, "g": 1.0, "needs": 0}, ... ]
//   }
//
// `needs` is a zero-based file index. Unknown keys are rejected.

#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "wbx/model.hpp"

namespace wbx {

struct ScenarioFile {
  Scenario scenario;
  std::optional<std::uint64_t> seed;
};

/// Parses the text form. Throws Error(kConfig) on malformed input; does not
/// run validate_scenario().
ScenarioFile parse_scenario(const std::string& text);
ScenarioFile load_scenario(const std::string& path);

std::string dump_scenario(const Scenario& s,
                          std::optional<std::uint64_t> seed = std::nullopt);
void save_scenario(const std::string& path, const Scenario& s,
                   std::optional<std::uint64_t> seed = std::nullopt);

}  // namespace wbx
