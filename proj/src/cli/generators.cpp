#include "wbx/cli/generators.hpp"

#include "wbx/simulator.hpp"

namespace wbx::cli {

void GeneratorSpec::validate() const {
  if (!(w_lo > 0.0) || !(w_lo <= w_hi)) {
    throw Error(ErrorCode::kInvalidArgument, "generator needs 0 < w_lo <= w_hi");
  }
  if (!(g > 0.0)) throw Error(ErrorCode::kInvalidArgument, "generator needs g > 0");
  if (group_sizes.empty()) throw Error(ErrorCode::kInvalidArgument, "no groups given");
}

Scenario generate_scenario(const GeneratorSpec& spec) {
  spec.validate();
  Rng rng(mix_seed(spec.seed, 0));
  std::vector<NodeSpec> nodes;
  for (std::uint32_t x = 0; x < spec.group_sizes.size(); ++x) {
    for (std::size_t i = 0; i < spec.group_sizes[x]; ++i) {
      const double u = rng.uniform_open01();
      const double w = spec.w_lo == spec.w_hi ? spec.w_lo
                                              : spec.w_lo + (spec.w_hi - spec.w_lo) * u;
      nodes.push_back(NodeSpec{CostParams{w, spec.g}, FileId{x}});
    }
  }
  return Scenario(spec.group_sizes.size(), std::move(nodes));
}

}  // namespace wbx::cli
