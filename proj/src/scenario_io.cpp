#include "wbx/scenario_io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace wbx {

namespace {

using nlohmann::json;

[[noreturn]] void config_error(const std::string& msg) {
  throw Error(ErrorCode::kConfig, msg);
}

double require_number(const json& obj, const char* key, std::size_t node) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_number()) {
    config_error("node " + std::to_string(node) + ": field '" + key +
                 "' missing or not a number");
  }
  return it->get<double>();
}

}  // namespace

ScenarioFile parse_scenario(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    config_error(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) config_error("top level must be an object");
  for (const auto& [key, _] : doc.items()) {
    if (key != "files" && key != "nodes" && key != "seed") {
      config_error("unknown key '" + key + "'");
    }
  }

  auto files = doc.find("files");
  if (files == doc.end() || !files->is_number_integer() ||
      files->get<std::int64_t>() < 0) {
    config_error("'files' must be a non-negative integer");
  }
  auto nodes = doc.find("nodes");
  if (nodes == doc.end() || !nodes->is_array()) {
    config_error("'nodes' must be an array");
  }

  std::vector<NodeSpec> specs;
  specs.reserve(nodes->size());
  for (std::size_t i = 0; i < nodes->size(); ++i) {
    const json& n = (*nodes)[i];
    if (!n.is_object()) config_error("node " + std::to_string(i) + " is not an object");
    for (const auto& [key, _] : n.items()) {
      if (key != "w" && key != "g" && key != "needs") {
        config_error("node " + std::to_string(i) + ": unknown key '" + key + "'");
      }
    }
    auto needs = n.find("needs");
    if (needs == n.end() || !needs->is_number_integer() ||
        needs->get<std::int64_t>() < 0) {
      config_error("node " + std::to_string(i) +
                   ": 'needs' must be a non-negative integer");
    }
    specs.push_back(NodeSpec{
        CostParams{require_number(n, "w", i), require_number(n, "g", i)},
        FileId{static_cast<std::uint32_t>(needs->get<std::int64_t>())}});
  }

  ScenarioFile out{Scenario(files->get<std::size_t>(), std::move(specs)), {}};
  if (auto seed = doc.find("seed"); seed != doc.end()) {
    if (!seed->is_number_unsigned()) config_error("'seed' must be a non-negative integer");
    out.seed = seed->get<std::uint64_t>();
  }
  return out;
}

ScenarioFile load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) config_error("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::string dump_scenario(const Scenario& s, std::optional<std::uint64_t> seed) {
  json doc;
  doc["files"] = s.file_count();
  json nodes = json::array();
  for (const NodeSpec& n : s.nodes()) {
    nodes.push_back({{"w", n.cost.w}, {"g", n.cost.g}, {"needs", n.needs.value}});
  }
  doc["nodes"] = std::move(nodes);
  if (seed) doc["seed"] = *seed;
  return doc.dump(2) + "\n";
}

void save_scenario(const std::string& path, const Scenario& s,
                   std::optional<std::uint64_t> seed) {
  std::ofstream out(path);
  if (!out) config_error("cannot write '" + path + "'");
  out << dump_scenario(s, seed);
}

}  // namespace wbx
