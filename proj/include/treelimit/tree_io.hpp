#pragma once

#include <string>

#include <json.hpp>

#include "treelimit/tree_isometry.hpp"

namespace treelimit {

// Tree format: {"vertices":[ids], "edges":[{"a":id, "b":id or "infinity",
// "len":number or "inf"}], "actions":{gen:{"vertex_map":{...},
// "edge_map":{...}}}}. Round-trips bit-exactly.
nlohmann::json tree_to_json(const SimplicialTree& t);
SimplicialTree tree_from_json(const nlohmann::json& j);

nlohmann::json action_to_json(const TreeAction& a);
TreeAction action_from_json(const nlohmann::json& j);

void write_json_file(const std::string& path, const nlohmann::json& j);
nlohmann::json read_json_file(const std::string& path);

}  // namespace treelimit
