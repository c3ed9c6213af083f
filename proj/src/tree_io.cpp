#include "treelimit/tree_io.hpp"

#include <cmath>
#include <fstream>

#include "treelimit/errors.hpp"

namespace treelimit {

using nlohmann::json;

json tree_to_json(const SimplicialTree& t) {
    json j;
    j["vertices"] = json::array();
    for (int v = 0; v < t.vertex_count; ++v) j["vertices"].push_back(v);
    j["edges"] = json::array();
    for (const TreeEdge& e : t.edges) {
        json je;
        je["a"] = e.a;
        if (e.infinite()) {
            je["b"] = "infinity";
            je["len"] = "inf";
        } else {
            je["b"] = e.b;
            je["len"] = e.length;
        }
        j["edges"].push_back(je);
    }
    return j;
}

SimplicialTree tree_from_json(const json& j) {
    SimplicialTree t;
    if (!j.contains("vertices") || !j["vertices"].is_array()) throw ConfigError("missing vertices array", "vertices");
    t.vertex_count = static_cast<int>(j["vertices"].size());
    if (!j.contains("edges") || !j["edges"].is_array()) throw ConfigError("missing edges array", "edges");
    for (const json& je : j["edges"]) {
        TreeEdge e;
        e.a = je.at("a").get<int>();
        if (je.at("b").is_string()) {
            if (je["b"].get<std::string>() != "infinity") throw ConfigError("edge b must be an id or \"infinity\"", "edges");
            e.b = -1;
            e.length = kInf;
        } else {
            e.b = je.at("b").get<int>();
            if (je.at("len").is_string())
                throw ConfigError("finite edge needs a numeric length", "edges");
            e.length = je.at("len").get<double>();
        }
        t.edges.push_back(e);
    }
    validate_tree(t);
    return t;
}

namespace {

json point_to_json(const TreePoint& p) {
    if (p.at_vertex()) return json(p.vertex);
    json j;
    j["edge"] = p.edge;
    j["offset"] = p.offset;
    return j;
}

TreePoint point_from_json(const SimplicialTree& t, const json& j) {
    if (j.is_number_integer()) return TreePoint::of_vertex(j.get<int>());
    TreePoint p;
    p.vertex = -1;
    p.edge = j.at("edge").get<int>();
    p.offset = j.at("offset").get<double>();
    if (p.edge < 0 || p.edge >= static_cast<int>(t.edges.size())) throw ConfigError("point edge out of range", "actions");
    return p;
}

}  // namespace

json action_to_json(const TreeAction& a) {
    json j = tree_to_json(a.tree);
    j["generators"] = a.presentation.generators;
    j["relators"] = json::array();
    for (const Word& r : a.presentation.relators) j["relators"].push_back(word_to_string(a.presentation, r));
    json actions = json::object();
    for (int g = 0; g < a.presentation.rank(); ++g) {
        const TreeIsometry& iso = a.generators[static_cast<size_t>(g)];
        json vm = json::object();
        for (int v = 0; v < a.tree.vertex_count; ++v) {
            const auto& img = iso.vertex_image[static_cast<size_t>(v)];
            if (img) vm[std::to_string(v)] = point_to_json(*img);
        }
        json em = json::object();
        for (size_t e = 0; e < a.tree.edges.size(); ++e)
            if (iso.ray_target[e] >= 0) em[std::to_string(e)] = iso.ray_target[e];
        actions[a.presentation.generators[static_cast<size_t>(g)]] = json{{"vertex_map", vm}, {"edge_map", em}};
    }
    j["actions"] = actions;
    return j;
}

TreeAction action_from_json(const json& j) {
    TreeAction a;
    a.tree = tree_from_json(j);
    if (!j.contains("generators")) throw ConfigError("missing generators", "generators");
    a.presentation.generators = j["generators"].get<std::vector<std::string>>();
    if (j.contains("relators"))
        for (const json& r : j["relators"]) a.presentation.relators.push_back(parse_word(a.presentation, r.get<std::string>()));
    const json& actions = j.at("actions");
    for (const std::string& name : a.presentation.generators) {
        if (!actions.contains(name)) throw ConfigError("missing action for generator " + name, "actions");
        const json& ja = actions[name];
        TreeIsometry iso;
        iso.vertex_image.resize(static_cast<size_t>(a.tree.vertex_count));
        iso.ray_target.assign(a.tree.edges.size(), -1);
        for (const auto& [key, value] : ja.at("vertex_map").items()) {
            int v = std::stoi(key);
            if (v < 0 || v >= a.tree.vertex_count) throw ConfigError("vertex_map key out of range", "actions");
            iso.vertex_image[static_cast<size_t>(v)] = point_from_json(a.tree, value);
        }
        if (ja.contains("edge_map"))
            for (const auto& [key, value] : ja["edge_map"].items()) {
                int e = std::stoi(key);
                int tgt = value.get<int>();
                if (e < 0 || e >= static_cast<int>(a.tree.edges.size()) ||
                    !a.tree.edges[static_cast<size_t>(e)].infinite() || tgt < 0 ||
                    tgt >= static_cast<int>(a.tree.edges.size()) ||
                    !a.tree.edges[static_cast<size_t>(tgt)].infinite())
                    throw ConfigError("edge_map must pair infinite edges", "actions");
                iso.ray_target[static_cast<size_t>(e)] = tgt;
            }
        a.generators.push_back(iso);
    }
    return a;
}

void write_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << j.dump(2) << "\n";
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read " + path);
    json j;
    in >> j;
    return j;
}

}  // namespace treelimit
