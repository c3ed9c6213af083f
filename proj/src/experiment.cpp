#include "treelimit/experiment.hpp"

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "treelimit/errors.hpp"
#include "treelimit/tree_io.hpp"

namespace treelimit {

using nlohmann::json;

namespace {

std::string fmt17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

Presentation parse_presentation(const json& j) {
    Presentation p;
    if (!j.contains("generators") || !j["generators"].is_array() || j["generators"].empty())
        throw ConfigError("presentation.generators must be a nonempty array", "presentation.generators");
    p.generators = j["generators"].get<std::vector<std::string>>();
    if (j.contains("relators"))
        for (const json& r : j["relators"]) p.relators.push_back(parse_word(p, r.get<std::string>()));
    validate_presentation(p);
    return p;
}

Sl2c parse_matrix(const json& j) {
    if (!j.is_array() || j.size() != 4) throw ConfigError("matrix must be four [re,im] pairs", "family.images");
    auto entry = [&](size_t k) {
        const json& e = j[k];
        if (!e.is_array() || e.size() != 2) throw ConfigError("matrix entry must be [re,im]", "family.images");
        return Complex(e[0].get<double>(), e[1].get<double>());
    };
    return {entry(0), entry(1), entry(2), entry(3)};
}

RepresentationFamily parse_family(const json& j, const json& root) {
    if (!j.contains("name")) throw ConfigError("family.name is required", "family.name");
    std::string name = j["name"].get<std::string>();
    if (name == "diag-stretch") return diag_stretch_family();
    if (name == "fuchsian-octagon") return fuchsian_octagon_family();
    if (name == "custom") {
        if (!root.contains("presentation"))
            throw ConfigError("custom family needs a presentation", "presentation");
        Presentation pres = parse_presentation(root["presentation"]);
        if (!j.contains("images") || !j["images"].is_array() ||
            j["images"].size() != static_cast<size_t>(pres.rank()))
            throw ConfigError("custom family needs one matrix per generator", "family.images");
        std::vector<Sl2c> images;
        for (const json& m : j["images"]) images.push_back(parse_matrix(m));
        return custom_family(pres, images);
    }
    throw ConfigError("unknown family name: " + name, "family.name");
}

TwistedGraph parse_graph(const json& j, const Presentation& pres) {
    TwistedGraph g;
    if (!j.contains("vertices") || !j["vertices"].is_number_integer())
        throw ConfigError("graph.vertices must be an integer", "graph.vertices");
    g.vertex_count = j["vertices"].get<int>();
    if (!j.contains("edges") || !j["edges"].is_array())
        throw ConfigError("graph.edges must be an array", "graph.edges");
    for (const json& je : j["edges"]) {
        TwistedEdge e;
        e.tail = je.at("tail").get<int>();
        e.head = je.at("head").get<int>();
        e.weight = je.value("weight", 1.0);
        e.holonomy = parse_word(pres, je.at("holonomy").get<std::string>());
        g.edges.push_back(e);
    }
    validate_graph(g);
    return g;
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& path) {
    json j;
    {
        std::ifstream in(path);
        if (!in) throw Error("cannot read config file: " + path);
        try {
            in >> j;
        } catch (const json::exception& e) {
            throw ConfigError(std::string("invalid JSON: ") + e.what(), "(document)");
        }
    }
    ExperimentConfig cfg;
    try {
        if (!j.contains("family")) throw ConfigError("family is required", "family");
        cfg.family = parse_family(j["family"], j);
        if (!j.contains("graph")) throw ConfigError("graph is required", "graph");
        cfg.graph = parse_graph(j["graph"], cfg.family.presentation);

        if (!j.contains("schedule") || !j["schedule"].is_array() || j["schedule"].empty())
            throw ConfigError("schedule must be a nonempty array", "schedule");
        cfg.params.schedule = j["schedule"].get<std::vector<double>>();
        for (size_t i = 1; i < cfg.params.schedule.size(); ++i)
            if (!(cfg.params.schedule[i] > cfg.params.schedule[i - 1]))
                throw ConfigError("schedule must be strictly increasing", "schedule");

        cfg.params.word_length = j.value("word_length", 2);
        if (cfg.params.word_length < 1) throw ConfigError("word_length must be >= 1", "word_length");
        cfg.params.sample_word_length = j.value("sample_word_length", 3);
        if (cfg.params.sample_word_length < cfg.params.word_length)
            throw ConfigError("sample_word_length must cover word_length", "sample_word_length");
        if (j.contains("solver")) {
            cfg.params.tol = j["solver"].value("tol", 1e-8);
            cfg.params.max_iter = j["solver"].value("max_iter", 100000);
        }
        if (!(cfg.params.tol > 0.0)) throw ConfigError("solver.tol must be positive", "solver.tol");
        if (cfg.params.max_iter < 1) throw ConfigError("solver.max_iter must be >= 1", "solver.max_iter");
        cfg.params.delta_threshold = j.value("delta_threshold", 0.05);
        if (!(cfg.params.delta_threshold > 0.0))
            throw ConfigError("delta_threshold must be positive", "delta_threshold");
        cfg.params.seed = j.value("seed", static_cast<std::uint64_t>(7));
        if (j.contains("output")) {
            cfg.csv_path = j["output"].value("csv", cfg.csv_path);
            cfg.tree_path = j["output"].value("tree", cfg.tree_path);
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed field: ") + e.what(), "(document)");
    }
    return cfg;
}

std::string format_csv(const DegenerationRun& run, const Presentation& pres) {
    std::string out = "t,energy,delta,diameter";
    for (const Word& w : run.length_words) out += ",len_" + word_to_string(pres, w);
    out += "\n";
    for (const DegenerationStep& s : run.steps) {
        out += fmt17(s.t) + "," + fmt17(s.energy) + "," + fmt17(s.delta) + "," + fmt17(s.diameter);
        for (size_t i = 0; i < run.length_words.size(); ++i)
            out += "," + (i < s.lengths.size() ? fmt17(s.lengths[i]) : std::string("nan"));
        out += "\n";
    }
    return out;
}

int run_experiment(const std::string& config_path, const std::string& out_dir,
                   std::optional<std::uint64_t> seed_override) {
    if (!std::filesystem::exists(config_path)) {
        std::fprintf(stderr, "error: config file not found: %s\n", config_path.c_str());
        return 1;
    }
    try {
        ExperimentConfig cfg = parse_experiment_config(config_path);
        if (seed_override) cfg.params.seed = *seed_override;
        DegenerationRun run = run_degeneration(cfg.family, cfg.graph, cfg.params);

        for (const DegenerationStep& s : run.steps) {
            const char* status = s.solve_status == SolveStatus::Converged     ? "converged"
                                 : s.solve_status == SolveStatus::Escaped     ? "escaped"
                                                                              : "max-iterations";
            std::printf("t=%g energy=%.6g delta=%.6g diameter=%.6g status=%s tree=%s\n", s.t, s.energy, s.delta,
                        s.diameter, status, s.tree_built ? "yes" : "no");
        }

        if (run.abelian_limit)
            std::printf("note: final length vector is abelian (realized by a homomorphism to R); "
                        "the limit tree is not determined by it alone\n");

        std::filesystem::create_directories(out_dir);
        std::filesystem::path base(out_dir);
        {
            std::ofstream csv(base / cfg.csv_path, std::ios::binary);
            csv << format_csv(run, cfg.family.presentation);
        }
        if (run.final_action) {
            write_json_file((base / cfg.tree_path).string(), action_to_json(run.final_action->action));
        }
        return 0;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error in %s: %s\n", e.field.c_str(), e.what());
        return 3;
    } catch (const NotTreeLikeError& e) {
        std::fprintf(stderr, "not tree-like: %s (delta=%.6g, diameter=%.6g, quadruple=[%d,%d,%d,%d])\n", e.what(),
                     e.delta, e.diameter, e.quadruple[0], e.quadruple[1], e.quadruple[2], e.quadruple[3]);
        return 2;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}

int run_tree_command(const std::string& metric_path, double tol, const std::string& out_path) {
    if (!std::filesystem::exists(metric_path)) {
        std::fprintf(stderr, "error: metric file not found: %s\n", metric_path.c_str());
        return 1;
    }
    try {
        json j = read_json_file(metric_path);
        if (!j.contains("dist") || !j["dist"].is_array())
            throw ConfigError("metric file needs a dist matrix", "dist");
        RescaledMetric m;
        m.dist = j["dist"].get<std::vector<std::vector<double>>>();
        for (const auto& row : m.dist)
            if (row.size() != m.dist.size()) throw ConfigError("dist matrix must be square", "dist");
        m.labels.resize(m.dist.size());
        TreeEmbedding emb = tree_from_metric(m, tol);
        json out = tree_to_json(emb.tree);
        out["max_error"] = emb.max_error;
        if (out_path.empty())
            std::printf("%s\n", out.dump(2).c_str());
        else
            write_json_file(out_path, out);
        return 0;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error in %s: %s\n", e.field.c_str(), e.what());
        return 3;
    } catch (const NotTreeLikeError& e) {
        std::fprintf(stderr, "not tree-like: delta=%.6g diameter=%.6g quadruple=[%d,%d,%d,%d]\n", e.delta,
                     e.diameter, e.quadruple[0], e.quadruple[1], e.quadruple[2], e.quadruple[3]);
        return 2;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}

}  // namespace treelimit
