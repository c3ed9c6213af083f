#include "treelimit/degeneration.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "treelimit/errors.hpp"
#include "treelimit/parallel.hpp"

namespace treelimit {

RescaledMetric rescale(std::vector<SampleLabel> labels, const std::vector<std::vector<double>>& m, double energy) {
    if (!(energy > 0.0)) throw InvalidEnergyError("rescale needs positive energy");
    RescaledMetric out;
    out.labels = std::move(labels);
    out.energy_used = energy;
    double s = 1.0 / std::sqrt(energy);
    out.dist.resize(m.size());
    for (size_t i = 0; i < m.size(); ++i) {
        out.dist[i].resize(m.size());
        for (size_t j = 0; j < m.size(); ++j) out.dist[i][j] = m[i][j] * s;
    }
    return out;
}

double metric_diameter(const std::vector<std::vector<double>>& m) {
    double d = 0.0;
    for (size_t i = 0; i < m.size(); ++i)
        for (size_t j = i + 1; j < m.size(); ++j) d = std::max(d, m[i][j]);
    return d;
}

namespace {

// (max pairing sum - mid pairing sum) / 2 over one quadruple.
double quadruple_delta(const std::vector<std::vector<double>>& m, int i, int j, int k, int l) {
    double s1 = m[static_cast<size_t>(i)][static_cast<size_t>(j)] + m[static_cast<size_t>(k)][static_cast<size_t>(l)];
    double s2 = m[static_cast<size_t>(i)][static_cast<size_t>(k)] + m[static_cast<size_t>(j)][static_cast<size_t>(l)];
    double s3 = m[static_cast<size_t>(i)][static_cast<size_t>(l)] + m[static_cast<size_t>(j)][static_cast<size_t>(k)];
    double hi = std::max({s1, s2, s3});
    double mid = s1 + s2 + s3 - hi - std::min({s1, s2, s3});
    return 0.5 * (hi - mid);
}

}  // namespace

DeltaReport gromov_delta(const std::vector<std::vector<double>>& m, std::uint64_t seed) {
    DeltaReport report;
    int n = static_cast<int>(m.size());
    if (n < 4) return report;
    if (n <= 40) {
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                for (int k = j + 1; k < n; ++k)
                    for (int l = k + 1; l < n; ++l) {
                        double d = quadruple_delta(m, i, j, k, l);
                        if (d > report.delta) {
                            report.delta = d;
                            report.worst = {i, j, k, l};
                        }
                    }
        return report;
    }
    constexpr long long kDraws = 1000000;
    std::vector<DeltaReport> partial(16);
    parallel_chunks(kDraws, [&](int chunk, long long begin, long long end) {
        std::mt19937_64 rng(seed + 0x9e3779b97f4a7c15ull * static_cast<std::uint64_t>(chunk));
        std::uniform_int_distribution<int> pick(0, n - 1);
        DeltaReport local;
        for (long long it = begin; it < end; ++it) {
            int i = pick(rng), j = pick(rng), k = pick(rng), l = pick(rng);
            if (i == j || i == k || i == l || j == k || j == l || k == l) continue;
            double d = quadruple_delta(m, i, j, k, l);
            if (d > local.delta) {
                local.delta = d;
                local.worst = {i, j, k, l};
            }
        }
        partial[static_cast<size_t>(chunk)] = local;
    });
    for (const DeltaReport& p : partial)
        if (p.delta > report.delta) report = p;
    return report;
}

namespace {

// Split edge `e` at interior offset; points on it are remapped. Returns the
// new vertex id.
int split_edge(SimplicialTree& t, std::vector<TreePoint>& locs, int e, double offset) {
    TreeEdge& ed = t.edges[static_cast<size_t>(e)];
    int nv = t.vertex_count++;
    int tail_edge = static_cast<int>(t.edges.size());
    double total = ed.length;
    int old_b = ed.b;
    bool inf = ed.infinite();
    ed.b = nv;
    ed.length = offset;
    t.edges.push_back(inf ? TreeEdge{nv, -1, kInf} : TreeEdge{nv, old_b, total - offset});
    for (TreePoint& p : locs) {
        if (p.at_vertex() || p.edge != e) continue;
        if (p.offset < offset) continue;
        if (p.offset == offset) {
            p = TreePoint::of_vertex(nv);
        } else {
            p.edge = tail_edge;
            p.offset -= offset;
        }
    }
    return nv;
}

// Materialize a tree point as a vertex.
int as_vertex(SimplicialTree& t, std::vector<TreePoint>& locs, const TreePoint& p) {
    if (p.at_vertex()) return p.vertex;
    return split_edge(t, locs, p.edge, p.offset);
}

}  // namespace

TreeEmbedding tree_from_metric(const RescaledMetric& m, double tol) {
    int n = static_cast<int>(m.dist.size());
    if (n < 1) throw ConfigError("metric needs at least one point", "metric");
    double diam = metric_diameter(m.dist);
    DeltaReport delta = gromov_delta(m.dist, 99991);
    if (delta.delta > tol * diam)
        throw NotTreeLikeError("four-point condition fails at tolerance", delta.worst, delta.delta, diam);

    TreeEmbedding emb;
    emb.tree.vertex_count = 1;
    emb.location.assign(static_cast<size_t>(n), TreePoint::of_vertex(0));
    const double eps = 1e-12 * (1.0 + diam);
    auto d = [&](int i, int j) { return m.dist[static_cast<size_t>(i)][static_cast<size_t>(j)]; };

    std::vector<int> inserted{0};
    for (int z = 1; z < n; ++z) {
        if (inserted.size() == 1) {
            int x = inserted[0];
            if (d(x, z) > eps) {
                int nv = emb.tree.vertex_count++;
                emb.tree.edges.push_back({emb.location[static_cast<size_t>(x)].vertex, nv, d(x, z)});
                emb.location[static_cast<size_t>(z)] = TreePoint::of_vertex(nv);
            } else {
                emb.location[static_cast<size_t>(z)] = emb.location[static_cast<size_t>(x)];
            }
            inserted.push_back(z);
            continue;
        }
        // Reference x: endpoint of the current diameter pair of inserted
        // samples; v*: the inserted point minimizing the Gromov product
        // (x|v)_z, so the arc [x, v*] carries the attachment point.
        int x = inserted[0], y = inserted[1];
        double best_diam = -1.0;
        for (size_t i = 0; i < inserted.size(); ++i)
            for (size_t j = i + 1; j < inserted.size(); ++j)
                if (d(inserted[i], inserted[j]) > best_diam) {
                    best_diam = d(inserted[i], inserted[j]);
                    x = inserted[i];
                    y = inserted[j];
                }
        int v_star = y;
        double h = 0.5 * (d(x, z) + d(y, z) - d(x, y));
        for (int v : inserted) {
            if (v == x) continue;
            double hv = 0.5 * (d(x, z) + d(v, z) - d(x, v));
            if (hv < h) {
                h = hv;
                v_star = v;
            }
        }
        h = std::max(h, 0.0);
        double alpha = d(x, z) - h;  // distance from x to the attachment point
        TreePoint px = emb.location[static_cast<size_t>(x)];
        TreePoint pv = emb.location[static_cast<size_t>(v_star)];
        double arc = tree_distance(emb.tree, px, pv);
        alpha = std::clamp(alpha, 0.0, arc);
        TreePoint attach_pt = point_along(emb.tree, px, pv, alpha);
        int attach = as_vertex(emb.tree, emb.location, attach_pt);
        if (h > eps) {
            int nv = emb.tree.vertex_count++;
            emb.tree.edges.push_back({attach, nv, h});
            emb.location[static_cast<size_t>(z)] = TreePoint::of_vertex(nv);
        } else {
            emb.location[static_cast<size_t>(z)] = TreePoint::of_vertex(attach);
        }
        inserted.push_back(z);
    }

    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            double re = tree_distance(emb.tree, emb.location[static_cast<size_t>(i)], emb.location[static_cast<size_t>(j)]);
            emb.max_error = std::max(emb.max_error, std::abs(re - d(i, j)));
        }
    return emb;
}

namespace {

struct SampleIndex {
    std::map<std::pair<int, std::vector<Letter>>, int> by_key;

    static SampleIndex build(const std::vector<SampleLabel>& labels) {
        SampleIndex idx;
        for (size_t i = 0; i < labels.size(); ++i)
            idx.by_key[{labels[i].vertex, labels[i].word.letters}] = static_cast<int>(i);
        return idx;
    }

    int find(int vertex, const Word& w) const {
        auto it = by_key.find({vertex, w.letters});
        return it == by_key.end() ? -1 : it->second;
    }
};

std::vector<int> generator_sample_map(const SampleIndex& idx, const std::vector<SampleLabel>& labels,
                                      const Word& g) {
    std::vector<int> map(labels.size(), -1);
    for (size_t i = 0; i < labels.size(); ++i)
        map[i] = idx.find(labels[i].vertex, concat(g, labels[i].word));
    return map;
}

}  // namespace

InducedAction induced_action(const TreeEmbedding& emb, const std::vector<SampleLabel>& labels,
                             const Presentation& pres, double tol) {
    SampleIndex idx = SampleIndex::build(labels);
    InducedAction out;
    out.action.tree = emb.tree;
    out.action.presentation = pres;
    for (int g = 0; g < pres.rank(); ++g) {
        Word gen{{{g, 1}}};
        std::vector<int> map = generator_sample_map(idx, labels, gen);
        double worst = 0.0;
        int wa = -1, wb = -1;
        for (size_t i = 0; i < labels.size(); ++i) {
            if (map[i] < 0) continue;
            for (size_t j = i + 1; j < labels.size(); ++j) {
                if (map[j] < 0) continue;
                double before = tree_distance(emb.tree, emb.location[i], emb.location[j]);
                double after = tree_distance(emb.tree, emb.location[static_cast<size_t>(map[i])],
                                             emb.location[static_cast<size_t>(map[j])]);
                double dist = std::abs(before - after);
                if (dist > worst) {
                    worst = dist;
                    wa = static_cast<int>(i);
                    wb = static_cast<int>(j);
                }
            }
        }
        if (worst > tol)
            throw NonIsometricActionError("induced generator action distorts the sample metric", wa, wb, worst);
        out.sample_image.push_back(map);
        out.distortion.push_back(worst);

        TreeIsometry iso;
        iso.vertex_image.resize(static_cast<size_t>(emb.tree.vertex_count));
        iso.ray_target.assign(emb.tree.edges.size(), -1);
        for (size_t i = 0; i < labels.size(); ++i) {
            if (map[i] < 0) continue;
            const TreePoint& src = emb.location[i];
            if (src.at_vertex()) iso.vertex_image[static_cast<size_t>(src.vertex)] = emb.location[static_cast<size_t>(map[i])];
        }
        out.action.generators.push_back(iso);
    }
    return out;
}

double sample_tree_length(const TreeEmbedding& emb, const std::vector<SampleLabel>& labels,
                          const Presentation& pres, const Word& w) {
    (void)pres;
    SampleIndex idx = SampleIndex::build(labels);
    double best = kInf;
    for (size_t i = 0; i < labels.size(); ++i) {
        int j = idx.find(labels[i].vertex, concat(w, labels[i].word));
        if (j < 0) continue;
        best = std::min(best, tree_distance(emb.tree, emb.location[i], emb.location[static_cast<size_t>(j)]));
    }
    return best;
}

bool abelian_length_vector(const Presentation& pres, const std::vector<Word>& words,
                           const std::vector<double>& lengths, double tol) {
    int rank = pres.rank();
    if (rank > 16) return false;
    std::vector<double> base(static_cast<size_t>(rank), 0.0);
    for (size_t i = 0; i < words.size(); ++i)
        if (words[i].length() == 1 && words[i].letters[0].exp == 1)
            base[static_cast<size_t>(words[i].letters[0].gen)] = lengths[i];
    for (int signs = 0; signs < (1 << rank); ++signs) {
        bool ok = true;
        for (size_t i = 0; i < words.size() && ok; ++i) {
            double h = 0.0;
            for (const Letter& l : words[i].letters) {
                double v = base[static_cast<size_t>(l.gen)];
                if (signs & (1 << l.gen)) v = -v;
                h += l.exp * v;
            }
            if (std::abs(std::abs(h) - lengths[i]) > tol) ok = false;
        }
        if (ok) return true;
    }
    return false;
}

double projective_compare(const std::vector<double>& l1, const std::vector<double>& l2) {
    if (l1.size() != l2.size()) throw RangeError("length vectors must share the word list");
    double m1 = 0.0, m2 = 0.0;
    for (double v : l1) m1 = std::max(m1, v);
    for (double v : l2) m2 = std::max(m2, v);
    if (m1 <= 0.0 || m2 <= 0.0) throw DegenerateLengthError("length vector is identically zero");
    double out = 0.0;
    for (size_t i = 0; i < l1.size(); ++i) out = std::max(out, std::abs(l1[i] / m1 - l2[i] / m2));
    return out;
}

DegenerationRun run_degeneration(const RepresentationFamily& family, const TwistedGraph& graph,
                                 const DegenerationParams& params) {
    if (params.schedule.empty()) throw ConfigError("schedule must be nonempty", "schedule");
    for (size_t i = 1; i < params.schedule.size(); ++i)
        if (!(params.schedule[i] > params.schedule[i - 1]))
            throw ConfigError("schedule must be strictly increasing", "schedule");
    validate_graph(graph);

    DegenerationRun run;
    run.length_words = word_list(family.presentation, params.word_length);
    std::vector<Word> sample_words = all_reduced_words(family.presentation, params.sample_word_length);
    run.labels = sample_labels(graph, sample_words);

    EquivariantMap u = default_initial_map(graph);

    for (size_t step_i = 0; step_i < params.schedule.size(); ++step_i) {
        double t = params.schedule[step_i];
        Representation rep = family_at(family, t);
        validate_representation(rep);
        auto [solution, report] = minimize(graph, rep, u, params.tol, params.max_iter);
        u = solution;  // warm start for the next step

        DegenerationStep step;
        step.t = t;
        step.energy = report.final_energy;
        step.solve_status = report.status;
        step.gradient_norm = report.gradient_norm;
        step.lipschitz = lipschitz_ratio(graph, rep, u);
        step.rep_lengths = length_function(rep, run.length_words);

        if (report.status == SolveStatus::Escaped || !(step.energy > 0.0)) {
            run.steps.push_back(step);
            continue;  // recorded with status; the run continues
        }

        std::vector<std::vector<double>> raw = pullback_metric(graph, rep, u, sample_words);
        // min over samples x of d(u(x), u(w x)): the displacement of the
        // conjugated word at the sample's base position
        RelativeWordCache conj_cache(rep);
        for (const Word& w : run.length_words) {
            double best = kInf;
            for (const SampleLabel& s : run.labels) {
                Word conj = concat(concat(inverse(s.word), w), s.word);
                const Vec4& p = u.positions[static_cast<size_t>(s.vertex)];
                best = std::min(best, hyperbolic_distance(p, conj_cache.transport(conj).apply(p)));
            }
            step.min_displacement.push_back(best);
        }

        RescaledMetric metric = rescale(run.labels, raw, step.energy);
        DeltaReport delta = gromov_delta(metric.dist, params.seed);
        step.delta = delta.delta;
        step.diameter = metric_diameter(metric.dist);

        bool last = step_i + 1 == params.schedule.size();
        double sqrt_e = std::sqrt(step.energy);
        if (step.delta <= params.delta_threshold * step.diameter) {
            // tree_from_metric rechecks the four-point condition with its own
            // quadruple sample; near the threshold that recheck can land on
            // the other side, which only fails the run at the final step.
            try {
                TreeEmbedding emb = tree_from_metric(metric, params.delta_threshold);
                double action_tol = std::max(10.0 * params.delta_threshold * step.diameter, 1e-9);
                InducedAction act = induced_action(emb, run.labels, family.presentation, action_tol);
                for (const Word& w : run.length_words)
                    step.lengths.push_back(sample_tree_length(emb, run.labels, family.presentation, w));
                step.tree_built = true;
                run.final_tree = std::move(emb);
                run.final_action = std::move(act);
            } catch (const NotTreeLikeError&) {
                if (last) throw;
            }
        } else if (last) {
            throw NotTreeLikeError("final step metric is not tree-like at the threshold", delta.worst, step.delta,
                                   step.diameter);
        }
        if (!step.tree_built)
            for (double md : step.min_displacement) step.lengths.push_back(md / sqrt_e);
        run.steps.push_back(std::move(step));
    }
    const DegenerationStep& last = run.steps.back();
    if (!last.lengths.empty()) {
        double scale = 0.0;
        for (double l : last.lengths) scale = std::max(scale, l);
        if (scale > 0.0)
            run.abelian_limit = abelian_length_vector(family.presentation, run.length_words, last.lengths,
                                                      0.05 * scale);
    }
    return run;
}

}  // namespace treelimit
