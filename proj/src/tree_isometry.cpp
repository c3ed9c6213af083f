#include "treelimit/tree_isometry.hpp"

#include <algorithm>
#include <cmath>

#include "treelimit/errors.hpp"

namespace treelimit {

TreeIsometry TreeIsometry::identity(const SimplicialTree& t) {
    TreeIsometry g;
    g.vertex_image.resize(static_cast<size_t>(t.vertex_count));
    for (int v = 0; v < t.vertex_count; ++v) g.vertex_image[static_cast<size_t>(v)] = TreePoint::of_vertex(v);
    g.ray_target.assign(t.edges.size(), -1);
    for (size_t e = 0; e < t.edges.size(); ++e)
        if (t.edges[e].infinite()) g.ray_target[e] = static_cast<int>(e);
    return g;
}

std::optional<TreePoint> apply(const SimplicialTree& t, const TreeIsometry& g, const TreePoint& p) {
    if (p.at_vertex()) return g.vertex_image[static_cast<size_t>(p.vertex)];
    const TreeEdge& e = t.edges[static_cast<size_t>(p.edge)];
    auto ga = g.vertex_image[static_cast<size_t>(e.a)];
    if (!ga) return std::nullopt;
    if (e.infinite()) {
        int target = g.ray_target[static_cast<size_t>(p.edge)];
        if (target < 0) return std::nullopt;
        return walk_toward_end(t, *ga, target, p.offset);
    }
    auto gb = g.vertex_image[static_cast<size_t>(e.b)];
    if (!gb) return std::nullopt;
    return point_along(t, *ga, *gb, p.offset);
}

TreeIsometry compose(const SimplicialTree& t, const TreeIsometry& g, const TreeIsometry& h) {
    TreeIsometry out;
    out.vertex_image.resize(static_cast<size_t>(t.vertex_count));
    out.ray_target.assign(t.edges.size(), -1);
    for (int v = 0; v < t.vertex_count; ++v) {
        const auto& hv = h.vertex_image[static_cast<size_t>(v)];
        if (hv) out.vertex_image[static_cast<size_t>(v)] = apply(t, g, *hv);
    }
    for (size_t e = 0; e < t.edges.size(); ++e) {
        int mid = h.ray_target[e];
        if (mid >= 0) out.ray_target[e] = g.ray_target[static_cast<size_t>(mid)];
    }
    return out;
}

namespace {

// Locate q as a point of the arc [from, to]; offset along the arc or -1.
double locate_on_arc(const SimplicialTree& t, const TreePoint& from, const TreePoint& to, const TreePoint& q,
                     double tol = 1e-9) {
    double total = tree_distance(t, from, to);
    double d1 = tree_distance(t, from, q);
    double d2 = tree_distance(t, q, to);
    if (std::abs(d1 + d2 - total) <= tol * (1.0 + total)) return d1;
    return -1.0;
}

}  // namespace

TreeIsometry inverse_isometry(const SimplicialTree& t, const TreeIsometry& g) {
    TreeIsometry out;
    out.vertex_image.resize(static_cast<size_t>(t.vertex_count));
    out.ray_target.assign(t.edges.size(), -1);
    for (size_t e = 0; e < t.edges.size(); ++e) {
        int target = g.ray_target[e];
        if (target >= 0) out.ray_target[static_cast<size_t>(target)] = static_cast<int>(e);
    }
    for (int w = 0; w < t.vertex_count; ++w) {
        TreePoint target = TreePoint::of_vertex(w);
        std::optional<TreePoint> pre;
        for (int v = 0; v < t.vertex_count && !pre; ++v) {
            const auto& gv = g.vertex_image[static_cast<size_t>(v)];
            if (gv && same_point(t, *gv, target)) pre = TreePoint::of_vertex(v);
        }
        // w may be interior to the image of an edge
        for (size_t e = 0; e < t.edges.size() && !pre; ++e) {
            const TreeEdge& ed = t.edges[e];
            auto ga = g.vertex_image[static_cast<size_t>(ed.a)];
            if (!ga) continue;
            if (ed.infinite()) {
                int tgt = g.ray_target[e];
                if (tgt < 0) continue;
                // offset s on the ray maps to walk_toward_end(ga, tgt, s)
                double base = tree_distance(t, *ga, target);
                TreePoint probe = walk_toward_end(t, *ga, tgt, base);
                if (same_point(t, probe, target)) pre = make_point(t, static_cast<int>(e), base);
            } else {
                auto gb = g.vertex_image[static_cast<size_t>(ed.b)];
                if (!gb) continue;
                double s = locate_on_arc(t, *ga, *gb, target);
                if (s >= 0.0 && s <= ed.length) pre = make_point(t, static_cast<int>(e), s);
            }
        }
        out.vertex_image[static_cast<size_t>(w)] = pre;
    }
    return out;
}

double isometry_defect(const SimplicialTree& t, const TreeIsometry& g) {
    double worst = 0.0;
    for (int u = 0; u < t.vertex_count; ++u) {
        const auto& gu = g.vertex_image[static_cast<size_t>(u)];
        if (!gu) continue;
        for (int v = u + 1; v < t.vertex_count; ++v) {
            const auto& gv = g.vertex_image[static_cast<size_t>(v)];
            if (!gv) continue;
            double before = vertex_distance(t, u, v);
            double after = tree_distance(t, *gu, *gv);
            worst = std::max(worst, std::abs(before - after));
        }
    }
    return worst;
}

DisplacementResult translation_length(const SimplicialTree& t, const TreeIsometry& g) {
    struct Candidate {
        TreePoint point;
        double disp;
    };
    std::vector<Candidate> candidates;
    auto displacement = [&](const TreePoint& p) -> double {
        auto gp = apply(t, g, p);
        return gp ? tree_distance(t, p, *gp) : kInf;
    };
    for (int v = 0; v < t.vertex_count; ++v) {
        if (!g.vertex_image[static_cast<size_t>(v)]) continue;
        TreePoint p = TreePoint::of_vertex(v);
        candidates.push_back({p, displacement(p)});
    }
    // Interior minima occur only where an edge is carried over itself
    // reversed; the fixed point sits halfway between an endpoint and its
    // image along the edge.
    for (size_t e = 0; e < t.edges.size(); ++e) {
        const TreeEdge& ed = t.edges[e];
        auto ga = g.vertex_image[static_cast<size_t>(ed.a)];
        if (!ga) continue;
        if (ed.infinite()) {
            if (g.ray_target[e] == static_cast<int>(e)) continue;  // same end: no reversal
            if (!ga->at_vertex() && ga->edge == static_cast<int>(e) && ga->offset > 0.0) {
                TreePoint mid = make_point(t, static_cast<int>(e), ga->offset / 2.0);
                candidates.push_back({mid, displacement(mid)});
            }
            continue;
        }
        auto gb = g.vertex_image[static_cast<size_t>(ed.b)];
        if (!gb) continue;
        auto offset_on_edge = [&](const TreePoint& q) -> double {
            if (q.at_vertex()) {
                if (q.vertex == ed.a) return 0.0;
                if (q.vertex == ed.b) return ed.length;
                return -1.0;
            }
            return q.edge == static_cast<int>(e) ? q.offset : -1.0;
        };
        double oa = offset_on_edge(*ga);
        if (oa > 0.0) {
            TreePoint mid = make_point(t, static_cast<int>(e), oa / 2.0);
            candidates.push_back({mid, displacement(mid)});
        }
        double ob = offset_on_edge(*gb);
        if (ob >= 0.0 && ob < ed.length) {
            TreePoint mid = make_point(t, static_cast<int>(e), (ob + ed.length) / 2.0);
            candidates.push_back({mid, displacement(mid)});
        }
    }
    if (candidates.empty()) throw Error("isometry has an empty window");

    DisplacementResult out;
    out.length = kInf;
    for (const Candidate& c : candidates) out.length = std::min(out.length, c.disp);
    if (out.length < 1e-12) out.length = std::max(out.length, 0.0);

    const double tol = 1e-12 * (1.0 + out.length) + 1e-12;
    Subtree cs;
    cs.vertex_in.assign(static_cast<size_t>(t.vertex_count), 0);
    auto realized = [&](const TreePoint& p) { return displacement(p) <= out.length + tol; };
    for (const Candidate& c : candidates) {
        if (c.disp > out.length + tol) continue;
        if (c.point.at_vertex())
            cs.vertex_in[static_cast<size_t>(c.point.vertex)] = 1;
        else {
            auto it = cs.spans.find(c.point.edge);
            if (it == cs.spans.end())
                cs.spans[c.point.edge] = {c.point.offset, c.point.offset};
            else {
                it->second.first = std::min(it->second.first, c.point.offset);
                it->second.second = std::max(it->second.second, c.point.offset);
            }
        }
    }
    // Whole edges where both endpoints realize the minimum; rays where the
    // displacement is flat.
    for (size_t e = 0; e < t.edges.size(); ++e) {
        const TreeEdge& ed = t.edges[e];
        if (ed.infinite()) {
            TreePoint base = TreePoint::of_vertex(ed.a);
            if (!g.vertex_image[static_cast<size_t>(ed.a)] || g.ray_target[e] < 0) continue;
            if (realized(base) && realized(make_point(t, static_cast<int>(e), 1.0)) &&
                realized(make_point(t, static_cast<int>(e), 2.0))) {
                auto it = cs.spans.find(static_cast<int>(e));
                if (it == cs.spans.end())
                    cs.spans[static_cast<int>(e)] = {0.0, kInf};
                else
                    it->second = {0.0, kInf};
            }
            continue;
        }
        if (realized(TreePoint::of_vertex(ed.a)) && realized(TreePoint::of_vertex(ed.b))) {
            // convex displacement equal at both endpoints is flat across
            cs.spans[static_cast<int>(e)] = {0.0, ed.length};
        }
    }
    canonicalize_subtree(t, cs);
    out.characteristic = cs;
    return out;
}

void validate_action(const TreeAction& a, double tol) {
    validate_tree(a.tree);
    validate_presentation(a.presentation);
    if (a.generators.size() != static_cast<size_t>(a.presentation.rank()))
        throw ConfigError("one isometry per generator required", "action.generators");
    for (const TreeIsometry& g : a.generators)
        if (isometry_defect(a.tree, g) > tol) throw ConfigError("generator distorts distances", "action.generators");
    for (const Word& r : a.presentation.relators) {
        TreeIsometry rel = word_isometry(a, r);
        for (int v = 0; v < a.tree.vertex_count; ++v) {
            const auto& img = rel.vertex_image[static_cast<size_t>(v)];
            if (img && !same_point(a.tree, *img, TreePoint::of_vertex(v), tol))
                throw ConfigError("relator is not the identity on its window", "action.relators");
        }
    }
}

namespace {

TreeIsometry word_isometry_cached(const TreeAction& a, const Word& w,
                                  const std::vector<TreeIsometry>& inverses) {
    TreeIsometry out = TreeIsometry::identity(a.tree);
    // evaluate left-to-right: word g1 g2 acts as g1 after g2
    for (auto it = w.letters.rbegin(); it != w.letters.rend(); ++it) {
        const TreeIsometry& step =
            it->exp > 0 ? a.generators[static_cast<size_t>(it->gen)] : inverses[static_cast<size_t>(it->gen)];
        out = compose(a.tree, step, out);
    }
    return out;
}

std::vector<TreeIsometry> generator_inverses(const TreeAction& a) {
    std::vector<TreeIsometry> inv;
    inv.reserve(a.generators.size());
    for (const TreeIsometry& g : a.generators) inv.push_back(inverse_isometry(a.tree, g));
    return inv;
}

}  // namespace

TreeIsometry word_isometry(const TreeAction& a, const Word& w) {
    return word_isometry_cached(a, w, generator_inverses(a));
}

std::vector<double> length_function(const TreeAction& a, const std::vector<Word>& words) {
    auto inverses = generator_inverses(a);
    std::vector<double> out;
    out.reserve(words.size());
    for (const Word& w : words)
        out.push_back(translation_length(a.tree, word_isometry_cached(a, w, inverses)).length);
    return out;
}

std::optional<Subtree> global_fixed_point(const TreeAction& a) {
    Subtree common = whole_tree(a.tree);
    for (const TreeIsometry& g : a.generators) {
        DisplacementResult r = translation_length(a.tree, g);
        if (r.length > 1e-12) return std::nullopt;
        common = intersect_subtrees(a.tree, common, r.characteristic);
        if (common.empty()) return std::nullopt;
    }
    if (!subtree_connected(a.tree, common)) return std::nullopt;  // numerical guard; true intersections connect
    return common;
}

std::vector<End> fixed_ends(const TreeAction& a) {
    std::vector<End> out;
    for (size_t e = 0; e < a.tree.edges.size(); ++e) {
        if (!a.tree.edges[e].infinite()) continue;
        bool fixed = true;
        for (const TreeIsometry& g : a.generators)
            if (g.ray_target[e] != static_cast<int>(e)) {
                fixed = false;
                break;
            }
        if (fixed) out.push_back({static_cast<int>(e)});
    }
    return out;
}

TreePoint shift_toward_end(const SimplicialTree& t, const TreePoint& p, const End& e, double eps) {
    if (e.edge < 0 || e.edge >= static_cast<int>(t.edges.size()) || !t.edges[static_cast<size_t>(e.edge)].infinite())
        throw RangeError("end must reference an infinite edge");
    if (!(eps > 0.0)) throw RangeError("shift distance must be positive");
    return walk_toward_end(t, p, e.edge, eps);
}

namespace {

void add_span(Subtree& s, int edge, double lo, double hi) {
    auto it = s.spans.find(edge);
    if (it == s.spans.end())
        s.spans[edge] = {lo, hi};
    else {
        it->second.first = std::min(it->second.first, lo);
        it->second.second = std::max(it->second.second, hi);
    }
}

void merge_into(Subtree& target, const SimplicialTree& t, const Subtree& src) {
    for (int v = 0; v < t.vertex_count; ++v)
        if (src.vertex_in[static_cast<size_t>(v)]) target.vertex_in[static_cast<size_t>(v)] = 1;
    for (const auto& [e, span] : src.spans) add_span(target, e, span.first, span.second);
}

std::vector<TreePoint> subtree_anchor_points(const SimplicialTree& t, const Subtree& s) {
    std::vector<TreePoint> pts;
    for (int v = 0; v < t.vertex_count; ++v)
        if (s.vertex_in[static_cast<size_t>(v)]) pts.push_back(TreePoint::of_vertex(v));
    for (const auto& [e, span] : s.spans) {
        pts.push_back(make_point(t, e, span.first));
        if (!std::isinf(span.second)) pts.push_back(make_point(t, e, span.second));
    }
    return pts;
}

// Union-find components of a canonical subtree; returns one anchor per part.
std::vector<Subtree> subtree_components(const SimplicialTree& t, Subtree s) {
    canonicalize_subtree(t, s);
    std::vector<Subtree> parts;
    Subtree rest = s;
    while (!rest.empty()) {
        // grow a component from one seed
        Subtree comp;
        comp.vertex_in.assign(static_cast<size_t>(t.vertex_count), 0);
        std::vector<int> vstack;
        int seed_vertex = -1;
        for (int v = 0; v < t.vertex_count && seed_vertex < 0; ++v)
            if (rest.vertex_in[static_cast<size_t>(v)]) seed_vertex = v;
        if (seed_vertex >= 0) {
            vstack.push_back(seed_vertex);
        } else {
            auto it = rest.spans.begin();
            comp.spans[it->first] = it->second;
            const TreeEdge& ed = t.edges[static_cast<size_t>(it->first)];
            (void)ed;
            rest.spans.erase(it);
            parts.push_back(comp);
            continue;  // isolated interior span
        }
        while (!vstack.empty()) {
            int v = vstack.back();
            vstack.pop_back();
            if (comp.vertex_in[static_cast<size_t>(v)]) continue;
            comp.vertex_in[static_cast<size_t>(v)] = 1;
            rest.vertex_in[static_cast<size_t>(v)] = 0;
            for (auto it = rest.spans.begin(); it != rest.spans.end();) {
                const TreeEdge& ed = t.edges[static_cast<size_t>(it->first)];
                bool touches_a = ed.a == v && it->second.first == 0.0;
                bool touches_b = !ed.infinite() && ed.b == v && it->second.second == ed.length;
                if (touches_a || touches_b) {
                    comp.spans[it->first] = it->second;
                    if (touches_a && !ed.infinite() && it->second.second == ed.length &&
                        !comp.vertex_in[static_cast<size_t>(ed.b)])
                        vstack.push_back(ed.b);
                    if (touches_b && it->second.first == 0.0 && !comp.vertex_in[static_cast<size_t>(ed.a)])
                        vstack.push_back(ed.a);
                    it = rest.spans.erase(it);
                } else {
                    ++it;
                }
            }
        }
        parts.push_back(comp);
    }
    return parts;
}

}  // namespace

bool subtree_is_line(const SimplicialTree& t, const Subtree& s) {
    // count covered directions at each covered vertex
    for (int v = 0; v < t.vertex_count; ++v) {
        int directions = 0;
        for (const auto& [e, span] : s.spans) {
            const TreeEdge& ed = t.edges[static_cast<size_t>(e)];
            if (ed.a == v && span.first == 0.0 && (span.second > 0.0)) ++directions;
            if (!ed.infinite() && ed.b == v && span.second == ed.length && span.first < ed.length) ++directions;
        }
        if (directions >= 3) return false;
    }
    return true;
}

bool subtree_invariant(const TreeAction& a, const Subtree& s, double tol) {
    // A subtree is convex, so it is enough that anchor images land inside and
    // each covered span maps to an arc inside.
    auto pts = subtree_anchor_points(a.tree, s);
    for (const TreeIsometry& g : a.generators) {
        for (const TreePoint& p : pts) {
            auto gp = apply(a.tree, g, p);
            if (gp && !subtree_contains(a.tree, s, *gp, tol)) return false;
        }
        for (const auto& [e, span] : s.spans) {
            TreePoint lo = make_point(a.tree, e, span.first);
            TreePoint hi = std::isinf(span.second) ? make_point(a.tree, e, span.first + 1.0)
                                                   : make_point(a.tree, e, span.second);
            auto glo = apply(a.tree, g, lo);
            auto ghi = apply(a.tree, g, hi);
            if (glo && ghi && !subtree_contains_arc(a.tree, s, *glo, *ghi, tol)) return false;
        }
    }
    return true;
}

Subtree minimal_subtree(const TreeAction& a, int max_word_len) {
    std::vector<Word> words = all_reduced_words(a.presentation, max_word_len);
    auto inverses = generator_inverses(a);
    Subtree u;
    u.vertex_in.assign(static_cast<size_t>(a.tree.vertex_count), 0);
    bool any_hyperbolic = false;
    for (const Word& w : words) {
        if (w.empty()) continue;
        TreeIsometry iso = word_isometry_cached(a, w, inverses);
        bool defined = false;
        for (const auto& img : iso.vertex_image)
            if (img) defined = true;
        if (!defined) continue;  // the window composed away
        DisplacementResult r = translation_length(a.tree, iso);
        if (r.length > 1e-9) {
            any_hyperbolic = true;
            merge_into(u, a.tree, r.characteristic);
        }
    }
    if (!any_hyperbolic) throw EllipticActionError("no sampled word acts hyperbolically");
    canonicalize_subtree(a.tree, u);

    // Connect components with bridging arcs.
    std::vector<Subtree> parts = subtree_components(a.tree, u);
    while (parts.size() > 1) {
        auto pa = subtree_anchor_points(a.tree, parts[0]);
        double best = kInf;
        size_t best_part = 1;
        TreePoint from{}, to{};
        for (size_t k = 1; k < parts.size(); ++k) {
            for (const TreePoint& x : pa)
                for (const TreePoint& y : subtree_anchor_points(a.tree, parts[k])) {
                    double d = tree_distance(a.tree, x, y);
                    if (d < best) {
                        best = d;
                        best_part = k;
                        from = x;
                        to = y;
                    }
                }
        }
        for (const ArcSegment& seg : arc_segments(a.tree, from, to))
            add_span(u, seg.edge, std::min(seg.from, seg.to), std::max(seg.from, seg.to));
        merge_into(u, a.tree, parts[best_part]);
        canonicalize_subtree(a.tree, u);
        parts = subtree_components(a.tree, u);
    }

    if (!subtree_invariant(a, u)) throw Error("axis union is not generator-invariant");

    // Minimality spot check: drop finite leaf spans whose removal keeps the
    // set invariant and connected.
    bool pruned = true;
    while (pruned) {
        pruned = false;
        for (const auto& [e, span] : u.spans) {
            const TreeEdge& ed = a.tree.edges[static_cast<size_t>(e)];
            if (ed.infinite() && std::isinf(span.second)) continue;
            // a leaf span: its far endpoint supports no other covered direction
            Subtree trial = u;
            trial.spans.erase(e);
            int far_vertex = -1;
            if (!ed.infinite() && span.second == ed.length) far_vertex = ed.b;
            if (span.first == 0.0 && far_vertex < 0) far_vertex = ed.a;
            if (far_vertex >= 0) {
                bool other = false;
                for (const auto& [e2, span2] : u.spans) {
                    if (e2 == e) continue;
                    const TreeEdge& ed2 = a.tree.edges[static_cast<size_t>(e2)];
                    if ((ed2.a == far_vertex && span2.first == 0.0) ||
                        (!ed2.infinite() && ed2.b == far_vertex && span2.second == ed2.length))
                        other = true;
                }
                if (!other) trial.vertex_in[static_cast<size_t>(far_vertex)] = 0;
            }
            canonicalize_subtree(a.tree, trial);
            if (trial.empty() || !subtree_connected(a.tree, trial)) continue;
            if (subtree_invariant(a, trial)) {
                u = trial;
                pruned = true;
                break;
            }
        }
    }
    return u;
}

ActionClass classify_semisimple(const TreeAction& a, int max_word_len) {
    Subtree core = minimal_subtree(a, max_word_len);  // EllipticActionError propagates
    if (subtree_is_line(a.tree, core) && subtree_invariant(a, core)) return ActionClass::LineAction;
    if (fixed_ends(a).empty()) return ActionClass::NoFixedEnd;
    return ActionClass::FixesEndNotLine;
}

}  // namespace treelimit
