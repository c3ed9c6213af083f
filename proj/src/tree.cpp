#include "treelimit/tree.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <numeric>

#include "treelimit/errors.hpp"

namespace treelimit {

std::vector<std::vector<int>> SimplicialTree::incidence() const {
    std::vector<std::vector<int>> inc(static_cast<size_t>(vertex_count));
    for (size_t e = 0; e < edges.size(); ++e) {
        inc[static_cast<size_t>(edges[e].a)].push_back(static_cast<int>(e));
        if (!edges[e].infinite()) inc[static_cast<size_t>(edges[e].b)].push_back(static_cast<int>(e));
    }
    return inc;
}

void validate_tree(const SimplicialTree& t) {
    if (t.vertex_count < 1) throw ConfigError("tree needs at least one vertex", "tree.vertices");
    std::vector<int> parent(static_cast<size_t>(t.vertex_count));
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) {
        return parent[static_cast<size_t>(x)] == x ? x : parent[static_cast<size_t>(x)] = find(parent[static_cast<size_t>(x)]);
    };
    int finite_edges = 0;
    for (const TreeEdge& e : t.edges) {
        if (e.a < 0 || e.a >= t.vertex_count) throw ConfigError("edge endpoint out of range", "tree.edges");
        if (e.infinite()) {
            if (!std::isinf(e.length)) throw ConfigError("ray-edge must have infinite length", "tree.edges");
            continue;
        }
        if (e.b < 0 || e.b >= t.vertex_count) throw ConfigError("edge endpoint out of range", "tree.edges");
        if (!(e.length > 0.0) || std::isinf(e.length)) throw ConfigError("finite edge needs positive finite length", "tree.edges");
        if (find(e.a) == find(e.b)) throw ConfigError("finite edges contain a cycle", "tree.edges");
        parent[static_cast<size_t>(find(e.a))] = find(e.b);
        ++finite_edges;
    }
    if (finite_edges != t.vertex_count - 1) throw ConfigError("finite part must be connected", "tree.edges");
}

TreePoint make_point(const SimplicialTree& t, int edge, double offset) {
    const TreeEdge& e = t.edges[static_cast<size_t>(edge)];
    if (offset <= 0.0) return TreePoint::of_vertex(e.a);
    if (!e.infinite() && offset >= e.length) return TreePoint::of_vertex(e.b);
    return {-1, edge, offset};
}

bool same_point(const SimplicialTree& t, const TreePoint& p, const TreePoint& q, double tol) {
    if (p.at_vertex() && q.at_vertex()) return p.vertex == q.vertex;
    return tree_distance(t, p, q) <= tol;
}

namespace {

// BFS over the finite skeleton; parent edge per vertex.
std::vector<std::pair<int, int>> bfs_parents(const SimplicialTree& t, int root) {
    std::vector<std::pair<int, int>> par(static_cast<size_t>(t.vertex_count), {-2, -1});  // (parent vertex, via edge)
    auto inc = t.incidence();
    std::deque<int> queue{root};
    par[static_cast<size_t>(root)] = {-1, -1};
    while (!queue.empty()) {
        int v = queue.front();
        queue.pop_front();
        for (int ei : inc[static_cast<size_t>(v)]) {
            const TreeEdge& e = t.edges[static_cast<size_t>(ei)];
            if (e.infinite()) continue;
            int w = e.a == v ? e.b : e.a;
            if (par[static_cast<size_t>(w)].first != -2) continue;
            par[static_cast<size_t>(w)] = {v, ei};
            queue.push_back(w);
        }
    }
    return par;
}

}  // namespace

std::vector<int> vertex_path(const SimplicialTree& t, int u, int v) {
    auto par = bfs_parents(t, u);
    std::vector<int> rev;
    int cur = v;
    while (cur != -1) {
        rev.push_back(cur);
        cur = par[static_cast<size_t>(cur)].first;
    }
    std::reverse(rev.begin(), rev.end());
    return rev;  // starts at u
}

double vertex_distance(const SimplicialTree& t, int u, int v) {
    auto par = bfs_parents(t, u);
    double d = 0.0;
    int cur = v;
    while (par[static_cast<size_t>(cur)].first >= 0) {
        d += t.edges[static_cast<size_t>(par[static_cast<size_t>(cur)].second)].length;
        cur = par[static_cast<size_t>(cur)].first;
    }
    return d;
}

namespace {

// Exits of a point: (vertex, cost to reach it) pairs.
std::vector<std::pair<int, double>> point_exits(const SimplicialTree& t, const TreePoint& p) {
    if (p.at_vertex()) return {{p.vertex, 0.0}};
    const TreeEdge& e = t.edges[static_cast<size_t>(p.edge)];
    if (e.infinite()) return {{e.a, p.offset}};
    return {{e.a, p.offset}, {e.b, e.length - p.offset}};
}

}  // namespace

double tree_distance(const SimplicialTree& t, const TreePoint& p, const TreePoint& q) {
    if (!p.at_vertex() && !q.at_vertex() && p.edge == q.edge) return std::abs(p.offset - q.offset);
    double best = kInf;
    for (auto [pu, pc] : point_exits(t, p))
        for (auto [qu, qc] : point_exits(t, q)) best = std::min(best, pc + vertex_distance(t, pu, qu) + qc);
    return best;
}

std::vector<ArcSegment> arc_segments(const SimplicialTree& t, const TreePoint& p, const TreePoint& q) {
    std::vector<ArcSegment> out;
    if (!p.at_vertex() && !q.at_vertex() && p.edge == q.edge) {
        if (p.offset != q.offset) out.push_back({p.edge, p.offset, q.offset});
        return out;
    }
    // Pick the exit pair realizing the distance, then stitch the pieces.
    double best = kInf;
    int bp = -1, bq = -1;
    for (auto [pu, pc] : point_exits(t, p))
        for (auto [qu, qc] : point_exits(t, q)) {
            double d = pc + vertex_distance(t, pu, qu) + qc;
            if (d < best) {
                best = d;
                bp = pu;
                bq = qu;
            }
        }
    if (!p.at_vertex()) {
        const TreeEdge& e = t.edges[static_cast<size_t>(p.edge)];
        double target = (bp == e.a) ? 0.0 : e.length;
        out.push_back({p.edge, p.offset, target});
    }
    std::vector<int> path = vertex_path(t, bp, bq);
    auto inc = t.incidence();
    for (size_t i = 0; i + 1 < path.size(); ++i) {
        int u = path[i], v = path[i + 1];
        for (int ei : inc[static_cast<size_t>(u)]) {
            const TreeEdge& e = t.edges[static_cast<size_t>(ei)];
            if (e.infinite()) continue;
            if ((e.a == u && e.b == v) || (e.a == v && e.b == u)) {
                out.push_back(e.a == u ? ArcSegment{ei, 0.0, e.length} : ArcSegment{ei, e.length, 0.0});
                break;
            }
        }
    }
    if (!q.at_vertex()) {
        const TreeEdge& e = t.edges[static_cast<size_t>(q.edge)];
        double source = (bq == e.a) ? 0.0 : e.length;
        out.push_back({q.edge, source, q.offset});
    }
    // Trim backtracking when p and q hang off the same side of a shared edge:
    // consecutive segments on one edge that reverse direction collapse.
    for (size_t i = 0; i + 1 < out.size();) {
        ArcSegment& s1 = out[i];
        ArcSegment& s2 = out[i + 1];
        if (s1.edge == s2.edge && s1.to == s2.from) {
            double lo1 = std::min(s1.from, s1.to), hi1 = std::max(s1.from, s1.to);
            double lo2 = std::min(s2.from, s2.to), hi2 = std::max(s2.from, s2.to);
            double lo = std::max(lo1, lo2), hi = std::min(hi1, hi2);
            if (lo <= hi) {  // overlap: replace by the direct run
                ArcSegment merged{s1.edge, s1.from, s2.to};
                out[i] = merged;
                out.erase(out.begin() + static_cast<long>(i) + 1);
                if (merged.from == merged.to) out.erase(out.begin() + static_cast<long>(i));
                continue;
            }
        }
        ++i;
    }
    return out;
}

TreePoint point_along(const SimplicialTree& t, const TreePoint& p, const TreePoint& q, double s) {
    if (s <= 0.0) return p;
    auto segs = arc_segments(t, p, q);
    double walked = 0.0;
    for (const ArcSegment& seg : segs) {
        double len = seg.length();
        if (walked + len >= s - 1e-15) {
            double frac = len > 0.0 ? (s - walked) / len : 0.0;
            frac = std::clamp(frac, 0.0, 1.0);
            return make_point(t, seg.edge, seg.from + (seg.to - seg.from) * frac);
        }
        walked += len;
    }
    return q;
}

TreePoint walk_toward_end(const SimplicialTree& t, const TreePoint& p, int ray_edge, double s) {
    const TreeEdge& ray = t.edges[static_cast<size_t>(ray_edge)];
    if (!p.at_vertex() && p.edge == ray_edge) return make_point(t, ray_edge, p.offset + s);
    TreePoint base = TreePoint::of_vertex(ray.a);
    double to_base = tree_distance(t, p, base);
    if (s <= to_base) return point_along(t, p, base, s);
    return make_point(t, ray_edge, s - to_base);
}

bool Subtree::empty() const {
    for (char c : vertex_in)
        if (c) return false;
    return spans.empty();
}

Subtree whole_tree(const SimplicialTree& t) {
    Subtree s;
    s.vertex_in.assign(static_cast<size_t>(t.vertex_count), 1);
    for (size_t e = 0; e < t.edges.size(); ++e)
        s.spans[static_cast<int>(e)] = {0.0, t.edges[e].infinite() ? kInf : t.edges[e].length};
    return s;
}

Subtree single_point_subtree(const SimplicialTree& t, const TreePoint& p) {
    Subtree s;
    s.vertex_in.assign(static_cast<size_t>(t.vertex_count), 0);
    if (p.at_vertex())
        s.vertex_in[static_cast<size_t>(p.vertex)] = 1;
    else
        s.spans[p.edge] = {p.offset, p.offset};
    return s;
}

void canonicalize_subtree(const SimplicialTree& t, Subtree& s) {
    if (s.vertex_in.size() != static_cast<size_t>(t.vertex_count))
        s.vertex_in.resize(static_cast<size_t>(t.vertex_count), 0);
    for (auto it = s.spans.begin(); it != s.spans.end();) {
        const TreeEdge& e = t.edges[static_cast<size_t>(it->first)];
        auto& [lo, hi] = it->second;
        double snap = e.infinite() ? 1e-12 : 1e-12 * (1.0 + e.length);
        if (lo < snap) lo = 0.0;
        if (!e.infinite() && hi > e.length - snap) hi = e.length;
        lo = std::max(lo, 0.0);
        if (!e.infinite()) hi = std::min(hi, e.length);
        if (lo > hi) {
            it = s.spans.erase(it);
            continue;
        }
        if (lo == 0.0) s.vertex_in[static_cast<size_t>(e.a)] = 1;
        if (!e.infinite() && hi == e.length) s.vertex_in[static_cast<size_t>(e.b)] = 1;
        if (lo == 0.0 && hi == 0.0) {
            it = s.spans.erase(it);  // degenerate span at the a-endpoint
            continue;
        }
        if (!e.infinite() && lo == e.length && hi == e.length) {
            it = s.spans.erase(it);
            continue;
        }
        ++it;
    }
}

bool subtree_contains(const SimplicialTree& t, const Subtree& s, const TreePoint& p, double tol) {
    if (p.at_vertex()) {
        if (s.vertex_in[static_cast<size_t>(p.vertex)]) return true;
        // a vertex can also be covered by a span reaching its endpoint
        for (const auto& [e, span] : s.spans) {
            const TreeEdge& ed = t.edges[static_cast<size_t>(e)];
            if (ed.a == p.vertex && span.first <= tol) return true;
            if (!ed.infinite() && ed.b == p.vertex && span.second >= ed.length - tol) return true;
        }
        return false;
    }
    auto it = s.spans.find(p.edge);
    if (it != s.spans.end() && p.offset >= it->second.first - tol && p.offset <= it->second.second + tol) return true;
    const TreeEdge& ed = t.edges[static_cast<size_t>(p.edge)];
    if (p.offset <= tol && s.vertex_in[static_cast<size_t>(ed.a)]) return true;
    if (!ed.infinite() && p.offset >= ed.length - tol && s.vertex_in[static_cast<size_t>(ed.b)]) return true;
    return false;
}

bool subtree_connected(const SimplicialTree& t, const Subtree& s) {
    // Union-find over covered vertices and spans; a span joins the vertices
    // it touches; spans on one edge must overlap to join each other (a
    // canonical subtree has at most one span per edge).
    int n = t.vertex_count;
    int total = n + static_cast<int>(s.spans.size());
    std::vector<int> parent(static_cast<size_t>(total));
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) {
        return parent[static_cast<size_t>(x)] == x ? x : parent[static_cast<size_t>(x)] = find(parent[static_cast<size_t>(x)]);
    };
    auto unite = [&](int x, int y) { parent[static_cast<size_t>(find(x))] = find(y); };
    int idx = n;
    for (const auto& [e, span] : s.spans) {
        const TreeEdge& ed = t.edges[static_cast<size_t>(e)];
        if (span.first == 0.0 && s.vertex_in[static_cast<size_t>(ed.a)]) unite(idx, ed.a);
        if (!ed.infinite() && span.second == ed.length && s.vertex_in[static_cast<size_t>(ed.b)]) unite(idx, ed.b);
        ++idx;
    }
    int root = -1, pieces = 0;
    for (int v = 0; v < n; ++v)
        if (s.vertex_in[static_cast<size_t>(v)]) {
            if (root < 0) root = find(v);
            if (find(v) != root) ++pieces;
        }
    idx = n;
    for (const auto& sp : s.spans) {
        (void)sp;
        if (root < 0) root = find(idx);
        if (find(idx) != root) ++pieces;
        ++idx;
    }
    return pieces == 0;
}

Subtree intersect_subtrees(const SimplicialTree& t, const Subtree& x, const Subtree& y) {
    Subtree out;
    out.vertex_in.assign(static_cast<size_t>(t.vertex_count), 0);
    for (int v = 0; v < t.vertex_count; ++v)
        out.vertex_in[static_cast<size_t>(v)] = x.vertex_in[static_cast<size_t>(v)] && y.vertex_in[static_cast<size_t>(v)];
    for (const auto& [e, sx] : x.spans) {
        auto it = y.spans.find(e);
        if (it == y.spans.end()) continue;
        double lo = std::max(sx.first, it->second.first);
        double hi = std::min(sx.second, it->second.second);
        if (lo <= hi) out.spans[e] = {lo, hi};
    }
    // A degenerate meeting at an endpoint vertex is already covered by
    // vertex_in; spans keep interior overlaps only.
    canonicalize_subtree(t, out);
    return out;
}

bool subtree_contains_arc(const SimplicialTree& t, const Subtree& s, const TreePoint& p, const TreePoint& q,
                          double tol) {
    if (!subtree_contains(t, s, p, tol) || !subtree_contains(t, s, q, tol)) return false;
    for (const ArcSegment& seg : arc_segments(t, p, q)) {
        double lo = std::min(seg.from, seg.to), hi = std::max(seg.from, seg.to);
        if (hi - lo <= tol) continue;
        auto it = s.spans.find(seg.edge);
        if (it == s.spans.end()) return false;
        if (lo < it->second.first - tol || hi > it->second.second + tol) return false;
    }
    return true;
}

TreePoint project_to_subtree(const SimplicialTree& t, const TreePoint& p, const Subtree& sub) {
    if (sub.empty()) throw InvalidSubtreeError("projection target is empty");
    if (!subtree_connected(t, sub)) throw InvalidSubtreeError("projection target is disconnected");
    if (subtree_contains(t, sub, p, 1e-12)) return p;

    double best = kInf;
    TreePoint arg = p;
    auto consider = [&](const TreePoint& q) {
        double d = tree_distance(t, p, q);
        if (d < best) {
            best = d;
            arg = q;
        }
    };
    for (int v = 0; v < t.vertex_count; ++v)
        if (sub.vertex_in[static_cast<size_t>(v)]) consider(TreePoint::of_vertex(v));
    for (const auto& [e, span] : sub.spans) {
        const TreeEdge& ed = t.edges[static_cast<size_t>(e)];
        if (!p.at_vertex() && p.edge == e) {
            consider(make_point(t, e, std::clamp(p.offset, span.first, span.second)));
            continue;
        }
        // Entry through either endpoint: nearest covered offset on this edge.
        consider(make_point(t, e, span.first));
        if (!ed.infinite() && !std::isinf(span.second)) consider(make_point(t, e, span.second));
    }
    return arg;
}

}  // namespace treelimit
