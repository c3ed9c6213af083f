#pragma once

// Independent cross-check routes used by the property suites and tests.
// Everything here deliberately avoids the primary implementation paths it
// checks: distances through the upper half-space model, lengths through
// displacement minimization, tree metrics through breadth-first path sums.

#include <cmath>
#include <random>

#include "treelimit/hyperboloid.hpp"
#include "treelimit/tree.hpp"

namespace treelimit::oracles {

// Hyperboloid -> upper half-space via the Hermitian form
// [[x0+x3, x1+i x2], [x1-i x2, x0-x3]] = (1/h) [[|z|^2+h^2, z], [conj z, 1]].
struct HalfSpacePoint {
    Complex z;
    double h;
};

inline HalfSpacePoint to_half_space(const Vec4& x) {
    double c = x[0] - x[3];
    Complex b(x[1], x[2]);
    return {b / c, 1.0 / c};
}

inline double half_space_distance(const Vec4& p, const Vec4& q) {
    HalfSpacePoint a = to_half_space(p), b = to_half_space(q);
    double num = std::norm(a.z - b.z) + (a.h - b.h) * (a.h - b.h);
    return std::acosh(1.0 + num / (2.0 * a.h * b.h));
}

// Infimum displacement of the isometry induced by g, found by the midpoint
// iteration x <- midpoint(x, g x); independent of the eigenvalue route. The
// base point is held at the origin and g is conjugated along instead, so the
// frame never outgrows double precision.
inline double min_displacement(const Sl2c& g, int iterations = 400) {
    auto transvection_to = [](const Vec4& x) {
        // Hermitian square root (X + I)/sqrt(tr X + 2): carries the origin to x.
        double s = 1.0 / std::sqrt(2.0 * x[0] + 2.0);
        Complex h01(x[1], x[2]);
        return Sl2c{Complex((x[0] + x[3] + 1.0) * s, 0.0), h01 * s, std::conj(h01) * s,
                    Complex((x[0] - x[3] + 1.0) * s, 0.0)};
    };
    Sl2c m = g;
    double previous = kInf, best = kInf;
    for (int i = 0; i < iterations; ++i) {
        Vec4 gx = normalize_point(to_lorentz(m).apply(origin_point()));
        double d = hyperbolic_distance(origin_point(), gx);
        best = std::min(best, d);
        if (d < 1e-14 || std::abs(d - previous) < 1e-12 * (1.0 + d)) break;
        previous = d;
        Sl2c t = transvection_to(geodesic_point(origin_point(), gx, d / 2.0));
        m = (t.inverse() * m * t).normalized();
    }
    return best;
}

// Path-sum distance over an explicit breadth-first search, no reuse of
// tree_distance internals.
inline double bfs_path_distance(const SimplicialTree& t, const TreePoint& p, const TreePoint& q) {
    if (!p.at_vertex() && !q.at_vertex() && p.edge == q.edge) return std::abs(p.offset - q.offset);
    auto cost_to_vertex = [&](const TreePoint& pt, int v) {
        // Dijkstra-style relaxation over the finite skeleton from pt.
        std::vector<double> dist(static_cast<size_t>(t.vertex_count), kInf);
        std::vector<char> done(static_cast<size_t>(t.vertex_count), 0);
        if (pt.at_vertex())
            dist[static_cast<size_t>(pt.vertex)] = 0.0;
        else {
            const TreeEdge& e = t.edges[static_cast<size_t>(pt.edge)];
            dist[static_cast<size_t>(e.a)] = pt.offset;
            if (!e.infinite()) dist[static_cast<size_t>(e.b)] = e.length - pt.offset;
        }
        for (int round = 0; round < t.vertex_count; ++round) {
            int best = -1;
            for (int u = 0; u < t.vertex_count; ++u)
                if (!done[static_cast<size_t>(u)] && (best < 0 || dist[static_cast<size_t>(u)] < dist[static_cast<size_t>(best)]))
                    best = u;
            if (best < 0 || std::isinf(dist[static_cast<size_t>(best)])) break;
            done[static_cast<size_t>(best)] = 1;
            for (const TreeEdge& e : t.edges) {
                if (e.infinite()) continue;
                if (e.a == best) dist[static_cast<size_t>(e.b)] = std::min(dist[static_cast<size_t>(e.b)], dist[static_cast<size_t>(best)] + e.length);
                if (e.b == best) dist[static_cast<size_t>(e.a)] = std::min(dist[static_cast<size_t>(e.a)], dist[static_cast<size_t>(best)] + e.length);
            }
        }
        return dist[static_cast<size_t>(v)];
    };
    double best = kInf;
    auto exits = [&](const TreePoint& pt) {
        std::vector<int> vs;
        if (pt.at_vertex()) {
            vs.push_back(pt.vertex);
        } else {
            const TreeEdge& e = t.edges[static_cast<size_t>(pt.edge)];
            vs.push_back(e.a);
            if (!e.infinite()) vs.push_back(e.b);
        }
        return vs;
    };
    for (int v : exits(q)) {
        double tail = q.at_vertex() ? 0.0 : (v == t.edges[static_cast<size_t>(q.edge)].a ? q.offset : t.edges[static_cast<size_t>(q.edge)].length - q.offset);
        best = std::min(best, cost_to_vertex(p, v) + tail);
    }
    return best;
}

// Random finite metric tree: leaves hung one at a time off uniformly chosen
// existing vertices.
inline SimplicialTree random_finite_tree(std::mt19937_64& rng, int extra_vertices, double min_len, double max_len) {
    std::uniform_real_distribution<double> len(min_len, max_len);
    SimplicialTree t;
    t.vertex_count = 2;
    t.edges.push_back({0, 1, len(rng)});
    for (int i = 0; i < extra_vertices; ++i) {
        std::uniform_int_distribution<int> pick(0, t.vertex_count - 1);
        int anchor = pick(rng);
        int nv = t.vertex_count++;
        t.edges.push_back({anchor, nv, len(rng)});
    }
    return t;
}

inline TreePoint random_tree_point(std::mt19937_64& rng, const SimplicialTree& t, double ray_span = 3.0) {
    std::uniform_int_distribution<int> pick(0, static_cast<int>(t.edges.size()) - 1);
    int e = pick(rng);
    const TreeEdge& ed = t.edges[static_cast<size_t>(e)];
    std::uniform_real_distribution<double> uni(0.0, ed.infinite() ? ray_span : ed.length);
    return make_point(t, e, uni(rng));
}

// Convex hull of a point set: union of the arcs from the first point.
inline Subtree span_subtree(const SimplicialTree& t, const std::vector<TreePoint>& pts) {
    Subtree s = single_point_subtree(t, pts.at(0));
    canonicalize_subtree(t, s);
    for (size_t i = 1; i < pts.size(); ++i) {
        for (const ArcSegment& seg : arc_segments(t, pts[0], pts[i])) {
            double lo = std::min(seg.from, seg.to), hi = std::max(seg.from, seg.to);
            auto it = s.spans.find(seg.edge);
            if (it == s.spans.end())
                s.spans[seg.edge] = {lo, hi};
            else {
                it->second.first = std::min(it->second.first, lo);
                it->second.second = std::max(it->second.second, hi);
            }
        }
        if (pts[i].at_vertex()) s.vertex_in[static_cast<size_t>(pts[i].vertex)] = 1;
    }
    canonicalize_subtree(t, s);
    return s;
}

}  // namespace treelimit::oracles
