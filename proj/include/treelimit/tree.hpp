#pragma once

#include <limits>
#include <map>
#include <vector>

namespace treelimit {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Edge of a simplicial metric tree. b == -1 encodes an infinite ray-edge
// attached at a (offsets measured from a, unbounded above).
struct TreeEdge {
    int a = 0;
    int b = -1;
    double length = kInf;

    bool infinite() const { return b < 0; }
};

// Finite metric tree, optionally with infinite ray-edges; connected and
// acyclic on the finite part, rays attach at a single vertex.
struct SimplicialTree {
    int vertex_count = 0;
    std::vector<TreeEdge> edges;

    std::vector<std::vector<int>> incidence() const;  // vertex -> edge ids
};

void validate_tree(const SimplicialTree& t);

// A point of the tree: either exactly a vertex, or an interior edge point.
struct TreePoint {
    int vertex = -1;
    int edge = -1;
    double offset = 0.0;

    bool at_vertex() const { return vertex >= 0; }
    static TreePoint of_vertex(int v) { return {v, -1, 0.0}; }
};

// Interior offsets at 0 or the full length collapse to the endpoint vertex.
TreePoint make_point(const SimplicialTree& t, int edge, double offset);

bool same_point(const SimplicialTree& t, const TreePoint& p, const TreePoint& q, double tol = 1e-9);

double vertex_distance(const SimplicialTree& t, int u, int v);
std::vector<int> vertex_path(const SimplicialTree& t, int u, int v);  // vertex ids, u..v

double tree_distance(const SimplicialTree& t, const TreePoint& p, const TreePoint& q);

// Arc between two points as a list of directed edge portions.
struct ArcSegment {
    int edge;
    double from;  // offset on edge
    double to;
    double length() const { return from < to ? to - from : from - to; }
};
std::vector<ArcSegment> arc_segments(const SimplicialTree& t, const TreePoint& p, const TreePoint& q);

// Point at distance s from p along the arc toward q (s <= d(p,q)).
TreePoint point_along(const SimplicialTree& t, const TreePoint& p, const TreePoint& q, double s);

// Point at distance s >= 0 from p along the unique ray from p into the end
// carried by the infinite edge `ray_edge`.
TreePoint walk_toward_end(const SimplicialTree& t, const TreePoint& p, int ray_edge, double s);

// Closed connected subset: covered vertices plus closed per-edge spans
// [lo, hi] (hi may be infinite on a ray-edge; lo == hi marks an isolated
// interior point).
struct Subtree {
    std::vector<char> vertex_in;
    std::map<int, std::pair<double, double>> spans;

    bool empty() const;
};

Subtree whole_tree(const SimplicialTree& t);
Subtree single_point_subtree(const SimplicialTree& t, const TreePoint& p);
void canonicalize_subtree(const SimplicialTree& t, Subtree& s);
bool subtree_contains(const SimplicialTree& t, const Subtree& s, const TreePoint& p, double tol = 1e-9);
bool subtree_connected(const SimplicialTree& t, const Subtree& s);
Subtree intersect_subtrees(const SimplicialTree& t, const Subtree& x, const Subtree& y);
bool subtree_contains_arc(const SimplicialTree& t, const Subtree& s, const TreePoint& p, const TreePoint& q,
                          double tol = 1e-9);

// Nearest-point projection onto a closed connected subtree; unique in a tree.
// Throws InvalidSubtreeError for an empty or disconnected subset.
TreePoint project_to_subtree(const SimplicialTree& t, const TreePoint& p, const Subtree& sub);

}  // namespace treelimit
