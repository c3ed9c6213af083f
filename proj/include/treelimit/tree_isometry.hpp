#pragma once

#include <optional>
#include <vector>

#include "treelimit/tree.hpp"
#include "treelimit/words.hpp"

namespace treelimit {

// Isometry of the tree given by vertex images plus, per infinite edge, the
// infinite edge its end maps into. Images may be absent: the map is then a
// partial isometry defined on the window where images exist (degeneration
// runs produce exactly such windows of a larger action). A total map with
// bijective ray targets is an automorphism up to ray shifts.
struct TreeIsometry {
    std::vector<std::optional<TreePoint>> vertex_image;
    std::vector<int> ray_target;  // indexed by edge id; -1 for finite or undefined

    static TreeIsometry identity(const SimplicialTree& t);
};

std::optional<TreePoint> apply(const SimplicialTree& t, const TreeIsometry& g, const TreePoint& p);

TreeIsometry compose(const SimplicialTree& t, const TreeIsometry& g, const TreeIsometry& h);  // g after h
TreeIsometry inverse_isometry(const SimplicialTree& t, const TreeIsometry& g);

// Max |d(gx, gy) - d(x, y)| over defined vertex pairs (0 for a genuine
// isometry; used to validate constructed and deserialized maps).
double isometry_defect(const SimplicialTree& t, const TreeIsometry& g);

struct DisplacementResult {
    double length = 0.0;    // min over the window of d(x, gx)
    Subtree characteristic;  // fixed subtree (length 0) or axis portion
};

// Piecewise-linear displacement minimized exactly: vertex values, plus the
// midpoint zeros of edges carried onto themselves reversed.
DisplacementResult translation_length(const SimplicialTree& t, const TreeIsometry& g);

struct TreeAction {
    SimplicialTree tree;
    Presentation presentation;
    std::vector<TreeIsometry> generators;
};

void validate_action(const TreeAction& a, double tol = 1e-9);

TreeIsometry word_isometry(const TreeAction& a, const Word& w);

std::vector<double> length_function(const TreeAction& a, const std::vector<Word>& words);

// Intersection of the generator fixed subtrees; nullopt when empty or when
// some generator is hyperbolic.
std::optional<Subtree> global_fixed_point(const TreeAction& a);

struct End {
    int edge = -1;  // infinite edge id, outward direction
};

// Ends whose infinite edge is carried to itself by every generator.
std::vector<End> fixed_ends(const TreeAction& a);

// The point at distance eps from p along the unique ray from p in the class
// of the end e.
TreePoint shift_toward_end(const SimplicialTree& t, const TreePoint& p, const End& e, double eps);

// Union of the axes of hyperbolic words of length <= max_word_len together
// with connecting arcs, pruned of leaves whose removal keeps the set
// invariant. Throws EllipticActionError when no sampled word is hyperbolic.
Subtree minimal_subtree(const TreeAction& a, int max_word_len = 4);

enum class ActionClass { LineAction, NoFixedEnd, FixesEndNotLine };

// Semi-simplicity trichotomy: line action, no fixed end, or the remaining
// (non-semi-simple) case of an action fixing an end without being a line.
ActionClass classify_semisimple(const TreeAction& a, int max_word_len = 4);

// No point of the subset has three or more covered directions.
bool subtree_is_line(const SimplicialTree& t, const Subtree& s);

// Images of covered points, where defined, stay inside the subset.
bool subtree_invariant(const TreeAction& a, const Subtree& s, double tol = 1e-9);

}  // namespace treelimit
