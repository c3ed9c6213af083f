#include <doctest.h>

#include <cmath>
#include <random>

#include "treelimit/errors.hpp"
#include "treelimit/oracles.hpp"
#include "treelimit/tree_io.hpp"
#include "treelimit/tree_isometry.hpp"

using namespace treelimit;

namespace {

SimplicialTree line_tree() {
    SimplicialTree t;
    t.vertex_count = 1;
    t.edges.push_back({0, -1, kInf});  // e0: left
    t.edges.push_back({0, -1, kInf});  // e1: right
    return t;
}

TreeIsometry line_translation(const SimplicialTree& t, double c) {
    TreeIsometry g;
    g.vertex_image.resize(1);
    g.vertex_image[0] = c >= 0.0 ? make_point(t, 1, c) : make_point(t, 0, -c);
    g.ray_target = {0, 1};
    return g;
}

TreeIsometry line_reflection(const SimplicialTree& t, double p) {
    TreeIsometry g;
    g.vertex_image.resize(1);
    g.vertex_image[0] = p >= 0.0 ? make_point(t, 1, 2.0 * p) : make_point(t, 0, -2.0 * p);
    g.ray_target = {1, 0};
    return g;
}

SimplicialTree tripod(double l1, double l2, double l3) {
    SimplicialTree t;
    t.vertex_count = 4;
    t.edges.push_back({0, 1, l1});
    t.edges.push_back({0, 2, l2});
    t.edges.push_back({0, 3, l3});
    return t;
}

// Equal-armed tripod rotation 1 -> 2 -> 3 -> 1.
TreeIsometry tripod_rotation(const SimplicialTree& t) {
    TreeIsometry g;
    g.vertex_image.resize(4);
    g.vertex_image[0] = TreePoint::of_vertex(0);
    g.vertex_image[1] = TreePoint::of_vertex(2);
    g.vertex_image[2] = TreePoint::of_vertex(3);
    g.vertex_image[3] = TreePoint::of_vertex(1);
    g.ray_target.assign(t.edges.size(), -1);
    return g;
}

Presentation two_gens() {
    Presentation p;
    p.generators = {"a", "b"};
    return p;
}

}  // namespace

TEST_CASE("tree distances") {
    SimplicialTree t = tripod(1.0, 2.0, 3.0);
    TreePoint leaf1 = TreePoint::of_vertex(1), leaf2 = TreePoint::of_vertex(2);
    CHECK(tree_distance(t, leaf1, leaf1) == 0.0);
    CHECK(tree_distance(t, leaf1, leaf2) == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(tree_distance(t, TreePoint::of_vertex(2), TreePoint::of_vertex(3)) == doctest::Approx(5.0));

    std::mt19937_64 rng(41);
    for (int i = 0; i < 300; ++i) {
        SimplicialTree rt = oracles::random_finite_tree(rng, 8, 0.2, 2.0);
        TreePoint p = oracles::random_tree_point(rng, rt), q = oracles::random_tree_point(rng, rt);
        CHECK(std::abs(tree_distance(rt, p, q) - oracles::bfs_path_distance(rt, p, q)) <= 1e-12);
    }
}

TEST_CASE("projection onto subtrees") {
    SimplicialTree t = tripod(1.0, 2.0, 3.0);
    Subtree armA = oracles::span_subtree(t, {TreePoint::of_vertex(0), TreePoint::of_vertex(1)});
    TreePoint inside = make_point(t, 0, 0.5);
    CHECK(same_point(t, project_to_subtree(t, inside, armA), inside));
    // p on arm B projects to the center
    TreePoint onB = make_point(t, 1, 1.2);
    CHECK(same_point(t, project_to_subtree(t, onB, armA), TreePoint::of_vertex(0)));

    Subtree empty;
    empty.vertex_in.assign(static_cast<size_t>(t.vertex_count), 0);
    CHECK_THROWS_AS(project_to_subtree(t, onB, empty), InvalidSubtreeError);
    Subtree split = empty;
    split.vertex_in[1] = 1;
    split.vertex_in[2] = 1;
    CHECK_THROWS_AS(project_to_subtree(t, onB, split), InvalidSubtreeError);

    // dense-sampling minimizer oracle
    std::mt19937_64 rng(42);
    for (int i = 0; i < 100; ++i) {
        SimplicialTree rt = oracles::random_finite_tree(rng, 7, 0.3, 2.0);
        Subtree sub = oracles::span_subtree(
            rt, {oracles::random_tree_point(rng, rt), oracles::random_tree_point(rng, rt),
                 oracles::random_tree_point(rng, rt)});
        TreePoint p = oracles::random_tree_point(rng, rt);
        TreePoint proj = project_to_subtree(rt, p, sub);
        double via_proj = tree_distance(rt, p, proj);
        double brute = kInf;
        for (const auto& [e, span] : sub.spans) {
            double hi = std::isinf(span.second) ? span.first + 5.0 : span.second;
            for (int k = 0; k <= 200; ++k) {
                double off = span.first + (hi - span.first) * k / 200.0;
                brute = std::min(brute, tree_distance(rt, p, make_point(rt, e, off)));
            }
        }
        for (int v = 0; v < rt.vertex_count; ++v)
            if (sub.vertex_in[static_cast<size_t>(v)])
                brute = std::min(brute, tree_distance(rt, p, TreePoint::of_vertex(v)));
        CHECK(via_proj <= brute + 1e-6);
        CHECK(subtree_contains(rt, sub, proj, 1e-9));
    }
}

TEST_CASE("projection is distance decreasing") {
    std::mt19937_64 rng(43);
    for (int i = 0; i < 1000; ++i) {
        SimplicialTree rt = oracles::random_finite_tree(rng, 6, 0.2, 2.0);
        Subtree sub = oracles::span_subtree(
            rt, {oracles::random_tree_point(rng, rt), oracles::random_tree_point(rng, rt),
                 oracles::random_tree_point(rng, rt)});
        TreePoint p = oracles::random_tree_point(rng, rt), q = oracles::random_tree_point(rng, rt);
        double before = tree_distance(rt, p, q);
        double after = tree_distance(rt, project_to_subtree(rt, p, sub), project_to_subtree(rt, q, sub));
        CHECK(after <= before + 1e-12);
    }
}

TEST_CASE("projection is equivariant for invariant subtrees") {
    // mirrored random trees with the swap isometry
    std::mt19937_64 rng(44);
    for (int trial = 0; trial < 50; ++trial) {
        SimplicialTree half = oracles::random_finite_tree(rng, 4, 0.3, 1.5);
        int n = half.vertex_count;
        SimplicialTree t;
        t.vertex_count = 1 + 2 * n;
        std::uniform_real_distribution<double> uni(0.4, 1.3);
        double stem = uni(rng);
        t.edges.push_back({0, 1, stem});
        t.edges.push_back({0, 1 + n, stem});
        for (const TreeEdge& e : half.edges) {
            t.edges.push_back({1 + e.a, 1 + e.b, e.length});
            t.edges.push_back({1 + n + e.a, 1 + n + e.b, e.length});
        }
        TreeIsometry swap;
        swap.vertex_image.resize(static_cast<size_t>(t.vertex_count));
        swap.vertex_image[0] = TreePoint::of_vertex(0);
        for (int v = 0; v < n; ++v) {
            swap.vertex_image[static_cast<size_t>(1 + v)] = TreePoint::of_vertex(1 + n + v);
            swap.vertex_image[static_cast<size_t>(1 + n + v)] = TreePoint::of_vertex(1 + v);
        }
        swap.ray_target.assign(t.edges.size(), -1);
        REQUIRE(isometry_defect(t, swap) <= 1e-12);

        TreePoint x = oracles::random_tree_point(rng, t);
        auto gx = apply(t, swap, x);
        Subtree sub = oracles::span_subtree(t, {x, *gx});  // swap-invariant by construction
        TreePoint p = oracles::random_tree_point(rng, t);
        auto gp = apply(t, swap, p);
        TreePoint lhs = project_to_subtree(t, *gp, sub);
        auto rhs = apply(t, swap, project_to_subtree(t, p, sub));
        CHECK(same_point(t, lhs, *rhs, 1e-12));
    }
}

TEST_CASE("translation lengths and characteristic sets") {
    SimplicialTree line = line_tree();
    TreeIsometry id = TreeIsometry::identity(line);
    DisplacementResult rid = translation_length(line, id);
    CHECK(rid.length == 0.0);
    CHECK(subtree_contains(line, rid.characteristic, make_point(line, 0, 2.5)));
    CHECK(subtree_contains(line, rid.characteristic, make_point(line, 1, 7.0)));

    TreeIsometry shift = line_translation(line, 1.5);
    DisplacementResult rs = translation_length(line, shift);
    CHECK(rs.length == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(subtree_contains(line, rs.characteristic, make_point(line, 0, 3.0)));
    CHECK(subtree_contains(line, rs.characteristic, make_point(line, 1, 3.0)));

    TreeIsometry refl = line_reflection(line, 0.8);
    DisplacementResult rr = translation_length(line, refl);
    CHECK(rr.length == doctest::Approx(0.0));
    CHECK(subtree_contains(line, rr.characteristic, make_point(line, 1, 0.8)));
    CHECK_FALSE(subtree_contains(line, rr.characteristic, make_point(line, 1, 1.0)));

    SimplicialTree tri = tripod(1.0, 1.0, 1.0);
    DisplacementResult rot = translation_length(tri, tripod_rotation(tri));
    CHECK(rot.length == doctest::Approx(0.0));
    CHECK(subtree_contains(tri, rot.characteristic, TreePoint::of_vertex(0)));
    CHECK_FALSE(subtree_contains(tri, rot.characteristic, make_point(tri, 0, 0.5)));

    // displacement identity on random line isometries
    std::mt19937_64 rng(45);
    std::uniform_real_distribution<double> uni(-3.0, 3.0);
    for (int i = 0; i < 300; ++i) {
        TreeIsometry g = (i % 2) ? line_translation(line, std::abs(uni(rng)) + 0.1) : line_reflection(line, uni(rng));
        DisplacementResult r = translation_length(line, g);
        TreePoint x = oracles::random_tree_point(rng, line, 6.0);
        auto gx = apply(line, g, x);
        double lhs = tree_distance(line, x, *gx);
        double rhs = r.length + 2.0 * tree_distance(line, x, project_to_subtree(line, x, r.characteristic));
        CHECK(std::abs(lhs - rhs) <= 1e-12);
    }
}

TEST_CASE("length function over actions") {
    SimplicialTree line = line_tree();
    Presentation pres = two_gens();
    TreeAction trivial{line, pres, {TreeIsometry::identity(line), TreeIsometry::identity(line)}};
    for (double l : length_function(trivial, word_list(pres, 3))) CHECK(l == 0.0);
    auto fixed = global_fixed_point(trivial);
    REQUIRE(fixed.has_value());
    CHECK(subtree_contains(line, *fixed, make_point(line, 1, 4.0)));

    // two elliptics with disjoint fixed sets: Serre's lemma
    double p = -0.7, q = 1.1;
    TreeAction elliptics{line, pres, {line_reflection(line, p), line_reflection(line, q)}};
    Word ab{{{0, 1}, {1, 1}}};
    CHECK(length_function(elliptics, {ab})[0] == doctest::Approx(2.0 * (q - p)).epsilon(1e-12));
    CHECK_FALSE(global_fixed_point(elliptics).has_value());

    // abelian line translations: l(w) = |signed sum|
    TreeAction shifts{line, pres, {line_translation(line, 1.25), line_translation(line, -0.5)}};
    Word w{{{0, 1}, {1, 1}, {0, 1}}};  // a b a
    CHECK(length_function(shifts, {w})[0] == doctest::Approx(2.0 * 1.25 - 0.5).epsilon(1e-12));
    Word cancel{{{0, 1}, {1, 1}, {1, 1}, {0, -1}}};  // a b^2 a^-1: still 2*(-0.5)
    CHECK(length_function(shifts, {cancel})[0] == doctest::Approx(1.0).epsilon(1e-12));

    // tripod rotation + arm swap share only the center
    SimplicialTree tri = tripod(1.0, 1.0, 1.0);
    TreeIsometry swap12;
    swap12.vertex_image = {TreePoint::of_vertex(0), TreePoint::of_vertex(2), TreePoint::of_vertex(1),
                           TreePoint::of_vertex(3)};
    swap12.ray_target.assign(tri.edges.size(), -1);
    TreeAction mixed{tri, pres, {tripod_rotation(tri), swap12}};
    auto center = global_fixed_point(mixed);
    REQUIRE(center.has_value());
    CHECK(subtree_contains(tri, *center, TreePoint::of_vertex(0)));
    CHECK_FALSE(subtree_contains(tri, *center, TreePoint::of_vertex(3)));
}

TEST_CASE("fixed ends") {
    SimplicialTree line = line_tree();
    Presentation one;
    one.generators = {"a"};
    TreeAction shift{line, one, {line_translation(line, 2.0)}};
    CHECK(fixed_ends(shift).size() == 2);
    TreeAction refl{line, one, {line_reflection(line, 0.0)}};
    CHECK(fixed_ends(refl).empty());

    SimplicialTree tri;
    tri.vertex_count = 1;
    tri.edges.push_back({0, -1, kInf});
    tri.edges.push_back({0, -1, kInf});
    tri.edges.push_back({0, -1, kInf});
    TreeIsometry rot;
    rot.vertex_image = {TreePoint::of_vertex(0)};
    rot.ray_target = {1, 2, 0};
    TreeAction rotation{tri, one, {rot}};
    CHECK(fixed_ends(rotation).empty());
}

TEST_CASE("shift toward an end") {
    // tripod with two finite arms and one infinite arm
    SimplicialTree t;
    t.vertex_count = 3;
    t.edges.push_back({0, 1, 1.0});
    t.edges.push_back({0, 2, 2.0});
    t.edges.push_back({0, -1, kInf});
    End e{2};

    TreePoint on_ray = make_point(t, 2, 1.0);
    TreePoint moved = shift_toward_end(t, on_ray, e, 0.75);
    CHECK(tree_distance(t, on_ray, moved) == doctest::Approx(0.75));
    CHECK(moved.edge == 2);

    // x, y both on the ray: the shift preserves their distance exactly
    TreePoint x = make_point(t, 2, 0.4), y = make_point(t, 2, 3.1);
    CHECK(tree_distance(t, shift_toward_end(t, x, e, 0.9), shift_toward_end(t, y, e, 0.9)) ==
          doctest::Approx(tree_distance(t, x, y)).epsilon(1e-15));

    // branch point between x and y, d(x,p) = 0.3 <= eps = 0.5 <= d(y,p) = 1.0
    TreePoint x3 = make_point(t, 0, 0.3);  // 0.3 from the center on arm 1
    TreePoint y3 = make_point(t, 1, 1.0);  // 1.0 from the center on arm 2
    double after = tree_distance(t, shift_toward_end(t, x3, e, 0.5), shift_toward_end(t, y3, e, 0.5));
    CHECK(after == doctest::Approx(0.7).epsilon(1e-15));

    CHECK_THROWS_AS(shift_toward_end(t, x, End{0}, 0.5), RangeError);
    CHECK_THROWS_AS(shift_toward_end(t, x, e, 0.0), RangeError);
}

TEST_CASE("shift is equivariant when the end is fixed") {
    SimplicialTree line = line_tree();
    std::mt19937_64 rng(46);
    std::uniform_real_distribution<double> uni(0.1, 2.5);
    for (int i = 0; i < 200; ++i) {
        TreeIsometry g = line_translation(line, uni(rng));
        End e{1};
        TreePoint p = oracles::random_tree_point(rng, line, 5.0);
        double eps = uni(rng);
        auto gp = apply(line, g, p);
        TreePoint lhs = shift_toward_end(line, *gp, e, eps);
        auto rhs = apply(line, g, shift_toward_end(line, p, e, eps));
        CHECK(same_point(line, lhs, *rhs, 1e-12));
    }
}

TEST_CASE("minimal subtrees") {
    Presentation pres = two_gens();

    SimplicialTree line = line_tree();
    TreeAction shifts{line, pres, {line_translation(line, 1.0), line_translation(line, 0.5)}};
    Subtree core = minimal_subtree(shifts);
    CHECK(subtree_is_line(line, core));
    CHECK(subtree_contains(line, core, make_point(line, 0, 9.0)));

    // all generators elliptic on a finite tripod
    SimplicialTree tri = tripod(1.0, 1.0, 1.0);
    TreeAction rotations{tri, pres, {tripod_rotation(tri), tripod_rotation(tri)}};
    CHECK_THROWS_AS(minimal_subtree(rotations), EllipticActionError);

    // two window hyperbolics with disjoint axes joined by a bridge
    SimplicialTree h;
    h.vertex_count = 2;
    h.edges.push_back({0, 1, 2.0});   // bridge
    h.edges.push_back({0, -1, kInf});  // e1: line 1 west
    h.edges.push_back({0, -1, kInf});  // e2: line 1 east
    h.edges.push_back({1, -1, kInf});  // e3: line 2 west
    h.edges.push_back({1, -1, kInf});  // e4: line 2 east
    TreeIsometry g1;
    g1.vertex_image.resize(2);
    g1.vertex_image[0] = make_point(h, 2, 1.0);
    g1.ray_target = {-1, 1, 2, -1, -1};
    TreeIsometry g2;
    g2.vertex_image.resize(2);
    g2.vertex_image[1] = make_point(h, 4, 1.0);
    g2.ray_target = {-1, -1, -1, 3, 4};
    TreeAction windows{h, pres, {g1, g2}};
    Subtree u = minimal_subtree(windows);
    CHECK(subtree_contains(h, u, make_point(h, 1, 3.0)));  // line 1
    CHECK(subtree_contains(h, u, make_point(h, 4, 3.0)));  // line 2
    CHECK(subtree_contains(h, u, make_point(h, 0, 1.0)));  // bridge
    CHECK(subtree_invariant(windows, u));
    CHECK_FALSE(subtree_is_line(h, u));
}

TEST_CASE("semisimplicity classification") {
    Presentation pres = two_gens();

    SimplicialTree line = line_tree();
    TreeAction translations{line, pres, {line_translation(line, 1.0), line_translation(line, -0.7)}};
    CHECK(classify_semisimple(translations) == ActionClass::LineAction);

    // two hyperbolic windows with crossing axes share no end
    SimplicialTree plus;
    plus.vertex_count = 1;
    plus.edges.push_back({0, -1, kInf});  // E
    plus.edges.push_back({0, -1, kInf});  // W
    plus.edges.push_back({0, -1, kInf});  // N
    plus.edges.push_back({0, -1, kInf});  // S
    TreeIsometry gx;
    gx.vertex_image.resize(1);
    gx.vertex_image[0] = make_point(plus, 0, 1.0);
    gx.ray_target = {0, 1, -1, -1};
    TreeIsometry gy;
    gy.vertex_image.resize(1);
    gy.vertex_image[0] = make_point(plus, 2, 1.0);
    gy.ray_target = {-1, -1, 2, 3};
    TreeAction crossing{plus, pres, {gx, gy}};
    CHECK(classify_semisimple(crossing) == ActionClass::NoFixedEnd);

    // both generators translate into one common end of an infinite tripod
    SimplicialTree tri;
    tri.vertex_count = 1;
    tri.edges.push_back({0, -1, kInf});  // common end
    tri.edges.push_back({0, -1, kInf});
    tri.edges.push_back({0, -1, kInf});
    TreeIsometry s1;
    s1.vertex_image.resize(1);
    s1.vertex_image[0] = make_point(tri, 0, 1.0);
    s1.ray_target = {0, 1, -1};
    TreeIsometry s2;
    s2.vertex_image.resize(1);
    s2.vertex_image[0] = make_point(tri, 0, 2.0);
    s2.ray_target = {0, -1, 2};
    TreeAction toward_end{tri, pres, {s1, s2}};
    CHECK(fixed_ends(toward_end).size() == 1);
    CHECK(classify_semisimple(toward_end) == ActionClass::FixesEndNotLine);
}

TEST_CASE("tree JSON round trip is byte for byte") {
    SimplicialTree line = line_tree();
    SimplicialTree tri = tripod(0.1, 2.0 / 3.0, 1.7);
    for (const SimplicialTree& t : {line, tri}) {
        std::string once = tree_to_json(t).dump(2);
        std::string twice = tree_to_json(tree_from_json(nlohmann::json::parse(once))).dump(2);
        CHECK(once == twice);
    }

    Presentation pres = two_gens();
    TreeAction act{line, pres, {line_translation(line, 0.3), line_reflection(line, 1.0 / 3.0)}};
    std::string once = action_to_json(act).dump(2);
    TreeAction back = action_from_json(nlohmann::json::parse(once));
    CHECK(action_to_json(back).dump(2) == once);
    CHECK(isometry_defect(back.tree, back.generators[0]) <= 1e-12);
    // semantics survive the round trip
    Word ab{{{0, 1}, {1, 1}}};
    CHECK(length_function(back, {ab})[0] == doctest::Approx(length_function(act, {ab})[0]).epsilon(1e-12));
}

TEST_CASE("relator validation on actions") {
    SimplicialTree line = line_tree();
    Presentation pres;
    pres.generators = {"a", "b"};
    pres.relators = {parse_word(pres, "abAB")};  // commuting translations satisfy it
    TreeAction act{line, pres, {line_translation(line, 1.0), line_translation(line, 2.0)}};
    validate_action(act);

    Presentation bad = pres;
    bad.relators = {parse_word(bad, "ab")};
    TreeAction violates{line, bad, {line_translation(line, 1.0), line_translation(line, 2.0)}};
    CHECK_THROWS_AS(validate_action(violates), ConfigError);
}
