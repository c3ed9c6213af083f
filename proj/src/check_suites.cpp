#include "treelimit/check_suites.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <vector>

#include "treelimit/degeneration.hpp"
#include "treelimit/errors.hpp"
#include "treelimit/oracles.hpp"
#include "treelimit/representation.hpp"
#include "treelimit/tree_isometry.hpp"
#include "treelimit/twisted_graph.hpp"

namespace treelimit {

namespace {

struct CheckResult {
    bool ok = true;
    std::string detail;
};

using CheckFn = std::function<CheckResult()>;

struct Check {
    std::string name;
    CheckFn fn;
};

CheckResult fail(const std::string& detail) { return {false, detail}; }
CheckResult pass() { return {}; }

Sl2c random_sl2(std::mt19937_64& rng, double scale = 0.8) {
    std::normal_distribution<double> g(0.0, scale);
    Complex a(1.0 + g(rng), g(rng)), b(g(rng), g(rng)), c(g(rng), g(rng));
    if (std::abs(a) < 0.1) a += Complex(0.5, 0.0);
    Complex d = (Complex(1.0, 0.0) + b * c) / a;
    return {a, b, c, d};
}

Vec4 random_point_h3(std::mt19937_64& rng, double radius = 3.0) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_real_distribution<double> uni(0.0, radius);
    double x = g(rng), y = g(rng), z = g(rng);
    double n = std::sqrt(x * x + y * y + z * z);
    if (n < 1e-12) n = 1.0;
    double r = uni(rng);
    return exp_map(origin_point(), Vec4{{0.0, x / n * r, y / n * r, z / n * r}});
}

// --- constructed tree instances -------------------------------------------

SimplicialTree line_tree() {
    SimplicialTree t;
    t.vertex_count = 1;
    t.edges.push_back({0, -1, kInf});  // e0: left end
    t.edges.push_back({0, -1, kInf});  // e1: right end
    return t;
}

TreeIsometry line_translation(const SimplicialTree& t, double c) {
    TreeIsometry g;
    g.vertex_image.resize(1);
    g.vertex_image[0] = c >= 0.0 ? make_point(t, 1, c) : make_point(t, 0, -c);
    g.ray_target = {0, 1};
    return g;
}

// Reflection about the point at signed coordinate p (positive on edge 1).
TreeIsometry line_reflection(const SimplicialTree& t, double p) {
    TreeIsometry g;
    g.vertex_image.resize(1);
    g.vertex_image[0] = p >= 0.0 ? make_point(t, 1, 2.0 * p) : make_point(t, 0, -2.0 * p);
    g.ray_target = {1, 0};
    return g;
}

}  // namespace

namespace {

// --- hyperbolic suite ------------------------------------------------------

std::vector<Check> hyperbolic_checks(bool inject_fault) {
    std::vector<Check> checks;
    checks.push_back({"triangle-inequality", []() {
        std::mt19937_64 rng(101);
        for (int i = 0; i < 1000; ++i) {
            Vec4 p = random_point_h3(rng), q = random_point_h3(rng), r = random_point_h3(rng);
            if (hyperbolic_distance(p, r) > hyperbolic_distance(p, q) + hyperbolic_distance(q, r) + 1e-9)
                return fail("violated at seed 101 iteration " + std::to_string(i));
        }
        return pass();
    }});
    checks.push_back({"isometry-invariance", []() {
        std::mt19937_64 rng(102);
        for (int i = 0; i < 300; ++i) {
            Lorentz L = to_lorentz(random_sl2(rng));
            Vec4 p = random_point_h3(rng), q = random_point_h3(rng);
            double before = hyperbolic_distance(p, q);
            double after = hyperbolic_distance(L.apply(p), L.apply(q));
            if (std::abs(before - after) > 1e-9) return fail("distance distorted, seed 102 iter " + std::to_string(i));
        }
        return pass();
    }});
    checks.push_back({"lorentz-homomorphism", []() {
        std::mt19937_64 rng(103);
        for (int i = 0; i < 300; ++i) {
            Sl2c a = random_sl2(rng), b = random_sl2(rng);
            Lorentz lhs = to_lorentz(a * b);
            Lorentz rhs = to_lorentz(a) * to_lorentz(b);
            for (int r = 0; r < 4; ++r)
                for (int c = 0; c < 4; ++c)
                    if (std::abs(lhs.m[r][c] - rhs.m[r][c]) > 1e-9)
                        return fail("entry mismatch, seed 103 iter " + std::to_string(i));
        }
        return pass();
    }});
    checks.push_back({"length-class-function", []() {
        std::mt19937_64 rng(104);
        for (int i = 0; i < 300; ++i) {
            Sl2c a = random_sl2(rng), b = random_sl2(rng);
            double l1 = translation_length(a);
            double l2 = translation_length((b * a * b.inverse()).normalized());
            if (std::abs(l1 - l2) > 1e-9) return fail("conjugation changed length, seed 104 iter " + std::to_string(i));
        }
        return pass();
    }});
    checks.push_back({"trace-length-bound", [inject_fault]() {
        std::mt19937_64 rng(105);
        std::uniform_real_distribution<double> tr(1.0, 40.0);
        std::normal_distribution<double> g(0.0, 1.0);
        double bound = inject_fault ? 1e-3 : 2.0 + 1e-9;
        for (int i = 0; i < 1000; ++i) {
            double T = tr(rng);
            Complex w(g(rng), g(rng)), b(g(rng) + 2.0, g(rng));
            Complex a = T / 2.0 + w, d = T / 2.0 - w;
            Complex c = (a * d - Complex(1.0, 0.0)) / b;
            Sl2c m{a, b, c, d};
            double l = translation_length(m);
            if (std::abs(l - 2.0 * std::log(T)) > bound)
                return fail("bound violated, seed 105 iter " + std::to_string(i));
        }
        return pass();
    }});
    checks.push_back({"two-model-distance", []() {
        std::mt19937_64 rng(106);
        for (int i = 0; i < 500; ++i) {
            Vec4 p = random_point_h3(rng), q = random_point_h3(rng);
            double d1 = hyperbolic_distance(p, q);
            double d2 = oracles::half_space_distance(p, q);
            if (std::abs(d1 - d2) > 1e-9) return fail("models disagree, seed 106 iter " + std::to_string(i));
        }
        return pass();
    }});
    checks.push_back({"exp-log-inverse", []() {
        std::mt19937_64 rng(107);
        for (int i = 0; i < 500; ++i) {
            Vec4 p = random_point_h3(rng), q = random_point_h3(rng);
            Vec4 v = log_map(p, q);
            double n = std::sqrt(std::max(minkowski(v, v), 0.0));
            if (std::abs(n - hyperbolic_distance(p, q)) > 1e-10) return fail("log norm off, iter " + std::to_string(i));
            Vec4 back = exp_map(p, v);
            if (hyperbolic_distance(back, q) > 1e-9) return fail("exp(log) misses, iter " + std::to_string(i));
        }
        return pass();
    }});
    checks.push_back({"thin-triangle-examples", []() {
        Vec4 a = origin_point();
        Vec4 b = geodesic_point(a, exp_map(a, Vec4{{0.0, 1.0, 0.0, 0.0}}), 2.0);
        Vec4 c = geodesic_point(a, b, 1.0);  // collinear
        if (thin_triangle_sample(a, b, c, 1) > 1e-9) return fail("degenerate triangle not thin");
        double side = 0.01;
        Vec4 e1 = exp_map(a, Vec4{{0.0, side, 0.0, 0.0}});
        Vec4 e2 = exp_map(a, Vec4{{0.0, 0.0, side, 0.0}});
        if (thin_triangle_sample(a, e1, e2, 2) >= side) return fail("small triangle contribution too large");
        return pass();
    }});
    return checks;
}

// --- tree-ops suite ---------------------------------------------------------

std::vector<Check> tree_ops_checks() {
    std::vector<Check> checks;
    checks.push_back({"projection-distance-decreasing", []() {
        std::mt19937_64 rng(201);
        for (int i = 0; i < 1000; ++i) {
            SimplicialTree t = oracles::random_finite_tree(rng, 6, 0.2, 2.0);
            Subtree sub = oracles::span_subtree(
                t, {oracles::random_tree_point(rng, t), oracles::random_tree_point(rng, t),
                    oracles::random_tree_point(rng, t)});
            TreePoint p = oracles::random_tree_point(rng, t), q = oracles::random_tree_point(rng, t);
            TreePoint pp = project_to_subtree(t, p, sub);
            TreePoint pq = project_to_subtree(t, q, sub);
            if (tree_distance(t, pp, pq) > tree_distance(t, p, q) + 1e-12)
                return fail("projection expanded a pair, seed 201 iter " + std::to_string(i));
        }
        return pass();
    }});
    checks.push_back({"projection-equivariance", []() {
        std::mt19937_64 rng(202);
        SimplicialTree t = line_tree();
        for (int i = 0; i < 200; ++i) {
            std::uniform_real_distribution<double> uni(-3.0, 3.0);
            TreeIsometry g = line_reflection(t, uni(rng));
            DisplacementResult fix = translation_length(t, g);
            TreePoint p = oracles::random_tree_point(rng, t, 5.0);
            auto gp = apply(t, g, p);
            TreePoint lhs = project_to_subtree(t, *gp, fix.characteristic);
            auto rhs = apply(t, g, project_to_subtree(t, p, fix.characteristic));
            if (!same_point(t, lhs, *rhs, 1e-12)) return fail("pi(gp) != g pi(p), seed 202 iter " + std::to_string(i));
        }
        return pass();
    }});
    checks.push_back({"shift-equivariance", []() {
        std::mt19937_64 rng(203);
        SimplicialTree t = line_tree();
        std::uniform_real_distribution<double> uni(0.1, 3.0);
        for (int i = 0; i < 200; ++i) {
            TreeIsometry g = line_translation(t, uni(rng));
            End e{1};
            double eps = uni(rng);
            TreePoint p = oracles::random_tree_point(rng, t, 5.0);
            auto gp = apply(t, g, p);
            TreePoint lhs = shift_toward_end(t, *gp, e, eps);
            auto rhs = apply(t, g, shift_toward_end(t, p, e, eps));
            if (!same_point(t, lhs, *rhs, 1e-12)) return fail("shift not equivariant, iter " + std::to_string(i));
        }
        return pass();
    }});
    checks.push_back({"shift-distance-decreasing", []() {
        // tripod: center 0, leaves 1 (arm 1.0), 2 (arm 2.0), one infinite arm
        SimplicialTree t;
        t.vertex_count = 3;
        t.edges.push_back({0, 1, 1.0});
        t.edges.push_back({0, 2, 2.0});
        t.edges.push_back({0, -1, kInf});
        End e{2};
        auto d_after = [&](double dx, double dy, double eps) {
            TreePoint x = make_point(t, 0, 1.0 - (1.0 - dx));  // distance dx from center on arm 1
            x = make_point(t, 0, dx);
            TreePoint y = make_point(t, 1, dy);
            (void)x;
            TreePoint fx = shift_toward_end(t, make_point(t, 0, dx), e, eps);
            TreePoint fy = shift_toward_end(t, y, e, eps);
            return tree_distance(t, fx, fy);
        };
        // both far: d decreases by 2 eps
        if (std::abs(d_after(0.9, 1.8, 0.5) - (0.9 + 1.8 - 1.0)) > 1e-12) return fail("case 1 value wrong");
        // both close: |difference|
        if (std::abs(d_after(0.2, 0.3, 0.5) - 0.1) > 1e-12) return fail("case 2 value wrong");
        // mixed: d(y,p) - d(x,p)
        if (std::abs(d_after(0.3, 1.0, 0.5) - 0.7) > 1e-12) return fail("case 3 value wrong");
        // common ray: distance preserved
        TreePoint x = make_point(t, 2, 0.5), y = make_point(t, 2, 2.0);
        if (std::abs(tree_distance(t, shift_toward_end(t, x, e, 0.7), shift_toward_end(t, y, e, 0.7)) -
                     tree_distance(t, x, y)) > 1e-12)
            return fail("subray case not a shift");
        return pass();
    }});
    checks.push_back({"displacement-identity", []() {
        std::mt19937_64 rng(204);
        SimplicialTree t = line_tree();
        std::uniform_real_distribution<double> uni(-3.0, 3.0);
        for (int i = 0; i < 300; ++i) {
            TreeIsometry g = (i % 2 == 0) ? line_translation(t, std::abs(uni(rng)) + 0.1)
                                          : line_reflection(t, uni(rng));
            DisplacementResult r = translation_length(t, g);
            TreePoint x = oracles::random_tree_point(rng, t, 6.0);
            auto gx = apply(t, g, x);
            double lhs = tree_distance(t, x, *gx);
            double rhs = r.length + 2.0 * tree_distance(t, x, project_to_subtree(t, x, r.characteristic));
            if (std::abs(lhs - rhs) > 1e-12) return fail("identity off, seed 204 iter " + std::to_string(i));
        }
        return pass();
    }});
    checks.push_back({"serre-lemma", []() {
        std::mt19937_64 rng(205);
        SimplicialTree t = line_tree();
        std::uniform_real_distribution<double> uni(-3.0, 3.0);
        for (int i = 0; i < 200; ++i) {
            double p = uni(rng), q = uni(rng);
            if (std::abs(p - q) < 0.05) continue;
            TreeIsometry g = line_reflection(t, p), h = line_reflection(t, q);
            TreeIsometry gh = compose(t, g, h);
            double l = translation_length(t, gh).length;
            if (std::abs(l - 2.0 * std::abs(p - q)) > 1e-12)
                return fail("l(gh) != 2 d(Fix g, Fix h), iter " + std::to_string(i));
        }
        return pass();
    }});
    checks.push_back({"fixed-point-criterion", []() {
        Presentation pres;
        pres.generators = {"a", "b"};
        std::mt19937_64 rng(206);
        std::uniform_real_distribution<double> uni(0.3, 2.0);
        for (int i = 0; i < 100; ++i) {
            SimplicialTree t = line_tree();
            TreeAction act;
            act.tree = t;
            act.presentation = pres;
            bool expect_fixed;
            if (i % 3 == 0) {
                double p = uni(rng);
                act.generators = {line_reflection(t, p), line_reflection(t, p)};
                expect_fixed = true;
            } else if (i % 3 == 1) {
                act.generators = {line_reflection(t, uni(rng)), line_reflection(t, -uni(rng))};
                expect_fixed = false;
            } else {
                act.generators = {line_translation(t, uni(rng)), TreeIsometry::identity(t)};
                expect_fixed = false;
            }
            std::vector<double> lengths = length_function(act, word_list(pres, 4));
            bool all_zero = true;
            for (double l : lengths)
                if (l > 1e-12) all_zero = false;
            bool has_fixed = global_fixed_point(act).has_value();
            if (all_zero != has_fixed) return fail("criterion mismatch, seed 206 iter " + std::to_string(i));
            if (expect_fixed != has_fixed) return fail("unexpected fixed set, iter " + std::to_string(i));
        }
        return pass();
    }});
    checks.push_back({"minimal-subtree-line", []() {
        SimplicialTree t = line_tree();
        Presentation pres;
        pres.generators = {"a", "b"};
        TreeAction act{t, pres, {line_translation(t, 1.0), line_translation(t, 0.5)}};
        Subtree core = minimal_subtree(act);
        if (!subtree_is_line(t, core)) return fail("translation core should be the line");
        if (classify_semisimple(act) != ActionClass::LineAction) return fail("classification should be line action");
        return pass();
    }});
    return checks;
}

// --- lengths suite ----------------------------------------------------------

std::vector<Check> lengths_checks() {
    std::vector<Check> checks;
    checks.push_back({"word-list-f2", []() {
        Presentation f2;
        f2.generators = {"a", "b"};
        std::vector<Word> ws = word_list(f2, 2);
        std::vector<std::string> expect = {"a", "b", "aa", "ab", "aB", "bb"};
        if (ws.size() != expect.size()) return fail("size mismatch");
        for (size_t i = 0; i < ws.size(); ++i)
            if (word_to_string(f2, ws[i]) != expect[i]) return fail("entry mismatch at " + std::to_string(i));
        return pass();
    }});
    checks.push_back({"evaluate-homomorphism", []() {
        std::mt19937_64 rng(301);
        Representation rep = family_at(diag_stretch_family(), 0.7);
        std::uniform_int_distribution<int> pick(0, 1);
        for (int i = 0; i < 200; ++i) {
            std::vector<Letter> l1, l2;
            for (int k = 0; k < 3; ++k) l1.push_back({pick(rng), pick(rng) ? 1 : -1});
            for (int k = 0; k < 3; ++k) l2.push_back({pick(rng), pick(rng) ? 1 : -1});
            Word w1 = reduce(l1), w2 = reduce(l2);
            Sl2c lhs = evaluate(rep, concat(w1, w2));
            Sl2c rhs = (evaluate(rep, w1) * evaluate(rep, w2)).normalized();
            double scale = std::max({std::abs(lhs.a), std::abs(lhs.b), std::abs(lhs.c), std::abs(lhs.d), 1.0});
            if (entry_distance(lhs, rhs) > 1e-10 * scale)
                return fail("product mismatch, seed 301 iter " + std::to_string(i));
        }
        return pass();
    }});
    checks.push_back({"length-inversion-conjugation", []() {
        std::mt19937_64 rng(302);
        Representation rep = family_at(diag_stretch_family(), 1.3);
        std::uniform_int_distribution<int> pick(0, 1);
        auto random_word = [&](int len) {
            std::vector<Letter> ls;
            for (int k = 0; k < len; ++k) ls.push_back({pick(rng), pick(rng) ? 1 : -1});
            return reduce(ls);
        };
        for (int i = 0; i < 200; ++i) {
            Word w = random_word(4), v = random_word(3);
            double lw = length_function(rep, {w})[0];
            if (std::abs(lw - length_function(rep, {inverse(w)})[0]) > 1e-10)
                return fail("inversion changed length, iter " + std::to_string(i));
            Word conj = concat(concat(v, w), inverse(v));
            if (std::abs(lw - length_function(rep, {conj})[0]) > 1e-9)
                return fail("conjugation changed length, iter " + std::to_string(i));
        }
        return pass();
    }});
    checks.push_back({"diag-stretch-lengths", []() {
        for (double t : {0.25, 1.0, 2.5, 4.0}) {
            Representation rep = family_at(diag_stretch_family(), t);
            Word a{{{0, 1}}};
            if (std::abs(length_function(rep, {a})[0] - 2.0 * t) > 1e-9) return fail("l(a) != 2t");
            if (!is_irreducible(rep)) return fail("family member reducible");
        }
        return pass();
    }});
    checks.push_back({"displacement-oracle", []() {
        Representation rep = family_at(diag_stretch_family(), 3.0);
        Word ab{{{0, 1}, {1, 1}}};
        double eig = length_function(rep, {ab})[0];
        double oracle = oracles::min_displacement(evaluate(rep, ab));
        if (std::abs(eig - oracle) > 1e-6) return fail("eigenvalue route disagrees with displacement minimization");
        return pass();
    }});
    checks.push_back({"octagon-relator", []() {
        for (double t : {1.0, 2.5}) {
            Representation rep = family_at(fuchsian_octagon_family(), t);
            Sl2c r = evaluate(rep, rep.presentation.relators[0]);
            if (distance_to_unit(r) > 1e-8) return fail("relator fails at t=" + std::to_string(t));
            if (!is_irreducible(rep)) return fail("octagon rep reducible at t=" + std::to_string(t));
        }
        return pass();
    }});
    checks.push_back({"projective-compare", []() {
        std::vector<double> l1{1.0, 1.0, 2.0};
        std::vector<double> l2{7.0, 7.0, 14.0};
        if (projective_compare(l1, l2) > 1e-15) return fail("scaling should be projectively zero");
        std::vector<double> l3{1.0, 1.0, 1.9};
        double d = projective_compare(l1, l3);
        if (std::abs(d - (1.0 / 1.9 - 0.5)) > 1e-12) return fail("hand-normalized value mismatch");
        try {
            projective_compare(l1, {0.0, 0.0, 0.0});
            return fail("zero vector accepted");
        } catch (const DegenerateLengthError&) {
        }
        return pass();
    }});
    checks.push_back({"sandwich-short-run", []() {
        double delta_thin = estimate_thin_constant(1500, 2026).delta_thin;
        RepresentationFamily fam = diag_stretch_family();
        TwistedGraph rose;
        rose.vertex_count = 1;
        rose.edges.push_back({0, 0, 1.0, Word{{{0, 1}}}});
        rose.edges.push_back({0, 0, 1.0, Word{{{1, 1}}}});
        DegenerationParams params;
        params.schedule = {2.0, 3.0};
        params.tol = 1e-8;
        params.max_iter = 20000;
        DegenerationRun run = run_degeneration(fam, rose, params);
        for (const DegenerationStep& s : run.steps) {
            for (size_t i = 0; i < run.length_words.size(); ++i) {
                double lr = s.rep_lengths[i];
                double md = s.min_displacement[i];
                if (lr > md + 1e-9) return fail("lower sandwich bound fails");
                if (md > lr + 2.0 * delta_thin * 1.1) return fail("upper sandwich bound fails");
            }
        }
        return pass();
    }});
    return checks;
}

int run_checks(const std::vector<Check>& checks) {
    int failures = 0;
    for (const Check& c : checks) {
        CheckResult r;
        try {
            r = c.fn();
        } catch (const std::exception& e) {
            r = fail(std::string("exception: ") + e.what());
        }
        if (r.ok) {
            std::printf("[ok]   %s\n", c.name.c_str());
        } else {
            std::printf("[FAIL] %s: %s\n", c.name.c_str(), r.detail.c_str());
            ++failures;
        }
    }
    return failures;
}

}  // namespace

int run_check_suite(const std::string& name, bool inject_fault) {
    std::vector<Check> checks;
    if (name == "hyperbolic" || name == "all") {
        auto h = hyperbolic_checks(inject_fault);
        checks.insert(checks.end(), h.begin(), h.end());
    }
    if (name == "tree-ops" || name == "all") {
        auto t = tree_ops_checks();
        checks.insert(checks.end(), t.begin(), t.end());
    }
    if (name == "lengths" || name == "all") {
        auto l = lengths_checks();
        checks.insert(checks.end(), l.begin(), l.end());
    }
    if (checks.empty()) {
        std::fprintf(stderr, "unknown suite: %s (expected tree-ops, hyperbolic, lengths, all)\n", name.c_str());
        return 3;
    }
    int failures = run_checks(checks);
    if (failures > 0) {
        std::printf("%d check(s) failed\n", failures);
        return 1;
    }
    std::printf("all %zu checks passed\n", checks.size());
    return 0;
}

}  // namespace treelimit
