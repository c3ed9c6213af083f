#include <doctest.h>

#include <cmath>
#include <random>

#include "treelimit/degeneration.hpp"
#include "treelimit/errors.hpp"
#include "treelimit/oracles.hpp"

using namespace treelimit;

namespace {

TwistedGraph rose2() {
    TwistedGraph g;
    g.vertex_count = 1;
    g.edges.push_back({0, 0, 1.0, Word{{{0, 1}}}});
    g.edges.push_back({0, 0, 1.0, Word{{{1, 1}}}});
    return g;
}

std::vector<std::vector<double>> unit_square_metric() {
    double s = std::sqrt(2.0);
    return {{0, 1, s, 1}, {1, 0, 1, s}, {s, 1, 0, 1}, {1, s, 1, 0}};
}

RescaledMetric wrap(const std::vector<std::vector<double>>& d) {
    RescaledMetric m;
    m.dist = d;
    m.labels.resize(d.size());
    return m;
}

}  // namespace

TEST_CASE("rescaling the pull-back metric") {
    std::vector<std::vector<double>> m = {{0, 2}, {2, 0}};
    std::vector<SampleLabel> labels(2);
    RescaledMetric one = rescale(labels, m, 1.0);
    CHECK(one.dist[0][1] == 2.0);
    RescaledMetric four = rescale(labels, m, 4.0);
    CHECK(four.dist[0][1] == doctest::Approx(1.0));
    CHECK(metric_diameter(four.dist) * std::sqrt(4.0) == doctest::Approx(metric_diameter(m)).epsilon(1e-12));
    CHECK_THROWS_AS(rescale(labels, m, 0.0), InvalidEnergyError);
    CHECK_THROWS_AS(rescale(labels, m, -1.0), InvalidEnergyError);
}

TEST_CASE("four point hyperbolicity constant") {
    // collinear points carry an additive metric
    std::vector<std::vector<double>> line(4, std::vector<double>(4, 0.0));
    double pos[4] = {0.0, 1.0, 2.5, 4.0};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) line[static_cast<size_t>(i)][static_cast<size_t>(j)] = std::abs(pos[i] - pos[j]);
    CHECK(gromov_delta(line).delta == doctest::Approx(0.0));

    // any tree metric passes the four-point condition
    std::mt19937_64 rng(51);
    for (int trial = 0; trial < 30; ++trial) {
        SimplicialTree t = oracles::random_finite_tree(rng, 8, 0.2, 2.0);
        int n = t.vertex_count;
        std::vector<std::vector<double>> m(static_cast<size_t>(n), std::vector<double>(static_cast<size_t>(n)));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                m[static_cast<size_t>(i)][static_cast<size_t>(j)] = vertex_distance(t, i, j);
        CHECK(gromov_delta(m).delta <= 1e-12);
    }

    // unit square: (2 sqrt 2 - 2) / 2
    CHECK(gromov_delta(unit_square_metric()).delta == doctest::Approx(std::sqrt(2.0) - 1.0).epsilon(1e-12));

    // fewer than four points
    CHECK(gromov_delta(std::vector<std::vector<double>>(3, std::vector<double>(3, 0.0))).delta == 0.0);
}

TEST_CASE("tree reconstruction from metrics") {
    // three points with pairwise sums give a tripod with Gromov-product arms
    double a = 0.7, b = 1.3, c = 2.1;
    std::vector<std::vector<double>> tri = {{0, a + b, a + c}, {a + b, 0, b + c}, {a + c, b + c, 0}};
    TreeEmbedding emb = tree_from_metric(wrap(tri), 0.05);
    CHECK(emb.max_error <= 1e-12);
    CHECK(tree_distance(emb.tree, emb.location[0], emb.location[1]) == doctest::Approx(a + b).epsilon(1e-12));
    CHECK(tree_distance(emb.tree, emb.location[0], emb.location[2]) == doctest::Approx(a + c).epsilon(1e-12));

    // random tree metrics round-trip exactly
    std::mt19937_64 rng(52);
    for (int trial = 0; trial < 50; ++trial) {
        SimplicialTree t = oracles::random_finite_tree(rng, 9, 0.1, 2.0);
        int n = t.vertex_count;
        std::vector<std::vector<double>> m(static_cast<size_t>(n), std::vector<double>(static_cast<size_t>(n)));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                m[static_cast<size_t>(i)][static_cast<size_t>(j)] = vertex_distance(t, i, j);
        TreeEmbedding round = tree_from_metric(wrap(m), 0.05);
        CHECK(round.max_error <= 1e-9);
    }

    // coincident samples (pseudometric) collapse to one location
    std::vector<std::vector<double>> dup = {{0, 0, 1}, {0, 0, 1}, {1, 1, 0}};
    TreeEmbedding collapsed = tree_from_metric(wrap(dup), 0.05);
    CHECK(same_point(collapsed.tree, collapsed.location[0], collapsed.location[1]));

    // far from additive: rejected with the offending quadruple
    try {
        tree_from_metric(wrap(unit_square_metric()), 0.05);
        FAIL("expected NotTreeLikeError");
    } catch (const NotTreeLikeError& e) {
        CHECK(e.delta > 0.05 * e.diameter);
        CHECK(e.quadruple[0] >= 0);
    }
}

TEST_CASE("induced action on the reconstructed tree") {
    // single loxodromic loop: orbit samples lie on the axis, the induced
    // generator action is the shift by the rescaled translation length
    Presentation one;
    one.generators = {"a"};
    Representation rep{one, {Sl2c{std::exp(1.0), {}, {}, std::exp(-1.0)}}};
    TwistedGraph loop;
    loop.vertex_count = 1;
    loop.edges.push_back({0, 0, 1.0, Word{{{0, 1}}}});
    EquivariantMap u;
    u.positions = {origin_point()};
    std::vector<Word> samples = all_reduced_words(one, 3);
    auto raw = pullback_metric(loop, rep, u, samples);
    std::vector<SampleLabel> labels = sample_labels(loop, samples);
    double energy_used = 4.0;  // d(p, a p)^2 on the axis
    RescaledMetric metric = rescale(labels, raw, energy_used);
    TreeEmbedding emb = tree_from_metric(metric, 0.05);
    CHECK(emb.max_error <= 1e-9);

    InducedAction act = induced_action(emb, labels, one, 1e-9);
    CHECK(act.distortion[0] <= 1e-12);
    double expected = translation_length(rep.images[0]) / std::sqrt(energy_used);
    CHECK(sample_tree_length(emb, labels, one, Word{{{0, 1}}}) == doctest::Approx(expected).epsilon(1e-9));
    // the partial isometry on the window is exact
    CHECK(isometry_defect(emb.tree, act.action.generators[0]) <= 1e-9);
    CHECK(translation_length(emb.tree, act.action.generators[0]).length == doctest::Approx(expected).epsilon(1e-9));

    // identity generator: samples relabel to coincident points, distortion 0
    Presentation two;
    two.generators = {"a", "b"};
    Representation with_id{two, {rep.images[0], Sl2c::identity()}};
    TwistedGraph rose = rose2();
    std::vector<Word> samples2 = all_reduced_words(two, 2);
    auto raw2 = pullback_metric(rose, with_id, u, samples2);
    RescaledMetric metric2 = rescale(sample_labels(rose, samples2), raw2, 4.0);
    TreeEmbedding emb2 = tree_from_metric(metric2, 0.05);
    InducedAction act2 = induced_action(emb2, metric2.labels, two, 1e-9);
    CHECK(act2.distortion[1] <= 1e-12);
    for (size_t i = 0; i < metric2.labels.size(); ++i) {
        int j = act2.sample_image[1][i];
        if (j >= 0) CHECK(tree_distance(emb2.tree, emb2.location[i], emb2.location[static_cast<size_t>(j)]) <= 1e-12);
    }

    // a corrupted sample map distorts distances and is rejected
    TreeEmbedding fake;
    fake.tree.vertex_count = 3;
    fake.tree.edges.push_back({0, 1, 1.0});
    fake.tree.edges.push_back({1, 2, 4.0});
    fake.location = {TreePoint::of_vertex(0), TreePoint::of_vertex(1), TreePoint::of_vertex(2)};
    std::vector<SampleLabel> fake_labels(3);
    fake_labels[0] = {0, Word{}};
    fake_labels[1] = {0, Word{{{0, 1}}}};
    fake_labels[2] = {0, Word{{{0, 1}, {0, 1}}}};
    CHECK_THROWS_AS(induced_action(fake, fake_labels, one, 1e-9), NonIsometricActionError);
}

TEST_CASE("projective comparison of length vectors") {
    std::vector<double> l{1.0, 1.0, 2.0};
    CHECK(projective_compare(l, {7.0, 7.0, 14.0}) == doctest::Approx(0.0));
    double d = projective_compare(l, {1.0, 1.0, 1.9});
    CHECK(d == doctest::Approx(1.0 / 1.9 - 0.5).epsilon(1e-12));
    CHECK_THROWS_AS(projective_compare(l, {0.0, 0.0, 0.0}), DegenerateLengthError);
    CHECK_THROWS_AS(projective_compare(l, {1.0, 1.0}), RangeError);
}

TEST_CASE("degeneration run over a bounded family stays bounded") {
    Presentation pres;
    pres.generators = {"a", "b"};
    std::vector<Sl2c> images = {Sl2c{std::exp(0.8), {}, {}, std::exp(-0.8)}, Sl2c::identity()};
    // make b loxodromic too so the pair is irreducible enough to be interesting
    double cc = std::cos(M_PI / 4.0), ss = std::sin(M_PI / 4.0);
    Sl2c rot{Complex(cc, 0.0), Complex(-ss, 0.0), Complex(ss, 0.0), Complex(cc, 0.0)};
    images[1] = (rot * images[0] * rot.inverse()).normalized();
    RepresentationFamily constant = custom_family(pres, images);

    DegenerationParams params;
    params.schedule = {1.0, 2.0, 3.0};
    params.tol = 1e-8;
    params.max_iter = 20000;
    params.delta_threshold = 1.0;  // accept whatever shape the metric has
    DegenerationRun run = run_degeneration(constant, rose2(), params);
    REQUIRE(run.steps.size() == 3);
    // bounded traces: the energies along the schedule are all equal
    for (const DegenerationStep& s : run.steps)
        CHECK(s.energy == doctest::Approx(run.steps[0].energy).epsilon(1e-6));
}

TEST_CASE("abelian length vectors are recognized") {
    Presentation f2;
    f2.generators = {"a", "b"};
    std::vector<Word> words = word_list(f2, 2);  // a, b, aa, ab, aB, bb
    // translations by 1 and -0.5 on a line
    std::vector<double> abelian = {1.0, 0.5, 2.0, 0.5, 1.5, 1.0};
    CHECK(abelian_length_vector(f2, words, abelian, 1e-9));
    // free axes: l(ab) and l(aB) both large
    std::vector<double> tree_like = {1.0, 1.0, 2.0, 2.0, 2.0, 2.0};
    CHECK_FALSE(abelian_length_vector(f2, words, tree_like, 1e-3));
}

TEST_CASE("degeneration run along the diverging family") {
    DegenerationParams params;
    params.schedule = {1.0, 2.0, 3.0, 4.0};
    params.tol = 1e-8;
    params.max_iter = 50000;
    DegenerationRun run = run_degeneration(diag_stretch_family(), rose2(), params);
    REQUIRE(run.steps.size() == 4);
    CHECK_FALSE(run.abelian_limit);  // l(ab)/l(a) -> 2 with l(aB)/l(a) -> 2 as well
    for (size_t i = 1; i < run.steps.size(); ++i) CHECK(run.steps[i].energy > run.steps[i - 1].energy);
    // the energies dominate the loop-displacement lower bound 8 t^2
    for (const DegenerationStep& s : run.steps) CHECK(s.energy >= 8.0 * s.t * s.t - 1e-6);
    // sandwich bounds hold at every step and word
    double slack = 2.0 * 0.66;  // generous stand-in for 2 * delta_thin * 1.1
    for (const DegenerationStep& s : run.steps)
        for (size_t i = 0; i < run.length_words.size(); ++i) {
            CHECK(s.rep_lengths[i] <= s.min_displacement[i] + 1e-9);
            CHECK(s.min_displacement[i] <= s.rep_lengths[i] + slack);
        }
    // the final tree acts without fixed points: its length vector is nonzero
    REQUIRE(run.steps.back().tree_built);
    double max_len = 0.0;
    for (double l : run.steps.back().lengths) max_len = std::max(max_len, l);
    CHECK(max_len > 0.1);
    // the Lipschitz ratio is recorded and sits inside its trivial bound
    for (const DegenerationStep& s : run.steps) {
        CHECK(s.lipschitz > 0.0);
        CHECK(s.lipschitz <= 1.0 + 1e-12);
    }
}

TEST_CASE("escaped steps are recorded and the run continues") {
    Presentation pres;
    pres.generators = {"a", "b"};
    std::vector<Sl2c> parabolics = {Sl2c{Complex(1.0, 0.0), Complex(1.0, 0.0), {}, Complex(1.0, 0.0)},
                                    Sl2c{Complex(1.0, 0.0), Complex(0.0, 1.0), {}, Complex(1.0, 0.0)}};
    RepresentationFamily fam = custom_family(pres, parabolics);
    DegenerationParams params;
    params.schedule = {1.0, 2.0};
    params.tol = 1e-9;
    params.max_iter = 50000;
    params.delta_threshold = 10.0;  // keep the final-step gate out of the way
    DegenerationRun run = run_degeneration(fam, rose2(), params);
    REQUIRE(run.steps.size() == 2);
    CHECK(run.steps[0].solve_status == SolveStatus::Escaped);
    CHECK_FALSE(run.steps[0].tree_built);
    CHECK(run.steps[0].lengths.empty());  // recorded with status only
}

TEST_CASE("schedule validation") {
    DegenerationParams params;
    params.schedule = {};
    CHECK_THROWS_AS(run_degeneration(diag_stretch_family(), rose2(), params), ConfigError);
    params.schedule = {2.0, 1.0};
    CHECK_THROWS_AS(run_degeneration(diag_stretch_family(), rose2(), params), ConfigError);
}
