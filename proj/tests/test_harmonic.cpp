#include <doctest.h>

#include <cmath>
#include <random>

#include "treelimit/errors.hpp"
#include "treelimit/oracles.hpp"
#include "treelimit/twisted_graph.hpp"

using namespace treelimit;

namespace {

Presentation f2() {
    Presentation p;
    p.generators = {"a", "b"};
    return p;
}

TwistedGraph rose2() {
    TwistedGraph g;
    g.vertex_count = 1;
    g.edges.push_back({0, 0, 1.0, Word{{{0, 1}}}});
    g.edges.push_back({0, 0, 1.0, Word{{{1, 1}}}});
    return g;
}

Vec4 random_point(std::mt19937_64& rng, double radius = 2.0) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_real_distribution<double> uni(0.0, radius);
    double x = g(rng), y = g(rng), z = g(rng);
    double n = std::max(std::sqrt(x * x + y * y + z * z), 1e-12);
    double r = uni(rng);
    return exp_map(origin_point(), Vec4{{0.0, r * x / n, r * y / n, r * z / n}});
}

// Minkowski-orthonormal tangent basis at p.
std::vector<Vec4> tangent_basis(const Vec4& p) {
    std::vector<Vec4> basis;
    for (int i = 0; i < 4 && basis.size() < 3; ++i) {
        Vec4 e{};
        e[i] = 1.0;
        Vec4 v = e + p * minkowski(e, p);  // project against <p,p> = -1
        for (const Vec4& b : basis) v = v - b * minkowski(v, b);
        double n2 = minkowski(v, v);
        if (n2 < 1e-10) continue;
        basis.push_back(v * (1.0 / std::sqrt(n2)));
    }
    return basis;
}

}  // namespace

TEST_CASE("graph validation") {
    TwistedGraph g = rose2();
    validate_graph(g);
    TwistedGraph disconnected;
    disconnected.vertex_count = 2;
    disconnected.edges.push_back({0, 0, 1.0, Word{}});
    CHECK_THROWS_AS(validate_graph(disconnected), ConfigError);
    TwistedGraph negative = rose2();
    negative.edges[0].weight = -1.0;
    CHECK_THROWS_AS(validate_graph(negative), ConfigError);
}

TEST_CASE("energy of simple configurations") {
    Presentation pres = f2();
    Representation trivial{pres, {Sl2c::identity(), Sl2c::identity()}};

    TwistedGraph path;
    path.vertex_count = 2;
    path.edges.push_back({0, 1, 2.0, Word{}});
    EquivariantMap same;
    same.positions = {origin_point(), origin_point()};
    CHECK(energy(path, trivial, same) == doctest::Approx(0.0));

    // single vertex, one loop: w * d(p, rho(a) p)^2
    TwistedGraph loop;
    loop.vertex_count = 1;
    loop.edges.push_back({0, 0, 1.5, Word{{{0, 1}}}});
    Representation rep = family_at(diag_stretch_family(), 1.0);
    std::mt19937_64 rng(31);
    Vec4 p = random_point(rng);
    EquivariantMap u;
    u.positions = {p};
    double d = hyperbolic_distance(p, to_lorentz(rep.images[0]).apply(p));
    CHECK(energy(loop, rep, u) == doctest::Approx(1.5 * d * d).epsilon(1e-12));

    // rose: hand-composed sum
    TwistedGraph rose = rose2();
    EquivariantMap at_origin;
    at_origin.positions = {origin_point()};
    double da = hyperbolic_distance(origin_point(), to_lorentz(rep.images[0]).apply(origin_point()));
    double db = hyperbolic_distance(origin_point(), to_lorentz(rep.images[1]).apply(origin_point()));
    CHECK(energy(rose, rep, at_origin) == doctest::Approx(da * da + db * db).epsilon(1e-12));
}

TEST_CASE("gradient vanishes at minima and matches finite differences") {
    Presentation pres = f2();
    Representation trivial{pres, {Sl2c::identity(), Sl2c::identity()}};
    TwistedGraph rose = rose2();
    EquivariantMap at_origin;
    at_origin.positions = {origin_point()};
    for (const Vec4& gv : energy_gradient(rose, trivial, at_origin))
        CHECK(std::sqrt(std::max(minkowski(gv, gv), 0.0)) <= 1e-12);

    // elliptic holonomy fixing the origin: the fixed point is the minimizer
    double c = std::cos(0.4), s = std::sin(0.4);
    Representation elliptic{pres, {Sl2c{Complex(c, 0.0), Complex(-s, 0.0), Complex(s, 0.0), Complex(c, 0.0)},
                                   Sl2c::identity()}};
    for (const Vec4& gv : energy_gradient(rose, elliptic, at_origin))
        CHECK(std::sqrt(std::max(minkowski(gv, gv), 0.0)) <= 1e-10);

    // central finite differences on random instances
    std::mt19937_64 rng(32);
    Representation rep = family_at(diag_stretch_family(), 0.8);
    TwistedGraph g;
    g.vertex_count = 2;
    g.edges.push_back({0, 1, 1.3, Word{{{0, 1}}}});
    g.edges.push_back({1, 0, 0.7, Word{{{1, -1}}}});
    g.edges.push_back({0, 0, 0.5, Word{{{1, 1}, {0, 1}}}});
    const double h = 1e-5;
    for (int trial = 0; trial < 20; ++trial) {
        EquivariantMap u;
        u.positions = {random_point(rng), random_point(rng)};
        std::vector<Vec4> grad = energy_gradient(g, rep, u);
        for (size_t v = 0; v < u.positions.size(); ++v) {
            for (const Vec4& dir : tangent_basis(u.positions[v])) {
                EquivariantMap up = u, dn = u;
                up.positions[v] = exp_map(u.positions[v], dir * h);
                dn.positions[v] = exp_map(u.positions[v], dir * (-h));
                double fd = (energy(g, rep, up) - energy(g, rep, dn)) / (2.0 * h);
                double an = minkowski(grad[v], dir);
                CHECK(std::abs(fd - an) <= 1e-5 * (1.0 + std::abs(an)));
            }
        }
    }
}

TEST_CASE("minimize finds loxodromic axes") {
    Presentation one;
    one.generators = {"a"};
    Representation rep{one, {Sl2c{std::exp(1.0), {}, {}, std::exp(-1.0)}}};
    TwistedGraph loop;
    loop.vertex_count = 1;
    loop.edges.push_back({0, 0, 1.0, Word{{{0, 1}}}});

    std::mt19937_64 rng(33);
    EquivariantMap init;
    init.positions = {random_point(rng, 1.5)};
    auto [u, report] = minimize(loop, rep, init, 1e-8, 50000);
    CHECK(report.status == SolveStatus::Converged);
    CHECK(report.gradient_norm <= 1e-8);
    // converged position lies on the axis of diag(e, e^-1): the geodesic
    // with x1 = x2 = 0 under the pinned Hermitian coordinates
    CHECK(std::abs(u.positions[0][1]) <= 1e-6);
    CHECK(std::abs(u.positions[0][2]) <= 1e-6);
    CHECK(report.final_energy == doctest::Approx(4.0).epsilon(1e-8));
    // descent trace is non-increasing
    for (size_t i = 1; i < report.energy_trace.size(); ++i)
        CHECK(report.energy_trace[i] <= report.energy_trace[i - 1] + 1e-12);
}

TEST_CASE("minimize reports escape for parabolic pairs fixing one ideal point") {
    Presentation pres = f2();
    Representation parabolic{pres, {Sl2c{Complex(1.0, 0.0), Complex(1.0, 0.0), {}, Complex(1.0, 0.0)},
                                    Sl2c{Complex(1.0, 0.0), Complex(0.0, 1.0), {}, Complex(1.0, 0.0)}}};
    TwistedGraph rose = rose2();
    auto [u, report] = minimize(rose, parabolic, default_initial_map(rose), 1e-9, 50000);
    CHECK(report.status == SolveStatus::Escaped);
    CHECK(hyperbolic_distance(u.positions[0], origin_point()) > 10.0);
}

TEST_CASE("minimize with the identity representation") {
    Presentation pres = f2();
    Representation trivial{pres, {Sl2c::identity(), Sl2c::identity()}};
    TwistedGraph rose = rose2();
    auto [u, report] = minimize(rose, trivial, default_initial_map(rose), 1e-10, 100);
    CHECK(report.status == SolveStatus::Converged);
    CHECK(report.final_energy == doctest::Approx(0.0));
}

TEST_CASE("energy is gauge invariant") {
    std::mt19937_64 rng(34);
    std::normal_distribution<double> gauss(0.0, 0.5);
    Representation rep = family_at(diag_stretch_family(), 1.2);
    TwistedGraph rose = rose2();
    for (int trial = 0; trial < 30; ++trial) {
        Complex a(1.0 + gauss(rng), gauss(rng)), b(gauss(rng), gauss(rng)), c(gauss(rng), gauss(rng));
        if (std::abs(a) < 0.1) a += 0.5;
        Sl2c conj{a, b, c, (Complex(1.0, 0.0) + b * c) / a};
        Representation conjugated = rep;
        for (Sl2c& m : conjugated.images) m = (conj * m * conj.inverse()).normalized();
        EquivariantMap u;
        u.positions = {random_point(rng)};
        EquivariantMap moved;
        moved.positions = {to_lorentz(conj).apply(u.positions[0])};
        CHECK(std::abs(energy(rose, rep, u) - energy(rose, conjugated, moved)) <= 1e-8);
    }
}

TEST_CASE("pullback metric on orbit samples") {
    Presentation one;
    one.generators = {"a"};
    Representation rep{one, {Sl2c{std::exp(1.0), {}, {}, std::exp(-1.0)}}};
    TwistedGraph loop;
    loop.vertex_count = 1;
    loop.edges.push_back({0, 0, 1.0, Word{{{0, 1}}}});
    EquivariantMap u;
    u.positions = {origin_point()};  // on the axis

    auto single = pullback_metric(loop, rep, u, {Word{}});
    REQUIRE(single.size() == 1);
    CHECK(single[0][0] == 0.0);

    // samples x, a x on the axis realize the translation length
    auto two = pullback_metric(loop, rep, u, {Word{}, Word{{{0, 1}}}});
    CHECK(two[0][1] == doctest::Approx(translation_length(rep.images[0])).epsilon(1e-10));
    CHECK(two[0][1] == two[1][0]);

    Presentation pres = f2();
    Representation trivial{pres, {Sl2c::identity(), Sl2c::identity()}};
    TwistedGraph rose = rose2();
    EquivariantMap at_origin;
    at_origin.positions = {origin_point()};
    for (const auto& row : pullback_metric(rose, trivial, at_origin, all_reduced_words(pres, 2)))
        for (double v : row) CHECK(v == 0.0);
}

TEST_CASE("displacement lower bound") {
    Presentation pres = f2();
    Representation trivial{pres, {Sl2c::identity(), Sl2c::identity()}};
    TwistedGraph rose = rose2();
    CHECK(displacement_lower_bound(rose, trivial) == 0.0);

    for (double t : {1.0, 2.0}) {
        Representation rep = family_at(diag_stretch_family(), t);
        CHECK(displacement_lower_bound(rose, rep) == doctest::Approx(8.0 * t * t).epsilon(1e-9));
    }

    // bound never exceeds an achieved energy
    std::mt19937_64 rng(35);
    std::normal_distribution<double> gauss(0.0, 0.4);
    for (int trial = 0; trial < 25; ++trial) {
        Complex a(1.0 + gauss(rng), gauss(rng)), b(gauss(rng), gauss(rng)), c(gauss(rng), gauss(rng));
        if (std::abs(a) < 0.1) a += 0.5;
        Sl2c m1{a, b, c, (Complex(1.0, 0.0) + b * c) / a};
        Complex a2(1.0 + gauss(rng), gauss(rng)), b2(gauss(rng), gauss(rng)), c2(gauss(rng), gauss(rng));
        if (std::abs(a2) < 0.1) a2 += 0.5;
        Sl2c m2{a2, b2, c2, (Complex(1.0, 0.0) + b2 * c2) / a2};
        Representation rep{pres, {m1, m2}};
        auto [u, report] = minimize(rose2(), rep, default_initial_map(rose2()), 1e-7, 20000);
        CHECK(displacement_lower_bound(rose2(), rep) <= report.final_energy + 1e-6);
    }
}

TEST_CASE("convergent restarts agree on the minimum energy") {
    Representation rep = family_at(diag_stretch_family(), 1.0);
    TwistedGraph rose = rose2();
    std::mt19937_64 rng(36);
    double reference = -1.0;
    for (int trial = 0; trial < 8; ++trial) {
        EquivariantMap init;
        init.positions = {random_point(rng, 2.0)};
        auto [u, report] = minimize(rose, rep, init, 1e-8, 100000);
        REQUIRE(report.status == SolveStatus::Converged);
        if (reference < 0.0)
            reference = report.final_energy;
        else
            CHECK(std::abs(report.final_energy - reference) <= 1e-5 * reference);
    }
}

TEST_CASE("lipschitz ratio stays within the trivial bound") {
    Representation rep = family_at(diag_stretch_family(), 1.5);
    TwistedGraph rose = rose2();
    auto [u, report] = minimize(rose, rep, default_initial_map(rose), 1e-8, 20000);
    double ratio = lipschitz_ratio(rose, rep, u);
    CHECK(ratio > 0.0);
    CHECK(ratio <= 1.0 + 1e-12);  // unit weights: max d^2 <= sum d^2
}
