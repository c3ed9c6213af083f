#include "treelimit/representation.hpp"

#include <array>
#include <cmath>
#include <random>

#include "treelimit/errors.hpp"
#include "treelimit/hyperboloid.hpp"

namespace treelimit {

void validate_representation(const Representation& rep, double relator_tol) {
    validate_presentation(rep.presentation);
    if (rep.images.size() != static_cast<size_t>(rep.presentation.rank()))
        throw ConfigError("one matrix per generator required", "representation.images");
    for (const Sl2c& m : rep.images)
        if (det_error(m) > 1e-10) throw ConfigError("generator image determinant is not 1", "representation.images");
    for (const Word& r : rep.presentation.relators) {
        Sl2c value = evaluate(rep, r);
        if (distance_to_unit(value) > relator_tol)
            throw ConfigError("relator does not evaluate to +-identity", "representation.relators");
    }
}

Sl2c evaluate(const Representation& rep, const Word& w) {
    Sl2c m = Sl2c::identity();
    for (const Letter& l : w.letters) {
        if (l.gen < 0 || l.gen >= static_cast<int>(rep.images.size()))
            throw MalformedWordError("word letter indexes a missing generator");
        const Sl2c& g = rep.images[static_cast<size_t>(l.gen)];
        m = m * (l.exp > 0 ? g : g.inverse());
    }
    // Renormalize the determinant drift only while the determinant itself is
    // computable well below the drift scale; at larger entries the adjusted
    // matrix would be worse than the raw product.
    double scale = std::max(std::max(std::abs(m.a), std::abs(m.b)), std::max(std::abs(m.c), std::abs(m.d)));
    if (scale < 100.0) return m.normalized();
    return m;
}

namespace {

using Dir = std::array<Complex, 2>;

double dir_norm(const Dir& v) { return std::sqrt(std::norm(v[0]) + std::norm(v[1])); }

bool near_central(const Sl2c& m) { return distance_to_unit(m) < 1e-9; }

// Eigendirections via the quadratic formula; one direction for parabolic.
std::vector<Dir> eigendirections(const Sl2c& m) {
    Complex tr = m.trace();
    Complex disc = std::sqrt(tr * tr - Complex(4.0, 0.0));
    std::vector<Dir> out;
    for (Complex lambda : {0.5 * (tr + disc), 0.5 * (tr - disc)}) {
        Dir v1{m.b, lambda - m.a};
        Dir v2{lambda - m.d, m.c};
        Dir v = dir_norm(v1) >= dir_norm(v2) ? v1 : v2;
        double n = dir_norm(v);
        if (n < 1e-14) continue;
        v[0] /= n;
        v[1] /= n;
        bool dup = false;
        for (const Dir& u : out) {
            Complex cross = u[0] * v[1] - u[1] * v[0];
            if (std::abs(cross) < 1e-9) dup = true;
        }
        if (!dup) out.push_back(v);
    }
    return out;
}

bool is_eigendirection(const Sl2c& m, const Dir& v) {
    Dir w{m.a * v[0] + m.b * v[1], m.c * v[0] + m.d * v[1]};
    Complex cross = w[0] * v[1] - w[1] * v[0];
    return std::abs(cross) <= 1e-8 * (1.0 + dir_norm(w));
}

}  // namespace

bool is_irreducible(const Representation& rep, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> pick_gen(0, rep.presentation.rank() - 1);
    std::uniform_int_distribution<int> pick_exp(0, 1);
    auto random_word = [&]() {
        std::vector<Letter> ls;
        for (int i = 0; i < 4; ++i) ls.push_back({pick_gen(rng), pick_exp(rng) ? 1 : -1});
        return reduce(std::move(ls));
    };
    std::vector<Sl2c> probes = rep.images;
    probes.push_back(evaluate(rep, random_word()));
    probes.push_back(evaluate(rep, random_word()));

    const Sl2c* pivot = nullptr;
    for (const Sl2c& m : probes)
        if (!near_central(m)) {
            pivot = &m;
            break;
        }
    if (pivot == nullptr) return false;  // everything central: reducible

    for (const Dir& v : eigendirections(*pivot)) {
        bool common = true;
        for (const Sl2c& m : probes)
            if (!near_central(m) && !is_eigendirection(m, v)) {
                common = false;
                break;
            }
        if (common) return false;
    }
    return true;
}

std::vector<double> length_function(const Representation& rep, const std::vector<Word>& words) {
    std::vector<double> out;
    out.reserve(words.size());
    for (const Word& w : words) out.push_back(translation_length(evaluate(rep, w)));
    return out;
}

// ---------------------------------------------------------------------------
// Built-in families
// ---------------------------------------------------------------------------

namespace {

Presentation free_two() {
    Presentation p;
    p.generators = {"a", "b"};
    return p;
}

Sl2c diag_stretch(double t) {
    return {Complex(std::exp(t), 0.0), {}, {}, Complex(std::exp(-t), 0.0)};
}

// Matrix rotation by pi/4; acts on H^3 as the rotation by pi/2 about the
// axis through the origin point.
Sl2c quarter_turn() {
    double c = std::cos(M_PI / 4.0), s = std::sin(M_PI / 4.0);
    return {Complex(c, 0.0), Complex(-s, 0.0), Complex(s, 0.0), Complex(c, 0.0)};
}

// --- Octagon construction in the Poincare disk (SU(1,1) matrices) ---------

Complex mobius_apply(const Sl2c& m, Complex z) { return (m.a * z + m.b) / (m.c * z + m.d); }

Sl2c disk_rotation(double theta) {
    return {std::polar(1.0, theta / 2.0), {}, {}, std::polar(1.0, -theta / 2.0)};
}

Sl2c disk_translation(double d) {
    double ch = std::cosh(d / 2.0), sh = std::sinh(d / 2.0);
    return {Complex(ch, 0.0), Complex(sh, 0.0), Complex(sh, 0.0), Complex(ch, 0.0)};
}

// Direction angle at m of the geodesic toward w (conformal coordinates).
double direction_angle(Complex m, Complex w) {
    return std::arg((w - m) / (1.0 - std::conj(m) * w));
}

// Isometry carrying the origin frame (point 0, direction angle 0) to the
// frame (p, direction angle psi).
Sl2c frame(Complex p, double psi) {
    double rho = std::abs(p);
    double phi = std::arg(p);
    double r = 2.0 * std::atanh(rho);
    return disk_rotation(phi) * disk_translation(r) * disk_rotation(psi - phi);
}

Complex disk_midpoint(Complex z, Complex w) {
    Sl2c to_origin = frame(z, 0.0).inverse();
    Complex w2 = mobius_apply(to_origin, w);
    double d = 2.0 * std::atanh(std::abs(w2));
    Complex m2 = std::polar(std::tanh(d / 4.0), std::arg(w2));
    return mobius_apply(frame(z, 0.0), m2);
}

double interior_angle(Complex v, Complex prev, Complex next) {
    double a1 = direction_angle(v, prev);
    double a2 = direction_angle(v, next);
    double diff = std::fmod(std::abs(a1 - a2), 2.0 * M_PI);
    return std::min(diff, 2.0 * M_PI - diff);
}

std::array<Complex, 8> octagon_vertices(double r1, double r2) {
    std::array<Complex, 8> v;
    for (int k = 0; k < 8; ++k) {
        double r = (k % 2 == 0) ? r1 : r2;
        double theta = (2.0 * k + 1.0) * M_PI / 8.0;
        v[static_cast<size_t>(k)] = std::polar(std::tanh(r / 2.0), theta);
    }
    return v;
}

double octagon_angle_sum(double r1, double r2) {
    auto v = octagon_vertices(r1, r2);
    double sum = 0.0;
    for (int k = 0; k < 8; ++k)
        sum += interior_angle(v[static_cast<size_t>(k)], v[static_cast<size_t>((k + 7) % 8)],
                              v[static_cast<size_t>((k + 1) % 8)]);
    return sum;
}

// Isometry carrying the directed segment (V_j -> V_{j+1}) onto the reversed
// directed segment (V_{i+1} -> V_i): glues side j to side i arrow-to-arrow,
// mapping the octagon interior across side i.
Sl2c side_pairing(const std::array<Complex, 8>& v, int i, int j) {
    Complex src_a = v[static_cast<size_t>(j)], src_b = v[static_cast<size_t>((j + 1) % 8)];
    Complex tgt_a = v[static_cast<size_t>((i + 1) % 8)], tgt_b = v[static_cast<size_t>(i)];
    Complex m_src = disk_midpoint(src_a, src_b);
    Complex m_tgt = disk_midpoint(tgt_a, tgt_b);
    Sl2c f_src = frame(m_src, direction_angle(m_src, src_b));
    Sl2c f_tgt = frame(m_tgt, direction_angle(m_tgt, tgt_b));
    return (f_tgt * f_src.inverse()).normalized();
}

Representation octagon_representation(double t) {
    const double r_reg = std::acosh(std::pow(1.0 + std::sqrt(2.0), 2.0));
    double r1 = r_reg * t;

    // Alternating-radius octagon: solve for r2 so the angle sum is 2*pi.
    double lo = 1e-9, hi = r1 + 10.0;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (octagon_angle_sum(r1, mid) > 2.0 * M_PI)
            lo = mid;
        else
            hi = mid;
    }
    double r2 = 0.5 * (lo + hi);
    auto v = octagon_vertices(r1, r2);

    // Boundary word a1 b1 a1^-1 b1^-1 a2 b2 a2^-1 b2^-1 on sides 0..7. The
    // deck transformations realizing it are the a-side gluings together with
    // the inverses of the b-side gluings.
    Representation rep;
    rep.presentation.generators = {"a1", "b1", "a2", "b2"};
    rep.presentation.relators = {Word{{{0, 1}, {1, 1}, {0, -1}, {1, -1}, {2, 1}, {3, 1}, {2, -1}, {3, -1}}}};
    rep.images = {side_pairing(v, 0, 2), side_pairing(v, 1, 3).inverse(),
                  side_pairing(v, 4, 6), side_pairing(v, 5, 7).inverse()};
    validate_representation(rep);
    return rep;
}

}  // namespace

RepresentationFamily diag_stretch_family() {
    RepresentationFamily fam;
    fam.kind = FamilyKind::DiagStretch;
    fam.presentation = free_two();
    fam.t_min = 0.0;  // exclusive
    fam.t_max = 1e300;
    return fam;
}

RepresentationFamily fuchsian_octagon_family() {
    RepresentationFamily fam;
    fam.kind = FamilyKind::FuchsianOctagon;
    Presentation p;
    p.generators = {"a1", "b1", "a2", "b2"};
    p.relators = {Word{{{0, 1}, {1, 1}, {0, -1}, {1, -1}, {2, 1}, {3, 1}, {2, -1}, {3, -1}}}};
    fam.presentation = p;
    fam.t_min = 1.0;
    fam.t_max = 3.5;
    return fam;
}

RepresentationFamily custom_family(Presentation pres, std::vector<Sl2c> images) {
    RepresentationFamily fam;
    fam.kind = FamilyKind::Custom;
    fam.presentation = std::move(pres);
    fam.t_min = -1e300;
    fam.t_max = 1e300;
    fam.custom_images = std::move(images);
    Representation rep{fam.presentation, fam.custom_images};
    validate_representation(rep);
    return fam;
}

Representation family_at(const RepresentationFamily& fam, double t) {
    switch (fam.kind) {
        case FamilyKind::DiagStretch: {
            if (!(t > 0.0)) throw RangeError("diag-stretch family needs t > 0");
            Sl2c stretch = diag_stretch(t);
            Sl2c rot = quarter_turn();
            Representation rep;
            rep.presentation = fam.presentation;
            rep.images = {stretch, (rot * stretch * rot.inverse()).normalized()};
            return rep;
        }
        case FamilyKind::FuchsianOctagon: {
            if (!(t >= fam.t_min && t <= fam.t_max))
                throw RangeError("fuchsian-octagon family needs t in [1, 3.5]");
            return octagon_representation(t);
        }
        case FamilyKind::Custom: {
            Representation rep;
            rep.presentation = fam.presentation;
            rep.images = fam.custom_images;
            return rep;
        }
    }
    throw RangeError("unknown family kind");
}

}  // namespace treelimit
