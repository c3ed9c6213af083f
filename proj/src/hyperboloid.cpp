#include "treelimit/hyperboloid.hpp"

#include <cmath>
#include <random>

#include "treelimit/errors.hpp"

namespace treelimit {

Vec4 normalize_point(const Vec4& x) {
    double q = -minkowski(x, x);
    if (q <= 0.0 || x[0] <= 0.0) throw InvalidPointError("vector is not timelike-future");
    double s = 1.0 / std::sqrt(q);
    return x * s;
}

namespace {

// Rescale toward the hyperboloid when the Minkowski square is trustworthy.
// At large frames the square of an on-sheet point is itself unresolvable
// (cancellation of x0^2), and rescaling by it would corrupt components that
// are individually accurate; such points pass through unchanged.
Vec4 soft_normalize(const Vec4& x) {
    if (x[0] <= 0.0) throw InvalidPointError("vector is not timelike-future");
    double q = -minkowski(x, x);
    if (q > 0.25 && q < 4.0) return x * (1.0 / std::sqrt(q));
    if (x[0] > 1e3) return x;  // frame noise dominates the constraint
    throw InvalidPointError("vector is not timelike-future");
}

}  // namespace

bool is_hyperbolic_point(const Vec4& x, double tol) {
    return x[0] > 0.0 && std::abs(minkowski(x, x) + 1.0) <= tol;
}

namespace {

// u - 1 for u = -<p,q>. The direct Gram form is accurate for far pairs (one
// endpoint near the coordinate origin); the difference form
// -<p,q> = 1 + <p-q, p-q>/2 is the cancellation-free route for near pairs.
double gram_excess(const Vec4& p, const Vec4& q) {
    double direct = -minkowski(p, q);
    if (direct > 1.5) return direct - 1.0;
    Vec4 d = p - q;
    return 0.5 * minkowski(d, d);
}

}  // namespace

double hyperbolic_distance(const Vec4& p, const Vec4& q) {
    double x = gram_excess(p, q);
    if (x < -1e-9) throw InvalidPointError("points not on the hyperboloid: <p,q> > -1");
    if (x <= 0.0) return 0.0;
    return std::log1p(x + std::sqrt(x * (x + 2.0)));  // acosh(1 + x), stable near 0
}

Vec4 log_map(const Vec4& p, const Vec4& q) {
    double x = gram_excess(p, q);
    if (x <= 0.0) return Vec4{};
    double d = std::log1p(x + std::sqrt(x * (x + 2.0)));
    Vec4 w = q - p * (1.0 + x);
    double nw = minkowski(w, w);
    if (nw <= 1e-300) return w;  // first-order limit, |w| ~ d already
    return w * (d / std::sqrt(nw));  // |v| = d by construction
}

Vec4 exp_map(const Vec4& p, const Vec4& v) {
    auto euclid = [](const Vec4& x) {
        return std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + x[3] * x[3]);
    };
    double pairing = minkowski(v, p);
    // Reject only gross non-tangency: the computable resolution of <v,p>
    // degrades with the frame size, so rounding drift is projected away
    // rather than policed (the solver validates its steps energetically).
    double ev = euclid(v), ep = euclid(p);
    if (std::abs(pairing) > 1e-6 * (1.0 + ev * ep))
        throw TangencyError("vector is not tangent at base point");
    Vec4 w = v + p * pairing;  // re-project to kill rounding drift
    double n2 = minkowski(w, w);
    double norm = n2 > 0.0 ? std::sqrt(n2) : 0.0;
    if (norm < 1e-14) return soft_normalize(p + w);
    Vec4 r = p * std::cosh(norm) + w * (std::sinh(norm) / norm);
    return soft_normalize(r);
}

Vec4 geodesic_point(const Vec4& a, const Vec4& b, double s) {
    // Direct evaluation a cosh(s) + u sinh(s) with the unit tangent u toward
    // b; avoids re-deriving the arclength from a rounded norm, which would
    // amplify through cosh at large frames.
    double x = gram_excess(a, b);
    if (x <= 0.0) return a;
    double sh = std::sqrt(x * (x + 2.0));
    Vec4 u = (b - a * (1.0 + x)) * (1.0 / sh);
    return soft_normalize(a * std::cosh(s) + u * std::sinh(s));
}

Lorentz Lorentz::identity() {
    Lorentz L;
    for (int i = 0; i < 4; ++i) L.m[i][i] = 1.0;
    return L;
}

Vec4 Lorentz::apply(const Vec4& x) const {
    Vec4 r;
    for (int i = 0; i < 4; ++i) {
        double s = 0.0;
        for (int j = 0; j < 4; ++j) s += m[i][j] * x[j];
        r[i] = s;
    }
    return r;
}

Lorentz Lorentz::operator*(const Lorentz& o) const {
    Lorentz r;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            double s = 0.0;
            for (int k = 0; k < 4; ++k) s += m[i][k] * o.m[k][j];
            r.m[i][j] = s;
        }
    return r;
}

Lorentz Lorentz::inverse() const {
    // eta L^T eta with eta = diag(-1,1,1,1)
    Lorentz r;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            double sign = ((i == 0) != (j == 0)) ? -1.0 : 1.0;
            r.m[i][j] = sign * m[j][i];
        }
    return r;
}

double lorentz_defect(const Lorentz& L) {
    double worst = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            double s = 0.0;
            for (int k = 0; k < 4; ++k) {
                double eta = (k == 0) ? -1.0 : 1.0;
                s += L.m[k][i] * eta * L.m[k][j];
            }
            double target = (i == j) ? ((i == 0) ? -1.0 : 1.0) : 0.0;
            worst = std::max(worst, std::abs(s - target));
        }
    return worst;
}

namespace {

// Hermitian matrix [[h00, h01], [conj(h01), h11]] with h00, h11 real.
struct Hermitian {
    double h00, h11;
    Complex h01;
};

Hermitian basis_hermitian(int i) {
    switch (i) {
        case 0: return {1.0, 1.0, Complex(0.0, 0.0)};
        case 1: return {0.0, 0.0, Complex(1.0, 0.0)};
        case 2: return {0.0, 0.0, Complex(0.0, 1.0)};
        default: return {1.0, -1.0, Complex(0.0, 0.0)};
    }
}

Hermitian conjugate_action(const Sl2c& g, const Hermitian& x) {
    // A X A* for X = [[h00, h01], [h01*, h11]]
    Complex x00(x.h00, 0.0), x11(x.h11, 0.0), x01 = x.h01, x10 = std::conj(x.h01);
    Complex m00 = g.a * x00 + g.b * x10;
    Complex m01 = g.a * x01 + g.b * x11;
    Complex m10 = g.c * x00 + g.d * x10;
    Complex m11 = g.c * x01 + g.d * x11;
    Complex r00 = m00 * std::conj(g.a) + m01 * std::conj(g.b);
    Complex r01 = m00 * std::conj(g.c) + m01 * std::conj(g.d);
    Complex r11 = m10 * std::conj(g.c) + m11 * std::conj(g.d);
    return {r00.real(), r11.real(), r01};
}

}  // namespace

Lorentz to_lorentz(const Sl2c& g) {
    Lorentz L;
    for (int j = 0; j < 4; ++j) {
        Hermitian y = conjugate_action(g, basis_hermitian(j));
        L.m[0][j] = 0.5 * (y.h00 + y.h11);
        L.m[1][j] = y.h01.real();
        L.m[2][j] = y.h01.imag();
        L.m[3][j] = 0.5 * (y.h00 - y.h11);
    }
    return L;
}

double translation_length(const Sl2c& g) {
    // Roots of lambda^2 - tr lambda + 1; the larger-modulus root decides.
    Complex tr = g.trace();
    Complex disc = std::sqrt(tr * tr - Complex(4.0, 0.0));
    Complex l1 = 0.5 * (tr + disc);
    Complex l2 = 0.5 * (tr - disc);
    double mod = std::max(std::abs(l1), std::abs(l2));
    if (mod <= 1.0) return 0.0;
    return 2.0 * std::log(mod);
}

double point_segment_distance(const Vec4& p, const Vec4& a, const Vec4& b) {
    double len = hyperbolic_distance(a, b);
    if (len < 1e-14) return hyperbolic_distance(p, a);
    double lo = 0.0, hi = len;
    for (int it = 0; it < 50; ++it) {
        double m1 = lo + (hi - lo) / 3.0;
        double m2 = hi - (hi - lo) / 3.0;
        if (hyperbolic_distance(p, geodesic_point(a, b, m1)) <= hyperbolic_distance(p, geodesic_point(a, b, m2)))
            hi = m2;
        else
            lo = m1;
    }
    return hyperbolic_distance(p, geodesic_point(a, b, 0.5 * (lo + hi)));
}

double thin_triangle_sample(const Vec4& a, const Vec4& b, const Vec4& c, std::uint64_t seed, int chords) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    double dab = hyperbolic_distance(a, b);
    double dac = hyperbolic_distance(a, c);
    double worst = 0.0;
    for (int k = 0; k < chords; ++k) {
        Vec4 x = geodesic_point(a, b, uni(rng) * dab);
        Vec4 y = geodesic_point(a, c, uni(rng) * dac);
        double dxy = hyperbolic_distance(x, y);
        Vec4 z = geodesic_point(x, y, uni(rng) * dxy);
        double to_edges = std::min({point_segment_distance(z, a, b),
                                    point_segment_distance(z, a, c),
                                    point_segment_distance(z, b, c)});
        worst = std::max(worst, to_edges);
    }
    return worst;
}

HyperbolicConstants estimate_thin_constant(int samples, std::uint64_t seed) {
    if (samples < 100) throw RangeError("estimate_thin_constant needs samples >= 100");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    auto random_point = [&]() {
        // direction uniform on S^2, radius uniform in [0, 10]; pairwise
        // distances stay <= 20 through the ball center
        double gx = gauss(rng), gy = gauss(rng), gz = gauss(rng);
        double gn = std::sqrt(gx * gx + gy * gy + gz * gz);
        if (gn < 1e-12) gn = 1.0;
        double r = 10.0 * uni(rng);
        Vec4 dir{{0.0, gx / gn, gy / gn, gz / gn}};
        return exp_map(origin_point(), dir * r);
    };
    double worst = 0.0;
    for (int i = 0; i < samples; ++i) {
        Vec4 a = random_point();
        Vec4 b = random_point();
        Vec4 c = random_point();
        worst = std::max(worst, thin_triangle_sample(a, b, c, rng()));
    }
    HyperbolicConstants out;
    out.delta_thin = worst;
    return out;
}

}  // namespace treelimit
