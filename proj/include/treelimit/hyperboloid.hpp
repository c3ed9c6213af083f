#pragma once

#include <array>
#include <cstdint>

#include "treelimit/sl2c.hpp"

namespace treelimit {

// Minkowski 4-vector (x0, x1, x2, x3) with signature (-, +, +, +).
// Points of H^3 satisfy <x,x> = -1, x0 > 0; tangent vectors at p satisfy <v,p> = 0.
struct Vec4 {
    std::array<double, 4> c{0.0, 0.0, 0.0, 0.0};

    double& operator[](int i) { return c[static_cast<size_t>(i)]; }
    double operator[](int i) const { return c[static_cast<size_t>(i)]; }

    Vec4 operator+(const Vec4& o) const { return {{c[0] + o.c[0], c[1] + o.c[1], c[2] + o.c[2], c[3] + o.c[3]}}; }
    Vec4 operator-(const Vec4& o) const { return {{c[0] - o.c[0], c[1] - o.c[1], c[2] - o.c[2], c[3] - o.c[3]}}; }
    Vec4 operator*(double s) const { return {{c[0] * s, c[1] * s, c[2] * s, c[3] * s}}; }
};

inline double minkowski(const Vec4& x, const Vec4& y) {
    return -x[0] * y[0] + x[1] * y[1] + x[2] * y[2] + x[3] * y[3];
}

inline Vec4 origin_point() { return {{1.0, 0.0, 0.0, 0.0}}; }

// Rescales a timelike vector back onto the hyperboloid sheet x0 > 0.
Vec4 normalize_point(const Vec4& x);

bool is_hyperbolic_point(const Vec4& x, double tol = 1e-10);

// arccosh(-<p,q>); throws InvalidPointError when -<p,q> < 1 - 1e-9.
double hyperbolic_distance(const Vec4& p, const Vec4& q);

// Tangent vector v at p with exp_map(p, v) = q and |v| = d(p, q).
Vec4 log_map(const Vec4& p, const Vec4& q);

// cosh(|v|) p + sinh(|v|) v/|v|, renormalized; throws TangencyError when <v,p> != 0.
Vec4 exp_map(const Vec4& p, const Vec4& v);

// Point at arclength s from a on the geodesic toward b (s may exceed d(a,b)).
Vec4 geodesic_point(const Vec4& a, const Vec4& b, double s);

// 4x4 real matrix acting on Minkowski space, L^T eta L = eta, L00 > 0.
struct Lorentz {
    std::array<std::array<double, 4>, 4> m{};

    static Lorentz identity();
    Vec4 apply(const Vec4& x) const;
    Lorentz operator*(const Lorentz& o) const;
    Lorentz inverse() const;  // eta L^T eta
};

double lorentz_defect(const Lorentz& L);  // max |(L^T eta L - eta)_ij|

// The isometry induced by X -> A X A* on Hermitian matrices
// X = [[x0+x3, x1+i x2], [x1-i x2, x0-x3]].
Lorentz to_lorentz(const Sl2c& g);

// 2 |ln |lambda|| for the larger-modulus eigenvalue; 0 for elliptic/parabolic.
double translation_length(const Sl2c& g);

struct HyperbolicConstants {
    double delta_thin = 0.0;
};

// Empirical thin-triangle constant: max distance from sampled interior chord
// points to the nearest triangle edge, over `samples` random geodesic
// triangles with vertices at pairwise distance <= 20. Deterministic per seed.
HyperbolicConstants estimate_thin_constant(int samples, std::uint64_t seed = 2026);

// Distance from p to the geodesic segment [a, b] (ternary search; convex).
double point_segment_distance(const Vec4& p, const Vec4& a, const Vec4& b);

// Max over sampled interior points of one triangle of the distance to the
// nearest edge; the per-triangle contribution of estimate_thin_constant.
double thin_triangle_sample(const Vec4& a, const Vec4& b, const Vec4& c, std::uint64_t seed, int chords = 6);

}  // namespace treelimit
