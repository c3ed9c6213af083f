#pragma once

#include <cmath>
#include <complex>

namespace treelimit {

using Complex = std::complex<double>;

// 2x2 complex matrix of determinant one, entries [[a, b], [c, d]].
struct Sl2c {
    Complex a{1.0, 0.0};
    Complex b{0.0, 0.0};
    Complex c{0.0, 0.0};
    Complex d{1.0, 0.0};

    static Sl2c identity() { return {}; }

    Complex det() const { return a * d - b * c; }
    Complex trace() const { return a + d; }

    // Adjugate; the inverse whenever det == 1.
    Sl2c inverse() const { return {d, -b, -c, a}; }

    // Rescales entries so the determinant is 1 again (drift control after
    // long products). The principal square root is fine near det == 1.
    Sl2c normalized() const {
        Complex s = std::sqrt(det());
        return {a / s, b / s, c / s, d / s};
    }
};

inline Sl2c operator*(const Sl2c& x, const Sl2c& y) {
    return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d,
            x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
}

inline double det_error(const Sl2c& m) { return std::abs(m.det() - Complex(1.0, 0.0)); }

inline double entry_distance(const Sl2c& x, const Sl2c& y) {
    return std::max(std::max(std::abs(x.a - y.a), std::abs(x.b - y.b)),
                    std::max(std::abs(x.c - y.c), std::abs(x.d - y.d)));
}

// Distance to the closer of +I and -I; representations act through PSL(2,C).
inline double distance_to_unit(const Sl2c& m) {
    Sl2c id = Sl2c::identity();
    Sl2c neg{-1.0, 0.0, 0.0, -1.0};
    return std::min(entry_distance(m, id), entry_distance(m, neg));
}

}  // namespace treelimit
