#pragma once

#include <cmath>

namespace mamix {

/// Symmetric 2x2 tensor [[a, b], [b, c]].
struct Sym2 {
    double a = 0.0;  // xx
    double b = 0.0;  // xy
    double c = 0.0;  // yy

    friend Sym2 operator+(Sym2 s, Sym2 t) { return {s.a + t.a, s.b + t.b, s.c + t.c}; }
    friend Sym2 operator-(Sym2 s, Sym2 t) { return {s.a - t.a, s.b - t.b, s.c - t.c}; }
    friend Sym2 operator*(double k, Sym2 s) { return {k * s.a, k * s.b, k * s.c}; }
    friend bool operator==(Sym2 s, Sym2 t) = default;

    double operator[](int component) const { return component == 0 ? a : component == 1 ? b : c; }
};

/// Weight of each stored component in the Frobenius product.
inline constexpr double kFrobeniusWeight[3] = {1.0, 2.0, 1.0};

inline double det2(Sym2 s) { return s.a * s.c - s.b * s.b; }

inline Sym2 cof2(Sym2 s) { return {s.c, -s.b, s.a}; }

inline double trace(Sym2 s) { return s.a + s.c; }

/// s : t
inline double frobenius(Sym2 s, Sym2 t) { return s.a * t.a + 2.0 * s.b * t.b + s.c * t.c; }

inline double min_eigenvalue(Sym2 s)
{
    const double half_gap = 0.5 * (s.a - s.c);
    return 0.5 * (s.a + s.c) - std::hypot(half_gap, s.b);
}

}  // namespace mamix
