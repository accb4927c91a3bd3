#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "ballquad/geometry.hpp"

namespace bqtest {

using ballquad::Point3;
using ballquad::Tetra;

inline Point3 random_point(std::mt19937_64& rng, double lo = -1.0, double hi = 1.0)
{
    std::uniform_real_distribution<double> u(lo, hi);
    const double x = u(rng);
    const double y = u(rng);
    const double z = u(rng);
    return {x, y, z};
}

inline Point3 random_in_ball(std::mt19937_64& rng, const Point3& c, double r)
{
    for (;;) {
        const Point3 p = random_point(rng);
        if (ballquad::norm2(p) <= 1.0) {
            return c + r * p;
        }
    }
}

// Determinant by cofactor expansion, written out independently of the library.
inline double det3(const Point3& u, const Point3& v, const Point3& w)
{
    return u.x * (v.y * w.z - v.z * w.y) - u.y * (v.x * w.z - v.z * w.x) + u.z * (v.x * w.y - v.y * w.x);
}

inline Tetra right_handed(Tetra t)
{
    if (det3(t.b - t.a, t.c - t.a, t.d - t.a) < 0.0) {
        std::swap(t.c, t.d);
    }
    return t;
}

// Regular tetrahedron of edge ~1 with each vertex moved by up to `jitter`.
inline Tetra perturbed_regular(std::mt19937_64& rng, double jitter, double scale = 1.0)
{
    const Point3 v[4] = {{1, 1, 1}, {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}};
    Tetra t;
    Point3* out[4] = {&t.a, &t.b, &t.c, &t.d};
    const Point3 shift = random_point(rng);
    for (int i = 0; i < 4; ++i) {
        *out[i] = shift + scale * (0.5 * v[i] + jitter * random_point(rng));
    }
    return right_handed(t);
}

inline double rel_err(double got, double want)
{
    return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

} // namespace bqtest
