#include "ballquad/geometry.hpp"

#include <numbers>
#include <random>

#include "ballquad/errors.hpp"

namespace ballquad {

double Ball::volume() const
{
    return 4.0 / 3.0 * std::numbers::pi * radius * radius * radius;
}

double unit_volume_radius()
{
    return std::cbrt(6.0) / (2.0 * std::cbrt(std::numbers::pi));
}

double signed_six_volume(const Point3& a, const Point3& b, const Point3& c, const Point3& d)
{
    return dot(b - a, cross(c - a, d - a));
}

double tet_volume(const Tetra& t)
{
    return std::abs(signed_six_volume(t.a, t.b, t.c, t.d)) / 6.0;
}

double six_volume(const Point3& x, const Point3& a, const Point3& b, const Point3& c)
{
    return std::abs(dot(a - x, cross(b - x, c - x)));
}

Point3 centroid(const Tetra& t)
{
    return (t.a + t.b + t.c + t.d) * 0.25;
}

Point3 face_unit_normal(const Point3& a, const Point3& b, const Point3& c)
{
    const Point3 ab = b - a;
    const Point3 ac = c - a;
    const Point3 n = cross(ab, ac);
    const double len = norm(n);
    if (!(len > 1e-14 * norm(ab) * norm(ac)) || len == 0.0) {
        throw DegenerateGeometryError("face_unit_normal: collinear face vertices");
    }
    return n / len;
}

Point3 project_to_face_plane(const Point3& x, const Point3& a, const Point3& b, const Point3& c)
{
    const Point3 n = face_unit_normal(a, b, c);
    return x + dot(a - x, n) * n;
}

Rotation3::Rotation3() : m_{1, 0, 0, 0, 1, 0, 0, 0, 1} {}

Rotation3 Rotation3::from_quaternion(double w, double x, double y, double z)
{
    const double len = std::sqrt(w * w + x * x + y * y + z * z);
    if (!(len > 0.0)) {
        throw DegenerateGeometryError("Rotation3::from_quaternion: zero quaternion");
    }
    w /= len;
    x /= len;
    y /= len;
    z /= len;
    return Rotation3({1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
                      2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
                      2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)});
}

Point3 Rotation3::apply(const Point3& p) const
{
    return {m_[0] * p.x + m_[1] * p.y + m_[2] * p.z,
            m_[3] * p.x + m_[4] * p.y + m_[5] * p.z,
            m_[6] * p.x + m_[7] * p.y + m_[8] * p.z};
}

Point3 Rotation3::apply_transpose(const Point3& p) const
{
    return {m_[0] * p.x + m_[3] * p.y + m_[6] * p.z,
            m_[1] * p.x + m_[4] * p.y + m_[7] * p.z,
            m_[2] * p.x + m_[5] * p.y + m_[8] * p.z};
}

Rotation3 Rotation3::transpose() const
{
    return Rotation3({m_[0], m_[3], m_[6], m_[1], m_[4], m_[7], m_[2], m_[5], m_[8]});
}

double Rotation3::determinant() const
{
    return m_[0] * (m_[4] * m_[8] - m_[5] * m_[7]) - m_[1] * (m_[3] * m_[8] - m_[5] * m_[6]) +
           m_[2] * (m_[3] * m_[7] - m_[4] * m_[6]);
}

double Rotation3::orthogonality_residual() const
{
    double worst = 0.0;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            double s = 0.0;
            for (int k = 0; k < 3; ++k) {
                s += (*this)(i, k) * (*this)(j, k);
            }
            worst = std::max(worst, std::abs(s - (i == j ? 1.0 : 0.0)));
        }
    }
    return worst;
}

Rotation3 random_rotation(std::uint64_t seed)
{
    // A normalised 4D Gaussian is uniform on S^3, which gives Haar-uniform rotations.
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    double q[4];
    double len2 = 0.0;
    do {
        len2 = 0.0;
        for (double& v : q) {
            v = gauss(rng);
            len2 += v * v;
        }
    } while (len2 < 1e-20);
    return Rotation3::from_quaternion(q[0], q[1], q[2], q[3]);
}

} // namespace ballquad
