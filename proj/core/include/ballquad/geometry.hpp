#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace ballquad {

struct Point3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    constexpr double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
    constexpr double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

    constexpr Point3& operator+=(const Point3& o) { x += o.x; y += o.y; z += o.z; return *this; }
    constexpr Point3& operator-=(const Point3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
    constexpr Point3& operator*=(double s) { x *= s; y *= s; z *= s; return *this; }

    friend constexpr bool operator==(const Point3&, const Point3&) = default;
};

constexpr Point3 operator+(Point3 a, const Point3& b) { return a += b; }
constexpr Point3 operator-(Point3 a, const Point3& b) { return a -= b; }
constexpr Point3 operator-(const Point3& a) { return {-a.x, -a.y, -a.z}; }
constexpr Point3 operator*(Point3 a, double s) { return a *= s; }
constexpr Point3 operator*(double s, Point3 a) { return a *= s; }
constexpr Point3 operator/(const Point3& a, double s) { return {a.x / s, a.y / s, a.z / s}; }

constexpr double dot(const Point3& a, const Point3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

constexpr Point3 cross(const Point3& a, const Point3& b)
{
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm(const Point3& a) { return std::sqrt(dot(a, a)); }
constexpr double norm2(const Point3& a) { return dot(a, a); }
inline double distance(const Point3& a, const Point3& b) { return norm(a - b); }

inline bool is_finite(const Point3& p)
{
    return std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.z);
}

struct Ball {
    Point3 center{};
    double radius = 1.0;

    double volume() const;
    bool contains(const Point3& p) const { return distance(p, center) <= radius; }
};

/// Radius of the ball of unit volume, (6/pi)^(1/3)/2.
double unit_volume_radius();

struct Tetra {
    Point3 a, b, c, d;
};

/// det[b-a, c-a, d-a]; positive for right-handed vertex order.
double signed_six_volume(const Point3& a, const Point3& b, const Point3& c, const Point3& d);
double tet_volume(const Tetra& t);
/// |(a-x) . [(b-x) x (c-x)]|, six times the volume of the tetrahedron (x, a, b, c).
double six_volume(const Point3& x, const Point3& a, const Point3& b, const Point3& c);
Point3 centroid(const Tetra& t);

/// Unit normal (b-a) x (c-a) / |(b-a) x (c-a)|. Throws DegenerateGeometryError for
/// collinear input.
Point3 face_unit_normal(const Point3& a, const Point3& b, const Point3& c);

/// Orthogonal projection of x onto the plane through (a, b, c).
Point3 project_to_face_plane(const Point3& x, const Point3& a, const Point3& b, const Point3& c);

/// Proper rotation stored row-major.
class Rotation3 {
public:
    Rotation3();  // identity
    explicit Rotation3(const std::array<double, 9>& rows) : m_(rows) {}

    /// Rotation of the unit quaternion (w, x, y, z); the input is normalised first.
    static Rotation3 from_quaternion(double w, double x, double y, double z);

    double operator()(int r, int c) const { return m_[static_cast<std::size_t>(3 * r + c)]; }
    Point3 apply(const Point3& p) const;
    Point3 apply_transpose(const Point3& p) const;
    Rotation3 transpose() const;
    double determinant() const;
    /// max |R R^T - I| entrywise
    double orthogonality_residual() const;

    const std::array<double, 9>& data() const { return m_; }

    friend bool operator==(const Rotation3&, const Rotation3&) = default;

private:
    std::array<double, 9> m_;
};

/// Uniformly distributed rotation, deterministic per seed.
Rotation3 random_rotation(std::uint64_t seed);

} // namespace ballquad
