#pragma once

#include <functional>
#include <vector>

#include "ballquad/geometry.hpp"
#include "ballquad/localrbf.hpp"
#include "ballquad/quadrature1d.hpp"

namespace ballquad {

/// Integrand |y - x|^e. PhsKernel{p} corresponds to e = 2p+1; e = 0 turns the
/// RBF integrals into volumes, which tests use as a consistency hook.
struct RadialPower {
    int e = 3;
};

inline RadialPower radial_power(const PhsKernel& k) { return RadialPower{k.exponent()}; }

/// Integrals over t of every basis term, in physical volume units (the
/// constant term gives the volume of t). Throws DegenerateGeometryError for a
/// flat tetrahedron.
std::vector<double> tet_poly_moments(const Tetra& t, const PolyBasis& basis);
void tet_poly_moments(const Tetra& t, const PolyBasis& basis, double* out);

/// Integral of |y - x|^e over the tetrahedron (x, a, b, c), always >= 0.
/// The radial variable is integrated exactly; for e = 3 the inner edge
/// variable is integrated in closed form and the outer one by `rule`. Other
/// exponents integrate the inner variable with a Gauss rule of twice the order.
double apex_tet_rbf_integral(const Point3& x, const Point3& a, const Point3& b, const Point3& c,
                             const PhsKernel& kernel, const QuadratureRule1D& rule);
double apex_tet_rbf_integral(const Point3& x, const Point3& a, const Point3& b, const Point3& c,
                             RadialPower power, const QuadratureRule1D& rule);

/// ((a+b+c)/3 - x).n / ((c - x).n) with n = (b-a)x(c-a). Equal to 1 whenever
/// it is defined; throws DegenerateGeometryError when x lies on the face plane.
double sigma_face(const Point3& x, const Point3& a, const Point3& b, const Point3& c);

/// Integral of |y - x|^e over t for any x, as a signed sum over the four
/// tetrahedra joining x to the faces of t.
double tet_rbf_integral(const Tetra& t, const Point3& x, const PhsKernel& kernel, const QuadratureRule1D& rule);
double tet_rbf_integral(const Tetra& t, const Point3& x, RadialPower power, const QuadratureRule1D& rule);

/// Region between the chordal triangle (a, b, c) and the sphere.
struct SliverRegion {
    Point3 a;
    Point3 b;
    Point3 c;
    Ball ball;
};

struct SliverPoint {
    Point3 x;
    double jacobian = 0.0;
};

/// x'(l, u) = (1-l) a + l ((1-u) b + u c) relative to the centre, then pushed
/// outwards by sigma along the ray through x'. Throws DegenerateGeometryError
/// when x' is the centre.
SliverPoint sliver_map(const SliverRegion& s, double lambda, double mu, double sigma);

struct SliverNode {
    Point3 x;
    double w = 0.0;
};

/// Tensor Gauss rule of order q per direction on the sliver (sigma rescaled to
/// [0, 1] per chord point). Weights include the Jacobian.
std::vector<SliverNode> sliver_rule(const SliverRegion& s, int q);

double sliver_integral(const SliverRegion& s, const std::function<double(const Point3&)>& f, int q);

/// Sliver volume with the radial variable integrated exactly.
double sliver_volume(const SliverRegion& s, int q);

/// Integral of x^i y^j z^k over the ball of radius rho centred at the origin.
double ball_monomial_moment(int i, int j, int k, double rho);

} // namespace ballquad
