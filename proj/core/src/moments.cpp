#include "ballquad/moments.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <string>

#include "ballquad/errors.hpp"

namespace ballquad {

namespace {

// Degree-d monomials in four barycentric coordinates, with their integral
// factor a0! a1! a2! a3! / (d+3)! and the index reached by raising one exponent.
struct BarycentricDegree {
    std::vector<std::array<int, 4>> tuples;
    std::vector<double> factor;
    std::vector<std::array<std::size_t, 4>> raise;  // into degree d+1
};

class BarycentricTables {
public:
    const std::vector<BarycentricDegree>& upto(int m)
    {
        std::lock_guard<std::mutex> lock(mutex_);
        if (static_cast<int>(degrees_.size()) <= m + 1) {
            build(m + 1);
        }
        return degrees_;
    }

private:
    void build(int top)
    {
        degrees_.clear();
        auto fact = [](int k) {
            double f = 1.0;
            for (int i = 2; i <= k; ++i) {
                f *= i;
            }
            return f;
        };
        for (int d = 0; d <= top; ++d) {
            BarycentricDegree deg;
            for (int a = d; a >= 0; --a) {
                for (int b = d - a; b >= 0; --b) {
                    for (int c = d - a - b; c >= 0; --c) {
                        deg.tuples.push_back({a, b, c, d - a - b - c});
                    }
                }
            }
            for (const auto& t : deg.tuples) {
                deg.factor.push_back(fact(t[0]) * fact(t[1]) * fact(t[2]) * fact(t[3]) / fact(d + 3));
            }
            degrees_.push_back(std::move(deg));
        }
        for (int d = 0; d < top; ++d) {
            std::map<std::array<int, 4>, std::size_t> next;
            const auto& up = degrees_[static_cast<std::size_t>(d + 1)].tuples;
            for (std::size_t i = 0; i < up.size(); ++i) {
                next[up[i]] = i;
            }
            auto& deg = degrees_[static_cast<std::size_t>(d)];
            for (const auto& t : deg.tuples) {
                std::array<std::size_t, 4> r{};
                for (int i = 0; i < 4; ++i) {
                    auto u = t;
                    ++u[static_cast<std::size_t>(i)];
                    r[static_cast<std::size_t>(i)] = next.at(u);
                }
                deg.raise.push_back(r);
            }
        }
    }

    std::mutex mutex_;
    std::vector<BarycentricDegree> degrees_;
};

BarycentricTables& barycentric_tables()
{
    static BarycentricTables tables;
    return tables;
}

double longest_edge(const Tetra& t)
{
    const std::array<Point3, 4> v{t.a, t.b, t.c, t.d};
    double L = 0.0;
    for (int i = 0; i < 4; ++i) {
        for (int j = i + 1; j < 4; ++j) {
            L = std::max(L, distance(v[static_cast<std::size_t>(i)], v[static_cast<std::size_t>(j)]));
        }
    }
    return L;
}

double checked_six_volume(const Tetra& t, const char* who)
{
    const double v6 = signed_six_volume(t.a, t.b, t.c, t.d);
    const double L = longest_edge(t);
    if (!(std::abs(v6) > 1e-14 * L * L * L)) {
        throw DegenerateGeometryError(std::string(who) + ": degenerate tetrahedron");
    }
    return v6;
}

} // namespace

void tet_poly_moments(const Tetra& t, const PolyBasis& basis, double* out)
{
    const double six_v = std::abs(checked_six_volume(t, "tet_poly_moments"));
    const auto& deg = barycentric_tables().upto(basis.degree());
    const std::array<Point3, 4> v{basis.to_frame(t.a), basis.to_frame(t.b), basis.to_frame(t.c),
                                  basis.to_frame(t.d)};
    const auto& exps = basis.exponents();
    // Coefficients of each basis term as a homogeneous polynomial in the
    // barycentric coordinates, built by multiplying the parent term by one
    // linear form.
    std::vector<std::size_t> offset(basis.size() + 1, 0);
    for (std::size_t l = 0; l < basis.size(); ++l) {
        const int d = exps[l][0] + exps[l][1] + exps[l][2];
        offset[l + 1] = offset[l] + deg[static_cast<std::size_t>(d)].tuples.size();
    }
    std::vector<double> coef(offset.back(), 0.0);
    coef[0] = 1.0;
    out[0] = six_v * deg[0].factor[0];
    for (std::size_t l = 1; l < basis.size(); ++l) {
        const std::size_t p = basis.parent(l);
        const int ax = basis.axis(l);
        const int dp = exps[p][0] + exps[p][1] + exps[p][2];
        const auto& from = deg[static_cast<std::size_t>(dp)];
        const auto& to = deg[static_cast<std::size_t>(dp + 1)];
        double* dst = coef.data() + offset[l];
        const double* src = coef.data() + offset[p];
        for (std::size_t j = 0; j < from.tuples.size(); ++j) {
            if (src[j] == 0.0) {
                continue;
            }
            for (std::size_t i = 0; i < 4; ++i) {
                dst[from.raise[j][i]] += src[j] * v[i][ax];
            }
        }
        double s = 0.0;
        for (std::size_t j = 0; j < to.tuples.size(); ++j) {
            s += dst[j] * to.factor[j];
        }
        out[l] = six_v * s;
    }
}

std::vector<double> tet_poly_moments(const Tetra& t, const PolyBasis& basis)
{
    std::vector<double> out(basis.size());
    tet_poly_moments(t, basis, out.data());
    return out;
}

namespace {

// Integral over [0, T] of Q(t)^(3/2), Q(t) = |w0 + t e|^2, via the standard
// antiderivatives of Q^(3/2), Q^(1/2) and Q^(-1/2).
double inner_cubic(const Point3& w0, const Point3& e, double T)
{
    const double alpha = dot(e, e);
    const double beta = 2.0 * dot(w0, e);
    const Point3 w1 = w0 + T * e;
    const double q0 = dot(w0, w0);
    const double q1 = dot(w1, w1);
    const double r0 = std::sqrt(q0);
    const double r1 = std::sqrt(q1);
    const double s0 = beta;
    const double s1 = 2.0 * alpha * T + beta;
    const double delta = 4.0 * norm2(cross(w0, e));
    const double sa = std::sqrt(alpha);

    double h = 0.0;  // integral of Q^(-1/2)
    if (delta > 0.0) {
        // asinh(s / sqrt(delta)) up to a constant is log(s + 2 sqrt(alpha Q));
        // for s < 0 the same quantity is delta / (2 sqrt(alpha Q) - s), which
        // avoids the cancellation.
        const double g0 = 2.0 * sa * r0;
        const double g1 = 2.0 * sa * r1;
        double ratio = 0.0;
        if (s0 >= 0.0) {
            ratio = (s1 + g1) / (s0 + g0);  // s1 >= s0
        } else if (s1 < 0.0) {
            ratio = (g0 - s0) / (g1 - s1);
        } else {
            ratio = (s1 + g1) * (g0 - s0) / delta;
        }
        h = std::log(ratio) / sa;
    }
    const double half = (s1 * r1 - s0 * r0) / (4.0 * alpha) + delta / (8.0 * alpha) * h;
    return (s1 * q1 * r1 - s0 * q0 * r0) / (8.0 * alpha) + 3.0 * delta / (16.0 * alpha) * half;
}

double inner_numeric(const Point3& w0, const Point3& e, double T, int power, const QuadratureRule1D& rule2)
{
    double s = 0.0;
    for (int i = 0; i < rule2.order(); ++i) {
        const double t = T * rule2.points[static_cast<std::size_t>(i)];
        const double r2 = norm2(w0 + t * e);
        double v = 1.0;
        if (power % 2 == 0) {
            for (int k = 0; k < power / 2; ++k) {
                v *= r2;
            }
        } else {
            v = std::pow(r2, 0.5 * power);
        }
        s += rule2.weights[static_cast<std::size_t>(i)] * v;
    }
    return T * s;
}

} // namespace

double apex_tet_rbf_integral(const Point3& x, const Point3& a, const Point3& b, const Point3& c,
                             RadialPower power, const QuadratureRule1D& rule)
{
    if (power.e < 0) {
        throw ValidationError("apex_tet_rbf_integral: exponent must be >= 0");
    }
    const Point3 ca = a - c;
    const Point3 cb = b - c;
    if (norm2(cross(ca, cb)) == 0.0) {
        throw DegenerateGeometryError("apex_tet_rbf_integral: degenerate face");
    }
    const Point3 base = c - x;
    const double six_v = std::abs(dot(base, cross(ca, cb)));
    if (six_v == 0.0) {
        return 0.0;
    }
    // y = x + sigma (base + l1 (a - c) + l2 (b - c)); the sigma integral of
    // sigma^(e+2) gives 1 / (e+3).
    const QuadratureRule1D* rule2 = nullptr;
    if (power.e != 3) {
        thread_local QuadratureRule1D cached;
        if (cached.order() != 2 * rule.order()) {
            cached = gauss_legendre(2 * rule.order());
        }
        rule2 = &cached;
    }
    auto integrate = [&](double lo, double hi) {
        double sum = 0.0;
        for (int i = 0; i < rule.order(); ++i) {
            const double l1 = lo + (hi - lo) * rule.points[static_cast<std::size_t>(i)];
            const double inner = power.e == 3 ? inner_cubic(base + l1 * ca, cb, 1.0 - l1)
                                              : inner_numeric(base + l1 * ca, cb, 1.0 - l1, power.e, *rule2);
            sum += rule.weights[static_cast<std::size_t>(i)] * inner;
        }
        return (hi - lo) * sum;
    };
    // When x sits close to the face plane the l1 integrand has a sharp
    // feature where the l2 segment passes over the foot of x; splitting there
    // puts it at an endpoint of both Gauss rules.
    const double g11 = dot(ca, ca);
    const double g12 = dot(ca, cb);
    const double g22 = dot(cb, cb);
    const Point3 xc = x - c;
    const double det = g11 * g22 - g12 * g12;
    const double foot = (g22 * dot(ca, xc) - g12 * dot(cb, xc)) / det;
    const double height = six_v / std::sqrt(det);
    const double size = std::sqrt(std::max({g11, g22, norm2(a - b)}));
    double sum = 0.0;
    if (height < 0.5 * size && foot > 1e-3 && foot < 1.0 - 1e-3) {
        sum = integrate(0.0, foot) + integrate(foot, 1.0);
    } else {
        sum = integrate(0.0, 1.0);
    }
    return six_v * sum / (power.e + 3);
}

double apex_tet_rbf_integral(const Point3& x, const Point3& a, const Point3& b, const Point3& c,
                             const PhsKernel& kernel, const QuadratureRule1D& rule)
{
    return apex_tet_rbf_integral(x, a, b, c, radial_power(kernel), rule);
}

double sigma_face(const Point3& x, const Point3& a, const Point3& b, const Point3& c)
{
    const Point3 n = cross(b - a, c - a);
    const double den = dot(c - x, n);
    const double scale = norm(n) * std::max({distance(a, x), distance(b, x), distance(c, x)});
    if (!(std::abs(den) > 1e-14 * scale)) {
        throw DegenerateGeometryError("sigma_face: point lies on the face plane");
    }
    return dot((a + b + c) / 3.0 - x, n) / den;
}

double tet_rbf_integral(const Tetra& t, const Point3& x, RadialPower power, const QuadratureRule1D& rule)
{
    const double v6 = checked_six_volume(t, "tet_rbf_integral");
    const std::array<Point3, 4> v{t.a, t.b, t.c, t.d};
    const double L = longest_edge(t);
    const double skip = 6.0 * 1e-14 * L * L * L;
    double sum = 0.0;
    for (const auto& f : kTetFaces) {
        const Point3& a = v[static_cast<std::size_t>(f[0])];
        const Point3& b = v[static_cast<std::size_t>(f[1])];
        const Point3& c = v[static_cast<std::size_t>(f[2])];
        // Face normals of a right-handed tetrahedron point inwards, so the
        // sign below is +1 for faces that x sees from the inside.
        const double side = dot(x - a, cross(b - a, c - a));
        if (std::abs(side) <= skip) {
            continue;
        }
        const double part = apex_tet_rbf_integral(x, a, b, c, power, rule);
        sum += side > 0.0 ? part : -part;
    }
    return v6 > 0.0 ? sum : -sum;
}

double tet_rbf_integral(const Tetra& t, const Point3& x, const PhsKernel& kernel, const QuadratureRule1D& rule)
{
    return tet_rbf_integral(t, x, radial_power(kernel), rule);
}

SliverPoint sliver_map(const SliverRegion& s, double lambda, double mu, double sigma)
{
    const Point3 A = s.a - s.ball.center;
    const Point3 B = s.b - s.ball.center;
    const Point3 C = s.c - s.ball.center;
    const Point3 xp = (1.0 - lambda) * A + lambda * ((1.0 - mu) * B + mu * C);
    const double r = norm(xp);
    if (!(r > 0.0)) {
        throw DegenerateGeometryError("sliver_map: chord point coincides with the ball centre");
    }
    const double g = 1.0 + sigma / r;
    const Point3 N = cross(B - A, C - A);
    // d/dsigma is the unit ray direction; the radial parts of d/dlambda and
    // d/dmu drop out of the determinant, leaving g^2 lambda (xhat . N).
    return {s.ball.center + g * xp, lambda * g * g * std::abs(dot(A, N)) / r};
}

std::vector<SliverNode> sliver_rule(const SliverRegion& s, int q)
{
    if (q < 1) {
        throw ValidationError("sliver_rule: order must be >= 1");
    }
    const QuadratureRule1D g = gauss_legendre(q);
    const double rho = s.ball.radius;
    std::vector<SliverNode> out;
    out.reserve(static_cast<std::size_t>(q) * static_cast<std::size_t>(q) * static_cast<std::size_t>(q));
    const Point3 A = s.a - s.ball.center;
    const Point3 B = s.b - s.ball.center;
    const Point3 C = s.c - s.ball.center;
    const double an = std::abs(dot(A, cross(B - A, C - A)));
    for (int i = 0; i < q; ++i) {
        const double lambda = g.points[static_cast<std::size_t>(i)];
        for (int j = 0; j < q; ++j) {
            const double mu = g.points[static_cast<std::size_t>(j)];
            const Point3 xp = (1.0 - lambda) * A + lambda * ((1.0 - mu) * B + mu * C);
            const double r = norm(xp);
            if (!(r > 0.0)) {
                throw DegenerateGeometryError("sliver_rule: chord point coincides with the ball centre");
            }
            const double len = std::max(0.0, rho - r);
            const double wij =
                g.weights[static_cast<std::size_t>(i)] * g.weights[static_cast<std::size_t>(j)] * lambda * an / r * len;
            for (int k = 0; k < q; ++k) {
                const double gk = 1.0 + len * g.points[static_cast<std::size_t>(k)] / r;
                out.push_back({s.ball.center + gk * xp, wij * g.weights[static_cast<std::size_t>(k)] * gk * gk});
            }
        }
    }
    return out;
}

double sliver_integral(const SliverRegion& s, const std::function<double(const Point3&)>& f, int q)
{
    double sum = 0.0;
    for (const SliverNode& p : sliver_rule(s, q)) {
        sum += p.w * f(p.x);
    }
    return sum;
}

double sliver_volume(const SliverRegion& s, int q)
{
    if (q < 1) {
        throw ValidationError("sliver_volume: order must be >= 1");
    }
    const QuadratureRule1D g = gauss_legendre(q);
    const Point3 A = s.a - s.ball.center;
    const Point3 B = s.b - s.ball.center;
    const Point3 C = s.c - s.ball.center;
    const double an = std::abs(dot(A, cross(B - A, C - A)));
    const double rho = s.ball.radius;
    double sum = 0.0;
    for (int i = 0; i < q; ++i) {
        const double lambda = g.points[static_cast<std::size_t>(i)];
        for (int j = 0; j < q; ++j) {
            const double mu = g.points[static_cast<std::size_t>(j)];
            const double r = norm((1.0 - lambda) * A + lambda * ((1.0 - mu) * B + mu * C));
            // integral of (1 + sigma/r)^2 over [0, rho - r]
            const double radial = (rho - r) * (rho * rho + rho * r + r * r) / (3.0 * r * r);
            sum += g.weights[static_cast<std::size_t>(i)] * g.weights[static_cast<std::size_t>(j)] * lambda * an / r *
                   radial;
        }
    }
    return sum;
}

double ball_monomial_moment(int i, int j, int k, double rho)
{
    if (i < 0 || j < 0 || k < 0) {
        throw ValidationError("ball_monomial_moment: exponents must be >= 0");
    }
    if (i % 2 || j % 2 || k % 2) {
        return 0.0;
    }
    const int a = i + j + k;
    return std::pow(rho, a + 3) * std::tgamma(0.5 * (i + 1)) * std::tgamma(0.5 * (j + 1)) *
           std::tgamma(0.5 * (k + 1)) / std::tgamma(0.5 * (a + 5));
}

} // namespace ballquad
