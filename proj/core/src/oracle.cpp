#include "ballquad/oracle.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "ballquad/errors.hpp"
#include "ballquad/moments.hpp"
#include "ballquad/quadrature1d.hpp"

namespace ballquad {

namespace {

double unit_interval(std::mt19937_64& rng)
{
    // 53 random bits, independent of the standard library's distributions.
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

} // namespace

PolyCoefficients::PolyCoefficients(int degree) : degree_(degree)
{
    if (degree < 0) {
        throw ValidationError("polynomial degree must be >= 0");
    }
    const auto d = static_cast<std::size_t>(degree);
    a_.assign((d + 1) * (d + 2) * (d + 3) / 6, 0.0);
}

PolyCoefficients PolyCoefficients::seeded(std::uint64_t seed, int degree)
{
    PolyCoefficients c(degree);
    std::mt19937_64 rng(seed);
    for (int alpha = 0; alpha <= degree; ++alpha) {
        for (int beta = 0; beta <= alpha; ++beta) {
            for (int gamma = 0; gamma <= alpha - beta; ++gamma) {
                c.at(alpha, beta, gamma) = 2.0 * unit_interval(rng) - 1.0;
            }
        }
    }
    return c;
}

std::size_t PolyCoefficients::index(int alpha, int beta, int gamma) const
{
    if (alpha < 0 || alpha > degree_ || beta < 0 || beta > alpha || gamma < 0 || gamma > alpha - beta) {
        throw ValidationError("polynomial coefficient index out of range");
    }
    const auto a = static_cast<std::size_t>(alpha);
    const auto b = static_cast<std::size_t>(beta);
    return a * (a + 1) * (a + 2) / 6 + b * (a + 1) - b * (b - (b > 0 ? 1 : 0)) / 2 + static_cast<std::size_t>(gamma);
}

double PolyCoefficients::evaluate(const Point3& p) const
{
    double out = 0.0;
    evaluate_many(std::span<const Point3>(&p, 1), std::span<double>(&out, 1));
    return out;
}

double PolyCoefficients::evaluate_direct(const Point3& p) const
{
    double s = 0.0;
    for (int alpha = 0; alpha <= degree_; ++alpha) {
        for (int beta = 0; beta <= alpha; ++beta) {
            for (int gamma = 0; gamma <= alpha - beta; ++gamma) {
                s += at(alpha, beta, gamma) * std::pow(p.x, alpha - beta - gamma) * std::pow(p.y, beta) *
                     std::pow(p.z, gamma);
            }
        }
    }
    return s;
}

void PolyCoefficients::evaluate_many(std::span<const Point3> pts, std::span<double> out) const
{
    if (out.size() != pts.size()) {
        throw ValidationError("evaluate_many: size mismatch");
    }
    constexpr std::size_t B = 16;
    const auto D = static_cast<std::size_t>(degree_) + 1;
    std::vector<double> px(D * B), py(D * B), pz(D * B);
    for (std::size_t start = 0; start < pts.size(); start += B) {
        const std::size_t nb = std::min(B, pts.size() - start);
        for (std::size_t b = 0; b < B; ++b) {
            const Point3 p = b < nb ? pts[start + b] : Point3{};
            px[b] = py[b] = pz[b] = 1.0;
            for (std::size_t e = 1; e < D; ++e) {
                px[e * B + b] = px[(e - 1) * B + b] * p.x;
                py[e * B + b] = py[(e - 1) * B + b] * p.y;
                pz[e * B + b] = pz[(e - 1) * B + b] * p.z;
            }
        }
        std::array<double, B> acc{};
        std::array<double, B> yz{};
        std::size_t idx = 0;
        for (int alpha = 0; alpha <= degree_; ++alpha) {
            for (int beta = 0; beta <= alpha; ++beta) {
                for (int gamma = 0; gamma <= alpha - beta; ++gamma, ++idx) {
                    const double c = a_[idx];
                    const double* X = &px[static_cast<std::size_t>(alpha - beta - gamma) * B];
                    const double* Y = &py[static_cast<std::size_t>(beta) * B];
                    const double* Z = &pz[static_cast<std::size_t>(gamma) * B];
                    for (std::size_t b = 0; b < B; ++b) {
                        yz[b] = Y[b] * Z[b];
                        acc[b] += c * X[b] * yz[b];
                    }
                }
            }
        }
        for (std::size_t b = 0; b < nb; ++b) {
            out[start + b] = acc[b];
        }
    }
}

double f1_exact_integral(const PolyCoefficients& coeffs, double rho)
{
    double s = 0.0;
    for (int alpha = 0; alpha <= coeffs.degree(); ++alpha) {
        for (int beta = 0; beta <= alpha; beta += 2) {
            for (int gamma = 0; gamma <= alpha - beta; gamma += 2) {
                s += coeffs.at(alpha, beta, gamma) * ball_monomial_moment(alpha - beta - gamma, beta, gamma, rho);
            }
        }
    }
    return s;
}

TestIntegrand TestIntegrand::f1(std::uint64_t seed, int degree)
{
    TestIntegrand f;
    f.kind_ = IntegrandKind::f1;
    f.name_ = "f1";
    f.coeffs_ = PolyCoefficients::seeded(seed, degree);
    return f;
}

TestIntegrand TestIntegrand::f2(const Point3& shift)
{
    TestIntegrand f;
    f.kind_ = IntegrandKind::f2;
    f.name_ = "f2";
    f.shift_ = shift;
    return f;
}

TestIntegrand TestIntegrand::f3()
{
    TestIntegrand f;
    f.kind_ = IntegrandKind::f3;
    f.name_ = "f3";
    return f;
}

TestIntegrand TestIntegrand::f4(double steepness)
{
    TestIntegrand f;
    f.kind_ = IntegrandKind::f4;
    f.name_ = "f4";
    f.value_ = steepness;
    return f;
}

TestIntegrand TestIntegrand::constant(double value)
{
    TestIntegrand f;
    f.kind_ = IntegrandKind::constant;
    f.name_ = "const";
    f.value_ = value;
    return f;
}

TestIntegrand TestIntegrand::poly(PolyCoefficients coeffs)
{
    TestIntegrand f;
    f.kind_ = IntegrandKind::poly;
    f.name_ = "poly";
    f.coeffs_ = std::move(coeffs);
    return f;
}

TestIntegrand TestIntegrand::poly(std::uint64_t seed, int degree)
{
    TestIntegrand f = poly(PolyCoefficients::seeded(seed, degree));
    f.name_ = "poly:" + std::to_string(seed) + ":" + std::to_string(degree);
    return f;
}

namespace {

template <typename T>
T parse_number(const std::string& s, const std::string& whole)
{
    T v{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw ValidationError("bad integrand spec '" + whole + "'");
    }
    return v;
}

} // namespace

TestIntegrand TestIntegrand::parse(const std::string& name)
{
    std::vector<std::string> parts;
    std::size_t start = 0;
    for (;;) {
        const auto colon = name.find(':', start);
        parts.push_back(name.substr(start, colon - start));
        if (colon == std::string::npos) {
            break;
        }
        start = colon + 1;
    }
    const std::string& head = parts[0];
    if (head == "f1" && parts.size() <= 2) {
        TestIntegrand f = f1(parts.size() == 2 ? parse_number<std::uint64_t>(parts[1], name) : 0);
        f.name_ = name;
        return f;
    }
    if (head == "f2" && parts.size() == 1) {
        return f2();
    }
    if (head == "f3" && parts.size() == 1) {
        return f3();
    }
    if (head == "f4" && parts.size() == 1) {
        return f4();
    }
    if (head == "const" && parts.size() <= 2) {
        TestIntegrand f = constant(parts.size() == 2 ? parse_number<double>(parts[1], name) : 1.0);
        f.name_ = name;
        return f;
    }
    if (head == "poly" && parts.size() == 3) {
        const int degree = parse_number<int>(parts[2], name);
        if (degree < 0 || degree > 60) {
            throw ValidationError("poly degree must be in [0, 60]");
        }
        return poly(parse_number<std::uint64_t>(parts[1], name), degree);
    }
    throw ValidationError("unknown integrand '" + name + "' (expected f1|f2|f3|f4|const|poly:<seed>:<degree>)");
}

TestIntegrand TestIntegrand::rotated(const Rotation3& r) const
{
    TestIntegrand f = *this;
    // Composing: value(x) = base(R_old^T R^T (x - o)) = base((R R_old)^T (x - o)).
    std::array<double, 9> m{};
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            double s = 0.0;
            for (int k = 0; k < 3; ++k) {
                s += r(i, k) * rotation_(k, j);
            }
            m[static_cast<std::size_t>(3 * i + j)] = s;
        }
    }
    f.rotation_ = Rotation3(m);
    return f;
}

TestIntegrand TestIntegrand::centred_at(const Point3& origin) const
{
    TestIntegrand f = *this;
    f.origin_ = origin;
    return f;
}

double TestIntegrand::base(const Point3& y) const
{
    switch (kind_) {
    case IntegrandKind::f1:
    case IntegrandKind::poly:
        return coeffs_.evaluate(y);
    case IntegrandKind::f2:
        return std::exp(-10.0 * norm2(y - shift_));
    case IntegrandKind::f3:
        return y.z > 0.0 ? 1.0 : (y.z < 0.0 ? -1.0 : 0.0);
    case IntegrandKind::f4:
        return std::atan(value_ * norm2(y));
    case IntegrandKind::constant:
        return value_;
    }
    return 0.0;
}

double TestIntegrand::evaluate(const Point3& x) const
{
    return base(rotation_.apply_transpose(x - origin_));
}

void TestIntegrand::evaluate_many(std::span<const Point3> pts, std::span<double> out) const
{
    if (out.size() != pts.size()) {
        throw ValidationError("evaluate_many: size mismatch");
    }
    if (kind_ == IntegrandKind::f1 || kind_ == IntegrandKind::poly) {
        std::vector<Point3> local(pts.size());
        for (std::size_t i = 0; i < pts.size(); ++i) {
            local[i] = rotation_.apply_transpose(pts[i] - origin_);
        }
        coeffs_.evaluate_many(local, out);
        return;
    }
    for (std::size_t i = 0; i < pts.size(); ++i) {
        out[i] = evaluate(pts[i]);
    }
}

std::optional<double> TestIntegrand::exact_integral(double rho) const
{
    switch (kind_) {
    case IntegrandKind::f1:
    case IntegrandKind::poly:
        return f1_exact_integral(coeffs_, rho);
    case IntegrandKind::f3:
        return 0.0;
    case IntegrandKind::constant:
        return value_ * 4.0 / 3.0 * std::numbers::pi * rho * rho * rho;
    default:
        return std::nullopt;
    }
}

double adaptive_integrate(const std::function<double(double)>& f, double a, double b, double tol)
{
    if (!(b > a)) {
        return 0.0;
    }
    // Integrate over [-1, 1]: the library compares its error estimate in
    // reference-interval units with a tolerance in user units, which never
    // terminates on very short intervals.
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double err = 0.0;
    auto g = [&](double t) { return f(mid + half * t); };
    return half * boost::math::quadrature::gauss_kronrod<double, 15>::integrate(g, -1.0, 1.0, 15, tol, &err);
}

double reference_integral(const std::function<double(const Point3&)>& f, const Ball& ball, double tol)
{
    if (!(tol > 0.0)) {
        throw ValidationError("reference_integral: tolerance must be positive");
    }
    const double rho = ball.radius;
    const Point3 c = ball.center;
    const double half_pi = 0.5 * std::numbers::pi;
    // Inner levels run tighter so their rounding noise stays below the
    // tolerance asked of the level above; otherwise the outer levels keep
    // subdividing noise.
    const double middle_tol = std::max(0.1 * tol, 1e-15);
    const double inner_tol = std::max(0.01 * tol, 1e-15);
    auto over_theta = [&](double theta) {
        const double x = rho * std::sin(theta);
        const double ry = rho * std::cos(theta);
        auto over_phi = [&](double phi) {
            const double y = ry * std::sin(phi);
            const double rz = ry * std::cos(phi);
            auto over_z = [&](double z) { return f(c + Point3{x, y, z}); };
            return adaptive_integrate(over_z, -rz, rz, inner_tol) * rz;
        };
        return adaptive_integrate(over_phi, -half_pi, half_pi, middle_tol) * ry;
    };
    return adaptive_integrate(over_theta, -half_pi, half_pi, tol);
}

double reference_integral(const TestIntegrand& f, const Ball& ball, double tol)
{
    return reference_integral([&f](const Point3& x) { return f.evaluate(x); }, ball, tol);
}

double reference_value(const TestIntegrand& f, const Ball& ball)
{
    if (f.origin() == ball.center) {
        if (const auto exact = f.exact_integral(ball.radius)) {
            return *exact;
        }
    }
    return reference_integral(f, ball, 1e-11);
}

double brute_force_tet_integral(const std::function<double(const Point3&)>& g, const Tetra& t, int q)
{
    const double v6 = signed_six_volume(t.a, t.b, t.c, t.d);
    if (v6 == 0.0) {
        throw DegenerateGeometryError("brute_force_tet_integral: degenerate tetrahedron");
    }
    const QuadratureRule1D r = gauss_legendre(q);
    const Point3 ab = t.b - t.a;
    const Point3 bc = t.c - t.b;
    const Point3 cd = t.d - t.c;
    double sum = 0.0;
    for (int i = 0; i < q; ++i) {
        const double u = r.points[static_cast<std::size_t>(i)];
        for (int j = 0; j < q; ++j) {
            const double v = r.points[static_cast<std::size_t>(j)];
            double inner = 0.0;
            for (int k = 0; k < q; ++k) {
                const double w = r.points[static_cast<std::size_t>(k)];
                inner += r.weights[static_cast<std::size_t>(k)] * g(t.a + u * (ab + v * (bc + w * cd)));
            }
            sum += r.weights[static_cast<std::size_t>(i)] * r.weights[static_cast<std::size_t>(j)] * u * u * v * inner;
        }
    }
    return std::abs(v6) * sum;
}

double brute_force_rbf_integral(const Tetra& t, const Point3& x, int e, int q)
{
    auto g = [&x, e](const Point3& y) { return std::pow(distance(x, y), e); };
    const std::array<Point3, 4> v{t.a, t.b, t.c, t.d};
    double L = 0.0;
    for (const Point3& p : v) {
        L = std::max(L, distance(p, t.a));
    }
    for (std::size_t i = 0; i < 4; ++i) {
        if (distance(v[i], x) <= 1e-14 * L) {
            // Rotate the vertex list so x becomes the collapse vertex; an even
            // permutation keeps the orientation (irrelevant for |6V| anyway).
            return brute_force_tet_integral(g, Tetra{v[i], v[(i + 1) % 4], v[(i + 2) % 4], v[(i + 3) % 4]}, q);
        }
    }
    const double v6 = signed_six_volume(t.a, t.b, t.c, t.d);
    const std::array<double, 4> bary{signed_six_volume(x, t.b, t.c, t.d) / v6, signed_six_volume(t.a, x, t.c, t.d) / v6,
                                     signed_six_volume(t.a, t.b, x, t.d) / v6, signed_six_volume(t.a, t.b, t.c, x) / v6};
    if (*std::min_element(bary.begin(), bary.end()) < 0.0) {
        return brute_force_tet_integral(g, t, q);
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
        if (bary[i] <= 1e-14) {
            continue;
        }
        std::array<Point3, 4> sub = v;
        sub[i] = x;
        // Put x first; the sub-tetrahedron has volume bary[i] * V.
        std::swap(sub[0], sub[i]);
        sum += brute_force_tet_integral(g, Tetra{sub[0], sub[1], sub[2], sub[3]}, q);
    }
    return sum;
}

MonteCarloEstimate monte_carlo_ball(const TestIntegrand& f, const Ball& ball, std::size_t samples,
                                    std::uint64_t seed)
{
    if (samples < 2) {
        throw ValidationError("monte_carlo_ball: need at least 2 samples");
    }
    std::mt19937_64 rng(seed);
    constexpr std::size_t kBatch = 4096;
    std::vector<Point3> pts;
    std::vector<double> vals;
    long double sum = 0.0L;
    long double sum2 = 0.0L;
    std::size_t done = 0;
    while (done < samples) {
        const std::size_t nb = std::min(kBatch, samples - done);
        pts.clear();
        while (pts.size() < nb) {
            const Point3 d{2.0 * unit_interval(rng) - 1.0, 2.0 * unit_interval(rng) - 1.0,
                           2.0 * unit_interval(rng) - 1.0};
            if (norm2(d) <= 1.0) {
                pts.push_back(ball.center + ball.radius * d);
            }
        }
        vals.resize(nb);
        f.evaluate_many(pts, vals);
        for (double v : vals) {
            sum += v;
            sum2 += static_cast<long double>(v) * v;
        }
        done += nb;
    }
    const long double n = static_cast<long double>(samples);
    const long double mean = sum / n;
    const long double var = (sum2 / n - mean * mean) * n / (n - 1.0L);
    const double vol = ball.volume();
    return {vol * static_cast<double>(mean), vol * std::sqrt(static_cast<double>(std::max(var, 0.0L)) / static_cast<double>(n))};
}

} // namespace ballquad
