#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ballquad/geometry.hpp"

namespace ballquad {

/// Dense coefficients of a trivariate polynomial of total degree <= degree,
/// sum over alpha <= degree, beta <= alpha, gamma <= alpha - beta of
/// a(alpha, beta, gamma) x^(alpha-beta-gamma) y^beta z^gamma.
class PolyCoefficients {
public:
    PolyCoefficients() = default;
    explicit PolyCoefficients(int degree);

    /// Uniform values in [-1, 1] for every term, deterministic per seed.
    static PolyCoefficients seeded(std::uint64_t seed, int degree);

    int degree() const { return degree_; }
    std::size_t size() const { return a_.size(); }
    double& at(int alpha, int beta, int gamma) { return a_[index(alpha, beta, gamma)]; }
    double at(int alpha, int beta, int gamma) const { return a_[index(alpha, beta, gamma)]; }

    /// Evaluation from precomputed coordinate powers.
    double evaluate(const Point3& p) const;
    /// Term-by-term evaluation with std::pow; slow, used as an independent check.
    double evaluate_direct(const Point3& p) const;
    void evaluate_many(std::span<const Point3> pts, std::span<double> out) const;

private:
    std::size_t index(int alpha, int beta, int gamma) const;

    int degree_ = 0;
    std::vector<double> a_;
};

/// Exact integral over the origin-centred ball of radius rho.
double f1_exact_integral(const PolyCoefficients& coeffs, double rho);

/// Default shift of the f2 Gaussian.
inline constexpr Point3 kF2Shift{0.047056440432708, 0.071766893999009, 0.118950756342700};

enum class IntegrandKind { f1, f2, f3, f4, constant, poly };

/// Reference integrands. Each is written in coordinates relative to `origin`
/// (the ball centre) and may carry a rotation R about it:
/// value(x) = base(R^T (x - origin)).
class TestIntegrand {
public:
    static TestIntegrand f1(std::uint64_t seed = 0, int degree = 30);
    static TestIntegrand f2(const Point3& shift = kF2Shift);
    static TestIntegrand f3();
    static TestIntegrand f4(double steepness = 5000.0);
    static TestIntegrand constant(double value = 1.0);
    static TestIntegrand poly(std::uint64_t seed, int degree);
    static TestIntegrand poly(PolyCoefficients coeffs);
    /// Registry names: f1 | f2 | f3 | f4 | const | poly:<seed>:<degree>.
    static TestIntegrand parse(const std::string& name);

    IntegrandKind kind() const { return kind_; }
    const std::string& name() const { return name_; }
    const PolyCoefficients& coefficients() const { return coeffs_; }
    const Rotation3& rotation() const { return rotation_; }
    const Point3& origin() const { return origin_; }

    TestIntegrand rotated(const Rotation3& r) const;
    TestIntegrand centred_at(const Point3& origin) const;

    double operator()(const Point3& x) const { return evaluate(x); }
    double evaluate(const Point3& x) const;
    void evaluate_many(std::span<const Point3> pts, std::span<double> out) const;

    /// Closed-form integral over a ball centred at origin(), when one exists
    /// (const, polynomials, f3).
    std::optional<double> exact_integral(double rho) const;

private:
    double base(const Point3& y) const;

    IntegrandKind kind_ = IntegrandKind::constant;
    std::string name_ = "const";
    double value_ = 1.0;
    Point3 shift_{};
    PolyCoefficients coeffs_;
    Rotation3 rotation_;
    Point3 origin_{};
};

/// One-dimensional adaptive Gauss-Kronrod integration to relative tolerance tol.
double adaptive_integrate(const std::function<double(double)>& f, double a, double b, double tol);

/// Nested adaptive integration over the ball in Cartesian limits
/// x in [-rho, rho], y in [-sqrt(rho^2 - x^2), ...], z likewise, with a sine
/// substitution removing the square-root endpoint behaviour of the outer two.
double reference_integral(const std::function<double(const Point3&)>& f, const Ball& ball, double tol);
double reference_integral(const TestIntegrand& f, const Ball& ball, double tol);

/// Exact value when available, otherwise reference_integral at tolerance 1e-13.
double reference_value(const TestIntegrand& f, const Ball& ball);

/// Collapsed-coordinate tensor Gauss rule of order q mapped onto t, with the
/// collapse at t.a.
double brute_force_tet_integral(const std::function<double(const Point3&)>& g, const Tetra& t, int q);

/// Integral of |y - x|^e over t. The tetrahedron is split at x when x lies
/// inside it (and collapsed at x when x is a vertex) so the kernel's
/// non-smooth point sits at a collapse vertex.
double brute_force_rbf_integral(const Tetra& t, const Point3& x, int e, int q);

struct MonteCarloEstimate {
    double value = 0.0;
    double std_error = 0.0;
};

MonteCarloEstimate monte_carlo_ball(const TestIntegrand& f, const Ball& ball, std::size_t samples,
                                    std::uint64_t seed);

} // namespace ballquad
