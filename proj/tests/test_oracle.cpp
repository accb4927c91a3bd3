#include <gtest/gtest.h>

#include <random>

#include "ballquad/errors.hpp"
#include "ballquad/moments.hpp"
#include "ballquad/oracle.hpp"
#include "support.hpp"

using namespace ballquad;

namespace {
const Ball kBall{{0, 0, 0}, unit_volume_radius()};
}

TEST(Integrands, PointValues)
{
    const TestIntegrand f3 = TestIntegrand::f3();
    EXPECT_EQ(f3({0, 0, 0.5}), 1.0);
    EXPECT_EQ(f3({0, 0, -0.5}), -1.0);
    EXPECT_EQ(TestIntegrand::f2()(kF2Shift), 1.0);
    EXPECT_EQ(TestIntegrand::f4()({0, 0, 0}), 0.0);
    EXPECT_NEAR(TestIntegrand::f4()({0.01, 0, 0}), std::atan(5000 * 1e-4), 1e-15);
    EXPECT_EQ(TestIntegrand::constant(2.5)({1, 2, 3}), 2.5);
}

TEST(Integrands, RotationAboutOrigin)
{
    const Rotation3 R = random_rotation(3);
    const Point3 o{0.4, -0.1, 0.2};
    const TestIntegrand f = TestIntegrand::f3().centred_at(o).rotated(R);
    std::mt19937_64 rng(40);
    for (int i = 0; i < 100; ++i) {
        const Point3 x = bqtest::random_point(rng);
        const Point3 y = R.apply_transpose(x - o);
        EXPECT_EQ(f(x), y.z > 0 ? 1.0 : (y.z < 0 ? -1.0 : 0.0));
    }
}

TEST(Integrands, ParseRegistry)
{
    EXPECT_EQ(TestIntegrand::parse("f1").kind(), IntegrandKind::f1);
    EXPECT_EQ(TestIntegrand::parse("f2").kind(), IntegrandKind::f2);
    EXPECT_EQ(TestIntegrand::parse("f3").kind(), IntegrandKind::f3);
    EXPECT_EQ(TestIntegrand::parse("f4").kind(), IntegrandKind::f4);
    EXPECT_EQ(TestIntegrand::parse("const:2")({0, 0, 0}), 2.0);
    EXPECT_EQ(TestIntegrand::parse("poly:5:3").coefficients().degree(), 3);
    EXPECT_EQ(TestIntegrand::parse("f1:9").coefficients().at(1, 0, 0), PolyCoefficients::seeded(9, 30).at(1, 0, 0));
    EXPECT_THROW(TestIntegrand::parse("f7"), ValidationError);
    EXPECT_THROW(TestIntegrand::parse("poly:x:2"), ValidationError);
}

TEST(F1, EvaluationPathsAgree)
{
    const PolyCoefficients c = PolyCoefficients::seeded(0, 30);
    std::mt19937_64 rng(41);
    std::vector<Point3> pts;
    for (int i = 0; i < 10; ++i) {
        pts.push_back(bqtest::random_in_ball(rng, {0, 0, 0}, kBall.radius));
    }
    std::vector<double> many(pts.size());
    c.evaluate_many(pts, many);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double d = c.evaluate_direct(pts[i]);
        EXPECT_LE(bqtest::rel_err(c.evaluate(pts[i]), d), 1e-12);
        EXPECT_LE(bqtest::rel_err(many[i], d), 1e-12);
    }
}

TEST(F1, SeededAndDeterministic)
{
    const PolyCoefficients a = PolyCoefficients::seeded(0, 30);
    const PolyCoefficients b = PolyCoefficients::seeded(0, 30);
    const PolyCoefficients c = PolyCoefficients::seeded(1, 30);
    EXPECT_EQ(a.size(), 31u * 32u * 33u / 6u);
    bool differs = false;
    for (int al = 0; al <= 30; ++al) {
        for (int be = 0; be <= al; ++be) {
            for (int ga = 0; ga <= al - be; ++ga) {
                EXPECT_EQ(a.at(al, be, ga), b.at(al, be, ga));
                EXPECT_LE(std::abs(a.at(al, be, ga)), 1.0);
                differs |= a.at(al, be, ga) != c.at(al, be, ga);
            }
        }
    }
    EXPECT_TRUE(differs);
}

TEST(F1, ExactIntegralClosedForms)
{
    PolyCoefficients one(0);
    one.at(0, 0, 0) = 1.0;
    EXPECT_NEAR(f1_exact_integral(one, 1.2), 4.0 / 3.0 * M_PI * 1.2 * 1.2 * 1.2, 1e-14);
    PolyCoefficients x2(2);
    x2.at(2, 0, 0) = 1.0;  // x^(2-0-0)
    EXPECT_NEAR(f1_exact_integral(x2, 1.0), 4.0 * M_PI / 15.0, 1e-15);
}

TEST(F1, ExactMatchesAdaptiveForLowDegrees)
{
    for (int deg = 0; deg <= 6; ++deg) {
        const TestIntegrand f = TestIntegrand::poly(PolyCoefficients::seeded(100 + deg, deg));
        const double exact = *f.exact_integral(kBall.radius);
        EXPECT_NEAR(reference_integral(f, kBall, 1e-11), exact, 1e-8);
    }
}

TEST(Reference, F2Value)
{
    EXPECT_NEAR(reference_integral(TestIntegrand::f2(), kBall, 1e-12), 0.161965667295343, 1e-12);
}

TEST(Reference, F3IsZero)
{
    EXPECT_NEAR(reference_integral(TestIntegrand::f3(), kBall, 1e-10), 0.0, 1e-12);
    EXPECT_EQ(*TestIntegrand::f3().exact_integral(1.0), 0.0);
}

TEST(Reference, F2CentredGaussianRotationInvariant)
{
    const TestIntegrand g = TestIntegrand::f2({0, 0, 0});
    const double base = reference_integral(g, kBall, 1e-11);
    for (std::uint64_t s = 0; s < 3; ++s) {
        EXPECT_NEAR(reference_integral(g.rotated(random_rotation(s)), kBall, 1e-11), base, 1e-12);
    }
}

TEST(Reference, F4SelfConsistent)
{
    const double coarse = reference_integral(TestIntegrand::f4(), kBall, 1e-9);
    const double fine = reference_integral(TestIntegrand::f4(), kBall, 1e-11);
    EXPECT_NEAR(coarse, fine, 1e-8);
}

TEST(BruteForceTet, Basics)
{
    const Tetra ref{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    std::mt19937_64 rng(42);
    const Tetra t = bqtest::perturbed_regular(rng, 0.3);
    EXPECT_NEAR(brute_force_tet_integral([](const Point3&) { return 1.0; }, t, 4), tet_volume(t), 1e-14);
    EXPECT_NEAR(brute_force_tet_integral([](const Point3& p) { return p.x; }, ref, 4), 1.0 / 24.0, 1e-16);
    const Point3 x0 = bqtest::random_point(rng);
    auto g = [&](const Point3& p) { return std::pow(distance(p, x0), 3); };
    const double a = brute_force_tet_integral(g, t, 30), b = brute_force_tet_integral(g, t, 38);
    EXPECT_LE(bqtest::rel_err(a, b), 1e-12);
}

TEST(MonteCarlo, MatchesExactWithinError)
{
    const TestIntegrand f = TestIntegrand::poly(PolyCoefficients::seeded(3, 4));
    const auto est = monte_carlo_ball(f, kBall, 200000, 1);
    EXPECT_NEAR(est.value, *f.exact_integral(kBall.radius), 4.0 * est.std_error);
    EXPECT_GT(est.std_error, 0.0);
}
