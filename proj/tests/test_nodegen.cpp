#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ballquad/errors.hpp"
#include "ballquad/kdtree.hpp"
#include "ballquad/nodegen.hpp"
#include "support.hpp"

using namespace ballquad;

namespace {

const Ball kBall{{0, 0, 0}, unit_volume_radius()};

std::vector<double> nearest_distances(const NodeSet& s)
{
    std::vector<double> d(s.size(), std::numeric_limits<double>::infinity());
    // O(N^2) scan on purpose: independent of the kd-tree.
    for (std::size_t i = 0; i < s.size(); ++i) {
        for (std::size_t j = 0; j < s.size(); ++j) {
            if (i != j) {
                d[i] = std::min(d[i], distance(s.points[i], s.points[j]));
            }
        }
    }
    return d;
}

void expect_node_set_invariants(const NodeSet& s)
{
    ASSERT_EQ(s.points.size(), s.on_surface.size());
    const double rho = s.ball.radius;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double r = distance(s.points[i], s.ball.center);
        if (s.on_surface[i]) {
            EXPECT_LE(std::abs(r - rho), 1e-12 * rho);
        } else {
            EXPECT_LT(r, rho);
        }
    }
    EXPECT_NO_THROW(validate_node_set(s));
}

} // namespace

TEST(Halton, KnownValues)
{
    const auto h2 = halton(2, 1, 0);
    ASSERT_EQ(h2.size(), 1u);
    EXPECT_DOUBLE_EQ(h2[0][0], 0.5);
    EXPECT_DOUBLE_EQ(h2[0][1], 1.0 / 3.0);
    const auto h3 = halton(3, 2, 0);
    EXPECT_DOUBLE_EQ(h3[1][0], 0.25);
    EXPECT_DOUBLE_EQ(h3[1][1], 2.0 / 3.0);
    EXPECT_DOUBLE_EQ(h3[1][2], 0.4);
    EXPECT_TRUE(halton(3, 0, 0).empty());
    EXPECT_THROW(halton(4, 3, 0), ValidationError);
    EXPECT_THROW(halton(1, 3, 0), ValidationError);
    EXPECT_DOUBLE_EQ(radical_inverse(6, 2), 0.375);
}

TEST(Halton, PrefixStableAndSkip)
{
    const auto a = halton(3, 50, 0);
    const auto b = halton(3, 80, 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i], b[i]);
    }
    const auto c = halton(3, 30, 50);
    for (std::size_t i = 0; i < c.size(); ++i) {
        EXPECT_EQ(c[i], b[50 + i]);
    }
}

TEST(HaltonNodes, FilterAndSurface)
{
    const double h = 0.1;
    const NodeSet s = halton_node_set(h, kBall);
    expect_node_set_invariants(s);
    const double want = 4.0 * M_PI * kBall.radius * kBall.radius / (h * h);
    EXPECT_NEAR(static_cast<double>(s.surface_count()), want, 0.2 * want);
    std::size_t upper = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s.on_surface[i]) {
            upper += s.points[i].z > 0.0 ? 1 : 0;
        } else {
            EXPECT_LE(norm(s.points[i]), kBall.radius - h / 10 + 1e-12);
        }
    }
    const double n = static_cast<double>(s.surface_count());
    EXPECT_NEAR(upper / n, 0.5, 3.0 / std::sqrt(n));
}

TEST(HaltonNodes, InteriorDensityScalesWithCube)
{
    auto interior = [](double h) {
        const NodeSet s = halton_node_set(h, kBall);
        return static_cast<double>(s.size() - s.surface_count());
    };
    const double ratio = interior(0.06) / interior(0.12);
    EXPECT_NEAR(ratio, 8.0, 2.0);
}

TEST(HaltonNodes, RejectsBadSpacing)
{
    EXPECT_THROW(halton_node_set(2.0 * kBall.radius, kBall), ValidationError);
    EXPECT_THROW(halton_node_set(-0.1, kBall), ValidationError);
}

TEST(HaltonNodes, CountTargeting)
{
    const NodeSet s = halton_node_set(halton_h_for_count(3000, kBall.radius), kBall);
    EXPECT_NEAR(static_cast<double>(s.size()), 3000.0, 300.0);
}

TEST(QuasiUniform, CountSpacingAndInvariants)
{
    const NodeSet s = quasi_uniform_node_set(1000, kBall);
    expect_node_set_invariants(s);
    EXPECT_NEAR(static_cast<double>(s.size()), 1000.0, 100.0);
    const auto d = nearest_distances(s);
    const double mean = std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(d.size());
    double var = 0.0;
    for (double v : d) {
        var += (v - mean) * (v - mean);
    }
    const double cv = std::sqrt(var / static_cast<double>(d.size())) / mean;
    EXPECT_LE(cv, 0.25);
    EXPECT_GE(*std::min_element(d.begin(), d.end()) / mean, 0.5);
}

TEST(QuasiUniform, SurfaceOctantsBalanced)
{
    const NodeSet s = quasi_uniform_node_set(3000, kBall);
    std::array<double, 8> count{};
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (!s.on_surface[i]) {
            continue;
        }
        const Point3& p = s.points[i];
        count[(p.x > 0) + 2 * (p.y > 0) + 4 * (p.z > 0)] += 1.0;
    }
    const double mean = static_cast<double>(s.surface_count()) / 8.0;
    for (double c : count) {
        EXPECT_NEAR(c, mean, 0.15 * mean);
    }
}

TEST(QuasiUniform, DeterministicAndMinimal)
{
    const NodeSet a = quasi_uniform_node_set(300, kBall, {7, 120});
    const NodeSet b = quasi_uniform_node_set(300, kBall, {7, 120});
    EXPECT_EQ(a.points, b.points);
    const NodeSet tiny = quasi_uniform_node_set(20, kBall);
    expect_node_set_invariants(tiny);
    EXPECT_GE(tiny.surface_count(), 4u);
    EXPECT_GE(tiny.size() - tiny.surface_count(), 1u);
    EXPECT_THROW(quasi_uniform_node_set(10, kBall), ValidationError);
}

TEST(QuasiUniform, OffCentreBall)
{
    const Ball b{{1.5, -2.0, 0.25}, 0.8};
    const NodeSet s = quasi_uniform_node_set(500, b);
    expect_node_set_invariants(s);
}

TEST(Clustered, DenserNearFocus)
{
    const std::size_t N = 3000;
    const NodeSet q = quasi_uniform_node_set(N, kBall);
    const NodeSet c = clustered_node_set(N, kBall, kBall.center, kBall.radius / 8, kBall.radius / 2);
    expect_node_set_invariants(c);
    EXPECT_NEAR(static_cast<double>(c.size()), static_cast<double>(N), 0.1 * N);
    auto near = [](const NodeSet& s, double r) {
        return std::count_if(s.points.begin(), s.points.end(), [&](const Point3& p) { return norm(p) < r; });
    };
    EXPECT_GT(near(c, kBall.radius / 10), near(q, kBall.radius / 10));
}

TEST(Clustered, EqualSpacingsLookQuasiUniform)
{
    const NodeSet c = clustered_node_set(800, kBall, kBall.center, 0.3, 0.3);
    EXPECT_NEAR(static_cast<double>(c.size()), 800.0, 80.0);
    expect_node_set_invariants(c);
    const auto d = nearest_distances(c);
    const double mean = std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(d.size());
    EXPECT_GE(*std::min_element(d.begin(), d.end()) / mean, 0.5);
}

TEST(Clustered, Errors)
{
    EXPECT_THROW(clustered_node_set(1000, kBall, kBall.center, 0.2, 0.1), ValidationError);
    // far more nodes than the budget allows
    EXPECT_THROW(clustered_node_set(100, kBall, kBall.center, 0.005, 0.01), GenerationError);
}

TEST(NodeSetValidation, RejectsBrokenSets)
{
    NodeSet s;
    s.ball = kBall;
    s.push_back({0, 0, kBall.radius}, true);
    s.push_back({0.1, 0, 0}, false);
    EXPECT_NO_THROW(validate_node_set(s));
    NodeSet off = s;
    off.push_back({0, 0, 0.5 * kBall.radius}, true);
    EXPECT_THROW(validate_node_set(off), ValidationError);
    NodeSet outside = s;
    outside.push_back({0, 0, 2.0}, false);
    EXPECT_THROW(validate_node_set(outside), ValidationError);
    NodeSet dup = s;
    dup.push_back({0.1, 0, 0}, false);
    EXPECT_THROW(validate_node_set(dup), ValidationError);
    NodeSet nan = s;
    nan.push_back({std::nan(""), 0, 0}, false);
    EXPECT_THROW(validate_node_set(nan), ValidationError);
}

TEST(CubeNodes, FillsCube)
{
    const NodeSet s = cube_node_set(1000, 0.5, 1);
    EXPECT_EQ(s.domain, DomainKind::convex_hull);
    EXPECT_NEAR(static_cast<double>(s.size()), 1000.0, 200.0);
    for (const Point3& p : s.points) {
        EXPECT_LE(std::max({std::abs(p.x), std::abs(p.y), std::abs(p.z)}), 0.5 + 1e-15);
    }
}
