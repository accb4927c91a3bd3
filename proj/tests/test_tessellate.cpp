#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <numeric>

#include <Eigen/Dense>
#include <random>
#include <set>

#include "ballquad/errors.hpp"
#include "ballquad/kdtree.hpp"
#include "ballquad/nodegen.hpp"
#include "ballquad/tessellate.hpp"
#include "support.hpp"

using namespace ballquad;

namespace {

const Ball kBall{{0, 0, 0}, unit_volume_radius()};

NodeSet five_points()
{
    NodeSet s;
    s.domain = DomainKind::convex_hull;
    s.push_back({0, 0, 0}, true);
    s.push_back({1, 0, 0}, true);
    s.push_back({0, 1, 0}, true);
    s.push_back({0, 0, 1}, true);
    s.push_back({0.25, 0.25, 0.25}, false);
    return s;
}

// Volume of the convex hull of points on the sphere plus interior points,
// computed from the hull facets only (gift-wrapping-free: every triple whose
// plane has all points on one side is a facet).
double hull_volume_bruteforce(const std::vector<Point3>& p)
{
    Point3 c{};
    for (const auto& q : p) {
        c += q;
    }
    c = c / static_cast<double>(p.size());
    double vol = 0.0;
    const std::size_t n = p.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            for (std::size_t k = j + 1; k < n; ++k) {
                const Point3 nrm = cross(p[j] - p[i], p[k] - p[i]);
                int pos = 0, neg = 0;
                for (std::size_t l = 0; l < n && !(pos && neg); ++l) {
                    const double s = dot(p[l] - p[i], nrm);
                    pos += s > 1e-12;
                    neg += s < -1e-12;
                }
                if (!(pos && neg)) {
                    vol += std::abs(bqtest::det3(p[i] - c, p[j] - c, p[k] - c)) / 6.0;
                }
            }
        }
    }
    return vol;
}

} // namespace

TEST(Delaunay, FivePoints)
{
    const NodeSet s = five_points();
    const Tessellation t = delaunay3(s);
    ASSERT_EQ(t.size(), 4u);
    for (const auto& tet : t.tets) {
        EXPECT_NE(std::find(tet.begin(), tet.end(), 4u), tet.end());
    }
    const auto cls = classify_boundary(t, s);
    EXPECT_TRUE(cls.surface.empty());  // flat hull
    EXPECT_EQ(cls.interior.size(), 4u);
    EXPECT_EQ(t.boundary_faces.size(), 4u);
}

TEST(Delaunay, FivePointsOnSphereAllSurface)
{
    NodeSet s;
    s.ball = {{0, 0, 0}, 1.0};
    const double r = 1.0 / std::sqrt(3.0);
    s.push_back({r, r, r}, true);
    s.push_back({r, -r, -r}, true);
    s.push_back({-r, r, -r}, true);
    s.push_back({-r, -r, r}, true);
    s.push_back({0.01, 0.02, -0.03}, false);
    const Tessellation t = delaunay3(s);
    ASSERT_EQ(t.size(), 4u);
    const auto cls = classify_boundary(t, s);
    EXPECT_EQ(cls.surface.size(), 4u);
    EXPECT_TRUE(cls.interior.empty());
}

TEST(Delaunay, EmptySphereAndManifold)
{
    std::mt19937_64 rng(5);
    std::vector<Point3> pts;
    for (int i = 0; i < 400; ++i) {
        pts.push_back(bqtest::random_in_ball(rng, {0, 0, 0}, 1.0));
    }
    const Tessellation t = delaunay3(pts);
    double vol = 0.0;
    std::map<std::array<std::uint32_t, 3>, int> faces;
    for (std::size_t k = 0; k < t.size(); ++k) {
        const Tetra T = t.tetra(k, pts);
        EXPECT_GT(bqtest::det3(T.b - T.a, T.c - T.a, T.d - T.a), 0.0);
        vol += tet_volume(T);
        for (const auto& f : kTetFaces) {
            std::array<std::uint32_t, 3> key{t.tets[k][f[0]], t.tets[k][f[1]], t.tets[k][f[2]]};
            std::sort(key.begin(), key.end());
            ++faces[key];
        }
        // circumsphere test against all points, in floating point with a margin
        Eigen::Matrix3d A;
        Eigen::Vector3d rhs;
        const Point3 rows[3] = {T.b - T.a, T.c - T.a, T.d - T.a};
        for (int r = 0; r < 3; ++r) {
            A.row(r) << rows[r].x, rows[r].y, rows[r].z;
            rhs(r) = 0.5 * norm2(rows[r]);
        }
        const Eigen::Vector3d c = A.colPivHouseholderQr().solve(rhs);
        const Point3 cc = T.a + Point3{c(0), c(1), c(2)};
        const double R = distance(cc, T.a);
        for (const Point3& p : pts) {
            EXPECT_GE(distance(cc, p), R * (1 - 1e-9));
        }
    }
    std::size_t unshared = 0;
    for (const auto& [key, count] : faces) {
        EXPECT_LE(count, 2);
        unshared += count == 1;
    }
    EXPECT_EQ(unshared, t.boundary_faces.size());
    EXPECT_LE(bqtest::rel_err(vol, hull_volume_bruteforce(pts)), 1e-10);
}

TEST(Delaunay, BoundaryFacesLieOnHull)
{
    std::mt19937_64 rng(6);
    std::vector<Point3> pts;
    for (int i = 0; i < 300; ++i) {
        pts.push_back(bqtest::random_point(rng));
    }
    const Tessellation t = delaunay3(pts);
    for (const auto& bf : t.boundary_faces) {
        const Point3 a = pts[bf.face[0]], b = pts[bf.face[1]], c = pts[bf.face[2]];
        const Point3 n = cross(b - a, c - a);
        int pos = 0, neg = 0;
        for (const Point3& p : pts) {
            const double s = dot(p - a, n);
            pos += s > 1e-12;
            neg += s < -1e-12;
        }
        EXPECT_TRUE(pos == 0 || neg == 0);
        // face ordering follows kTetFaces and the normal points into the tet
        const Tetra T = t.tetra(bf.tet, pts);
        EXPECT_GT(dot(centroid(T) - a, n), 0.0);
    }
}

TEST(Delaunay, CosphericalGridIsHandled)
{
    std::vector<Point3> pts;
    for (int i = 0; i < 5; ++i) {
        for (int j = 0; j < 5; ++j) {
            for (int k = 0; k < 5; ++k) {
                pts.push_back({double(i), double(j), double(k)});
            }
        }
    }
    const Tessellation t = delaunay3(pts);
    double vol = 0.0;
    for (std::size_t k = 0; k < t.size(); ++k) {
        vol += tet_volume(t.tetra(k, pts));
    }
    EXPECT_NEAR(vol, 64.0, 1e-10);
    EXPECT_EQ(delaunay3(pts).tets, t.tets);
}

TEST(Delaunay, Errors)
{
    std::vector<Point3> flat{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}, {0.5, 0.2, 0}};
    EXPECT_THROW(delaunay3(flat), TessellationError);
    EXPECT_THROW(delaunay3(std::vector<Point3>{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}), TessellationError);
    std::vector<Point3> dup{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 0, 0}};
    EXPECT_THROW(delaunay3(dup), TessellationError);
}

TEST(ClassifyBoundary, BallNodes)
{
    const NodeSet s = quasi_uniform_node_set(5000, kBall);
    const Tessellation t = delaunay3(s);
    const auto cls = classify_boundary(t, s);
    EXPECT_EQ(cls.interior.size() + cls.surface.size(), t.size());
    std::set<std::uint32_t> seen(cls.interior.begin(), cls.interior.end());
    for (auto k : cls.surface) {
        EXPECT_FALSE(seen.count(k));
        EXPECT_FALSE(t.faces_of(k).empty());
    }
    for (auto k : cls.interior) {
        EXPECT_TRUE(t.faces_of(k).empty());
    }
    for (const auto& bf : t.boundary_faces) {
        for (auto v : bf.face) {
            EXPECT_TRUE(s.on_surface[v]);
        }
    }
    const double ks = static_cast<double>(cls.surface.size());
    const double twice = 2.0 * static_cast<double>(s.surface_count());
    EXPECT_GT(ks, twice / 2);
    EXPECT_LT(ks, twice * 2);
}

TEST(ClassifyBoundary, OffSphereHullVertexIsInconsistent)
{
    NodeSet s;
    s.ball = {{0, 0, 0}, 1.0};
    const double r = 1.0 / std::sqrt(3.0);
    s.push_back({r, r, r}, true);
    s.push_back({r, -r, -r}, true);
    s.push_back({-r, r, -r}, true);
    s.push_back({-r, -r, r}, true);
    s.push_back({0.9, 0.0, 0.0}, false);  // pokes out of the hull of the four
    const Tessellation t = delaunay3(s);
    EXPECT_THROW(classify_boundary(t, s), DomainInconsistencyError);
}

TEST(Knn, MatchesExhaustiveScan)
{
    std::mt19937_64 rng(7);
    NodeSet s;
    s.domain = DomainKind::convex_hull;
    for (int i = 0; i < 2000; ++i) {
        s.push_back(bqtest::random_point(rng), false);
    }
    const KdTree tree(s.points);
    for (int q = 0; q < 200; ++q) {
        const Point3 x = 1.2 * bqtest::random_point(rng);
        std::vector<std::size_t> order(s.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return norm2(s.points[a] - x) < norm2(s.points[b] - x);
        });
        order.resize(30);
        EXPECT_EQ(tree.knn(x, 30), order);
        EXPECT_EQ(knn(s, x, 30), order);
    }
    EXPECT_EQ(tree.knn(s.points[17], 1), std::vector<std::size_t>{17});
    const auto all = knn(s, {0, 0, 0}, s.size());
    std::set<std::size_t> uniq(all.begin(), all.end());
    EXPECT_EQ(uniq.size(), s.size());
    EXPECT_THROW(knn(s, {0, 0, 0}, s.size() + 1), ValidationError);
}

TEST(Knn, TiesBrokenBySmallerIndex)
{
    NodeSet s;
    s.domain = DomainKind::convex_hull;
    s.push_back({1, 0, 0}, false);
    s.push_back({-1, 0, 0}, false);
    s.push_back({0, 1, 0}, false);
    s.push_back({0, 0, 2}, false);
    EXPECT_EQ(knn(s, {0, 0, 0}, 3), (std::vector<std::size_t>{0, 1, 2}));
    const KdTree tree(s.points);
    EXPECT_EQ(tree.knn({0, 0, 0}, 3), (std::vector<std::size_t>{0, 1, 2}));
}

TEST(Stencil, MidpointFrame)
{
    const NodeSet s = quasi_uniform_node_set(1500, kBall);
    const Tessellation t = delaunay3(s);
    const KdTree tree(s.points);
    for (std::size_t k = 0; k < t.size(); k += 97) {
        const Stencil st = stencil_for_tet(t, s, tree, k, 60);
        const Tetra T = t.tetra(k, s.points);
        const Point3 mid = (T.a + T.b + T.c + T.d) / 4.0;
        EXPECT_NEAR(distance(st.midpoint, mid), 0.0, 1e-15);
        EXPECT_EQ(st.shift, st.midpoint);
        ASSERT_EQ(st.node_indices.size(), 60u);
        double far = 0.0;
        for (auto i : st.node_indices) {
            far = std::max(far, distance(s.points[i], mid));
        }
        EXPECT_GT(st.scale, 0.0);
        EXPECT_DOUBLE_EQ(st.scale, far);
        EXPECT_DOUBLE_EQ(st.scale, distance(s.points[st.node_indices.back()], mid));
        EXPECT_EQ(st.node_indices, knn(s, mid, 60));
        const Stencil plain = stencil_for_tet(t, s, k, 60);
        EXPECT_EQ(plain.node_indices, st.node_indices);
    }
}

TEST(Stencil, FourNearestOnMinimalSet)
{
    const NodeSet s = five_points();
    const Tessellation t = delaunay3(s);
    for (std::size_t k = 0; k < t.size(); ++k) {
        const Stencil st = stencil_for_tet(t, s, k, 4);
        std::vector<std::size_t> order{0, 1, 2, 3, 4};
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return norm2(s.points[a] - st.midpoint) < norm2(s.points[b] - st.midpoint);
        });
        order.resize(4);
        EXPECT_EQ(st.node_indices, order);
        std::vector<std::size_t> verts(t.tets[k].begin(), t.tets[k].end());
        std::sort(verts.begin(), verts.end());
        std::sort(order.begin(), order.end());
        EXPECT_EQ(st.contains_vertices, verts == order);
    }
}
