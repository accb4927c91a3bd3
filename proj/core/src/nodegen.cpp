#include "ballquad/nodegen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "ballquad/errors.hpp"
#include "ballquad/kdtree.hpp"
#include "ballquad/tessellate.hpp"

namespace ballquad {

std::size_t NodeSet::surface_count() const
{
    return static_cast<std::size_t>(std::count(on_surface.begin(), on_surface.end(), std::uint8_t{1}));
}

void validate_node_set(const NodeSet& nodes)
{
    if (nodes.on_surface.size() != nodes.points.size()) {
        throw ValidationError("node set: surface flags do not match point count");
    }
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (!is_finite(nodes.points[i])) {
            throw ValidationError("node set: non-finite coordinates at node " + std::to_string(i));
        }
    }
    const double rho = nodes.ball.radius;
    if (nodes.domain == DomainKind::ball) {
        if (!(rho > 0.0)) {
            throw ValidationError("node set: ball radius must be positive");
        }
        const double tol = kSurfaceTolerance * rho;
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            const double r = distance(nodes.points[i], nodes.ball.center);
            if (nodes.on_surface[i] && std::abs(r - rho) > tol) {
                throw ValidationError("node set: surface node " + std::to_string(i) + " is off the sphere by " +
                                      std::to_string(r - rho));
            }
            if (!nodes.on_surface[i] && !(r < rho)) {
                throw ValidationError("node set: interior node " + std::to_string(i) + " is not inside the ball");
            }
        }
    }
    if (nodes.size() < 2) {
        return;
    }
    const double dup_tol = kSurfaceTolerance * (rho > 0.0 ? rho : 1.0);
    const KdTree tree(nodes.points);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const auto nn = tree.knn(nodes.points[i], 2);
        const std::size_t other = nn[0] == i ? nn[1] : nn[0];
        if (distance(nodes.points[i], nodes.points[other]) <= dup_tol) {
            throw ValidationError("node set: nodes " + std::to_string(i) + " and " + std::to_string(other) +
                                  " coincide");
        }
    }
}

double radical_inverse(std::uint64_t index, unsigned base)
{
    double result = 0.0;
    double f = 1.0 / base;
    while (index > 0) {
        result += f * static_cast<double>(index % base);
        index /= base;
        f /= base;
    }
    return result;
}

std::vector<std::array<double, 3>> halton(int dim, std::size_t count, std::size_t skip)
{
    if (dim != 2 && dim != 3) {
        throw ValidationError("halton: dimension must be 2 or 3, got " + std::to_string(dim));
    }
    constexpr unsigned kBases[3] = {2, 3, 5};
    std::vector<std::array<double, 3>> out(count, std::array<double, 3>{0.0, 0.0, 0.0});
    for (std::size_t i = 0; i < count; ++i) {
        const std::uint64_t index = skip + i + 1;
        for (int d = 0; d < dim; ++d) {
            out[i][static_cast<std::size_t>(d)] = radical_inverse(index, kBases[d]);
        }
    }
    return out;
}

namespace {

Point3 sphere_point(const Ball& ball, double z, double azimuth)
{
    const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
    return ball.center + ball.radius * Point3{s * std::cos(azimuth), s * std::sin(azimuth), z};
}

// Pushes p radially onto the sphere.
Point3 snap_to_sphere(const Ball& ball, const Point3& p)
{
    const Point3 d = p - ball.center;
    return ball.center + d * (ball.radius / norm(d));
}

} // namespace

NodeSet halton_node_set(double h, const Ball& ball)
{
    const double rho = ball.radius;
    if (!(h > 0.0) || !(h < rho)) {
        throw ValidationError("halton_node_set: need 0 < h < rho");
    }
    const auto surface_count = static_cast<std::size_t>(std::llround(4.0 * std::numbers::pi * rho * rho / (h * h)));
    if (surface_count < 4) {
        throw ValidationError("halton_node_set: h is too large to place 4 surface nodes");
    }
    NodeSet nodes;
    nodes.ball = ball;
    nodes.h = h;
    for (const auto& uv : halton(2, surface_count)) {
        // Equal-area cylindrical map: z uniform in [-1, 1].
        nodes.push_back(sphere_point(ball, 2.0 * uv[0] - 1.0, 2.0 * std::numbers::pi * uv[1]), true);
    }
    const double side = 2.0 * rho / h;
    const auto candidates = static_cast<std::size_t>(std::llround(side * side * side));
    const double keep_radius = rho - h / 10.0;
    for (const auto& u : halton(3, candidates)) {
        const Point3 p = ball.center + Point3{(2.0 * u[0] - 1.0) * rho, (2.0 * u[1] - 1.0) * rho,
                                              (2.0 * u[2] - 1.0) * rho};
        if (distance(p, ball.center) <= keep_radius) {
            nodes.push_back(p, false);
        }
    }
    remove_hull_intruders(nodes);
    validate_node_set(nodes);
    return nodes;
}

double halton_h_for_count(std::size_t n, double rho)
{
    if (n < 20 || !(rho > 0.0)) {
        throw ValidationError("halton_h_for_count: need n >= 20 and rho > 0");
    }
    auto expected = [rho](double h) {
        const double surface = std::round(4.0 * std::numbers::pi * rho * rho / (h * h));
        const double kept = (rho - h / 10.0) / rho;
        return surface + std::pow(2.0 * rho / h, 3) * std::numbers::pi / 6.0 * kept * kept * kept;
    };
    double lo = 1e-4 * rho;
    double hi = 0.9 * rho;
    for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        (expected(mid) > static_cast<double>(n) ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

namespace {

// Relative spacing g(x); the generator uses scale * g(x) as target spacing.
struct SpacingShape {
    Point3 focus{};
    double near = 1.0;
    double far = 1.0;
    double blend = 1.0;

    double operator()(const Point3& x) const
    {
        if (near == far) {
            return near;
        }
        return near + (far - near) * std::min(1.0, distance(x, focus) / blend);
    }
    double min() const { return std::min(near, far); }
};

constexpr double kHexArea = 0.8660254037844386;      // area per node of a hexagonal surface packing
constexpr double kPackVolume = 0.7071067811865476;   // volume per node of a close packing
constexpr double kInnerGap = 0.75;                   // interior nodes stay this many spacings below the sphere
constexpr double kRepelFactor = 1.2;

struct CountModel {
    std::vector<Point3> surface_samples;
    std::vector<Point3> volume_samples;
};

CountModel make_count_model(const Ball& ball)
{
    CountModel m;
    const std::size_t ns = 4096;
    for (std::size_t i = 0; i < ns; ++i) {
        const double z = 1.0 - (2.0 * i + 1.0) / ns;
        m.surface_samples.push_back(sphere_point(ball, z, i * std::numbers::pi * (3.0 - std::sqrt(5.0))));
    }
    for (const auto& u : halton(3, 40000)) {
        const Point3 d{2.0 * u[0] - 1.0, 2.0 * u[1] - 1.0, 2.0 * u[2] - 1.0};
        if (norm2(d) <= 1.0) {
            m.volume_samples.push_back(ball.center + ball.radius * d);
        }
    }
    return m;
}

struct ExpectedCounts {
    double surface = 0.0;
    double interior = 0.0;
    double total() const { return surface + interior; }
};

ExpectedCounts expected_counts(const CountModel& m, const Ball& ball, const SpacingShape& g, double scale)
{
    ExpectedCounts c;
    double acc = 0.0;
    for (const Point3& p : m.surface_samples) {
        const double hs = scale * g(p);
        acc += 1.0 / (hs * hs);
    }
    c.surface = ball.radius * ball.radius * 4.0 * std::numbers::pi * acc /
                static_cast<double>(m.surface_samples.size()) / kHexArea;
    acc = 0.0;
    for (const Point3& p : m.volume_samples) {
        const double hs = scale * g(p);
        if (distance(p, ball.center) < ball.radius - kInnerGap * hs) {
            acc += 1.0 / (hs * hs * hs);
        }
    }
    c.interior = ball.volume() * acc / static_cast<double>(m.volume_samples.size()) / kPackVolume;
    return c;
}

double solve_scale(const CountModel& m, const Ball& ball, const SpacingShape& g, double target)
{
    double lo = 1e-6 * ball.radius / g.min();
    double hi = 10.0 * ball.radius / g.min();
    for (int it = 0; it < 200; ++it) {
        const double mid = std::sqrt(lo * hi);
        if (expected_counts(m, ball, g, mid).total() > target) {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi / lo < 1.0 + 1e-12) {
            break;
        }
    }
    return std::sqrt(lo * hi);
}

Point3 random_unit(std::mt19937_64& rng)
{
    std::normal_distribution<double> gauss;
    for (;;) {
        const Point3 p{gauss(rng), gauss(rng), gauss(rng)};
        const double n = norm(p);
        if (n > 1e-12) {
            return p / n;
        }
    }
}

NodeSet relaxed_node_set(std::size_t target_n, const Ball& ball, const SpacingShape& g, double scale,
                         const RelaxOptions& opts, const CountModel& model)
{
    const ExpectedCounts counts = expected_counts(model, ball, g, scale);
    const auto n_surf = std::max<std::size_t>(4, static_cast<std::size_t>(std::llround(counts.surface)));
    const std::size_t n_int = target_n > n_surf ? target_n - n_surf : 1;
    const double rho = ball.radius;
    const bool uniform = g.near == g.far;

    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    std::vector<Point3> pts;
    pts.reserve(n_surf + n_int);
    if (uniform) {
        const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
        for (std::size_t i = 0; i < n_surf; ++i) {
            const double z = 1.0 - (2.0 * i + 1.0) / static_cast<double>(n_surf);
            pts.push_back(sphere_point(ball, z, static_cast<double>(i) * golden));
        }
    } else {
        while (pts.size() < n_surf) {
            const Point3 p = ball.center + rho * random_unit(rng);
            const double ratio = g.min() / g(p);
            if (unif(rng) < ratio * ratio) {
                pts.push_back(p);
            }
        }
    }
    while (pts.size() < n_surf + n_int) {
        const Point3 d{2.0 * unif(rng) - 1.0, 2.0 * unif(rng) - 1.0, 2.0 * unif(rng) - 1.0};
        if (norm2(d) > 1.0) {
            continue;
        }
        const Point3 p = ball.center + rho * d;
        const double hs = scale * g(p);
        if (distance(p, ball.center) >= rho - kInnerGap * hs) {
            continue;
        }
        const double ratio = g.min() / g(p);
        if (unif(rng) < ratio * ratio * ratio) {
            pts.push_back(p);
        }
    }

    // Repulsion-only relaxation: every pair closer than the local target length
    // pushes apart. Surface nodes move tangentially and are re-projected.
    std::vector<Point3> move(pts.size());
    std::vector<std::size_t> nbrs;
    bool converged = false;
    for (int iter = 0; iter < opts.max_iterations && !converged; ++iter) {
        const KdTree tree(pts);
        double worst = 0.0;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const bool surf = i < n_surf;
            const double hi_local = scale * g(pts[i]);
            tree.radius_search(pts[i], kRepelFactor * hi_local * 1.5, nbrs);
            Point3 f{};
            for (std::size_t j : nbrs) {
                if (j == i || (surf && j >= n_surf)) {
                    continue;
                }
                const Point3 d = pts[i] - pts[j];
                const double len = norm(d);
                const double target = kRepelFactor * scale * g((pts[i] + pts[j]) * 0.5);
                if (len < target && len > 0.0) {
                    f += d * ((target - len) / len);
                }
            }
            Point3 step = 0.2 * f;
            if (surf) {
                const Point3 radial = (pts[i] - ball.center) / rho;
                step -= dot(step, radial) * radial;
            }
            const double limit = 0.5 * hi_local;
            const double len = norm(step);
            if (len > limit) {
                step *= limit / len;
            }
            move[i] = step;
            worst = std::max(worst, len / hi_local);
        }
        for (std::size_t i = 0; i < pts.size(); ++i) {
            Point3 p = pts[i] + move[i];
            if (i < n_surf) {
                p = snap_to_sphere(ball, p);
            } else {
                const double cap = rho - kInnerGap * scale * g(p);
                const Point3 d = p - ball.center;
                const double r = norm(d);
                if (r > cap) {
                    p = ball.center + d * (cap / r);
                }
            }
            pts[i] = p;
        }
        converged = worst < 1e-3;
    }

    NodeSet nodes;
    nodes.ball = ball;
    double hsum = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const bool surf = i < n_surf;
        // Final exact snap so surface nodes satisfy the on-sphere tolerance.
        nodes.push_back(surf ? snap_to_sphere(ball, pts[i]) : pts[i], surf);
        if (surf) {
            hsum += scale * g(pts[i]);
        }
    }
    nodes.h = hsum / static_cast<double>(n_surf);

    // Quality: nearest-neighbour distance relative to the local target spacing.
    const KdTree tree(nodes.points);
    double min_ratio = 1e300;
    double mean_ratio = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const auto nn = tree.knn(nodes.points[i], 2);
        const std::size_t other = nn[0] == i ? nn[1] : nn[0];
        const double ratio = distance(nodes.points[i], nodes.points[other]) / (scale * g(nodes.points[i]));
        min_ratio = std::min(min_ratio, ratio);
        mean_ratio += ratio;
    }
    mean_ratio /= static_cast<double>(nodes.size());
    if (!(min_ratio >= 0.5 * mean_ratio)) {
        throw GenerationError("node relaxation did not converge after " + std::to_string(opts.max_iterations) +
                              " iterations (min/mean spacing ratio " + std::to_string(min_ratio / mean_ratio) +
                              ")");
    }
    remove_hull_intruders(nodes);
    validate_node_set(nodes);
    return nodes;
}

} // namespace

NodeSet quasi_uniform_node_set(std::size_t target_n, const Ball& ball, const RelaxOptions& opts)
{
    if (target_n < 20) {
        throw ValidationError("quasi_uniform_node_set: target N must be >= 20");
    }
    if (!(ball.radius > 0.0)) {
        throw ValidationError("quasi_uniform_node_set: radius must be positive");
    }
    const SpacingShape g{};
    const CountModel model = make_count_model(ball);
    const double scale = solve_scale(model, ball, g, static_cast<double>(target_n));
    return relaxed_node_set(target_n, ball, g, scale, opts, model);
}

NodeSet clustered_node_set(std::size_t target_n, const Ball& ball, const Point3& focus, double h_near,
                           double h_far, const RelaxOptions& opts)
{
    if (target_n < 20) {
        throw ValidationError("clustered_node_set: target N must be >= 20");
    }
    if (!(h_near > 0.0) || !(h_near <= h_far)) {
        throw ValidationError("clustered_node_set: need 0 < h_near <= h_far");
    }
    const SpacingShape g{focus, h_near, h_far, 0.5 * ball.radius};
    const CountModel model = make_count_model(ball);
    const double needed = expected_counts(model, ball, g, 1.0).total();
    if (needed > 1.1 * static_cast<double>(target_n)) {
        throw GenerationError("clustered_node_set: spacing h_near = " + std::to_string(h_near) + " needs about " +
                              std::to_string(static_cast<long long>(needed)) + " nodes, over the budget of " +
                              std::to_string(target_n));
    }
    const double scale = solve_scale(model, ball, g, static_cast<double>(target_n));
    return relaxed_node_set(target_n, ball, g, scale, opts, model);
}

NodeSet cube_node_set(std::size_t target_n, double half_width, std::uint64_t seed)
{
    if (target_n < 8 || !(half_width > 0.0)) {
        throw ValidationError("cube_node_set: need target N >= 8 and positive half width");
    }
    const auto per_side = std::max<long long>(2, std::llround(std::cbrt(static_cast<double>(target_n))));
    const long long k = per_side - 1;
    const double s = 2.0 * half_width / static_cast<double>(k);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> jitter(-0.2 * s, 0.2 * s);
    NodeSet nodes;
    nodes.domain = DomainKind::convex_hull;
    nodes.ball = Ball{{0.0, 0.0, 0.0}, half_width * std::sqrt(3.0)};
    nodes.h = s;
    for (long long i = 0; i <= k; ++i) {
        for (long long j = 0; j <= k; ++j) {
            for (long long l = 0; l <= k; ++l) {
                const long long idx[3] = {i, j, l};
                Point3 p{};
                bool surface = false;
                for (int d = 0; d < 3; ++d) {
                    const bool fixed = idx[d] == 0 || idx[d] == k;
                    surface = surface || fixed;
                    p[d] = -half_width + static_cast<double>(idx[d]) * s + (fixed ? 0.0 : jitter(rng));
                }
                nodes.push_back(p, surface);
            }
        }
    }
    return nodes;
}

std::size_t remove_hull_intruders(NodeSet& nodes)
{
    if (nodes.domain != DomainKind::ball) {
        return 0;
    }
    std::size_t removed = 0;
    for (int round = 0; round < 8; ++round) {
        const Tessellation tess = delaunay3(nodes);
        std::vector<std::uint8_t> drop(nodes.size(), 0);
        bool any = false;
        for (const BoundaryFace& bf : tess.boundary_faces) {
            for (std::uint32_t v : bf.face) {
                if (!nodes.on_surface[v]) {
                    drop[v] = 1;
                    any = true;
                }
            }
        }
        if (!any) {
            return removed;
        }
        NodeSet kept;
        kept.ball = nodes.ball;
        kept.h = nodes.h;
        kept.domain = nodes.domain;
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            if (!drop[i]) {
                kept.push_back(nodes.points[i], nodes.on_surface[i] != 0);
            } else {
                ++removed;
            }
        }
        nodes = std::move(kept);
    }
    throw GenerationError("remove_hull_intruders: interior nodes keep appearing on the hull");
}

} // namespace ballquad
