#include "ballquad/assemble.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numbers>
#include <thread>

#include "ballquad/errors.hpp"
#include "ballquad/kdtree.hpp"
#include "ballquad/moments.hpp"
#include "ballquad/nodegen.hpp"
#include "ballquad/quadrature1d.hpp"

namespace ballquad {

void validate_params(const WeightParams& params, std::size_t node_count)
{
    if (params.m < 0) {
        throw ValidationError("m must be >= 0");
    }
    if (params.p < 0) {
        throw ValidationError("p must be >= 0");
    }
    if (params.q_lambda1 < 4 || params.q_sliver < 4) {
        throw ValidationError("quadrature orders must be >= 4");
    }
    const std::size_t M = monomial_count(params.m);
    const std::size_t n = params.stencil_size();
    if (n < M) {
        throw ValidationError("stencil size n = " + std::to_string(n) + " is below M = (m+1)(m+2)(m+3)/6 = " +
                              std::to_string(M) + " for m = " + std::to_string(params.m) +
                              "; the local system is singular for n < (m+1)(m+2)(m+3)/6");
    }
    if (node_count > 0 && n > node_count) {
        throw ValidationError("stencil size n = " + std::to_string(n) + " exceeds the node count " +
                              std::to_string(node_count));
    }
}

double QuadratureRule::sum() const
{
    double s = 0.0;
    for (double w : W) {
        s += w;
    }
    return s;
}

namespace {

double radial(double r2, int e)
{
    if (e == 3) {
        return r2 * std::sqrt(r2);
    }
    return std::pow(r2, 0.5 * e);
}

// RHS of one tetrahedron with all geometry already expressed in the basis
// frame of `basis` (for the physical variant the basis carries the shift).
void fill_rhs(const Tetra& t, std::span<const SliverRegion> slivers, std::span<const Point3> centres,
              RadialPower power, const PolyBasis& basis, const QuadratureRule1D& rule, int q_sliver,
              double* out)
{
    const std::size_t n = centres.size();
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = tet_rbf_integral(t, centres[i], power, rule);
    }
    tet_poly_moments(t, basis, out + n);
    std::vector<double> phi(basis.size());
    for (const SliverRegion& s : slivers) {
        for (const SliverNode& q : sliver_rule(s, q_sliver)) {
            for (std::size_t i = 0; i < n; ++i) {
                out[i] += q.w * radial(norm2(q.x - centres[i]), power.e);
            }
            basis.evaluate(q.x, phi.data());
            for (std::size_t l = 0; l < phi.size(); ++l) {
                out[n + l] += q.w * phi[l];
            }
        }
    }
}

std::vector<SliverRegion> slivers_of(std::size_t k, const Tessellation& tess, const NodeSet& nodes,
                                     const Point3& shift, double scale)
{
    std::vector<SliverRegion> out;
    if (nodes.domain != DomainKind::ball) {
        return out;
    }
    const Ball frame_ball{(nodes.ball.center - shift) / scale, nodes.ball.radius / scale};
    for (const BoundaryFace& f : tess.faces_of(k)) {
        out.push_back({(nodes.points[f.face[0]] - shift) / scale, (nodes.points[f.face[1]] - shift) / scale,
                       (nodes.points[f.face[2]] - shift) / scale, frame_ball});
    }
    return out;
}

Tetra frame_tetra(const Tetra& t, const Point3& shift, double scale)
{
    return {(t.a - shift) / scale, (t.b - shift) / scale, (t.c - shift) / scale, (t.d - shift) / scale};
}

class LocalWorker {
public:
    LocalWorker(const NodeSet& nodes, const Tessellation& tess, const KdTree& tree, const WeightParams& params)
        : nodes_(nodes), tess_(tess), tree_(tree), params_(params), basis_(params.m),
          rule_(gauss_legendre(params.q_lambda1)), n_(params.stencil_size()), M_(basis_.size()),
          A_(static_cast<Eigen::Index>(n_ + M_), static_cast<Eigen::Index>(n_ + M_)),
          B_(static_cast<Eigen::Index>(n_ + M_), 1)
    {
    }

    // Writes the n local weights and their node indices; returns whether the
    // stencil contained all four vertices.
    bool run(std::size_t k, double* w, std::size_t* idx)
    {
        const Stencil st = stencil_for_tet(tess_, nodes_, tree_, k, n_);
        const double s = st.scale;
        centres_.resize(n_);
        for (std::size_t i = 0; i < n_; ++i) {
            centres_[i] = (nodes_.points[st.node_indices[i]] - st.shift) / s;
        }
        fill_saddle_matrix(centres_, PhsKernel{params_.p}, basis_, A_);
        const Tetra t = frame_tetra(tess_.tetra(k, nodes_.points), st.shift, s);
        const auto slivers = slivers_of(k, tess_, nodes_, st.shift, s);
        fill_rhs(t, slivers, centres_, RadialPower{2 * params_.p + 1}, basis_, rule_, params_.q_sliver,
                 B_.data());
        solve_local_inplace(A_, B_, n_, k);
        const double s3 = s * s * s;
        for (std::size_t i = 0; i < n_; ++i) {
            w[i] = B_(static_cast<Eigen::Index>(i), 0) * s3;
            idx[i] = st.node_indices[i];
        }
        return st.contains_vertices;
    }

private:
    const NodeSet& nodes_;
    const Tessellation& tess_;
    const KdTree& tree_;
    WeightParams params_;
    PolyBasis basis_;
    QuadratureRule1D rule_;
    std::size_t n_;
    std::size_t M_;
    Eigen::MatrixXd A_;
    Eigen::MatrixXd B_;
    std::vector<Point3> centres_;
};

unsigned resolve_threads(unsigned requested)
{
    if (requested > 0) {
        return requested;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

// Keeps the failure with the smallest tetrahedron index so error reports do
// not depend on thread scheduling.
struct FirstFailure {
    std::mutex mutex;
    std::size_t tet = std::numeric_limits<std::size_t>::max();
    std::exception_ptr error;

    void record(std::size_t k, std::exception_ptr e)
    {
        std::lock_guard<std::mutex> lock(mutex);
        if (k < tet) {
            tet = k;
            error = std::move(e);
        }
    }
    void rethrow()
    {
        if (error) {
            std::rethrow_exception(error);
        }
    }
};

template <typename Fn>
void run_threads(unsigned count, Fn&& fn)
{
    if (count <= 1) {
        fn(0u);
        return;
    }
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < count; ++t) {
        pool.emplace_back([&fn, t] { fn(t); });
    }
    for (auto& th : pool) {
        th.join();
    }
}

} // namespace

Eigen::VectorXd local_rhs(std::size_t k, const Stencil& stencil, const Tessellation& tess, const NodeSet& nodes,
                          const WeightParams& params)
{
    const PolyBasis basis(params.m, stencil.shift, stencil.scale);
    std::vector<Point3> centres;
    for (std::size_t i : stencil.node_indices) {
        centres.push_back(nodes.points[i]);
    }
    std::vector<SliverRegion> slivers = slivers_of(k, tess, nodes, Point3{}, 1.0);
    Eigen::VectorXd out(static_cast<Eigen::Index>(centres.size() + basis.size()));
    fill_rhs(tess.tetra(k, nodes.points), slivers, centres, RadialPower{2 * params.p + 1}, basis,
             gauss_legendre(params.q_lambda1), params.q_sliver, out.data());
    return out;
}

QuadratureRule compute_weights(const NodeSet& nodes, const WeightParams& params)
{
    validate_params(params, nodes.size());
    validate_node_set(nodes);
    const auto t0 = std::chrono::steady_clock::now();
    const Tessellation tess = delaunay3(nodes);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    QuadratureRule rule = compute_weights(nodes, tess, params);
    rule.stats.seconds_tessellate = secs;
    return rule;
}

QuadratureRule compute_weights(const NodeSet& nodes, const Tessellation& tess, const WeightParams& params)
{
    validate_params(params, nodes.size());
    const BoundaryClassification cls = classify_boundary(tess, nodes);
    const auto t0 = std::chrono::steady_clock::now();

    QuadratureRule rule;
    rule.nodes = nodes;
    rule.W.assign(nodes.size(), 0.0);
    rule.stats.tets = tess.size();
    rule.stats.surface_tets = cls.surface.size();
    rule.stats.boundary_faces = nodes.domain == DomainKind::ball ? tess.boundary_faces.size() : 0;
    const unsigned threads = resolve_threads(params.threads);
    rule.stats.threads = threads;

    const KdTree tree(nodes.points);
    const std::size_t n = params.stencil_size();
    const std::size_t K = tess.size();
    FirstFailure failure;
    std::atomic<std::size_t> missing{0};

    if (params.deterministic_reduction) {
        // Waves of tetrahedra: local weights are computed in parallel into a
        // buffer, then added to W in tetrahedron order by one thread.
        constexpr std::size_t kWave = 1024;
        std::vector<double> wbuf(kWave * n);
        std::vector<std::size_t> ibuf(kWave * n);
        for (std::size_t start = 0; start < K; start += kWave) {
            const std::size_t count = std::min(kWave, K - start);
            std::atomic<std::size_t> next{0};
            run_threads(std::min<unsigned>(threads, static_cast<unsigned>(count)), [&](unsigned) {
                LocalWorker worker(nodes, tess, tree, params);
                for (std::size_t j = next++; j < count; j = next++) {
                    try {
                        if (!worker.run(start + j, &wbuf[j * n], &ibuf[j * n])) {
                            ++missing;
                        }
                    } catch (...) {
                        failure.record(start + j, std::current_exception());
                    }
                }
            });
            failure.rethrow();
            for (std::size_t j = 0; j < count * n; ++j) {
                rule.W[ibuf[j]] += wbuf[j];
            }
        }
    } else {
        std::vector<std::vector<double>> partial(threads, std::vector<double>(nodes.size(), 0.0));
        std::atomic<std::size_t> next{0};
        run_threads(threads, [&](unsigned t) {
            LocalWorker worker(nodes, tess, tree, params);
            std::vector<double> w(n);
            std::vector<std::size_t> idx(n);
            auto& mine = partial[t];
            for (std::size_t k = next++; k < K; k = next++) {
                try {
                    if (!worker.run(k, w.data(), idx.data())) {
                        ++missing;
                    }
                    for (std::size_t i = 0; i < n; ++i) {
                        mine[idx[i]] += w[i];
                    }
                } catch (...) {
                    failure.record(k, std::current_exception());
                }
            }
        });
        failure.rethrow();
        for (const auto& part : partial) {
            for (std::size_t i = 0; i < nodes.size(); ++i) {
                rule.W[i] += part[i];
            }
        }
    }
    rule.stats.stencils_missing_vertices = missing.load();
    rule.stats.seconds_local = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rule;
}

double apply_rule(const QuadratureRule& rule, std::span<const double> samples)
{
    if (samples.size() != rule.W.size()) {
        throw ValidationError("apply_rule: " + std::to_string(samples.size()) + " samples for " +
                              std::to_string(rule.W.size()) + " weights");
    }
    double s = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        s += rule.W[i] * samples[i];
    }
    return s;
}

double apply_rule(const QuadratureRule& rule, const TestIntegrand& f)
{
    std::vector<double> samples(rule.nodes.size());
    f.evaluate_many(rule.nodes.points, samples);
    return apply_rule(rule, samples);
}

NodeFamily parse_family(const std::string& name)
{
    if (name == "quasi") {
        return NodeFamily::quasi;
    }
    if (name == "halton") {
        return NodeFamily::halton;
    }
    if (name == "clustered") {
        return NodeFamily::clustered;
    }
    throw ValidationError("unknown node family '" + name + "' (expected quasi|halton|clustered)");
}

std::string family_name(NodeFamily f)
{
    switch (f) {
    case NodeFamily::quasi:
        return "quasi";
    case NodeFamily::halton:
        return "halton";
    case NodeFamily::clustered:
        return "clustered";
    }
    return "?";
}

NodeSet make_family_nodes(NodeFamily family, std::size_t target_n, const Ball& ball, std::uint64_t seed)
{
    switch (family) {
    case NodeFamily::quasi:
        return quasi_uniform_node_set(target_n, ball, RelaxOptions{seed, 120});
    case NodeFamily::halton:
        return halton_node_set(halton_h_for_count(target_n, ball.radius), ball);
    case NodeFamily::clustered:
        return clustered_node_set(target_n, ball, ball.center, ball.radius / 8.0, ball.radius / 2.0,
                                  RelaxOptions{seed, 120});
    }
    throw ValidationError("unknown node family");
}

std::uint64_t rotation_seed(std::uint64_t seed, std::size_t i)
{
    // splitmix64 of (seed, i)
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(i) + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double max_rotated_error(const QuadratureRule& rule, const TestIntegrand& integrand, double reference,
                         std::size_t rotations, std::uint64_t seed)
{
    const TestIntegrand f = integrand.centred_at(rule.nodes.ball.center);
    if (rotations == 0) {
        return std::abs(apply_rule(rule, f) - reference);
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < rotations; ++i) {
        const TestIntegrand g = f.rotated(random_rotation(rotation_seed(seed, i)));
        worst = std::max(worst, std::abs(apply_rule(rule, g) - reference));
    }
    return worst;
}

std::vector<ConvergenceRow> convergence_study(NodeFamily family, const std::vector<std::size_t>& n_list,
                                              const WeightParams& params, const TestIntegrand& integrand,
                                              std::size_t rotations, std::uint64_t seed, const Ball& ball)
{
    const TestIntegrand f = integrand.centred_at(ball.center);
    const double reference = reference_value(f, ball);
    std::vector<ConvergenceRow> rows;
    for (std::size_t target : n_list) {
        const NodeSet nodes = make_family_nodes(family, target, ball, seed);
        const auto t0 = std::chrono::steady_clock::now();
        const QuadratureRule rule = compute_weights(nodes, params);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        rows.push_back({nodes.size(), max_rotated_error(rule, f, reference, rotations, seed), secs});
    }
    return rows;
}

double loglog_slope(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size() || x.size() < 2) {
        throw ValidationError("loglog_slope: need at least two paired values");
    }
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const auto n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]);
        const double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

} // namespace ballquad
