#include "ballquad/tessellate.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ballquad/errors.hpp"

namespace ballquad {

std::span<const BoundaryFace> Tessellation::faces_of(std::size_t k) const
{
    const auto lo = std::lower_bound(boundary_faces.begin(), boundary_faces.end(), k,
                                     [](const BoundaryFace& f, std::size_t key) { return f.tet < key; });
    auto hi = lo;
    while (hi != boundary_faces.end() && hi->tet == k) {
        ++hi;
    }
    return {boundary_faces.data() + (lo - boundary_faces.begin()), static_cast<std::size_t>(hi - lo)};
}

Tetra Tessellation::tetra(std::size_t k, std::span<const Point3> points) const
{
    const TetIndices& t = tets[k];
    return {points[t[0]], points[t[1]], points[t[2]], points[t[3]]};
}

BoundaryClassification classify_boundary(const Tessellation& tess, const NodeSet& nodes)
{
    BoundaryClassification out;
    if (nodes.domain == DomainKind::convex_hull) {
        out.interior.resize(tess.size());
        for (std::size_t k = 0; k < tess.size(); ++k) {
            out.interior[k] = static_cast<std::uint32_t>(k);
        }
        return out;
    }
    const double tol = kSurfaceTolerance * nodes.ball.radius;
    for (const BoundaryFace& bf : tess.boundary_faces) {
        for (std::uint32_t v : bf.face) {
            const double r = distance(nodes.points[v], nodes.ball.center);
            if (!nodes.on_surface[v] || std::abs(r - nodes.ball.radius) > tol) {
                throw DomainInconsistencyError(
                    "classify_boundary: unshared face of tetrahedron " + std::to_string(bf.tet) +
                    " has vertex " + std::to_string(v) + " off the sphere (|x - x0| = " + std::to_string(r) +
                    ", radius " + std::to_string(nodes.ball.radius) + ")");
            }
        }
    }
    std::size_t f = 0;
    for (std::size_t k = 0; k < tess.size(); ++k) {
        bool has_face = false;
        while (f < tess.boundary_faces.size() && tess.boundary_faces[f].tet == k) {
            has_face = true;
            ++f;
        }
        (has_face ? out.surface : out.interior).push_back(static_cast<std::uint32_t>(k));
    }
    return out;
}

std::vector<std::size_t> knn(const NodeSet& nodes, const Point3& query, std::size_t n)
{
    if (n > nodes.size()) {
        throw ValidationError("knn: n = " + std::to_string(n) + " exceeds node count " + std::to_string(nodes.size()));
    }
    std::vector<std::pair<double, std::size_t>> all(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        all[i] = {norm2(nodes.points[i] - query), i};
    }
    std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(n), all.end());
    std::vector<std::size_t> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = all[i].second;
    }
    return out;
}

namespace {

Stencil finish_stencil(const Tessellation& tess, const NodeSet& nodes, std::size_t k,
                       std::vector<std::size_t> indices)
{
    Stencil s;
    s.tet_index = k;
    const Tetra t = tess.tetra(k, nodes.points);
    s.midpoint = centroid(t);
    s.shift = s.midpoint;
    double far = 0.0;
    for (std::size_t i : indices) {
        far = std::max(far, distance(nodes.points[i], s.midpoint));
    }
    s.scale = far > 0.0 ? far : 1.0;
    for (std::uint32_t v : tess.tets[k]) {
        if (std::find(indices.begin(), indices.end(), v) == indices.end()) {
            s.contains_vertices = false;
        }
    }
    s.node_indices = std::move(indices);
    return s;
}

} // namespace

Stencil stencil_for_tet(const Tessellation& tess, const NodeSet& nodes, const KdTree& index, std::size_t k,
                        std::size_t n)
{
    const Tetra t = tess.tetra(k, nodes.points);
    return finish_stencil(tess, nodes, k, index.knn(centroid(t), n));
}

Stencil stencil_for_tet(const Tessellation& tess, const NodeSet& nodes, std::size_t k, std::size_t n)
{
    const Tetra t = tess.tetra(k, nodes.points);
    return finish_stencil(tess, nodes, k, knn(nodes, centroid(t), n));
}

} // namespace ballquad
