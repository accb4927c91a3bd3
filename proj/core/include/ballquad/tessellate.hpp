#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "ballquad/geometry.hpp"
#include "ballquad/kdtree.hpp"
#include "ballquad/nodeset.hpp"

namespace ballquad {

using TetIndices = std::array<std::uint32_t, 4>;
using FaceIndices = std::array<std::uint32_t, 3>;

/// Faces of a tetrahedron (a, b, c, d) in the order (a,b,c), (a,d,b), (a,c,d),
/// (b,d,c). For a right-handed tetrahedron each face normal (v1-v0)x(v2-v0)
/// points towards the remaining vertex. Entry f lists local vertex slots.
inline constexpr std::array<std::array<int, 3>, 4> kTetFaces{{{0, 1, 2}, {0, 3, 1}, {0, 2, 3}, {1, 3, 2}}};
/// Local slot of the vertex opposite each face in kTetFaces.
inline constexpr std::array<int, 4> kOppositeVertex{3, 2, 1, 0};

struct BoundaryFace {
    std::uint32_t tet = 0;
    FaceIndices face{};  // global node indices, ordered as in kTetFaces
};

struct Tessellation {
    std::vector<TetIndices> tets;               // all right-handed
    std::vector<BoundaryFace> boundary_faces;   // sorted by tet

    std::size_t size() const { return tets.size(); }
    /// Unshared faces of tetrahedron k (empty for interior tetrahedra).
    std::span<const BoundaryFace> faces_of(std::size_t k) const;
    Tetra tetra(std::size_t k, std::span<const Point3> points) const;
};

/// Delaunay tetrahedralisation of the points. The result covers their convex
/// hull. Cospherical configurations are resolved deterministically by exact
/// predicates. Throws TessellationError for fewer than 4 points, all points
/// coplanar, or duplicates.
Tessellation delaunay3(std::span<const Point3> points);
Tessellation delaunay3(const NodeSet& nodes);

struct BoundaryClassification {
    std::vector<std::uint32_t> interior;  // K_I
    std::vector<std::uint32_t> surface;   // K_S: tetrahedra owning a curved sliver
};

/// Splits tetrahedra into those with and without an unshared face. For ball
/// domains every unshared-face vertex must be a surface node, otherwise a
/// DomainInconsistencyError is thrown. For convex-hull domains the boundary is
/// flat and K_S is empty.
BoundaryClassification classify_boundary(const Tessellation& tess, const NodeSet& nodes);

/// k nearest node indices to `query` (brute force; prefer a KdTree for repeated queries).
std::vector<std::size_t> knn(const NodeSet& nodes, const Point3& query, std::size_t n);

struct Stencil {
    std::size_t tet_index = 0;
    std::vector<std::size_t> node_indices;  // nearest first
    Point3 midpoint{};
    Point3 shift{};
    double scale = 1.0;
    /// False when some vertex of the tetrahedron is not among the stencil nodes.
    bool contains_vertices = true;
};

Stencil stencil_for_tet(const Tessellation& tess, const NodeSet& nodes, const KdTree& index,
                        std::size_t k, std::size_t n);
Stencil stencil_for_tet(const Tessellation& tess, const NodeSet& nodes, std::size_t k, std::size_t n);

} // namespace ballquad
