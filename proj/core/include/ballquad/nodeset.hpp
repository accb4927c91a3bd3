#pragma once

#include <cstdint>
#include <vector>

#include "ballquad/geometry.hpp"

namespace ballquad {

/// Which region the nodes discretise. `convex_hull` is used for polyhedral
/// domains (e.g. the cube) where the tetrahedra cover the domain exactly and
/// no curved boundary slivers exist.
enum class DomainKind { ball, convex_hull };

struct NodeSet {
    std::vector<Point3> points;
    std::vector<std::uint8_t> on_surface;  // 1 = node lies on the boundary surface
    double h = 0.0;                        // nominal spacing
    Ball ball{};
    DomainKind domain = DomainKind::ball;

    std::size_t size() const { return points.size(); }
    std::size_t surface_count() const;
    void push_back(const Point3& p, bool surface)
    {
        points.push_back(p);
        on_surface.push_back(surface ? 1 : 0);
    }
};

/// Tolerance used for "on the sphere" and duplicate checks, relative to the radius.
inline constexpr double kSurfaceTolerance = 1e-12;

/// Throws ValidationError when a ball node set violates its invariants: finite
/// coordinates, surface nodes on the sphere, interior nodes strictly inside and
/// no two nodes closer than 1e-12 * radius.
void validate_node_set(const NodeSet& nodes);

} // namespace ballquad
