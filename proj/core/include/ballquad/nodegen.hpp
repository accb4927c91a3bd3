#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "ballquad/geometry.hpp"
#include "ballquad/nodeset.hpp"

namespace ballquad {

/// Radical inverse of `index` in `base` (van der Corput).
double radical_inverse(std::uint64_t index, unsigned base);

/// Halton points with prime bases (2, 3) or (2, 3, 5). The first point has
/// sequence index skip + 1, so halton(2, 1, 0) = {(1/2, 1/3)}. Unused
/// coordinates are zero. Throws ValidationError for dim outside {2, 3}.
std::vector<std::array<double, 3>> halton(int dim, std::size_t count, std::size_t skip = 0);

/// Pseudo-random ball nodes: 2D Halton points mapped equal-area onto the sphere
/// (about 4 pi rho^2 / h^2 of them) plus 3D Halton points of the enclosing cube
/// kept when |x - x0| <= rho - h/10.
NodeSet halton_node_set(double h, const Ball& ball);

/// Spacing h for which halton_node_set is expected to give about n nodes.
double halton_h_for_count(std::size_t n, double rho);

struct RelaxOptions {
    std::uint64_t seed = 0;
    int max_iterations = 120;
};

/// Quasi-uniform ball nodes by repulsion relaxation; the node count is within
/// a few percent of target_n and a quasi-uniform shell lies on the sphere.
NodeSet quasi_uniform_node_set(std::size_t target_n, const Ball& ball, const RelaxOptions& opts = {});

/// Nodes whose local spacing follows
///   h(x) = h_near + (h_far - h_near) * min(1, |x - focus| / (rho / 2)).
/// When the requested spacings need fewer than target_n nodes, both are scaled
/// down uniformly to use the budget; when they need more than 1.1 * target_n a
/// GenerationError is raised.
NodeSet clustered_node_set(std::size_t target_n, const Ball& ball, const Point3& focus, double h_near,
                           double h_far, const RelaxOptions& opts = {});

/// Jittered grid filling the cube [-half_width, half_width]^3 with nodes on the
/// faces kept on the faces. Domain kind is convex_hull.
NodeSet cube_node_set(std::size_t target_n, double half_width, std::uint64_t seed = 0);

/// Drops interior nodes that end up on the convex hull of the node set (which
/// would make a hull face with an off-sphere vertex). Returns the number removed.
std::size_t remove_hull_intruders(NodeSet& nodes);

} // namespace ballquad
