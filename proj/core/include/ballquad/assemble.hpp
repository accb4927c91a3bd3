#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ballquad/localrbf.hpp"
#include "ballquad/nodeset.hpp"
#include "ballquad/oracle.hpp"
#include "ballquad/tessellate.hpp"

namespace ballquad {

struct WeightParams {
    int m = 2;
    std::size_t n = 0;  // 0 selects recommended_n(m)
    int p = 1;
    int q_lambda1 = 24;
    int q_sliver = 12;
    bool deterministic_reduction = true;
    unsigned threads = 0;  // 0 selects the hardware concurrency

    std::size_t stencil_size() const { return n == 0 ? recommended_n(m) : n; }
};

/// Throws ValidationError for m < 0, p < 0, q < 4, n < M or n > node_count.
void validate_params(const WeightParams& params, std::size_t node_count);

struct AssemblyStats {
    std::size_t tets = 0;
    std::size_t surface_tets = 0;
    std::size_t boundary_faces = 0;
    std::size_t stencils_missing_vertices = 0;
    unsigned threads = 1;
    double seconds_tessellate = 0.0;
    double seconds_local = 0.0;
};

struct QuadratureRule {
    NodeSet nodes;
    std::vector<double> W;
    AssemblyStats stats;

    double sum() const;
};

/// Right-hand side of tetrahedron k in the stencil's physical frame: RBF
/// integrals over the tetrahedron (plus its slivers) centred at each stencil
/// node, then the basis moments with the basis shifted and scaled by the stencil.
Eigen::VectorXd local_rhs(std::size_t k, const Stencil& stencil, const Tessellation& tess, const NodeSet& nodes,
                          const WeightParams& params);

/// Full pipeline: tessellation, stencils, local solves and scatter-add.
QuadratureRule compute_weights(const NodeSet& nodes, const WeightParams& params);
/// Same with a precomputed tessellation of `nodes`.
QuadratureRule compute_weights(const NodeSet& nodes, const Tessellation& tess, const WeightParams& params);

double apply_rule(const QuadratureRule& rule, std::span<const double> samples);
double apply_rule(const QuadratureRule& rule, const TestIntegrand& f);

enum class NodeFamily { quasi, halton, clustered };

NodeFamily parse_family(const std::string& name);
std::string family_name(NodeFamily f);

/// About `target_n` nodes of the given family. Halton sets choose h to hit
/// the count; clustered sets refine towards the ball centre with a 1:4
/// spacing ratio.
NodeSet make_family_nodes(NodeFamily family, std::size_t target_n, const Ball& ball, std::uint64_t seed);

struct ConvergenceRow {
    std::size_t N = 0;
    double error = 0.0;
    double seconds = 0.0;
};

/// Seeds of the random rotations used by convergence_study; rotation i of a
/// study with seed s is random_rotation(rotation_seed(s, i)).
std::uint64_t rotation_seed(std::uint64_t seed, std::size_t i);

/// For each N: nodes, weights (timed), and the largest absolute error over
/// `rotations` random rotations about the centre (the unrotated integrand
/// when rotations = 0).
std::vector<ConvergenceRow> convergence_study(NodeFamily family, const std::vector<std::size_t>& n_list,
                                              const WeightParams& params, const TestIntegrand& integrand,
                                              std::size_t rotations, std::uint64_t seed, const Ball& ball);

/// Largest error of an existing rule over the same rotations.
double max_rotated_error(const QuadratureRule& rule, const TestIntegrand& integrand, double reference,
                         std::size_t rotations, std::uint64_t seed);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(std::span<const double> x, std::span<const double> y);

} // namespace ballquad
