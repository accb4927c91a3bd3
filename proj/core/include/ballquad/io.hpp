#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ballquad/assemble.hpp"
#include "ballquad/nodeset.hpp"
#include "ballquad/tessellate.hpp"

namespace ballquad {

/// Shortest decimal string that parses back to exactly v.
std::string format_double(double v);
/// Strict parse of a whole token; throws IoError otherwise.
double parse_double(std::string_view s);

// Node file: `# rho r`, `# center x y z`, `# h h` (and `# domain convex_hull`
// for polyhedral sets), then one `x y z s` line per node.
void write_nodes(std::ostream& out, const NodeSet& nodes);
NodeSet read_nodes(std::istream& in);
void write_nodes(const std::filesystem::path& path, const NodeSet& nodes);
NodeSet read_nodes(const std::filesystem::path& path);

struct WeightsFile {
    Ball ball{};
    std::vector<Point3> points;
    std::vector<double> W;
};

// Weights file: `# N n rho r center x y z`, then `x y z W` lines.
void write_weights(std::ostream& out, const QuadratureRule& rule);
WeightsFile read_weights(std::istream& in);
void write_weights(const std::filesystem::path& path, const QuadratureRule& rule);
WeightsFile read_weights(const std::filesystem::path& path);

// Tet lines `i0 i1 i2 i3`, then `# boundary` and `k f0 f1 f2` per unshared face.
void write_tessellation(std::ostream& out, const Tessellation& tess);
Tessellation read_tessellation(std::istream& in);

/// One sample value per line; `#` lines are skipped.
std::vector<double> read_samples(std::istream& in);
std::vector<double> read_samples(const std::filesystem::path& path);

void write_convergence_csv(std::ostream& out, std::span<const ConvergenceRow> rows);

} // namespace ballquad
