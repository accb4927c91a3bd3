#pragma once

#include "ballquad/geometry.hpp"

namespace ballquad::detail {

// Sign-exact geometric predicates. A floating-point filter answers most
// queries; ambiguous ones are re-evaluated with exact expansion arithmetic.

/// Sign of det[b-a, c-a, d-a]: +1 when (a, b, c, d) is right-handed.
int orient3d(const Point3& a, const Point3& b, const Point3& c, const Point3& d);

/// +1 if e lies strictly inside the circumsphere of a right-handed (a, b, c, d),
/// -1 if strictly outside, 0 if cospherical. The sign flips for left-handed input.
int in_sphere(const Point3& a, const Point3& b, const Point3& c, const Point3& d, const Point3& e);

/// Unfiltered exact versions, exposed for testing the filter.
int orient3d_exact(const Point3& a, const Point3& b, const Point3& c, const Point3& d);
int in_sphere_exact(const Point3& a, const Point3& b, const Point3& c, const Point3& d, const Point3& e);

/// Counts how often the exact fallback was needed since program start.
struct PredicateStats {
    unsigned long long orient_exact = 0;
    unsigned long long sphere_exact = 0;
};
PredicateStats predicate_stats();

} // namespace ballquad::detail
