#pragma once

#include <vector>

namespace ballquad {

/// Gauss-Legendre rule mapped to [0, 1]. Exact for polynomials of degree <= 2q-1.
struct QuadratureRule1D {
    std::vector<double> points;
    std::vector<double> weights;

    int order() const { return static_cast<int>(points.size()); }
};

/// Throws ValidationError for q < 1.
QuadratureRule1D gauss_legendre(int q);

} // namespace ballquad
