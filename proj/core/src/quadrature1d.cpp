#include "ballquad/quadrature1d.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "ballquad/errors.hpp"

namespace ballquad {

QuadratureRule1D gauss_legendre(int q)
{
    if (q < 1) {
        throw ValidationError("gauss_legendre: order must be >= 1, got " + std::to_string(q));
    }
    QuadratureRule1D rule;
    rule.points.resize(static_cast<std::size_t>(q));
    rule.weights.resize(static_cast<std::size_t>(q));

    // Newton iteration on P_q from the Chebyshev-like initial guess; roots are
    // symmetric so only half are computed.
    const int half = (q + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (q + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= q; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = q * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) {
                break;
            }
        }
        // Recompute derivative at the converged root for the weight.
        double p0 = 1.0;
        double p1 = x;
        for (int k = 2; k <= q; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = q * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);

        const auto lo = static_cast<std::size_t>(i);
        const auto hi = static_cast<std::size_t>(q - 1 - i);
        rule.points[lo] = 0.5 * (1.0 - x);
        rule.points[hi] = 0.5 * (1.0 + x);
        rule.weights[lo] = 0.5 * w;
        rule.weights[hi] = 0.5 * w;
    }
    if (q % 2 == 1) {
        rule.points[static_cast<std::size_t>(q / 2)] = 0.5;
    }
    return rule;
}

} // namespace ballquad
