#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "ballquad/geometry.hpp"
#include "ballquad/nodeset.hpp"
#include "ballquad/tessellate.hpp"

namespace ballquad {

/// Polyharmonic spline phi(r) = r^(2p+1).
struct PhsKernel {
    int p = 1;
    int exponent() const { return 2 * p + 1; }
};

double kernel_eval(const PhsKernel& k, double r);

/// Number of trivariate monomials of total degree <= m.
std::size_t monomial_count(int m);

/// Default stencil size (m+1)(m+2)(m+3).
std::size_t recommended_n(int m);

/// Monomials of total degree <= m in the coordinates (x - shift) / scale,
/// graded lexicographic: 1, x, y, z, x^2, xy, xz, y^2, yz, z^2, ...
class PolyBasis {
public:
    explicit PolyBasis(int m, const Point3& shift = {}, double scale = 1.0);

    int degree() const { return m_; }
    std::size_t size() const { return exps_.size(); }
    const std::vector<std::array<int, 3>>& exponents() const { return exps_; }
    const Point3& shift() const { return shift_; }
    double scale() const { return scale_; }

    /// For term l > 0: the term it is built from and the coordinate multiplied
    /// in, so term(l) = term(parent(l)) * y[axis(l)].
    std::size_t parent(std::size_t l) const { return parent_[l]; }
    int axis(std::size_t l) const { return axis_[l]; }

    Point3 to_frame(const Point3& x) const { return (x - shift_) / scale_; }
    /// Writes all size() terms at x (physical coordinates) into out.
    void evaluate(const Point3& x, double* out) const;
    /// Same, for a point already in frame coordinates.
    void evaluate_frame(const Point3& y, double* out) const;

private:
    int m_;
    Point3 shift_;
    double scale_;
    std::vector<std::array<int, 3>> exps_;
    std::vector<std::size_t> parent_;
    std::vector<int> axis_;
};

struct LocalSystem {
    Eigen::MatrixXd A;  // [[Phi, P], [P^T, 0]]
    Eigen::VectorXd I;
    Eigen::VectorXd w;
    std::size_t n = 0;
    std::size_t M = 0;
    std::size_t tet_index = 0;
};

/// Fills the saddle matrix for the given centres: Phi from pairwise distances
/// of `centres`, P from the basis evaluated at them. A must be (n+M)x(n+M).
void fill_saddle_matrix(std::span<const Point3> centres, const PhsKernel& kernel, const PolyBasis& basis,
                        Eigen::Ref<Eigen::MatrixXd> A);

LocalSystem assemble_A(const Stencil& stencil, const NodeSet& nodes, const PhsKernel& kernel,
                       const PolyBasis& basis);

/// Solves A [w; mu] = I and returns w (the first n entries). Throws
/// LocalSingularityError when n < M, when the reciprocal condition estimate
/// falls below 1e-14, or when the residual exceeds 1e-10 |I|.
Eigen::VectorXd solve_local(const Eigen::MatrixXd& A, const Eigen::VectorXd& I, std::size_t n,
                            std::size_t tet_index = 0);

/// Multi right-hand-side variant used by the assembly pipeline; B holds one
/// column per right-hand side and is overwritten by the solution.
void solve_local_inplace(const Eigen::MatrixXd& A, Eigen::Ref<Eigen::MatrixXd> B, std::size_t n,
                         std::size_t tet_index = 0);

} // namespace ballquad
