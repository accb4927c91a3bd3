#include "ballquad/localrbf.hpp"

#include <cmath>
#include <string>

#include "ballquad/errors.hpp"

namespace ballquad {

double kernel_eval(const PhsKernel& k, double r)
{
    if (k.p < 0) {
        throw ValidationError("kernel_eval: p must be >= 0");
    }
    if (!(r >= 0.0)) {
        throw ValidationError("kernel_eval: r must be >= 0, got " + std::to_string(r));
    }
    double out = r;
    const double r2 = r * r;
    for (int i = 0; i < k.p; ++i) {
        out *= r2;
    }
    return out;
}

std::size_t monomial_count(int m)
{
    if (m < 0) {
        throw ValidationError("monomial_count: m must be >= 0");
    }
    const auto u = static_cast<std::size_t>(m);
    return (u + 1) * (u + 2) * (u + 3) / 6;
}

std::size_t recommended_n(int m)
{
    if (m < 0) {
        throw ValidationError("recommended_n: m must be >= 0");
    }
    const auto u = static_cast<std::size_t>(m);
    return (u + 1) * (u + 2) * (u + 3);
}

PolyBasis::PolyBasis(int m, const Point3& shift, double scale) : m_(m), shift_(shift), scale_(scale)
{
    if (m < 0) {
        throw ValidationError("PolyBasis: m must be >= 0");
    }
    if (!(scale > 0.0) || !std::isfinite(scale)) {
        throw ValidationError("PolyBasis: scale must be positive");
    }
    for (int d = 0; d <= m; ++d) {
        for (int i = d; i >= 0; --i) {
            for (int j = d - i; j >= 0; --j) {
                exps_.push_back({i, j, d - i - j});
            }
        }
    }
    parent_.assign(exps_.size(), 0);
    axis_.assign(exps_.size(), -1);
    for (std::size_t l = 1; l < exps_.size(); ++l) {
        const auto& e = exps_[l];
        const int ax = e[0] > 0 ? 0 : (e[1] > 0 ? 1 : 2);
        std::array<int, 3> pe = e;
        --pe[static_cast<std::size_t>(ax)];
        for (std::size_t q = 0; q < l; ++q) {
            if (exps_[q] == pe) {
                parent_[l] = q;
                break;
            }
        }
        axis_[l] = ax;
    }
}

void PolyBasis::evaluate_frame(const Point3& y, double* out) const
{
    out[0] = 1.0;
    for (std::size_t l = 1; l < exps_.size(); ++l) {
        out[l] = out[parent_[l]] * y[axis_[l]];
    }
}

void PolyBasis::evaluate(const Point3& x, double* out) const
{
    evaluate_frame(to_frame(x), out);
}

void fill_saddle_matrix(std::span<const Point3> centres, const PhsKernel& kernel, const PolyBasis& basis,
                        Eigen::Ref<Eigen::MatrixXd> A)
{
    const auto n = static_cast<Eigen::Index>(centres.size());
    const auto M = static_cast<Eigen::Index>(basis.size());
    if (kernel.p < 0) {
        throw ValidationError("kernel p must be >= 0");
    }
    for (Eigen::Index j = 0; j < n; ++j) {
        A(j, j) = 0.0;
        const Point3 cj = centres[static_cast<std::size_t>(j)];
        for (Eigen::Index i = j + 1; i < n; ++i) {
            const double r2 = norm2(centres[static_cast<std::size_t>(i)] - cj);
            double v = std::sqrt(r2);
            for (int k = 0; k < kernel.p; ++k) {
                v *= r2;
            }
            A(i, j) = v;
        }
    }
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = j + 1; i < n; ++i) {
            A(j, i) = A(i, j);
        }
    }
    std::vector<double> row(static_cast<std::size_t>(M));
    for (Eigen::Index i = 0; i < n; ++i) {
        basis.evaluate(centres[static_cast<std::size_t>(i)], row.data());
        for (Eigen::Index l = 0; l < M; ++l) {
            A(i, n + l) = row[static_cast<std::size_t>(l)];
            A(n + l, i) = row[static_cast<std::size_t>(l)];
        }
    }
    A.bottomRightCorner(M, M).setZero();
}

LocalSystem assemble_A(const Stencil& stencil, const NodeSet& nodes, const PhsKernel& kernel,
                       const PolyBasis& basis)
{
    LocalSystem sys;
    sys.n = stencil.node_indices.size();
    sys.M = basis.size();
    sys.tet_index = stencil.tet_index;
    std::vector<Point3> centres;
    centres.reserve(sys.n);
    for (std::size_t i : stencil.node_indices) {
        centres.push_back(nodes.points[i]);
    }
    const auto dim = static_cast<Eigen::Index>(sys.n + sys.M);
    sys.A.resize(dim, dim);
    fill_saddle_matrix(centres, kernel, basis, sys.A);
    return sys;
}

namespace {

// Hager's estimate of 1 / (|A|_1 |A^-1|_1). A is symmetric, so the transposed
// solves the estimator needs are ordinary solves.
double symmetric_rcond(const Eigen::MatrixXd& A, const Eigen::PartialPivLU<Eigen::MatrixXd>& lu)
{
    const Eigen::Index n = A.rows();
    const double anorm = A.cwiseAbs().colwise().sum().maxCoeff();
    if (!(anorm > 0.0)) {
        return 0.0;
    }
    Eigen::VectorXd x = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
    double est = 0.0;
    Eigen::Index last = -1;
    for (int it = 0; it < 5; ++it) {
        const Eigen::VectorXd y = lu.solve(x);
        est = y.lpNorm<1>();
        if (!std::isfinite(est)) {
            return 0.0;
        }
        const Eigen::VectorXd xi = y.unaryExpr([](double v) { return v >= 0.0 ? 1.0 : -1.0; });
        const Eigen::VectorXd z = lu.solve(xi);
        Eigen::Index j = 0;
        const double zmax = z.cwiseAbs().maxCoeff(&j);
        if (zmax <= z.dot(x) || j == last) {
            break;
        }
        x.setZero();
        x(j) = 1.0;
        last = j;
    }
    return est > 0.0 ? 1.0 / (anorm * est) : 0.0;
}

} // namespace

void solve_local_inplace(const Eigen::MatrixXd& A, Eigen::Ref<Eigen::MatrixXd> B, std::size_t n,
                         std::size_t tet_index)
{
    const auto dim = static_cast<std::size_t>(A.rows());
    if (A.cols() != A.rows() || B.rows() != A.rows() || dim < n) {
        throw ValidationError("solve_local: inconsistent dimensions");
    }
    const std::size_t M = dim - n;
    if (n < M) {
        throw LocalSingularityError(tet_index, n, M,
                                    "fewer stencil nodes than polynomial terms, the system is singular for n < "
                                    "(m+1)(m+2)(m+3)/6");
    }
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
    const double rc = symmetric_rcond(A, lu);
    if (!(rc >= 1e-14)) {
        throw LocalSingularityError(tet_index, n, M,
                                    "reciprocal condition estimate " + std::to_string(rc) + " below 1e-14");
    }
    const Eigen::MatrixXd rhs = B;
    B = lu.solve(rhs);
    for (int pass = 0; pass < 2; ++pass) {
        const Eigen::MatrixXd r = rhs - A * B;
        bool ok = true;
        for (Eigen::Index c = 0; c < rhs.cols(); ++c) {
            if (r.col(c).norm() > 1e-10 * rhs.col(c).norm()) {
                ok = false;
            }
        }
        if (ok) {
            return;
        }
        if (pass == 1) {
            throw LocalSingularityError(tet_index, n, M, "residual above 1e-10 |I| after refinement");
        }
        B += lu.solve(r);
    }
}

Eigen::VectorXd solve_local(const Eigen::MatrixXd& A, const Eigen::VectorXd& I, std::size_t n,
                            std::size_t tet_index)
{
    Eigen::MatrixXd B = I;
    solve_local_inplace(A, B, n, tet_index);
    return B.col(0).head(static_cast<Eigen::Index>(n));
}

} // namespace ballquad
