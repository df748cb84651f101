#include "catelasso/numlin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace catelasso::numlin {

SvdFactors svd(const Matrix& a) {
    SvdFactors out;
    const auto m = a.rows();
    const auto p = a.cols();
    if (m == 0 || p == 0) {
        out.u.resize(m, 0);
        out.v.resize(p, 0);
        out.singular_values.resize(0);
        return out;
    }

    const Eigen::MatrixXd dense = a;
    Eigen::BDCSVD<Eigen::MatrixXd> dec(dense, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector& s = dec.singularValues();

    const double s_max = s.size() > 0 ? s(0) : 0.0;
    out.rank_tolerance = std::numeric_limits<double>::epsilon() *
                         static_cast<double>(std::max(m, p)) * s_max;
    Eigen::Index rank = 0;
    while (rank < s.size() && s(rank) > out.rank_tolerance) ++rank;

    out.singular_values = s.head(rank);
    out.u = dec.matrixU().leftCols(rank);
    out.v = dec.matrixV().leftCols(rank);
    return out;
}

Matrix pseudoinverse(const Matrix& a) {
    const SvdFactors f = svd(a);
    if (f.rank() == 0) return Matrix::Zero(a.cols(), a.rows());
    return f.v * f.singular_values.cwiseInverse().asDiagonal() * f.u.transpose();
}

Vector min_norm_lsq(const Matrix& a, const Vector& y) {
    if (a.rows() != y.size()) {
        throw Error(ErrorKind::DimensionMismatch, "min_norm_lsq: rows of A must match length of y");
    }
    const SvdFactors f = svd(a);
    if (f.rank() == 0) return Vector::Zero(a.cols());
    const Vector coords = (f.u.transpose() * y).cwiseQuotient(f.singular_values);
    return f.v * coords;
}

Matrix gram(const Matrix& a, Eigen::Index normalizer) {
    if (normalizer < 1) throw Error(ErrorKind::InvalidInput, "gram: normalizer must be >= 1");
    Matrix g(a.cols(), a.cols());
    g.setZero();
    g.template selfadjointView<Eigen::Lower>().rankUpdate(a.transpose(),
                                                          1.0 / static_cast<double>(normalizer));
    g.template triangularView<Eigen::StrictlyUpper>() = g.transpose();
    return g;
}

TraceProduct trace_pseudo_product(const Matrix& x0, const Matrix& x1) {
    if (x0.cols() != x1.cols()) {
        throw Error(ErrorKind::DimensionMismatch,
                    "trace_pseudo_product: both designs need the same number of columns");
    }
    TraceProduct out;
    const SvdFactors f = svd(x0);
    if (f.rank() == 0) {
        if (!x1.allFinite()) throw Error(ErrorKind::NonFiniteProduct, "x1 is not finite");
        return out;
    }

    // (x0^T x0)^+ = V S^-2 V^T, so the product is V S^-2 (x1 V)^T x1.
    const Vector inv_sq = f.singular_values.array().square().inverse();
    const Eigen::MatrixXd x1v = x1 * f.v;
    out.trace = (x1v.colwise().squaredNorm().transpose().array() * inv_sq.array()).sum();

    const Eigen::MatrixXd product = f.v * (inv_sq.asDiagonal() * x1v.transpose()) * x1;
    if (!product.allFinite() || !std::isfinite(out.trace)) {
        throw Error(ErrorKind::NonFiniteProduct,
                    "(x0^T x0)^+ x1^T x1 has non-finite entries");
    }
    out.max_abs_entry = product.cwiseAbs().maxCoeff();
    return out;
}

}  // namespace catelasso::numlin
