#pragma once

#include "catelasso/core_model.hpp"

namespace catelasso::numlin {

/// Thin SVD truncated at the numerical rank: a = u * diag(s) * v^T with
/// every retained singular value above `rank_tolerance`.
struct SvdFactors {
    Eigen::MatrixXd u;
    Vector singular_values;
    Eigen::MatrixXd v;
    double rank_tolerance = 0.0;

    Eigen::Index rank() const { return singular_values.size(); }
};

/// Singular values are kept iff s_i > eps * max(m, p) * s_max.
SvdFactors svd(const Matrix& a);

Matrix pseudoinverse(const Matrix& a);

/// Minimum-norm least-squares solution a^+ y.
Vector min_norm_lsq(const Matrix& a, const Vector& y);

/// a^T a / normalizer.
Matrix gram(const Matrix& a, Eigen::Index normalizer);

struct TraceProduct {
    double trace = 0.0;
    double max_abs_entry = 0.0;
};

/// tr((x0^T x0)^+ x1^T x1) plus the largest absolute entry of the product
/// matrix. Throws NonFiniteProduct if the product is not finite.
TraceProduct trace_pseudo_product(const Matrix& x0, const Matrix& x1);

}  // namespace catelasso::numlin
