#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <vector>

#include "catelasso/error.hpp"

namespace catelasso {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

enum class CoefRole { beta_diff, arm0, arm1 };

/// A p-dimensional coefficient vector tagged with the parameter it estimates.
struct CoefVector {
    Vector values;
    CoefRole role = CoefRole::beta_diff;

    CoefVector() = default;
    CoefVector(Vector v, CoefRole r);

    Eigen::Index size() const { return values.size(); }
};

/// Planted parameters of a simulated dataset.
///
/// `propensities`, when present, are the true p(D=1|X_i) for each row, in
/// row order of the owning ObservationSet.
struct GroundTruth {
    Vector beta1;
    Vector beta0;
    std::size_t s0 = 0;
    std::optional<Vector> propensities;

    /// True CATE coefficient vector beta1 - beta0.
    Vector beta_diff() const { return beta1 - beta0; }

    /// Throws InvalidInput when the dimensions, sparsity or propensity range
    /// are inconsistent with a design of p columns and n rows.
    void validate(Eigen::Index n, Eigen::Index p) const;
};

/// The n observed triples (Y_i, D_i, X_i), immutable after construction.
class ObservationSet {
public:
    ObservationSet(Matrix covariates, std::vector<int> treatments, Vector outcomes,
                   std::optional<GroundTruth> truth = std::nullopt);

    Eigen::Index n() const { return covariates_.rows(); }
    Eigen::Index p() const { return covariates_.cols(); }

    const Matrix& covariates() const { return covariates_; }
    const std::vector<int>& treatments() const { return treatments_; }
    const Vector& outcomes() const { return outcomes_; }
    const std::optional<GroundTruth>& truth() const { return truth_; }

    std::size_t treated_count() const { return treated_; }
    std::size_t control_count() const { return treatments_.size() - treated_; }

private:
    Matrix covariates_;
    std::vector<int> treatments_;
    Vector outcomes_;
    std::optional<GroundTruth> truth_;
    std::size_t treated_ = 0;
};

/// Per-arm design and response. Both squared-loss terms of the joint
/// objective are normalized by `n_total`, not by the arm size.
struct ArmSplit {
    Matrix x1;
    Vector y1;
    Matrix x0;
    Vector y0;
    Eigen::Index n_total = 0;

    Eigen::Index p() const { return x1.cols(); }
};

/// Rows with D_i = 1 go to (x1, y1), the rest to (x0, y0), each in input order.
ArmSplit split_by_arm(const ObservationSet& data);

struct OverlapReport {
    double phi = 0.0;
    double fraction_outside = 0.0;
    std::size_t count_outside = 0;
    bool pass = false;
};

/// Fraction of units whose propensity falls outside (phi, 1 - phi). Uses
/// `propensity` when given, otherwise the ground-truth propensities.
OverlapReport check_overlap(const ObservationSet& data, double phi,
                            const std::optional<Vector>& propensity = std::nullopt);

}  // namespace catelasso
