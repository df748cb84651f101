#pragma once

#include <optional>
#include <vector>

#include "catelasso/core_model.hpp"

namespace catelasso::lasso {

/// Objective: loss_weight * ||target - design * beta||^2 / normalizer + 2 * lambda * ||beta||_1.
///
/// Every coordinate is penalized, including an intercept column if the
/// design carries one. No standardization is applied.
struct LassoProblem {
    Matrix design;
    Vector target;
    double lambda = 0.0;
    double loss_weight = 1.0;
    Eigen::Index normalizer = 1;

    /// Throws InvalidInput / DimensionMismatch when the invariants fail.
    void validate() const;
};

struct SolveOptions {
    double tol = 1e-8;
    int max_iter = 10'000;
    /// Record f(beta) after every sweep into LassoSolution::objective_trace.
    bool record_objective = false;
};

struct LassoSolution {
    Vector beta;
    int iterations = 0;
    double max_coord_change = 0.0;
    double kkt_violation = 0.0;
    bool converged = false;
    std::vector<double> objective_trace;
};

inline double soft_threshold(double z, double t) {
    if (z > t) return z - t;
    if (z < -t) return z + t;
    return 0.0;
}

/// Cyclic coordinate descent with exact coordinate minimization.
///
/// Stops once a sweep moves no coordinate by more than `tol` and the KKT
/// violation is at most 10 * tol * max(1, ||X||_max), or after `max_iter`
/// sweeps. Non-convergence is reported through `converged`, never thrown.
LassoSolution solve(const LassoProblem& problem, const SolveOptions& options = {},
                    const std::optional<Vector>& init = std::nullopt);

/// Smallest lambda for which beta = 0 is optimal: max_j w |x_j^T y| / nu.
/// The `lambda` field of the problem is ignored.
double lambda_max(const LassoProblem& problem);

/// Largest stationarity residual at beta; zero iff beta is a minimizer.
double kkt_check(const LassoProblem& problem, const Vector& beta);

/// Value of the objective at beta.
double objective(const LassoProblem& problem, const Vector& beta);

}  // namespace catelasso::lasso
