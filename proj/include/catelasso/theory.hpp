#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <json.hpp>

#include "catelasso/core_model.hpp"
#include "catelasso/simgen.hpp"

namespace catelasso::theory {

// Formulas below are stated for the estimator objective
//   delta * ||Y1 - X1 (b + b0_hat)||^2 / n + 2 * lambda * ||b||_1,
// with n the total sample size and Sigma1 = X1^T X1 / n.

/// sqrt(sigma1^2 + sigma0^2 * tr((X0^T X0)^+ X1^T X1)).
double sigma_dagger(const Matrix& x0, const Matrix& x1, double sigma1, double sigma0);

/// 3 * M * sigma_dagger * sqrt(2 (t^2 + log p) / n).
double lambda_theory(double m_bound, double sigma_dagger, double t, Eigen::Index n,
                     Eigen::Index p);

/// Threshold of the concentration event: 2 * M * sigma_dagger * sqrt((t^2 + 2 log p) / n).
double lambda0(double m_bound, double sigma_dagger, double t, Eigen::Index n, Eigen::Index p);

/// sqrt(max_j gram1(j, j)).
double m_bound(const Matrix& gram1);

struct CompatibilityOptions {
    std::size_t budget = 10'000;
    std::uint64_t seed = 0;
    /// Sign patterns on S0 refined by projected gradient.
    std::size_t max_patterns = 64;
    int refine_iters = 20'000;
};

/// Search estimate of the compatibility constant
///   phi0^2 = min { s0 b^T Sigma b / ||b_S||_1^2 : ||b_{S^c}||_1 <= 3 ||b_S||_1 }.
///
/// Random cone draws pick candidate sign patterns of b_S; each pattern's
/// subproblem is convex and is refined by projected gradient. The result is
/// the best value found, i.e. an upper bound on the true minimum that
/// tightens with the budget. Requires p <= 64 and a nonempty s0_set.
double compatibility_lower_bound(const Matrix& gram1, const std::vector<Eigen::Index>& s0_set,
                                 const CompatibilityOptions& opts = {});

/// eps1 - X1 (X0^T X0)^+ X0^T eps0.
Vector epsilon_dagger(const Matrix& x0, const Matrix& x1, const Vector& eps1, const Vector& eps0);

struct OracleBounds {
    double l1_bound = 0.0;    ///< 4 lambda s0 / phi0^2
    double pred_bound = 0.0;  ///< 4 lambda^2 s0 / phi0^2
};

OracleBounds oracle_bounds(double lambda, std::size_t s0, double phi0_sq);

/// Empirical frequency of max_j 2 |eps_dagger^T X1_j| / n <= lambda0 over
/// `reps` noise draws on the fixed design gen_synthetic(dgp). Replication r
/// draws its noise from seed + r.
double concentration_event_frequency(const simgen::SimConfig& dgp, double t, std::size_t reps,
                                     std::uint64_t seed);

struct OracleCheck {
    double frequency = 0.0;
    double lambda = 0.0;
    double phi0_sq = 0.0;
    OracleBounds bounds;
    double median_l1_error = 0.0;
    double median_pred_error = 0.0;
};

/// Monte Carlo check of the oracle inequality on the fixed design
/// gen_synthetic(dgp) with lambda = lambda_theory(t) and the compatibility
/// estimate for S0 = supp(beta1 - beta0).
OracleCheck oracle_inequality_frequency(const simgen::SimConfig& dgp, double t, std::size_t reps,
                                        std::uint64_t seed, double delta = 0.5,
                                        const CompatibilityOptions& compat = {});

struct TheoryReport {
    double sigma_dagger = 0.0;
    double m_bound = 0.0;
    double lambda_theory = 0.0;
    std::optional<double> phi0_sq_lower;
    std::size_t s0 = 0;
    std::optional<double> l1_bound;
    std::optional<double> pred_bound;
    double trace_value = 0.0;
    double trace_max_entry = 0.0;
};

/// Diagnostics for one dataset with ground truth. The compatibility
/// quantities are left empty when p > 64.
TheoryReport theory_report(const ObservationSet& data, double sigma1, double sigma0, double t,
                           const CompatibilityOptions& compat = {});

nlohmann::json to_json(const TheoryReport& report);

}  // namespace catelasso::theory
