#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "catelasso/core_model.hpp"
#include "catelasso/lasso.hpp"

namespace catelasso {

enum class Method { cate_lasso, t_ols, t_lasso, ipw_ols, ipw_lasso };

std::string_view to_string(Method m);
/// Throws InvalidInput for unknown names.
Method method_from_string(std::string_view name);

struct FitOptions {
    double lambda = 1.0;
    /// Balancing weight of the treated-arm loss; must lie in (0, 1).
    double delta = 0.5;
    double tol = 1e-8;
    int max_iter = 10'000;

    void validate() const;
};

/// Convergence record of one Lasso solve inside a fit.
struct SolverSummary {
    int iterations = 0;
    double max_coord_change = 0.0;
    double kkt_violation = 0.0;
    bool converged = false;
};

/// Fitted CATE estimator.
///
/// For the CATE Lasso, beta1 = beta_diff + beta0 is materialized for
/// diagnostics only: the per-arm vectors are not consistent estimates of the
/// arm parameters, only their difference is. IPW learners leave beta0 and
/// beta1 at zero.
struct CateModel {
    CoefVector beta_diff;
    CoefVector beta0;
    CoefVector beta1;
    Method method = Method::cate_lasso;
    double lambda_used = 0.0;
    std::vector<SolverSummary> solver_trace;

    bool converged() const;
};

/// Regressor used by the T- and IPW-learners.
struct Regressor {
    enum class Kind { min_norm_ols, lasso };
    Kind kind = Kind::min_norm_ols;
    double lambda = 0.0;
    double tol = 1e-8;
    int max_iter = 10'000;

    static Regressor ols() { return {}; }
    static Regressor lasso(double lambda, double tol = 1e-8, int max_iter = 10'000) {
        return {Kind::lasso, lambda, tol, max_iter};
    }
};

/// Two-step CATE Lasso: minimum-norm control-arm fit, then a Lasso on the
/// treated-arm residual with loss weight delta and normalizer n_total.
CateModel fit_cate_lasso(const ArmSplit& split, const FitOptions& opts);

/// Separate per-arm regressions; the Lasso variant normalizes each arm's
/// loss by its own size.
CateModel fit_t_learner(const ArmSplit& split, const Regressor& regressor);

/// Pseudo-outcome D Y / e - (1 - D) Y / (1 - e) for each unit.
Vector ipw_pseudo_outcomes(const ObservationSet& data, const Vector& propensity);

/// Regression of the IPW pseudo-outcome on X, normalized by n.
CateModel fit_ipw_learner(const ObservationSet& data, const Vector& propensity,
                          const Regressor& regressor);

double predict_cate(const CateModel& model, const Vector& x);

/// Predicted CATE for every row of x.
Vector predict_cate(const CateModel& model, const Matrix& x);

/// In-sample RMSE of x_i^T beta_hat against x_i^T (beta1 - beta0).
double rmse_against_truth(const CateModel& model, const ObservationSet& data);

/// RMSE on arbitrary evaluation covariates against a known CATE vector.
double rmse_against_truth(const CateModel& model, const Matrix& x, const Vector& true_beta_diff);

}  // namespace catelasso
