#include "catelasso/estimators.hpp"

#include <cmath>
#include <string>

#include "catelasso/numlin.hpp"

namespace catelasso {
namespace {

SolverSummary summarize(const lasso::LassoSolution& s) {
    return {s.iterations, s.max_coord_change, s.kkt_violation, s.converged};
}

struct ArmFit {
    Vector beta;
    std::optional<SolverSummary> trace;
};

ArmFit fit_regressor(const Matrix& x, const Vector& y, Eigen::Index normalizer,
                     const Regressor& reg) {
    if (reg.kind == Regressor::Kind::min_norm_ols) return {numlin::min_norm_lsq(x, y), {}};

    lasso::LassoProblem prob{x, y, reg.lambda, 1.0, normalizer};
    const auto sol = lasso::solve(prob, {reg.tol, reg.max_iter, false});
    return {sol.beta, summarize(sol)};
}

}  // namespace

std::string_view to_string(Method m) {
    switch (m) {
        case Method::cate_lasso: return "cate_lasso";
        case Method::t_ols: return "t_ols";
        case Method::t_lasso: return "t_lasso";
        case Method::ipw_ols: return "ipw_ols";
        case Method::ipw_lasso: return "ipw_lasso";
    }
    return "unknown";
}

Method method_from_string(std::string_view name) {
    for (Method m : {Method::cate_lasso, Method::t_ols, Method::t_lasso, Method::ipw_ols,
                     Method::ipw_lasso}) {
        if (to_string(m) == name) return m;
    }
    throw Error(ErrorKind::InvalidInput, "unknown method '" + std::string(name) + "'");
}

void FitOptions::validate() const {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw Error(ErrorKind::InvalidInput, "lambda must be finite and >= 0");
    }
    if (!(delta > 0.0 && delta < 1.0)) {
        throw Error(ErrorKind::InvalidInput, "delta must lie in (0, 1)");
    }
    if (!(tol > 0.0)) throw Error(ErrorKind::InvalidInput, "tol must be > 0");
    if (max_iter < 1) throw Error(ErrorKind::InvalidInput, "max_iter must be >= 1");
}

bool CateModel::converged() const {
    for (const auto& s : solver_trace) {
        if (!s.converged) return false;
    }
    return true;
}

CateModel fit_cate_lasso(const ArmSplit& split, const FitOptions& opts) {
    opts.validate();
    if (split.x1.rows() == 0 || split.x0.rows() == 0) {
        throw Error(ErrorKind::EmptyArm, "fit_cate_lasso needs both arms");
    }

    // Step I: interpolating (minimum-norm) estimate for the control arm.
    Vector beta0 = numlin::min_norm_lsq(split.x0, split.y0);

    // Step II: Lasso on the treated-arm residual.
    lasso::LassoProblem prob{split.x1, split.y1 - split.x1 * beta0, opts.lambda, opts.delta,
                             split.n_total};
    const auto sol = lasso::solve(prob, {opts.tol, opts.max_iter, false});

    CateModel model;
    model.method = Method::cate_lasso;
    model.lambda_used = opts.lambda;
    model.beta1 = CoefVector(sol.beta + beta0, CoefRole::arm1);
    model.beta_diff = CoefVector(sol.beta, CoefRole::beta_diff);
    model.beta0 = CoefVector(std::move(beta0), CoefRole::arm0);
    model.solver_trace.push_back(summarize(sol));
    return model;
}

CateModel fit_t_learner(const ArmSplit& split, const Regressor& regressor) {
    if (split.x1.rows() == 0 || split.x0.rows() == 0) {
        throw Error(ErrorKind::EmptyArm, "fit_t_learner needs both arms");
    }
    ArmFit f1 = fit_regressor(split.x1, split.y1, split.x1.rows(), regressor);
    ArmFit f0 = fit_regressor(split.x0, split.y0, split.x0.rows(), regressor);

    CateModel model;
    const bool is_lasso = regressor.kind == Regressor::Kind::lasso;
    model.method = is_lasso ? Method::t_lasso : Method::t_ols;
    model.lambda_used = is_lasso ? regressor.lambda : 0.0;
    model.beta_diff = CoefVector(f1.beta - f0.beta, CoefRole::beta_diff);
    model.beta1 = CoefVector(std::move(f1.beta), CoefRole::arm1);
    model.beta0 = CoefVector(std::move(f0.beta), CoefRole::arm0);
    if (f1.trace) model.solver_trace.push_back(*f1.trace);
    if (f0.trace) model.solver_trace.push_back(*f0.trace);
    return model;
}

Vector ipw_pseudo_outcomes(const ObservationSet& data, const Vector& propensity) {
    if (propensity.size() != data.n()) {
        throw Error(ErrorKind::DimensionMismatch, "propensity vector must have length n");
    }
    Vector pseudo(data.n());
    for (Eigen::Index i = 0; i < data.n(); ++i) {
        const double e = propensity(i);
        if (!(e > 0.0 && e < 1.0)) {
            throw Error(ErrorKind::PropensityOutOfRange,
                        "propensity " + std::to_string(e) + " at row " + std::to_string(i) +
                            " is outside (0,1)");
        }
        const double y = data.outcomes()(i);
        pseudo(i) = data.treatments()[static_cast<std::size_t>(i)] == 1 ? y / e : -y / (1.0 - e);
    }
    return pseudo;
}

CateModel fit_ipw_learner(const ObservationSet& data, const Vector& propensity,
                          const Regressor& regressor) {
    const Vector pseudo = ipw_pseudo_outcomes(data, propensity);
    ArmFit f = fit_regressor(data.covariates(), pseudo, data.n(), regressor);

    CateModel model;
    const bool is_lasso = regressor.kind == Regressor::Kind::lasso;
    model.method = is_lasso ? Method::ipw_lasso : Method::ipw_ols;
    model.lambda_used = is_lasso ? regressor.lambda : 0.0;
    model.beta0 = CoefVector(Vector::Zero(data.p()), CoefRole::arm0);
    model.beta1 = CoefVector(Vector::Zero(data.p()), CoefRole::arm1);
    model.beta_diff = CoefVector(std::move(f.beta), CoefRole::beta_diff);
    if (f.trace) model.solver_trace.push_back(*f.trace);
    return model;
}

double predict_cate(const CateModel& model, const Vector& x) {
    if (x.size() != model.beta_diff.size()) {
        throw Error(ErrorKind::DimensionMismatch,
                    "predict_cate: x has length " + std::to_string(x.size()) + ", model has p=" +
                        std::to_string(model.beta_diff.size()));
    }
    return x.dot(model.beta_diff.values);
}

Vector predict_cate(const CateModel& model, const Matrix& x) {
    if (x.cols() != model.beta_diff.size()) {
        throw Error(ErrorKind::DimensionMismatch, "predict_cate: covariate width != p");
    }
    return x * model.beta_diff.values;
}

double rmse_against_truth(const CateModel& model, const Matrix& x, const Vector& true_beta_diff) {
    if (true_beta_diff.size() != x.cols()) {
        throw Error(ErrorKind::DimensionMismatch, "rmse: true coefficient length != p");
    }
    if (x.rows() == 0) throw Error(ErrorKind::InvalidInput, "rmse: no evaluation rows");
    const Vector err = predict_cate(model, x) - x * true_beta_diff;
    return std::sqrt(err.squaredNorm() / static_cast<double>(x.rows()));
}

double rmse_against_truth(const CateModel& model, const ObservationSet& data) {
    if (!data.truth()) throw Error(ErrorKind::MissingTruth, "dataset carries no ground truth");
    return rmse_against_truth(model, data.covariates(), data.truth()->beta_diff());
}

}  // namespace catelasso
