#include "catelasso/lasso.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <string>

namespace catelasso::lasso {
namespace {

using ColMatrix = Eigen::MatrixXd;

double kkt_from_gradient(const Vector& s, const Vector& beta, double lambda) {
    const double pen = 2.0 * lambda;
    double worst = 0.0;
    for (Eigen::Index j = 0; j < beta.size(); ++j) {
        double v;
        if (beta(j) > 0.0) {
            v = std::abs(s(j) - pen);
        } else if (beta(j) < 0.0) {
            v = std::abs(s(j) + pen);
        } else {
            v = std::max(std::abs(s(j)) - pen, 0.0);
        }
        worst = std::max(worst, v);
    }
    return worst;
}

}  // namespace

void LassoProblem::validate() const {
    if (design.rows() != target.size()) {
        throw Error(ErrorKind::DimensionMismatch, "lasso: design rows (" +
                                                      std::to_string(design.rows()) +
                                                      ") != target length (" +
                                                      std::to_string(target.size()) + ")");
    }
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw Error(ErrorKind::InvalidInput, "lasso: lambda must be finite and >= 0");
    }
    if (!(loss_weight > 0.0) || !std::isfinite(loss_weight)) {
        throw Error(ErrorKind::InvalidInput, "lasso: loss_weight must be > 0");
    }
    if (normalizer < 1) throw Error(ErrorKind::InvalidInput, "lasso: normalizer must be >= 1");
}

double objective(const LassoProblem& problem, const Vector& beta) {
    const Vector r = problem.target - problem.design * beta;
    return problem.loss_weight * r.squaredNorm() / static_cast<double>(problem.normalizer) +
           2.0 * problem.lambda * beta.lpNorm<1>();
}

double lambda_max(const LassoProblem& problem) {
    problem.validate();
    // Same column layout and arithmetic as the first sweep of solve() from
    // zero, so lambda = lambda_max(...) zeroes every coordinate exactly.
    const ColMatrix x = problem.design;
    const double scale = 2.0 * problem.loss_weight / static_cast<double>(problem.normalizer);
    double best = 0.0;
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        const double rho = scale * x.col(j).dot(problem.target);
        best = std::max(best, std::abs(rho) / 2.0);
    }
    return best;
}

double kkt_check(const LassoProblem& problem, const Vector& beta) {
    problem.validate();
    if (beta.size() != problem.design.cols()) {
        throw Error(ErrorKind::DimensionMismatch, "kkt_check: beta length must equal p");
    }
    const double scale = 2.0 * problem.loss_weight / static_cast<double>(problem.normalizer);
    const Vector r = problem.target - problem.design * beta;
    const Vector s = scale * (problem.design.transpose() * r);
    return kkt_from_gradient(s, beta, problem.lambda);
}

LassoSolution solve(const LassoProblem& problem, const SolveOptions& options,
                    const std::optional<Vector>& init) {
    problem.validate();
    if (!(options.tol > 0.0)) throw Error(ErrorKind::InvalidInput, "lasso: tol must be > 0");
    const Eigen::Index p = problem.design.cols();

    const ColMatrix x = problem.design;
    const double scale = 2.0 * problem.loss_weight / static_cast<double>(problem.normalizer);
    const double pen = 2.0 * problem.lambda;
    const Vector col_sq = x.colwise().squaredNorm().transpose();
    const double x_max = p > 0 && x.rows() > 0 ? x.cwiseAbs().maxCoeff() : 0.0;
    const double kkt_target = 10.0 * options.tol * std::max(1.0, x_max);

    LassoSolution sol;
    sol.beta = Vector::Zero(p);
    if (init) {
        if (init->size() != p) {
            throw Error(ErrorKind::DimensionMismatch, "lasso: init length must equal p");
        }
        sol.beta = *init;
        for (Eigen::Index j = 0; j < p; ++j) {
            if (col_sq(j) == 0.0) sol.beta(j) = 0.0;
        }
    }
    Vector r = problem.target - x * sol.beta;

    auto current_objective = [&] {
        return problem.loss_weight * r.squaredNorm() / static_cast<double>(problem.normalizer) +
               pen * sol.beta.lpNorm<1>();
    };
#ifndef NDEBUG
    double prev_obj = current_objective();
#endif

    while (sol.iterations < options.max_iter) {
        double max_change = 0.0;
        for (Eigen::Index j = 0; j < p; ++j) {
            const double c = scale * col_sq(j);
            if (c == 0.0) continue;
            const double old = sol.beta(j);
            const double rho = scale * (x.col(j).dot(r) + col_sq(j) * old);
            const double updated = soft_threshold(rho, pen) / c;
            const double delta = updated - old;
            if (delta != 0.0) {
                r.noalias() -= delta * x.col(j);
                sol.beta(j) = updated;
                max_change = std::max(max_change, std::abs(delta));
            }
        }
        ++sol.iterations;
        sol.max_coord_change = max_change;

        if (options.record_objective) sol.objective_trace.push_back(current_objective());
#ifndef NDEBUG
        {
            const double obj = current_objective();
            assert(obj <= prev_obj + 1e-9 * std::max(1.0, std::abs(prev_obj)));
            prev_obj = obj;
        }
#endif

        if (max_change < options.tol) {
            r = problem.target - x * sol.beta;
            const Vector s = scale * (x.transpose() * r);
            sol.kkt_violation = kkt_from_gradient(s, sol.beta, problem.lambda);
            if (sol.kkt_violation <= kkt_target) {
                sol.converged = true;
                return sol;
            }
            // A sweep that moved nothing cannot make further progress.
            if (max_change == 0.0) break;
        }
    }

    r = problem.target - x * sol.beta;
    const Vector s = scale * (x.transpose() * r);
    sol.kkt_violation = kkt_from_gradient(s, sol.beta, problem.lambda);
    return sol;
}

}  // namespace catelasso::lasso
