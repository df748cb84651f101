#include <doctest.h>

#include <cmath>

#include "catelasso/lasso.hpp"
#include "helpers.hpp"

using namespace catelasso;
using lasso::LassoProblem;
using testutil::max_abs;
using testutil::random_matrix;
using testutil::random_vector;

namespace {

// Proximal gradient with step 1/L on the same objective.
Vector prox_gradient(const LassoProblem& pr, int iters) {
    const Eigen::MatrixXd x = pr.design;
    const double nu = static_cast<double>(pr.normalizer);
    const double lip = 2.0 * pr.loss_weight * x.jacobiSvd().singularValues()(0) *
                       x.jacobiSvd().singularValues()(0) / nu;
    const double step = 1.0 / lip;
    Vector b = Vector::Zero(x.cols());
    for (int k = 0; k < iters; ++k) {
        const Vector grad = -2.0 * pr.loss_weight * x.transpose() * (pr.target - x * b) / nu;
        const Vector z = b - step * grad;
        for (Eigen::Index j = 0; j < b.size(); ++j) b(j) = lasso::soft_threshold(z(j), 2.0 * pr.lambda * step);
    }
    return b;
}

LassoProblem seeded_problem(std::uint64_t seed, Eigen::Index m, Eigen::Index p, double lambda) {
    return {random_matrix(seed, m, p), random_vector(seed, m), lambda, 1.0, m};
}

}  // namespace

TEST_CASE("soft_threshold") {
    CHECK(lasso::soft_threshold(3, 1) == 2);
    CHECK(lasso::soft_threshold(-0.5, 1) == 0);
    CHECK(lasso::soft_threshold(-3, 1) == -2);
}

TEST_CASE("one-column closed form") {
    const LassoProblem pr{Matrix::Ones(4, 1), Vector::Constant(4, 2.0), 0.5, 1.0, 4};
    const auto sol = lasso::solve(pr);
    CHECK(sol.converged);
    // soft_threshold(x'y/nu, lambda) / (|x|^2/nu)
    CHECK(sol.beta(0) == doctest::Approx(lasso::soft_threshold(8.0 / 4.0, 0.5) / 1.0));
    CHECK(sol.beta(0) == doctest::Approx(1.5));
    CHECK(lasso::kkt_check(pr, sol.beta) < 1e-10);
    CHECK(lasso::lambda_max(pr) == 2.0);
    Vector bumped = sol.beta;
    bumped(0) += 0.1;
    CHECK(lasso::kkt_check(pr, bumped) > 0.0);
}

TEST_CASE("unpenalized square system") {
    const auto x = random_matrix(11, 5, 5);
    const auto y = random_vector(11, 5);
    const LassoProblem pr{x, y, 0.0, 1.0, 5};
    const auto sol = lasso::solve(pr, {1e-12, 200000});
    const Eigen::MatrixXd X = x;
    CHECK(max_abs(sol.beta - X.partialPivLu().solve(y)) < 1e-6);
}

TEST_CASE("lambda_max zeroes the solution") {
    SUBCASE("orthogonal target") {
        Matrix x(2, 1);
        x << 1, -1;
        CHECK(lasso::lambda_max({x, Vector::Ones(2), 0.0, 1.0, 2}) == 0.0);
    }
    SUBCASE("seeded 20x5 at and above lambda_max") {
        auto pr = seeded_problem(12, 20, 5, 0.0);
        const double lmax = lasso::lambda_max(pr);
        for (double f : {1.0, 1.001, 3.0}) {
            pr.lambda = f * lmax;
            const auto sol = lasso::solve(pr);
            CHECK(sol.beta.isZero(0.0));
            CHECK(lasso::kkt_check(pr, sol.beta) == 0.0);
        }
        pr.lambda = 0.99 * lmax;
        CHECK_FALSE(lasso::solve(pr).beta.isZero(0.0));
    }
}

TEST_CASE("zero-norm column stays at zero") {
    Matrix x = random_matrix(13, 10, 3);
    x.col(1).setZero();
    const LassoProblem pr{x, random_vector(13, 10), 0.01, 1.0, 10};
    const auto sol = lasso::solve(pr, {}, Vector::Constant(3, 5.0));
    CHECK(sol.beta(1) == 0.0);
    CHECK(sol.converged);
}

TEST_CASE("coordinate descent matches proximal gradient") {
    double worst = 0.0;
    for (std::uint64_t s = 0; s < 50; ++s) {
        const Eigen::Index m = 10 + static_cast<Eigen::Index>(s % 21);
        const Eigen::Index p = 2 + static_cast<Eigen::Index>(s % 5);
        auto pr = seeded_problem(100 + s, m, p, 0.0);
        pr.loss_weight = 0.25 + 0.5 * static_cast<double>(s % 3);
        pr.lambda = 0.2 * lasso::lambda_max(pr);
        const auto sol = lasso::solve(pr, {1e-12, 100000});
        REQUIRE(sol.converged);
        worst = std::max(worst, max_abs(sol.beta - prox_gradient(pr, 100000)));
    }
    CHECK(worst <= 1e-5);
}

TEST_CASE("objective is non-increasing across sweeps") {
    auto pr = seeded_problem(21, 40, 60, 0.0);
    pr.lambda = 0.05 * lasso::lambda_max(pr);
    lasso::SolveOptions opts;
    opts.record_objective = true;
    const auto sol = lasso::solve(pr, opts);
    REQUIRE(sol.objective_trace.size() >= 2);
    for (std::size_t k = 1; k < sol.objective_trace.size(); ++k) {
        CHECK(sol.objective_trace[k] <= sol.objective_trace[k - 1] * (1 + 1e-12));
    }
    CHECK(sol.objective_trace.back() == doctest::Approx(lasso::objective(pr, sol.beta)));
}

TEST_CASE("converged solves certify KKT") {
    for (std::uint64_t s = 0; s < 30; ++s) {
        auto pr = seeded_problem(300 + s, 25, 40, 0.0);
        pr.lambda = (0.01 + 0.03 * static_cast<double>(s % 10)) * lasso::lambda_max(pr);
        const auto sol = lasso::solve(pr);
        if (sol.converged) CHECK(sol.kkt_violation <= 1e-6);
        CHECK(sol.kkt_violation == doctest::Approx(lasso::kkt_check(pr, sol.beta)).epsilon(1e-6));
    }
}

TEST_CASE("scaling and homogeneity") {
    auto pr = seeded_problem(31, 30, 8, 0.0);
    pr.lambda = 0.1 * lasso::lambda_max(pr);
    const auto base = lasso::solve(pr, {1e-12, 100000}).beta;

    auto scaled = pr;
    scaled.lambda *= 3.0;
    scaled.loss_weight *= 3.0;
    CHECK(max_abs(lasso::solve(scaled, {1e-12, 100000}).beta - base) < 1e-8);

    auto homog = pr;
    homog.target *= 2.5;
    homog.lambda *= 2.5;
    CHECK(max_abs(lasso::solve(homog, {1e-12, 100000}).beta - 2.5 * base) < 1e-8);
}

TEST_CASE("halving weight and lambda is bitwise identical") {
    auto pr = seeded_problem(41, 30, 50, 0.0);
    pr.loss_weight = 0.5;
    pr.lambda = 0.05 * lasso::lambda_max(pr);
    auto half = pr;
    half.loss_weight /= 2;
    half.lambda /= 2;
    CHECK(lasso::solve(pr).beta == lasso::solve(half).beta);
}

TEST_CASE("warm start reaches the same optimum") {
    auto pr = seeded_problem(51, 30, 10, 0.0);
    pr.lambda = 0.1 * lasso::lambda_max(pr);
    const auto cold = lasso::solve(pr, {1e-12, 100000});
    const auto warm = lasso::solve(pr, {1e-12, 100000}, cold.beta);
    CHECK(max_abs(warm.beta - cold.beta) < 1e-10);
    CHECK(warm.iterations <= cold.iterations);
}

TEST_CASE("invalid problems are rejected") {
    LassoProblem pr{Matrix::Ones(3, 2), Vector::Ones(2), 0.1, 1.0, 3};
    CHECK_THROWS_AS(lasso::solve(pr), Error);
    pr.target = Vector::Ones(3);
    pr.lambda = -1;
    CHECK_THROWS_AS(lasso::solve(pr), Error);
    pr.lambda = 0.1;
    pr.normalizer = 0;
    CHECK_THROWS_AS(lasso::solve(pr), Error);
    pr.normalizer = 3;
    pr.loss_weight = 0;
    CHECK_THROWS_AS(lasso::solve(pr), Error);
}

TEST_CASE("non-convergence is reported, not raised") {
    auto pr = seeded_problem(61, 30, 60, 0.0);
    pr.lambda = 1e-4;
    const auto sol = lasso::solve(pr, {1e-14, 2});
    CHECK_FALSE(sol.converged);
    CHECK(sol.iterations == 2);
}
