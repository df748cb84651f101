#include <doctest.h>

#include "catelasso/numlin.hpp"
#include "helpers.hpp"

using namespace catelasso;
using testutil::max_abs;
using testutil::random_matrix;
using testutil::random_vector;

namespace {

// Largest violation of the four Penrose conditions, relative to max(1, |A|max).
double penrose_violation(const Matrix& a, const Matrix& g) {
    const Eigen::MatrixXd A = a, G = g;
    const Eigen::MatrixXd ag = A * G, ga = G * A;
    const double v = std::max({max_abs(A * G * A - A), max_abs(G * A * G - G), max_abs(ag.transpose() - ag),
                               max_abs(ga.transpose() - ga)});
    return v / std::max(1.0, max_abs(A));
}

}  // namespace

TEST_CASE("pseudoinverse small cases") {
    Matrix d(2, 2);
    d << 2, 0, 0, 0;
    Matrix expected(2, 2);
    expected << 0.5, 0, 0, 0;
    CHECK(max_abs(numlin::pseudoinverse(d) - expected) < 1e-15);
    CHECK(max_abs(numlin::pseudoinverse(Matrix::Identity(3, 3)) - Matrix::Identity(3, 3)) < 1e-15);
    CHECK(max_abs(numlin::pseudoinverse(Matrix::Zero(3, 2))) == 0.0);
    CHECK(numlin::pseudoinverse(Matrix::Zero(3, 2)).rows() == 2);
}

TEST_CASE("Penrose conditions on a seeded 5x8 matrix") {
    const auto a = random_matrix(1, 5, 8);
    CHECK(penrose_violation(a, numlin::pseudoinverse(a)) < 1e-8);
}

TEST_CASE("Penrose conditions hold on seeded and rank-deficient matrices") {
    double worst = 0.0;
    for (std::uint64_t s = 0; s < 100; ++s) {
        const Eigen::Index m = 1 + static_cast<Eigen::Index>(s % 50);
        const Eigen::Index p = 1 + static_cast<Eigen::Index>((s * 7) % 50);
        const auto a = random_matrix(s, m, p);
        worst = std::max(worst, penrose_violation(a, numlin::pseudoinverse(a)));
        const Eigen::Index k = std::max<Eigen::Index>(1, std::min(m, p) / 2);
        const Matrix low = random_matrix(s, m, k, "b") * random_matrix(s, k, p, "c");
        worst = std::max(worst, penrose_violation(low, numlin::pseudoinverse(low)));
    }
    CHECK(worst < 1e-8);
}

TEST_CASE("svd factors are orthonormal and sorted") {
    const Matrix a = random_matrix(4, 12, 3, "b") * random_matrix(4, 3, 9, "c");
    const auto f = numlin::svd(a);
    CHECK(f.rank() == 3);
    const Eigen::Index r = f.rank();
    CHECK(max_abs(f.u.transpose() * f.u - Eigen::MatrixXd::Identity(r, r)) < 1e-10);
    CHECK(max_abs(f.v.transpose() * f.v - Eigen::MatrixXd::Identity(r, r)) < 1e-10);
    for (Eigen::Index i = 0; i < r; ++i) {
        CHECK(f.singular_values(i) > f.rank_tolerance);
        if (i > 0) CHECK(f.singular_values(i) <= f.singular_values(i - 1));
    }
}

TEST_CASE("min_norm_lsq") {
    SUBCASE("equal split") {
        Matrix a(1, 2);
        a << 1, 1;
        const auto b = numlin::min_norm_lsq(a, Vector{{2.0}});
        CHECK(b(0) == doctest::Approx(1.0));
        CHECK(b(1) == doctest::Approx(1.0));
    }
    SUBCASE("square invertible matches a direct solve") {
        const auto a = random_matrix(2, 6, 6);
        const auto y = random_vector(2, 6);
        const Eigen::MatrixXd A = a;
        const Vector direct = A.partialPivLu().solve(y);
        CHECK(max_abs(numlin::min_norm_lsq(a, y) - direct) < 1e-9);
    }
    SUBCASE("underdetermined: interpolates and lies in the row space") {
        const auto a = random_matrix(3, 10, 40);
        const auto y = random_vector(3, 10);
        const auto b = numlin::min_norm_lsq(a, y);
        CHECK(max_abs(a * b - y) < 1e-8);
        const Eigen::MatrixXd proj = Eigen::MatrixXd::Identity(40, 40) - numlin::pseudoinverse(a) * a;
        CHECK(max_abs(proj * b) < 1e-8);
    }
}

TEST_CASE("min-norm solution grows under null-space perturbations") {
    for (std::uint64_t s = 0; s < 20; ++s) {
        const auto a = random_matrix(s, 6, 15);
        const auto y = random_vector(s, 6);
        const auto b = numlin::min_norm_lsq(a, y);
        const Eigen::MatrixXd proj = Eigen::MatrixXd::Identity(15, 15) - numlin::pseudoinverse(a) * a;
        Vector v = proj * random_vector(s, 15, "null");
        v.normalize();
        CHECK(max_abs(a * v) < 1e-10);
        CHECK((b + 0.1 * v).norm() > b.norm());
        CHECK((b - 0.1 * v).norm() > b.norm());
    }
}

TEST_CASE("normal-equation form agrees with the pseudoinverse") {
    for (std::uint64_t s = 0; s < 10; ++s) {
        const auto a = random_matrix(s, 8, 20);
        const Matrix ata = a.transpose() * a;
        const Matrix lhs = numlin::pseudoinverse(ata) * a.transpose();
        CHECK(max_abs(lhs - numlin::pseudoinverse(a)) < 1e-8);
    }
}

TEST_CASE("gram") {
    CHECK(max_abs(numlin::gram(Matrix::Identity(4, 4), 4) - 0.25 * Matrix::Identity(4, 4)) < 1e-15);
    CHECK(numlin::gram(Matrix::Ones(4, 1), 4)(0, 0) == 1.0);
    const auto a = random_matrix(5, 6, 3);
    const auto g = numlin::gram(a, 6);
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            double s = 0.0;
            for (int k = 0; k < 6; ++k) s += a(k, i) * a(k, j);
            CHECK(g(i, j) == doctest::Approx(s / 6.0).epsilon(1e-13));
        }
    }
    CHECK(max_abs(g - g.transpose()) < 1e-12);
    CHECK_THROWS_AS(numlin::gram(a, 0), Error);
}

TEST_CASE("trace_pseudo_product") {
    const auto x = random_matrix(6, 20, 3);
    CHECK(numlin::trace_pseudo_product(x, x).trace == doctest::Approx(3.0).epsilon(1e-10));
    CHECK(numlin::trace_pseudo_product(x, Matrix::Zero(5, 3)).trace == 0.0);

    const auto x0 = random_matrix(8, 8, 3, "a");
    const auto x1 = random_matrix(8, 8, 3, "b");
    const Matrix prod = numlin::pseudoinverse(Matrix(x0.transpose() * x0)) * (x1.transpose() * x1);
    const auto tp = numlin::trace_pseudo_product(x0, x1);
    CHECK(tp.trace == doctest::Approx(prod.trace()).epsilon(1e-10));
    CHECK(tp.max_abs_entry == doctest::Approx(max_abs(prod)).epsilon(1e-10));

    // Rank-deficient control arm (p > m0).
    const auto w0 = random_matrix(9, 4, 10, "a");
    const auto w1 = random_matrix(9, 7, 10, "b");
    const Matrix wp = numlin::pseudoinverse(Matrix(w0.transpose() * w0)) * (w1.transpose() * w1);
    CHECK(numlin::trace_pseudo_product(w0, w1).trace == doctest::Approx(wp.trace()).epsilon(1e-8));
    CHECK_THROWS_AS(numlin::trace_pseudo_product(w0, random_matrix(1, 3, 4)), Error);
}
