#pragma once

#include <cstdint>
#include <string>

#include "catelasso/core_model.hpp"
#include "catelasso/rng.hpp"

namespace testutil {

using catelasso::Matrix;
using catelasso::Vector;

inline Matrix random_matrix(std::uint64_t seed, Eigen::Index m, Eigen::Index p,
                            const std::string& label = "test.matrix") {
    auto rng = catelasso::rng_stream(seed, label);
    Matrix a(m, p);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < p; ++j) a(i, j) = rng.normal();
    }
    return a;
}

inline Vector random_vector(std::uint64_t seed, Eigen::Index m, const std::string& label = "test.vector") {
    auto rng = catelasso::rng_stream(seed, label);
    Vector v(m);
    for (Eigen::Index i = 0; i < m; ++i) v(i) = rng.normal();
    return v;
}

inline double max_abs(const Eigen::MatrixXd& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

}  // namespace testutil
