#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "catelasso/core_model.hpp"

namespace catelasso::simgen {

/// How coordinates s0+1..p of the arm coefficients are drawn.
///   paper_literal: zero in both arms, so each arm is itself s0-sparse.
///   dense_common:  one shared uniform draw copied into both arms, so the
///                  arms are dense but their difference is s0-sparse.
enum class CommonMode { paper_literal, dense_common };

struct SimConfig {
    Eigen::Index n = 500;
    Eigen::Index p = 300;
    std::size_t s0 = 10;
    std::uint64_t seed = 0;
    CommonMode common_mode = CommonMode::dense_common;
    double noise_sd = 1.0;
    double coef_range = 10.0;

    void validate() const;
};

/// Linear-logistic synthetic design.
///
/// X_i = (1, V_i) with V_i ~ N(0, I_{p-1}); propensity
/// 1 / (1 + exp(-X_i^T theta + eta_i)) with theta ~ U[-1,1]^p and
/// eta_i ~ N(0,1); Y^d_i = X_i^T beta^d + noise_sd * eps^d_i.
/// Deterministic in cfg.seed.
ObservationSet gen_synthetic(const SimConfig& cfg);

/// Fresh covariate rows (1, V_i) from the synthetic design, for holdout
/// scoring. Independent of the dataset drawn by gen_synthetic(cfg).
Matrix gen_synthetic_covariates(const SimConfig& cfg, Eigen::Index rows);

/// Same covariates, treatments and truth as `data`, with new outcome noise
/// drawn from seed. Used for fixed-design Monte Carlo.
ObservationSet redraw_outcomes(const ObservationSet& data, double noise_sd, std::uint64_t seed);

enum class IhdpSource { synthetic_surrogate, csv_path };
enum class IhdpExtension { none, setting1, setting2 };

struct IhdpConfig {
    IhdpSource source = IhdpSource::synthetic_surrogate;
    std::string csv_path;
    IhdpExtension extension = IhdpExtension::none;
    Eigen::Index extra_dim = 500;
    std::uint64_t seed = 0;

    void validate() const;
};

inline constexpr Eigen::Index kIhdpRows = 747;
inline constexpr Eigen::Index kIhdpContinuous = 6;
inline constexpr Eigen::Index kIhdpBinary = 19;
inline constexpr Eigen::Index kIhdpCovariates = kIhdpContinuous + kIhdpBinary;
inline constexpr double kIhdpEffect = 4.0;

/// IHDP covariates and, when present, the treatment column.
struct IhdpCovariates {
    Matrix x;  ///< rows x 25, without intercept
    std::optional<std::vector<int>> treatment;
};

/// Reads either a headered CSV (columns x1..x25, optional `treatment` or
/// `d`) or the headerless 30-column layout
/// treatment, y_factual, y_cfactual, mu0, mu1, x1..x25.
IhdpCovariates load_ihdp_csv(const std::string& path);

/// 747 x 25 surrogate: 6 standard-normal and 19 Bernoulli(0.5) columns.
Matrix ihdp_surrogate_covariates(std::uint64_t seed, Eigen::Index rows = kIhdpRows);

/// Response surface A with optional high-dimensional extension.
///
/// The design is (1, X_i, Z_i) where Z_i ~ U[-1,1]^extra_dim is present only
/// for setting1/setting2. Y^1 ~ N(mean + 4, 1), Y^0 ~ N(mean, 1), so the
/// true CATE is 4 everywhere and lives on the intercept coordinate.
ObservationSet gen_ihdp_surface_a(const IhdpConfig& cfg);

/// Fresh design rows (1, X, Z) for holdout scoring of a surrogate config.
Matrix gen_ihdp_covariates(const IhdpConfig& cfg, Eigen::Index rows);

}  // namespace catelasso::simgen
