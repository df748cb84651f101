#include "catelasso/simgen.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "catelasso/io.hpp"
#include "catelasso/rng.hpp"

namespace catelasso::simgen {
namespace {

// Keeps the logistic propensity strictly inside (0, 1) once exp() saturates.
constexpr double kPropensityFloor = 1e-12;

void fill_standard_normal_design(Matrix& x, RngStream& rng) {
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        x(i, 0) = 1.0;
        for (Eigen::Index j = 1; j < x.cols(); ++j) x(i, j) = rng.normal();
    }
}

Matrix surrogate_block(RngStream& rng, Eigen::Index rows) {
    Matrix x(rows, kIhdpCovariates);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < kIhdpContinuous; ++j) x(i, j) = rng.normal();
        for (Eigen::Index j = kIhdpContinuous; j < kIhdpCovariates; ++j) {
            x(i, j) = rng.bernoulli(0.5) ? 1.0 : 0.0;
        }
    }
    return x;
}

Matrix assemble_ihdp_design(const Matrix& base, const IhdpConfig& cfg, RngStream& extra_rng) {
    const Eigen::Index extra = cfg.extension == IhdpExtension::none ? 0 : cfg.extra_dim;
    Matrix x(base.rows(), 1 + base.cols() + extra);
    x.col(0).setOnes();
    x.middleCols(1, base.cols()) = base;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        for (Eigen::Index j = 0; j < extra; ++j) x(i, 1 + base.cols() + j) = extra_rng.uniform(-1.0, 1.0);
    }
    return x;
}

}  // namespace

void SimConfig::validate() const {
    if (n < 2) throw Error(ErrorKind::InvalidInput, "SimConfig: n must be >= 2");
    if (p < 1) throw Error(ErrorKind::InvalidInput, "SimConfig: p must be >= 1");
    if (s0 < 1 || static_cast<Eigen::Index>(s0) > p) {
        throw Error(ErrorKind::InvalidInput, "SimConfig: need 1 <= s0 <= p");
    }
    if (!(noise_sd >= 0.0) || !std::isfinite(noise_sd)) {
        throw Error(ErrorKind::InvalidInput, "SimConfig: noise_sd must be finite and >= 0");
    }
    if (!(coef_range >= 0.0) || !std::isfinite(coef_range)) {
        throw Error(ErrorKind::InvalidInput, "SimConfig: coef_range must be finite and >= 0");
    }
}

ObservationSet gen_synthetic(const SimConfig& cfg) {
    cfg.validate();
    const Eigen::Index n = cfg.n;
    const Eigen::Index p = cfg.p;
    const auto s0 = static_cast<Eigen::Index>(cfg.s0);

    // Arm coefficients: individual block first, then the common tail.
    RngStream coef_rng = rng_stream(cfg.seed, "synthetic.coefficients");
    Vector beta1 = Vector::Zero(p);
    Vector beta0 = Vector::Zero(p);
    for (Eigen::Index j = 0; j < s0; ++j) beta1(j) = coef_rng.uniform(-cfg.coef_range, cfg.coef_range);
    for (Eigen::Index j = 0; j < s0; ++j) beta0(j) = coef_rng.uniform(-cfg.coef_range, cfg.coef_range);
    if (cfg.common_mode == CommonMode::dense_common) {
        for (Eigen::Index j = s0; j < p; ++j) {
            const double shared = coef_rng.uniform(-cfg.coef_range, cfg.coef_range);
            beta1(j) = shared;
            beta0(j) = shared;
        }
    }

    RngStream x_rng = rng_stream(cfg.seed, "synthetic.covariates");
    Matrix x(n, p);
    fill_standard_normal_design(x, x_rng);

    RngStream theta_rng = rng_stream(cfg.seed, "synthetic.theta");
    Vector theta(p);
    for (Eigen::Index j = 0; j < p; ++j) theta(j) = theta_rng.uniform(-1.0, 1.0);

    RngStream assign_rng = rng_stream(cfg.seed, "synthetic.assignment");
    const Vector index = x * theta;
    Vector propensity(n);
    std::vector<int> d(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        const double eta = assign_rng.normal();
        double e = 1.0 / (1.0 + std::exp(-index(i) + eta));
        e = std::clamp(e, kPropensityFloor, 1.0 - kPropensityFloor);
        propensity(i) = e;
        d[static_cast<std::size_t>(i)] = assign_rng.bernoulli(e) ? 1 : 0;
    }

    RngStream noise_rng = rng_stream(cfg.seed, "synthetic.noise");
    const Vector mu1 = x * beta1;
    const Vector mu0 = x * beta0;
    Vector y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double y1 = mu1(i) + cfg.noise_sd * noise_rng.normal();
        const double y0 = mu0(i) + cfg.noise_sd * noise_rng.normal();
        y(i) = d[static_cast<std::size_t>(i)] == 1 ? y1 : y0;
    }

    GroundTruth truth{std::move(beta1), std::move(beta0), cfg.s0, std::move(propensity)};
    return ObservationSet(std::move(x), std::move(d), std::move(y), std::move(truth));
}

Matrix gen_synthetic_covariates(const SimConfig& cfg, Eigen::Index rows) {
    cfg.validate();
    RngStream rng = rng_stream(cfg.seed, "synthetic.holdout_covariates");
    Matrix x(rows, cfg.p);
    fill_standard_normal_design(x, rng);
    return x;
}

ObservationSet redraw_outcomes(const ObservationSet& data, double noise_sd, std::uint64_t seed) {
    if (!data.truth()) throw Error(ErrorKind::MissingTruth, "redraw_outcomes needs ground truth");
    const auto& t = *data.truth();
    RngStream rng = rng_stream(seed, "fixed_design.noise");
    const Vector mu1 = data.covariates() * t.beta1;
    const Vector mu0 = data.covariates() * t.beta0;
    Vector y(data.n());
    for (Eigen::Index i = 0; i < data.n(); ++i) {
        const double y1 = mu1(i) + noise_sd * rng.normal();
        const double y0 = mu0(i) + noise_sd * rng.normal();
        y(i) = data.treatments()[static_cast<std::size_t>(i)] == 1 ? y1 : y0;
    }
    return ObservationSet(data.covariates(), data.treatments(), std::move(y), data.truth());
}

void IhdpConfig::validate() const {
    if (extension != IhdpExtension::none && extra_dim < 1) {
        throw Error(ErrorKind::InvalidInput, "IhdpConfig: extensions need extra_dim >= 1");
    }
    if (source == IhdpSource::csv_path && csv_path.empty()) {
        throw Error(ErrorKind::InvalidInput, "IhdpConfig: csv source needs a path");
    }
}

IhdpCovariates load_ihdp_csv(const std::string& path) {
    const io::CsvTable table = io::read_csv(path);
    IhdpCovariates out;
    const auto rows = static_cast<Eigen::Index>(table.rows.size());
    out.x.resize(rows, kIhdpCovariates);

    std::vector<std::size_t> x_cols;
    std::optional<std::size_t> t_col;
    if (!table.header.empty()) {
        for (Eigen::Index j = 1; j <= kIhdpCovariates; ++j) {
            auto c = table.column("x" + std::to_string(j));
            if (!c) throw Error(ErrorKind::CsvParse, path + ": missing column x" + std::to_string(j));
            x_cols.push_back(*c);
        }
        t_col = table.column("treatment");
        if (!t_col) t_col = table.column("d");
    } else {
        if (table.rows.front().size() == static_cast<std::size_t>(kIhdpCovariates)) {
            for (std::size_t j = 0; j < kIhdpCovariates; ++j) x_cols.push_back(j);
        } else if (table.rows.front().size() == static_cast<std::size_t>(kIhdpCovariates) + 5) {
            t_col = 0;
            for (std::size_t j = 0; j < kIhdpCovariates; ++j) x_cols.push_back(5 + j);
        } else {
            throw Error(ErrorKind::CsvParse, path + ": headerless IHDP file must have 25 or 30 columns");
        }
    }

    std::vector<int> treatment;
    for (Eigen::Index i = 0; i < rows; ++i) {
        const auto& row = table.rows[static_cast<std::size_t>(i)];
        for (Eigen::Index j = 0; j < kIhdpCovariates; ++j) {
            out.x(i, j) = row[x_cols[static_cast<std::size_t>(j)]];
        }
        if (t_col) {
            const double tv = row[*t_col];
            if (tv != 0.0 && tv != 1.0) throw Error(ErrorKind::CsvParse, path + ": treatment must be 0/1");
            treatment.push_back(static_cast<int>(tv));
        }
    }
    if (t_col) out.treatment = std::move(treatment);
    return out;
}

Matrix ihdp_surrogate_covariates(std::uint64_t seed, Eigen::Index rows) {
    RngStream rng = rng_stream(seed, "ihdp.covariates");
    return surrogate_block(rng, rows);
}

ObservationSet gen_ihdp_surface_a(const IhdpConfig& cfg) {
    cfg.validate();

    Matrix base;
    std::optional<std::vector<int>> treatment;
    if (cfg.source == IhdpSource::csv_path) {
        auto loaded = load_ihdp_csv(cfg.csv_path);
        base = std::move(loaded.x);
        treatment = std::move(loaded.treatment);
    } else {
        base = ihdp_surrogate_covariates(cfg.seed);
    }
    const Eigen::Index n = base.rows();

    RngStream extra_rng = rng_stream(cfg.seed, "ihdp.extra_covariates");
    Matrix x = assemble_ihdp_design(base, cfg, extra_rng);
    const Eigen::Index p = x.cols();

    // Surface A coefficients on (0,1,2,3,4) with probabilities (.5,.2,.15,.1,.05).
    constexpr std::array<double, 5> kWeights{0.5, 0.2, 0.15, 0.1, 0.05};
    RngStream beta_rng = rng_stream(cfg.seed, "ihdp.beta_a");
    Vector shared = Vector::Zero(p);
    for (Eigen::Index j = 1; j <= kIhdpCovariates; ++j) {
        shared(j) = static_cast<double>(beta_rng.categorical(kWeights));
    }
    if (cfg.extension != IhdpExtension::none) {
        const double hi = cfg.extension == IhdpExtension::setting1 ? 5.0 : 10.0;
        RngStream tilde_rng = rng_stream(cfg.seed, "ihdp.beta_tilde");
        for (Eigen::Index j = 1 + kIhdpCovariates; j < p; ++j) shared(j) = tilde_rng.uniform(0.0, hi);
    }
    Vector beta1 = shared;
    Vector beta0 = shared;
    beta1(0) = kIhdpEffect;

    std::optional<Vector> propensity;
    std::vector<int> d;
    if (treatment) {
        d = std::move(*treatment);
    } else {
        RngStream t_rng = rng_stream(cfg.seed, "ihdp.treatment");
        d.resize(static_cast<std::size_t>(n));
        for (auto& di : d) di = t_rng.bernoulli(0.5) ? 1 : 0;
        propensity = Vector::Constant(n, 0.5);
    }

    RngStream noise_rng = rng_stream(cfg.seed, "ihdp.noise");
    const Vector mean = x * shared;
    Vector y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double y1 = mean(i) + kIhdpEffect + noise_rng.normal();
        const double y0 = mean(i) + noise_rng.normal();
        y(i) = d[static_cast<std::size_t>(i)] == 1 ? y1 : y0;
    }

    GroundTruth truth{std::move(beta1), std::move(beta0), 1, std::move(propensity)};
    return ObservationSet(std::move(x), std::move(d), std::move(y), std::move(truth));
}

Matrix gen_ihdp_covariates(const IhdpConfig& cfg, Eigen::Index rows) {
    cfg.validate();
    if (cfg.source != IhdpSource::synthetic_surrogate) {
        throw Error(ErrorKind::Config, "fresh IHDP covariates are only available for the surrogate");
    }
    RngStream rng = rng_stream(cfg.seed, "ihdp.holdout_covariates");
    const Matrix base = surrogate_block(rng, rows);
    RngStream extra_rng = rng_stream(cfg.seed, "ihdp.holdout_extra");
    return assemble_ihdp_design(base, cfg, extra_rng);
}

}  // namespace catelasso::simgen
