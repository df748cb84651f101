#include "catelasso/core_model.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace catelasso {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidInput: return "InvalidInput";
        case ErrorKind::EmptyArm: return "EmptyArm";
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::MissingPropensity: return "MissingPropensity";
        case ErrorKind::PropensityOutOfRange: return "PropensityOutOfRange";
        case ErrorKind::MissingTruth: return "MissingTruth";
        case ErrorKind::NonFiniteProduct: return "NonFiniteProduct";
        case ErrorKind::NegativeDiagonal: return "NegativeDiagonal";
        case ErrorKind::CsvParse: return "CsvParse";
        case ErrorKind::MissingTreatmentColumn: return "MissingTreatmentColumn";
        case ErrorKind::Config: return "Config";
        case ErrorKind::Io: return "Io";
    }
    return "Unknown";
}

CoefVector::CoefVector(Vector v, CoefRole r) : values(std::move(v)), role(r) {
    if (!values.allFinite()) {
        throw Error(ErrorKind::InvalidInput, "coefficient vector has non-finite entries");
    }
}

void GroundTruth::validate(Eigen::Index n, Eigen::Index p) const {
    if (beta1.size() != p || beta0.size() != p) {
        throw Error(ErrorKind::InvalidInput, "ground-truth coefficients must have length p=" +
                                                 std::to_string(p));
    }
    const auto differing = ((beta1 - beta0).array() != 0.0).count();
    if (static_cast<std::size_t>(differing) > s0) {
        throw Error(ErrorKind::InvalidInput, "beta1 and beta0 differ on " +
                                                 std::to_string(differing) +
                                                 " coordinates, more than s0=" + std::to_string(s0));
    }
    if (propensities) {
        if (propensities->size() != n) {
            throw Error(ErrorKind::InvalidInput, "propensity vector must have length n");
        }
        for (double e : *propensities) {
            if (!(e > 0.0 && e < 1.0)) {
                throw Error(ErrorKind::InvalidInput, "propensities must lie strictly in (0,1)");
            }
        }
    }
}

ObservationSet::ObservationSet(Matrix covariates, std::vector<int> treatments, Vector outcomes,
                               std::optional<GroundTruth> truth)
    : covariates_(std::move(covariates)),
      treatments_(std::move(treatments)),
      outcomes_(std::move(outcomes)),
      truth_(std::move(truth)) {
    const auto n = covariates_.rows();
    if (static_cast<Eigen::Index>(treatments_.size()) != n || outcomes_.size() != n) {
        throw Error(ErrorKind::DimensionMismatch,
                    "covariates, treatments and outcomes must have the same number of rows");
    }
    if (!covariates_.allFinite()) {
        throw Error(ErrorKind::InvalidInput, "covariates contain non-finite entries");
    }
    if (!outcomes_.allFinite()) {
        throw Error(ErrorKind::InvalidInput, "outcomes contain non-finite entries");
    }
    for (int d : treatments_) {
        if (d != 0 && d != 1) {
            throw Error(ErrorKind::InvalidInput,
                        "treatment must be binary, got " + std::to_string(d));
        }
        treated_ += static_cast<std::size_t>(d);
    }
    if (treated_ == 0 || treated_ == treatments_.size()) {
        throw Error(ErrorKind::EmptyArm, "both treatment arms need at least one unit (m1=" +
                                             std::to_string(treated_) + ", m0=" +
                                             std::to_string(treatments_.size() - treated_) + ")");
    }
    if (truth_) truth_->validate(n, covariates_.cols());
}

ArmSplit split_by_arm(const ObservationSet& data) {
    const auto m1 = static_cast<Eigen::Index>(data.treated_count());
    const auto m0 = static_cast<Eigen::Index>(data.control_count());
    if (m1 == 0 || m0 == 0) throw Error(ErrorKind::EmptyArm, "one treatment arm is empty");

    ArmSplit split;
    split.n_total = data.n();
    split.x1.resize(m1, data.p());
    split.x0.resize(m0, data.p());
    split.y1.resize(m1);
    split.y0.resize(m0);

    Eigen::Index i1 = 0;
    Eigen::Index i0 = 0;
    const auto& d = data.treatments();
    for (Eigen::Index i = 0; i < data.n(); ++i) {
        if (d[static_cast<std::size_t>(i)] == 1) {
            split.x1.row(i1) = data.covariates().row(i);
            split.y1(i1++) = data.outcomes()(i);
        } else {
            split.x0.row(i0) = data.covariates().row(i);
            split.y0(i0++) = data.outcomes()(i);
        }
    }
    return split;
}

OverlapReport check_overlap(const ObservationSet& data, double phi,
                            const std::optional<Vector>& propensity) {
    if (!(phi > 0.0 && phi < 0.5)) {
        throw Error(ErrorKind::InvalidInput, "overlap threshold phi must lie in (0, 0.5)");
    }
    const Vector* e = nullptr;
    if (propensity) {
        e = &*propensity;
    } else if (data.truth() && data.truth()->propensities) {
        e = &*data.truth()->propensities;
    }
    if (e == nullptr) throw Error(ErrorKind::MissingPropensity, "no propensity available");
    if (e->size() != data.n()) {
        throw Error(ErrorKind::DimensionMismatch, "propensity vector must have length n");
    }

    OverlapReport report;
    report.phi = phi;
    for (double v : *e) {
        if (!(v > phi && v < 1.0 - phi)) ++report.count_outside;
    }
    report.fraction_outside =
        static_cast<double>(report.count_outside) / static_cast<double>(data.n());
    report.pass = report.count_outside == 0;
    return report;
}

}  // namespace catelasso
