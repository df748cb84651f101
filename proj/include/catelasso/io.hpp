#pragma once

#include <optional>
#include <string>
#include <vector>

#include "catelasso/core_model.hpp"

namespace catelasso::io {

/// Shortest decimal form that parses back to exactly the same double.
std::string format_double(double v);

/// Numeric CSV contents. `header` is empty for headerless files.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    /// Index of a header column, if present.
    std::optional<std::size_t> column(const std::string& name) const;
};

/// Parses a comma-separated file of numbers. A first line containing any
/// non-numeric field is taken as the header. Throws CsvParse / Io.
CsvTable read_csv(const std::string& path);

/// Writes `y,d,x1..xp` with a header row, one unit per line.
void write_dataset_csv(const std::string& path, const ObservationSet& data);

/// Reads the `y,d,x1..xp` layout; any `beta1_j` / `beta0_j` columns are
/// ignored. `truth`, if given, is attached to the returned set.
ObservationSet read_dataset_csv(const std::string& path,
                                std::optional<GroundTruth> truth = std::nullopt);

/// Sidecar {"beta1": [...], "beta0": [...], "s0": k, "propensities": [...]}.
void write_truth_json(const std::string& path, const GroundTruth& truth);
GroundTruth read_truth_json(const std::string& path);

}  // namespace catelasso::io
