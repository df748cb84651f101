#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "catelasso/estimators.hpp"
#include "catelasso/simgen.hpp"

namespace catelasso::bench {

struct MethodSpec {
    Method method = Method::cate_lasso;
    FitOptions options;
};

/// A dataset already on disk in the `y,d,x1..xp` layout plus truth sidecar.
struct CsvDataset {
    std::string data_path;
    std::string truth_path;
};

using DgpSpec = std::variant<simgen::SimConfig, simgen::IhdpConfig, CsvDataset>;

enum class EvalMode { in_sample, holdout };

struct OutputSpec {
    std::string dir = ".";
    std::string prefix = "results";
    bool csv = true;
    bool json = true;
    bool svg = true;
    /// Write measured wall times. Off by default so that outputs are a
    /// pure function of (config, seed).
    bool timing = false;
};

struct TheorySpec {
    double t = 2.0;
    std::size_t compat_budget = 10'000;
    double overlap_phi = 0.05;
};

/// One config = one figure panel.
struct ExperimentConfig {
    std::string name = "experiment";
    DgpSpec dgp = simgen::SimConfig{};
    std::vector<MethodSpec> methods;
    std::size_t replications = 100;
    std::uint64_t seed_base = 1;
    EvalMode eval = EvalMode::in_sample;
    double holdout_fraction = 1.0;
    OutputSpec output;
    TheorySpec theory;

    /// Throws Error(Config) when the config cannot be run.
    void validate() const;
};

/// Throws Error(Config) on malformed or invalid input.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);

/// Dataset for replication r (seed = seed_base + r).
ObservationSet make_dataset(const ExperimentConfig& cfg, std::size_t replication);

struct RunRecord {
    std::size_t replication = 0;
    Method method = Method::cate_lasso;
    double rmse = 0.0;
    double lambda = 0.0;
    bool converged = false;
    double wall_ms = 0.0;
    std::string error;  ///< empty on success
};

struct Aggregate {
    std::size_t count = 0;  ///< records with a finite RMSE
    double mean = 0.0;
    double median = 0.0;
    double q1 = 0.0;
    double q3 = 0.0;
    double min = 0.0;
    double max = 0.0;
};

struct RunResult {
    std::string name;
    std::vector<Method> methods;  ///< config order
    std::vector<RunRecord> records;  ///< sorted by replication, then method order
    std::map<Method, Aggregate> aggregates;

    std::vector<double> rmse_of(Method m) const;
};

/// Type-7 (linear interpolation) quantile of sorted data, q in [0, 1].
double quantile_sorted(const std::vector<double>& sorted, double q);

Aggregate aggregate(std::vector<double> values);

/// Runs every method on every replication. Deterministic in the config and
/// seed regardless of `threads`; fit failures are recorded per record.
RunResult run_experiment(const ExperimentConfig& cfg, std::optional<std::size_t> threads = {});

}  // namespace catelasso::bench
