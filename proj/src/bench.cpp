#include "catelasso/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>

#include "catelasso/io.hpp"
#include "catelasso/parallel.hpp"

namespace catelasso::bench {
namespace {

CateModel fit_method(const MethodSpec& spec, const ObservationSet& data, const ArmSplit& split) {
    const auto& o = spec.options;
    switch (spec.method) {
        case Method::cate_lasso:
            return fit_cate_lasso(split, o);
        case Method::t_ols:
            return fit_t_learner(split, Regressor::ols());
        case Method::t_lasso:
            return fit_t_learner(split, Regressor::lasso(o.lambda, o.tol, o.max_iter));
        case Method::ipw_ols:
        case Method::ipw_lasso: {
            if (!data.truth() || !data.truth()->propensities) {
                throw Error(ErrorKind::MissingPropensity, "IPW learner needs true propensities");
            }
            const auto reg = spec.method == Method::ipw_ols
                                 ? Regressor::ols()
                                 : Regressor::lasso(o.lambda, o.tol, o.max_iter);
            return fit_ipw_learner(data, *data.truth()->propensities, reg);
        }
    }
    throw Error(ErrorKind::InvalidInput, "unknown method");
}

Eigen::Index holdout_rows(const ExperimentConfig& cfg, Eigen::Index n) {
    const double rows = std::round(cfg.holdout_fraction * static_cast<double>(n));
    return std::max<Eigen::Index>(1, static_cast<Eigen::Index>(rows));
}

Matrix holdout_covariates(const ExperimentConfig& cfg, std::size_t replication, Eigen::Index n) {
    const std::uint64_t seed = cfg.seed_base + replication;
    if (const auto* s = std::get_if<simgen::SimConfig>(&cfg.dgp)) {
        auto c = *s;
        c.seed = seed;
        return simgen::gen_synthetic_covariates(c, holdout_rows(cfg, n));
    }
    if (const auto* h = std::get_if<simgen::IhdpConfig>(&cfg.dgp)) {
        auto c = *h;
        c.seed = seed;
        return simgen::gen_ihdp_covariates(c, holdout_rows(cfg, n));
    }
    throw Error(ErrorKind::Config, "holdout evaluation needs a generative dgp");
}

}  // namespace

ObservationSet make_dataset(const ExperimentConfig& cfg, std::size_t replication) {
    const std::uint64_t seed = cfg.seed_base + replication;
    if (const auto* s = std::get_if<simgen::SimConfig>(&cfg.dgp)) {
        auto c = *s;
        c.seed = seed;
        return simgen::gen_synthetic(c);
    }
    if (const auto* h = std::get_if<simgen::IhdpConfig>(&cfg.dgp)) {
        auto c = *h;
        c.seed = seed;
        return simgen::gen_ihdp_surface_a(c);
    }
    // A file-backed dataset is the same for every replication.
    const auto& f = std::get<CsvDataset>(cfg.dgp);
    return io::read_dataset_csv(f.data_path, io::read_truth_json(f.truth_path));
}

std::vector<double> RunResult::rmse_of(Method m) const {
    std::vector<double> out;
    for (const auto& r : records) {
        if (r.method == m) out.push_back(r.rmse);
    }
    return out;
}

double quantile_sorted(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) throw Error(ErrorKind::InvalidInput, "quantile of empty data");
    if (!(q >= 0.0 && q <= 1.0)) throw Error(ErrorKind::InvalidInput, "quantile level outside [0, 1]");
    const double h = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

Aggregate aggregate(std::vector<double> values) {
    std::erase_if(values, [](double v) { return !std::isfinite(v); });
    Aggregate a;
    a.count = values.size();
    if (values.empty()) {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        a.mean = a.median = a.q1 = a.q3 = a.min = a.max = nan;
        return a;
    }
    std::sort(values.begin(), values.end());
    // Summing in sorted order keeps the mean independent of replication order.
    double sum = 0.0;
    for (double v : values) sum += v;
    a.mean = sum / static_cast<double>(values.size());
    a.median = quantile_sorted(values, 0.5);
    a.q1 = quantile_sorted(values, 0.25);
    a.q3 = quantile_sorted(values, 0.75);
    a.min = values.front();
    a.max = values.back();
    return a;
}

RunResult run_experiment(const ExperimentConfig& cfg, std::optional<std::size_t> threads) {
    cfg.validate();
    const std::size_t k = cfg.methods.size();
    RunResult result;
    result.name = cfg.name;
    for (const auto& m : cfg.methods) result.methods.push_back(m.method);
    result.records.resize(cfg.replications * k);

    parallel_for(cfg.replications, threads.value_or(default_thread_count()), [&](std::size_t r) {
        RunRecord* slot = &result.records[r * k];
        for (std::size_t j = 0; j < k; ++j) {
            slot[j].replication = r;
            slot[j].method = cfg.methods[j].method;
            slot[j].lambda = cfg.methods[j].method == Method::t_ols ||
                                     cfg.methods[j].method == Method::ipw_ols
                                 ? 0.0
                                 : cfg.methods[j].options.lambda;
            slot[j].rmse = std::numeric_limits<double>::quiet_NaN();
        }
        std::optional<ObservationSet> data;
        std::optional<ArmSplit> split;
        Matrix eval_x;
        try {
            data.emplace(make_dataset(cfg, r));
            if (!data->truth()) throw Error(ErrorKind::MissingTruth, "dataset carries no ground truth");
            split.emplace(split_by_arm(*data));
            if (cfg.eval == EvalMode::holdout) eval_x = holdout_covariates(cfg, r, data->n());
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::Config || e.kind() == ErrorKind::Io) throw;
            for (std::size_t j = 0; j < k; ++j) slot[j].error = e.what();
            return;
        }
        const Vector truth = data->truth()->beta_diff();
        for (std::size_t j = 0; j < k; ++j) {
            const auto start = std::chrono::steady_clock::now();
            try {
                const CateModel model = fit_method(cfg.methods[j], *data, *split);
                slot[j].rmse = cfg.eval == EvalMode::holdout
                                   ? rmse_against_truth(model, eval_x, truth)
                                   : rmse_against_truth(model, *data);
                slot[j].lambda = model.lambda_used;
                slot[j].converged = model.converged();
            } catch (const std::exception& e) {
                slot[j].error = e.what();
            }
            const std::chrono::duration<double, std::milli> took = std::chrono::steady_clock::now() - start;
            slot[j].wall_ms = took.count();
        }
    });

    for (const auto m : result.methods) result.aggregates[m] = aggregate(result.rmse_of(m));
    return result;
}

}  // namespace catelasso::bench
