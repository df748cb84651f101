#include "catelasso/cli.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

#include "catelasso/bench.hpp"
#include "catelasso/io.hpp"
#include "catelasso/report.hpp"
#include "catelasso/theory.hpp"

namespace catelasso {
namespace {

constexpr int kConfigError = 1;
constexpr int kRuntimeError = 2;

double default_noise_sd(const bench::ExperimentConfig& cfg) {
    if (const auto* s = std::get_if<simgen::SimConfig>(&cfg.dgp)) return s->noise_sd;
    return 1.0;
}

int run_command(const std::string& config_path, const std::optional<std::string>& out_dir,
                const std::optional<std::uint64_t>& seed, const std::optional<std::size_t>& threads,
                std::ostream& out) {
    auto cfg = bench::load_config(config_path);
    if (out_dir) cfg.output.dir = *out_dir;
    if (seed) cfg.seed_base = *seed;
    const auto result = bench::run_experiment(cfg, threads);
    for (const auto& path : report::emit_report(result, cfg.output)) out << "wrote " << path << "\n";
    for (auto m : result.methods) {
        const auto& a = result.aggregates.at(m);
        out << to_string(m) << ": median rmse " << io::format_double(a.median) << " over " << a.count
            << " replications\n";
    }
    return 0;
}

int diagnose_command(const std::string& config_path, const std::optional<std::uint64_t>& seed,
                     std::optional<double> sigma1, std::optional<double> sigma0, std::ostream& out) {
    auto cfg = bench::load_config(config_path);
    if (seed) cfg.seed_base = *seed;
    const auto data = bench::make_dataset(cfg, 0);
    const double noise = default_noise_sd(cfg);
    theory::CompatibilityOptions compat;
    compat.budget = cfg.theory.compat_budget;
    compat.seed = cfg.seed_base;

    nlohmann::ordered_json j;
    j["name"] = cfg.name;
    j["n"] = data.n();
    j["p"] = data.p();
    j["treated"] = data.treated_count();
    j["control"] = data.control_count();
    if (data.truth()) {
        j["theory"] = theory::to_json(
            theory::theory_report(data, sigma1.value_or(noise), sigma0.value_or(noise), cfg.theory.t, compat));
    } else {
        j["theory"] = nullptr;
    }
    if (data.truth() && data.truth()->propensities) {
        const auto ov = check_overlap(data, cfg.theory.overlap_phi);
        j["overlap"] = {{"phi", ov.phi},
                        {"fraction_outside", ov.fraction_outside},
                        {"count_outside", ov.count_outside},
                        {"pass", ov.pass}};
    } else {
        j["overlap"] = nullptr;
    }
    out << j.dump(2) << "\n";
    return 0;
}

int gen_command(const std::string& config_path, const std::string& out_csv,
                const std::optional<std::string>& truth_path, const std::optional<std::uint64_t>& seed,
                std::ostream& out) {
    auto cfg = bench::load_config(config_path);
    if (seed) cfg.seed_base = *seed;
    const auto data = bench::make_dataset(cfg, 0);
    io::write_dataset_csv(out_csv, data);
    out << "wrote " << out_csv << "\n";
    if (data.truth()) {
        const auto sidecar = truth_path.value_or(out_csv + ".truth.json");
        io::write_truth_json(sidecar, *data.truth());
        out << "wrote " << sidecar << "\n";
    }
    return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"CATE Lasso benchmark runner", "cate_bench"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::string> out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> threads;
    std::optional<double> sigma1, sigma0;
    std::string out_csv;
    std::optional<std::string> truth_path;

    auto* run = app.add_subcommand("run", "Run every replication and write the reports");
    run->add_option("--config", config_path, "Experiment config (JSON)")->required();
    run->add_option("--out-dir", out_dir, "Override output.dir");
    run->add_option("--seed", seed, "Override seed_base");
    run->add_option("--threads", threads, "Worker count (default CATE_BENCH_THREADS or cores)")
        ->check(CLI::PositiveNumber);

    auto* diag = app.add_subcommand("diagnose", "Theory diagnostics for one generated dataset");
    diag->add_option("--config", config_path, "Experiment config (JSON)")->required();
    diag->add_option("--seed", seed, "Override seed_base");
    diag->add_option("--sigma1", sigma1, "Treated-arm noise sd (default: dgp noise_sd)");
    diag->add_option("--sigma0", sigma0, "Control-arm noise sd (default: dgp noise_sd)");

    auto* gen = app.add_subcommand("gen", "Write the replication-0 dataset as CSV");
    gen->add_option("--config", config_path, "Experiment config (JSON)")->required();
    gen->add_option("--out", out_csv, "Output CSV path")->required();
    gen->add_option("--truth", truth_path, "Truth sidecar path (default <out>.truth.json)");
    gen->add_option("--seed", seed, "Override seed_base");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::CallForVersion&) {
        out << kVersion << "\n";
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n" << app.help();
        return kConfigError;
    }

    try {
        if (run->parsed()) return run_command(config_path, out_dir, seed, threads, out);
        if (diag->parsed()) return diagnose_command(config_path, seed, sigma1, sigma0, out);
        return gen_command(config_path, out_csv, truth_path, seed, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return e.kind() == ErrorKind::Config ? kConfigError : kRuntimeError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kRuntimeError;
    }
}

}  // namespace catelasso
