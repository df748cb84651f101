#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>

#include "catelasso/bench.hpp"

namespace catelasso::bench {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) { throw Error(ErrorKind::Config, msg); }

void reject_unknown(const json& obj, const std::string& where, std::set<std::string> allowed) {
    for (const auto& [key, _] : obj.items()) {
        if (!allowed.contains(key)) fail(where + ": unknown key '" + key + "'");
    }
}

template <class T>
T get_or(const json& obj, const char* key, T fallback, const std::string& where) {
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        fail(where + ": field '" + key + "' has the wrong type");
    }
}

simgen::SimConfig parse_synthetic(const json& j) {
    reject_unknown(j, "dgp", {"kind", "n", "p", "s0", "common_mode", "noise_sd", "coef_range"});
    simgen::SimConfig c;
    c.n = get_or<Eigen::Index>(j, "n", c.n, "dgp");
    c.p = get_or<Eigen::Index>(j, "p", c.p, "dgp");
    c.s0 = get_or<std::size_t>(j, "s0", c.s0, "dgp");
    c.noise_sd = get_or<double>(j, "noise_sd", c.noise_sd, "dgp");
    c.coef_range = get_or<double>(j, "coef_range", c.coef_range, "dgp");
    const auto mode = get_or<std::string>(j, "common_mode", "dense_common", "dgp");
    if (mode == "dense_common") {
        c.common_mode = simgen::CommonMode::dense_common;
    } else if (mode == "paper_literal") {
        c.common_mode = simgen::CommonMode::paper_literal;
    } else {
        fail("dgp: common_mode must be 'dense_common' or 'paper_literal'");
    }
    return c;
}

simgen::IhdpConfig parse_ihdp(const json& j, const std::filesystem::path& base_dir) {
    reject_unknown(j, "dgp", {"kind", "source", "csv_path", "extension", "extra_dim"});
    simgen::IhdpConfig c;
    const auto source = get_or<std::string>(j, "source", "surrogate", "dgp");
    if (source == "surrogate") {
        c.source = simgen::IhdpSource::synthetic_surrogate;
    } else if (source == "csv") {
        c.source = simgen::IhdpSource::csv_path;
        auto path = std::filesystem::path(get_or<std::string>(j, "csv_path", "", "dgp"));
        if (path.empty()) fail("dgp: ihdp csv source needs 'csv_path'");
        if (path.is_relative()) path = base_dir / path;
        c.csv_path = path.string();
    } else {
        fail("dgp: ihdp source must be 'surrogate' or 'csv'");
    }
    const auto ext = get_or<std::string>(j, "extension", "none", "dgp");
    if (ext == "none") {
        c.extension = simgen::IhdpExtension::none;
    } else if (ext == "setting1") {
        c.extension = simgen::IhdpExtension::setting1;
    } else if (ext == "setting2") {
        c.extension = simgen::IhdpExtension::setting2;
    } else {
        fail("dgp: extension must be 'none', 'setting1' or 'setting2'");
    }
    c.extra_dim = get_or<Eigen::Index>(j, "extra_dim", c.extra_dim, "dgp");
    return c;
}

CsvDataset parse_csv_dgp(const json& j, const std::filesystem::path& base_dir) {
    reject_unknown(j, "dgp", {"kind", "data", "truth"});
    auto resolve = [&](const char* key) {
        auto path = std::filesystem::path(get_or<std::string>(j, key, "", "dgp"));
        if (path.empty()) fail(std::string("dgp: csv dataset needs '") + key + "'");
        if (path.is_relative()) path = base_dir / path;
        return path.string();
    };
    return {resolve("data"), resolve("truth")};
}

Method parse_method_name(const std::string& name) {
    try {
        return method_from_string(name);
    } catch (const Error& e) {
        fail(std::string("methods: ") + e.what());
    }
}

MethodSpec parse_method(const json& j) {
    if (j.is_string()) return {parse_method_name(j.get<std::string>()), {}};
    if (!j.is_object()) fail("methods: entries must be strings or objects");
    reject_unknown(j, "method", {"method", "lambda", "delta", "tol", "max_iter"});
    MethodSpec m;
    m.method = parse_method_name(get_or<std::string>(j, "method", "", "method"));
    m.options.lambda = get_or<double>(j, "lambda", m.options.lambda, "method");
    m.options.delta = get_or<double>(j, "delta", m.options.delta, "method");
    m.options.tol = get_or<double>(j, "tol", m.options.tol, "method");
    m.options.max_iter = get_or<int>(j, "max_iter", m.options.max_iter, "method");
    return m;
}

ExperimentConfig parse_impl(const json& j, const std::filesystem::path& base_dir) {
    if (!j.is_object()) fail("config must be a JSON object");
    reject_unknown(j, "config",
                   {"$schema", "name", "description", "dgp", "methods", "replications", "seed_base",
                    "eval", "output", "theory"});
    ExperimentConfig cfg;
    cfg.name = get_or<std::string>(j, "name", cfg.name, "config");
    cfg.replications = get_or<std::size_t>(j, "replications", cfg.replications, "config");
    cfg.seed_base = get_or<std::uint64_t>(j, "seed_base", cfg.seed_base, "config");

    if (!j.contains("dgp") || !j["dgp"].is_object()) fail("config: missing 'dgp' object");
    const auto& dgp = j["dgp"];
    const auto kind = get_or<std::string>(dgp, "kind", "synthetic", "dgp");
    if (kind == "synthetic") {
        cfg.dgp = parse_synthetic(dgp);
    } else if (kind == "ihdp") {
        cfg.dgp = parse_ihdp(dgp, base_dir);
    } else if (kind == "csv") {
        cfg.dgp = parse_csv_dgp(dgp, base_dir);
    } else {
        fail("dgp: kind must be 'synthetic', 'ihdp' or 'csv'");
    }

    if (!j.contains("methods") || !j["methods"].is_array()) fail("config: missing 'methods' array");
    for (const auto& m : j["methods"]) cfg.methods.push_back(parse_method(m));

    if (j.contains("eval")) {
        const auto& ev = j["eval"];
        std::string mode;
        if (ev.is_string()) {
            mode = ev.get<std::string>();
        } else if (ev.is_object()) {
            reject_unknown(ev, "eval", {"mode", "fraction"});
            mode = get_or<std::string>(ev, "mode", "in_sample", "eval");
            cfg.holdout_fraction = get_or<double>(ev, "fraction", cfg.holdout_fraction, "eval");
        } else {
            fail("eval must be a string or an object");
        }
        if (mode == "in_sample") {
            cfg.eval = EvalMode::in_sample;
        } else if (mode == "holdout") {
            cfg.eval = EvalMode::holdout;
        } else {
            fail("eval: mode must be 'in_sample' or 'holdout'");
        }
    }

    if (j.contains("output")) {
        const auto& out = j["output"];
        if (!out.is_object()) fail("output must be an object");
        reject_unknown(out, "output", {"dir", "prefix", "formats", "timing"});
        cfg.output.dir = get_or<std::string>(out, "dir", cfg.output.dir, "output");
        cfg.output.prefix = get_or<std::string>(out, "prefix", cfg.name, "output");
        cfg.output.timing = get_or<bool>(out, "timing", false, "output");
        if (out.contains("formats")) {
            cfg.output.csv = cfg.output.json = cfg.output.svg = false;
            for (const auto& f : out["formats"]) {
                const auto s = f.is_string() ? f.get<std::string>() : std::string();
                if (s == "csv") {
                    cfg.output.csv = true;
                } else if (s == "json") {
                    cfg.output.json = true;
                } else if (s == "svg" || s == "svg_boxplot") {
                    cfg.output.svg = true;
                } else {
                    fail("output: unknown format '" + s + "'");
                }
            }
        }
    } else {
        cfg.output.prefix = cfg.name;
    }

    if (j.contains("theory")) {
        const auto& th = j["theory"];
        if (!th.is_object()) fail("theory must be an object");
        reject_unknown(th, "theory", {"t", "compat_budget", "overlap_phi"});
        cfg.theory.t = get_or<double>(th, "t", cfg.theory.t, "theory");
        cfg.theory.compat_budget = get_or<std::size_t>(th, "compat_budget", cfg.theory.compat_budget, "theory");
        cfg.theory.overlap_phi = get_or<double>(th, "overlap_phi", cfg.theory.overlap_phi, "theory");
    }

    cfg.validate();
    return cfg;
}

}  // namespace

void ExperimentConfig::validate() const {
    if (replications < 1) fail("replications must be >= 1");
    if (methods.empty()) fail("at least one method is required");
    for (std::size_t i = 0; i < methods.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            if (methods[i].method == methods[j].method) {
                fail("method '" + std::string(to_string(methods[i].method)) + "' listed twice");
            }
        }
    }
    for (const auto& m : methods) {
        try {
            m.options.validate();
        } catch (const Error& e) {
            fail(std::string("method ") + std::string(to_string(m.method)) + ": " + e.what());
        }
    }
    try {
        if (const auto* s = std::get_if<simgen::SimConfig>(&dgp)) s->validate();
        if (const auto* h = std::get_if<simgen::IhdpConfig>(&dgp)) h->validate();
    } catch (const Error& e) {
        fail(e.what());
    }
    if (eval == EvalMode::holdout) {
        if (!(holdout_fraction > 0.0) || !std::isfinite(holdout_fraction)) {
            fail("eval: holdout fraction must be > 0");
        }
        if (std::holds_alternative<CsvDataset>(dgp)) {
            fail("eval: holdout needs a generative dgp (synthetic or ihdp surrogate)");
        }
        if (const auto* h = std::get_if<simgen::IhdpConfig>(&dgp);
            h && h->source != simgen::IhdpSource::synthetic_surrogate) {
            fail("eval: holdout needs a generative dgp (synthetic or ihdp surrogate)");
        }
    }
    if (!(theory.t > 0.0)) fail("theory: t must be > 0");
    if (!(theory.overlap_phi > 0.0 && theory.overlap_phi < 0.5)) fail("theory: overlap_phi must lie in (0, 0.5)");
}

ExperimentConfig parse_config(const nlohmann::json& j) { return parse_impl(j, "."); }

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open config file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        fail("config file '" + path + "' is not valid JSON: " + e.what());
    }
    auto base = std::filesystem::path(path).parent_path();
    if (base.empty()) base = ".";
    return parse_impl(j, base);
}

}  // namespace catelasso::bench
