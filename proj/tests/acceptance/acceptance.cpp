// Acceptance suite. Prints one PASS/FAIL line per criterion.
//
//   acceptance            run every criterion
//   acceptance 2 4        run only the listed criteria
//
// Exit status is 0 iff every selected criterion passed.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "catelasso/bench.hpp"
#include "catelasso/estimators.hpp"
#include "catelasso/lasso.hpp"
#include "catelasso/numlin.hpp"
#include "catelasso/rng.hpp"
#include "catelasso/simgen.hpp"
#include "catelasso/theory.hpp"

using namespace catelasso;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v, int precision = 4) {
    std::ostringstream s;
    s.precision(precision);
    s << v;
    return s.str();
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t k = v.size();
    return k % 2 == 1 ? v[k / 2] : 0.5 * (v[k / 2 - 1] + v[k / 2]);
}

Matrix random_matrix(std::uint64_t seed, Eigen::Index m, Eigen::Index p, const char* label) {
    auto rng = rng_stream(seed, label);
    Matrix a(m, p);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < p; ++j) a(i, j) = rng.normal();
    }
    return a;
}

bench::ExperimentConfig synthetic_panel(Eigen::Index p, std::size_t s0, std::vector<Method> methods) {
    bench::ExperimentConfig cfg;
    simgen::SimConfig s;
    s.n = 500;
    s.p = p;
    s.s0 = s0;
    cfg.dgp = s;
    for (auto m : methods) {
        FitOptions o;
        o.lambda = 1.0;
        cfg.methods.push_back({m, o});
    }
    cfg.replications = 100;
    cfg.seed_base = 1;
    return cfg;
}

std::string failures_note(const bench::RunResult& r) {
    std::size_t failed = 0, unconverged = 0;
    for (const auto& rec : r.records) {
        failed += rec.error.empty() ? 0 : 1;
        unconverged += rec.error.empty() && !rec.converged ? 1 : 0;
    }
    return ", fit errors " + std::to_string(failed) + ", unconverged " + std::to_string(unconverged);
}

Outcome exact_recovery() {
    const auto start = Clock::now();
    double worst = 0.0;
    int ok = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        simgen::SimConfig cfg;
        cfg.n = 200;
        cfg.p = 20;
        cfg.s0 = 5;
        cfg.noise_sd = 0.0;
        cfg.seed = seed;
        const auto data = simgen::gen_synthetic(cfg);
        FitOptions o;
        o.lambda = 1e-8;
        const auto model = fit_cate_lasso(split_by_arm(data), o);
        const double err = (model.beta_diff.values - data.truth()->beta_diff()).lpNorm<Eigen::Infinity>();
        worst = std::max(worst, err);
        ok += err < 1e-6 ? 1 : 0;
    }
    const double secs = seconds_since(start);
    return {ok == 10 && secs < 1.0, "max |error| " + fmt(worst) + ", " + std::to_string(ok) + "/10 seeds below 1e-6, " +
                                         fmt(secs, 3) + " s"};
}

Outcome figure2_ordering() {
    const auto start = Clock::now();
    const auto r = bench::run_experiment(synthetic_panel(1000, 10, {Method::cate_lasso, Method::t_ols, Method::t_lasso}));
    const double secs = seconds_since(start);
    const double c = r.aggregates.at(Method::cate_lasso).median;
    const double o = r.aggregates.at(Method::t_ols).median;
    const double l = r.aggregates.at(Method::t_lasso).median;
    return {c < l && c < o && secs < 300.0, "median rmse cate_lasso " + fmt(c) + ", t_ols " + fmt(o) + ", t_lasso " +
                                                fmt(l) + ", " + fmt(secs, 3) + " s" + failures_note(r)};
}

Outcome s0_degradation() {
    std::map<std::size_t, double> cate, gap;
    std::string note;
    for (std::size_t s0 : {10, 25, 50}) {
        const auto r = bench::run_experiment(synthetic_panel(1000, s0, {Method::cate_lasso, Method::t_ols}));
        const auto c = r.rmse_of(Method::cate_lasso);
        const auto o = r.rmse_of(Method::t_ols);
        std::vector<double> diffs(c.size());
        for (std::size_t i = 0; i < c.size(); ++i) diffs[i] = std::abs(c[i] - o[i]);
        cate[s0] = r.aggregates.at(Method::cate_lasso).median;
        gap[s0] = median(diffs);
        note += " s0=" + std::to_string(s0) + ": cate " + fmt(cate[s0]) + " gap " + fmt(gap[s0]) + ";";
    }
    const bool pass = cate[50] > cate[10] && gap[10] > gap[25] && gap[25] > gap[50];
    return {pass, "median rmse and median |cate - t_ols| per replication," + note};
}

Outcome ipw_comparison() {
    const auto r =
        bench::run_experiment(synthetic_panel(1000, 10, {Method::cate_lasso, Method::ipw_ols, Method::ipw_lasso}));
    const double c = r.aggregates.at(Method::cate_lasso).median;
    const double io = r.aggregates.at(Method::ipw_ols).median;
    const double il = r.aggregates.at(Method::ipw_lasso).median;
    return {c < io && c < il,
            "median rmse cate_lasso " + fmt(c) + ", ipw_ols " + fmt(io) + ", ipw_lasso " + fmt(il) + failures_note(r)};
}

Outcome oracle_inequality() {
    simgen::SimConfig cfg;
    cfg.n = 150;
    cfg.p = 40;
    cfg.s0 = 3;
    cfg.seed = 1;
    const auto check = theory::oracle_inequality_frequency(cfg, 2.0, 500, 1000);
    const double threshold = 1.0 - 2.0 * std::exp(-4.0) - 0.05;
    return {check.frequency >= threshold,
            "frequency " + fmt(check.frequency) + " vs " + fmt(threshold) + " (lambda " + fmt(check.lambda) +
                ", phi0^2 " + fmt(check.phi0_sq) + ", l1 bound " + fmt(check.bounds.l1_bound) + ", median l1 " +
                fmt(check.median_l1_error) + ", pred bound " + fmt(check.bounds.pred_bound) + ", median pred " +
                fmt(check.median_pred_error) + ")"};
}

Outcome concentration() {
    simgen::SimConfig cfg;
    cfg.n = 200;
    cfg.p = 50;
    cfg.s0 = 5;
    cfg.seed = 1;
    const double freq = theory::concentration_event_frequency(cfg, 2.0, 500, 2000);
    const double threshold = 1.0 - 2.0 * std::exp(-2.0) - 0.05;
    return {freq >= threshold, "frequency " + fmt(freq) + " vs " + fmt(threshold)};
}

Outcome consistency_trend() {
    // lambda = sqrt(log p / n), constant 1.
    std::vector<double> medians;
    std::string note;
    for (Eigen::Index n : {250, 500, 1000, 2000}) {
        std::vector<double> l1(50);
        for (std::uint64_t r = 0; r < 50; ++r) {
            simgen::SimConfig cfg;
            cfg.n = n;
            cfg.p = 300;
            cfg.s0 = 10;
            cfg.seed = 1 + r;
            const auto data = simgen::gen_synthetic(cfg);
            FitOptions o;
            o.lambda = std::sqrt(std::log(300.0) / static_cast<double>(n));
            const auto model = fit_cate_lasso(split_by_arm(data), o);
            l1[r] = (model.beta_diff.values - data.truth()->beta_diff()).lpNorm<1>();
        }
        medians.push_back(median(l1));
        note += " n=" + std::to_string(n) + ": " + fmt(medians.back()) + ";";
    }
    bool decreasing = true;
    for (std::size_t i = 1; i < medians.size(); ++i) decreasing = decreasing && medians[i] < medians[i - 1];
    return {decreasing, "median l1 error," + note};
}

Outcome ihdp_surface_a() {
    bool pass = true;
    std::string note;
    for (auto ext : {simgen::IhdpExtension::none, simgen::IhdpExtension::setting1, simgen::IhdpExtension::setting2}) {
        double total = 0.0, threshold = 0.0;
        for (std::uint64_t r = 0; r < 100; ++r) {
            simgen::IhdpConfig cfg;
            cfg.extension = ext;
            cfg.seed = 1 + r;
            const auto data = simgen::gen_ihdp_surface_a(cfg);
            FitOptions o;
            o.lambda = 1.0;
            const auto split = split_by_arm(data);
            const auto model = fit_cate_lasso(split, o);
            total += predict_cate(model, data.covariates()).mean();
            // Smallest lambda that zeroes the intercept of the step-two problem
            // when every other coordinate is zero: delta |1' r| / n.
            const Vector resid = split.y1 - split.x1 * model.beta0.values;
            threshold += o.delta * std::abs(resid.sum()) / static_cast<double>(split.n_total);
        }
        const double avg = total / 100.0;
        pass = pass && std::abs(avg - 4.0) <= 0.5;
        const char* name = ext == simgen::IhdpExtension::none ? "none" : ext == simgen::IhdpExtension::setting1 ? "setting1" : "setting2";
        note += std::string(" ") + name + ": " + fmt(avg) + " (intercept threshold " + fmt(threshold / 100.0) + ");";
    }
    return {pass, "average of mean f_hat (target 4 +- 0.5)," + note};
}

// Proximal gradient, step 1/L, 1e5 iterations.
Vector prox_gradient(const lasso::LassoProblem& pr) {
    const Eigen::MatrixXd x = pr.design;
    const double nu = static_cast<double>(pr.normalizer);
    const double smax = Eigen::JacobiSVD<Eigen::MatrixXd>(x).singularValues()(0);
    const double step = nu / (2.0 * pr.loss_weight * smax * smax);
    Vector b = Vector::Zero(x.cols());
    for (int k = 0; k < 100000; ++k) {
        const Vector z = b + step * 2.0 * pr.loss_weight * (x.transpose() * (pr.target - x * b)) / nu;
        for (Eigen::Index j = 0; j < b.size(); ++j) b(j) = lasso::soft_threshold(z(j), 2.0 * pr.lambda * step);
    }
    return b;
}

Outcome numerics_suite() {
    // Penrose conditions on 200 matrices, half of them rank-deficient products.
    double penrose = 0.0;
    for (std::uint64_t s = 0; s < 200; ++s) {
        const Eigen::Index m = 1 + static_cast<Eigen::Index>((s * 13) % 50);
        const Eigen::Index p = 1 + static_cast<Eigen::Index>((s * 29) % 50);
        Matrix a = random_matrix(s, m, p, "penrose.a");
        if (s % 2 == 1) {
            const Eigen::Index k = std::max<Eigen::Index>(1, std::min(m, p) - 1 - static_cast<Eigen::Index>(s % 3));
            a = random_matrix(s, m, k, "penrose.b") * random_matrix(s, k, p, "penrose.c");
        }
        const Eigen::MatrixXd A = a, G = numlin::pseudoinverse(a);
        const Eigen::MatrixXd ag = A * G, ga = G * A;
        const double v = std::max({(A * G * A - A).cwiseAbs().maxCoeff(), (G * A * G - G).cwiseAbs().maxCoeff(),
                                   (ag - ag.transpose()).cwiseAbs().maxCoeff(),
                                   (ga - ga.transpose()).cwiseAbs().maxCoeff()});
        penrose = std::max(penrose, v / std::max(1.0, A.cwiseAbs().maxCoeff()));
    }

    // Solver agreement, KKT on converged solves, and the lambda_max property.
    double agreement = 0.0, kkt = 0.0;
    int converged = 0, zero_ok = 0, zero_total = 0;
    for (std::uint64_t s = 0; s < 50; ++s) {
        const Eigen::Index m = 10 + static_cast<Eigen::Index>(s % 21);
        const Eigen::Index p = 2 + static_cast<Eigen::Index>(s % 5);
        lasso::LassoProblem pr{random_matrix(s, m, p, "cd.x"), random_matrix(s, m, 1, "cd.y").col(0), 0.0,
                               s % 2 == 0 ? 1.0 : 0.5, m};
        const double lmax = lasso::lambda_max(pr);
        pr.lambda = (0.05 + 0.1 * static_cast<double>(s % 5)) * lmax;
        const auto sol = lasso::solve(pr, {1e-12, 100000});
        if (sol.converged) {
            ++converged;
            kkt = std::max(kkt, sol.kkt_violation);
        }
        agreement = std::max(agreement, (sol.beta - prox_gradient(pr)).cwiseAbs().maxCoeff());
        for (double f : {1.0, 1.5, 10.0}) {
            pr.lambda = f * lmax;
            ++zero_total;
            zero_ok += lasso::solve(pr).beta.isZero(0.0) ? 1 : 0;
        }
    }
    // Converged solves at default tolerance on larger problems.
    for (std::uint64_t s = 0; s < 20; ++s) {
        lasso::LassoProblem pr{random_matrix(s, 60, 120, "kkt.x"), random_matrix(s, 60, 1, "kkt.y").col(0), 0.0, 0.5, 120};
        pr.lambda = 0.05 * lasso::lambda_max(pr);
        const auto sol = lasso::solve(pr);
        if (sol.converged) {
            ++converged;
            kkt = std::max(kkt, sol.kkt_violation);
        }
    }
    const bool pass = penrose <= 1e-8 && kkt <= 1e-6 && agreement <= 1e-5 && zero_ok == zero_total;
    return {pass, "penrose " + fmt(penrose) + ", max kkt " + fmt(kkt) + " over " + std::to_string(converged) +
                      " converged solves, cd vs prox " + fmt(agreement) + ", zero at lambda_max " +
                      std::to_string(zero_ok) + "/" + std::to_string(zero_total)};
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

Outcome reproducibility() {
    const fs::path dir = fs::temp_directory_path() / "catelasso_acceptance_repro";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const fs::path cfg = dir / "panel.json";
    std::ofstream(cfg) << R"({
  "name": "repro",
  "dgp": {"kind": "synthetic", "n": 500, "p": 300, "s0": 10},
  "methods": [{"method": "cate_lasso", "lambda": 1.0}, "t_ols", {"method": "t_lasso", "lambda": 1.0},
              "ipw_ols", {"method": "ipw_lasso", "lambda": 1.0}],
  "replications": 5
})";
    const std::string exe = CATE_BENCH_EXE;
    auto run = [&](const char* sub) {
        const std::string cmd = "\"" + exe + "\" run --config \"" + cfg.string() + "\" --seed 17 --out-dir \"" +
                                (dir / sub).string() + "\" > /dev/null";
        return std::system(cmd.c_str());
    };
    const int a = run("a");
    const int b = run("b");
    const bool csv_same = slurp(dir / "a" / "repro.csv") == slurp(dir / "b" / "repro.csv");
    const bool json_same = slurp(dir / "a" / "repro.json") == slurp(dir / "b" / "repro.json");
    const bool nonempty = !slurp(dir / "a" / "repro.csv").empty();
    fs::remove_all(dir);
    return {a == 0 && b == 0 && csv_same && json_same && nonempty,
            std::string("exit codes ") + std::to_string(a) + "/" + std::to_string(b) + ", csv " +
                (csv_same ? "identical" : "differs") + ", json " + (json_same ? "identical" : "differs")};
}

struct Criterion {
    int id;
    const char* title;
    std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> all{
        {1, "exact noiseless recovery", exact_recovery},
        {2, "figure-2 ordering at p=1000, s0=10", figure2_ordering},
        {3, "degradation in s0", s0_degradation},
        {4, "IPW comparison", ipw_comparison},
        {5, "oracle inequality Monte Carlo", oracle_inequality},
        {6, "concentration event", concentration},
        {7, "consistency trend in n", consistency_trend},
        {8, "IHDP surface A mean effect", ihdp_surface_a},
        {9, "numerics suite", numerics_suite},
        {10, "reproducibility of run outputs", reproducibility},
    };
    std::vector<int> selected;
    for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));

    bool all_pass = true;
    for (const auto& c : all) {
        if (!selected.empty() && std::find(selected.begin(), selected.end(), c.id) == selected.end()) continue;
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        all_pass = all_pass && o.pass;
        std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << c.id << " (" << c.title << "): " << o.detail
                  << std::endl;
    }
    return all_pass ? 0 : 1;
}
