#include "catelasso/theory.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <string>

#include "catelasso/estimators.hpp"
#include "catelasso/numlin.hpp"
#include "catelasso/rng.hpp"

namespace catelasso::theory {
namespace {

// Euclidean projection onto {w >= 0, sum w = radius}.
void project_simplex(Eigen::Ref<Vector> v, double radius) {
    const Eigen::Index k = v.size();
    std::vector<double> sorted(v.data(), v.data() + k);
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    double cumulative = 0.0;
    double tau = 0.0;
    for (Eigen::Index i = 0; i < k; ++i) {
        cumulative += sorted[static_cast<std::size_t>(i)];
        const double candidate = (cumulative - radius) / static_cast<double>(i + 1);
        if (sorted[static_cast<std::size_t>(i)] - candidate > 0.0) tau = candidate;
    }
    v = (v.array() - tau).cwiseMax(0.0);
}

// Euclidean projection onto the l1 ball of the given radius.
void project_l1_ball(Eigen::Ref<Vector> v, double radius) {
    if (v.lpNorm<1>() <= radius) return;
    const Vector signs = v.array().sign();
    Vector mags = v.cwiseAbs();
    project_simplex(mags, radius);
    v = signs.cwiseProduct(mags);
}

struct Candidate {
    double value = std::numeric_limits<double>::infinity();
    Vector beta;
};

// Canonical sign pattern on S: bit k set iff the k-th support coordinate is
// negative, after flipping so the first coordinate is nonnegative.
std::uint64_t sign_key(const Vector& beta_s) {
    const bool flip = beta_s(0) < 0.0;
    std::uint64_t key = 0;
    for (Eigen::Index k = 0; k < beta_s.size(); ++k) {
        const bool neg = flip ? beta_s(k) > 0.0 : beta_s(k) < 0.0;
        if (neg) key |= (std::uint64_t{1} << k);
    }
    return key;
}

Vector pattern_signs(std::uint64_t key, Eigen::Index s) {
    Vector sigma(s);
    for (Eigen::Index k = 0; k < s; ++k) sigma(k) = (key >> k) & 1U ? -1.0 : 1.0;
    return sigma;
}

}  // namespace

double sigma_dagger(const Matrix& x0, const Matrix& x1, double sigma1, double sigma0) {
    if (!(sigma1 >= 0.0) || !(sigma0 >= 0.0)) {
        throw Error(ErrorKind::InvalidInput, "sigma_dagger: noise scales must be >= 0");
    }
    const double tr = numlin::trace_pseudo_product(x0, x1).trace;
    return std::sqrt(sigma1 * sigma1 + sigma0 * sigma0 * tr);
}

double lambda_theory(double m_bound, double sigma_dagger, double t, Eigen::Index n,
                     Eigen::Index p) {
    if (n < 1 || p < 1) throw Error(ErrorKind::InvalidInput, "lambda_theory: need n, p >= 1");
    if (!(t > 0.0)) throw Error(ErrorKind::InvalidInput, "lambda_theory: t must be > 0");
    const double logp = std::log(static_cast<double>(p));
    return 3.0 * m_bound * sigma_dagger * std::sqrt(2.0 * (t * t + logp) / static_cast<double>(n));
}

double lambda0(double m_bound, double sigma_dagger, double t, Eigen::Index n, Eigen::Index p) {
    if (n < 1 || p < 1) throw Error(ErrorKind::InvalidInput, "lambda0: need n, p >= 1");
    const double logp = std::log(static_cast<double>(p));
    return 2.0 * m_bound * sigma_dagger * std::sqrt((t * t + 2.0 * logp) / static_cast<double>(n));
}

double m_bound(const Matrix& gram1) {
    if (gram1.rows() != gram1.cols()) {
        throw Error(ErrorKind::DimensionMismatch, "m_bound: Gram matrix must be square");
    }
    double best = 0.0;
    for (Eigen::Index j = 0; j < gram1.rows(); ++j) {
        const double d = gram1(j, j);
        if (d < -1e-12) {
            throw Error(ErrorKind::NegativeDiagonal,
                        "Gram diagonal entry " + std::to_string(j) + " is negative");
        }
        best = std::max(best, d);
    }
    return std::sqrt(best);
}

double compatibility_lower_bound(const Matrix& gram1, const std::vector<Eigen::Index>& s0_set,
                                 const CompatibilityOptions& opts) {
    const Eigen::Index p = gram1.rows();
    if (gram1.cols() != p) throw Error(ErrorKind::DimensionMismatch, "compatibility: Gram not square");
    if (p > 64) throw Error(ErrorKind::InvalidInput, "compatibility search supports p <= 64");
    if (s0_set.empty()) throw Error(ErrorKind::InvalidInput, "compatibility: S0 must be nonempty");

    std::vector<bool> in_s(static_cast<std::size_t>(p), false);
    for (auto j : s0_set) {
        if (j < 0 || j >= p || in_s[static_cast<std::size_t>(j)]) {
            throw Error(ErrorKind::InvalidInput, "compatibility: S0 indices must be unique and < p");
        }
        in_s[static_cast<std::size_t>(j)] = true;
    }
    std::vector<Eigen::Index> s_idx(s0_set.begin(), s0_set.end());
    std::vector<Eigen::Index> c_idx;
    for (Eigen::Index j = 0; j < p; ++j) {
        if (!in_s[static_cast<std::size_t>(j)]) c_idx.push_back(j);
    }
    const auto s = static_cast<Eigen::Index>(s_idx.size());
    const auto c = static_cast<Eigen::Index>(c_idx.size());

    // Work in permuted coordinates (S first, then S^c).
    std::vector<Eigen::Index> perm = s_idx;
    perm.insert(perm.end(), c_idx.begin(), c_idx.end());
    Eigen::MatrixXd sigma(p, p);
    for (Eigen::Index a = 0; a < p; ++a) {
        for (Eigen::Index b = 0; b < p; ++b) {
            sigma(a, b) = gram1(perm[static_cast<std::size_t>(a)], perm[static_cast<std::size_t>(b)]);
        }
    }
    auto quad = [&](const Vector& beta) { return beta.dot(sigma * beta); };

    // Random cone draws with ||b_S||_1 = 1.
    RngStream rng = rng_stream(opts.seed, "compatibility.sampling");
    std::map<std::uint64_t, Candidate> best_by_pattern;
    Vector beta(p);
    for (std::size_t draw = 0; draw < opts.budget; ++draw) {
        for (Eigen::Index k = 0; k < s; ++k) {
            const double mag = -std::log(1.0 - rng.uniform01());
            beta(k) = rng.bernoulli(0.5) ? mag : -mag;
        }
        const double ls = beta.head(s).lpNorm<1>();
        if (ls == 0.0) continue;
        beta.head(s) /= ls;

        if (c > 0) {
            const double keep = rng.uniform01();
            for (Eigen::Index k = 0; k < c; ++k) {
                const double mag = -std::log(1.0 - rng.uniform01());
                beta(s + k) = rng.uniform01() < keep ? (rng.bernoulli(0.5) ? mag : -mag) : 0.0;
            }
            const double lc = beta.tail(c).lpNorm<1>();
            const double radius = rng.uniform01() < 0.1 ? 0.0 : 3.0 * rng.uniform01();
            if (lc > 0.0) {
                beta.tail(c) *= radius / lc;
            }
        }

        // The ratio is even in beta; store the representative with b_S(0) >= 0.
        if (beta(0) < 0.0) beta = -beta;
        const double value = quad(beta);
        auto& slot = best_by_pattern[sign_key(beta.head(s))];
        if (value < slot.value) {
            slot.value = value;
            slot.beta = beta;
        }
    }

    // Patterns to refine: all of them when few, else the best sampled ones.
    std::vector<std::pair<std::uint64_t, Candidate>> patterns;
    const bool exhaustive = s - 1 < 63 && (std::uint64_t{1} << (s - 1)) <= opts.max_patterns;
    if (exhaustive) {
        for (std::uint64_t key = 0; key < (std::uint64_t{1} << (s - 1)); ++key) {
            auto key_full = key << 1;  // first coordinate stays positive
            auto it = best_by_pattern.find(key_full);
            Candidate cand = it != best_by_pattern.end() ? it->second : Candidate{};
            patterns.emplace_back(key_full, std::move(cand));
        }
    } else {
        patterns.assign(best_by_pattern.begin(), best_by_pattern.end());
        std::sort(patterns.begin(), patterns.end(),
                  [](const auto& a, const auto& b) { return a.second.value < b.second.value; });
        if (patterns.size() > opts.max_patterns) patterns.resize(opts.max_patterns);
    }

    double best = std::numeric_limits<double>::infinity();
    for (const auto& [_, cand] : best_by_pattern) best = std::min(best, cand.value);

    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sigma, Eigen::EigenvaluesOnly);
    const double lipschitz = 2.0 * std::max(eig.eigenvalues().maxCoeff(), 0.0);
    if (lipschitz == 0.0) return 0.0;
    const double step = 1.0 / lipschitz;

    for (auto& [key, cand] : patterns) {
        const Vector signs = pattern_signs(key, s);
        auto project = [&](Vector& b) {
            Vector a = signs.cwiseProduct(b.head(s));
            project_simplex(a, 1.0);
            b.head(s) = signs.cwiseProduct(a);
            if (c > 0) project_l1_ball(b.tail(c), 3.0);
        };

        Vector x(p);
        if (cand.beta.size() == p) {
            x = cand.beta;
        } else {
            x.setZero();
            x.head(s) = signs / static_cast<double>(s);
        }
        project(x);

        // Accelerated projected gradient; the subproblem is convex.
        Vector y = x;
        Vector x_prev = x;
        double momentum = 1.0;
        double local_best = quad(x);
        for (int it = 0; it < opts.refine_iters; ++it) {
            Vector next = y - step * (2.0 * (sigma * y));
            project(next);
            const double m_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
            const double move = (next - x_prev).cwiseAbs().maxCoeff();
            y = next + ((momentum - 1.0) / m_next) * (next - x_prev);
            momentum = m_next;
            x_prev = next;
            const double v = quad(next);
            if (v > local_best) {
                // Restart momentum when the objective goes up.
                y = next;
                momentum = 1.0;
            }
            local_best = std::min(local_best, v);
            if (move < 1e-13) break;
        }
        best = std::min(best, local_best);
    }

    return static_cast<double>(s) * best;
}

Vector epsilon_dagger(const Matrix& x0, const Matrix& x1, const Vector& eps1, const Vector& eps0) {
    if (x0.rows() != eps0.size() || x1.rows() != eps1.size() || x0.cols() != x1.cols()) {
        throw Error(ErrorKind::DimensionMismatch, "epsilon_dagger: dimension mismatch");
    }
    // (X0^T X0)^+ X0^T = X0^+.
    return eps1 - x1 * numlin::min_norm_lsq(x0, eps0);
}

OracleBounds oracle_bounds(double lambda, std::size_t s0, double phi0_sq) {
    if (!(phi0_sq > 0.0)) throw Error(ErrorKind::InvalidInput, "oracle_bounds: phi0^2 must be > 0");
    const double s = static_cast<double>(s0);
    return {4.0 * lambda * s / phi0_sq, 4.0 * lambda * lambda * s / phi0_sq};
}

double concentration_event_frequency(const simgen::SimConfig& dgp, double t, std::size_t reps,
                                     std::uint64_t seed) {
    if (reps < 1) throw Error(ErrorKind::InvalidInput, "concentration: reps must be >= 1");
    const ObservationSet data = simgen::gen_synthetic(dgp);
    const ArmSplit split = split_by_arm(data);
    const Eigen::Index n = split.n_total;

    const double m = m_bound(numlin::gram(split.x1, n));
    const double sd = sigma_dagger(split.x0, split.x1, dgp.noise_sd, dgp.noise_sd);
    const double threshold = lambda0(m, sd, t, n, data.p());
    const Matrix x0_pinv = numlin::pseudoinverse(split.x0);

    std::size_t hits = 0;
    for (std::size_t r = 0; r < reps; ++r) {
        RngStream rng = rng_stream(seed + r, "concentration.noise");
        Vector eps1(split.x1.rows());
        Vector eps0(split.x0.rows());
        for (auto& e : eps1) e = dgp.noise_sd * rng.normal();
        for (auto& e : eps0) e = dgp.noise_sd * rng.normal();
        const Vector dagger = eps1 - split.x1 * (x0_pinv * eps0);
        const double stat =
            2.0 * (split.x1.transpose() * dagger).cwiseAbs().maxCoeff() / static_cast<double>(n);
        if (stat <= threshold) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(reps);
}

OracleCheck oracle_inequality_frequency(const simgen::SimConfig& dgp, double t, std::size_t reps,
                                        std::uint64_t seed, double delta,
                                        const CompatibilityOptions& compat) {
    if (reps < 1) throw Error(ErrorKind::InvalidInput, "oracle check: reps must be >= 1");
    const ObservationSet base = simgen::gen_synthetic(dgp);
    const ArmSplit split = split_by_arm(base);
    const Eigen::Index n = split.n_total;
    const Vector beta_true = base.truth()->beta_diff();

    std::vector<Eigen::Index> support;
    for (Eigen::Index j = 0; j < beta_true.size(); ++j) {
        if (beta_true(j) != 0.0) support.push_back(j);
    }
    if (support.empty()) throw Error(ErrorKind::InvalidInput, "oracle check: beta0 is zero");

    const Matrix gram1 = numlin::gram(split.x1, n);
    OracleCheck out;
    const double m = m_bound(gram1);
    const double sd = sigma_dagger(split.x0, split.x1, dgp.noise_sd, dgp.noise_sd);
    out.lambda = lambda_theory(m, sd, t, n, base.p());
    out.phi0_sq = compatibility_lower_bound(gram1, support, compat);
    out.bounds = oracle_bounds(out.lambda, support.size(), out.phi0_sq);

    FitOptions opts;
    opts.lambda = out.lambda;
    opts.delta = delta;

    std::vector<double> l1_err;
    std::vector<double> pred_err;
    std::size_t hits = 0;
    for (std::size_t r = 0; r < reps; ++r) {
        const ObservationSet data = simgen::redraw_outcomes(base, dgp.noise_sd, seed + r);
        const ArmSplit s = split_by_arm(data);
        const CateModel model = fit_cate_lasso(s, opts);
        const Vector err = model.beta_diff.values - beta_true;
        const double l1 = err.lpNorm<1>();
        const double pred = (s.x1 * err).squaredNorm() / static_cast<double>(n);
        l1_err.push_back(l1);
        pred_err.push_back(pred);
        if (l1 <= out.bounds.l1_bound && pred <= out.bounds.pred_bound) ++hits;
    }
    auto median = [](std::vector<double> v) {
        std::sort(v.begin(), v.end());
        const std::size_t k = v.size();
        return k % 2 == 1 ? v[k / 2] : 0.5 * (v[k / 2 - 1] + v[k / 2]);
    };
    out.frequency = static_cast<double>(hits) / static_cast<double>(reps);
    out.median_l1_error = median(l1_err);
    out.median_pred_error = median(pred_err);
    return out;
}

TheoryReport theory_report(const ObservationSet& data, double sigma1, double sigma0, double t,
                           const CompatibilityOptions& compat) {
    const ArmSplit split = split_by_arm(data);
    const Eigen::Index n = split.n_total;
    const Matrix gram1 = numlin::gram(split.x1, n);

    TheoryReport rep;
    const auto tp = numlin::trace_pseudo_product(split.x0, split.x1);
    rep.trace_value = tp.trace;
    rep.trace_max_entry = tp.max_abs_entry;
    rep.sigma_dagger = std::sqrt(sigma1 * sigma1 + sigma0 * sigma0 * tp.trace);
    rep.m_bound = m_bound(gram1);
    rep.lambda_theory = lambda_theory(rep.m_bound, rep.sigma_dagger, t, n, data.p());

    if (!data.truth()) return rep;
    const Vector beta_true = data.truth()->beta_diff();
    std::vector<Eigen::Index> support;
    for (Eigen::Index j = 0; j < beta_true.size(); ++j) {
        if (beta_true(j) != 0.0) support.push_back(j);
    }
    rep.s0 = support.size();
    if (support.empty() || data.p() > 64) return rep;

    rep.phi0_sq_lower = compatibility_lower_bound(gram1, support, compat);
    if (*rep.phi0_sq_lower > 0.0) {
        const auto b = oracle_bounds(rep.lambda_theory, rep.s0, *rep.phi0_sq_lower);
        rep.l1_bound = b.l1_bound;
        rep.pred_bound = b.pred_bound;
    }
    return rep;
}

nlohmann::json to_json(const TheoryReport& r) {
    auto opt = [](const std::optional<double>& v) -> nlohmann::json {
        return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
    };
    return {
        {"sigma_dagger", r.sigma_dagger},
        {"m_bound", r.m_bound},
        {"lambda_theory", r.lambda_theory},
        {"phi0_sq_lower", opt(r.phi0_sq_lower)},
        {"s0", r.s0},
        {"l1_bound", opt(r.l1_bound)},
        {"pred_bound", opt(r.pred_bound)},
        {"trace_value", r.trace_value},
        {"trace_max_entry", r.trace_max_entry},
    };
}

}  // namespace catelasso::theory
