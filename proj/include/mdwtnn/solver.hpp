#ifndef MDWTNN_SOLVER_HPP
#define MDWTNN_SOLVER_HPP

#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mdwtnn/cube.hpp"
#include "mdwtnn/prox.hpp"
#include "mdwtnn/weights.hpp"

namespace mdwtnn {

struct SolverConfig {
    std::optional<double> lambda;  // sparse-noise weight; default 2/sqrt(max(n1,n2)*n3)
    double tau_n = 10.0;           // Gaussian-noise weight
    std::array<double, 3> alpha{1.0 / 3, 1.0 / 3, 1.0 / 3};
    double mu0 = 1e-3;
    double beta0 = 1e-3;
    double rho = 1.2;
    double mu_max = 1e10;
    double tol = 1e-6;
    int max_iter = 100;
    WeightParams weights;
    bool refresh_freq_weights = true; // recompute w from the current estimate every iteration
    int trunc_refresh_every = 0;      // 0: truncation counts fixed from the observation
    int threads = 1;
    std::uint64_t seed = 0; // recorded in snapshots; the solver itself is deterministic
    bool timing = false;    // fill per-step seconds in the iteration log

    double resolve_lambda(const Dims& d) const {
        if (lambda) return *lambda;
        return 2.0 / std::sqrt(static_cast<double>(std::max(d.n1, d.n2) * d.n3));
    }
};

inline void validate(const SolverConfig& cfg) {
    validate_alpha(cfg.alpha);
    if (cfg.lambda && !(*cfg.lambda > 0)) throw UsageError("lambda must be positive");
    if (!(cfg.tau_n > 0)) throw UsageError("tau must be positive");
    if (!(cfg.mu0 > 0) || !(cfg.beta0 > 0)) throw UsageError("penalties must start positive");
    if (!(cfg.rho > 1)) throw UsageError("rho must exceed 1");
    if (!(cfg.mu_max > 0)) throw UsageError("mu_max must be positive");
    if (!(cfg.tol > 0)) throw UsageError("tol must be positive");
    if (cfg.max_iter < 1) throw UsageError("max_iter must be at least 1");
    if (cfg.threads < 1) throw UsageError("threads must be at least 1");
}

struct IterationRecord {
    int iter = 0;
    double constraint_rel = 0.0; // ||y - x - s - n||_F / max(||y||_F, 1e-12)
    double z_gap_rel = 0.0;      // max_p ||x_p - z_p||_F / max(||x||_F, 1e-12)
    std::array<double, 5> step_seconds{}; // z, x, s, n, multipliers
};

struct SolverState {
    Cube x, s, n;
    std::array<Cube, 3> z;
    std::array<Cube, 3> gamma;
    Cube lam;
    std::array<double, 3> mu{};
    double beta = 0.0;
    int iter = 0;
    std::vector<IterationRecord> history;
};

struct DenoiseResult {
    Cube x_hat, s_hat, n_hat;
    int iterations = 0;
    bool converged = false;
    double final_constraint_rel = 0.0;
    double final_z_gap_rel = 0.0;
    double wall_seconds = 0.0;
    double lambda_effective = 0.0;
    SolverConfig config;
    WeightPlan plan_at_exit;
    std::vector<IterationRecord> history;
    std::vector<std::string> warnings;
};

inline SolverState init_state(const Cube& y, const SolverConfig& cfg) {
    SolverState st;
    st.x = y;
    st.s = Cube(y.dims);
    st.n = Cube(y.dims);
    st.lam = Cube(y.dims);
    for (int p = 1; p <= 3; ++p) {
        st.z[p - 1] = permute_mode(y, mode_from_int(p));
        st.gamma[p - 1] = Cube(st.z[p - 1].dims);
        st.mu[p - 1] = cfg.mu0;
    }
    st.beta = cfg.beta0;
    return st;
}

// Z_p = prox of the double-weighted norm at X_p + Gamma_p / mu_p with
// strength alpha_p / mu_p. Frequency weights are refreshed from the current
// X_p spectrum first when the refresh policy is on.
inline void update_z(SolverState& st, const SolverConfig& cfg, WeightPlan& plan) {
    for (int p = 1; p <= 3; ++p) {
        const int idx = p - 1;
        Cube xp = permute_mode(st.x, mode_from_int(p));
        if (cfg.refresh_freq_weights && !cfg.weights.uniform_freq)
            plan.freq_weights[idx] =
                frequency_weights(fft_mode3(xp), cfg.weights.c1, cfg.weights.c2);
        axpy(1.0 / st.mu[idx], st.gamma[idx], xp);
        ShrinkSpec spec{cfg.alpha[idx] / st.mu[idx], plan.freq_weights[idx],
                        plan.trunc_counts[idx]};
        st.z[idx] = dw_svt(xp, spec, cfg.threads);
    }
}

// X = [sum_p ipermute(mu_p Z_p - Gamma_p) + beta(Y - S - N) + Lambda]
//     / (sum_p mu_p + beta)
// The form mu_p Z_p - Gamma_p (rather than mu_p (Z_p - Gamma_p/mu_p)) keeps
// the update defined for degenerate mu_p = 0.
inline void update_x(SolverState& st, const SolverConfig& cfg, const Cube& y) {
    Cube num = st.lam;
    for (std::size_t t = 0; t < num.size(); ++t)
        num.values[t] += st.beta * (y.values[t] - st.s.values[t] - st.n.values[t]);
    double denom = st.beta;
    for (int p = 1; p <= 3; ++p) {
        const int idx = p - 1;
        Cube term = st.z[idx];
        for (std::size_t t = 0; t < term.size(); ++t)
            term.values[t] = st.mu[idx] * term.values[t] - st.gamma[idx].values[t];
        num += ipermute_mode(term, mode_from_int(p));
        denom += st.mu[idx];
    }
    const double inv = 1.0 / denom;
    for (auto& v : num.values) v *= inv;
    st.x = std::move(num);
}

// S = shrink(Y - X - N + Lambda/beta, lambda/beta), with N the previous
// iterate (Gauss-Seidel order: S before N).
inline void update_s(SolverState& st, const SolverConfig& cfg, const Cube& y, double lambda_eff) {
    const double thresh = lambda_eff / st.beta;
    for (std::size_t t = 0; t < st.s.size(); ++t) {
        const double arg = y.values[t] - st.x.values[t] - st.n.values[t] +
                           st.lam.values[t] / st.beta;
        st.s.values[t] = soft_threshold(arg, thresh);
    }
}

// N = (beta(Y - X - S) + Lambda) / (2 tau + beta), with the fresh S.
inline void update_n(SolverState& st, const SolverConfig& cfg, const Cube& y) {
    const double inv = 1.0 / (2.0 * cfg.tau_n + st.beta);
    for (std::size_t t = 0; t < st.n.size(); ++t) {
        const double r = st.beta * (y.values[t] - st.x.values[t] - st.s.values[t]) +
                         st.lam.values[t];
        st.n.values[t] = r * inv;
    }
}

// Dual ascent on both constraint sets: Gamma_p tracks X_p - Z_p, Lambda
// tracks Y - X - S - N.
inline void update_multipliers(SolverState& st, const SolverConfig& cfg, const Cube& y) {
    for (int p = 1; p <= 3; ++p) {
        const int idx = p - 1;
        const Cube xp = permute_mode(st.x, mode_from_int(p));
        for (std::size_t t = 0; t < xp.size(); ++t)
            st.gamma[idx].values[t] += st.mu[idx] * (xp.values[t] - st.z[idx].values[t]);
    }
    for (std::size_t t = 0; t < st.lam.size(); ++t)
        st.lam.values[t] += st.beta * (y.values[t] - st.x.values[t] - st.s.values[t] -
                                       st.n.values[t]);
}

inline void grow_penalties(SolverState& st, const SolverConfig& cfg) {
    for (auto& m : st.mu) m = std::min(cfg.rho * m, cfg.mu_max);
    st.beta = std::min(cfg.rho * st.beta, cfg.mu_max);
}

namespace detail {

inline double constraint_residual_rel(const SolverState& st, const Cube& y, double y_norm) {
    double acc = 0;
    for (std::size_t t = 0; t < y.size(); ++t) {
        const double r = y.values[t] - st.x.values[t] - st.s.values[t] - st.n.values[t];
        acc += r * r;
    }
    return std::sqrt(acc) / std::max(y_norm, 1e-12);
}

inline double z_gap_rel(const SolverState& st) {
    const double xn = std::max(frobenius_norm(st.x), 1e-12);
    double worst = 0;
    for (int p = 1; p <= 3; ++p) {
        const Cube xp = permute_mode(st.x, mode_from_int(p));
        double acc = 0;
        for (std::size_t t = 0; t < xp.size(); ++t) {
            const double r = xp.values[t] - st.z[p - 1].values[t];
            acc += r * r;
        }
        worst = std::max(worst, std::sqrt(acc) / xn);
    }
    return worst;
}

inline void check_finite(const SolverState& st, int iter) {
    auto probe = [&](const Cube& c) {
        if (!all_finite(c))
            throw DivergenceError(
                "solver diverged: non-finite values at iteration " + std::to_string(iter), iter);
    };
    probe(st.x);
    probe(st.s);
    probe(st.n);
    probe(st.lam);
    for (const auto& c : st.z) probe(c);
    for (const auto& c : st.gamma) probe(c);
}

} // namespace detail

inline DenoiseResult denoise(const Cube& y, const SolverConfig& cfg) {
    validate(cfg);
    if (!all_finite(y)) throw UsageError("denoise: input contains non-finite values");

    const auto t_start = std::chrono::steady_clock::now();
    DenoiseResult result;
    result.config = cfg;
    result.lambda_effective = cfg.resolve_lambda(y.dims);

    double lo = y.values.empty() ? 0 : y.values[0], hi = lo;
    for (double v : y.values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (lo < 0.0 || hi > 1.0)
        result.warnings.push_back("input values outside [0,1]; metrics and defaults assume "
                                  "normalized data");
    for (double a : cfg.alpha)
        if (a == 0.0) {
            result.warnings.push_back("alpha has a zero entry; the corresponding mode is "
                                      "carried without shrinkage");
            break;
        }

    WeightParams wp = cfg.weights;
    wp.threads = cfg.threads;
    WeightPlan plan = build_weight_plan(y, wp);

    SolverState st = init_state(y, cfg);
    const double y_norm = frobenius_norm(y);

    using clock = std::chrono::steady_clock;
    auto seconds = [](clock::time_point a, clock::time_point b) {
        return std::chrono::duration<double>(b - a).count();
    };

    bool converged = false;
    for (int iter = 1; iter <= cfg.max_iter; ++iter) {
        IterationRecord rec;
        rec.iter = iter;

        const auto t0 = clock::now();
        update_z(st, cfg, plan);
        const auto t1 = clock::now();
        update_x(st, cfg, y);
        const auto t2 = clock::now();
        update_s(st, cfg, y, result.lambda_effective);
        const auto t3 = clock::now();
        update_n(st, cfg, y);
        const auto t4 = clock::now();
        update_multipliers(st, cfg, y);
        const auto t5 = clock::now();

        grow_penalties(st, cfg);
        if (cfg.trunc_refresh_every > 0 && iter % cfg.trunc_refresh_every == 0) {
            for (int p = 1; p <= 3; ++p)
                plan.trunc_counts[p - 1] =
                    truncation_weights(permute_mode(st.x, mode_from_int(p)), cfg.weights.eta,
                                       cfg.weights.trunc_rule, cfg.threads);
        }

        detail::check_finite(st, iter);

        rec.constraint_rel = detail::constraint_residual_rel(st, y, y_norm);
        rec.z_gap_rel = detail::z_gap_rel(st);
        if (cfg.timing)
            rec.step_seconds = {seconds(t0, t1), seconds(t1, t2), seconds(t2, t3),
                                seconds(t3, t4), seconds(t4, t5)};
        st.history.push_back(rec);
        st.iter = iter;

        if (std::max(rec.constraint_rel, rec.z_gap_rel) < cfg.tol) {
            converged = true;
            break;
        }
    }

    result.x_hat = std::move(st.x);
    result.s_hat = std::move(st.s);
    result.n_hat = std::move(st.n);
    result.iterations = st.iter;
    result.converged = converged;
    if (!st.history.empty()) {
        result.final_constraint_rel = st.history.back().constraint_rel;
        result.final_z_gap_rel = st.history.back().z_gap_rel;
    }
    result.history = std::move(st.history);
    result.plan_at_exit = std::move(plan);
    result.wall_seconds = seconds(t_start, clock::now());
    return result;
}

} // namespace mdwtnn

#endif
