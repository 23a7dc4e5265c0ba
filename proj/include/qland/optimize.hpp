#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qland/dynamics.hpp"
#include "qland/rng.hpp"
#include "qland/system.hpp"

namespace qland {

enum class Method { GRAPE, DE, DA };

inline const char* to_string(Method m) {
    switch (m) {
        case Method::GRAPE: return "grape";
        case Method::DE: return "de";
        case Method::DA: return "da";
    }
    return "?";
}

inline Method method_from_string(const std::string& s) {
    if (s == "grape") return Method::GRAPE;
    if (s == "de") return Method::DE;
    if (s == "da") return Method::DA;
    throw std::invalid_argument("unknown method: " + s);
}

/// One optimization target: gate angle, final time, number of control segments.
struct OptimizationNode {
    double phi_w;
    double T;
    std::size_t kseg;

    double dt() const { return T / static_cast<double>(kseg); }
};

struct OptimizerConfig {
    Method method = Method::GRAPE;
    double bound = 50.0;          // DE/DA amplitude box [-bound, bound]
    double init_amplitude = 1.0;  // GRAPE initial-control range
    long max_evals = 50000;
    std::uint64_t seed = 0;
    double tolerance = 1e-12;     // stop when improvement drops below this
    int grape_max_iters = 1000;
};

struct RunResult {
    PiecewiseControl best_control;
    double best_j = 0.0;
    long evals = 0;
    bool converged = false;
    std::uint64_t seed = 0;
    Method method = Method::GRAPE;
    std::vector<std::pair<long, double>> trace; // (eval count, best so far)
};

using ObjectiveFn = std::function<double(const std::vector<double>&)>;
using GradientFn = std::function<std::vector<double>(const std::vector<double>&)>;

inline ObjectiveFn node_objective(const OptimizationNode& node, const SystemConfig& cfg = {}) {
    const Matrix2 w = make_phase_gate(node.phi_w);
    const double dt = node.dt();
    return [w, dt, cfg](const std::vector<double>& a) {
        return objective(w, propagate(PiecewiseControl(a, dt), cfg).total);
    };
}

inline GradientFn node_gradient(const OptimizationNode& node, const SystemConfig& cfg = {}) {
    const Matrix2 w = make_phase_gate(node.phi_w);
    const double dt = node.dt();
    return [w, dt, cfg](const std::vector<double>& a) {
        return analytic_gradient(PiecewiseControl(a, dt), w, cfg);
    };
}

namespace detail {

inline double inf_norm(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

inline void record_best(RunResult& res, long evals, double j, const std::vector<double>& a,
                        double dt) {
    if (res.trace.empty() || j > res.best_j) {
        res.best_j = j;
        res.best_control = PiecewiseControl(a, dt);
        res.trace.emplace_back(evals, j);
    }
}

/// Limited-memory BFGS ascent with Armijo backtracking. Maximizes fn; gradients
/// from grad_fn. Pure ascent core shared by GRAPE and the DA polish step.
inline void lbfgs_ascent(std::vector<double>& x, const ObjectiveFn& fn, const GradientFn& grad_fn,
                         RunResult& res, const OptimizerConfig& cfg, double dt, int max_iters,
                         const double* box = nullptr) {
    const std::size_t n = x.size();
    const auto clip = [&](std::vector<double>& v) {
        if (box)
            for (double& c : v) c = std::clamp(c, -*box, *box);
    };
    clip(x);
    double j = fn(x);
    ++res.evals;
    record_best(res, res.evals, j, x, dt);
    std::vector<double> g = grad_fn(x);

    std::deque<std::vector<double>> s_hist, y_hist;
    std::deque<double> rho_hist;
    const std::size_t mem = 8;

    for (int it = 0; it < max_iters; ++it) {
        if (inf_norm(g) <= 1e-10) {
            res.converged = true;
            return;
        }
        // two-loop recursion on the ascent direction
        std::vector<double> d = g;
        std::vector<double> alpha(s_hist.size());
        for (std::size_t k = s_hist.size(); k-- > 0;) {
            double sd = 0.0;
            for (std::size_t i = 0; i < n; ++i) sd += s_hist[k][i] * d[i];
            alpha[k] = rho_hist[k] * sd;
            for (std::size_t i = 0; i < n; ++i) d[i] -= alpha[k] * y_hist[k][i];
        }
        if (!s_hist.empty()) {
            double sy = 0.0, yy = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                sy += s_hist.back()[i] * y_hist.back()[i];
                yy += y_hist.back()[i] * y_hist.back()[i];
            }
            if (yy > 0.0) {
                const double gamma = sy / yy;
                for (double& c : d) c *= gamma;
            }
        }
        for (std::size_t k = 0; k < s_hist.size(); ++k) {
            double yd = 0.0;
            for (std::size_t i = 0; i < n; ++i) yd += y_hist[k][i] * d[i];
            const double beta = rho_hist[k] * yd;
            for (std::size_t i = 0; i < n; ++i) d[i] += (alpha[k] - beta) * s_hist[k][i];
        }
        double gd = 0.0;
        for (std::size_t i = 0; i < n; ++i) gd += g[i] * d[i];
        if (gd <= 0.0) { // not an ascent direction; fall back to the gradient
            d = g;
            gd = 0.0;
            for (double c : g) gd += c * c;
        }

        // Armijo backtracking on the ascent
        double step = 1.0;
        std::vector<double> x_new(n);
        double j_new = j;
        bool moved = false;
        for (int ls = 0; ls < 40; ++ls) {
            for (std::size_t i = 0; i < n; ++i) x_new[i] = x[i] + step * d[i];
            clip(x_new);
            j_new = fn(x_new);
            ++res.evals;
            if (j_new >= j + 1e-4 * step * gd && j_new > j) {
                moved = true;
                break;
            }
            step *= 0.5;
            if (res.evals >= cfg.max_evals) break;
        }
        if (!moved) {
            res.converged = true; // no uphill step available
            return;
        }
        std::vector<double> g_new = grad_fn(x_new);
        std::vector<double> s_vec(n), y_vec(n);
        double sy = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            s_vec[i] = x_new[i] - x[i];
            y_vec[i] = g[i] - g_new[i]; // curvature of -J, kept positive for ascent
            sy += s_vec[i] * y_vec[i];
        }
        if (sy > 1e-14) {
            s_hist.push_back(std::move(s_vec));
            y_hist.push_back(std::move(y_vec));
            rho_hist.push_back(1.0 / sy);
            if (s_hist.size() > mem) {
                s_hist.pop_front();
                y_hist.pop_front();
                rho_hist.pop_front();
            }
        }
        const double gain = j_new - j;
        x = x_new;
        j = j_new;
        g = std::move(g_new);
        record_best(res, res.evals, j, x, dt);
        if (gain < cfg.tolerance) {
            res.converged = true;
            return;
        }
        if (res.evals >= cfg.max_evals) return;
    }
}

} // namespace detail

/// Gradient ascent pulse engineering: quasi-Newton ascent from a random
/// initial control uniform in [-A, A]^K, unconstrained.
inline RunResult grape_maximize(const OptimizationNode& node, const OptimizerConfig& cfg,
                                const SystemConfig& sys = {}) {
    if (node.kseg < 1) throw std::invalid_argument("grape_maximize: Kseg must be >= 1");
    RunResult res;
    res.seed = cfg.seed;
    res.method = Method::GRAPE;
    CounterRng rng(cfg.seed);
    std::vector<double> a(node.kseg);
    for (double& c : a) c = rng.uniform(-cfg.init_amplitude, cfg.init_amplitude);
    const auto fn = node_objective(node, sys);
    const auto grad = node_gradient(node, sys);
    detail::lbfgs_ascent(a, fn, grad, res, cfg, node.dt(), cfg.grape_max_iters);
    res.best_j = fn(res.best_control.amplitudes); // recompute at return
    return res;
}

/// rand/1/bin differential evolution over the box [-bound, bound]^dim.
/// Population max(15 dim, 30), F dithered in [0.5, 1.0] per generation,
/// CR = 0.7, clip-to-bounds repair.
inline RunResult differential_evolution_raw(std::size_t dim, const OptimizerConfig& cfg,
                                            const ObjectiveFn& fn, double dt) {
    if (cfg.bound <= 0.0) throw std::invalid_argument("differential_evolution: bound must be positive");
    RunResult res;
    res.seed = cfg.seed;
    res.method = Method::DE;
    CounterRng rng(cfg.seed);
    const std::size_t np = std::max<std::size_t>(15 * dim, 30);
    const double nu = cfg.bound;

    std::vector<std::vector<double>> pop(np, std::vector<double>(dim));
    std::vector<double> fitness(np);
    for (std::size_t i = 0; i < np; ++i) {
        for (double& c : pop[i]) c = rng.uniform(-nu, nu);
        fitness[i] = fn(pop[i]);
        ++res.evals;
        detail::record_best(res, res.evals, fitness[i], pop[i], dt);
    }

    int stall = 0;
    std::vector<double> trial(dim);
    while (res.evals < cfg.max_evals && stall < 60 && res.best_j < 1.0 - 1e-12) {
        const double f = rng.uniform(0.5, 1.0); // dither per generation
        const double prev_best = res.best_j;
        for (std::size_t i = 0; i < np && res.evals < cfg.max_evals; ++i) {
            std::size_t r1, r2, r3;
            do { r1 = rng.below(np); } while (r1 == i);
            do { r2 = rng.below(np); } while (r2 == i || r2 == r1);
            do { r3 = rng.below(np); } while (r3 == i || r3 == r1 || r3 == r2);
            const std::size_t jrand = rng.below(dim);
            for (std::size_t j = 0; j < dim; ++j) {
                if (j == jrand || rng.uniform() < 0.7)
                    trial[j] = std::clamp(pop[r1][j] + f * (pop[r2][j] - pop[r3][j]), -nu, nu);
                else
                    trial[j] = pop[i][j];
            }
            const double jt = fn(trial);
            ++res.evals;
            if (jt >= fitness[i]) {
                pop[i] = trial;
                fitness[i] = jt;
                detail::record_best(res, res.evals, jt, trial, dt);
            }
        }
        stall = (res.best_j - prev_best < cfg.tolerance) ? stall + 1 : 0;
    }
    res.converged = stall >= 60 || res.best_j >= 1.0 - 1e-12;
    res.best_j = fn(res.best_control.amplitudes);
    return res;
}

inline RunResult differential_evolution(const OptimizationNode& node, const OptimizerConfig& cfg,
                                        const ObjectiveFn& fn) {
    return differential_evolution_raw(node.kseg, cfg, fn, node.dt());
}

inline RunResult differential_evolution(const OptimizationNode& node, const OptimizerConfig& cfg,
                                        const SystemConfig& sys = {}) {
    return differential_evolution(node, cfg, node_objective(node, sys));
}

namespace detail {

inline constexpr double da_qv = 2.62;
inline constexpr double da_qa = -5.0;
inline constexpr double da_t0 = 5230.0;

/// Tsallis visiting displacement at visiting temperature tv
inline double tsallis_visit(CounterRng& rng, double tv) {
    constexpr double qv = da_qv;
    const double f1 = std::exp(std::log(tv) / (qv - 1.0));
    const double f2 = std::exp((4.0 - qv) * std::log(qv - 1.0));
    const double f3 = std::exp((2.0 - qv) / (qv - 1.0) * std::log(2.0));
    const double f4 = std::sqrt(pi) * f1 * f2 / (f3 * (3.0 - qv));
    const double f5 = 1.0 / (qv - 1.0) - 0.5;
    const double d1 = 2.0 - f5;
    const double f6 = pi * (1.0 - f5) / std::sin(pi * (1.0 - f5)) / std::exp(std::lgamma(d1));
    const double sigmax = std::exp(-(qv - 1.0) * std::log(f6 / f4) / (3.0 - qv));
    const double x = sigmax * rng.normal();
    const double y = rng.normal();
    const double den = std::exp((qv - 1.0) * std::log(std::abs(y)) / (3.0 - qv));
    return x / den;
}

inline double wrap_into_box(double x, double lo, double hi) {
    const double range = hi - lo;
    double r = std::fmod(x - lo, range);
    if (r < 0.0) r += range;
    return lo + r;
}

/// central-difference gradient for the polish step when no analytic one exists
inline GradientFn numeric_gradient(const ObjectiveFn& fn, long* eval_counter) {
    return [fn, eval_counter](const std::vector<double>& x) {
        const double h = 1e-7;
        std::vector<double> g(x.size());
        std::vector<double> probe = x;
        for (std::size_t i = 0; i < x.size(); ++i) {
            probe[i] = x[i] + h;
            const double jp = fn(probe);
            probe[i] = x[i] - h;
            const double jm = fn(probe);
            probe[i] = x[i];
            g[i] = (jp - jm) / (2.0 * h);
            *eval_counter += 2;
        }
        return g;
    };
}

} // namespace detail

/// Generalized simulated annealing (dual annealing): Tsallis visiting
/// distribution (q_v = 2.62), Tsallis acceptance (q_a = -5), initial
/// temperature 5230, with periodic quasi-Newton polish of the incumbent
/// restricted to the box.
inline RunResult dual_annealing_raw(std::size_t dim, const OptimizerConfig& cfg,
                                    const ObjectiveFn& fn, double dt,
                                    const GradientFn& grad_fn = nullptr) {
    if (cfg.bound <= 0.0) throw std::invalid_argument("dual_annealing: bound must be positive");
    RunResult res;
    res.seed = cfg.seed;
    res.method = Method::DA;
    CounterRng rng(cfg.seed);
    const double nu = cfg.bound;

    std::vector<double> x(dim);
    for (double& c : x) c = rng.uniform(-nu, nu);
    double jx = fn(x);
    ++res.evals;
    detail::record_best(res, res.evals, jx, x, dt);

    GradientFn polish_grad = grad_fn ? grad_fn : detail::numeric_gradient(fn, &res.evals);
    const auto polish = [&](std::vector<double> start) {
        OptimizerConfig pc = cfg;
        pc.tolerance = 1e-14;
        detail::lbfgs_ascent(start, fn, polish_grad, res, pc, dt, 120, &nu);
    };

    const double tfac = std::pow(2.0, detail::da_qv - 1.0) - 1.0;
    double last_polished_best = -1.0;
    std::vector<double> cand(dim);
    for (long iter = 1; res.evals < cfg.max_evals && res.best_j < 1.0 - 1e-12; ++iter) {
        const double tv = detail::da_t0 * tfac / (std::pow(1.0 + iter, detail::da_qv - 1.0) - 1.0);
        const double t_acc = tv / static_cast<double>(iter);
        for (std::size_t j = 0; j < 2 * dim && res.evals < cfg.max_evals; ++j) {
            cand = x;
            if (j < dim) {
                for (std::size_t k = 0; k < dim; ++k) {
                    double step = detail::tsallis_visit(rng, tv);
                    step = std::clamp(step, -2.0 * nu, 2.0 * nu);
                    cand[k] = detail::wrap_into_box(x[k] + step, -nu, nu);
                }
            } else {
                const std::size_t k = j - dim;
                double step = detail::tsallis_visit(rng, tv);
                step = std::clamp(step, -2.0 * nu, 2.0 * nu);
                cand[k] = detail::wrap_into_box(x[k] + step, -nu, nu);
            }
            const double jc = fn(cand);
            ++res.evals;
            const double de = jx - jc; // energy change, energy = -J
            bool accept = de <= 0.0;
            if (!accept) {
                // uphill in energy: Tsallis acceptance
                const double base = 1.0 - (1.0 - detail::da_qa) * de / std::max(t_acc, 1e-300);
                const double prob = base <= 0.0 ? 0.0 : std::exp(std::log(base) / (1.0 - detail::da_qa));
                accept = rng.uniform() < prob;
            }
            if (accept) {
                x = cand;
                jx = jc;
                detail::record_best(res, res.evals, jc, cand, dt);
            }
        }
        // polish whenever the incumbent best advanced since the last polish
        if (res.best_j > last_polished_best + cfg.tolerance && res.evals < cfg.max_evals) {
            last_polished_best = res.best_j;
            polish(res.best_control.amplitudes);
        }
        if (tv < 0.005) { // reanneal from the best-so-far neighborhood
            iter = 1;
            x = res.best_control.amplitudes;
            jx = res.best_j;
        }
    }
    res.converged = res.best_j >= 1.0 - 1e-12 || res.evals >= cfg.max_evals;
    res.best_j = fn(res.best_control.amplitudes);
    return res;
}

inline RunResult dual_annealing(const OptimizationNode& node, const OptimizerConfig& cfg,
                                const ObjectiveFn& fn) {
    return dual_annealing_raw(node.kseg, cfg, fn, node.dt());
}

inline RunResult dual_annealing(const OptimizationNode& node, const OptimizerConfig& cfg,
                                const SystemConfig& sys = {}) {
    return dual_annealing_raw(node.kseg, cfg, node_objective(node, sys), node.dt(),
                              node_gradient(node, sys));
}

inline RunResult run_method(const OptimizationNode& node, const OptimizerConfig& cfg,
                            const SystemConfig& sys = {}) {
    switch (cfg.method) {
        case Method::GRAPE: return grape_maximize(node, cfg, sys);
        case Method::DE: return differential_evolution(node, cfg, sys);
        case Method::DA: return dual_annealing(node, cfg, sys);
    }
    throw std::logic_error("run_method: bad method");
}

struct MultiRunResult {
    RunResult best;
    std::vector<RunResult> all;
};

/// Repeated seeded runs across methods; records which run produced the best.
inline MultiRunResult multi_run(const OptimizationNode& node, const std::vector<Method>& methods,
                                int runs_per_method, std::uint64_t base_seed,
                                const OptimizerConfig& base_cfg = {}, const SystemConfig& sys = {}) {
    if (runs_per_method < 1) throw std::invalid_argument("multi_run: runs_per_method must be >= 1");
    MultiRunResult out;
    std::uint64_t k = 0;
    for (Method m : methods) {
        for (int r = 0; r < runs_per_method; ++r, ++k) {
            OptimizerConfig cfg = base_cfg;
            cfg.method = m;
            cfg.seed = base_seed + k;
            out.all.push_back(run_method(node, cfg, sys));
        }
    }
    out.best = out.all.front();
    for (const RunResult& r : out.all)
        if (r.best_j > out.best.best_j) out.best = r;
    return out;
}

} // namespace qland
