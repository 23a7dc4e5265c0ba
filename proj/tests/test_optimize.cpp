#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "qland/optimize.hpp"

using namespace qland;

namespace {

OptimizerConfig base_config(std::uint64_t seed) {
    OptimizerConfig cfg;
    cfg.seed = seed;
    return cfg;
}

} // namespace

TEST_CASE("method names round-trip", "[optimize]") {
    for (Method m : {Method::GRAPE, Method::DE, Method::DA})
        REQUIRE(method_from_string(to_string(m)) == m);
    REQUIRE_THROWS_AS(method_from_string("annealing"), std::invalid_argument);
}

TEST_CASE("GRAPE reaches the known optima", "[optimize][grape]") {
    // D2 node: the landscape maximum J = 1 is attainable
    const OptimizationNode d2{19.0 * pi / 20.0, pi / 20.0, 2};
    const RunResult r2 = grape_maximize(d2, base_config(1));
    REQUIRE(r2.best_j >= 1.0 - 1e-6);
    REQUIRE(r2.best_j <= 1.0);

    // D1 node: converges onto f0 with J = cos^2(13 pi/20) = 0.206107
    const OptimizationNode d1{3.0 * pi / 5.0, pi / 20.0, 2};
    const RunResult r1 = grape_maximize(d1, base_config(2));
    REQUIRE_THAT(r1.best_j, Catch::Matchers::WithinAbs(0.206107, 1e-4));
    for (double a : r1.best_control.amplitudes) REQUIRE(std::abs(a) <= 0.05);

    // starting exactly at a = 0 returns immediately from the critical point
    OptimizerConfig zero_init = base_config(3);
    zero_init.init_amplitude = 0.0;
    const RunResult r0 = grape_maximize(d1, zero_init);
    REQUIRE(r0.converged);
    REQUIRE(r0.evals <= 4);
    REQUIRE_THAT(r0.best_j, Catch::Matchers::WithinAbs(objective_at_zero(d1.phi_w, d1.T), 1e-14));

    REQUIRE_THROWS_AS(grape_maximize({1.0, 0.1, 0}, base_config(0)), std::invalid_argument);
}

TEST_CASE("DE self-test on the sphere function", "[optimize][de]") {
    OptimizerConfig cfg = base_config(11);
    cfg.bound = 5.0;
    cfg.max_evals = 20000;
    const ObjectiveFn neg_sphere = [](const std::vector<double>& a) {
        double s = 0.0;
        for (double c : a) s += c * c;
        return -s;
    };
    const RunResult r = differential_evolution_raw(4, cfg, neg_sphere, 1.0);
    REQUIRE(r.best_j >= -1e-6);
    REQUIRE(r.evals <= 20000);
    for (double a : r.best_control.amplitudes) REQUIRE(std::abs(a) <= 5.0);
}

TEST_CASE("DE on grid nodes", "[optimize][de]") {
    // D3 node reaches J ~ 1 inside the nu = 50 box
    const OptimizationNode d3{pi, pi / 20.0, 2};
    const RunResult r3 = differential_evolution(d3, base_config(21));
    REQUIRE(r3.best_j >= 1.0 - 1e-3);

    // D1 node: no improvement over f0 beyond tolerance
    const OptimizationNode d1{3.0 * pi / 5.0, pi / 20.0, 2};
    const RunResult r1 = differential_evolution(d1, base_config(22));
    REQUIRE(r1.best_j - objective_at_zero(d1.phi_w, d1.T) <= 1e-3);

    OptimizerConfig bad = base_config(0);
    bad.bound = 0.0;
    REQUIRE_THROWS_AS(differential_evolution(d1, bad), std::invalid_argument);
}

TEST_CASE("DA self-test on Rastrigin", "[optimize][da]") {
    OptimizerConfig cfg = base_config(31);
    cfg.bound = 5.12;
    cfg.max_evals = 50000;
    const ObjectiveFn neg_rastrigin = [](const std::vector<double>& a) {
        double s = 10.0 * static_cast<double>(a.size());
        for (double c : a) s += c * c - 10.0 * std::cos(2.0 * pi * c);
        return -s;
    };
    const RunResult r = dual_annealing_raw(2, cfg, neg_rastrigin, 1.0);
    REQUIRE(r.best_j >= -1e-4);
    for (double a : r.best_control.amplitudes) REQUIRE(std::abs(a) <= 5.12);
}

TEST_CASE("DA on grid nodes", "[optimize][da]") {
    // D2 node away from the grid corner
    const OptimizationNode d2{3.0 * pi / 4.0, pi / 4.0, 10};
    const RunResult r2 = dual_annealing(d2, base_config(41));
    REQUIRE(r2.best_j >= 1.0 - 1e-3);

    // D1 node matches the zero-control value
    const OptimizationNode d1{11.0 * pi / 20.0, pi / 10.0, 4};
    const RunResult r1 = dual_annealing(d1, base_config(42));
    REQUIRE_THAT(r1.best_j, Catch::Matchers::WithinAbs(objective_at_zero(d1.phi_w, d1.T), 1e-3));
}

TEST_CASE("traces are monotone and bounded", "[optimize]") {
    const OptimizationNode node{17.0 * pi / 20.0, pi / 5.0, 8};
    for (Method m : {Method::GRAPE, Method::DE, Method::DA}) {
        OptimizerConfig cfg = base_config(51);
        cfg.method = m;
        cfg.max_evals = 8000;
        const RunResult r = run_method(node, cfg);
        REQUIRE(r.method == m);
        REQUIRE(r.best_j <= 1.0);
        REQUIRE_FALSE(r.trace.empty());
        for (std::size_t k = 1; k < r.trace.size(); ++k) {
            REQUIRE(r.trace[k].second >= r.trace[k - 1].second);
            REQUIRE(r.trace[k].first >= r.trace[k - 1].first);
        }
        if (m != Method::GRAPE)
            for (double a : r.best_control.amplitudes) REQUIRE(std::abs(a) <= cfg.bound);
    }
}

TEST_CASE("seed determinism per method", "[optimize]") {
    const OptimizationNode node{19.0 * pi / 20.0, pi / 10.0, 4};
    for (Method m : {Method::GRAPE, Method::DE, Method::DA}) {
        OptimizerConfig cfg = base_config(61);
        cfg.method = m;
        cfg.max_evals = 6000;
        const RunResult a = run_method(node, cfg);
        const RunResult b = run_method(node, cfg);
        REQUIRE(a.best_j == b.best_j);
        REQUIRE(a.evals == b.evals);
        REQUIRE(a.best_control.amplitudes == b.best_control.amplitudes);
        REQUIRE(a.trace == b.trace);
    }
}

TEST_CASE("multi_run aggregates and is deterministic", "[optimize]") {
    const OptimizationNode node{pi, pi / 20.0, 2};
    const std::vector<Method> methods{Method::GRAPE, Method::DE, Method::DA};

    const MultiRunResult mr = multi_run(node, methods, 2, 1000);
    REQUIRE(mr.all.size() == 6);
    REQUIRE(mr.best.best_j >= 1.0 - 1e-3);
    for (const RunResult& r : mr.all) REQUIRE(mr.best.best_j >= r.best_j);

    // seeds are assigned consecutively from the base seed
    for (std::size_t k = 0; k < mr.all.size(); ++k) REQUIRE(mr.all[k].seed == 1000 + k);

    const MultiRunResult again = multi_run(node, methods, 2, 1000);
    REQUIRE(again.best.best_j == mr.best.best_j);
    REQUIRE(again.best.best_control.amplitudes == mr.best.best_control.amplitudes);

    // a single method and run degenerates to that run
    OptimizerConfig cfg = base_config(77);
    cfg.method = Method::GRAPE;
    cfg.seed = 2000;
    const MultiRunResult single = multi_run(node, {Method::GRAPE}, 1, 2000);
    REQUIRE(single.all.size() == 1);
    REQUIRE(single.best.best_j == grape_maximize(node, cfg).best_j);

    REQUIRE_THROWS_AS(multi_run(node, methods, 0, 1), std::invalid_argument);
}
