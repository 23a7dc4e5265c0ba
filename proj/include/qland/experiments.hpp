#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <future>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "qland/domains.hpp"
#include "qland/dynamics.hpp"
#include "qland/optimize.hpp"

namespace qland {

/// One node of the study grid: phi_W^j = pi/2 + (pi/20) j, T_i = (pi/20) i,
/// Kseg = 2i, dt = pi/40 for every node.
struct GridNode {
    int j;       // 0..10
    int i;       // 1..10
    double phi_w;
    double T;
    std::size_t kseg;
    DomainLabel domain;
};

/// The D3 table subset is bookkept together with the excluded corner (pi, pi/2).
inline DomainLabel grid_group(DomainLabel d) {
    return d == DomainLabel::EXCLUDED ? DomainLabel::D3 : d;
}

struct GridSpec {
    std::vector<GridNode> nodes; // ordered by (i, j)
    static constexpr double dt = pi / 40.0;
};

inline GridSpec build_grid() {
    GridSpec grid;
    grid.nodes.reserve(110);
    for (int i = 1; i <= 10; ++i) {
        for (int j = 0; j <= 10; ++j) {
            GridNode n;
            n.i = i;
            n.j = j;
            n.phi_w = 0.5 * pi + pi / 20.0 * j;
            n.T = pi / 20.0 * i;
            n.kseg = static_cast<std::size_t>(2 * i);
            n.domain = classify_domain(n.phi_w, n.T).label;
            grid.nodes.push_back(n);
        }
    }
    return grid;
}

struct SweepRecord {
    int j = 0, i = 0;
    double phi_w = 0.0, T = 0.0;
    DomainLabel domain = DomainLabel::EXCLUDED;
    double j_hat = 0.0;     // optimized objective
    double j_zero = 0.0;    // cos^2(phi_W + T)
    double delta = 0.0;     // j_hat - j_zero
    std::vector<double> best_control;
    Method method_of_best = Method::GRAPE;
    std::vector<std::uint64_t> seeds;
    bool failed = false;
    std::string error;
};

struct SweepOptions {
    std::vector<Method> methods{Method::GRAPE, Method::DE, Method::DA};
    int runs_per_method = 2;
    std::uint64_t base_seed = 0;
    OptimizerConfig optimizer; // per-run template (bound, budgets, tolerance)
    int jobs = 1;
};

/// deterministic per-node seed offset; independent of sweep order and pool size
inline std::uint64_t node_seed(std::uint64_t base, int i, int j) {
    return base + static_cast<std::uint64_t>((i * 11 + j)) * 1000ULL;
}

inline SweepRecord sweep_node(const GridNode& n, const SweepOptions& opt) {
    SweepRecord rec;
    rec.j = n.j;
    rec.i = n.i;
    rec.phi_w = n.phi_w;
    rec.T = n.T;
    rec.domain = n.domain;
    rec.j_zero = objective_at_zero(n.phi_w, n.T);
    try {
        const OptimizationNode node{n.phi_w, n.T, n.kseg};
        const std::uint64_t seed = node_seed(opt.base_seed, n.i, n.j);
        const MultiRunResult mr =
            multi_run(node, opt.methods, opt.runs_per_method, seed, opt.optimizer);
        rec.j_hat = mr.best.best_j;
        rec.delta = rec.j_hat - rec.j_zero;
        rec.best_control = mr.best.best_control.amplitudes;
        rec.method_of_best = mr.best.method;
        for (const RunResult& r : mr.all) rec.seeds.push_back(r.seed);
    } catch (const std::exception& e) {
        rec.failed = true;
        rec.error = e.what();
    }
    return rec;
}

/// Optimize every grid node; failures are recorded per node, the sweep
/// continues. Output order is (i, j) regardless of the worker count.
inline std::vector<SweepRecord> sweep(const GridSpec& grid, const SweepOptions& opt) {
    std::vector<SweepRecord> records(grid.nodes.size());
    const int jobs = std::max(1, opt.jobs);
    if (jobs == 1) {
        for (std::size_t k = 0; k < grid.nodes.size(); ++k)
            records[k] = sweep_node(grid.nodes[k], opt);
        return records;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next.fetch_add(1); k < grid.nodes.size(); k = next.fetch_add(1))
            records[k] = sweep_node(grid.nodes[k], opt);
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    return records;
}

/// 10x11 matrix in the layout of the printed tables: row 0 is T_10, row 9 is
/// T_1; columns are phi^1..phi^11 (j = 0..10).
using Table = std::array<std::array<double, 11>, 10>;

/// display rounding: half away from zero, 3 decimals
inline double round3(double x) {
    return std::copysign(std::floor(std::abs(x) * 1000.0 + 0.5) / 1000.0, x);
}

inline std::pair<Table, Table> emit_tables(const std::vector<SweepRecord>& records) {
    Table tj{}, td{};
    std::array<std::array<bool, 11>, 10> seen{};
    for (const SweepRecord& r : records) {
        if (r.failed) continue;
        tj[10 - r.i][r.j] = r.j_hat;
        td[10 - r.i][r.j] = r.delta;
        seen[10 - r.i][r.j] = true;
    }
    std::string missing;
    for (int row = 0; row < 10; ++row)
        for (int col = 0; col < 11; ++col)
            if (!seen[row][col])
                missing += " (i=" + std::to_string(10 - row) + ",j=" + std::to_string(col) + ")";
    if (!missing.empty()) throw std::runtime_error("emit_tables: missing nodes:" + missing);
    return {tj, td};
}

struct AmplitudeStats {
    std::size_t count = 0;
    double min = 0.0, max = 0.0;
    double min_abs = 0.0, mean_abs = 0.0;
    std::vector<double> sorted_signed; // CDF sample points
    std::vector<double> sorted_abs;
};

/// Flattened best-control amplitudes over one grid subset (D3 includes the
/// excluded corner, matching the table bookkeeping).
inline AmplitudeStats amplitude_stats(const std::vector<SweepRecord>& records, DomainLabel subset) {
    AmplitudeStats st;
    for (const SweepRecord& r : records) {
        if (r.failed || grid_group(r.domain) != grid_group(subset)) continue;
        for (double a : r.best_control) st.sorted_signed.push_back(a);
    }
    if (st.sorted_signed.empty()) throw std::invalid_argument("amplitude_stats: empty subset");
    st.count = st.sorted_signed.size();
    std::sort(st.sorted_signed.begin(), st.sorted_signed.end());
    st.min = st.sorted_signed.front();
    st.max = st.sorted_signed.back();
    st.sorted_abs.reserve(st.count);
    double sum_abs = 0.0;
    for (double a : st.sorted_signed) {
        st.sorted_abs.push_back(std::abs(a));
        sum_abs += std::abs(a);
    }
    std::sort(st.sorted_abs.begin(), st.sorted_abs.end());
    st.min_abs = st.sorted_abs.front();
    st.mean_abs = sum_abs / static_cast<double>(st.count);
    return st;
}

/// Two-segment objective surface J(a1, a2) = trace^2 / 4 on a uniform box grid.
struct LandscapeGrid {
    double phi_w = 0.0, T = 0.0;
    double nu = 0.0, step = 0.0;
    std::vector<std::vector<double>> values; // values[s][q] = J(a1^s, a2^q)

    double a_at(std::size_t idx) const { return -nu + static_cast<double>(idx) * step; }
};

inline LandscapeGrid two_segment_landscape(double phi_w, double T, double nu = 50.0,
                                           double step = 1.0) {
    if (step <= 0.0 || nu <= 0.0)
        throw std::invalid_argument("two_segment_landscape: step and nu must be positive");
    LandscapeGrid g;
    g.phi_w = phi_w;
    g.T = T;
    g.nu = nu;
    g.step = step;
    const auto n = static_cast<std::size_t>(std::llround(2.0 * nu / step));
    const double dt = T / 2.0;
    g.values.assign(n + 1, std::vector<double>(n + 1));
    for (std::size_t s = 0; s <= n; ++s)
        for (std::size_t q = 0; q <= n; ++q) {
            const double tr = two_segment_trace(g.a_at(s), g.a_at(q), dt, phi_w);
            g.values[s][q] = 0.25 * tr * tr;
        }
    return g;
}

struct MinTimeRecord {
    double phi_w = 0.0;
    double t_min = 0.0;
    double achieved_j = 0.0; // objective of f0 at t_min
};

/// Minimal final time for exact gate generation: T_min = pi - phi_W, where the
/// zero control already attains J = 1. For smaller grid times, confirms the
/// swept optimum stays below 1.
inline MinTimeRecord min_time_scan(double phi_w, const std::vector<SweepRecord>& column_records = {}) {
    if (phi_w < 0.5 * pi - domain_boundary_tol || phi_w > pi + domain_boundary_tol)
        throw std::domain_error("min_time_scan: phi_W must lie in [pi/2, pi]");
    MinTimeRecord rec;
    rec.phi_w = phi_w;
    rec.t_min = pi - phi_w;
    rec.achieved_j = rec.t_min > 0.0 ? objective_at_zero(phi_w, rec.t_min) : 1.0;
    for (const SweepRecord& r : column_records) {
        if (std::abs(r.phi_w - phi_w) > 1e-9 || r.failed) continue;
        if (r.T < rec.t_min - 1e-9 && r.j_hat >= 1.0 - 1e-3)
            throw std::runtime_error("min_time_scan: sub-minimal time reached J ~ 1");
    }
    return rec;
}

} // namespace qland
