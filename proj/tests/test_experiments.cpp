#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "qland/experiments.hpp"
#include "qland/serialize.hpp"

using namespace qland;

namespace {

SweepOptions quick_options() {
    SweepOptions opt;
    opt.runs_per_method = 1;
    opt.optimizer.max_evals = 4000;
    opt.optimizer.grape_max_iters = 200;
    return opt;
}

std::vector<SweepRecord> synthetic_records() {
    std::vector<SweepRecord> recs;
    for (const GridNode& n : build_grid().nodes) {
        SweepRecord r;
        r.i = n.i;
        r.j = n.j;
        r.phi_w = n.phi_w;
        r.T = n.T;
        r.domain = n.domain;
        r.j_zero = objective_at_zero(n.phi_w, n.T);
        r.j_hat = n.i + n.j <= 10 ? r.j_zero : 1.0;
        r.delta = r.j_hat - r.j_zero;
        r.best_control.assign(n.kseg, 0.001 * n.j);
        recs.push_back(r);
    }
    return recs;
}

} // namespace

TEST_CASE("grid construction and partition", "[experiments][grid]") {
    const GridSpec grid = build_grid();
    REQUIRE(grid.nodes.size() == 110);

    int d1 = 0, d2 = 0, d3 = 0;
    for (const GridNode& n : grid.nodes) {
        REQUIRE(n.kseg == static_cast<std::size_t>(2 * n.i));
        // Kseg * dt reproduces T_i exactly in binary floating point
        REQUIRE(static_cast<double>(n.kseg) * GridSpec::dt == n.T);
        switch (grid_group(n.domain)) {
            case DomainLabel::D1: ++d1; break;
            case DomainLabel::D2: ++d2; break;
            case DomainLabel::D3: ++d3; break;
            default: FAIL("unexpected grid label");
        }
    }
    REQUIRE(d1 == 45);
    REQUIRE(d2 == 10);
    REQUIRE(d3 == 55);

    // node (j=2, i=1) = (3pi/5, pi/20) with Kseg = 2
    const GridNode& n21 = grid.nodes[2]; // i = 1 row comes first, ordered by j
    REQUIRE(n21.i == 1);
    REQUIRE(n21.j == 2);
    REQUIRE_THAT(n21.phi_w, Catch::Matchers::WithinAbs(3.0 * pi / 5.0, 1e-15));
    REQUIRE_THAT(n21.T, Catch::Matchers::WithinAbs(pi / 20.0, 1e-16));
    REQUIRE(n21.kseg == 2);
    REQUIRE(n21.domain == DomainLabel::D1);

    // the excluded corner is bookkept with D3
    REQUIRE(grid_group(DomainLabel::EXCLUDED) == DomainLabel::D3);
}

TEST_CASE("per-node seeds are position-determined", "[experiments][sweep]") {
    REQUIRE(node_seed(0, 1, 0) == 11000);
    for (int i = 1; i <= 10; ++i)
        for (int j = 0; j <= 10; ++j)
            REQUIRE(node_seed(5, i, j) == 5 + static_cast<std::uint64_t>(i * 11 + j) * 1000ULL);
}

TEST_CASE("sweep over a small subset of nodes", "[experiments][sweep]") {
    GridSpec grid = build_grid();
    std::erase_if(grid.nodes, [](const GridNode& n) {
        return n.i != 1 || (n.j != 0 && n.j != 9 && n.j != 10);
    });
    REQUIRE(grid.nodes.size() == 3);

    const SweepOptions opt = quick_options();
    const std::vector<SweepRecord> recs = sweep(grid, opt);
    REQUIRE(recs.size() == 3);
    for (const SweepRecord& r : recs) {
        REQUIRE_FALSE(r.failed);
        REQUIRE_THAT(r.j_zero,
                     Catch::Matchers::WithinAbs(objective_at_zero(r.phi_w, r.T), 1e-12));
        REQUIRE_THAT(r.delta, Catch::Matchers::WithinAbs(r.j_hat - r.j_zero, 1e-14));
        REQUIRE(r.seeds.size() == 3); // one per method at runs_per_method = 1
        REQUIRE(r.best_control.size() == 2);
    }
    // D1 column j = 0: no method beats the conjectured global max
    REQUIRE(recs[0].j_hat <= recs[0].j_zero + 1e-3);
    // D2 node (j = 9, i = 1) reaches 1
    REQUIRE(recs[1].j_hat >= 1.0 - 1e-3);
    // D3 corner column reaches 1
    REQUIRE(recs[2].j_hat >= 1.0 - 1e-3);

    // a worker pool produces identical records in identical order
    SweepOptions par = opt;
    par.jobs = 4;
    const std::vector<SweepRecord> recs_par = sweep(grid, par);
    REQUIRE(sweep_to_json(recs_par).dump() == sweep_to_json(recs).dump());
}

TEST_CASE("table layout and completeness", "[experiments][tables]") {
    const auto recs = synthetic_records();
    const auto [tj, td] = emit_tables(recs);

    // row 0 is T_10, row 9 is T_1; columns are j = 0..10
    REQUIRE(tj[9][2] == objective_at_zero(3.0 * pi / 5.0, pi / 20.0)); // (i=1, j=2)
    REQUIRE(tj[0][10] == 1.0);                                        // (i=10, j=10)
    REQUIRE(td[9][0] == 0.0);                                         // D1 gap zero
    REQUIRE_THAT(td[0][10], Catch::Matchers::WithinAbs(1.0, 1e-12));  // corner gap

    // display rounding of the D1 corner value
    REQUIRE(round3(tj[9][2]) == 0.206);

    auto incomplete = recs;
    incomplete.erase(incomplete.begin() + 17);
    REQUIRE_THROWS_WITH(emit_tables(incomplete), Catch::Matchers::ContainsSubstring("missing"));
}

TEST_CASE("amplitude statistics", "[experiments][stats]") {
    const auto recs = synthetic_records();
    const AmplitudeStats d1 = amplitude_stats(recs, DomainLabel::D1);
    REQUIRE(d1.count == 330);
    const AmplitudeStats d3 = amplitude_stats(recs, DomainLabel::D3);
    REQUIRE(d3.count == 770);
    const AmplitudeStats d2 = amplitude_stats(recs, DomainLabel::D2);
    REQUIRE(d2.count == 110);

    REQUIRE(d3.min == d3.sorted_signed.front());
    REQUIRE(d3.max == d3.sorted_signed.back());
    REQUIRE(d3.min_abs >= 0.0);
    REQUIRE(d3.mean_abs >= d3.min_abs);
    REQUIRE(std::is_sorted(d3.sorted_abs.begin(), d3.sorted_abs.end()));

    REQUIRE_THROWS_AS(amplitude_stats({}, DomainLabel::D1), std::invalid_argument);
}

TEST_CASE("two-segment landscape facts", "[experiments][landscape]") {
    // (3pi/5, pi/20): the center is a strict local maximum of the grid
    const LandscapeGrid d1 = two_segment_landscape(3.0 * pi / 5.0, pi / 20.0, 10.0, 1.0);
    REQUIRE(d1.values.size() == 21);
    const std::size_t c = 10;
    REQUIRE_THAT(d1.values[c][c], Catch::Matchers::WithinAbs(0.206107, 5e-7));
    for (int ds = -1; ds <= 1; ++ds)
        for (int dq = -1; dq <= 1; ++dq) {
            if (ds == 0 && dq == 0) continue;
            REQUIRE(d1.values[c + ds][c + dq] < d1.values[c][c]);
        }
    for (const auto& row : d1.values)
        for (double v : row) {
            REQUIRE(v >= 0.0);
            REQUIRE(v <= 1.0);
        }

    // (pi, pi/20): saddle signature at the center, J ~ 1 attained elsewhere
    const LandscapeGrid d3 = two_segment_landscape(pi, pi / 20.0, 50.0, 1.0);
    const std::size_t c3 = 50;
    const double center = d3.values[c3][c3];
    bool above = false, below = false;
    double best = 0.0;
    for (std::size_t s = 0; s < d3.values.size(); ++s)
        for (std::size_t q = 0; q < d3.values.size(); ++q) best = std::max(best, d3.values[s][q]);
    for (int ds = -1; ds <= 1; ++ds)
        for (int dq = -1; dq <= 1; ++dq) {
            if (ds == 0 && dq == 0) continue;
            (d3.values[c3 + ds][c3 + dq] > center ? above : below) = true;
        }
    REQUIRE(above);
    REQUIRE(below);
    REQUIRE(best >= 1.0 - 1e-3);

    // (19pi/20, pi/20): the global maximum 1 sits exactly at the center
    const LandscapeGrid d2 = two_segment_landscape(19.0 * pi / 20.0, pi / 20.0, 10.0, 1.0);
    REQUIRE_THAT(d2.values[c][c], Catch::Matchers::WithinAbs(1.0, 1e-12));
    for (std::size_t s = 0; s < d2.values.size(); ++s)
        for (std::size_t q = 0; q < d2.values.size(); ++q)
            REQUIRE(d2.values[s][q] <= d2.values[c][c] + 1e-15);

    REQUIRE_THROWS_AS(two_segment_landscape(1.0, 0.1, 10.0, 0.0), std::invalid_argument);
    REQUIRE_THROWS_AS(two_segment_landscape(1.0, 0.1, -1.0, 1.0), std::invalid_argument);
}

TEST_CASE("minimal-time records", "[experiments][mintime]") {
    const MinTimeRecord quarter = min_time_scan(3.0 * pi / 4.0);
    REQUIRE_THAT(quarter.t_min, Catch::Matchers::WithinAbs(0.25 * pi, 1e-15));
    REQUIRE_THAT(quarter.achieved_j, Catch::Matchers::WithinAbs(1.0, 1e-12));

    const MinTimeRecord half = min_time_scan(0.5 * pi);
    REQUIRE_THAT(half.t_min, Catch::Matchers::WithinAbs(0.5 * pi, 1e-15)); // the special time T0

    REQUIRE_THAT(min_time_scan(pi).t_min, Catch::Matchers::WithinAbs(0.0, 1e-15));

    REQUIRE_THROWS_AS(min_time_scan(0.3), std::domain_error);

    // a sub-minimal-time record claiming J ~ 1 contradicts the minimal time
    SweepRecord fake;
    fake.phi_w = 3.0 * pi / 4.0;
    fake.T = 0.1;
    fake.j_hat = 1.0;
    REQUIRE_THROWS_AS(min_time_scan(3.0 * pi / 4.0, {fake}), std::runtime_error);
}

TEST_CASE("serialization shapes", "[experiments][serialize]") {
    const auto recs = synthetic_records();
    const json sj = sweep_to_json(recs);
    REQUIRE(sj["schema"] == 1);
    REQUIRE(sj["records"].size() == 110);
    REQUIRE(sj["records"][2]["domain"] == "D1");
    REQUIRE(sj["records"][2]["j"] == 2);

    const std::string csv = table_to_csv(emit_tables(recs).first);
    std::size_t lines = 0;
    for (char ch : csv) lines += ch == '\n';
    REQUIRE(lines == 11); // header + 10 data rows
    REQUIRE(csv.rfind("T,phi1,", 0) == 0);
    REQUIRE(csv.find("T10,") != std::string::npos);

    const SpectrumReport rep = spectrum_report(LandscapePoint(3.0 * pi / 5.0, pi / 10.0), 3);
    const json rj = spectrum_report_to_json(rep);
    REQUIRE(rj["verdict"] == "NEGATIVE_DEFINITE");
    REQUIRE(rj["eigenvalues"].size() == rep.eigenpairs.size());
    const std::string scsv = spectrum_to_csv(rep);
    REQUIRE(scsv.rfind("phi_w,T,domain,branch,a,mu,hess_eig,verdict\n", 0) == 0);

    const LandscapeGrid g = two_segment_landscape(pi, pi / 20.0, 2.0, 1.0);
    const std::string lcsv = landscape_to_csv(g);
    std::size_t lrows = 0;
    for (char ch : lcsv) lrows += ch == '\n';
    REQUIRE(lrows == 1 + 25); // header + 5x5 grid
}
