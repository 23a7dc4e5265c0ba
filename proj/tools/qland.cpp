// Command-line front end: grid sweep, Hessian spectrum reports, two-segment
// landscape export, minimal-time scan, and the gradient oracle suite.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "qland/experiments.hpp"
#include "qland/nystrom.hpp"
#include "qland/serialize.hpp"

namespace fs = std::filesystem;
using namespace qland;

namespace {

std::string default_out_dir() {
    const char* env = std::getenv("QL_OUT_DIR");
    return env ? env : ".";
}

/// simple key = value config file; '#' starts a comment
std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::map<std::string, std::string> kv;
    std::ifstream in(path);
    if (!in) throw CLI::ValidationError("--config", "cannot read " + path);
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t");
            const auto e = s.find_last_not_of(" \t");
            return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
        };
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return kv;
}

std::vector<Method> parse_methods(const std::string& list) {
    std::vector<Method> out;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(method_from_string(item));
    if (out.empty()) throw CLI::ValidationError("--methods", "empty method list");
    return out;
}

void write_file(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    write_text_file(path.string(), content);
}

json delta_summary(const std::vector<SweepRecord>& records, DomainLabel group) {
    double min_abs = 1e300, max_abs = 0.0, sum_abs = 0.0;
    std::size_t n = 0;
    for (const SweepRecord& r : records) {
        if (r.failed || grid_group(r.domain) != group) continue;
        const double d = std::abs(r.delta);
        min_abs = std::min(min_abs, d);
        max_abs = std::max(max_abs, d);
        sum_abs += d;
        ++n;
    }
    if (n == 0) return nullptr;
    return {{"count", n}, {"min_abs", min_abs}, {"max_abs", max_abs}, {"mean_abs", sum_abs / n}};
}

int cmd_sweep(const SweepOptions& opt, const std::string& only_domain, const std::string& out_dir) {
    GridSpec grid = build_grid();
    if (!only_domain.empty()) {
        DomainLabel want;
        if (only_domain == "D1") want = DomainLabel::D1;
        else if (only_domain == "D2") want = DomainLabel::D2;
        else if (only_domain == "D3") want = DomainLabel::D3;
        else throw CLI::ValidationError("--only-domain", "expected D1, D2 or D3");
        std::erase_if(grid.nodes, [&](const GridNode& n) { return grid_group(n.domain) != want; });
    }
    const std::vector<SweepRecord> records = sweep(grid, opt);

    write_file(fs::path(out_dir) / "sweep.json", sweep_to_json(records).dump(2) + "\n");
    if (only_domain.empty()) {
        const auto [tj, td] = emit_tables(records);
        write_file(fs::path(out_dir) / "table1.csv", table_to_csv(tj));
        write_file(fs::path(out_dir) / "table2.csv", table_to_csv(td));
        json stats{{"schema", schema_version}};
        stats["delta"] = {{"D1", delta_summary(records, DomainLabel::D1)},
                          {"D2", delta_summary(records, DomainLabel::D2)},
                          {"D3", delta_summary(records, DomainLabel::D3)}};
        stats["amplitudes"] = {
            {"D1", amplitude_stats_to_json(amplitude_stats(records, DomainLabel::D1))},
            {"D3", amplitude_stats_to_json(amplitude_stats(records, DomainLabel::D3))}};
        write_file(fs::path(out_dir) / "stats.json", stats.dump(2) + "\n");
    }

    int failures = 0;
    for (const SweepRecord& r : records)
        if (r.failed) {
            ++failures;
            std::cerr << "node (i=" << r.i << ", j=" << r.j << ") failed: " << r.error << "\n";
        }
    std::cout << "sweep: " << records.size() - failures << "/" << records.size()
              << " nodes completed, output in " << out_dir << "\n";
    return failures == 0 ? 0 : 1;
}

int cmd_spectrum(bool whole_grid, double phi_w, double T, int n_eigs, const std::string& out_dir) {
    std::vector<LandscapePoint> points;
    if (whole_grid) {
        for (const GridNode& n : build_grid().nodes) points.emplace_back(n.phi_w, n.T);
    } else {
        points.emplace_back(phi_w, T);
    }
    json summary = json::array();
    std::string csv;
    for (const LandscapePoint& p : points) {
        const SpectrumReport rep = spectrum_report(p, n_eigs);
        summary.push_back(spectrum_report_to_json(rep));
        const std::string one = spectrum_to_csv(rep);
        csv += csv.empty() ? one : one.substr(one.find('\n') + 1);
        std::cout << "phi_w=" << rep.point.phi_w << " T=" << rep.point.T << " "
                  << to_string(rep.domain.label) << " -> " << to_string(rep.verdict) << "\n";
    }
    write_file(fs::path(out_dir) / "spectrum.json",
               json{{"schema", schema_version}, {"reports", summary}}.dump(2) + "\n");
    if (!csv.empty()) write_file(fs::path(out_dir) / "spectrum.csv", csv);
    return 0;
}

int cmd_landscape(double phi_w, double T, double nu, double step, const std::string& out_dir) {
    const LandscapeGrid g = two_segment_landscape(phi_w, T, nu, step);
    char name[96];
    std::snprintf(name, sizeof(name), "landscape_%.6f_%.6f.csv", phi_w, T);
    write_file(fs::path(out_dir) / name, landscape_to_csv(g));
    std::cout << "landscape: " << g.values.size() << "x" << g.values.size() << " grid -> " << name
              << "\n";
    return 0;
}

int cmd_mintime(double phi_w, const std::string& out_dir) {
    const MinTimeRecord rec = min_time_scan(phi_w);
    json o{{"schema", schema_version},
           {"phi_w", rec.phi_w},
           {"t_min", rec.t_min},
           {"achieved_j", rec.achieved_j}};
    write_file(fs::path(out_dir) / "mintime.json", o.dump(2) + "\n");
    std::cout << "T_min = " << format_double(rec.t_min) << " (J at f0 = "
              << format_double(rec.achieved_j) << ")\n";
    return 0;
}

int cmd_gradcheck(int samples, std::uint64_t seed) {
    CounterRng rng(seed);
    const GridSpec grid = build_grid();
    double worst = 0.0;
    std::string worst_where;
    for (int s = 0; s < samples; ++s) {
        const GridNode& n = grid.nodes[rng.below(grid.nodes.size())];
        std::vector<double> a(n.kseg);
        for (double& c : a) c = rng.uniform(-1.0, 1.0);
        const PiecewiseControl ctrl(a, GridSpec::dt);
        const Matrix2 w = make_phase_gate(n.phi_w);
        const auto ga = analytic_gradient(ctrl, w);
        const auto gf = finite_difference_gradient(ctrl, w, {}, 1e-6);
        double scale = 0.0;
        for (double g : gf) scale = std::max(scale, std::abs(g));
        scale = std::max(scale, 1e-8);
        for (std::size_t k = 0; k < ga.size(); ++k) {
            const double rel = std::abs(ga[k] - gf[k]) / scale;
            if (rel > worst) {
                worst = rel;
                worst_where = "node (i=" + std::to_string(n.i) + ", j=" + std::to_string(n.j)
                            + ") component " + std::to_string(k);
            }
        }
    }
    // zero-control critical point at every node
    double worst_zero = 0.0;
    for (const GridNode& n : grid.nodes) {
        const auto g =
            analytic_gradient(PiecewiseControl::zeros(n.kseg, GridSpec::dt), make_phase_gate(n.phi_w));
        for (double c : g) worst_zero = std::max(worst_zero, std::abs(c));
    }
    std::cout << "gradcheck: worst relative error " << format_double(worst) << " at " << worst_where
              << "; worst zero-control gradient " << format_double(worst_zero) << "\n";
    if (worst > 1e-6 || worst_zero > 1e-10) {
        std::cerr << "gradcheck: tolerance violated\n";
        return 2;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Control-landscape toolkit for ultrafast single-qubit phase-shift gates"};
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config", config_path, "key = value config file; flags override its values");

    std::string out_dir = default_out_dir();
    std::string methods_list = "grape,de,da";
    std::string only_domain;
    std::string phi_w_text, t_text;
    int runs = 2, n_eigs = 10, jobs = 1, samples = 100, grape_iters = 1000;
    std::uint64_t seed = 0;
    double nu = 50.0, amp = 1.0, step = 1.0, tolerance = 1e-12;
    long max_evals = 50000;
    bool whole_grid = false;

    auto* sweep_cmd = app.add_subcommand("sweep", "optimize the 110-node grid and emit tables");
    sweep_cmd->add_option("--methods", methods_list, "comma list of grape,de,da");
    sweep_cmd->add_option("--runs", runs, "runs per method per node")->check(CLI::PositiveNumber);
    sweep_cmd->add_option("--seed", seed, "master seed");
    sweep_cmd->add_option("--nu", nu, "DE/DA amplitude bound")->check(CLI::PositiveNumber);
    sweep_cmd->add_option("--init-amplitude", amp, "GRAPE initial-control range");
    sweep_cmd->add_option("--max-evals", max_evals, "objective-evaluation budget per DE/DA run");
    sweep_cmd->add_option("--grape-iters", grape_iters, "GRAPE iteration cap");
    sweep_cmd->add_option("--tolerance", tolerance, "stopping tolerance on objective improvement");
    sweep_cmd->add_option("--only-domain", only_domain, "restrict to D1, D2 or D3 nodes");
    sweep_cmd->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
    sweep_cmd->add_option("--out", out_dir, "output directory");

    auto* spectrum_cmd = app.add_subcommand("spectrum", "Hessian spectrum and classification at f0");
    spectrum_cmd->add_option("--phi-w", phi_w_text, "gate angle (radians or e.g. 3pi/5)");
    spectrum_cmd->add_option("--T", t_text, "final time (radians or e.g. pi/20)");
    spectrum_cmd->add_flag("--grid", whole_grid, "run every grid node");
    spectrum_cmd->add_option("--n-eigs", n_eigs, "negative-branch truncation")->check(CLI::PositiveNumber);
    spectrum_cmd->add_option("--out", out_dir, "output directory");

    auto* landscape_cmd = app.add_subcommand("landscape", "two-segment objective surface CSV");
    landscape_cmd->add_option("--phi-w", phi_w_text, "gate angle")->required();
    landscape_cmd->add_option("--T", t_text, "final time")->required();
    landscape_cmd->add_option("--nu", nu, "half-width of the amplitude box");
    landscape_cmd->add_option("--step", step, "grid step");
    landscape_cmd->add_option("--out", out_dir, "output directory");

    auto* mintime_cmd = app.add_subcommand("mintime", "minimal exact-generation time for phi_W");
    mintime_cmd->add_option("--phi-w", phi_w_text, "gate angle")->required();
    mintime_cmd->add_option("--out", out_dir, "output directory");

    auto* gradcheck_cmd = app.add_subcommand("gradcheck", "analytic vs finite-difference gradients");
    gradcheck_cmd->add_option("--samples", samples, "random (node, control) pairs");
    gradcheck_cmd->add_option("--seed", seed, "RNG seed");

    // config file defaults are applied before parsing so flags win
    for (int i = 1; i < argc - 1; ++i)
        if (std::string(argv[i]) == "--config") config_path = argv[i + 1];
    if (!config_path.empty()) {
        try {
            for (const auto& [key, value] : read_config_file(config_path)) {
                if (key == "out") out_dir = value;
                else if (key == "methods") methods_list = value;
                else if (key == "seed") seed = std::stoull(value);
                else if (key == "runs") runs = std::stoi(value);
                else if (key == "nu") nu = std::stod(value);
                else if (key == "max_evals") max_evals = std::stol(value);
                else if (key == "jobs") jobs = std::stoi(value);
                else if (key == "phi_w") phi_w_text = value;
                else if (key == "T") t_text = value;
                else throw CLI::ValidationError("--config", "unknown key: " + key);
            }
        } catch (const CLI::Error& e) {
            return app.exit(e);
        }
    }

    CLI11_PARSE(app, argc, argv);

    try {
        if (sweep_cmd->parsed()) {
            SweepOptions opt;
            opt.methods = parse_methods(methods_list);
            opt.runs_per_method = runs;
            opt.base_seed = seed;
            opt.jobs = jobs;
            opt.optimizer.bound = nu;
            opt.optimizer.init_amplitude = amp;
            opt.optimizer.max_evals = max_evals;
            opt.optimizer.grape_max_iters = grape_iters;
            opt.optimizer.tolerance = tolerance;
            return cmd_sweep(opt, only_domain, out_dir);
        }
        if (spectrum_cmd->parsed()) {
            if (!whole_grid && (phi_w_text.empty() || t_text.empty()))
                throw std::invalid_argument("spectrum: need --phi-w and --T, or --grid");
            const double pw = phi_w_text.empty() ? 0.0 : parse_angle(phi_w_text);
            const double tt = t_text.empty() ? 0.0 : parse_angle(t_text);
            return cmd_spectrum(whole_grid, pw, tt, n_eigs, out_dir);
        }
        if (landscape_cmd->parsed())
            return cmd_landscape(parse_angle(phi_w_text), parse_angle(t_text), nu, step, out_dir);
        if (mintime_cmd->parsed()) return cmd_mintime(parse_angle(phi_w_text), out_dir);
        if (gradcheck_cmd->parsed()) return cmd_gradcheck(samples, seed);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
