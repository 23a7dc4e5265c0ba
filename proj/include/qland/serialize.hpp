#pragma once

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "qland/experiments.hpp"
#include "qland/hessian.hpp"

namespace qland {

using json = nlohmann::ordered_json;

inline constexpr int schema_version = 1;

/// 17-significant-digit decimal; round-trips any binary64 exactly
inline std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

/// Parse an angle given either as decimal radians or as a fraction of pi
/// ("pi", "3pi/5", "pi/20", "0.25pi"). The fraction form avoids rounding
/// surprises at the domain boundaries.
inline double parse_angle(const std::string& text) {
    const auto p = text.find("pi");
    if (p == std::string::npos) {
        std::size_t used = 0;
        const double val = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument("bad angle: " + text);
        return val;
    }
    double numer = 1.0;
    if (p > 0) {
        const std::string head = text.substr(0, p);
        if (head == "-") numer = -1.0;
        else {
            std::size_t used = 0;
            numer = std::stod(head, &used);
            if (used != head.size()) throw std::invalid_argument("bad angle: " + text);
        }
    }
    double denom = 1.0;
    const std::string tail = text.substr(p + 2);
    if (!tail.empty()) {
        if (tail[0] != '/' || tail.size() < 2) throw std::invalid_argument("bad angle: " + text);
        std::size_t used = 0;
        denom = std::stod(tail.substr(1), &used);
        if (used != tail.size() - 1 || denom == 0.0)
            throw std::invalid_argument("bad angle: " + text);
    }
    return numer * pi / denom;
}

inline json matrix_to_json(const Matrix2& m) {
    json rows = json::array();
    for (std::size_t r = 0; r < 2; ++r)
        for (std::size_t c = 0; c < 2; ++c)
            rows.push_back({m(r, c).real(), m(r, c).imag()});
    return rows;
}

inline json run_result_to_json(const RunResult& r) {
    json trace = json::array();
    // downsample the improvement trace to <= 200 points
    const std::size_t stride = r.trace.size() <= 200 ? 1 : (r.trace.size() + 199) / 200;
    for (std::size_t k = 0; k < r.trace.size(); k += stride)
        trace.push_back({r.trace[k].first, r.trace[k].second});
    if (!r.trace.empty() && (r.trace.size() - 1) % stride != 0)
        trace.push_back({r.trace.back().first, r.trace.back().second});
    return {{"method", to_string(r.method)},
            {"seed", r.seed},
            {"best_j", r.best_j},
            {"control", r.best_control.amplitudes},
            {"dt", r.best_control.dt},
            {"evals", r.evals},
            {"converged", r.converged},
            {"trace", trace}};
}

inline json sweep_record_to_json(const SweepRecord& r) {
    json o{{"j", r.j},
           {"i", r.i},
           {"phi_w", r.phi_w},
           {"T", r.T},
           {"domain", to_string(r.domain)},
           {"j_hat", r.j_hat},
           {"j_zero", r.j_zero},
           {"delta", r.delta},
           {"best_control", r.best_control},
           {"method_of_best", to_string(r.method_of_best)},
           {"seeds", r.seeds}};
    if (r.failed) o["error"] = r.error;
    return o;
}

inline json sweep_to_json(const std::vector<SweepRecord>& records) {
    json arr = json::array();
    for (const SweepRecord& r : records) arr.push_back(sweep_record_to_json(r));
    return {{"schema", schema_version}, {"records", arr}};
}

inline json spectrum_report_to_json(const SpectrumReport& rep) {
    json eigs = json::array();
    for (std::size_t k = 0; k < rep.eigenpairs.size(); ++k) {
        const Eigenpair& ep = rep.eigenpairs[k];
        eigs.push_back({{"mu", ep.mu},
                        {"a", ep.a},
                        {"branch", to_string(ep.branch)},
                        {"hess_eig", rep.hessian_eigenvalues[k]},
                        {"coeffs", {ep.b, ep.c}}});
    }
    json o{{"schema", schema_version},
           {"phi_w", rep.point.phi_w},
           {"T", rep.point.T},
           {"v", rep.point.v},
           {"domain", to_string(rep.domain.label)},
           {"eigenvalues", eigs},
           {"verdict", to_string(rep.verdict)},
           {"n_requested", rep.n_requested}};
    if (!rep.domain.excluded_reason.empty()) o["excluded_reason"] = rep.domain.excluded_reason;
    return o;
}

inline json amplitude_stats_to_json(const AmplitudeStats& st) {
    return {{"count", st.count},
            {"min", st.min},
            {"max", st.max},
            {"min_abs", st.min_abs},
            {"mean_abs", st.mean_abs},
            {"cdf_signed", st.sorted_signed},
            {"cdf_abs", st.sorted_abs}};
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << content;
}

/// table1.csv / table2.csv: printed-table layout, header of phi indices,
/// rows T_10 .. T_1, 3-digit display rounding
inline std::string table_to_csv(const Table& t) {
    std::string out = "T";
    for (int j = 1; j <= 11; ++j) out += ",phi" + std::to_string(j);
    out += "\n";
    for (int row = 0; row < 10; ++row) {
        out += "T" + std::to_string(10 - row);
        for (int col = 0; col < 11; ++col) {
            char buf[16];
            std::snprintf(buf, sizeof(buf), "%.3f", round3(t[row][col]));
            out += std::string(",") + buf;
        }
        out += "\n";
    }
    return out;
}

/// landscape_<phiW>_<T>.csv: a1, a2, J triples at full precision
inline std::string landscape_to_csv(const LandscapeGrid& g) {
    std::string out = "a1,a2,J\n";
    for (std::size_t s = 0; s < g.values.size(); ++s)
        for (std::size_t q = 0; q < g.values[s].size(); ++q)
            out += format_double(g.a_at(s)) + "," + format_double(g.a_at(q)) + ","
                 + format_double(g.values[s][q]) + "\n";
    return out;
}

/// flat CSV export of a spectrum report, one row per eigenpair
inline std::string spectrum_to_csv(const SpectrumReport& rep) {
    std::string out = "phi_w,T,domain,branch,a,mu,hess_eig,verdict\n";
    for (std::size_t k = 0; k < rep.eigenpairs.size(); ++k) {
        const Eigenpair& ep = rep.eigenpairs[k];
        out += format_double(rep.point.phi_w) + "," + format_double(rep.point.T) + ","
             + to_string(rep.domain.label) + "," + to_string(ep.branch) + ","
             + format_double(ep.a) + "," + format_double(ep.mu) + ","
             + format_double(rep.hessian_eigenvalues[k]) + "," + to_string(rep.verdict) + "\n";
    }
    return out;
}

} // namespace qland
