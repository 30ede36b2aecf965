#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <string>
#include <vector>

#include "harmdual/duality.hpp"
#include "harmdual/errors.hpp"
#include "harmdual/model.hpp"
#include "harmdual/modes.hpp"
#include "harmdual/rdm.hpp"
#include "harmdual/spectra.hpp"
#include "harmdual/wavefunction.hpp"

namespace harmdual {

using json = nlohmann::ordered_json;

/// Shortest-round-trip float printing for tabular output (17 significant
/// digits re-parse to the identical double).
inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// ---------------------------------------------------------------------------
// JSON emitters

inline json to_json(const Eigen::VectorXd& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

inline json to_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline json to_json(const NormalModes& m) {
    return json{{"rotation", to_json(m.rotation)},
                {"eigvals", to_json(m.eigvals)},
                {"lengths", to_json(m.lengths)}};
}

inline json to_json(const InteractionMatrix& D) {
    json p = json::object();
    for (const auto& [k, v] : D.params) p[k] = v;
    return json{{"family", family_name(D.family)},
                {"n", D.n()},
                {"params", std::move(p)},
                {"entries", to_json(D.entries)}};
}

inline json to_json(const Spectrum& s) {
    json src{{"model", s.source.model},
             {"state", s.source.state},
             {"subset", s.source.subset},
             {"grid", s.source.grid}};
    return json{{"lambda", s.values},
                {"trace_deficit", s.trace_deficit},
                {"source", std::move(src)}};
}

inline json to_json(const DualityReport& r, bool inline_spectra = true) {
    json j{{"context", r.context},
           {"tolerance", r.tolerance},
           {"max_abs_diff", r.max_abs_diff},
           {"passed", r.passed},
           {"model_a", r.model_a},
           {"model_b", r.model_b}};
    if (inline_spectra) {
        j["spectrum_a"] = to_json(r.spectrum_a);
        j["spectrum_b"] = to_json(r.spectrum_b);
    }
    return j;
}

// ---------------------------------------------------------------------------
// JSON parsers

inline Eigen::MatrixXd matrix_from_json(const json& j) {
    if (!j.is_array() || j.empty() || !j[0].is_array())
        throw validation_error("config: matrix entries must be a list of rows");
    const Eigen::Index rows = Eigen::Index(j.size());
    const Eigen::Index cols = Eigen::Index(j[0].size());
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        if (Eigen::Index(j[i].size()) != cols)
            throw validation_error("config: ragged matrix rows");
        for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = j[i][c].get<double>();
    }
    return m;
}

inline InteractionMatrix model_from_json(const json& j) {
    if (!j.is_object() || !j.contains("family"))
        throw validation_error("config: model needs a \"family\" field");
    const std::string family = j["family"].get<std::string>();
    auto param = [&](const char* name) {
        if (!j.contains("params") || !j["params"].contains(name))
            throw validation_error(std::string("config: model params missing \"") + name +
                                   "\"");
        return j["params"][name].get<double>();
    };
    if (family == "identical_1d")
        return build_identical_1d(param("d1"), param("d2"), j.at("n").get<int>());
    if (family == "moshinsky")
        return build_moshinsky(param("omega"), param("coupling"), j.at("n").get<int>());
    if (family == "chain")
        return build_chain_1d(param("spring"), param("trap"), j.at("n").get<int>());
    if (family == "generic") return build_generic(matrix_from_json(j.at("entries")));
    throw validation_error("config: unknown model family \"" + family + "\"");
}

/// State template: {"terms":[{"re":..,"im":..,"nu":[..]}]} or the shorthand
/// {"nu":[..]}; absent state means the ground template.
inline StateTemplate state_template_from_json(const json& j, int n) {
    if (j.is_null()) return ground_template(n);
    StateTemplate t;
    auto term_from = [](const json& tj) {
        StateSpec::Term term;
        double re = tj.value("re", 1.0), im = tj.value("im", 0.0);
        term.c = {re, im};
        if (!tj.contains("nu") || !tj["nu"].is_array())
            throw validation_error("config: state term needs an occupation list \"nu\"");
        for (const auto& v : tj["nu"]) term.nu.push_back(v.get<int>());
        return term;
    };
    if (j.contains("terms")) {
        for (const auto& tj : j["terms"]) t.push_back(term_from(tj));
    } else if (j.contains("nu")) {
        t.push_back(term_from(j));
    } else {
        throw validation_error("config: state needs \"terms\" or \"nu\"");
    }
    return t;
}

/// Subsets are 1-based in configs; internally 0-based. Accepts a list of
/// lists or the string "all_of_size_M".
inline std::vector<SubsetSpec> subsets_from_json(const json& j, Eigen::Index N) {
    std::vector<SubsetSpec> out;
    if (j.is_null()) {
        out.push_back(make_subset({0}, N));
        return out;
    }
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        const std::string prefix = "all_of_size_";
        if (s.rfind(prefix, 0) != 0)
            throw validation_error("config: unknown subsets keyword \"" + s + "\"");
        const int M = std::stoi(s.substr(prefix.size()));
        if (M < 1 || Eigen::Index(M) >= N)
            throw validation_error("config: subset size out of range");
        std::vector<int> pick(M);
        for (int i = 0; i < M; ++i) pick[i] = i;
        while (true) { // lexicographic combinations
            out.push_back(make_subset(pick, N));
            int i = M - 1;
            while (i >= 0 && pick[i] == int(N) - M + i) --i;
            if (i < 0) break;
            ++pick[i];
            for (int k = i + 1; k < M; ++k) pick[k] = pick[k - 1] + 1;
        }
        return out;
    }
    if (!j.is_array() || j.empty())
        throw validation_error("config: subsets must be a non-empty list");
    for (const auto& lj : j) {
        std::vector<int> kept;
        for (const auto& v : lj) kept.push_back(v.get<int>() - 1);
        out.push_back(make_subset(std::move(kept), N));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Run configuration

struct RunConfig {
    InteractionMatrix model;
    bool has_model = false;
    StateTemplate state;
    std::vector<SubsetSpec> subsets;
    GridConfig grid;
    double tol = 1e-8;
    std::vector<double> q_list;                  ///< q = 1 means von Neumann
    std::vector<std::vector<double>> delta_grid; ///< evenness
    double c = 1.0;                              ///< homogeneity factor
    int B = 24;                                  ///< Hermite basis size
    std::vector<std::string> checks;             ///< duality sub-checks
    std::vector<double> r_values;                ///< sweep coupling ratios
    int sweep_n = 2;
    std::string dump_kernel_path;                ///< optional binary kernel dump
};

inline RunConfig parse_run_config(const json& j) {
    if (!j.is_object()) throw validation_error("config: top level must be an object");
    RunConfig cfg;
    if (j.contains("model")) {
        cfg.model = model_from_json(j["model"]);
        cfg.has_model = true;
    }
    const int n = cfg.has_model ? int(cfg.model.n()) : j.value("n", 2);
    cfg.state = state_template_from_json(j.contains("state") ? j["state"] : json(nullptr), n);
    cfg.subsets =
        subsets_from_json(j.contains("subsets") ? j["subsets"] : json(nullptr), n);

    if (j.contains("grid")) {
        const json& g = j["grid"];
        cfg.grid.G = g.value("G", 64);
        if (g.contains("scale") && !g["scale"].is_string())
            cfg.grid.scale = g["scale"].get<double>(); // "auto" keeps it empty
        if (g.contains("quad_tol")) cfg.grid.quad_tol = g["quad_tol"].get<double>();
    }
    if (j.contains("k_max")) cfg.grid.k_max = j["k_max"].get<int>();
    if (j.contains("tol")) cfg.tol = j["tol"].get<double>();
    else if (j.contains("tolerance")) cfg.tol = j["tolerance"].get<double>();
    else if (j.contains("tolerances") && j["tolerances"].contains("duality"))
        cfg.tol = j["tolerances"]["duality"].get<double>();

    if (j.contains("q_list"))
        for (const auto& q : j["q_list"]) cfg.q_list.push_back(q.get<double>());
    if (j.contains("delta_grid"))
        for (const auto& dj : j["delta_grid"]) {
            std::vector<double> dv;
            if (dj.is_array())
                for (const auto& v : dj) dv.push_back(v.get<double>());
            else dv.push_back(dj.get<double>());
            cfg.delta_grid.push_back(std::move(dv));
        }
    if (j.contains("c")) cfg.c = j["c"].get<double>();
    if (j.contains("B")) cfg.B = j["B"].get<int>();
    if (j.contains("checks"))
        for (const auto& s : j["checks"]) cfg.checks.push_back(s.get<std::string>());
    if (j.contains("sweep")) {
        const json& s = j["sweep"];
        if (s.contains("r_values"))
            for (const auto& r : s["r_values"]) cfg.r_values.push_back(r.get<double>());
        cfg.sweep_n = s.value("n", 2);
    }
    if (j.contains("dump_kernel")) cfg.dump_kernel_path = j["dump_kernel"].get<std::string>();
    return cfg;
}

inline RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw validation_error("config: cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw validation_error(std::string("config: JSON parse error: ") + e.what());
    }
    return parse_run_config(j);
}

// ---------------------------------------------------------------------------
// Kernel dump: one JSON header line, then the row-major little-endian
// float64 payload (re,im interleaved when complex).

inline void dump_kernel(const KernelMatrix& k, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw validation_error("dump_kernel: cannot open " + path);
    json header{{"dim", k.dim}, {"G", k.G}, {"M", k.M}, {"scale", k.scale},
                {"complex", !k.is_real}};
    out << header.dump() << "\n";
    auto put = [&](double v) {
        static_assert(sizeof(double) == 8);
        out.write(reinterpret_cast<const char*>(&v), 8); // LE on every target here
    };
    for (Eigen::Index i = 0; i < k.dim; ++i)
        for (Eigen::Index j = 0; j < k.dim; ++j) {
            if (k.is_real) {
                put(k.K_real(i, j));
            } else {
                put(k.K_cplx(i, j).real());
                put(k.K_cplx(i, j).imag());
            }
        }
}

// ---------------------------------------------------------------------------
// CSV emitters

inline std::string spectrum_csv(const Spectrum& s) {
    std::string out = "k,lambda\n";
    for (std::size_t k = 0; k < s.values.size(); ++k)
        out += std::to_string(k) + "," + fmt17(s.values[k]) + "\n";
    return out;
}

inline std::string entropy_csv(const std::vector<std::pair<std::string, double>>& rows) {
    std::string out = "q,entropy\n";
    for (const auto& [q, v] : rows) out += q + "," + fmt17(v) + "\n";
    return out;
}

inline std::string reports_csv(const std::vector<DualityReport>& reports) {
    std::string out = "context,model_a,model_b,max_abs_diff,tolerance,passed\n";
    for (const auto& r : reports)
        out += r.context + "," + r.model_a + "," + r.model_b + "," +
               fmt17(r.max_abs_diff) + "," + fmt17(r.tolerance) + "," +
               (r.passed ? "true" : "false") + "\n";
    return out;
}

} // namespace harmdual
