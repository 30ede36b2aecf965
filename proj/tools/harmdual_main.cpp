// Command-line front end: model ingestion, spectrum/entropy runs, duality
// verification batches, and coupling-ratio sweeps. Configs are JSON; reports
// are JSON or CSV. Exit codes: 0 success / all checks passed, 1 a duality
// check failed, 2 invalid configuration, 3 numerical failure, 4 unresolved
// quadrature grid.

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <harmdual/harmdual.hpp>

namespace hd = harmdual;
using hd::json;

namespace {

struct CommonOpts {
    std::string config_path;
    std::string out_path;
    std::string format; // empty = per-command default
    bool no_timestamp = false;
    int threads = 0; // 0 = env / default
};

void add_common(CLI::App* sub, CommonOpts& o) {
    sub->add_option("--config", o.config_path, "JSON run configuration")->required();
    sub->add_option("--out", o.out_path, "output path (default: stdout)");
    sub->add_option("--format", o.format, "output format")
        ->check(CLI::IsMember({"json", "csv"}));
    sub->add_flag("--no-timestamp", o.no_timestamp, "omit the timestamp field");
    sub->add_option("--threads", o.threads,
                    "worker threads (fallback: RDM_DUALITY_THREADS, then 1)");
}

int resolve_threads(int flag) {
    if (flag > 0) return flag;
    if (const char* env = std::getenv("RDM_DUALITY_THREADS")) {
        int v = std::atoi(env);
        if (v > 0) return v;
    }
    return 1;
}

std::string iso_timestamp() {
    std::time_t t = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

void emit(const std::string& out_path, const std::string& text) {
    if (out_path.empty()) {
        std::fwrite(text.data(), 1, text.size(), stdout);
        return;
    }
    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw hd::validation_error("cannot open output path " + out_path);
    f << text;
}

std::string json_text(json j, const CommonOpts& o) {
    if (!o.no_timestamp) j["timestamp"] = iso_timestamp();
    return j.dump(2) + "\n";
}

std::string trim_num(double v) {
    std::string s = std::to_string(v);
    s.erase(s.find_last_not_of('0') + 1);
    if (!s.empty() && s.back() == '.') s.pop_back();
    return s;
}

void require_model(const hd::RunConfig& cfg) {
    if (!cfg.has_model) throw hd::validation_error("config: a \"model\" entry is required");
}

std::vector<double> default_qs(const std::vector<double>& q_list) {
    return q_list.empty() ? std::vector<double>{0.5, 2.0, 3.0} : q_list;
}

json entropy_json(const hd::Spectrum& sp, const std::vector<double>& qs) {
    json renyi = json::object();
    for (double q : qs) {
        if (q == 1.0) continue; // covered by the von Neumann entry
        hd::EntropyResult er = hd::renyi_entropy(sp, q);
        renyi[trim_num(q)] = json{{"value", er.value}, {"tail_flagged", er.tail_flagged}};
    }
    return json{{"renyi", std::move(renyi)},
                {"von_neumann", hd::von_neumann_entropy(sp)}};
}

// --- modes -----------------------------------------------------------------

int run_modes(const hd::RunConfig& cfg, const CommonOpts& o, const std::string& fmt) {
    require_model(cfg);
    hd::NormalModes m = hd::diagonalize(cfg.model);
    hd::DeltaCoordinates dc = hd::delta_coordinates(m.lengths);
    if (fmt == "csv") {
        std::string out = "mu,eigval,length,dual_length,delta\n";
        for (Eigen::Index i = 0; i < m.n(); ++i) {
            out += std::to_string(i + 1) + "," + hd::fmt17(m.eigvals[i]) + "," +
                   hd::fmt17(m.lengths[i]) + "," + hd::fmt17(m.dual_lengths[i]) + ",";
            if (i + 1 < m.n()) out += hd::fmt17(dc.deltas[std::size_t(i)]);
            out += "\n";
        }
        emit(o.out_path, out);
        return 0;
    }
    json j{{"model", hd::to_json(cfg.model)},
           {"modes", hd::to_json(m)},
           {"dual_lengths", hd::to_json(m.dual_lengths)},
           {"deltas", dc.deltas}};
    emit(o.out_path, json_text(std::move(j), o));
    return 0;
}

// --- spectrum / entropy ----------------------------------------------------

int run_spectrum(const hd::RunConfig& cfg, const CommonOpts& o, const std::string& fmt,
                 bool entropy_only) {
    require_model(cfg);
    hd::require_valid(cfg.model);
    hd::NormalModes modes = hd::diagonalize(cfg.model);
    hd::StateSpec st = hd::make_state(modes, cfg.state);
    double s = hd::detail::resolve_scale(cfg.grid, {&modes.lengths});
    hd::QuadratureGrid grid = hd::build_grid(cfg.grid.G, s);
    hd::KernelOptions ko = hd::detail::kernel_options(cfg.grid);
    std::vector<double> qs = default_qs(cfg.q_list);

    json spectra = json::array();
    std::vector<hd::Spectrum> specs;
    for (std::size_t i = 0; i < cfg.subsets.size(); ++i) {
        hd::KernelMatrix k = hd::rdm_kernel(st, cfg.subsets[i], grid, ko);
        if (i == 0 && !cfg.dump_kernel_path.empty())
            hd::dump_kernel(k, cfg.dump_kernel_path);
        hd::Spectrum sp = hd::eigenvalues(k, cfg.grid.k_max);
        sp.source = hd::detail::source_info(cfg.model, cfg.state, cfg.subsets[i], grid);
        json entry = entropy_only
                         ? json{{"subset", sp.source.subset},
                                {"entropies", entropy_json(sp, qs)}}
                         : json{{"spectrum", hd::to_json(sp)},
                                {"entropies", entropy_json(sp, qs)}};
        spectra.push_back(std::move(entry));
        specs.push_back(std::move(sp));
    }

    if (fmt == "csv") {
        std::string out;
        if (entropy_only) {
            std::vector<std::pair<std::string, double>> rows;
            for (double q : qs)
                if (q != 1.0)
                    rows.emplace_back(trim_num(q), hd::renyi_entropy(specs[0], q).value);
            rows.emplace_back("von_neumann", hd::von_neumann_entropy(specs[0]));
            out = hd::entropy_csv(rows);
        } else if (specs.size() == 1) {
            out = hd::spectrum_csv(specs[0]);
        } else {
            out = "subset,k,lambda\n";
            for (const auto& sp : specs)
                for (std::size_t k = 0; k < sp.values.size(); ++k)
                    out += sp.source.subset + "," + std::to_string(k) + "," +
                           hd::fmt17(sp.values[k]) + "\n";
        }
        emit(o.out_path, out);
        return 0;
    }
    json j{{entropy_only ? "entropies" : "spectra", std::move(spectra)}};
    emit(o.out_path, json_text(std::move(j), o));
    return 0;
}

// --- duality ---------------------------------------------------------------

int run_duality(const hd::RunConfig& cfg, const CommonOpts& o, const std::string& fmt) {
    require_model(cfg);
    std::vector<std::string> checks =
        cfg.checks.empty() ? std::vector<std::string>{"spectral"} : cfg.checks;
    std::vector<hd::DualityReport> reports;
    for (const auto& m : cfg.subsets) {
        for (const auto& check : checks) {
            if (check == "spectral") {
                reports.push_back(
                    hd::verify_spectrum_duality(cfg.model, cfg.state, m, cfg.grid, cfg.tol));
            } else if (check == "fourier") {
                reports.push_back(hd::verify_fourier_conjugation(cfg.model, cfg.state, m,
                                                                 cfg.B, cfg.grid, cfg.tol));
            } else if (check == "evenness") {
                if (cfg.delta_grid.empty())
                    throw hd::validation_error(
                        "config: evenness check needs a \"delta_grid\"");
                std::vector<hd::DualityReport> batch;
                if (cfg.model.family == hd::ModelFamily::identical_1d ||
                    cfg.model.family == hd::ModelFamily::moshinsky) {
                    std::vector<double> deltas;
                    for (const auto& dv : cfg.delta_grid) deltas.push_back(dv.at(0));
                    batch = hd::verify_evenness_identical(int(cfg.model.n()), deltas,
                                                          cfg.state, m, cfg.grid, cfg.tol);
                } else {
                    batch = hd::verify_evenness_diag(cfg.delta_grid, cfg.state, m, cfg.grid,
                                                     cfg.tol);
                }
                reports.insert(reports.end(), batch.begin(), batch.end());
            } else if (check == "homogeneity") {
                reports.push_back(
                    hd::verify_homogeneity(cfg.model, cfg.c, cfg.state, m, cfg.grid, cfg.tol));
            } else if (check == "entropy") {
                auto batch = hd::verify_entropy_duality(cfg.model, default_qs(cfg.q_list),
                                                        cfg.state, m, cfg.grid, cfg.tol);
                reports.insert(reports.end(), batch.begin(), batch.end());
            } else {
                throw hd::validation_error("config: unknown duality check \"" + check + "\"");
            }
        }
    }
    bool all_passed = true;
    for (const auto& r : reports) all_passed = all_passed && r.passed;

    if (fmt == "csv") {
        emit(o.out_path, hd::reports_csv(reports));
    } else {
        json arr = json::array();
        for (const auto& r : reports) arr.push_back(hd::to_json(r));
        json j{{"all_passed", all_passed}, {"reports", std::move(arr)}};
        emit(o.out_path, json_text(std::move(j), o));
    }
    return all_passed ? 0 : 1;
}

// --- sweep -------------------------------------------------------------------

int run_sweep(const hd::RunConfig& cfg, const CommonOpts& o, const std::string& fmt) {
    if (cfg.r_values.empty())
        throw hd::validation_error("config: sweep needs \"sweep\": {\"r_values\": [...]}");
    const int n = cfg.sweep_n;
    if (n < 2) throw hd::validation_error("config: sweep n must be >= 2");
    std::vector<double> qs = cfg.q_list.empty() ? std::vector<double>{2.0} : cfg.q_list;
    const int k_cols = cfg.grid.k_max;

    hd::StateTemplate tmpl = (cfg.state.size() >= 1 &&
                              Eigen::Index(cfg.state[0].nu.size()) == Eigen::Index(n))
                                 ? cfg.state
                                 : hd::ground_template(n);
    hd::SubsetSpec subset = (cfg.subsets[0].kept.back() < n)
                                ? cfg.subsets[0]
                                : hd::make_subset({0}, n);
    hd::GridConfig row_grid = cfg.grid;
    const int row_threads = std::max(1, cfg.grid.threads);
    row_grid.threads = 1; // rows parallelize; each row stays single-threaded

    struct Row {
        json j;
        std::string csv;
    };
    std::vector<Row> rows(cfg.r_values.size());
    auto make_row = [&](std::size_t i) {
        const double r = cfg.r_values[i];
        json j{{"r", r}};
        std::string csv = hd::fmt17(r);
        if (!(1.0 + n * r > 0.0)) { // outside the PD domain: warning row
            j["status"] = "skipped: outside PD domain";
            csv += ",nan";
            for (int k = 0; k <= k_cols; ++k) csv += ",nan";
            for (std::size_t qi = 0; qi < qs.size(); ++qi) csv += ",nan";
            csv += ",nan,skipped: outside PD domain\n";
            rows[i] = {std::move(j), std::move(csv)};
            return;
        }
        const double rstar = hd::dual_ratio(r, n);
        hd::InteractionMatrix model = hd::build_identical_1d(1.0, r, n);
        hd::DualityReport rep =
            hd::verify_spectrum_duality(model, tmpl, subset, row_grid, cfg.tol);
        j["r_star"] = rstar;
        csv += "," + hd::fmt17(rstar);
        json lam = json::array();
        for (int k = 0; k <= k_cols; ++k) {
            double v = std::size_t(k) < rep.spectrum_a.values.size()
                           ? rep.spectrum_a.values[std::size_t(k)]
                           : 0.0;
            lam.push_back(v);
            csv += "," + hd::fmt17(v);
        }
        j["lambda"] = std::move(lam);
        json ent = json::object();
        for (double q : qs) {
            double v = q == 1.0 ? hd::von_neumann_entropy(rep.spectrum_a)
                                : hd::renyi_entropy(rep.spectrum_a, q).value;
            ent[trim_num(q)] = v;
            csv += "," + hd::fmt17(v);
        }
        j["entropy"] = std::move(ent);
        j["duality_residual"] = rep.max_abs_diff;
        j["status"] = "ok";
        csv += "," + hd::fmt17(rep.max_abs_diff) + ",ok\n";
        rows[i] = {std::move(j), std::move(csv)};
    };
    hd::detail::run_blocks(Eigen::Index(cfg.r_values.size()), row_threads,
                           [&](Eigen::Index lo, Eigen::Index hi) {
                               for (Eigen::Index i = lo; i < hi; ++i)
                                   make_row(std::size_t(i));
                           });

    if (fmt == "csv") {
        std::string out = "r,r_star";
        for (int k = 0; k <= k_cols; ++k) out += ",lambda_" + std::to_string(k);
        for (double q : qs) out += ",S_" + (q == 1.0 ? "vn" : trim_num(q));
        out += ",duality_residual,status\n";
        for (const auto& row : rows) out += row.csv;
        emit(o.out_path, out);
    } else {
        json arr = json::array();
        for (auto& row : rows) arr.push_back(std::move(row.j));
        json j{{"rows", std::move(arr)}};
        emit(o.out_path, json_text(std::move(j), o));
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"reduced density operators of coupled harmonic models: spectra, "
                 "entropies, and length-scale duality checks"};
    app.require_subcommand(1);
    CommonOpts o;
    CLI::App* modes_cmd = app.add_subcommand("modes", "normal-mode report");
    CLI::App* spectrum_cmd =
        app.add_subcommand("spectrum", "occupation spectrum and entropies");
    CLI::App* duality_cmd = app.add_subcommand("duality", "duality verification batch");
    CLI::App* sweep_cmd = app.add_subcommand("sweep", "coupling-ratio sweep table");
    CLI::App* entropy_cmd = app.add_subcommand("entropy", "entropy-only spectrum run");
    for (CLI::App* sub : {modes_cmd, spectrum_cmd, duality_cmd, sweep_cmd, entropy_cmd})
        add_common(sub, o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        hd::RunConfig cfg = hd::load_run_config(o.config_path);
        cfg.grid.threads = resolve_threads(o.threads);
        const std::string fmt =
            !o.format.empty() ? o.format : (sweep_cmd->parsed() ? "csv" : "json");
        if (modes_cmd->parsed()) return run_modes(cfg, o, fmt);
        if (spectrum_cmd->parsed()) return run_spectrum(cfg, o, fmt, false);
        if (entropy_cmd->parsed()) return run_spectrum(cfg, o, fmt, true);
        if (duality_cmd->parsed()) return run_duality(cfg, o, fmt);
        if (sweep_cmd->parsed()) return run_sweep(cfg, o, fmt);
        return 2;
    } catch (const hd::validation_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const hd::grid_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const hd::numeric_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
