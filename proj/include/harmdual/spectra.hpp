#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "harmdual/errors.hpp"
#include "harmdual/rdm.hpp"

namespace harmdual {

/// Values below this are truncated from reports (kept in trace accounting).
inline constexpr double spectrum_report_floor = 1e-14;
/// Quadrature-noise negativity allowance; anything below is an assembly bug.
inline constexpr double spectrum_clamp_floor = -1e-10;

/// Provenance carried along with a spectrum for reports.
struct SpectrumSource {
    std::string model;
    std::string state;
    std::string subset;
    std::string grid;
};

/// Descending occupation spectrum of one reduced density operator.
struct Spectrum {
    std::vector<double> values;  ///< descending, >= 0, above the report floor
    double trace_deficit = 0.0;  ///< trace_estimate - sum(values)
    double clamp_magnitude = 0.0;///< largest negativity clamped to 0
    SpectrumSource source;
};

/// Top-k_max eigenvalues of the kernel, descending, with noise clamped at 0.
/// Negativity beyond the clamp floor aborts: the assembly guarantees PSD up
/// to rounding, so a genuinely negative eigenvalue means a broken kernel.
inline Spectrum eigenvalues(const KernelMatrix& kernel, int k_max) {
    if (k_max < 1) throw validation_error("eigenvalues: k_max must be >= 1");
    Eigen::VectorXd ev;
    if (kernel.is_real) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(kernel.K_real,
                                                          Eigen::EigenvaluesOnly);
        if (es.info() != Eigen::Success)
            throw numeric_error("eigenvalues: eigensolver failed to converge");
        ev = es.eigenvalues();
    } else {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(kernel.K_cplx,
                                                           Eigen::EigenvaluesOnly);
        if (es.info() != Eigen::Success)
            throw numeric_error("eigenvalues: eigensolver failed to converge");
        ev = es.eigenvalues();
    }
    Spectrum s;
    double minval = ev.minCoeff();
    if (minval < spectrum_clamp_floor)
        throw numeric_error("eigenvalues: kernel negativity " + std::to_string(minval) +
                            " exceeds the quadrature-noise floor");
    s.clamp_magnitude = std::max(0.0, -minval);

    std::vector<double> vals(ev.data(), ev.data() + ev.size());
    std::sort(vals.begin(), vals.end(), std::greater<double>());
    double reported = 0.0;
    for (int k = 0; k < int(vals.size()) && k < k_max; ++k) {
        double v = std::max(vals[k], 0.0);
        if (v < spectrum_report_floor) break;
        s.values.push_back(v);
        reported += v;
    }
    s.trace_deficit = kernel.trace_estimate - reported;
    return s;
}

struct EntropyResult {
    double value = 0.0;
    /// For q < 1: set when the truncated tail could contribute >= 1e-10
    /// (single-lump bound trace_deficit^q on the unreported weight).
    bool tail_flagged = false;
};

/// Renyi entropy S_q = ln(sum lambda^q) / (1 - q) for q > 0, q != 1.
inline EntropyResult renyi_entropy(const Spectrum& spec, double q) {
    if (!(q > 0.0)) throw validation_error("renyi_entropy: q must be > 0");
    if (q == 1.0)
        throw validation_error("renyi_entropy: q = 1 is the von Neumann entropy; "
                               "call von_neumann_entropy");
    double acc = 0.0;
    for (double v : spec.values) acc += std::pow(v, q);
    EntropyResult r;
    r.value = std::log(acc) / (1.0 - q);
    if (q < 1.0) {
        double tail = std::max(spec.trace_deficit, 0.0);
        r.tail_flagged = std::pow(tail, q) >= 1e-10;
    }
    return r;
}

/// Von Neumann entropy -sum lambda ln lambda (0 ln 0 := 0).
inline double von_neumann_entropy(const Spectrum& spec) {
    double acc = 0.0;
    for (double v : spec.values)
        if (v > 0.0) acc -= v * std::log(v);
    return acc;
}

} // namespace harmdual
