#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "harmdual/errors.hpp"
#include "harmdual/modes.hpp"
#include "harmdual/quadrature.hpp"

namespace harmdual {

/// Cap on the total oscillator degree of any state.
inline constexpr int max_degree = 60;

/// Physicists' Hermite polynomial H_nu(z) by the three-term recurrence
/// H_{k+1} = 2 z H_k - 2 k H_{k-1}. Raw values grow fast; overflow is an
/// error, never a silent infinity.
inline double hermite_eval(int nu, double z) {
    if (nu < 0) throw validation_error("hermite_eval: negative degree");
    if (nu > max_degree)
        throw validation_error("hermite_eval: degree exceeds cap " +
                               std::to_string(max_degree));
    double hm = 1.0, h = 2.0 * z;
    if (nu == 0) return 1.0;
    for (int k = 1; k < nu; ++k) {
        double next = 2.0 * z * h - 2.0 * k * hm;
        hm = h;
        h = next;
    }
    if (!std::isfinite(h))
        throw numeric_error("hermite_eval: overflow at degree " + std::to_string(nu));
    return h;
}

namespace detail {

/// Normalized Hermite function h_nu(z) = (2^nu nu! sqrt(pi))^{-1/2} H_nu(z) e^{-z^2/2}
/// via the magnitude-stable recurrence
///   h_{k+1} = z sqrt(2/(k+1)) h_k - sqrt(k/(k+1)) h_{k-1},  h_0 = pi^{-1/4} e^{-z^2/2}.
/// Values stay O(1) for all z and nu, so no log-space bookkeeping is needed;
/// this is equivalent to the log-space normalization prefactor route.
inline double hermite_function(int nu, double z) {
    double hm = 0.0;
    double h = std::exp(-0.5 * z * z) * 0.7511255444649425; // pi^{-1/4}
    for (int k = 0; k < nu; ++k) {
        double next = z * std::sqrt(2.0 / (k + 1)) * h - std::sqrt(double(k) / (k + 1)) * hm;
        hm = h;
        h = next;
    }
    return h;
}

} // namespace detail

/// Oscillator eigenfunction of one mode with length scale ell:
/// phi_ell^nu(y) = pi^{-1/4} ell^{-1/2} (2^nu nu!)^{-1/2} H_nu(y/ell) e^{-y^2/(2 ell^2)}.
/// L2-normalized for every (nu, ell).
inline double phi(int nu, double ell, double y) {
    if (nu < 0 || nu > max_degree)
        throw validation_error("phi: degree out of range [0, " +
                               std::to_string(max_degree) + "]");
    if (!(ell > 0.0)) throw validation_error("phi: length scale must be > 0");
    return detail::hermite_function(nu, y / ell) / std::sqrt(ell);
}

/// A normalized superposition sum_nu c_nu Psi^(nu) over product eigenstates
/// of one harmonic model. Immutable after construction.
struct StateSpec {
    struct Term {
        std::complex<double> c;
        std::vector<int> nu; ///< one occupation per mode
    };
    NormalModes modes;
    std::vector<Term> terms;

    Eigen::Index n() const { return modes.n(); }

    bool is_real() const {
        for (const auto& t : terms)
            if (t.c.imag() != 0.0) return false;
        return true;
    }
};

/// Validate and freeze a state. Coefficients must be normalized
/// (sum |c|^2 = 1 within 1e-12) and occupation vectors pairwise distinct.
inline StateSpec make_state(NormalModes modes, std::vector<StateSpec::Term> terms) {
    if (terms.empty()) throw validation_error("state: needs at least one term");
    const Eigen::Index n = modes.n();
    double norm2 = 0.0;
    for (const auto& t : terms) {
        if (Eigen::Index(t.nu.size()) != n)
            throw validation_error("state: occupation length must equal the mode count");
        int total = 0;
        for (int v : t.nu) {
            if (v < 0) throw validation_error("state: occupations must be >= 0");
            total += v;
        }
        if (total > max_degree)
            throw validation_error("state: total degree exceeds cap " +
                                   std::to_string(max_degree));
        norm2 += std::norm(t.c);
    }
    for (std::size_t i = 0; i < terms.size(); ++i)
        for (std::size_t j = i + 1; j < terms.size(); ++j)
            if (terms[i].nu == terms[j].nu)
                throw validation_error("state: occupation vectors must be distinct");
    if (std::abs(norm2 - 1.0) > 1e-12)
        throw validation_error("state: coefficients not normalized (sum |c|^2 = " +
                               std::to_string(norm2) + ")");
    StateSpec s;
    s.modes = std::move(modes);
    s.terms = std::move(terms);
    return s;
}

inline StateSpec ground_state(NormalModes modes) {
    std::vector<int> zeros(modes.n(), 0);
    return make_state(std::move(modes), {{1.0, zeros}});
}

inline StateSpec single_term_state(NormalModes modes, std::vector<int> nu) {
    return make_state(std::move(modes), {{1.0, std::move(nu)}});
}

/// Evaluate the state at mode coordinates y = R x (the inner loop of kernel
/// assembly, which precomputes y itself).
inline std::complex<double> psi_modes(const StateSpec& s, const Eigen::VectorXd& y) {
    std::complex<double> acc(0.0, 0.0);
    for (const auto& t : s.terms) {
        double prod = 1.0;
        for (Eigen::Index mu = 0; mu < y.size(); ++mu) {
            double ell = s.modes.lengths[mu];
            prod *= detail::hermite_function(t.nu[mu], y[mu] / ell);
            prod /= std::sqrt(ell);
        }
        acc += t.c * prod;
    }
    return acc;
}

/// Real fast path of psi_modes for states with all-real coefficients.
inline double psi_modes_real(const StateSpec& s, const Eigen::VectorXd& y) {
    double acc = 0.0;
    for (const auto& t : s.terms) {
        double prod = 1.0;
        for (Eigen::Index mu = 0; mu < y.size(); ++mu) {
            double ell = s.modes.lengths[mu];
            prod *= detail::hermite_function(t.nu[mu], y[mu] / ell);
            prod /= std::sqrt(ell);
        }
        acc += t.c.real() * prod;
    }
    return acc;
}

/// Evaluate the state at particle coordinates x.
inline std::complex<double> psi(const StateSpec& s, const Eigen::VectorXd& x) {
    if (x.size() != s.n()) throw validation_error("psi: coordinate dimension mismatch");
    return psi_modes(s, s.modes.rotation * x);
}

/// Total oscillator energy sum_mu sqrt(d_mu) (nu_mu + 1/2) of one product term.
inline double energy(const std::vector<int>& nu, const Eigen::VectorXd& eigvals) {
    if (Eigen::Index(nu.size()) != eigvals.size())
        throw validation_error("energy: occupation length mismatch");
    double e = 0.0;
    for (Eigen::Index mu = 0; mu < eigvals.size(); ++mu) {
        if (nu[mu] < 0) throw validation_error("energy: occupations must be >= 0");
        e += std::sqrt(eigvals[mu]) * (nu[mu] + 0.5);
    }
    return e;
}

/// Unitary coordinate rescaling: all lengths divided by alpha, so that
/// alpha^{-N/2} psi(rescaled, x/alpha) = psi(original, x) pointwise.
inline StateSpec rescale_state(const StateSpec& s, double alpha) {
    if (!(alpha > 0.0)) throw validation_error("rescale_state: alpha must be > 0");
    StateSpec out = s;
    // l = d^{-1/4}: dividing lengths by alpha multiplies eigenvalues by alpha^4
    out.modes.eigvals = s.modes.eigvals * (alpha * alpha * alpha * alpha);
    out.modes.lengths = s.modes.lengths / alpha;
    out.modes.dual_lengths = out.modes.lengths.cwiseInverse();
    return out;
}

/// Check the unitary-Fourier-transform identity |F phi_ell^nu| = |phi_{1/ell}^nu|
/// by quadrature; returns the max deviation over the evaluation grid's points.
///
/// The transform kernel is (2 pi)^{-1/2} e^{-i x p}. Both roles derive from the
/// caller's grid: p-evaluation nodes are the grid rescaled to sqrt(2)/ell (the
/// dual mode's natural quadrature scale), while the x-integration uses a 4x
/// refined rule at scale sqrt(2)*ell. The refinement is what keeps the largest
/// evaluation frequencies inside the x-rule's resolvable band; a single shared
/// grid cannot cover both roles once ell is far from 1 (aliasing, independent
/// of G). Both internal rules self-check against the mode normalization and
/// raise grid_error instead of returning a truncation-dominated number.
inline double fourier_mode_check(int nu, double ell, const QuadratureGrid& grid) {
    if (nu < 0 || nu > max_degree) throw validation_error("fourier_mode_check: bad degree");
    if (!(ell > 0.0)) throw validation_error("fourier_mode_check: bad length scale");
    const int G = grid.nodes_per_axis;

    QuadratureGrid pg = grid.rescaled(std::sqrt(2.0) / ell);
    QuadratureGrid xg = gauss_hermite_plain(4 * G, std::sqrt(2.0) * ell);

    // truncation self-checks: the rules must resolve their own mode's norm
    double nx = 0.0, np = 0.0;
    for (int i = 0; i < xg.nodes_per_axis; ++i) {
        double v = phi(nu, ell, xg.nodes[i]);
        nx += xg.weights[i] * v * v;
    }
    for (int i = 0; i < G; ++i) {
        double v = phi(nu, 1.0 / ell, pg.nodes[i]);
        np += pg.weights[i] * v * v;
    }
    if (std::abs(nx - 1.0) > 1e-10)
        throw grid_error("fourier_mode_check: unresolved grid (x role)", std::abs(nx - 1.0));
    if (std::abs(np - 1.0) > 1e-10)
        throw grid_error("fourier_mode_check: unresolved grid (p role)", std::abs(np - 1.0));

    Eigen::VectorXd fx(xg.nodes_per_axis);
    for (int i = 0; i < xg.nodes_per_axis; ++i)
        fx[i] = xg.weights[i] * phi(nu, ell, xg.nodes[i]);

    const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * M_PI);
    double worst = 0.0;
    for (int j = 0; j < G; ++j) {
        double p = pg.nodes[j];
        double re = 0.0, im = 0.0;
        for (int i = 0; i < xg.nodes_per_axis; ++i) {
            double a = p * xg.nodes[i];
            re += fx[i] * std::cos(a);
            im -= fx[i] * std::sin(a);
        }
        double mag = std::hypot(re, im) * inv_sqrt_2pi;
        worst = std::max(worst, std::abs(mag - std::abs(phi(nu, 1.0 / ell, p))));
    }
    return worst;
}

} // namespace harmdual
