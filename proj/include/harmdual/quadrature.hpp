#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "harmdual/errors.hpp"

namespace harmdual {

/// Scaled Gauss–Hermite rule converted to plain-integration form:
/// sum_i weights[i] * f(nodes[i]) ~ integral of f over the real line,
/// accurate for integrands whose decay matches exp(-(x/scale)^2) within a
/// factor-of-two band of widths around `scale`.
struct QuadratureGrid {
    int nodes_per_axis = 0;
    double scale = 1.0;
    Eigen::VectorXd nodes;   ///< symmetric about 0, ascending
    Eigen::VectorXd weights; ///< plain weights, > 0 (outermost may underflow to 0)

    /// Same rule at a different scale. Nodes and plain weights both scale
    /// linearly, so no re-factorization is needed.
    QuadratureGrid rescaled(double new_scale) const {
        QuadratureGrid g = *this;
        double f = new_scale / scale;
        g.scale = new_scale;
        g.nodes *= f;
        g.weights *= f;
        return g;
    }
};

namespace detail {

/// Plain Gauss–Hermite weight at node t via the Christoffel function:
/// lambda = 1 / sum_{k<G} psi_k(t)^2 with orthonormal Hermite functions psi.
/// The recurrence runs on scaled values (shared log offset E) so neither the
/// e^{-t^2/2} seed nor the e^{+t^2/2} growth under/overflows at any G. This
/// stays accurate at edge nodes where eigenvector-based weights lose all
/// relative precision (the first components underflow toward 1e-24 and the
/// e^{t^2} de-weighting amplifies their absolute error astronomically).
inline double plain_weight(double t, int G) {
    double E = -0.5 * t * t - 0.25 * std::log(M_PI);
    double pm = 0.0, p = 1.0, S = 1.0;
    for (int k = 1; k < G; ++k) {
        double next = t * std::sqrt(2.0 / k) * p - std::sqrt((k - 1.0) / k) * pm;
        pm = p;
        p = next;
        if (std::abs(p) > 1e100) {
            pm *= 1e-100;
            p *= 1e-100;
            S *= 1e-200;
            E += 100.0 * std::log(10.0);
        }
        S += p * p;
    }
    return std::exp(-(std::log(S) + 2.0 * E));
}

} // namespace detail

/// Golub–Welsch Gauss–Hermite rule with plain weights, uncapped size.
///
/// Nodes are eigenvalues of the Jacobi matrix (off-diagonals sqrt(k/2));
/// weights come from the Christoffel-function identity evaluated with
/// normalized Hermite functions, which keeps full relative accuracy out to
/// the outermost nodes. Node and weight symmetry are exact by construction.
inline QuadratureGrid gauss_hermite_plain(int G, double scale) {
    if (G < 1) throw validation_error("quadrature: need at least one node");
    if (!(scale > 0.0)) throw validation_error("quadrature: scale must be > 0");

    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(G, G);
    for (int k = 1; k < G; ++k) {
        double b = std::sqrt(k / 2.0);
        J(k - 1, k) = b;
        J(k, k - 1) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
        throw numeric_error("quadrature: Jacobi eigensolve failed");

    Eigen::VectorXd t = es.eigenvalues(); // ascending
    // enforce exact node symmetry, then one weight evaluation per |t| pair
    for (int i = 0, j = G - 1; i < j; ++i, --j) {
        double tv = 0.5 * (t[j] - t[i]);
        t[i] = -tv;
        t[j] = tv;
    }
    if (G % 2 == 1) t[G / 2] = 0.0;
    Eigen::VectorXd lam(G);
    for (int i = 0, j = G - 1; i <= j; ++i, --j) {
        double lv = scale * detail::plain_weight(t[j], G);
        lam[i] = lv;
        lam[j] = lv;
    }

    QuadratureGrid g;
    g.nodes_per_axis = G;
    g.scale = scale;
    g.nodes = scale * t;
    g.weights = std::move(lam);
    return g;
}

/// Kernel-facing grid builder with the desk-scale size window enforced.
inline QuadratureGrid build_grid(int G, double scale) {
    if (G < 8) throw validation_error("build_grid: G must be >= 8");
    if (G > 256)
        throw validation_error(
            "build_grid: G = " + std::to_string(G) +
            " exceeds the per-axis cap of 256 (kernel dimension budget)");
    return gauss_hermite_plain(G, scale);
}

} // namespace harmdual
