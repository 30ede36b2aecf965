#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "harmdual/errors.hpp"
#include "harmdual/model.hpp"

namespace harmdual {

/// Relative gap below which adjacent eigenvalues count as degenerate.
inline constexpr double degeneracy_rel_gap = 1e-9;

/// Normal-mode decomposition R D R^T = diag(d) with the conventions
/// needed for reproducible cross-model comparisons:
///   - eigvals ascending (hence lengths descending),
///   - degenerate clusters re-based deterministically (see diagonalize),
///   - each mode's first significant component positive.
struct NormalModes {
    Eigen::MatrixXd rotation;     ///< rows are modes: y = R x
    Eigen::VectorXd eigvals;      ///< d, ascending, all > 0
    Eigen::VectorXd lengths;      ///< l = d^(-1/4)
    Eigen::VectorXd dual_lengths; ///< 1 / l

    Eigen::Index n() const { return eigvals.size(); }
};

struct DeltaCoordinates {
    std::vector<double> deltas; ///< delta_mu = ln(l_mu / l_{mu+1}), N-1 values
};

namespace detail {

/// Partition indices 0..n-1 of an ascending vector into clusters whose
/// adjacent relative gaps are below rel_gap. Returns cluster start offsets
/// plus a final n sentinel.
inline std::vector<Eigen::Index> cluster_offsets(const Eigen::VectorXd& v, double rel_gap) {
    std::vector<Eigen::Index> offs{0};
    for (Eigen::Index j = 0; j + 1 < v.size(); ++j) {
        double gap = std::abs(v[j + 1] - v[j]);
        double mag = std::max(std::abs(v[j]), std::abs(v[j + 1]));
        if (gap > rel_gap * mag) offs.push_back(j + 1);
    }
    offs.push_back(v.size());
    return offs;
}

/// Fix each row's sign so its first component with |.| > 1e-8 is positive.
inline void fix_row_signs(Eigen::MatrixXd& R) {
    for (Eigen::Index i = 0; i < R.rows(); ++i)
        for (Eigen::Index j = 0; j < R.cols(); ++j)
            if (std::abs(R(i, j)) > 1e-8) {
                if (R(i, j) < 0) R.row(i) = -R.row(i);
                break;
            }
}

} // namespace detail

/// Diagonalize a validated interaction matrix into normal modes.
///
/// Output is deterministic across runs and eigensolver backends: within each
/// degenerate cluster the returned basis is rebuilt canonically from the
/// subspace alone, by projecting canonical basis vectors e_1, e_2, ... onto
/// the cluster subspace in index order and Gram-Schmidt orthonormalizing the
/// projections. This matters beyond reproducibility: a model and its dual
/// share eigenspaces, and comparing their excited states mode-by-mode is only
/// meaningful if both sides pick the same in-cluster basis.
inline NormalModes diagonalize(const InteractionMatrix& D) {
    require_valid(D);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(D.entries);
    if (es.info() != Eigen::Success)
        throw numeric_error("diagonalize: eigensolver failed to converge");

    NormalModes m;
    m.eigvals = es.eigenvalues();                 // ascending
    m.rotation = es.eigenvectors().transpose();   // rows are modes
    const Eigen::Index n = m.eigvals.size();

    auto offs = detail::cluster_offsets(m.eigvals, degeneracy_rel_gap);
    for (std::size_t c = 0; c + 1 < offs.size(); ++c) {
        Eigen::Index lo = offs[c], hi = offs[c + 1];
        Eigen::Index r = hi - lo;
        if (r < 2) continue;
        Eigen::MatrixXd P = m.rotation.middleRows(lo, r); // r x n, orthonormal rows
        Eigen::MatrixXd basis(r, n);
        Eigen::Index got = 0;
        for (Eigen::Index k = 0; k < n && got < r; ++k) {
            // projection of e_k onto the cluster subspace
            Eigen::VectorXd v = P.transpose() * P.col(k);
            for (Eigen::Index b = 0; b < got; ++b)
                v -= basis.row(b).dot(v) * basis.row(b).transpose();
            // second orthogonalization pass for numerical safety
            for (Eigen::Index b = 0; b < got; ++b)
                v -= basis.row(b).dot(v) * basis.row(b).transpose();
            double nv = v.norm();
            if (nv > 1e-6) basis.row(got++) = v.transpose() / nv;
        }
        if (got != r)
            throw numeric_error("diagonalize: degenerate subspace re-basing failed");
        m.rotation.middleRows(lo, r) = basis;
    }
    detail::fix_row_signs(m.rotation);

    m.lengths = m.eigvals.array().pow(-0.25);
    m.dual_lengths = m.lengths.cwiseInverse();
    return m;
}

/// Oscillator length of each mode: l = d^(-1/4), the Gaussian width for
/// which H_nu(y/l) exp(-y^2/2l^2) solves the mode hamiltonian -d^2/2 + d y^2/2.
inline Eigen::VectorXd length_scales(const Eigen::VectorXd& eigvals) {
    if ((eigvals.array() <= 0.0).any())
        throw validation_error("length_scales: eigenvalues must be positive");
    return eigvals.array().pow(-0.25);
}

/// Log length ratios of adjacent (sorted) modes. Degenerate neighbours give
/// exactly 0 so downstream evenness checks see the reduced variable count.
/// Lengths are expected in the module's descending order (ascending d).
inline DeltaCoordinates delta_coordinates(const Eigen::VectorXd& lengths) {
    if ((lengths.array() <= 0.0).any())
        throw validation_error("delta_coordinates: lengths must be positive");
    DeltaCoordinates out;
    out.deltas.reserve(std::max<Eigen::Index>(lengths.size() - 1, 0));
    // l = d^(-1/4), so the d-space degeneracy gap 1e-9 maps to ~1e-9/4 in l.
    const double rel_gap = degeneracy_rel_gap / 4.0;
    for (Eigen::Index i = 0; i + 1 < lengths.size(); ++i) {
        double gap = std::abs(lengths[i] - lengths[i + 1]);
        double mag = std::max(lengths[i], lengths[i + 1]);
        out.deltas.push_back(gap <= rel_gap * mag ? 0.0
                                                  : std::log(lengths[i] / lengths[i + 1]));
    }
    return out;
}

/// Scale lengths so their geometric mean is 1 (the projective representative).
inline Eigen::VectorXd projective_normalize(const Eigen::VectorXd& lengths) {
    if ((lengths.array() <= 0.0).any())
        throw validation_error("projective_normalize: lengths must be positive");
    double mean_log = lengths.array().log().mean();
    return lengths / std::exp(mean_log);
}

/// Remap an occupation template from a model's mode order to its dual's.
///
/// Ascending-d ordering reverses under d -> 1/d, so cluster c of the base
/// model lands mirror-imaged at the end of the dual's order. The internal
/// order of each degenerate cluster is preserved (both sides re-base the
/// same subspace to the same canonical basis, so member k pairs with
/// member k): a blockwise move, not an elementwise reversal.
inline std::vector<int> dual_occupation(const std::vector<int>& nu,
                                        const Eigen::VectorXd& eigvals) {
    const Eigen::Index n = eigvals.size();
    if (Eigen::Index(nu.size()) != n)
        throw validation_error("dual_occupation: occupation length mismatch");
    std::vector<int> out(nu.size());
    auto offs = detail::cluster_offsets(eigvals, degeneracy_rel_gap);
    for (std::size_t c = 0; c + 1 < offs.size(); ++c) {
        Eigen::Index lo = offs[c], r = offs[c + 1] - offs[c];
        for (Eigen::Index k = 0; k < r; ++k) out[n - lo - r + k] = nu[lo + k];
    }
    return out;
}

} // namespace harmdual
