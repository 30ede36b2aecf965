#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "harmdual/errors.hpp"

namespace harmdual {

/// Which builder produced an interaction matrix (kept for reports).
enum class ModelFamily { generic, identical_1d, moshinsky, chain };

inline const char* family_name(ModelFamily f) {
    switch (f) {
        case ModelFamily::generic:      return "generic";
        case ModelFamily::identical_1d: return "identical_1d";
        case ModelFamily::moshinsky:    return "moshinsky";
        case ModelFamily::chain:        return "chain";
    }
    return "generic";
}

/// Symmetric positive-definite coupling matrix of the quadratic potential
/// 1/2 x^T D x, together with provenance metadata.
struct InteractionMatrix {
    Eigen::MatrixXd entries;
    ModelFamily family = ModelFamily::generic;
    /// Raw builder parameters, e.g. {{"d1",1},{"d2",0.5},{"n",3}}.
    std::vector<std::pair<std::string, double>> params;

    Eigen::Index n() const { return entries.rows(); }
};

/// det-1 equivalence-class representative: input = scale_applied * entries.
struct EquivalenceNormalizedMatrix {
    Eigen::MatrixXd entries;
    double scale_applied = 1.0;
};

struct ValidationResult {
    bool ok = false;
    double eigenvalue_floor = 0.0; ///< smallest eigenvalue found
    std::string message;           ///< empty iff ok
};

/// Positive-definiteness floor, relative to the largest eigenvalue magnitude.
inline constexpr double pd_tolerance = 1e-10;

/// Symmetry + positive definiteness check. Never repairs the input:
/// builders emit exactly symmetric data, so any asymmetry is a bug upstream.
inline ValidationResult validate(const InteractionMatrix& D) {
    ValidationResult r;
    const auto& A = D.entries;
    if (A.rows() != A.cols() || A.rows() < 1) {
        r.message = "not a square matrix";
        return r;
    }
    if (!A.allFinite()) {
        r.message = "non-finite entries";
        return r;
    }
    for (Eigen::Index i = 0; i < A.rows(); ++i)
        for (Eigen::Index j = i + 1; j < A.cols(); ++j)
            if (A(i, j) != A(j, i)) {
                r.message = "asymmetric";
                return r;
            }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) {
        r.message = "eigensolver failed to converge";
        return r;
    }
    const auto& d = es.eigenvalues();
    r.eigenvalue_floor = d.minCoeff();
    const double mag = std::max(std::abs(d.minCoeff()), std::abs(d.maxCoeff()));
    if (!(r.eigenvalue_floor > pd_tolerance * mag)) {
        r.message = "not positive definite";
        return r;
    }
    r.ok = true;
    return r;
}

/// validate() that throws validation_error instead of returning a result.
inline void require_valid(const InteractionMatrix& D) {
    ValidationResult r = validate(D);
    if (!r.ok) throw validation_error("invalid interaction matrix: " + r.message);
}

/// Identical particles on a line: common trap d1 plus pair coupling d2.
/// D_ii = d1 + (n-1) d2, D_ij = -d2. Eigenvalues: d1 (once), d1 + n d2 (n-1 times).
inline InteractionMatrix build_identical_1d(double d1, double d2, int n) {
    if (n < 2) throw validation_error("identical_1d: n must be >= 2");
    if (!(d1 > 0.0) || !(d1 + n * d2 > 0.0))
        throw validation_error(
            "identical_1d: not positive definite (needs d1 > 0 and d1 + n*d2 > 0; "
            "got d1 = " + std::to_string(d1) +
            ", d1 + n*d2 = " + std::to_string(d1 + n * d2) + ")");
    InteractionMatrix D;
    D.entries = Eigen::MatrixXd::Constant(n, n, -d2);
    for (int i = 0; i < n; ++i) D.entries(i, i) = d1 + (n - 1) * d2;
    D.family = ModelFamily::identical_1d;
    D.params = {{"d1", d1}, {"d2", d2}, {"n", double(n)}};
    return D;
}

/// Moshinsky-type model: isotropic trap omega plus harmonic pair coupling.
/// Same matrix structure as identical_1d with d1 = omega^2, d2 = coupling.
inline InteractionMatrix build_moshinsky(double omega, double coupling, int n) {
    InteractionMatrix D = build_identical_1d(omega * omega, coupling, n);
    D.family = ModelFamily::moshinsky;
    D.params = {{"omega", omega}, {"coupling", coupling}, {"n", double(n)}};
    return D;
}

/// Open chain with nearest-neighbour springs in a uniform trap:
/// D_ii = trap + (#neighbours) * spring, D_{i,i+1} = -spring.
/// spring = 0 (noninteracting chain) is allowed; negative spring is not.
inline InteractionMatrix build_chain_1d(double spring, double trap, int n) {
    if (n < 2) throw validation_error("chain: n must be >= 2");
    if (!(trap > 0.0)) throw validation_error("chain: trap must be > 0");
    if (spring < 0.0) throw validation_error("chain: spring must be >= 0");
    InteractionMatrix D;
    D.entries = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        int neighbours = (i == 0 || i == n - 1) ? 1 : 2;
        D.entries(i, i) = trap + neighbours * spring;
        if (i + 1 < n) {
            D.entries(i, i + 1) = -spring;
            D.entries(i + 1, i) = -spring;
        }
    }
    D.family = ModelFamily::chain;
    D.params = {{"spring", spring}, {"trap", trap}, {"n", double(n)}};
    return D;
}

/// Wrap raw entries as a generic model (validated by the caller via validate()).
inline InteractionMatrix build_generic(Eigen::MatrixXd entries) {
    InteractionMatrix D;
    D.entries = std::move(entries);
    D.family = ModelFamily::generic;
    return D;
}

/// The dual model: D* = D^{-1}, computed through the eigendecomposition so
/// the result is exactly symmetric and shares eigenspaces with D to rounding.
inline InteractionMatrix dual(const InteractionMatrix& D) {
    require_valid(D);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(D.entries);
    if (es.info() != Eigen::Success)
        throw numeric_error("dual: eigensolver failed to converge");
    const Eigen::VectorXd& d = es.eigenvalues();
    if (d.maxCoeff() > 1e12 * d.minCoeff())
        throw numeric_error("dual: ill-conditioned inverse (condition number > 1e12)");
    Eigen::MatrixXd inv =
        es.eigenvectors() * d.cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
    // enforce exact symmetry of the emitted data
    for (Eigen::Index i = 0; i < inv.rows(); ++i)
        for (Eigen::Index j = i + 1; j < inv.cols(); ++j) {
            double v = 0.5 * (inv(i, j) + inv(j, i));
            inv(i, j) = v;
            inv(j, i) = v;
        }
    InteractionMatrix out;
    out.entries = std::move(inv);
    out.family = ModelFamily::generic;
    return out;
}

/// Coupling-ratio involution r* = -r / (1 + n r) linking an identical_1d
/// model's ratio r = d2/d1 to its dual's.
inline double dual_ratio(double r, int n) {
    if (n < 2) throw validation_error("dual_ratio: n must be >= 2");
    if (!(1.0 + n * r > 0.0))
        throw validation_error("dual_ratio: outside PD domain (1 + n*r <= 0)");
    return -r / (1.0 + n * r);
}

/// det-1 representative of the equivalence class of D.
/// Uses exp(mean(log d)) = det(D)^(1/N) for stability.
inline EquivalenceNormalizedMatrix equivalence_normalize(const InteractionMatrix& D) {
    require_valid(D);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(D.entries, Eigen::EigenvaluesOnly);
    double mean_log = es.eigenvalues().array().log().mean();
    EquivalenceNormalizedMatrix out;
    out.scale_applied = std::exp(mean_log);
    out.entries = D.entries / out.scale_applied;
    return out;
}

struct SelfDualityResult {
    bool self_dual = false;
    double witness = 0.0; ///< max entrywise deviation between normalized sides
};

/// A model is self-dual iff its class representative is invariant under
/// inversion; for symmetric PD matrices that singles out isotropic traps
/// (any positive multiple of the identity).
inline SelfDualityResult is_self_dual(const InteractionMatrix& D, double tol) {
    EquivalenceNormalizedMatrix a = equivalence_normalize(D);
    EquivalenceNormalizedMatrix b = equivalence_normalize(dual(D));
    SelfDualityResult r;
    r.witness = (a.entries - b.entries).cwiseAbs().maxCoeff();
    r.self_dual = r.witness <= tol;
    return r;
}

} // namespace harmdual
