#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <string>
#include <thread>
#include <type_traits>
#include <vector>

#include "harmdual/errors.hpp"
#include "harmdual/modes.hpp"
#include "harmdual/quadrature.hpp"
#include "harmdual/wavefunction.hpp"

namespace harmdual {

/// Retained coordinate indices (0-based, strictly increasing, M < N).
struct SubsetSpec {
    std::vector<int> kept;

    int M() const { return int(kept.size()); }
};

inline SubsetSpec make_subset(std::vector<int> kept, Eigen::Index N) {
    if (kept.empty()) throw validation_error("subset: must keep at least one coordinate");
    if (Eigen::Index(kept.size()) >= N)
        throw validation_error("subset: must trace out at least one coordinate");
    for (std::size_t i = 0; i < kept.size(); ++i) {
        if (kept[i] < 0 || kept[i] >= N)
            throw validation_error("subset: index out of range");
        if (i > 0 && kept[i] <= kept[i - 1])
            throw validation_error("subset: indices must be strictly increasing");
    }
    return SubsetSpec{std::move(kept)};
}

/// Max kernel dimension G^M (dense eigensolve budget).
inline constexpr Eigen::Index kernel_dim_cap = 4096;

/// The reduced density operator sampled on the kept tensor grid,
/// weight-symmetrized: K_{ab} = sqrt(w_a) rho(x_a, x_b) sqrt(w_b).
/// Hermitian PSD by construction (assembled as a Gram matrix).
struct KernelMatrix {
    Eigen::Index dim = 0;
    int G = 0;
    int M = 0;
    double scale = 0.0;
    bool is_real = true;
    Eigen::MatrixXd K_real;  ///< used when is_real
    Eigen::MatrixXcd K_cplx; ///< used otherwise
    double trace_estimate = 0.0;
};

struct KernelOptions {
    double quad_tol = 1e-8;    ///< allowed |trace - 1| before "unresolved grid"
    int threads = 1;           ///< workers for the evaluation fill
    double max_evaluations = 1e9; ///< budget on G^N state evaluations
};

namespace detail {

/// Precomputed per-state evaluation tables: splits each term into a shared
/// Gaussian envelope exp(-sum z_mu^2 / 2) and normalized Hermite polynomial
/// factors, so the envelope costs one exp per point regardless of N.
struct StateEvaluator {
    const StateSpec* state;
    Eigen::VectorXd inv_lengths;
    double norm_const; ///< prod_mu lengths[mu]^{-1/2}

    explicit StateEvaluator(const StateSpec& s) : state(&s) {
        inv_lengths = s.modes.lengths.cwiseInverse();
        norm_const = std::exp(-0.5 * s.modes.lengths.array().log().sum());
    }

    /// Normalized-Hermite polynomial part: hermite_function(nu, z) * e^{+z^2/2}.
    static double poly(int nu, double z) {
        double pm = 0.0, p = 0.7511255444649425; // pi^{-1/4}
        for (int k = 0; k < nu; ++k) {
            double next = z * std::sqrt(2.0 / (k + 1)) * p -
                          std::sqrt(double(k) / (k + 1)) * pm;
            pm = p;
            p = next;
        }
        return p;
    }

    template <typename Scalar>
    Scalar eval(const Eigen::VectorXd& y) const {
        const Eigen::Index n = y.size();
        double s2 = 0.0;
        for (Eigen::Index mu = 0; mu < n; ++mu) {
            double z = y[mu] * inv_lengths[mu];
            s2 += z * z;
        }
        Scalar acc{};
        for (const auto& t : state->terms) {
            double prod = 1.0;
            for (Eigen::Index mu = 0; mu < n; ++mu)
                prod *= poly(t.nu[mu], y[mu] * inv_lengths[mu]);
            if constexpr (std::is_same_v<Scalar, double>)
                acc += t.c.real() * prod;
            else
                acc += t.c * prod;
        }
        return acc * (norm_const * std::exp(-0.5 * s2));
    }
};

/// Decode a row-major tensor index into per-axis node indices.
inline void decode_index(Eigen::Index a, int axes, int G, int* out) {
    for (int j = axes - 1; j >= 0; --j) {
        out[j] = int(a % G);
        a /= G;
    }
}

inline void run_blocks(Eigen::Index count, int threads,
                       const std::function<void(Eigen::Index, Eigen::Index)>& fn) {
    threads = std::max(1, std::min<int>(threads, int(count)));
    if (threads == 1) {
        fn(0, count);
        return;
    }
    std::vector<std::thread> pool;
    Eigen::Index chunk = (count + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
        Eigen::Index lo = t * chunk, hi = std::min(count, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back(fn, lo, hi);
    }
    for (auto& th : pool) th.join();
}

/// Shared geometry for kernel assembly over kept/traced tensor grids.
struct KernelPlan {
    int N, M, T, G;
    Eigen::Index dim, Q;
    Eigen::MatrixXd ya;          ///< N x dim: rotation * (kept part of x_a)
    Eigen::VectorXd sqrt_wa;     ///< kept-point weights, square-rooted
    Eigen::MatrixXd rot_traced;  ///< N x T rotation slice for traced axes
    std::vector<int> traced;

    KernelPlan(const NormalModes& modes, const SubsetSpec& m, const QuadratureGrid& grid,
               double max_evaluations) {
        N = int(modes.n());
        M = m.M();
        T = N - M;
        G = grid.nodes_per_axis;
        dim = 1;
        for (int j = 0; j < M; ++j) {
            dim *= G;
            if (dim > kernel_dim_cap)
                throw validation_error(
                    "kernel dimension G^M = " + std::to_string(double(std::pow(G, M))) +
                    " exceeds cap " + std::to_string(kernel_dim_cap) +
                    "; reduce G or the subset size");
        }
        double work = std::pow(double(G), N);
        if (work > max_evaluations)
            throw validation_error("kernel work budget exceeded: G^N = " +
                                   std::to_string(work) + " evaluations");
        Q = 1;
        for (int j = 0; j < T; ++j) Q *= G;

        for (int i = 0; i < N; ++i)
            if (std::find(m.kept.begin(), m.kept.end(), i) == m.kept.end())
                traced.push_back(i);

        Eigen::MatrixXd rot_kept(N, M);
        for (int j = 0; j < M; ++j) rot_kept.col(j) = modes.rotation.col(m.kept[j]);
        rot_traced.resize(N, T);
        for (int j = 0; j < T; ++j) rot_traced.col(j) = modes.rotation.col(traced[j]);

        ya.resize(N, dim);
        sqrt_wa.resize(dim);
        std::vector<int> idx(M);
        Eigen::VectorXd u(M);
        for (Eigen::Index a = 0; a < dim; ++a) {
            decode_index(a, M, G, idx.data());
            double w = 1.0;
            for (int j = 0; j < M; ++j) {
                u[j] = grid.nodes[idx[j]];
                w *= grid.weights[idx[j]];
            }
            ya.col(a) = rot_kept * u;
            sqrt_wa[a] = std::sqrt(w);
        }
    }

    /// Node vector and sqrt-weight of traced tensor point q.
    void traced_point(Eigen::Index q, const QuadratureGrid& grid, Eigen::VectorXd& z,
                      double& sqrt_v, std::vector<int>& scratch) const {
        decode_index(q, T, G, scratch.data());
        double v = 1.0;
        for (int j = 0; j < T; ++j) {
            z[j] = grid.nodes[scratch[j]];
            v *= grid.weights[scratch[j]];
        }
        sqrt_v = std::sqrt(v);
    }
};

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>
assemble_kernel(const StateSpec& state, const KernelPlan& plan, const QuadratureGrid& grid,
                int threads) {
    using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    const Eigen::Index dim = plan.dim, Q = plan.Q;
    StateEvaluator ev(state);

    Mat K = Mat::Zero(dim, dim);
    // fixed chunking keeps the reduction order independent of thread count
    const Eigen::Index cols_per_chunk =
        std::max<Eigen::Index>(1, std::min<Eigen::Index>(Q, (Eigen::Index(1) << 22) / dim));

    Mat A(dim, cols_per_chunk);
    Eigen::MatrixXd yq(plan.N, cols_per_chunk);
    Eigen::VectorXd sqrt_vq(cols_per_chunk);
    Eigen::VectorXd z(plan.T);
    std::vector<int> scratch(std::max(plan.T, 1));

    for (Eigen::Index q0 = 0; q0 < Q; q0 += cols_per_chunk) {
        const Eigen::Index qn = std::min(cols_per_chunk, Q - q0);
        for (Eigen::Index c = 0; c < qn; ++c) {
            double sv;
            plan.traced_point(q0 + c, grid, z, sv, scratch);
            yq.col(c) = plan.rot_traced * z;
            sqrt_vq[c] = sv;
        }
        detail::run_blocks(dim, threads, [&](Eigen::Index lo, Eigen::Index hi) {
            Eigen::VectorXd y(plan.N);
            for (Eigen::Index a = lo; a < hi; ++a) {
                for (Eigen::Index c = 0; c < qn; ++c) {
                    y = plan.ya.col(a) + yq.col(c);
                    A(a, c) = ev.template eval<Scalar>(y) * (plan.sqrt_wa[a] * sqrt_vq[c]);
                }
            }
        });
        K.template selfadjointView<Eigen::Lower>().rankUpdate(A.leftCols(qn), 1.0);
    }
    K.template triangularView<Eigen::StrictlyUpper>() =
        K.adjoint().template triangularView<Eigen::StrictlyUpper>();
    return K;
}

} // namespace detail

/// Assemble the M-particle reduced density operator of `state` on the kept
/// tensor grid by tracing the remaining N-M coordinates with the same rule
/// per axis: rho(u, u') = integral dz Psi(u, z) conj(Psi)(u', z).
///
/// Factorized as K = (W^{1/2} A)(W^{1/2} A)^dagger with A_{aq} = Psi(x_a, z_q)
/// sqrt(v_q): Hermitian and PSD hold by construction, and the contraction cost
/// is G^M * Q evaluations plus one rank-Q product instead of G^{2M} * Q.
/// The reduction uses fixed chunk boundaries so results are bit-stable across
/// thread counts.
inline KernelMatrix rdm_kernel(const StateSpec& state, const SubsetSpec& m,
                               const QuadratureGrid& grid, const KernelOptions& opt = {}) {
    detail::KernelPlan plan(state.modes, m, grid, opt.max_evaluations);

    KernelMatrix out;
    out.dim = plan.dim;
    out.G = plan.G;
    out.M = plan.M;
    out.scale = grid.scale;
    out.is_real = state.is_real();

    double trace = 0.0;
    if (out.is_real) {
        out.K_real = detail::assemble_kernel<double>(state, plan, grid, opt.threads);
        trace = out.K_real.trace();
    } else {
        out.K_cplx =
            detail::assemble_kernel<std::complex<double>>(state, plan, grid, opt.threads);
        trace = out.K_cplx.trace().real();
    }
    out.trace_estimate = trace;

    double deficit = std::abs(trace - 1.0);
    if (deficit > opt.quad_tol)
        throw grid_error("unresolved grid: kernel trace deviates from 1 by " +
                             std::to_string(deficit) + " (enlarge G or adjust scale)",
                         deficit);
    return out;
}

/// Closed-form ground-state kernel. With A = D^{1/2} (from the modes:
/// A = R^T diag(sqrt(d)) R) and the (kept, traced) block split of A,
/// marginalizing the Gaussian |Psi_0|^2 over the traced block gives
///   rho(u, u') = exp(lognorm - u^T Gamma u / 2 - u'^T Gamma u' / 2 + u^T B u')
/// with Gamma = A_kk - A_kt A_tt^{-1} A_tk / 2 and B = A_kt A_tt^{-1} A_tk / 2.
struct GaussianKernel {
    Eigen::MatrixXd Gamma;
    Eigen::MatrixXd B;
    double lognorm = 0.0;
    std::vector<int> kept;
};

inline GaussianKernel gaussian_ground_kernel(const NormalModes& modes, const SubsetSpec& m) {
    const int N = int(modes.n());
    const int M = m.M(), T = N - M;
    if (T <= 0) throw validation_error("gaussian_ground_kernel: nothing to trace");

    Eigen::MatrixXd A = modes.rotation.transpose() *
                        modes.eigvals.cwiseSqrt().asDiagonal() * modes.rotation;
    std::vector<int> traced;
    for (int i = 0; i < N; ++i)
        if (std::find(m.kept.begin(), m.kept.end(), i) == m.kept.end()) traced.push_back(i);

    Eigen::MatrixXd Akk(M, M), Akt(M, T), Att(T, T);
    for (int i = 0; i < M; ++i)
        for (int j = 0; j < M; ++j) Akk(i, j) = A(m.kept[i], m.kept[j]);
    for (int i = 0; i < M; ++i)
        for (int j = 0; j < T; ++j) Akt(i, j) = A(m.kept[i], traced[j]);
    for (int i = 0; i < T; ++i)
        for (int j = 0; j < T; ++j) Att(i, j) = A(traced[i], traced[j]);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> est(Att);
    if (est.info() != Eigen::Success ||
        est.eigenvalues().minCoeff() <= 0.0 ||
        est.eigenvalues().maxCoeff() > 1e12 * est.eigenvalues().minCoeff())
        throw numeric_error("gaussian_ground_kernel: traced block ill-conditioned");

    Eigen::MatrixXd S = Akt * est.operatorInverseSqrt() * est.operatorInverseSqrt() *
                        Akt.transpose();
    GaussianKernel gk;
    gk.Gamma = Akk - 0.5 * S;
    gk.B = 0.5 * S;
    gk.kept = m.kept;
    // norm of |Psi_0|^2 marginal: (det A / pi^N)^{1/2} * (pi^T / det Att)^{1/2}
    double logdet_A = modes.eigvals.array().sqrt().log().sum();
    double logdet_Att = est.eigenvalues().array().log().sum();
    gk.lognorm = -0.5 * M * std::log(M_PI) + 0.5 * (logdet_A - logdet_Att);
    return gk;
}

/// Analytic trace of the closed-form kernel (equals 1 for a normalized state).
inline double gaussian_kernel_trace(const GaussianKernel& gk) {
    Eigen::MatrixXd C = gk.Gamma - gk.B;
    Eigen::LLT<Eigen::MatrixXd> llt(C);
    if (llt.info() != Eigen::Success)
        throw numeric_error("gaussian_kernel_trace: Gamma - B not positive definite");
    double logdet = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    double M = double(gk.Gamma.rows());
    return std::exp(gk.lognorm + 0.5 * M * std::log(M_PI) - 0.5 * logdet);
}

/// Sample the closed-form kernel on a grid in the weight-symmetrized Nystrom
/// form, for cross-path comparison with rdm_kernel.
inline KernelMatrix gaussian_kernel_matrix(const GaussianKernel& gk,
                                           const QuadratureGrid& grid) {
    const int M = int(gk.Gamma.rows());
    const int G = grid.nodes_per_axis;
    Eigen::Index dim = 1;
    for (int j = 0; j < M; ++j) {
        dim *= G;
        if (dim > kernel_dim_cap)
            throw validation_error("gaussian_kernel_matrix: kernel dimension exceeds cap");
    }
    Eigen::MatrixXd U(M, dim);
    Eigen::VectorXd g(dim);
    std::vector<int> idx(M);
    Eigen::VectorXd u(M);
    for (Eigen::Index a = 0; a < dim; ++a) {
        detail::decode_index(a, M, G, idx.data());
        double w = 1.0;
        for (int j = 0; j < M; ++j) {
            u[j] = grid.nodes[idx[j]];
            w *= grid.weights[idx[j]];
        }
        U.col(a) = u;
        g[a] = std::sqrt(w) * std::exp(0.5 * gk.lognorm - 0.5 * double(u.transpose() * gk.Gamma * u));
    }
    Eigen::MatrixXd cross = U.transpose() * gk.B * U; // dim x dim
    KernelMatrix out;
    out.dim = dim;
    out.G = G;
    out.M = M;
    out.scale = grid.scale;
    out.is_real = true;
    out.K_real = ((cross.array().exp().colwise() * g.array()).rowwise() *
                  g.transpose().array())
                     .matrix();
    out.trace_estimate = out.K_real.trace();
    return out;
}

/// Coefficient matrix of the kernel in the tensor Hermite-function basis at a
/// reference length: C_{nn'} = sum_{ab} Phi_n(x_a) sqrt(w_a) K_{ab} sqrt(w_b)
/// Phi_n'(x_b). (The sqrt(w) factors are already inside K; the projector
/// supplies one more pair, completing the two quadratures.)
struct BasisProjection {
    Eigen::MatrixXcd C;
    double capture = 0.0;       ///< trace(C) / trace(K)
    bool basis_too_small = false;
};

inline constexpr double basis_capture_tol = 1.0 - 1e-6;

inline BasisProjection hermite_basis_projection(const KernelMatrix& kernel,
                                                const QuadratureGrid& grid, int B,
                                                double ell_ref) {
    const int G = kernel.G, M = kernel.M;
    if (B < 1) throw validation_error("basis projection: B must be >= 1");
    if (B > G / 2)
        throw validation_error("basis projection: B must be <= G/2 for resolvability");
    if (!(ell_ref > 0.0)) throw validation_error("basis projection: ell_ref must be > 0");

    Eigen::MatrixXd Pax(B, G);
    for (int a = 0; a < G; ++a) {
        double sw = std::sqrt(grid.weights[a]);
        for (int n = 0; n < B; ++n) Pax(n, a) = sw * phi(n, ell_ref, grid.nodes[a]);
    }
    Eigen::MatrixXd P = Pax;
    for (int j = 1; j < M; ++j) { // tensor (Kronecker) lift, most significant axis first
        Eigen::MatrixXd next(P.rows() * B, P.cols() * G);
        for (Eigen::Index r = 0; r < P.rows(); ++r)
            for (Eigen::Index c = 0; c < P.cols(); ++c)
                next.block(r * B, c * G, B, G) = P(r, c) * Pax;
        P = std::move(next);
    }
    if (P.rows() > kernel_dim_cap)
        throw validation_error("basis projection: B^M exceeds dimension cap");

    BasisProjection out;
    if (kernel.is_real)
        out.C = (P * kernel.K_real * P.transpose()).cast<std::complex<double>>();
    else
        out.C = P * kernel.K_cplx * P.transpose();
    out.capture = out.C.trace().real() / kernel.trace_estimate;
    out.basis_too_small = out.capture < basis_capture_tol;
    return out;
}

} // namespace harmdual
