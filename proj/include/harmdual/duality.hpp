#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "harmdual/errors.hpp"
#include "harmdual/model.hpp"
#include "harmdual/modes.hpp"
#include "harmdual/quadrature.hpp"
#include "harmdual/rdm.hpp"
#include "harmdual/spectra.hpp"
#include "harmdual/wavefunction.hpp"

namespace harmdual {

/// Eigenvalues below this floor are quadrature noise; comparisons ignore them.
inline constexpr double spectrum_compare_floor = 1e-12;

struct GridConfig {
    int G = 64;
    std::optional<double> scale; ///< empty = auto (geometric-mean width rule)
    double quad_tol = 1e-8;
    int threads = 1;
    int k_max = 64;
};

/// Outcome of one paired-spectrum (or paired-quantity) verification.
struct DualityReport {
    Spectrum spectrum_a;
    Spectrum spectrum_b;
    double max_abs_diff = 0.0;
    double tolerance = 0.0;
    bool passed = false;
    std::string context; ///< spectral / fourier / evenness / homogeneity / entropy
    std::string model_a;
    std::string model_b;
};

/// Occupation templates (and superposition coefficients) in sorted-length
/// mode positions; instantiated against a concrete model's modes.
using StateTemplate = std::vector<StateSpec::Term>;

inline StateTemplate ground_template(int n) {
    return {{1.0, std::vector<int>(n, 0)}};
}

inline StateTemplate single_template(std::vector<int> nu) {
    return {{1.0, std::move(nu)}};
}

/// Human-readable model descriptor for reports.
inline std::string describe(const InteractionMatrix& D) {
    std::string s = family_name(D.family);
    s += "(";
    if (D.params.empty()) {
        s += "n=" + std::to_string(D.n());
    } else {
        bool first = true;
        for (const auto& [k, v] : D.params) {
            if (!first) s += ",";
            first = false;
            std::string num = std::to_string(v);
            num.erase(num.find_last_not_of('0') + 1);
            if (!num.empty() && num.back() == '.') num.pop_back();
            s += k + "=" + num;
        }
    }
    s += ")";
    return s;
}

/// The dual image of a state template: each term's occupations move to the
/// dual model's mode order (blockwise mirror), and each coefficient picks up
/// the transform phase (-i)^{total degree}. The phase is a global factor for
/// single-term states but changes genuine superpositions.
inline StateTemplate dual_state_template(const StateTemplate& t,
                                         const Eigen::VectorXd& eigvals) {
    static const std::complex<double> minus_i_pow[4] = {
        {1.0, 0.0}, {0.0, -1.0}, {-1.0, 0.0}, {0.0, 1.0}};
    StateTemplate out;
    out.reserve(t.size());
    for (const auto& term : t) {
        int total = 0;
        for (int v : term.nu) total += v;
        StateSpec::Term nt;
        nt.c = term.c * minus_i_pow[total % 4];
        nt.nu = dual_occupation(term.nu, eigvals);
        out.push_back(std::move(nt));
    }
    if (out.size() == 1) out[0].c = std::abs(out[0].c); // drop the global phase
    return out;
}

/// Max difference of two descending spectra over entries above the floor,
/// padding the shorter list with zeros.
inline double compare_spectra(const Spectrum& a, const Spectrum& b,
                              double floor = spectrum_compare_floor) {
    std::size_t ka = 0, kb = 0;
    while (ka < a.values.size() && a.values[ka] > floor) ++ka;
    while (kb < b.values.size() && b.values[kb] > floor) ++kb;
    std::size_t k = std::max(ka, kb);
    double worst = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        double va = i < a.values.size() ? a.values[i] : 0.0;
        double vb = i < b.values.size() ? b.values[i] : 0.0;
        worst = std::max(worst, std::abs(va - vb));
    }
    return worst;
}

namespace detail {

/// Geometric-midpoint grid scale for a set of target widths: every width in
/// [wmin, wmax] then sits within the symmetric log-band the plain-weight rule
/// resolves. For a det-normalized dual pair the union of both sides' lengths
/// is reciprocal-closed, so this evaluates to exactly 1.
inline double auto_scale(double wmin, double wmax) { return std::sqrt(wmin * wmax); }

inline double resolve_scale(const GridConfig& cfg,
                            std::initializer_list<const Eigen::VectorXd*> length_sets) {
    if (cfg.scale && *cfg.scale > 0.0) return *cfg.scale;
    double wmin = std::numeric_limits<double>::infinity(), wmax = 0.0;
    for (const auto* l : length_sets) {
        wmin = std::min(wmin, l->minCoeff());
        wmax = std::max(wmax, l->maxCoeff());
    }
    return auto_scale(wmin, wmax);
}

inline KernelOptions kernel_options(const GridConfig& cfg) {
    KernelOptions o;
    o.quad_tol = cfg.quad_tol;
    o.threads = cfg.threads;
    return o;
}

inline SpectrumSource source_info(const InteractionMatrix& D, const StateTemplate& t,
                                  const SubsetSpec& m, const QuadratureGrid& g) {
    SpectrumSource s;
    s.model = describe(D);
    s.state = t.size() == 1 ? "single-term" : std::to_string(t.size()) + "-term";
    s.subset = "m={";
    for (std::size_t i = 0; i < m.kept.size(); ++i)
        s.subset += (i ? "," : "") + std::to_string(m.kept[i] + 1);
    s.subset += "}";
    std::string sc = std::to_string(g.scale);
    sc.erase(sc.find_last_not_of('0') + 1);
    if (!sc.empty() && sc.back() == '.') sc.pop_back();
    s.grid = "G=" + std::to_string(g.nodes_per_axis) + " s=" + sc;
    return s;
}

/// Spectrum of a Hermitian coefficient matrix (basis-space path).
inline Spectrum spectrum_of_hermitian(const Eigen::MatrixXcd& C, double trace_ref) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(C, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
        throw numeric_error("spectrum_of_hermitian: eigensolver failed");
    Spectrum s;
    Eigen::VectorXd ev = es.eigenvalues();
    std::vector<double> vals(ev.data(), ev.data() + ev.size());
    std::sort(vals.begin(), vals.end(), std::greater<double>());
    double reported = 0.0;
    for (double v : vals) {
        if (v < spectrum_report_floor) break;
        s.values.push_back(v);
        reported += v;
    }
    s.trace_deficit = trace_ref - reported;
    return s;
}

} // namespace detail

/// Compare the sorted kernel spectra of two explicit models on one shared
/// grid. The building block for every spectral claim; callers choose the
/// model pair and matching state templates.
inline DualityReport verify_spectrum_pair(const InteractionMatrix& Da,
                                          const InteractionMatrix& Db,
                                          const StateTemplate& ta, const StateTemplate& tb,
                                          const SubsetSpec& m, const GridConfig& cfg,
                                          double tol, std::string context) {
    NormalModes ma = diagonalize(Da);
    NormalModes mb = diagonalize(Db);
    double s = detail::resolve_scale(cfg, {&ma.lengths, &mb.lengths});
    QuadratureGrid grid = build_grid(cfg.G, s);

    StateSpec sa = make_state(ma, ta);
    StateSpec sb = make_state(mb, tb);
    KernelMatrix Ka = rdm_kernel(sa, m, grid, detail::kernel_options(cfg));
    KernelMatrix Kb = rdm_kernel(sb, m, grid, detail::kernel_options(cfg));

    DualityReport r;
    r.spectrum_a = eigenvalues(Ka, cfg.k_max);
    r.spectrum_b = eigenvalues(Kb, cfg.k_max);
    r.spectrum_a.source = detail::source_info(Da, ta, m, grid);
    r.spectrum_b.source = detail::source_info(Db, tb, m, grid);
    r.max_abs_diff = compare_spectra(r.spectrum_a, r.spectrum_b);
    r.tolerance = tol;
    r.passed = r.max_abs_diff < tol;
    r.context = std::move(context);
    r.model_a = describe(Da);
    r.model_b = describe(Db);
    return r;
}

/// Main claim: the RDO spectrum is invariant under inverting the coupling
/// matrix. Works on the det-1 class representative (spectra are class
/// invariants), whose dual width set mirrors its own — one shared grid then
/// resolves both sides symmetrically.
inline DualityReport verify_spectrum_duality(const InteractionMatrix& D,
                                             const StateTemplate& t, const SubsetSpec& m,
                                             const GridConfig& cfg, double tol) {
    require_valid(D);
    EquivalenceNormalizedMatrix zn = equivalence_normalize(D);
    InteractionMatrix Dn = D;
    Dn.entries = zn.entries;
    InteractionMatrix Dd = dual(Dn);

    NormalModes mn = diagonalize(Dn);
    StateTemplate td = dual_state_template(t, mn.eigvals);
    DualityReport r = verify_spectrum_pair(Dn, Dd, t, td, m, cfg, tol, "spectral");
    r.model_a = describe(D);
    r.model_b = "dual(" + describe(D) + ")";
    return r;
}

/// Basis-space form of the duality: the dual kernel's coefficient matrix in
/// the unit-length Hermite basis equals F C F* with F = diag((-i)^{total n}).
inline DualityReport verify_fourier_conjugation(const InteractionMatrix& D,
                                                const StateTemplate& t, const SubsetSpec& m,
                                                int B, const GridConfig& cfg, double tol) {
    require_valid(D);
    EquivalenceNormalizedMatrix zn = equivalence_normalize(D);
    InteractionMatrix Dn = D;
    Dn.entries = zn.entries;
    InteractionMatrix Dd = dual(Dn);

    NormalModes mn = diagonalize(Dn);
    NormalModes md = diagonalize(Dd);
    double s = detail::resolve_scale(cfg, {&mn.lengths, &md.lengths});
    QuadratureGrid grid = build_grid(cfg.G, s);

    StateSpec sa = make_state(mn, t);
    StateSpec sb = make_state(md, dual_state_template(t, mn.eigvals));
    KernelMatrix Ka = rdm_kernel(sa, m, grid, detail::kernel_options(cfg));
    KernelMatrix Kb = rdm_kernel(sb, m, grid, detail::kernel_options(cfg));

    const double ell_ref = 1.0;
    BasisProjection pa = hermite_basis_projection(Ka, grid, B, ell_ref);
    BasisProjection pb = hermite_basis_projection(Kb, grid, B, ell_ref);
    if (pa.basis_too_small)
        throw grid_error("fourier conjugation: basis too small (capture " +
                             std::to_string(pa.capture) + ")",
                         1.0 - pa.capture);
    if (pb.basis_too_small)
        throw grid_error("fourier conjugation: basis too small on the dual side (capture " +
                             std::to_string(pb.capture) + ")",
                         1.0 - pb.capture);

    // tensor phase diagonal: (-i)^{sum of basis indices}
    const Eigen::Index dim = pa.C.rows();
    static const std::complex<double> minus_i_pow[4] = {
        {1.0, 0.0}, {0.0, -1.0}, {-1.0, 0.0}, {0.0, 1.0}};
    Eigen::VectorXcd F(dim);
    std::vector<int> idx(Ka.M);
    for (Eigen::Index n = 0; n < dim; ++n) {
        detail::decode_index(n, Ka.M, B, idx.data());
        int total = 0;
        for (int j = 0; j < Ka.M; ++j) total += idx[j];
        F[n] = minus_i_pow[total % 4];
    }
    Eigen::MatrixXcd conjugated = F.asDiagonal() * pa.C * F.adjoint().asDiagonal();

    DualityReport r;
    r.max_abs_diff = (conjugated - pb.C).cwiseAbs().maxCoeff();
    r.tolerance = tol;
    r.passed = r.max_abs_diff < tol;
    r.context = "fourier";
    r.model_a = describe(D);
    r.model_b = "dual(" + describe(D) + ")";
    r.spectrum_a = detail::spectrum_of_hermitian(pa.C, Ka.trace_estimate);
    r.spectrum_b = detail::spectrum_of_hermitian(pb.C, Kb.trace_estimate);
    r.spectrum_a.source = detail::source_info(Dn, t, m, grid);
    r.spectrum_b.source = detail::source_info(Dd, t, m, grid);
    return r;
}

/// Build the identical-particle model whose delta coordinate is the given
/// value: d1 = 1, d2 = (e^{4 delta} - 1) / n.
inline InteractionMatrix identical_from_delta(double delta, int n) {
    return build_identical_1d(1.0, (std::exp(4.0 * delta) - 1.0) / n, n);
}

/// Diagonal model from a full delta vector: d_1 = 1, d_{mu+1} = d_mu e^{4 delta_mu}.
inline InteractionMatrix diag_from_deltas(const std::vector<double>& deltas) {
    Eigen::VectorXd d(Eigen::Index(deltas.size()) + 1);
    d[0] = 1.0;
    for (std::size_t i = 0; i < deltas.size(); ++i)
        d[i + 1] = d[i] * std::exp(4.0 * deltas[i]);
    return build_generic(Eigen::MatrixXd(d.asDiagonal()));
}

namespace detail {

inline DualityReport evenness_pair(InteractionMatrix Dp, InteractionMatrix Dm,
                                   const StateTemplate& t, const SubsetSpec& m,
                                   const GridConfig& cfg, double tol, double delta_label) {
    // The -delta member is the +delta member's dual up to class scale, so the
    // comparison runs on normalized representatives with the mirrored template.
    InteractionMatrix Dpn = Dp, Dmn = Dm;
    Dpn.entries = equivalence_normalize(Dp).entries;
    Dmn.entries = equivalence_normalize(Dm).entries;
    NormalModes mp = diagonalize(Dpn);
    StateTemplate tm = dual_state_template(t, mp.eigvals);
    DualityReport r =
        verify_spectrum_pair(Dpn, Dmn, t, tm, m, cfg, tol, "evenness");
    r.context += " delta=" + std::to_string(delta_label);
    r.model_a = describe(Dp);
    r.model_b = describe(Dm);
    return r;
}

} // namespace detail

/// Spectra are even functions of the delta coordinates: lambda(+delta) =
/// lambda(-delta), checked for each delta in the grid (identical-particle
/// single-delta parameterization).
inline std::vector<DualityReport> verify_evenness_identical(
    int n, const std::vector<double>& delta_grid, const StateTemplate& t,
    const SubsetSpec& m, const GridConfig& cfg, double tol) {
    std::vector<DualityReport> out;
    out.reserve(delta_grid.size());
    for (double d : delta_grid)
        out.push_back(detail::evenness_pair(identical_from_delta(d, n),
                                            identical_from_delta(-d, n), t, m, cfg, tol, d));
    return out;
}

/// Evenness for diagonal models parameterized by full delta vectors.
inline std::vector<DualityReport> verify_evenness_diag(
    const std::vector<std::vector<double>>& delta_vectors, const StateTemplate& t,
    const SubsetSpec& m, const GridConfig& cfg, double tol) {
    std::vector<DualityReport> out;
    out.reserve(delta_vectors.size());
    for (const auto& dv : delta_vectors) {
        std::vector<double> neg(dv.size());
        for (std::size_t i = 0; i < dv.size(); ++i) neg[i] = -dv[i];
        double label = dv.empty() ? 0.0 : dv[0];
        out.push_back(detail::evenness_pair(diag_from_deltas(dv), diag_from_deltas(neg), t,
                                            m, cfg, tol, label));
    }
    return out;
}

/// Overall coupling strength drops out: spectra of D and c D agree when the
/// grid is co-scaled by c^{-1/4} (lengths scale as c^{-1/4}).
inline DualityReport verify_homogeneity(const InteractionMatrix& D, double c,
                                        const StateTemplate& t, const SubsetSpec& m,
                                        const GridConfig& cfg, double tol) {
    if (!(c > 0.0)) throw validation_error("verify_homogeneity: c must be > 0");
    require_valid(D);
    InteractionMatrix Dc = D;
    Dc.entries = c * D.entries;

    NormalModes ma = diagonalize(D);
    NormalModes mc = diagonalize(Dc);
    double sa = detail::resolve_scale(cfg, {&ma.lengths});
    double sc = sa * std::pow(c, -0.25);
    QuadratureGrid ga = build_grid(cfg.G, sa);
    QuadratureGrid gc = ga.rescaled(sc);

    StateSpec stt_a = make_state(ma, t);
    StateSpec stt_c = make_state(mc, t); // same template: mode order is c-invariant
    KernelMatrix Ka = rdm_kernel(stt_a, m, ga, detail::kernel_options(cfg));
    KernelMatrix Kc = rdm_kernel(stt_c, m, gc, detail::kernel_options(cfg));

    DualityReport r;
    r.spectrum_a = eigenvalues(Ka, cfg.k_max);
    r.spectrum_b = eigenvalues(Kc, cfg.k_max);
    r.spectrum_a.source = detail::source_info(D, t, m, ga);
    r.spectrum_b.source = detail::source_info(Dc, t, m, gc);
    r.max_abs_diff = compare_spectra(r.spectrum_a, r.spectrum_b);
    r.tolerance = tol;
    r.passed = r.max_abs_diff < tol;
    r.context = "homogeneity c=" + std::to_string(c);
    r.model_a = describe(D);
    r.model_b = std::to_string(c) + " * " + describe(D);
    return r;
}

/// Entropy duality: S_q agrees between a model and its dual for each q.
/// q = 1 is interpreted as the von Neumann entropy.
inline std::vector<DualityReport> verify_entropy_duality(
    const InteractionMatrix& D, const std::vector<double>& q_list, const StateTemplate& t,
    const SubsetSpec& m, const GridConfig& cfg, double tol) {
    DualityReport base = verify_spectrum_duality(D, t, m, cfg, tol);
    std::vector<DualityReport> out;
    out.reserve(q_list.size());
    for (double q : q_list) {
        DualityReport r = base;
        std::string tag;
        bool flagged = false;
        double ea, eb;
        if (q == 1.0) {
            ea = von_neumann_entropy(base.spectrum_a);
            eb = von_neumann_entropy(base.spectrum_b);
            tag = "entropy von-neumann";
        } else {
            EntropyResult ra = renyi_entropy(base.spectrum_a, q);
            EntropyResult rb = renyi_entropy(base.spectrum_b, q);
            ea = ra.value;
            eb = rb.value;
            flagged = ra.tail_flagged || rb.tail_flagged;
            tag = "entropy q=" + std::to_string(q);
        }
        r.max_abs_diff = std::abs(ea - eb);
        r.tolerance = tol;
        r.passed = r.max_abs_diff < tol;
        r.context = flagged ? tag + " [tail-flagged]" : tag;
        out.push_back(std::move(r));
    }
    return out;
}

} // namespace harmdual
