// Acceptance gate: one line per criterion, nonzero exit if any fails.
// Tolerances are pinned here on purpose; loosening them is a library bug.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "harmdual/harmdual.hpp"

using namespace harmdual;

namespace {

int g_failures = 0;

void report(int num, bool ok, const std::string& detail) {
    std::printf("CRITERION %d %s - %s\n", num, ok ? "PASS" : "FAIL", detail.c_str());
    if (!ok) ++g_failures;
}

std::string num3(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

GridConfig grid64() {
    GridConfig g;
    g.G = 64;
    return g;
}

InteractionMatrix random_pd4(unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::MatrixXd M(4, 4);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) M(i, j) = u(rng);
    Eigen::MatrixXd D = M.transpose() * M + Eigen::MatrixXd::Identity(4, 4);
    D = ((D + D.transpose()) / 2.0).eval();
    return build_generic(D);
}

double geo_scale(const NormalModes& m) {
    return std::sqrt(m.lengths.minCoeff() * m.lengths.maxCoeff());
}

// d/dy of the unit-normalized mode function, by the ladder identity.
double phi_prime(int nu, double ell, double y) {
    double lower = nu > 0 ? std::sqrt(nu / 2.0) * phi(nu - 1, ell, y) : 0.0;
    double upper = std::sqrt((nu + 1) / 2.0) * phi(nu + 1, ell, y);
    return (lower - upper) / ell;
}

// Total energy of a product mode state by one-dimensional quadrature.
double energy_by_quadrature(const std::vector<int>& nu, const NormalModes& m) {
    double total = 0.0;
    for (int mu = 0; mu < int(m.n()); ++mu) {
        const double ell = m.lengths[mu], d = m.eigvals[mu];
        auto g = build_grid(std::min(256, nu[mu] + 40), ell);
        double kin = 0.0, pot = 0.0;
        for (std::size_t i = 0; i < g.nodes.size(); ++i) {
            const double y = g.nodes[i], w = g.weights[i];
            const double f = phi(nu[mu], ell, y), fp = phi_prime(nu[mu], ell, y);
            kin += 0.5 * w * fp * fp;
            pot += 0.5 * d * w * y * y * f * f;
        }
        total += kin + pot;
    }
    return total;
}

void criterion_1_spectral() {
    std::vector<InteractionMatrix> models = {
        build_moshinsky(1.0, -0.25, 2), build_moshinsky(1.0, 0.5, 2),
        build_moshinsky(1.0, 2.0, 2),   build_identical_1d(1.0, -0.3, 3),
        build_identical_1d(1.0, 0.5, 3), build_identical_1d(1.0, 1.0, 3),
        build_chain_1d(1.0, 1.0, 3),    random_pd4(20240817)};
    double worst = 0.0;
    bool ok = true;
    for (const auto& D : models) {
        auto m = make_subset({0}, D.n());
        auto r = verify_spectrum_duality(D, ground_template(int(D.n())), m, grid64(), 1e-8);
        worst = std::max(worst, r.max_abs_diff);
        ok = ok && r.passed;
    }
    report(1, ok, "ground-state spectral duality over " + std::to_string(models.size()) +
                      " models, worst diff " + num3(worst) + " (tol 1e-8)");
}

void criterion_2_excited() {
    auto D = build_identical_1d(1.0, 0.5, 3);
    auto m = make_subset({0}, 3);
    double worst = 0.0;
    bool ok = true;
    for (const auto& nu :
         {std::vector<int>{1, 0, 0}, std::vector<int>{0, 1, 0}, std::vector<int>{1, 1, 0}}) {
        auto r = verify_spectrum_duality(D, single_template(nu), m, grid64(), 1e-7);
        worst = std::max(worst, r.max_abs_diff);
        ok = ok && r.passed;
    }
    report(2, ok, "excited-template duality (3 templates), worst diff " + num3(worst) +
                      " (tol 1e-7)");
}

void criterion_3_two_kept() {
    auto t0 = std::chrono::steady_clock::now();
    GridConfig g;
    g.G = 48;
    auto r = verify_spectrum_duality(build_identical_1d(1.0, 0.5, 3), ground_template(3),
                                     make_subset({0, 1}, 3), g, 1e-7);
    double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report(3, r.passed && secs < 120.0,
           "two-coordinate reduction duality, diff " + num3(r.max_abs_diff) +
               " (tol 1e-7), " + num3(secs) + " s");
}

void criterion_4_entropy() {
    double worst = 0.0;
    bool ok = true;
    for (double coupling : {-0.25, 0.5}) {
        auto rs = verify_entropy_duality(build_moshinsky(1.0, coupling, 2),
                                         {0.5, 1.0, 2.0, 3.0}, ground_template(2),
                                         make_subset({0}, 2), grid64(), 1e-8);
        for (const auto& r : rs) {
            worst = std::max(worst, r.max_abs_diff);
            ok = ok && r.passed;
        }
    }
    report(4, ok, "entropy duality (q = 0.5, 1, 2, 3; two couplings), worst diff " +
                      num3(worst) + " (tol 1e-8)");
}

void criterion_5_evenness() {
    auto rs = verify_evenness_identical(3, {0.2, 0.5, 1.0}, ground_template(3),
                                        make_subset({0}, 3), grid64(), 1e-8);
    double worst = 0.0;
    bool ok = true;
    for (const auto& r : rs) {
        worst = std::max(worst, r.max_abs_diff);
        ok = ok && r.passed;
    }
    report(5, ok, "spectra even in delta (3 deltas), worst diff " + num3(worst) +
                      " (tol 1e-8)");
}

void criterion_6_fourier() {
    auto m = make_subset({0}, 2);
    auto rg = verify_fourier_conjugation(build_moshinsky(1.0, 0.5, 2), ground_template(2),
                                         m, 24, grid64(), 1e-7);
    auto re = verify_fourier_conjugation(build_moshinsky(1.0, 0.5, 2),
                                         single_template({1, 0}), m, 24, grid64(), 1e-7);
    report(6, rg.passed && re.passed,
           "Fourier conjugation of basis coefficients (B = 24), diffs " +
               num3(rg.max_abs_diff) + " / " + num3(re.max_abs_diff) + " (tol 1e-7)");
}

void criterion_7_homogeneity() {
    auto m = make_subset({0}, 2);
    auto rw = verify_homogeneity(build_moshinsky(1.0, 0.5, 2), 0.01, ground_template(2),
                                 m, grid64(), 1e-8);
    auto rs = verify_homogeneity(build_moshinsky(1.0, 0.5, 2), 7.0, ground_template(2),
                                 m, grid64(), 1e-8);
    report(7, rw.passed && rs.passed,
           "coupling-strength homogeneity (c = 0.01, 7), diffs " + num3(rw.max_abs_diff) +
               " / " + num3(rs.max_abs_diff) + " (tol 1e-8)");
}

void criterion_8_self_duality() {
    std::vector<std::pair<InteractionMatrix, bool>> cases;
    cases.emplace_back(build_generic(Eigen::MatrixXd::Identity(2, 2)), true);
    cases.emplace_back(build_generic(0.5 * Eigen::MatrixXd::Identity(3, 3)), true);
    cases.emplace_back(build_generic(3.0 * Eigen::MatrixXd::Identity(4, 4)), true);
    for (double c : {-0.25, 0.5, 2.0, -0.4, 1.0})
        cases.emplace_back(build_moshinsky(1.0, c, 2), false);
    for (double d2 : {-0.3, 0.5, 1.0, 0.2})
        cases.emplace_back(build_identical_1d(1.0, d2, 3), false);
    for (int n : {2, 3, 4}) cases.emplace_back(build_chain_1d(1.0, 1.0, n), false);
    cases.emplace_back(
        build_generic((Eigen::MatrixXd(2, 2) << 1.0, 0.0, 0.0, 4.0).finished()), false);
    cases.emplace_back(build_generic(Eigen::MatrixXd(
                           (Eigen::Vector3d(1.0, 2.0, 8.0)).asDiagonal())),
                       false);
    for (unsigned seed : {7u, 11u, 13u}) cases.emplace_back(random_pd4(seed), false);

    int wrong = 0;
    for (const auto& [D, expect] : cases)
        if (is_self_dual(D, 1e-9).self_dual != expect) ++wrong;
    report(8, wrong == 0, "self-duality classification of " + std::to_string(cases.size()) +
                              " models, " + std::to_string(wrong) + " misclassified");
}

void criterion_9_cross_validation() {
    struct Case {
        InteractionMatrix D;
        std::vector<int> kept;
        int G;
    };
    std::vector<Case> cases = {{build_moshinsky(1.0, -0.25, 2), {0}, 64},
                               {build_identical_1d(1.0, 0.5, 3), {0}, 64},
                               {build_identical_1d(1.0, 0.5, 3), {0, 1}, 48},
                               {build_chain_1d(1.0, 1.0, 3), {0}, 64}};
    double worst = 0.0;
    bool ok = true;
    for (const auto& c : cases) {
        auto modes = diagonalize(c.D);
        auto sub = make_subset(c.kept, c.D.n());
        auto grid = build_grid(c.G, geo_scale(modes));
        auto kn = rdm_kernel(ground_state(modes), sub, grid, {});
        auto kg = gaussian_kernel_matrix(gaussian_ground_kernel(modes, sub), grid);
        double diff = (kn.K_real - kg.K_real).cwiseAbs().maxCoeff();
        worst = std::max(worst, diff);
        ok = ok && diff < 1e-9;
    }
    // grid-refinement stability of the leading occupation
    auto modes = diagonalize(build_moshinsky(1.0, -0.25, 2));
    auto sub = make_subset({0}, 2);
    double l0a = eigenvalues(rdm_kernel(ground_state(modes), sub,
                                        build_grid(64, geo_scale(modes)), {}),
                             8)
                     .values[0];
    double l0b = eigenvalues(rdm_kernel(ground_state(modes), sub,
                                        build_grid(128, geo_scale(modes)), {}),
                             8)
                     .values[0];
    double shift = std::abs(l0a - l0b);
    ok = ok && shift < 1e-9;
    report(9, ok, "closed-form Gaussian cross-check, worst entry diff " + num3(worst) +
                      "; G-doubling shift " + num3(shift) + " (tol 1e-9)");
}

void criterion_10_trace_energy() {
    struct Case {
        InteractionMatrix D;
        std::vector<int> nu;
    };
    std::vector<Case> cases = {
        {build_moshinsky(1.0, -0.25, 2), {0, 0}},
        {build_moshinsky(1.0, 0.5, 2), {1, 0}},
        {build_identical_1d(1.0, 0.5, 3), {0, 1, 0}},
        {build_chain_1d(1.0, 1.0, 3), {0, 0, 0}},
        {build_generic((Eigen::MatrixXd(2, 2) << 1.0, 0.0, 0.0, 4.0).finished()), {1, 0}}};
    double worst_trace = 0.0, worst_energy = 0.0;
    bool ok = true;
    for (const auto& c : cases) {
        auto modes = diagonalize(c.D);
        auto s = single_term_state(modes, c.nu);
        auto k = rdm_kernel(s, make_subset({0}, c.D.n()),
                            build_grid(64, geo_scale(modes)), {});
        double tdev = std::abs(k.trace_estimate - 1.0);
        double edev = std::abs(energy_by_quadrature(c.nu, modes) -
                               energy(c.nu, modes.eigvals));
        worst_trace = std::max(worst_trace, tdev);
        worst_energy = std::max(worst_energy, edev);
        ok = ok && tdev < 1e-8 && edev < 1e-8;
    }
    report(10, ok, "unit traces (worst dev " + num3(worst_trace) +
                       ") and mode energies by quadrature (worst dev " +
                       num3(worst_energy) + ") (tol 1e-8)");
}

void criterion_11_detectability() {
    auto D = build_moshinsky(1.0, -0.25, 2);
    InteractionMatrix Dn = D;
    Dn.entries = equivalence_normalize(D).entries;
    InteractionMatrix Dd = dual(Dn);
    Dd.entries.array() += 1e-3;
    auto mn = diagonalize(Dn);
    auto r = verify_spectrum_pair(Dn, Dd, ground_template(2),
                                  dual_state_template(ground_template(2), mn.eigvals),
                                  make_subset({0}, 2), grid64(), 1e-6, "spectral");
    report(11, !r.passed, "a 1e-3 perturbation of the dual is rejected at 1e-6 (diff " +
                              num3(r.max_abs_diff) + ")");
}

} // namespace

int main() {
    using fn = void (*)();
    fn criteria[] = {criterion_1_spectral,   criterion_2_excited,
                     criterion_3_two_kept,   criterion_4_entropy,
                     criterion_5_evenness,   criterion_6_fourier,
                     criterion_7_homogeneity, criterion_8_self_duality,
                     criterion_9_cross_validation, criterion_10_trace_energy,
                     criterion_11_detectability};
    int num = 0;
    for (fn f : criteria) {
        ++num;
        try {
            f();
        } catch (const std::exception& e) {
            report(num, false, std::string("unexpected exception: ") + e.what());
        }
    }
    std::printf("%d/11 criteria passed\n", 11 - g_failures);
    return g_failures == 0 ? 0 : 1;
}
