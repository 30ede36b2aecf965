#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>

#include "harmdual/model.hpp"

using namespace harmdual;
using Catch::Matchers::ContainsSubstring;

namespace {
Eigen::MatrixXd mat2(double a, double b, double c, double d) {
    Eigen::MatrixXd m(2, 2);
    m << a, b, c, d;
    return m;
}
} // namespace

TEST_CASE("identical_1d builder structure", "[model]") {
    SECTION("noninteracting is the identity") {
        auto D = build_identical_1d(1.0, 0.0, 3);
        CHECK((D.entries - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() == 0.0);
    }
    SECTION("two particles, repulsive-free coupling") {
        auto D = build_identical_1d(1.0, 0.5, 2);
        CHECK(D.entries(0, 0) == 1.5);
        CHECK(D.entries(1, 1) == 1.5);
        CHECK(D.entries(0, 1) == -0.5);
        CHECK(D.entries(1, 0) == -0.5);
    }
    SECTION("negative coupling still positive definite") {
        auto D = build_identical_1d(1.0, -0.4, 2);
        CHECK(D.entries(0, 0) == Catch::Approx(0.6));
        CHECK(D.entries(0, 1) == Catch::Approx(0.4));
        CHECK(validate(D).ok);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(D.entries);
        CHECK(es.eigenvalues()(0) == Catch::Approx(0.2));
        CHECK(es.eigenvalues()(1) == Catch::Approx(1.0));
    }
    SECTION("PD violation rejected with both eigenvalue expressions") {
        try {
            build_identical_1d(1.0, -0.5, 2);
            FAIL("expected validation_error");
        } catch (const validation_error& e) {
            std::string msg = e.what();
            CHECK_THAT(msg, ContainsSubstring("d1"));
            CHECK_THAT(msg, ContainsSubstring("d1 + n*d2"));
        }
        CHECK_THROWS_AS(build_identical_1d(-1.0, 1.0, 3), validation_error);
    }
}

TEST_CASE("chain builder structure", "[model]") {
    SECTION("zero spring gives the identity") {
        auto D = build_chain_1d(0.0, 1.0, 4);
        CHECK((D.entries - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() == 0.0);
    }
    SECTION("two sites") {
        auto D = build_chain_1d(1.0, 1.0, 2);
        CHECK(D.entries(0, 0) == 2.0);
        CHECK(D.entries(0, 1) == -1.0);
    }
    SECTION("three sites: interior site has two neighbours") {
        auto D = build_chain_1d(1.0, 1.0, 3);
        CHECK(D.entries(0, 0) == 2.0);
        CHECK(D.entries(1, 1) == 3.0);
        CHECK(D.entries(2, 2) == 2.0);
        CHECK(D.entries(0, 1) == -1.0);
        CHECK(D.entries(1, 2) == -1.0);
        CHECK(D.entries(0, 2) == 0.0);
    }
    SECTION("rejects negative spring and non-positive trap") {
        CHECK_THROWS_AS(build_chain_1d(-0.1, 1.0, 3), validation_error);
        CHECK_THROWS_AS(build_chain_1d(1.0, 0.0, 3), validation_error);
    }
}

TEST_CASE("validation", "[model]") {
    SECTION("identity passes with floor 1") {
        auto r = validate(build_generic(Eigen::MatrixXd::Identity(3, 3)));
        CHECK(r.ok);
        CHECK(r.eigenvalue_floor == Catch::Approx(1.0));
    }
    SECTION("indefinite matrix rejected") {
        auto r = validate(build_generic(mat2(1, 2, 2, 1)));
        CHECK_FALSE(r.ok);
        CHECK_THAT(r.message, ContainsSubstring("not positive definite"));
        CHECK(r.eigenvalue_floor == Catch::Approx(-1.0));
    }
    SECTION("asymmetry rejected, never repaired") {
        auto r = validate(build_generic(mat2(1, 0.1, 0.2, 1)));
        CHECK_FALSE(r.ok);
        CHECK_THAT(r.message, ContainsSubstring("asymmetric"));
    }
    SECTION("builders always emit valid matrices") {
        CHECK(validate(build_identical_1d(2.0, -0.3, 4)).ok);
        CHECK(validate(build_chain_1d(0.7, 0.2, 5)).ok);
        CHECK(validate(build_moshinsky(1.0, 2.0, 2)).ok);
    }
}

TEST_CASE("dual model is the inverse", "[model]") {
    SECTION("identity is its own dual") {
        auto Dd = dual(build_generic(Eigen::MatrixXd::Identity(3, 3)));
        CHECK((Dd.entries - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-14);
    }
    SECTION("diagonal inverse") {
        auto Dd = dual(build_generic(Eigen::Vector2d(1.0, 4.0).asDiagonal()));
        CHECK(Dd.entries(0, 0) == Catch::Approx(1.0).margin(1e-14));
        CHECK(Dd.entries(1, 1) == Catch::Approx(0.25).margin(1e-14));
        CHECK(std::abs(Dd.entries(0, 1)) < 1e-14);
    }
    SECTION("2x2 coupled model") {
        auto Dd = dual(build_identical_1d(1.0, 0.5, 2));
        CHECK(Dd.entries(0, 0) == Catch::Approx(0.75).margin(1e-14));
        CHECK(Dd.entries(0, 1) == Catch::Approx(0.25).margin(1e-14));
    }
    SECTION("involution") {
        auto D = build_chain_1d(1.3, 0.4, 4);
        auto Ddd = dual(dual(D));
        CHECK((Ddd.entries - D.entries).cwiseAbs().maxCoeff() < 1e-12);
    }
    SECTION("output is exactly symmetric") {
        auto Dd = dual(build_chain_1d(0.9, 0.1, 5));
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j) CHECK(Dd.entries(i, j) == Dd.entries(j, i));
    }
    SECTION("ill-conditioned input rejected") {
        // The relative PD floor already rejects anything near-singular enough
        // to endanger the inverse, so rejection surfaces as validation.
        Eigen::MatrixXd bad = Eigen::Vector2d(1.0, 2.1e12).asDiagonal();
        CHECK_THROWS_AS(dual(build_generic(bad)), validation_error);
        Eigen::MatrixXd fine = Eigen::Vector2d(1.0, 1e9).asDiagonal();
        CHECK(dual(build_generic(fine)).entries(1, 1) == Catch::Approx(1e-9));
    }
}

TEST_CASE("coupling-ratio involution", "[model]") {
    CHECK(dual_ratio(0.0, 5) == 0.0);
    CHECK(dual_ratio(1.0, 2) == Catch::Approx(-1.0 / 3.0));
    CHECK(dual_ratio(-0.25, 2) == Catch::Approx(0.5));
    SECTION("involution over a parameter sweep") {
        for (double r : {-0.3, -0.1, 0.0, 0.4, 1.7, 12.0}) {
            CHECK(dual_ratio(dual_ratio(r, 3), 3) == Catch::Approx(r).margin(1e-14));
        }
    }
    CHECK_THROWS_AS(dual_ratio(-0.5, 2), validation_error);
}

TEST_CASE("equivalence normalization", "[model]") {
    SECTION("identity untouched") {
        auto z = equivalence_normalize(build_generic(Eigen::MatrixXd::Identity(2, 2)));
        CHECK(z.scale_applied == Catch::Approx(1.0));
    }
    SECTION("isotropic scale removed") {
        auto z = equivalence_normalize(build_generic(4.0 * Eigen::MatrixXd::Identity(2, 2)));
        CHECK(z.scale_applied == Catch::Approx(4.0));
        CHECK((z.entries - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-14);
    }
    SECTION("diag(1,4) maps to diag(0.5,2)") {
        auto z = equivalence_normalize(build_generic(Eigen::Vector2d(1.0, 4.0).asDiagonal()));
        CHECK(z.scale_applied == Catch::Approx(2.0));
        CHECK(z.entries(0, 0) == Catch::Approx(0.5));
        CHECK(z.entries(1, 1) == Catch::Approx(2.0));
    }
    SECTION("determinant is 1 afterwards") {
        auto D = build_identical_1d(3.0, 1.7, 4);
        auto z = equivalence_normalize(D);
        CHECK(z.entries.determinant() == Catch::Approx(1.0).margin(1e-10));
        CHECK((z.entries * z.scale_applied - D.entries).cwiseAbs().maxCoeff() < 1e-12);
    }
    SECTION("normalization commutes with dual on class representatives") {
        auto D = build_chain_1d(0.8, 0.3, 3);
        auto a = equivalence_normalize(dual(dual(D)));
        auto b = equivalence_normalize(D);
        CHECK((a.entries - b.entries).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("self-duality singles out isotropic traps", "[model]") {
    CHECK(is_self_dual(build_generic(3.0 * Eigen::MatrixXd::Identity(4, 4)), 1e-9).self_dual);
    CHECK_FALSE(is_self_dual(build_identical_1d(1.0, 0.5, 2), 1e-9).self_dual);
    CHECK_FALSE(
        is_self_dual(build_generic(Eigen::Vector2d(1.0, 2.0).asDiagonal()), 1e-9).self_dual);
    SECTION("witness is the max deviation of normalized representatives") {
        auto r = is_self_dual(build_identical_1d(1.0, 0.5, 2), 1e-9);
        CHECK(r.witness > 1e-2);
    }
}

TEST_CASE("dual coupling has opposite sign for identical particles", "[model]") {
    for (double r : {-0.3, 0.5, 2.0}) {
        auto D = build_identical_1d(1.0, r, 3);
        auto Dd = dual(D);
        // off-diagonal is -d2; the dual's effective coupling flips sign
        CHECK(D.entries(0, 1) * Dd.entries(0, 1) < 0.0);
    }
}
