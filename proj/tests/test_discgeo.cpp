#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fuzzygeom/discgeo.hpp"
#include "fuzzygeom/eig.hpp"

using namespace fuzzygeom;

TEST_CASE("formulation names round trip") {
    for (auto f : {CurvatureFormulation::EpsilonR3, CurvatureFormulation::BracketsRm,
                   CurvatureFormulation::Normals, CurvatureFormulation::AxialClosedForm})
        CHECK(formulation_from_name(formulation_name(f)) == f);
    CHECK_THROWS_AS(formulation_from_name("bogus"), std::invalid_argument);
}

TEST_CASE("p_hat on the fuzzy sphere: P^1_2 = +X^3") {
    const FuzzySurface s = build_fuzzy_sphere(4);
    const auto p = p_hat(s);
    CHECK((p[0][1] - s.coords[2]).max_abs() < 1e-13);
    CHECK((p[1][0] + s.coords[2]).max_abs() < 1e-13);
    CHECK(p[0][0].max_abs() == 0.0);
}

TEST_CASE("discrete derivation on the fuzzy sphere: D^2(X^1) = +X^3") {
    const FuzzySurface s = build_fuzzy_sphere(5);
    const CMatrix d = discrete_derivation(s, 1, s.coords[0]);
    CHECK((d - s.coords[2]).max_abs() < 1e-13);
}

TEST_CASE("sphere curvature: K_hat = I in every applicable formulation") {
    for (int n : {2, 3, 8, 16}) {
        const FuzzySurface s = build_fuzzy_sphere(n);
        for (auto f : {CurvatureFormulation::EpsilonR3, CurvatureFormulation::BracketsRm,
                       CurvatureFormulation::Normals}) {
            const auto r = discrete_curvature(s, f);
            CHECK((r.k_hat - CMatrix::identity(n)).max_abs() < 1e-11);
            CHECK(r.hermiticity_defect < 1e-12);
        }
    }
}

TEST_CASE("sphere Euler characteristic: chi_hat = 2N/sqrt(N^2-1)") {
    for (int n : {2, 5, 16, 33}) {
        const FuzzySurface s = build_fuzzy_sphere(n);
        const auto r = discrete_curvature(s, CurvatureFormulation::Normals);
        const double chi = euler_characteristic_hat(s, r.k_hat);
        CHECK(std::abs(chi - 2.0 * n / std::sqrt(n * n - 1.0)) < 1e-11);
    }
}

TEST_CASE("torus curvature: K_hat = 0, both formulations, chi_hat = 0") {
    for (int n : {3, 8, 16}) {
        const FuzzySurface s = build_fuzzy_torus(n);
        for (auto f : {CurvatureFormulation::BracketsRm, CurvatureFormulation::Normals}) {
            const auto r = discrete_curvature(s, f);
            CHECK(r.k_hat.max_abs() < 1e-11);
            CHECK(std::abs(euler_characteristic_hat(s, r.k_hat)) < 1e-11);
        }
    }
}

TEST_CASE("formulation gates: epsilon needs m=3, axial needs axial data") {
    const FuzzySurface torus = build_fuzzy_torus(4);  // m = 4
    CHECK_THROWS_AS(discrete_curvature(torus, CurvatureFormulation::EpsilonR3),
                    std::invalid_argument);
    const FuzzySurface sphere = build_fuzzy_sphere(4);
    CHECK_THROWS_AS(discrete_curvature(sphere, CurvatureFormulation::AxialClosedForm),
                    std::invalid_argument);
}

TEST_CASE("cross-formulation agreement") {
    // Sphere and torus: BracketsRm vs Normals.
    for (int n : {4, 12}) {
        const FuzzySurface sp = build_fuzzy_sphere(n);
        const auto a = discrete_curvature(sp, CurvatureFormulation::BracketsRm);
        const auto b = discrete_curvature(sp, CurvatureFormulation::Normals);
        CHECK((a.k_hat - b.k_hat).max_abs() < 1e-8);

        const FuzzySurface to = build_fuzzy_torus(n);
        const auto c = discrete_curvature(to, CurvatureFormulation::BracketsRm);
        const auto d = discrete_curvature(to, CurvatureFormulation::Normals);
        CHECK((c.k_hat - d.k_hat).max_abs() < 1e-8);
    }
    // Axial quartic: EpsilonR3 vs AxialClosedForm.
    for (int n : {4, 8}) {
        const double hbar = 2.0 / std::sqrt(n * n - 1.0);
        const FuzzySurface ax = build_axial(n, axial_profile_quartic(), hbar);
        const auto a = discrete_curvature(ax, CurvatureFormulation::EpsilonR3);
        const auto b = discrete_curvature(ax, CurvatureFormulation::AxialClosedForm);
        CHECK((a.k_hat - b.k_hat).max_abs() < 1e-10);
    }
}

TEST_CASE("axial closed-form curvature matches an independent scalar recursion") {
    const int n = 12;
    const double hbar = 2.0 / std::sqrt(n * n - 1.0);
    const AxialProfile prof = axial_profile_quartic();
    const FuzzySurface s = build_axial(n, prof, hbar);
    const auto r = discrete_curvature(s, CurvatureFormulation::AxialClosedForm);
    CHECK(r.k_hat.is_diagonal());

    const auto w2 = axial_w_squared(n, prof, hbar);
    auto wsq = [&](int k) { return (k >= 1 && k < n) ? w2[k - 1] : 0.0; };
    for (int k = 1; k <= n; ++k) {
        const double zk = hbar * (n + 1 - 2 * k) / 2.0;
        const double zkp = hbar * (n + 1 - 2 * (k + 1)) / 2.0;
        const double zkm = hbar * (n + 1 - 2 * (k - 1)) / 2.0;
        const double p = prof.ff_prime(zk);
        const double g2 = 0.5 * (wsq(k) + wsq(k - 1)) + p * p;
        const double num =
            p * p + (0.5 / hbar) * (wsq(k) * (prof.ff_prime(zkp) - p) +
                                    wsq(k - 1) * (p - prof.ff_prime(zkm)));
        const double expect = num / (g2 * g2);
        CHECK(std::abs(r.k_hat(k - 1, k - 1).real() - expect) < 1e-12);
    }
}

TEST_CASE("laplacian spectrum: fuzzy sphere N=2 and N=3 exact multiplets") {
    {
        const auto rep = laplacian_spectrum(build_fuzzy_sphere(2));
        REQUIRE(rep.eigenvalues.size() == 4);
        CHECK(std::abs(rep.eigenvalues[0]) < 1e-9);
        for (int i = 1; i < 4; ++i) CHECK(std::abs(rep.eigenvalues[i] - 2.0) < 1e-9);
    }
    {
        const auto rep = laplacian_spectrum(build_fuzzy_sphere(3));
        REQUIRE(rep.eigenvalues.size() == 9);
        // l(l+1) multiplets: {0 x1, 2 x3, 6 x5}.
        CHECK(std::abs(rep.eigenvalues[0]) < 1e-9);
        for (int i = 1; i < 4; ++i) CHECK(std::abs(rep.eigenvalues[i] - 2.0) < 1e-9);
        for (int i = 4; i < 9; ++i) CHECK(std::abs(rep.eigenvalues[i] - 6.0) < 1e-9);
        CHECK(rep.kappa == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(rep.lambda_min_nonzero == doctest::Approx(2.0).epsilon(1e-9));
        CHECK(rep.bound_satisfied);
    }
}

TEST_CASE("laplacian spectrum: sphere bound is an equality, torus kappa = 0") {
    for (int n = 2; n <= 8; ++n) {
        const auto rep = laplacian_spectrum(build_fuzzy_sphere(n));
        CHECK(std::abs(rep.kappa - 1.0) < 1e-9);
        CHECK(std::abs(rep.lambda_min_nonzero - 2.0) < 1e-9);
        CHECK(rep.bound_satisfied);
    }
    for (int n = 4; n <= 8; ++n) {
        const auto rep = laplacian_spectrum(build_fuzzy_torus(n));
        CHECK(std::abs(rep.kappa) < 1e-10);
        for (double lam : rep.eigenvalues) CHECK(lam > -1e-8);
        CHECK(rep.bound_satisfied);
    }
}

TEST_CASE("laplacian spectrum cap refuses oversized superoperators") {
    CHECK_THROWS_AS(laplacian_spectrum(build_fuzzy_sphere(5), 16), std::invalid_argument);
}

TEST_CASE("discrete laplacian matches the superoperator route on a probe") {
    const FuzzySurface s = build_fuzzy_sphere(4);
    // Delta(X^i) = -2 X^i: the coordinates are the l = 1 eigenmatrices and the
    // operator itself is negative semi-definite (spectrum reports -Delta).
    for (int i = 0; i < 3; ++i) {
        const CMatrix d = discrete_laplacian(s, s.coords[i]);
        CHECK((d + cplx(2.0) * s.coords[i]).max_abs() < 1e-12);
    }
}

TEST_CASE("regularization defects: torus probes exact brackets, shrinking products") {
    const auto reports = regularization_defects(
        [](int n) { return build_fuzzy_torus(n); }, {4, 8, 16}, torus_probes());
    REQUIRE(reports.size() == 3);
    for (const auto& r : reports) CHECK(r.commutator_defect < 1e-12);
    CHECK(reports[1].product_defect < reports[0].product_defect);
    CHECK(reports[2].product_defect < reports[1].product_defect);
    CHECK(reports[2].trace_defect < reports[0].trace_defect);
}

TEST_CASE("regularization defects: sphere probe family converges") {
    const auto reports = regularization_defects(
        [](int n) { return build_fuzzy_sphere(n); }, {4, 8, 16}, sphere_probes());
    REQUIRE(reports.size() == 3);
    CHECK(reports[2].product_defect < reports[0].product_defect);
    for (const auto& r : reports) {
        CHECK(r.product_defect >= 0.0);
        CHECK(std::isfinite(r.trace_defect));
    }
}
