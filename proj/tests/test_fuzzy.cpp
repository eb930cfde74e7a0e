#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fuzzygeom/eig.hpp"
#include "fuzzygeom/fuzzy.hpp"

using namespace fuzzygeom;

namespace {
const double kPi = 3.14159265358979323846;
}

TEST_CASE("fuzzy sphere: hbar and su(2) commutators") {
    const FuzzySurface s = build_fuzzy_sphere(2);
    CHECK(s.hbar == doctest::Approx(2.0 / std::sqrt(3.0)).epsilon(1e-15));

    for (int n : {2, 3, 7, 16}) {
        const FuzzySurface t = build_fuzzy_sphere(n);
        CHECK(t.hbar == doctest::Approx(2.0 / std::sqrt(n * n - 1.0)).epsilon(1e-15));
        // [X1, X2] = i hbar X3 (cyclic)
        for (int i = 0; i < 3; ++i) {
            const int j = (i + 1) % 3, k = (i + 2) % 3;
            const CMatrix lhs = commutator(t.coords[i], t.coords[j]);
            const CMatrix rhs = cplx(0.0, t.hbar) * t.coords[k];
            CHECK((lhs - rhs).max_abs() < 1e-13);
        }
        // Casimir: sum (X^i)^2 = I
        CMatrix cas(n);
        for (const auto& x : t.coords) cas += x * x;
        CHECK((cas - CMatrix::identity(n)).max_abs() < 1e-13);
        // Hermitian coordinates, identity gamma, normals = coordinates.
        for (const auto& x : t.coords) CHECK(x.hermiticity_defect() < 1e-14);
        CHECK((t.gamma_hat - CMatrix::identity(n)).max_abs() == 0.0);
        REQUIRE(t.normals.size() == 1);
        for (int c = 0; c < 3; ++c)
            CHECK((t.normals[0][c] - t.coords[c]).max_abs() == 0.0);
    }
}

TEST_CASE("clock and shift: hg = omega gh and unitarity") {
    for (int n : {2, 3, 8}) {
        const CMatrix g = clock_matrix(n), h = shift_matrix(n);
        const cplx omega(std::cos(2.0 * kPi / n), std::sin(2.0 * kPi / n));
        CHECK((h * g - omega * (g * h)).max_abs() < 1e-14);
        CHECK((g * g.adjoint() - CMatrix::identity(n)).max_abs() < 1e-14);
        CHECK((h * h.adjoint() - CMatrix::identity(n)).max_abs() < 1e-14);
    }
}

TEST_CASE("fuzzy torus: commutator sum identity and normals") {
    for (int n : {2, 4, 9, 16}) {
        const FuzzySurface s = build_fuzzy_torus(n);
        CHECK(s.hbar == doctest::Approx(std::sin(kPi / n)).epsilon(1e-15));
        // -hbar^-2 sum_{ij} [X^i, X^j]^2 = 2 I
        CMatrix acc(n);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                const CMatrix c = commutator(s.coords[i], s.coords[j]);
                acc += c * c;
            }
        const CMatrix lhs = cplx(-1.0 / (s.hbar * s.hbar)) * acc;
        CHECK((lhs - cplx(2.0) * CMatrix::identity(n)).max_abs() < 1e-12);
        // The two normal frames differ by the sign of the last two components.
        REQUIRE(s.normals.size() == 2);
        CHECK((s.normals[0][2] + s.normals[1][2]).max_abs() == 0.0);
        CHECK((s.normals[0][0] - s.normals[1][0]).max_abs() == 0.0);
    }
}

TEST_CASE("torus quantization map: single modes and aliasing flag") {
    const int n = 8;
    const CMatrix g = clock_matrix(n), h = shift_matrix(n);

    // Mode (1, 0) is g itself; mode (0, 1) is h.
    CHECK((torus_quantization_map(n, {{1, 0, 1.0}}) - g).max_abs() < 1e-14);
    CHECK((torus_quantization_map(n, {{0, 1, 1.0}}) - h).max_abs() < 1e-14);

    // Exact single-mode bracket identity: for f = e^{i m.u}, g = e^{i m'.u},
    // (1/i sin(pi/N)) [T(f), T(g)] = -2 (sin(pi (m1 m2' - m2 m1')/N)/sin(pi/N))
    // * ... realized as T of the rescaled bracket; check the commutator of two
    // modes is again a single mode with the closed-form coefficient.
    const int m1 = 1, m2 = 2, q1 = 3, q2 = 1;
    const CMatrix tf = torus_quantization_map(n, {{m1, m2, 1.0}});
    const CMatrix tg = torus_quantization_map(n, {{q1, q2, 1.0}});
    const double cross = m1 * q2 - m2 * q1;
    const cplx coeff(0.0, -2.0 * std::sin(kPi * cross / n));
    const CMatrix expected = torus_quantization_map(n, {{m1 + q1, m2 + q2, coeff}});
    CHECK((commutator(tf, tg) - expected).max_abs() < 1e-12);

    bool aliased = false;
    torus_quantization_map(n, {{n, 0, 1.0}}, &aliased);
    CHECK(aliased);
    aliased = true;
    torus_quantization_map(n, {{n - 1, -(n - 1), 1.0}}, &aliased);
    CHECK(!aliased);
}

TEST_CASE("axial N=2 hand values (quartic profile at hbar = 2/sqrt(3))") {
    const double hbar = 2.0 / std::sqrt(3.0);
    const AxialProfile prof = axial_profile_quartic();
    const auto w2 = axial_w_squared(2, prof, hbar);
    REQUIRE(w2.size() == 2);
    // z_1 = hbar/2 = 1/sqrt(3); Q_1 = 4 hbar z_1^3 = 8/9.
    CHECK(w2[0] == doctest::Approx(8.0 / 9.0).epsilon(1e-14));
    CHECK(std::abs(w2[1]) < 1e-14);

    const FuzzySurface s = build_axial(2, prof, hbar);
    CHECK(std::abs(s.coords[2](0, 0).real() - 1.0 / std::sqrt(3.0)) < 1e-14);
    CHECK(std::abs(s.coords[2](1, 1).real() + 1.0 / std::sqrt(3.0)) < 1e-14);

    // Casimir X^2 + Y^2 + Z^4 + hbar^2 Z^2 = I.
    const CMatrix& z = s.coords[2];
    CMatrix q = s.coords[0] * s.coords[0] + s.coords[1] * s.coords[1];
    q += z * z * z * z + cplx(hbar * hbar) * (z * z);
    CHECK((q - CMatrix::identity(2)).max_abs() < 1e-13);
}

TEST_CASE("axial quartic: published closed form for w_k^2") {
    for (int n : {2, 4, 8, 16}) {
        const double hbar = 2.0 / std::sqrt(n * n - 1.0);
        const auto w2 = axial_w_squared(n, axial_profile_quartic(), hbar);
        const double h4 = hbar * hbar * hbar * hbar;
        for (int k = 1; k <= n; ++k) {
            const double np1 = n + 1.0;
            const double closed =
                0.5 * h4 *
                (np1 * np1 * np1 * k - 3.0 * np1 * np1 * k * (k + 1.0) +
                 2.0 * np1 * k * (k + 1.0) * (2.0 * k + 1.0) -
                 2.0 * double(k) * k * (k + 1.0) * (k + 1.0));
            const double scale = std::max(1.0, std::abs(closed));
            CHECK(std::abs(w2[k - 1] - closed) < 1e-12 * scale);
        }
    }
}

TEST_CASE("axial sphere profile reproduces the su(2) representation") {
    for (int n : {2, 3, 5, 12}) {
        const double hbar = 2.0 / std::sqrt(n * n - 1.0);
        const FuzzySurface ax = build_axial(n, axial_profile_sphere(), hbar);
        const FuzzySurface sp = build_fuzzy_sphere(n);
        // Same coordinates up to basis ordering: here both use z descending.
        for (int c = 0; c < 3; ++c)
            CHECK((ax.coords[c] - sp.coords[c]).max_abs() < 1e-13);
        // gamma_hat^2 = I for the round sphere at the quantized hbar.
        CHECK((ax.gamma_hat_sq - CMatrix::identity(n)).max_abs() < 1e-12);
    }
}

TEST_CASE("axial commutation relations hold for a generic polynomial profile") {
    // f^2 = 1 - 0.3 z^2 - 0.7 z^4, admissible at moderate hbar.
    const AxialProfile prof = axial_profile_poly({1.0, 0.0, -0.3, 0.0, -0.7});
    const int n = 6;
    const double hbar = solve_axial_hbar(n, prof, 1e-3, 2.0);
    const FuzzySurface s = build_axial(n, prof, hbar);
    const CMatrix w = s.axial_w;
    const CMatrix& z = s.coords[2];
    CHECK((commutator(z, w) - cplx(hbar) * w).max_abs() < 1e-12);
    CHECK((commutator(w, w.adjoint()) + cplx(2.0 * hbar) * s.axial_ffp).max_abs() < 1e-12);
}

TEST_CASE("quantization defect closed forms: sphere and quartic profiles") {
    for (int n : {2, 3, 8, 20}) {
        for (double hbar : {0.05, 0.3, 2.0 / std::sqrt(n * n - 1.0)}) {
            const double ds = axial_quantization_defect(n, axial_profile_sphere(), hbar);
            const double expect_s = hbar * hbar * (n * n - 1.0) / 4.0 - 1.0;
            CHECK(std::abs(ds - expect_s) < 1e-12 * std::max(1.0, std::abs(expect_s)));

            const double dq = axial_quantization_defect(n, axial_profile_quartic(), hbar);
            const double p = hbar * hbar * (n * n - 1.0) / 4.0;
            const double expect_q = p * p - 1.0;
            CHECK(std::abs(dq - expect_q) < 1e-12 * std::max(1.0, std::abs(expect_q)));
        }
    }
}

TEST_CASE("solve_axial_hbar recovers 2/sqrt(N^2-1) for both shipped profiles") {
    for (int n : {2, 4, 8, 16, 32}) {
        const double expect = 2.0 / std::sqrt(n * n - 1.0);
        for (const auto& prof : {axial_profile_sphere(), axial_profile_quartic()}) {
            const double got = solve_axial_hbar(n, prof, 1e-4, 3.0);
            CHECK(std::abs(got - expect) < 1e-9);
        }
    }
}

TEST_CASE("axial hbar scan brackets the quantization root") {
    const int n = 8;
    const double expect = 2.0 / std::sqrt(n * n - 1.0);
    const auto brackets = axial_hbar_scan(n, axial_profile_quartic(), 1e-3, 2.0, 101);
    REQUIRE(!brackets.empty());
    bool found = false;
    for (const auto& [lo, hi] : brackets)
        if (lo <= expect && expect <= hi) found = true;
    CHECK(found);
}

TEST_CASE("build_axial rejects an inadmissible hbar") {
    // At hbar = 2, z_1 = 3 for N = 2 and f^2(z) = 1 - z^4 < 0.
    CHECK_THROWS_AS(build_axial(2, axial_profile_quartic(), 3.0), NumericalError);
    CHECK_THROWS(build_axial(2, axial_profile_quartic(), 0.0));
}

TEST_CASE("solve_axial_hbar refuses a bracket without a sign change") {
    CHECK_THROWS_AS(solve_axial_hbar(4, axial_profile_quartic(), 1e-4, 1e-3), NumericalError);
}

TEST_CASE("deformation fixture: theta_hat = diag(hbar^s, 0, ..., 0)") {
    const FuzzySurface base = build_fuzzy_torus(16);
    const DeformationFixture fx = make_deformation_fixture(base, 0.5);
    CHECK(fx.theta_hat.dim() == 16);
    CHECK(std::abs(fx.theta_hat(0, 0).real() - std::pow(base.hbar, 0.5)) < 1e-15);
    CHECK(fx.theta_hat(1, 1) == cplx(0.0, 0.0));
    CHECK_THROWS(make_deformation_fixture(base, 0.0));
    CHECK_THROWS(make_deformation_fixture(base, 2.5));
}

TEST_CASE("deformation probes: first- and second-order closed forms") {
    for (int n : {8, 16}) {
        const FuzzySurface base = build_fuzzy_torus(n);
        const double hbar = base.hbar;
        const CMatrix h = shift_matrix(n);
        const CMatrix big_h = h + h.adjoint();

        // s = 1/2: ||(1/i hbar)[theta, h + h+]|| = sqrt(2) hbar^{s-1}.
        {
            const DeformationFixture fx = make_deformation_fixture(base, 0.5);
            const CMatrix a = cplx(0.0, -1.0 / hbar) * commutator(fx.theta_hat, big_h);
            const double expect = std::sqrt(2.0) * std::pow(hbar, 0.5 - 1.0);
            CHECK(operator_norm(a) == doctest::Approx(expect).epsilon(1e-12));
        }
        // s = 3/2: (2 sqrt(2)/hbar^2) ||[[theta, i(h+ - h)], i(h+ - h)]||
        //          = 2 sqrt(2) (2 + sqrt(6)) hbar^{s-2}.
        {
            const DeformationFixture fx = make_deformation_fixture(base, 1.5);
            const CMatrix b = cplx(0.0, 1.0) * (h.adjoint() - h);
            const CMatrix c2 = commutator(commutator(fx.theta_hat, b), b);
            const double got = 2.0 * std::sqrt(2.0) / (hbar * hbar) * operator_norm(c2);
            const double expect =
                2.0 * std::sqrt(2.0) * (2.0 + std::sqrt(6.0)) * std::pow(hbar, 1.5 - 2.0);
            CHECK(got == doctest::Approx(expect).epsilon(1e-8));
        }
    }
}
