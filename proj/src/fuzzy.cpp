#include "fuzzygeom/fuzzy.hpp"

#include <cmath>
#include <string>

#include "fuzzygeom/eig.hpp"

namespace fuzzygeom {

namespace {

const double kPi = 3.14159265358979323846;

// Integer power of a square matrix (m >= 0).
CMatrix matpow(const CMatrix& a, int p) {
    CMatrix r = CMatrix::identity(a.dim());
    CMatrix base = a;
    for (int e = p; e > 0; e >>= 1) {
        if (e & 1) r = r * base;
        if (e > 1) base = base * base;
    }
    return r;
}

}  // namespace

FuzzySurface build_fuzzy_sphere(int N) {
    if (N < 2) throw std::invalid_argument("build_fuzzy_sphere: N must be >= 2");
    const double j = 0.5 * (N - 1);
    // Basis |m> with m = j - k, k = 0..N-1. S+ |m> = sqrt(j(j+1) - m(m+1)) |m+1>.
    CMatrix sp(N), sz(N);
    for (int k = 0; k < N; ++k) {
        const double m = j - k;
        sz(k, k) = m;
        if (k > 0) sp(k - 1, k) = std::sqrt(j * (j + 1) - m * (m + 1));
    }
    const CMatrix sm = sp.adjoint();
    const CMatrix sx = 0.5 * (sp + sm);
    const CMatrix sy = cplx(0.0, -0.5) * (sp - sm);

    FuzzySurface s;
    s.n_mat = N;
    s.hbar = 2.0 / std::sqrt(static_cast<double>(N) * N - 1.0);
    const cplx scale = s.hbar;
    s.coords = {scale * sx, scale * sy, scale * sz};
    s.normals = {s.coords};
    s.gamma_hat = CMatrix::identity(N);
    s.gamma_hat_sq = CMatrix::identity(N);
    s.label = "sphere N=" + std::to_string(N);
    return s;
}

CMatrix clock_matrix(int N) {
    CMatrix g(N);
    for (int k = 0; k < N; ++k) {
        const double ang = 2.0 * kPi * k / N;
        g(k, k) = cplx(std::cos(ang), std::sin(ang));
    }
    return g;
}

CMatrix shift_matrix(int N) {
    CMatrix h(N);
    for (int k = 0; k + 1 < N; ++k) h(k, k + 1) = 1.0;
    h(N - 1, 0) = 1.0;
    return h;
}

FuzzySurface build_fuzzy_torus(int N) {
    if (N < 2) throw std::invalid_argument("build_fuzzy_torus: N must be >= 2");
    const CMatrix g = clock_matrix(N), h = shift_matrix(N);
    const CMatrix gd = g.adjoint(), hd = h.adjoint();
    const double c = 1.0 / (2.0 * std::sqrt(2.0));

    FuzzySurface s;
    s.n_mat = N;
    s.hbar = std::sin(kPi / N);
    s.coords = {cplx(c) * (gd + g), cplx(0.0, c) * (gd - g),
                cplx(c) * (hd + h), cplx(0.0, c) * (hd - h)};
    // N_+- have components (X1, X2, +-X3, +-X4).
    s.normals = {{s.coords[0], s.coords[1], s.coords[2], s.coords[3]},
                 {s.coords[0], s.coords[1], -s.coords[2], -s.coords[3]}};
    s.gamma_hat = CMatrix::identity(N);
    s.gamma_hat_sq = CMatrix::identity(N);
    s.label = "torus N=" + std::to_string(N);
    return s;
}

CMatrix torus_quantization_map(int N, const std::vector<TorusMode>& modes, bool* aliased) {
    if (N < 2) throw std::invalid_argument("torus_quantization_map: N must be >= 2");
    if (aliased) *aliased = false;
    const CMatrix g = clock_matrix(N), h = shift_matrix(N);
    const CMatrix gi = g.adjoint(), hi = h.adjoint();
    CMatrix out(N);
    for (const auto& mode : modes) {
        if (std::abs(mode.m1) >= N || std::abs(mode.m2) >= N)
            if (aliased) *aliased = true;
        const double ang = kPi * mode.m1 * mode.m2 / N;  // omega^{m1 m2 / 2}
        const cplx phase(std::cos(ang), std::sin(ang));
        const CMatrix gp = mode.m1 >= 0 ? matpow(g, mode.m1) : matpow(gi, -mode.m1);
        const CMatrix hp = mode.m2 >= 0 ? matpow(h, mode.m2) : matpow(hi, -mode.m2);
        out += (mode.coeff * phase) * (gp * hp);
    }
    return out;
}

AxialProfile axial_profile_sphere() {
    return {[](double z) { return 1.0 - z * z; },
            [](double z) { return -z; },
            "sphere",
            {1.0, 0.0, -1.0}};
}

AxialProfile axial_profile_quartic() {
    return {[](double z) { return 1.0 - z * z * z * z; },
            [](double z) { return -2.0 * z * z * z; },
            "quartic",
            {1.0, 0.0, 0.0, 0.0, -1.0}};
}

AxialProfile axial_profile_poly(const std::vector<double>& c) {
    if (c.empty()) throw std::invalid_argument("axial_profile_poly: empty coefficient list");
    auto f2 = [c](double z) {
        double v = 0.0;
        for (size_t k = c.size(); k-- > 0;) v = v * z + c[k];
        return v;
    };
    auto ffp = [c](double z) {
        double v = 0.0;
        for (size_t k = c.size(); k-- > 1;) v = v * z + 0.5 * k * c[k];
        return v;
    };
    std::string label = "poly:";
    for (size_t k = 0; k < c.size(); ++k) label += (k ? "," : "") + std::to_string(c[k]);
    return {std::move(f2), std::move(ffp), std::move(label), c};
}

std::vector<double> axial_w_squared(int N, const AxialProfile& profile, double hbar) {
    std::vector<double> w2(N);
    double acc = 0.0;
    for (int k = 1; k <= N; ++k) {
        const double z = hbar * (N + 1 - 2 * k) / 2.0;
        acc += -2.0 * hbar * profile.ff_prime(z);
        w2[k - 1] = acc;
    }
    return w2;
}

FuzzySurface build_axial(int N, const AxialProfile& profile, double hbar) {
    if (N < 2) throw std::invalid_argument("build_axial: N must be >= 2");
    if (!(hbar > 0.0)) throw std::invalid_argument("build_axial: hbar must be positive");

    std::vector<double> z(N), ffp(N);
    for (int k = 1; k <= N; ++k) {
        z[k - 1] = hbar * (N + 1 - 2 * k) / 2.0;
        ffp[k - 1] = profile.ff_prime(z[k - 1]);
        if (profile.f_squared(z[k - 1]) < -1e-10)
            throw NumericalError("build_axial: f^2 negative at z = " + std::to_string(z[k - 1]));
    }
    const std::vector<double> w2 = axial_w_squared(N, profile, hbar);
    for (double v : w2)
        if (v < -1e-12)
            throw NumericalError("build_axial: negative w_k^2 = " + std::to_string(v) +
                                 " (hbar inadmissible for this profile)");
    if (std::abs(w2[N - 1]) > 1e-10)
        throw NumericalError("build_axial: recursion closure failed, w_N^2 = " +
                             std::to_string(w2[N - 1]));

    CMatrix w(N);
    for (int k = 0; k + 1 < N; ++k) w(k, k + 1) = std::sqrt(std::max(w2[k], 0.0));
    const CMatrix wd = w.adjoint();
    const CMatrix zmat = CMatrix::diag(z);
    const CMatrix ffp_z = CMatrix::diag(ffp);

    // Commutation relations are algebraic consequences of the recursion; verify.
    const double wn2 = std::max(1.0, w.frobenius_norm() * w.frobenius_norm());
    if ((commutator(zmat, w) - cplx(hbar) * w).max_abs() > 1e-12 * wn2)
        throw NumericalError("build_axial: [Z,W] = hbar W violated");
    if ((commutator(w, wd) + cplx(2.0 * hbar) * ffp_z).max_abs() > 1e-12 * wn2)
        throw NumericalError("build_axial: [W,W+] = -2 hbar ff'(Z) violated");

    CMatrix gamma_sq = cplx(0.5) * (w * wd + wd * w) + ffp_z * ffp_z;
    const auto gs = hermitian_eig(gamma_sq);
    if (gs.eigenvalues.front() < 1e-12 * std::max(gs.eigenvalues.back(), 1e-300))
        throw NumericalError("build_axial: gamma^2 not positive definite (min eigenvalue " +
                             std::to_string(gs.eigenvalues.front()) + "); surface degenerates");

    FuzzySurface s;
    s.n_mat = N;
    s.hbar = hbar;
    s.coords = {cplx(0.5) * (w + wd), cplx(0.0, -0.5) * (w - wd), zmat};
    s.gamma_hat = apply_function(gamma_sq, [](double x) { return std::sqrt(x); });
    s.gamma_hat_sq = std::move(gamma_sq);
    s.axial = true;
    s.axial_w = std::move(w);
    s.axial_ffp = std::move(ffp_z);
    s.label = "axial(" + profile.label + ") N=" + std::to_string(N);
    return s;
}

namespace {

using Poly = std::vector<double>;  // ascending coefficients

double poly_eval(const Poly& p, double z) {
    double v = 0.0;
    for (size_t k = p.size(); k-- > 0;) v = v * z + p[k];
    return v;
}

Poly poly_derivative(const Poly& p) {
    Poly d(p.size() > 1 ? p.size() - 1 : 1, 0.0);
    for (size_t k = 1; k < p.size(); ++k) d[k - 1] = k * p[k];
    return d;
}

// p(z + a) as a polynomial in z, by binomial expansion.
Poly poly_shift(const Poly& p, double a) {
    Poly out(p.size(), 0.0);
    for (size_t j = 0; j < p.size(); ++j) {
        double binom_pow = p[j];  // p[j] * C(j, i) * a^{j-i}, built from i = j down
        for (size_t i = j + 1; i-- > 0;) {
            out[i] += binom_pow;
            if (i > 0) binom_pow *= a * static_cast<double>(i) / (j - i + 1);
        }
    }
    return out;
}

void poly_axpy(Poly& acc, double s, const Poly& p) {
    if (acc.size() < p.size()) acc.resize(p.size(), 0.0);
    for (size_t k = 0; k < p.size(); ++k) acc[k] += s * p[k];
}

// Solve c(z + h) - c(z) = rhs(z) for a polynomial c with no constant term.
// The difference operator maps z^j to (z + h)^j - z^j, whose leading term is
// j h z^{j-1}; eliminate rhs from the highest degree down.
Poly poly_solve_difference(Poly rhs, double h) {
    while (rhs.size() > 1 && rhs.back() == 0.0) rhs.pop_back();
    Poly c(rhs.size() + 1, 0.0);
    for (size_t j = rhs.size(); j >= 1; --j) {
        const double coeff = rhs[j - 1] / (j * h);
        c[j] = coeff;
        // Subtract coeff * [(z + h)^j - z^j] from rhs.
        Poly basis(j + 1, 0.0);
        basis[j] = 1.0;
        Poly shifted = poly_shift(basis, h);
        shifted[j] -= 1.0;
        poly_axpy(rhs, -coeff, shifted);
    }
    return c;
}

// Recursion closure defect sum_l Q_l = w_N^2 (fallback for callable profiles;
// identically zero when ff' is odd).
double closure_defect(int N, const AxialProfile& profile, double hbar) {
    double d = 0.0;
    for (int k = 1; k <= N; ++k)
        d += -2.0 * hbar * profile.ff_prime(hbar * (N + 1 - 2 * k) / 2.0);
    return d;
}

}  // namespace

double axial_quantization_defect(int N, const AxialProfile& profile, double hbar) {
    if (N < 2) throw std::invalid_argument("axial_quantization_defect: N must be >= 2");
    if (!(hbar > 0.0))
        throw std::invalid_argument("axial_quantization_defect: hbar must be positive");
    if (profile.f2_coeffs.size() < 2) return closure_defect(N, profile, hbar);

    // V(z) = 1 - f^2(z); the quantum Casimir is Q = X^2 + Y^2 + V(Z) + c(Z)
    // with c chosen so that [Q, W] = 0:
    //   c(z + hbar) - c(z) = -[V(z+hbar) - V(z) - (hbar/2)(V'(z+hbar) + V'(z))].
    Poly v(profile.f2_coeffs.size(), 0.0);
    for (size_t k = 0; k < profile.f2_coeffs.size(); ++k) v[k] = -profile.f2_coeffs[k];
    v[0] += 1.0;
    const Poly vp = poly_derivative(v);
    const Poly v_sh = poly_shift(v, hbar);
    const Poly vp_sh = poly_shift(vp, hbar);
    Poly rhs;
    poly_axpy(rhs, -1.0, v_sh);
    poly_axpy(rhs, 1.0, v);
    poly_axpy(rhs, 0.5 * hbar, vp_sh);
    poly_axpy(rhs, 0.5 * hbar, vp);
    const Poly c = poly_solve_difference(std::move(rhs), hbar);

    // X^2 + Y^2 = (W W+ + W+ W)/2 is diagonal with entries (w_k^2 + w_{k-1}^2)/2.
    const std::vector<double> w2 = axial_w_squared(N, profile, hbar);
    double mean = 0.0;
    for (int k = 1; k <= N; ++k) {
        const double z = hbar * (N + 1 - 2 * k) / 2.0;
        const double xy = 0.5 * ((k < N ? w2[k - 1] : 0.0) + (k > 1 ? w2[k - 2] : 0.0));
        mean += xy + poly_eval(v, z) + poly_eval(c, z);
    }
    return mean / N - 1.0;
}

double solve_axial_hbar(int N, const AxialProfile& profile, double lo, double hi) {
    if (!(lo < hi)) throw std::invalid_argument("solve_axial_hbar: invalid bracket");
    double flo = axial_quantization_defect(N, profile, lo);
    double fhi = axial_quantization_defect(N, profile, hi);
    if (std::abs(flo) <= 1e-12) return lo;
    if (std::abs(fhi) <= 1e-12) return hi;
    if ((flo > 0.0) == (fhi > 0.0))
        throw NumericalError("solve_axial_hbar: quantization defect has no sign change on bracket");
    double mid = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        mid = 0.5 * (lo + hi);
        const double fm = axial_quantization_defect(N, profile, mid);
        if (std::abs(fm) <= 1e-12) return mid;
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    throw NumericalError("solve_axial_hbar: bisection did not reach |d| <= 1e-12 in 200 iterations");
}

std::vector<std::pair<double, double>> axial_hbar_scan(int N, const AxialProfile& profile,
                                                       double lo, double hi, int points) {
    if (points < 2) throw std::invalid_argument("axial_hbar_scan: need at least 2 points");
    std::vector<std::pair<double, double>> brackets;
    double prev_x = lo, prev_f = axial_quantization_defect(N, profile, lo);
    for (int k = 1; k < points; ++k) {
        const double x = lo + (hi - lo) * k / (points - 1);
        const double f = axial_quantization_defect(N, profile, x);
        if ((prev_f > 0.0) != (f > 0.0) || prev_f == 0.0) brackets.emplace_back(prev_x, x);
        prev_x = x;
        prev_f = f;
    }
    return brackets;
}

DeformationFixture make_deformation_fixture(const FuzzySurface& base, double s) {
    if (!(s > 0.0) || s > 2.0)
        throw std::invalid_argument("make_deformation_fixture: s must be in (0, 2]");
    DeformationFixture fx;
    fx.base = base;
    fx.s = s;
    fx.theta_hat = CMatrix(base.n_mat);
    fx.theta_hat(0, 0) = std::pow(base.hbar, s);
    return fx;
}

}  // namespace fuzzygeom
