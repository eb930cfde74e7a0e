#include "fuzzygeom/discgeo.hpp"

#include <cmath>

#include "fuzzygeom/eig.hpp"
#include "fuzzygeom/superop.hpp"

namespace fuzzygeom {

namespace {

CMatrix gamma_power(const FuzzySurface& s, double expo) {
    // gamma_hat_sq is the authoritative positive matrix; gamma^{2*expo2}...
    // expo is the power of gamma itself.
    if (s.gamma_hat_sq.dim() == 0 || s.gamma_hat_sq.is_diagonal()) {
        // Covers identity and the diagonal axial gamma^2.
        CMatrix base = s.gamma_hat_sq.dim() ? s.gamma_hat_sq : CMatrix::identity(s.n_mat);
        return apply_function(base, [expo](double x) { return std::pow(x, 0.5 * expo); });
    }
    return apply_function(s.gamma_hat_sq, [expo](double x) { return std::pow(x, 0.5 * expo); });
}

double rel_hermiticity_defect(const CMatrix& k) {
    const double nk = operator_norm(k);
    return operator_norm(k - k.adjoint()) / std::max(1.0, nk);
}

}  // namespace

const char* formulation_name(CurvatureFormulation f) {
    switch (f) {
        case CurvatureFormulation::EpsilonR3: return "epsilon";
        case CurvatureFormulation::BracketsRm: return "brackets";
        case CurvatureFormulation::Normals: return "normals";
        case CurvatureFormulation::AxialClosedForm: return "axial";
    }
    return "?";
}

CurvatureFormulation formulation_from_name(const std::string& name) {
    if (name == "epsilon") return CurvatureFormulation::EpsilonR3;
    if (name == "brackets") return CurvatureFormulation::BracketsRm;
    if (name == "normals") return CurvatureFormulation::Normals;
    if (name == "axial") return CurvatureFormulation::AxialClosedForm;
    throw std::invalid_argument("unknown curvature formulation: " + name);
}

std::vector<std::vector<CMatrix>> p_hat(const FuzzySurface& s) {
    const int m = static_cast<int>(s.coords.size());
    const cplx inv_ih(0.0, -1.0 / s.hbar);  // 1/(i hbar)
    std::vector<std::vector<CMatrix>> p(m, std::vector<CMatrix>(m));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            p[i][j] = (i == j) ? CMatrix(s.n_mat)
                               : inv_ih * commutator(s.coords[i], s.coords[j]);
    return p;
}

CurvatureResult discrete_curvature(const FuzzySurface& s, CurvatureFormulation f) {
    const int m = static_cast<int>(s.coords.size());
    const double h = s.hbar;
    CMatrix k;

    switch (f) {
        case CurvatureFormulation::EpsilonR3: {
            if (m != 3)
                throw std::invalid_argument("discrete_curvature: EpsilonR3 requires m = 3");
            const CMatrix gi2 = gamma_power(s, -2.0);
            // M_j = eps_{jkl} [X^k, X^l]
            std::vector<CMatrix> mj(3);
            mj[0] = commutator(s.coords[1], s.coords[2]) * cplx(2.0);
            mj[1] = commutator(s.coords[2], s.coords[0]) * cplx(2.0);
            mj[2] = commutator(s.coords[0], s.coords[1]) * cplx(2.0);
            CMatrix acc(s.n_mat);
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    acc += commutator(s.coords[i], mj[j]) * commutator(s.coords[j], mj[i]);
            k = cplx(-1.0 / (8.0 * h * h * h * h)) * (gi2 * acc * gi2);
            break;
        }
        case CurvatureFormulation::BracketsRm: {
            const CMatrix gi2 = gamma_power(s, -2.0);
            CMatrix acc(s.n_mat);
            for (int j = 0; j < m; ++j) {
                CMatrix aj(s.n_mat);
                for (int kk = 0; kk < m; ++kk) {
                    const CMatrix c1 = commutator(s.coords[j], s.coords[kk]);
                    aj += commutator(c1, s.coords[kk]);
                    for (int l = 0; l < m; ++l) {
                        const CMatrix c2 = commutator(c1, s.coords[l]);
                        acc -= cplx(0.25) * (c2 * c2);
                    }
                }
                acc += cplx(0.5) * (aj * aj);
            }
            k = cplx(1.0 / (h * h * h * h)) * (gi2 * acc * gi2);
            break;
        }
        case CurvatureFormulation::Normals: {
            if (s.normals.empty())
                throw std::invalid_argument("discrete_curvature: Normals requires surface normals");
            const CMatrix gi1 = gamma_power(s, -1.0);
            CMatrix acc(s.n_mat);
            for (const auto& frame : s.normals)
                for (int i = 0; i < m; ++i)
                    for (int j = 0; j < m; ++j)
                        acc += commutator(s.coords[i], frame[j]) *
                               commutator(s.coords[j], frame[i]);
            k = cplx(1.0 / (2.0 * h * h)) * (gi1 * acc * gi1);
            break;
        }
        case CurvatureFormulation::AxialClosedForm: {
            if (!s.axial)
                throw std::invalid_argument(
                    "discrete_curvature: AxialClosedForm requires an axial-built surface");
            const CMatrix gi2 = gamma_power(s, -2.0);
            const CMatrix wd = s.axial_w.adjoint();
            const CMatrix cwf = commutator(s.axial_w, s.axial_ffp);
            const CMatrix core = s.axial_ffp * s.axial_ffp +
                                 cplx(1.0 / (2.0 * h)) * (cwf * wd) +
                                 cplx(1.0 / (2.0 * h)) * (wd * cwf);
            k = gi2 * core * gi2;
            break;
        }
    }

    CurvatureResult out;
    out.hermiticity_defect = rel_hermiticity_defect(k);
    out.k_hat = std::move(k);
    out.formulation = f;
    return out;
}

double euler_characteristic_hat(const FuzzySurface& s, const CMatrix& k_hat) {
    check_same_dim(s.gamma_hat, k_hat, "euler_characteristic_hat");
    const cplx t = s.hbar * (s.gamma_hat * k_hat).trace();
    if (std::abs(t.imag()) > 1e-8)
        throw NumericalError("euler_characteristic_hat: imaginary part " +
                             std::to_string(t.imag()) + " exceeds 1e-8");
    return t.real();
}

CMatrix discrete_derivation(const FuzzySurface& s, int i, const CMatrix& x) {
    if (i < 0 || i >= static_cast<int>(s.coords.size()))
        throw std::invalid_argument("discrete_derivation: coordinate index out of range");
    check_same_dim(x, s.coords[i], "discrete_derivation");
    const CMatrix gi = gamma_power(s, -1.0);
    return cplx(0.0, -1.0 / s.hbar) * (gi * commutator(x, s.coords[i]));
}

CMatrix discrete_laplacian(const FuzzySurface& s, const CMatrix& x) {
    CMatrix acc(s.n_mat);
    for (int j = 0; j < static_cast<int>(s.coords.size()); ++j)
        acc += discrete_derivation(s, j, discrete_derivation(s, j, x));
    return acc;
}

SpectrumReport laplacian_spectrum(const FuzzySurface& s, int cap) {
    const int n = s.n_mat;
    if (n * n > cap)
        throw std::invalid_argument("laplacian_spectrum: N^2 = " + std::to_string(n * n) +
                                    " exceeds cap " + std::to_string(cap));

    // The raw superoperator of Delta = -(1/h^2) sum_j (G C_j)^2, with G = left
    // multiplication by gamma^{-1} and C_j = ad(X^j), is similar to the
    // Hermitian -(1/h^2) sum_j (G^{1/2} C_j G^{1/2})^2 via conjugation by left
    // multiplication with gamma^{1/2}; same spectrum, provably real.
    const CMatrix gih = gamma_power(s, -0.5);
    CMatrix acc(n * n);
    for (const auto& xj : s.coords) {
        const CMatrix mj = superoperator(
            [&](const CMatrix& x) { return gih * commutator(gih * x, xj); }, n);
        acc += mj * mj;
    }
    acc *= cplx(1.0 / (s.hbar * s.hbar));
    // acc = -Delta (similarity transformed); with the paper convention
    // Delta(u) = -lambda u its eigenvalues are exactly the lambda values.
    const auto spec = hermitian_eig(acc);

    SpectrumReport rep;
    rep.eigenvalues = spec.eigenvalues;
    const double range = spec.eigenvalues.back() - spec.eigenvalues.front();
    rep.zero_tolerance = 1e-8 * std::max(range, 1e-300);
    rep.lambda_min_nonzero = 0.0;
    for (double lam : rep.eigenvalues)
        if (lam > rep.zero_tolerance) {
            rep.lambda_min_nonzero = lam;
            break;
        }

    const auto formulation = s.normals.empty() ? CurvatureFormulation::BracketsRm
                                               : CurvatureFormulation::Normals;
    const CMatrix k = discrete_curvature(s, formulation).k_hat;
    const CMatrix kh = cplx(0.5) * (k + k.adjoint());
    rep.kappa = hermitian_eig(kh).eigenvalues.front();
    rep.bound_satisfied = rep.lambda_min_nonzero >= 2.0 * rep.kappa - 1e-8;
    return rep;
}

std::vector<DefectReport> regularization_defects(
    const std::function<FuzzySurface(int)>& family, const std::vector<int>& n_values,
    const std::vector<RegularizationProbe>& probes) {
    if (probes.empty())
        throw std::invalid_argument("regularization_defects: empty probe set");
    if (n_values.size() < 2)
        throw std::invalid_argument("regularization_defects: need at least two N values");

    std::vector<DefectReport> out;
    for (int n : n_values) {
        const FuzzySurface s = family(n);
        DefectReport rep;
        rep.n_mat = n;
        for (const auto& probe : probes) {
            rep.probe_labels.push_back(probe.label);
            const CMatrix tf = probe.t_f(s);
            const CMatrix th = probe.t_h(s);
            if (probe.t_fh) {
                const double d = operator_norm(tf * th - probe.t_fh(s));
                rep.product_defect = std::max(rep.product_defect, d);
            }
            if (probe.t_bracket) {
                const CMatrix br = cplx(0.0, -1.0 / s.hbar) * commutator(tf, th);
                const double d = operator_norm(br - probe.t_bracket(s));
                rep.commutator_defect = std::max(rep.commutator_defect, d);
            }
            if (probe.has_integral) {
                const double tr = 2.0 * 3.14159265358979323846 * s.hbar * tf.trace().real();
                rep.trace_defect = std::max(rep.trace_defect, std::abs(tr - probe.integral_f));
            }
        }
        out.push_back(std::move(rep));
    }
    return out;
}

std::vector<RegularizationProbe> torus_probes() {
    const double pi = 3.14159265358979323846;
    auto tq = [](const FuzzySurface& s, std::vector<TorusMode> modes) {
        return torus_quantization_map(s.n_mat, modes);
    };
    std::vector<RegularizationProbe> probes;

    // Single Fourier modes: {e^{i phi1}, e^{i phi2}} = -2 e^{i(phi1+phi2)} with rho = 1/2.
    RegularizationProbe p1;
    p1.label = "modes e^{i phi1}, e^{i phi2}";
    p1.t_f = [tq](const FuzzySurface& s) { return tq(s, {{1, 0, 1.0}}); };
    p1.t_h = [tq](const FuzzySurface& s) { return tq(s, {{0, 1, 1.0}}); };
    p1.t_fh = [tq](const FuzzySurface& s) { return tq(s, {{1, 1, 1.0}}); };
    p1.t_bracket = [tq](const FuzzySurface& s) { return tq(s, {{1, 1, -2.0}}); };
    probes.push_back(std::move(p1));

    // f = h = cos phi1; fh = 1/2 + (1/2) cos 2 phi1; {f, h} = 0.
    RegularizationProbe p2;
    p2.label = "f = h = cos phi1";
    p2.t_f = [tq](const FuzzySurface& s) { return tq(s, {{1, 0, 0.5}, {-1, 0, 0.5}}); };
    p2.t_h = p2.t_f;
    p2.t_fh = [tq](const FuzzySurface& s) {
        return tq(s, {{0, 0, 0.5}, {2, 0, 0.25}, {-2, 0, 0.25}});
    };
    p2.t_bracket = [](const FuzzySurface& s) { return CMatrix(s.n_mat); };
    p2.has_integral = true;
    p2.integral_f = 0.0;
    probes.push_back(std::move(p2));

    // Unit function: trace property 2 pi hbar Tr(1) -> area = 2 pi^2.
    RegularizationProbe p3;
    p3.label = "f = 1 (trace/area)";
    p3.t_f = [](const FuzzySurface& s) { return CMatrix::identity(s.n_mat); };
    p3.t_h = p3.t_f;
    p3.t_fh = p3.t_f;
    p3.t_bracket = [](const FuzzySurface& s) { return CMatrix(s.n_mat); };
    p3.has_integral = true;
    p3.integral_f = 2.0 * pi * pi;
    probes.push_back(std::move(p3));
    return probes;
}

std::vector<RegularizationProbe> sphere_probes() {
    const double pi = 3.14159265358979323846;
    std::vector<RegularizationProbe> probes;

    // Coordinate polynomials; T(x^3 x^1) candidate = symmetrized product
    // (no full sphere quantization map is shipped), {x^3, x^1} = x^2.
    RegularizationProbe p1;
    p1.label = "f = x3, h = x1";
    p1.t_f = [](const FuzzySurface& s) { return s.coords[2]; };
    p1.t_h = [](const FuzzySurface& s) { return s.coords[0]; };
    p1.t_fh = [](const FuzzySurface& s) {
        return cplx(0.5) * (s.coords[2] * s.coords[0] + s.coords[0] * s.coords[2]);
    };
    p1.t_bracket = [](const FuzzySurface& s) { return s.coords[1]; };
    p1.has_integral = true;
    p1.integral_f = 0.0;  // integral of x^3 over the unit sphere
    probes.push_back(std::move(p1));

    RegularizationProbe p2;
    p2.label = "f = 1 (trace/area)";
    p2.t_f = [](const FuzzySurface& s) { return CMatrix::identity(s.n_mat); };
    p2.t_h = p2.t_f;
    p2.t_fh = p2.t_f;
    p2.t_bracket = [](const FuzzySurface& s) { return CMatrix(s.n_mat); };
    p2.has_integral = true;
    p2.integral_f = 4.0 * pi;
    probes.push_back(std::move(p2));
    return probes;
}

}  // namespace fuzzygeom
