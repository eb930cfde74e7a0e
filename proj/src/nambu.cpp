#include "fuzzygeom/nambu.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fuzzygeom/cmatrix.hpp"
#include "fuzzygeom/eig.hpp"

namespace fuzzygeom {

namespace {

const double kPi = 3.14159265358979323846;

std::vector<GridField> all_partials(const Grid& g, const GridField& f) {
    std::vector<GridField> d(g.dim());
    for (int a = 0; a < g.dim(); ++a) d[a] = partial_derivative(g, f, a);
    return d;
}

// All strictly increasing k-tuples from {0..m-1}.
std::vector<std::vector<int>> combinations(int m, int k) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    std::function<void(int)> rec = [&](int start) {
        if (static_cast<int>(cur.size()) == k) {
            out.push_back(cur);
            return;
        }
        for (int v = start; v < m; ++v) {
            cur.push_back(v);
            rec(v + 1);
            cur.pop_back();
        }
    };
    rec(0);
    return out;
}

// All k-tuples with repetition from {0..m-1}, lexicographic.
std::vector<std::vector<int>> tuples_rep(int m, int k) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur(k, 0);
    if (k == 0) {
        out.push_back({});
        return out;
    }
    while (true) {
        out.push_back(cur);
        int pos = k - 1;
        while (pos >= 0 && ++cur[pos] == m) cur[pos--] = 0;
        if (pos < 0) break;
    }
    return out;
}

// Sign of `perm` as a permutation of 0..len-1; 0 if it is not one.
double perm_sign(std::vector<int> perm) {
    double s = 1.0;
    for (std::size_t i = 0; i < perm.size(); ++i) {
        while (perm[i] != static_cast<int>(i)) {
            const int t = perm[i];
            if (t < 0 || t >= static_cast<int>(perm.size()) || perm[t] == t) return 0.0;
            std::swap(perm[i], perm[t]);
            s = -s;
        }
    }
    return s;
}

double binomial(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

struct Ws {
    const EmbeddedManifold& mf;
    const Grid& grid;
    std::size_t total;
    int n, m;
    GridField inv_rho;
    std::vector<std::vector<GridField>> dx;  // m coords x n partials
    std::vector<std::vector<int>> tails;     // increasing (n-1)-tuples
    std::vector<std::vector<int>> ncombos;   // increasing n-tuples
    std::vector<GridField> cb;               // coordinate bracket per ncombo
    GridField gamma_sq, gamma;

    explicit Ws(const EmbeddedManifold& mf_)
        : mf(mf_), grid(mf_.grid), total(mf_.grid.num_points()), n(mf_.n), m(mf_.m) {
        inv_rho.resize(total);
        for (std::size_t p = 0; p < total; ++p) inv_rho[p] = 1.0 / mf.rho[p];
        dx.resize(m);
        for (int i = 0; i < m; ++i) dx[i] = all_partials(grid, mf.embedding[i]);
        tails = combinations(m, n - 1);
        ncombos = combinations(m, n);
        cb.resize(ncombos.size());
        for (std::size_t c = 0; c < ncombos.size(); ++c) {
            std::vector<const std::vector<GridField>*> rows;
            for (int idx : ncombos[c]) rows.push_back(&dx[idx]);
            cb[c] = bracket_rows(rows);
        }
        gamma_sq.assign(total, 0.0);
        for (const auto& b : cb)
            for (std::size_t p = 0; p < total; ++p) gamma_sq[p] += b[p] * b[p];
        gamma.resize(total);
        for (std::size_t p = 0; p < total; ++p) {
            if (!(gamma_sq[p] > 0.0))
                throw NumericalError("degenerate gamma: bracket volume factor vanishes");
            gamma[p] = std::sqrt(gamma_sq[p]);
        }
    }

    // (1/rho) det of n rows of precomputed partials.
    GridField bracket_rows(const std::vector<const std::vector<GridField>*>& rows) const {
        GridField out(total);
        if (n == 1) {
            const GridField& r0 = (*rows[0])[0];
            for (std::size_t p = 0; p < total; ++p) out[p] = r0[p] * inv_rho[p];
        } else if (n == 2) {
            const GridField &a0 = (*rows[0])[0], &a1 = (*rows[0])[1];
            const GridField &b0 = (*rows[1])[0], &b1 = (*rows[1])[1];
            parallel_for(total, [&](std::size_t lo, std::size_t hi) {
                for (std::size_t p = lo; p < hi; ++p)
                    out[p] = (a0[p] * b1[p] - a1[p] * b0[p]) * inv_rho[p];
            });
        } else if (n == 3) {
            const GridField &a0 = (*rows[0])[0], &a1 = (*rows[0])[1], &a2 = (*rows[0])[2];
            const GridField &b0 = (*rows[1])[0], &b1 = (*rows[1])[1], &b2 = (*rows[1])[2];
            const GridField &c0 = (*rows[2])[0], &c1 = (*rows[2])[1], &c2 = (*rows[2])[2];
            parallel_for(total, [&](std::size_t lo, std::size_t hi) {
                for (std::size_t p = lo; p < hi; ++p)
                    out[p] = (a0[p] * (b1[p] * c2[p] - b2[p] * c1[p]) -
                              a1[p] * (b0[p] * c2[p] - b2[p] * c0[p]) +
                              a2[p] * (b0[p] * c1[p] - b1[p] * c0[p])) *
                             inv_rho[p];
            });
        } else {
            throw std::invalid_argument("bracket: intrinsic dimension > 3 unsupported");
        }
        return out;
    }

    // {f, x^{t_1}, ..., x^{t_{n-1}}} from precomputed partials of f.
    GridField bracket_tail(const std::vector<GridField>& grad_f,
                           const std::vector<int>& tail) const {
        std::vector<const std::vector<GridField>*> rows = {&grad_f};
        for (int idx : tail) rows.push_back(&dx[idx]);
        return bracket_rows(rows);
    }

    // Signed reference to the cached coordinate bracket {x^{t_1},...,x^{t_n}}:
    // (combo index, sign), sign 0 when an index repeats.
    std::pair<int, double> cb_ref(std::vector<int> idx) const {
        double s = 1.0;
        for (std::size_t i = 1; i < idx.size(); ++i)
            for (std::size_t j = i; j > 0 && idx[j - 1] >= idx[j]; --j) {
                if (idx[j - 1] == idx[j]) return {-1, 0.0};
                std::swap(idx[j - 1], idx[j]);
                s = -s;
            }
        for (std::size_t c = 0; c < ncombos.size(); ++c)
            if (ncombos[c] == idx) return {static_cast<int>(c), s};
        return {-1, 0.0};
    }

    // {x^i, x^{t_1}, ..., x^{t_{n-1}}} as (combo index, sign).
    std::pair<int, double> b_ref(int i, const std::vector<int>& tail) const {
        std::vector<int> idx = {i};
        idx.insert(idx.end(), tail.begin(), tail.end());
        return cb_ref(idx);
    }

    // (P^2)^{ik} = (1/(n-1)!) sum_I {x^i, x_I}{x^k, x_I} (flat ambient).
    MatrixField p_squared() const {
        MatrixField p2;
        p2.m = m;
        p2.comp.assign(static_cast<std::size_t>(m) * m, GridField(total, 0.0));
        for (int i = 0; i < m; ++i)
            for (int k = i; k < m; ++k) {
                GridField acc(total, 0.0);
                for (const auto& tail : tails) {
                    const auto [ci, si] = b_ref(i, tail);
                    const auto [ck, sk] = b_ref(k, tail);
                    if (ci < 0 || ck < 0) continue;
                    const double s = si * sk;
                    const GridField &bi = cb[ci], &bk = cb[ck];
                    for (std::size_t p = 0; p < total; ++p) acc[p] += s * bi[p] * bk[p];
                }
                p2.at(i, k) = acc;
                if (k != i) p2.at(k, i) = std::move(acc);
            }
        return p2;
    }
};

// Orthogonal Procrustes factor aligning frame F (m x p, columns = normals)
// to the parent frame: R = M (M^T M)^{-1/2} with M = F^T F_parent.
void align_frame(std::vector<std::vector<double>>& f_cur,
                 const std::vector<std::vector<double>>& f_par) {
    const int p = static_cast<int>(f_cur.size());
    const int m = static_cast<int>(f_cur[0].size());
    if (p == 1) {
        double dot = 0.0;
        for (int i = 0; i < m; ++i) dot += f_cur[0][i] * f_par[0][i];
        if (dot < 0.0)
            for (int i = 0; i < m; ++i) f_cur[0][i] = -f_cur[0][i];
        return;
    }
    CMatrix mm(p);
    for (int a = 0; a < p; ++a)
        for (int b = 0; b < p; ++b) {
            double dot = 0.0;
            for (int i = 0; i < m; ++i) dot += f_cur[a][i] * f_par[b][i];
            mm(a, b) = dot;
        }
    const CMatrix s2 = mm.adjoint() * mm;
    const CMatrix inv_sqrt = apply_function(s2, [](double x) {
        if (x <= 1e-12)
            throw NumericalError("normal frame alignment degenerate between neighbors");
        return 1.0 / std::sqrt(x);
    });
    const CMatrix r = mm * inv_sqrt;
    std::vector<std::vector<double>> aligned(p, std::vector<double>(m, 0.0));
    for (int b = 0; b < p; ++b)
        for (int a = 0; a < p; ++a) {
            const double w = r(a, b).real();
            for (int i = 0; i < m; ++i) aligned[b][i] += f_cur[a][i] * w;
        }
    f_cur = std::move(aligned);
}

}  // namespace

GridField nambu_bracket(const EmbeddedManifold& mf, const std::vector<GridField>& fields) {
    if (static_cast<int>(fields.size()) != mf.n)
        throw std::invalid_argument("nambu_bracket: need exactly n argument fields");
    const std::size_t total = mf.grid.num_points();
    for (const auto& f : fields)
        if (f.size() != total) throw std::invalid_argument("nambu_bracket: field shape mismatch");
    Ws ws(mf);
    std::vector<std::vector<GridField>> grads;
    grads.reserve(fields.size());
    for (const auto& f : fields) grads.push_back(all_partials(mf.grid, f));
    std::vector<const std::vector<GridField>*> rows;
    for (const auto& g : grads) rows.push_back(&g);
    return ws.bracket_rows(rows);
}

GridField gamma_field(const EmbeddedManifold& mf) {
    Ws ws(mf);
    const GridField det = metric_determinant(mf);
    const auto pts = interior_points(mf.grid, stencil_margin(1));
    double scale = 1.0, diff = 0.0;
    GridField gm(ws.total, 0.0);
    for (std::size_t p : pts) {
        gm[p] = std::sqrt(std::max(det[p], 0.0)) / mf.rho[p];
        scale = std::max(scale, gm[p]);
    }
    for (std::size_t p : pts) diff = std::max(diff, std::abs(gm[p] - ws.gamma[p]));
    const double h = mf.grid.max_step();
    const double tol = 100.0 * h * h * h * h * scale;
    if (diff > tol)
        throw NumericalError("gamma_field: bracket and metric routes disagree by " +
                             std::to_string(diff) + " (tolerance " + std::to_string(tol) + ")");
    return ws.gamma;
}

MatrixField tangent_projection(const EmbeddedManifold& mf) {
    Ws ws(mf);
    MatrixField pi = ws.p_squared();
    for (auto& f : pi.comp)
        for (std::size_t p = 0; p < ws.total; ++p) f[p] /= ws.gamma_sq[p];
    return pi;
}

NormalFrame normal_frame(const EmbeddedManifold& mf) {
    Ws ws(mf);
    const int p_dim = mf.m - mf.n;
    if (p_dim < 1) throw PreconditionError("normal_frame: codimension must be >= 1");
    const std::size_t total = ws.total;

    // Z_alpha^i = (1/(gamma sqrt((p-1)!))) eps_{i k* alpha} {x^{k*_1},...,x^{k*_n}}
    // with k* the sorted complement of {i} union alpha.
    const auto alphas = tuples_rep(mf.m, p_dim - 1);
    double fact = 1.0;
    for (int v = 2; v <= p_dim - 1; ++v) fact *= v;
    const double norm = 1.0 / std::sqrt(fact);

    NormalFrame frame;
    frame.p = p_dim;
    frame.z_raw.assign(alphas.size(), AmbientVectorField(mf.m, GridField(total, 0.0)));
    for (std::size_t a = 0; a < alphas.size(); ++a) {
        for (int i = 0; i < mf.m; ++i) {
            std::vector<bool> used(mf.m, false);
            used[i] = true;
            bool dup = false;
            for (int v : alphas[a]) {
                if (used[v]) dup = true;
                used[v] = true;
            }
            if (dup) continue;
            std::vector<int> kstar;
            for (int v = 0; v < mf.m; ++v)
                if (!used[v]) kstar.push_back(v);
            std::vector<int> perm = {i};
            perm.insert(perm.end(), kstar.begin(), kstar.end());
            perm.insert(perm.end(), alphas[a].begin(), alphas[a].end());
            const double sign = perm_sign(perm);
            if (sign == 0.0) continue;
            const auto [ci, cs] = ws.cb_ref(kstar);
            if (ci < 0) continue;
            GridField& out = frame.z_raw[a][i];
            const GridField& b = ws.cb[ci];
            const double w = sign * cs * norm;
            for (std::size_t p = 0; p < total; ++p) out[p] = w * b[p] / ws.gamma[p];
        }
    }

    const std::size_t q = alphas.size();
    frame.orthonormal.assign(p_dim, AmbientVectorField(mf.m, GridField(total, 0.0)));

    if (p_dim == 1) {
        // Single smooth candidate: normalize, track Gram scalar |Z|^2.
        for (std::size_t p = 0; p < total; ++p) {
            double n2 = 0.0;
            for (int i = 0; i < mf.m; ++i) n2 += frame.z_raw[0][i][p] * frame.z_raw[0][i][p];
            frame.gram_eigen_defect = std::max(frame.gram_eigen_defect, std::abs(n2 - 1.0));
            frame.count_check = std::max(frame.count_check, std::abs(n2 - 1.0));
            if (n2 >= 0.25 && n2 <= 0.75)
                throw NumericalError(
                    "normal_frame: Gram eigenvalue in the mid-gap [0.25, 0.75]; grid too coarse");
            const double inv = 1.0 / std::sqrt(n2);
            for (int i = 0; i < mf.m; ++i)
                frame.orthonormal[0][i][p] = frame.z_raw[0][i][p] * inv;
        }
        return frame;
    }

    // Pointwise Gram eigendecomposition + continuity alignment along the
    // row-major scan (each point aligned to an already-visited neighbor).
    std::vector<std::vector<double>> prev_frame;
    std::vector<int> idx;
    std::vector<std::vector<std::vector<double>>> stored(total);
    for (std::size_t pt = 0; pt < total; ++pt) {
        CMatrix gram(static_cast<int>(q));
        for (std::size_t a = 0; a < q; ++a)
            for (std::size_t b = a; b < q; ++b) {
                double dot = 0.0;
                for (int i = 0; i < mf.m; ++i)
                    dot += frame.z_raw[a][i][pt] * frame.z_raw[b][i][pt];
                gram(static_cast<int>(a), static_cast<int>(b)) = dot;
                gram(static_cast<int>(b), static_cast<int>(a)) = dot;
            }
        const auto es = hermitian_eig(gram);
        int ones = 0;
        double trace = 0.0;
        for (double ev : es.eigenvalues) {
            trace += ev;
            frame.gram_eigen_defect =
                std::max(frame.gram_eigen_defect, std::min(std::abs(ev), std::abs(ev - 1.0)));
            if (ev >= 0.25 && ev <= 0.75)
                throw NumericalError(
                    "normal_frame: Gram eigenvalue in the mid-gap [0.25, 0.75]; grid too coarse");
            if (ev > 0.75) ++ones;
        }
        frame.count_check = std::max(frame.count_check, std::abs(trace - p_dim));
        if (ones != p_dim)
            throw NumericalError("normal_frame: Gram rank != codimension at a grid point");

        std::vector<std::vector<double>> f_cur(p_dim, std::vector<double>(mf.m, 0.0));
        int col = 0;
        for (std::size_t e = 0; e < q; ++e) {
            if (es.eigenvalues[e] <= 0.75) continue;
            for (std::size_t a = 0; a < q; ++a) {
                const double w = es.eigenvectors(static_cast<int>(a), static_cast<int>(e)).real();
                for (int i = 0; i < mf.m; ++i) f_cur[col][i] += w * frame.z_raw[a][i][pt];
            }
            ++col;
        }
        if (pt > 0) {
            mf.grid.unflat(pt, idx);
            std::size_t parent = pt;
            for (int a = mf.grid.dim() - 1; a >= 0; --a)
                if (idx[a] > 0) {
                    parent = pt - mf.grid.stride(a);
                    break;
                }
            align_frame(f_cur, stored[parent]);
        }
        for (int a = 0; a < p_dim; ++a)
            for (int i = 0; i < mf.m; ++i) frame.orthonormal[a][i][pt] = f_cur[a][i];
        stored[pt] = std::move(f_cur);
    }
    return frame;
}

GridField gauss_curvature_poisson(const EmbeddedManifold& mf) {
    if (mf.n != 2) throw PreconditionError("gauss_curvature_poisson: requires n = 2");
    Ws ws(mf);
    const std::size_t total = ws.total;
    const int m = ws.m;

    // Partials of every pairwise bracket c_ab = {x^a, x^b}, a < b.
    std::vector<std::vector<GridField>> dcb(ws.cb.size());
    for (std::size_t c = 0; c < ws.cb.size(); ++c) dcb[c] = all_partials(mf.grid, ws.cb[c]);

    GridField term1(total, 0.0), term2(total, 0.0);
    for (std::size_t c = 0; c < ws.ncombos.size(); ++c) {
        // {c_ab, x^l}^2 summed over all ordered (j,k) reduces to twice a<b.
        for (int l = 0; l < m; ++l) {
            const GridField d = ws.bracket_rows({&dcb[c], &ws.dx[l]});
            for (std::size_t p = 0; p < total; ++p) term2[p] += 2.0 * d[p] * d[p];
        }
    }
    for (int j = 0; j < m; ++j) {
        GridField aj(total, 0.0);
        for (int k = 0; k < m; ++k) {
            const auto [c, s] = ws.cb_ref({j, k});
            if (c < 0) continue;
            const GridField d = ws.bracket_rows({&dcb[c], &ws.dx[k]});
            for (std::size_t p = 0; p < total; ++p) aj[p] += s * d[p];
        }
        for (std::size_t p = 0; p < total; ++p) term1[p] += aj[p] * aj[p];
    }
    GridField k_field(total);
    for (std::size_t p = 0; p < total; ++p) {
        const double g4 = ws.gamma_sq[p] * ws.gamma_sq[p];
        k_field[p] = (0.5 * term1[p] - 0.25 * term2[p]) / g4;
    }
    return k_field;
}

AmbientVectorField mean_curvature_poisson(const EmbeddedManifold& mf) {
    Ws ws(mf);
    const std::size_t total = ws.total;
    const int m = ws.m;
    const MatrixField p2 = ws.p_squared();
    const double sign = (mf.n % 2 == 0) ? 1.0 : -1.0;

    // L_k = sum_I {{x^k, x_I}, x_I} over increasing tails.
    std::vector<GridField> l(m, GridField(total, 0.0));
    for (const auto& tail : ws.tails) {
        for (int k = 0; k < m; ++k) {
            const auto [c, s] = ws.b_ref(k, tail);
            if (c < 0) continue;
            const auto grads = all_partials(mf.grid, ws.cb[c]);
            const GridField d = ws.bracket_tail(grads, tail);
            for (std::size_t p = 0; p < total; ++p) l[k][p] += s * d[p];
        }
    }
    AmbientVectorField h(m, GridField(total, 0.0));
    for (int i = 0; i < m; ++i) {
        for (int k = 0; k < m; ++k) {
            const GridField& pik = p2.at(i, k);
            const double delta = (i == k) ? 1.0 : 0.0;
            for (std::size_t p = 0; p < total; ++p) {
                const double pi_ik = delta - pik[p] / ws.gamma_sq[p];
                h[i][p] += pi_ik * l[k][p];
            }
        }
        for (std::size_t p = 0; p < total; ++p)
            h[i][p] *= sign / (mf.n * ws.gamma_sq[p]);
    }
    return h;
}

GridField ricci_scalar_flat(const EmbeddedManifold& mf, const NormalFrame& frame) {
    Ws ws(mf);
    const std::size_t total = ws.total;
    const int m = ws.m;
    if (frame.orthonormal.empty()) throw PreconditionError("ricci_scalar_flat: missing normal frame");
    const double sign = (mf.n % 2 == 0) ? 1.0 : -1.0;

    GridField r(total, 0.0);
    for (const auto& normal : frame.orthonormal) {
        std::vector<std::vector<GridField>> dn(m);
        for (int j = 0; j < m; ++j) dn[j] = all_partials(mf.grid, normal[j]);

        // B^{ik} = (-1)^n sum_I {x^i, x_I}{x_I, n^k} over increasing tails.
        MatrixField b;
        b.m = m;
        b.comp.assign(static_cast<std::size_t>(m) * m, GridField(total, 0.0));
        for (const auto& tail : ws.tails) {
            for (int k = 0; k < m; ++k) {
                // {x_I, n^k}: rows are the tail coordinates then n^k.
                std::vector<const std::vector<GridField>*> rows;
                for (int t : tail) rows.push_back(&ws.dx[t]);
                rows.push_back(&dn[k]);
                const GridField tk = ws.bracket_rows(rows);
                for (int i = 0; i < m; ++i) {
                    const auto [c, s] = ws.b_ref(i, tail);
                    if (c < 0) continue;
                    GridField& acc = b.at(i, k);
                    const GridField& bi = ws.cb[c];
                    const double w = sign * s;
                    for (std::size_t p = 0; p < total; ++p) acc[p] += w * bi[p] * tk[p];
                }
            }
        }
        GridField tr(total, 0.0), tr2(total, 0.0);
        for (int i = 0; i < m; ++i)
            for (std::size_t p = 0; p < total; ++p) tr[p] += b.at(i, i)[p];
        for (int i = 0; i < m; ++i)
            for (int k = 0; k < m; ++k) {
                const GridField &bik = b.at(i, k), &bki = b.at(k, i);
                for (std::size_t p = 0; p < total; ++p) tr2[p] += bik[p] * bki[p];
            }
        for (std::size_t p = 0; p < total; ++p) r[p] += tr[p] * tr[p] - tr2[p];
    }
    for (std::size_t p = 0; p < total; ++p) r[p] /= ws.gamma_sq[p] * ws.gamma_sq[p];

    if (mf.n == 2) {
        const GridField k2 = gauss_curvature_poisson(mf);
        const auto pts = interior_points(mf.grid, stencil_margin(2));
        double defect = 0.0;
        for (std::size_t p : pts) defect = std::max(defect, std::abs(r[p] - 2.0 * k2[p]));
        const double h = mf.grid.max_step();
        if (defect > std::max(1e-6, 100.0 * h * h))
            throw NumericalError("ricci_scalar_flat: R != 2K for a surface (defect " +
                                 std::to_string(defect) + ")");
    }
    return r;
}

GridField hypersurface_weingarten(const EmbeddedManifold& mf, const NormalFrame& frame, int k) {
    if (mf.m - mf.n != 1) throw PreconditionError("hypersurface_weingarten: requires p = 1");
    if (k < 1 || k > mf.n) throw std::invalid_argument("hypersurface_weingarten: k must be 1..n");
    Ws ws(mf);
    const std::size_t total = ws.total;
    const int m = ws.m, n = ws.n;
    const auto& normal = frame.orthonormal.at(0);
    std::vector<std::vector<GridField>> dn(m);
    for (int j = 0; j < m; ++j) dn[j] = all_partials(mf.grid, normal[j]);

    GridField num(total, 0.0), den(total, 0.0);
    for (const auto& t : tuples_rep(m, n)) {
        const auto [c, s] = ws.cb_ref(t);
        if (c < 0) continue;
        const GridField& bx = ws.cb[c];
        std::vector<const std::vector<GridField>*> rows;
        for (int r = 0; r < n; ++r) rows.push_back(r < k ? &dn[t[r]] : &ws.dx[t[r]]);
        const GridField bm = ws.bracket_rows(rows);
        for (std::size_t p = 0; p < total; ++p) {
            num[p] += s * bx[p] * bm[p];
            den[p] += bx[p] * bx[p];
        }
    }
    const double scale = binomial(n, k) * ((k % 2 == 0) ? 1.0 : -1.0);
    GridField out(total);
    for (std::size_t p = 0; p < total; ++p) out[p] = scale * num[p] / den[p];
    return out;
}

CodazziReport codazzi_residual(const EmbeddedManifold& mf, const NormalFrame& frame) {
    if (mf.n != 2 || mf.m != 3)
        throw PreconditionError("codazzi_residual: requires a surface in R^3");
    Ws ws(mf);
    const std::size_t total = ws.total;
    const int m = ws.m;
    const auto& normal = frame.orthonormal.at(0);
    std::vector<std::vector<GridField>> dn(m);
    for (int j = 0; j < m; ++j) dn[j] = all_partials(mf.grid, normal[j]);
    const MatrixField p2 = ws.p_squared();

    CodazziReport rep;
    rep.residual.assign(total, 0.0);
    rep.residual_raw.assign(total, 0.0);
    for (int i = 0; i < m; ++i) {
        GridField ri(total, 0.0), si(total, 0.0);
        for (int k = 0; k < m; ++k) {
            GridField f(total);
            for (std::size_t p = 0; p < total; ++p) f[p] = p2.at(i, k)[p] / ws.gamma_sq[p];
            const auto df = all_partials(mf.grid, f);
            const GridField d = ws.bracket_rows({&df, &dn[k]});
            for (std::size_t p = 0; p < total; ++p) ri[p] += d[p];

            // Raw form: {gamma^-2 {x^i,x^j}{x^j,n^k}, x^k}.
            GridField g(total, 0.0);
            for (int j = 0; j < m; ++j) {
                const auto [c, s] = ws.cb_ref({i, j});
                if (c < 0) continue;
                const GridField jn = ws.bracket_rows({&ws.dx[j], &dn[k]});
                const GridField& bij = ws.cb[c];
                for (std::size_t p = 0; p < total; ++p) g[p] += s * bij[p] * jn[p];
            }
            for (std::size_t p = 0; p < total; ++p) g[p] /= ws.gamma_sq[p];
            const auto dg = all_partials(mf.grid, g);
            const GridField d2 = ws.bracket_rows({&dg, &ws.dx[k]});
            for (std::size_t p = 0; p < total; ++p) si[p] += d2[p];
        }
        for (std::size_t p = 0; p < total; ++p) {
            rep.residual[p] = std::max(rep.residual[p], std::abs(ri[p]));
            rep.residual_raw[p] = std::max(rep.residual_raw[p], std::abs(si[p]));
        }
    }
    const auto pts = interior_points(mf.grid, stencil_margin(2));
    rep.max_residual = max_abs_over(rep.residual, pts);
    rep.max_raw = max_abs_over(rep.residual_raw, pts);
    return rep;
}

double codazzi_poisson_residual(const Grid& grid, const std::array<GridField, 3>& x,
                                const GridField& rho) {
    if (grid.dim() != 2) throw PreconditionError("codazzi_poisson_residual: 2-d grid required");
    const std::size_t total = grid.num_points();
    for (const auto& f : x)
        if (f.size() != total)
            throw std::invalid_argument("codazzi_poisson_residual: field shape mismatch");
    GridField inv_rho(total);
    for (std::size_t p = 0; p < total; ++p) inv_rho[p] = 1.0 / rho[p];

    std::vector<std::vector<GridField>> dx(3);
    for (int i = 0; i < 3; ++i) dx[i] = all_partials(grid, x[i]);
    auto pb = [&](const std::vector<GridField>& a, const std::vector<GridField>& b) {
        GridField out(total);
        for (std::size_t p = 0; p < total; ++p)
            out[p] = (a[0][p] * b[1][p] - a[1][p] * b[0][p]) * inv_rho[p];
        return out;
    };
    // c[i] = {x^j, x^k} for (i,j,k) cyclic.
    std::vector<GridField> c(3);
    c[0] = pb(dx[1], dx[2]);
    c[1] = pb(dx[2], dx[0]);
    c[2] = pb(dx[0], dx[1]);
    GridField gamma_sq(total), gamma(total);
    for (std::size_t p = 0; p < total; ++p) {
        gamma_sq[p] = c[0][p] * c[0][p] + c[1][p] * c[1][p] + c[2][p] * c[2][p];
        if (!(gamma_sq[p] > 0.0))
            throw NumericalError("codazzi_poisson_residual: degenerate gamma");
        gamma[p] = std::sqrt(gamma_sq[p]);
    }
    // Normal candidate n^k = (1/(2 gamma)) eps_{kln} {x^l, x^n} = c[k]/gamma.
    std::vector<GridField> nrm(3);
    std::vector<std::vector<GridField>> dnrm(3);
    for (int k = 0; k < 3; ++k) {
        nrm[k].resize(total);
        for (std::size_t p = 0; p < total; ++p) nrm[k][p] = c[k][p] / gamma[p];
        dnrm[k] = all_partials(grid, nrm[k]);
    }
    // {x^i, x^j} = eps_{kij} c[k]: signed reference into the cyclic cache.
    auto pair_bracket = [&](int i, int j) -> std::pair<const GridField*, double> {
        if (i == j) return {nullptr, 0.0};
        const int k = 3 - i - j;
        return {&c[k], perm_sign({k, i, j})};
    };

    // CM^i = sum_k { gamma^-2 {x^i,x^j}{x^j,x^k}, n^k }.
    double worst = 0.0;
    const auto pts = interior_points(grid, stencil_margin(2));
    for (int i = 0; i < 3; ++i) {
        GridField cm(total, 0.0);
        for (int k = 0; k < 3; ++k) {
            GridField f(total, 0.0);
            for (int j = 0; j < 3; ++j) {
                const auto [bij, sij] = pair_bracket(i, j);
                const auto [bjk, sjk] = pair_bracket(j, k);
                if (!bij || !bjk) continue;
                const double s = sij * sjk;
                for (std::size_t p = 0; p < total; ++p)
                    f[p] += s * (*bij)[p] * (*bjk)[p] / gamma_sq[p];
            }
            const auto df = all_partials(grid, f);
            const GridField d = pb(df, dnrm[k]);
            for (std::size_t p = 0; p < total; ++p) cm[p] += d[p];
        }
        worst = std::max(worst, max_abs_over(cm, pts));
    }
    return worst;
}

ComplexStructureReport complex_structure_check(const EmbeddedManifold& mf) {
    if (mf.n != 2) throw PreconditionError("complex_structure_check: requires n = 2");
    Ws ws(mf);
    const std::size_t total = ws.total;
    const int m = ws.m;

    // J^i_k = gamma^{-1} {x^i, x^k}; J^2 must equal -Pi_T on the grid.
    std::vector<GridField> j(static_cast<std::size_t>(m) * m, GridField(total, 0.0));
    for (int i = 0; i < m; ++i)
        for (int k = 0; k < m; ++k) {
            const auto [c, s] = ws.cb_ref({i, k});
            if (c < 0) continue;
            const GridField& b = ws.cb[c];
            GridField& out = j[static_cast<std::size_t>(i) * m + k];
            for (std::size_t p = 0; p < total; ++p) out[p] = s * b[p] / ws.gamma[p];
        }
    const MatrixField p2 = ws.p_squared();
    const auto pts = interior_points(mf.grid, stencil_margin(1));
    ComplexStructureReport rep;
    for (int i = 0; i < m; ++i)
        for (int k = 0; k < m; ++k) {
            GridField d(total, 0.0);
            for (int l = 0; l < m; ++l) {
                const GridField &jl = j[static_cast<std::size_t>(i) * m + l],
                                &lk = j[static_cast<std::size_t>(l) * m + k];
                for (std::size_t p = 0; p < total; ++p) d[p] += jl[p] * lk[p];
            }
            const GridField& pik = p2.at(i, k);
            for (std::size_t p = 0; p < total; ++p) d[p] += pik[p] / ws.gamma_sq[p];
            rep.j_defect = std::max(rep.j_defect, max_abs_over(d, pts));
        }

    if (mf.m > mf.n) {
        const NormalFrame frame = normal_frame(mf);
        for (const auto& normal : frame.orthonormal) {
            for (int i = 0; i < m; ++i) {
                GridField d(total, 0.0);
                for (int k = 0; k < m; ++k) {
                    const GridField& jik = j[static_cast<std::size_t>(i) * m + k];
                    for (std::size_t p = 0; p < total; ++p) d[p] += jik[p] * normal[k][p];
                }
                rep.normal_defect = std::max(rep.normal_defect, max_abs_over(d, pts));
            }
        }
    }
    return rep;
}

BracketLaplacianResult bracket_laplacian(const EmbeddedManifold& mf, const GridField& u) {
    if (u.size() != mf.grid.num_points())
        throw std::invalid_argument("bracket_laplacian: field shape mismatch");
    Ws ws(mf);
    const std::size_t total = ws.total;
    const auto du = all_partials(mf.grid, u);

    // d_I(u) = (1/gamma) {u, x_I} over increasing tails; all factorial
    // multiplicities cancel against the normalization.
    const std::size_t q = ws.tails.size();
    std::vector<GridField> v(q);
    for (std::size_t t = 0; t < q; ++t) {
        v[t] = ws.bracket_tail(du, ws.tails[t]);
        for (std::size_t p = 0; p < total; ++p) v[t][p] /= ws.gamma[p];
    }
    BracketLaplacianResult res;
    res.laplacian.assign(total, 0.0);
    res.grad_sq.assign(total, 0.0);
    res.hess_sq.assign(total, 0.0);
    std::vector<std::vector<GridField>> w(q, std::vector<GridField>(q));
    for (std::size_t t = 0; t < q; ++t) {
        const auto dv = all_partials(mf.grid, v[t]);
        for (std::size_t s = 0; s < q; ++s) {
            w[s][t] = ws.bracket_tail(dv, ws.tails[s]);
            for (std::size_t p = 0; p < total; ++p) w[s][t][p] /= ws.gamma[p];
        }
        for (std::size_t p = 0; p < total; ++p) {
            res.laplacian[p] += w[t][t][p];
            res.grad_sq[p] += v[t][p] * v[t][p];
        }
    }
    for (std::size_t s = 0; s < q; ++s)
        for (std::size_t t = 0; t < q; ++t)
            for (std::size_t p = 0; p < total; ++p)
                res.hess_sq[p] += w[s][t][p] * w[t][s][p];
    return res;
}

MatrixField hessian_tensor(const EmbeddedManifold& mf, const GridField& u) {
    Ws ws(mf);
    const std::size_t total = ws.total;
    const int m = ws.m;
    const auto du = all_partials(mf.grid, u);
    const std::size_t q = ws.tails.size();

    std::vector<GridField> v(q);
    for (std::size_t t = 0; t < q; ++t) {
        v[t] = ws.bracket_tail(du, ws.tails[t]);
        for (std::size_t p = 0; p < total; ++p) v[t][p] /= ws.gamma[p];
    }
    auto script_d = [&](const GridField& f) {
        // D^i(f) = sum_T (b(i,T)/gamma) d_T(f), for every ambient i.
        const auto df = all_partials(mf.grid, f);
        std::vector<GridField> out(m, GridField(total, 0.0));
        for (std::size_t t = 0; t < q; ++t) {
            GridField dtf = ws.bracket_tail(df, ws.tails[t]);
            for (std::size_t p = 0; p < total; ++p) dtf[p] /= ws.gamma[p];
            for (int i = 0; i < m; ++i) {
                const auto [c, s] = ws.b_ref(i, ws.tails[t]);
                if (c < 0) continue;
                const GridField& bi = ws.cb[c];
                for (std::size_t p = 0; p < total; ++p)
                    out[i][p] += s * bi[p] * dtf[p] / ws.gamma[p];
            }
        }
        return out;
    };
    auto script_d_u = [&](const GridField& f) {
        // D^u(f) = sum_T d_T(f) d_T(u).
        const auto df = all_partials(mf.grid, f);
        GridField out(total, 0.0);
        for (std::size_t t = 0; t < q; ++t) {
            GridField dtf = ws.bracket_tail(df, ws.tails[t]);
            for (std::size_t p = 0; p < total; ++p) out[p] += dtf[p] * v[t][p] / ws.gamma[p];
        }
        return out;
    };

    std::vector<GridField> a(m);  // a_i = D^i(u)
    {
        const auto d = script_d(u);
        for (int i = 0; i < m; ++i) a[i] = d[i];
    }
    const MatrixField p2 = ws.p_squared();

    MatrixField hess;
    hess.m = m;
    hess.comp.assign(static_cast<std::size_t>(m) * m, GridField(total, 0.0));
    std::vector<std::vector<GridField>> dd(m);  // dd[j] = D^.(a_j)
    for (int jj = 0; jj < m; ++jj) dd[jj] = script_d(a[jj]);
    for (int i = 0; i < m; ++i)
        for (int jj = 0; jj < m; ++jj) {
            GridField c(total);  // c = Pi^{ij} = D^i(x^j)
            for (std::size_t p = 0; p < total; ++p) c[p] = p2.at(i, jj)[p] / ws.gamma_sq[p];
            const GridField du_c = script_d_u(c);
            GridField& out = hess.at(i, jj);
            for (std::size_t p = 0; p < total; ++p)
                out[p] = 0.5 * (dd[jj][i][p] + dd[i][jj][p] - du_c[p]);
        }

    // Contracted sanity checks against the bracket Laplacian forms.
    const BracketLaplacianResult bl = bracket_laplacian(mf, u);
    const auto pts = interior_points(mf.grid, stencil_margin(2));
    double scale = 1.0;
    for (std::size_t p : pts) scale = std::max(scale, std::abs(bl.laplacian[p]));
    double trace_defect = 0.0, sq_defect = 0.0;
    for (std::size_t p : pts) {
        double tr = 0.0, sq = 0.0;
        for (int i = 0; i < m; ++i) tr += hess.at(i, i)[p];
        for (int i = 0; i < m; ++i)
            for (int jj = 0; jj < m; ++jj) sq += hess.at(i, jj)[p] * hess.at(jj, i)[p];
        trace_defect = std::max(trace_defect, std::abs(tr - bl.laplacian[p]));
        sq_defect = std::max(sq_defect, std::abs(sq - bl.hess_sq[p]));
    }
    const double h = mf.grid.max_step();
    const double tol = std::max(1e-6, 500.0 * h * h) * scale;
    if (trace_defect > tol || sq_defect > tol)
        throw NumericalError("hessian_tensor: contraction checks failed (trace defect " +
                             std::to_string(trace_defect) + ", square defect " +
                             std::to_string(sq_defect) + ")");
    return hess;
}

double curvature_commutation_check(const EmbeddedManifold& mf, const GridField& u) {
    if (mf.n != 2) throw PreconditionError("curvature_commutation_check: requires n = 2");
    Ws ws(mf);
    const std::size_t total = ws.total;
    const std::size_t q = ws.tails.size();
    const auto du = all_partials(mf.grid, u);

    std::vector<GridField> v(q);
    for (std::size_t t = 0; t < q; ++t) {
        v[t] = ws.bracket_tail(du, ws.tails[t]);
        for (std::size_t p = 0; p < total; ++p) v[t][p] /= ws.gamma[p];
    }
    auto d_of = [&](const GridField& f, std::size_t tail_idx) {
        const auto df = all_partials(mf.grid, f);
        GridField out = ws.bracket_tail(df, ws.tails[tail_idx]);
        for (std::size_t p = 0; p < total; ++p) out[p] /= ws.gamma[p];
        return out;
    };

    GridField lap(total, 0.0), grad_sq(total, 0.0);
    std::vector<std::vector<GridField>> w(q, std::vector<GridField>(q));
    for (std::size_t t = 0; t < q; ++t) {
        const auto dv = all_partials(mf.grid, v[t]);
        for (std::size_t s = 0; s < q; ++s) {
            w[s][t] = ws.bracket_tail(dv, ws.tails[s]);
            for (std::size_t p = 0; p < total; ++p) w[s][t][p] /= ws.gamma[p];
        }
        for (std::size_t p = 0; p < total; ++p) {
            lap[p] += w[t][t][p];
            grad_sq[p] += v[t][p] * v[t][p];
        }
    }
    // t1 = D_I(u) D^I(lap); t2 = D_I(u) D^J D_J D^I(u);
    // t3 = [D_I, D^J](u) D_I D^J(u).
    GridField t1(total, 0.0), t2(total, 0.0), t3(total, 0.0);
    for (std::size_t t = 0; t < q; ++t) {
        const GridField dlap = d_of(lap, t);
        for (std::size_t p = 0; p < total; ++p) t1[p] += v[t][p] * dlap[p];
        GridField lap_v(total, 0.0);
        for (std::size_t s = 0; s < q; ++s) {
            const GridField dsv = d_of(w[s][t], s);  // d_s(d_s(v_t)) pieces
            for (std::size_t p = 0; p < total; ++p) lap_v[p] += dsv[p];
        }
        for (std::size_t p = 0; p < total; ++p) t2[p] += v[t][p] * lap_v[p];
    }
    for (std::size_t s = 0; s < q; ++s)
        for (std::size_t t = 0; t < q; ++t)
            for (std::size_t p = 0; p < total; ++p)
                t3[p] += (w[s][t][p] - w[t][s][p]) * w[s][t][p];

    const GridField k_field = gauss_curvature_poisson(mf);
    GridField residual(total);
    for (std::size_t p = 0; p < total; ++p)
        residual[p] = t1[p] - t2[p] - t3[p] + k_field[p] * grad_sq[p];
    return max_abs_over(residual, interior_points(mf.grid, stencil_margin(3)));
}

double gauss_bonnet_quadrature(const EmbeddedManifold& mf, const GridField& k_field) {
    if (mf.n != 2) throw PreconditionError("gauss_bonnet_quadrature: requires n = 2");
    if (!mf.grid.fully_periodic())
        throw PreconditionError(
            "gauss_bonnet_quadrature: refused on non-periodic charts (open boundaries)");
    if (k_field.size() != mf.grid.num_points())
        throw std::invalid_argument("gauss_bonnet_quadrature: field shape mismatch");
    Ws ws(mf);
    std::vector<double> terms(ws.total);
    for (std::size_t p = 0; p < ws.total; ++p)
        terms[p] = k_field[p] * ws.gamma[p] * mf.rho[p];  // K sqrt(g)
    const double cell = mf.grid.axes[0].step * mf.grid.axes[1].step;
    return pairwise_sum(terms) * cell / (2.0 * kPi);
}

}  // namespace fuzzygeom
