// Command-line driver: build surfaces, run N-sweeps and grid-convergence
// studies, emit CSV/JSON reports.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "fuzzygeom/discgeo.hpp"
#include "fuzzygeom/fuzzy.hpp"
#include "fuzzygeom/manifold.hpp"
#include "fuzzygeom/nambu.hpp"
#include "fuzzygeom/report.hpp"

namespace fg = fuzzygeom;

namespace {

// "2..16" or "2,4,8"; strictly increasing, every entry >= 2.
std::vector<int> parse_n_list(const std::string& spec) {
    std::vector<int> out;
    const auto dots = spec.find("..");
    if (dots != std::string::npos) {
        const int lo = std::stoi(spec.substr(0, dots));
        const int hi = std::stoi(spec.substr(dots + 2));
        if (lo > hi) throw std::invalid_argument("--n range is empty: " + spec);
        for (int n = lo; n <= hi; ++n) out.push_back(n);
    } else {
        std::stringstream ss(spec);
        std::string tok;
        while (std::getline(ss, tok, ',')) out.push_back(std::stoi(tok));
    }
    if (out.empty()) throw std::invalid_argument("--n list is empty");
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (out[i] < 2) throw std::invalid_argument("--n entries must be >= 2");
        if (i > 0 && out[i] <= out[i - 1])
            throw std::invalid_argument("--n list must be strictly increasing");
    }
    return out;
}

std::vector<int> parse_grid_list(const std::string& spec) {
    std::vector<int> out;
    std::stringstream ss(spec);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stoi(tok));
    if (out.empty()) throw std::invalid_argument("--grid list is empty");
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (out[i] < 8) throw std::invalid_argument("--grid sizes must be >= 8");
        if (i > 0 && out[i] <= out[i - 1])
            throw std::invalid_argument("--grid list must be strictly increasing");
    }
    return out;
}

int default_jobs() {
    if (const char* env = std::getenv("FUZZYGEOM_JOBS")) {
        const int j = std::atoi(env);
        if (j >= 1) return j;
    }
    return 1;
}

void write_or_print(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw std::invalid_argument("cannot open output file: " + out_path);
    f << text;
}

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

struct FuzzyOptions {
    std::string kind;
    std::string n_spec = "2..16";
    bool chi = false;
    bool spectrum = false;
    bool defects = false;
    bool solve_hbar = false;
    bool zero_timing = false;
    std::string curvature;  // empty = default formulation for the surface
    std::string out;
    std::string profile = "quartic";
    std::vector<double> poly_coeffs;
    double hbar = 0.0;  // 0 = not given
    int jobs = 1;
    double tol_bound = 1e-8;
};

fg::AxialProfile make_profile(const FuzzyOptions& o) {
    if (o.profile == "sphere") return fg::axial_profile_sphere();
    if (o.profile == "quartic") return fg::axial_profile_quartic();
    if (o.profile == "poly") {
        if (o.poly_coeffs.empty())
            throw std::invalid_argument("--profile poly requires --coeffs");
        return fg::axial_profile_poly(o.poly_coeffs);
    }
    throw std::invalid_argument("unknown profile: " + o.profile);
}

fg::FuzzySurface build_surface(const FuzzyOptions& o, int n) {
    if (o.kind == "sphere") return fg::build_fuzzy_sphere(n);
    if (o.kind == "torus") return fg::build_fuzzy_torus(n);
    const fg::AxialProfile prof = make_profile(o);
    double hb = o.hbar;
    if (hb <= 0.0) hb = fg::solve_axial_hbar(n, prof, 1e-4, 3.0);
    return fg::build_axial(n, prof, hb);
}

fg::CurvatureFormulation pick_formulation(const FuzzyOptions& o) {
    if (!o.curvature.empty()) return fg::formulation_from_name(o.curvature);
    if (o.kind == "axial") return fg::CurvatureFormulation::AxialClosedForm;
    return fg::CurvatureFormulation::Normals;
}

int run_fuzzy(const FuzzyOptions& o) {
    const std::vector<int> n_list = parse_n_list(o.n_spec);

    if (o.defects) {
        if (o.kind == "axial")
            throw std::invalid_argument("--defects probes are shipped for sphere and torus only");
        auto family = (o.kind == "sphere")
                          ? std::function<fg::FuzzySurface(int)>(fg::build_fuzzy_sphere)
                          : std::function<fg::FuzzySurface(int)>(fg::build_fuzzy_torus);
        auto probes = (o.kind == "sphere") ? fg::sphere_probes() : fg::torus_probes();
        const auto reports = fg::regularization_defects(family, n_list, probes);
        std::vector<std::vector<double>> rows;
        for (const auto& r : reports)
            rows.push_back({static_cast<double>(r.n_mat), r.product_defect,
                            r.commutator_defect, r.trace_defect});
        write_or_print(fg::table_csv({"N", "product_defect", "commutator_defect",
                                      "trace_defect"}, rows), o.out);
        return 0;
    }

    const fg::CurvatureFormulation form = pick_formulation(o);
    const double chi_target = (o.kind == "torus") ? 0.0 : 2.0;

    std::vector<fg::GeometryReport> reports(n_list.size());
    std::vector<fg::SweepRow> rows(n_list.size());
    std::mutex err_mutex;
    std::string first_error;
    bool precondition = false;

    auto work = [&](std::size_t idx) {
        const auto t0 = std::chrono::steady_clock::now();
        const int n = n_list[idx];
        fg::FuzzySurface s = build_surface(o, n);

        fg::GeometryReport rep;
        rep.surface = s.label;
        rep.n_mat = n;
        rep.hbar = s.hbar;
        rep.formulation = fg::formulation_name(form);

        const auto curv = fg::discrete_curvature(s, form);
        rep.chi_hat = fg::euler_characteristic_hat(s, curv.k_hat);
        rep.defects["hermiticity"] = curv.hermiticity_defect;
        if (o.kind == "sphere") {
            fg::CMatrix cas(n);
            for (const auto& x : s.coords) cas += x * x;
            rep.defects["casimir"] = (cas - fg::CMatrix::identity(n)).max_abs();
            rep.defects["k_identity"] =
                (curv.k_hat - fg::CMatrix::identity(n)).max_abs();
        } else if (o.kind == "torus") {
            rep.defects["k_norm"] = curv.k_hat.max_abs();
        } else {
            const auto w2 = fg::axial_w_squared(n, make_profile(o), s.hbar);
            rep.defects["closure"] = std::abs(w2.back());
        }

        if (o.spectrum) {
            const auto spec = fg::laplacian_spectrum(s);
            rep.kappa = spec.kappa;
            rep.lambda_min_nonzero = spec.lambda_min_nonzero;
            rep.bound_satisfied =
                spec.lambda_min_nonzero >= 2.0 * spec.kappa - o.tol_bound;
        }

        const auto t1 = std::chrono::steady_clock::now();
        const double ms = o.zero_timing
                              ? 0.0
                              : std::chrono::duration<double, std::milli>(t1 - t0).count();
        reports[idx] = rep;
        rows[idx] = {n, s.hbar, rep.chi_hat, rep.chi_hat - chi_target,
                     rep.kappa, rep.lambda_min_nonzero, ms};
    };

    const int jobs = std::max(1, o.jobs);
    std::size_t next = 0;
    std::mutex next_mutex;
    auto worker = [&]() {
        for (;;) {
            std::size_t idx;
            {
                std::lock_guard<std::mutex> lk(next_mutex);
                if (next >= n_list.size()) return;
                idx = next++;
            }
            try {
                work(idx);
            } catch (const fg::PreconditionError& e) {
                std::lock_guard<std::mutex> lk(err_mutex);
                if (first_error.empty()) { first_error = e.what(); precondition = true; }
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lk(err_mutex);
                if (first_error.empty()) first_error = e.what();
            }
        }
    };
    if (jobs == 1 || n_list.size() == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < std::min<int>(jobs, static_cast<int>(n_list.size())); ++t)
            pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (!first_error.empty()) {
        std::cerr << "error: " << first_error << "\n";
        return precondition ? 3 : 1;
    }

    if (ends_with(o.out, ".json")) {
        fg::ordered_json arr = fg::ordered_json::array();
        for (const auto& r : reports) arr.push_back(fg::report_to_json(r));
        write_or_print(arr.dump(2) + "\n", o.out);
    } else {
        write_or_print(fg::sweep_csv(rows), o.out);
    }
    return 0;
}

struct BoundOptions {
    std::string kind;
    std::string n_spec = "2..12";
    std::string profile = "quartic";
    std::vector<double> poly_coeffs;
    double hbar = 0.0;
    double tol_bound = 1e-8;
    std::string out;
};

int run_bound(const BoundOptions& o) {
    const std::vector<int> n_list = parse_n_list(o.n_spec);
    for (int n : n_list)
        if (static_cast<long long>(n) * n > 4096)
            throw std::invalid_argument(
                "N = " + std::to_string(n) + " exceeds the superoperator cap (N^2 <= 4096)");

    FuzzyOptions fo;
    fo.kind = o.kind;
    fo.profile = o.profile;
    fo.poly_coeffs = o.poly_coeffs;
    fo.hbar = o.hbar;

    bool all_ok = true;
    std::vector<std::vector<double>> rows;
    for (int n : n_list) {
        const fg::FuzzySurface s = build_surface(fo, n);
        const auto spec = fg::laplacian_spectrum(s);
        const bool ok = spec.lambda_min_nonzero >= 2.0 * spec.kappa - o.tol_bound;
        all_ok = all_ok && ok;
        rows.push_back({static_cast<double>(n), spec.kappa, spec.lambda_min_nonzero,
                        2.0 * spec.kappa, ok ? 1.0 : 0.0});
    }
    write_or_print(fg::table_csv({"N", "kappa", "lambda_min_nonzero", "two_kappa",
                                  "satisfied"}, rows), o.out);
    return all_ok ? 0 : 1;
}

struct ContinuumOptions {
    std::string preset = "torus_rev";
    std::string grid_spec = "64";
    std::string check = "curvature";
    std::string rho = "sqrt_g";
    std::string spec_json;  // manifold JSON file; overrides --preset
    double big_r = 2.0, small_r = 1.0;
    double ax = 1.0, bx = 1.0, cx = 1.0;
    std::string out;
    int jobs = 1;
};

fg::EmbeddedManifold build_manifold(const ContinuumOptions& o, int size) {
    if (!o.spec_json.empty()) {
        std::ifstream f(o.spec_json);
        if (!f) throw std::invalid_argument("cannot open manifold spec: " + o.spec_json);
        fg::ordered_json j;
        f >> j;
        return fg::manifold_from_json(j);
    }
    if (o.preset == "sphere") return fg::make_sphere(size, size, o.rho);
    if (o.preset == "torus_rev")
        return fg::make_torus_rev(size, size, o.big_r, o.small_r, o.rho);
    if (o.preset == "clifford") return fg::make_clifford(size, size, o.rho);
    if (o.preset == "ellipsoid")
        return fg::make_ellipsoid(size, size, o.ax, o.bx, o.cx, o.rho);
    if (o.preset == "s3") return fg::make_s3(size, size, size, o.rho);
    throw std::invalid_argument("unknown preset: " + o.preset);
}

// Smooth deterministic probe built from the embedding components.
fg::GridField probe_field(const fg::EmbeddedManifold& mf, int which) {
    const int m = mf.m;
    const auto& x = mf.embedding;
    const std::size_t np = mf.grid.num_points();
    fg::GridField f(np);
    for (std::size_t p = 0; p < np; ++p) {
        const double a = x[0][p], b = x[1 % m][p], c = x[2 % m][p];
        switch (which) {
            case 0: f[p] = a * b + 0.3 * c; break;
            case 1: f[p] = b - 0.7 * c * a; break;
            case 2: f[p] = c + 0.5 * a * a; break;
            default: f[p] = a + 0.4 * b * c; break;
        }
    }
    return f;
}

// Gauss-curvature oracle for the shipped surface presets; empty if unknown.
std::function<double(const std::vector<double>&)> curvature_oracle(const ContinuumOptions& o) {
    if (!o.spec_json.empty()) return {};
    if (o.preset == "sphere") return [](const std::vector<double>&) { return 1.0; };
    if (o.preset == "clifford") return [](const std::vector<double>&) { return 0.0; };
    if (o.preset == "torus_rev") {
        const double R = o.big_r, r = o.small_r;
        return [R, r](const std::vector<double>& u) {
            return std::cos(u[0]) / (r * (R + r * std::cos(u[0])));
        };
    }
    return {};
}

int run_continuum(const ContinuumOptions& o) {
    const std::vector<int> sizes = parse_grid_list(o.grid_spec);
    fg::set_grid_jobs(std::max(1, o.jobs));

    std::vector<std::string> header = {"grid", "h"};
    bool header_done = false;
    std::vector<std::vector<double>> rows;

    for (int size : sizes) {
        fg::EmbeddedManifold mf = build_manifold(o, size);
        fg::validate_manifold(mf);
        std::vector<double> row = {static_cast<double>(size), mf.grid.max_step()};
        std::vector<std::string> cols;

        if (o.check == "curvature") {
            const fg::GridField k = fg::gauss_curvature_poisson(mf);
            const auto pts = fg::interior_points(mf.grid, fg::stencil_margin(2));
            const auto oracle = curvature_oracle(o);
            if (oracle) {
                double err = 0.0;
                std::vector<int> idx(mf.grid.dim());
                std::vector<double> u(mf.grid.dim());
                for (std::size_t p : pts) {
                    mf.grid.unflat(p, idx);
                    for (int a = 0; a < mf.grid.dim(); ++a)
                        u[a] = mf.grid.coordinate(a, idx[a]);
                    err = std::max(err, std::abs(k[p] - oracle(u)));
                }
                cols = {"max_K_error"};
                row.push_back(err);
            } else {
                cols = {"max_abs_K"};
                row.push_back(fg::max_abs_over(k, pts));
            }
        } else if (o.check == "codazzi") {
            const auto frame = fg::normal_frame(mf);
            const auto rep = fg::codazzi_residual(mf, frame);
            cols = {"max_residual", "max_raw"};
            row.push_back(rep.max_residual);
            row.push_back(rep.max_raw);
        } else if (o.check == "complex-structure") {
            const auto rep = fg::complex_structure_check(mf);
            cols = {"j_defect", "normal_defect"};
            row.push_back(rep.j_defect);
            row.push_back(rep.normal_defect);
        } else if (o.check == "gauss-bonnet") {
            const fg::GridField k = fg::gauss_curvature_poisson(mf);
            cols = {"euler_char"};
            row.push_back(fg::gauss_bonnet_quadrature(mf, k));
        } else if (o.check == "identities") {
            const auto pts1 = fg::interior_points(mf.grid, fg::stencil_margin(1));
            const auto pts2 = fg::interior_points(mf.grid, fg::stencil_margin(2));
            const std::size_t np = mf.grid.num_points();

            const fg::MatrixField pi = fg::tangent_projection(mf);
            double pi_idem = 0.0;
            for (std::size_t p : pts1)
                for (int i = 0; i < mf.m; ++i)
                    for (int j = 0; j < mf.m; ++j) {
                        double v = 0.0;
                        for (int l = 0; l < mf.m; ++l)
                            v += pi.at(i, l)[p] * pi.at(l, j)[p];
                        pi_idem = std::max(pi_idem, std::abs(v - pi.at(i, j)[p]));
                    }
            cols.push_back("pi_idempotency");
            row.push_back(pi_idem);

            const auto frame = fg::normal_frame(mf);
            cols.push_back("gram_eigen");
            row.push_back(frame.gram_eigen_defect);
            cols.push_back("gram_count");
            row.push_back(frame.count_check);

            const fg::GridField f = probe_field(mf, 0), g = probe_field(mf, 1),
                                h = probe_field(mf, 2), u = probe_field(mf, 3);

            // Leibniz in the first slot, remaining slots filled with probes.
            {
                std::vector<fg::GridField> tail;
                for (int a = 1; a < mf.n; ++a) tail.push_back(probe_field(mf, a + 1));
                auto with_first = [&](const fg::GridField& first) {
                    std::vector<fg::GridField> args = {first};
                    for (const auto& t : tail) args.push_back(t);
                    return fg::nambu_bracket(mf, args);
                };
                fg::GridField fgp(np);
                for (std::size_t p = 0; p < np; ++p) fgp[p] = f[p] * g[p];
                const fg::GridField bfg = with_first(fgp), bf = with_first(f),
                                    bg = with_first(g);
                double defect = 0.0;
                for (std::size_t p : pts1)
                    defect = std::max(defect,
                                      std::abs(bfg[p] - f[p] * bg[p] - g[p] * bf[p]));
                cols.push_back("leibniz");
                row.push_back(defect);
            }

            if (mf.n == 2) {
                auto br = [&](const fg::GridField& a, const fg::GridField& b) {
                    return fg::nambu_bracket(mf, {a, b});
                };
                const fg::GridField t1 = br(br(f, g), h), t2 = br(br(g, h), f),
                                    t3 = br(br(h, f), g);
                double defect = 0.0;
                for (std::size_t p : pts2)
                    defect = std::max(defect, std::abs(t1[p] + t2[p] + t3[p]));
                cols.push_back("jacobi");
                row.push_back(defect);

                const auto cs = fg::complex_structure_check(mf);
                cols.push_back("j_squared");
                row.push_back(cs.j_defect);

                cols.push_back("commutation");
                row.push_back(fg::curvature_commutation_check(mf, u));

                if (mf.m == 3) {
                    const auto cod = fg::codazzi_residual(mf, frame);
                    cols.push_back("codazzi");
                    row.push_back(cod.max_residual);
                }
            }
        } else {
            throw std::invalid_argument("unknown check: " + o.check);
        }

        if (!header_done) {
            for (const auto& c : cols) header.push_back(c);
            header_done = true;
        }
        rows.push_back(row);
    }

    write_or_print(fg::table_csv(header, rows), o.out);

    // Fitted convergence orders between successive refinements.
    if (rows.size() >= 2 && !o.out.empty()) {
        for (std::size_t c = 2; c < header.size(); ++c) {
            for (std::size_t r = 1; r < rows.size(); ++r) {
                const double e1 = rows[r - 1][c], e2 = rows[r][c];
                const double h1 = rows[r - 1][1], h2 = rows[r][1];
                if (e1 > 0.0 && e2 > 0.0)
                    std::cout << "order " << header[c] << " " << rows[r - 1][0] << "->"
                              << rows[r][0] << " = "
                              << std::log(e1 / e2) / std::log(h1 / h2) << "\n";
            }
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Matrix and Poisson-bracket surface geometry toolkit"};
    app.require_subcommand(1);

    FuzzyOptions fo;
    BoundOptions bo;
    ContinuumOptions co;
    fo.jobs = default_jobs();
    co.jobs = default_jobs();

    auto* fuzzy = app.add_subcommand("fuzzy", "Finite-N matrix surface sweeps");
    fuzzy->require_subcommand(1);
    for (const char* kind : {"sphere", "torus", "axial"}) {
        auto* sub = fuzzy->add_subcommand(kind);
        sub->add_option("--n", fo.n_spec, "N range '2..16' or list '2,4,8' (default 2..16)");
        sub->add_flag("--chi", fo.chi, "compute discrete Euler characteristic");
        sub->add_option("--curvature", fo.curvature,
                        "formulation: epsilon|brackets|normals|axial");
        sub->add_flag("--spectrum", fo.spectrum, "compute Laplacian spectrum summary");
        sub->add_flag("--defects", fo.defects,
                      "regularization defect probes (sphere/torus)");
        sub->add_option("--out", fo.out, "output path (.csv or .json); stdout if omitted");
        sub->add_flag("--zero-timing", fo.zero_timing, "pin runtime_ms to 0");
        sub->add_option("--jobs", fo.jobs, "sweep parallelism (default FUZZYGEOM_JOBS or 1)");
        sub->add_option("--tol-bound", fo.tol_bound,
                        "spectral-bound slack (default 1e-8)");
        if (std::string(kind) == "axial") {
            sub->add_option("--profile", fo.profile, "sphere|quartic|poly (default quartic)");
            sub->add_option("--coeffs", fo.poly_coeffs,
                            "ascending f^2 coefficients for --profile poly");
            sub->add_option("--hbar", fo.hbar, "fixed hbar (default: solve)");
            sub->add_flag("--solve-hbar", fo.solve_hbar,
                          "bisect the quantization defect for hbar (default when --hbar absent)");
        }
        sub->callback([&fo, kind]() { fo.kind = kind; });
    }

    auto* cont = app.add_subcommand("continuum", "Grid-convergence studies");
    cont->add_option("--preset", co.preset, "sphere|torus_rev|clifford|ellipsoid|s3");
    cont->add_option("--grid", co.grid_spec, "grid sizes, e.g. 64,128,256");
    cont->add_option("--check", co.check,
                     "curvature|codazzi|complex-structure|identities|gauss-bonnet");
    cont->add_option("--rho", co.rho, "bracket density: sqrt_g|one (default sqrt_g)");
    cont->add_option("--spec-json", co.spec_json, "manifold JSON file (overrides --preset)");
    cont->add_option("--big-r", co.big_r, "torus_rev major radius (default 2)");
    cont->add_option("--small-r", co.small_r, "torus_rev minor radius (default 1)");
    cont->add_option("--ellipsoid-a", co.ax, "ellipsoid semi-axis a");
    cont->add_option("--ellipsoid-b", co.bx, "ellipsoid semi-axis b");
    cont->add_option("--ellipsoid-c", co.cx, "ellipsoid semi-axis c");
    cont->add_option("--out", co.out, "output path; stdout if omitted");
    cont->add_option("--jobs", co.jobs, "grid-loop parallelism (default FUZZYGEOM_JOBS or 1)");

    auto* bound = app.add_subcommand("bound", "Spectral bound table lambda_min >= 2 kappa");
    bound->require_subcommand(1);
    for (const char* kind : {"sphere", "torus", "axial"}) {
        auto* sub = bound->add_subcommand(kind);
        sub->add_option("--n", bo.n_spec, "N range (default 2..12)");
        sub->add_option("--out", bo.out, "output path; stdout if omitted");
        sub->add_option("--tol-bound", bo.tol_bound, "bound slack (default 1e-8)");
        if (std::string(kind) == "axial") {
            sub->add_option("--profile", bo.profile, "sphere|quartic|poly");
            sub->add_option("--coeffs", bo.poly_coeffs, "f^2 coefficients for poly");
            sub->add_option("--hbar", bo.hbar, "fixed hbar (default: solve)");
        }
        sub->callback([&bo, kind]() { bo.kind = kind; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (app.got_subcommand(fuzzy)) return run_fuzzy(fo);
        if (app.got_subcommand(cont)) return run_continuum(co);
        if (app.got_subcommand(bound)) return run_bound(bo);
        return 2;
    } catch (const fg::PreconditionError& e) {
        std::cerr << "precondition: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
