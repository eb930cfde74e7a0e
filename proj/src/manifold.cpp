#include "fuzzygeom/manifold.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace fuzzygeom {

namespace {

const double kPi = 3.14159265358979323846;

GridAxis open_axis(int size, double lo, double hi) {
    if (size < 2) throw std::invalid_argument("grid axis size must be >= 2");
    return {size, lo, (hi - lo) / (size - 1), false};
}

GridAxis periodic_axis(int size, double lo, double hi) {
    if (size < 2) throw std::invalid_argument("grid axis size must be >= 2");
    return {size, lo, (hi - lo) / size, true};
}

GridField constant_field(const Grid& g, double v) { return GridField(g.num_points(), v); }

void check_rho_mode(const std::string& rho_mode) {
    if (rho_mode != "sqrt_g" && rho_mode != "one")
        throw std::invalid_argument("rho mode must be 'sqrt_g' or 'one', got '" + rho_mode +
                                    "'");
}

}  // namespace

EmbeddedManifold make_sphere(int n_theta, int n_phi, const std::string& rho_mode) {
    check_rho_mode(rho_mode);
    EmbeddedManifold mf;
    mf.label = "sphere";
    mf.n = 2;
    mf.m = 3;
    // Polar chart avoiding the poles: theta in [0.2, pi - 0.2], phi periodic.
    mf.grid.axes = {open_axis(n_theta, 0.2, kPi - 0.2), periodic_axis(n_phi, 0.0, 2.0 * kPi)};
    auto fld = [&](auto fn) {
        return make_field(mf.grid, [&](const std::vector<double>& u) { return fn(u[0], u[1]); });
    };
    mf.embedding = {fld([](double th, double ph) { return std::sin(th) * std::cos(ph); }),
                    fld([](double th, double ph) { return std::sin(th) * std::sin(ph); }),
                    fld([](double th, double) { return std::cos(th); })};
    mf.rho_mode = rho_mode;
    mf.rho = rho_mode == "sqrt_g" ? fld([](double th, double) { return std::sin(th); })
                                  : constant_field(mf.grid, 1.0);
    return mf;
}

EmbeddedManifold make_torus_rev(int n_theta, int n_phi, double big_r, double small_r,
                                const std::string& rho_mode) {
    check_rho_mode(rho_mode);
    if (!(big_r > small_r) || !(small_r > 0.0))
        throw std::invalid_argument("make_torus_rev: need R > r > 0");
    EmbeddedManifold mf;
    mf.label = "torus_rev";
    mf.n = 2;
    mf.m = 3;
    mf.grid.axes = {periodic_axis(n_theta, 0.0, 2.0 * kPi),
                    periodic_axis(n_phi, 0.0, 2.0 * kPi)};
    auto fld = [&](auto fn) {
        return make_field(mf.grid, [&](const std::vector<double>& u) { return fn(u[0], u[1]); });
    };
    mf.embedding = {
        fld([=](double th, double ph) { return (big_r + small_r * std::cos(th)) * std::cos(ph); }),
        fld([=](double th, double ph) { return (big_r + small_r * std::cos(th)) * std::sin(ph); }),
        fld([=](double th, double) { return small_r * std::sin(th); })};
    mf.rho_mode = rho_mode;
    mf.rho = rho_mode == "sqrt_g"
                 ? fld([=](double th, double) { return small_r * (big_r + small_r * std::cos(th)); })
                 : constant_field(mf.grid, 1.0);
    return mf;
}

EmbeddedManifold make_clifford(int n1, int n2, const std::string& rho_mode) {
    check_rho_mode(rho_mode);
    EmbeddedManifold mf;
    mf.label = "clifford";
    mf.n = 2;
    mf.m = 4;
    mf.grid.axes = {periodic_axis(n1, 0.0, 2.0 * kPi), periodic_axis(n2, 0.0, 2.0 * kPi)};
    const double c = 1.0 / std::sqrt(2.0);
    auto fld = [&](auto fn) {
        return make_field(mf.grid, [&](const std::vector<double>& u) { return fn(u[0], u[1]); });
    };
    mf.embedding = {fld([=](double p1, double) { return c * std::cos(p1); }),
                    fld([=](double p1, double) { return c * std::sin(p1); }),
                    fld([=](double, double p2) { return c * std::cos(p2); }),
                    fld([=](double, double p2) { return c * std::sin(p2); })};
    mf.rho_mode = rho_mode;
    mf.rho = constant_field(mf.grid, rho_mode == "sqrt_g" ? 0.5 : 1.0);
    return mf;
}

EmbeddedManifold make_ellipsoid(int n_theta, int n_phi, double a, double b, double c,
                                const std::string& rho_mode) {
    check_rho_mode(rho_mode);
    if (!(a > 0.0 && b > 0.0 && c > 0.0))
        throw std::invalid_argument("make_ellipsoid: semi-axes must be positive");
    EmbeddedManifold mf;
    mf.label = "ellipsoid";
    mf.n = 2;
    mf.m = 3;
    mf.grid.axes = {open_axis(n_theta, 0.2, kPi - 0.2), periodic_axis(n_phi, 0.0, 2.0 * kPi)};
    auto fld = [&](auto fn) {
        return make_field(mf.grid, [&](const std::vector<double>& u) { return fn(u[0], u[1]); });
    };
    mf.embedding = {fld([=](double th, double ph) { return a * std::sin(th) * std::cos(ph); }),
                    fld([=](double th, double ph) { return b * std::sin(th) * std::sin(ph); }),
                    fld([=](double th, double) { return c * std::cos(th); })};
    mf.rho_mode = rho_mode;
    if (rho_mode == "one") {
        mf.rho = constant_field(mf.grid, 1.0);
    } else {
        mf.rho = fld([=](double th, double ph) {
            const double st = std::sin(th), ct = std::cos(th);
            const double sp = std::sin(ph), cp = std::cos(ph);
            const double gtt = a * a * ct * ct * cp * cp + b * b * ct * ct * sp * sp +
                               c * c * st * st;
            const double gpp = st * st * (a * a * sp * sp + b * b * cp * cp);
            const double gtp = (b * b - a * a) * st * ct * sp * cp;
            return std::sqrt(gtt * gpp - gtp * gtp);
        });
    }
    return mf;
}

EmbeddedManifold make_s3(int n1, int n2, int n3, const std::string& rho_mode) {
    check_rho_mode(rho_mode);
    EmbeddedManifold mf;
    mf.label = "s3";
    mf.n = 3;
    mf.m = 4;
    mf.grid.axes = {open_axis(n1, 0.3, kPi - 0.3), open_axis(n2, 0.3, kPi - 0.3),
                    periodic_axis(n3, 0.0, 2.0 * kPi)};
    auto fld = [&](auto fn) {
        return make_field(mf.grid,
                          [&](const std::vector<double>& u) { return fn(u[0], u[1], u[2]); });
    };
    mf.embedding = {
        fld([](double t1, double, double) { return std::cos(t1); }),
        fld([](double t1, double t2, double) { return std::sin(t1) * std::cos(t2); }),
        fld([](double t1, double t2, double ph) {
            return std::sin(t1) * std::sin(t2) * std::cos(ph);
        }),
        fld([](double t1, double t2, double ph) {
            return std::sin(t1) * std::sin(t2) * std::sin(ph);
        })};
    mf.rho_mode = rho_mode;
    mf.rho = rho_mode == "sqrt_g"
                 ? fld([](double t1, double t2, double) {
                       return std::sin(t1) * std::sin(t1) * std::sin(t2);
                   })
                 : constant_field(mf.grid, 1.0);
    return mf;
}

EmbeddedManifold manifold_from_json(const ordered_json& spec) {
    const std::string preset = spec.at("preset").get<std::string>();
    const std::string rho_mode = spec.value("rho", std::string("sqrt_g"));
    const auto& grid = spec.at("grid");
    std::vector<int> sizes;
    for (const auto& ax : grid) sizes.push_back(ax.at("size").get<int>());

    ordered_json params = spec.value("params", ordered_json::object());
    EmbeddedManifold mf;
    if (preset == "sphere") {
        if (sizes.size() != 2) throw std::invalid_argument("sphere: grid must have 2 axes");
        mf = make_sphere(sizes[0], sizes[1], rho_mode);
    } else if (preset == "torus_rev") {
        if (sizes.size() != 2) throw std::invalid_argument("torus_rev: grid must have 2 axes");
        mf = make_torus_rev(sizes[0], sizes[1], params.value("R", 2.0), params.value("r", 1.0),
                            rho_mode);
    } else if (preset == "clifford") {
        if (sizes.size() != 2) throw std::invalid_argument("clifford: grid must have 2 axes");
        mf = make_clifford(sizes[0], sizes[1], rho_mode);
    } else if (preset == "ellipsoid") {
        if (sizes.size() != 2) throw std::invalid_argument("ellipsoid: grid must have 2 axes");
        mf = make_ellipsoid(sizes[0], sizes[1], params.value("a", 1.0), params.value("b", 1.0),
                            params.value("c", 1.0), rho_mode);
    } else if (preset == "s3") {
        if (sizes.size() != 3) throw std::invalid_argument("s3: grid must have 3 axes");
        mf = make_s3(sizes[0], sizes[1], sizes[2], rho_mode);
    } else if (preset == "custom") {
        mf.label = "custom";
        mf.n = static_cast<int>(sizes.size());
        mf.m = params.at("m").get<int>();
        for (std::size_t a = 0; a < sizes.size(); ++a) {
            const auto& ax = grid[a];
            const bool periodic = ax.value("periodic", false);
            const auto& range = ax.at("range");
            const double lo = range.at(0).get<double>(), hi = range.at(1).get<double>();
            mf.grid.axes.push_back(periodic ? GridAxis{sizes[a], lo, (hi - lo) / sizes[a], true}
                                            : GridAxis{sizes[a], lo,
                                                       (hi - lo) / (sizes[a] - 1), false});
        }
        const auto& emb = params.at("embedding");
        if (static_cast<int>(emb.size()) != mf.m)
            throw std::invalid_argument("custom: embedding must list m component fields");
        for (const auto& comp : emb) {
            GridField f = comp.get<GridField>();
            if (f.size() != mf.grid.num_points())
                throw std::invalid_argument("custom: embedding field shape mismatch");
            mf.embedding.push_back(std::move(f));
        }
        mf.rho_mode = rho_mode;
        if (params.contains("rho_values")) {
            mf.rho = params.at("rho_values").get<GridField>();
            if (mf.rho.size() != mf.grid.num_points())
                throw std::invalid_argument("custom: rho_values shape mismatch");
        } else if (rho_mode == "one") {
            mf.rho = GridField(mf.grid.num_points(), 1.0);
        } else {
            GridField det = metric_determinant(mf);
            mf.rho.resize(det.size());
            for (std::size_t p = 0; p < det.size(); ++p) mf.rho[p] = std::sqrt(det[p]);
        }
        validate_manifold(mf);
        return mf;
    } else {
        throw std::invalid_argument("unknown preset '" + preset + "'");
    }

    // Named presets honor explicit range/periodic overrides only if they match
    // the chart the preset defines; reject contradictions instead of ignoring.
    for (std::size_t a = 0; a < sizes.size(); ++a) {
        const auto& ax = grid[a];
        if (ax.contains("periodic") && ax.at("periodic").get<bool>() != mf.grid.axes[a].periodic)
            throw std::invalid_argument("preset '" + preset +
                                        "' fixes axis periodicity; conflicting override");
    }
    validate_manifold(mf);
    return mf;
}

GridField metric_determinant(const EmbeddedManifold& mf) {
    const int n = mf.n, m = mf.m;
    std::vector<std::vector<GridField>> dx(m);
    for (int i = 0; i < m; ++i) {
        dx[i].resize(n);
        for (int a = 0; a < n; ++a) dx[i][a] = partial_derivative(mf.grid, mf.embedding[i], a);
    }
    const std::size_t total = mf.grid.num_points();
    GridField det(total);
    parallel_for(total, [&](std::size_t lo, std::size_t hi) {
        std::vector<double> g(static_cast<std::size_t>(n) * n);
        for (std::size_t p = lo; p < hi; ++p) {
            for (int a = 0; a < n; ++a)
                for (int b = a; b < n; ++b) {
                    double s = 0.0;
                    for (int i = 0; i < m; ++i) s += dx[i][a][p] * dx[i][b][p];
                    g[a * n + b] = g[b * n + a] = s;
                }
            if (n == 1) {
                det[p] = g[0];
            } else if (n == 2) {
                det[p] = g[0] * g[3] - g[1] * g[2];
            } else if (n == 3) {
                det[p] = g[0] * (g[4] * g[8] - g[5] * g[7]) -
                         g[1] * (g[3] * g[8] - g[5] * g[6]) +
                         g[2] * (g[3] * g[7] - g[4] * g[6]);
            } else {
                throw std::invalid_argument("metric_determinant: n > 3 unsupported");
            }
        }
    });
    return det;
}

void validate_manifold(const EmbeddedManifold& mf) {
    if (mf.n < 1 || mf.n > 3)
        throw PreconditionError("manifold: intrinsic dimension must be 1..3");
    if (mf.m < mf.n) throw PreconditionError("manifold: ambient dimension < intrinsic");
    if (mf.grid.dim() != mf.n) throw PreconditionError("manifold: grid rank != n");
    for (const auto& ax : mf.grid.axes)
        if (ax.size < 8) throw PreconditionError("manifold: grid axes must have size >= 8");
    const std::size_t total = mf.grid.num_points();
    if (static_cast<int>(mf.embedding.size()) != mf.m)
        throw PreconditionError("manifold: embedding component count != m");
    for (const auto& f : mf.embedding) {
        if (f.size() != total) throw PreconditionError("manifold: embedding shape mismatch");
        for (double v : f)
            if (!std::isfinite(v)) throw PreconditionError("manifold: non-finite embedding");
    }
    if (mf.rho.size() != total) throw PreconditionError("manifold: rho shape mismatch");
    for (double v : mf.rho)
        if (!(v > 0.0)) throw PreconditionError("manifold: rho must be > 0 everywhere");

    const GridField det = metric_determinant(mf);
    const auto pts = interior_points(mf.grid, stencil_margin(1));
    for (std::size_t p : pts)
        if (!(det[p] > 0.0))
            throw PreconditionError("manifold: induced metric not positive definite");
}

void dump_field(const Grid& g, const GridField& f, const std::string& path_base) {
    if (f.size() != g.num_points())
        throw std::invalid_argument("dump_field: field shape mismatch");
    std::ofstream bin(path_base + ".bin", std::ios::binary);
    if (!bin) throw std::runtime_error("dump_field: cannot open " + path_base + ".bin");
    bin.write(reinterpret_cast<const char*>(f.data()),
              static_cast<std::streamsize>(f.size() * sizeof(double)));
    if (!bin) throw std::runtime_error("dump_field: write failed for " + path_base + ".bin");

    ordered_json side;
    side["dtype"] = "float64";
    side["order"] = "row-major";
    ordered_json shape = ordered_json::array();
    ordered_json axes = ordered_json::array();
    for (const auto& ax : g.axes) {
        shape.push_back(ax.size);
        axes.push_back({{"origin", ax.origin}, {"step", ax.step}, {"periodic", ax.periodic}});
    }
    side["shape"] = std::move(shape);
    side["axes"] = std::move(axes);
    std::ofstream js(path_base + ".json");
    if (!js) throw std::runtime_error("dump_field: cannot open " + path_base + ".json");
    js << side.dump(2) << "\n";
}

GridField load_field(const Grid& g, const std::string& path_base) {
    std::ifstream bin(path_base + ".bin", std::ios::binary);
    if (!bin) throw std::runtime_error("load_field: cannot open " + path_base + ".bin");
    GridField f(g.num_points());
    bin.read(reinterpret_cast<char*>(f.data()),
             static_cast<std::streamsize>(f.size() * sizeof(double)));
    if (bin.gcount() != static_cast<std::streamsize>(f.size() * sizeof(double)))
        throw std::runtime_error("load_field: short read from " + path_base + ".bin");
    return f;
}

}  // namespace fuzzygeom
