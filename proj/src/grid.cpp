#include "fuzzygeom/grid.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace fuzzygeom {

namespace {

int g_jobs = 1;

}  // namespace

void set_grid_jobs(int jobs) {
    if (jobs < 1) throw std::invalid_argument("set_grid_jobs: jobs must be >= 1");
    g_jobs = jobs;
}

int grid_jobs() { return g_jobs; }

void parallel_for(std::size_t total,
                  const std::function<void(std::size_t, std::size_t)>& fn) {
    const int jobs = std::min<std::size_t>(g_jobs, std::max<std::size_t>(total, 1));
    if (jobs <= 1 || total == 0) {
        fn(0, total);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    const std::size_t chunk = (total + jobs - 1) / jobs;
    for (int t = 0; t < jobs; ++t) {
        const std::size_t lo = std::min(total, t * chunk);
        const std::size_t hi = std::min(total, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back(fn, lo, hi);
    }
    for (auto& th : pool) th.join();
}

std::size_t Grid::num_points() const {
    std::size_t n = 1;
    for (const auto& a : axes) n *= static_cast<std::size_t>(a.size);
    return n;
}

std::size_t Grid::stride(int axis) const {
    std::size_t s = 1;
    for (int a = dim() - 1; a > axis; --a) s *= static_cast<std::size_t>(axes[a].size);
    return s;
}

std::size_t Grid::flat(const std::vector<int>& idx) const {
    std::size_t f = 0;
    for (int a = 0; a < dim(); ++a) f = f * axes[a].size + idx[a];
    return f;
}

void Grid::unflat(std::size_t flat_idx, std::vector<int>& idx) const {
    idx.resize(axes.size());
    for (int a = dim() - 1; a >= 0; --a) {
        idx[a] = static_cast<int>(flat_idx % axes[a].size);
        flat_idx /= axes[a].size;
    }
}

double Grid::max_step() const {
    double h = 0.0;
    for (const auto& a : axes) h = std::max(h, a.step);
    return h;
}

bool Grid::fully_periodic() const {
    for (const auto& a : axes)
        if (!a.periodic) return false;
    return !axes.empty();
}

GridField make_field(const Grid& g,
                     const std::function<double(const std::vector<double>&)>& fn) {
    GridField out(g.num_points());
    std::vector<int> idx;
    std::vector<double> u(g.dim());
    for (std::size_t p = 0; p < out.size(); ++p) {
        g.unflat(p, idx);
        for (int a = 0; a < g.dim(); ++a) u[a] = g.coordinate(a, idx[a]);
        out[p] = fn(u);
    }
    return out;
}

GridField partial_derivative(const Grid& g, const GridField& f, int axis) {
    if (axis < 0 || axis >= g.dim()) throw std::invalid_argument("partial_derivative: bad axis");
    if (f.size() != g.num_points())
        throw std::invalid_argument("partial_derivative: field shape mismatch");
    const int n = g.axes[axis].size;
    if (n < 5) throw std::invalid_argument("partial_derivative: axis size must be >= 5");
    const double inv12h = 1.0 / (12.0 * g.axes[axis].step);
    const bool periodic = g.axes[axis].periodic;
    const std::size_t str = g.stride(axis);
    const std::size_t block = str * static_cast<std::size_t>(n);

    GridField out(f.size());
    parallel_for(f.size() / block, [&](std::size_t b0, std::size_t b1) {
        for (std::size_t b = b0; b < b1; ++b) {
            const std::size_t base = b * block;
            for (std::size_t s = 0; s < str; ++s) {
                const double* in = f.data() + base + s;
                double* o = out.data() + base + s;
                auto at = [&](int i) { return in[static_cast<std::size_t>(i) * str]; };
                if (periodic) {
                    for (int i = 0; i < n; ++i) {
                        const int im2 = (i - 2 + n) % n, im1 = (i - 1 + n) % n;
                        const int ip1 = (i + 1) % n, ip2 = (i + 2) % n;
                        o[static_cast<std::size_t>(i) * str] =
                            (at(im2) - 8.0 * at(im1) + 8.0 * at(ip1) - at(ip2)) * inv12h;
                    }
                } else {
                    o[0] = (-25.0 * at(0) + 48.0 * at(1) - 36.0 * at(2) + 16.0 * at(3) -
                            3.0 * at(4)) * inv12h;
                    o[str] = (-3.0 * at(0) - 10.0 * at(1) + 18.0 * at(2) - 6.0 * at(3) +
                              at(4)) * inv12h;
                    for (int i = 2; i < n - 2; ++i)
                        o[static_cast<std::size_t>(i) * str] =
                            (at(i - 2) - 8.0 * at(i - 1) + 8.0 * at(i + 1) - at(i + 2)) * inv12h;
                    o[static_cast<std::size_t>(n - 2) * str] =
                        (3.0 * at(n - 1) + 10.0 * at(n - 2) - 18.0 * at(n - 3) +
                         6.0 * at(n - 4) - at(n - 5)) * inv12h;
                    o[static_cast<std::size_t>(n - 1) * str] =
                        (25.0 * at(n - 1) - 48.0 * at(n - 2) + 36.0 * at(n - 3) -
                         16.0 * at(n - 4) + 3.0 * at(n - 5)) * inv12h;
                }
            }
        }
    });
    return out;
}

std::vector<std::size_t> interior_points(const Grid& g, int margin) {
    std::vector<std::size_t> pts;
    std::vector<int> idx;
    const std::size_t total = g.num_points();
    pts.reserve(total);
    for (std::size_t p = 0; p < total; ++p) {
        g.unflat(p, idx);
        bool ok = true;
        for (int a = 0; a < g.dim() && ok; ++a) {
            if (g.axes[a].periodic) continue;
            if (idx[a] < margin || idx[a] >= g.axes[a].size - margin) ok = false;
        }
        if (ok) pts.push_back(p);
    }
    if (pts.empty())
        throw PreconditionError("interior_points: margin leaves no evaluation points");
    return pts;
}

double max_abs_over(const GridField& f, const std::vector<std::size_t>& pts) {
    double m = 0.0;
    for (std::size_t p : pts) m = std::max(m, std::abs(f[p]));
    return m;
}

double pairwise_sum(const std::vector<double>& v) {
    // Fixed-shape binary tree: result independent of traversal batching.
    std::function<double(std::size_t, std::size_t)> rec = [&](std::size_t lo,
                                                              std::size_t hi) -> double {
        if (hi - lo == 0) return 0.0;
        if (hi - lo == 1) return v[lo];
        const std::size_t mid = lo + (hi - lo) / 2;
        return rec(lo, mid) + rec(mid, hi);
    };
    return rec(0, v.size());
}

}  // namespace fuzzygeom
