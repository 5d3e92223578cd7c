#include "nhfa/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <span>

#include "nhfa/parallel.hpp"

namespace nhfa {

Grid::Grid(GridKind kind, Vec points, Vec weights, bool uniform_unit)
    : kind_(kind), points_(std::move(points)), weights_(std::move(weights)), uniform_unit_(uniform_unit) {}

std::shared_ptr<const Grid> Grid::build(GridKind kind, int n, QuadratureRule rule) {
    if (n < 4) throw std::invalid_argument("build_grid: n too small (need n >= 4)");
    if (kind == GridKind::Torus && rule != QuadratureRule::Uniform)
        throw std::invalid_argument("build_grid: torus requires the uniform rule");

    Vec pts(n), w(n);
    if (kind == GridKind::Torus) {
        for (int k = 0; k < n; ++k) pts[k] = static_cast<double>(k) / n;
        w.setConstant(1.0 / n);
    } else {
        const double h = 1.0 / (n - 1);
        for (int k = 0; k < n; ++k) pts[k] = static_cast<double>(k) / (n - 1);
        if (rule == QuadratureRule::Trapezoid) {
            w.setConstant(h);
            w[0] = w[n - 1] = 0.5 * h;
        } else {
            // Uniform on the interval is midpoint-like and loses the exact
            // trigonometric quadrature the built-in eigensystems rely on.
            throw std::invalid_argument("build_grid: interval requires the trapezoid rule");
        }
    }
    return std::shared_ptr<const Grid>(new Grid(kind, std::move(pts), std::move(w), true));
}

std::shared_ptr<const Grid> Grid::custom(GridKind kind, Vec points, Vec weights) {
    if (points.size() != weights.size() || points.size() < 2)
        throw std::invalid_argument("Grid::custom: need matching points/weights, at least 2 nodes");
    for (int i = 0; i < points.size(); ++i) {
        if (!(weights[i] > 0)) throw std::invalid_argument("Grid::custom: weights must be positive");
        if (points[i] < 0.0 || points[i] > 1.0)
            throw std::invalid_argument("Grid::custom: points must lie in [0,1]");
        if (i > 0 && !(points[i] > points[i - 1]))
            throw std::invalid_argument("Grid::custom: points must be strictly increasing");
    }
    return std::shared_ptr<const Grid>(new Grid(kind, std::move(points), std::move(weights), false));
}

double Grid::spacing() const {
    const int n = size();
    return kind_ == GridKind::Torus ? 1.0 / n : 1.0 / (n - 1);
}

bool Grid::ball_contains(int center, int i, int radius_k) const {
    const int n = size();
    if (uniform_unit_) {
        // Exact integer tests: d(i,c) <= k/(2n).
        if (kind_ == GridKind::Torus) {
            int d = std::abs(i - center);
            d = std::min(d, n - d);
            return 2 * d <= radius_k;
        }
        const long d = std::abs(i - center);  // distance d/(n-1)
        return 2L * n * d <= static_cast<long>(radius_k) * (n - 1);
    }
    const double r = static_cast<double>(radius_k) / (2.0 * n);
    return geodesic_distance(*this, points_[i], points_[center]) <= r + 1e-15;
}

GridFunction make_function(std::shared_ptr<const Grid> grid,
                           const std::function<Complex(double)>& f) {
    CVec v(grid->size());
    for (int i = 0; i < grid->size(); ++i) v[i] = f(grid->point(i));
    return {std::move(grid), std::move(v)};
}

GridFunction zero_function(std::shared_ptr<const Grid> grid) {
    CVec v = CVec::Zero(grid->size());
    return {std::move(grid), std::move(v)};
}

double norm(const GridFunction& f, double p) {
    if (p < 1.0) throw std::invalid_argument("norm: p must be >= 1");
    if (std::isinf(p)) return f.values.cwiseAbs().maxCoeff();
    const Vec& w = f.grid->weights();
    if (p == 2.0) return std::sqrt((w.array() * f.values.array().abs2()).sum());
    double s = 0.0;
    for (int i = 0; i < f.size(); ++i) s += w[i] * std::pow(std::abs(f.values[i]), p);
    return std::pow(s, 1.0 / p);
}

double geodesic_distance(const Grid& grid, double x, double y) {
    if (x < 0.0 || x > 1.0 || y < 0.0 || y > 1.0)
        throw std::invalid_argument("geodesic_distance: arguments must lie in [0,1]");
    const double d = std::abs(x - y);
    return grid.kind() == GridKind::Torus ? std::min(d, 1.0 - d) : d;
}

Complex inner_product(const GridFunction& f, const GridFunction& g) {
    const Vec& w = f.grid->weights();
    return (f.values.array() * g.values.array().conjugate() * w.array().cast<Complex>()).sum();
}

namespace {

// Contiguous index window [lo, hi] of the ball B(x_center, k/(2n)) on the
// canonical built-in grids; the torus window may wrap (hi can exceed n-1).
struct Window {
    int lo, hi;
};

Window ball_window(const Grid& g, int center, int k) {
    const int n = g.size();
    if (g.kind() == GridKind::Torus) {
        int m = k / 2;  // 2d <= k  <=>  d <= floor(k/2)
        if (2 * m + 1 >= n) return {0, n - 1};
        return {center - m, center + m};
    }
    const long m = (static_cast<long>(k) * (n - 1)) / (2L * n);
    return {std::max(0, center - static_cast<int>(m)), std::min(n - 1, center + static_cast<int>(m))};
}

double oscillation(const Grid& g, const CVec& v, std::span<const int> members) {
    const Vec& w = g.weights();
    double mass = 0.0;
    Complex mean(0.0, 0.0);
    for (int i : members) {
        mass += w[i];
        mean += w[i] * v[i];
    }
    mean /= mass;
    double osc = 0.0;
    for (int i : members) osc += w[i] * std::abs(v[i] - mean);
    return osc / mass;
}

}  // namespace

double bmo_norm(const GridFunction& f) {
    const Grid& g = *f.grid;
    const int n = g.size();
    if (n < 2) throw std::invalid_argument("bmo_norm: degenerate grid (empty ball family)");

    const CVec& v = f.values;
    const bool torus = g.kind() == GridKind::Torus;

    std::vector<double> per_center(n, 0.0);
    parallel_for(0, n, [&](int c) {
        double best = 0.0;
        std::vector<int> members;
        members.reserve(n);
        if (g.is_uniform_unit()) {
            int prev_lo = std::numeric_limits<int>::max(), prev_hi = 0;
            for (int k = 1; k <= n; ++k) {
                Window win = ball_window(g, c, k);
                if (win.lo == prev_lo && win.hi == prev_hi) continue;  // same ball
                prev_lo = win.lo;
                prev_hi = win.hi;
                members.clear();
                for (int j = win.lo; j <= win.hi; ++j)
                    members.push_back(torus ? ((j % n) + n) % n : j);
                best = std::max(best, oscillation(g, v, members));
            }
        } else {
            // custom node layouts: no contiguity shortcut, scan per radius
            for (int k = 1; k <= n; ++k) {
                members.clear();
                for (int i = 0; i < n; ++i)
                    if (g.ball_contains(c, i, k)) members.push_back(i);
                if (members.empty()) continue;
                best = std::max(best, oscillation(g, v, members));
            }
        }
        per_center[c] = best;
    });
    return *std::max_element(per_center.begin(), per_center.end());
}

}  // namespace nhfa
