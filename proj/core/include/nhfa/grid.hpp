#pragma once

#include <functional>
#include <memory>

#include "nhfa/common.hpp"

namespace nhfa {

enum class GridKind { Torus, Interval };
enum class QuadratureRule { Uniform, Trapezoid };

/// A discrete 1-D manifold: quadrature nodes in [0,1] with positive weights.
/// Built-in grids are normalized to volume 1; custom grids (external
/// eigensystem tables) may carry any positive weights.
class Grid {
  public:
    /// Torus: points k/n with uniform weights 1/n. Interval: points
    /// k/(n-1) including both endpoints, composite trapezoid weights.
    static std::shared_ptr<const Grid> build(GridKind kind, int n, QuadratureRule rule);

    /// Externally supplied nodes/weights; only positivity and monotonicity
    /// are enforced, the volume is whatever the weights sum to.
    static std::shared_ptr<const Grid> custom(GridKind kind, Vec points, Vec weights);

    GridKind kind() const { return kind_; }
    int size() const { return static_cast<int>(points_.size()); }
    double point(int i) const { return points_[i]; }
    double weight(int i) const { return weights_[i]; }
    const Vec& points() const { return points_; }
    const Vec& weights() const { return weights_; }
    double volume() const { return weights_.sum(); }

    /// Representative mesh width, used by finite-difference stencils.
    double spacing() const;

    /// Geodesic distance between two grid nodes, evaluated in integer
    /// arithmetic so that ball membership tests are exact.
    bool ball_contains(int center, int i, int radius_k) const;

    bool is_uniform_unit() const { return uniform_unit_; }

  private:
    Grid(GridKind kind, Vec points, Vec weights, bool uniform_unit);

    GridKind kind_;
    Vec points_;
    Vec weights_;
    bool uniform_unit_;  // canonical built-in layout (enables exact ball tests)
};

/// Complex samples of a function on a grid.
struct GridFunction {
    std::shared_ptr<const Grid> grid;
    CVec values;

    int size() const { return static_cast<int>(values.size()); }
};

GridFunction make_function(std::shared_ptr<const Grid> grid,
                           const std::function<Complex(double)>& f);
GridFunction zero_function(std::shared_ptr<const Grid> grid);

/// L^p norm w.r.t. the quadrature measure; p = inf gives the grid sup norm.
double norm(const GridFunction& f, double p);

double geodesic_distance(const Grid& grid, double x, double y);

/// Max mean oscillation over the discrete ball family: centers at all grid
/// points, radii k/(2n) for k = 1..n.
double bmo_norm(const GridFunction& f);

/// (f, g)_{L^2} = sum_i w_i f_i conj(g_i).
Complex inner_product(const GridFunction& f, const GridFunction& g);

}  // namespace nhfa
