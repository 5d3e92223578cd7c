#pragma once

#include <map>
#include <vector>

#include "nhfa/expression.hpp"
#include "nhfa/transforms.hpp"

namespace nhfa {

/// A symbol before sampling: an expression over (x, w, xi), a multiplier
/// table sigma(xi), or a full table m(x, xi).
class SymbolSpec {
  public:
    static SymbolSpec expression(Expr e);
    static SymbolSpec expression(std::string_view text);
    static SymbolSpec multiplier_table(std::map<long, Complex> values, Complex fallback = Complex(0, 0));
    static SymbolSpec constant(Complex c);
    static SymbolSpec full_table(CMat table);

    bool is_expression() const { return form_ == Form::Expression; }
    bool is_full_table() const { return form_ == Form::FullTable; }
    const Expr& expr() const { return expr_; }

    /// sigma(xi): no dependence on position.
    bool x_independent() const;
    /// tau(x, omega) form: expression that factors through the spectrum
    /// (may reference x and w but not the raw index xi).
    bool pseudo_multiplier() const;

    Complex value(double x, double w, long xi) const;
    const CMat& full() const { return full_; }

  private:
    enum class Form { Expression, MultiplierTable, FullTable };
    Form form_ = Form::Expression;
    Expr expr_;
    std::map<long, Complex> table_;
    Complex fallback_{0.0, 0.0};
    CMat full_;
};

/// m(x_i, xi_k) sampled on a system, with optional x-derivative tables.
struct SampledSymbol {
    SystemPtr sys;
    std::vector<CMat> tables;  // tables[beta](i, k) = d_x^beta m(x_i, xi_k)
    bool x_independent = false;
    bool analytic_derivatives = false;

    const CMat& table(int beta = 0) const { return tables.at(beta); }
    int beta_max() const { return static_cast<int>(tables.size()) - 1; }
};

/// Pseudo-multiplier specs are evaluated at omega = |lambda_xi|;
/// x-derivatives are symbolic for expressions and 4th-order finite
/// differences for tables. Throws on non-finite values.
SampledSymbol sample(const SymbolSpec& spec, const SystemPtr& sys, int beta_max = 0);

/// 4th-order finite-difference x-derivative of a sampled table (circular on
/// the torus, one-sided stencils at interval endpoints).
CMat fd_x_derivative(const CMat& table, const Grid& grid);

/// Max discrepancy between stored derivative tables and finite differences
/// of the level below them.
double derivative_consistency(const SampledSymbol& s);

/// Zeroes the symbol (all derivative levels) within `width` of the interval
/// boundary; no-op on the torus.
void zero_boundary_collar(SampledSymbol& s, double width);

/// Littlewood-Paley cutoffs: psi_0 a smooth bump (1 on |l|<=1, 0 on
/// |l|>=2), psi_j(l) = psi_0(2^{-j} l) - psi_0(2^{-j+1} l); partial sums
/// telescope to psi_0(2^{-J} l).
struct DyadicFamily {
    int j_max = 1;
    double psi0(double lambda) const;
    double psi(int j, double lambda) const;
};

DyadicFamily dyadic_family(int j_max);

struct HmResolution {
    double half_width = 64.0;  // sampling half-width of the window variable
    int samples = 1 << 14;     // midpoint quadrature count
    int j_min = -10;           // dyadic r grid: r = 2^j, j in [j_min, j_max]
    int j_max = 14;
    int x_samples = 16;
};

struct HmNormResult {
    double value = 0.0;
    bool diverged = false;
    std::vector<std::pair<double, double>> per_r;  // (r, sup over x samples)
};

/// Hormander-Mihlin localized uniform Sobolev norm of a pseudo-multiplier:
/// sup over dyadic r and x of r^{(1-Q_m)/2} || tau(x, r.) psi ||_{H^s(R)},
/// the scale-invariant form of the dyadic-slice estimates (the windowed
/// slice bound || <.>^s F[tau psi(./r)] || = r^{s-Q_m/2-...} times it).
/// Flags divergence when the per-r values keep growing through the top
/// octaves of the r grid.
HmNormResult hm_norm(const SymbolSpec& tau, double s, double q_m, const HmResolution& res = {});

struct MarcinkiewiczResult {
    std::vector<double> constants;  // C_alpha, alpha = 0..rho
    std::vector<bool> diverged;
    bool any_diverged() const;
};

/// C_alpha = sup over sampled (x, omega) of (1+omega)^alpha |d_omega^alpha
/// tau(x, omega)| on a geometric omega grid; divergence is flagged when the
/// running max is still moving in the top two decades.
MarcinkiewiczResult marcinkiewicz_seminorms(const SymbolSpec& tau, int rho, double omega_max = 1e4,
                                            int x_samples = 16);

/// M_phi = sup_{t>0} t sum_{phi(xi) >= t} ||u_xi||_inf^2, the sup attained
/// at a candidate t in {phi(xi)} and evaluated by exact enumeration.
/// Variant L* weighs with ||v_xi||_inf^2.
double paley_weight_constant(const BiorthSystem& sys, const Vec& phi, Variant variant = Variant::L);

/// phi(xi) evaluated per mode from an expression over (xi, w).
Vec sample_phi(const Expr& phi, const BiorthSystem& sys);

/// sup over beta <= beta_max, x and candidate thresholds s of
/// s (sum_{|d_x^beta m(x,xi)| >= s} max(||u||_inf^2, ||v||_inf^2))^{1/b};
/// exact enumeration over the table's own values (the strict-threshold
/// variant attains the same enumerated maximum).
double weak_quantity(const SampledSymbol& symbol, double b, int beta_max);

}  // namespace nhfa
