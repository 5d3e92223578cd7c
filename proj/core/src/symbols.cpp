#include "nhfa/symbols.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <unsupported/Eigen/FFT>

#include "nhfa/parallel.hpp"

namespace nhfa {

SymbolSpec SymbolSpec::expression(Expr e) {
    SymbolSpec s;
    s.form_ = Form::Expression;
    s.expr_ = std::move(e);
    return s;
}

SymbolSpec SymbolSpec::expression(std::string_view text) { return expression(Expr::parse(text)); }

SymbolSpec SymbolSpec::multiplier_table(std::map<long, Complex> values, Complex fallback) {
    SymbolSpec s;
    s.form_ = Form::MultiplierTable;
    s.table_ = std::move(values);
    s.fallback_ = fallback;
    return s;
}

SymbolSpec SymbolSpec::constant(Complex c) { return multiplier_table({}, c); }

SymbolSpec SymbolSpec::full_table(CMat table) {
    SymbolSpec s;
    s.form_ = Form::FullTable;
    s.full_ = std::move(table);
    return s;
}

bool SymbolSpec::x_independent() const {
    switch (form_) {
        case Form::Expression: return !expr_.uses("x");
        case Form::MultiplierTable: return true;
        case Form::FullTable: return false;
    }
    return false;
}

bool SymbolSpec::pseudo_multiplier() const {
    return form_ == Form::Expression && !expr_.uses("xi");
}

Complex SymbolSpec::value(double x, double w, long xi) const {
    switch (form_) {
        case Form::Expression:
            return Complex(expr_.eval({x, w, static_cast<double>(xi), 0.0}), 0.0);
        case Form::MultiplierTable: {
            auto it = table_.find(xi);
            return it == table_.end() ? fallback_ : it->second;
        }
        case Form::FullTable:
            throw std::logic_error("SymbolSpec::value on a full table");
    }
    return {};
}

namespace {

void check_finite(const CMat& m, const char* what) {
    if (!m.allFinite()) throw NumericalError(std::string(what) + ": evaluation produced NaN/inf");
}

}  // namespace

CMat fd_x_derivative(const CMat& table, const Grid& grid) {
    const int n = static_cast<int>(table.rows());
    const int K = static_cast<int>(table.cols());
    const double h = grid.spacing();
    CMat out(n, K);
    if (grid.kind() == GridKind::Torus) {
        for (int i = 0; i < n; ++i) {
            const int im2 = (i - 2 + n) % n, im1 = (i - 1 + n) % n;
            const int ip1 = (i + 1) % n, ip2 = (i + 2) % n;
            out.row(i) =
                (table.row(im2) - 8.0 * table.row(im1) + 8.0 * table.row(ip1) - table.row(ip2)) /
                (12.0 * h);
        }
        return out;
    }
    for (int i = 2; i < n - 2; ++i)
        out.row(i) =
            (table.row(i - 2) - 8.0 * table.row(i - 1) + 8.0 * table.row(i + 1) - table.row(i + 2)) /
            (12.0 * h);
    // One-sided 4th-order stencils at the interval ends.
    auto r = [&](int i) { return table.row(i); };
    out.row(0) = (-25.0 * r(0) + 48.0 * r(1) - 36.0 * r(2) + 16.0 * r(3) - 3.0 * r(4)) / (12.0 * h);
    out.row(1) = (-3.0 * r(0) - 10.0 * r(1) + 18.0 * r(2) - 6.0 * r(3) + r(4)) / (12.0 * h);
    out.row(n - 2) =
        (3.0 * r(n - 1) + 10.0 * r(n - 2) - 18.0 * r(n - 3) + 6.0 * r(n - 4) - r(n - 5)) / (12.0 * h);
    out.row(n - 1) =
        (25.0 * r(n - 1) - 48.0 * r(n - 2) + 36.0 * r(n - 3) - 16.0 * r(n - 4) + 3.0 * r(n - 5)) /
        (12.0 * h);
    return out;
}

SampledSymbol sample(const SymbolSpec& spec, const SystemPtr& sys, int beta_max) {
    if (beta_max < 0) throw std::invalid_argument("sample: beta_max must be >= 0");
    const int n = sys->grid->size();
    const int K = sys->modes();

    SampledSymbol out;
    out.sys = sys;
    out.x_independent = spec.x_independent();

    if (spec.is_full_table()) {
        if (spec.full().rows() != n || spec.full().cols() != K)
            throw std::invalid_argument("sample: full table dimensions do not match system");
        out.tables.push_back(spec.full());
        check_finite(out.tables[0], "sample");
        for (int b = 1; b <= beta_max; ++b)
            out.tables.push_back(fd_x_derivative(out.tables[b - 1], *sys->grid));
        out.analytic_derivatives = false;
        return out;
    }

    if (spec.is_expression()) {
        Expr e = spec.expr();
        for (int b = 0; b <= beta_max; ++b) {
            CMat t(n, K);
            for (int k = 0; k < K; ++k) {
                const double w = sys->lambda_abs(k);
                const double xi = static_cast<double>(sys->indices[k]);
                for (int i = 0; i < n; ++i)
                    t(i, k) = Complex(e.eval({sys->grid->point(i), w, xi, 0.0}), 0.0);
            }
            check_finite(t, "sample");
            out.tables.push_back(std::move(t));
            if (b < beta_max) e = e.derivative("x");
        }
        out.analytic_derivatives = beta_max > 0;
        return out;
    }

    // Multiplier table: constant in x, derivatives vanish identically.
    CMat t(n, K);
    for (int k = 0; k < K; ++k) {
        const Complex v = spec.value(0.0, sys->lambda_abs(k), sys->indices[k]);
        t.col(k).setConstant(v);
    }
    check_finite(t, "sample");
    out.tables.push_back(std::move(t));
    for (int b = 1; b <= beta_max; ++b) out.tables.push_back(CMat::Zero(n, K));
    out.analytic_derivatives = true;
    return out;
}

double derivative_consistency(const SampledSymbol& s) {
    double worst = 0.0;
    for (int b = 1; b <= s.beta_max(); ++b) {
        CMat fd = fd_x_derivative(s.table(b - 1), *s.sys->grid);
        worst = std::max(worst, (fd - s.table(b)).cwiseAbs().maxCoeff());
    }
    return worst;
}

void zero_boundary_collar(SampledSymbol& s, double width) {
    if (s.sys->grid->kind() != GridKind::Interval) return;
    if (!(width >= 0) || width >= 0.5)
        throw std::invalid_argument("zero_boundary_collar: width must lie in [0, 0.5)");
    const Grid& g = *s.sys->grid;
    for (auto& t : s.tables)
        for (int i = 0; i < g.size(); ++i)
            if (g.point(i) < width || g.point(i) > 1.0 - width) t.row(i).setZero();
    if (width > 0) s.x_independent = false;
}

double DyadicFamily::psi0(double lambda) const {
    const double a = std::abs(lambda);
    if (a <= 1.0) return 1.0;
    if (a >= 2.0) return 0.0;
    const double u = a - 1.0;  // in (0,1)
    return std::exp(1.0 - 1.0 / (1.0 - u * u));
}

double DyadicFamily::psi(int j, double lambda) const {
    if (j < 0 || j > j_max) throw std::invalid_argument("DyadicFamily::psi: j out of range");
    if (j == 0) return psi0(lambda);
    return psi0(std::ldexp(lambda, -j)) - psi0(std::ldexp(lambda, -j + 1));
}

DyadicFamily dyadic_family(int j_max) {
    if (j_max < 1) throw std::invalid_argument("dyadic_family: j_max must be >= 1");
    return DyadicFamily{j_max};
}

namespace {

// Annulus window of the dyadic decomposition: psi_0(mu) - psi_0(2 mu),
// supported on 1/2 <= |mu| <= 2 and telescoping across octaves.
double annulus_window(double mu) {
    DyadicFamily f{1};
    return f.psi0(mu) - f.psi0(2.0 * mu);
}

}  // namespace

HmNormResult hm_norm(const SymbolSpec& tau, double s, double q_m, const HmResolution& res) {
    if (!tau.pseudo_multiplier())
        throw std::invalid_argument("hm_norm: symbol must be a pseudo-multiplier tau(x, w)");
    if (!(s > 0.5)) throw std::invalid_argument("hm_norm: requires s > 1/2");
    if (res.samples < 16 || res.half_width <= 4.0)
        throw std::invalid_argument("hm_norm: resolution too small");

    const Expr& e = tau.expr();
    const bool with_x = e.uses("x");
    const int nx = with_x ? res.x_samples : 1;
    const int M = res.samples;
    const double R = res.half_width;
    const double dw = 2.0 * R / M;

    HmNormResult result;
    const int jn = res.j_max - res.j_min + 1;
    result.per_r.resize(jn);

    // The symbol lives on omega = |lambda| >= 0, so the annulus window is
    // restricted to its positive component [1/2, 2].
    std::vector<double> window(M);
    std::vector<double> omega(M);
    for (int m = 0; m < M; ++m) {
        omega[m] = -R + (m + 0.5) * dw;
        window[m] = omega[m] > 0 ? annulus_window(omega[m]) : 0.0;
    }

    parallel_for(0, jn, [&](int jj) {
        const int j = res.j_min + jj;
        const double r = std::ldexp(1.0, j);
        Eigen::FFT<double> fft;
        std::vector<Complex> in(M), out(M);
        double sup_x = 0.0;
        for (int ix = 0; ix < nx; ++ix) {
            const double x = (ix + 0.5) / nx;
            for (int m = 0; m < M; ++m) {
                const double v = window[m] == 0.0 ? 0.0 : e.eval({x, r * omega[m], 0.0, 0.0});
                in[m] = Complex(v * window[m], 0.0);
            }
            fft.fwd(out, in);
            // || <y>^s F[tau(x, r.) psi] ||_{L^2}^2 on the dual midpoint grid
            // y_k = k/(2R); the quadrature prefactor dw enters |F|, the dual
            // spacing 1/(2R) enters the norm.
            double acc = 0.0;
            for (int k = 0; k < M; ++k) {
                const double y = (k <= M / 2 ? k : k - M) / (2.0 * R);
                const double amp = std::abs(out[k]) * dw;
                acc += std::pow(1.0 + y * y, s) * amp * amp;
            }
            acc /= 2.0 * R;
            sup_x = std::max(sup_x, std::sqrt(acc));
        }
        result.per_r[jj] = {r, std::pow(r, 0.5 * (1.0 - q_m)) * sup_x};
    });

    for (const auto& [r, v] : result.per_r) result.value = std::max(result.value, v);

    // Divergence: monotone growth through the top octaves of the r grid.
    const int tail = std::min<int>(5, jn - 1);
    if (tail >= 2) {
        bool monotone = true;
        for (int i = jn - tail; i < jn; ++i)
            if (result.per_r[i].second <= result.per_r[i - 1].second) monotone = false;
        const double first = result.per_r[jn - tail - 1].second;
        if (monotone && first > 0 && result.per_r[jn - 1].second > 2.0 * first)
            result.diverged = true;
    }
    if (!std::isfinite(result.value)) result.diverged = true;
    return result;
}

bool MarcinkiewiczResult::any_diverged() const {
    return std::any_of(diverged.begin(), diverged.end(), [](bool d) { return d; });
}

MarcinkiewiczResult marcinkiewicz_seminorms(const SymbolSpec& tau, int rho, double omega_max,
                                            int x_samples) {
    if (!tau.pseudo_multiplier())
        throw std::invalid_argument("marcinkiewicz_seminorms: symbol must be a pseudo-multiplier");
    if (rho < 0) throw std::invalid_argument("marcinkiewicz_seminorms: rho must be >= 0");
    if (!(omega_max > 1.0)) throw std::invalid_argument("marcinkiewicz_seminorms: omega_max too small");

    // omega = 0 plus a geometric sweep up to 2 * omega_max.
    std::vector<double> omegas{0.0};
    const double top = 2.0 * omega_max;
    const int per_decade = 64;
    const double lo = 1e-2;
    const int steps = static_cast<int>(std::ceil(per_decade * std::log10(top / lo)));
    for (int i = 0; i <= steps; ++i) omegas.push_back(lo * std::pow(top / lo, static_cast<double>(i) / steps));

    const bool with_x = tau.expr().uses("x");
    const int nx = with_x ? x_samples : 1;

    MarcinkiewiczResult result;
    Expr d = tau.expr();
    for (int a = 0; a <= rho; ++a) {
        double full = 0.0, below = 0.0;
        const double cutoff = top / 100.0;  // everything below the top two decades
        for (int ix = 0; ix < nx; ++ix) {
            const double x = (ix + 0.5) / nx;
            for (double w : omegas) {
                const double v = std::pow(1.0 + w, a) * std::abs(d.eval({x, w, 0.0, 0.0}));
                full = std::max(full, v);
                if (w <= cutoff) below = std::max(below, v);
            }
        }
        result.constants.push_back(full);
        result.diverged.push_back(!std::isfinite(full) || full > below * 1.01);
        d = d.derivative("w");
    }
    return result;
}

double paley_weight_constant(const BiorthSystem& sys, const Vec& phi, Variant variant) {
    if (phi.size() != sys.modes())
        throw std::invalid_argument("paley_weight_constant: phi length must match the mode count");
    const int K = sys.modes();
    for (int k = 0; k < K; ++k)
        if (!(phi[k] > 0)) throw std::invalid_argument("paley_weight_constant: phi must be positive");

    const Vec& sup = variant == Variant::L ? sys.u_sup : sys.v_sup;
    double best = 0.0;
    for (int c = 0; c < K; ++c) {
        const double t = phi[c];
        double sum = 0.0;
        for (int k = 0; k < K; ++k)
            if (phi[k] >= t) sum += sup[k] * sup[k];
        best = std::max(best, t * sum);
    }
    return best;
}

Vec sample_phi(const Expr& phi, const BiorthSystem& sys) {
    Vec out(sys.modes());
    for (int k = 0; k < sys.modes(); ++k)
        out[k] = phi.eval({0.0, sys.lambda_abs(k), static_cast<double>(sys.indices[k]), 0.0});
    return out;
}

double weak_quantity(const SampledSymbol& symbol, double b, int beta_max) {
    if (!(b > 0)) throw std::invalid_argument("weak_quantity: b must be positive");
    if (beta_max > symbol.beta_max())
        throw std::invalid_argument("weak_quantity: derivative tables missing up to beta_max");
    const BiorthSystem& sys = *symbol.sys;
    const int K = sys.modes();

    Vec wgt(K);
    for (int k = 0; k < K; ++k)
        wgt[k] = std::max(sys.u_sup[k] * sys.u_sup[k], sys.v_sup[k] * sys.v_sup[k]);

    const double inv_b = 1.0 / b;
    double best = 0.0;
    for (int beta = 0; beta <= beta_max; ++beta) {
        const CMat& t = symbol.table(beta);
        // x-independent symbols have identical rows (zero rows at beta >= 1).
        const int rows = symbol.x_independent ? 1 : static_cast<int>(t.rows());
        std::vector<double> row_best(rows, 0.0);
        parallel_for(0, rows, [&](int i) {
            std::vector<double> a(K);
            for (int k = 0; k < K; ++k) a[k] = std::abs(t(i, k));
            double local = 0.0;
            for (int c = 0; c < K; ++c) {
                const double s = a[c];
                if (!(s > 0)) continue;
                double sum = 0.0;
                for (int k = 0; k < K; ++k)
                    if (a[k] >= s) sum += wgt[k];
                local = std::max(local, s * std::pow(sum, inv_b));
            }
            row_best[i] = local;
        });
        for (double v : row_best) best = std::max(best, v);
    }
    return best;
}

}  // namespace nhfa
