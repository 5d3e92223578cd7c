#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include <nhfa/symbols.hpp>

using namespace nhfa;

namespace {

SystemPtr torus_system(int N = 8, int n = 128) {
    return build_analytic(Model::TorusLaplacian, N,
                          Grid::build(GridKind::Torus, n, QuadratureRule::Uniform));
}

SystemPtr dh_system(int N = 8, int n = 128) {
    return build_analytic(Model::DerivativeH, N,
                          Grid::build(GridKind::Interval, n, QuadratureRule::Trapezoid), 2.0);
}

// Independent enumeration with the same index-order summation.
double weak_oracle(const SampledSymbol& sym, double b, int beta_max) {
    const BiorthSystem& sys = *sym.sys;
    double best = 0;
    for (int beta = 0; beta <= beta_max; ++beta) {
        const CMat& t = sym.table(beta);
        for (int i = 0; i < t.rows(); ++i) {
            for (int c = 0; c < t.cols(); ++c) {
                const double s = std::abs(t(i, c));
                if (!(s > 0)) continue;
                double sum = 0;
                for (int k = 0; k < t.cols(); ++k)
                    if (std::abs(t(i, k)) >= s)
                        sum += std::max(sys.u_sup[k] * sys.u_sup[k], sys.v_sup[k] * sys.v_sup[k]);
                best = std::max(best, s * std::pow(sum, 1.0 / b));
            }
        }
    }
    return best;
}

double paley_oracle(const BiorthSystem& sys, const Vec& phi) {
    double best = 0;
    for (int c = 0; c < sys.modes(); ++c) {
        double sum = 0;
        for (int k = 0; k < sys.modes(); ++k)
            if (phi[k] >= phi[c]) sum += sys.u_sup[k] * sys.u_sup[k];
        best = std::max(best, phi[c] * sum);
    }
    return best;
}

}  // namespace

TEST_CASE("sampling constants and tables") {
    auto sys = torus_system();
    SampledSymbol ones = sample(SymbolSpec::expression("1"), sys, 2);
    CHECK((ones.table(0).array() - 1.0).cwiseAbs().maxCoeff() == 0.0);
    CHECK(ones.table(1).cwiseAbs().maxCoeff() == 0.0);
    CHECK(ones.table(2).cwiseAbs().maxCoeff() == 0.0);
    CHECK(ones.x_independent);

    SampledSymbol proj = sample(SymbolSpec::multiplier_table({{0, Complex(1, 0)}}, Complex(0, 0)), sys, 0);
    for (int k = 0; k < sys->modes(); ++k) {
        const double expect = sys->indices[k] == 0 ? 1.0 : 0.0;
        CHECK(std::abs(proj.table(0)(5, k)) == doctest::Approx(expect));
    }
}

TEST_CASE("analytic x-derivatives match the closed form and finite differences") {
    auto fine = torus_system(8, 256);
    SampledSymbol s = sample(SymbolSpec::expression("sin(2*pi*x)/(1+w)"), fine, 1);
    CHECK(s.analytic_derivatives);
    for (int k = 0; k < fine->modes(); ++k) {
        const double lam = fine->lambda_abs(k);
        for (int i = 0; i < fine->grid->size(); i += 13) {
            const double x = fine->grid->point(i);
            const double expect = 2 * pi * std::cos(2 * pi * x) / (1.0 + lam);
            CHECK(s.table(1)(i, k).real() == doctest::Approx(expect).epsilon(1e-12));
        }
    }
    CHECK(derivative_consistency(s) <= 1e-6);
}

TEST_CASE("full tables differentiate by finite differences") {
    auto sys = torus_system(4, 256);
    CMat table(sys->grid->size(), sys->modes());
    for (int k = 0; k < sys->modes(); ++k)
        for (int i = 0; i < sys->grid->size(); ++i)
            table(i, k) = Complex(std::cos(2 * pi * sys->grid->point(i)), 0.0);
    SampledSymbol s = sample(SymbolSpec::full_table(table), sys, 1);
    CHECK_FALSE(s.analytic_derivatives);
    for (int i = 0; i < sys->grid->size(); i += 7) {
        const double expect = -2 * pi * std::sin(2 * pi * sys->grid->point(i));
        CHECK(s.table(1)(i, 0).real() == doctest::Approx(expect).epsilon(1e-6));
    }
}

TEST_CASE("sampling rejects non-finite values") {
    auto sys = torus_system();
    CHECK_THROWS_AS(sample(SymbolSpec::expression("log(-1-w)"), sys, 0), NumericalError);
}

TEST_CASE("dyadic family invariants") {
    DyadicFamily fam = dyadic_family(6);
    // telescoping: sum_{l<=J} psi_l = psi_0(2^{-J} lambda), which is 1 below 2^J
    const int J = 5;
    for (int i = 0; i <= 10000; ++i) {
        const double lam = 32.0 * i / 10000.0 + 1e-9;
        double sum = 0;
        for (int l = 0; l <= J; ++l) sum += fam.psi(l, lam);
        CHECK(sum == doctest::Approx(fam.psi0(std::ldexp(lam, -J))).epsilon(1e-12));
        if (lam <= 32.0) CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK(fam.psi(3, 5.0) > 0.0);
    CHECK(fam.psi(3, 20.0) == 0.0);
    for (double lam : {0.1, 0.5, 1.0, 1.7, 2.0}) {
        CHECK(fam.psi(0, lam) + fam.psi(1, lam) == doctest::Approx(1.0).epsilon(1e-14));
    }
    // support of psi_j inside [2^{j-1}, 2^{j+1}]
    for (int j = 1; j <= 6; ++j) {
        CHECK(fam.psi(j, std::ldexp(1.0, j - 1) * 0.99) == 0.0);
        CHECK(fam.psi(j, std::ldexp(1.0, j + 1) * 1.01) == 0.0);
    }
}

TEST_CASE("hm_norm basics") {
    HmResolution res;
    res.samples = 1 << 12;
    CHECK(hm_norm(SymbolSpec::expression("0"), 2.0, 1.0, res).value == 0.0);

    auto one = hm_norm(SymbolSpec::expression("1/(1+w*w)"), 2.0, 1.0, res);
    auto two = hm_norm(SymbolSpec::expression("2/(1+w*w)"), 2.0, 1.0, res);
    CHECK(two.value == doctest::Approx(2.0 * one.value).epsilon(1e-12));

    CHECK_THROWS_AS(hm_norm(SymbolSpec::expression("xi"), 2.0, 1.0, res), std::invalid_argument);
    CHECK_THROWS_AS(hm_norm(SymbolSpec::expression("1"), 0.4, 1.0, res), std::invalid_argument);
}

TEST_CASE("hm_norm convergence study") {
    // (1+w^2)^{-1/2} with s = 2, Q_m = 1: finite, flag-free, and stable
    // within 1% under doubling of the Fourier quadrature resolution.
    SymbolSpec tau = SymbolSpec::expression("pow(1+w*w, -0.5)");
    HmResolution coarse;
    coarse.samples = 1 << 13;
    HmResolution fine = coarse;
    fine.samples = 1 << 14;
    auto a = hm_norm(tau, 2.0, 1.0, coarse);
    auto b = hm_norm(tau, 2.0, 1.0, fine);
    CHECK_FALSE(a.diverged);
    CHECK_FALSE(b.diverged);
    CHECK(std::isfinite(a.value));
    CHECK(std::abs(a.value - b.value) <= 0.01 * b.value);
}

TEST_CASE("hm_norm flags unbounded growth") {
    // tau(w) = w scales like r on the dyadic slices: the per-octave values
    // keep growing and the divergence flag must fire.
    HmResolution res;
    res.samples = 1 << 12;
    auto r = hm_norm(SymbolSpec::expression("w"), 2.0, 1.0, res);
    CHECK(r.diverged);
}

TEST_CASE("finite marcinkiewicz seminorms give a flag-free hm_norm at Q_m = 1") {
    HmResolution res;
    res.samples = 1 << 12;
    for (const char* text : {"1", "1/(1+w)", "pow(1+w*w,-0.5)", "1/(1+w*w)"}) {
        SymbolSpec tau = SymbolSpec::expression(text);
        auto mr = marcinkiewicz_seminorms(tau, 2);
        REQUIRE_FALSE(mr.any_diverged());
        auto hm = hm_norm(tau, 2.0, 1.0, res);
        CHECK(std::isfinite(hm.value));
        CHECK_FALSE(hm.diverged);
    }
}

TEST_CASE("marcinkiewicz seminorms") {
    auto flat = marcinkiewicz_seminorms(SymbolSpec::expression("1"), 1);
    CHECK(flat.constants[0] == doctest::Approx(1.0));
    CHECK(flat.constants[1] == doctest::Approx(0.0));
    CHECK_FALSE(flat.any_diverged());

    auto decay = marcinkiewicz_seminorms(SymbolSpec::expression("1/(1+w)"), 1);
    CHECK(decay.constants[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(decay.constants[1] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_FALSE(decay.any_diverged());

    auto grow = marcinkiewicz_seminorms(SymbolSpec::expression("w"), 1);
    CHECK(grow.any_diverged());
}

TEST_CASE("paley weight constants") {
    auto torus = torus_system(8, 128);
    Vec ones = Vec::Ones(torus->modes());
    CHECK(paley_weight_constant(*torus, ones) == doctest::Approx(17.0).epsilon(1e-14));

    auto small = torus_system(2, 64);
    Vec phi = sample_phi(Expr::parse("1/(1+abs(xi))"), *small);
    CHECK(paley_weight_constant(*small, phi) == doctest::Approx(5.0 / 3.0).epsilon(1e-14));

    auto dh = dh_system(8, 128);
    Vec onesd = Vec::Ones(dh->modes());
    CHECK(paley_weight_constant(*dh, onesd) == doctest::Approx(68.0).epsilon(1e-12));

    Vec bad = ones;
    bad[3] = 0.0;
    CHECK_THROWS_AS(paley_weight_constant(*torus, bad), std::invalid_argument);
}

TEST_CASE("paley constant equals the brute-force oracle exactly") {
    for (const auto& sys : {torus_system(16, 256), dh_system(16, 256), torus_system(32, 512)}) {
        Vec phi = sample_phi(Expr::parse("1/(1+abs(xi))"), *sys);
        CHECK(paley_weight_constant(*sys, phi) == paley_oracle(*sys, phi));
    }
}

TEST_CASE("weak quantity examples and oracle") {
    auto sys = torus_system(8, 128);
    std::map<long, Complex> tbl;
    for (long xi = -2; xi <= 2; ++xi) tbl[xi] = Complex(1, 0);
    SampledSymbol ind = sample(SymbolSpec::multiplier_table(tbl, Complex(0, 0)), sys, 0);
    CHECK(weak_quantity(ind, 2.0, 0) == doctest::Approx(std::sqrt(5.0)).epsilon(1e-14));

    SampledSymbol zero = sample(SymbolSpec::expression("0"), sys, 0);
    CHECK(weak_quantity(zero, 2.0, 0) == 0.0);

    // x-dependent a(x) sigma(xi) against the brute-force double loop
    auto small = torus_system(8, 64);
    SampledSymbol axs = sample(SymbolSpec::expression("(2*cos(2*pi*x))/(1+w)"), small, 1);
    CHECK(weak_quantity(axs, 2.0, 1) == weak_oracle(axs, 2.0, 1));
    CHECK(weak_quantity(axs, 1.3, 0) == weak_oracle(axs, 1.3, 0));

    // monotone under pointwise domination
    SampledSymbol bigger = sample(SymbolSpec::expression("2/(1+w)"), small, 0);
    SampledSymbol smaller = sample(SymbolSpec::expression("1/(1+w)"), small, 0);
    CHECK(weak_quantity(smaller, 2.0, 0) <= weak_quantity(bigger, 2.0, 0));

    CHECK_THROWS_AS(weak_quantity(smaller, 2.0, 3), std::invalid_argument);
}

TEST_CASE("boundary collar zeroes interval symbols") {
    auto dh = dh_system(8, 128);
    SampledSymbol s = sample(SymbolSpec::expression("1/(1+w)"), dh, 1);
    zero_boundary_collar(s, 1.0 / 16.0);
    for (int i = 0; i < dh->grid->size(); ++i) {
        const double x = dh->grid->point(i);
        if (x < 1.0 / 16.0 || x > 15.0 / 16.0) {
            CHECK(s.table(0).row(i).cwiseAbs().maxCoeff() == 0.0);
            CHECK(s.table(1).row(i).cwiseAbs().maxCoeff() == 0.0);
        } else {
            CHECK(s.table(0).row(i).cwiseAbs().maxCoeff() > 0.0);
        }
    }

    auto torus = torus_system();
    SampledSymbol t = sample(SymbolSpec::expression("1/(1+w)"), torus, 0);
    const CMat before = t.table(0);
    zero_boundary_collar(t, 1.0 / 16.0);
    CHECK((t.table(0) - before).cwiseAbs().maxCoeff() == 0.0);
}
