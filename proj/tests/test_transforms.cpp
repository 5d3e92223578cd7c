#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include <nhfa/transforms.hpp>

using namespace nhfa;

namespace {

SystemPtr torus_system(int N = 16, int n = 256) {
    return build_analytic(Model::TorusLaplacian, N,
                          Grid::build(GridKind::Torus, n, QuadratureRule::Uniform));
}

SystemPtr dh_system(int N = 16, int n = 512) {
    return build_analytic(Model::DerivativeH, N,
                          Grid::build(GridKind::Interval, n, QuadratureRule::Trapezoid), 2.0);
}

CoefficientVector random_band_limited(const SystemPtr& sys, unsigned seed, int band) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    CVec a = CVec::Zero(sys->modes());
    for (int k = 0; k < sys->modes(); ++k)
        if (std::labs(sys->indices[k]) <= band) a[k] = Complex(g(rng), g(rng));
    return {sys, std::move(a), Variant::L};
}

}  // namespace

TEST_CASE("forward picks out biorthogonal modes") {
    auto torus = torus_system();
    GridFunction f = make_function(torus->grid, [](double x) { return std::polar(1.0, 6 * pi * x); });
    auto a = forward(torus, f);
    for (int k = 0; k < torus->modes(); ++k) {
        const double expect = torus->indices[k] == 3 ? 1.0 : 0.0;
        CHECK(std::abs(a.values[k] - expect) < 1e-12);
    }

    auto dh = dh_system();
    GridFunction u5{dh->grid, dh->U.col(dh->position(5))};
    auto b = forward(dh, u5, Variant::L);
    for (int k = 0; k < dh->modes(); ++k) {
        const double expect = dh->indices[k] == 5 ? 1.0 : 0.0;
        CHECK(std::abs(b.values[k] - expect) < 1e-10);
    }
    GridFunction v5{dh->grid, dh->V.col(dh->position(5))};
    auto c = forward(dh, v5, Variant::Lstar);
    for (int k = 0; k < dh->modes(); ++k) {
        const double expect = dh->indices[k] == 5 ? 1.0 : 0.0;
        CHECK(std::abs(c.values[k] - expect) < 1e-10);
    }
}

TEST_CASE("inverse of a delta and of zero") {
    auto torus = torus_system();
    CVec a = CVec::Zero(torus->modes());
    a[torus->position(3)] = 1.0;
    GridFunction f = inverse({torus, a, Variant::L});
    for (int i = 0; i < f.size(); i += 17) {
        const Complex expect = std::polar(1.0, 6 * pi * torus->grid->point(i));
        CHECK(std::abs(f.values[i] - expect) < 1e-13);
    }
    GridFunction z = inverse({torus, CVec::Zero(torus->modes()), Variant::L});
    CHECK(z.values.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("round trips on band-limited data") {
    for (const auto& sys : {torus_system(), dh_system()}) {
        for (unsigned seed = 1; seed <= 5; ++seed) {
            auto a = random_band_limited(sys, seed, 8);
            GridFunction f = inverse(a);
            auto back = forward(sys, f);
            CHECK((back.values - a.values).cwiseAbs().maxCoeff() <= 1e-10);

            GridFunction again = inverse(back);
            CHECK((again.values - f.values).cwiseAbs().maxCoeff() <= 1e-8);
        }
    }
}

TEST_CASE("transforms are linear") {
    auto sys = dh_system();
    auto a = random_band_limited(sys, 21, 8);
    auto b = random_band_limited(sys, 22, 8);
    const Complex c1(0.3, -1.2), c2(2.0, 0.7);
    GridFunction fa = inverse(a), fb = inverse(b);
    GridFunction combo{sys->grid, c1 * fa.values + c2 * fb.values};
    auto fc = forward(sys, combo);
    CVec expect = c1 * forward(sys, fa).values + c2 * forward(sys, fb).values;
    CHECK((fc.values - expect).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("l2L inner product") {
    auto torus = torus_system();
    auto a = random_band_limited(torus, 31, 8);
    auto b = random_band_limited(torus, 32, 8);
    // torus: u = v makes it the plain hermitian product
    Complex plain(0, 0);
    for (int k = 0; k < torus->modes(); ++k) plain += a.values[k] * std::conj(b.values[k]);
    CHECK(std::abs(l2L_inner(a, b) - plain) <= 1e-12 * std::abs(plain) + 1e-12);

    // Plancherel on both models
    for (const auto& sys : {torus_system(), dh_system()}) {
        auto c = random_band_limited(sys, 41, 8);
        GridFunction f = inverse(c);
        auto fhat = forward(sys, f);
        const double lhs = l2L_inner(fhat, fhat).real();
        const double rhs = norm(f, 2.0) * norm(f, 2.0);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-8));
    }

    // literal quadrature oracle: (a,b)_{l2_L} = (F^{-1}a, F^{-1}b)_{L^2}
    auto sys = dh_system();
    auto a2 = random_band_limited(sys, 51, 8);
    auto b2 = random_band_limited(sys, 52, 8);
    const Complex lhs = l2L_inner(a2, b2);
    const Complex rhs = inner_product(inverse(a2), inverse(b2));
    CHECK(std::abs(lhs - rhs) <= 1e-8 * std::abs(rhs) + 1e-10);

    auto astar = forward(sys, inverse(a2), Variant::Lstar);
    CHECK_THROWS_AS(l2L_inner(astar, b2), std::invalid_argument);
}

TEST_CASE("forward equals classical Fourier coefficients on the torus") {
    auto sys = torus_system(8, 128);
    auto coeff = random_band_limited(sys, 61, 4);
    GridFunction f = inverse(coeff);
    auto a = forward(sys, f);
    for (int k = 0; k < sys->modes(); ++k) {
        Complex direct(0, 0);
        for (int i = 0; i < f.size(); ++i)
            direct += f.grid->weight(i) * f.values[i] *
                      std::polar(1.0, -2.0 * pi * sys->indices[k] * f.grid->point(i));
        CHECK(std::abs(a.values[k] - direct) <= 1e-12);
    }
}

TEST_CASE("sequence norms") {
    auto torus = torus_system();
    auto a = random_band_limited(torus, 71, 8);
    // all sup norms are 1 on the torus: plain lp norm
    for (double p : {1.0, 1.5, 2.0, 3.0}) {
        double plain = 0;
        for (int k = 0; k < a.size(); ++k) plain += std::pow(std::abs(a.values[k]), p);
        plain = std::pow(plain, 1.0 / p);
        CHECK(sequence_norm(a, p) == doctest::Approx(plain).epsilon(1e-12));
    }

    auto dh = dh_system();
    auto b = random_band_limited(dh, 72, 8);
    double l2 = 0;
    for (int k = 0; k < b.size(); ++k) l2 += std::norm(b.values[k]);
    CHECK(sequence_norm(b, 2.0) == doctest::Approx(std::sqrt(l2)).epsilon(1e-12));

    CVec delta = CVec::Zero(dh->modes());
    delta[dh->position(0)] = 1.0;
    CoefficientVector d{dh, delta, Variant::L};
    // ||v_0||_inf = 1 for h = 2
    CHECK(sequence_norm(d, std::numeric_limits<double>::infinity()) == doctest::Approx(1.0).epsilon(1e-12));

    // weight roles on the non-self-adjoint model: ||u||_inf = 2, ||v||_inf = 1
    CVec d5 = CVec::Zero(dh->modes());
    d5[dh->position(5)] = 1.0;
    CoefficientVector dl{dh, d5, Variant::L};
    CoefficientVector ds{dh, d5, Variant::Lstar};
    CHECK(sequence_norm(dl, 1.5) == doctest::Approx(std::pow(2.0, 1.0 / 3.0)).epsilon(1e-12));
    CHECK(sequence_norm(dl, 4.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(sequence_norm(ds, 1.5) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(sequence_norm(ds, 4.0) == doctest::Approx(std::pow(2.0, -0.5)).epsilon(1e-12));
    CHECK(sequence_norm(ds, std::numeric_limits<double>::infinity()) ==
          doctest::Approx(0.5).epsilon(1e-12));

    CHECK_THROWS_AS(sequence_norm(a, 0.5), std::invalid_argument);
}

TEST_CASE("sobolev norm") {
    auto torus = torus_system();
    auto a = random_band_limited(torus, 81, 8);
    GridFunction f = inverse(a);
    CHECK(sobolev_norm(torus, f, 0.0) == doctest::Approx(norm(f, 2.0)).epsilon(1e-8));

    GridFunction mode = make_function(torus->grid, [](double x) { return std::polar(1.0, 6 * pi * x); });
    const double lam = 36.0 * pi * pi;
    const double expect = std::sqrt(1.0 + lam * lam);
    CHECK(sobolev_norm(torus, mode, 1.0) == doctest::Approx(expect).epsilon(1e-8));
    CHECK(expect == doctest::Approx(355.31).epsilon(1e-4));

    GridFunction zero = zero_function(torus->grid);
    CHECK(sobolev_norm(torus, zero, 1.0) == 0.0);

    // negative orders invert the bracket weight
    CHECK(sobolev_norm(torus, mode, -1.0) == doctest::Approx(1.0 / expect).epsilon(1e-8));

    // broken biorthogonality flips a summand negative
    auto broken = std::make_shared<BiorthSystem>(*torus);
    broken->U.col(broken->position(3)) *= -1.0;
    broken->finalize();
    SystemPtr bp = broken;
    GridFunction u3{bp->grid, bp->U.col(bp->position(3))};
    CHECK_THROWS_AS(sobolev_norm(bp, u3, 1.0), NumericalError);
}
