#include "nhfa/transforms.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace nhfa {

std::string variant_name(Variant v) { return v == Variant::L ? "L" : "L*"; }

Variant variant_from_name(const std::string& s) {
    if (s == "L") return Variant::L;
    if (s == "L*" || s == "Lstar" || s == "lstar") return Variant::Lstar;
    throw std::invalid_argument("unknown transform variant '" + s + "'");
}

namespace {

void require_same_grid(const SystemPtr& sys, const GridFunction& f) {
    if (f.grid.get() == sys->grid.get()) return;
    if (f.grid->size() != sys->grid->size() || f.grid->kind() != sys->grid->kind())
        throw std::invalid_argument("transform: function grid does not match the system grid");
}

}  // namespace

CoefficientVector forward(const SystemPtr& sys, const GridFunction& f, Variant variant) {
    require_same_grid(sys, f);
    const Vec& w = sys->grid->weights();
    const CMat& basis = variant == Variant::L ? sys->V : sys->U;
    CVec a = basis.adjoint() * (w.asDiagonal() * f.values);
    return {sys, std::move(a), variant};
}

GridFunction inverse(const CoefficientVector& a) {
    if (a.size() != a.sys->modes())
        throw std::invalid_argument("inverse: coefficient length does not match the system");
    const CMat& basis = a.variant == Variant::L ? a.sys->U : a.sys->V;
    return {a.sys->grid, basis * a.values};
}

Complex l2L_inner(const CoefficientVector& a, const CoefficientVector& b) {
    if (a.variant != Variant::L || b.variant != Variant::L)
        throw std::invalid_argument("l2L_inner: both arguments must be variant L");
    if (a.sys.get() != b.sys.get())
        throw std::invalid_argument("l2L_inner: mismatched systems");
    GridFunction g = inverse(b);
    CoefficientVector c = forward(b.sys, g, Variant::Lstar);
    // sum_xi a(xi) conj(c(xi))
    return c.values.dot(a.values);
}

double sequence_norm(const CoefficientVector& a, double p) {
    if (p < 1.0) throw std::invalid_argument("sequence_norm: p must be >= 1");
    const BiorthSystem& sys = *a.sys;
    const bool L = a.variant == Variant::L;
    if (std::isinf(p)) {
        const Vec& den = L ? sys.v_sup : sys.u_sup;
        double m = 0;
        for (int k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a.values[k]) / den[k]);
        return m;
    }
    const bool low = p <= 2.0;
    const Vec& wsup = L ? (low ? sys.u_sup : sys.v_sup) : (low ? sys.v_sup : sys.u_sup);
    double s = 0;
    for (int k = 0; k < a.size(); ++k)
        s += std::pow(std::abs(a.values[k]), p) * std::pow(wsup[k], 2.0 - p);
    return std::pow(s, 1.0 / p);
}

double sobolev_norm(const SystemPtr& sys, const GridFunction& f, double s) {
    CoefficientVector fhat = forward(sys, f, Variant::L);
    CoefficientVector fstar = forward(sys, f, Variant::Lstar);
    Complex sum(0, 0);
    double absolute = 0;
    for (int k = 0; k < sys->modes(); ++k) {
        const Complex term =
            std::pow(sys->bracket(k), 2.0 * s) * fhat.values[k] * std::conj(fstar.values[k]);
        sum += term;
        absolute += std::abs(term);
    }
    if (sum.real() < -1e-10 * std::max(absolute, 1e-300))
        throw NumericalError("sobolev_norm: negative real part (broken biorthogonality?)");
    return std::sqrt(std::max(0.0, sum.real()));
}

void export_csv(const CoefficientVector& a, std::ostream& out) {
    out << "xi_index,re,im\n";
    char buf[64];
    for (int k = 0; k < a.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%ld,%.17g,%.17g", a.sys->indices[k], a.values[k].real(),
                      a.values[k].imag());
        out << buf << "\n";
    }
}

}  // namespace nhfa
