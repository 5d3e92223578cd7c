#pragma once

#include <iosfwd>

#include "nhfa/eigensystem.hpp"

namespace nhfa {

enum class Variant { L, Lstar };

std::string variant_name(Variant v);
Variant variant_from_name(const std::string& s);

/// L- or L*-Fourier coefficients of a function, one entry per mode of I_N.
struct CoefficientVector {
    SystemPtr sys;
    CVec values;
    Variant variant = Variant::L;

    int size() const { return static_cast<int>(values.size()); }
};

/// a(xi) = sum_i w_i f_i conj(v_xi(x_i))  (variant L; conj(u_xi) for L*).
CoefficientVector forward(const SystemPtr& sys, const GridFunction& f, Variant variant = Variant::L);

/// sum_xi a(xi) u_xi (variant L) or sum_xi a(xi) v_xi (variant L*).
GridFunction inverse(const CoefficientVector& a);

/// (a,b) = sum_xi a(xi) conj((F_{L*} o F_L^{-1} b)(xi)); both arguments must
/// carry variant L.
Complex l2L_inner(const CoefficientVector& a, const CoefficientVector& b);

/// Weighted sequence norm: for variant L, weights ||u_xi||_inf^{2-p} when
/// p <= 2 and ||v_xi||_inf^{2-p} when p >= 2; sup |a| / ||v_xi||_inf at
/// p = inf.  Variant L* swaps the roles of u and v.
double sequence_norm(const CoefficientVector& a, double p);

/// || f ||_{H^s_L} = sqrt(Re sum <xi>^{2s} fhat(xi) conj(fhat_*(xi))).
/// Throws when the real part is negative beyond tolerance (broken
/// biorthogonality rather than a norm).
double sobolev_norm(const SystemPtr& sys, const GridFunction& f, double s);

/// CSV schema: xi_index, re, im.
void export_csv(const CoefficientVector& a, std::ostream& out);

}  // namespace nhfa
