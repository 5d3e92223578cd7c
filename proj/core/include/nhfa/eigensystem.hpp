#pragma once

#include <iosfwd>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "nhfa/grid.hpp"

namespace nhfa {

enum class Model { TorusLaplacian, DirichletLaplacian, DerivativeH };

std::string model_name(Model m);
Model model_from_name(const std::string& name);

struct SystemMetadata {
    std::string model;                      // builder tag ("torus_laplacian", "numeric", "csv")
    std::map<std::string, double> params;   // N, h, tol, ...
    double biorth_tol = 1e-10;              // declared biorthonormality tolerance
    Vec u_l2, v_l2;                         // recorded per-mode L^2 norms
};

/// Sampled biorthogonal eigensystem {u_xi}, {v_xi} with eigenvalues
/// lambda_xi on a quadrature grid: the discrete stand-in for (L, BC).
class BiorthSystem {
  public:
    std::shared_ptr<const Grid> grid;
    std::vector<long> indices;   // mode index xi per column
    CVec eigenvalues;            // lambda_xi per column
    CMat U, V;                   // grid.n x modes, one column per mode
    SystemMetadata meta;

    // Cached per-mode grid sup norms (used by every weighted inequality).
    Vec u_sup, v_sup;

    int modes() const { return static_cast<int>(indices.size()); }
    double lambda_abs(int k) const { return std::abs(eigenvalues[k]); }
    /// <xi> := (1 + |lambda_xi|^2)^{1/2} (convention; the index set carries
    /// no intrinsic weight).
    double bracket(int k) const;
    int position(long xi) const;  // -1 when absent

    void finalize();  // recompute caches + recorded norms
};

using SystemPtr = std::shared_ptr<const BiorthSystem>;

/// Closed-form models. torus_laplacian requires a torus grid,
/// dirichlet_laplacian an interval grid; derivative_h accepts both (the
/// interval grid is canonical: it contains x = 1 where |u_xi| peaks).
SystemPtr build_analytic(Model model, int N, std::shared_ptr<const Grid> grid, double h = 2.0);

/// Eigendecomposition of a grid discretization of L (boundary conditions
/// already imposed) and of its conjugate transpose; eigenvalue pairs are
/// matched by conjugation, (u,v) rescaled to 1 with ||u||_{L^2} = 1.
/// boundary_rows is recorded in the metadata.
SystemPtr build_numeric(std::shared_ptr<const Grid> grid, const CMat& op,
                        std::span<const int> boundary_rows, double tol);

/// Keep the `count` modes of smallest |lambda| (ties kept in sort order).
SystemPtr truncate(const BiorthSystem& sys, int count);

/// max over (xi, eta) of |(u_xi, v_eta)_{L^2} - delta| by grid quadrature.
double biorthonormality_defect(const BiorthSystem& sys);

struct GammaFit {
    double p;
    double gamma1;  // slope of log ||u_xi||_p    vs log |lambda_xi|
    double gamma2;  // slope of log ||v_xi||_{p'} vs log |lambda_xi|
    double gamma;   // gamma1 + gamma2
};

struct SpectralProfile {
    double q_fit = 0.0;
    std::vector<GammaFit> gamma_table;
    double sup_ratio_vu = 0.0;  // sup ||v||_inf / ||u||_inf
    double sup_ratio_uv = 0.0;  // sup ||u||_inf / ||v||_inf
    std::vector<std::pair<double, double>> counting_samples;  // (lambda, N(lambda))

    double gamma_for(double p) const;
    double gamma_infinity() const;
};

SpectralProfile spectral_profile(const BiorthSystem& sys, std::span<const double> p_list);

/// CSV schema: xi_index, re_lambda, im_lambda, then re/im of u and of v at
/// every grid point.
void export_csv(const BiorthSystem& sys, std::ostream& out);
SystemPtr import_csv(std::shared_ptr<const Grid> grid, std::istream& in, double declared_tol = 1e-8);

/// Dense spectral discretization of -i d/dx with boundary condition
/// u(1) = h u(0), via conjugation of the periodic differentiation matrix
/// by h^x.  Exposed for cross-checks of build_numeric against build_analytic.
CMat derivative_h_matrix(const Grid& grid, double h);

}  // namespace nhfa
