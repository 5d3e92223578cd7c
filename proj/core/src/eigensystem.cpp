#include "nhfa/eigensystem.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

namespace nhfa {

std::string model_name(Model m) {
    switch (m) {
        case Model::TorusLaplacian: return "torus_laplacian";
        case Model::DirichletLaplacian: return "dirichlet_laplacian";
        case Model::DerivativeH: return "derivative_h";
    }
    return {};
}

Model model_from_name(const std::string& name) {
    std::string s = name;
    std::replace(s.begin(), s.end(), '-', '_');
    if (s == "torus_laplacian") return Model::TorusLaplacian;
    if (s == "dirichlet_laplacian") return Model::DirichletLaplacian;
    if (s == "derivative_h") return Model::DerivativeH;
    throw std::invalid_argument("unknown model '" + name + "'");
}

double BiorthSystem::bracket(int k) const {
    const double a = lambda_abs(k);
    return std::sqrt(1.0 + a * a);
}

int BiorthSystem::position(long xi) const {
    for (int k = 0; k < modes(); ++k)
        if (indices[k] == xi) return k;
    return -1;
}

void BiorthSystem::finalize() {
    const int K = modes();
    u_sup.resize(K);
    v_sup.resize(K);
    meta.u_l2.resize(K);
    meta.v_l2.resize(K);
    const Vec& w = grid->weights();
    for (int k = 0; k < K; ++k) {
        u_sup[k] = U.col(k).cwiseAbs().maxCoeff();
        v_sup[k] = V.col(k).cwiseAbs().maxCoeff();
        meta.u_l2[k] = std::sqrt((w.array() * U.col(k).array().abs2()).sum());
        meta.v_l2[k] = std::sqrt((w.array() * V.col(k).array().abs2()).sum());
    }
}

namespace {

void require_resolution(const Grid& grid, int N) {
    if (N < 1) throw std::invalid_argument("build_analytic: N must be >= 1");
    if (grid.size() < 4 * N + 4)
        throw std::invalid_argument("build_analytic: insufficient grid resolution (need n >= 4N+4)");
}

}  // namespace

SystemPtr build_analytic(Model model, int N, std::shared_ptr<const Grid> grid, double h) {
    require_resolution(*grid, N);
    auto sys = std::make_shared<BiorthSystem>();
    sys->grid = grid;
    sys->meta.model = model_name(model);
    sys->meta.params["N"] = N;
    sys->meta.biorth_tol = 1e-10;

    const int n = grid->size();
    const Vec& x = grid->points();

    switch (model) {
        case Model::TorusLaplacian: {
            if (grid->kind() != GridKind::Torus)
                throw std::invalid_argument("torus_laplacian requires a torus grid");
            const int K = 2 * N + 1;
            sys->indices.resize(K);
            sys->eigenvalues.resize(K);
            sys->U.resize(n, K);
            for (int k = 0; k < K; ++k) {
                const long xi = k - N;
                sys->indices[k] = xi;
                sys->eigenvalues[k] = 4.0 * pi * pi * static_cast<double>(xi) * static_cast<double>(xi);
                for (int i = 0; i < n; ++i)
                    sys->U(i, k) = std::polar(1.0, 2.0 * pi * xi * x[i]);
            }
            sys->V = sys->U;
            break;
        }
        case Model::DirichletLaplacian: {
            if (grid->kind() != GridKind::Interval)
                throw std::invalid_argument("dirichlet_laplacian requires an interval grid");
            sys->indices.resize(N);
            sys->eigenvalues.resize(N);
            sys->U.resize(n, N);
            const double s2 = std::sqrt(2.0);
            for (int k = 0; k < N; ++k) {
                const long m = k + 1;
                sys->indices[k] = m;
                sys->eigenvalues[k] = pi * pi * static_cast<double>(m) * static_cast<double>(m);
                for (int i = 0; i < n; ++i)
                    sys->U(i, k) = s2 * std::sin(pi * m * x[i]);
            }
            sys->V = sys->U;
            break;
        }
        case Model::DerivativeH: {
            if (!(h > 0.0) || h == 1.0)
                throw std::invalid_argument("derivative_h requires h > 0, h != 1");
            sys->meta.params["h"] = h;
            const int K = 2 * N + 1;
            const double lnh = std::log(h);
            sys->indices.resize(K);
            sys->eigenvalues.resize(K);
            sys->U.resize(n, K);
            sys->V.resize(n, K);
            for (int k = 0; k < K; ++k) {
                const long xi = k - N;
                sys->indices[k] = xi;
                sys->eigenvalues[k] = Complex(2.0 * pi * xi, -lnh);
                for (int i = 0; i < n; ++i) {
                    const Complex e = std::polar(1.0, 2.0 * pi * xi * x[i]);
                    sys->U(i, k) = std::pow(h, x[i]) * e;
                    sys->V(i, k) = std::pow(h, -x[i]) * e;
                }
            }
            break;
        }
    }
    sys->finalize();
    return sys;
}

SystemPtr build_numeric(std::shared_ptr<const Grid> grid, const CMat& op,
                        std::span<const int> boundary_rows, double tol) {
    const int n = grid->size();
    if (op.rows() != n || op.cols() != n)
        throw std::invalid_argument("build_numeric: operator matrix must be grid.n x grid.n");
    if (!(tol > 0)) throw std::invalid_argument("build_numeric: tol must be positive");

    Eigen::ComplexEigenSolver<CMat> right(op, true);
    Eigen::ComplexEigenSolver<CMat> left(op.adjoint(), true);
    if (right.info() != Eigen::Success || left.info() != Eigen::Success)
        throw NumericalError("build_numeric: eigendecomposition failed");

    // Sort the L-spectrum by (|lambda|, re, im) so reports are deterministic.
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    const CVec& evs = right.eigenvalues();
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        const double ma = std::abs(evs[a]), mb = std::abs(evs[b]);
        if (ma != mb) return ma < mb;
        if (evs[a].real() != evs[b].real()) return evs[a].real() < evs[b].real();
        return evs[a].imag() < evs[b].imag();
    });

    // Greedy conjugation pairing: lambda of L with conj(lambda) of L*.
    const CVec& mus = left.eigenvalues();
    std::vector<bool> used(n, false);
    std::vector<int> partner(n, -1);
    for (int oi = 0; oi < n; ++oi) {
        const int i = order[oi];
        const Complex target = std::conj(evs[i]);
        int best = -1;
        double best_d = std::numeric_limits<double>::infinity();
        for (int j = 0; j < n; ++j) {
            if (used[j]) continue;
            const double d = std::abs(mus[j] - target);
            if (d < best_d) {
                best_d = d;
                best = j;
            }
        }
        const double scale = std::max(1.0, std::abs(evs[i]));
        if (best < 0 || best_d > tol * scale)
            throw NumericalError("build_numeric: unmatched eigenvalue pairs (pairing residual above tol)");
        used[best] = true;
        partner[i] = best;
    }

    auto sys = std::make_shared<BiorthSystem>();
    sys->grid = grid;
    sys->meta.model = "numeric";
    sys->meta.params["tol"] = tol;
    sys->meta.params["boundary_rows"] = static_cast<double>(boundary_rows.size());
    sys->meta.biorth_tol = tol;
    sys->indices.resize(n);
    sys->eigenvalues.resize(n);
    sys->U.resize(n, n);
    sys->V.resize(n, n);

    const Vec& w = grid->weights();
    for (int k = 0; k < n; ++k) {
        const int i = order[k];
        sys->indices[k] = k;
        sys->eigenvalues[k] = evs[i];
        CVec u = right.eigenvectors().col(i);
        CVec v = left.eigenvectors().col(partner[i]);
        const double un = std::sqrt((w.array() * u.array().abs2()).sum());
        if (!(un > 0)) throw NumericalError("build_numeric: zero eigenvector");
        u /= un;
        Complex c = (u.array() * v.array().conjugate() * w.array().cast<Complex>()).sum();
        const double vn = std::sqrt((w.array() * v.array().abs2()).sum());
        // A right/left pair of a defective eigenvalue is (numerically)
        // orthogonal, so the pairing cannot be rescaled to 1.
        if (std::abs(c) < tol * vn)
            throw NumericalError("build_numeric: defective (near non-diagonalizable) operator matrix");
        v /= std::conj(c);
        sys->U.col(k) = u;
        sys->V.col(k) = v;
    }
    sys->finalize();
    return sys;
}

SystemPtr truncate(const BiorthSystem& sys, int count) {
    if (count < 1 || count > sys.modes())
        throw std::invalid_argument("truncate: count out of range");
    std::vector<int> order(sys.modes());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return sys.lambda_abs(a) < sys.lambda_abs(b);
    });
    auto out = std::make_shared<BiorthSystem>();
    out->grid = sys.grid;
    out->meta = sys.meta;
    out->indices.resize(count);
    out->eigenvalues.resize(count);
    out->U.resize(sys.grid->size(), count);
    out->V.resize(sys.grid->size(), count);
    for (int k = 0; k < count; ++k) {
        const int i = order[k];
        out->indices[k] = sys.indices[i];
        out->eigenvalues[k] = sys.eigenvalues[i];
        out->U.col(k) = sys.U.col(i);
        out->V.col(k) = sys.V.col(i);
    }
    out->finalize();
    return out;
}

double biorthonormality_defect(const BiorthSystem& sys) {
    const Vec& w = sys.grid->weights();
    CMat G = sys.V.adjoint() * (w.asDiagonal() * sys.U);  // G(eta,xi) = (u_xi, v_eta)
    G.diagonal().array() -= 1.0;
    return G.cwiseAbs().maxCoeff();
}

namespace {

// Least-squares slope of y against x.
double ls_slope(std::span<const double> xs, std::span<const double> ys) {
    const int n = static_cast<int>(xs.size());
    double mx = 0, my = 0;
    for (int i = 0; i < n; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double num = 0, den = 0;
    for (int i = 0; i < n; ++i) {
        num += (xs[i] - mx) * (ys[i] - my);
        den += (xs[i] - mx) * (xs[i] - mx);
    }
    if (den == 0) throw NumericalError("spectral_profile: degenerate fit abscissae");
    return num / den;
}

}  // namespace

double SpectralProfile::gamma_for(double p) const {
    for (const auto& gf : gamma_table)
        if (gf.p == p) return gf.gamma;
    throw std::invalid_argument("SpectralProfile: p not profiled");
}

double SpectralProfile::gamma_infinity() const {
    return gamma_for(std::numeric_limits<double>::infinity());
}

SpectralProfile spectral_profile(const BiorthSystem& sys, std::span<const double> p_list) {
    const int K = sys.modes();
    if (K < 8) throw std::invalid_argument("spectral_profile: need at least 8 modes");

    SpectralProfile prof;

    // Sup-norm ratios, exact over I_N.
    prof.sup_ratio_vu = 0;
    prof.sup_ratio_uv = 0;
    for (int k = 0; k < K; ++k) {
        prof.sup_ratio_vu = std::max(prof.sup_ratio_vu, sys.v_sup[k] / sys.u_sup[k]);
        prof.sup_ratio_uv = std::max(prof.sup_ratio_uv, sys.u_sup[k] / sys.v_sup[k]);
    }

    // Counting function on dyadic lambda samples across the positive spectrum.
    double lam_min = std::numeric_limits<double>::infinity(), lam_max = 0;
    for (int k = 0; k < K; ++k) {
        const double a = sys.lambda_abs(k);
        if (a > 0) lam_min = std::min(lam_min, a);
        lam_max = std::max(lam_max, a);
    }
    if (!(lam_max > 0) || !std::isfinite(lam_min))
        throw NumericalError("spectral_profile: all eigenvalues have zero modulus");

    std::vector<double> lx, ly;
    for (double lam = lam_min; lam <= lam_max * (1 + 1e-12); lam *= 2.0) {
        int count = 0;
        for (int k = 0; k < K; ++k)
            if (sys.lambda_abs(k) <= lam) ++count;
        prof.counting_samples.emplace_back(lam, static_cast<double>(count));
        lx.push_back(std::log(lam));
        ly.push_back(std::log(static_cast<double>(count)));
    }
    // The Weyl exponent is an asymptotic; the bottom octaves of a truncated
    // spectrum sit on the N(lambda)=O(1) plateau and would bias the slope,
    // so the fit uses the top half of the dyadic range.
    const size_t total = lx.size();
    const size_t start = total / 2;
    if (total - start < 4) throw NumericalError("spectral_profile: fewer than 4 fit points");
    prof.q_fit = ls_slope(std::span(lx).subspan(start), std::span(ly).subspan(start));

    // gamma_p fits over all modes with |lambda| > 0.
    for (double p : p_list) {
        const double pprime = std::isinf(p) ? 1.0 : (p == 1.0 ? std::numeric_limits<double>::infinity()
                                                              : p / (p - 1.0));
        std::vector<double> gx, g1y, g2y;
        for (int k = 0; k < K; ++k) {
            const double a = sys.lambda_abs(k);
            if (!(a > 0)) continue;
            GridFunction uk{sys.grid, sys.U.col(k)};
            GridFunction vk{sys.grid, sys.V.col(k)};
            gx.push_back(std::log(a));
            g1y.push_back(std::log(std::max(norm(uk, p), 1e-300)));
            g2y.push_back(std::log(std::max(norm(vk, pprime), 1e-300)));
        }
        if (gx.size() < 4) throw NumericalError("spectral_profile: fewer than 4 fit points");
        GammaFit gf;
        gf.p = p;
        gf.gamma1 = ls_slope(gx, g1y);
        gf.gamma2 = ls_slope(gx, g2y);
        gf.gamma = gf.gamma1 + gf.gamma2;
        prof.gamma_table.push_back(gf);
    }
    return prof;
}

void export_csv(const BiorthSystem& sys, std::ostream& out) {
    const int n = sys.grid->size();
    out << "xi_index,re_lambda,im_lambda";
    for (int i = 0; i < n; ++i) out << ",re_u_" << i << ",im_u_" << i;
    for (int i = 0; i < n; ++i) out << ",re_v_" << i << ",im_v_" << i;
    out << "\n";
    char buf[32];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out << ',' << buf;
    };
    for (int k = 0; k < sys.modes(); ++k) {
        out << sys.indices[k];
        put(sys.eigenvalues[k].real());
        put(sys.eigenvalues[k].imag());
        for (int i = 0; i < n; ++i) {
            put(sys.U(i, k).real());
            put(sys.U(i, k).imag());
        }
        for (int i = 0; i < n; ++i) {
            put(sys.V(i, k).real());
            put(sys.V(i, k).imag());
        }
        out << "\n";
    }
}

SystemPtr import_csv(std::shared_ptr<const Grid> grid, std::istream& in, double declared_tol) {
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("import_csv: empty input");
    const int n = grid->size();

    std::vector<long> indices;
    std::vector<Complex> lambdas;
    std::vector<CVec> ucols, vcols;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> vals;
        long xi = 0;
        bool first = true;
        while (std::getline(ss, cell, ',')) {
            if (first) {
                xi = std::stol(cell);
                first = false;
            } else {
                vals.push_back(std::stod(cell));
            }
        }
        if (static_cast<int>(vals.size()) != 2 + 4 * n)
            throw std::invalid_argument("import_csv: row width does not match grid size");
        indices.push_back(xi);
        lambdas.emplace_back(vals[0], vals[1]);
        CVec u(n), v(n);
        for (int i = 0; i < n; ++i) u[i] = Complex(vals[2 + 2 * i], vals[3 + 2 * i]);
        for (int i = 0; i < n; ++i) v[i] = Complex(vals[2 + 2 * n + 2 * i], vals[3 + 2 * n + 2 * i]);
        ucols.push_back(std::move(u));
        vcols.push_back(std::move(v));
    }
    if (indices.empty()) throw std::invalid_argument("import_csv: no modes");

    auto sys = std::make_shared<BiorthSystem>();
    sys->grid = std::move(grid);
    sys->meta.model = "csv";
    sys->meta.biorth_tol = declared_tol;
    const int K = static_cast<int>(indices.size());
    sys->indices = std::move(indices);
    sys->eigenvalues.resize(K);
    sys->U.resize(n, K);
    sys->V.resize(n, K);
    for (int k = 0; k < K; ++k) {
        sys->eigenvalues[k] = lambdas[k];
        sys->U.col(k) = ucols[k];
        sys->V.col(k) = vcols[k];
    }
    sys->finalize();
    return sys;
}

CMat derivative_h_matrix(const Grid& grid, double h) {
    if (grid.kind() != GridKind::Torus)
        throw std::invalid_argument("derivative_h_matrix: expects a torus grid");
    if (!(h > 0.0)) throw std::invalid_argument("derivative_h_matrix: h must be positive");
    const int n = grid.size();

    // Periodic spectral differentiation on [0,1): D = F^{-1} diag(2 pi i xi) F,
    // assembled in closed form (even n): D_jk = pi (-1)^{j-k} cot(pi (j-k)/n).
    Mat D = Mat::Zero(n, n);
    for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
            if (j == k) continue;
            const int d = j - k;
            const double sign = (d % 2 == 0) ? 1.0 : -1.0;
            D(j, k) = pi * sign / std::tan(pi * d / static_cast<double>(n));
        }
    }

    const double lnh = std::log(h);
    const Complex mi(0.0, -1.0);
    CMat M(n, n);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
            // h^x (-i d/dx - i ln h) h^{-x}
            Complex entry = mi * Complex(D(j, k), 0.0);
            if (j == k) entry += Complex(0.0, -lnh);
            M(j, k) = std::pow(h, grid.point(j)) * entry * std::pow(h, -grid.point(k));
        }
    return M;
}

}  // namespace nhfa
