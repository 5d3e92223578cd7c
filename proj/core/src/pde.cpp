#include "nhfa/pde.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace nhfa {

namespace {

constexpr int kPicardCap = 64;
constexpr double kBlowupFactor = 1e6;

CVec nonlinearity(const CauchyProblem& pb, const GridFunction& u) {
    CVec bu;
    if (pb.B) {
        GridFunction g = apply(*pb.B, u);
        bu = std::move(g.values);
    } else {
        return CVec::Zero(u.size());
    }
    CVec out(bu.size());
    for (int i = 0; i < bu.size(); ++i) out[i] = Complex(std::pow(std::abs(bu[i]), pb.p), 0.0);
    return out;
}

int step_count(double T, double dt) {
    if (!(dt > 0)) throw std::invalid_argument("solver: dt must be positive");
    const double ratio = T / dt;
    const double rounded = std::round(ratio);
    if (std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio) || rounded < 1)
        throw std::invalid_argument("solver: T/dt must be a positive integer");
    return static_cast<int>(rounded);
}

double l2(const SystemPtr& sys, const CVec& v) {
    return std::sqrt((sys->grid->weights().array() * v.array().abs2()).sum());
}

}  // namespace

double Trajectory::sup_l2() const {
    double m = 0;
    for (double v : l2_norms) m = std::max(m, v);
    return m;
}

Trajectory solve_heat(const CauchyProblem& pb, double dt, double picard_tol) {
    if (!(pb.p > 1.0)) throw std::invalid_argument("solve_heat: requires p > 1");
    const int K = step_count(pb.horizon, dt);
    const SystemPtr& sys = pb.sys;

    Trajectory traj;
    traj.times.push_back(0.0);
    traj.states.push_back(pb.u0);
    traj.l2_norms.push_back(l2(sys, pb.u0.values));
    traj.diagnostics.push_back({0, 0.0});
    traj.picard_history.push_back({});
    traj.last_time = 0.0;

    const double cap = kBlowupFactor * std::max(traj.l2_norms[0], 1e-30);

    // acc = dt (g_0/2 + sum_{j=1}^{k-1} g_j), the frozen part of the
    // trapezoid sum at step k.
    CVec acc = 0.5 * dt * nonlinearity(pb, pb.u0);

    for (int k = 1; k <= K; ++k) {
        CVec base = pb.u0.values + acc;
        GridFunction v{sys->grid, traj.states.back().values};
        std::vector<double> diffs;
        bool converged = false;
        for (int it = 0; it < kPicardCap; ++it) {
            CVec g = nonlinearity(pb, v);
            CVec vnew = base + 0.5 * dt * g;
            const double diff = l2(sys, vnew - v.values);
            v.values = std::move(vnew);
            diffs.push_back(diff);
            if (!std::isfinite(diff)) break;
            if (diff <= picard_tol) {
                converged = true;
                break;
            }
        }
        const double vn = l2(sys, v.values);
        if (!converged || !std::isfinite(vn) || vn > cap) {
            traj.blowup = true;
            break;
        }

        traj.times.push_back(k * dt);
        traj.states.push_back(v);
        traj.l2_norms.push_back(vn);
        traj.diagnostics.push_back({static_cast<int>(diffs.size()), diffs.back()});
        traj.picard_history.push_back(std::move(diffs));
        traj.last_time = k * dt;

        acc += dt * nonlinearity(pb, v);
    }
    return traj;
}

Trajectory solve_wave(const CauchyProblem& pb, double dt, double picard_tol) {
    if (!(pb.p > 1.0)) throw std::invalid_argument("solve_wave: requires p > 1");
    const int K = step_count(pb.horizon, dt);
    const SystemPtr& sys = pb.sys;
    const int n = pb.u0.size();

    auto b_at = [&](double t) { return pb.b_profile.empty() ? 1.0 : pb.b_profile.eval({0, 0, 0, t}); };
    for (int k = 0; k <= K; ++k)
        if (!(b_at(k * dt) > 0.0))
            throw std::invalid_argument("solve_wave: b(t) must be positive on [0, T]");

    CVec u1 = pb.u1 ? pb.u1->values : CVec::Zero(n);

    Trajectory traj;
    traj.times.push_back(0.0);
    traj.states.push_back(pb.u0);
    traj.l2_norms.push_back(l2(sys, pb.u0.values));
    traj.diagnostics.push_back({0, 0.0});
    traj.picard_history.push_back({});
    traj.last_time = 0.0;

    const double cap =
        kBlowupFactor * std::max(traj.l2_norms[0] + l2(sys, u1), 1e-30);

    // Kernel split (t_k - t_j) b_j g_j = t_k (b_j g_j) - (t_j b_j g_j):
    // P and Q accumulate the trapezoid sums of both parts; the j = k term
    // vanishes, so each step's Picard update is independent of the unknown.
    CVec P = 0.5 * dt * b_at(0.0) * nonlinearity(pb, pb.u0);
    CVec Q = CVec::Zero(n);  // t_0 = 0 kills the j = 0 contribution

    for (int k = 1; k <= K; ++k) {
        const double tk = k * dt;
        CVec base = pb.u0.values + tk * u1 + tk * P - Q;

        GridFunction v{sys->grid, traj.states.back().values};
        std::vector<double> diffs;
        bool converged = false;
        for (int it = 0; it < kPicardCap; ++it) {
            // The j = k kernel weight is zero; one sweep reaches the fixed
            // point, the second certifies it.
            CVec vnew = base;
            const double diff = l2(sys, vnew - v.values);
            v.values = std::move(vnew);
            diffs.push_back(diff);
            if (!std::isfinite(diff)) break;
            if (diff <= picard_tol) {
                converged = true;
                break;
            }
        }
        const double vn = l2(sys, v.values);
        if (!converged || !std::isfinite(vn) || vn > cap) {
            traj.blowup = true;
            break;
        }

        traj.times.push_back(tk);
        traj.states.push_back(v);
        traj.l2_norms.push_back(vn);
        traj.diagnostics.push_back({static_cast<int>(diffs.size()), diffs.back()});
        traj.picard_history.push_back(std::move(diffs));
        traj.last_time = tk;

        CVec gk = nonlinearity(pb, v);
        const double bk = b_at(tk);
        P += dt * bk * gk;
        Q += dt * tk * bk * gk;
    }
    return traj;
}

StationaryResult solve_stationary(const CauchyProblem& pb, int max_iter, double tol) {
    if (!pb.A) throw std::invalid_argument("solve_stationary: A symbol required");
    if (!pb.A->x_independent)
        throw std::invalid_argument("solve_stationary: A must be a multiplier");
    if (!pb.forcing) throw std::invalid_argument("solve_stationary: forcing f required");
    const SystemPtr& sys = pb.sys;

    // Invert A on I_N.
    CVec sigma = pb.A->table(0).row(0).transpose();
    double min_mod = std::numeric_limits<double>::infinity();
    for (int k = 0; k < sigma.size(); ++k) min_mod = std::min(min_mod, std::abs(sigma[k]));
    if (!(min_mod > 0)) throw std::invalid_argument("solve_stationary: A is not invertible on I_N");
    SampledSymbol inv = *pb.A;
    CMat inv_table(inv.table(0).rows(), inv.table(0).cols());
    for (int k = 0; k < sigma.size(); ++k) inv_table.col(k).setConstant(1.0 / sigma[k]);
    inv.tables[0] = std::move(inv_table);

    auto nonlin = [&](const GridFunction& u) { return nonlinearity(pb, u); };

    GridFunction u = apply(inv, *pb.forcing);
    double residual = std::numeric_limits<double>::infinity();
    int it = 0;
    int growth_streak = 0;
    double prev_norm = l2(sys, u.values);
    for (; it < max_iter; ++it) {
        GridFunction au = apply(*pb.A, u);
        CVec nl = nonlin(u);
        residual = l2(sys, au.values - nl - pb.forcing->values);
        if (residual <= tol) break;

        GridFunction rhs{sys->grid, nl + pb.forcing->values};
        u = apply(inv, rhs);
        const double un = l2(sys, u.values);
        growth_streak = un > prev_norm ? growth_streak + 1 : 0;
        prev_norm = un;
        if (growth_streak >= 10 || !std::isfinite(un))
            throw NumericalError("solve_stationary: fixed-point iteration diverged");
    }
    if (residual > tol)
        throw NumericalError("solve_stationary: no convergence within max_iter");

    StationaryResult res;
    res.u = u;
    res.residual = residual;
    res.iterations = it;
    res.apriori.lhs = l2(sys, u.values);
    res.apriori.l2p_term = std::pow(norm(u, 2.0 * pb.p), 2.0 * pb.p);
    res.apriori.f_term = norm(*pb.forcing, 2.0);
    res.apriori.hneg_term = sobolev_norm(sys, u, -1.0);
    res.apriori.rhs = res.apriori.l2p_term + res.apriori.f_term + res.apriori.hneg_term;
    res.apriori.ratio = res.apriori.rhs > 0 ? res.apriori.lhs / res.apriori.rhs : 0.0;
    return res;
}

ExistenceCertificate existence_time(EvolutionKind kind, double c, double p, double u0_norm,
                                    double u1_norm, double b_l2) {
    if (!(c > 1.0)) throw std::invalid_argument("existence_time: requires c > 1");
    if (!(p > 1.0)) throw std::invalid_argument("existence_time: requires p > 1");
    const double inf = std::numeric_limits<double>::infinity();

    ExistenceCertificate cert;
    if (kind == EvolutionKind::Heat) {
        if (u0_norm == 0.0) {
            cert.t_star = cert.t_star_paper = inf;
            return cert;
        }
        cert.t_star = std::sqrt(c * c - 1.0) / (std::pow(c, p) * std::pow(u0_norm, p - 1.0));
        cert.t_star_paper = std::sqrt(c * c - 1.0) / (std::pow(c, p) * u0_norm);
        const double u2 = u0_norm * u0_norm;
        cert.lhs = u2 + cert.t_star * cert.t_star * std::pow(c, 2.0 * p) * std::pow(u0_norm, 2.0 * p);
        cert.rhs = c * c * u2;
        cert.residual = cert.lhs - cert.rhs;
        return cert;
    }

    const double u2 = u0_norm * u0_norm, v2 = u1_norm * u1_norm, beta2 = b_l2 * b_l2;
    auto F = [&](double T) {
        const double data = u2 + T * v2;
        return data + T * T * T * beta2 * std::pow(c, p) * std::pow(data, p) - c * data;
    };
    auto paper_term = [&](double norm_sq, double expo) {
        const double den = beta2 * std::pow(c, p) * std::pow(norm_sq, p - 1.0);
        return den > 0 ? std::pow((c - 1.0) / den, expo) : inf;
    };
    cert.t_star_paper = std::min(paper_term(u2, 1.0 / 3.0), paper_term(v2, 1.0 / (p + 2.0)));

    if (u2 == 0.0 && v2 == 0.0) {
        cert.t_star = inf;
        return cert;
    }
    double hi = 1.0;
    int guard = 0;
    while (F(hi) <= 0.0 && guard++ < 4000) hi *= 2.0;
    if (guard >= 4000) {
        cert.t_star = inf;  // no positive part: the data never leaves S_c
        return cert;
    }
    double lo = 0.0;
    for (int i = 0; i < 200 && (hi - lo) > 0; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (F(mid) <= 0.0) lo = mid;
        else hi = mid;
    }
    cert.t_star = lo;
    const double data = u2 + lo * v2;
    cert.lhs = data + lo * lo * lo * beta2 * std::pow(c, p) * std::pow(data, p);
    cert.rhs = c * data;
    cert.residual = cert.lhs - cert.rhs;
    return cert;
}

ScResult sc_membership(const Trajectory& traj, EvolutionKind kind, double c, double u0_norm,
                       double u1_norm) {
    if (traj.l2_norms.empty()) throw std::invalid_argument("sc_membership: empty trajectory");
    ScResult r;
    if (kind == EvolutionKind::Heat) {
        r.bound = c * u0_norm;
    } else {
        const double T = traj.times.back();
        r.bound = std::sqrt(c * (u0_norm * u0_norm + T * u1_norm * u1_norm));
    }
    const double sup = traj.sup_l2();
    r.margin = r.bound - sup;
    r.member = r.margin >= 0.0;
    return r;
}

WaveGlobalCertificate wave_global_threshold(double c, double p, double gamma, double T,
                                            double b_l2_0T) {
    if (!(gamma > 1.5)) throw std::invalid_argument("wave_global_threshold: requires gamma > 3/2");
    if (!(c > 1.0) || !(p > 1.0) || !(T > 0.0))
        throw std::invalid_argument("wave_global_threshold: requires c > 1, p > 1, T > 0");
    WaveGlobalCertificate cert;
    cert.gamma0 = (2.0 * gamma - 3.0) / (2.0 * p);
    cert.gamma_tilde = 3.0 - 2.0 * gamma + cert.gamma0 * p;
    cert.b_condition_holds = b_l2_0T <= c * std::pow(T, -gamma);
    const double gain = c * std::pow(T, cert.gamma0) - 1.0;
    if (gain <= 0) {
        cert.u0_threshold = 0.0;
    } else {
        cert.u0_threshold = std::pow(
            gain / (std::pow(T, cert.gamma_tilde) * std::pow(c, p)), 1.0 / (2.0 * p - 2.0));
    }
    return cert;
}

void export_trajectory_csv(const Trajectory& traj, std::ostream& out) {
    out << "t,l2_norm,linf_norm\n";
    char buf[96];
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        const double linf = traj.states[k].values.cwiseAbs().maxCoeff();
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g", traj.times[k], traj.l2_norms[k], linf);
        out << buf << "\n";
    }
}

void export_function_csv(const GridFunction& f, std::ostream& out) {
    out << "x,re,im\n";
    char buf[96];
    for (int i = 0; i < f.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g", f.grid->point(i), f.values[i].real(),
                      f.values[i].imag());
        out << buf << "\n";
    }
}

}  // namespace nhfa
