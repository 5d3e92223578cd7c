#pragma once

#include <iosfwd>
#include <optional>

#include "nhfa/operators.hpp"

namespace nhfa {

/// Data of the stationary / heat / wave problems. Unused members stay
/// disengaged: B absent means B = 0; b_profile empty means b(t) = 1.
struct CauchyProblem {
    SystemPtr sys;
    std::optional<SampledSymbol> B;
    double p = 2.0;
    GridFunction u0;
    std::optional<GridFunction> u1;        // wave
    Expr b_profile;                        // wave coefficient b(t) > 0
    double horizon = 1.0;                  // T
    std::optional<GridFunction> forcing;   // stationary f
    std::optional<SampledSymbol> A;        // stationary, invertible multiplier
};

struct StepDiagnostics {
    int picard_iterations = 0;
    double residual = 0.0;  // last successive-iterate difference
};

struct Trajectory {
    std::vector<double> times;
    std::vector<GridFunction> states;
    std::vector<double> l2_norms;
    std::vector<StepDiagnostics> diagnostics;          // aligned with times
    std::vector<std::vector<double>> picard_history;   // successive diffs per step
    bool blowup = false;
    double last_time = 0.0;

    double sup_l2() const;
};

/// Marching Picard on u(t) = u0 + int_0^t |Bu|^p dtau with trapezoid in
/// time; Picard failure or a norm excursion past 1e6 ||u0|| truncates the
/// trajectory and raises the blow-up flag.
Trajectory solve_heat(const CauchyProblem& problem, double dt, double picard_tol);

/// Same scheme on u(t) = u0 + t u1 + int_0^t (t - tau) b(tau) |Bu|^p dtau.
Trajectory solve_wave(const CauchyProblem& problem, double dt, double picard_tol);

struct AprioriReport {
    double lhs = 0;        // ||u||_{L^2}
    double l2p_term = 0;   // ||u||_{L^{2p}}^{2p}
    double f_term = 0;     // ||f||_{L^2}
    double hneg_term = 0;  // ||u||_{H^{-1}_L}
    double rhs = 0;
    double ratio = 0;
};

struct StationaryResult {
    GridFunction u;
    double residual = 0;
    int iterations = 0;
    AprioriReport apriori;
};

/// Fixed point of u -> A^{-1}(|Bu|^p + f); requires an invertible
/// multiplier A. Divergence (norm growth over 10 consecutive iterations)
/// and iteration exhaustion throw.
StationaryResult solve_stationary(const CauchyProblem& problem, int max_iter, double tol);

enum class EvolutionKind { Heat, Wave };

struct ExistenceCertificate {
    double t_star = 0;        // derived exponent (heat) / bisection (wave)
    double t_star_paper = 0;  // printed closed form
    double lhs = 0, rhs = 0;  // sufficiency inequality evaluated at t_star
    double residual = 0;      // lhs - rhs
};

/// Heat: T* = sqrt(c^2-1) / (c^p ||u0||^{p-1}) (the exponent the
/// sufficiency chain yields; the printed formula with exponent 1 is
/// reported alongside). Wave: largest T satisfying
/// ||u0||^2 + T||u1||^2 + T^3 b^2 c^p (||u0||^2 + T||u1||^2)^p
///   <= c (||u0||^2 + T||u1||^2), certified by bisection.
ExistenceCertificate existence_time(EvolutionKind kind, double c, double p, double u0_norm,
                                    double u1_norm = 0.0, double b_l2 = 1.0);

struct ScResult {
    bool member = false;
    double margin = 0;  // bound - sup norm
    double bound = 0;
};

/// Heat: sup_t ||u(t)||_2 <= c ||u0||. Wave: sup ||u||^2 <= c (||u0||^2 +
/// T ||u1||^2) with T the trajectory's final time.
ScResult sc_membership(const Trajectory& traj, EvolutionKind kind, double c, double u0_norm,
                       double u1_norm = 0.0);

struct WaveGlobalCertificate {
    double gamma0 = 0;       // midpoint of (0, (2 gamma - 3)/p)
    double gamma_tilde = 0;  // 3 - 2 gamma + gamma0 p (< 0 when admissible)
    double u0_threshold = 0; // largest small-data norm the S_c argument closes for
    bool b_condition_holds = false;  // ||b||_{L^2(0,T)} <= c T^{-gamma}
};

/// Fixed-T reading of the global wave result: checks the decay hypothesis
/// at the given horizon and returns the small-data threshold.
WaveGlobalCertificate wave_global_threshold(double c, double p, double gamma, double T,
                                            double b_l2_0T);

/// CSV schema: t, l2_norm, linf_norm.
void export_trajectory_csv(const Trajectory& traj, std::ostream& out);
/// CSV schema: x, re, im.
void export_function_csv(const GridFunction& f, std::ostream& out);

}  // namespace nhfa
