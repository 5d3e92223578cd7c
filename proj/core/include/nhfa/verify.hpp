#pragma once

#include <cmath>
#include <iosfwd>
#include <map>

#include "nhfa/pde.hpp"

namespace nhfa {

/// Declarative description of a built-in system.
struct ModelSpec {
    std::string model = "torus_laplacian";
    double h = 2.0;      // derivative_h parameter
    int N = 64;
    int grid_n = 0;      // 0: derive from grid_factor
    int grid_factor = 32;

    int resolved_grid_n() const;
    GridKind grid_kind() const;
};

SystemPtr build_model(const ModelSpec& spec);

enum class CheckKind {
    HausdorffYoung,
    Paley,
    Hyp,
    LpLqMultiplier,
    LpLqPseudo,
    HmLp,
    MarcinkiewiczLp,
    LinfBmo,
};

std::string check_name(CheckKind k);
CheckKind check_from_name(const std::string& s);
bool is_fourier_check(CheckKind k);

struct CheckParams {
    double p = 1.5;
    double q = 4.0;
    double b = 0.0;  // 0: derived from 1/b = 1/p - 1/q for the L^p-L^q checks
    std::string variant = "L";
    std::string phi;     // weight expression over (xi, w), Paley/HYP
    std::string symbol;  // symbol expression, operator checks
    double s = 2.0;      // Hormander-Mihlin smoothness
    double q_m = 1.0;
    int rho = 2;         // Marcinkiewicz order
    double collar = 1.0 / 16.0;      // boundary collar width (interval models)
    double threshold_slack = 0.1;    // allowance on profile-derived thresholds
    HmResolution hm;
};

struct CheckSpec {
    CheckKind kind = CheckKind::HausdorffYoung;
    ModelSpec model;
    CheckParams params;
    EnsembleConfig ensemble;
    std::vector<int> sweep_N;  // used by stability_sweep
};

struct MemberRow {
    int member_id = 0;
    double lhs = 0, rhs = 0, ratio = 0;
};

struct SweepPoint {
    int N = 0;
    double max_ratio = 0;
    double hypothesis_constant = 0;
};

/// Structured outcome of one theorem check (or of a truncation sweep).
struct InequalityReport {
    std::string check;
    ModelSpec model;
    CheckParams params;
    EnsembleConfig ensemble;
    std::map<std::string, double> hypothesis_constants;
    bool hypothesis_diverged = false;
    bool threshold_satisfied = true;
    double max_ratio = 0.0;
    int witness_id = -1;
    double witness_lhs = 0.0, witness_rhs = 0.0;
    GridFunction witness_function;  // realizes max_ratio; exportable as CSV
    std::vector<MemberRow> members;
    std::vector<SweepPoint> n_sweep;
    double growth_factor = std::numeric_limits<double>::quiet_NaN();
    double constant_growth = std::numeric_limits<double>::quiet_NaN();
    std::string status;  // pass | fail | hypothesis_violated

    double hypothesis_constant() const;  // the constant entering the RHS
};

/// kind in {hausdorff_young, paley, hyp}: per-member weighted-sum LHS
/// against the cited RHS constants; variant L* swaps the u/v roles.
InequalityReport verify_fourier_inequality(CheckKind kind, const SystemPtr& sys,
                                           const CheckParams& params,
                                           const EnsembleConfig& ensemble);

/// kind in {lplq_multiplier, lplq_pseudo, hm_lp, marcinkiewicz_lp,
/// linf_bmo}: hypothesis constant + empirical lower operator norm.
InequalityReport verify_operator_bound(CheckKind kind, const SystemPtr& sys,
                                       const CheckParams& params, const EnsembleConfig& ensemble);

/// Dispatches on spec.kind at spec.model.N.
InequalityReport run_check(const CheckSpec& spec);

/// Re-runs the check at every N in spec.sweep_N (same seed), populating
/// n_sweep, growth_factor and constant_growth on the largest-N report.
InequalityReport stability_sweep(const CheckSpec& spec);

std::vector<CheckSpec> default_suite_specs(std::uint64_t seed);
std::vector<InequalityReport> run_default_suite(std::uint64_t seed);

std::string report_to_json(const InequalityReport& report);
std::string suite_to_json(const std::vector<InequalityReport>& reports, std::uint64_t seed);
/// CSV schema: member_id, lhs, rhs, ratio.
void report_members_csv(const InequalityReport& report, std::ostream& out);

}  // namespace nhfa
