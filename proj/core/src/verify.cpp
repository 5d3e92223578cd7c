#include "nhfa/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <nlohmann/json.hpp>

#include "nhfa/parallel.hpp"

namespace nhfa {

using ordered_json = nlohmann::ordered_json;

int ModelSpec::resolved_grid_n() const {
    if (grid_n > 0) return grid_n;
    return std::max(4 * N + 4, grid_factor * N);
}

GridKind ModelSpec::grid_kind() const {
    return model_from_name(model) == Model::TorusLaplacian ? GridKind::Torus : GridKind::Interval;
}

SystemPtr build_model(const ModelSpec& spec) {
    const GridKind kind = spec.grid_kind();
    auto grid = Grid::build(kind, spec.resolved_grid_n(),
                            kind == GridKind::Torus ? QuadratureRule::Uniform
                                                    : QuadratureRule::Trapezoid);
    return build_analytic(model_from_name(spec.model), spec.N, std::move(grid), spec.h);
}

std::string check_name(CheckKind k) {
    switch (k) {
        case CheckKind::HausdorffYoung: return "hausdorff_young";
        case CheckKind::Paley: return "paley";
        case CheckKind::Hyp: return "hyp";
        case CheckKind::LpLqMultiplier: return "lplq_multiplier";
        case CheckKind::LpLqPseudo: return "lplq_pseudo";
        case CheckKind::HmLp: return "hm_lp";
        case CheckKind::MarcinkiewiczLp: return "marcinkiewicz_lp";
        case CheckKind::LinfBmo: return "linf_bmo";
    }
    return {};
}

CheckKind check_from_name(const std::string& s) {
    if (s == "hausdorff_young") return CheckKind::HausdorffYoung;
    if (s == "paley") return CheckKind::Paley;
    if (s == "hyp") return CheckKind::Hyp;
    if (s == "lplq_multiplier") return CheckKind::LpLqMultiplier;
    if (s == "lplq_pseudo") return CheckKind::LpLqPseudo;
    if (s == "hm_lp") return CheckKind::HmLp;
    if (s == "marcinkiewicz_lp") return CheckKind::MarcinkiewiczLp;
    if (s == "linf_bmo") return CheckKind::LinfBmo;
    throw std::invalid_argument("unknown check '" + s + "'");
}

bool is_fourier_check(CheckKind k) {
    return k == CheckKind::HausdorffYoung || k == CheckKind::Paley || k == CheckKind::Hyp;
}

double InequalityReport::hypothesis_constant() const {
    auto it = hypothesis_constants.find("rhs_constant");
    return it == hypothesis_constants.end() ? 1.0 : it->second;
}

namespace {

double conjugate_exponent(double p) {
    if (p == 1.0) return std::numeric_limits<double>::infinity();
    if (std::isinf(p)) return 1.0;
    return p / (p - 1.0);
}

void record_sup_ratios(const BiorthSystem& sys, InequalityReport& rep) {
    double vu = 0, uv = 0;
    for (int k = 0; k < sys.modes(); ++k) {
        vu = std::max(vu, sys.v_sup[k] / sys.u_sup[k]);
        uv = std::max(uv, sys.u_sup[k] / sys.v_sup[k]);
    }
    rep.hypothesis_constants["sup_ratio_vu"] = vu;
    rep.hypothesis_constants["sup_ratio_uv"] = uv;
    if (!std::isfinite(vu) || !std::isfinite(uv)) rep.hypothesis_diverged = true;
}

void finish_single_run_status(InequalityReport& rep) {
    if (rep.hypothesis_diverged || !rep.threshold_satisfied) {
        rep.status = "hypothesis_violated";
    } else if (std::isfinite(rep.max_ratio)) {
        rep.status = "pass";
    } else {
        rep.status = "fail";
    }
}

void reduce_members(InequalityReport& rep) {
    rep.max_ratio = 0.0;
    rep.witness_id = -1;
    for (const MemberRow& row : rep.members) {
        if (row.ratio > rep.max_ratio) {
            rep.max_ratio = row.ratio;
            rep.witness_id = row.member_id;
            rep.witness_lhs = row.lhs;
            rep.witness_rhs = row.rhs;
        }
    }
}

}  // namespace

InequalityReport verify_fourier_inequality(CheckKind kind, const SystemPtr& sys,
                                           const CheckParams& params,
                                           const EnsembleConfig& ensemble) {
    if (!is_fourier_check(kind)) throw std::invalid_argument("verify_fourier_inequality: wrong kind");
    const double p = params.p;
    const double pprime = conjugate_exponent(p);
    const Variant variant = variant_from_name(params.variant);

    if (kind == CheckKind::HausdorffYoung) {
        if (!(1.0 <= p && p <= 2.0))
            throw std::invalid_argument("hausdorff_young: requires 1 <= p <= 2");
    } else if (kind == CheckKind::Paley) {
        if (!(1.0 < p && p <= 2.0)) throw std::invalid_argument("paley: requires 1 < p <= 2");
    } else {
        if (!(1.0 < p && p <= 2.0)) throw std::invalid_argument("hyp: requires 1 < p <= 2");
        if (!(p <= params.b && params.b <= pprime))
            throw std::invalid_argument("hyp: requires p <= b <= p'");
    }

    InequalityReport rep;
    rep.check = check_name(kind);
    rep.params = params;
    rep.ensemble = ensemble;
    record_sup_ratios(*sys, rep);

    // Weight roles: variant L measures fhat against u-weights (v for the
    // high-exponent side); L* swaps them throughout.
    const bool L = variant == Variant::L;
    const Vec& low_sup = L ? sys->u_sup : sys->v_sup;   // the ||u||-side weights
    const Vec& high_sup = L ? sys->v_sup : sys->u_sup;  // the ||v||-side weights

    double m_phi = 1.0;
    Vec phi;
    if (kind != CheckKind::HausdorffYoung) {
        if (params.phi.empty()) throw std::invalid_argument("paley/hyp: phi expression required");
        phi = sample_phi(Expr::parse(params.phi), *sys);
        m_phi = paley_weight_constant(*sys, phi, variant);
        rep.hypothesis_constants["M_phi"] = m_phi;
    }

    double rhs_constant = 1.0;
    if (kind == CheckKind::Paley) rhs_constant = std::pow(m_phi, (2.0 - p) / p);
    if (kind == CheckKind::Hyp) rhs_constant = std::pow(m_phi, 1.0 / params.b - 1.0 / pprime);
    rep.hypothesis_constants["rhs_constant"] = rhs_constant;

    std::vector<GridFunction> members = make_ensemble(sys, ensemble);
    rep.members.resize(members.size());
    parallel_for(0, static_cast<int>(members.size()), [&](int k) {
        const GridFunction& f = members[k];
        CoefficientVector fhat = forward(sys, f, variant);
        double lhs = 0.0;
        switch (kind) {
            case CheckKind::HausdorffYoung:
                lhs = sequence_norm(fhat, pprime);
                break;
            case CheckKind::Paley: {
                double acc = 0.0;
                for (int j = 0; j < fhat.size(); ++j)
                    acc += std::pow(std::abs(fhat.values[j]), p) * std::pow(low_sup[j], 2.0 - p) *
                           std::pow(phi[j], 2.0 - p);
                lhs = std::pow(acc, 1.0 / p);
                break;
            }
            case CheckKind::Hyp: {
                const double b = params.b;
                double acc = 0.0;
                for (int j = 0; j < fhat.size(); ++j)
                    acc += std::pow(std::abs(fhat.values[j]) * std::pow(phi[j], 1.0 / b - 1.0 / pprime), b) *
                           std::pow(low_sup[j], 1.0 - b / pprime) *
                           std::pow(high_sup[j], 1.0 - b / p);
                lhs = std::pow(acc, 1.0 / b);
                break;
            }
            default: break;
        }
        const double rhs = rhs_constant * norm(f, p);
        rep.members[k] = {k, lhs, rhs, rhs > 0 ? lhs / rhs : 0.0};
    });

    reduce_members(rep);
    if (rep.witness_id >= 0) rep.witness_function = members[rep.witness_id];
    finish_single_run_status(rep);
    return rep;
}

InequalityReport verify_operator_bound(CheckKind kind, const SystemPtr& sys,
                                       const CheckParams& params, const EnsembleConfig& ensemble) {
    if (is_fourier_check(kind)) throw std::invalid_argument("verify_operator_bound: wrong kind");
    if (params.symbol.empty()) throw std::invalid_argument("operator check: symbol expression required");

    InequalityReport rep;
    rep.check = check_name(kind);
    rep.params = params;
    rep.ensemble = ensemble;
    record_sup_ratios(*sys, rep);

    SymbolSpec spec = SymbolSpec::expression(params.symbol);

    double constant = 0.0;
    double in_p = params.p, out_q = params.q;
    TargetNorm target = TargetNorm::Lq;
    SampledSymbol sampled;

    switch (kind) {
        case CheckKind::LpLqMultiplier:
        case CheckKind::LpLqPseudo: {
            const double p = params.p, q = params.q;
            if (!(1.0 < p && p <= 2.0 && 2.0 <= q && std::isfinite(q)))
                throw std::invalid_argument("lplq: requires 1 < p <= 2 <= q < inf");
            const double b = params.b > 0 ? params.b : 1.0 / (1.0 / p - 1.0 / q);
            rep.hypothesis_constants["b"] = b;
            if (kind == CheckKind::LpLqMultiplier) {
                if (!spec.x_independent())
                    throw std::invalid_argument("lplq_multiplier: symbol must be x-independent");
                sampled = sample(spec, sys, 0);
                constant = weak_quantity(sampled, b, 0);
            } else {
                // beta up to [dim(M)/q] + 1 = 1 for the built-in 1-D models.
                sampled = sample(spec, sys, 1);
                if (sys->grid->kind() == GridKind::Interval)
                    zero_boundary_collar(sampled, params.collar);
                constant = weak_quantity(sampled, b, 1);
            }
            rep.hypothesis_constants["weak_quantity"] = constant;
            break;
        }
        case CheckKind::HmLp:
        case CheckKind::LinfBmo: {
            HmNormResult hm = hm_norm(spec, params.s, params.q_m, params.hm);
            constant = hm.value;
            rep.hypothesis_constants["hm_norm"] = hm.value;
            rep.hypothesis_diverged = hm.diverged;
            const bool bmo = kind == CheckKind::LinfBmo;
            const double fit_p = bmo ? std::numeric_limits<double>::infinity() : params.p;
            SpectralProfile prof = spectral_profile(*sys, std::vector<double>{fit_p});
            const double gamma = prof.gamma_for(fit_p);
            const double threshold =
                std::max(0.5, gamma + prof.q_fit + 0.5 * params.q_m);
            rep.hypothesis_constants["s_threshold"] = threshold;
            rep.threshold_satisfied = params.s > threshold - params.threshold_slack;
            sampled = sample(spec, sys, 0);
            if (bmo) {
                in_p = std::numeric_limits<double>::infinity();
                target = TargetNorm::Bmo;
            } else {
                if (!(1.0 < params.p && std::isfinite(params.p)))
                    throw std::invalid_argument("hm_lp: requires 1 < p < inf");
                out_q = params.p;
            }
            break;
        }
        case CheckKind::MarcinkiewiczLp: {
            if (!(1.0 < params.p && std::isfinite(params.p)))
                throw std::invalid_argument("marcinkiewicz_lp: requires 1 < p < inf");
            double lam_max = 0;
            for (int k = 0; k < sys->modes(); ++k) lam_max = std::max(lam_max, sys->lambda_abs(k));
            MarcinkiewiczResult mr = marcinkiewicz_seminorms(spec, params.rho, std::max(lam_max, 10.0));
            constant = 0.0;
            for (std::size_t a = 0; a < mr.constants.size(); ++a) {
                constant += mr.constants[a];
                rep.hypothesis_constants["C_" + std::to_string(a)] = mr.constants[a];
            }
            rep.hypothesis_constants["marcinkiewicz_sum"] = constant;
            rep.hypothesis_diverged = mr.any_diverged();
            SpectralProfile prof = spectral_profile(*sys, std::vector<double>{params.p});
            const double threshold = std::max(0.5, prof.gamma_for(params.p) + prof.q_fit + 0.5);
            rep.hypothesis_constants["rho_threshold"] = threshold;
            rep.threshold_satisfied = params.rho > threshold - params.threshold_slack;
            sampled = sample(spec, sys, 0);
            out_q = params.p;
            break;
        }
        default: break;
    }

    rep.hypothesis_constants["rhs_constant"] = constant;

    NormEstimate est = estimate_norm(sampled, in_p, out_q, ensemble, target);
    rep.hypothesis_constants["empirical_norm"] = est.value;

    rep.members.resize(est.member_nums.size());
    for (std::size_t k = 0; k < est.member_nums.size(); ++k) {
        const double lhs = est.member_nums[k];
        const double rhs = constant * est.member_dens[k];
        rep.members[k] = {static_cast<int>(k), lhs, rhs, rhs > 0 ? lhs / rhs : 0.0};
    }
    reduce_members(rep);
    rep.witness_function = est.witness;
    // Power iteration may beat every ensemble member; keep the sharper bound.
    if (constant > 0 && est.value / constant > rep.max_ratio) {
        rep.max_ratio = est.value / constant;
        rep.witness_id = est.witness_member;
        rep.witness_lhs = est.witness_num;
        rep.witness_rhs = constant * est.witness_den;
    }
    finish_single_run_status(rep);
    return rep;
}

InequalityReport run_check(const CheckSpec& spec) {
    SystemPtr sys = build_model(spec.model);
    InequalityReport rep = is_fourier_check(spec.kind)
                               ? verify_fourier_inequality(spec.kind, sys, spec.params, spec.ensemble)
                               : verify_operator_bound(spec.kind, sys, spec.params, spec.ensemble);
    rep.model = spec.model;
    rep.n_sweep = {{spec.model.N, rep.max_ratio, rep.hypothesis_constant()}};
    return rep;
}

InequalityReport stability_sweep(const CheckSpec& spec) {
    if (spec.sweep_N.size() < 2)
        throw std::invalid_argument("stability_sweep: need an increasing N list of length >= 2");
    for (std::size_t i = 1; i < spec.sweep_N.size(); ++i)
        if (spec.sweep_N[i] <= spec.sweep_N[i - 1])
            throw std::invalid_argument("stability_sweep: N list must be increasing");

    std::vector<SweepPoint> points;
    InequalityReport last;
    bool any_violated = false;
    for (int N : spec.sweep_N) {
        CheckSpec at = spec;
        at.model.N = N;
        at.model.grid_n = 0;  // rescale the grid with N
        last = run_check(at);
        points.push_back({N, last.max_ratio, last.hypothesis_constant()});
        any_violated = any_violated || last.status == "hypothesis_violated";
    }
    last.n_sweep = points;

    const double first_ratio = points.front().max_ratio;
    const double last_ratio = points.back().max_ratio;
    last.growth_factor = first_ratio > 0 ? last_ratio / first_ratio : 1.0;
    const double first_c = points.front().hypothesis_constant;
    const double last_c = points.back().hypothesis_constant;
    last.constant_growth = first_c > 0 ? last_c / first_c : 1.0;

    if (any_violated || last.constant_growth > 1.25) {
        last.status = "hypothesis_violated";
        last.hypothesis_diverged = true;
    } else if (std::isfinite(last.growth_factor) && last.growth_factor <= 1.25 &&
               std::isfinite(last_ratio)) {
        last.status = "pass";
    } else {
        last.status = "fail";
    }
    return last;
}

std::vector<CheckSpec> default_suite_specs(std::uint64_t seed) {
    std::vector<CheckSpec> specs;
    auto base_ensemble = [&](int count) {
        EnsembleConfig e;
        e.count = count;
        e.seed = seed;
        e.families = {EnsembleFamily::BandLimitedGaussian, EnsembleFamily::SingleMode,
                      EnsembleFamily::Bump};
        return e;
    };
    const std::vector<int> sweep{32, 64, 128};

    for (const std::string model : {"torus_laplacian", "derivative_h", "dirichlet_laplacian"}) {
        CheckSpec hy;
        hy.kind = CheckKind::HausdorffYoung;
        hy.model.model = model;
        hy.params.p = 1.5;
        hy.ensemble = base_ensemble(48);
        hy.sweep_N = sweep;
        specs.push_back(hy);
    }
    for (const std::string model : {"torus_laplacian", "derivative_h"}) {
        CheckSpec paley;
        paley.kind = CheckKind::Paley;
        paley.model.model = model;
        paley.params.p = 1.5;
        paley.params.phi = "1/(1+abs(xi))";
        paley.ensemble = base_ensemble(48);
        paley.sweep_N = sweep;
        specs.push_back(paley);

        CheckSpec hyp = paley;
        hyp.kind = CheckKind::Hyp;
        hyp.params.b = 1.8;
        specs.push_back(hyp);
    }

    CheckSpec mult;
    mult.kind = CheckKind::LpLqMultiplier;
    mult.model.model = "torus_laplacian";
    mult.params.p = 4.0 / 3.0;
    mult.params.q = 4.0;
    mult.params.symbol = "1/(1+w)";
    mult.ensemble = base_ensemble(48);
    mult.sweep_N = sweep;
    specs.push_back(mult);

    CheckSpec pseudo = mult;
    pseudo.kind = CheckKind::LpLqPseudo;
    pseudo.params.symbol = "(1+pow(sin(2*pi*x),2))/(1+w)";
    specs.push_back(pseudo);

    // interval model: exercises the boundary collar on the symbol support
    CheckSpec ipseudo = pseudo;
    ipseudo.model.model = "dirichlet_laplacian";
    specs.push_back(ipseudo);

    CheckSpec marc;
    marc.kind = CheckKind::MarcinkiewiczLp;
    marc.model.model = "torus_laplacian";
    marc.params.p = 1.5;
    marc.params.symbol = "1/(1+w)";
    marc.params.rho = 2;
    marc.ensemble = base_ensemble(32);
    marc.sweep_N = sweep;
    specs.push_back(marc);

    CheckSpec hm;
    hm.kind = CheckKind::HmLp;
    hm.model.model = "torus_laplacian";
    hm.params.p = 1.5;
    hm.params.symbol = "1/(1+w*w)";
    hm.params.s = 2.0;
    hm.params.q_m = 1.0;
    hm.ensemble = base_ensemble(32);
    hm.sweep_N = sweep;
    specs.push_back(hm);

    CheckSpec bmo;
    bmo.kind = CheckKind::LinfBmo;
    bmo.model.model = "torus_laplacian";
    bmo.model.grid_factor = 8;
    bmo.params.symbol = "1/(1+w)";
    bmo.params.s = 2.0;
    bmo.params.q_m = 1.0;
    bmo.ensemble = base_ensemble(6);
    bmo.sweep_N = {16, 32, 64};
    specs.push_back(bmo);

    return specs;
}

std::vector<InequalityReport> run_default_suite(std::uint64_t seed) {
    std::vector<InequalityReport> reports;
    for (const CheckSpec& spec : default_suite_specs(seed)) reports.push_back(stability_sweep(spec));
    return reports;
}

namespace {

ordered_json model_json(const ModelSpec& m) {
    ordered_json j;
    j["model"] = m.model;
    if (model_from_name(m.model) == Model::DerivativeH) j["h"] = m.h;
    j["N"] = m.N;
    j["grid_n"] = m.resolved_grid_n();
    j["grid_factor"] = m.grid_factor;
    return j;
}

ordered_json params_json(const CheckParams& p) {
    ordered_json j;
    j["p"] = p.p;
    j["q"] = p.q;
    j["b"] = p.b;
    j["variant"] = p.variant;
    j["phi"] = p.phi;
    j["symbol"] = p.symbol;
    j["s"] = p.s;
    j["q_m"] = p.q_m;
    j["rho"] = p.rho;
    j["collar"] = p.collar;
    j["threshold_slack"] = p.threshold_slack;
    return j;
}

ordered_json ensemble_json(const EnsembleConfig& e) {
    ordered_json j;
    j["count"] = e.count;
    j["seed"] = e.seed;
    ordered_json fams = ordered_json::array();
    for (auto f : e.families) fams.push_back(family_name(f));
    j["families"] = fams;
    j["band_limit"] = e.band_limit;
    return j;
}

ordered_json report_json(const InequalityReport& r) {
    ordered_json j;
    j["check"] = r.check;
    j["system"] = model_json(r.model);
    j["parameters"] = params_json(r.params);
    j["ensemble"] = ensemble_json(r.ensemble);
    ordered_json hc;
    for (const auto& [k, v] : r.hypothesis_constants) hc[k] = v;
    j["hypothesis_constants"] = hc;
    j["hypothesis_diverged"] = r.hypothesis_diverged;
    j["threshold_satisfied"] = r.threshold_satisfied;
    j["max_ratio"] = r.max_ratio;
    j["witness_id"] = r.witness_id;
    j["witness_lhs"] = r.witness_lhs;
    j["witness_rhs"] = r.witness_rhs;
    ordered_json sweep = ordered_json::array();
    for (const SweepPoint& pt : r.n_sweep) {
        ordered_json e;
        e["N"] = pt.N;
        e["max_ratio"] = pt.max_ratio;
        e["hypothesis_constant"] = pt.hypothesis_constant;
        sweep.push_back(e);
    }
    j["n_sweep"] = sweep;
    j["growth_factor"] = r.growth_factor;      // NaN serializes as null
    j["constant_growth"] = r.constant_growth;
    j["status"] = r.status;
    return j;
}

}  // namespace

std::string report_to_json(const InequalityReport& report) {
    return report_json(report).dump(2) + "\n";
}

std::string suite_to_json(const std::vector<InequalityReport>& reports, std::uint64_t seed) {
    ordered_json j;
    j["suite"] = "default";
    j["seed"] = seed;
    ordered_json arr = ordered_json::array();
    for (const auto& r : reports) arr.push_back(report_json(r));
    j["reports"] = arr;
    return j.dump(2) + "\n";
}

void report_members_csv(const InequalityReport& report, std::ostream& out) {
    out << "member_id,lhs,rhs,ratio\n";
    char buf[128];
    for (const MemberRow& row : report.members) {
        std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g", row.member_id, row.lhs, row.rhs,
                      row.ratio);
        out << buf << "\n";
    }
}

}  // namespace nhfa
