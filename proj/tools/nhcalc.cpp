// nhcalc: build eigensystems, run nonharmonic transforms and operators,
// verify the inequality suite, and solve the stationary/heat/wave problems.
//
// Every run resolves its configuration (defaults < config file < flags),
// validates it against a strict key schema, executes, and writes a manifest
// echoing the fully resolved config plus a [result] section. Re-feeding the
// manifest as --config reproduces the reports byte for byte.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <nhfa/verify.hpp>

#include "config.hpp"

namespace fs = std::filesystem;
using nhcli::ConfigFile;
using ordered_json = nlohmann::ordered_json;
using namespace nhfa;

namespace {

const std::map<std::string, std::set<std::string>> kSchema = {
    {"task", {"kind"}},
    {"model", {"name", "h", "N", "grid_n", "grid_factor", "import"}},
    {"ensemble", {"count", "seed", "families", "band_limit"}},
    {"verify",
     {"check", "p", "q", "b", "variant", "phi", "symbol", "s", "q_m", "rho", "collar",
      "threshold_slack", "hm_half_width", "hm_samples", "hm_j_min", "hm_j_max", "hm_x_samples",
      "suite"}},
    {"sweep", {"n_list"}},
    {"transform", {"f", "direction", "variant", "coeffs_file"}},
    {"apply", {"symbol", "f"}},
    {"profile", {"p_list"}},
    {"solve",
     {"equation", "p", "dt", "T", "picard_tol", "u0", "u1", "b_profile", "B", "A", "f", "c",
      "max_iter", "tol", "snapshot_every"}},
    {"output", {"dir"}},
};

struct RunContext {
    ConfigFile cfg;
    fs::path out_dir;
    std::vector<std::string> files;  // outputs declared in the manifest

    void write_file(const std::string& name, const std::string& content) {
        fs::create_directories(out_dir);
        std::ofstream out(out_dir / name, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + (out_dir / name).string());
        out << content;
        files.push_back(name);
    }

    void finish_manifest(const std::string& status) {
        cfg.set("result", "status", status);
        std::string joined;
        for (std::size_t i = 0; i < files.size(); ++i)
            joined += (i ? "," : "") + files[i];
        cfg.set("result", "files", joined);
        fs::create_directories(out_dir);
        std::ofstream out(out_dir / "manifest.cfg", std::ios::binary);
        out << cfg.serialize();
    }
};

std::string normalized_model(std::string name) {
    std::replace(name.begin(), name.end(), '-', '_');
    return name;
}

ModelSpec model_from_config(const ConfigFile& cfg) {
    ModelSpec m;
    m.model = normalized_model(cfg.get("model", "name", "torus_laplacian"));
    model_from_name(m.model);  // validates
    m.h = cfg.get_double("model", "h", 2.0);
    m.N = static_cast<int>(cfg.get_long("model", "N", 64));
    m.grid_n = static_cast<int>(cfg.get_long("model", "grid_n", 0));
    m.grid_factor = static_cast<int>(cfg.get_long("model", "grid_factor", 32));
    return m;
}

void echo_model(ConfigFile& cfg, const ModelSpec& m) {
    cfg.set("model", "name", m.model);
    cfg.set_double("model", "h", m.h);
    cfg.set_long("model", "N", m.N);
    cfg.set_long("model", "grid_n", m.resolved_grid_n());
    cfg.set_long("model", "grid_factor", m.grid_factor);
}

EnsembleConfig ensemble_from_config(const ConfigFile& cfg) {
    EnsembleConfig e;
    e.count = static_cast<int>(cfg.get_long("ensemble", "count", 100));
    e.seed = cfg.get_u64("ensemble", "seed", 1);
    e.band_limit = static_cast<int>(cfg.get_long("ensemble", "band_limit", 0));
    const std::string fams =
        cfg.get("ensemble", "families", "band_limited_gaussian,single_mode,bump");
    e.families.clear();
    for (const std::string& f : nhcli::split_list(fams)) e.families.push_back(family_from_name(f));
    return e;
}

void echo_ensemble(ConfigFile& cfg, const EnsembleConfig& e) {
    cfg.set_long("ensemble", "count", e.count);
    cfg.set("ensemble", "seed", std::to_string(e.seed));
    std::string fams;
    for (std::size_t i = 0; i < e.families.size(); ++i)
        fams += (i ? "," : "") + family_name(e.families[i]);
    cfg.set("ensemble", "families", fams);
    cfg.set_long("ensemble", "band_limit", e.band_limit);
}

CheckParams params_from_config(const ConfigFile& cfg) {
    CheckParams p;
    p.p = cfg.get_double("verify", "p", 1.5);
    p.q = cfg.get_double("verify", "q", 4.0);
    p.b = cfg.get_double("verify", "b", 0.0);
    p.variant = cfg.get("verify", "variant", "L");
    p.phi = cfg.get("verify", "phi", "");
    p.symbol = cfg.get("verify", "symbol", "");
    p.s = cfg.get_double("verify", "s", 2.0);
    p.q_m = cfg.get_double("verify", "q_m", 1.0);
    p.rho = static_cast<int>(cfg.get_long("verify", "rho", 2));
    p.collar = cfg.get_double("verify", "collar", 1.0 / 16.0);
    p.threshold_slack = cfg.get_double("verify", "threshold_slack", 0.1);
    p.hm.half_width = cfg.get_double("verify", "hm_half_width", 64.0);
    p.hm.samples = static_cast<int>(cfg.get_long("verify", "hm_samples", 1 << 14));
    p.hm.j_min = static_cast<int>(cfg.get_long("verify", "hm_j_min", -10));
    p.hm.j_max = static_cast<int>(cfg.get_long("verify", "hm_j_max", 14));
    p.hm.x_samples = static_cast<int>(cfg.get_long("verify", "hm_x_samples", 16));
    return p;
}

void echo_params(ConfigFile& cfg, const CheckParams& p, const std::string& check) {
    cfg.set("verify", "check", check);
    cfg.set_double("verify", "p", p.p);
    cfg.set_double("verify", "q", p.q);
    cfg.set_double("verify", "b", p.b);
    cfg.set("verify", "variant", p.variant);
    cfg.set("verify", "phi", p.phi);
    cfg.set("verify", "symbol", p.symbol);
    cfg.set_double("verify", "s", p.s);
    cfg.set_double("verify", "q_m", p.q_m);
    cfg.set_long("verify", "rho", p.rho);
    cfg.set_double("verify", "collar", p.collar);
    cfg.set_double("verify", "threshold_slack", p.threshold_slack);
    cfg.set_double("verify", "hm_half_width", p.hm.half_width);
    cfg.set_long("verify", "hm_samples", p.hm.samples);
    cfg.set_long("verify", "hm_j_min", p.hm.j_min);
    cfg.set_long("verify", "hm_j_max", p.hm.j_max);
    cfg.set_long("verify", "hm_x_samples", p.hm.x_samples);
}

GridFunction function_from_expression(const SystemPtr& sys, const std::string& text) {
    Expr e = Expr::parse(text);
    return make_function(sys->grid, [&](double x) { return Complex(e.eval({x, 0, 0, 0}), 0.0); });
}

std::string profile_json(const SpectralProfile& prof) {
    ordered_json j;
    j["q_fit"] = prof.q_fit;
    ordered_json gam = ordered_json::array();
    for (const auto& g : prof.gamma_table) {
        ordered_json e;
        e["p"] = std::isinf(g.p) ? ordered_json("inf") : ordered_json(g.p);
        e["gamma1"] = g.gamma1;
        e["gamma2"] = g.gamma2;
        e["gamma"] = g.gamma;
        gam.push_back(e);
    }
    j["gamma_table"] = gam;
    j["sup_ratio_vu"] = prof.sup_ratio_vu;
    j["sup_ratio_uv"] = prof.sup_ratio_uv;
    ordered_json cnt = ordered_json::array();
    for (const auto& [lam, c] : prof.counting_samples) cnt.push_back({lam, c});
    j["counting_samples"] = cnt;
    return j.dump(2) + "\n";
}

int run_model(RunContext& ctx) {
    ModelSpec m = model_from_config(ctx.cfg);
    echo_model(ctx.cfg, m);
    SystemPtr sys;
    const std::string import = ctx.cfg.get("model", "import", "");
    if (!import.empty()) {
        auto kind = m.grid_kind();
        auto grid = Grid::build(kind, m.resolved_grid_n(),
                                kind == GridKind::Torus ? QuadratureRule::Uniform
                                                        : QuadratureRule::Trapezoid);
        std::ifstream in(import);
        if (!in) throw std::runtime_error("cannot read eigensystem table '" + import + "'");
        sys = import_csv(grid, in);
    } else {
        sys = build_model(m);
    }

    std::stringstream csv;
    export_csv(*sys, csv);
    ctx.write_file("eigensystem.csv", csv.str());

    ordered_json j;
    j["model"] = sys->meta.model;
    j["modes"] = sys->modes();
    j["grid_n"] = sys->grid->size();
    j["biorthonormality_defect"] = biorthonormality_defect(*sys);
    ctx.write_file("model.json", j.dump(2) + "\n");
    ctx.finish_manifest("ok");
    return 0;
}

int run_profile(RunContext& ctx) {
    ModelSpec m = model_from_config(ctx.cfg);
    echo_model(ctx.cfg, m);
    std::vector<double> p_list;
    for (const std::string& tok :
         nhcli::split_list(ctx.cfg.get("profile", "p_list", "1,1.5,2,inf"))) {
        p_list.push_back(tok == "inf" ? std::numeric_limits<double>::infinity() : std::stod(tok));
    }
    SystemPtr sys = build_model(m);
    SpectralProfile prof = spectral_profile(*sys, p_list);
    ctx.write_file("spectral_profile.json", profile_json(prof));
    ctx.finish_manifest("ok");
    return 0;
}

int run_transform(RunContext& ctx) {
    ModelSpec m = model_from_config(ctx.cfg);
    echo_model(ctx.cfg, m);
    SystemPtr sys = build_model(m);
    const std::string direction = ctx.cfg.get("transform", "direction", "forward");
    const Variant variant = variant_from_name(ctx.cfg.get("transform", "variant", "L"));
    if (direction == "forward") {
        const std::string ftext = ctx.cfg.get("transform", "f", "");
        if (ftext.empty()) throw std::runtime_error("transform: [transform] f expression required");
        GridFunction f = function_from_expression(sys, ftext);
        CoefficientVector a = forward(sys, f, variant);
        std::stringstream csv;
        export_csv(a, csv);
        ctx.write_file("coefficients.csv", csv.str());
    } else if (direction == "inverse") {
        const std::string path = ctx.cfg.get("transform", "coeffs_file", "");
        if (path.empty()) throw std::runtime_error("transform: [transform] coeffs_file required");
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot read coefficients '" + path + "'");
        std::string line;
        std::getline(in, line);  // header
        CVec a = CVec::Zero(sys->modes());
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            std::stringstream row(line);
            std::string cell;
            std::getline(row, cell, ',');
            const long xi = std::stol(cell);
            std::getline(row, cell, ',');
            const double re = std::stod(cell);
            std::getline(row, cell, ',');
            const double im = std::stod(cell);
            const int pos = sys->position(xi);
            if (pos < 0) throw std::runtime_error("coefficients reference unknown mode index");
            a[pos] = Complex(re, im);
        }
        GridFunction f = inverse({sys, a, variant});
        std::stringstream csv;
        export_function_csv(f, csv);
        ctx.write_file("function.csv", csv.str());
    } else {
        throw std::runtime_error("transform: direction must be forward or inverse");
    }
    ctx.finish_manifest("ok");
    return 0;
}

int run_apply(RunContext& ctx) {
    ModelSpec m = model_from_config(ctx.cfg);
    echo_model(ctx.cfg, m);
    SystemPtr sys = build_model(m);
    const std::string stext = ctx.cfg.get("apply", "symbol", "");
    const std::string ftext = ctx.cfg.get("apply", "f", "");
    if (stext.empty() || ftext.empty())
        throw std::runtime_error("apply: [apply] symbol and f expressions required");
    SampledSymbol sym = sample(SymbolSpec::expression(stext), sys, 0);
    GridFunction f = function_from_expression(sys, ftext);
    GridFunction af = apply(sym, f);
    std::stringstream csv;
    export_function_csv(af, csv);
    ctx.write_file("applied.csv", csv.str());
    ctx.finish_manifest("ok");
    return 0;
}

int run_verify(RunContext& ctx, bool sweep_task) {
    const std::string suite = ctx.cfg.get("verify", "suite", "");
    if (!suite.empty()) {
        if (suite != "default") throw std::runtime_error("only the 'default' suite exists");
        const std::uint64_t seed = ctx.cfg.get_u64("ensemble", "seed", 1);
        ctx.cfg.set("ensemble", "seed", std::to_string(seed));
        auto reports = run_default_suite(seed);
        ctx.write_file("suite.json", suite_to_json(reports, seed));
        bool all_pass = true;
        for (const auto& r : reports) all_pass = all_pass && r.status == "pass";
        ctx.finish_manifest(all_pass ? "pass" : "fail");
        return all_pass ? 0 : 1;
    }

    CheckSpec spec;
    spec.kind = check_from_name(ctx.cfg.get("verify", "check", "hausdorff_young"));
    spec.model = model_from_config(ctx.cfg);
    spec.params = params_from_config(ctx.cfg);
    spec.ensemble = ensemble_from_config(ctx.cfg);

    echo_model(ctx.cfg, spec.model);
    echo_params(ctx.cfg, spec.params, check_name(spec.kind));
    echo_ensemble(ctx.cfg, spec.ensemble);

    InequalityReport rep;
    if (sweep_task) {
        for (const std::string& tok :
             nhcli::split_list(ctx.cfg.get("sweep", "n_list", "32,64,128")))
            spec.sweep_N.push_back(std::stoi(tok));
        std::string nl;
        for (std::size_t i = 0; i < spec.sweep_N.size(); ++i)
            nl += (i ? "," : "") + std::to_string(spec.sweep_N[i]);
        ctx.cfg.set("sweep", "n_list", nl);
        rep = stability_sweep(spec);
    } else {
        rep = run_check(spec);
    }

    ctx.write_file("report.json", report_to_json(rep));
    std::stringstream csv;
    report_members_csv(rep, csv);
    ctx.write_file("report.csv", csv.str());
    if (rep.witness_function.grid) {
        std::stringstream wcsv;
        export_function_csv(rep.witness_function, wcsv);
        ctx.write_file("witness.csv", wcsv.str());
    }
    ctx.finish_manifest(rep.status);
    return rep.status == "pass" ? 0 : 1;
}

int run_solve(RunContext& ctx, std::string equation) {
    if (equation.empty()) equation = ctx.cfg.get("solve", "equation", "");
    if (equation.empty()) throw std::runtime_error("solve: equation (heat|wave|stationary) required");
    ctx.cfg.set("solve", "equation", equation);

    ModelSpec m = model_from_config(ctx.cfg);
    echo_model(ctx.cfg, m);
    SystemPtr sys = build_model(m);

    CauchyProblem pb;
    pb.sys = sys;
    pb.p = ctx.cfg.get_double("solve", "p", 2.0);
    ctx.cfg.set_double("solve", "p", pb.p);

    const std::string u0text = ctx.cfg.get("solve", "u0", "1");
    pb.u0 = function_from_expression(sys, u0text);
    ctx.cfg.set("solve", "u0", u0text);

    const std::string Btext = ctx.cfg.get("solve", "B", "");
    if (!Btext.empty()) pb.B = sample(SymbolSpec::expression(Btext), sys, 0);
    ctx.cfg.set("solve", "B", Btext);

    if (equation == "stationary") {
        const std::string Atext = ctx.cfg.get("solve", "A", "1");
        const std::string ftext = ctx.cfg.get("solve", "f", "0");
        ctx.cfg.set("solve", "A", Atext);
        ctx.cfg.set("solve", "f", ftext);
        pb.A = sample(SymbolSpec::expression(Atext), sys, 0);
        pb.forcing = function_from_expression(sys, ftext);
        const int max_iter = static_cast<int>(ctx.cfg.get_long("solve", "max_iter", 200));
        const double tol = ctx.cfg.get_double("solve", "tol", 1e-10);
        ctx.cfg.set_long("solve", "max_iter", max_iter);
        ctx.cfg.set_double("solve", "tol", tol);

        StationaryResult res = solve_stationary(pb, max_iter, tol);
        std::stringstream csv;
        export_function_csv(res.u, csv);
        ctx.write_file("solution.csv", csv.str());
        ctx.cfg.set_double("result", "residual", res.residual);
        ctx.cfg.set_long("result", "iterations", res.iterations);
        ctx.cfg.set_double("result", "apriori_lhs", res.apriori.lhs);
        ctx.cfg.set_double("result", "apriori_rhs", res.apriori.rhs);
        ctx.cfg.set_double("result", "apriori_ratio", res.apriori.ratio);
        ctx.finish_manifest("ok");
        return 0;
    }

    const double T = ctx.cfg.get_double("solve", "T", 0.5);
    const double dt = ctx.cfg.get_double("solve", "dt", 1e-3);
    const double picard_tol = ctx.cfg.get_double("solve", "picard_tol", 1e-10);
    const double c = ctx.cfg.get_double("solve", "c", 2.0);
    const long snapshot_every = ctx.cfg.get_long("solve", "snapshot_every", 0);
    pb.horizon = T;
    ctx.cfg.set_double("solve", "T", T);
    ctx.cfg.set_double("solve", "dt", dt);
    ctx.cfg.set_double("solve", "picard_tol", picard_tol);
    ctx.cfg.set_double("solve", "c", c);
    ctx.cfg.set_long("solve", "snapshot_every", snapshot_every);

    // The L^2 -> L^2p boundedness hypothesis on B is certified empirically
    // and recorded; it never blocks the solve.
    double b_norm_estimate = 0.0;
    if (pb.B) {
        EnsembleConfig small;
        small.count = 16;
        small.seed = ctx.cfg.get_u64("ensemble", "seed", 1);
        b_norm_estimate = estimate_norm(*pb.B, 2.0, 2.0 * pb.p, small).value;
    }

    EvolutionKind kind = EvolutionKind::Heat;
    Trajectory traj;
    double u1_norm = 0.0;
    if (equation == "heat") {
        traj = solve_heat(pb, dt, picard_tol);
    } else if (equation == "wave") {
        kind = EvolutionKind::Wave;
        const std::string u1text = ctx.cfg.get("solve", "u1", "0");
        const std::string btext = ctx.cfg.get("solve", "b_profile", "1");
        ctx.cfg.set("solve", "u1", u1text);
        ctx.cfg.set("solve", "b_profile", btext);
        pb.u1 = function_from_expression(sys, u1text);
        pb.b_profile = Expr::parse(btext);
        u1_norm = norm(*pb.u1, 2.0);
        traj = solve_wave(pb, dt, picard_tol);
    } else {
        throw std::runtime_error("solve: unknown equation '" + equation + "'");
    }

    std::stringstream csv;
    export_trajectory_csv(traj, csv);
    ctx.write_file("trajectory.csv", csv.str());
    if (snapshot_every > 0) {
        for (std::size_t k = 0; k < traj.states.size(); k += snapshot_every) {
            char name[64];
            std::snprintf(name, sizeof name, "state_%06zu.csv", k);
            std::stringstream snap;
            export_function_csv(traj.states[k], snap);
            ctx.write_file(name, snap.str());
        }
    }

    const double u0n = norm(pb.u0, 2.0);
    double b_l2 = 1.0;
    if (kind == EvolutionKind::Wave) {
        // ||b||_{L^2(0,T)} by trapezoid on the time grid
        double acc = 0.0;
        const int K = static_cast<int>(std::round(T / dt));
        for (int i = 0; i <= K; ++i) {
            const double b = pb.b_profile.empty() ? 1.0 : pb.b_profile.eval({0, 0, 0, i * dt});
            acc += (i == 0 || i == K ? 0.5 : 1.0) * b * b * dt;
        }
        b_l2 = std::sqrt(acc);
    }
    ExistenceCertificate cert = existence_time(kind, c, pb.p, u0n, u1_norm, b_l2);
    ScResult sc = sc_membership(traj, kind, c, u0n, u1_norm);

    ctx.cfg.set_bool("result", "blowup_flag", traj.blowup);
    ctx.cfg.set_double("result", "last_time", traj.last_time);
    ctx.cfg.set_double("result", "sup_l2", traj.sup_l2());
    ctx.cfg.set_double("result", "t_star", cert.t_star);
    ctx.cfg.set_double("result", "t_star_paper", cert.t_star_paper);
    ctx.cfg.set_bool("result", "sc_member", sc.member);
    ctx.cfg.set_double("result", "sc_margin", sc.margin);
    if (pb.B) ctx.cfg.set_double("result", "b_norm_estimate", b_norm_estimate);
    ctx.finish_manifest("ok");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"nonharmonic Fourier analysis calculator"};
    app.require_subcommand(1);
    app.fallthrough();  // --config/--out may follow the subcommand

    std::string config_path, out_dir = "out";
    app.add_option("--config", config_path, "configuration file");
    app.add_option("--out", out_dir, "output directory");

    std::string model_name_arg, check_arg, suite_arg, symbol_arg, phi_arg, variant_arg;
    std::string equation_arg, n_list_arg, f_arg, direction_arg;
    long N_arg = 0, grid_arg = 0, count_arg = 0;
    double h_arg = 0, p_arg = 0, q_arg = 0, b_arg = 0, s_arg = 0, qm_arg = 0;
    std::uint64_t seed_arg = 0;

    auto add_model_flags = [&](CLI::App* sub) {
        sub->add_option("--model", model_name_arg, "model name");
        sub->add_option("--N", N_arg, "truncation order");
        sub->add_option("--grid", grid_arg, "grid size");
        sub->add_option("--model-h", h_arg, "derivative_h parameter");
    };
    auto add_check_flags = [&](CLI::App* sub) {
        sub->add_option("--check", check_arg, "check name");
        sub->add_option("--p", p_arg, "Lebesgue exponent p");
        sub->add_option("--q", q_arg, "target exponent q");
        sub->add_option("--b", b_arg, "HYP exponent b");
        sub->add_option("--s", s_arg, "Sobolev smoothness s");
        sub->add_option("--qm", qm_arg, "Q_m homogeneity");
        sub->add_option("--phi", phi_arg, "Paley weight expression");
        sub->add_option("--symbol", symbol_arg, "symbol expression");
        sub->add_option("--variant", variant_arg, "transform variant L or L*");
        sub->add_option("--seed", seed_arg, "ensemble seed");
        sub->add_option("--count", count_arg, "ensemble size");
    };

    CLI::App* model_cmd = app.add_subcommand("model", "build or import an eigensystem");
    add_model_flags(model_cmd);
    CLI::App* transform_cmd = app.add_subcommand("transform", "forward/inverse transforms");
    add_model_flags(transform_cmd);
    transform_cmd->add_option("--f", f_arg, "function expression");
    transform_cmd->add_option("--direction", direction_arg, "forward|inverse");
    transform_cmd->add_option("--variant", variant_arg, "L or L*");
    CLI::App* apply_cmd = app.add_subcommand("apply", "apply a quantized symbol");
    add_model_flags(apply_cmd);
    apply_cmd->add_option("--symbol", symbol_arg, "symbol expression");
    apply_cmd->add_option("--f", f_arg, "function expression");
    CLI::App* profile_cmd = app.add_subcommand("profile", "spectral profile");
    add_model_flags(profile_cmd);
    CLI::App* verify_cmd = app.add_subcommand("verify", "run one inequality check");
    add_model_flags(verify_cmd);
    add_check_flags(verify_cmd);
    verify_cmd->add_option("--suite", suite_arg, "run a named check battery");
    CLI::App* sweep_cmd = app.add_subcommand("sweep", "stability sweep over N");
    add_model_flags(sweep_cmd);
    add_check_flags(sweep_cmd);
    sweep_cmd->add_option("--N-list", n_list_arg, "comma-separated N values");
    CLI::App* solve_cmd = app.add_subcommand("solve", "solve stationary/heat/wave problems");
    add_model_flags(solve_cmd);
    solve_cmd->add_option("equation", equation_arg, "heat|wave|stationary");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? 0 : 2;
    }

    try {
        RunContext ctx;
        if (!config_path.empty()) ctx.cfg = ConfigFile::load(config_path);

        // flags override config
        auto maybe = [&](CLI::App* sub, const char* flag, auto setter) {
            if (sub->count(flag) > 0) setter();
        };
        CLI::App* sub = app.get_subcommands().front();
        maybe(sub, "--model", [&] { ctx.cfg.set("model", "name", normalized_model(model_name_arg)); });
        maybe(sub, "--N", [&] { ctx.cfg.set_long("model", "N", N_arg); });
        maybe(sub, "--grid", [&] { ctx.cfg.set_long("model", "grid_n", grid_arg); });
        maybe(sub, "--model-h", [&] { ctx.cfg.set_double("model", "h", h_arg); });
        if (sub == verify_cmd || sub == sweep_cmd) {
            maybe(sub, "--check", [&] { ctx.cfg.set("verify", "check", check_arg); });
            maybe(sub, "--p", [&] { ctx.cfg.set_double("verify", "p", p_arg); });
            maybe(sub, "--q", [&] { ctx.cfg.set_double("verify", "q", q_arg); });
            maybe(sub, "--b", [&] { ctx.cfg.set_double("verify", "b", b_arg); });
            maybe(sub, "--s", [&] { ctx.cfg.set_double("verify", "s", s_arg); });
            maybe(sub, "--qm", [&] { ctx.cfg.set_double("verify", "q_m", qm_arg); });
            maybe(sub, "--phi", [&] { ctx.cfg.set("verify", "phi", phi_arg); });
            maybe(sub, "--symbol", [&] { ctx.cfg.set("verify", "symbol", symbol_arg); });
            maybe(sub, "--variant", [&] { ctx.cfg.set("verify", "variant", variant_arg); });
            maybe(sub, "--seed", [&] { ctx.cfg.set("ensemble", "seed", std::to_string(seed_arg)); });
            maybe(sub, "--count", [&] { ctx.cfg.set_long("ensemble", "count", count_arg); });
        }
        if (sub == verify_cmd)
            maybe(sub, "--suite", [&] { ctx.cfg.set("verify", "suite", suite_arg); });
        if (sub == sweep_cmd)
            maybe(sub, "--N-list", [&] { ctx.cfg.set("sweep", "n_list", n_list_arg); });
        if (sub == transform_cmd) {
            maybe(sub, "--f", [&] { ctx.cfg.set("transform", "f", f_arg); });
            maybe(sub, "--direction", [&] { ctx.cfg.set("transform", "direction", direction_arg); });
            maybe(sub, "--variant", [&] { ctx.cfg.set("transform", "variant", variant_arg); });
        }
        if (sub == apply_cmd) {
            maybe(sub, "--symbol", [&] { ctx.cfg.set("apply", "symbol", symbol_arg); });
            maybe(sub, "--f", [&] { ctx.cfg.set("apply", "f", f_arg); });
        }

        if (app.count("--out") == 0 && ctx.cfg.has("output", "dir"))
            out_dir = ctx.cfg.get("output", "dir");
        ctx.cfg.set("output", "dir", out_dir);
        ctx.out_dir = out_dir;

        ctx.cfg.validate(kSchema);

        if (sub == model_cmd) {
            ctx.cfg.set("task", "kind", "model");
            return run_model(ctx);
        }
        if (sub == transform_cmd) {
            ctx.cfg.set("task", "kind", "transform");
            return run_transform(ctx);
        }
        if (sub == apply_cmd) {
            ctx.cfg.set("task", "kind", "apply");
            return run_apply(ctx);
        }
        if (sub == profile_cmd) {
            ctx.cfg.set("task", "kind", "profile");
            return run_profile(ctx);
        }
        if (sub == verify_cmd) {
            ctx.cfg.set("task", "kind", "verify");
            return run_verify(ctx, false);
        }
        if (sub == sweep_cmd) {
            ctx.cfg.set("task", "kind", "sweep");
            return run_verify(ctx, true);
        }
        if (sub == solve_cmd) {
            ctx.cfg.set("task", "kind", "solve");
            return run_solve(ctx, equation_arg);
        }
        std::cerr << "unknown subcommand\n";
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
