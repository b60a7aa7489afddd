#include "clab/runner.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <vector>

#include <nlohmann/json.hpp>

#include "clab/csv.hpp"
#include "clab/errors.hpp"
#include "clab/operators.hpp"
#include "clab/parallel.hpp"
#include "clab/stability_b.hpp"
#include "clab/stability_ic.hpp"
#include "clab/verifier.hpp"
#include "clab/version.hpp"

namespace clab {

namespace {

struct RunContext {
    std::string dir;
    std::vector<std::string> outputs;

    std::string path(const std::string& name) {
        outputs.push_back(name);
        return dir + "/" + name;
    }
};

void write_manifest(const RunContext& ctx, const std::string& command, const ScenarioConfig& cfg,
                    double wall_time_s) {
    nlohmann::json j;
    j["command"] = command;
    j["version"] = kVersion;
#if defined(__VERSION__)
    j["compiler"] = __VERSION__;
#endif
    j["seed"] = cfg.seed;
    j["threads"] = thread_cap();
    j["config"] = cfg.echo;
    j["outputs"] = ctx.outputs;
    j["wall_time_s"] = wall_time_s;
    std::ofstream out(ctx.dir + "/manifest.json", std::ios::binary);
    out << j.dump(2) << '\n';
}

int run_forward(RunContext& ctx, const ScenarioConfig& cfg) {
    const Scenario sc = build_scenario(cfg);
    const SystemTrajectory traj = solve_reference(sc);
    write_trajectory_csv(traj, ctx.path("trajectory.csv"));
    write_trajectory_binary(traj, ctx.path("trajectory.bin"));
    return 0;
}

int run_weights(RunContext& ctx, const ScenarioConfig& cfg) {
    const Scenario sc = build_scenario(cfg);
    const BetaProfile beta = build_beta(sc.space, sc.geometry, sc.x0, sc.m);
    const BetaValidation validation = validate_beta(beta, sc.geometry, sc.space);
    const CutoffProfile cutoff = build_cutoff(sc.geometry);

    {
        CsvWriter csv(ctx.path("beta.csv"));
        csv.header({"x", "beta_tilde", "beta", "dbeta", "xi"});
        for (int i = 0; i < sc.space.node_count; ++i) {
            const double x = sc.space.node(i);
            csv.row({x, beta.value(x), beta.lifted(x), beta.derivative(x), cutoff.value(x)});
        }
    }
    {
        CsvWriter csv(ctx.path("validation.csv"));
        csv.header({"interior_positive", "boundary_zero", "gradient_bounded_away",
                    "endpoint_signs", "min_gradient_outside", "pass"});
        csv.raw_row({validation.interior_positive ? "1" : "0",
                     validation.boundary_zero ? "1" : "0",
                     validation.gradient_bounded_away ? "1" : "0",
                     validation.endpoint_signs ? "1" : "0",
                     format_double(validation.min_gradient_outside),
                     validation.pass() ? "1" : "0"});
    }
    bool bounds_ok = true;
    {
        CsvWriter csv(ctx.path("weight_bounds.csv"));
        csv.header({"lambda", "c_dt_phi", "c_dt_eta", "c_phi_vs_phi3", "c_phi3_vs_phi7",
                    "c_one_vs_phi3", "phi_min", "all_finite"});
        for (double lam : cfg.lambda_list) {
            const WeightSet w = make_weight_set(beta, sc.time, lam, sc.geometry);
            const WeightBoundReport rep = check_weight_bounds(w, sc.space, sc.time);
            bounds_ok = bounds_ok && rep.all_finite;
            csv.raw_row({format_double(lam), format_double(rep.c_dt_phi),
                         format_double(rep.c_dt_eta), format_double(rep.c_phi_vs_phi3),
                         format_double(rep.c_phi3_vs_phi7), format_double(rep.c_one_vs_phi3),
                         format_double(rep.phi_min), rep.all_finite ? "1" : "0"});
        }
    }
    const WeightSet w0 = make_weight_set(beta, sc.time, cfg.lambda_list.front(), sc.geometry);
    write_weight_snapshot_csv(w0, sc.space, sc.time, cfg.s_list.front(), 3,
                              ctx.path("weights_snapshot.csv"));
    return (validation.pass() && bounds_ok) ? 0 : 2;
}

bool sweep_verdict(const SweepTable& table, const ScenarioConfig& cfg) {
    for (const SweepRow& row : table.rows)
        if (!row.degenerate && !std::isfinite(row.ratio)) return false;
    if (cfg.s_list.size() < 2) return true;
    // no blow-up along s: the largest-s max ratio stays within a factor 2 of
    // the previous one, per lambda
    const double s_hi = cfg.s_list[cfg.s_list.size() - 1];
    const double s_lo = cfg.s_list[cfg.s_list.size() - 2];
    for (double lam : cfg.lambda_list) {
        double hi = 0.0, lo = 0.0;
        for (const SweepSummaryRow& s : table.summary) {
            if (s.lambda != lam) continue;
            if (s.s == s_hi) hi = s.max_ratio;
            if (s.s == s_lo) lo = s.max_ratio;
        }
        if (std::isnan(hi) || std::isnan(lo)) continue;  // all-degenerate cell
        if (hi > 2.0 * lo) return false;
    }
    return true;
}

int run_carleman(RunContext& ctx, const ScenarioConfig& cfg) {
    const Scenario sc = build_scenario(cfg);
    const BetaProfile beta = build_beta(sc.space, sc.geometry, sc.x0, sc.m);
    bool ok = true;
    for (EstimateId id : {EstimateId::Est3, EstimateId::Est4}) {
        const SweepTable table =
            constant_sweep(id, cfg.ensemble, cfg.seed, cfg.s_list, cfg.lambda_list, beta,
                           sc.geometry, sc.space, sc.time, cfg.modes);
        const std::string tag = id == EstimateId::Est3 ? "est3" : "est4";
        write_sweep_csv(table, ctx.path(tag + "_sweep.csv"));
        write_sweep_summary_csv(table, ctx.path(tag + "_summary.csv"));
        ok = ok && sweep_verdict(table, cfg);
    }
    return ok ? 0 : 2;
}

int run_carleman_sys(RunContext& ctx, const ScenarioConfig& cfg) {
    const Scenario sc = build_scenario(cfg);
    const AssumptionReport assumptions = check_assumptions(sc);
    if (!assumptions.pass)
        throw ConfigError("scenario fails the admissibility checks: " +
                          assumptions.first_violation);
    const BetaProfile beta = build_beta(sc.space, sc.geometry, sc.x0, sc.m);
    const SystemTrajectory reference = solve_reference(sc);
    const ScalarField gamma_shape = cfg.gamma_shape.evaluate(sc.space);
    const ScalarField zero = make_field(sc.space);

    CsvWriter csv(ctx.path("est10.csv"));
    csv.header({"eps", "s", "lambda", "lhs_total", "rhs_total", "ratio", "flag"});
    CsvWriter fcsv(ctx.path("functionals.csv"));
    fcsv.header({"s", "lambda", "term_dtlap", "term_grad", "term_zero", "total"});

    bool ok = true;
    for (double eps : cfg.eps_list) {
        ScalarField gamma = make_field(sc.space);
        for (int i = 0; i < sc.space.node_count; ++i) gamma[i] = eps * gamma_shape[i];
        const SystemTrajectory perturbed = solve_perturbed(sc, gamma, zero, zero);
        auto [y0, z0] = difference_initial_data(sc, gamma, perturbed, reference);
        const SystemTrajectory diff =
            solve_difference_system(perturbed.coeffs, gamma, reference, y0, z0);
        for (double lam : cfg.lambda_list) {
            const WeightSet w = make_weight_set(beta, sc.time, lam, sc.geometry);
            for (double s : cfg.s_list) {
                const CarlemanReport rep = eval_estimate10(diff, gamma, reference, w, s, sc.c0);
                csv.raw_row({format_double(eps), format_double(s), format_double(lam),
                             format_double(rep.lhs_total), format_double(rep.rhs_total),
                             format_double(rep.ratio), rep.degenerate ? "degenerate" : "ok"});
                if (!rep.degenerate && !std::isfinite(rep.ratio)) ok = false;
                append_csv_row(eval_I(diff.u, w, s), fcsv);
                append_csv_row(eval_I(diff.v, w, s), fcsv);
            }
        }
    }
    return ok ? 0 : 2;
}

int run_stab_b(RunContext& ctx, const ScenarioConfig& cfg) {
    const Scenario sc = build_scenario(cfg);
    const ScalarField gamma_shape = cfg.gamma_shape.evaluate(sc.space);
    const ScalarField du0_shape = cfg.du0_shape.evaluate(sc.space);
    const ScalarField dv0_shape = cfg.dv0_shape.evaluate(sc.space);
    const std::vector<StabilityReport> reports =
        stability_experiment(sc, cfg.eps_list, gamma_shape, du0_shape, dv0_shape);
    write_stability_csv(reports, ctx.path("stability.csv"));

    ScalarField gamma0 = make_field(sc.space);
    for (int i = 0; i < sc.space.node_count; ++i)
        gamma0[i] = cfg.eps_list.front() * gamma_shape[i];
    const ScalingCheck scaling = stability_scaling_check(sc, gamma0, 2.0);
    {
        CsvWriter csv(ctx.path("scaling.csv"));
        csv.header({"alpha", "base_ratio", "scaled_ratio", "rel_deviation"});
        csv.row({2.0, scaling.base.ratio, scaling.scaled.ratio, scaling.ratio_rel_deviation});
    }

    bool ok = scaling.ratio_rel_deviation <= 1e-12;
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (const StabilityReport& r : reports) {
        if (r.degenerate) continue;
        if (!std::isfinite(r.ratio)) ok = false;
        lo = std::min(lo, r.ratio);
        hi = std::max(hi, r.ratio);
    }
    if (hi > 0.0 && hi > 10.0 * lo) ok = false;
    return ok ? 0 : 2;
}

int run_stab_ic(RunContext& ctx, const ScenarioConfig& cfg) {
    const Scenario sc = build_scenario(cfg);
    const std::vector<ICStabilityRecord> records = ic_stability_experiment(
        sc, cfg.eps_list, cfg.gamma_shape.evaluate(sc.space), cfg.du0_shape.evaluate(sc.space),
        cfg.dv0_shape.evaluate(sc.space));
    write_ic_records_csv(records, ctx.path("ic_records.csv"));
    int ok_count = 0, flagged = 0;
    bool ok = true;
    for (const ICStabilityRecord& r : records) {
        if (r.flag == ICRecordFlag::Ok) {
            ++ok_count;
            if (!std::isfinite(r.product)) ok = false;
        } else {
            ++flagged;
        }
    }
    {
        CsvWriter csv(ctx.path("summary.csv"));
        csv.header({"max_product", "records_ok", "records_flagged"});
        csv.raw_row({format_double(max_product(records)), std::to_string(ok_count),
                     std::to_string(flagged)});
    }
    return ok ? 0 : 2;
}

int run_logconvexity(RunContext& ctx, const ScenarioConfig& cfg) {
    const Scenario sc = build_scenario(cfg);
    const ScalarField gamma = cfg.gamma_shape.evaluate(sc.space);
    const ScalarField du0 = cfg.du0_shape.evaluate(sc.space);
    const ScalarField dv0 = cfg.dv0_shape.evaluate(sc.space);

    ScalarField b = sc.reference_coeffs.b;
    for (int i = 0; i < b.size(); ++i) b[i] += gamma[i];
    const double alpha = coupling_sup_norm(with_b(sc.reference_coeffs, std::move(b)));
    std::vector<double> scan;
    if (alpha > 0.0)
        scan = {alpha / 4.0, alpha / 2.0, alpha, 2.0 * alpha};
    else
        scan = {0.0};

    const LogConvexityRecord rec = logconvexity_check_pair(sc, gamma, du0, dv0, scan);
    write_logconvexity_csv(rec, ctx.path("logconvexity.csv"));
    {
        CsvWriter csv(ctx.path("summary.csv"));
        csv.header({"scan_constant", "c1", "bound_m", "pass", "degenerate"});
        csv.raw_row({format_double(rec.scan_constant), format_double(rec.c1),
                     format_double(rec.bound_m), rec.pass ? "1" : "0",
                     rec.degenerate ? "1" : "0"});
    }
    return rec.pass ? 0 : 2;
}

int run_reconstruct(RunContext& ctx, const ScenarioConfig& cfg) {
    const Scenario sc = build_scenario(cfg);
    const ScalarField gamma_true = cfg.gamma_shape.evaluate(sc.space);
    const ScalarField zero = make_field(sc.space);

    const SystemTrajectory reference = solve_reference(sc);
    const SystemTrajectory perturbed = solve_perturbed(sc, gamma_true, zero, zero);
    const ObservationSet obs = extract_observations(perturbed, sc.geometry.omega, true);
    const ObservationSet ref_obs = extract_observations(reference, sc.geometry.omega, true);

    const ScalarField b_direct =
        reconstruct_b_direct(obs, ref_obs, sc.reference_coeffs.a, sc.reference_coeffs.b, sc.r);

    LsqOptions opt;
    opt.alpha = cfg.alpha;
    opt.max_iterations = cfg.max_iterations;
    const LsqResult lsq = reconstruct_b_lsq(sc, obs, opt);

    ScalarField b_true = sc.reference_coeffs.b;
    for (int i = 0; i < sc.space.node_count; ++i) b_true[i] += gamma_true[i];

    {
        CsvWriter csv(ctx.path("reconstruction.csv"));
        csv.header({"x", "b_true", "b_direct", "b_lsq"});
        for (int i = 0; i < sc.space.node_count; ++i)
            csv.row({sc.space.node(i), b_true[i], b_direct[i], lsq.b_hat[i]});
    }
    ScalarField err_direct = make_field(sc.space);
    for (int i = 0; i < sc.space.node_count; ++i) err_direct[i] = b_direct[i] - b_true[i];
    const double rel_direct = std::sqrt(l2_norm_sq(err_direct) / l2_norm_sq(b_true));
    {
        CsvWriter csv(ctx.path("summary.csv"));
        std::vector<std::string> header{"direct_rel_l2_error", "lsq_converged", "lsq_iterations",
                                        "lsq_misfit"};
        std::vector<std::string> row{format_double(rel_direct), lsq.converged ? "1" : "0",
                                     std::to_string(lsq.iterations), format_double(lsq.misfit)};
        for (size_t j = 0; j < lsq.mode_coefficients.size(); ++j) {
            header.push_back("lsq_mode_" + std::to_string(j + 1));
            row.push_back(format_double(lsq.mode_coefficients[j]));
        }
        csv.raw_row(std::vector<std::string>(header.begin(), header.end()));
        csv.raw_row(row);
    }
    return (std::isfinite(rel_direct) && lsq.converged) ? 0 : 2;
}

}  // namespace

int run_command(const std::string& command, const ScenarioConfig& config,
                const RunOptions& options) {
    ScenarioConfig cfg = config;
    if (options.seed) cfg.seed = *options.seed;
    if (!options.out_dir.empty()) cfg.out_dir = options.out_dir;
    refresh_echo(cfg);

    RunContext ctx;
    ctx.dir = cfg.out_dir;
    ensure_directory(ctx.dir);

    const auto start = std::chrono::steady_clock::now();
    int code = 0;
    if (command == "forward") code = run_forward(ctx, cfg);
    else if (command == "weights") code = run_weights(ctx, cfg);
    else if (command == "carleman") code = run_carleman(ctx, cfg);
    else if (command == "carleman-sys") code = run_carleman_sys(ctx, cfg);
    else if (command == "stab-b") code = run_stab_b(ctx, cfg);
    else if (command == "stab-ic") code = run_stab_ic(ctx, cfg);
    else if (command == "logconvexity") code = run_logconvexity(ctx, cfg);
    else if (command == "reconstruct") code = run_reconstruct(ctx, cfg);
    else throw ConfigError("unknown subcommand: " + command);

    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_manifest(ctx, command, cfg, wall);
    return code;
}

}  // namespace clab
