#include "clab/stability_b.hpp"

#include <cmath>
#include <limits>

#include "clab/csv.hpp"
#include "clab/errors.hpp"
#include "clab/operators.hpp"
#include "clab/parallel.hpp"

namespace clab {

namespace {

constexpr double kDegenerateFloor = 1e-300;

ScalarField field_difference(const ScalarField& a, const ScalarField& b) {
    ScalarField d = make_field(a.grid);
    for (int i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
    return d;
}

double windowed_sq_misfit(const SpaceTimeField& a, const SpaceTimeField& b, Interval region) {
    SpaceTimeField sq = make_spacetime_field(a.space, a.time);
    for (size_t i = 0; i < sq.values.size(); ++i) {
        const double d = a.values[i] - b.values[i];
        sq.values[i] = d * d;
    }
    return integrate_spacetime(sq, region);
}

}  // namespace

ObservationSet extract_observations(const SystemTrajectory& traj, Interval omega, bool with_dt_u) {
    const SpatialGrid& g = traj.u.space;
    if (omega.lo <= 0.0 || omega.hi >= g.length || !(omega.lo < omega.hi))
        throw ConfigError("observations: omega must be strictly inside the domain");
    ObservationSet obs;
    obs.omega = omega;
    obs.dt_v = time_derivative(traj.v);
    const int mid = traj.u.time.midpoint_index();
    obs.u_mid = traj.u.snapshot(mid);
    obs.v_mid = traj.v.snapshot(mid);
    obs.lap_u_mid = discrete_laplacian(obs.u_mid);
    if (with_dt_u) {
        const SpaceTimeField dtu = time_derivative(traj.u);
        obs.dt_u_mid = dtu.snapshot(mid);
    }
    return obs;
}

SnapshotResidual snapshot_identity_residual(const SystemTrajectory& perturbed,
                                            const SystemTrajectory& reference,
                                            const ScalarField& gamma,
                                            const SystemTrajectory* difference) {
    const SpatialGrid& g = perturbed.u.space;
    const int mid = perturbed.u.time.midpoint_index();
    const int n = g.node_count;

    ScalarField cap_u = make_field(g), cap_v = make_field(g);
    for (int i = 0; i < n; ++i) {
        cap_u[i] = perturbed.u.at(mid, i) - reference.u.at(mid, i);
        cap_v[i] = perturbed.v.at(mid, i) - reference.v.at(mid, i);
    }
    const ScalarField lap_u = discrete_laplacian(cap_u);
    const CoefficientSet& c = perturbed.coeffs;

    ScalarField y_mid = make_field(g);
    if (difference) {
        y_mid = difference->u.snapshot(mid);
    } else {
        SpaceTimeField cap_u_traj = make_spacetime_field(g, perturbed.u.time);
        for (size_t i = 0; i < cap_u_traj.values.size(); ++i)
            cap_u_traj.values[i] = perturbed.u.values[i] - reference.u.values[i];
        y_mid = time_derivative(cap_u_traj).snapshot(mid);
    }

    SnapshotResidual res;
    res.field = make_field(g);
    for (int i = 1; i < n - 1; ++i) {
        const double predicted = lap_u[i] + c.a[i] * cap_u[i] + c.b[i] * cap_v[i] +
                                 gamma[i] * reference.v.at(mid, i);
        res.field[i] = y_mid[i] - predicted;
    }
    res.norm = std::sqrt(l2_norm_sq(res.field));
    res.y_norm = std::sqrt(l2_norm_sq(y_mid));
    return res;
}

namespace {

StabilityReport assemble_report(double eps, double lhs, double obs_term, double lap_term,
                                double u_term, double v_term) {
    StabilityReport r;
    r.eps = eps;
    r.lhs = lhs;
    r.obs_term = obs_term;
    r.lap_term = lap_term;
    r.u_term = u_term;
    r.v_term = v_term;
    const double denom = r.denominator();
    r.degenerate = r.lhs < kDegenerateFloor && denom < kDegenerateFloor;
    r.ratio = (!r.degenerate && denom > 0.0) ? r.lhs / denom
                                             : std::numeric_limits<double>::quiet_NaN();
    return r;
}

}  // namespace

std::vector<StabilityReport> stability_experiment(const Scenario& sc,
                                                  std::span<const double> eps_list,
                                                  const ScalarField& gamma_shape,
                                                  const ScalarField& du0_shape,
                                                  const ScalarField& dv0_shape) {
    const AssumptionReport rep = check_assumptions(sc);
    if (!rep.pass)
        throw PreconditionError("base scenario rejected: " + rep.first_violation);
    const SystemTrajectory reference = solve_reference(sc);
    const ObservationSet ref_obs = extract_observations(reference, sc.geometry.omega);

    std::vector<StabilityReport> out(eps_list.size());
    parallel_for(static_cast<int>(eps_list.size()), [&](int idx) {
        const double eps = eps_list[static_cast<size_t>(idx)];
        ScalarField gamma = make_field(sc.space);
        ScalarField du0 = make_field(sc.space);
        ScalarField dv0 = make_field(sc.space);
        for (int i = 0; i < sc.space.node_count; ++i) {
            gamma[i] = eps * gamma_shape[i];
            du0[i] = eps * du0_shape[i];
            dv0[i] = eps * dv0_shape[i];
        }
        const SystemTrajectory perturbed = solve_perturbed(sc, gamma, du0, dv0);
        const ObservationSet obs = extract_observations(perturbed, sc.geometry.omega);

        const double lhs = l2_norm_sq(gamma);
        const double obs_term = windowed_sq_misfit(obs.dt_v, ref_obs.dt_v, sc.geometry.omega);
        const double lap_term = l2_norm_sq(field_difference(obs.lap_u_mid, ref_obs.lap_u_mid));
        const double u_term = l2_norm_sq(field_difference(obs.u_mid, ref_obs.u_mid));
        const double v_term = l2_norm_sq(field_difference(obs.v_mid, ref_obs.v_mid));
        out[static_cast<size_t>(idx)] =
            assemble_report(eps, lhs, obs_term, lap_term, u_term, v_term);
    });
    return out;
}

namespace {

// Report terms computed from a difference-system trajectory: z stands in for
// dt V, and the midpoint snapshots are recovered by integrating (y, z) in
// time from the equal-initial-data start.
StabilityReport report_from_difference(const Scenario& sc, const ScalarField& gamma,
                                       const SystemTrajectory& diff) {
    const int mid = diff.u.time.midpoint_index();
    const int n = sc.space.node_count;
    const double dt = diff.u.time.dt;

    ScalarField cap_u = make_field(sc.space), cap_v = make_field(sc.space);
    for (int k = 0; k < mid; ++k) {
        for (int i = 0; i < n; ++i) {
            cap_u[i] += 0.5 * dt * (diff.u.at(k, i) + diff.u.at(k + 1, i));
            cap_v[i] += 0.5 * dt * (diff.v.at(k, i) + diff.v.at(k + 1, i));
        }
    }
    const ScalarField lap_u = discrete_laplacian(cap_u);

    SpaceTimeField z_sq = make_spacetime_field(sc.space, diff.u.time);
    for (size_t i = 0; i < z_sq.values.size(); ++i)
        z_sq.values[i] = diff.v.values[i] * diff.v.values[i];

    return assemble_report(0.0, l2_norm_sq(gamma),
                           integrate_spacetime(z_sq, sc.geometry.omega), l2_norm_sq(lap_u),
                           l2_norm_sq(cap_u), l2_norm_sq(cap_v));
}

}  // namespace

ScalingCheck stability_scaling_check(const Scenario& sc, const ScalarField& gamma, double alpha) {
    const SystemTrajectory reference = solve_reference(sc);
    ScalarField b = sc.reference_coeffs.b;
    for (int i = 0; i < b.size(); ++i) b[i] += gamma[i];
    const CoefficientSet coeffs = with_b(sc.reference_coeffs, std::move(b));

    ScalarField y0 = make_field(sc.space);
    for (int i = 1; i < sc.space.node_count - 1; ++i) y0[i] = gamma[i] * reference.v.at(0, i);
    const ScalarField z0 = make_field(sc.space);

    ScalarField gamma_scaled = make_field(sc.space);
    ScalarField y0_scaled = make_field(sc.space);
    for (int i = 0; i < sc.space.node_count; ++i) {
        gamma_scaled[i] = alpha * gamma[i];
        y0_scaled[i] = alpha * y0[i];
    }

    const SystemTrajectory base_diff = solve_difference_system(coeffs, gamma, reference, y0, z0);
    const SystemTrajectory scaled_diff =
        solve_difference_system(coeffs, gamma_scaled, reference, y0_scaled, z0);

    ScalingCheck check;
    check.base = report_from_difference(sc, gamma, base_diff);
    check.scaled = report_from_difference(sc, gamma_scaled, scaled_diff);
    if (std::isnan(check.base.ratio) || std::isnan(check.scaled.ratio)) {
        check.ratio_rel_deviation = std::numeric_limits<double>::quiet_NaN();
    } else {
        check.ratio_rel_deviation =
            std::abs(check.scaled.ratio - check.base.ratio) / std::abs(check.base.ratio);
    }
    return check;
}

ScalarField reconstruct_b_direct(const ObservationSet& obs, const ObservationSet& ref_obs,
                                 const ScalarField& a, const ScalarField& b_ref, double r_floor) {
    if (!obs.dt_u_mid || !ref_obs.dt_u_mid)
        throw PreconditionError("direct reconstruction needs the dt u midpoint snapshot");
    const SpatialGrid& g = a.grid;
    const int n = g.node_count;
    for (int i = 0; i < n; ++i)
        if (std::abs(obs.v_mid[i]) < r_floor)
            throw ReconstructionError("measured v at T' falls below the positivity floor at x = " +
                                      format_double(g.node(i)));
    ScalarField b_hat = b_ref;
    for (int i = 0; i < n; ++i) {
        const double du = (*obs.dt_u_mid)[i] - (*ref_obs.dt_u_mid)[i];
        const double lap = obs.lap_u_mid[i] - ref_obs.lap_u_mid[i];
        const double cap_u = obs.u_mid[i] - ref_obs.u_mid[i];
        const double cap_v = obs.v_mid[i] - ref_obs.v_mid[i];
        const double gamma_hat = (du - lap - a[i] * cap_u - b_ref[i] * cap_v) / obs.v_mid[i];
        b_hat[i] += gamma_hat;
    }
    return b_hat;
}

namespace {

// Residual vector of the output-least-squares misfit: square-root quadrature
// weights times the observation differences, then the Tikhonov rows.
std::vector<double> lsq_residual(const Scenario& sc, const ObservationSet& data,
                                 const std::vector<double>& modes_coeff, double alpha) {
    ScalarField gamma = make_field(sc.space);
    for (size_t j = 0; j < modes_coeff.size(); ++j) {
        const ScalarField mode = sine_mode_field(sc.space, static_cast<int>(j) + 1);
        for (int i = 0; i < sc.space.node_count; ++i) gamma[i] += modes_coeff[j] * mode[i];
    }
    const ScalarField zero = make_field(sc.space);
    const SystemTrajectory sim = solve_perturbed(sc, gamma, zero, zero);
    const ObservationSet sim_obs = extract_observations(sim, sc.geometry.omega);

    const std::vector<double> wx_omega = quadrature_weights(sc.space, sc.geometry.omega);
    const std::vector<double> wx_full = quadrature_weights(sc.space, {0.0, sc.space.length});
    const TimeGrid& time = sc.time;

    std::vector<double> r;
    r.reserve(static_cast<size_t>(time.node_count() + 3) * sc.space.node_count +
              modes_coeff.size());
    for (int k = 0; k <= time.step_count; ++k) {
        const double wt = (k == 0 || k == time.step_count) ? 0.5 * time.dt : time.dt;
        for (int i = 0; i < sc.space.node_count; ++i) {
            const double w = wt * wx_omega[static_cast<size_t>(i)];
            if (w == 0.0) continue;
            r.push_back(std::sqrt(w) * (sim_obs.dt_v.at(k, i) - data.dt_v.at(k, i)));
        }
    }
    for (int i = 0; i < sc.space.node_count; ++i) {
        const double sw = std::sqrt(wx_full[static_cast<size_t>(i)]);
        r.push_back(sw * (sim_obs.lap_u_mid[i] - data.lap_u_mid[i]));
        r.push_back(sw * (sim_obs.u_mid[i] - data.u_mid[i]));
        r.push_back(sw * (sim_obs.v_mid[i] - data.v_mid[i]));
    }
    const double reg = std::sqrt(alpha * 0.5 * sc.space.length);  // L2 norm of a unit sine mode
    for (double c : modes_coeff) r.push_back(reg * c);
    return r;
}

// Solves the small symmetric positive definite normal system in place.
std::vector<double> solve_spd(std::vector<std::vector<double>> m, std::vector<double> rhs) {
    const size_t n = rhs.size();
    for (size_t k = 0; k < n; ++k) {
        const double piv = m[k][k];
        if (!(std::abs(piv) > 0.0)) throw SolverError("singular normal equations", 0);
        for (size_t i = k + 1; i < n; ++i) {
            const double f = m[i][k] / piv;
            for (size_t j = k; j < n; ++j) m[i][j] -= f * m[k][j];
            rhs[i] -= f * rhs[k];
        }
    }
    std::vector<double> x(n, 0.0);
    for (size_t k = n; k-- > 0;) {
        double acc = rhs[k];
        for (size_t j = k + 1; j < n; ++j) acc -= m[k][j] * x[j];
        x[k] = acc / m[k][k];
    }
    return x;
}

}  // namespace

LsqResult reconstruct_b_lsq(const Scenario& sc, const ObservationSet& obs, const LsqOptions& opt) {
    if (!(opt.alpha > 0.0)) throw ConfigError("lsq: regularization weight must be positive");
    if (opt.modes < 1 || opt.modes > 8) throw ConfigError("lsq: modes must be between 1 and 8");

    const size_t dim = static_cast<size_t>(opt.modes);
    std::vector<double> g(dim, 0.0);
    LsqResult result;

    std::vector<double> r = lsq_residual(sc, obs, g, opt.alpha);
    for (int iter = 0; iter < opt.max_iterations; ++iter) {
        // finite-difference Jacobian columns, one forward solve each
        const double step = 1e-6;
        std::vector<std::vector<double>> jac(dim);
        parallel_for(opt.modes, [&](int j) {
            std::vector<double> gp = g;
            gp[static_cast<size_t>(j)] += step;
            std::vector<double> rp = lsq_residual(sc, obs, gp, opt.alpha);
            jac[static_cast<size_t>(j)].resize(r.size());
            for (size_t i = 0; i < r.size(); ++i)
                jac[static_cast<size_t>(j)][i] = (rp[i] - r[i]) / step;
        });

        std::vector<double> grad(dim, 0.0);
        std::vector<std::vector<double>> normal(dim, std::vector<double>(dim, 0.0));
        for (size_t a = 0; a < dim; ++a) {
            for (size_t i = 0; i < r.size(); ++i) grad[a] += jac[a][i] * r[i];
            for (size_t b = a; b < dim; ++b) {
                double acc = 0.0;
                for (size_t i = 0; i < r.size(); ++i) acc += jac[a][i] * jac[b][i];
                normal[a][b] = normal[b][a] = acc;
            }
        }
        double grad_inf = 0.0;
        for (double v : grad) grad_inf = std::max(grad_inf, std::abs(v));
        if (grad_inf <= opt.gradient_tol) {
            result.converged = true;
            result.iterations = iter;
            break;
        }
        std::vector<double> delta = solve_spd(normal, grad);
        for (size_t a = 0; a < dim; ++a) g[a] -= delta[a];
        r = lsq_residual(sc, obs, g, opt.alpha);
        result.iterations = iter + 1;
    }

    double misfit = 0.0;
    for (double v : r) misfit += v * v;
    result.misfit = misfit;
    result.mode_coefficients = g;
    ScalarField b_hat = sc.reference_coeffs.b;
    for (size_t j = 0; j < dim; ++j) {
        const ScalarField mode = sine_mode_field(sc.space, static_cast<int>(j) + 1);
        for (int i = 0; i < sc.space.node_count; ++i) b_hat[i] += g[j] * mode[i];
    }
    result.b_hat = std::move(b_hat);
    return result;
}

void write_stability_csv(std::span<const StabilityReport> reports, const std::string& path) {
    CsvWriter csv(path);
    csv.header({"eps", "lhs", "obs_term", "lap_term", "u_term", "v_term", "ratio", "flag"});
    for (const StabilityReport& r : reports)
        csv.raw_row({format_double(r.eps), format_double(r.lhs), format_double(r.obs_term),
                     format_double(r.lap_term), format_double(r.u_term), format_double(r.v_term),
                     format_double(r.ratio), r.degenerate ? "degenerate" : "ok"});
}

}  // namespace clab
