#include "clab/stability_ic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "clab/csv.hpp"
#include "clab/errors.hpp"
#include "clab/operators.hpp"
#include "clab/parallel.hpp"

namespace clab {

namespace {

constexpr double kTinyFloor = 1e-300;

double slice_l2_sq(const SystemTrajectory& traj, int k) {
    return l2_norm_sq(traj.u.snapshot(k)) + l2_norm_sq(traj.v.snapshot(k));
}

}  // namespace

GronwallReport lemma41_check(const Scenario& sc, const ScalarField& gamma) {
    GronwallReport rep;
    rep.gamma_norm_sq = l2_norm_sq(gamma);
    if (rep.gamma_norm_sq < kTinyFloor) {
        rep.degenerate = true;
        rep.empirical_constant = std::numeric_limits<double>::quiet_NaN();
        return rep;
    }
    const SystemTrajectory reference = solve_reference(sc);
    ScalarField b = sc.reference_coeffs.b;
    for (int i = 0; i < b.size(); ++i) b[i] += gamma[i];
    const CoefficientSet coeffs = with_b(sc.reference_coeffs, std::move(b));
    const ScalarField zero = make_field(sc.space);
    const SystemTrajectory driven = solve_difference_system(coeffs, gamma, reference, zero, zero);

    double best = 0.0;
    for (int k = 0; k <= driven.u.time.midpoint_index(); ++k)
        best = std::max(best, slice_l2_sq(driven, k) / rep.gamma_norm_sq);
    rep.empirical_constant = best;
    return rep;
}

double coupling_sup_norm(const CoefficientSet& coeffs) {
    double best = 0.0;
    for (int i = 0; i < coeffs.a.size(); ++i) {
        // spectral norm of [[a, b], [c, d]] via the singular-value formula
        const double a = coeffs.a[i], b = coeffs.b[i], c = coeffs.c[i], d = coeffs.d[i];
        const double t1 = a * a + b * b + c * c + d * d;
        const double det = a * d - b * c;
        const double gap = std::sqrt(std::max(0.0, t1 * t1 - 4.0 * det * det));
        best = std::max(best, std::sqrt(0.5 * (t1 + gap)));
    }
    return best;
}

double convexity_profile(double t, double c, double t_begin, double t_mid) {
    // (e^{-c t0} - e^{-c t}) / (e^{-c t0} - e^{-c T'}) after factoring e^{-c t0};
    // the c -> 0 limit is the linear chord.
    const double span = t_mid - t_begin;
    if (std::abs(c) * span < 1e-12) return (t - t_begin) / span;
    return std::expm1(-c * (t - t_begin)) / std::expm1(-c * span);
}

namespace {

LogConvexityRecord logconvexity_from_trajectory(const Scenario& sc,
                                                const SystemTrajectory& data_part,
                                                std::span<const double> c_scan) {
    if (c_scan.empty()) throw ConfigError("log-convexity: rate-constant scan must be nonempty");
    const int mid = data_part.u.time.midpoint_index();
    LogConvexityRecord rec;
    rec.t.resize(static_cast<size_t>(mid) + 1);
    rec.wnorm_sq.resize(static_cast<size_t>(mid) + 1);
    for (int k = 0; k <= mid; ++k) {
        rec.t[static_cast<size_t>(k)] = data_part.u.time.node(k);
        rec.wnorm_sq[static_cast<size_t>(k)] = slice_l2_sq(data_part, k);
    }
    rec.bound_m = *std::max_element(rec.wnorm_sq.begin(), rec.wnorm_sq.end());
    const double w_mid = rec.wnorm_sq[static_cast<size_t>(mid)];
    if (w_mid < kTinyFloor || rec.bound_m < kTinyFloor) {
        rec.degenerate = true;
        rec.pass = true;  // 0 <= 0 holds trivially
        return rec;
    }

    const double t0 = sc.time.t_begin;
    const double t_mid = sc.time.midpoint();
    const double log_m = std::log(rec.bound_m);
    const double log_w_mid = std::log(w_mid);

    double best_c = c_scan[0];
    double best_c1 = std::numeric_limits<double>::infinity();
    for (double c : c_scan) {
        double needed = 1.0;
        for (int k = 0; k <= mid; ++k) {
            const double mu = convexity_profile(rec.t[static_cast<size_t>(k)], c, t0, t_mid);
            const double bound = std::exp((1.0 - mu) * log_m + mu * log_w_mid);
            needed = std::max(needed, rec.wnorm_sq[static_cast<size_t>(k)] / bound);
        }
        if (needed < best_c1) {
            best_c1 = needed;
            best_c = c;
        }
    }
    rec.scan_constant = best_c;
    rec.c1 = best_c1;
    rec.pass = best_c1 <= 1e6;

    rec.mu.resize(rec.t.size());
    rec.rhs.resize(rec.t.size());
    rec.margin.resize(rec.t.size());
    for (size_t k = 0; k < rec.t.size(); ++k) {
        rec.mu[k] = convexity_profile(rec.t[k], best_c, t0, t_mid);
        rec.rhs[k] = best_c1 * std::exp((1.0 - rec.mu[k]) * log_m + rec.mu[k] * log_w_mid);
        rec.margin[k] = rec.rhs[k] - rec.wnorm_sq[k];
    }
    return rec;
}

}  // namespace

LogConvexityRecord logconvexity_check(const Scenario& sc, const ScalarField& y0,
                                      const ScalarField& z0, std::span<const double> c_scan) {
    const SystemTrajectory data_part =
        solve_forward(sc.reference_coeffs, zero_boundary(sc.time), y0, z0, SourceTerm::none(),
                      sc.space, sc.time);
    return logconvexity_from_trajectory(sc, data_part, c_scan);
}

LogConvexityRecord logconvexity_check_pair(const Scenario& sc, const ScalarField& gamma,
                                           const ScalarField& du0, const ScalarField& dv0,
                                           std::span<const double> c_scan) {
    const SystemTrajectory reference = solve_reference(sc);
    const SystemTrajectory perturbed = solve_perturbed(sc, gamma, du0, dv0);
    auto [y0, z0] = difference_initial_data(sc, gamma, perturbed, reference);
    auto [driven, data_part] = solve_split(perturbed.coeffs, gamma, reference, y0, z0);
    (void)driven;  // only the data-driven part enters the convexity bound
    return logconvexity_from_trajectory(sc, data_part, c_scan);
}

namespace {

ICStabilityRecord make_ic_record(double eps, double data_error, double ic_error) {
    ICStabilityRecord rec;
    rec.eps = eps;
    rec.data_error = data_error;
    rec.ic_error = ic_error;
    if (data_error < kTinyFloor) {
        rec.flag = ICRecordFlag::DegenerateZero;
    } else if (data_error >= 1.0) {
        rec.flag = ICRecordFlag::OutOfRange;
    } else {
        rec.flag = ICRecordFlag::Ok;
        rec.product = ic_error * std::abs(std::log(data_error));
    }
    return rec;
}

}  // namespace

double h2_norm_sq(const ScalarField& f) {
    ScalarField lap = discrete_laplacian(f);
    lap[0] = 0.0;
    lap[f.grid.node_count - 1] = 0.0;
    return l2_norm_sq(f) + l2_norm_sq(lap);
}

std::vector<ICStabilityRecord> ic_stability_experiment(const Scenario& sc,
                                                       std::span<const double> eps_list,
                                                       const ScalarField& gamma_shape,
                                                       const ScalarField& du0_shape,
                                                       const ScalarField& dv0_shape) {
    const AssumptionReport rep = check_assumptions(sc);
    if (!rep.pass) throw PreconditionError("base scenario rejected: " + rep.first_violation);
    const SystemTrajectory reference = solve_reference(sc);
    const SpaceTimeField dt_v_ref = time_derivative(reference.v);
    const int mid = reference.u.time.midpoint_index();

    std::vector<ICStabilityRecord> out(eps_list.size());
    parallel_for(static_cast<int>(eps_list.size()), [&](int idx) {
        const double eps = eps_list[static_cast<size_t>(idx)];
        ScalarField gamma = make_field(sc.space), du0 = make_field(sc.space),
                    dv0 = make_field(sc.space);
        for (int i = 0; i < sc.space.node_count; ++i) {
            gamma[i] = eps * gamma_shape[i];
            du0[i] = eps * du0_shape[i];
            dv0[i] = eps * dv0_shape[i];
        }
        const SystemTrajectory perturbed = solve_perturbed(sc, gamma, du0, dv0);

        const SpaceTimeField dt_v = time_derivative(perturbed.v);
        SpaceTimeField sq = make_spacetime_field(sc.space, sc.time);
        for (size_t i = 0; i < sq.values.size(); ++i) {
            const double d = dt_v.values[i] - dt_v_ref.values[i];
            sq.values[i] = d * d;
        }
        const double obs_term = integrate_spacetime(sq, sc.geometry.omega);

        ScalarField cap_u = make_field(sc.space), cap_v = make_field(sc.space);
        for (int i = 0; i < sc.space.node_count; ++i) {
            cap_u[i] = perturbed.u.at(mid, i) - reference.u.at(mid, i);
            cap_v[i] = perturbed.v.at(mid, i) - reference.v.at(mid, i);
        }
        const double data_error = obs_term + h2_norm_sq(cap_u) + h2_norm_sq(cap_v);
        const double ic_error = l2_norm_sq(du0) + l2_norm_sq(dv0);
        out[static_cast<size_t>(idx)] = make_ic_record(eps, data_error, ic_error);
    });
    return out;
}

double max_product(std::span<const ICStabilityRecord> records) {
    double best = 0.0;
    for (const ICStabilityRecord& r : records)
        if (r.flag == ICRecordFlag::Ok) best = std::max(best, r.product);
    return best;
}

double initial_reconstruction_error(const Scenario& sc, const ScalarField& gamma,
                                    const ScalarField& du0, const ScalarField& dv0) {
    const SystemTrajectory reference = solve_reference(sc);
    const SystemTrajectory perturbed = solve_perturbed(sc, gamma, du0, dv0);
    const int mid = reference.u.time.midpoint_index();
    const int n = sc.space.node_count;
    const double dt = sc.time.dt;

    SpaceTimeField cap_u = make_spacetime_field(sc.space, sc.time);
    for (size_t i = 0; i < cap_u.values.size(); ++i)
        cap_u.values[i] = perturbed.u.values[i] - reference.u.values[i];
    const SpaceTimeField y = time_derivative(cap_u);

    ScalarField reconstructed = make_field(sc.space);
    for (int i = 0; i < n; ++i) {
        double integral = 0.0;
        for (int k = 0; k < mid; ++k) integral += 0.5 * dt * (y.at(k, i) + y.at(k + 1, i));
        reconstructed[i] = cap_u.at(mid, i) - integral;
    }
    ScalarField err = make_field(sc.space);
    for (int i = 0; i < n; ++i) err[i] = reconstructed[i] - cap_u.at(0, i);
    const double base = std::sqrt(l2_norm_sq(du0));
    if (base == 0.0) return std::sqrt(l2_norm_sq(err));
    return std::sqrt(l2_norm_sq(err)) / base;
}

void write_ic_records_csv(std::span<const ICStabilityRecord> records, const std::string& path) {
    CsvWriter csv(path);
    csv.header({"eps", "E", "ic_error", "product", "flag"});
    for (const ICStabilityRecord& r : records) {
        const char* flag = r.flag == ICRecordFlag::Ok
                               ? "ok"
                               : (r.flag == ICRecordFlag::DegenerateZero ? "degenerate" : "out_of_range");
        csv.raw_row({format_double(r.eps), format_double(r.data_error), format_double(r.ic_error),
                     format_double(r.product), flag});
    }
}

void write_logconvexity_csv(const LogConvexityRecord& rec, const std::string& path) {
    CsvWriter csv(path);
    csv.header({"t", "mu", "lhs", "rhs", "margin"});
    for (size_t k = 0; k < rec.t.size(); ++k)
        csv.row({rec.t[k], rec.mu.empty() ? 0.0 : rec.mu[k], rec.wnorm_sq[k],
                 rec.rhs.empty() ? 0.0 : rec.rhs[k], rec.margin.empty() ? 0.0 : rec.margin[k]});
}

}  // namespace clab
