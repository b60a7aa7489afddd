#include "clab/forward.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "clab/banded.hpp"
#include "clab/csv.hpp"
#include "clab/errors.hpp"
#include "clab/operators.hpp"

namespace clab {

namespace {

double sup_norm(const ScalarField& f) {
    double m = 0.0;
    for (double v : f.values) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace

CoefficientSet make_coefficients(ScalarField a, ScalarField b, ScalarField c, ScalarField d,
                                 double bound) {
    if (!(bound > 0.0)) throw ConfigError("coefficients: bound R must be positive");
    const int n = a.grid.node_count;
    if (b.grid.node_count != n || c.grid.node_count != n || d.grid.node_count != n)
        throw ConfigError("coefficients: fields must share one grid");
    for (const ScalarField* f : {&a, &b, &c, &d})
        if (sup_norm(*f) > bound)
            throw ConfigError("coefficients: sup norm exceeds the admissibility bound R");
    return {std::move(a), std::move(b), std::move(c), std::move(d), bound};
}

CoefficientSet with_b(const CoefficientSet& base, ScalarField b) {
    return make_coefficients(base.a, std::move(b), base.c, base.d, base.bound);
}

BoundaryData constant_boundary(const TimeGrid& time, double g, double h) {
    const size_t nk = static_cast<size_t>(time.node_count());
    return {std::vector<double>(nk, g), std::vector<double>(nk, g), std::vector<double>(nk, h),
            std::vector<double>(nk, h)};
}

BoundaryData zero_boundary(const TimeGrid& time) { return constant_boundary(time, 0.0, 0.0); }

namespace {

// Interleaved layout: unknown 2i is u at node i, 2i+1 is v at node i.
// The march solves the increment form M delta = dt (A w + source), with
// M = I - dt/2 A on interior rows, so exact steady states stay bitwise
// stationary (the right side vanishes identically).
void assemble_step_matrices(const CoefficientSet& coeffs, const SpatialGrid& space, double dt,
                            BandedMatrix& lhs, BandedMatrix& op) {
    const int n = space.node_count;
    const double inv_h2 = 1.0 / (space.spacing * space.spacing);
    const double half_dt = 0.5 * dt;
    for (int i = 1; i < n - 1; ++i) {
        const int ru = 2 * i;
        const int rv = 2 * i + 1;
        // u row: lap u + a u + b v
        op.at(ru, ru) = -2.0 * inv_h2 + coeffs.a[i];
        op.at(ru, ru - 2) = inv_h2;
        op.at(ru, ru + 2) = inv_h2;
        op.at(ru, rv) = coeffs.b[i];
        lhs.at(ru, ru) = 1.0 - half_dt * op.get(ru, ru);
        lhs.at(ru, ru - 2) = -half_dt * inv_h2;
        lhs.at(ru, ru + 2) = -half_dt * inv_h2;
        lhs.at(ru, rv) = -half_dt * coeffs.b[i];
        // v row: lap v + c u + d v
        op.at(rv, rv) = -2.0 * inv_h2 + coeffs.d[i];
        op.at(rv, rv - 2) = inv_h2;
        op.at(rv, rv + 2) = inv_h2;
        op.at(rv, ru) = coeffs.c[i];
        lhs.at(rv, rv) = 1.0 - half_dt * op.get(rv, rv);
        lhs.at(rv, rv - 2) = -half_dt * inv_h2;
        lhs.at(rv, rv + 2) = -half_dt * inv_h2;
        lhs.at(rv, ru) = -half_dt * coeffs.c[i];
    }
    // boundary rows: identity on the left, zero in the operator (prescribed)
    for (int r : {0, 1, 2 * (n - 1), 2 * (n - 1) + 1}) lhs.at(r, r) = 1.0;
}

void check_initial_compatibility(const ScalarField& u0, const ScalarField& v0,
                                 const BoundaryData& bc) {
    const int last = u0.grid.node_count - 1;
    const double tol = 1e-12;
    auto close = [tol](double a, double b) {
        return std::abs(a - b) <= tol * std::max(1.0, std::max(std::abs(a), std::abs(b)));
    };
    if (!close(u0[0], bc.u_left[0]) || !close(u0[last], bc.u_right[0]) ||
        !close(v0[0], bc.v_left[0]) || !close(v0[last], bc.v_right[0]))
        throw ConfigError("initial data incompatible with boundary data at t0");
}

}  // namespace

SystemTrajectory solve_forward(const CoefficientSet& coeffs, const BoundaryData& bc,
                               const ScalarField& u0, const ScalarField& v0,
                               const SourceTerm& source, const SpatialGrid& space,
                               const TimeGrid& time) {
    const int n = space.node_count;
    const int nt = time.step_count;
    if (coeffs.a.grid.node_count != n) throw ConfigError("solver: coefficient grid mismatch");
    if (u0.size() != n || v0.size() != n) throw ConfigError("solver: initial data grid mismatch");
    if (static_cast<int>(bc.u_left.size()) != nt + 1)
        throw ConfigError("solver: boundary data must carry one value per time node");
    if (source.field && (source.field->space.node_count != n ||
                         source.field->time.step_count != nt))
        throw ConfigError("solver: source grid mismatch");
    check_initial_compatibility(u0, v0, bc);

    const int dim = 2 * n;
    BandedMatrix lhs(dim, 2, 2), op(dim, 2, 2);
    assemble_step_matrices(coeffs, space, time.dt, lhs, op);
    const BandedLU lu(lhs);
    if (lu.singular() || lu.condition_estimate() >= 1e12)
        throw SolverError("time-step matrix singular or ill-conditioned", 0);

    SystemTrajectory traj;
    traj.u = make_spacetime_field(space, time);
    traj.v = make_spacetime_field(space, time);
    traj.coeffs = coeffs;

    std::vector<double> w(static_cast<size_t>(dim)), step_rhs(static_cast<size_t>(dim));
    for (int i = 0; i < n; ++i) {
        w[static_cast<size_t>(2 * i)] = u0[i];
        w[static_cast<size_t>(2 * i) + 1] = v0[i];
    }
    // pin the boundary entries of the initial slice to the prescribed traces
    w[0] = bc.u_left[0];
    w[1] = bc.v_left[0];
    w[static_cast<size_t>(2 * (n - 1))] = bc.u_right[0];
    w[static_cast<size_t>(2 * (n - 1)) + 1] = bc.v_right[0];
    for (int i = 0; i < n; ++i) {
        traj.u.at(0, i) = w[static_cast<size_t>(2 * i)];
        traj.v.at(0, i) = w[static_cast<size_t>(2 * i) + 1];
    }

    const double half_dt = 0.5 * time.dt;
    for (int k = 0; k < nt; ++k) {
        op.multiply(w, step_rhs);
        for (int i = 1; i < n - 1; ++i) {
            double rhs = time.dt * step_rhs[static_cast<size_t>(2 * i)];
            if (source.field)
                rhs += half_dt * (source.field->at(k, i) + source.field->at(k + 1, i));
            step_rhs[static_cast<size_t>(2 * i)] = rhs;
            step_rhs[static_cast<size_t>(2 * i) + 1] *= time.dt;
        }
        const size_t kp = static_cast<size_t>(k) + 1;
        step_rhs[0] = bc.u_left[kp] - w[0];
        step_rhs[1] = bc.v_left[kp] - w[1];
        step_rhs[static_cast<size_t>(2 * (n - 1))] =
            bc.u_right[kp] - w[static_cast<size_t>(2 * (n - 1))];
        step_rhs[static_cast<size_t>(2 * (n - 1)) + 1] =
            bc.v_right[kp] - w[static_cast<size_t>(2 * (n - 1)) + 1];
        lu.solve(step_rhs);
        for (size_t j = 0; j < w.size(); ++j) {
            w[j] += step_rhs[j];
            if (!std::isfinite(w[j])) throw SolverError("non-finite solution slice", k + 1);
        }
        // boundary unknowns are prescribed; keep them bitwise on the traces
        w[0] = bc.u_left[kp];
        w[1] = bc.v_left[kp];
        w[static_cast<size_t>(2 * (n - 1))] = bc.u_right[kp];
        w[static_cast<size_t>(2 * (n - 1)) + 1] = bc.v_right[kp];
        for (int i = 0; i < n; ++i) {
            traj.u.at(k + 1, i) = w[static_cast<size_t>(2 * i)];
            traj.v.at(k + 1, i) = w[static_cast<size_t>(2 * i) + 1];
        }
    }
    return traj;
}

SystemTrajectory solve_difference_system(const CoefficientSet& coeffs, const ScalarField& gamma,
                                         const SystemTrajectory& reference, const ScalarField& y0,
                                         const ScalarField& z0) {
    const SpaceTimeField dtv = time_derivative(reference.v);
    SpaceTimeField src = make_spacetime_field(dtv.space, dtv.time);
    for (int k = 0; k <= dtv.time.step_count; ++k)
        for (int i = 0; i < dtv.space.node_count; ++i) src.at(k, i) = gamma[i] * dtv.at(k, i);
    SourceTerm source;
    source.field = std::move(src);
    return solve_forward(coeffs, zero_boundary(dtv.time), y0, z0, source, dtv.space, dtv.time);
}

std::pair<SystemTrajectory, SystemTrajectory> solve_split(const CoefficientSet& coeffs,
                                                          const ScalarField& gamma,
                                                          const SystemTrajectory& reference,
                                                          const ScalarField& y0,
                                                          const ScalarField& z0) {
    const ScalarField zero = make_field(y0.grid);
    SystemTrajectory driven = solve_difference_system(coeffs, gamma, reference, zero, zero);
    SystemTrajectory free_part =
        solve_forward(coeffs, zero_boundary(reference.v.time), y0, z0, SourceTerm::none(),
                      reference.v.space, reference.v.time);
    return {std::move(driven), std::move(free_part)};
}

PositivityReport check_positivity(const SystemTrajectory& traj, double r) {
    PositivityReport rep;
    rep.floor = r;
    const int mid = traj.v.time.midpoint_index();
    double min_mid = traj.v.at(mid, 0);
    for (int i = 0; i < traj.v.space.node_count; ++i)
        min_mid = std::min(min_mid, traj.v.at(mid, i));
    double min_all = traj.v.values[0];
    for (double v : traj.v.values) min_all = std::min(min_all, v);
    rep.min_v_at_midpoint = min_mid;
    rep.min_v_over_grid = min_all;
    rep.pass = min_mid >= r * (1.0 - 1e-6);
    return rep;
}

AssumptionReport check_assumptions(const CoefficientSet& reference_coeffs,
                                   const ScalarField& u0_ref, const ScalarField& v0_ref,
                                   const BoundaryData& bc, double r, double c0) {
    AssumptionReport rep;
    auto all_of_field = [](const ScalarField& f, auto pred) {
        return std::all_of(f.values.begin(), f.values.end(), pred);
    };
    auto all_of_trace = [](const std::vector<double>& t, auto pred) {
        return std::all_of(t.begin(), t.end(), pred);
    };
    rep.b_ref_nonneg = all_of_field(reference_coeffs.b, [](double v) { return v >= 0.0; });
    rep.b_ref_strictly_positive =
        all_of_field(reference_coeffs.b, [](double v) { return v > 0.0; });
    rep.c_at_least_c0 =
        all_of_field(reference_coeffs.c, [c0](double v) { return v >= c0; });
    rep.c_plus_dr_nonneg = true;
    for (int i = 0; i < reference_coeffs.c.size(); ++i)
        if (reference_coeffs.c[i] + reference_coeffs.d[i] * r < 0.0) rep.c_plus_dr_nonneg = false;
    rep.u0_nonneg = all_of_field(u0_ref, [](double v) { return v >= 0.0; });
    rep.v0_at_least_r = all_of_field(v0_ref, [r](double v) { return v >= r; });
    rep.g_nonneg = all_of_trace(bc.u_left, [](double v) { return v >= 0.0; }) &&
                   all_of_trace(bc.u_right, [](double v) { return v >= 0.0; });
    rep.h_at_least_r = all_of_trace(bc.v_left, [r](double v) { return v >= r; }) &&
                       all_of_trace(bc.v_right, [r](double v) { return v >= r; });
    const double bound = reference_coeffs.bound;
    rep.coefficients_within_bound =
        sup_norm(reference_coeffs.a) <= bound && sup_norm(reference_coeffs.b) <= bound &&
        sup_norm(reference_coeffs.c) <= bound && sup_norm(reference_coeffs.d) <= bound;

    struct Named {
        const char* name;
        bool ok;
    };
    const Named checks[] = {{"b_ref >= 0", rep.b_ref_nonneg},
                            {"c >= c0", rep.c_at_least_c0},
                            {"c + d r >= 0", rep.c_plus_dr_nonneg},
                            {"u0_ref >= 0", rep.u0_nonneg},
                            {"v0_ref >= r", rep.v0_at_least_r},
                            {"g >= 0", rep.g_nonneg},
                            {"h >= r", rep.h_at_least_r},
                            {"coefficients within R", rep.coefficients_within_bound}};
    rep.pass = true;
    for (const auto& c : checks) {
        if (!c.ok) {
            rep.pass = false;
            if (rep.first_violation.empty()) rep.first_violation = c.name;
        }
    }
    return rep;
}

void write_trajectory_csv(const SystemTrajectory& traj, const std::string& path) {
    CsvWriter csv(path);
    csv.header({"x", "t", "u", "v"});
    for (int k = 0; k <= traj.u.time.step_count; ++k)
        for (int i = 0; i < traj.u.space.node_count; ++i)
            csv.row({traj.u.space.node(i), traj.u.time.node(k), traj.u.at(k, i), traj.v.at(k, i)});
}

namespace {
constexpr char kTrajectoryMagic[8] = {'R', 'D', 'T', 'R', 'A', 'J', '1', '\0'};
static_assert(std::endian::native == std::endian::little,
              "trajectory dumps are defined little-endian");
}  // namespace

void write_trajectory_binary(const SystemTrajectory& traj, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open output file: " + path);
    out.write(kTrajectoryMagic, sizeof(kTrajectoryMagic));
    const uint64_t n = static_cast<uint64_t>(traj.u.space.node_count);
    const uint64_t nt = static_cast<uint64_t>(traj.u.time.step_count);
    const double dims[3] = {traj.u.space.length, traj.u.time.t_begin, traj.u.time.t_end};
    out.write(reinterpret_cast<const char*>(&n), sizeof(n));
    out.write(reinterpret_cast<const char*>(&nt), sizeof(nt));
    out.write(reinterpret_cast<const char*>(dims), sizeof(dims));
    out.write(reinterpret_cast<const char*>(traj.u.values.data()),
              static_cast<std::streamsize>(traj.u.values.size() * sizeof(double)));
    out.write(reinterpret_cast<const char*>(traj.v.values.data()),
              static_cast<std::streamsize>(traj.v.values.size() * sizeof(double)));
}

void read_trajectory_binary(const std::string& path, SpaceTimeField& u, SpaceTimeField& v) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open trajectory file: " + path);
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kTrajectoryMagic, sizeof(magic)) != 0)
        throw ConfigError("not a trajectory dump: " + path);
    uint64_t n = 0, nt = 0;
    double dims[3] = {0, 0, 0};
    in.read(reinterpret_cast<char*>(&n), sizeof(n));
    in.read(reinterpret_cast<char*>(&nt), sizeof(nt));
    in.read(reinterpret_cast<char*>(dims), sizeof(dims));
    const SpatialGrid space = build_spatial_grid(dims[0], static_cast<int>(n));
    const TimeGrid time = build_time_grid(dims[1], dims[2], static_cast<int>(nt));
    u = make_spacetime_field(space, time);
    v = make_spacetime_field(space, time);
    in.read(reinterpret_cast<char*>(u.values.data()),
            static_cast<std::streamsize>(u.values.size() * sizeof(double)));
    in.read(reinterpret_cast<char*>(v.values.data()),
            static_cast<std::streamsize>(v.values.size() * sizeof(double)));
    if (!in) throw ConfigError("truncated trajectory dump: " + path);
}

}  // namespace clab
