#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>

#include "clab/errors.hpp"
#include "clab/forward.hpp"
#include "clab/operators.hpp"

using namespace clab;

namespace {

CoefficientSet constant_coeffs(const SpatialGrid& g, double a, double b, double c, double d,
                               double bound = 10.0) {
    return make_coefficients(make_field(g, a), make_field(g, b), make_field(g, c),
                             make_field(g, d), bound);
}

// per-slice sup-norm relative error against a closed-form reference
double max_relative_error(const SpaceTimeField& got,
                          const std::function<double(double, double)>& exact) {
    double worst = 0.0;
    for (int k = 0; k <= got.time.step_count; ++k) {
        double err = 0.0, scale = 0.0;
        for (int i = 0; i < got.space.node_count; ++i) {
            const double e = exact(got.space.node(i), got.time.node(k));
            err = std::max(err, std::abs(got.at(k, i) - e));
            scale = std::max(scale, std::abs(e));
        }
        if (scale > 0.0) worst = std::max(worst, err / scale);
    }
    return worst;
}

}  // namespace

TEST_CASE("zero data produce the zero trajectory") {
    const SpatialGrid g = build_spatial_grid(1.0, 51);
    const TimeGrid t = build_time_grid(0.0, 0.5, 32);
    const CoefficientSet coeffs = constant_coeffs(g, 0, 0, 0, 0);
    const SystemTrajectory traj = solve_forward(coeffs, zero_boundary(t), make_field(g),
                                                make_field(g), SourceTerm::none(), g, t);
    for (double v : traj.u.values) CHECK(v == 0.0);
    for (double v : traj.v.values) CHECK(v == 0.0);
}

TEST_CASE("decoupled heat mode decays at the separation-of-variables rate") {
    const SpatialGrid g = build_spatial_grid(1.0, 201);
    const TimeGrid t = build_time_grid(0.0, 0.5, 400);
    const CoefficientSet coeffs = constant_coeffs(g, 0, 0, 0, 0);
    const SystemTrajectory traj = solve_forward(coeffs, zero_boundary(t), sine_mode_field(g, 1),
                                                make_field(g), SourceTerm::none(), g, t);
    const double rel = max_relative_error(traj.u, [](double x, double tt) {
        return std::exp(-M_PI * M_PI * tt) * std::sin(M_PI * x);
    });
    CHECK(rel <= 1e-3);
    for (double v : traj.v.values) CHECK(v == 0.0);
}

TEST_CASE("symmetric coupling closed form") {
    const double kappa = 0.8;
    const SpatialGrid g = build_spatial_grid(1.0, 201);
    const TimeGrid t = build_time_grid(0.0, 0.5, 400);
    const CoefficientSet coeffs = constant_coeffs(g, 0, kappa, kappa, 0);
    const ScalarField mode = sine_mode_field(g, 1);
    const SystemTrajectory traj =
        solve_forward(coeffs, zero_boundary(t), mode, mode, SourceTerm::none(), g, t);
    auto exact = [kappa](double x, double tt) {
        return std::exp((kappa - M_PI * M_PI) * tt) * std::sin(M_PI * x);
    };
    CHECK(max_relative_error(traj.u, exact) <= 1e-3);
    CHECK(max_relative_error(traj.v, exact) <= 1e-3);
}

TEST_CASE("halving both mesh sizes improves the oracle error at second order") {
    auto error_at = [](int n, int nt) {
        const SpatialGrid g = build_spatial_grid(1.0, n);
        const TimeGrid t = build_time_grid(0.0, 0.5, nt);
        const CoefficientSet coeffs = constant_coeffs(g, 0, 0, 0, 0);
        const SystemTrajectory traj = solve_forward(coeffs, zero_boundary(t), sine_mode_field(g, 1),
                                                    make_field(g), SourceTerm::none(), g, t);
        return max_relative_error(traj.u, [](double x, double tt) {
            return std::exp(-M_PI * M_PI * tt) * std::sin(M_PI * x);
        });
    };
    const double coarse = error_at(101, 100);
    const double fine = error_at(201, 200);
    CHECK(coarse / fine >= 3.5);
}

TEST_CASE("superposition holds to solver roundoff") {
    const SpatialGrid g = build_spatial_grid(1.0, 101);
    const TimeGrid t = build_time_grid(0.0, 1.0, 64);
    const CoefficientSet coeffs = constant_coeffs(g, 0.3, 0.5, 0.2, -0.1);
    const ScalarField mode1 = sine_mode_field(g, 1);
    const ScalarField mode2 = sine_mode_field(g, 2, 0.25);
    ScalarField sum = make_field(g);
    for (int i = 0; i < g.node_count; ++i) sum[i] = mode1[i] + mode2[i];

    const SystemTrajectory t1 = solve_forward(coeffs, zero_boundary(t), mode1, make_field(g),
                                              SourceTerm::none(), g, t);
    const SystemTrajectory t2 = solve_forward(coeffs, zero_boundary(t), mode2, make_field(g),
                                              SourceTerm::none(), g, t);
    const SystemTrajectory ts = solve_forward(coeffs, zero_boundary(t), sum, make_field(g),
                                              SourceTerm::none(), g, t);
    for (size_t i = 0; i < ts.u.values.size(); ++i) {
        CHECK(std::abs(ts.u.values[i] - (t1.u.values[i] + t2.u.values[i])) <= 1e-12);
        CHECK(std::abs(ts.v.values[i] - (t1.v.values[i] + t2.v.values[i])) <= 1e-12);
    }
}

TEST_CASE("discrete L2 norm of the decoupled solution is nonincreasing") {
    const SpatialGrid g = build_spatial_grid(1.0, 101);
    const TimeGrid t = build_time_grid(0.0, 1.0, 128);
    const CoefficientSet coeffs = constant_coeffs(g, 0, 0, 0, 0);
    ScalarField mix = make_field(g);
    const ScalarField m1 = sine_mode_field(g, 1);
    const ScalarField m3 = sine_mode_field(g, 3, 0.5);
    for (int i = 0; i < g.node_count; ++i) mix[i] = m1[i] + m3[i];
    const SystemTrajectory traj = solve_forward(coeffs, zero_boundary(t), mix, make_field(g),
                                                SourceTerm::none(), g, t);
    double prev = l2_norm_sq(traj.u.snapshot(0));
    for (int k = 1; k <= t.step_count; ++k) {
        const double cur = l2_norm_sq(traj.u.snapshot(k));
        CHECK(cur <= prev * (1.0 + 1e-12));
        prev = cur;
    }
}

TEST_CASE("nonnegative scenarios stay nonnegative at the default step") {
    const SpatialGrid g = build_spatial_grid(1.0, 201);
    const TimeGrid t = build_time_grid(0.0, 2.0, 400);
    const CoefficientSet coeffs = constant_coeffs(g, 0.0, 1.0, 1.0, 0.0);
    const BoundaryData bc = constant_boundary(t, 0.0, 1.0);
    ScalarField v0 = make_field(g, 1.0);
    const ScalarField bump = sine_mode_field(g, 1, 0.5);
    for (int i = 0; i < g.node_count; ++i) v0[i] += bump[i];
    const SystemTrajectory traj =
        solve_forward(coeffs, bc, make_field(g), v0, SourceTerm::none(), g, t);
    for (double v : traj.u.values) CHECK(v >= -1e-9);
    for (double v : traj.v.values) CHECK(v >= -1e-9);
}

TEST_CASE("difference system") {
    const SpatialGrid g = build_spatial_grid(1.0, 201);
    const TimeGrid t = build_time_grid(0.0, 1.0, 400);
    const CoefficientSet ref_coeffs = constant_coeffs(g, 0.0, 1.0, 1.0, 0.0);
    const BoundaryData bc = constant_boundary(t, 0.0, 1.0);
    ScalarField v0 = make_field(g, 1.0);
    const ScalarField bump = sine_mode_field(g, 1, 0.5);
    for (int i = 0; i < g.node_count; ++i) v0[i] += bump[i];
    const SystemTrajectory reference =
        solve_forward(ref_coeffs, bc, make_field(g), v0, SourceTerm::none(), g, t);

    SUBCASE("zero gamma and zero data give the zero solution") {
        const ScalarField zero = make_field(g);
        const SystemTrajectory diff =
            solve_difference_system(ref_coeffs, zero, reference, zero, zero);
        for (double v : diff.u.values) CHECK(v == 0.0);
        for (double v : diff.v.values) CHECK(v == 0.0);
    }
    SUBCASE("matches the two-solve derivative of the difference") {
        const ScalarField gamma = sine_mode_field(g, 1, 0.05);
        ScalarField b_pert = ref_coeffs.b;
        for (int i = 0; i < g.node_count; ++i) b_pert[i] += gamma[i];
        const CoefficientSet pert_coeffs = with_b(ref_coeffs, b_pert);
        const SystemTrajectory perturbed =
            solve_forward(pert_coeffs, bc, make_field(g), v0, SourceTerm::none(), g, t);

        ScalarField y0 = make_field(g);
        for (int i = 1; i < g.node_count - 1; ++i) y0[i] = gamma[i] * reference.v.at(0, i);
        const ScalarField z0 = make_field(g);
        const SystemTrajectory diff =
            solve_difference_system(pert_coeffs, gamma, reference, y0, z0);

        SpaceTimeField cap_u = make_spacetime_field(g, t);
        for (size_t i = 0; i < cap_u.values.size(); ++i)
            cap_u.values[i] = perturbed.u.values[i] - reference.u.values[i];
        const SpaceTimeField y_data = time_derivative(cap_u);

        double num = 0.0, den = 0.0;
        for (size_t i = 0; i < y_data.values.size(); ++i) {
            num = std::max(num, std::abs(diff.u.values[i] - y_data.values[i]));
            den = std::max(den, std::abs(y_data.values[i]));
        }
        CHECK(num <= 2e-3 * den);
    }
    SUBCASE("stationary reference gives a source-free cascade") {
        const CoefficientSet heat = constant_coeffs(g, 0.0, 0.0, 0.0, 0.0);
        const SystemTrajectory stationary = solve_forward(
            heat, constant_boundary(t, 0.0, 1.0), make_field(g), make_field(g, 1.0),
            SourceTerm::none(), g, t);
        const ScalarField gamma = sine_mode_field(g, 1);
        const ScalarField zero = make_field(g);
        const SystemTrajectory diff = solve_difference_system(heat, gamma, stationary, zero, zero);
        for (double v : diff.u.values) CHECK(v == 0.0);
        for (double v : diff.v.values) CHECK(v == 0.0);
    }
}

TEST_CASE("split solves superpose to the direct difference solve") {
    const SpatialGrid g = build_spatial_grid(1.0, 101);
    const TimeGrid t = build_time_grid(0.0, 1.0, 128);
    const CoefficientSet coeffs = constant_coeffs(g, 0.0, 1.0, 1.0, 0.0);
    const BoundaryData bc = constant_boundary(t, 0.0, 1.0);
    ScalarField v0 = make_field(g, 1.0);
    const ScalarField bump = sine_mode_field(g, 1, 0.5);
    for (int i = 0; i < g.node_count; ++i) v0[i] += bump[i];
    const SystemTrajectory reference =
        solve_forward(coeffs, bc, make_field(g), v0, SourceTerm::none(), g, t);

    const ScalarField gamma = sine_mode_field(g, 2, 0.1);
    ScalarField y0 = make_field(g);
    for (int i = 1; i < g.node_count - 1; ++i) y0[i] = gamma[i] * reference.v.at(0, i);
    const ScalarField z0 = sine_mode_field(g, 1, 0.01);

    const SystemTrajectory direct = solve_difference_system(coeffs, gamma, reference, y0, z0);
    auto [driven, data_part] = solve_split(coeffs, gamma, reference, y0, z0);

    SUBCASE("zero gamma kills the driven part") {
        const ScalarField zg = make_field(g);
        auto [d0, f0] = solve_split(coeffs, zg, reference, y0, z0);
        for (double v : d0.u.values) CHECK(v == 0.0);
        for (double v : d0.v.values) CHECK(v == 0.0);
        (void)f0;
    }
    SUBCASE("zero initial data kills the data part") {
        const ScalarField zf = make_field(g);
        auto [d1, f1] = solve_split(coeffs, gamma, reference, zf, zf);
        for (double v : f1.u.values) CHECK(v == 0.0);
        for (double v : f1.v.values) CHECK(v == 0.0);
        (void)d1;
    }
    double scale = 0.0;
    for (double v : direct.u.values) scale = std::max(scale, std::abs(v));
    for (size_t i = 0; i < direct.u.values.size(); ++i) {
        CHECK(std::abs(driven.u.values[i] + data_part.u.values[i] - direct.u.values[i]) <=
              1e-12 * std::max(1.0, scale));
        CHECK(std::abs(driven.v.values[i] + data_part.v.values[i] - direct.v.values[i]) <=
              1e-12 * std::max(1.0, scale));
    }
}

TEST_CASE("positivity report") {
    const SpatialGrid g = build_spatial_grid(1.0, 201);
    const TimeGrid t = build_time_grid(0.0, 1.0, 200);
    const double r = 1.0;
    SUBCASE("constant solution sits exactly at the floor") {
        const CoefficientSet coeffs = constant_coeffs(g, 0, 0, 0, 0);
        const SystemTrajectory traj =
            solve_forward(coeffs, constant_boundary(t, 0.0, r), make_field(g), make_field(g, r),
                          SourceTerm::none(), g, t);
        const PositivityReport rep = check_positivity(traj, r);
        CHECK(rep.pass);
        CHECK(rep.min_v_at_midpoint == doctest::Approx(r).epsilon(1e-12));
    }
    SUBCASE("decaying bump stays above the floor") {
        const CoefficientSet coeffs = constant_coeffs(g, 0, 0, 0, 0);
        ScalarField v0 = make_field(g, r);
        const ScalarField bump = sine_mode_field(g, 1);
        for (int i = 0; i < g.node_count; ++i) v0[i] += bump[i];
        const SystemTrajectory traj = solve_forward(coeffs, constant_boundary(t, 0.0, r),
                                                    make_field(g), v0, SourceTerm::none(), g, t);
        const PositivityReport rep = check_positivity(traj, r);
        CHECK(rep.pass);
        const int mid = t.midpoint_index();
        const double expected =
            r + std::exp(-M_PI * M_PI * t.midpoint()) * std::sin(M_PI * g.node(g.node_count / 4));
        CHECK(traj.v.at(mid, g.node_count / 4) == doctest::Approx(expected).epsilon(1e-3));
    }
    SUBCASE("initial data below the floor is reported") {
        const CoefficientSet coeffs = constant_coeffs(g, 0, 0, 0, 0);
        const SystemTrajectory traj =
            solve_forward(coeffs, constant_boundary(t, 0.0, r / 2), make_field(g),
                          make_field(g, r / 2), SourceTerm::none(), g, t);
        const PositivityReport rep = check_positivity(traj, r);
        CHECK_FALSE(rep.pass);
        CHECK(rep.min_v_at_midpoint < r);
    }
}

TEST_CASE("assumption checks") {
    const SpatialGrid g = build_spatial_grid(1.0, 51);
    const TimeGrid t = build_time_grid(0.0, 1.0, 32);
    SUBCASE("constant admissible scenario passes") {
        const CoefficientSet coeffs = constant_coeffs(g, 0.0, 1.0, 1.0, 0.0);
        const AssumptionReport rep = check_assumptions(coeffs, make_field(g), make_field(g, 1.0),
                                                       constant_boundary(t, 0.0, 1.0), 1.0, 1.0);
        CHECK(rep.pass);
        CHECK(rep.b_ref_strictly_positive);
    }
    SUBCASE("violated reaction balance is named") {
        const CoefficientSet coeffs = constant_coeffs(g, 0.0, 1.0, 1.0, -2.0);
        const AssumptionReport rep = check_assumptions(coeffs, make_field(g), make_field(g, 1.0),
                                                       constant_boundary(t, 0.0, 1.0), 1.0, 1.0);
        CHECK_FALSE(rep.pass);
        CHECK_FALSE(rep.c_plus_dr_nonneg);
        CHECK(rep.first_violation == "c + d r >= 0");
    }
    SUBCASE("coupling floor violation is named") {
        const CoefficientSet coeffs = constant_coeffs(g, 0.0, 1.0, 0.5, 0.0);
        const AssumptionReport rep = check_assumptions(coeffs, make_field(g), make_field(g, 1.0),
                                                       constant_boundary(t, 0.0, 1.0), 1.0, 1.0);
        CHECK_FALSE(rep.pass);
        CHECK(rep.first_violation == "c >= c0");
    }
}

TEST_CASE("singular step matrix raises a solver error") {
    // a zeroes the whole interior row of the step matrix: with b = c = 0 the
    // u1 column is structurally empty after the boundary eliminations
    const SpatialGrid g = build_spatial_grid(1.0, 3);
    const TimeGrid t = build_time_grid(0.0, 1.0, 4);
    const double a = 2.0 * (1.0 + t.dt / (g.spacing * g.spacing)) / t.dt;
    const CoefficientSet coeffs = constant_coeffs(g, a, 0, 0, 0, 100.0);
    CHECK_THROWS_AS(solve_forward(coeffs, zero_boundary(t), make_field(g), make_field(g),
                                  SourceTerm::none(), g, t),
                    SolverError);
}

TEST_CASE("coefficient bound is enforced") {
    const SpatialGrid g = build_spatial_grid(1.0, 21);
    CHECK_THROWS_AS(constant_coeffs(g, 11.0, 0, 0, 0), ConfigError);
    CHECK_NOTHROW(constant_coeffs(g, 9.0, 0, 0, 0));
}

TEST_CASE("solver properties over random admissible systems") {
    // seeded draws of bounded coefficient fields; each draw checks the
    // structural properties the march must keep regardless of the data
    uint64_t state = 31;
    auto uniform = [&state](double lo, double hi) {
        state = state * 6364136223846793005ull + 1442695040888963407ull;
        return lo + (hi - lo) * ((state >> 11) * 0x1.0p-53);
    };
    const SpatialGrid g = build_spatial_grid(1.0, 81);
    const TimeGrid t = build_time_grid(0.0, 1.0, 64);
    for (int trial = 0; trial < 6; ++trial) {
        auto random_field = [&](double amp) {
            ScalarField f = make_field(g, uniform(-amp, amp));
            const ScalarField mode = sine_mode_field(g, 1 + trial % 3, uniform(-amp, amp));
            for (int i = 0; i < g.node_count; ++i) f[i] += mode[i];
            return f;
        };
        const CoefficientSet coeffs =
            make_coefficients(random_field(1.0), random_field(1.0), random_field(1.0),
                              random_field(1.0), 10.0);
        const double gl = uniform(0.0, 1.0), hr = uniform(0.5, 1.5);
        const BoundaryData bc = constant_boundary(t, gl, hr);
        ScalarField u0 = make_field(g, gl);
        ScalarField v0 = make_field(g, hr);
        const ScalarField bu = sine_mode_field(g, 2, uniform(-0.5, 0.5));
        const ScalarField bv = sine_mode_field(g, 1, uniform(-0.5, 0.5));
        for (int i = 0; i < g.node_count; ++i) {
            u0[i] += bu[i];
            v0[i] += bv[i];
        }
        const SystemTrajectory traj =
            solve_forward(coeffs, bc, u0, v0, SourceTerm::none(), g, t);
        // boundary rows carry the traces bitwise, the initial slice the data
        for (int k = 0; k <= t.step_count; ++k) {
            CHECK(traj.u.at(k, 0) == gl);
            CHECK(traj.u.at(k, g.node_count - 1) == gl);
            CHECK(traj.v.at(k, 0) == hr);
            CHECK(traj.v.at(k, g.node_count - 1) == hr);
        }
        for (int i = 1; i < g.node_count - 1; ++i) {
            CHECK(traj.u.at(0, i) == u0[i]);
            CHECK(traj.v.at(0, i) == v0[i]);
        }
        for (double v : traj.u.values) CHECK(std::isfinite(v));
        const PositivityReport rep = check_positivity(traj, 0.0);
        CHECK(rep.min_v_over_grid <= rep.min_v_at_midpoint);
    }
}

TEST_CASE("trajectory binary round trip") {
    const SpatialGrid g = build_spatial_grid(1.0, 31);
    const TimeGrid t = build_time_grid(0.25, 1.25, 16);
    const CoefficientSet coeffs = constant_coeffs(g, 0.1, 0.2, 0.3, -0.2);
    ScalarField v0 = make_field(g, 1.0);
    const SystemTrajectory traj = solve_forward(coeffs, constant_boundary(t, 0.0, 1.0),
                                                make_field(g), v0, SourceTerm::none(), g, t);
    const std::string path =
        (std::filesystem::temp_directory_path() / "clab_traj_roundtrip.bin").string();
    write_trajectory_binary(traj, path);
    SpaceTimeField u, v;
    read_trajectory_binary(path, u, v);
    CHECK(u.space.node_count == g.node_count);
    CHECK(u.time.step_count == t.step_count);
    for (size_t i = 0; i < traj.u.values.size(); ++i) {
        CHECK(u.values[i] == traj.u.values[i]);
        CHECK(v.values[i] == traj.v.values[i]);
    }
    std::filesystem::remove(path);
}
