#pragma once

#include <optional>
#include <string>
#include <utility>

#include "clab/grid.hpp"

namespace clab {

/// Space-dependent reaction coefficients with an enforced sup-norm bound.
struct CoefficientSet {
    ScalarField a, b, c, d;
    double bound = 0.0;  // admissibility radius R
};

CoefficientSet make_coefficients(ScalarField a, ScalarField b, ScalarField c, ScalarField d,
                                 double bound);

/// Replaces one coefficient, revalidating the bound.
CoefficientSet with_b(const CoefficientSet& base, ScalarField b);

/// Dirichlet traces at the two endpoints, one value per time node.
struct BoundaryData {
    std::vector<double> u_left, u_right, v_left, v_right;
};

BoundaryData constant_boundary(const TimeGrid& time, double g, double h);
BoundaryData zero_boundary(const TimeGrid& time);

/// Optional forcing of the first equation, sampled on the space-time grid.
struct SourceTerm {
    std::optional<SpaceTimeField> field;
    static SourceTerm none() { return {}; }
};

struct SystemTrajectory {
    SpaceTimeField u, v;
    CoefficientSet coeffs;
};

/// Crank-Nicolson march of
///   du/dt = lap u + a u + b v + source,   dv/dt = lap v + c u + d v,
/// with the zero-order coupling treated implicitly: each step solves one
/// banded system in the interleaved unknown (u_0, v_0, u_1, v_1, ...).
/// Second order in both mesh sizes.
SystemTrajectory solve_forward(const CoefficientSet& coeffs, const BoundaryData& bc,
                               const ScalarField& u0, const ScalarField& v0,
                               const SourceTerm& source, const SpatialGrid& space,
                               const TimeGrid& time);

/// Difference dynamics driven by the coefficient perturbation gamma: zero
/// boundary data and source gamma * dt(reference v) in the first equation.
SystemTrajectory solve_difference_system(const CoefficientSet& coeffs, const ScalarField& gamma,
                                         const SystemTrajectory& reference, const ScalarField& y0,
                                         const ScalarField& z0);

/// Splits the difference dynamics into a source-driven part with zero initial
/// data and a data-driven part without source; their sum reproduces
/// solve_difference_system up to linear-solver roundoff.
std::pair<SystemTrajectory, SystemTrajectory> solve_split(const CoefficientSet& coeffs,
                                                          const ScalarField& gamma,
                                                          const SystemTrajectory& reference,
                                                          const ScalarField& y0,
                                                          const ScalarField& z0);

struct PositivityReport {
    double min_v_at_midpoint = 0.0;
    double min_v_over_grid = 0.0;
    double floor = 0.0;
    bool pass = false;
};

PositivityReport check_positivity(const SystemTrajectory& traj, double r);

/// Nodewise admissibility checks of the reference scenario. The strict
/// variant of the b-sign condition is reported alongside the weak one.
struct AssumptionReport {
    bool b_ref_nonneg = false;
    bool b_ref_strictly_positive = false;
    bool c_at_least_c0 = false;
    bool c_plus_dr_nonneg = false;
    bool u0_nonneg = false;
    bool v0_at_least_r = false;
    bool g_nonneg = false;
    bool h_at_least_r = false;
    bool coefficients_within_bound = false;
    std::string first_violation;
    bool pass = false;
};

AssumptionReport check_assumptions(const CoefficientSet& reference_coeffs,
                                   const ScalarField& u0_ref, const ScalarField& v0_ref,
                                   const BoundaryData& bc, double r, double c0);

void write_trajectory_csv(const SystemTrajectory& traj, const std::string& path);
void write_trajectory_binary(const SystemTrajectory& traj, const std::string& path);
void read_trajectory_binary(const std::string& path, SpaceTimeField& u, SpaceTimeField& v);

}  // namespace clab
