#pragma once

#include "clab/forward.hpp"
#include "clab/grid.hpp"
#include "clab/weights.hpp"

namespace clab {

/// One fully specified experiment setting: grids, observation geometry,
/// weight parameters, the reference system data, and the admissibility
/// constants. Perturbed systems are derived from it by adding a coefficient
/// difference and/or initial-data differences.
struct Scenario {
    SpatialGrid space;
    TimeGrid time;
    SubIntervalSet geometry;
    double x0 = 0.5;
    double m = 1.2;
    CoefficientSet reference_coeffs;  // the b field is the reference coefficient
    BoundaryData bc;
    ScalarField u0_ref, v0_ref;
    double r = 1.0;
    double c0 = 1.0;
};

/// Solves the reference system of the scenario.
SystemTrajectory solve_reference(const Scenario& sc);

/// Solves the perturbed system with b = b_ref + gamma and optionally shifted
/// initial data.
SystemTrajectory solve_perturbed(const Scenario& sc, const ScalarField& gamma,
                                 const ScalarField& du0, const ScalarField& dv0);

/// Weight set over the scenario's window using its geometry profile.
WeightSet scenario_weights(const Scenario& sc, double lambda);

/// Initial data of the difference dynamics from the two solved systems:
///   y(t0) = lap U + a U + b V + gamma v_ref   at t0,
///   z(t0) = lap V + c U + d V                 at t0.
std::pair<ScalarField, ScalarField> difference_initial_data(const Scenario& sc,
                                                            const ScalarField& gamma,
                                                            const SystemTrajectory& perturbed,
                                                            const SystemTrajectory& reference);

AssumptionReport check_assumptions(const Scenario& sc);

}  // namespace clab
