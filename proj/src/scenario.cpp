#include "clab/scenario.hpp"

#include "clab/errors.hpp"
#include "clab/operators.hpp"

namespace clab {

SystemTrajectory solve_reference(const Scenario& sc) {
    return solve_forward(sc.reference_coeffs, sc.bc, sc.u0_ref, sc.v0_ref, SourceTerm::none(),
                         sc.space, sc.time);
}

SystemTrajectory solve_perturbed(const Scenario& sc, const ScalarField& gamma,
                                 const ScalarField& du0, const ScalarField& dv0) {
    ScalarField b = sc.reference_coeffs.b;
    for (int i = 0; i < b.size(); ++i) b[i] += gamma[i];
    const CoefficientSet coeffs = with_b(sc.reference_coeffs, std::move(b));
    ScalarField u0 = sc.u0_ref;
    ScalarField v0 = sc.v0_ref;
    for (int i = 0; i < u0.size(); ++i) {
        u0[i] += du0[i];
        v0[i] += dv0[i];
    }
    return solve_forward(coeffs, sc.bc, u0, v0, SourceTerm::none(), sc.space, sc.time);
}

WeightSet scenario_weights(const Scenario& sc, double lambda) {
    const BetaProfile beta = build_beta(sc.space, sc.geometry, sc.x0, sc.m);
    return make_weight_set(beta, sc.time, lambda, sc.geometry);
}

std::pair<ScalarField, ScalarField> difference_initial_data(const Scenario& sc,
                                                            const ScalarField& gamma,
                                                            const SystemTrajectory& perturbed,
                                                            const SystemTrajectory& reference) {
    const int n = sc.space.node_count;
    ScalarField cap_u = make_field(sc.space), cap_v = make_field(sc.space);
    for (int i = 0; i < n; ++i) {
        cap_u[i] = perturbed.u.at(0, i) - reference.u.at(0, i);
        cap_v[i] = perturbed.v.at(0, i) - reference.v.at(0, i);
    }
    const ScalarField lap_u = discrete_laplacian(cap_u);
    const ScalarField lap_v = discrete_laplacian(cap_v);
    const CoefficientSet& rc = perturbed.coeffs;  // carries b = b_ref + gamma
    ScalarField y0 = make_field(sc.space), z0 = make_field(sc.space);
    for (int i = 1; i < n - 1; ++i) {
        y0[i] = lap_u[i] + rc.a[i] * cap_u[i] + rc.b[i] * cap_v[i] + gamma[i] * reference.v.at(0, i);
        z0[i] = lap_v[i] + rc.c[i] * cap_u[i] + rc.d[i] * cap_v[i];
    }
    return {std::move(y0), std::move(z0)};
}

AssumptionReport check_assumptions(const Scenario& sc) {
    return check_assumptions(sc.reference_coeffs, sc.u0_ref, sc.v0_ref, sc.bc, sc.r, sc.c0);
}

}  // namespace clab
