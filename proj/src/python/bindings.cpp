#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "clab/config.hpp"
#include "clab/errors.hpp"
#include "clab/forward.hpp"
#include "clab/grid.hpp"
#include "clab/operators.hpp"
#include "clab/runner.hpp"
#include "clab/scenario.hpp"
#include "clab/stability_b.hpp"
#include "clab/stability_ic.hpp"
#include "clab/verifier.hpp"
#include "clab/version.hpp"
#include "clab/weights.hpp"

namespace py = pybind11;
using namespace clab;

namespace {

// the count constructor of array_t leaves the strides empty in pybind11 3.x,
// so 1-d arrays are always built from an explicit shape vector
py::array_t<double> make_1d_array(py::ssize_t n) {
    return py::array_t<double>(std::vector<py::ssize_t>{n});
}

py::array_t<double> scalar_values(const ScalarField& f) {
    py::array_t<double> out = make_1d_array(static_cast<py::ssize_t>(f.values.size()));
    std::copy(f.values.begin(), f.values.end(), out.mutable_data());
    return out;
}

ScalarField scalar_from(const SpatialGrid& grid, py::array_t<double, py::array::c_style> values) {
    if (values.ndim() != 1 || values.shape(0) != grid.node_count)
        throw ConfigError("values must be a 1-d array with one entry per grid node");
    ScalarField f = make_field(grid);
    std::copy(values.data(), values.data() + values.shape(0), f.values.begin());
    return f;
}

py::array_t<double> spacetime_values(const SpaceTimeField& f) {
    py::array_t<double> out({static_cast<py::ssize_t>(f.time.node_count()),
                             static_cast<py::ssize_t>(f.space.node_count)});
    std::copy(f.values.begin(), f.values.end(), out.mutable_data());
    return out;
}

SpaceTimeField spacetime_from(const SpatialGrid& space, const TimeGrid& time,
                              py::array_t<double, py::array::c_style> values) {
    if (values.ndim() != 2 || values.shape(0) != time.node_count() ||
        values.shape(1) != space.node_count)
        throw ConfigError("values must be a (time nodes, space nodes) array");
    SpaceTimeField f = make_spacetime_field(space, time);
    std::copy(values.data(), values.data() + values.size(), f.values.begin());
    return f;
}

py::dict report_to_dict(const CarlemanReport& r) {
    py::dict d;
    d["id"] = estimate_name(r.id);
    d["s"] = r.s;
    d["lambda"] = r.lambda;
    py::dict lhs, rhs;
    for (const auto& [k, v] : r.lhs_terms) lhs[py::str(k)] = v;
    for (const auto& [k, v] : r.rhs_terms) rhs[py::str(k)] = v;
    d["lhs_terms"] = lhs;
    d["rhs_terms"] = rhs;
    d["lhs_total"] = r.lhs_total;
    d["rhs_total"] = r.rhs_total;
    d["ratio"] = r.ratio;
    d["degenerate"] = r.degenerate;
    d["fingerprint"] = r.fingerprint;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Numerical laboratory for coupled reaction-diffusion inverse problems";
    m.attr("__version__") = kVersion;

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_ValueError);
    py::register_exception<ReconstructionError>(m, "ReconstructionError", PyExc_RuntimeError);

    py::class_<SpatialGrid>(m, "SpatialGrid")
        .def_readonly("length", &SpatialGrid::length)
        .def_readonly("node_count", &SpatialGrid::node_count)
        .def_readonly("spacing", &SpatialGrid::spacing)
        .def("node", &SpatialGrid::node)
        .def("nodes", [](const SpatialGrid& g) {
            py::array_t<double> out = make_1d_array(g.node_count);
            double* data = out.mutable_data();
            for (int i = 0; i < g.node_count; ++i) data[i] = g.node(i);
            return out;
        });
    py::class_<TimeGrid>(m, "TimeGrid")
        .def_readonly("t0", &TimeGrid::t_begin)
        .def_readonly("T", &TimeGrid::t_end)
        .def_readonly("step_count", &TimeGrid::step_count)
        .def_readonly("dt", &TimeGrid::dt)
        .def("node", &TimeGrid::node)
        .def("midpoint", &TimeGrid::midpoint)
        .def("midpoint_index", &TimeGrid::midpoint_index);
    m.def("build_spatial_grid", &build_spatial_grid, py::arg("length"), py::arg("node_count"));
    m.def("build_time_grid", &build_time_grid, py::arg("t0"), py::arg("T"), py::arg("steps"));

    py::class_<Interval>(m, "Interval")
        .def(py::init([](double lo, double hi) { return Interval{lo, hi}; }))
        .def_readonly("lo", &Interval::lo)
        .def_readonly("hi", &Interval::hi);
    py::class_<SubIntervalSet>(m, "SubIntervalSet")
        .def_readonly("omega", &SubIntervalSet::omega)
        .def_readonly("omega_second", &SubIntervalSet::omega_second)
        .def_readonly("omega_prime", &SubIntervalSet::omega_prime);
    m.def("make_subintervals", &make_subintervals, py::arg("omega"), py::arg("omega_second"),
          py::arg("omega_prime"), py::arg("domain_length"));

    py::class_<ScalarField>(m, "ScalarField")
        .def(py::init(&scalar_from), py::arg("grid"), py::arg("values"))
        .def_readonly("grid", &ScalarField::grid)
        .def_property_readonly("values", &scalar_values);
    py::class_<SpaceTimeField>(m, "SpaceTimeField")
        .def(py::init(&spacetime_from), py::arg("space"), py::arg("time"), py::arg("values"))
        .def_readonly("space", &SpaceTimeField::space)
        .def_readonly("time", &SpaceTimeField::time)
        .def_property_readonly("values", &spacetime_values)
        .def("snapshot", &SpaceTimeField::snapshot);
    m.def("make_field", &make_field, py::arg("grid"), py::arg("fill") = 0.0);
    m.def("sine_mode_field", &sine_mode_field, py::arg("grid"), py::arg("mode"),
          py::arg("amplitude") = 1.0);
    m.def(
        "integrate_space",
        [](const ScalarField& f, double lo, double hi) { return integrate_space(f, {lo, hi}); },
        py::arg("field"), py::arg("lo"), py::arg("hi"));
    m.def(
        "integrate_spacetime",
        [](const SpaceTimeField& f, double lo, double hi) {
            return integrate_spacetime(f, {lo, hi});
        },
        py::arg("field"), py::arg("lo"), py::arg("hi"));
    m.def("l2_norm_sq", py::overload_cast<const ScalarField&>(&l2_norm_sq), py::arg("field"));

    py::class_<BetaProfile>(m, "BetaProfile")
        .def_readonly("x_crit", &BetaProfile::x_crit)
        .def_readonly("max_value", &BetaProfile::max_value)
        .def_readonly("K", &BetaProfile::K)
        .def_readonly("m", &BetaProfile::m)
        .def_readonly("kappa", &BetaProfile::kappa)
        .def("value", &BetaProfile::value)
        .def("derivative", &BetaProfile::derivative)
        .def("lifted", &BetaProfile::lifted);
    m.def("build_beta", &build_beta, py::arg("grid"), py::arg("subintervals"), py::arg("x0"),
          py::arg("m"));
    py::class_<BetaValidation>(m, "BetaValidation")
        .def_readonly("interior_positive", &BetaValidation::interior_positive)
        .def_readonly("boundary_zero", &BetaValidation::boundary_zero)
        .def_readonly("gradient_bounded_away", &BetaValidation::gradient_bounded_away)
        .def_readonly("endpoint_signs", &BetaValidation::endpoint_signs)
        .def_readonly("min_gradient_outside", &BetaValidation::min_gradient_outside)
        .def("passed", &BetaValidation::pass);
    m.def("validate_beta", &validate_beta, py::arg("profile"), py::arg("subintervals"),
          py::arg("grid"));
    py::class_<CutoffProfile>(m, "CutoffProfile")
        .def("value", &CutoffProfile::value)
        .def("derivative", &CutoffProfile::derivative)
        .def("second_derivative", &CutoffProfile::second_derivative);
    m.def("build_cutoff", &build_cutoff, py::arg("subintervals"));

    py::class_<WeightSet>(m, "WeightSet")
        .def_property_readonly("lambda_", &WeightSet::lambda)
        .def("phi", &WeightSet::phi)
        .def("eta", &WeightSet::eta)
        .def("weighted", &WeightSet::weighted, py::arg("x"), py::arg("t"), py::arg("k"),
             py::arg("s"))
        .def("decay", &WeightSet::decay);
    m.def("make_weight_set", &make_weight_set, py::arg("beta"), py::arg("window"),
          py::arg("lambda_"), py::arg("subintervals"));
    py::class_<WeightBoundReport>(m, "WeightBoundReport")
        .def_readonly("c_dt_phi", &WeightBoundReport::c_dt_phi)
        .def_readonly("c_dt_eta", &WeightBoundReport::c_dt_eta)
        .def_readonly("c_phi_vs_phi3", &WeightBoundReport::c_phi_vs_phi3)
        .def_readonly("c_phi3_vs_phi7", &WeightBoundReport::c_phi3_vs_phi7)
        .def_readonly("c_one_vs_phi3", &WeightBoundReport::c_one_vs_phi3)
        .def_readonly("phi_min", &WeightBoundReport::phi_min)
        .def_readonly("all_finite", &WeightBoundReport::all_finite);
    m.def("check_weight_bounds", &check_weight_bounds, py::arg("weights"), py::arg("space"),
          py::arg("time"));

    m.def("discrete_laplacian", py::overload_cast<const ScalarField&>(&discrete_laplacian));
    m.def("discrete_laplacian_st", py::overload_cast<const SpaceTimeField&>(&discrete_laplacian));
    m.def("time_derivative", &time_derivative);
    m.def("spatial_gradient", py::overload_cast<const SpaceTimeField&>(&spatial_gradient));
    m.def("conjugate_decay", &conjugate_decay, py::arg("q"), py::arg("weights"), py::arg("s"));
    m.def("apply_M1", &apply_M1, py::arg("psi"), py::arg("weights"), py::arg("s"));
    m.def("apply_M2", &apply_M2, py::arg("psi"), py::arg("weights"), py::arg("s"));
    py::class_<FunctionalBreakdown>(m, "FunctionalBreakdown")
        .def_readonly("s", &FunctionalBreakdown::s)
        .def_readonly("lambda_", &FunctionalBreakdown::lambda)
        .def_readonly("term_dtlap", &FunctionalBreakdown::term_dtlap)
        .def_readonly("term_grad", &FunctionalBreakdown::term_grad)
        .def_readonly("term_zero", &FunctionalBreakdown::term_zero)
        .def("total", &FunctionalBreakdown::total);
    m.def("eval_I", &eval_I, py::arg("q"), py::arg("weights"), py::arg("s"));

    py::class_<CoefficientSet>(m, "CoefficientSet")
        .def_readonly("a", &CoefficientSet::a)
        .def_readonly("b", &CoefficientSet::b)
        .def_readonly("c", &CoefficientSet::c)
        .def_readonly("d", &CoefficientSet::d)
        .def_readonly("bound", &CoefficientSet::bound);
    m.def("make_coefficients", &make_coefficients, py::arg("a"), py::arg("b"), py::arg("c"),
          py::arg("d"), py::arg("bound"));
    m.def("with_b", &with_b, py::arg("base"), py::arg("b"));
    py::class_<BoundaryData>(m, "BoundaryData");
    m.def("constant_boundary", &constant_boundary, py::arg("time"), py::arg("g"), py::arg("h"));
    m.def("zero_boundary", &zero_boundary, py::arg("time"));
    py::class_<SystemTrajectory>(m, "SystemTrajectory")
        .def_readonly("u", &SystemTrajectory::u)
        .def_readonly("v", &SystemTrajectory::v)
        .def_readonly("coeffs", &SystemTrajectory::coeffs);
    m.def(
        "solve_forward",
        [](const CoefficientSet& coeffs, const BoundaryData& bc, const ScalarField& u0,
           const ScalarField& v0, const std::optional<SpaceTimeField>& source,
           const SpatialGrid& space, const TimeGrid& time) {
            SourceTerm s;
            if (source) s.field = *source;
            return solve_forward(coeffs, bc, u0, v0, s, space, time);
        },
        py::arg("coeffs"), py::arg("bc"), py::arg("u0"), py::arg("v0"),
        py::arg("source") = std::nullopt, py::arg("space"), py::arg("time"));
    m.def("solve_difference_system", &solve_difference_system, py::arg("coeffs"),
          py::arg("gamma"), py::arg("reference"), py::arg("y0"), py::arg("z0"));
    m.def("solve_split", &solve_split, py::arg("coeffs"), py::arg("gamma"), py::arg("reference"),
          py::arg("y0"), py::arg("z0"));
    py::class_<PositivityReport>(m, "PositivityReport")
        .def_readonly("min_v_at_midpoint", &PositivityReport::min_v_at_midpoint)
        .def_readonly("min_v_over_grid", &PositivityReport::min_v_over_grid)
        .def_readonly("floor", &PositivityReport::floor)
        .def_readonly("pass_", &PositivityReport::pass);
    m.def("check_positivity", &check_positivity, py::arg("trajectory"), py::arg("r"));
    py::class_<AssumptionReport>(m, "AssumptionReport")
        .def_readonly("b_ref_nonneg", &AssumptionReport::b_ref_nonneg)
        .def_readonly("b_ref_strictly_positive", &AssumptionReport::b_ref_strictly_positive)
        .def_readonly("c_at_least_c0", &AssumptionReport::c_at_least_c0)
        .def_readonly("c_plus_dr_nonneg", &AssumptionReport::c_plus_dr_nonneg)
        .def_readonly("u0_nonneg", &AssumptionReport::u0_nonneg)
        .def_readonly("v0_at_least_r", &AssumptionReport::v0_at_least_r)
        .def_readonly("g_nonneg", &AssumptionReport::g_nonneg)
        .def_readonly("h_at_least_r", &AssumptionReport::h_at_least_r)
        .def_readonly("coefficients_within_bound", &AssumptionReport::coefficients_within_bound)
        .def_readonly("first_violation", &AssumptionReport::first_violation)
        .def_readonly("pass_", &AssumptionReport::pass);
    m.def("write_trajectory_csv", &write_trajectory_csv);
    m.def("write_trajectory_binary", &write_trajectory_binary);

    m.def("generate_test_field", &generate_test_field, py::arg("seed"), py::arg("modes"),
          py::arg("space"), py::arg("time"));
    m.def(
        "eval_estimate3",
        [](const SpaceTimeField& q, const WeightSet& w, double s) {
            return report_to_dict(eval_estimate3(q, w, s));
        },
        py::arg("q"), py::arg("weights"), py::arg("s"));
    m.def(
        "eval_estimate4",
        [](const SpaceTimeField& q, const WeightSet& w, double s) {
            return report_to_dict(eval_estimate4(q, w, s));
        },
        py::arg("q"), py::arg("weights"), py::arg("s"));
    m.def(
        "eval_estimate10",
        [](const SystemTrajectory& yz, const ScalarField& gamma, const SystemTrajectory& ref,
           const WeightSet& w, double s, double c0) {
            return report_to_dict(eval_estimate10(yz, gamma, ref, w, s, c0));
        },
        py::arg("yz"), py::arg("gamma"), py::arg("reference"), py::arg("weights"), py::arg("s"),
        py::arg("c0"));

    py::class_<SweepRow>(m, "SweepRow")
        .def_readonly("seed", &SweepRow::seed)
        .def_readonly("s", &SweepRow::s)
        .def_readonly("lambda_", &SweepRow::lambda)
        .def_readonly("lhs_total", &SweepRow::lhs_total)
        .def_readonly("rhs_total", &SweepRow::rhs_total)
        .def_readonly("ratio", &SweepRow::ratio)
        .def_readonly("degenerate", &SweepRow::degenerate);
    py::class_<SweepSummaryRow>(m, "SweepSummaryRow")
        .def_readonly("s", &SweepSummaryRow::s)
        .def_readonly("lambda_", &SweepSummaryRow::lambda)
        .def_readonly("max_ratio", &SweepSummaryRow::max_ratio)
        .def_readonly("argmax_seed", &SweepSummaryRow::argmax_seed)
        .def_readonly("evaluated", &SweepSummaryRow::evaluated)
        .def_readonly("degenerate_count", &SweepSummaryRow::degenerate_count);
    py::class_<SweepTable>(m, "SweepTable")
        .def_readonly("rows", &SweepTable::rows)
        .def_readonly("summary", &SweepTable::summary);
    m.def(
        "constant_sweep",
        [](const std::string& id, int ensemble, uint64_t base_seed,
           const std::vector<double>& s_list, const std::vector<double>& lambda_list,
           const BetaProfile& beta, const SubIntervalSet& subs, const SpatialGrid& space,
           const TimeGrid& time, int modes) {
            const EstimateId est = id == "EST3" ? EstimateId::Est3 : EstimateId::Est4;
            return constant_sweep(est, ensemble, base_seed, s_list, lambda_list, beta, subs,
                                  space, time, modes);
        },
        py::arg("estimate"), py::arg("ensemble"), py::arg("base_seed"), py::arg("s_list"),
        py::arg("lambda_list"), py::arg("beta"), py::arg("subintervals"), py::arg("space"),
        py::arg("time"), py::arg("modes") = 5);

    py::class_<Scenario>(m, "Scenario")
        .def_readonly("space", &Scenario::space)
        .def_readonly("time", &Scenario::time)
        .def_readonly("geometry", &Scenario::geometry)
        .def_readonly("reference_coeffs", &Scenario::reference_coeffs)
        .def_readonly("u0_ref", &Scenario::u0_ref)
        .def_readonly("v0_ref", &Scenario::v0_ref)
        .def_readonly("r", &Scenario::r)
        .def_readonly("c0", &Scenario::c0);
    m.def("solve_reference", &solve_reference);
    m.def("solve_perturbed", &solve_perturbed, py::arg("scenario"), py::arg("gamma"),
          py::arg("du0"), py::arg("dv0"));
    m.def("scenario_weights", &scenario_weights, py::arg("scenario"), py::arg("lambda_"));
    m.def("check_scenario_assumptions",
          py::overload_cast<const Scenario&>(&check_assumptions));

    py::class_<ObservationSet>(m, "ObservationSet")
        .def_readonly("dt_v", &ObservationSet::dt_v)
        .def_readonly("u_mid", &ObservationSet::u_mid)
        .def_readonly("v_mid", &ObservationSet::v_mid)
        .def_readonly("lap_u_mid", &ObservationSet::lap_u_mid);
    m.def("extract_observations", &extract_observations, py::arg("trajectory"), py::arg("omega"),
          py::arg("with_dt_u") = false);
    py::class_<StabilityReport>(m, "StabilityReport")
        .def_readonly("eps", &StabilityReport::eps)
        .def_readonly("lhs", &StabilityReport::lhs)
        .def_readonly("obs_term", &StabilityReport::obs_term)
        .def_readonly("lap_term", &StabilityReport::lap_term)
        .def_readonly("u_term", &StabilityReport::u_term)
        .def_readonly("v_term", &StabilityReport::v_term)
        .def_readonly("ratio", &StabilityReport::ratio)
        .def_readonly("degenerate", &StabilityReport::degenerate);
    m.def(
        "stability_experiment",
        [](const Scenario& sc, const std::vector<double>& eps, const ScalarField& g,
           const ScalarField& du0, const ScalarField& dv0) {
            return stability_experiment(sc, eps, g, du0, dv0);
        },
        py::arg("scenario"), py::arg("eps_list"), py::arg("gamma_shape"), py::arg("du0_shape"),
        py::arg("dv0_shape"));
    py::class_<SnapshotResidual>(m, "SnapshotResidual")
        .def_readonly("field", &SnapshotResidual::field)
        .def_readonly("norm", &SnapshotResidual::norm)
        .def_readonly("y_norm", &SnapshotResidual::y_norm);
    m.def(
        "snapshot_identity_residual",
        [](const SystemTrajectory& perturbed, const SystemTrajectory& reference,
           const ScalarField& gamma, const std::optional<SystemTrajectory>& difference) {
            return snapshot_identity_residual(perturbed, reference, gamma,
                                              difference ? &*difference : nullptr);
        },
        py::arg("perturbed"), py::arg("reference"), py::arg("gamma"),
        py::arg("difference") = std::nullopt);
    py::class_<ScalingCheck>(m, "ScalingCheck")
        .def_readonly("base", &ScalingCheck::base)
        .def_readonly("scaled", &ScalingCheck::scaled)
        .def_readonly("ratio_rel_deviation", &ScalingCheck::ratio_rel_deviation);
    m.def("stability_scaling_check", &stability_scaling_check, py::arg("scenario"),
          py::arg("gamma"), py::arg("alpha") = 2.0);
    m.def("reconstruct_b_direct", &reconstruct_b_direct, py::arg("obs"), py::arg("ref_obs"),
          py::arg("a"), py::arg("b_ref"), py::arg("r_floor"));
    py::class_<LsqOptions>(m, "LsqOptions")
        .def(py::init<>())
        .def_readwrite("alpha", &LsqOptions::alpha)
        .def_readwrite("max_iterations", &LsqOptions::max_iterations)
        .def_readwrite("gradient_tol", &LsqOptions::gradient_tol)
        .def_readwrite("modes", &LsqOptions::modes);
    py::class_<LsqResult>(m, "LsqResult")
        .def_readonly("b_hat", &LsqResult::b_hat)
        .def_readonly("mode_coefficients", &LsqResult::mode_coefficients)
        .def_readonly("converged", &LsqResult::converged)
        .def_readonly("iterations", &LsqResult::iterations)
        .def_readonly("misfit", &LsqResult::misfit);
    m.def("reconstruct_b_lsq", &reconstruct_b_lsq, py::arg("scenario"), py::arg("obs"),
          py::arg("options"));

    py::class_<GronwallReport>(m, "GronwallReport")
        .def_readonly("empirical_constant", &GronwallReport::empirical_constant)
        .def_readonly("gamma_norm_sq", &GronwallReport::gamma_norm_sq)
        .def_readonly("degenerate", &GronwallReport::degenerate);
    m.def("lemma41_check", &lemma41_check, py::arg("scenario"), py::arg("gamma"));
    m.def("coupling_sup_norm", &coupling_sup_norm);
    m.def("convexity_profile", &convexity_profile, py::arg("t"), py::arg("c"), py::arg("t0"),
          py::arg("t_mid"));
    py::class_<LogConvexityRecord>(m, "LogConvexityRecord")
        .def_readonly("scan_constant", &LogConvexityRecord::scan_constant)
        .def_readonly("c1", &LogConvexityRecord::c1)
        .def_readonly("bound_m", &LogConvexityRecord::bound_m)
        .def_readonly("t", &LogConvexityRecord::t)
        .def_readonly("wnorm_sq", &LogConvexityRecord::wnorm_sq)
        .def_readonly("mu", &LogConvexityRecord::mu)
        .def_readonly("pass_", &LogConvexityRecord::pass)
        .def_readonly("degenerate", &LogConvexityRecord::degenerate);
    m.def(
        "logconvexity_check",
        [](const Scenario& sc, const ScalarField& y0, const ScalarField& z0,
           const std::vector<double>& scan) { return logconvexity_check(sc, y0, z0, scan); },
        py::arg("scenario"), py::arg("y0"), py::arg("z0"), py::arg("c_scan"));
    m.def(
        "logconvexity_check_pair",
        [](const Scenario& sc, const ScalarField& gamma, const ScalarField& du0,
           const ScalarField& dv0, const std::vector<double>& scan) {
            return logconvexity_check_pair(sc, gamma, du0, dv0, scan);
        },
        py::arg("scenario"), py::arg("gamma"), py::arg("du0"), py::arg("dv0"), py::arg("c_scan"));
    m.def("initial_reconstruction_error", &initial_reconstruction_error, py::arg("scenario"),
          py::arg("gamma"), py::arg("du0"), py::arg("dv0"));
    py::enum_<ICRecordFlag>(m, "ICRecordFlag")
        .value("Ok", ICRecordFlag::Ok)
        .value("DegenerateZero", ICRecordFlag::DegenerateZero)
        .value("OutOfRange", ICRecordFlag::OutOfRange);
    py::class_<ICStabilityRecord>(m, "ICStabilityRecord")
        .def_readonly("eps", &ICStabilityRecord::eps)
        .def_readonly("data_error", &ICStabilityRecord::data_error)
        .def_readonly("ic_error", &ICStabilityRecord::ic_error)
        .def_readonly("product", &ICStabilityRecord::product)
        .def_readonly("flag", &ICStabilityRecord::flag);
    m.def(
        "ic_stability_experiment",
        [](const Scenario& sc, const std::vector<double>& eps, const ScalarField& g,
           const ScalarField& du0, const ScalarField& dv0) {
            return ic_stability_experiment(sc, eps, g, du0, dv0);
        },
        py::arg("scenario"), py::arg("eps_list"), py::arg("gamma_shape"), py::arg("du0_shape"),
        py::arg("dv0_shape"));
    m.def("h2_norm_sq", &h2_norm_sq);

    py::class_<ScenarioConfig>(m, "ScenarioConfig")
        .def_readonly("out_dir", &ScenarioConfig::out_dir)
        .def_readonly("seed", &ScenarioConfig::seed);
    m.def("default_config", &default_config);
    m.def("load_config", &load_config, py::arg("path"));
    m.def("build_scenario", &build_scenario, py::arg("config"));
    m.def(
        "run_command",
        [](const std::string& command, const ScenarioConfig& cfg, const std::string& out_dir,
           std::optional<uint64_t> seed) {
            RunOptions opt;
            opt.out_dir = out_dir;
            opt.seed = seed;
            return run_command(command, cfg, opt);
        },
        py::arg("command"), py::arg("config"), py::arg("out_dir") = std::string(),
        py::arg("seed") = std::nullopt);
}
