"""Smoke tests of the python bindings: one pass over the main operations."""

import math

import numpy as np
import pytest

import carleman_lab as cl

COARSE_CONFIG = """
[grid]
n = 101
nt = 128
T = 1.0

[experiment]
seed = 1
ensemble = 3
modes = 3
gamma = sine:2:0.05
du0 = sine:1:0.1
"""


@pytest.fixture(scope="module")
def coarse_config(tmp_path_factory):
    path = tmp_path_factory.mktemp("cfg") / "coarse.cfg"
    path.write_text(COARSE_CONFIG)
    return cl.load_config(str(path))


@pytest.fixture(scope="module")
def scenario(coarse_config):
    return cl.build_scenario(coarse_config)


def test_grid_and_quadrature():
    space = cl.build_spatial_grid(1.0, 101)
    time = cl.build_time_grid(0.0, 1.0, 64)
    assert space.spacing == pytest.approx(0.01)
    assert time.midpoint() == pytest.approx(0.5)
    one = cl.ScalarField(space, np.ones(space.node_count))
    assert cl.integrate_space(one, 0.25, 0.75) == pytest.approx(0.5)
    sine = cl.sine_mode_field(space, 1)
    assert cl.integrate_space(sine, 0.0, 1.0) == pytest.approx(2.0 / math.pi, rel=1e-3)


def test_grid_validation_raises():
    with pytest.raises(ValueError):
        cl.build_spatial_grid(1.0, 2)
    with pytest.raises(ValueError):
        cl.build_time_grid(0.0, 1.0, 5)


def test_forward_heat_oracle():
    space = cl.build_spatial_grid(1.0, 101)
    time = cl.build_time_grid(0.0, 1.0, 128)
    zero = cl.make_field(space)
    coeffs = cl.make_coefficients(zero, zero, zero, zero, 10.0)
    traj = cl.solve_forward(coeffs, cl.zero_boundary(time), cl.sine_mode_field(space, 1), zero,
                            None, space, time)
    x = space.nodes()
    mid = time.midpoint_index()
    exact = math.exp(-math.pi**2 * time.midpoint()) * np.sin(math.pi * x)
    # coarse smoke grid: the tight oracle tolerance lives in the C++ suites
    assert np.max(np.abs(traj.u.values[mid] - exact)) <= 5e-3 * np.max(np.abs(exact))
    assert np.all(traj.v.values == 0.0)


def test_weights_and_estimates(scenario):
    sc = scenario
    w = cl.scenario_weights(sc, 2.0)
    assert w.eta(0.5, 0.5) > 0.0
    assert w.weighted(0.5, 0.0, 3, 8.0) == 0.0
    assert w.weighted(0.5, 0.25, 3, 8.0) > 0.0

    q = cl.generate_test_field(1, 3, sc.space, sc.time)
    rep = cl.eval_estimate3(q, w, 8.0)
    assert not rep["degenerate"]
    assert math.isfinite(rep["ratio"])
    rep4 = cl.eval_estimate4(q, w, 8.0)
    assert rep4["lhs_total"] == pytest.approx(cl.eval_I(q, w, 8.0).total())


def test_scenario_positivity_and_assumptions(scenario):
    sc = scenario
    assert cl.check_scenario_assumptions(sc).pass_
    reference = cl.solve_reference(sc)
    rep = cl.check_positivity(reference, sc.r)
    assert rep.pass_
    assert rep.min_v_at_midpoint >= sc.r * (1.0 - 1e-6)


def test_direct_reconstruction_roundtrip(scenario):
    sc = scenario
    reference = cl.solve_reference(sc)
    ref_obs = cl.extract_observations(reference, sc.geometry.omega, True)
    gamma = cl.sine_mode_field(sc.space, 2, 0.05)
    zero = cl.make_field(sc.space)
    perturbed = cl.solve_perturbed(sc, gamma, zero, zero)
    obs = cl.extract_observations(perturbed, sc.geometry.omega, True)
    b_hat = cl.reconstruct_b_direct(obs, ref_obs, sc.reference_coeffs.a, sc.reference_coeffs.b,
                                    sc.r)
    truth = sc.reference_coeffs.b.values + gamma.values
    rel = np.linalg.norm(b_hat.values - truth) / np.linalg.norm(truth)
    assert rel <= 1e-4


def test_stability_and_ic_experiments(scenario):
    sc = scenario
    shape = cl.sine_mode_field(sc.space, 1)
    zero = cl.make_field(sc.space)
    reports = cl.stability_experiment(sc, [1e-2, 1e-1], shape, zero, zero)
    assert len(reports) == 2
    for r in reports:
        assert not r.degenerate
        assert math.isfinite(r.ratio)

    records = cl.ic_stability_experiment(sc, [1e-2, 1e-1], zero, shape, zero)
    for rec in records:
        assert rec.flag == cl.ICRecordFlag.Ok
        assert 0.0 < rec.data_error < 1.0
        assert math.isfinite(rec.product)


def test_logconvexity_smoke(scenario):
    sc = scenario
    rec = cl.logconvexity_check(sc, cl.sine_mode_field(sc.space, 1, 0.5),
                                cl.make_field(sc.space), [0.25, 0.5, 1.0])
    assert rec.pass_
    assert rec.mu[0] == 0.0
    assert rec.mu[-1] == pytest.approx(1.0)


def test_shipped_configs_load():
    import pathlib

    config_dir = pathlib.Path(__file__).resolve().parents[2] / "configs"
    for name in ("default.cfg", "reconstruct.cfg", "stability.cfg"):
        cfg = cl.load_config(str(config_dir / name))
        cl.build_scenario(cfg)


def test_sweep_and_scaling_bindings(scenario):
    sc = scenario
    beta = cl.build_beta(sc.space, sc.geometry, 0.5, 1.2)
    table = cl.constant_sweep("EST3", 2, 1, [8.0], [2.0], beta, sc.geometry, sc.space, sc.time, 3)
    assert len(table.rows) == 2
    assert all(math.isfinite(r.ratio) for r in table.rows if not r.degenerate)
    assert table.summary[0].evaluated == 2

    check = cl.stability_scaling_check(sc, cl.sine_mode_field(sc.space, 1, 0.01), 2.0)
    assert check.ratio_rel_deviation <= 1e-14

    reference = cl.solve_reference(sc)
    gamma = cl.sine_mode_field(sc.space, 1, 0.05)
    zero = cl.make_field(sc.space)
    perturbed = cl.solve_perturbed(sc, gamma, zero, zero)
    res = cl.snapshot_identity_residual(perturbed, reference, gamma)
    assert res.norm <= 5e-3 * res.y_norm


def test_run_command_rerun_is_byte_identical(coarse_config, tmp_path):
    d1, d2 = tmp_path / "r1", tmp_path / "r2"
    assert cl.run_command("stab-b", coarse_config, str(d1), 7) == 0
    assert cl.run_command("stab-b", coarse_config, str(d2), 7) == 0
    for name in ("stability.csv", "scaling.csv"):
        assert (d1 / name).read_bytes() == (d2 / name).read_bytes()
    assert (d1 / "manifest.json").exists()
