import math
import os
import pathlib

import numpy as np
import pytest

import isodyn

SCENARIOS = pathlib.Path(os.environ.get("ISODYN_SCENARIO_DIR", pathlib.Path(__file__).parents[2] / "scenarios"))

X0 = np.array([1.0, 0.2, 0.1])
PI0 = np.array([0.1, 0.8, 0.3])
Q0 = np.array([0.3, 0.5, 0.8])
CHARGE = float(Q0 @ X0 / np.linalg.norm(X0))


def test_algebra():
    assert np.allclose(isodyn.bracket([1, 0, 0], [0, 1, 0]), [0, 0, 1])
    assert isodyn.inner([1, 2, 3], [1, 2, 3]) == 14.0
    r = isodyn.exp_rotation([0, 0, math.pi / 2])
    assert np.allclose(r @ [1, 0, 0], [0, 1, 0])
    assert np.allclose(isodyn.adjoint([0, 0, math.pi / 2], [1, 0, 0]), [0, 1, 0])


def test_fields():
    wy = isodyn.GaugeField.wu_yang()
    x = np.array([0.4, -0.3, 0.8])
    assert wy.name
    assert len(wy.field_strength(x)) == 3
    assert isodyn.check_f_from_a(wy, x, 1e-4) < 1e-6
    with pytest.raises(isodyn.SingularPoint):
        wy.potential(np.zeros(3))
    assert isodyn.GaugeField.diatomic(0.5).kappa == 0.5


def test_reference_orbit():
    state = isodyn.ParticleState(X0, PI0, Q0)
    cfg = isodyn.IntegratorConfig("rk4", 1e-3, 50.0, 10)
    traj = isodyn.integrate(state, isodyn.GaugeField.wu_yang(), isodyn.ScalarPotential(CHARGE, -1.0, 0.0), cfg)
    assert traj.completed
    samples = traj.samples
    assert samples.shape == (5001, 10)
    q2 = np.sum(samples[:, 7:10] ** 2, axis=1)
    assert np.max(np.abs(q2 - q2[0])) < 1e-9
    drift = traj.drift_report()
    assert drift["all_pass"]
    conic = traj.conic()
    assert conic["conicFit"]["type"] == "ellipse"
    assert traj.cone()["maxDeviation"] < 1e-6
    assert traj.covariant_residual() < 1e-6


def test_gauge_covariance():
    state = isodyn.ParticleState(X0, PI0, Q0)
    cfg = isodyn.IntegratorConfig("rk4", 1e-3, 5.0, 10)
    r = isodyn.gauge_covariance(state, isodyn.GaugeField.diatomic(0.5), None, cfg, isodyn.GaugeFunction.random(7))
    assert r["maxPositionDeviation"] < 1e-7
    assert r["maxIsospinDeviation"] < 1e-6


def test_poisson_bracket():
    s = isodyn.ParticleState([0.7, -0.2, 1.1], [0.3, 0.1, -0.4], [0.2, 0.9, -0.3])
    field = isodyn.GaugeField.wu_yang()
    assert abs(isodyn.poisson_bracket(lambda p: p.x[0], lambda p: p.pi[0], s, field) - 1.0) < 1e-8
    qq = isodyn.poisson_bracket(lambda p: p.Q[0], lambda p: p.Q[1], s, field)
    assert abs(qq + s.Q[2]) < 1e-8


def test_van_holten():
    report = isodyn.builtin_ansatz("rotation", isodyn.GaugeField.wu_yang(), [1, 2, 2])
    assert report["pass"]
    rl = isodyn.builtin_ansatz("runge-lenz", isodyn.GaugeField.diatomic(0.5), potential="fixed")
    assert not rl["pass"]
    # The radial charge written as a Python callable.
    custom = isodyn.van_holten("q", scalar=lambda x, Q: float(Q @ x / np.linalg.norm(x)),
                               field=isodyn.GaugeField.wu_yang(), samples=16)
    assert custom["pass"]


def test_kk_compare():
    r = isodyn.kk_compare("uniform-magnetic", 1.5, 1.0, [0.3, -0.2, 0.1], [0.4, 0.3, 0.2], tau_end=5.0)
    assert r["maxDeviation"] < 1e-6
    assert r["qDrift"] < 1e-8


def test_simulate(tmp_path):
    assert isodyn.simulate(SCENARIOS / "wu_yang_circle.ini", tmp_path) == 0
    assert (tmp_path / "wu_yang_circle_drift.json").exists()
    assert isodyn.simulate(SCENARIOS / "guard_radius_violation.ini", tmp_path) == 2


def test_validation():
    with pytest.raises(isodyn.ValidationError):
        isodyn.IntegratorConfig("euler")
    with pytest.raises(ValueError):
        isodyn.IntegratorConfig("rk4", -1.0)
