import json

import numpy as np
import pytest

import hybrid_ehrenfest as he


def test_commutator_and_purity():
    # [σx/2, σy/2] coordinates in the −i convention: 2 (a × b)
    assert he.commutator([0, 0.5, 0, 0], [0, 0, 0.5, 0]) == pytest.approx([0, 0, 0, 0.5])
    assert he.purity([0.5, 0, 0, 0.5]) == pytest.approx(0.5)


def test_von_neumann_entropy_of_maximally_mixed_qubit():
    assert he.von_neumann_entropy(np.eye(2) / 2) == pytest.approx(np.log(2))


def test_closed_form_closure_at_the_isotropic_point():
    r = he.closure([0.5, 0, 0, 0])
    second = r["second"]
    assert second.shape == (4, 4)
    assert np.diag(second)[1:] == pytest.approx([1 / 12] * 3, abs=1e-15)
    assert second[0, 0] == pytest.approx(0.25)
    assert r["feasible"]


def test_numeric_closure_is_feasible_and_no_worse_than_closed_form():
    mu = [0.5, 0.1, -0.05, 0.2]
    a = he.closure(mu)
    b = he.closure(mu, method="numeric", entropy_order=1)
    assert b["converged"] and b["feasible"]
    assert b["second"][0] == pytest.approx(a["second"][0], abs=1e-12)  # fixed by the first moments
    assert b["entropy"] >= a["entropy"] - 1e-12


def test_trajectory_conserves_energy_and_norm():
    sc = he.scenario("paper_example")
    tr = he.trajectory(sc, R=1.0, P=0.5, bloch=[0, 0, 1], t_end=2.0, dt=1e-3, stride=10)
    assert not tr["aborted"]
    assert np.max(np.abs(tr["energy"] - tr["energy"][0])) < 1e-9 * abs(tr["energy"][0])
    assert np.allclose(np.linalg.norm(tr["bloch"], axis=1), 1.0, atol=1e-12)


def test_mixture_moments_trace_identity():
    sc = he.scenario("paper_example")
    grid = he.PhaseGrid(-6, 6, -6, 6, 32, 32)
    f = he.mixture_moments(sc, grid, order=2)
    assert f.F.shape == (32, 32)
    assert np.array_equal(2 * f.first[..., 0], f.F)
    assert np.max(np.abs(2 * f.second[..., 0, :] - f.first)) < 1e-15


def test_ensemble_estimate_integrates_to_one():
    sc = he.scenario("uncoupled")
    ens = he.sample_ensemble(sc, 5000, seed=3)
    assert len(ens) == 5000
    grid = he.PhaseGrid(-8, 8, -8, 8, 48, 48)
    f = he.estimate_moments(ens, grid, order=1, bandwidth=0.5)
    cell = (grid.R[1] - grid.R[0]) * (grid.P[1] - grid.P[0])
    assert f.F.sum() * cell == pytest.approx(1.0, abs=1e-3)
    ens = he.propagate(ens, sc, 0.1, 1e-2)
    value, se = he.ensemble_average(ens, sc, "sigma3")
    assert np.isfinite(value) and se >= 0


def test_effective_evolution_conserves_probability():
    sc = he.scenario("paper_example")
    grid = he.PhaseGrid(-8, 8, -8, 8, 32, 32)
    r = he.evolve_effective(he.mixture_moments(sc, grid), sc, t_end=0.2, dt=1e-3, sample_times=[0.0, 0.2])
    assert not r["aborted"]
    assert [t for t, _ in r["snapshots"]] == [0.0, 0.2]
    assert r["max_probability_drift"] < 1e-6


def test_fig1_scan_shape():
    a = he.fig1_scan(he.scenario("paper_example"), P_fixed=1.0, nR=11, ntheta=7)
    assert a.shape == (77, 4)


def test_run_driver_reports_config_errors(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"scenario": {"name": "paper_example"}}))
    status, _, err = he.run("evolve-effective", str(cfg), str(tmp_path / "o"))
    assert status == 2 and "grid" in err


def test_bad_arguments_raise():
    with pytest.raises(ValueError):
        he.scenario("nope")
    with pytest.raises(ValueError):
        he.PhaseGrid(0, 1, 0, 1, 4, 4)
