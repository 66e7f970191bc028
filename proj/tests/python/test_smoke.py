import json
import os
import subprocess

import numpy as np
import pytest

import sobol_eff as se


def test_moment_map():
    assert se.sobol_from_moments(se.MomentVector(7.0, 2.5, 7.5)) == pytest.approx(0.6, abs=1e-12)
    g = se.phi_gradient(se.MomentVector(7.0, 2.5, 7.5))
    assert g == pytest.approx([0.8, -1.6, -0.48], abs=1e-12)
    with pytest.raises(se.DegenerateVariance):
        se.sobol_from_moments(se.MomentVector(1.0, 1.0, 1.0))


def test_pick_freeze_estimate():
    est = se.estimate_sobol_pf([0.0, 1.0], [1.0, 0.0])
    assert est.point == pytest.approx(-1.0, abs=1e-12)
    assert est.method == se.Method.pick_freeze
    d = est.to_dict()
    assert d["schema_version"] == 1
    assert d["ci"][0] <= d["point"] <= d["ci"][1]


def test_given_data_estimates():
    assert se.psi_rank_pairing([0.0, 1.0, 2.0], [1.0, 2.0, 3.0]) == pytest.approx(10 / 3, abs=1e-12)
    x, y = se.sample_givendata("linear_gaussian:a=1,b=1", 4000, seed=3)
    assert x.shape == (4000, 1)
    report = se.estimate_sobol_gd(x, y, seed=1)
    assert report["method"] == "given_data_onestep"
    assert abs(report["point"] - 0.5) < 0.1


def test_sampling_is_deterministic():
    a = se.sample_pickfreeze("ishigami", 100, seed=5)
    b = se.sample_pickfreeze("ishigami", 100, seed=5)
    np.testing.assert_array_equal(a[0], b[0])
    np.testing.assert_array_equal(a[1], b[1])
    assert se.model_truth("product_noise:m=tanh") is None
    with pytest.raises(se.InvalidArgument):
        se.model_truth("nope")


def test_replications():
    rep = se.run_replications("identity", "pick_freeze", 100, 50, bound_budget=100000, threads=1)
    assert rep["var_scaled"] == 0.0
    assert all(e == 1.0 for e in rep["estimates"])
    with pytest.raises(se.MissingTruth):
        se.run_replications("product_noise:m=tanh", "pick_freeze", 100, 50)


@pytest.mark.skipif("SOBOL_EFF_CLI" not in os.environ, reason="CLI path not provided")
def test_cli_matches_module(tmp_path):
    cli = os.environ["SOBOL_EFF_CLI"]
    csv = tmp_path / "pf.csv"
    subprocess.run([cli, "simulate", "linear_gaussian", "pick_freeze", "--n", "200",
                    "--seed", "4", "--out", str(csv)], check=True)
    out = subprocess.run([cli, "estimate-pf", str(csv)], check=True, capture_output=True,
                         text=True).stdout
    y, y_pf = se.sample_pickfreeze("linear_gaussian", 200, seed=4)
    assert json.loads(out)["point"] == se.estimate_sobol_pf(y, y_pf).point
