"""Smoke tests for the python bindings."""

import json
import math

import pytest

import pzshell


def strip_config(**over):
    cfg = {
        "geometry": {"Lx": 1.0, "Ly": 0.2, "theta": {"family": "flat"}},
        "material": {"lambda": 2.0, "mu": 1.0, "bending_mode": "standard"},
        "mesh": {"nx": 4, "ny": 2, "nz": 2, "nx2d": 64, "ny2d": 4},
        "boundary": {
            "clamped_sides": ["x0", "x1"],
            "electrode_sides": ["x0"],
            "guided_sides": ["y0", "y1"],
        },
        "solve": {"m_count": 3, "eps_list": [0.1], "seed": 7},
    }
    cfg.update(over)
    return json.dumps(cfg)


def coupled_config(m_count=1, eps_list=(0.2, 0.1)):
    return json.dumps(
        {
            "geometry": {
                "Lx": 1.0,
                "Ly": 1.0,
                "theta": {"family": "paraboloid", "coeffs": [0.5, 0.5]},
            },
            "material": {
                "lambda": 2.0,
                "mu": 1.0,
                "p_hat": [
                    [0, 0, 0, 0, 0.2, 0],
                    [0, 0, 0, 0.2, 0, 0],
                    [0.4, 0.4, 0.3, 0.5, 0.5, 0],
                ],
                "e_hat": [1.5, 1.5, 2.0, 0, 0, 0],
                "bending_mode": "standard",
            },
            "mesh": {"nx": 6, "ny": 6, "nz": 2, "nx2d": 12, "ny2d": 12},
            "boundary": {
                "clamped_sides": ["x0", "x1", "y0", "y1"],
                "electrode_sides": ["x0", "x1", "y0", "y1"],
            },
            "solve": {"m_count": m_count, "eps_list": list(eps_list), "seed": 11},
        }
    )


def test_solve2d_beam_anchor():
    rep = pzshell.solve2d(strip_config())
    k1 = 4.7300407448627040
    assert abs(rep["xi"][0] - 2.0 * k1**4) <= 0.01 * 2.0 * k1**4
    assert rep["xi_bulk"][0] == pytest.approx(rep["xi"][0] / 2.0)
    assert rep["gram_residual"] <= 1e-8


def test_solve3d_returns_positive_spectrum():
    r = pzshell.solve3d(coupled_config(m_count=2), eps=0.1)
    assert r["eps"] == 0.1
    assert len(r["xi"]) == 2
    assert r["xi"][0] > 0.0
    assert r["xi"][0] <= r["xi"][1]
    assert max(r["residuals"]) <= 1e-8


def test_sweep_structure_and_overlap():
    res = pzshell.sweep(coupled_config())
    assert len(res["rows"]) == 2
    eps_seen = [row["eps"] for row in res["rows"]]
    assert eps_seen == [0.2, 0.1]
    for row in res["rows"]:
        assert row["overlap"] > 0.5
        assert not row["flagged"]
    assert res["rows"][1]["xi_gap"] < res["rows"][0]["xi_gap"]


def test_validate_all_pass():
    checks = pzshell.validate(coupled_config())
    assert checks
    failed = [c["name"] for c in checks if not c["passed"]]
    assert failed == []


def test_limit_coefficients_closed_form():
    c = pzshell.limit_coefficients(
        2.0,
        1.0,
        [[0, 0, 0, 0, 0, 0], [0, 0, 0, 0, 0, 0], [0.3, 0, 1.0, 0.5, 0.5, 0]],
        [1.0, 1.0, 2.0, 0, 0, 0],
    )
    assert c["p33"] == pytest.approx(0.5 + 0.25 + 2.0)
    assert c["p3ab"][0][0] == pytest.approx(0.3 - 0.5)
    assert c["bend_lapl"] == pytest.approx(8.0 / 12.0)
    assert c["bend_hess"] == pytest.approx(4.0 / 3.0)


def test_config_error_maps_to_exception():
    bad = json.loads(coupled_config())
    bad["material"]["e_hat"] = [1.0, 1.0, -2.0, 0, 0, 0]
    with pytest.raises(pzshell.ConfigError):
        pzshell.validate(json.dumps(bad))


def test_bending_mode_switch_changes_the_limit():
    std = pzshell.solve2d(strip_config())
    cfg = json.loads(strip_config())
    cfg["material"]["bending_mode"] = "as-printed"
    printed = pzshell.solve2d(json.dumps(cfg))
    # lambda = 2 mu makes the printed denominator smaller: 16/9 vs 2
    assert printed["xi"][0] == pytest.approx(std["xi"][0] * (16.0 / 9.0) / 2.0, rel=1e-3)


def test_determinism():
    a = pzshell.sweep(coupled_config())
    b = pzshell.sweep(coupled_config())
    assert a["rows"] == b["rows"]
