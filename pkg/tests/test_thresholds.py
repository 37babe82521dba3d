import csv
import io
import json
import math
from types import SimpleNamespace

import numpy as np
import pytest

from gkb import thresholds
from gkb.bounds import coherent_info, delta_of_gamma
from gkb.channels import AddedNoise
from gkb.errors import DomainError, NonMonotoneError
from gkb.symplectic import thermal_entropy
from gkb.thresholds import (
    SWEEP_COLUMNS,
    Axis,
    SweepGrid,
    ThresholdQuery,
    default_workers,
    run_sweep,
    security_threshold,
    threshold_of_info,
    threshold_scan,
)

# bisection to 1e-6 in omega; values frozen from this implementation
OMEGA_TH_LOSS_HALF = 1.6987508700494698


def test_threshold_query_validation():
    with pytest.raises(DomainError) as err:
        ThresholdQuery("noise_vs_zeta", 0.5)
    assert err.value.param == "family"
    with pytest.raises(DomainError):
        ThresholdQuery("loss_vs_eta", 1.5)
    with pytest.raises(DomainError):
        ThresholdQuery("loss_vs_eta", 0.5, (5.0, 2.0))


def test_info_threshold_loss_half():
    w = threshold_of_info("loss_vs_eta", 0.5)
    assert thermal_entropy(w) == pytest.approx(1.0, abs=1e-10)
    assert w == pytest.approx(1.587630746681043, abs=1e-10)


def test_info_threshold_limits():
    assert threshold_of_info("loss_vs_eta", 1e-9) == pytest.approx(1.0, abs=1e-6)
    assert threshold_of_info("amp_vs_g", 1e9) == pytest.approx(1.0, abs=1e-6)


def test_info_threshold_unknown_family():
    with pytest.raises(DomainError):
        threshold_of_info("noise", 0.5)


def test_loss_threshold_dominates_info():
    th = security_threshold(ThresholdQuery("loss_vs_eta", 0.5))
    assert th.omega == pytest.approx(OMEGA_TH_LOSS_HALF, abs=1e-6)
    assert th.bracket.width <= 1e-6
    assert th.bracket.f_lo > 0 >= th.bracket.f_hi
    assert float(th) >= threshold_of_info("loss_vs_eta", 0.5)


def test_amp_threshold_dominates_info():
    th = security_threshold(ThresholdQuery("amp_vs_g", 2.0))
    assert th.omega >= threshold_of_info("amp_vs_g", 2.0)
    # g = 1/eta duality: the amplifier at g = 2 shares the loss threshold at eta = 1/2
    assert th.omega == pytest.approx(OMEGA_TH_LOSS_HALF, abs=1e-6)


def test_loss_threshold_grows_towards_unit_transmissivity():
    high = security_threshold(ThresholdQuery("loss_vs_eta", 0.999, (1.0, 1e4)))
    mid = security_threshold(ThresholdQuery("loss_vs_eta", 0.9, (1.0, 1e4)))
    assert high.diagnostics == ()
    assert high.omega > 100.0
    assert high.omega >= mid.omega


def test_threshold_beyond_bracket_reported():
    th = security_threshold(ThresholdQuery("loss_vs_eta", 0.999, (1.0, 200.0)))
    assert th.omega == 200.0 and th.bracket is None
    assert "beyond" in th.diagnostics[0]


def test_no_security_in_bracket_reported():
    th = security_threshold(ThresholdQuery("loss_vs_eta", 0.5, (10.0, 200.0)))
    assert th.omega == 10.0
    assert "no security" in th.diagnostics[0]


def test_non_monotone_rate_rejected(monkeypatch):
    def fake(spec, opts=None):
        return SimpleNamespace(lower_bound=math.cos(spec.omega))

    monkeypatch.setattr(thresholds, "lower_bound", fake)
    with pytest.raises(NonMonotoneError):
        security_threshold(ThresholdQuery("loss_vs_eta", 0.5, (1.0, 200.0)))


def test_threshold_scan_rows():
    rows = threshold_scan("loss_vs_eta", [0.3, 0.6], tol=1e-6)
    assert [r[0] for r in rows] == [0.3, 0.6]
    for x, w_lb, w_info, diag in rows:
        assert w_lb >= w_info
        assert diag == ""


# -- sweeps -------------------------------------------------------------------


def test_axis_values_and_validation():
    ax = Axis("gamma", 1.0, 50.0, 7, "log")
    v = ax.values()
    assert v[0] == 1.0 and v[-1] == 50.0
    assert np.allclose(np.diff(np.log(v)), np.log(50.0) / 6)
    assert np.allclose(np.diff(Axis("eta", 0.1, 0.9, 5).values()), 0.2)
    with pytest.raises(DomainError):
        Axis("eta", 0.1, 0.9, 1)
    with pytest.raises(DomainError):
        Axis("eta", 0.9, 0.1, 5)
    with pytest.raises(DomainError):
        Axis("eta", 0.1, 0.9, 5, "cubic")
    with pytest.raises(DomainError):
        Axis("zeta", 0.0, 1.0, 5, "log")


def test_grid_validation():
    with pytest.raises(DomainError) as err:
        SweepGrid("loss", [Axis("g", 1.1, 2.0, 3)], {"omega": 3.0})
    assert err.value.param == "g"
    with pytest.raises(DomainError):
        SweepGrid("loss", [Axis("eta", 0.1, 0.9, 3)], {"eta": 0.5, "omega": 3.0})
    with pytest.raises(DomainError) as err:
        SweepGrid("loss", [Axis("eta", 0.1, 0.9, 3)])
    assert err.value.param == "omega"
    with pytest.raises(DomainError):
        SweepGrid("squeezer", [Axis("eta", 0.1, 0.9, 3)])


def test_grid_points_row_major():
    grid = SweepGrid("amp", [Axis("g", 1.5, 2.5, 3), Axis("omega", 1.0, 2.0, 2)])
    pts = list(grid.points())
    assert pts[0] == {"g": 1.5, "omega": 1.0}
    assert pts[1] == {"g": 1.5, "omega": 2.0}
    assert len(pts) == 6


def test_loss_sweep_monotone():
    table = run_sweep(SweepGrid("loss", [Axis("eta", 0.05, 0.95, 19)], {"omega": 3.0}))
    assert len(table) == 19
    lb = table.column("lower_bound")
    assert np.all(np.diff(lb) >= 0)
    assert set(table.column("direction")) == {"reverse"}


def test_noise_sweep_decreasing():
    table = run_sweep(SweepGrid("noise", [Axis("zeta", 0.05, 1.0, 12, "log")]))
    assert np.all(np.diff(table.column("lower_bound")) < 0)
    assert np.all(np.isnan(table.column("param2")))


def test_delta_profile_sweep_crosses_minus_info():
    grid = SweepGrid("noise", [Axis("zeta", 0.36, 0.40, 3), Axis("gamma", 1.0, 50.0, 60, "log")])
    table = run_sweep(grid)
    assert set(table.column("diag")) == {"fixed_gamma"}
    zeta, delta = table.column("param1"), table.column("delta_g")
    for z in (0.36, 0.38, 0.40):
        above = delta[np.isclose(zeta, z)] > -coherent_info(AddedNoise(z))[0]
        assert above.any()
        # I^C > 0 at 0.36, so delta(1) = 0 already exceeds -I^C; the others cross upwards
        assert above.all() if z == 0.36 else not above[0]
    assert table.rows[1].gamma_star == pytest.approx(np.geomspace(1.0, 50.0, 60)[1])


def test_sweep_errors_captured_per_row():
    table = run_sweep(SweepGrid("noise", [Axis("zeta", -0.5, 0.5, 3)]))
    diag = table.column("diag")
    assert diag[0].startswith("error: zeta")
    assert math.isnan(table.rows[0].lower_bound)
    assert not diag[2].startswith("error")


def test_sweep_order_independent_of_workers():
    grid = SweepGrid("amp", [Axis("g", 1.1, 5.0, 6)], {"omega": 3.0})
    assert run_sweep(grid, workers=1).to_csv() == run_sweep(grid, workers=4).to_csv()


def test_csv_format():
    table = run_sweep(SweepGrid("noise", [Axis("zeta", 0.2, 0.4, 2)]))
    text = table.to_csv()
    rows = list(csv.reader(io.StringIO(text)))
    assert tuple(rows[0]) == SWEEP_COLUMNS
    assert rows[0] == "channel,param1_name,param1,param2_name,param2,gamma_star,delta_g,info_term,lower_bound,upper_bound,direction,diag".split(",")
    assert rows[1][3] == "" and rows[1][4] == ""
    # 17 significant digits round-trip exactly
    assert float(rows[1][8]) == table.rows[0].lower_bound


def test_json_mirrors_csv():
    table = run_sweep(SweepGrid("noise", [Axis("zeta", 0.2, 0.4, 2)]))
    payload = json.loads(table.to_json({"command": ["x"]}))
    assert payload["manifest"] == {"command": ["x"]}
    assert [list(r) for r in payload["rows"]] == [list(SWEEP_COLUMNS)] * 2
    assert payload["rows"][0]["param2"] is None


def test_default_workers(monkeypatch):
    monkeypatch.setenv("GKB_THREADS", "3")
    assert default_workers() == 3
    monkeypatch.setenv("GKB_THREADS", "0")
    assert default_workers() >= 1
    monkeypatch.setenv("GKB_THREADS", "many")
    assert default_workers() >= 1
