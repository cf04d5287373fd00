import math
import warnings

import numpy as np
import pytest

from mathieuwkb.angular_basis import SymmetryClass, build_tables
from mathieuwkb.errors import ConfigurationError, FallbackWarning
from mathieuwkb.evaluator import (DEFAULT_CONFIG, Branch, EvaluatorConfig,
                                  classify, evaluate, first_kind_ratio,
                                  radius_map, residual)
from mathieuwkb.wkb import make_action_context, wkb_inside, wkb_turning

from oracles import first_kind_ode

EV, OD = SymmetryClass.EVEN, SymmetryClass.ODD
CFG = DEFAULT_CONFIG


def test_config_invariants():
    EvaluatorConfig(n0=6, eps0=0.005, eps1=0.1)
    with pytest.raises(ConfigurationError):
        EvaluatorConfig(n0=0)
    with pytest.raises(ConfigurationError):
        EvaluatorConfig(eps0=1.5)
    with pytest.raises(ConfigurationError):
        EvaluatorConfig(eps1=0.0)
    with pytest.raises(ConfigurationError):
        EvaluatorConfig(turning_metric="bogus")


def test_branch_selection(table_pi2):
    # low index -> series regardless of u
    for u in (0.0, 1.0, 3.0):
        assert classify(table_pi2, CFG, EV, 3, u) is Branch.SERIES
    # 1/h >= eps0 keeps the series through n = 14 at theta = pi^2
    assert classify(table_pi2, CFG, EV, 14, 0.5) is Branch.SERIES
    assert classify(table_pi2, CFG, EV, 15, 0.5) is not Branch.SERIES
    # n = 20: barrier interior at small u, Airy window near u*
    assert classify(table_pi2, CFG, EV, 20, 0.1) is Branch.WKB_INSIDE
    h = table_pi2.char(EV, 20)
    u_star = math.acosh(h / (2.0 * table_pi2.theta)) / 2.0
    assert classify(table_pi2, CFG, EV, 20, u_star) is Branch.WKB_TURNING
    # exactly at the metric boundary the turning branch wins (>=)
    u_b = math.acosh(CFG.eps1 * h / (2.0 * table_pi2.theta)) / 2.0
    assert classify(table_pi2, CFG, EV, 20, u_b) is Branch.WKB_TURNING


def test_branch_partition_total(table_pi2):
    for cls in (EV, OD):
        for n in (1, 6, 14, 15, 40, 99):
            for u in np.linspace(0.0, 3.0, 16):
                assert classify(table_pi2, CFG, cls, n, float(u)) in Branch


def test_literal_metric_moves_seam(table_pi2):
    lit = EvaluatorConfig(turning_metric="coshu")
    n = 30
    h = table_pi2.char(EV, n)
    # a point that is turning under cosh(2u) but interior under cosh(u)
    u = 1.5
    assert 2.0 * table_pi2.theta * math.cosh(2 * u) / h >= 0.1
    assert 2.0 * table_pi2.theta * math.cosh(u) / h < 0.1
    assert classify(table_pi2, CFG, EV, n, u) is Branch.WKB_TURNING
    assert classify(table_pi2, lit, EV, n, u) is Branch.WKB_INSIDE


def test_monotone_config_response(table_pi2):
    # raising eps1 moves the interior/turning seam to larger u
    n = 20
    seams = []
    for eps1 in (0.05, 0.1, 0.2):
        cfg = EvaluatorConfig(eps1=eps1)
        grid = np.linspace(0.0, 2.0, 400)
        branches = [classify(table_pi2, cfg, EV, n, float(u)) for u in grid]
        first_turn = next(u for u, b in zip(grid, branches)
                          if b is Branch.WKB_TURNING)
        seams.append(first_turn)
    assert seams[0] < seams[1] < seams[2]


def test_evaluate_matches_forced_branches(table_pi2):
    n, u = 20, 0.3
    val, br = evaluate(table_pi2, CFG, EV, n, u)
    assert br is Branch.WKB_INSIDE
    ctx = make_action_context(table_pi2.char(EV, n), table_pi2.theta)
    assert val == wkb_inside(ctx, table_pi2, EV, n, u)
    val, br = evaluate(table_pi2, CFG, EV, n, 1.8)
    assert br is Branch.WKB_TURNING
    assert val == wkb_turning(ctx, table_pi2, EV, n, 1.8)


def test_seam_continuity_same_point(table_pi2):
    # the two formulas agree at the dispatch seam for every WKB mode
    for cls in (EV, OD):
        for n in (15, 20, 33, 50, 75, 99):
            h = table_pi2.char(cls, n)
            ctx = make_action_context(h, table_pi2.theta)
            u_b = math.acosh(CFG.eps1 * h / (2.0 * table_pi2.theta)) / 2.0
            for u in (u_b - 5e-4, u_b + 5e-4):
                wi = wkb_inside(ctx, table_pi2, cls, n, u)
                wt = wkb_turning(ctx, table_pi2, cls, n, u)
                assert abs(wi - wt) <= 1e-2 * abs(wi)


def test_series_wkb_fallback_warns():
    # large theta makes low characteristic values negative: the literal
    # 1/h >= eps0 rule sends n >= n0 to WKB, where no barrier exists and
    # the evaluator must fall back to the series with a warning
    theta = 120.0
    table = build_tables(theta, 12, 140)
    n = next(n for n in range(6, 13) if table.char(EV, n) < 2 * theta
             and not (1.0 / table.char(EV, n) >= CFG.eps0))
    with warnings.catch_warnings(record=True) as rec:
        warnings.simplefilter("always")
        val, br = evaluate(table, CFG, EV, n, 0.4)
    assert br is Branch.SERIES
    assert any(issubclass(w.category, FallbackWarning) for w in rec)
    assert np.isfinite(val.real) and np.isfinite(val.imag)


def test_residual_series_branch_small(table_pi2):
    eps = residual(table_pi2, CFG, EV, 8, np.array([0.5]))
    assert eps[0] <= 1e-6


def test_residual_wkb_statistics(table_pi2):
    grid = np.arange(0.05, 3.0001, 0.05)
    h = table_pi2.char(EV, 20)
    u_star = math.acosh(h / (2.0 * table_pi2.theta)) / 2.0
    eps = residual(table_pi2, CFG, EV, 20, grid)
    outside = [e for u, e in zip(grid, eps)
               if not np.isnan(e) and abs(u - u_star) >= 0.2]
    inside = [e for u, e in zip(grid, eps)
              if not np.isnan(e) and 0.02 <= abs(u - u_star) < 0.2]
    assert np.median(outside) < 5e-4
    assert np.max(outside) < 5e-3
    # the local error bump near the turning point is visible
    assert np.max(inside) > 3.0 * np.median(outside)


def test_residual_grid_preconditions(table_pi2):
    with pytest.raises(ConfigurationError):
        residual(table_pi2, CFG, EV, 8, np.array([0.0, 0.5]))
    with pytest.raises(ConfigurationError):
        residual(table_pi2, CFG, EV, 8, np.array([0.5, 0.5 + CFG.fd_step]))


def test_residual_missing_below_noise_floor(table_pi2):
    # series-dispatched mode whose imaginary part is beneath the summation
    # noise floor at small u: reported missing, not huge
    eps = residual(table_pi2, CFG, OD, 13, np.array([0.1, 0.2]))
    assert np.all(np.isnan(eps))


@pytest.mark.parametrize("cls,n,u", [
    (EV, 20, 0.5), (EV, 20, 2.5), (EV, 40, 1.0),
    (OD, 20, 0.5), (OD, 99, 2.0),
])
def test_first_kind_ratio_against_ode(table_pi2, cls, n, u):
    ref = first_kind_ode(table_pi2.char(cls, n), table_pi2.theta, u,
                         odd=cls is OD)(u)
    val = first_kind_ratio(table_pi2, CFG, cls, n, u)
    assert abs(val - ref) <= 6e-3 * abs(ref)


def test_first_kind_ratio_series_branch(table_pi2):
    # dispatched series modes reduce to exact ratios of the raw sums
    ref = first_kind_ode(table_pi2.char(EV, 9), table_pi2.theta, 0.8)(0.8)
    val = first_kind_ratio(table_pi2, CFG, EV, 9, 0.8)
    assert abs(val - ref) <= 1e-8 * abs(ref)


def test_radius_map():
    theta = math.pi ** 2
    assert abs(radius_map(theta, 0.0) - math.pi) < 1e-14
    assert abs(radius_map(theta, math.log(2.0)) - 2.0 * math.pi) < 1e-14
    us = np.linspace(0.0, 4.0, 9)
    vals = [radius_map(theta, float(u)) for u in us]
    assert np.all(np.diff(vals) > 0.0)
