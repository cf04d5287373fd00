"""Dispatch between the exact series and the WKB formulas, plus diagnostics.

The algorithm, per characteristic value h (= a_n or b_n):

    n < n0  OR  1/h >= eps0          -> exact Bessel-product series
    otherwise, 2 theta cosh(2u)/h < eps1 -> barrier-interior WKB formula
    otherwise                            -> turning-point (Airy) formula

Everything is computed as the normalized third-kind ratio
Me^(1)_n(u)/Me^(1)'_n(0) (even class) or Ne^(1)_n(u)/Ne^(1)_n(0) (odd
class): this is the quantity the scattering series consume, and the one in
which the series prefactors cancel so the exact path stays representable
at every mode index.

When a WKB branch raises PrecisionError (no barrier because h <= 2 theta,
or exp(-S*) underflow), the evaluation falls back to the series branch and
emits FallbackWarning.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .angular_basis import CoefficientTable, SymmetryClass
from .errors import (CancellationWarning, ConfigurationError, DomainError,
                     FallbackWarning, PrecisionError)
from .radial_series import bessel_product_sum
from .wkb import ActionContext, make_action_context, wkb_inside, wkb_turning


class Branch(Enum):
    SERIES = "series"
    WKB_INSIDE = "wkb_inside"
    WKB_TURNING = "wkb_turning"


@dataclass(frozen=True)
class EvaluatorConfig:
    """Dispatch thresholds and the residual finite-difference step.

    ``turning_metric`` selects the barrier-proximity measure: "cosh2u"
    (consistent with the turning-point definition h = 2 theta cosh 2u*,
    the default) or "coshu" (the literal algorithm-text reading, kept for
    comparison).
    """

    n0: int = 6
    eps0: float = 0.005
    eps1: float = 0.1
    fd_step: float = 1e-4
    turning_metric: str = "cosh2u"

    def __post_init__(self):
        if self.n0 < 1:
            raise ConfigurationError(f"n0 must be >= 1, got {self.n0}")
        if not (0.0 < self.eps0 < 1.0):
            raise ConfigurationError(f"eps0 must lie in (0, 1), got {self.eps0}")
        if not (0.0 < self.eps1 < 1.0):
            raise ConfigurationError(f"eps1 must lie in (0, 1), got {self.eps1}")
        if self.fd_step <= 0.0:
            raise ConfigurationError(f"fd_step must be > 0, got {self.fd_step}")
        if self.turning_metric not in ("cosh2u", "coshu"):
            raise ConfigurationError(
                f"turning_metric must be 'cosh2u' or 'coshu', got {self.turning_metric!r}")


DEFAULT_CONFIG = EvaluatorConfig()


class EvalResult(NamedTuple):
    value: complex
    branch: Branch


@lru_cache(maxsize=4096)
def _context(h: float, theta: float) -> ActionContext:
    return make_action_context(h, theta)


@lru_cache(maxsize=100_000)
def _series_ratio_floor(table: CoefficientTable, class_: SymmetryClass, n: int,
                        u: float, deriv: int) -> tuple[complex, float]:
    """(ratio, imag-part cancellation noise floor of the ratio)."""
    # the ratio consumers normalize the unstable component away; the
    # cancellation diagnostic concerns the absolute printed series
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", CancellationWarning)
        diags: list = []
        num = bessel_product_sum(table, class_, n, u, deriv, diagnostics=diags)
        if class_ is SymmetryClass.EVEN:
            den = bessel_product_sum(table, class_, n, 0.0, 1)
        else:
            den = bessel_product_sum(table, class_, n, 0.0)
    floor_im = 2.0 ** -52 * diags[0].peak_im / abs(den)
    return num / den, floor_im


def _series_ratio(table: CoefficientTable, class_: SymmetryClass, n: int,
                  u: float, deriv: int) -> complex:
    return _series_ratio_floor(table, class_, n, u, deriv)[0]


def classify(table: CoefficientTable, cfg: EvaluatorConfig,
             class_: SymmetryClass, n: int, u: float) -> Branch:
    """Branch the dispatch algorithm selects for (n, u).

    The rule is literal: series iff n < n0 or 1/h >= eps0.  Modes the
    rule sends to WKB but that have no barrier (h <= 2 theta, possible at
    large theta) fail there with PrecisionError and ``evaluate`` falls
    back to the series with a warning.
    """
    h = table.char(class_, n)
    if n < cfg.n0 or (h != 0.0 and 1.0 / h >= cfg.eps0) or h == 0.0:
        return Branch.SERIES
    arg = 2.0 * u if cfg.turning_metric == "cosh2u" else u
    metric = 2.0 * table.theta * math.cosh(arg) / h
    return Branch.WKB_INSIDE if metric < cfg.eps1 else Branch.WKB_TURNING


def evaluate(table: CoefficientTable, cfg: EvaluatorConfig,
             class_: SymmetryClass, n: int, u: float, deriv: int = 0,
             force_branch: Branch | None = None) -> EvalResult:
    """Normalized third-kind ratio at (n, u) via the dispatched branch.

    force_branch overrides the dispatch (used by the residual diagnostic
    to keep finite-difference stencils on a single formula).  A WKB
    precision failure falls back to the series with FallbackWarning; the
    returned branch reports what was actually used.
    """
    if u < 0.0 or not math.isfinite(u):
        raise DomainError(f"u must be finite and >= 0, got {u}")
    branch = force_branch or classify(table, cfg, class_, n, u)
    if branch is Branch.SERIES:
        return EvalResult(_series_ratio(table, class_, n, float(u), deriv), branch)
    try:
        ctx = _context(table.char(class_, n), table.theta)
        if branch is Branch.WKB_INSIDE:
            return EvalResult(wkb_inside(ctx, table, class_, n, u, deriv), branch)
        return EvalResult(wkb_turning(ctx, table, class_, n, u, deriv), branch)
    except PrecisionError as exc:
        warnings.warn(
            f"WKB branch failed for n={n} ({class_.value}) at u={u:.4g}: {exc}; "
            "falling back to the exact series", FallbackWarning)
        return EvalResult(_series_ratio(table, class_, n, float(u), deriv),
                          Branch.SERIES)


@lru_cache(maxsize=100_000)
def _first_kind_series_anchor(table: CoefficientTable, class_: SymmetryClass,
                              n: int) -> float:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", CancellationWarning)
        if class_ is SymmetryClass.EVEN:
            return bessel_product_sum(table, class_, n, 0.0).real
        return bessel_product_sum(table, class_, n, 0.0, 1).real


def first_kind_ratio(table: CoefficientTable, cfg: EvaluatorConfig,
                     class_: SymmetryClass, n: int, u: float,
                     deriv: int = 0) -> float:
    """First-kind ratio Ce_n(u)/ce_n(0) (even) or Se_n(u)/se'_n(0) (odd).

    These are the real, exponentially growing companions of the
    third-kind ratios that enter the u_< factors of the Green series.
    Dispatches like ``evaluate``; on the WKB branches the even ratio is
    sqrt(S'(0)/S'(u)) cosh S(u) inside the barrier and an Airy form
    (assembled in log scale so the tiny leading Fourier coefficient and
    exp(-2 S*) cancel analytically) around the turning point.
    """
    if u < 0.0 or not math.isfinite(u):
        raise DomainError(f"u must be finite and >= 0, got {u}")
    branch = classify(table, cfg, class_, n, u)
    if branch is Branch.SERIES:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", CancellationWarning)
            num = bessel_product_sum(table, class_, n, u, deriv).real
        return num / _first_kind_series_anchor(table, class_, n)
    try:
        return _first_kind_wkb(table, cfg, class_, n, u, deriv, branch)
    except PrecisionError as exc:
        warnings.warn(
            f"WKB first-kind ratio failed for n={n} at u={u:.4g}: {exc}; "
            "falling back to the exact series", FallbackWarning)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", CancellationWarning)
            num = bessel_product_sum(table, class_, n, u, deriv).real
        return num / _first_kind_series_anchor(table, class_, n)


def _first_kind_wkb(table: CoefficientTable, cfg: EvaluatorConfig,
                    class_: SymmetryClass, n: int, u: float, deriv: int,
                    branch: Branch) -> float:
    from .wkb import _turning_parts  # shared smooth turning-point machinery
    from .special_functions import airy
    from .angular_basis import angular_eval

    ctx = _context(table.char(class_, n), table.theta)
    if branch is Branch.WKB_INSIDE:
        kin = ctx.h - 2.0 * ctx.theta * math.cosh(2.0 * u)
        if kin <= 0.0:
            raise PrecisionError("inside formula requested beyond the barrier")
        sp = math.sqrt(kin)
        sp0 = math.sqrt(ctx.h - 2.0 * ctx.theta)
        from .wkb import _well_action_below
        s = _well_action_below(ctx.h, 2.0 * ctx.theta, 2.0, u)
        if s > 700.0:
            raise PrecisionError(f"cosh S overflows at u={u} for n={n}")
        spp = -2.0 * ctx.theta * math.sinh(2.0 * u) / sp
        if class_ is SymmetryClass.EVEN:
            if deriv == 0:
                return math.sqrt(sp0 / sp) * math.cosh(s)
            return math.sqrt(sp0 / sp) * (
                math.sinh(s) * sp - math.cosh(s) * 0.5 * spp / sp)
        if deriv == 0:
            return math.sinh(s) / math.sqrt(sp0 * sp)
        return (math.cosh(s) * sp - math.sinh(s) * 0.5 * spp / sp) / math.sqrt(sp0 * sp)

    if deriv == 1:
        step = 1e-6 * max(1.0, abs(u))
        lo = max(u - step, 0.0)
        return (_first_kind_wkb(table, cfg, class_, n, u + step, 0, branch)
                - _first_kind_wkb(table, cfg, class_, n, lo, 0, branch)) / (u + step - lo)

    # turning branch: first kind = -(normalizer) * Im(third-kind ratio);
    # the normalizer's 1/head^2 and the formula's exp(-2 S*) cancel in logs
    sign_head, log_head = table.head_log(class_, n)
    half_pi = 0.5 * math.pi
    theta = table.theta
    if class_ is SymmetryClass.EVEN:
        if n % 2 == 0:
            mid = angular_eval(table, class_, n, half_pi)
            log_norm = math.log(2.0 / math.pi) + 2.0 * math.log(abs(mid)) - 2.0 * log_head
        else:
            mid = angular_eval(table, class_, n, half_pi, deriv=1)
            log_norm = (math.log(2.0 / math.pi) - math.log(theta)
                        + 2.0 * math.log(abs(mid)) - 2.0 * log_head)
    else:
        if n % 2 == 1:
            mid = angular_eval(table, class_, n, half_pi)
            log_norm = (math.log(2.0 / math.pi) - math.log(theta)
                        + 2.0 * math.log(abs(mid)) - 2.0 * log_head)
        else:
            mid = angular_eval(table, class_, n, half_pi, deriv=1)
            log_norm = (math.log(2.0 / math.pi) - 2.0 * math.log(theta)
                        + 2.0 * math.log(abs(mid)) - 2.0 * log_head)
    z, f = _turning_parts(ctx, u)
    if z > 0.0 and (2.0 / 3.0) * z ** 1.5 > 695.0:
        raise PrecisionError(f"Airy argument {z:.3g} overflows at u={u}")
    ai, _ = airy(z)
    sp0 = math.sqrt(ctx.h - 2.0 * ctx.theta)
    log_amp = 0.5 * math.log(math.pi) + math.log(1.5) / 6.0 - ctx.s_star
    if class_ is SymmetryClass.EVEN:
        log_mag = log_norm + log_amp + math.log(f) - 0.5 * math.log(sp0)
    else:
        log_mag = log_norm + log_amp + math.log(f) + 0.5 * math.log(sp0)
    if log_mag > 700.0:
        raise PrecisionError(f"first-kind ratio overflows at u={u} for n={n}")
    return math.exp(log_mag) * ai


def radius_map(theta: float, u: float) -> float:
    """k|x| along a radial ray: sqrt(theta) * e^u."""
    if theta < 0.0:
        raise DomainError(f"theta must be >= 0, got {theta}")
    return math.sqrt(theta) * math.exp(u)


def residual(table: CoefficientTable, cfg: EvaluatorConfig,
             class_: SymmetryClass, n: int, u_grid) -> np.ndarray:
    """ODE residual diagnostic on a u grid (NaN where undefined).

    Central second differences with step cfg.fd_step applied to the
    imaginary part of the dispatched ratio (the first-kind content),
    with the whole stencil locked to the center point's branch so the
    metric measures formula error, not dispatch-seam jumps:

        eps = |(y''/y - [h - 2 theta cosh 2u]) / (h - 2 theta cosh 2u)|

    Points where y is effectively zero are reported as NaN rather than
    as huge residuals: oscillation nodes (|y| below 5% of the local
    amplitude), and series-branch points where y sits beneath the
    cancellation noise floor of the summation, so that the
    finite-difference quotient would measure roundoff, not formula error.
    """
    u_grid = np.asarray(u_grid, dtype=float)
    if u_grid.ndim != 1 or len(u_grid) == 0:
        raise ConfigurationError("u_grid must be a nonempty 1-D array")
    if np.any(u_grid <= 0.0):
        raise ConfigurationError("grid must lie strictly inside (0, u_max]")
    if len(u_grid) > 1 and np.min(np.diff(np.sort(u_grid))) < 4.0 * cfg.fd_step:
        raise ConfigurationError(
            f"grid spacing must be >= 4*fd_step = {4.0 * cfg.fd_step}")

    h = table.char(class_, n)
    theta = table.theta
    step = cfg.fd_step
    out = np.full(len(u_grid), np.nan)
    for i, u in enumerate(u_grid):
        if u - step <= 0.0:
            continue
        branch = classify(table, cfg, class_, n, u)
        kin = h - 2.0 * theta * math.cosh(2.0 * u)
        if kin == 0.0:
            continue
        try:
            floor_im = 0.0
            if branch is Branch.SERIES:
                y_m = _series_ratio_floor(table, class_, n, float(u - step), 0)[0].imag
                y_0, floor_im = _series_ratio_floor(table, class_, n, float(u), 0)
                y_0 = y_0.imag
                y_p = _series_ratio_floor(table, class_, n, float(u + step), 0)[0].imag
                # finite differences amplify the summation noise by 4/step^2;
                # drop points where that noise swamps the quantity measured
                if 4.0 * floor_im / (step * step) > 1e-3 * abs(kin) * abs(y_0):
                    continue
            else:
                y_m = evaluate(table, cfg, class_, n, u - step, force_branch=branch).value.imag
                y_0 = evaluate(table, cfg, class_, n, u, force_branch=branch).value.imag
                y_p = evaluate(table, cfg, class_, n, u + step, force_branch=branch).value.imag
        except PrecisionError:
            continue
        local_k = math.sqrt(abs(kin))
        amp = math.hypot(y_0, (y_p - y_m) / (2.0 * step) / local_k)
        if amp == 0.0 or abs(y_0) < 0.05 * amp:
            continue
        ypp = (y_p - 2.0 * y_0 + y_m) / (step * step)
        out[i] = abs((ypp / y_0 - kin) / kin)
    return out
