"""Green functions for wave scattering by a slit or a strip.

Elliptic coordinates x + i y = (a/2) cosh(u + i v) turn both scatterers
into the degenerate ellipse u = 0: the slit is an aperture of width a in
an infinite screen (the screen being v = 0 / v = pi with u > 0), the
strip a ribbon of width a.  The Helmholtz Green function with Neumann or
Dirichlet conditions on the scatterer separates into series over angular
Mathieu functions times normalized radial ratios, which are supplied by
the dispatching evaluator (exact series for low modes, WKB beyond).

All series are summed with an automatic tail check (stop when the last
five terms contribute below 1e-6 of the partial sum) and carry the
truncation state in the returned metadata when a full grid is evaluated.

Conventions: sources are assumed in the lower half plane (v0 < 0) as in
the underlying slit expansion; problems posed with v0 > 0 are reflected
through y -> -y, which the mirror-symmetric geometry makes exact.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache

import numpy as np

from .angular_basis import CoefficientTable, SymmetryClass, angular_eval, build_tables
from .errors import DomainError, SingularityError, TruncationWarning
from .evaluator import (DEFAULT_CONFIG, EvaluatorConfig, evaluate,
                        first_kind_ratio)
from .special_functions import hankel1
from .wkb import seed_action_below

_TAIL_RTOL = 1e-6
_TAIL_RUN = 5


class Geometry(Enum):
    SLIT = "slit"
    STRIP = "strip"


class BoundaryCondition(Enum):
    NEUMANN = "neumann"
    DIRICHLET = "dirichlet"


@dataclass(frozen=True)
class EllipticPoint:
    """Elliptic coordinates with u >= 0 and v normalized into (-pi, pi]."""

    u: float
    v: float

    def __post_init__(self):
        if not math.isfinite(self.u) or self.u < 0.0:
            raise DomainError(f"u must be finite and >= 0, got {self.u}")
        v = math.remainder(self.v, 2.0 * math.pi)
        if v <= -math.pi:
            v = math.pi
        object.__setattr__(self, "v", v)


def to_elliptic(x: float, y: float, a: float) -> EllipticPoint:
    """Invert x + i y = (a/2) cosh(u + i v) with u >= 0, v in (-pi, pi].

    Points on the focal segment (y = 0, |x| <= a/2) map to u = 0 with
    v = +arccos(2x/a).
    """
    if a <= 0.0:
        raise DomainError(f"a must be > 0, got {a}")
    if y == 0.0 and abs(x) <= 0.5 * a:
        return EllipticPoint(0.0, math.acos(2.0 * x / a))
    w = cmath.acosh(complex(x, y) / (0.5 * a))
    return EllipticPoint(max(w.real, 0.0), w.imag)


def to_cartesian(p: EllipticPoint, a: float) -> tuple[float, float]:
    """Cartesian coordinates of an elliptic point."""
    if a <= 0.0:
        raise DomainError(f"a must be > 0, got {a}")
    return (0.5 * a * math.cosh(p.u) * math.cos(p.v),
            0.5 * a * math.sinh(p.u) * math.sin(p.v))


@dataclass(frozen=True)
class GreenProblem:
    """Scattering problem: geometry, boundary condition, k, width a, source.

    theta = (k a / 4)^2 is derived, never stored.  Slit sources must lie
    off the screen (u0 > 0 and v0 not in {0, pi}); strip sources off the
    ribbon (u0 > 0).
    """

    geometry: Geometry
    bc: BoundaryCondition
    k: float
    a: float
    source: EllipticPoint
    n_terms: int = 60

    def __post_init__(self):
        if self.k <= 0.0 or self.a <= 0.0:
            raise DomainError(f"need k > 0 and a > 0, got k={self.k}, a={self.a}")
        if self.n_terms < 1:
            raise DomainError(f"n_terms must be >= 1, got {self.n_terms}")
        if self.source.u <= 0.0:
            raise DomainError(
                "source must lie off the scatterer (u0 > 0); "
                f"got u0={self.source.u}")
        if self.geometry is Geometry.SLIT and self.source.v in (0.0, math.pi):
            raise DomainError("slit source must not lie on the screen (v0 = 0 or pi)")

    @property
    def theta(self) -> float:
        return (self.k * self.a / 4.0) ** 2


@dataclass
class FieldGrid:
    """Sampled complex field over a set of points, CSV-serializable."""

    x: np.ndarray
    y: np.ndarray
    u: np.ndarray
    v: np.ndarray
    values: np.ndarray
    meta: dict = field(default_factory=dict)

    def write_csv(self, stream) -> None:
        stream.write("x,y,u,v,re,im\r\n")
        for xi, yi, ui, vi, gi in zip(self.x, self.y, self.u, self.v, self.values):
            stream.write(f"{xi:.17g},{yi:.17g},{ui:.17g},{vi:.17g},"
                         f"{gi.real:.17g},{gi.imag:.17g}\r\n")


@lru_cache(maxsize=16)
def _table_for(theta: float, n_terms: int) -> CoefficientTable:
    return build_tables(theta, n_terms, n_terms + 120)


class _ModeBank:
    """Per-problem cache of tables and per-mode source-side factors."""

    def __init__(self, theta: float, n_terms: int,
                 cfg: EvaluatorConfig = DEFAULT_CONFIG):
        self.table = _table_for(theta, n_terms)
        self.cfg = cfg
        self.n_terms = n_terms

    def rd(self, n: int, u: float, deriv: int = 0) -> complex:
        """Me^(1)_n(u) / Me^(1)'_n(0)."""
        return evaluate(self.table, self.cfg, SymmetryClass.EVEN, n, u, deriv).value

    def rv_even(self, n: int, u: float, deriv: int = 0) -> complex:
        """Me^(1)_n(u) / Me^(1)_n(0)."""
        return self.rd(n, u, deriv) / self.rd(n, 0.0)

    def rv_odd(self, n: int, u: float, deriv: int = 0) -> complex:
        """Ne^(1)_n(u) / Ne^(1)_n(0)."""
        return evaluate(self.table, self.cfg, SymmetryClass.ODD, n, u, deriv).value

    @lru_cache(maxsize=4096)
    def rho_odd(self, n: int) -> complex:
        """Ne^(1)'_n(0) / Ne^(1)_n(0)."""
        return evaluate(self.table, self.cfg, SymmetryClass.ODD, n, 0.0, 1).value

    def fk_even(self, n: int, u: float, deriv: int = 0) -> float:
        """Ce_n(u) / ce_n(0)."""
        return first_kind_ratio(self.table, self.cfg, SymmetryClass.EVEN, n, u, deriv)

    def fk_odd(self, n: int, u: float, deriv: int = 0) -> float:
        """Se_n(u) / se'_n(0)."""
        return first_kind_ratio(self.table, self.cfg, SymmetryClass.ODD, n, u, deriv)

    def ce(self, n: int, v: float, deriv: int = 0) -> float:
        return angular_eval(self.table, SymmetryClass.EVEN, n, v, deriv)

    def se(self, n: int, v: float, deriv: int = 0) -> float:
        return angular_eval(self.table, SymmetryClass.ODD, n, v, deriv)

    def seed(self, u: float) -> None:
        """Vector warm-up of the barrier-action cache at one radius."""
        hs = np.concatenate([self.table.char_even, self.table.char_odd[1:]])
        seed_action_below(self.table.theta, u, hs[np.isfinite(hs)])


@lru_cache(maxsize=32)
def _bank(theta: float, n_terms: int, cfg: EvaluatorConfig) -> _ModeBank:
    return _ModeBank(theta, n_terms, cfg)


def _sum_modes(term, n_start: int, n_stop: int, where: str):
    """Sum term(n) for n in [n_start, n_stop] with the five-term tail rule."""
    total = 0.0 + 0.0j
    peak = 0.0
    recent: list[float] = []
    for n in range(n_start, n_stop + 1):
        t = term(n)
        total += t
        peak = max(peak, abs(total))
        recent.append(abs(t))
        if len(recent) > _TAIL_RUN:
            recent.pop(0)
        if len(recent) == _TAIL_RUN and sum(recent) < _TAIL_RTOL * abs(total):
            return total, True
    # a sum that is zero to roundoff (e.g. on a symmetry line) is converged
    if recent and sum(recent) >= _TAIL_RTOL * max(abs(total), 1e-13 * peak + 1e-300):
        warnings.warn(
            f"{where}: mode series not tail-converged at n_terms "
            f"(last five terms {sum(recent):.2e} vs sum {abs(total):.2e})",
            TruncationWarning)
    return total, False


def _check_off_source(problem: GreenProblem, p: EllipticPoint) -> None:
    x, y = to_cartesian(p, problem.a)
    x0, y0 = to_cartesian(problem.source, problem.a)
    if math.hypot(x - x0, y - y0) < 1e-12 * problem.a:
        raise SingularityError("field point coincides with the source")


def green_slit(problem: GreenProblem, p: EllipticPoint,
               deriv: str | None = None) -> complex:
    """Green function of the slit problem at field point p.

    deriv selects term-wise analytic derivatives: None for the value,
    "u" or "v" for the corresponding elliptic partial derivative.  On the
    screen (v = 0 or pi) the upper-face branch is evaluated.
    """
    if problem.geometry is not Geometry.SLIT:
        raise DomainError("green_slit requires a slit problem")
    _check_off_source(problem, p)
    u, v = p.u, p.v
    u0, v0 = problem.source.u, problem.source.v
    sign_flip = 1.0
    if v0 > 0.0:
        # reflect the whole problem through y -> -y (exact by symmetry)
        v0 = -v0
        v = -v if v != math.pi else math.pi
        if deriv == "v":
            sign_flip = -1.0

    bank = _bank(problem.theta, problem.n_terms, DEFAULT_CONFIG)
    du_a = 1 if deriv == "u" else 0
    dv_a = 1 if deriv == "v" else 0
    u_lo, u_hi = min(u, u0), max(u, u0)
    field_is_lo = u <= u0
    bank.seed(u)
    bank.seed(u0)

    if problem.bc is BoundaryCondition.NEUMANN:
        def term(n):
            ang = bank.ce(n, v, dv_a) * bank.ce(n, v0)
            if ang == 0.0:
                return 0.0j
            if v >= 0.0:
                rad = bank.rd(n, u, du_a) * bank.rv_even(n, u0)
            else:
                if field_is_lo:
                    pair = bank.rd(n, u_hi) * bank.fk_even(n, u_lo, du_a)
                else:
                    pair = bank.rd(n, u_hi, du_a) * bank.fk_even(n, u_lo)
                rad = 2.0 * pair - bank.rd(n, u, du_a) * bank.rv_even(n, u0)
            return rad * ang / math.pi
        total, _ = _sum_modes(term, 0, problem.n_terms, "green_slit")
        return sign_flip * total

    def term(n):
        ang = bank.se(n, v, dv_a) * bank.se(n, v0)
        if ang == 0.0:
            return 0.0j
        if v >= 0.0:
            rad = -bank.rv_odd(n, u, du_a) * bank.rv_odd(n, u0) / bank.rho_odd(n)
        else:
            if field_is_lo:
                pair = bank.rv_odd(n, u_hi) * bank.fk_odd(n, u_lo, du_a)
            else:
                pair = bank.rv_odd(n, u_hi, du_a) * bank.fk_odd(n, u_lo)
            rad = -2.0 * pair + bank.rv_odd(n, u, du_a) * bank.rv_odd(n, u0) / bank.rho_odd(n)
        return rad * ang / math.pi
    total, _ = _sum_modes(term, 1, problem.n_terms, "green_slit")
    return sign_flip * total


def _hankel_pair(problem: GreenProblem, p: EllipticPoint, deriv: str | None):
    """H0(k|x-x0|) and H0(k|x-x0'|) (or their u/v derivatives) at p."""
    a, k = problem.a, problem.k
    x, y = to_cartesian(p, a)
    x0, y0 = to_cartesian(problem.source, a)
    out = []
    for ys in (y0, -y0):
        d = math.hypot(x - x0, y - ys)
        if d == 0.0:
            raise SingularityError("field point on a source/image location")
        if deriv is None:
            out.append(hankel1(0, k * d))
            continue
        if deriv == "u":
            dx = 0.5 * a * math.sinh(p.u) * math.cos(p.v)
            dy = 0.5 * a * math.cosh(p.u) * math.sin(p.v)
        else:
            dx = -0.5 * a * math.cosh(p.u) * math.sin(p.v)
            dy = 0.5 * a * math.sinh(p.u) * math.cos(p.v)
        dd = ((x - x0) * dx + (y - ys) * dy) / d
        out.append(-k * hankel1(1, k * d) * dd)
    return out


def green_strip(problem: GreenProblem, p: EllipticPoint,
                deriv: str | None = None) -> complex:
    """Green function of the strip problem at field point p.

    The field point may lie on the strip itself (u = 0), which is how the
    boundary-condition checks sample it.
    """
    if problem.geometry is not Geometry.STRIP:
        raise DomainError("green_strip requires a strip problem")
    _check_off_source(problem, p)
    bank = _bank(problem.theta, problem.n_terms, DEFAULT_CONFIG)
    u, v = p.u, p.v
    u0, v0 = problem.source.u, problem.source.v
    du_a = 1 if deriv == "u" else 0
    dv_a = 1 if deriv == "v" else 0
    u_lo, u_hi = min(u, u0), max(u, u0)
    field_is_lo = u <= u0
    bank.seed(u)
    bank.seed(u0)

    h_src, h_img = _hankel_pair(problem, p, deriv)

    if problem.bc is BoundaryCondition.NEUMANN:
        def term(n):
            ang = bank.se(n, v, dv_a) * bank.se(n, v0)
            if ang == 0.0:
                return 0.0j
            if field_is_lo:
                pair = bank.rv_odd(n, u_hi) * bank.fk_odd(n, u_lo, du_a)
            else:
                pair = bank.rv_odd(n, u_hi, du_a) * bank.fk_odd(n, u_lo)
            rad = pair - bank.rv_odd(n, u0) * bank.rv_odd(n, u, du_a) / bank.rho_odd(n)
            return rad * ang / math.pi
        series, _ = _sum_modes(term, 1, problem.n_terms, "green_strip")
        return (h_src + h_img) / 8j - series

    def term(n):
        ang = bank.ce(n, v, dv_a) * bank.ce(n, v0)
        if ang == 0.0:
            return 0.0j
        if field_is_lo:
            pair = bank.rd(n, u_hi) * bank.fk_even(n, u_lo, du_a)
        else:
            pair = bank.rd(n, u_hi, du_a) * bank.fk_even(n, u_lo)
        rad = pair - bank.rd(n, u0) * bank.rv_even(n, u, du_a)
        return rad * ang / math.pi
    series, _ = _sum_modes(term, 0, problem.n_terms, "green_strip")
    return (h_src - h_img) / 8j + series


def green(problem: GreenProblem, p: EllipticPoint,
          deriv: str | None = None) -> complex:
    """Dispatch to green_slit or green_strip by problem geometry."""
    if problem.geometry is Geometry.SLIT:
        return green_slit(problem, p, deriv)
    return green_strip(problem, p, deriv)


def green_grid(problem: GreenProblem, xs, ys) -> FieldGrid:
    """Evaluate the Green function over the cartesian points (xs, ys)."""
    xs = np.asarray(xs, dtype=float).ravel()
    ys = np.asarray(ys, dtype=float).ravel()
    if xs.shape != ys.shape:
        raise DomainError("xs and ys must have matching shapes")
    uu = np.empty(len(xs))
    vv = np.empty(len(xs))
    vals = np.empty(len(xs), dtype=complex)
    truncated = 0
    with warnings.catch_warnings(record=True) as rec:
        warnings.simplefilter("always", TruncationWarning)
        for i, (x, y) in enumerate(zip(xs, ys)):
            pt = to_elliptic(x, y, problem.a)
            uu[i] = pt.u
            vv[i] = pt.v
            try:
                vals[i] = green(problem, pt)
            except SingularityError:
                vals[i] = complex(np.nan, np.nan)
        truncated = sum(1 for w in rec if issubclass(w.category, TruncationWarning))
    meta = {
        "geometry": problem.geometry.value,
        "bc": problem.bc.value,
        "k": problem.k,
        "a": problem.a,
        "theta": problem.theta,
        "n_terms": problem.n_terms,
        "tail_warnings": truncated,
    }
    return FieldGrid(xs, ys, uu, vv, vals, meta)


def half_plane_identity(theta: float, source: EllipticPoint, grid,
                        bc: BoundaryCondition = BoundaryCondition.NEUMANN,
                        a: float = 2.0, n_terms: int = 240,
                        exclude_radius: float | None = None):
    """Check the hard-wall (half-plane) expansion identity over a grid.

    lhs: H0(k|x-x0|)/4i +/- H0(k|x-x0'|)/4i (+ for Neumann, - for
    Dirichlet), with x0' the image of the source in the wall y = 0.
    rhs: the corresponding Mathieu mode series.  Returns (lhs FieldGrid,
    rhs FieldGrid, max abs error) where the maximum excludes discs of
    radius 0.05 wavelengths around the source and its image (the series
    converges slowly on the u = u0 ring near those points).
    """
    if theta <= 0.0:
        raise DomainError(f"theta must be > 0, got {theta}")
    if source.u <= 0.0:
        raise DomainError("source must lie strictly off the wall")
    xs, ys = (np.asarray(g, dtype=float).ravel() for g in grid)
    k = 4.0 * math.sqrt(theta) / a
    lam = 2.0 * math.pi / k
    if exclude_radius is None:
        exclude_radius = 0.05 * lam
    x0, y0 = to_cartesian(source, a)
    bank = _bank(theta, n_terms, DEFAULT_CONFIG)
    u0, v0 = source.u, source.v

    lhs = np.empty(len(xs), dtype=complex)
    rhs = np.empty(len(xs), dtype=complex)
    keep = np.empty(len(xs), dtype=bool)
    uu = np.empty(len(xs))
    vv = np.empty(len(xs))
    sgn = 1.0 if bc is BoundaryCondition.NEUMANN else -1.0
    tail_hits = 0
    warnings_ctx = warnings.catch_warnings(record=True)
    rec = warnings_ctx.__enter__()
    warnings.simplefilter("always", TruncationWarning)
    for i, (x, y) in enumerate(zip(xs, ys)):
        d_src = math.hypot(x - x0, y - y0)
        d_img = math.hypot(x - x0, y + y0)
        keep[i] = min(d_src, d_img) >= exclude_radius
        pt = to_elliptic(x, y, a)
        uu[i], vv[i] = pt.u, pt.v
        bank.seed(pt.u)
        if d_src == 0.0 or d_img == 0.0:
            lhs[i] = rhs[i] = complex(np.nan, np.nan)
            keep[i] = False
            continue
        lhs[i] = (hankel1(0, k * d_src) + sgn * hankel1(0, k * d_img)) / 4j
        u_lo, u_hi = min(pt.u, u0), max(pt.u, u0)
        if bc is BoundaryCondition.NEUMANN:
            def term(n):
                ang = bank.ce(n, pt.v) * bank.ce(n, v0)
                if ang == 0.0:
                    return 0.0j
                return 2.0 / math.pi * bank.rd(n, u_hi) * bank.fk_even(n, u_lo) * ang
            rhs[i], _ = _sum_modes(term, 0, n_terms, "half_plane_identity")
        else:
            def term(n):
                ang = bank.se(n, pt.v) * bank.se(n, v0)
                if ang == 0.0:
                    return 0.0j
                return -2.0 / math.pi * bank.rv_odd(n, u_hi) * bank.fk_odd(n, u_lo) * ang
            rhs[i], _ = _sum_modes(term, 1, n_terms, "half_plane_identity")

    tail_hits = sum(1 for w in rec if issubclass(w.category, TruncationWarning))
    warnings_ctx.__exit__(None, None, None)
    err = np.abs(lhs - rhs)
    max_err = float(np.max(err[keep])) if keep.any() else math.nan
    meta = {"theta": theta, "a": a, "k": k, "bc": bc.value,
            "n_terms": n_terms, "exclude_radius": exclude_radius,
            "tail_warnings": tail_hits}
    return (FieldGrid(xs, ys, uu, vv, lhs, dict(meta, side="lhs")),
            FieldGrid(xs, ys, uu, vv, rhs, dict(meta, side="rhs")),
            max_err)


def far_field(problem: GreenProblem, u_m: float, v0: float, alphas) -> np.ndarray:
    """Normalized far-field intensity |G(u_m, alpha)|^2 / max.

    v0 is the incidence direction in (0, pi); the incoming wave is
    produced by a far source at elliptic angle v0 - pi.  Both the source
    radius problem.source.u and u_m must be >= 5 (far zone).
    """
    if problem.geometry is not Geometry.SLIT:
        raise DomainError("far_field is defined for the slit problem")
    if u_m < 5.0 or problem.source.u < 5.0:
        raise DomainError("far field requires u_m >= 5 and source u0 >= 5")
    if not (0.0 < v0 < math.pi):
        raise DomainError(f"incidence angle v0 must lie in (0, pi), got {v0}")
    src = EllipticPoint(problem.source.u, v0 - math.pi)
    prob = GreenProblem(problem.geometry, problem.bc, problem.k, problem.a,
                        src, problem.n_terms)
    alphas = np.asarray(alphas, dtype=float).ravel()
    vals = np.empty(len(alphas), dtype=complex)
    for i, alpha in enumerate(alphas):
        vals[i] = green_slit(prob, EllipticPoint(u_m, alpha))
    intensity = np.abs(vals) ** 2
    peak = intensity.max()
    if peak == 0.0:
        raise DomainError("far field vanished identically on the angle grid")
    return intensity / peak


def fraunhofer(theta: float, v0: float, alphas) -> np.ndarray:
    """Normalized Fraunhofer single-slit intensity sinc^2(2 sqrt(theta)
    sin(alpha - v0)), with the removable singularity at alpha = v0 set
    to its limit 1."""
    if theta <= 0.0:
        raise DomainError(f"theta must be > 0, got {theta}")
    alphas = np.asarray(alphas, dtype=float)
    arg = 2.0 * math.sqrt(theta) * np.sin(alphas - v0)
    amp = np.sinc(arg / math.pi)  # np.sinc(x) = sin(pi x)/(pi x)
    intensity = amp ** 2
    return intensity / intensity.max()
