"""Exact radial Mathieu functions via Bessel-product series.

The third-kind radial functions Me^(1)_n = Ce_n + i Fey_n (even class) and
Ne^(1)_n = Se_n + i Gey_n (odd class) are summed as series of products
H^(1)_a(sqrt(theta) e^u) * J_b(sqrt(theta) e^-u) weighted by the Fourier
coefficients of the matching angular function, times a class/parity
prefactor C_n or D_n.  First- and second-kind functions are the real and
imaginary parts; Me^(2) = conj(Me^(1)).

The unprefactored sums are exposed separately (``bessel_product_sum``)
because every quantity the scattering series needs is a *ratio* of radial
functions in which C_n / D_n cancel; the prefactors grow like
exp(2 S*) with the mode index and leave double range near n ~ 95 at
theta ~ 10 long before the ratios do.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .angular_basis import CoefficientTable, SymmetryClass, angular_eval
from .errors import CancellationWarning, DomainError, PrecisionError, TruncationError
from .special_functions import bessel_j_batch, jy_batches

# Series truncation: stop after this many consecutive terms below rel_tol
# of the running sum.
_REL_TOL = 1e-14
_CONSECUTIVE = 3
# Warn when |largest partial sum| / |result| exceeds this (digits lost to
# the sign-alternating structure of the series).
_CANCELLATION_LIMIT = 1e6
# Prefactors beyond this magnitude make the absolute functions meaningless
# in double precision.
_PREFACTOR_LIMIT = 1e250


@dataclass(frozen=True)
class RadialKindValue:
    """Third-kind value with its first/second-kind decomposition.

    For even-class modes the parts read (Ce, Fey); for odd-class modes the
    identical decomposition reads (Se, Gey).
    """

    me1: complex

    @property
    def ce(self) -> float:
        return self.me1.real

    @property
    def fey(self) -> float:
        return self.me1.imag

    @property
    def me2(self) -> complex:
        return self.me1.conjugate()


@dataclass(frozen=True)
class Prefactors:
    """Series prefactors and the boundary data they imply.

    ``cross_*`` arrays hold the relative discrepancy between the two
    printed closed forms of each prefactor (series anchor vs angular
    data); they are diagnostics and should sit at roundoff level.
    """

    theta: float
    n_max: int
    c: np.ndarray            # C_n, even class
    d: np.ndarray            # D_n, odd class (entry 0 is nan)
    me1_prime0: np.ndarray   # Me^(1)'_n(0), purely imaginary
    me1_zero: np.ndarray     # Me^(1)_n(0)
    ne1_zero: np.ndarray     # Ne^(1)_n(0), purely imaginary
    ne1_prime0: np.ndarray   # Ne^(1)'_n(0)
    cross_even: np.ndarray
    cross_odd: np.ndarray


def _require_positive_theta(table: CoefficientTable) -> None:
    if table.theta <= 0.0:
        raise DomainError("radial series require theta > 0")


@lru_cache(maxsize=65536)
def _point_batches(table: CoefficientTable, u: float):
    """Bessel batches at the two series arguments of one radial point.

    Computed once per (table, u) at the master order and shared by every
    mode's sum at that point."""
    sq = math.sqrt(table.theta)
    x_large = sq * math.exp(u)
    x_small = sq * math.exp(-u)
    hi = table.p_max // 2 + 4  # +/-1 index shifts plus derivative headroom
    j_l, y_l = jy_batches(hi, x_large)
    h_large = j_l + 1j * y_l
    j_small = bessel_j_batch(hi, x_small)
    return x_large, x_small, h_large, j_small


def _batches(table: CoefficientTable, class_: SymmetryClass, n: int, u: float):
    x_large, x_small, h_large, j_small = _point_batches(table, u)
    _, row = table.coefficients(class_, n)
    return x_large, x_small, h_large, j_small, row


def _dpair(values: np.ndarray, a: int):
    """d/dx-style derivative via the standard order recurrence."""
    if a == 0:
        return -values[1]
    return 0.5 * (values[a - 1] - values[a + 1])


class SeriesDiagnostics(NamedTuple):
    """Summation diagnostics of one Bessel-product sum.

    ``peak_re``/``peak_im`` are the largest partial-sum component
    magnitudes; epsilon times these is the cancellation noise floor of
    the corresponding component of the result."""

    peak_re: float
    peak_im: float
    terms: int


def bessel_product_sum(table: CoefficientTable, class_: SymmetryClass,
                       n: int, u: float, deriv: int = 0,
                       diagnostics: list | None = None) -> complex:
    """The printed Bessel-product series of mode n without its prefactor.

    deriv=0 gives Me^(1)_n(u)/C_n (even class) or Ne^(1)_n(u)/D_n (odd
    class); deriv=1 the d/du derivative of the same quantity.  Truncation
    stops after three consecutive terms below 1e-14 of the running sum,
    capped by the stored Fourier coefficients; failure to converge raises
    TruncationError.  A loss of more than 1e6 between the largest partial
    sum and the result emits CancellationWarning.

    If ``diagnostics`` is a list, a SeriesDiagnostics record is appended
    to it (noise-floor data for the residual diagnostic).
    """
    _require_positive_theta(table)
    if deriv not in (0, 1):
        raise DomainError(f"deriv must be 0 or 1, got {deriv!r}")
    u = float(u)
    if not math.isfinite(u) or u < 0.0:
        raise DomainError(f"u must be finite and >= 0, got {u}")

    x_l, x_s, hb, jb, row = _batches(table, class_, n, u)
    even_class = class_ is SymmetryClass.EVEN
    odd_index = n % 2 == 1

    def product(a: int, b: int) -> complex:
        # H_a(x_l) J_b(x_s), or its d/du derivative
        if deriv == 0:
            return hb[a] * jb[b]
        return x_l * _dpair(hb, a) * jb[b] - x_s * hb[a] * _dpair(jb, b)

    total = 0.0 + 0.0j
    peak_re = 0.0
    peak_im = 0.0
    small_run = 0
    converged = False
    last_mag = math.nan
    sign = 1.0
    for p in range(len(row)):
        coeff = row[p]
        if even_class:
            if odd_index:
                term = sign * coeff * (product(p + 1, p) + product(p, p + 1))
            else:
                term = sign * coeff * product(p, p)
        else:
            if odd_index:
                term = sign * coeff * (product(p + 1, p) - product(p, p + 1))
            else:
                # B_{2p} terms start at p = 1 in the printed series; row
                # index p already corresponds to Fourier order 2(p+1)
                q = p + 1
                term = -sign * coeff * (product(q - 1, q + 1) - product(q + 1, q - 1))
        sign = -sign
        if not (math.isfinite(term.real) and math.isfinite(term.imag)):
            break
        total += term
        peak_re = max(peak_re, abs(total.real))
        peak_im = max(peak_im, abs(total.imag))
        last_mag = abs(term)
        if last_mag < _REL_TOL * abs(total):
            small_run += 1
            if small_run >= _CONSECUTIVE:
                converged = True
                break
        else:
            small_run = 0

    if not converged:
        raise TruncationError(
            f"Bessel-product series for mode n={n} ({class_.value}) did not "
            f"converge within p_max={table.p_max} at u={u}",
            last_term=last_mag)
    if diagnostics is not None:
        diagnostics.append(SeriesDiagnostics(peak_re, peak_im, p + 1))
    # cancellation is per component: the first-kind (real) part dies
    # orders of magnitude before the complex magnitude does
    loss = 0.0
    if total.real != 0.0:
        loss = max(loss, peak_re / abs(total.real))
    if total.imag != 0.0:
        loss = max(loss, peak_im / abs(total.imag))
    if loss > _CANCELLATION_LIMIT:
        warnings.warn(
            f"series for mode n={n} at u={u:.3g} lost a factor "
            f"{loss:.1e} to cancellation in one component", CancellationWarning)
    return total


def _angular_data(table: CoefficientTable, class_: SymmetryClass, n: int):
    half_pi = 0.5 * math.pi
    if class_ is SymmetryClass.EVEN:
        at0 = angular_eval(table, class_, n, 0.0)
        mid = angular_eval(table, class_, n, half_pi, deriv=n % 2)
        return at0, mid
    at0 = angular_eval(table, class_, n, 0.0, deriv=1)
    mid = angular_eval(table, class_, n, half_pi, deriv=(n + 1) % 2)
    return at0, mid


@lru_cache(maxsize=4096)
def _prefactor_cached(table: CoefficientTable, class_: SymmetryClass, n: int) -> float:
    """C_n or D_n from angular data, in a log-stable form."""
    _require_positive_theta(table)
    sign_head, log_head = table.head_log(class_, n)
    if not math.isfinite(log_head):
        raise PrecisionError(
            f"leading Fourier coefficient of mode n={n} ({class_.value}) "
            "underflows; prefactor not representable")
    theta = table.theta
    at0, mid = _angular_data(table, class_, n)
    if mid == 0.0 or at0 == 0.0:
        raise PrecisionError(
            f"angular data underflow for prefactor of mode n={n}")
    if class_ is SymmetryClass.EVEN:
        if n % 2 == 0:   # C_2m = ce(pi/2) ce(0) / A_0^2
            log_mag = math.log(abs(mid)) + math.log(abs(at0)) - 2.0 * log_head
            sgn = math.copysign(1.0, mid) * math.copysign(1.0, at0)
        else:            # C_2m+1 = -ce'(pi/2) ce(0) / (sqrt(theta) A_1^2)
            log_mag = (math.log(abs(mid)) + math.log(abs(at0))
                       - 0.5 * math.log(theta) - 2.0 * log_head)
            sgn = -math.copysign(1.0, mid) * math.copysign(1.0, at0)
    else:
        if n % 2 == 1:   # D_2m+1 = se(pi/2) se'(0) / (sqrt(theta) B_1^2)
            log_mag = (math.log(abs(mid)) + math.log(abs(at0))
                       - 0.5 * math.log(theta) - 2.0 * log_head)
            sgn = math.copysign(1.0, mid) * math.copysign(1.0, at0)
        else:            # D_2m = -se'(pi/2) se'(0) / (theta B_2^2)
            log_mag = (math.log(abs(mid)) + math.log(abs(at0))
                       - math.log(theta) - 2.0 * log_head)
            sgn = -math.copysign(1.0, mid) * math.copysign(1.0, at0)
    if log_mag > math.log(_PREFACTOR_LIMIT):
        raise PrecisionError(
            f"prefactor of mode n={n} ({class_.value}) exceeds 1e250; the "
            "absolute series is beyond double precision (use ratios or WKB)")
    return sgn * math.exp(log_mag)


def me1_series(table: CoefficientTable, n: int, u: float, deriv: int = 0) -> complex:
    """Third-kind even radial function Me^(1)_n(u) (or its u-derivative).

    Raises PrecisionError when the prefactor C_n is beyond double range,
    which signals that the mode index is past the trustworthy series
    regime and the WKB path must be used.
    """
    c = _prefactor_cached(table, SymmetryClass.EVEN, n)
    value = c * bessel_product_sum(table, SymmetryClass.EVEN, n, u, deriv)
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise PrecisionError(
            f"Me^(1)_{n}(u={u}) overflows double precision")
    return value


def ne1_series(table: CoefficientTable, n: int, u: float, deriv: int = 0) -> complex:
    """Third-kind odd radial function Ne^(1)_n(u) (or its u-derivative)."""
    if n < 1:
        raise DomainError("odd-class modes require n >= 1")
    d = _prefactor_cached(table, SymmetryClass.ODD, n)
    value = d * bessel_product_sum(table, SymmetryClass.ODD, n, u, deriv)
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise PrecisionError(
            f"Ne^(1)_{n}(u={u}) overflows double precision")
    return value


def prefactors(table: CoefficientTable, n_max: int | None = None) -> Prefactors:
    """Prefactors C_n, D_n and boundary data for modes 0..n_max.

    Every prefactor is evaluated from the angular-data closed form;
    the alternative (series-anchored) form of each equation is evaluated
    as well and the relative discrepancies are returned for diagnostics.
    Raises PrecisionError if any requested mode is beyond double range.
    """
    _require_positive_theta(table)
    if n_max is None:
        n_max = table.n_max
    if n_max < 0 or n_max > table.n_max:
        raise DomainError(f"n_max must lie in [0, {table.n_max}]")

    theta = table.theta
    sq = math.sqrt(theta)
    count = n_max + 1
    c = np.full(count, np.nan)
    d = np.full(count, np.nan)
    me1_prime0 = np.zeros(count, dtype=complex)
    me1_zero = np.zeros(count, dtype=complex)
    ne1_zero = np.zeros(count, dtype=complex)
    ne1_prime0 = np.zeros(count, dtype=complex)
    cross_even = np.full(count, np.nan)
    cross_odd = np.full(count, np.nan)

    # boundary-sum quality is what the cross_* diagnostics measure; the
    # per-sum cancellation warnings would only repeat that information
    quiet = warnings.catch_warnings()
    quiet.__enter__()
    warnings.simplefilter("ignore", CancellationWarning)

    for n in range(count):
        cn = _prefactor_cached(table, SymmetryClass.EVEN, n)
        c[n] = cn
        at0, mid = _angular_data(table, SymmetryClass.EVEN, n)
        s0 = bessel_product_sum(table, SymmetryClass.EVEN, n, 0.0)
        s0p = bessel_product_sum(table, SymmetryClass.EVEN, n, 0.0, deriv=1)
        if n % 2 == 0:
            me1_prime0[n] = 2j * mid * cn / math.pi
            ratio = math.pi * s0p / (2j * mid)
        else:
            me1_prime0[n] = -2j * mid * cn / (math.pi * sq)
            ratio = -math.pi * sq * s0p / (2j * mid)
        me1_zero[n] = cn * s0
        # both closed forms must agree; fold in the independent value
        # anchor Re Me(0) = ce_n(0)
        cross_even[n] = max(abs(ratio - 1.0),
                            abs(cn * s0.real - at0) / abs(at0))

    for n in range(1, count):
        dn = _prefactor_cached(table, SymmetryClass.ODD, n)
        d[n] = dn
        at0, mid = _angular_data(table, SymmetryClass.ODD, n)
        s0 = bessel_product_sum(table, SymmetryClass.ODD, n, 0.0)
        s0p = bessel_product_sum(table, SymmetryClass.ODD, n, 0.0, deriv=1)
        if n % 2 == 1:
            ne1_zero[n] = -2j * mid * dn / (math.pi * sq)
            ratio = -math.pi * sq * s0 / (2j * mid)
        else:
            ne1_zero[n] = 2j * mid * dn / (math.pi * theta)
            ratio = math.pi * theta * s0 / (2j * mid)
        ne1_prime0[n] = dn * s0p
        cross_odd[n] = max(abs(ratio - 1.0),
                           abs(dn * s0p.real - at0) / abs(at0))

    quiet.__exit__(None, None, None)
    return Prefactors(theta=theta, n_max=n_max, c=c, d=d,
                      me1_prime0=me1_prime0, me1_zero=me1_zero,
                      ne1_zero=ne1_zero, ne1_prime0=ne1_prime0,
                      cross_even=cross_even, cross_odd=cross_odd)
