"""Characteristic values and Fourier coefficients of angular Mathieu functions.

The angular equation y'' + [h - 2*theta*cos(2v)] y = 0 has periodic
solutions ce_n (even, h = a_n) and se_n (odd, h = b_n).  Expanding in
Fourier series turns the equation into four symmetric tridiagonal
eigenproblems, one per (symmetry x index-parity) class:

    class "ee": ce_{2n}   -> coefficients A_{2p},   p >= 0
    class "eo": ce_{2n+1} -> coefficients A_{2p+1}, p >= 0
    class "oo": se_{2n+1} -> coefficients B_{2p+1}, p >= 0
    class "oe": se_{2n+2} -> coefficients B_{2p+2}, p >= 0

The "ee" problem couples A_0 to A_2 with weight 2*theta but back with
theta; rescaling A_0 by sqrt(2) symmetrizes it, and conveniently makes the
unit-norm eigenvector satisfy the function normalization
int_0^{2pi} ce^2 = pi directly.

Leading coefficients of high modes decay below anything a double-precision
eigensolver can resolve (entries ~1e-100 and smaller for n ~ 100 at
theta ~ 10).  Those heads (and the far tails) are reconstructed by running
the three-term recurrence in its stable direction - upward from p = 0 for
the head, downward from p = p_max for the tail - in log scale, matched to
the eigenvector at its largest entry.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import ConfigurationError, DomainError, TruncationWarning

# Eigenvector entries below this fraction of the peak are replaced by the
# matched recurrence (double-precision eigensolvers return noise there).
_TRUST_FLOOR = 1e-10
# Relative agreement demanded between recurrence and eigenvector next to
# the matching entry before the repair is accepted.
_REPAIR_CHECK = 1e-6


class SymmetryClass(Enum):
    """Even modes are ce_n (characteristic value a_n, n >= 0); odd modes
    are se_n (characteristic value b_n, n >= 1)."""

    EVEN = "even"
    ODD = "odd"


@dataclass(frozen=True, eq=False)
class CoefficientTable:
    """Characteristic values and Fourier coefficients at fixed theta.

    Coefficient layout: ``coeff_ee[k, j] = A^(2k)_{2j}`` and similarly
    for the other classes (see module docstring); coefficients of the
    non-matching parity are identically zero and not stored.

    ``head_log_*`` / ``head_sign_*`` hold log|first nonzero coefficient|
    and its sign per mode; the log form stays meaningful even when the
    coefficient itself underflows a double.
    """

    theta: float
    n_max: int
    p_max: int
    char_even: np.ndarray  # a_n, n = 0..n_max
    char_odd: np.ndarray   # b_n, n = 0..n_max, entry 0 is nan
    coeff_ee: np.ndarray
    coeff_eo: np.ndarray
    coeff_oo: np.ndarray
    coeff_oe: np.ndarray
    head_log_even: np.ndarray
    head_sign_even: np.ndarray
    head_log_odd: np.ndarray
    head_sign_odd: np.ndarray
    meta: dict = field(default_factory=dict)

    def char(self, class_: SymmetryClass, n: int) -> float:
        """Characteristic value a_n (even class) or b_n (odd class)."""
        self._check_mode(class_, n)
        if class_ is SymmetryClass.EVEN:
            return float(self.char_even[n])
        return float(self.char_odd[n])

    def coefficients(self, class_: SymmetryClass, n: int) -> tuple[np.ndarray, np.ndarray]:
        """(Fourier orders p, coefficients) for mode n of the given class."""
        self._check_mode(class_, n)
        if class_ is SymmetryClass.EVEN:
            if n % 2 == 0:
                row = self.coeff_ee[n // 2]
                orders = np.arange(0, 2 * len(row), 2)
            else:
                row = self.coeff_eo[(n - 1) // 2]
                orders = np.arange(1, 2 * len(row), 2)
        else:
            if n % 2 == 1:
                row = self.coeff_oo[(n - 1) // 2]
                orders = np.arange(1, 2 * len(row), 2)
            else:
                row = self.coeff_oe[n // 2 - 1]
                orders = np.arange(2, 2 * len(row) + 2, 2)
        return orders, row

    def coefficient(self, class_: SymmetryClass, n: int, p: int) -> float:
        """Single Fourier coefficient A^(n)_p or B^(n)_p (0.0 off-parity)."""
        orders, row = self.coefficients(class_, n)
        if p < 0 or p % 2 != orders[0] % 2:
            return 0.0
        j = (p - orders[0]) // 2
        if j >= len(row):
            return 0.0
        return float(row[j])

    def head_log(self, class_: SymmetryClass, n: int) -> tuple[float, float]:
        """(sign, log|.|) of the first nonzero Fourier coefficient of mode n."""
        self._check_mode(class_, n)
        if class_ is SymmetryClass.EVEN:
            return float(self.head_sign_even[n]), float(self.head_log_even[n])
        return float(self.head_sign_odd[n]), float(self.head_log_odd[n])

    def _check_mode(self, class_: SymmetryClass, n: int) -> None:
        if not isinstance(class_, SymmetryClass):
            raise DomainError(f"class_ must be a SymmetryClass, got {class_!r}")
        if class_ is SymmetryClass.ODD and n < 1:
            raise DomainError("odd-class (se_n) modes require n >= 1")
        if n < 0 or n > self.n_max:
            raise DomainError(f"mode index {n} outside [0, {self.n_max}]")


def _class_problem(tag: str, theta: float, size: int):
    """diag, offdiag and the head-recurrence data of one tridiagonal class."""
    if tag == "ee":
        diag = (2.0 * np.arange(size)) ** 2
        off = np.full(size - 1, theta)
        if size > 1:
            off[0] = math.sqrt(2.0) * theta
    elif tag == "eo":
        diag = (2.0 * np.arange(size) + 1.0) ** 2
        diag[0] = 1.0 + theta
        off = np.full(size - 1, theta)
    elif tag == "oo":
        diag = (2.0 * np.arange(size) + 1.0) ** 2
        diag[0] = 1.0 - theta
        off = np.full(size - 1, theta)
    elif tag == "oe":
        diag = (2.0 * np.arange(size) + 2.0) ** 2
        off = np.full(size - 1, theta)
    else:  # pragma: no cover
        raise ValueError(tag)
    return diag, off


def _head_recurrence(tag: str, theta: float, h: float, count: int):
    """Unnormalized head coefficients by upward recurrence, in log scale.

    Returns (values, logs) with values[j] = sign_j * exp(logs[j] - logs[0])
    up to one common scale; the recurrence direction is stable for the
    head (the target solution is the one growing toward the peak).
    """
    vals = np.empty(count)
    logs = np.zeros(count)
    scale = 0.0
    x_prev = 1.0
    if tag == "ee":
        x_cur = h / theta  # A_2 from a A_0 = theta A_2
    elif tag == "eo":
        x_cur = (h - 1.0 - theta) / theta
    elif tag == "oo":
        x_cur = (h - 1.0 + theta) / theta
    else:  # oe
        x_cur = (h - 4.0) / theta  # B_4 from (b-4) B_2 = theta B_4
    vals[0] = x_prev
    logs[0] = 0.0
    if count > 1:
        vals[1] = x_cur
        logs[1] = math.log(abs(x_cur)) if x_cur != 0.0 else -math.inf
    for j in range(2, count):
        if tag == "ee":
            d = h - (2.0 * (j - 1)) ** 2
            back = 2.0 * theta * x_prev if j == 2 else theta * x_prev
        elif tag == "eo":
            d = h - (2.0 * (j - 1) + 1.0) ** 2
            back = theta * x_prev
        elif tag == "oo":
            d = h - (2.0 * (j - 1) + 1.0) ** 2
            back = theta * x_prev
        else:
            d = h - (2.0 * (j - 1) + 2.0) ** 2
            back = theta * x_prev
        x_nxt = (d * x_cur - back) / theta
        if abs(x_nxt) > 1e200:
            f = 1e-200
            x_nxt *= f
            x_cur *= f
            scale -= math.log(f)
        x_prev, x_cur = x_cur, x_nxt
        vals[j] = x_cur
        logs[j] = (math.log(abs(x_cur)) if x_cur != 0.0 else -math.inf) + scale
    return vals, logs


def _tail_recurrence(tag: str, theta: float, h: float, size: int, start: int):
    """Unnormalized tail coefficients by downward recurrence (stable for
    the superexponentially decaying tail), in log scale from index start
    up to size-1."""
    count = size - start
    vals = np.zeros(count)
    logs = np.full(count, -math.inf)
    # seed above the top row: x_{size} = 0, x_{size-1} = 1
    x_above = 0.0
    x_cur = 1.0
    vals[-1] = x_cur
    logs[-1] = 0.0
    scale = 0.0

    def diag_entry(j):
        if tag == "ee":
            return (2.0 * j) ** 2 if j > 0 else 0.0
        if tag == "eo":
            return (2.0 * j + 1.0) ** 2 if j > 0 else 1.0 + theta
        if tag == "oo":
            return (2.0 * j + 1.0) ** 2 if j > 0 else 1.0 - theta
        return (2.0 * j + 2.0) ** 2

    for j in range(size - 2, start - 1, -1):
        # recurrence row at j+1: back*x_j = (h - d_{j+1}) x_{j+1} - theta*x_{j+2};
        # the ee row at p=1 couples back to A_0 with weight 2*theta
        back = 2.0 * theta if (tag == "ee" and j == 0) else theta
        x_new = ((h - diag_entry(j + 1)) * x_cur - theta * x_above) / back
        if abs(x_new) > 1e200:
            f = 1e-200
            x_new *= f
            x_cur *= f
            scale -= math.log(f)
        x_above, x_cur = x_cur, x_new
        vals[j - start] = x_cur
        logs[j - start] = (math.log(abs(x_cur)) if x_cur != 0.0 else -math.inf) + scale
    return vals, logs


def _repair_vector(tag: str, theta: float, h: float, vec: np.ndarray):
    """Replace untrustworthy head/tail eigenvector entries by matched
    stable recurrences.  Returns (repaired vector, head_sign, head_log)."""
    size = len(vec)
    peak = int(np.argmax(np.abs(vec)))
    vmax = abs(vec[peak])
    head_sign = math.copysign(1.0, vec[0])
    head_log = math.log(abs(vec[0])) if vec[0] != 0.0 else -math.inf

    if theta == 0.0 or size < 3:
        return vec, head_sign, head_log

    out = vec.copy()
    # --- head ---
    if peak > 0:
        hvals, hlogs = _head_recurrence(tag, theta, h, peak + 1)
        if hvals[peak] != 0.0 and np.isfinite(hlogs[peak]):
            log_match = math.log(vmax) - hlogs[peak]
            sign_match = math.copysign(1.0, vec[peak]) * math.copysign(1.0, hvals[peak])
            # sanity next to the match point
            ref = vec[peak - 1]
            rec = sign_match * math.copysign(1.0, hvals[peak - 1]) * math.exp(
                hlogs[peak - 1] + log_match) if hvals[peak - 1] != 0.0 else 0.0
            if abs(ref) > _TRUST_FLOOR * vmax and abs(rec - ref) > _REPAIR_CHECK * abs(ref):
                warnings.warn(
                    f"head recurrence disagrees with eigenvector for class {tag}; "
                    "keeping eigensolver coefficients", RuntimeWarning)
            else:
                for j in range(peak):
                    if abs(vec[j]) < _TRUST_FLOOR * vmax:
                        lg = hlogs[j] + log_match
                        sg = sign_match * math.copysign(1.0, hvals[j])
                        out[j] = sg * math.exp(lg) if lg > -745.0 else 0.0
                head_sign = sign_match * math.copysign(1.0, hvals[0])
                head_log = hlogs[0] + log_match
    # --- tail ---
    if peak < size - 2:
        tvals, tlogs = _tail_recurrence(tag, theta, h, size, peak)
        if tvals[0] != 0.0 and np.isfinite(tlogs[0]):
            log_match = math.log(vmax) - tlogs[0]
            sign_match = math.copysign(1.0, vec[peak]) * math.copysign(1.0, tvals[0])
            ref = vec[peak + 1]
            rec = sign_match * math.copysign(1.0, tvals[1]) * math.exp(
                tlogs[1] + log_match) if tvals[1] != 0.0 else 0.0
            if abs(ref) > _TRUST_FLOOR * vmax and abs(rec - ref) > _REPAIR_CHECK * abs(ref):
                warnings.warn(
                    f"tail recurrence disagrees with eigenvector for class {tag}; "
                    "keeping eigensolver coefficients", RuntimeWarning)
            else:
                for j in range(peak + 1, size):
                    if abs(vec[j]) < _TRUST_FLOOR * vmax:
                        lg = tlogs[j - peak] + log_match
                        sg = sign_match * math.copysign(1.0, tvals[j - peak])
                        out[j] = sg * math.exp(lg) if lg > -745.0 else 0.0
    return out, head_sign, head_log


def _solve_class(tag: str, theta: float, size: int, n_modes: int):
    """Eigenpairs of one class: (values[n_modes], vectors[n_modes, size],
    head_signs, head_logs).  Vectors are normalized and sign-fixed."""
    diag, off = _class_problem(tag, theta, size)
    w, v = eigh_tridiagonal(diag, off, select="i",
                            select_range=(0, min(n_modes, size) - 1))
    vecs = np.ascontiguousarray(v.T)
    if tag == "ee":
        vecs[:, 0] /= math.sqrt(2.0)  # undo the symmetrizing rescale

    head_signs = np.empty(len(w))
    head_logs = np.empty(len(w))
    for i in range(len(w)):
        vec = vecs[i]
        if tag in ("ee", "eo"):
            # sum of coefficients is ce_n(0) > 0
            s = vec.sum() + (vec[0] if tag == "ee" else 0.0)
        else:
            orders = np.arange(1, 2 * size, 2) if tag == "oo" \
                else np.arange(2, 2 * size + 2, 2)
            s = float(orders @ vec)  # se_n'(0) > 0
        if s == 0.0:
            raise ArithmeticError(
                f"sign condition degenerate for class {tag}, mode {i}")
        if s < 0.0:
            vec = -vec
        vec, hs, hl = _repair_vector(tag, theta, float(w[i]), vec)
        vecs[i] = vec
        head_signs[i] = hs
        head_logs[i] = hl
    return w, vecs, head_signs, head_logs


def _top_eigenvalue(tag: str, theta: float, size: int, index: int) -> float:
    diag, off = _class_problem(tag, theta, size)
    idx = min(index, size - 1)
    w = eigh_tridiagonal(diag, off, eigvals_only=True, select="i",
                         select_range=(idx, idx))
    return float(w[0])


def build_tables(theta: float, n_max: int, p_max: int) -> CoefficientTable:
    """Diagonalize the four tridiagonal classes and assemble the table.

    Parameters
    ----------
    theta : float
        Size parameter (k a / 4)^2, must be >= 0.
    n_max : int
        Highest mode index kept (a_0..a_{n_max}, b_1..b_{n_max}).
    p_max : int
        Fourier truncation order; must be >= n_max, and should exceed
        n_max by a margin (~100) for full tail accuracy.

    A truncation-convergence guard recomputes the top characteristic value
    with p_max + 50 and warns if the two disagree beyond 1e-10 relative.
    """
    theta = float(theta)
    if not math.isfinite(theta) or theta < 0.0:
        raise DomainError(f"theta must be finite and >= 0, got {theta}")
    if n_max < 0:
        raise ConfigurationError(f"n_max must be >= 0, got {n_max}")
    if p_max < n_max:
        raise ConfigurationError(
            f"p_max ({p_max}) must be at least n_max ({n_max})")

    size_ee = p_max // 2 + 1
    size_eo = (p_max - 1) // 2 + 1 if p_max >= 1 else 1
    size_oo = size_eo
    size_oe = max(p_max // 2, 1)

    n_ee = n_max // 2 + 1
    n_eo = (n_max + 1) // 2 if n_max >= 1 else 0
    n_oo = (n_max + 1) // 2 if n_max >= 1 else 0
    n_oe = n_max // 2 if n_max >= 2 else 0

    w_ee, v_ee, hs_ee, hl_ee = _solve_class("ee", theta, size_ee, n_ee)
    char_even = np.empty(n_max + 1)
    char_odd = np.full(n_max + 1, np.nan)
    head_log_even = np.full(n_max + 1, -np.inf)
    head_sign_even = np.ones(n_max + 1)
    head_log_odd = np.full(n_max + 1, -np.inf)
    head_sign_odd = np.ones(n_max + 1)

    char_even[0::2] = w_ee[:n_ee]
    head_log_even[0::2] = hl_ee[:n_ee]
    head_sign_even[0::2] = hs_ee[:n_ee]

    if n_eo:
        w_eo, v_eo, hs_eo, hl_eo = _solve_class("eo", theta, size_eo, n_eo)
        char_even[1::2] = w_eo[:n_eo]
        head_log_even[1::2] = hl_eo[:n_eo]
        head_sign_even[1::2] = hs_eo[:n_eo]
    else:
        v_eo = np.zeros((0, size_eo))
    if n_oo:
        w_oo, v_oo, hs_oo, hl_oo = _solve_class("oo", theta, size_oo, n_oo)
        char_odd[1::2] = w_oo[:n_oo]
        head_log_odd[1::2] = hl_oo[:n_oo]
        head_sign_odd[1::2] = hs_oo[:n_oo]
    else:
        v_oo = np.zeros((0, size_oo))
    if n_oe:
        w_oe, v_oe, hs_oe, hl_oe = _solve_class("oe", theta, size_oe, n_oe)
        char_odd[2::2] = w_oe[:n_oe]
        head_log_odd[2::2] = hl_oe[:n_oe]
        head_sign_odd[2::2] = hs_oe[:n_oe]
    else:
        v_oe = np.zeros((0, size_oe))

    # truncation-convergence guard on the highest kept eigenvalue
    guard_tag, guard_size, guard_idx = ("ee", size_ee, n_ee - 1)
    if n_max >= 1 and n_max % 2 == 1:
        guard_tag, guard_size, guard_idx = ("eo", size_eo, n_eo - 1)
    a_top = char_even[n_max]
    a_top_wide = _top_eigenvalue(guard_tag, theta, guard_size + 25, guard_idx)
    denom = max(abs(a_top), 1.0)
    if abs(a_top - a_top_wide) > 1e-10 * denom:
        warnings.warn(
            f"characteristic value a_{n_max} changes by "
            f"{abs(a_top - a_top_wide) / denom:.2e} when p_max grows by 50; "
            "increase p_max", TruncationWarning)

    return CoefficientTable(
        theta=theta, n_max=n_max, p_max=p_max,
        char_even=char_even, char_odd=char_odd,
        coeff_ee=v_ee, coeff_eo=v_eo, coeff_oo=v_oo, coeff_oe=v_oe,
        head_log_even=head_log_even, head_sign_even=head_sign_even,
        head_log_odd=head_log_odd, head_sign_odd=head_sign_odd,
        meta={"guard_rel": abs(a_top - a_top_wide) / denom},
    )


def angular_eval(table: CoefficientTable, class_: SymmetryClass, n: int,
                 v, deriv: int = 0):
    """Angular Mathieu function ce_n(v) / se_n(v) or its d/dv derivative.

    v may be a scalar or an array; the return matches its shape.
    """
    if deriv not in (0, 1):
        raise DomainError(f"deriv must be 0 or 1, got {deriv!r}")
    orders, coeffs = table.coefficients(class_, n)
    v_arr = np.asarray(v, dtype=float)
    phase = orders[:, None] * v_arr.reshape(1, -1)
    if class_ is SymmetryClass.EVEN:
        basis = np.cos(phase) if deriv == 0 else -orders[:, None] * np.sin(phase)
    else:
        basis = np.sin(phase) if deriv == 0 else orders[:, None] * np.cos(phase)
    out = coeffs @ basis
    if v_arr.ndim == 0:
        return float(out[0])
    return out.reshape(v_arr.shape)
