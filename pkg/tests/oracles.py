"""Independent oracles for the test suite.

Everything here is deliberately written from first principles (power
series, dense matrices, quadrature, high-precision ODE integration) and
never calls the code paths it is used to check.
"""

from __future__ import annotations

import math

import mpmath as mp
import numpy as np


def bessel_j_series(p: int, x: float, terms: int = 160) -> float:
    """J_p(x) by the defining power series (adequate for x <~ 30)."""
    tot = 0.0
    t = (0.5 * x) ** p / math.factorial(p)
    for k in range(terms):
        tot += t
        t *= -(0.25 * x * x) / ((k + 1) * (p + k + 1))
        if abs(t) < 1e-20 * abs(tot) and k > 4:
            break
    return tot


# --- Airy via Maclaurin series / asymptotic expansions -------------------

_AI0 = 0.3550280538878173
_AIP0 = -0.2588194037928068


def airy_maclaurin(x: float):
    """(Ai, Ai', Bi, Bi') by the Maclaurin series; reliable for |x| <= 6."""
    x3 = x * x * x
    f, fp = 1.0, 0.0
    tf = 1.0
    g, gp = x, 1.0
    tg = x
    for k in range(1, 200):
        tf *= x3 / ((3 * k) * (3 * k - 1))
        tg *= x3 / ((3 * k + 1) * (3 * k))
        f += tf
        g += tg
        fp += tf * (3 * k) / x if x != 0.0 else 0.0
        gp += tg * (3 * k + 1) / x if x != 0.0 else 0.0
        if abs(tf) < 1e-19 * abs(f) and abs(tg) < 1e-19 * (abs(g) + 1e-300):
            break
    c1f, c1fp = _AI0 * f, _AI0 * fp
    c2g, c2gp = -_AIP0 * g, -_AIP0 * gp
    sq3 = math.sqrt(3.0)
    return (c1f - c2g, c1fp - c2gp,
            sq3 * (c1f + c2g), sq3 * (c1fp + c2gp))


def _airy_u_terms(zeta: float):
    u = 1.0
    terms = [1.0]
    k = 1
    while True:
        u *= (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / (216.0 * k * (2 * k - 1))
        t = u / zeta ** k
        if t >= terms[-1] or t < 1e-18:
            break
        terms.append(t)
        k += 1
        if k > 150:
            break
    return terms


def airy_asymptotic(x: float):
    """(Ai, Bi) by optimally truncated asymptotic expansions, |x| >= ~7."""
    if x > 0:
        zeta = (2.0 / 3.0) * x ** 1.5
        terms = _airy_u_terms(zeta)
        s_minus = sum((-1) ** j * t for j, t in enumerate(terms))
        s_plus = sum(terms)
        root = x ** 0.25
        return (math.exp(-zeta) / (2.0 * math.sqrt(math.pi) * root) * s_minus,
                math.exp(zeta) / (math.sqrt(math.pi) * root) * s_plus)
    ax = -x
    zeta = (2.0 / 3.0) * ax ** 1.5
    terms = _airy_u_terms(zeta)
    p = sum((-1) ** j * t for j, t in enumerate(terms[0::2]))
    q = sum((-1) ** j * t for j, t in enumerate(terms[1::2]))
    root = ax ** 0.25
    c = math.cos(zeta - 0.25 * math.pi)
    s = math.sin(zeta - 0.25 * math.pi)
    return ((c * p + s * q) / (math.sqrt(math.pi) * root),
            (-s * p + c * q) / (math.sqrt(math.pi) * root))


# --- dense-matrix Mathieu characteristic values ---------------------------

def mathieu_a_even_dense(theta: float, size: int) -> np.ndarray:
    """Eigenvalues of the even/pi-periodic class by dense diagonalization."""
    d = (2.0 * np.arange(size)) ** 2
    e = np.full(size - 1, theta)
    if size > 1:
        e[0] = math.sqrt(2.0) * theta
    mat = np.diag(d) + np.diag(e, 1) + np.diag(e, -1)
    return np.linalg.eigvalsh(mat)


# --- radial ODE oracles ----------------------------------------------------

def first_kind_ode(h: float, theta: float, u_end: float, odd: bool = False,
                   rtol: float = 1e-12):
    """First-kind ratio by forward integration of the radial equation.

    Integrating toward growing u follows the dominant solution, so this
    is stable at any mode index; returns a callable u -> ratio.
    """
    from scipy.integrate import solve_ivp

    y0 = [0.0, 1.0] if odd else [1.0, 0.0]
    sol = solve_ivp(
        lambda u, y: [y[1], (h - 2.0 * theta * math.cosh(2.0 * u)) * y[0]],
        (0.0, u_end), y0, rtol=rtol, atol=1e-14, method="DOP853",
        dense_output=True)
    return lambda u: float(sol.sol(u)[0])


def complex_ratio_mp_ode(h: float, theta: float, u0: float,
                         y0: complex, yp0: complex, us, dps: int = 50):
    """High-precision RK4 integration of y'' = (h - 2 theta cosh 2u) y.

    Fixed-step classical RK4 in mpmath arithmetic; step chosen so the
    local truncation error stays far below 1e-6 relative.  Returns the
    complex solution at the requested points (which must be increasing
    and start at or after u0).
    """
    with mp.workdps(dps):
        hh = mp.mpf(h)
        th = mp.mpf(theta)
        y = mp.mpc(y0)
        yp = mp.mpc(yp0)
        u = mp.mpf(u0)

        def f(uu, yy):
            return (hh - 2 * th * mp.cosh(2 * uu)) * yy

        out = []
        k_scale = math.sqrt(abs(h)) + 1.0
        step = mp.mpf(1.0) / (80.0 * k_scale)
        for target in us:
            tgt = mp.mpf(target)
            while u < tgt:
                dt = min(step, tgt - u)
                k1y, k1p = yp, f(u, y)
                k2y, k2p = yp + 0.5 * dt * k1p, f(u + 0.5 * dt, y + 0.5 * dt * k1y)
                k3y, k3p = yp + 0.5 * dt * k2p, f(u + 0.5 * dt, y + 0.5 * dt * k2y)
                k4y, k4p = yp + dt * k3p, f(u + dt, y + dt * k3y)
                y = y + dt * (k1y + 2 * k2y + 2 * k3y + k4y) / 6
                yp = yp + dt * (k1p + 2 * k2p + 2 * k3p + k4p) / 6
                u = u + dt
            out.append(complex(y))
        return out


# --- small numeric helpers -------------------------------------------------

def second_difference(f, x: float, step: float) -> float:
    return (f(x + step) - 2.0 * f(x) + f(x - step)) / (step * step)


def trapezoid_period(values: np.ndarray, period: float) -> float:
    """Trapezoid rule over one period of a uniformly sampled function
    (spectrally exact for trigonometric polynomials)."""
    return float(values.sum() * period / len(values))
