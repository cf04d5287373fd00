import cmath
import math
import warnings

import numpy as np
import pytest

from mathieuwkb.angular_basis import SymmetryClass, angular_eval, build_tables
from mathieuwkb.errors import (CancellationWarning, DomainError,
                               PrecisionError, TruncationError)
from mathieuwkb.radial_series import (RadialKindValue, bessel_product_sum,
                                      me1_series, ne1_series, prefactors)

EV, OD = SymmetryClass.EVEN, SymmetryClass.ODD


def _quiet_sum(table, cls, n, u, deriv=0):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", CancellationWarning)
        return bessel_product_sum(table, cls, n, u, deriv)


def test_even_value_at_origin_matches_angular(table_pi2):
    for n in (0, 1, 5, 10):
        val = me1_series(table_pi2, n, 0.0)
        assert abs(val.real - angular_eval(table_pi2, EV, n, 0.0)) < 1e-9


def test_odd_value_at_origin_vanishes(table_pi2):
    for n in (1, 4, 9):
        val = ne1_series(table_pi2, n, 0.0)
        assert abs(val.real) < 1e-10 * abs(val)


def test_outgoing_amplitude_decay(table_pi2):
    sq = math.sqrt(table_pi2.theta)
    vals = [abs(me1_series(table_pi2, 5, u)) * math.sqrt(sq * math.exp(u))
            for u in np.linspace(3.0, 5.0, 5)]
    assert max(vals) - min(vals) < 0.02 * max(vals)


def test_outgoing_phase_advances(table_pi2):
    # spacing well below the local wavelength so the unwrap is unambiguous
    us = np.linspace(3.0, 3.05, 11)
    phases = np.unwrap([cmath.phase(me1_series(table_pi2, 5, float(u)))
                        for u in us])
    assert np.all(np.diff(phases) > 0.0)


@pytest.mark.parametrize("n", [0, 3, 8])
def test_ratio_against_scipy_modified_mathieu(table_pi2, n):
    from scipy.special import mathieu_modcem1, mathieu_modcem2
    q = table_pi2.theta
    u1, u2 = 0.4, 1.1
    mine = me1_series(table_pi2, n, u1) / me1_series(table_pi2, n, u2)
    a1, _ = mathieu_modcem1(n, q, u1)
    b1, _ = mathieu_modcem2(n, q, u1)
    a2, _ = mathieu_modcem1(n, q, u2)
    b2, _ = mathieu_modcem2(n, q, u2)
    ref = (a1 + 1j * b1) / (a2 + 1j * b2)
    assert abs(mine - ref) < 1e-12 * abs(ref)


@pytest.mark.parametrize("n", [1, 4, 9])
def test_odd_ratio_against_scipy(table_pi2, n):
    from scipy.special import mathieu_modsem1, mathieu_modsem2
    q = table_pi2.theta
    u1, u2 = 0.4, 1.1
    mine = ne1_series(table_pi2, n, u1) / ne1_series(table_pi2, n, u2)
    a1, _ = mathieu_modsem1(n, q, u1)
    b1, _ = mathieu_modsem2(n, q, u1)
    a2, _ = mathieu_modsem1(n, q, u2)
    b2, _ = mathieu_modsem2(n, q, u2)
    ref = (a1 + 1j * b1) / (a2 + 1j * b2)
    assert abs(mine - ref) < 1e-12 * abs(ref)


@pytest.mark.parametrize("cls,n", [(EV, 0), (EV, 5), (EV, 10), (OD, 3), (OD, 10)])
def test_wronskian_constancy(table_pi2, cls, n):
    series = me1_series if cls is EV else ne1_series
    w = []
    for u in np.linspace(0.0, 3.0, 7):
        val = series(table_pi2, n, float(u))
        der = series(table_pi2, n, float(u), deriv=1)
        w.append(val.real * der.imag - der.real * val.imag)
    w = np.array(w)
    assert np.max(np.abs(w - w.mean())) < 1e-6 * abs(w.mean())


def test_ode_residual_of_series(table_pi2):
    # direct substitution into the radial equation via central differences;
    # third-kind functions are checked on the imaginary part (the real,
    # first-kind component is what the mode-20 cancellation destroys)
    theta = table_pi2.theta
    step = 1e-4
    n, u = 20, 0.5
    h = table_pi2.char(OD, n)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", CancellationWarning)
        ym = ne1_series(table_pi2, n, u - step).imag
        y0 = ne1_series(table_pi2, n, u).imag
        yp = ne1_series(table_pi2, n, u + step).imag
    kin = h - 2.0 * theta * math.cosh(2.0 * u)
    fd = (yp - 2.0 * y0 + ym) / step ** 2
    assert abs((fd / y0 - kin) / kin) <= 1e-6


def test_second_kind_ode_residual(table_pi2):
    theta = table_pi2.theta
    step = 1e-4
    n, u = 8, 0.7
    h = table_pi2.char(EV, n)
    ym = me1_series(table_pi2, n, u - step).imag
    y0 = me1_series(table_pi2, n, u).imag
    yp = me1_series(table_pi2, n, u + step).imag
    kin = h - 2.0 * theta * math.cosh(2.0 * u)
    fd = (yp - 2.0 * y0 + ym) / step ** 2
    assert abs((fd / y0 - kin) / kin) <= 1e-6


def test_prefactor_cross_checks(table_pi2):
    pf = prefactors(table_pi2, n_max=10)
    assert np.nanmax(pf.cross_even[:11]) < 1e-8
    assert np.nanmax(pf.cross_odd[1:11]) < 1e-8
    assert np.all(np.isfinite(pf.c[:11]))
    assert np.all(pf.c[:11] != 0.0)
    # Me'(0) purely imaginary, Ne(0) purely imaginary
    assert np.max(np.abs(pf.me1_prime0[:11].real)) == 0.0
    assert np.max(np.abs(pf.ne1_zero[1:11].real)) == 0.0


def test_prefactor_overflow_raises(table_pi2):
    with pytest.raises(PrecisionError):
        prefactors(table_pi2, n_max=99)
    with pytest.raises(PrecisionError):
        me1_series(table_pi2, 99, 0.5)


def test_small_theta_prefactors_finite(table_small):
    pf = prefactors(table_small, n_max=20)
    assert np.all(np.isfinite(pf.c))
    assert np.all(np.isfinite(pf.d[1:]))
    # series stays accurate: third-kind ODE residual (imaginary part,
    # per the paper's epsilon convention) at n = 12 and n = 20
    theta = table_small.theta
    for n in (12, 20):
        u, step = 0.6, 1e-4
        h = table_small.char(EV, n)
        ym = me1_series(table_small, n, u - step).imag
        y0 = me1_series(table_small, n, u).imag
        yp = me1_series(table_small, n, u + step).imag
        kin = h - 2.0 * theta * math.cosh(2.0 * u)
        fd = (yp - 2.0 * y0 + ym) / step ** 2
        assert abs((fd / y0 - kin) / kin) <= 1e-6


def test_conjugation_identity():
    val = RadialKindValue(complex(0.3, -1.7))
    assert val.ce == 0.3
    assert val.fey == -1.7
    assert val.me2 == complex(0.3, 1.7)


def test_cancellation_warning_fires(table_pi2):
    with warnings.catch_warnings(record=True) as rec:
        warnings.simplefilter("always")
        bessel_product_sum(table_pi2, EV, 20, 0.1)
    assert any(issubclass(w.category, CancellationWarning) for w in rec)


def test_truncation_error_raised():
    # tight Fourier truncation cannot converge the series at large u
    table = build_tables(25.0, 8, 10)
    with pytest.raises(TruncationError) as err:
        bessel_product_sum(table, EV, 8, 2.0)
    assert math.isfinite(err.value.last_term)


def test_domain_errors(table_pi2):
    with pytest.raises(DomainError):
        bessel_product_sum(table_pi2, EV, 3, -0.5)
    with pytest.raises(DomainError):
        ne1_series(table_pi2, 0, 0.5)
    table0 = build_tables(0.0, 5, 30)
    with pytest.raises(DomainError):
        me1_series(table0, 2, 0.5)
