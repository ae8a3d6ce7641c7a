from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from lde.analytic import (CftParams, aklt_chi0_closed, aklt_chi0_closed_exact,
                          aklt_chi0_integral, cft_chi0, cft_chi0_imaginary_time, cft_integral,
                          cft_response, fit_amplitude, sma_dispersion, sma_structure_factor)
from lde.errors import InvalidSeparation

from oracles import cft_integral_mp, cft_integral_qaws, periodic_mean, ring_imaginary_time

GRID = [0.05 * k for k in range(1, 11)]


@pytest.mark.parametrize("x", GRID[:-1] + [1e-5, 1e-3, 0.4999])
def test_cft_integral_against_oracles(x):
    t = 2 * np.pi * x
    val = cft_integral(t)
    assert val == pytest.approx(cft_integral_qaws(t), rel=1e-8)
    assert val == pytest.approx(cft_integral_mp(t), rel=1e-8)


def test_cft_quarter_ring_unit_velocity():
    p = CftParams(4, 1, amplitude=1.0, fermi_velocity=1.0)
    want = -0.5 * cft_integral_qaws(np.pi / 2)
    assert cft_chi0(p) == pytest.approx(want, rel=1e-8)
    assert cft_chi0(p) > 0


def test_cft_frozen_values():
    # tanh-sinh at 30 digits
    assert cft_integral(2 * np.pi * 0.25) == pytest.approx(-0.8513441117969001, rel=1e-13)
    assert cft_integral(2 * np.pi * 0.05) == pytest.approx(-2.9497468028582974, rel=1e-13)


def test_cft_half_ring_zero():
    assert cft_chi0(CftParams(16, 8)) == 0.0
    assert cft_response(0.5, 1) == 0.0


def test_cft_separation_checks():
    with pytest.raises(InvalidSeparation):
        CftParams(16, 0)
    with pytest.raises(InvalidSeparation):
        CftParams(16, 9)
    with pytest.raises(InvalidSeparation):
        cft_response(0.0, 1)


@pytest.mark.parametrize("L", [8, 16, 40])
def test_cft_sign_pattern(L):
    for r in range(1, L // 2):
        assert np.sign(cft_chi0(CftParams(L, r))) == (-1) ** (r + 1)


def test_cft_monotone_decreasing():
    xs = np.linspace(1e-4, 0.5, 400)
    for parity in (0, 1):
        mags = np.abs([cft_response(x, parity) for x in xs])
        assert np.all(np.diff(mags) < 0)


def test_cft_log_divergence_signature():
    xs = 0.1 * 2.0 ** -np.arange(12)
    diffs = [abs(cft_response(x / 2, 1)) - abs(cft_response(x, 1)) for x in xs]
    assert all(d > 0 for d in diffs)
    # successive differences settle onto a constant: a log, not a power law
    tail = np.array(diffs[-5:])
    assert np.ptp(tail) < 1e-3 * tail.mean()


@given(st.floats(1e-4, 0.5), st.floats(0.1, 10), st.floats(0.1, 10))
def test_cft_scales_with_amplitude_over_velocity(x, a, v):
    base = cft_response(x, 1)
    assert cft_response(x, 1, a, v) == pytest.approx(base * a / v * np.pi / 2, rel=1e-12, abs=1e-300)


def test_fit_amplitude_reproduces_reference():
    p = CftParams(16, 3)
    amp = fit_amplitude(0.41444412676992187, p)
    assert cft_chi0(CftParams(16, 3, amp)) == pytest.approx(0.41444412676992187, rel=1e-14)
    with pytest.raises(InvalidSeparation):
        fit_amplitude(1.0, CftParams(16, 8))


@pytest.mark.parametrize("r", [1, 2, 3, 5, 8])
def test_imaginary_time_variant_against_quadrature(r):
    p = CftParams(16, r)
    want = -(-1) ** r * ring_imaginary_time(r / 16)
    assert cft_chi0_imaginary_time(p) == pytest.approx(want, rel=1e-9)


def test_sma_values():
    assert sma_dispersion(0.0) == pytest.approx(40 / 27)
    assert sma_dispersion(np.pi) == pytest.approx(10 / 27)
    assert sma_structure_factor(np.pi) == pytest.approx(2.0)
    assert sma_structure_factor(0.0) == 0.0


@given(st.floats(-np.pi, np.pi))
def test_sma_identities(q):
    w = sma_dispersion(q)
    s = sma_structure_factor(q)
    assert 10 / 27 - 1e-15 <= w <= 40 / 27 + 1e-15
    assert s >= 0
    assert s * w == pytest.approx(10 / 27 * (1 - np.cos(q)), abs=1e-15)
    assert sma_dispersion(-q) == w and sma_structure_factor(-q) == s


def test_aklt_closed_form_values():
    assert aklt_chi0_closed_exact(1) == Fraction(21, 10)
    assert aklt_chi0_closed_exact(2) == Fraction(-11, 10)
    assert aklt_chi0_closed_exact(3) == Fraction(1, 2)
    assert aklt_chi0_closed(1) == 2.1


def test_aklt_trig_integrals():
    a = periodic_mean(lambda q: np.cos(q) / (25 + 15 * np.cos(q)) ** 2)
    b = periodic_mean(lambda q: np.cos(q) ** 2 / (25 + 15 * np.cos(q)) ** 2)
    assert a == pytest.approx(-0.001875, rel=1e-10)
    assert b == pytest.approx(0.00201389, rel=1e-6)
    assert -540 * (a - b) == pytest.approx(2.1, rel=1e-10)


@pytest.mark.parametrize("r", range(1, 13))
def test_aklt_integral_matches_closed_form(r):
    assert aklt_chi0_integral(r) == pytest.approx(aklt_chi0_closed(r), abs=1e-10)


@pytest.mark.parametrize("r", range(1, 9))
def test_aklt_integral_against_adaptive_quadrature(r):
    want = -periodic_mean(lambda q: np.cos(q * r) * 2 * sma_structure_factor(q) / sma_dispersion(q))
    assert aklt_chi0_integral(r) == pytest.approx(want, abs=1e-10)


def test_aklt_printed_integrand_is_minus_half():
    for r in range(1, 8):
        assert aklt_chi0_integral(r, printed=True) == pytest.approx(-0.5 * aklt_chi0_closed(r),
                                                                    abs=1e-12)
    assert aklt_chi0_integral(1, printed=True) == pytest.approx(-1.05, abs=1e-12)


def test_aklt_sign_and_decay():
    for r in range(1, 11):
        v = aklt_chi0_integral(r)
        assert np.sign(v) == (-1) ** (r + 1)
        assert abs(v) <= 2.7 * (1 + 4 * r / 3) * 3.0 ** -r + 1e-12


def test_aklt_exponential_slope_exact():
    for r in range(1, 30):
        ratio = aklt_chi0_closed_exact(r + 1) / aklt_chi0_closed_exact(r)
        ratio /= Fraction(3 + 4 * (r + 1), 3 + 4 * r)
        assert ratio == Fraction(-1, 3)


def test_aklt_bad_separation():
    with pytest.raises(InvalidSeparation):
        aklt_chi0_closed(0)
    with pytest.raises(InvalidSeparation):
        aklt_chi0_integral(1.5)
