"""Closed-form and quadrature responses: finite Heisenberg ring and AKLT chain."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy.special import ellipk

from .errors import InvalidSeparation

DEFAULT_FERMI_VELOCITY = np.pi / 2

# single-mode approximation constants of the AKLT chain
SMA_A = Fraction(-2, 3)
SMA_B = Fraction(80, 81)
AKLT_CORRELATION_LENGTH = 1.0 / np.log(3.0)
# The SMA dispersion is quoted in units of the projector Hamiltonian sum P_2,
# and S.S + (S.S)^2/3 = 2 P_2 - 2/3 per bond.
AKLT_SMA_ENERGY_SCALE = 2.0


@dataclass(frozen=True)
class CftParams:
    """Finite periodic Heisenberg ring; ``r`` is the probe separation."""

    L: int
    r: int
    amplitude: float = 1.0
    fermi_velocity: float = DEFAULT_FERMI_VELOCITY

    def __post_init__(self):
        if self.r == 0:
            raise InvalidSeparation("separation r must be >= 1")
        if not 1 <= self.r <= self.L / 2:
            raise InvalidSeparation(f"need 1 <= r <= L/2, got r={self.r}, L={self.L}")
        if self.amplitude <= 0 or self.fermi_velocity <= 0:
            raise ValueError("amplitude and fermi_velocity must be positive")

    @property
    def ratio(self) -> float:
        return self.r / self.L

    @property
    def prefactor(self) -> float:
        return (-1) ** self.r * self.amplitude / (2 * self.fermi_velocity)


@lru_cache(maxsize=None)
def _gauss_legendre(n: int):
    return np.polynomial.legendre.leggauss(n)


def _graded_panels(theta0: float) -> np.ndarray:
    # after y = theta0 + (pi - theta0) s^2 the integrand keeps a layer of
    # width ~ sqrt(theta0) at s = 0 when theta0 is small
    width = np.sqrt(theta0 / np.pi)
    edges = [0.0]
    s = 0.25 * width
    while s < 0.5:
        edges.append(s)
        s *= 2.0
    edges.append(1.0)
    return np.array(edges)


def cft_integral(theta0: float, order: int = 48) -> float:
    """``int_{theta0}^{pi} (y/pi - 1) / sqrt(cos theta0 - cos y) dy``.

    The inverse square-root endpoint is removed with
    ``y = theta0 + (pi - theta0) s**2``; the smooth remainder is integrated by
    composite Gauss-Legendre on panels graded toward ``s = 0``.
    """
    if not 0.0 < theta0 <= np.pi:
        raise InvalidSeparation(f"theta0 must lie in (0, pi], got {theta0}")
    if theta0 == np.pi:
        return 0.0
    c = 0.5 * (np.pi - theta0)
    x, w = _gauss_legendre(order)
    edges = _graded_panels(theta0)
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        s = 0.5 * (hi - lo) * x + 0.5 * (hi + lo)
        y = theta0 + 2.0 * c * s * s
        # cos t0 - cos y = 2 sin((y + t0)/2) sin(c s^2); s / sqrt(sin(c s^2)) kept finite
        denom = np.sqrt(2.0 * np.sin(0.5 * (y + theta0)) * c * np.sinc(c * s * s / np.pi))
        f = 4.0 * c * (y / np.pi - 1.0) / denom
        total += 0.5 * (hi - lo) * np.dot(w, f)
    return float(total)


def cft_response(ratio: float, parity: int, amplitude: float = 1.0,
                 fermi_velocity: float = DEFAULT_FERMI_VELOCITY) -> float:
    """Ring response as a function of the continuous ratio ``r/L`` in (0, 1/2]."""
    if not 0.0 < ratio <= 0.5:
        raise InvalidSeparation(f"r/L must lie in (0, 1/2], got {ratio}")
    if ratio == 0.5:
        return 0.0
    sign = 1 if parity % 2 == 0 else -1
    return sign * amplitude / (2 * fermi_velocity) * cft_integral(2 * np.pi * ratio)


def cft_chi0(params: CftParams) -> float:
    """Bosonization response of the periodic Heisenberg ring.

    Positive at odd separations, exactly zero at ``r = L/2``, logarithmically
    large as ``r/L -> 0``.
    """
    if 2 * params.r == params.L:
        return 0.0
    return params.prefactor * cft_integral(2 * np.pi * params.ratio)


def cft_chi0_imaginary_time(params: CftParams) -> float:
    """Static response from the imaginary-time integral of the ring correlator.

    ``-(-1)^r (2A / v_F) int_0^inf dth / sqrt(2 cosh th - 2 cos(2 pi r/L))``,
    evaluated as a complete elliptic integral ``K(m = cos^2(pi r/L))``.
    Same correlator and amplitude as :func:`cft_chi0`, but it stays finite
    at ``r = L/2``; used as a diagnostic against exact diagonalization.
    """
    m = np.cos(np.pi * params.ratio) ** 2
    return -(-1) ** params.r * 2 * params.amplitude / params.fermi_velocity * float(ellipk(m))


def fit_amplitude(reference_value: float, params: CftParams, model=cft_chi0) -> float:
    """Amplitude that makes ``model`` reproduce ``reference_value`` at ``params.r``."""
    unit = model(CftParams(params.L, params.r, 1.0, params.fermi_velocity))
    if unit == 0.0:
        raise InvalidSeparation("cannot fit the amplitude where the model vanishes")
    return float(reference_value / unit)


def sma_dispersion(q):
    """``5 (5 + 3 cos q) / 27``; the SMA gap at ``q = pi`` is 10/27."""
    return 5.0 * (5.0 + 3.0 * np.cos(q)) / 27.0


def sma_structure_factor(q):
    return (10.0 / 27.0) * (1.0 - np.cos(q)) / sma_dispersion(q)


def _check_r(r: int) -> None:
    if int(r) != r or r < 1:
        raise InvalidSeparation(f"separation must be an integer >= 1, got {r}")


def aklt_chi0_closed_exact(r: int) -> Fraction:
    _check_r(r)
    return Fraction(-27, 10) * (-1) ** r * (1 + Fraction(4, 3) * r) / Fraction(3) ** r


def aklt_chi0_closed(r: int) -> float:
    """``-(27/10) (-1)^r (1 + 4r/3) 3^-r``, i.e. ``J_ab / J_p^2`` in SMA energy units."""
    return float(aklt_chi0_closed_exact(r))


def aklt_chi0_integral(r: int, printed: bool = False, nodes: int | None = None) -> float:
    """SMA momentum integral for the AKLT response at separation ``r``.

    Default: ``-(1/pi) int_0^pi cos(qr) 2 s(q) / w_q dq``, which equals
    :func:`aklt_chi0_closed`.  ``printed=True`` instead evaluates
    ``(1/2pi) int cos(qr) (a + b/w_q) / w_q dq`` with ``a = -2/3``,
    ``b = 80/81``; that form comes out at ``-1/2`` times the default.

    The integrand is analytic and periodic, so the uniform (trapezoidal)
    rule converges geometrically, roughly as ``3**-nodes``.
    """
    _check_r(r)
    n = nodes if nodes is not None else 96 + 2 * int(r)
    q = -np.pi + 2 * np.pi * np.arange(n) / n
    w = sma_dispersion(q)
    if printed:
        f = np.cos(q * r) * (float(SMA_A) + float(SMA_B) / w) / w
        return float(f.mean())
    f = np.cos(q * r) * 2.0 * sma_structure_factor(q) / w
    return float(-f.mean())


def aklt_chi0_chain_units(r: int) -> float:
    """Closed form rescaled to the ``S.S + (S.S)^2/3`` Hamiltonian (J = 1)."""
    return aklt_chi0_closed(r) / AKLT_SMA_ENERGY_SCALE
