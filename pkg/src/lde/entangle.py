"""Negativity and thermal states of the two-probe effective Hamiltonian."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .effham import EffectiveProbeHamiltonian
from .errors import InvalidState, NeverEntangled

PSD_TOL = 1e-12
# negativities below this count as zero (round-off of a 4x4 eigensolve)
NEGATIVITY_FLOOR = 1e-14


@dataclass(frozen=True, eq=False)
class ProbePairState:
    rho: np.ndarray
    dims: tuple[int, int] = (2, 2)

    def __post_init__(self):
        rho = np.asarray(self.rho, dtype=complex)
        n = self.dims[0] * self.dims[1]
        if rho.shape != (n, n):
            raise InvalidState(f"density matrix must be {n}x{n}, got {rho.shape}")
        if np.abs(rho - rho.conj().T).max() > PSD_TOL:
            raise InvalidState("density matrix is not Hermitian")
        if abs(np.trace(rho) - 1) > PSD_TOL:
            raise InvalidState(f"trace is {np.trace(rho).real:.15g}, not 1")
        if np.linalg.eigvalsh(rho).min() < -PSD_TOL:
            raise InvalidState("density matrix is not positive semidefinite")
        object.__setattr__(self, "rho", rho)

    @classmethod
    def pure(cls, psi) -> "ProbePairState":
        psi = np.asarray(psi, dtype=complex)
        psi = psi / np.linalg.norm(psi)
        return cls(np.outer(psi, psi.conj()))


def partial_transpose(rho: np.ndarray, dims=(2, 2), side: str = "b") -> np.ndarray:
    da, db = dims
    t = rho.reshape(da, db, da, db)
    t = t.transpose(0, 3, 2, 1) if side == "b" else t.transpose(2, 1, 0, 3)
    return t.reshape(da * db, da * db)


def negativity(state: ProbePairState, side: str = "b") -> float:
    """``(||rho^T||_1 - 1) / 2``: 1/2 for a Bell pair, 0 for separable states."""
    if state.dims != (2, 2):
        raise InvalidState("negativity is implemented for two qubits")
    if side not in ("a", "b"):
        raise ValueError("side must be 'a' or 'b'")
    ev = np.linalg.eigvalsh(partial_transpose(state.rho, state.dims, side))
    n = float(-ev[ev < 0].sum())
    return n if n > NEGATIVITY_FLOOR else 0.0


def _matrix(h) -> np.ndarray:
    return h.matrix if isinstance(h, EffectiveProbeHamiltonian) else np.asarray(h)


def thermal_state(h, beta: float) -> ProbePairState:
    """Gibbs state ``exp(-beta H) / Tr exp(-beta H)`` from the exact eigendecomposition."""
    if not np.isfinite(beta) or beta < 0:
        raise ValueError(f"beta must be finite and >= 0, got {beta}")
    e, v = np.linalg.eigh(_matrix(h))
    w = np.exp(-beta * (e - e[0]))
    w /= w.sum()
    rho = (v * w) @ v.conj().T
    return ProbePairState(0.5 * (rho + rho.conj().T))


@dataclass(frozen=True)
class ThermalCurve:
    betas: np.ndarray
    negativities: np.ndarray
    threshold: float | None = field(default=None)


def thermal_curve(h, betas) -> ThermalCurve:
    betas = np.asarray(betas, dtype=float)
    negs = np.array([negativity(thermal_state(h, b)) for b in betas])
    try:
        beta_star = entanglement_threshold(h)
    except NeverEntangled:
        beta_star = None
    return ThermalCurve(betas, negs, beta_star)


def entanglement_threshold(h, tol: float = 1e-10, step: float | None = None,
                           beta_max: float | None = None) -> float:
    """Smallest ``beta`` at which the thermal negativity becomes positive.

    A forward scan with spacing ``step`` (default ``0.05 / spread`` where
    ``spread`` is the bandwidth of ``H``) brackets the first crossing, which
    is then refined by bisection to ``tol``.

    Raises
    ------
    NeverEntangled
        If the state is separable at every scanned ``beta`` up to ``beta_max``
        (default: where the Boltzmann factor across the spectrum hits 1e-300).
    """
    m = _matrix(h)
    e = np.linalg.eigvalsh(m)
    spread = e[-1] - e[0]
    if spread <= 0:
        raise NeverEntangled("H_eff is proportional to the identity")
    if step is None:
        step = 0.05 / spread
    if beta_max is None:
        beta_max = 700.0 / spread

    def entangled(b):
        return negativity(thermal_state(m, b)) > 0.0

    lo = 0.0
    hi = None
    k = 1
    while k * step <= beta_max:
        b = k * step
        if entangled(b):
            hi = b
            break
        lo = b
        k += 1
    if hi is None:
        if entangled(beta_max):
            hi = beta_max
        else:
            raise NeverEntangled("negativity vanishes at every temperature")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if entangled(mid):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)
