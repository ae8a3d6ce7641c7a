"""Zero-frequency connected response of the chain ground state.

    chi(m a; n b) = - sum_{k>0} [<0|dO_m|k><k|dO_n|0> + <0|dO_n|k><k|dO_m|0>] / (E_k - E_0)

with ``dO = O - <0|O|0>``.  With this sign the two-site antiferromagnet has
a positive cross response, which makes the induced probe coupling
antiferromagnetic.  Two routes are provided: a Lehmann sum over a complete
spectrum and a correction-vector solve that never needs excited states.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateGroundState
from .lattice import SparseOperator
from .solver import (DEGENERACY_TOL, GroundState, SpectrumSlice, degeneracy_threshold,
                     solve_shifted)


@dataclass(frozen=True)
class ResponseValue:
    value: float
    sites: tuple[int | None, int | None]
    labels: tuple[str | None, str | None]
    method: str
    residual: float


def connected_action(op: SparseOperator, psi: np.ndarray) -> np.ndarray:
    """``(O - <O>) |psi>``; the subtraction is applied even when ``<O> = 0``."""
    v = op @ psi
    return v - np.vdot(psi, v) * psi


def _meta(o_m: SparseOperator, o_n: SparseOperator):
    return (o_m.site, o_n.site), (o_m.label, o_n.label)


def chi0_lehmann(spectrum: SpectrumSlice, o_m: SparseOperator, o_n: SparseOperator,
                 degeneracy_tol: float = DEGENERACY_TOL) -> ResponseValue:
    e = spectrum.eigenvalues
    vecs = spectrum.eigenvectors
    if e.size > 1 and e[1] - e[0] <= degeneracy_threshold(e[0], degeneracy_tol):
        raise DegenerateGroundState(f"E1 - E0 = {e[1] - e[0]:.3e}")
    psi = vecs[:, 0]
    a = vecs[:, 1:].conj().T @ connected_action(o_m, psi)
    b = vecs[:, 1:].conj().T @ connected_action(o_n, psi)
    value = -2.0 * np.sum((a.conj() * b).real / (e[1:] - e[0]))
    sites, labels = _meta(o_m, o_n)
    return ResponseValue(float(value), sites, labels, "lehmann", 0.0)


def chi0_correction_vector(hamiltonian: SparseOperator, gs: GroundState, o_m: SparseOperator,
                           o_n: SparseOperator, tol: float = 1e-12) -> ResponseValue:
    """Same quantity via one resolvent solve.

    For Hermitian ``O`` the two orderings are complex conjugates, so
    ``chi = -2 Re <dO_m psi0| Q (H - E0)^-1 Q |dO_n psi0>``.
    """
    psi = gs.vector
    sol = solve_shifted(hamiltonian, gs, connected_action(o_n, psi), tol=tol)
    value = -2.0 * np.vdot(connected_action(o_m, psi), sol.x).real
    sites, labels = _meta(o_m, o_n)
    return ResponseValue(float(value), sites, labels, "correction_vector",
                         max(sol.relative_residual, gs.residual))


def response_profile(hamiltonian: SparseOperator, gs: GroundState, reference: SparseOperator,
                     others: list[SparseOperator], tol: float = 1e-12) -> list[ResponseValue]:
    """``chi(reference; o)`` for every ``o`` in ``others`` from a single solve."""
    psi = gs.vector
    sol = solve_shifted(hamiltonian, gs, connected_action(reference, psi), tol=tol)
    res = max(sol.relative_residual, gs.residual)
    out = []
    for o in others:
        value = -2.0 * np.vdot(connected_action(o, psi), sol.x).real
        sites, labels = _meta(reference, o)
        out.append(ResponseValue(float(value), sites, labels, "correction_vector", res))
    return out


def lehmann_matrix(spectrum: SpectrumSlice, ops: list[SparseOperator],
                   degeneracy_tol: float = DEGENERACY_TOL) -> np.ndarray:
    """All pairwise responses among ``ops`` from one complete spectrum."""
    e = spectrum.eigenvalues
    vecs = spectrum.eigenvectors
    if e.size > 1 and e[1] - e[0] <= degeneracy_threshold(e[0], degeneracy_tol):
        raise DegenerateGroundState(f"E1 - E0 = {e[1] - e[0]:.3e}")
    psi = vecs[:, 0]
    amps = np.array([vecs[:, 1:].conj().T @ connected_action(o, psi) for o in ops])
    w = amps / np.sqrt(e[1:] - e[0])
    g = w.conj() @ w.T
    return -2.0 * g.real
