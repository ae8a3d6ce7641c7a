"""Eigen- and linear solvers for chain Hamiltonians.

Dense diagonalization covers small instances completely.  Larger ones use a
Lanczos ground-state search (full reorthogonalization) and a projected
conjugate-gradient solve of ``Q (H - E0) Q x = Q b`` with
``Q = 1 - |psi0><psi0|``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import (DegenerateGroundState, NoConvergence, ProjectionError,
                     TooLargeForDense)
from .lattice import SparseOperator

log = logging.getLogger(__name__)

DENSE_CAP = 8192
DEGENERACY_TOL = 1e-8


def degeneracy_threshold(e0: float, tol: float = DEGENERACY_TOL) -> float:
    return tol * max(1.0, abs(e0))


@dataclass(frozen=True, eq=False)
class SpectrumSlice:
    """Ascending eigenvalues with eigenvectors stored as columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def __len__(self):
        return self.eigenvalues.size


@dataclass(frozen=True, eq=False)
class GroundState:
    energy: float
    vector: np.ndarray
    residual: float
    gap: float
    iterations: int = 0


def dense_spectrum(op: SparseOperator, cap: int = DENSE_CAP) -> SpectrumSlice:
    if op.dimension > cap:
        raise TooLargeForDense(f"dimension {op.dimension} exceeds dense cap {cap}")
    evals, evecs = np.linalg.eigh(op.dense())
    return SpectrumSlice(evals, evecs)


def ground_from_spectrum(spectrum: SpectrumSlice, op: SparseOperator | None = None,
                         degeneracy_tol: float = DEGENERACY_TOL) -> GroundState:
    """Wrap the lowest eigenpair of a complete spectrum as a :class:`GroundState`."""
    e = spectrum.eigenvalues
    psi = spectrum.eigenvectors[:, 0]
    gap = float(e[1] - e[0]) if e.size > 1 else np.inf
    if gap <= degeneracy_threshold(e[0], degeneracy_tol):
        raise DegenerateGroundState(f"E1 - E0 = {gap:.3e}")
    res = 0.0 if op is None else float(np.linalg.norm(op @ psi - e[0] * psi))
    return GroundState(float(e[0]), psi, res, gap)


def _start_vector(n: int, dtype, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(n)
    if np.issubdtype(dtype, np.complexfloating):
        v = v + 1j * rng.standard_normal(n)
    return v


def _lanczos_lowest(apply, v0: np.ndarray, tol: float, maxiter: int, project=None,
                    check_every: int = 5):
    """Lowest Ritz pair of the operator ``apply``, restricted to the range of ``project``.

    Returns (theta, x, residual, iterations).  ``residual`` is the true
    ``||A x - theta x||``, recomputed from the assembled Ritz vector.
    """
    proj = project or (lambda w: w)
    v = proj(v0.copy())
    nv = np.linalg.norm(v)
    if nv == 0.0:
        raise NoConvergence("Lanczos start vector vanishes after projection")
    v /= nv
    n = v.size
    m_max = min(maxiter, n)
    basis = np.empty((m_max, n), dtype=v.dtype)
    alphas, betas = [], []
    theta, s = None, None
    for j in range(m_max):
        basis[j] = v
        w = proj(apply(v))
        a = np.vdot(v, w).real
        alphas.append(a)
        # full reorthogonalization, twice for stability
        for _ in range(2):
            w -= basis[: j + 1].T @ (basis[: j + 1].conj() @ w)
        w = proj(w)
        b = np.linalg.norm(w)
        exhausted = b <= 1e-14 * max(1.0, abs(a)) or j + 1 == m_max
        if exhausted or (j + 1) % check_every == 0:
            if j == 0:
                theta, s = alphas[0], np.ones(1)
            else:
                vals, vecs = eigh_tridiagonal(np.array(alphas), np.array(betas),
                                              select="i", select_range=(0, 0))
                theta, s = vals[0], vecs[:, 0]
            if exhausted or b * abs(s[-1]) <= 0.1 * tol:
                break
        betas.append(b)
        v = w / b
    m = len(alphas)
    x = basis[:m].T @ s.astype(basis.dtype)
    x = proj(x)
    x /= np.linalg.norm(x)
    ax = proj(apply(x))
    theta = np.vdot(x, ax).real
    res = float(np.linalg.norm(ax - theta * x))
    return float(theta), x, res, m


def lanczos_ground(op: SparseOperator, tol: float = 1e-11, maxiter: int = 600,
                   seed: int = 0, degeneracy_tol: float = DEGENERACY_TOL,
                   max_restarts: int = 8, compute_gap: bool = True) -> GroundState:
    """Ground state of a Hermitian operator by Lanczos iteration.

    The gap is found by a second Lanczos run on the operator with the ground
    state projected out, so an exactly degenerate partner of the ground state
    shows up as ``gap ~ 0`` instead of being missed.  With
    ``compute_gap=False`` that second run is skipped and ``gap`` is NaN.

    Raises
    ------
    NoConvergence
        If the residual is still above ``tol`` after the restarts.
    DegenerateGroundState
        If ``gap <= degeneracy_tol * max(1, |E0|)``.
    """
    h = op.matrix
    n = op.dimension
    dtype = np.result_type(h.dtype, np.float64)

    def apply(v):
        return h @ v

    v0 = _start_vector(n, dtype, seed)
    total = 0
    for _ in range(max_restarts + 1):
        e0, psi, res, it = _lanczos_lowest(apply, v0, tol, maxiter)
        total += it
        if res <= tol:
            break
        v0 = psi
    else:
        raise NoConvergence(f"Lanczos residual {res:.3e} > {tol:.1e} after {total} steps")
    log.debug("lanczos ground: E0=%.15g residual=%.2e steps=%d", e0, res, total)

    if n == 1:
        return GroundState(e0, psi, res, np.inf, total)
    if not compute_gap:
        return GroundState(e0, psi, res, np.nan, total)

    def deflate(w):
        return w - psi * np.vdot(psi, w)

    # only the eigenvalue matters here; its error is bounded by the residual
    gap_tol = 0.1 * degeneracy_threshold(e0, degeneracy_tol)
    v1 = _start_vector(n, dtype, seed + 1)
    for _ in range(max_restarts + 1):
        e1, x1, res1, it = _lanczos_lowest(apply, v1, gap_tol, maxiter, project=deflate)
        total += it
        if res1 <= gap_tol:
            break
        v1 = x1
    else:
        raise NoConvergence(f"gap estimate did not converge (residual {res1:.3e})")
    gap = e1 - e0
    if gap <= degeneracy_threshold(e0, degeneracy_tol):
        raise DegenerateGroundState(f"E1 - E0 = {gap:.3e}")
    return GroundState(e0, psi, res, float(gap), total)


def ground_state(op: SparseOperator, tol: float = 1e-11, dense_below: int = 0,
                 **kwargs) -> GroundState:
    """Dense route for ``dimension <= dense_below``, Lanczos otherwise."""
    if op.dimension <= dense_below:
        return ground_from_spectrum(dense_spectrum(op), op)
    return lanczos_ground(op, tol=tol, **kwargs)


@dataclass(frozen=True, eq=False)
class ShiftedSolution:
    x: np.ndarray
    relative_residual: float
    iterations: int


def solve_shifted(op: SparseOperator, gs: GroundState, rhs: np.ndarray, tol: float = 1e-12,
                  maxiter: int = 5000, orthogonality_tol: float = 1e-10,
                  max_restarts: int = 3) -> ShiftedSolution:
    """Solve ``Q (H - E0) Q x = Q rhs`` with ``<psi0|x> = 0`` by projected CG.

    The right-hand side must already be orthogonal to the ground state.
    The returned ``relative_residual`` is recomputed from ``x``, not taken
    from the CG recursion.
    """
    psi = gs.vector
    h = op.matrix
    e0 = gs.energy
    rhs = np.asarray(rhs)
    bnorm = np.linalg.norm(rhs)
    if bnorm == 0.0:
        return ShiftedSolution(np.zeros_like(rhs), 0.0, 0)
    overlap = abs(np.vdot(psi, rhs))
    if overlap > orthogonality_tol * bnorm:
        raise ProjectionError(f"|<psi0|rhs>| / ||rhs|| = {overlap / bnorm:.3e}")

    def q(w):
        return w - psi * np.vdot(psi, w)

    def apply(w):
        w = q(w)
        return q(h @ w - e0 * w)

    dtype = np.result_type(rhs.dtype, h.dtype, psi.dtype)
    b = q(rhs.astype(dtype))
    x = np.zeros_like(b)
    total = 0
    for _ in range(max_restarts + 1):
        r = b - apply(x)
        p = r.copy()
        rr = np.vdot(r, r).real
        for _ in range(maxiter):
            if np.sqrt(rr) <= tol * bnorm:
                break
            ap = apply(p)
            alpha = rr / np.vdot(p, ap).real
            x += alpha * p
            r -= alpha * ap
            r = q(r)
            rr_new = np.vdot(r, r).real
            p = q(r + (rr_new / rr) * p)
            rr = rr_new
            total += 1
        x = q(x)
        rel = float(np.linalg.norm(apply(x) - b) / bnorm)
        if rel <= max(tol, 1e-10):
            return ShiftedSolution(x, rel, total)
    raise NoConvergence(f"shifted solve relative residual {rel:.3e} after {total} steps")
