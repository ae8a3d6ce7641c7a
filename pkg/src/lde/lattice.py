"""Spin bases, site operators and chain(+probe) Hamiltonians.

Basis convention
----------------
Each site carries a local label ``k = 0 .. 2s`` with ``Sz = s - k`` (so the
highest-weight state comes first).  A product state is encoded as the integer
``sum_i k_i * d**(L - i)`` with sites numbered ``1..L`` and site 1 the most
significant digit.  Basis states are stored in ascending code order, i.e.
lexicographic in the local labels, which makes every matrix built here
reproducible bit for bit.

Probe spaces are appended to the right of the chain: the full space of
:func:`build_full_hamiltonian` is ``chain (x) probe_a (x) probe_b``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import scipy.sparse as sp

from .errors import BasisMismatch, EmptySector, InvalidSpec, SectorViolation

SITE_LABELS = ("Sx", "Sy", "Sz", "S+", "S-")
PROBE_LABELS = ("x", "y", "z")
MODELS = ("heisenberg_spin_half", "bilinear_biquadratic_spin1")
BOUNDARIES = ("open", "periodic")
PROBE_NORMS = ("pauli", "spin_half")

_MAX_ENUMERATION = 1 << 25


def _as_spin(local_spin) -> Fraction:
    s = Fraction(local_spin).limit_denominator(2)
    if s not in (Fraction(1, 2), Fraction(1)):
        raise InvalidSpec(f"local_spin must be 1/2 or 1, got {local_spin!r}")
    return s


@dataclass(frozen=True, eq=False)
class SpinBasis:
    """Product basis of ``L`` spins, optionally restricted to one total-Sz sector."""

    L: int
    local_spin: Fraction
    sector: Fraction | None
    labels: np.ndarray = field(repr=False)
    codes: np.ndarray = field(repr=False)

    @property
    def dimension(self) -> int:
        return int(self.codes.size)

    @property
    def local_dim(self) -> int:
        return int(2 * self.local_spin + 1)

    def site_weight(self, site: int) -> int:
        return self.local_dim ** (self.L - site)

    def index(self, state) -> int:
        """Position of the product state given by its local labels."""
        state = np.asarray(state, dtype=np.int64)
        if state.shape != (self.L,) or state.min() < 0 or state.max() >= self.local_dim:
            raise KeyError(f"not a valid label tuple: {tuple(state)}")
        weights = self.local_dim ** np.arange(self.L - 1, -1, -1, dtype=np.int64)
        idx, found = self.lookup(np.array([state @ weights]))
        if not found[0]:
            raise KeyError(f"state {tuple(state)} is outside sector {self.sector}")
        return int(idx[0])

    def state(self, i: int) -> tuple[int, ...]:
        return tuple(int(k) for k in self.labels[i])

    def lookup(self, codes: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Map integer codes to basis positions; second array flags membership."""
        if self.sector is None:
            return codes, (codes >= 0) & (codes < self.dimension)
        idx = np.searchsorted(self.codes, codes)
        idx_c = np.minimum(idx, self.dimension - 1)
        return idx_c, self.codes[idx_c] == codes

    def sz(self, site: int) -> np.ndarray:
        """Sz eigenvalue of ``site`` (1-based) in every basis state."""
        return float(self.local_spin) - self.labels[:, site - 1].astype(np.float64)

    def total_sz(self) -> np.ndarray:
        return self.L * float(self.local_spin) - self.labels.sum(axis=1, dtype=np.float64)


def build_basis(L: int, local_spin=Fraction(1, 2), sector=None) -> SpinBasis:
    """Enumerate the product basis of ``L`` spins.

    Parameters
    ----------
    L : int
        Number of sites, ``L >= 1``.
    local_spin : 1/2 or 1
    sector : optional
        Total Sz to restrict to.  Half-integers are accepted as floats or
        :class:`fractions.Fraction`.

    Raises
    ------
    EmptySector
        If no product state has the requested total Sz.
    """
    if L < 1:
        raise InvalidSpec(f"L must be >= 1, got {L}")
    s = _as_spin(local_spin)
    d = int(2 * s + 1)
    if d**L > _MAX_ENUMERATION:
        raise InvalidSpec(f"{d}**{L} states is beyond the enumeration limit")
    codes = np.arange(d**L, dtype=np.int64)
    labels = np.empty((codes.size, L), dtype=np.int8)
    rem = codes.copy()
    for i in range(L - 1, -1, -1):
        rem, labels[:, i] = np.divmod(rem, d)
    sec = None
    if sector is not None:
        sec = Fraction(sector).limit_denominator(2)
        # 2*Sz_total = 2*L*s - 2*sum(k)
        target = int(2 * L * s - 2 * sec)
        if target % 2:
            raise EmptySector(f"no states with Sz={sector} for L={L}, s={s}")
        mask = labels.sum(axis=1, dtype=np.int64) == target // 2
        if not mask.any():
            raise EmptySector(f"no states with Sz={sector} for L={L}, s={s}")
        codes, labels = codes[mask], labels[mask]
    codes.setflags(write=False)
    labels.setflags(write=False)
    return SpinBasis(L, s, sec, labels, codes)


@dataclass(frozen=True)
class ProductSpace:
    """Chain basis times the two probe spaces (chain is the slowest index)."""

    chain: SpinBasis
    probe_dims: tuple[int, int] = (2, 2)

    @property
    def dimension(self) -> int:
        return self.chain.dimension * self.probe_dims[0] * self.probe_dims[1]


@dataclass(frozen=True, eq=False)
class SparseOperator:
    matrix: sp.csr_matrix
    space: SpinBasis | ProductSpace
    hermitian: bool = True
    name: str = ""
    site: int | None = None
    label: str | None = None

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    @property
    def dtype(self):
        return self.matrix.dtype

    def __matmul__(self, other):
        return self.matrix @ other

    def dense(self) -> np.ndarray:
        return self.matrix.toarray()

    def hermiticity_error(self) -> float:
        diff = self.matrix - self.matrix.conj().T
        return float(abs(diff).max()) if diff.nnz else 0.0

    def expectation(self, psi: np.ndarray) -> complex:
        return np.vdot(psi, self.matrix @ psi)


def _ladder_coefficient(s: float, m: np.ndarray, sign: int) -> np.ndarray:
    return np.sqrt(s * (s + 1) - m * (m + sign))


def _ladder(basis: SpinBasis, site: int, sign: int):
    """Rows, cols, values of S+ (sign=+1) or S- (sign=-1) on ``site``."""
    s = float(basis.local_spin)
    k = basis.labels[:, site - 1]
    cols = np.flatnonzero(k >= 1) if sign > 0 else np.flatnonzero(k < basis.local_dim - 1)
    m = s - k[cols].astype(np.float64)
    new = basis.codes[cols] - sign * basis.site_weight(site)
    rows, found = basis.lookup(new)
    if not found.all():
        raise SectorViolation(f"S{'+' if sign > 0 else '-'} leaves sector {basis.sector}")
    return rows, cols, _ladder_coefficient(s, m, sign)


def _check_site(basis: SpinBasis, site: int) -> None:
    if not 1 <= site <= basis.L:
        raise InvalidSpec(f"site {site} outside 1..{basis.L}")


def site_operator(basis: SpinBasis, site: int, label: str) -> SparseOperator:
    """Standard spin operator ``label`` acting on ``site`` (1-based).

    In a fixed-Sz basis only ``Sz`` is representable.
    """
    _check_site(basis, site)
    label = "S-" if label in ("S-", "S−") else label
    if label not in SITE_LABELS:
        raise InvalidSpec(f"unknown site operator {label!r}; expected one of {SITE_LABELS}")
    if basis.sector is not None and label != "Sz":
        raise SectorViolation(f"{label} does not preserve the Sz={basis.sector} sector")
    n = basis.dimension
    if label == "Sz":
        mat = sp.diags(basis.sz(site), format="csr")
    elif label in ("S+", "S-"):
        r, c, v = _ladder(basis, site, +1 if label == "S+" else -1)
        mat = sp.csr_matrix((v, (r, c)), shape=(n, n))
    else:
        r, c, v = _ladder(basis, site, +1)
        splus = sp.csr_matrix((v, (r, c)), shape=(n, n))
        if label == "Sx":
            mat = 0.5 * (splus + splus.T)
        else:
            mat = (-0.5j) * (splus - splus.T)
    mat.sort_indices()
    return SparseOperator(mat.tocsr(), basis, hermitian=label in ("Sx", "Sy", "Sz"),
                          name=f"{label}_{site}", site=site, label=label)


def spin_dot(basis: SpinBasis, i: int, j: int) -> SparseOperator:
    """S_i . S_j, built directly so that it works inside an Sz sector."""
    _check_site(basis, i)
    _check_site(basis, j)
    if i == j:
        raise InvalidSpec("spin_dot needs two distinct sites")
    n = basis.dimension
    s = float(basis.local_spin)
    ki = basis.labels[:, i - 1]
    kj = basis.labels[:, j - 1]
    top = basis.local_dim - 1
    rows = [np.arange(n)]
    cols = [np.arange(n)]
    vals = [basis.sz(i) * basis.sz(j)]
    # 1/2 (S+_i S-_j + S-_i S+_j)
    for sign in (+1, -1):
        ok = (ki >= 1) & (kj < top) if sign > 0 else (ki < top) & (kj >= 1)
        c = np.flatnonzero(ok)
        mi = s - ki[c].astype(np.float64)
        mj = s - kj[c].astype(np.float64)
        new = basis.codes[c] - sign * basis.site_weight(i) + sign * basis.site_weight(j)
        r, found = basis.lookup(new)
        assert found.all()
        rows.append(r)
        cols.append(c)
        vals.append(0.5 * _ladder_coefficient(s, mi, sign) * _ladder_coefficient(s, mj, -sign))
    mat = sp.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                        shape=(n, n))
    mat.sum_duplicates()
    return SparseOperator(mat, basis, name=f"S{i}.S{j}")


@dataclass(frozen=True)
class ChainSpec:
    """Declarative chain model; energies are in units of the exchange J = 1."""

    model: str
    L: int
    biquadratic_beta: float = 1.0 / 3.0
    boundary: str = "open"

    def __post_init__(self):
        if self.model not in MODELS:
            raise InvalidSpec(f"unknown model {self.model!r}; expected one of {MODELS}")
        if self.boundary not in BOUNDARIES:
            raise InvalidSpec(f"unknown boundary {self.boundary!r}; expected one of {BOUNDARIES}")
        if int(self.L) != self.L or self.L < 2:
            raise InvalidSpec(f"L must be an integer >= 2, got {self.L}")
        if self.boundary == "periodic" and self.L < 3:
            raise InvalidSpec("periodic boundary needs L >= 3")
        if not np.isfinite(self.biquadratic_beta):
            raise InvalidSpec("biquadratic_beta must be finite")

    @property
    def local_spin(self) -> Fraction:
        return Fraction(1, 2) if self.model == "heisenberg_spin_half" else Fraction(1)

    def bonds(self) -> list[tuple[int, int]]:
        out = [(i, i + 1) for i in range(1, self.L)]
        if self.boundary == "periodic":
            out.append((self.L, 1))
        return out

    def basis(self, sector=None) -> SpinBasis:
        return build_basis(self.L, self.local_spin, sector)


def build_chain_hamiltonian(spec: ChainSpec, sector=None, basis: SpinBasis | None = None
                            ) -> SparseOperator:
    """Chain Hamiltonian, in the full basis or in one total-Sz sector.

    ``heisenberg_spin_half``: ``sum S_i.S_{i+1}``.
    ``bilinear_biquadratic_spin1``: ``sum S_i.S_{i+1} + beta (S_i.S_{i+1})**2``.
    """
    if basis is None:
        basis = spec.basis(sector)
    elif basis.L != spec.L or basis.local_spin != spec.local_spin:
        raise BasisMismatch("basis does not match the chain spec")
    n = basis.dimension
    h = sp.csr_matrix((n, n), dtype=np.float64)
    for i, j in spec.bonds():
        bond = spin_dot(basis, i, j).matrix
        h = h + bond
        if spec.model == "bilinear_biquadratic_spin1" and spec.biquadratic_beta != 0.0:
            h = h + spec.biquadratic_beta * (bond @ bond)
    h = h.tocsr()
    h.sum_duplicates()
    h.eliminate_zeros()
    h.sort_indices()
    return SparseOperator(h, basis, name=f"H[{spec.model},L={spec.L},{spec.boundary}]")


@dataclass(frozen=True)
class CouplingTerm:
    """One term ``strength * O_{chain_site}^{chain_label} (x) X_probe^{probe_label}``."""

    chain_site: int
    chain_label: str
    probe: str
    probe_label: str
    strength: float

    def __post_init__(self):
        if self.probe not in ("a", "b"):
            raise InvalidSpec(f"probe must be 'a' or 'b', got {self.probe!r}")
        if self.chain_label not in ("Sx", "Sy", "Sz"):
            raise InvalidSpec(f"chain operator must be Hermitian (Sx, Sy, Sz), got {self.chain_label!r}")
        if self.probe_label not in PROBE_LABELS:
            raise InvalidSpec(f"probe operator must be one of {PROBE_LABELS}, got {self.probe_label!r}")
        if not np.isfinite(self.strength) or np.iscomplexobj(self.strength):
            raise InvalidSpec(f"coupling strength must be real and finite, got {self.strength!r}")


@dataclass(frozen=True)
class ProbeSpec:
    """Two probes, ``a`` on chain site ``site_m`` and ``b`` on ``site_n``."""

    site_m: int
    site_n: int
    couplings: tuple[CouplingTerm, ...]
    probe_dimension: int = 2
    probe_norm: str = "pauli"

    def __post_init__(self):
        object.__setattr__(self, "couplings", tuple(self.couplings))
        if self.site_m == self.site_n:
            raise InvalidSpec("probes must couple to distinct sites (m != n)")
        if self.probe_norm not in PROBE_NORMS:
            raise InvalidSpec(f"probe_norm must be one of {PROBE_NORMS}")
        if self.probe_dimension < 2:
            raise InvalidSpec("probe_dimension must be >= 2")
        if self.probe_norm == "pauli" and self.probe_dimension != 2:
            raise InvalidSpec("Pauli normalization needs two-level probes")
        for t in self.couplings:
            want = self.site_m if t.probe == "a" else self.site_n
            if t.chain_site != want:
                raise InvalidSpec(f"probe {t.probe} couples to site {want}, term names site {t.chain_site}")

    @classmethod
    def heisenberg(cls, site_m: int, site_n: int, J_a: float = 1.0, J_b: float | None = None,
                   probe_norm: str = "pauli") -> "ProbeSpec":
        """``J_a S_m . tau_a + J_b S_n . tau_b``."""
        J_b = J_a if J_b is None else J_b
        terms = [CouplingTerm(site_m, "S" + a, "a", a, J_a) for a in PROBE_LABELS]
        terms += [CouplingTerm(site_n, "S" + a, "b", a, J_b) for a in PROBE_LABELS]
        return cls(site_m, site_n, tuple(terms), 2, probe_norm)

    def scaled(self, factor: float) -> "ProbeSpec":
        terms = tuple(CouplingTerm(t.chain_site, t.chain_label, t.probe, t.probe_label,
                                   factor * t.strength) for t in self.couplings)
        return ProbeSpec(self.site_m, self.site_n, terms, self.probe_dimension, self.probe_norm)

    def check_chain(self, chain: ChainSpec) -> None:
        for s in (self.site_m, self.site_n):
            if not 1 <= s <= chain.L:
                raise InvalidSpec(f"probe site {s} outside chain 1..{chain.L}")


def spin_matrices(d: int) -> dict[str, np.ndarray]:
    """Spin-(d-1)/2 matrices ``{'x','y','z'}``."""
    s = (d - 1) / 2
    m = s - np.arange(d)
    splus = np.zeros((d, d))
    splus[np.arange(d - 1), np.arange(1, d)] = _ladder_coefficient(s, m[1:], +1)
    return {
        "x": 0.5 * (splus + splus.T),
        "y": -0.5j * (splus - splus.T),
        "z": np.diag(m),
    }


def probe_operator(label: str, d: int = 2, norm: str = "pauli") -> np.ndarray:
    if label not in PROBE_LABELS:
        raise InvalidSpec(f"probe operator must be one of {PROBE_LABELS}")
    mat = spin_matrices(d)[label]
    if norm == "pauli":
        if d != 2:
            raise InvalidSpec("Pauli normalization needs two-level probes")
        mat = 2 * mat
    return mat


def probe_term_operator(term: CouplingTerm, probes: ProbeSpec) -> np.ndarray:
    """The probe factor of ``term`` on the two-probe space (dimension d**2)."""
    d = probes.probe_dimension
    x = probe_operator(term.probe_label, d, probes.probe_norm)
    eye = np.eye(d)
    return np.kron(x, eye) if term.probe == "a" else np.kron(eye, x)


def build_full_hamiltonian(chain: ChainSpec, probes: ProbeSpec, scale: float = 1.0,
                           h0: SparseOperator | None = None) -> SparseOperator:
    """``H_0 (x) 1 (x) 1 + scale * V`` on chain (x) probe_a (x) probe_b.

    The chain must be in its full (unrestricted) basis, because transverse
    couplings change the chain's Sz.
    """
    probes.check_chain(chain)
    if h0 is None:
        h0 = build_chain_hamiltonian(chain)
    basis = h0.space
    if not isinstance(basis, SpinBasis) or basis.sector is not None:
        raise BasisMismatch("the chain+probe Hamiltonian needs the full chain basis")
    if basis.L != chain.L or basis.local_spin != chain.local_spin:
        raise BasisMismatch("h0 was built for a different chain")
    d2 = probes.probe_dimension**2
    h = sp.kron(h0.matrix, sp.identity(d2), format="csr")
    for t in probes.couplings:
        if t.strength == 0.0 or scale == 0.0:
            continue
        o = site_operator(basis, t.chain_site, t.chain_label).matrix
        x = sp.csr_matrix(probe_term_operator(t, probes))
        h = h + (scale * t.strength) * sp.kron(o, x, format="csr")
    h = h.tocsr()
    if np.iscomplexobj(h.data) and not np.any(h.data.imag):
        h = h.real.tocsr()
    h.sum_duplicates()
    h.eliminate_zeros()
    h.sort_indices()
    space = ProductSpace(basis, (probes.probe_dimension, probes.probe_dimension))
    return SparseOperator(h, space, name="H_full")
