"""Named experiments driven by a :class:`~lde.config.ScenarioConfig`.

Every runner returns a :class:`Table`: fixed column names, rows ordered by
sweep index, and a summary dict that ends up in JSON output and the log.
"""
from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import analytic
from .config import ScenarioConfig
from .effham import LEHMANN_BELOW, build_effective_hamiltonian, validate_against_exact
from .entangle import entanglement_threshold, negativity, thermal_state
from .errors import DegenerateGroundState, InvalidGap, NeverEntangled
from .lattice import ChainSpec, build_chain_hamiltonian, probe_operator, site_operator
from .response import lehmann_matrix, response_profile
from .solver import dense_spectrum, ground_from_spectrum, lanczos_ground

log = logging.getLogger(__name__)

COLUMNS = {
    "heisenberg_ed": ("r", "site_m", "site_n", "chi0", "method", "residual"),
    "aklt_ed": ("r", "site_m", "site_n", "chi0", "chi0_sma_chain_units", "method", "residual"),
    "heisenberg_cft": ("r", "r_over_L", "chi0", "abs_chi0", "chi0_ed", "amplitude", "method",
                       "residual"),
    "aklt_sma": ("r", "chi0_closed", "chi0_integral", "chi0_chain_units", "J_ab", "method",
                 "residual"),
    "effective_hamiltonian": ("site_m", "site_n", "J_ab", "K_xx", "K_yy", "K_zz", "K_offdiag_max",
                              "local_max", "scalar", "chain_gap", "validity_ratio", "verdict",
                              "jp_bound", "method", "residual"),
    "perturbation_validation": ("J_p", "exact_splitting", "predicted_splitting",
                                "relative_deviation", "rdm_trace_distance", "method", "residual"),
    "thermal_scan": ("beta", "beta_J", "negativity", "entangled", "beta_star", "method",
                     "residual"),
}


@dataclass
class Table:
    columns: tuple[str, ...]
    rows: list[tuple]
    summary: dict = field(default_factory=dict)


@dataclass(frozen=True)
class ValidityReport:
    gap: float
    max_coupling: float
    ratio: float
    verdict: str


def perturbative_validity(J_p: float, chi0: float, gap: float) -> ValidityReport:
    """Compare the induced coupling ``J_p**2 |chi0|`` with the chain gap.

    Verdict: ``ok`` below 0.1, ``marginal`` below 0.5, ``invalid`` otherwise.
    """
    if not gap > 0:
        raise InvalidGap(f"gap must be positive, got {gap}")
    coupling = J_p**2 * abs(chi0)
    ratio = coupling / gap
    verdict = "ok" if ratio < 0.1 else "marginal" if ratio < 0.5 else "invalid"
    return ValidityReport(float(gap), float(coupling), float(ratio), verdict)


def parallel_map(fn, items, threads: int = 1) -> list:
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _partner(site: int, r: int, chain: ChainSpec) -> int:
    if chain.boundary == "periodic":
        return (site - 1 + r) % chain.L + 1
    return site + r


def singlet_sector_ground(chain: ChainSpec, method: str, tol: float):
    """Ground state in the Sz = 0 sector, checked to be a non-degenerate singlet.

    The lowest Sz = 1 level must lie strictly above it; otherwise the ground
    level is a multiplet and the response is undefined.
    """
    if (2 * chain.L * chain.local_spin) % 2:
        raise DegenerateGroundState("an odd number of half-integer spins has a degenerate ground level")
    h = build_chain_hamiltonian(chain, sector=0)
    if method == "auto":
        method = "lehmann" if h.dimension <= LEHMANN_BELOW else "correction_vector"
    if method == "lehmann":
        spectrum = dense_spectrum(h)
        gs = ground_from_spectrum(spectrum, h)
    else:
        spectrum = None
        gs = lanczos_ground(h, tol=tol)
    up = build_chain_hamiltonian(chain, sector=1)
    e_up = lanczos_ground(up, tol=1e-8, compute_gap=False).energy if up.dimension > 1 else up.dense()[0, 0]
    if e_up - gs.energy <= 1e-8 * max(1.0, abs(gs.energy)):
        raise DegenerateGroundState("ground level is not a singlet (Sz=1 partner found)")
    return h, gs, spectrum, method


def chain_response_profile(chain: ChainSpec, site_m: int, rs, method: str = "auto",
                           tol: float = 1e-11, linear_tol: float = 1e-12):
    """``chi(Sz_m; Sz_{m+r})`` for every ``r`` in ``rs``; returns (values, method, residual)."""
    h, gs, spectrum, method = singlet_sector_ground(chain, method, tol)
    basis = h.space
    ref = site_operator(basis, site_m, "Sz")
    others = [site_operator(basis, _partner(site_m, r, chain), "Sz") for r in rs]
    if method == "lehmann":
        mat = lehmann_matrix(spectrum, [ref] + others)
        res = float(np.linalg.norm(h @ gs.vector - gs.energy * gs.vector))
        return [float(v) for v in mat[0, 1:]], method, res
    vals = response_profile(h, gs, ref, others, tol=linear_tol)
    return [v.value for v in vals], method, max(v.residual for v in vals)


def _ed_rows(cfg: ScenarioConfig, extra=None) -> Table:
    chain = cfg.chain.spec()
    m = cfg.probes.site_m if cfg.probes else 1
    rs = cfg.sweep.r
    vals, method, res = chain_response_profile(chain, m, rs, cfg.method, cfg.tolerances.lanczos,
                                               cfg.tolerances.linear)
    rows = []
    for r, v in zip(rs, vals):
        row = (r, m, _partner(m, r, chain), v)
        if extra:
            row += (extra(r),)
        rows.append(row + (method, res))
    return Table(COLUMNS[cfg.scenario], rows, {"method": method, "max_residual": res})


def run_heisenberg_ed(cfg: ScenarioConfig, threads: int = 1) -> Table:
    return _ed_rows(cfg)


def run_aklt_ed(cfg: ScenarioConfig, threads: int = 1) -> Table:
    scale = 1.0 if abs(cfg.chain.biquadratic_beta - 1 / 3) < 1e-12 else math.nan
    return _ed_rows(cfg, lambda r: analytic.aklt_chi0_chain_units(r) * scale)


def run_heisenberg_cft(cfg: ScenarioConfig, threads: int = 1) -> Table:
    a = cfg.analytic
    L = cfg.chain.L
    model = (analytic.cft_chi0 if a.variant == "real_time" else analytic.cft_chi0_imaginary_time)
    amplitude = a.amplitude
    ed = {}
    summary = {"variant": a.variant}
    if a.fit_amplitude:
        chain = cfg.chain.spec()
        m = cfg.probes.site_m if cfg.probes else 1
        rs = sorted(set(cfg.sweep.r) | {a.reference_r})
        vals, method, res = chain_response_profile(chain, m, rs, cfg.method,
                                                   cfg.tolerances.lanczos, cfg.tolerances.linear)
        ed = dict(zip(rs, vals))
        ref = analytic.CftParams(L, a.reference_r, 1.0, a.fermi_velocity)
        amplitude = analytic.fit_amplitude(ed[a.reference_r], ref, model)
        summary.update(fitted_amplitude=amplitude, reference_r=a.reference_r, ed_method=method,
                       ed_residual=res)

    def point(r):
        p = analytic.CftParams(L, r, amplitude, a.fermi_velocity)
        v = model(p)
        if a.variant == "real_time" and 2 * r != L:
            # quadrature error estimate: production rule vs a higher-order one
            hi = p.prefactor * analytic.cft_integral(2 * np.pi * p.ratio, order=96)
            err = abs(hi - v)
        else:
            err = 0.0
        return (r, r / L, v, abs(v), ed.get(r, math.nan), amplitude, f"cft_{a.variant}", err)

    rows = parallel_map(point, cfg.sweep.r, threads)
    return Table(COLUMNS["heisenberg_cft"], rows, summary)


def run_aklt_sma(cfg: ScenarioConfig, threads: int = 1) -> Table:
    jp2 = cfg.analytic.J_p**2

    def point(r):
        closed = analytic.aklt_chi0_closed(r)
        integral = analytic.aklt_chi0_integral(r)
        return (r, closed, integral, analytic.aklt_chi0_chain_units(r), jp2 * closed, "sma",
                abs(closed - integral))

    rows = parallel_map(point, cfg.sweep.r, threads)
    return Table(COLUMNS["aklt_sma"], rows, {"correlation_length": analytic.AKLT_CORRELATION_LENGTH})


def _heff(cfg: ScenarioConfig):
    method = cfg.method
    return build_effective_hamiltonian(cfg.chain.spec(), cfg.probes.spec(), method=method,
                                       tol=cfg.tolerances.lanczos)


def run_effective_hamiltonian(cfg: ScenarioConfig, threads: int = 1) -> Table:
    chain = cfg.chain.spec()
    heff = _heff(cfg)
    k = heff.nonlocal_coefficients
    kmax = float(np.abs(k).max())
    report = perturbative_validity(1.0, kmax, heff.chain_gap)
    off = float(np.abs(k - np.diag(np.diag(k))).max())
    j_ab = heff.isotropic_coupling if heff.isotropic_coupling is not None else math.nan
    row = (cfg.probes.site_m, cfg.probes.site_n, j_ab, k[0, 0], k[1, 1], k[2, 2], off,
           heff.max_local(), heff.scalar_part, heff.chain_gap, report.ratio, report.verdict,
           1.0 / math.sqrt(chain.L), heff.method, heff.residual)
    return Table(COLUMNS["effective_hamiltonian"], [row],
                 {"verdict": report.verdict, "matrix_real": heff.matrix.real.tolist(),
                  "matrix_imag": heff.matrix.imag.tolist()})


def run_perturbation_validation(cfg: ScenarioConfig, threads: int = 1) -> Table:
    chain = cfg.chain.spec()
    probes = cfg.probes.spec()
    heff = _heff(cfg)
    rows = []
    worst = "ok"
    order = ["ok", "marginal", "invalid"]
    for jp in cfg.sweep.J_p:
        (v,) = validate_against_exact(chain, probes, [jp], heff=heff)
        rep = perturbative_validity(jp, float(np.abs(heff.nonlocal_coefficients).max()),
                                    heff.chain_gap)
        worst = max(worst, rep.verdict, key=order.index)
        rows.append((v.coupling, v.exact_splitting, v.predicted_splitting, v.relative_deviation,
                     v.rdm_trace_distance, v.method, heff.residual))
    return Table(COLUMNS["perturbation_validation"], rows, {"verdict": worst})


def run_thermal_scan(cfg: ScenarioConfig, threads: int = 1) -> Table:
    if cfg.analytic.coupling is not None:
        j = cfg.analytic.coupling
        tau = [probe_operator(a) for a in "xyz"]
        h = j * sum(np.kron(t, t) for t in tau)
        method, residual = "analytic_coupling", 0.0
    else:
        heff = _heff(cfg)
        h = heff.matrix
        j = heff.isotropic_coupling if heff.isotropic_coupling is not None else math.nan
        method, residual = heff.method, heff.residual
    try:
        beta_star = entanglement_threshold(h, tol=cfg.tolerances.threshold)
    except NeverEntangled:
        beta_star = math.nan

    def point(beta):
        n = negativity(thermal_state(h, beta))
        return (beta, beta * j, n, int(n > 0.0), beta_star, method, residual)

    rows = parallel_map(point, cfg.sweep.beta, threads)
    return Table(COLUMNS["thermal_scan"], rows,
                 {"beta_star": beta_star, "beta_star_times_J": beta_star * j, "coupling": j,
                  "ln3_over_4": math.log(3) / 4})


RUNNERS = {
    "heisenberg_ed": run_heisenberg_ed,
    "heisenberg_cft": run_heisenberg_cft,
    "aklt_sma": run_aklt_sma,
    "aklt_ed": run_aklt_ed,
    "effective_hamiltonian": run_effective_hamiltonian,
    "perturbation_validation": run_perturbation_validation,
    "thermal_scan": run_thermal_scan,
}


def run(cfg: ScenarioConfig, threads: int = 1) -> Table:
    log.info("event=start scenario=%s", cfg.scenario)
    table = RUNNERS[cfg.scenario](cfg, threads)
    log.info("event=done scenario=%s rows=%d", cfg.scenario, len(table.rows))
    return table


def format_value(v) -> str:
    """17 significant digits, locale independent; ints and strings verbatim."""
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)
