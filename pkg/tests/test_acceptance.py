"""Acceptance criteria, one test each.

Every test records a single ``PASS``/``FAIL`` line; the lines are printed in
the pytest terminal summary and when this file is run as a script.
"""
import json
import math
import subprocess
import sys
import time
from fractions import Fraction
from pathlib import Path

import numpy as np

from lde.analytic import (CftParams, aklt_chi0_closed, aklt_chi0_closed_exact, aklt_chi0_integral,
                          cft_chi0, cft_integral, cft_response, fit_amplitude)
from lde.effham import build_effective_hamiltonian, validate_against_exact
from lde.entangle import entanglement_threshold
from lde.lattice import ChainSpec, ProbeSpec, build_chain_hamiltonian, probe_operator, site_operator
from lde.response import chi0_correction_vector, chi0_lehmann, lehmann_matrix, response_profile
from lde.scenarios import chain_response_profile
from lde.solver import dense_spectrum, ground_from_spectrum, lanczos_ground

sys.path.insert(0, str(Path(__file__).parent))
from oracles import cft_integral_qaws  # noqa: E402

ROOT = Path(__file__).resolve().parents[1]
RESULTS = {}


def report(n, ok, detail):
    line = f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS[n] = line
    print(line)
    assert ok, line


def heis(L, boundary="open"):
    return ChainSpec("heisenberg_spin_half", L, boundary=boundary)


def aklt(L, boundary="periodic"):
    return ChainSpec("bilinear_biquadratic_spin1", L, 1.0 / 3.0, boundary)


def test_criterion_01_two_site_anchor():
    t0 = time.perf_counter()
    h = build_chain_hamiltonian(heis(2))
    spec = dense_spectrum(h)
    gs_dense = ground_from_spectrum(spec, h)
    gs_lanczos = lanczos_ground(h)
    z1, z2 = site_operator(h.space, 1, "Sz"), site_operator(h.space, 2, "Sz")
    vals = {
        "cross_lehmann": chi0_lehmann(spec, z1, z2).value - 0.5,
        "local_lehmann": chi0_lehmann(spec, z1, z1).value + 0.5,
        "cross_cv": chi0_correction_vector(h, gs_lanczos, z1, z2).value - 0.5,
        "local_cv": chi0_correction_vector(h, gs_lanczos, z1, z1).value + 0.5,
        "cross_cv_dense_gs": chi0_correction_vector(h, gs_dense, z1, z2).value - 0.5,
    }
    dt = time.perf_counter() - t0
    err = max(abs(v) for v in vals.values())
    report(1, err <= 1e-12 and dt < 1.0, f"max error {err:.1e} (tol 1e-12), {dt:.3f} s (< 1 s)")


def _pairwise_both(chain):
    h = build_chain_hamiltonian(chain, sector=0)
    ops = [site_operator(h.space, i, "Sz") for i in range(1, chain.L + 1)]
    lehm = lehmann_matrix(dense_spectrum(h), ops)
    gs = lanczos_ground(h)
    cv = np.array([[v.value for v in response_profile(h, gs, o, ops)] for o in ops])
    return lehm, cv


def _pairwise_full_basis(chain):
    h = build_chain_hamiltonian(chain)
    spec = dense_spectrum(h)
    gs = lanczos_ground(h)
    worst = 0.0
    for a in ("Sx", "Sy", "Sz"):
        for b in ("Sx", "Sy", "Sz"):
            for m in range(1, chain.L + 1):
                for n in range(1, chain.L + 1):
                    om, on = site_operator(h.space, m, a), site_operator(h.space, n, b)
                    x = chi0_lehmann(spec, om, on).value
                    y = chi0_correction_vector(h, gs, om, on).value
                    worst = max(worst, abs(x - y) / max(1.0, abs(x)))
    return worst


def test_criterion_02_method_equivalence():
    t0 = time.perf_counter()
    chains = [heis(L, bc) for L in (2, 4, 6, 8, 10, 12) for bc in ("open", "periodic")
              if not (bc == "periodic" and L < 4)]
    chains += [aklt(L) for L in range(3, 9)]
    worst, pairs = 0.0, 0
    for chain in chains:
        lehm, cv = _pairwise_both(chain)
        worst = max(worst, float(np.max(np.abs(lehm - cv) / np.maximum(1.0, np.abs(lehm)))))
        pairs += chain.L**2
    # transverse components in the full basis on the smaller chains
    for chain in (heis(4), heis(6, "periodic"), aklt(4)):
        worst = max(worst, _pairwise_full_basis(chain))
    dt = time.perf_counter() - t0
    report(2, worst <= 1e-9 and dt < 120, f"{len(chains)} chains, {pairs} zz pairs + xyz pairs; "
           f"max |lehmann - cv| {worst:.1e} (tol 1e-9), {dt:.1f} s (< 120 s)")


def test_criterion_03_su2_reduction():
    cases = [(heis(2), 1, 2), (heis(8), 1, 8), (heis(8), 2, 5), (heis(10, "periodic"), 1, 6),
             (heis(12, "periodic"), 1, 4), (aklt(6), 1, 4), (aklt(7, "periodic"), 2, 3)]
    worst_k, worst_loc = 0.0, 0.0
    for chain, m, n in cases:
        heff = build_effective_hamiltonian(chain, ProbeSpec.heisenberg(m, n, 0.05, 0.07))
        k = heff.nonlocal_coefficients
        j = np.trace(k) / 3
        worst_k = max(worst_k, np.abs(k - j * np.eye(3)).max() / abs(j))
        worst_loc = max(worst_loc, heff.max_local() / abs(j))
    ok = worst_k <= 1e-9 and worst_loc <= 1e-9
    report(3, ok, f"{len(cases)} geometries; max |K - J_ab 1|/|J_ab| {worst_k:.1e}, "
           f"max local/|J_ab| {worst_loc:.1e} (tol 1e-9)")


def test_criterion_04_perturbation_validation():
    t0 = time.perf_counter()
    rows = validate_against_exact(heis(8), ProbeSpec.heisenberg(1, 8), [0.1, 0.05, 0.025])
    dev = [r.relative_deviation for r in rows]
    dt = time.perf_counter() - t0
    decreasing = dev[0] > dev[1] > dev[2]
    ok = decreasing and dev[2] <= 0.05 and dt < 60
    report(4, ok, "deviations " + ", ".join(f"{d:.4f}" for d in dev)
           + f" at J_p = 0.1, 0.05, 0.025; strictly decreasing: {decreasing}; "
           f"at 0.025: {dev[2]:.2%} (needs <= 5%); {dt:.1f} s (< 60 s)")


def test_criterion_05_aklt_closed_vs_quadrature():
    err = max(abs(aklt_chi0_integral(r) - aklt_chi0_closed(r)) for r in range(1, 13))
    exact = aklt_chi0_closed_exact(1) == Fraction(21, 10)
    report(5, err <= 1e-8 and exact, f"max |integral - closed| over r=1..12 {err:.1e} (tol 1e-8); "
           f"r=1 closed form == 21/10: {exact}")


def test_criterion_06_aklt_ed_qualitative():
    t0 = time.perf_counter()
    rs = [1, 2, 3, 4]
    chi, _, _ = chain_response_profile(aklt(8), 1, rs)
    chi = np.array(chi)
    signs = all(np.sign(c) == (-1) ** (r + 1) for r, c in zip(rs, chi))
    y = np.log(np.abs(chi) / (1 + 4 * np.array(rs) / 3))
    slope = np.polyfit(rs, y, 1)[0]
    rel = abs(-slope - math.log(3)) / math.log(3)
    dt = time.perf_counter() - t0
    report(6, signs and rel <= 0.5 and dt < 180,
           f"chi(r=1..4) = {np.array2string(chi, precision=4)}; signs ok: {signs}; "
           f"decay constant {-slope:.4f} vs ln3 {math.log(3):.4f} ({rel:.1%}, tol 50%); {dt:.1f} s")


def test_criterion_07_thermal_threshold():
    tau = sum(np.kron(probe_operator(a), probe_operator(a)) for a in "xyz")
    worst = 0.0
    for J in (1.0, 0.5, 2.0):
        bj = entanglement_threshold(J * tau) * J
        worst = max(worst, abs(bj - math.log(3) / 4))
    report(7, worst <= 1e-6, f"beta*J = {entanglement_threshold(tau):.10f} vs ln3/4 = "
           f"{math.log(3) / 4:.10f}; max error over J in (1, 0.5, 2) {worst:.1e} (tol 1e-6)")


def test_criterion_08_cft_formula():
    grid = [0.05 * k for k in range(1, 10)]
    rel = max(abs(cft_integral(2 * np.pi * x) / cft_integral_qaws(2 * np.pi * x) - 1) for x in grid)
    zero = cft_chi0(CftParams(20, 10)) == 0.0 and cft_response(0.5, 1) == 0.0
    odd_pos = all(cft_chi0(CftParams(40, r)) > 0 for r in range(1, 20, 2))
    xs = np.linspace(1e-4, 0.5, 300)
    mono = all(np.all(np.diff(np.abs([cft_response(x, p) for x in xs])) < 0) for p in (0, 1))
    geo = 0.1 * 2.0 ** -np.arange(14)
    d = np.array([abs(cft_response(x / 2, 1)) - abs(cft_response(x, 1)) for x in geo])
    logdiv = bool(np.all(d > 0) and np.ptp(d[-5:]) < 1e-3 * d[-5:].mean())
    ok = rel <= 1e-8 and zero and odd_pos and mono and logdiv
    report(8, ok, f"max rel error vs adaptive oracle {rel:.1e} (tol 1e-8); zero at 1/2: {zero}; "
           f"odd positive: {odd_pos}; monotone: {mono}; log-divergence step -> {d[-1]:.4f}: {logdiv}")


def test_criterion_09_cft_vs_ed_shape():
    t0 = time.perf_counter()
    L = 16
    rs = list(range(1, 9))
    ed, _, _ = chain_response_profile(heis(L, "periodic"), 1, rs)
    ed = dict(zip(rs, ed))
    odd = [r for r in rs if r % 2 and 2 * r < L]
    best = None
    for ref in odd:
        amp = fit_amplitude(ed[ref], CftParams(L, ref))
        devs = {r: abs(abs(cft_chi0(CftParams(L, r, amp))) / abs(ed[r]) - 1) for r in odd if r != ref}
        worst = max(devs.values())
        if best is None or worst < best[1]:
            best = (ref, worst, devs)
    dt = time.perf_counter() - t0
    ref, worst, devs = best
    detail = ", ".join(f"r={r}: {d:.0%}" for r, d in devs.items())
    report(9, worst <= 0.25 and dt < 120,
           f"best reference r={ref}: {detail} (tol 25%); {dt:.1f} s")


def test_criterion_10_cli_golden(tmp_path):
    ok = True
    notes = []
    for name in ("heisenberg_ed", "aklt_sma", "thermal_scan"):
        same_all = True
        for run in range(2):
            out = tmp_path / f"{name}_{run}"
            p = subprocess.run([sys.executable, "-m", "lde", "run", str(ROOT / "configs" / f"{name}.json"),
                                "--output", str(out)], capture_output=True)
            same = p.returncode == 0 and (out / f"{name}.csv").read_bytes() == (
                ROOT / "tests" / "golden" / f"{name}.csv").read_bytes()
            same_all &= same
        ok &= same_all
        notes.append(f"{name} {'identical' if same_all else 'differs'}")
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"scenario": "heisenberg_dmrg", "output": {"path": "x.csv"}}))
    p = subprocess.run([sys.executable, "-m", "lde", "run", str(bad)], capture_output=True, text=True)
    diag = p.returncode == 2 and "allowed scenarios" in p.stderr and "line 1" in p.stderr
    bad.write_text('{\n "scenario": "heisenberg_ed",\n "chain": {"model": "heisenberg_spin_half", '
                   '"L": 8, "size": 3},\n "sweep": {"r": [1]},\n "output": {"path": "x.csv"}\n}\n')
    p = subprocess.run([sys.executable, "-m", "lde", "validate", str(bad)], capture_output=True, text=True)
    diag &= p.returncode == 2 and "line 3" in p.stderr and "unknown key 'size'" in p.stderr
    report(10, ok and diag, "; ".join(notes) + f" (2 runs each); invalid configs exit 2 with "
           f"line-numbered diagnostics: {diag}")


if __name__ == "__main__":
    import tempfile

    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                if "tmp_path" in fn.__code__.co_varnames[: fn.__code__.co_argcount]:
                    with tempfile.TemporaryDirectory() as d:
                        fn(Path(d))
                else:
                    fn()
            except AssertionError:
                pass
