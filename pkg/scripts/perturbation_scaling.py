"""Exact probe splitting versus the second-order prediction as J_p shrinks.

    python scripts/perturbation_scaling.py --L 8
"""
import argparse

import numpy as np

from lde.effham import build_effective_hamiltonian, validate_against_exact
from lde.lattice import ChainSpec, ProbeSpec


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--L", type=int, default=8)
    ap.add_argument("--halvings", type=int, default=6)
    args = ap.parse_args()

    chain = ChainSpec("heisenberg_spin_half", args.L)
    probes = ProbeSpec.heisenberg(1, args.L)
    heff = build_effective_hamiltonian(chain, probes)
    jps = 0.2 * 0.5 ** np.arange(args.halvings)
    rows = validate_against_exact(chain, probes, jps, heff=heff)
    print(f"# L={args.L} end probes, J_ab(J_p=1) = {heff.isotropic_coupling:.10g}, "
          f"chain gap {heff.chain_gap:.6g}")
    print("J_p,exact_over_Jp2,predicted_over_Jp2,relative_deviation,deviation_over_Jp")
    for r in rows:
        jp = r.coupling
        print(f"{jp:.6g},{r.exact_splitting / jp**2:.10g},{r.predicted_splitting / jp**2:.10g},"
              f"{r.relative_deviation:.6g},{r.relative_deviation / jp:.6g}")
    s = [r.exact_splitting / r.coupling**2 for r in rows[-3:]]
    print(f"\n# Richardson limit of exact/J_p^2: {(8 * s[2] - 6 * s[1] + s[0]) / 3:.10g}")


if __name__ == "__main__":
    main()
