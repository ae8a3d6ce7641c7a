"""Thermal negativity of the probe pair and the entanglement threshold.

    python scripts/thermal_threshold.py --L 8 --m 1 --n 8 --Jp 0.1
"""
import argparse
import math

import numpy as np

from lde.effham import build_effective_hamiltonian
from lde.entangle import entanglement_threshold, negativity, thermal_state
from lde.lattice import ChainSpec, ProbeSpec


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--L", type=int, default=8)
    ap.add_argument("--m", type=int, default=1)
    ap.add_argument("--n", type=int, default=8)
    ap.add_argument("--Jp", type=float, default=0.1)
    ap.add_argument("--boundary", default="open", choices=("open", "periodic"))
    args = ap.parse_args()

    chain = ChainSpec("heisenberg_spin_half", args.L, boundary=args.boundary)
    heff = build_effective_hamiltonian(chain, ProbeSpec.heisenberg(args.m, args.n, args.Jp))
    j = heff.isotropic_coupling
    beta_star = entanglement_threshold(heff)
    print(f"# J_ab = {j:.10g}, beta* = {beta_star:.10g}, beta* J_ab = {beta_star * j:.10f} "
          f"(ln3/4 = {math.log(3) / 4:.10f})")
    print("beta_J,negativity")
    for bj in np.linspace(0, 2, 21):
        print(f"{bj:.3f},{negativity(thermal_state(heff, bj / j)):.10g}")


if __name__ == "__main__":
    main()
