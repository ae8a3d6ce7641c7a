"""Ring response versus r/L: bosonization curves and exact diagonalization.

    python scripts/cft_ring_curve.py --L 16 --reference 3
"""
import argparse

import numpy as np

from lde.analytic import CftParams, cft_chi0, cft_chi0_imaginary_time, cft_response, fit_amplitude
from lde.lattice import ChainSpec
from lde.scenarios import chain_response_profile


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--L", type=int, default=16)
    ap.add_argument("--reference", type=int, default=3, help="separation used to fit A")
    ap.add_argument("--points", type=int, default=12, help="points of the continuous curve")
    args = ap.parse_args()

    print("# continuous curve, A = 1, v_F = pi/2, odd parity")
    print("r_over_L,chi0")
    for x in np.geomspace(1e-3, 0.5, args.points):
        print(f"{x:.6g},{cft_response(x, 1):.10g}")

    L = args.L
    rs = list(range(1, L // 2 + 1))
    ed, method, res = chain_response_profile(ChainSpec("heisenberg_spin_half", L, boundary="periodic"),
                                             1, rs)
    ed = dict(zip(rs, ed))
    a_rt = fit_amplitude(ed[args.reference], CftParams(L, args.reference))
    a_it = fit_amplitude(ed[args.reference], CftParams(L, args.reference), cft_chi0_imaginary_time)
    print(f"\n# L={L}, ED via {method} (residual {res:.1e}); A fitted at r={args.reference}: "
          f"real-time {a_rt:.6g}, imaginary-time {a_it:.6g}")
    print("r,chi0_ed,chi0_real_time,chi0_imaginary_time")
    for r in rs:
        rt = cft_chi0(CftParams(L, r, a_rt))
        it = cft_chi0_imaginary_time(CftParams(L, r, a_it))
        print(f"{r},{ed[r]:.10g},{rt:.10g},{it:.10g}")


if __name__ == "__main__":
    main()
