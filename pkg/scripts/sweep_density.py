#!/usr/bin/env python3
"""Sweep the legitimate node density across decades at a fixed target and
report the planned geometry plus short-run mean total relay power.

The planned radii, relay count and eavesdropper tolerances should not move
at all as the density grows; the mean total relay transmit power should stay
flat and small.  This is the cheap-relaying scaling argument made runnable.
"""

import argparse
import math
import sys

from secbeam.geometry import NetworkConfig
from secbeam.montecarlo import estimate_outage
from secbeam.planner import SecrecyTarget, plan


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--rate", type=float, default=0.5)
    ap.add_argument("--outage", type=float, default=0.35)
    ap.add_argument("--decades", type=int, default=3)
    ap.add_argument("--trials", type=int, default=250)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--side", type=float, default=20.0)
    args = ap.parse_args()

    target = SecrecyTarget(secure_rate=args.rate, outage=args.outage)
    base_kwargs = dict(p_t=1.0, mu=0.5, gamma=2.0, d_tr=5.0)
    probe = NetworkConfig(lambda_l=1.0, lambda_e=0.0, n_legit=1, **base_kwargs)
    p = plan(probe, target)
    print(f"planned geometry: n_r={p.n_r} a_l={p.a_l:.6g} a_e={p.a_e:.6g} "
          f"lambda_e_max={p.lambda_e_max:.6g}")
    print(f"{'lambda_l':>14s} {'E[total relay power]':>22s} "
          f"{'composite outage':>17s}")
    for decade in range(args.decades + 1):
        lam_l = p.lambda_l_min * 10.0 ** decade
        cfg = NetworkConfig(lambda_l=lam_l, lambda_e=p.lambda_e_max,
                            n_legit=math.ceil(lam_l * args.side ** 2),
                            **base_kwargs)
        report = estimate_outage(p, cfg, target, args.trials,
                                 seed=args.seed + decade)
        print(f"{lam_l:14.6g} {report.mean_total_relay_power:22.6g} "
              f"{report.composite.outage:17.4f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
