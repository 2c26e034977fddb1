"""Key rate vs distance for the four reference noise combinations.

Prints the last distance with a positive rate for each combination, with
sigma_b trusted and with it folded into the untrusted bucket.
"""

import argparse
from collections import defaultdict
from dataclasses import replace

from sqcc.sweep import SweepSpec, render, run_sweep


def reach(rows):
    by = defaultdict(list)
    for r in rows:
        by[(r["sigma_i"], r["sigma_b"])].append(r)
    out = {}
    for key, curve in by.items():
        pos = [r["distance_km"] for r in curve if r["rate_raw"] > 0]
        out[key] = (max(pos) if pos else None, curve)
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--step", type=float, default=5.0, help="distance step, km")
    ap.add_argument("--max-km", type=float, default=160.0)
    ap.add_argument("--csv", help="write the trusted sweep table here")
    args = ap.parse_args()

    n = int(round(args.max_km / args.step))
    spec = SweepSpec(distances_km=tuple(i * args.step for i in range(n + 1)))
    for label, s in (("trusted sigma_b", spec), ("untrusted sigma_b", replace(spec, untrusted_sigma_b=True))):
        rows = run_sweep(s)
        print(f"{label}:")
        for (si, sb), (last, curve) in reach(rows).items():
            r0 = curve[0]
            where = f"{last:g} km" if last is not None else "none"
            print(f"  sigma_i={si:g} sigma_b={sb:g}  R(0)={r0['rate']:.4g}  V_A*(0)={r0['v_a_opt']:.3g}  "
                  f"last positive: {where}")
        if args.csv and s is spec:
            with open(args.csv, "w", encoding="utf-8") as fh:
                fh.write(render(s, rows))


if __name__ == "__main__":
    main()
