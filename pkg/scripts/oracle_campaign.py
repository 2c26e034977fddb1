"""Monte Carlo BER and receiver noise next to the closed-form model.

Runs both the exact phase rotation and its first-order (Gaussian kick)
version, so the small-angle error of the closed form is visible at large
phase noise.
"""

import argparse
import math
import sys
from pathlib import Path

from sqcc.classical import qpsk_ber, solve_displacement
from sqcc.core import PhaseNoiseBudget, SystemParams
from sqcc.mc import added_noise_variance, run_campaign
from sqcc.noise import receiver_noise

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))
try:
    from oracles import rotation_exact_ber
except ImportError:  # tests/ not shipped
    rotation_exact_ber = None


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--rounds", type=int, default=2_000_000)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    print(f"{'sigma':>8} {'L':>4} {'c':>7} {'mode':>6} {'ber_emp':>11} {'z':>7} {'noise rel':>10}  exact-rot ber")
    i = 0
    for sigma_b in (1e-3, 1e-2):
        ph = PhaseNoiseBudget(1e-5, sigma_b)
        for L in (0.0, 25.0, 50.0):
            for c in (1e-2, 1e-3):
                p = SystemParams(length_km=L, ber_target=c)
                T = p.transmittance
                alpha = solve_displacement(p, ph, T).alpha
                n_tot = receiver_noise(p, ph, alpha, T)
                ber = qpsk_ber(alpha, T, p.eta, n_tot)
                sd = math.sqrt(ber * (1 - ber) / (2 * args.rounds))
                exact = ("" if rotation_exact_ber is None else
                         f"{rotation_exact_ber(alpha, T, p.eta, p.v_a, ph.total, added_noise_variance(p, T)):.4e}")
                for lin in (False, True):
                    emp = run_campaign(p, ph, T, args.rounds, args.seed, alpha=alpha, workers=args.workers,
                                       linearized=lin, stream_prefix=(i,))
                    mode = "kick" if lin else "exact"
                    print(f"{ph.total:8.2e} {L:4g} {c:7.0e} {mode:>6} {emp.ber:11.4e} "
                          f"{(emp.ber - ber) / sd:7.2f} {emp.noise / n_tot - 1:10.2e}  {exact if not lin else ''}")
                i += 1


if __name__ == "__main__":
    main()
