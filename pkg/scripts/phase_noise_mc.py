"""Monte Carlo phase-error variance of the reference-pulse estimator vs pulse size."""

import argparse

import numpy as np

from sqcc.core import N0
from sqcc.phase import simulate_phase_error_variance


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--eta", type=float, default=0.5)
    ap.add_argument("--n-cal", type=float, default=1e7, help="photons in the calibration pulse")
    ap.add_argument("--trials", type=int, default=100_000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    ns = np.logspace(2, 5, 7)
    v = []
    print(f"{'n_ref':>10} {'var (rad^2)':>12} {'stderr':>10} {'2N0/(eta n)':>12}")
    for n in ns:
        est = simulate_phase_error_variance(n, args.n_cal, args.eta, args.trials, args.seed)
        v.append(est.variance)
        print(f"{n:10.3g} {est.variance:12.4e} {est.stderr:10.2e} {2 * N0 / (args.eta * n):12.4e}")
    slope = np.polyfit(np.log(ns), np.log(v), 1)[0]
    print(f"log-log slope {slope:.4f}")


if __name__ == "__main__":
    main()
