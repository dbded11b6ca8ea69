"""Transmission of the symmetric, asymmetric and flux-threaded rings versus k.

Writes CSV columns k, T_symmetric, T_asymmetric, T_flux to stdout.
"""
import argparse
import csv
import sys

import numpy as np

from vertex_amplitudes import RingSpec, sweep_k


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--l1", type=float, default=1.0)
    p.add_argument("--l2", type=float, default=2.1)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--k-max", type=float, default=10.0)
    p.add_argument("--points", type=int, default=2000)
    a = p.parse_args()
    ks = np.linspace(0.05, a.k_max, a.points)
    cols = [sweep_k(RingSpec(a.l1, a.l1).graph(), ks).T,
            sweep_k(RingSpec(a.l1, a.l2).graph(), ks).T,
            sweep_k(RingSpec(a.l1, a.l2, a.alpha).graph(), ks).T]
    w = csv.writer(sys.stdout)
    w.writerow(["k", "T_symmetric", "T_asymmetric", "T_flux"])
    for row in zip(ks, *cols):
        w.writerow([f"{v:.10g}" for v in row])


if __name__ == "__main__":
    main()
