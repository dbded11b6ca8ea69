"""Parallel square wells: T(k), log|t(i kappa)|^2 and the ground-state kappa(n).

Output goes to three CSV files in --out-dir.
"""
import argparse
import math
from pathlib import Path

import numpy as np

from vertex_amplitudes import (
    TwoTerminalGraph,
    parallel_wells_amplitude,
    parallel_wells_bound_state,
    sweep_k,
)
from vertex_amplitudes.core import UNITS


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--depth-ev", type=float, default=-0.5)
    p.add_argument("--width", type=float, default=1.0)
    p.add_argument("--out-dir", default=".")
    a = p.parse_args()
    out = Path(a.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    ks = np.linspace(0.05, 10.0, 3000)
    ns = (1, 2, 20)
    cols = [sweep_k(TwoTerminalGraph.parallel_wells(n, a.depth_ev, a.width), ks).T for n in ns]
    with open(out / "wells_transmission.csv", "w") as f:
        f.write("k," + ",".join(f"T_n{n}" for n in ns) + "\n")
        for row in zip(ks, *cols):
            f.write(",".join(f"{v:.10g}" for v in row) + "\n")

    kmax = math.sqrt(-a.depth_ev / UNITS.hbar2_over_2m)
    kappas = np.linspace(0.01, kmax * 0.999, 2000)
    ns = (1, 3, 10)
    with open(out / "wells_log_t_imaginary_axis.csv", "w") as f:
        f.write("kappa," + ",".join(f"logT_n{n}" for n in ns) + "\n")
        for kap in kappas:
            vals = [math.log(abs(parallel_wells_amplitude(n, a.depth_ev, a.width, 1j * kap)) ** 2)
                    for n in ns]
            f.write(f"{kap:.10g}," + ",".join(f"{v:.10g}" for v in vals) + "\n")

    with open(out / "wells_ground_state.csv", "w") as f:
        f.write("n,kappa,energy_ev\n")
        for n in range(1, 21):
            st = parallel_wells_bound_state(n, a.depth_ev, a.width)
            f.write(f"{n},{st.kappa:.10g},{st.energy:.10g}\n")
    print(f"wrote 3 files to {out}; kappa limit sqrt(-V0) = {kmax:.6f}")


if __name__ == "__main__":
    main()
