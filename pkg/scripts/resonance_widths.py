"""|Omega| of the first-type resonances versus their index n.

The widths repeat with period L / (l2 - l1) when that ratio is an integer.
"""
import argparse

from vertex_amplitudes import RingSpec, omega_beta


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--l1", type=float, default=1.0)
    p.add_argument("--l2", type=float, default=1.1)
    p.add_argument("--n-max", type=int, default=63)
    a = p.parse_args()
    spec = RingSpec(a.l1, a.l2)
    print("n,k_res,abs_omega,abs_beta")
    for n in range(1, a.n_max + 1):
        omega, beta = omega_beta(spec, n)
        print(f"{n},{2 * 3.141592653589793 * n / spec.L:.10g},{abs(omega):.10g},{abs(beta):.10g}")


if __name__ == "__main__":
    main()
