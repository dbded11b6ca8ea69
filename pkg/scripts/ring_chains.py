"""|t| of chains of identical rings: commensurate (1, 2) against incommensurate (1, 2.1) arms."""
import argparse

import numpy as np

from vertex_amplitudes import RingSpec, ZeroTransmission, cascade, ring_transfer_matrix


def chain_t(spec, n, k):
    try:
        return abs(cascade([ring_transfer_matrix(spec, k)] * n).t)
    except ZeroTransmission:
        return 0.0


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--rings", type=int, default=3)
    p.add_argument("--points", type=int, default=3000)
    a = p.parse_args()
    comm, incomm = RingSpec(1.0, 2.0), RingSpec(1.0, 2.1)
    print("k,abs_t_commensurate,abs_t_incommensurate")
    for k in np.linspace(0.05, 10.0, a.points):
        print(f"{k:.10g},{chain_t(comm, a.rings, k):.10g},{chain_t(incomm, a.rings, k):.10g}")


if __name__ == "__main__":
    main()
