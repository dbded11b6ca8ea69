"""Iterated limits of (t, r) at singular first-type resonances, in both orders."""
import math

from vertex_amplitudes import RingSpec, limit_probe


def fmt(z):
    return f"{z.real:+.6f}{z.imag:+.6f}i"


def main():
    ring = RingSpec(1.0, 2.1)
    print("case,order,t,r")
    for n in (1, 2, 3):
        for order in ("length_first", "k_first"):
            t, r = limit_probe(ring, order, n)
            print(f"ring n={n},{order},{fmt(t)},{fmt(r)}")
    ab = RingSpec(0.5, 0.5, 2 * math.pi)
    for order in ("k_first", "alpha_first"):
        t, r = limit_probe(ab, order, (2 * math.pi, 2 * math.pi))
        print(f"flux ring,{order},{fmt(t)},{fmt(r)}")


if __name__ == "__main__":
    main()
