"""Stability of solutions under uniform cost perturbations.

Solves the zero-data problem on a unit edge with cost 1 + 1/n and compares
the sup-norm gap to the limit solution against the closed form
(sqrt(1 + 1/n) - 1) / 2: the tent peak scales with the root of the cost.

Usage: python scripts/stability_study.py [--n-max 256] [--mesh 0.05]
"""

import argparse
import math

from netkonal import boundary_data, build_network, quadratic_eikonal, stability_probe


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n-max", type=int, default=256)
    parser.add_argument("--mesh", type=float, default=0.05)
    args = parser.parse_args()

    net = build_network(vertices=["v0", "v1"], edges=[("e", "v0", "v1", 1.0)],
                        boundary=["v0", "v1"])
    H = quadratic_eikonal(net, 1.0)
    g = boundary_data(net, {"v0": 0.0, "v1": 0.0})

    n_values = []
    n = 1
    while n <= args.n_max:
        n_values.append(n)
        n *= 2
    report = stability_probe(net, H, g, args.mesh, n_values)

    print(f"{'n':>6} {'sup gap':>14} {'closed form':>14} {'bound 1/(2n)':>14}")
    for n, gap in report.rows:
        closed = (math.sqrt(1.0 + 1.0 / n) - 1.0) / 2.0
        print(f"{n:6d} {gap:14.6e} {closed:14.6e} {1.0 / (2 * n):14.6e}")


if __name__ == "__main__":
    main()
