"""Mesh-refinement study for the grid distance solver.

Two single-edge cases: a smooth quadratic cost whose density Simpson
integrates exactly (errors sit on the root-finder noise floor), and a
piecewise-linear sampled cost whose density is curved inside segments, which
exposes the genuine quadrature order.

Usage: python scripts/convergence_study.py [--h-list 0.1,0.05,0.025,0.0125]
"""

import argparse

from netkonal import (
    SampledProfile,
    build_network,
    discretize,
    oracle_s,
    quadratic_eikonal,
    s_point_query,
)


def run_case(label, H, net, exact, h_list):
    print(f"\n{label} (reference {exact:.15g})")
    print(f"{'h':>10} {'sup error':>14} {'ratio':>8}")
    prev = None
    for h in h_list:
        mg = discretize(net, H, h)
        val = s_point_query(mg, net.vertex_point("v0"), net.vertex_point("v1"))
        err = abs(val - exact)
        ratio = "" if prev is None or err == 0 else f"{prev / err:8.2f}"
        print(f"{h:10.5f} {err:14.3e} {ratio:>8}")
        prev = err


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--h-list", default="0.1,0.05,0.025,0.0125")
    args = parser.parse_args()
    h_list = [float(tok) for tok in args.h_list.split(",")]

    net = build_network(vertices=["v0", "v1"], edges=[("e", "v0", "v1", 1.0)],
                        boundary=["v0", "v1"])

    H_smooth = quadratic_eikonal(net, lambda t: (1.0 + t) ** 2)
    run_case("smooth cost (1+t)^2, density 1+t", H_smooth, net, 1.5, h_list)

    prof = SampledProfile((0.0, 0.5, 1.0), (1.0, 2.4, 1.2))
    H_sampled = quadratic_eikonal(net, prof)
    exact = oracle_s(net, H_sampled, net.vertex_point("v0"),
                     net.vertex_point("v1"), quad_tol=1e-13)
    run_case("sampled cost with breakpoint at 0.5", H_sampled, net, exact, h_list)


if __name__ == "__main__":
    main()
