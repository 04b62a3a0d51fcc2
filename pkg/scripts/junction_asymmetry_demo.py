"""Why the junction conditions are asymmetric.

The distance field from one leaf of a three-armed star rises into two arms
at the center.  The supersolution condition only demands one feasible
partner edge per direction, and the field passes.  If supersolutions instead
had to satisfy the condition for every edge pair (mirroring the subsolution
rule), the pair of uphill arms would admit a flat test function with
negative momentum profile, and the distance field would wrongly fail: run
this script to see the exact witness.

Usage: python scripts/junction_asymmetry_demo.py
"""

from netkonal import build_network, discretize, quadratic_eikonal, s_distance, super_check
from netkonal.verify import super_check as _super_check_raw


def main():
    net = build_network(
        vertices=["c", "b1", "b2", "b3"],
        edges=[("e1", "c", "b1", 1.0), ("e2", "c", "b2", 1.0),
               ("e3", "c", "b3", 2.0)],
        boundary=["b1", "b2", "b3"],
    )
    H = quadratic_eikonal(net, 1.0)
    mg = discretize(net, H, 0.05)
    u = s_distance(mg, [(net.vertex_point("b1"), 0.0)]).to_value_field()

    print("distance field from leaf b1 on the star (arms 1, 1, 2)")
    print("  " + super_check(u, H, 1e-9).summary())

    wrong = _super_check_raw(u, H, 1e-9, _vertex_quantifier="all")
    print("  same field under the symmetric-with-subsolutions rule:")
    print("  " + wrong.summary())
    for v in wrong.violations(u.grid):
        print(f"    witness: {v}")


if __name__ == "__main__":
    main()
