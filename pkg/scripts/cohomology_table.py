"""Cohomology dimensions of the Borel algebra twisted by crossed homomorphisms.

Sweeps both classified families over a small rational grid and prints
dim H^k in every degree, grouped by the resulting dimension vector.
"""

from collections import defaultdict
from fractions import Fraction

from crossedhom.algebra_core import adjoint_action, borel_sl2
from crossedhom.ce_cohomology import cohomology_table
from crossedhom.crossed_alg import DIAGONAL, NILPOTENT, AlgCrossedHom

VALUES = [Fraction(n, 2) for n in range(-4, 5)]


def main() -> None:
    g = borel_sl2()
    theta = adjoint_action(g)
    groups = defaultdict(list)
    for fam in (NILPOTENT, DIAGONAL):
        for a in VALUES:
            for b in VALUES:
                if fam is DIAGONAL and a == 0:
                    continue
                d = AlgCrossedHom(g, g, theta, fam.member(a, b))
                dims = tuple(r.dim_cohomology for r in cohomology_table(d))
                groups[(fam.name, dims)].append((a, b))
    for (name, dims), members in sorted(groups.items()):
        sample = ", ".join(f"({a},{b})" for a, b in members[:4])
        more = f" ... (+{len(members) - 4})" if len(members) > 4 else ""
        print(f"{name:<10} dims H^k = {list(dims)}  [{len(members)} members] {sample}{more}")


if __name__ == "__main__":
    main()
