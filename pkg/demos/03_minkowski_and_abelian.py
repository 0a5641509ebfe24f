"""The abelian congruence story: torsion-freeness and Per = Fix.

The level-3 congruence kernel of GL_n(Z) is torsion free, so inside it a
finite-order matrix is the identity; and the periodic sublattice of any of
its members coincides with the fixed sublattice.  Both facts are checked
exhaustively in an entry box, with a level-1 control showing the congruence
condition is needed.
"""

from aperiodic_lab.homology import (
    abelian_standing_assumptions_check,
    finite_order,
    fix_subgroup,
    minkowski_scan,
    per_subgroup,
)

print("== finite-order scan, level 3 ==")
report = minkowski_scan(2, 6, level=3)
print(
    f"  {report['enumerated']} unimodular matrices = I mod 3 with entries in "
    f"[-6, 6]: {len(report['violations'])} finite-order non-identity"
)

print("\n== control at level 1: torsion exists ==")
control = minkowski_scan(2, 2, level=1)
sample = control["violations"][0]
print(
    f"  {len(control['violations'])} violations, e.g. {sample['matrix']} of "
    f"order {sample['order']}"
)

print("\n== Per = Fix inside the congruence kernel ==")
report = abelian_standing_assumptions_check(2, 6)
print(f"  {report['enumerated']} matrices checked, {len(report['violations'])} violations")

print("\n== the rotation control outside the kernel ==")
rotation = ((0, -1), (1, 0))
print(f"  90-degree rotation has order {finite_order(rotation)}")
print(f"  Per = {per_subgroup(rotation)}")
print(f"  Fix = {fix_subgroup(rotation)}")
print("  periodic but not fixed: the congruence hypothesis is necessary")
