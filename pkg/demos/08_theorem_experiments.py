"""The aperiodicity experiments at demo scale.

Each run samples outer automorphisms acting trivially on homology mod 3 and
probes orbits of words, free factor classes, and splittings: a period
greater than one would refute the theorems, and the violation lists stay
empty.  Controls outside the congruence kernel show genuine periods.

The CLI runs the same experiments at larger scale:
    aperiodic-lab conjugacy --rank 2 --samples 1000 --seed 7 --out report.json
"""

from aperiodic_lab.harness import (
    ExperimentConfig,
    run_conjugacy_experiment,
    run_factor_experiment,
    run_splitting_experiment,
    run_torsion_experiment,
)

SMALL = dict(samples=40, budget=4, seed=2024, max_iter=10, length_cap=4000)

print("== conjugacy classes (word orbits, outer and exact) ==")
report = run_conjugacy_experiment(ExperimentConfig(rank=2, pool_size=3, **SMALL))
print(f"  outer: {report['outcomes_outer']}")
print(f"  exact: {report['outcomes_aut']}")
print(f"  violations: {report['violations_count']}")
print(f"  swap control 2-orbits: {report['control']['nontrivial_periods']}")

print("\n== free factor classes ==")
report = run_factor_experiment(ExperimentConfig(rank=3, **SMALL))
print(f"  outcomes: {report['outcomes']}")
print(f"  3-cycle control period: {report['control']['period']}")

print("\n== torsion probe ==")
report = run_torsion_experiment(ExperimentConfig(rank=3, **SMALL))
print(
    f"  {report['trials']} non-inner samples, {report['certified_by_homology']} "
    f"settled by homology, {report['checked_by_iteration']} by iterating powers"
)
print(f"  violations: {report['violations_count']}, swap control order {report['control']['order']}")

print("\n== splittings ==")
report = run_splitting_experiment(ExperimentConfig(rank=2, **SMALL))
print(f"  outcomes over {report['pool_size']} marked graphs: {report['outcomes']}")
print(f"  asymmetric-rose control: {report['control']['outcome']}")
print(f"  violations: {report['violations_count']}")
