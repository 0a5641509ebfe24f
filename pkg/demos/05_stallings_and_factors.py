"""Stallings cores, membership, conjugacy, and free factor systems.

A finitely generated subgroup folds to a labeled core graph; membership is
path tracing and conjugacy is equality of basepoint-free cores.  Free
factor systems are built as witness images of basis subsets, ordered by
bounded conjugate containment.
"""

from aperiodic_lab.aut import basis_cycle, sample, standard_generators, swap
from aperiodic_lab.subgroups import (
    basis_ffs,
    conjugate_into,
    ffs_poset_leq,
    fold_core,
    membership,
    orbit_period,
    orbit_report,
    subgroup_class,
)
from aperiodic_lab.words import Alphabet, CyclicWord, parse_word, word_str

F2 = Alphabet(2)
F3 = Alphabet(3)

print("== folding <a^2, b> ==")
core = fold_core(F2, [parse_word(F2, "aa"), parse_word(F2, "b")])
print(f"  {core.n_vertices} vertices, {core.n_edges()} edges, rank {core.rank()}")
for text in ["aa", "a", "baab", "ab"]:
    print(f"  {text:5} member? {membership(parse_word(F2, text), core)}")

print("\n== conjugacy of subgroups ==")
print(f"  [<a>] == [<bab^-1>]: {subgroup_class(F2, [parse_word(F2, 'a')]) == subgroup_class(F2, [parse_word(F2, 'baB')])}")
print(f"  [<a>] == [<a^2>]:    {subgroup_class(F2, [parse_word(F2, 'a')]) == subgroup_class(F2, [parse_word(F2, 'aa')])}")

print("\n== bounded conjugate containment ==")
a_core = fold_core(F2, [parse_word(F2, "baB")])
target = fold_core(F2, [parse_word(F2, "a")])
print(f"  conjugator taking <bab^-1> into <a>: {word_str(conjugate_into(a_core, target, 4))}")

print("\n== the free factor poset ==")
single = basis_ffs(F3, [[1]])
pair = basis_ffs(F3, [[1, 2]])
print(f"  {{[<a>]}} below {{[<a,b>]}}: {ffs_poset_leq(single, pair)}")
print(f"  Grushko ranks: {single.grushko_rank()} >= {pair.grushko_rank()} (order reversing)")
print(f"  {{[<a>],[<b>]}} in F_2 is sporadic: {basis_ffs(F2, [[1],[2]]).is_sporadic()}")

print("\n== orbits of classes ==")
cycle = basis_cycle(F3, [1, 2, 3])
cls = subgroup_class(F3, [parse_word(F3, "a")])
print(f"  3-cycle on [<a>]: {orbit_period(cycle, cls)}")
print(f"  swap on the class of the word a: {orbit_period(swap(F2, 1, 2), CyclicWord(F2, (1,)))}")

print("\n== a full orbit report ==")
report = orbit_report(cycle, cls)
print(f"  {report}")

print("\n== sampled congruence automorphisms never shuffle classes ==")
gens = standard_generators(3, "ia3")
for seed in range(4):
    phi = sample(gens, 4, seed)
    out = orbit_period(phi, cls, max_iter=8, length_cap=2000)
    print(f"  seed {seed}: {out}")
