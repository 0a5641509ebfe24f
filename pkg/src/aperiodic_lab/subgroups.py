"""Stallings cores for finitely generated subgroups of F_N.

A core is a folded, edge-labeled, based graph; membership is path tracing,
conjugacy of subgroups is equality of canonicalized basepoint-free cores.
Free factor systems are produced by construction (images of basis subsets
under certified automorphisms) and carry their witness.
"""

from __future__ import annotations

from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple, Union

from .aut import FreeAutomorphism
from .homology import Sublattice, hermite_canonical, word_exponent_vector
from .words import Alphabet, CyclicWord, Word, cyclic_reduce, parse_word, word_str


class StallingsCore:
    """Folded labeled based graph; transitions[(v, letter)] = target vertex.

    Transitions come in inverse pairs: (v, l) -> w iff (w, -l) -> v.
    Every vertex except possibly the basepoint has valence >= 2.
    """

    __slots__ = ("alphabet", "n_vertices", "transitions", "base")

    def __init__(
        self,
        alphabet: Alphabet,
        n_vertices: int,
        transitions: Dict[Tuple[int, int], int],
        base: int = 0,
    ):
        for (v, letter), w in transitions.items():
            alphabet.check_letter(letter)
            if not (0 <= v < n_vertices and 0 <= w < n_vertices):
                raise ValueError("transition endpoint out of range")
            if transitions.get((w, -letter)) != v:
                raise ValueError("transitions must come in inverse pairs")
        seen: Dict[Tuple[int, int], int] = {}
        for (v, letter), w in transitions.items():
            if (v, letter) in seen:
                raise ValueError("not folded")
            seen[(v, letter)] = w
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "n_vertices", n_vertices)
        object.__setattr__(self, "transitions", dict(transitions))
        object.__setattr__(self, "base", base)

    def __setattr__(self, name, value):
        raise AttributeError("StallingsCore is immutable")

    def n_edges(self) -> int:
        return len(self.transitions) // 2

    def rank(self) -> int:
        return self.n_edges() - self.n_vertices + 1

    def trace(self, word: Word, start: Optional[int] = None) -> Optional[int]:
        v = self.base if start is None else start
        for letter in word.letters:
            nxt = self.transitions.get((v, letter))
            if nxt is None:
                return None
            v = nxt
        return v

    def generators(self) -> List[Word]:
        """A free basis of the represented subgroup, from a spanning tree."""
        out_letters: Dict[int, List[int]] = {}
        for (u, l) in self.transitions:
            out_letters.setdefault(u, []).append(l)
        for letters in out_letters.values():
            letters.sort(key=lambda l: (abs(l), l < 0))

        parent: Dict[int, Tuple[int, int]] = {}  # vertex -> (prev vertex, letter)
        order = [self.base]
        seen = {self.base}
        tree_pairs = set()
        i = 0
        while i < len(order):
            v = order[i]
            i += 1
            for letter in out_letters.get(v, ()):
                w = self.transitions[(v, letter)]
                if w not in seen:
                    seen.add(w)
                    parent[w] = (v, letter)
                    tree_pairs.add((v, letter))
                    tree_pairs.add((w, -letter))
                    order.append(w)

        def path_to(v: int) -> Tuple[int, ...]:
            letters = []
            while v != self.base:
                u, letter = parent[v]
                letters.append(letter)
                v = u
            return tuple(reversed(letters))

        gens = []
        done = set()
        for (v, letter), w in sorted(
            self.transitions.items(), key=lambda kv: (kv[0][0], abs(kv[0][1]), kv[0][1] < 0)
        ):
            if (v, letter) in tree_pairs or (v, letter) in done:
                continue
            done.add((w, -letter))
            word = Word(
                self.alphabet,
                path_to(v) + (letter,) + tuple(-l for l in reversed(path_to(w))),
            )
            gens.append(word)
        return gens


def _fold(
    alphabet: Alphabet, n: int, pairs: Dict[Tuple[int, int], set], base: int
) -> Tuple[int, Dict[Tuple[int, int], int], int]:
    """Fold a (possibly nondeterministic) labeled graph; returns relabeled
    vertex count, folded transitions, and the image of the basepoint.

    Worklist variant: vertices whose out-edges changed are re-examined, so
    folding a wedge of loops is near-linear in total word length.
    """
    parent = list(range(n))
    out: List[Dict[int, List[int]]] = [dict() for _ in range(n)]
    for (v, letter), targets in pairs.items():
        out[v].setdefault(letter, []).extend(targets)

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a: int, b: int) -> int:
        a, b = find(a), find(b)
        if a == b:
            return a
        if len(out[a]) < len(out[b]):
            a, b = b, a
        parent[b] = a
        for letter, targets in out[b].items():
            out[a].setdefault(letter, []).extend(targets)
        out[b] = {}
        return a

    queue = list(range(n))
    queued = set(queue)
    while queue:
        v = find(queue.pop())
        queued.discard(v)
        merged_any = False
        for letter, targets in list(out[v].items()):
            canon = {find(w) for w in targets}
            out[v][letter] = list(canon)
            if len(canon) > 1:
                it = iter(canon)
                keep = next(it)
                for w in it:
                    keep = union(keep, w)
                # v may itself have been merged away; requeue both ends
                for x in (find(v), find(keep)):
                    if x not in queued:
                        queue.append(x)
                        queued.add(x)
                merged_any = True
                break
        if merged_any:
            continue

    reps = sorted({find(v) for v in range(n)})
    relabel = {r: i for i, r in enumerate(reps)}
    transitions = {}
    for v in reps:
        for letter, targets in out[v].items():
            canon = {find(w) for w in targets}
            assert len(canon) == 1, "folding left a conflict"
            transitions[(relabel[v], letter)] = relabel[canon.pop()]
    return len(reps), transitions, relabel[find(base)]


def _trim(
    n: int, transitions: Dict[Tuple[int, int], int], base: Optional[int]
) -> Tuple[int, Dict[Tuple[int, int], int], Optional[int]]:
    """Iteratively remove valence-1 vertices (except the basepoint); queue
    based, linear in the graph size."""
    transitions = dict(transitions)
    out: Dict[int, set] = {v: set() for v in range(n)}
    for (v, letter) in transitions:
        out[v].add(letter)
    alive = set(range(n))
    queue = [v for v in alive if v != base and len(out[v]) == 1]
    while queue:
        v = queue.pop()
        if v not in alive or v == base or len(out[v]) != 1:
            continue
        letter = next(iter(out[v]))
        w = transitions.pop((v, letter))
        transitions.pop((w, -letter), None)
        out[v].discard(letter)
        out[w].discard(-letter)
        alive.discard(v)
        if w in alive and w != base and len(out[w]) == 1:
            queue.append(w)
    relabel = {v: i for i, v in enumerate(sorted(alive))}
    new_transitions = {
        (relabel[v], letter): relabel[w] for (v, letter), w in transitions.items()
    }
    return len(alive), new_transitions, (relabel[base] if base is not None else None)


def fold_core(alphabet: Alphabet, generators: Sequence[Word]) -> StallingsCore:
    """Wedge of generator loops at the basepoint, folded, then trimmed to
    the core.  Represents the subgroup generated by ``generators``."""
    pairs: Dict[Tuple[int, int], set] = {}
    n = 1
    for gen in generators:
        prev = 0
        for i, letter in enumerate(gen.letters):
            nxt = 0 if i == len(gen.letters) - 1 else n
            if nxt == n:
                n += 1
            pairs.setdefault((prev, letter), set()).add(nxt)
            pairs.setdefault((nxt, -letter), set()).add(prev)
            prev = nxt
    n, transitions, base = _fold(alphabet, n, pairs, 0)
    n, transitions, base = _trim(n, transitions, base)
    return StallingsCore(alphabet, n, transitions, base)


def membership(word: Word, core: StallingsCore) -> bool:
    """True iff the word traces a closed loop at the basepoint."""
    return core.trace(word) == core.base


def _bfs_encoding(
    alphabet: Alphabet, transitions: Dict[Tuple[int, int], int], start: int
) -> tuple:
    """Deterministic BFS encoding of the component of ``start``; isomorphic
    pointed graphs produce equal encodings."""
    letter_order = sorted(
        alphabet.signed_letters(), key=lambda l: (abs(l), l < 0)
    )
    number = {start: 0}
    order = [start]
    i = 0
    table = []
    while i < len(order):
        v = order[i]
        i += 1
        for letter in letter_order:
            w = transitions.get((v, letter))
            if w is None:
                continue
            if w not in number:
                number[w] = len(number)
                order.append(w)
            table.append((number[v], letter, number[w]))
    return tuple(sorted(table))


class SubgroupConjClass:
    """Conjugacy class of a finitely generated subgroup: the canonicalized
    basepoint-free core, plus a representative for further computation."""

    __slots__ = ("alphabet", "key", "representative")

    def __init__(self, representative: StallingsCore):
        n, transitions, _ = _trim(
            representative.n_vertices, representative.transitions, None
        )
        if n == 0:
            # trivial subgroup: empty cyclic core
            key: tuple = ()
        else:
            key = min(
                _bfs_encoding(representative.alphabet, transitions, v)
                for v in range(n)
            )
        object.__setattr__(self, "alphabet", representative.alphabet)
        object.__setattr__(self, "key", key)
        object.__setattr__(self, "representative", representative)

    def __setattr__(self, name, value):
        raise AttributeError("SubgroupConjClass is immutable")

    def __eq__(self, other):
        return (
            isinstance(other, SubgroupConjClass)
            and self.alphabet == other.alphabet
            and self.key == other.key
        )

    def __hash__(self):
        return hash((self.alphabet, self.key))

    def __repr__(self):
        gens = ", ".join(word_str(g) for g in self.representative.generators())
        return f"[<{gens}>]"

    def rank(self) -> int:
        return self.representative.rank()

    def core_size(self) -> int:
        return self.representative.n_edges()


def subgroup_class(alphabet: Alphabet, generators: Sequence[Word]) -> SubgroupConjClass:
    return SubgroupConjClass(fold_core(alphabet, generators))


def _vertex_signature(transitions: Dict[Tuple[int, int], int], n: int) -> Dict[int, tuple]:
    sig: Dict[int, List[int]] = {v: [] for v in range(n)}
    for (v, letter) in transitions:
        sig[v].append(letter)
    return {v: tuple(sorted(letters)) for v, letters in sig.items()}


def _pointed_iso(
    ta: Dict[Tuple[int, int], int],
    na: int,
    tb: Dict[Tuple[int, int], int],
    nb: int,
    start_a: int,
    start_b: int,
) -> bool:
    """Deterministic propagation: folded labeled graphs are rigid once a
    basepoint correspondence is chosen."""
    mapping = {start_a: start_b}
    queue = [start_a]
    out_a: Dict[int, List[int]] = {}
    for (v, letter) in ta:
        out_a.setdefault(v, []).append(letter)
    while queue:
        v = queue.pop()
        for letter in out_a.get(v, ()):
            w = ta[(v, letter)]
            w_b = tb.get((mapping[v], letter))
            if w_b is None:
                return False
            if w in mapping:
                if mapping[w] != w_b:
                    return False
            else:
                mapping[w] = w_b
                queue.append(w)
    if len(mapping) != na or na != nb:
        return False
    return len(set(mapping.values())) == nb


def cores_conjugate(a: StallingsCore, b: StallingsCore) -> bool:
    """Conjugacy of the represented subgroups without canonicalizing:
    basepoint-free trims compared by size, local signatures, then pointed
    propagation from candidate start vertices."""
    if a.alphabet != b.alphabet:
        return False
    na, ta, _ = _trim(a.n_vertices, a.transitions, None)
    nb, tb, _ = _trim(b.n_vertices, b.transitions, None)
    if na != nb or len(ta) != len(tb):
        return False
    if not ta and not tb:
        return True
    sig_a = _vertex_signature(ta, na)
    sig_b = _vertex_signature(tb, nb)
    if sorted(sig_a.values()) != sorted(sig_b.values()):
        return False
    start_a = 0
    for start_b in range(nb):
        if sig_b[start_b] != sig_a[start_a]:
            continue
        if _pointed_iso(ta, na, tb, nb, start_a, start_b):
            return True
    return False


def conjugacy_eq(h: SubgroupConjClass, k: SubgroupConjClass) -> bool:
    """True iff the canonical cyclic cores coincide."""
    return h == k


def conjugate_into(
    a: StallingsCore, b: StallingsCore, conj_bound: int
) -> Optional[Word]:
    """Search w with |w| <= conj_bound such that w A w^-1 <= B.

    Returns the first conjugator found in shortlex order, or None; None is
    inconclusive beyond the bound.
    """
    if conj_bound > 8:
        raise ValueError("conjugator bound capped at 8")
    alphabet = a.alphabet
    gens = a.generators()
    if not gens:
        return Word(alphabet)

    from .words import all_reduced_words

    for w in all_reduced_words(alphabet, conj_bound):
        w_inv = w.inverse()
        if all(membership(w * g * w_inv, b) for g in gens):
            return w
    return None


def _abelian_support(alphabet: Alphabet, gens: Sequence[Word]) -> Sublattice:
    vectors = [word_exponent_vector(g) for g in gens]
    lattice = Sublattice(alphabet.rank, vectors)
    from .homology import saturation

    return saturation(lattice)


class FreeFactorSystem:
    """A finite set of conjugacy classes of free factors, with a witness.

    The witness is a certified automorphism plus a partition of basis
    indices: class i is the image of the free factor generated by the
    corresponding basis subset, so the decomposition into these factors and
    the image of the remaining letters is a free product by construction.
    """

    __slots__ = ("alphabet", "classes", "witness", "subsets")

    def __init__(
        self,
        witness: FreeAutomorphism,
        subsets: Sequence[FrozenSet[int]],
    ):
        alphabet = witness.alphabet
        subsets = tuple(frozenset(s) for s in subsets)
        all_indices = [i for s in subsets for i in s]
        if len(all_indices) != len(set(all_indices)):
            raise ValueError("basis subsets must be disjoint")
        for i in all_indices:
            alphabet.check_letter(i)
        if any(not s for s in subsets):
            raise ValueError("basis subsets must be nonempty")
        classes = []
        for s in subsets:
            gens = [witness.forward[i - 1] for i in sorted(s)]
            cls = subgroup_class(alphabet, gens)
            if cls.rank() != len(s):
                raise ValueError("witness image does not have the expected rank")
            classes.append(cls)
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "classes", tuple(classes))
        object.__setattr__(self, "witness", witness)
        object.__setattr__(self, "subsets", subsets)

    def __setattr__(self, name, value):
        raise AttributeError("FreeFactorSystem is immutable")

    def __repr__(self):
        return f"FreeFactorSystem({list(self.classes)!r})"

    def __eq__(self, other):
        return (
            isinstance(other, FreeFactorSystem)
            and self.alphabet == other.alphabet
            and sorted(c.key for c in self.classes)
            == sorted(c.key for c in other.classes)
        )

    def __hash__(self):
        return hash((self.alphabet, tuple(sorted(c.key for c in self.classes))))

    def grushko_rank(self) -> int:
        """k + N' for the decomposition into k factors and a complement of
        rank N' = N - sum of factor ranks."""
        total = sum(c.rank() for c in self.classes)
        return len(self.classes) + self.alphabet.rank - total

    def is_sporadic(self) -> bool:
        return self.grushko_rank() <= 2


def basis_ffs(alphabet: Alphabet, subsets: Sequence[Sequence[int]]) -> FreeFactorSystem:
    """The free factor system of plain basis subsets (identity witness)."""
    from .aut import identity_automorphism

    return FreeFactorSystem(
        identity_automorphism(alphabet), [frozenset(s) for s in subsets]
    )


def ffs_poset_leq(
    f1: FreeFactorSystem, f2: FreeFactorSystem, conj_bound: int = 4
) -> Optional[bool]:
    """Tri-state partial order: True / False / None (inconclusive).

    True iff every class of f1 conjugates into some class of f2 within the
    bound; False when refuted by abelianized supports; None otherwise.
    """
    if f1.alphabet != f2.alphabet:
        raise ValueError("ambient rank mismatch")
    inconclusive = False
    for cls in f1.classes:
        supp = _abelian_support(f1.alphabet, cls.representative.generators())
        candidates = []
        for target in f2.classes:
            target_supp = _abelian_support(
                f2.alphabet, target.representative.generators()
            )
            if target_supp.contains_lattice(supp):
                candidates.append(target)
        if not candidates:
            return False
        found = False
        for target in candidates:
            if (
                conjugate_into(
                    cls.representative, target.representative, conj_bound
                )
                is not None
            ):
                found = True
                break
        if not found:
            inconclusive = True
    if inconclusive:
        return None
    assert f2.grushko_rank() <= f1.grushko_rank(), "poset map must reverse rank"
    return True


def image_class(phi: FreeAutomorphism, cls: SubgroupConjClass) -> SubgroupConjClass:
    """The class of the image subgroup; well defined since inner twists
    preserve cyclic cores."""
    gens = [phi.apply(g) for g in cls.representative.generators()]
    return subgroup_class(cls.alphabet, gens)


# ---------------------------------------------------------------------------
# orbits under iteration


class OrbitOutcome:
    """Outcome of a periodicity probe: Period(p), NoPeriodWithin, or Blowup."""

    __slots__ = ("kind", "period", "iterations")

    def __init__(self, kind: str, period: Optional[int] = None, iterations: int = 0):
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "period", period)
        object.__setattr__(self, "iterations", iterations)

    def __setattr__(self, name, value):
        raise AttributeError("OrbitOutcome is immutable")

    def __eq__(self, other):
        return (
            isinstance(other, OrbitOutcome)
            and (self.kind, self.period) == (other.kind, other.period)
        )

    def __hash__(self):
        return hash((self.kind, self.period))

    def __repr__(self):
        if self.kind == "Period":
            return f"Period({self.period})"
        return self.kind


def _period(p: int, iterations: int) -> OrbitOutcome:
    return OrbitOutcome("Period", p, iterations)


NO_PERIOD = "NoPeriodWithin"
BLOWUP = "Blowup"


def orbit_period(
    phi: FreeAutomorphism,
    start: Union[SubgroupConjClass, CyclicWord],
    max_iter: int = 12,
    length_cap: int = 10_000,
) -> OrbitOutcome:
    """First return of the conjugacy class of ``start`` under iteration.

    Compares each iterate against the starting class only; growth beyond
    ``length_cap`` (word length or total core edges) reports Blowup.
    """
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    if isinstance(start, CyclicWord):
        # iterate on cyclically reduced cores; rotation equality via string
        # doubling keeps each step linear in the word length
        from .words import _strip_conjugation

        def encode(letters):
            return "".join(chr(l + 32768) for l in letters)

        start_encoded = encode(start.letters)
        current = start.as_word()
        for k in range(1, max_iter + 1):
            image = phi.apply(current)
            core, _ = _strip_conjugation(image)
            if len(core) > length_cap:
                return OrbitOutcome(BLOWUP, None, k)
            if len(core) == len(start.letters):
                doubled = encode(core.letters + core.letters)
                if (not start.letters) or start_encoded in doubled:
                    return _period(k, k)
            current = core
        return OrbitOutcome(NO_PERIOD, None, max_iter)
    # iterate on raw folded cores; canonicalization is deferred to the
    # (cheap, size-guarded) conjugacy comparison against the start
    start_core = start.representative
    current_core = start_core
    for k in range(1, max_iter + 1):
        gens = [phi.apply(g) for g in current_core.generators()]
        current_core = fold_core(start.alphabet, gens)
        if current_core.n_edges() > length_cap:
            return OrbitOutcome(BLOWUP, None, k)
        if cores_conjugate(current_core, start_core):
            return _period(k, k)
    return OrbitOutcome(NO_PERIOD, None, max_iter)


def orbit_report(
    phi: FreeAutomorphism,
    start: Union[SubgroupConjClass, CyclicWord],
    max_iter: int = 12,
    length_cap: int = 10_000,
) -> dict:
    """JSON-ready record of an orbit probe: input, outcome, period,
    iterations, and the sizes seen along the way."""
    sizes = []
    if isinstance(start, CyclicWord):
        from .words import _strip_conjugation

        current = start.as_word()
        outcome = orbit_period(phi, start, max_iter, length_cap)
        for _ in range(outcome.iterations):
            current, _ = _strip_conjugation(phi.apply(current))
            sizes.append(len(current))
        label = word_str(start.as_word())
    else:
        core = start.representative
        outcome = orbit_period(phi, start, max_iter, length_cap)
        for _ in range(outcome.iterations):
            core = fold_core(start.alphabet, [phi.apply(g) for g in core.generators()])
            sizes.append(core.n_edges())
        label = repr(start)
    return {
        "input": label,
        "outcome": outcome.kind,
        "period": outcome.period,
        "iterations": outcome.iterations,
        "core_sizes": sizes,
    }


def exact_word_orbit(
    phi: FreeAutomorphism, start: Word, max_iter: int = 12, length_cap: int = 10_000
) -> OrbitOutcome:
    """First return of the exact word (not its class) under a fixed
    automorphism representative."""
    current = start
    for k in range(1, max_iter + 1):
        current = phi.apply(current)
        if len(current) > length_cap:
            return OrbitOutcome(BLOWUP, None, k)
        if current == start:
            return _period(k, k)
    return OrbitOutcome(NO_PERIOD, None, max_iter)


# ---------------------------------------------------------------------------
# subgroup file format: one generator word per line


def subgroup_str(gens: Sequence[Word]) -> str:
    return "\n".join(word_str(g) for g in gens) + "\n"


def parse_subgroup(alphabet: Alphabet, text: str) -> List[Word]:
    return [
        parse_word(alphabet, line)
        for line in text.strip().splitlines()
        if line.strip()
    ]
