"""Marked graphs encoding Grushko free splittings of F_N.

A marked graph is a finite graph with a spanning tree, a word of F_N for
each non-tree edge, and a (possibly trivial) free vertex group at each
vertex given by generator words (conjugating paths baked in).  The marking
words together form a basis of F_N, certified by a carried automorphism
witness.

"Fixed by an outer automorphism" is operationalized as: some graph
self-isomorphism transports the vertex-group conjugacy classes exactly as
the automorphism does, and the two induced actions on the free-part
quotient (F_N modulo the normal closure of all vertex groups) agree up to
inner automorphisms.
"""

from __future__ import annotations

from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

import numpy as np

from .aut import (
    FreeAutomorphism,
    OuterClass,
    compose,
    identity_automorphism,
    inverse,
    is_inner,
    outer_eq,
)
from .graphs import FiniteGraph, GraphAutomorphism, enumerate_automorphisms
from .homology import word_exponent_vector
from .subgroups import (
    FreeFactorSystem,
    OrbitOutcome,
    SubgroupConjClass,
    cores_conjugate,
    fold_core,
    image_class,
    subgroup_class,
)
from .words import Alphabet, Word, parse_word, word_str


class MarkedGraph:
    """A Grushko free splitting as marked-graph data.

    ``loop_words[e]`` marks non-tree edge e in its forward orientation;
    ``vertex_groups[v]`` lists generator words of the vertex group (empty or
    absent for trivial groups).  The rank bookkeeping (non-tree edges plus
    vertex-group ranks equals N) is certified by ``witness``: the
    automorphism taking the standard basis to the marking words, vertex
    generators first (sorted by vertex), then loop words (sorted by edge).
    """

    __slots__ = (
        "alphabet",
        "graph",
        "tree_edges",
        "loop_words",
        "vertex_groups",
        "witness",
        "basis_layout",
    )

    def __init__(
        self,
        alphabet: Alphabet,
        graph: FiniteGraph,
        tree_edges: Sequence[int],
        loop_words: Dict[int, Word],
        vertex_groups: Dict[int, Sequence[Word]],
        witness: FreeAutomorphism,
    ):
        if not graph.is_connected():
            raise ValueError("graph must be connected")
        tree_set = frozenset(tree_edges)
        if len(tree_set) != graph.n_vertices - 1:
            raise ValueError("spanning tree must have n_vertices - 1 edges")
        non_tree = [e for e in range(graph.n_edges) if e not in tree_set]
        if sorted(loop_words) != non_tree:
            raise ValueError("need exactly one marking word per non-tree edge")
        vertex_groups = {
            v: tuple(gens) for v, gens in vertex_groups.items() if gens
        }
        total_rank = len(non_tree) + sum(len(g) for g in vertex_groups.values())
        if total_rank != alphabet.rank:
            raise ValueError(
                f"rank bookkeeping failed: {len(non_tree)} loops + "
                f"{total_rank - len(non_tree)} vertex generators != {alphabet.rank}"
            )
        for v in range(graph.n_vertices):
            if graph.valence(v) == 1 and v not in vertex_groups:
                raise ValueError(f"valence-1 vertex {v} with trivial group")
        layout: List[Tuple[str, int, int]] = []
        for v in sorted(vertex_groups):
            for j in range(len(vertex_groups[v])):
                layout.append(("vertex", v, j))
        for e in non_tree:
            layout.append(("loop", e, 0))
        expected = []
        for kind, a, b in layout:
            expected.append(
                vertex_groups[a][b] if kind == "vertex" else loop_words[a]
            )
        if list(witness.forward) != expected:
            raise ValueError("witness images must match the marking words in order")
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "graph", graph)
        object.__setattr__(self, "tree_edges", tree_set)
        object.__setattr__(self, "loop_words", dict(loop_words))
        object.__setattr__(self, "vertex_groups", vertex_groups)
        object.__setattr__(self, "witness", witness)
        object.__setattr__(self, "basis_layout", tuple(layout))

    def __setattr__(self, name, value):
        raise AttributeError("MarkedGraph is immutable")

    def non_tree_edges(self) -> List[int]:
        return [e for e in range(self.graph.n_edges) if e not in self.tree_edges]

    def vertex_rank(self, v: int) -> int:
        return len(self.vertex_groups.get(v, ()))

    def free_rank(self) -> int:
        return len(self.non_tree_edges())

    def vertex_class(self, v: int) -> Optional[SubgroupConjClass]:
        gens = self.vertex_groups.get(v)
        if not gens:
            return None
        return subgroup_class(self.alphabet, list(gens))

    def __repr__(self):
        loops = ", ".join(
            f"{e}: {word_str(w)}" for e, w in sorted(self.loop_words.items())
        )
        groups = ", ".join(
            "%d: <%s>" % (v, ", ".join(word_str(g) for g in gens))
            for v, gens in sorted(self.vertex_groups.items())
        )
        return (
            f"MarkedGraph(N={self.alphabet.rank}, {self.graph!r}, "
            f"loops={{{loops}}}, groups={{{groups}}})"
        )


# ---------------------------------------------------------------------------
# convenience builders


def rose_marked(
    alphabet: Alphabet, words: Optional[Sequence[Word]] = None, backward: Optional[Sequence[Word]] = None
) -> MarkedGraph:
    """Rose with one petal per basis letter.  Default marking is the
    identity; a custom marking needs its inverse supplied alongside."""
    n = alphabet.rank
    graph = FiniteGraph(1, [(0, 0)] * n)
    if words is None:
        witness = identity_automorphism(alphabet)
    else:
        if backward is None:
            raise ValueError("custom marking requires backward images")
        witness = FreeAutomorphism(alphabet, words, backward)
    loop_words = {e: witness.forward[e] for e in range(n)}
    return MarkedGraph(alphabet, graph, [], loop_words, {}, witness)


def edge_of_groups(
    alphabet: Alphabet,
    left_gens: Sequence[Word],
    right_gens: Sequence[Word],
    backward: Optional[Sequence[Word]] = None,
) -> MarkedGraph:
    """Two vertices joined by an edge, with vertex groups generated by the
    given words: an A * B style splitting."""
    graph = FiniteGraph(2, [(0, 1)])
    forward = list(left_gens) + list(right_gens)
    if backward is None:
        witness = FreeAutomorphism(
            alphabet, forward, identity_automorphism(alphabet).forward
        )
    else:
        witness = FreeAutomorphism(alphabet, forward, backward)
    return MarkedGraph(
        alphabet, graph, [0], {}, {0: left_gens, 1: right_gens}, witness
    )


def theta_marked(alphabet: Alphabet) -> MarkedGraph:
    """Theta graph (two vertices, three parallel edges) marked for F_2:
    tree edge 0; edges 1 and 2 marked a and b."""
    if alphabet.rank != 2:
        raise ValueError("theta marking is for rank 2")
    graph = FiniteGraph(2, [(0, 1), (0, 1), (0, 1)])
    a, b = parse_word(alphabet, "a"), parse_word(alphabet, "b")
    witness = identity_automorphism(alphabet)
    return MarkedGraph(alphabet, graph, [0], {1: a, 2: b}, {}, witness)


# ---------------------------------------------------------------------------
# the free-part quotient


def _project_free_part(
    word: Word, layout: Sequence[Tuple[str, int, int]], free_alphabet: Alphabet
) -> Word:
    """Quotient by the normal closure of all vertex generators: delete
    vertex-generator letters, keep loop letters, reduce."""
    loop_positions = {}
    for idx, (kind, _, _) in enumerate(layout):
        if kind == "loop":
            loop_positions[idx + 1] = len(loop_positions) + 1
    letters = []
    for letter in word.letters:
        pos = abs(letter)
        if pos in loop_positions:
            letters.append(
                loop_positions[pos] if letter > 0 else -loop_positions[pos]
            )
    return Word(free_alphabet, letters)


def _coordinates(marked: MarkedGraph, phi: FreeAutomorphism) -> FreeAutomorphism:
    """Conjugate phi into splitting coordinates via the marking witness."""
    mu = marked.witness
    return compose(inverse(mu), compose(phi, mu))


def _graph_free_part_images(
    marked: MarkedGraph, h: GraphAutomorphism, free_alphabet: Alphabet
) -> List[Word]:
    """Images of the free-part basis under the graph automorphism: each
    fundamental loop maps to a loop; collapse tree edges, read non-tree
    letters."""
    graph = marked.graph
    parent_dart, _ = graph.spanning_tree()
    non_tree = marked.non_tree_edges()
    index = {e: i + 1 for i, e in enumerate(non_tree)}
    images = []
    for e in non_tree:
        u, v = graph.edges[e]
        to_u = graph.tree_path_darts(parent_dart, u)
        from_v = [d ^ 1 for d in reversed(graph.tree_path_darts(parent_dart, v))]
        cycle = to_u + [2 * e] + from_v
        mapped = [h.dart_perm[d] for d in cycle]
        letters = []
        for d in mapped:
            edge = d >> 1
            if edge in index:
                letters.append(index[edge] if d & 1 == 0 else -index[edge])
        images.append(Word(free_alphabet, letters))
    return images


def invariance_test(
    marked: MarkedGraph, phi: FreeAutomorphism, max_edges: int = 10
) -> Optional[GraphAutomorphism]:
    """A graph self-isomorphism realizing phi on the marking, or None.

    None means the splitting is not phi-invariant.  A witness h must
    transport each vertex-group class the way phi does, and induce on the
    free-part quotient the same outer automorphism as phi.
    """
    if marked.graph.n_edges > max_edges:
        raise ValueError("graph too large for invariance enumeration")
    psi = _coordinates(marked, phi)
    alphabet = marked.alphabet

    group_vertices = sorted(marked.vertex_groups)
    start = {}
    position = 1
    for v in group_vertices:
        start[v] = position
        position += len(marked.vertex_groups[v])
    base_cores = {
        v: fold_core(
            alphabet,
            [
                Word(alphabet, (start[v] + j,))
                for j in range(len(marked.vertex_groups[v]))
            ],
        )
        for v in group_vertices
    }
    image_cores = {
        v: fold_core(
            alphabet,
            [
                psi.forward[start[v] + j - 1]
                for j in range(len(marked.vertex_groups[v]))
            ],
        )
        for v in group_vertices
    }

    b = marked.free_rank()
    free_alphabet = Alphabet(b) if b else None
    rho = None
    if b:
        if not marked.vertex_groups:
            # nothing to collapse: the free-part action is psi itself
            rho = psi
        else:
            # psi descends to the quotient iff it permutes the vertex-group
            # classes; bail out early when it does not
            image_keys = {v: None for v in group_vertices}
            available = list(group_vertices)
            for v in group_vertices:
                match = next(
                    (
                        w
                        for w in available
                        if cores_conjugate(image_cores[v], base_cores[w])
                    ),
                    None,
                )
                if match is None:
                    return None
                available.remove(match)
            loop_letters = [
                idx + 1
                for idx, (kind, _, _) in enumerate(marked.basis_layout)
                if kind == "loop"
            ]
            forward = [
                _project_free_part(
                    psi.forward[l - 1], marked.basis_layout, free_alphabet
                )
                for l in loop_letters
            ]
            backward = [
                _project_free_part(
                    psi.backward[l - 1], marked.basis_layout, free_alphabet
                )
                for l in loop_letters
            ]
            try:
                rho = FreeAutomorphism(free_alphabet, forward, backward)
            except ValueError:
                return None

    for h in enumerate_automorphisms(marked.graph, max_edges):
        ok = True
        for v in group_vertices:
            w = h.vertex_perm[v]
            if marked.vertex_rank(w) != marked.vertex_rank(v):
                ok = False
                break
            if w not in base_cores or not cores_conjugate(image_cores[v], base_cores[w]):
                ok = False
                break
        if not ok:
            continue
        # trivial vertices must not land on group vertices
        if any(
            marked.vertex_rank(h.vertex_perm[v]) != 0
            for v in range(marked.graph.n_vertices)
            if marked.vertex_rank(v) == 0
        ):
            continue
        if b:
            h_forward = _graph_free_part_images(marked, h, free_alphabet)
            h_backward = _graph_free_part_images(marked, h.inverse(), free_alphabet)
            try:
                h_star = FreeAutomorphism(free_alphabet, h_forward, h_backward)
            except ValueError:
                continue
            if not outer_eq(rho, h_star):
                continue
        return h
    return None


class GraphMapRep:
    """A self-map of a marked graph: vertex images plus one dart path per
    edge (the image of the reversed edge is the reversed path).

    Continuity is checked: each image path runs between the images of the
    edge's endpoints.  Images are stored as given; tightening happens on
    demand in the analytics that require it.
    """

    __slots__ = ("domain", "vertex_images", "edge_images")

    def __init__(
        self,
        domain: MarkedGraph,
        vertex_images: Sequence[int],
        edge_images: Sequence[Sequence[int]],
    ):
        graph = domain.graph
        vertex_images = tuple(vertex_images)
        edge_images = tuple(tuple(path) for path in edge_images)
        if len(vertex_images) != graph.n_vertices:
            raise ValueError("need one image per vertex")
        if len(edge_images) != graph.n_edges:
            raise ValueError("need one image path per edge")
        for e, path in enumerate(edge_images):
            if not path:
                raise ValueError(f"edge {e} must map to a nontrivial edge path")
            u, v = graph.edges[e]
            if graph.dart_origin(path[0]) != vertex_images[u]:
                raise ValueError(f"image of edge {e} starts at the wrong vertex")
            if graph.dart_head(path[-1]) != vertex_images[v]:
                raise ValueError(f"image of edge {e} ends at the wrong vertex")
            for d1, d2 in zip(path, path[1:]):
                if graph.dart_head(d1) != graph.dart_origin(d2):
                    raise ValueError(f"image of edge {e} is not an edge path")
        object.__setattr__(self, "domain", domain)
        object.__setattr__(self, "vertex_images", vertex_images)
        object.__setattr__(self, "edge_images", edge_images)

    def __setattr__(self, name, value):
        raise AttributeError("GraphMapRep is immutable")

    def dart_image(self, dart: int) -> Tuple[int, ...]:
        path = self.edge_images[dart >> 1]
        if dart & 1 == 0:
            return path
        return tuple(d ^ 1 for d in reversed(path))

    def __repr__(self):
        return (
            f"GraphMapRep(v={self.vertex_images}, "
            f"e={[list(p) for p in self.edge_images]})"
        )


def graph_map_from_words(marked: MarkedGraph, images: Sequence[Word]) -> GraphMapRep:
    """For a rose with identity-like marking: edge i maps to the dart path
    spelling the image word of basis letter i+1."""
    graph = marked.graph
    if graph.n_vertices != 1:
        raise ValueError("word-defined maps live on roses")
    paths = []
    for image in images:
        path = []
        for letter in image.letters:
            e = abs(letter) - 1
            path.append(2 * e if letter > 0 else 2 * e + 1)
        paths.append(path)
    return GraphMapRep(marked, (0,), paths)


def induced_outer(
    f: "GraphMapRep", backward_images: Sequence[Word]
) -> OuterClass:
    """Outer class induced by a homotopy equivalence of a marked graph with
    trivial vertex groups; certification uses the supplied inverse images."""
    marked = f.domain
    if marked.vertex_groups:
        raise ValueError("induced_outer supports trivial vertex groups only")
    alphabet = marked.alphabet
    graph = marked.graph
    parent_dart, _ = graph.spanning_tree()
    non_tree = marked.non_tree_edges()

    def dart_word(d: int) -> Word:
        e = d >> 1
        if e not in marked.loop_words:
            return Word(alphabet)
        w = marked.loop_words[e]
        return w if d & 1 == 0 else w.inverse()

    forward = []
    for e in non_tree:
        u, v = graph.edges[e]
        to_u = graph.tree_path_darts(parent_dart, u)
        from_v = [d ^ 1 for d in reversed(graph.tree_path_darts(parent_dart, v))]
        cycle = to_u + [2 * e] + from_v
        image_word = Word(alphabet)
        for d in cycle:
            for dd in f.dart_image(d):
                image_word = image_word * dart_word(dd)
        forward.append(image_word)
    # order basis positions by the marking layout (all loops here)
    phi = FreeAutomorphism(alphabet, forward, backward_images)
    mu = marked.witness
    return OuterClass(compose(mu, compose(phi, inverse(mu))))


def splitting_orbit_period(
    marked: MarkedGraph,
    phi: FreeAutomorphism,
    max_iter: int = 12,
    length_cap: int = 10_000,
) -> OrbitOutcome:
    """Least p with the splitting phi^p-invariant, else NoPeriodWithin;
    Blowup when the power's basis images outgrow the length cap."""
    power = identity_automorphism(marked.alphabet)
    for p in range(1, max_iter + 1):
        power = compose(phi, power)
        if power.max_image_length() > length_cap:
            return OrbitOutcome("Blowup", None, p)
        if invariance_test(marked, power) is not None:
            return OrbitOutcome("Period", p, p)
    return OrbitOutcome("NoPeriodWithin", None, max_iter)


def induced_ffs(
    marked: MarkedGraph,
    subforest_edges: Sequence[int],
    extra_vertices: Sequence[int] = (),
) -> FreeFactorSystem:
    """Free factor system of the components of a subforest of tree edges.

    The subforest must contain every vertex with a nontrivial group; each
    component contributes the free product of its vertex groups, realized as
    the witness image of the corresponding basis subset.
    """
    tree_set = marked.tree_edges
    for e in subforest_edges:
        if e not in tree_set:
            raise ValueError("subforest must consist of spanning-tree edges")
    vertices = set(extra_vertices)
    for e in subforest_edges:
        u, v = marked.graph.edges[e]
        vertices.update((u, v))
    missing = [v for v in marked.vertex_groups if v not in vertices]
    if missing:
        raise ValueError(f"subforest misses vertices with nontrivial group: {missing}")

    parent = {v: v for v in vertices}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e in subforest_edges:
        u, v = marked.graph.edges[e]
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv

    components: Dict[int, List[int]] = {}
    for v in vertices:
        components.setdefault(find(v), []).append(v)

    group_vertices = sorted(marked.vertex_groups)
    start = {}
    position = 1
    for v in group_vertices:
        start[v] = position
        position += len(marked.vertex_groups[v])

    subsets = []
    for comp in components.values():
        indices = []
        for v in comp:
            if v in marked.vertex_groups:
                indices.extend(
                    start[v] + j for j in range(len(marked.vertex_groups[v]))
                )
        if indices:
            subsets.append(frozenset(indices))
    return FreeFactorSystem(marked.witness, subsets)


def vertex_homology_image(marked: MarkedGraph, v: int) -> np.ndarray:
    """Row-reduced basis (over Z/3Z) of the span of the abelianized marked
    generators of the vertex group; for a free splitting this span is a
    direct summand of dimension equal to the vertex-group rank."""
    gens = marked.vertex_groups.get(v, ())
    n = marked.alphabet.rank
    if not gens:
        return np.zeros((0, n), dtype=np.int64)
    rows = np.array([word_exponent_vector(g) for g in gens], dtype=np.int64) % 3
    return _row_reduce_mod3(rows)


def _row_reduce_mod3(rows: np.ndarray) -> np.ndarray:
    rows = rows.copy() % 3
    pivot_row = 0
    n_cols = rows.shape[1]
    for col in range(n_cols):
        pivot = None
        for r in range(pivot_row, rows.shape[0]):
            if rows[r, col] % 3:
                pivot = r
                break
        if pivot is None:
            continue
        rows[[pivot_row, pivot]] = rows[[pivot, pivot_row]]
        inv = 1 if rows[pivot_row, col] % 3 == 1 else 2
        rows[pivot_row] = (rows[pivot_row] * inv) % 3
        for r in range(rows.shape[0]):
            if r != pivot_row and rows[r, col] % 3:
                rows[r] = (rows[r] - rows[r, col] * rows[pivot_row]) % 3
        pivot_row += 1
    return rows[:pivot_row]


def twist_descriptor(marked: MarkedGraph) -> dict:
    """Structure of the twist group: one factor G_v^{n_v}/Z(G_v) per vertex.

    Rank-1 vertex groups are their own center, so their factor is
    Z^{n_v - 1}; rank >= 2 groups have trivial center, contributing a full
    direct power; trivial groups contribute nothing.
    """
    factors = []
    parts = []
    for v in range(marked.graph.n_vertices):
        rank = marked.vertex_rank(v)
        valence = marked.graph.valence(v)
        if rank == 0:
            center = "whole"
            factor = "1"
        elif rank == 1:
            center = "whole"
            factor = "1" if valence == 1 else f"Z^{valence - 1}"
        else:
            center = "trivial"
            factor = f"F_{rank}" + (f"^{valence}" if valence > 1 else "")
        factors.append(
            {
                "vertex": v,
                "rank": rank,
                "valence": valence,
                "center": center,
                "factor": factor,
            }
        )
        if rank > 0 and factor != "1":
            parts.append(factor)
    return {"factors": factors, "descriptor": " x ".join(parts) if parts else "1"}


def suspension_presentation(phi: FreeAutomorphism) -> str:
    """Presentation of the mapping torus: generators plus a stable letter t,
    relations t x t^-1 = image of x."""
    alphabet = phi.alphabet
    gens = [word_str(Word(alphabet, (i,))) for i in alphabet.letters()]
    relations = []
    for i in alphabet.letters():
        image = word_str(phi.forward[i - 1])
        lhs = f"t*{gens[i - 1]}*t^-1"
        rhs = "*".join(
            (g.lower() if g.islower() else g.lower() + "^-1")
            for g in image
        ) if image != "1" else "1"
        relations.append(f"{lhs} = {rhs}")
    return f"< {', '.join(gens + ['t'])} | {', '.join(relations)} >"


# ---------------------------------------------------------------------------
# marked-graph file format: graph section, tree edges, loop markings,
# vertex groups


def marked_graph_str(marked: MarkedGraph) -> str:
    from .graphs import graph_str

    lines = [graph_str(marked.graph).rstrip("\n")]
    lines.append("tree " + " ".join(str(e) for e in sorted(marked.tree_edges)))
    for e in marked.non_tree_edges():
        lines.append(f"loop {e} {word_str(marked.loop_words[e])}")
    for v in sorted(marked.vertex_groups):
        gens = " ".join(word_str(g) for g in marked.vertex_groups[v])
        lines.append(f"group {v} {gens}")
    return "\n".join(lines) + "\n"


def parse_marked_graph(
    alphabet: Alphabet, text: str, backward: Optional[Sequence[Word]] = None
) -> MarkedGraph:
    """Parse the marked-graph format.  The witness inverse defaults to the
    identity (valid when the marking is the standard basis in layout order);
    otherwise the caller supplies backward images."""
    from .graphs import parse_graph

    lines = [line.strip() for line in text.strip().splitlines() if line.strip()]
    graph_lines = []
    tree: List[int] = []
    loops: Dict[int, Word] = {}
    groups: Dict[int, List[Word]] = {}
    for line in lines:
        if line.startswith("tree"):
            tree = [int(x) for x in line.split()[1:]]
        elif line.startswith("loop"):
            parts = line.split()
            loops[int(parts[1])] = parse_word(alphabet, parts[2])
        elif line.startswith("group"):
            parts = line.split()
            groups[int(parts[1])] = [parse_word(alphabet, w) for w in parts[2:]]
        else:
            graph_lines.append(line)
    graph = parse_graph("\n".join(graph_lines))
    forward = []
    for v in sorted(groups):
        forward.extend(groups[v])
    tree_set = set(tree)
    for e in range(graph.n_edges):
        if e not in tree_set:
            forward.append(loops[e])
    if backward is None:
        backward = identity_automorphism(alphabet).forward
    witness = FreeAutomorphism(alphabet, forward, backward)
    return MarkedGraph(alphabet, graph, tree, loops, groups, witness)
