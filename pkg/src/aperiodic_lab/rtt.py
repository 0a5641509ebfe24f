"""Analytics for topological representatives.

Tightening, maximal filtrations, transition matrices with Perron-Frobenius
data, stratum classification, aperiodicity partitions of irreducible
strata, turn legality under the direction map, verification of the train
track axioms on EG strata, and the bounded cancellation constant.

Strata are strongly connected components of the edge-transition digraph
(e -> e' when e' appears in the tight image of e), ordered so that every
initial union is invariant under the map.
"""

from __future__ import annotations

import itertools
from typing import Dict, List, Optional, Sequence, Set, Tuple

import numpy as np
import scipy.sparse as sp
import scipy.sparse.csgraph as csgraph

from .splittings import GraphMapRep, MarkedGraph


def tighten(graph, darts: Sequence[int]) -> Tuple[int, ...]:
    """Remove backtracking (a dart followed by its reverse) until none is
    left; the unique reduced path homotopic rel endpoints."""
    out: List[int] = []
    for d in darts:
        if out and out[-1] == (d ^ 1):
            out.pop()
        else:
            out.append(d)
    return tuple(out)


def is_tight(darts: Sequence[int]) -> bool:
    return all(d2 != (d1 ^ 1) for d1, d2 in zip(darts, darts[1:]))


def map_path(f: GraphMapRep, darts: Sequence[int]) -> Tuple[int, ...]:
    """Tight image of an edge path."""
    image: List[int] = []
    for d in darts:
        image.extend(f.dart_image(d))
    return tighten(f.domain.graph, image)


def _check_tight_images(f: GraphMapRep) -> None:
    for e, path in enumerate(f.edge_images):
        if not is_tight(path):
            raise ValueError(f"image of edge {e} has backtracking")


class TransitionMatrix:
    """Nonnegative integer matrix of a stratum.

    Entry (e', e) counts occurrences of e' in either orientation inside the
    tight image of e.  Carries the PF eigenvalue and the classification.
    """

    __slots__ = ("edges", "matrix", "kind", "pf_eigenvalue")

    def __init__(self, edges: Tuple[int, ...], matrix: np.ndarray):
        kind, lam = _classify(matrix)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "pf_eigenvalue", lam)

    def __setattr__(self, name, value):
        raise AttributeError("TransitionMatrix is immutable")

    def __repr__(self):
        return (
            f"TransitionMatrix(edges={self.edges}, kind={self.kind}, "
            f"lambda={self.pf_eigenvalue})"
        )


LAMBDA_TOL = 1e-8
POWER_TOL = 1e-10


def _char_poly_coeffs(matrix: np.ndarray) -> List[int]:
    """Exact integer coefficients of det(xI - M), by interpolation with
    integer determinants at n+1 points."""
    from .homology import det as det_int

    n = matrix.shape[0]
    points = list(range(n + 1))
    values = []
    for x in points:
        shifted = tuple(
            tuple(
                int(x) * (1 if i == j else 0) - int(matrix[i, j]) for j in range(n)
            )
            for i in range(n)
        )
        values.append(det_int(shifted))
    # Newton's divided differences with exact fractions
    from fractions import Fraction

    coeffs = [Fraction(v) for v in values]
    for level in range(1, n + 1):
        for i in range(n, level - 1, -1):
            coeffs[i] = (coeffs[i] - coeffs[i - 1]) / (points[i] - points[i - level])
    # expand Newton form to monomial coefficients
    poly = [Fraction(0)] * (n + 1)
    acc = [Fraction(1)]
    for i in range(n + 1):
        for j, c in enumerate(acc):
            poly[j] += coeffs[i] * c
        new_acc = [Fraction(0)] * (len(acc) + 1)
        for j, c in enumerate(acc):
            new_acc[j] -= c * points[i]
            new_acc[j + 1] += c
        acc = new_acc
    return [int(c) for c in poly]


def _eval_poly(coeffs: Sequence[int], x: float) -> float:
    value = 0.0
    for c in reversed(coeffs):
        value = value * x + c
    return value


def _power_iteration(matrix: np.ndarray) -> float:
    # iterate on M + I: primitive whenever M is irreducible, so the
    # iteration converges even for periodic M; eigenvalues shift by 1
    n = matrix.shape[0]
    m = matrix.astype(float) + np.eye(n)
    vec = np.ones(n) / n
    lam = 1.0
    for _ in range(100_000):
        nxt = m @ vec
        norm = np.linalg.norm(nxt)
        if norm == 0:
            return 0.0
        nxt /= norm
        new_lam = float(nxt @ (m @ nxt)) / float(nxt @ nxt)
        if abs(new_lam - lam) <= POWER_TOL * max(1.0, abs(new_lam)) / 100:
            return new_lam - 1.0
        lam = new_lam
        vec = nxt
    return lam - 1.0


def _is_permutation_matrix(matrix: np.ndarray) -> bool:
    n = matrix.shape[0]
    return (
        np.all((matrix == 0) | (matrix == 1))
        and np.all(matrix.sum(axis=0) == 1)
        and np.all(matrix.sum(axis=1) == 1)
    )


def _classify(matrix: np.ndarray) -> Tuple[str, float]:
    """Zero, NEG, or EG with the PF eigenvalue.

    An irreducible nonnegative integer matrix has eigenvalue exactly 1 iff
    it is a permutation matrix, which decides the boundary case exactly;
    otherwise power iteration is cross-checked against a sign change of the
    exact characteristic polynomial.
    """
    if not matrix.any():
        return "Zero", 0.0
    if _is_permutation_matrix(matrix):
        return "NEG", 1.0
    lam = _power_iteration(matrix)
    coeffs = _char_poly_coeffs(matrix)
    lo, hi = lam * (1 - 1e-6) - 1e-9, lam * (1 + 1e-6) + 1e-9
    if not (_eval_poly(coeffs, lo) <= 0.0 <= _eval_poly(coeffs, hi)):
        # fall back: walk down from the row-sum bound to bracket the largest
        # real root (simple for irreducible matrices), then bisect
        hi = float(matrix.sum(axis=1).max()) + 1.0
        lo = hi
        while lo > 0 and _eval_poly(coeffs, lo) > 0:
            lo -= 0.25
        for _ in range(200):
            mid = (lo + hi) / 2
            if _eval_poly(coeffs, mid) > 0:
                hi = mid
            else:
                lo = mid
        lam = (lo + hi) / 2
    kind = "EG" if lam > 1.0 + LAMBDA_TOL else "NEG"
    return kind, lam


class Filtration:
    """Strata (each irreducible or zero) in an order making every initial
    union invariant under the map."""

    __slots__ = ("graph_map", "strata")

    def __init__(self, graph_map: GraphMapRep, strata: Sequence[TransitionMatrix]):
        object.__setattr__(self, "graph_map", graph_map)
        object.__setattr__(self, "strata", tuple(strata))

    def __setattr__(self, name, value):
        raise AttributeError("Filtration is immutable")

    def stratum_of_edge(self, e: int) -> int:
        for r, stratum in enumerate(self.strata):
            if e in stratum.edges:
                return r
        raise KeyError(e)

    def edges_below(self, r: int) -> Set[int]:
        below: Set[int] = set()
        for stratum in self.strata[:r]:
            below.update(stratum.edges)
        return below

    def __repr__(self):
        return f"Filtration({list(self.strata)!r})"


def filtration_of(f: GraphMapRep) -> Filtration:
    """Maximal filtration from the condensation of the edge-transition
    digraph, with one transition matrix per stratum."""
    _check_tight_images(f)
    graph = f.domain.graph
    n = graph.n_edges
    counts = np.zeros((n, n), dtype=np.int64)
    for e in range(n):
        for d in f.edge_images[e]:
            counts[d >> 1, e] += 1
    # digraph arrow e -> e' when e' appears in the image of e
    adjacency = sp.csr_matrix((counts.T > 0).astype(np.int8))
    n_comp, labels = csgraph.connected_components(
        adjacency, directed=True, connection="strong"
    )
    # order components so successors (image edges) come earlier
    comp_edges: Dict[int, List[int]] = {}
    for e in range(n):
        comp_edges.setdefault(labels[e], []).append(e)
    successors: Dict[int, Set[int]] = {c: set() for c in range(n_comp)}
    for e in range(n):
        for e2 in range(n):
            if counts[e2, e] and labels[e2] != labels[e]:
                successors[labels[e]].add(labels[e2])
    order: List[int] = []
    placed: Set[int] = set()

    def place(c: int) -> None:
        if c in placed:
            return
        for child in sorted(successors[c]):
            place(child)
        placed.add(c)
        order.append(c)

    for c in sorted(range(n_comp), key=lambda c: min(comp_edges[c])):
        place(c)

    strata = []
    for c in order:
        edges = tuple(sorted(comp_edges[c]))
        block = counts[np.ix_(edges, edges)]
        strata.append(TransitionMatrix(edges, block))
    return Filtration(f, strata)


def classify_stratum(stratum: TransitionMatrix) -> Tuple[str, float]:
    """(kind, lambda) with kind in {Zero, NEG, EG}."""
    return stratum.kind, stratum.pf_eigenvalue


class VerificationFailed(AssertionError):
    """The computed cyclic classes contradict the expected mapping property."""


def aperiodic_partition(f: GraphMapRep, stratum: TransitionMatrix) -> dict:
    """Period d and cyclic classes of an irreducible stratum.

    d is the gcd of directed cycle lengths of the stratum digraph; the
    classes are residue classes of digraph distance from a base edge.  The
    mapping property (images of class i meet the stratum only in class i+1)
    is verified explicitly.
    """
    if stratum.kind == "Zero":
        raise ValueError("aperiodic_partition requires an irreducible stratum")
    edges = stratum.edges
    index = {e: i for i, e in enumerate(edges)}
    k = len(edges)
    arcs: Dict[int, List[int]] = {i: [] for i in range(k)}
    for i, e in enumerate(edges):
        for d in f.edge_images[e]:
            e2 = d >> 1
            if e2 in index:
                arcs[i].append(index[e2])
    # BFS layers from edge 0
    import math

    dist = {0: 0}
    queue = [0]
    while queue:
        u = queue.pop(0)
        for v in arcs[u]:
            if v not in dist:
                dist[v] = dist[u] + 1
                queue.append(v)
    period = 0
    for u in range(k):
        for v in arcs[u]:
            period = math.gcd(period, dist[u] + 1 - dist[v])
    if period <= 1:
        return {"aperiodic": True, "period": 1, "classes": [list(edges)]}
    classes: List[List[int]] = [[] for _ in range(period)]
    for i, e in enumerate(edges):
        classes[dist[i] % period].append(e)
    # the image of class i must meet the stratum only in class i+1
    for i in range(period):
        target = {index[e] for e in classes[(i + 1) % period]}
        for e in classes[i]:
            for v in arcs[index[e]]:
                if v not in target:
                    raise VerificationFailed(
                        f"edge {e} of class {i} maps over an edge outside class {(i + 1) % period}"
                    )
    return {"aperiodic": False, "period": period, "classes": classes}


# ---------------------------------------------------------------------------
# directions, turns, legality


def direction_map(f: GraphMapRep) -> Dict[int, int]:
    """DF: each dart maps to the first dart of its tight image."""
    _check_tight_images(f)
    return {
        d: f.dart_image(d)[0] for d in range(f.domain.graph.n_darts())
    }


def _merge_time_bounded(df: Dict[int, int], d1: int, d2: int, cap: int) -> bool:
    """Whether iterating DF ever merges the pair (within |darts|^2 steps)."""
    a, b = d1, d2
    for _ in range(cap):
        if a == b:
            return True
        a, b = df[a], df[b]
    return a == b


def illegal_turns(f: GraphMapRep) -> dict:
    """Classify every turn (unordered pair of darts at a common vertex).

    A turn is degenerate if its darts coincide, illegal if some DF-iterate
    merges them, legal otherwise.
    """
    graph = f.domain.graph
    df = direction_map(f)
    cap = graph.n_darts() ** 2 + 1
    degenerate, illegal, legal = [], [], []
    for v in range(graph.n_vertices):
        darts = [d for d in range(graph.n_darts()) if graph.dart_origin(d) == v]
        for d1, d2 in itertools.combinations_with_replacement(darts, 2):
            turn = (min(d1, d2), max(d1, d2))
            if d1 == d2:
                degenerate.append(turn)
            elif _merge_time_bounded(df, d1, d2, cap):
                illegal.append(turn)
            else:
                legal.append(turn)
    return {"degenerate": degenerate, "illegal": illegal, "legal": legal}


def _turns_in_path(graph, darts: Sequence[int]) -> List[Tuple[int, int]]:
    turns = []
    for d1, d2 in zip(darts, darts[1:]):
        a, b = d1 ^ 1, d2
        turns.append((min(a, b), max(a, b)))
    return turns


def verify_rtt(f: GraphMapRep, filtration: Optional[Filtration] = None, path_cap: int = 20) -> dict:
    """Check the three train track conditions on every EG stratum.

    Condition 1 is exact (directions of the stratum stay in the stratum).
    Condition 2 is bounded: connecting paths in the lower filtration part
    with endpoints in the stratum are enumerated up to ``path_cap`` edges
    and their tight images must be nondegenerate with endpoints attached to
    the stratum; longer paths are reported as unverified.  Condition 3 uses
    the local criterion: images of stratum edges cross only legal turns of
    stratum height.
    """
    if filtration is None:
        filtration = filtration_of(f)
    graph = f.domain.graph
    df = direction_map(f)
    turn_info = illegal_turns(f)
    illegal_set = set(turn_info["illegal"])
    report = {"strata": [], "all_pass": True}
    for r, stratum in enumerate(filtration.strata):
        if stratum.kind != "EG":
            continue
        edges = set(stratum.edges)
        stratum_darts = {d for d in range(graph.n_darts()) if (d >> 1) in edges}
        stratum_vertices = {graph.dart_origin(d) for d in stratum_darts}

        cond1 = all(df[d] in stratum_darts for d in stratum_darts)

        lower = filtration.edges_below(r)
        cond2_violations = []
        cond2_unverified = 0
        checked = 0
        if lower:
            for sigma in _paths_in_subgraph(graph, lower, stratum_vertices, path_cap):
                checked += 1
                image = map_path(f, sigma)
                endpoints_ok = (
                    image
                    and graph.dart_origin(image[0]) in stratum_vertices
                    and graph.dart_head(image[-1]) in stratum_vertices
                )
                if not image or not endpoints_ok:
                    cond2_violations.append([int(d) for d in sigma])
            cond2_unverified = _count_longer_paths_exist(
                graph, lower, stratum_vertices, path_cap
            )
        cond3_violations = []
        for e in stratum.edges:
            for dart in (2 * e, 2 * e + 1):
                image = f.dart_image(dart)
                for turn in _turns_in_path(graph, image):
                    if (
                        (turn[0] >> 1) in edges
                        and (turn[1] >> 1) in edges
                        and turn in illegal_set
                    ):
                        cond3_violations.append(
                            {"edge": e, "turn": [int(turn[0]), int(turn[1])]}
                        )
        entry = {
            "stratum": r,
            "edges": list(stratum.edges),
            "lambda": stratum.pf_eigenvalue,
            "condition1": cond1,
            "condition2": {
                "paths_checked": checked,
                "violations": cond2_violations,
                "bounded": bool(cond2_unverified),
                "cap": path_cap,
            },
            "condition3": {"violations": cond3_violations},
        }
        passed = cond1 and not cond2_violations and not cond3_violations
        entry["passed"] = passed
        report["all_pass"] = report["all_pass"] and passed
        report["strata"].append(entry)
    return report


def _paths_in_subgraph(
    graph, edges: Set[int], endpoints: Set[int], cap: int
):
    """Tight edge paths of length <= cap inside ``edges`` joining two
    vertices of ``endpoints``."""
    allowed = [d for d in range(graph.n_darts()) if (d >> 1) in edges]
    stack = [
        (d,) for d in allowed if graph.dart_origin(d) in endpoints
    ]
    while stack:
        path = stack.pop()
        head = graph.dart_head(path[-1])
        if head in endpoints:
            yield path
        if len(path) < cap:
            for d in allowed:
                if graph.dart_origin(d) == head and d != (path[-1] ^ 1):
                    stack.append(path + (d,))


def _count_longer_paths_exist(graph, edges: Set[int], endpoints: Set[int], cap: int) -> int:
    """1 if tight paths longer than the cap exist (the bounded check is then
    inconclusive for those), else 0."""
    allowed = [d for d in range(graph.n_darts()) if (d >> 1) in edges]
    frontier = [
        (d,) for d in allowed if graph.dart_origin(d) in endpoints
    ]
    for _ in range(cap):
        next_frontier = []
        for path in frontier:
            head = graph.dart_head(path[-1])
            for d in allowed:
                if graph.dart_origin(d) == head and d != (path[-1] ^ 1):
                    next_frontier.append(path + (d,))
        frontier = next_frontier
        if not frontier:
            return 0
    return 1 if frontier else 0


# ---------------------------------------------------------------------------
# bounded cancellation


def bcc_bound(f: GraphMapRep) -> int:
    """Sum of tight image lengths over unoriented edges: a valid bounded
    cancellation constant for the map."""
    _check_tight_images(f)
    return sum(len(path) for path in f.edge_images)


def bcc_inequality_holds(f: GraphMapRep, rho1: Sequence[int], rho2: Sequence[int]) -> bool:
    """The bounded cancellation inequality for a tight splitting
    rho = rho1 rho2."""
    c = bcc_bound(f)
    left = len(map_path(f, tuple(rho1) + tuple(rho2)))
    right = len(map_path(f, rho1)) + len(map_path(f, rho2)) - 2 * c
    return left >= right


def random_tight_path(graph, length: int, rng) -> Tuple[int, ...]:
    """A uniformly grown backtracking-free dart path (may be shorter when a
    dead end is hit)."""
    start_darts = list(range(graph.n_darts()))
    if not start_darts:
        return ()
    path = [rng.choice(start_darts)]
    while len(path) < length:
        head = graph.dart_head(path[-1])
        options = [
            d
            for d in range(graph.n_darts())
            if graph.dart_origin(d) == head and d != (path[-1] ^ 1)
        ]
        if not options:
            break
        path.append(rng.choice(options))
    return tuple(path)


# ---------------------------------------------------------------------------
# graph-map file format: marked-graph section plus "edge -> edgepath" lines,
# where an edge path is written as comma-separated darts "e+" / "e-"


def graph_map_str(f: GraphMapRep) -> str:
    from .splittings import marked_graph_str

    lines = [marked_graph_str(f.domain).rstrip("\n")]
    lines.append("vertices " + " ".join(str(v) for v in f.vertex_images))
    for e, path in enumerate(f.edge_images):
        spelled = ",".join(
            f"{d >> 1}{'+' if d & 1 == 0 else '-'}" for d in path
        )
        lines.append(f"{e} -> {spelled}")
    return "\n".join(lines) + "\n"


def parse_graph_map(alphabet, text: str) -> GraphMapRep:
    from .splittings import parse_marked_graph

    lines = text.strip().splitlines()
    marked_lines, map_lines, vertex_line = [], [], None
    for line in lines:
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("vertices"):
            vertex_line = stripped
        elif "->" in stripped:
            map_lines.append(stripped)
        else:
            marked_lines.append(stripped)
    marked = parse_marked_graph(alphabet, "\n".join(marked_lines))
    if vertex_line is None:
        raise ValueError("missing 'vertices' line")
    vertex_images = [int(x) for x in vertex_line.split()[1:]]
    edge_images: Dict[int, List[int]] = {}
    for line in map_lines:
        lhs, _, rhs = line.partition("->")
        e = int(lhs.strip())
        path = []
        for token in rhs.strip().split(","):
            token = token.strip()
            sign = token[-1]
            idx = int(token[:-1])
            path.append(2 * idx if sign == "+" else 2 * idx + 1)
        edge_images[e] = path
    paths = [edge_images[e] for e in range(marked.graph.n_edges)]
    return GraphMapRep(marked, vertex_images, paths)
