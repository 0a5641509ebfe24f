"""Abelianized actions over Z and Z/3Z.

Membership in the level-3 congruence kernel, Per/Fix sublattices of integer
matrices, finite-order detection, and the exhaustive desk-scale scans for
torsion-freeness and Per = Fix.

Matrices are tuples of tuples of Python ints (exact arithmetic; powers of
small matrices overflow fixed-width types quickly).  Kernels are computed by
integer row reduction with a unimodular transform, so the returned sublattices
are saturated by construction.
"""

from __future__ import annotations

import itertools
import math
import os
import time
from typing import List, Optional, Sequence, Tuple

from .aut import FreeAutomorphism
from .words import Word

IntMatrix = Tuple[Tuple[int, ...], ...]


def as_matrix(rows: Sequence[Sequence[int]]) -> IntMatrix:
    mat = tuple(tuple(int(x) for x in row) for row in rows)
    if any(len(row) != len(mat) for row in mat):
        raise ValueError("matrix must be square")
    return mat


def identity_matrix(n: int) -> IntMatrix:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def mat_mul(a: IntMatrix, b: IntMatrix) -> IntMatrix:
    n = len(a)
    bt = tuple(zip(*b))
    return tuple(
        tuple(sum(x * y for x, y in zip(row, col)) for col in bt) for row in a
    )


def mat_sub(a: IntMatrix, b: IntMatrix) -> IntMatrix:
    return tuple(tuple(x - y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def mat_pow(m: IntMatrix, k: int) -> IntMatrix:
    result = identity_matrix(len(m))
    base = m
    while k:
        if k & 1:
            result = mat_mul(result, base)
        base = mat_mul(base, base)
        k >>= 1
    return result


def mat_mod(m: IntMatrix, modulus: int) -> IntMatrix:
    return tuple(tuple(x % modulus for x in row) for row in m)


def det(m: IntMatrix) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    n = len(m)
    a = [list(row) for row in m]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[-1][-1]


def is_unimodular(m: IntMatrix) -> bool:
    return abs(det(m)) == 1


def _row_echelon_with_transform(m: IntMatrix) -> Tuple[List[List[int]], List[List[int]]]:
    """Integer row echelon form H = U m with U unimodular (gcd pivoting)."""
    rows = len(m)
    cols = len(m[0]) if rows else 0
    h = [list(row) for row in m]
    u = [[1 if i == j else 0 for j in range(rows)] for i in range(rows)]
    pivot_row = 0
    for col in range(cols):
        # eliminate below pivot_row in this column by gcd steps
        pivot = None
        for r in range(pivot_row, rows):
            if h[r][col] != 0:
                pivot = r
                break
        if pivot is None:
            continue
        h[pivot_row], h[pivot] = h[pivot], h[pivot_row]
        u[pivot_row], u[pivot] = u[pivot], u[pivot_row]
        for r in range(pivot_row + 1, rows):
            while h[r][col] != 0:
                if abs(h[r][col]) < abs(h[pivot_row][col]):
                    h[pivot_row], h[r] = h[r], h[pivot_row]
                    u[pivot_row], u[r] = u[r], u[pivot_row]
                q = h[r][col] // h[pivot_row][col]
                for c in range(cols):
                    h[r][c] -= q * h[pivot_row][c]
                for c in range(len(u[r])):
                    u[r][c] -= q * u[pivot_row][c]
        pivot_row += 1
        if pivot_row == rows:
            break
    return h, u


def kernel_basis(m: IntMatrix) -> Tuple[Tuple[int, ...], ...]:
    """Basis of {x in Z^n : m x = 0}; the lattice is saturated by construction."""
    n = len(m[0]) if m else 0
    transpose = tuple(zip(*m)) if m else ()
    if not transpose:
        return tuple(identity_matrix(n))
    h, u = _row_echelon_with_transform(transpose)
    basis = [tuple(u[r]) for r in range(len(h)) if all(x == 0 for x in h[r])]
    return tuple(basis)


def hermite_canonical(vectors: Sequence[Sequence[int]], n: int) -> Tuple[Tuple[int, ...], ...]:
    """Canonical (row-style Hermite) basis of the lattice spanned by ``vectors``.

    Pivots positive, entries above each pivot reduced into [0, pivot).
    Equal lattices produce identical outputs.
    """
    if not vectors:
        return ()
    h, _ = _row_echelon_with_transform(tuple(tuple(v) for v in vectors))
    rows = [row for row in h if any(row)]
    # normalise pivot signs, then reduce above pivots
    for row in rows:
        pivot_col = next(i for i, x in enumerate(row) if x)
        if row[pivot_col] < 0:
            for i in range(n):
                row[i] = -row[i]
    for r in range(len(rows) - 1, -1, -1):
        pivot_col = next(i for i, x in enumerate(rows[r]) if x)
        pivot = rows[r][pivot_col]
        for above in range(r):
            q = rows[above][pivot_col] // pivot
            if q:
                for i in range(n):
                    rows[above][i] -= q * rows[r][i]
    return tuple(tuple(row) for row in rows)


class Sublattice:
    """A saturated sublattice of Z^n, stored by its canonical Hermite basis."""

    __slots__ = ("ambient_dim", "basis")

    def __init__(self, ambient_dim: int, vectors: Sequence[Sequence[int]]):
        object.__setattr__(self, "ambient_dim", ambient_dim)
        object.__setattr__(self, "basis", hermite_canonical(vectors, ambient_dim))

    def __setattr__(self, name, value):
        raise AttributeError("Sublattice is immutable")

    @property
    def rank(self) -> int:
        return len(self.basis)

    def __eq__(self, other):
        return (
            isinstance(other, Sublattice)
            and self.ambient_dim == other.ambient_dim
            and self.basis == other.basis
        )

    def __hash__(self):
        return hash((self.ambient_dim, self.basis))

    def __repr__(self):
        return f"Sublattice(dim={self.ambient_dim}, basis={self.basis})"

    def contains(self, vector: Sequence[int]) -> bool:
        v = list(vector)
        for row in self.basis:
            pivot_col = next(i for i, x in enumerate(row) if x)
            if v[pivot_col] % row[pivot_col] != 0:
                return False
            q = v[pivot_col] // row[pivot_col]
            for i in range(self.ambient_dim):
                v[i] -= q * row[i]
        return all(x == 0 for x in v)

    def contains_lattice(self, other: "Sublattice") -> bool:
        return all(self.contains(row) for row in other.basis)

    def is_saturated(self) -> bool:
        """A lattice is saturated iff doubly-orthogonal closure adds nothing."""
        return self == saturation(self)


def saturation(lattice: Sublattice) -> Sublattice:
    """(L tensor Q) intersected with Z^n, via two integer kernels."""
    n = lattice.ambient_dim
    if not lattice.basis:
        return Sublattice(n, ())
    orth = kernel_basis(lattice.basis)
    if not orth:
        return Sublattice(n, identity_matrix(n))
    return Sublattice(n, kernel_basis(orth))


# ---------------------------------------------------------------------------
# abelianized actions


def abelianization(phi: FreeAutomorphism) -> IntMatrix:
    """Integer matrix of the induced map on H_1(F_N, Z); column i is the
    exponent vector of the image of x_i."""
    n = phi.alphabet.rank
    cols = []
    for image in phi.forward:
        col = [0] * n
        for letter in image.letters:
            col[abs(letter) - 1] += 1 if letter > 0 else -1
        cols.append(col)
    mat = tuple(tuple(cols[j][i] for j in range(n)) for i in range(n))
    assert abs(det(mat)) == 1, "automorphism must abelianize to GL_n(Z)"
    return mat


def word_exponent_vector(word: Word) -> Tuple[int, ...]:
    col = [0] * word.alphabet.rank
    for letter in word.letters:
        col[abs(letter) - 1] += 1 if letter > 0 else -1
    return tuple(col)


def in_ia3(phi: FreeAutomorphism) -> bool:
    """True iff the homology action mod 3 is the identity."""
    n = phi.alphabet.rank
    return mat_mod(abelianization(phi), 3) == identity_matrix(n)


# ---------------------------------------------------------------------------
# Per and Fix sublattices


def euler_totient(k: int) -> int:
    count = 0
    for i in range(1, k + 1):
        if math.gcd(i, k) == 1:
            count += 1
    return count


def order_bound(n: int) -> int:
    """lcm of all k with totient(k) <= n.

    Any finite-order element of GL_n(Z) has order dividing this bound: its
    minimal polynomial is a product of cyclotomic polynomials of degree <= n.
    """
    bound = 1
    k = 1
    while True:
        if euler_totient(k) <= n:
            bound = math.lcm(bound, k)
        # totient(k) >= sqrt(k/2), so beyond 2 n^2 + 1 no k qualifies
        if k > 2 * n * n + 1:
            return bound
        k += 1


def _check_gl(m: IntMatrix) -> None:
    if abs(det(m)) != 1:
        raise ValueError("matrix is not invertible over Z")


def fix_subgroup(m: IntMatrix) -> Sublattice:
    """Saturated kernel of (m - I) over Z: the fixed sublattice."""
    _check_gl(m)
    n = len(m)
    return Sublattice(n, kernel_basis(mat_sub(m, identity_matrix(n))))


def per_subgroup(m: IntMatrix) -> Sublattice:
    """The sublattice of vectors with finite orbit: ker(m^L - I) for the
    order bound L, saturated, hence a direct summand of Z^n."""
    _check_gl(m)
    n = len(m)
    power = mat_pow(m, order_bound(n))
    return Sublattice(n, kernel_basis(mat_sub(power, identity_matrix(n))))


def finite_order(m: IntMatrix) -> Optional[int]:
    """Least k with m^k = I, or None; None certifies infinite order."""
    _check_gl(m)
    n = len(m)
    ident = identity_matrix(n)
    power = ident
    for k in range(1, order_bound(n) + 1):
        power = mat_mul(power, m)
        if power == ident:
            return k
    return None


# ---------------------------------------------------------------------------
# exhaustive desk-scale scans


def _congruence_matrices(n: int, bound: int, level: int):
    """All M in GL_n(Z), entries in [-bound, bound], M = I mod level."""
    choices = []
    for i in range(n):
        for j in range(n):
            target = 1 if i == j else 0
            vals = [x for x in range(-bound, bound + 1) if (x - target) % level == 0]
            choices.append(vals)
    for flat in itertools.product(*choices):
        m = tuple(tuple(flat[i * n + j] for j in range(n)) for i in range(n))
        if abs(det(m)) == 1:
            yield m


def _thread_count() -> int:
    """Worker processes for the exhaustive scans; the environment variable is
    the only concurrency control."""
    try:
        return max(1, int(os.environ.get("APERIODIC_LAB_THREADS", "1")))
    except ValueError:
        return 1


def _minkowski_shard(task) -> Tuple[int, list]:
    n, bound, level, shard, n_shards = task
    ident = identity_matrix(n)
    enumerated = 0
    violations = []
    for i, m in enumerate(_congruence_matrices(n, bound, level)):
        if i % n_shards != shard:
            continue
        enumerated += 1
        order = finite_order(m)
        if order is not None and m != ident:
            violations.append({"matrix": [list(r) for r in m], "order": order})
    return enumerated, violations


def _perfix_shard(task) -> Tuple[int, list]:
    n, bound, shard, n_shards = task
    enumerated = 0
    violations = []
    for i, m in enumerate(_congruence_matrices(n, bound, 3)):
        if i % n_shards != shard:
            continue
        enumerated += 1
        if per_subgroup(m) != fix_subgroup(m):
            violations.append({"matrix": [list(r) for r in m]})
    return enumerated, violations


def _run_sharded(shard_fn, tasks) -> Tuple[int, list]:
    if len(tasks) == 1:
        results = [shard_fn(tasks[0])]
    else:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=len(tasks)) as pool:
            results = list(pool.map(shard_fn, tasks))
    enumerated = sum(r[0] for r in results)
    violations = [v for r in results for v in r[1]]
    violations.sort(key=lambda v: v["matrix"])
    return enumerated, violations


def minkowski_scan(n: int, bound: int, level: int = 3) -> dict:
    """Enumerate the level-``level`` congruence subgroup of GL_n(Z) inside the
    entry box [-bound, bound] and record every finite-order non-identity
    element.  At level 3 the expected violation count is zero.
    """
    if n > 3 or bound > 8:
        raise ValueError("scan limited to n <= 3, bound <= 8")
    start = time.perf_counter()
    shards = _thread_count()
    enumerated, violations = _run_sharded(
        _minkowski_shard, [(n, bound, level, s, shards) for s in range(shards)]
    )
    return {
        "n": n,
        "bound": bound,
        "level": level,
        "enumerated": enumerated,
        "violations": violations,
        "elapsed": time.perf_counter() - start,
    }


def abelian_standing_assumptions_check(n: int, bound: int) -> dict:
    """For every level-3 congruence matrix in the box, check that the periodic
    sublattice equals the fixed sublattice."""
    if n > 3 or bound > 6:
        raise ValueError("check limited to n <= 3, bound <= 6")
    start = time.perf_counter()
    shards = _thread_count()
    enumerated, violations = _run_sharded(
        _perfix_shard, [(n, bound, s, shards) for s in range(shards)]
    )
    return {
        "n": n,
        "bound": bound,
        "enumerated": enumerated,
        "violations": violations,
        "elapsed": time.perf_counter() - start,
    }


# ---------------------------------------------------------------------------
# matrix text I/O: one row of integers per line


def matrix_str(m: IntMatrix) -> str:
    return "\n".join(" ".join(str(x) for x in row) for row in m) + "\n"


def parse_matrix(text: str) -> IntMatrix:
    rows = [
        [int(tok) for tok in line.split()]
        for line in text.strip().splitlines()
        if line.strip()
    ]
    return as_matrix(rows)
