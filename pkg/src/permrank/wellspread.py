"""Cheap certificates of full permanental rank, and the star-avoidance rule.

The greedy partition deals the rows x_1..x_n of an n x k matrix into k parts
so that each part spans a subspace of dimension at least k - 1.  When such a
partition exists and no column is zero, the matrix has full permanental rank,
so a successful run certifies it without evaluating a single permanent.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .field import FieldSpec
from .linalg import Matrix, rank


class _Echelon:
    """Incrementally grown semi-echelon basis: rows normalized to 1 at distinct pivots."""

    def __init__(self, spec: FieldSpec):
        self.spec = spec
        self.rows: list[tuple[int, list[int]]] = []

    @property
    def dim(self) -> int:
        return len(self.rows)

    def residual(self, x: list[int]) -> list[int]:
        spec = self.spec
        x = list(x)
        for piv, row in self.rows:
            c = x[piv]
            if c:
                x = [spec.sub(xi, spec.mul(c, ri)) for xi, ri in zip(x, row)]
        return x

    def insert(self, x: list[int]) -> bool:
        """Add x to the span; return True iff the dimension grew."""
        r = self.residual(x)
        piv = next((j for j, v in enumerate(r) if v), None)
        if piv is None:
            return False
        inv = self.spec.inv(r[piv])
        self.rows.append((piv, [self.spec.mul(inv, v) for v in r]))
        return True


@dataclass(frozen=True)
class PartitionCertificate:
    """Result of the greedy partition.

    ``steps[l]`` is ``(part, effective)``: where row l went and whether it
    was placed by the greedy rule (True) or marked ineffective (False).
    """

    parts: tuple[tuple[int, ...], ...]
    dims: tuple[int, ...]
    success: bool
    ineffective_count: int
    steps: tuple[tuple[int, bool], ...] = field(default=(), repr=False)

    def to_json(self) -> dict:
        return {
            "success": self.success,
            "parts": [list(p) for p in self.parts],
            "dims": list(self.dims),
            "ineffective_count": self.ineffective_count,
        }


def greedy_partition(X: Matrix) -> PartitionCertificate:
    """Deal rows to parts: each row goes to the least-index ACTIVE part whose
    span misses it; a part turns INACTIVE once its span reaches dimension
    k - 1.  A row no active part can take is INEFFECTIVE and appended to part 0.
    """
    n, k = X.shape
    if n < 1 or k < 1:
        raise ValueError(f"greedy_partition needs n, k >= 1, got {n}x{k}")
    spec = X.spec
    parts: list[list[int]] = [[] for _ in range(k)]
    spans = [_Echelon(spec) for _ in range(k)]
    active = [True] * k
    steps = []
    ineffective = 0
    rows = X.data.tolist()
    for ell, x in enumerate(rows):
        target = None
        for i in range(k):
            if active[i] and any(spans[i].residual(x)):
                target = i
                break
        if target is None:
            ineffective += 1
            parts[0].append(ell)
            spans[0].insert(x)
            steps.append((0, False))
            continue
        parts[target].append(ell)
        spans[target].insert(x)
        if spans[target].dim >= k - 1:
            active[target] = False
        steps.append((target, True))
    dims = tuple(s.dim for s in spans)
    return PartitionCertificate(
        parts=tuple(tuple(p) for p in parts),
        dims=dims,
        success=min(dims) >= k - 1,
        ineffective_count=ineffective,
        steps=tuple(steps),
    )


def part_rank(X: Matrix, part) -> int:
    """Rank of the rows of X indexed by ``part`` (recomputed from scratch)."""
    if not part:
        return 0
    return rank(Matrix(X.spec, X.data[list(part)]))


class Certificate(enum.Enum):
    CERTIFIED_FULL = "CERTIFIED_FULL"
    ZERO_COLUMN = "ZERO_COLUMN"
    INCONCLUSIVE = "INCONCLUSIVE"


def certify_full_prk(X: Matrix) -> Certificate:
    """Decide full permanental rank from structure alone when possible.

    ZERO_COLUMN means prk < k for sure; CERTIFIED_FULL means prk = k for sure;
    INCONCLUSIVE means the partition failed and a permanent search is needed.
    """
    n, k = X.shape
    if k < 3:
        raise ValueError(f"certification needs k >= 3, got k={k}; use classify_nx2 for k = 2")
    if n < k:
        raise ValueError(f"certification needs n >= k, got {n}x{k}")
    if not X.data.any(axis=0).all():
        return Certificate.ZERO_COLUMN
    if greedy_partition(X).success:
        return Certificate.CERTIFIED_FULL
    return Certificate.INCONCLUSIVE


# -- star avoidance ------------------------------------------------------------------


@dataclass(frozen=True)
class BipartiteGraph:
    """Bipartite graph on A = range(a_size), B = range(b_size); edges are (a, b) pairs."""

    a_size: int
    b_size: int
    edges: frozenset = frozenset()

    def __post_init__(self) -> None:
        edges = frozenset((int(a), int(b)) for a, b in self.edges)
        for a, b in edges:
            if not (0 <= a < self.a_size and 0 <= b < self.b_size):
                raise ValueError(f"edge {(a, b)} out of range")
        object.__setattr__(self, "edges", edges)

    @classmethod
    def from_biadjacency(cls, adj) -> BipartiteGraph:
        adj = np.asarray(adj, dtype=bool)
        return cls(adj.shape[0], adj.shape[1], frozenset(zip(*map(list, np.nonzero(adj)))))

    def degree_a(self, a: int) -> int:
        return sum(1 for x, _ in self.edges if x == a)

    def degree_b(self, b: int) -> int:
        return sum(1 for _, y in self.edges if y == b)

    def is_complete(self) -> bool:
        return len(self.edges) == self.a_size * self.b_size

    def premises_hold(self) -> bool:
        """|A|, |B| >= 4 and no isolated vertex on either side."""
        if self.a_size < 4 or self.b_size < 4:
            return False
        touched_a = {a for a, _ in self.edges}
        touched_b = {b for _, b in self.edges}
        return len(touched_a) == self.a_size and len(touched_b) == self.b_size

    def delete(self, a: int, b: int) -> frozenset:
        """Edge set of the graph induced on ``A - {a}``, ``B - {b}`` (original labels)."""
        return frozenset((x, y) for x, y in self.edges if x != a and y != b)


def is_b_star(edges) -> bool:
    """Exactly one B-vertex has positive degree."""
    return len({b for _, b in edges}) == 1


def satisfies_r1(G: BipartiteGraph, a: int, b: int) -> bool:
    """b is not the unique neighbour of a."""
    return {y for x, y in G.edges if x == a} != {b}


def satisfies_r2(G: BipartiteGraph, a: int, b: int) -> bool:
    """After deleting a and b the induced graph has an edge and is not a B-star."""
    rest = G.delete(a, b)
    return bool(rest) and not is_b_star(rest)


def star_avoid(G: BipartiteGraph) -> tuple[int, int]:
    """Pick ``(a, b)`` whose deletion leaves a non-empty, non-star graph.

    Complete graphs give (0, 0).  Otherwise b is a minimum-degree B-vertex and
    a a minimum-degree A-vertex among the non-neighbours of b; ties go to the
    least index.
    """
    if not G.premises_hold():
        raise ValueError("star_avoid needs |A|, |B| >= 4 and no isolated vertices")
    if G.is_complete():
        return 0, 0
    deg_a = [0] * G.a_size
    deg_b = [0] * G.b_size
    for x, y in G.edges:
        deg_a[x] += 1
        deg_b[y] += 1
    b = min(range(G.b_size), key=lambda y: (deg_b[y], y))
    outside = [x for x in range(G.a_size) if (x, b) not in G.edges]
    a = min(outside, key=lambda x: (deg_a[x], x))
    return a, b
