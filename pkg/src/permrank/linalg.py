"""Dense vectors, matrices and canonical subspaces over GF(q)."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import BudgetExceededError, MatrixFormatError
from .field import FieldElement, FieldSpec, field_from_order

ENUMERATION_BUDGET = 1 << 24


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=np.int64, copy=True)
    arr.setflags(write=False)
    return arr


def _check_entries(spec: FieldSpec, arr: np.ndarray) -> None:
    if arr.size and (arr.min() < 0 or arr.max() >= spec.q):
        raise ValueError(f"matrix entries must be encodings in [0, {spec.q})")


@dataclass(frozen=True, eq=False)
class Vector:
    spec: FieldSpec
    data: np.ndarray

    def __post_init__(self) -> None:
        arr = _frozen(self.data)
        if arr.ndim != 1:
            raise ValueError("vector data must be one-dimensional")
        _check_entries(self.spec, arr)
        object.__setattr__(self, "data", arr)

    @classmethod
    def of(cls, spec: FieldSpec, values: Iterable[int]) -> Vector:
        """Build from ints; ``-c`` stands for the negation of encoding c."""
        return cls(spec, spec.encode(list(values)))

    @classmethod
    def unit(cls, spec: FieldSpec, n: int, i: int) -> Vector:
        data = np.zeros(n, dtype=np.int64)
        data[i] = 1
        return cls(spec, data)

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    def __len__(self) -> int:
        return self.dim

    def __getitem__(self, i: int) -> FieldElement:
        return FieldElement(self.spec, int(self.data[i]))

    def __add__(self, other: Vector) -> Vector:
        _same_space(self, other)
        return Vector(self.spec, self.spec.add(self.data, other.data))

    def __sub__(self, other: Vector) -> Vector:
        _same_space(self, other)
        return Vector(self.spec, self.spec.sub(self.data, other.data))

    def scale(self, c) -> Vector:
        return Vector(self.spec, self.spec.mul(self.data, int(c)))

    def is_zero(self) -> bool:
        return not self.data.any()

    def tolist(self) -> list[int]:
        return self.data.tolist()

    def __eq__(self, other) -> bool:
        if not isinstance(other, Vector):
            return NotImplemented
        return self.spec == other.spec and np.array_equal(self.data, other.data)

    def __hash__(self) -> int:
        return hash((self.spec, self.data.tobytes()))

    def __repr__(self) -> str:
        return f"Vector({self.spec!r}, {self.tolist()})"


def _same_space(a: Vector, b: Vector) -> None:
    if a.spec != b.spec:
        raise ValueError(f"vectors over different fields: {a.spec} vs {b.spec}")
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")


@dataclass(frozen=True, eq=False)
class Matrix:
    """An n-by-k matrix of field-element encodings (row-major, read-only)."""

    spec: FieldSpec
    data: np.ndarray

    def __post_init__(self) -> None:
        arr = _frozen(self.data)
        if arr.ndim != 2:
            raise ValueError("matrix data must be two-dimensional")
        _check_entries(self.spec, arr)
        object.__setattr__(self, "data", arr)

    @classmethod
    def of(cls, spec: FieldSpec, rows: Sequence[Sequence[int]], ncols: int | None = None) -> Matrix:
        """Build from nested ints; ``-c`` stands for the negation of encoding c."""
        rows = [list(r) for r in rows]
        if not rows:
            return cls(spec, np.zeros((0, ncols or 0), dtype=np.int64))
        if len({len(r) for r in rows}) != 1:
            raise ValueError("ragged rows")
        return cls(spec, spec.encode(rows))

    @classmethod
    def from_columns(cls, columns: Sequence[Vector]) -> Matrix:
        if not columns:
            raise ValueError("need at least one column")
        spec = columns[0].spec
        return cls(spec, np.stack([c.data for c in columns], axis=1))

    @classmethod
    def zeros(cls, spec: FieldSpec, n: int, k: int) -> Matrix:
        return cls(spec, np.zeros((n, k), dtype=np.int64))

    @classmethod
    def identity(cls, spec: FieldSpec, n: int) -> Matrix:
        return cls(spec, np.eye(n, dtype=np.int64))

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape

    @property
    def nrows(self) -> int:
        return self.data.shape[0]

    @property
    def ncols(self) -> int:
        return self.data.shape[1]

    @property
    def is_square(self) -> bool:
        return self.nrows == self.ncols

    def __getitem__(self, idx: tuple[int, int]) -> FieldElement:
        i, j = idx
        return FieldElement(self.spec, int(self.data[i, j]))

    def row(self, i: int) -> Vector:
        return Vector(self.spec, self.data[i])

    def column(self, j: int) -> Vector:
        return Vector(self.spec, self.data[:, j])

    @property
    def T(self) -> Matrix:
        return Matrix(self.spec, self.data.T)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> Matrix:
        return Matrix(self.spec, self.data[np.ix_(list(rows), list(cols))])

    def minor(self, i: int, j: int) -> Matrix:
        rows = [r for r in range(self.nrows) if r != i]
        cols = [c for c in range(self.ncols) if c != j]
        return self.submatrix(rows, cols)

    def tolist(self) -> list[list[int]]:
        return self.data.tolist()

    def __eq__(self, other) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return (
            self.spec == other.spec
            and self.shape == other.shape
            and np.array_equal(self.data, other.data)
        )

    def __hash__(self) -> int:
        return hash((self.spec, self.shape, self.data.tobytes()))

    def __repr__(self) -> str:
        return f"Matrix({self.spec!r}, {self.tolist()})"


# -- elimination ---------------------------------------------------------------


def rref_array(spec: FieldSpec, a: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Reduced row-echelon form of an encoding array and its pivot columns."""
    a = np.array(a, dtype=np.int64, copy=True)
    nrows, ncols = a.shape
    r = 0
    pivots: list[int] = []
    for c in range(ncols):
        if r == nrows:
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            a[[r, i]] = a[[i, r]]
        a[r] = spec.mul(a[r], spec.inv(int(a[r, c])))
        f = a[:, c].copy()
        f[r] = 0
        if f.any():
            a = spec.sub(a, spec.mul(f[:, None], a[r][None, :]))
        pivots.append(c)
        r += 1
    return a, pivots


def rref(M: Matrix) -> tuple[Matrix, int, list[int]]:
    """Return ``(R, rank, pivot_columns)`` with R the unique RREF of M."""
    a, pivots = rref_array(M.spec, M.data)
    return Matrix(M.spec, a), len(pivots), pivots


def rank(M: Matrix) -> int:
    return rref(M)[1]


def batch_rank(spec: FieldSpec, arrays: np.ndarray) -> np.ndarray:
    """Ranks of a stack of matrices, shape ``(B, n, k)`` -> ``(B,)``.

    Column-by-column elimination run on the whole stack at once; each matrix
    picks its own pivot row among rows not yet used.
    """
    a = np.array(arrays, dtype=np.int64, copy=True)
    b, n, k = a.shape
    used = np.zeros((b, n), dtype=bool)
    ranks = np.zeros(b, dtype=np.int64)
    idx = np.arange(b)
    for c in range(k):
        cand = (a[:, :, c] != 0) & ~used
        has = cand.any(axis=1)
        if not has.any():
            continue
        piv = np.argmax(cand, axis=1)
        ranks += has
        prow = a[idx, piv]
        pval = np.where(has, prow[:, c], 1)
        factor = spec.mul(a[:, :, c], spec.inv(pval)[:, None])
        factor = np.where(used | ~has[:, None], 0, factor)
        factor[idx, piv] = 0
        a = spec.sub(a, spec.mul(factor[:, :, None], prow[:, None, :]))
        used[idx[has], piv[has]] = True
    return ranks


# -- subspaces -----------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Subspace:
    """A subspace of F_q^n held by the RREF of a basis (no zero rows).

    Two Subspace values are equal exactly when their canonical bases are
    entry-wise equal, which is set equality of the subspaces.
    """

    spec: FieldSpec
    ambient_dim: int
    basis: np.ndarray
    pivots: tuple[int, ...] = field(default=())

    @classmethod
    def _from_rref(cls, spec: FieldSpec, n: int, basis: np.ndarray, pivots) -> Subspace:
        b = _frozen(np.asarray(basis).reshape(-1, n))
        return cls(spec, n, b, tuple(int(c) for c in pivots))

    @classmethod
    def from_rows(cls, spec: FieldSpec, rows: np.ndarray, n: int | None = None) -> Subspace:
        rows = np.asarray(rows, dtype=np.int64)
        if n is None:
            n = rows.shape[1]
        rows = rows.reshape(-1, n)
        _check_entries(spec, rows)
        a, pivots = rref_array(spec, rows)
        return cls._from_rref(spec, n, a[: len(pivots)], pivots)

    @classmethod
    def from_matrix(cls, M: Matrix) -> Subspace:
        """Row space of M."""
        return cls.from_rows(M.spec, M.data, M.ncols)

    @classmethod
    def zero(cls, spec: FieldSpec, n: int) -> Subspace:
        return cls._from_rref(spec, n, np.zeros((0, n), dtype=np.int64), ())

    @classmethod
    def full(cls, spec: FieldSpec, n: int) -> Subspace:
        return cls._from_rref(spec, n, np.eye(n, dtype=np.int64), range(n))

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @property
    def codim(self) -> int:
        return self.ambient_dim - self.dim

    def basis_vectors(self) -> list[Vector]:
        return [Vector(self.spec, r) for r in self.basis]

    def basis_matrix(self) -> Matrix:
        return Matrix(self.spec, self.basis)

    def elements(self) -> np.ndarray:
        """Every vector of the subspace, shape ``(q**dim, n)``."""
        q, d = self.spec.q, self.dim
        if d == 0:
            return np.zeros((1, self.ambient_dim), dtype=np.int64)
        coeffs = np.array(list(itertools.product(range(q), repeat=d)), dtype=np.int64)
        return self.spec.dot(coeffs, self.basis)

    def __contains__(self, v: Vector) -> bool:
        return contains(self, v)

    def __le__(self, other: Subspace) -> bool:
        return all(contains(other, v) for v in self.basis_vectors())

    def __eq__(self, other) -> bool:
        if not isinstance(other, Subspace):
            return NotImplemented
        return (
            self.spec == other.spec
            and self.ambient_dim == other.ambient_dim
            and self.basis.shape == other.basis.shape
            and np.array_equal(self.basis, other.basis)
        )

    def __hash__(self) -> int:
        return hash((self.spec, self.ambient_dim, self.basis.tobytes()))

    def __repr__(self) -> str:
        return f"Subspace({self.spec!r}, n={self.ambient_dim}, basis={self.basis.tolist()})"


def span(vectors: Sequence[Vector], n: int | None = None, spec: FieldSpec | None = None) -> Subspace:
    """Canonical span of the vectors; ``n`` and ``spec`` are needed only when empty."""
    if not vectors:
        if n is None or spec is None:
            raise ValueError("span of no vectors needs explicit n and spec")
        return Subspace.zero(spec, n)
    first = vectors[0]
    for v in vectors[1:]:
        _same_space(first, v)
    if n is not None and n != first.dim:
        raise ValueError(f"dimension mismatch: {first.dim} vs {n}")
    return Subspace.from_rows(first.spec, np.stack([v.data for v in vectors]), first.dim)


def _residual(S: Subspace, data: np.ndarray) -> np.ndarray:
    if S.dim == 0:
        return data
    coeffs = data[..., list(S.pivots)]
    return S.spec.sub(data, S.spec.dot(coeffs, S.basis))


def contains(S: Subspace, v: Vector) -> bool:
    if S.spec != v.spec:
        raise ValueError(f"field mismatch: {S.spec} vs {v.spec}")
    if v.dim != S.ambient_dim:
        raise ValueError(f"dimension mismatch: vector in F^{v.dim}, subspace of F^{S.ambient_dim}")
    return not np.any(_residual(S, v.data))


def orthogonal_complement(S: Subspace) -> Subspace:
    """``{x : <s, x> = 0 for all s in S}`` under the standard bilinear form."""
    n, spec = S.ambient_dim, S.spec
    free = [c for c in range(n) if c not in S.pivots]
    rows = np.zeros((len(free), n), dtype=np.int64)
    for t, f in enumerate(free):
        rows[t, f] = 1
        for i, pc in enumerate(S.pivots):
            rows[t, pc] = spec.neg(int(S.basis[i, f]))
    if not free:
        return Subspace.zero(spec, n)
    return Subspace.from_rows(spec, rows, n)


def hyperplane(normal: Vector) -> Subspace:
    """The (n-1)-dimensional subspace ``{normal}^perp``."""
    if normal.is_zero():
        raise ValueError("hyperplane normal must be nonzero")
    return orthogonal_complement(span([normal]))


def coordinate_hyperplane(spec: FieldSpec, n: int, i: int) -> Subspace:
    """``{e_i}^perp``: vectors whose coordinate i (0-based) is zero."""
    return hyperplane(Vector.unit(spec, n, i))


def enumerate_subspaces(
    spec: FieldSpec, n: int, dim: int, budget: int = ENUMERATION_BUDGET
) -> Iterator[Subspace]:
    """Every dim-dimensional subspace of F_q^n exactly once.

    Canonical bases are generated directly (pivot pattern times free entries),
    so there is nothing to deduplicate; the stream is sorted lexicographically
    by the row-major flattening of the canonical basis.
    """
    if not 0 <= dim <= n:
        raise ValueError(f"need 0 <= dim <= n, got dim={dim}, n={n}")
    if spec.q**n > budget:
        raise BudgetExceededError(f"enumeration of F_{spec.q}^{n} exceeds budget {budget}")
    if dim == 0:
        yield Subspace.zero(spec, n)
        return
    q = spec.q
    blocks = []
    pivots_of = []
    for pivots in itertools.combinations(range(n), dim):
        free = [(i, j) for i, pc in enumerate(pivots) for j in range(pc + 1, n) if j not in pivots]
        count = q ** len(free)
        block = np.zeros((count, dim, n), dtype=np.int64)
        for i, pc in enumerate(pivots):
            block[:, i, pc] = 1
        if free:
            vals = np.indices((q,) * len(free)).reshape(len(free), -1).T
            for t, (i, j) in enumerate(free):
                block[:, i, j] = vals[:, t]
        blocks.append(block)
        pivots_of.extend([pivots] * count)
    allb = np.concatenate(blocks).reshape(-1, dim * n)
    order = np.lexsort(allb.T[::-1]) if dim * n else np.arange(allb.shape[0])
    for t in order:
        yield Subspace._from_rref(spec, n, allb[t].reshape(dim, n), pivots_of[t])


# -- standard form ---------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class StandardForm:
    """Coordinates permuted so the basis reads ``(e_i, a_i)``.

    ``column_permutation[j]`` is the original coordinate placed at position j;
    the first ``n - codim`` positions are the RREF pivots.  ``a_block`` is the
    ``codim x dim`` matrix whose i-th column is the vector a_i.
    """

    spec: FieldSpec
    column_permutation: tuple[int, ...]
    a_block: np.ndarray
    codim: int

    @property
    def ambient_dim(self) -> int:
        return len(self.column_permutation)

    @property
    def dim(self) -> int:
        return self.ambient_dim - self.codim

    def a_vectors(self) -> list[Vector]:
        return [Vector(self.spec, self.a_block[:, i]) for i in range(self.dim)]

    def basis_rows(self) -> np.ndarray:
        """The standard basis in original coordinates (row i is ``(e_i, a_i)`` un-permuted)."""
        k = self.dim
        permuted = np.hstack([np.eye(k, dtype=np.int64), self.a_block.T.reshape(k, self.codim)])
        rows = np.zeros_like(permuted)
        rows[:, list(self.column_permutation)] = permuted
        return rows

    def subspace(self) -> Subspace:
        return Subspace.from_rows(self.spec, self.basis_rows(), self.ambient_dim)


def standard_form(S: Subspace) -> StandardForm:
    if S.dim == 0:
        raise ValueError("the zero subspace has no standard form")
    nonpivots = [c for c in range(S.ambient_dim) if c not in S.pivots]
    perm = tuple(S.pivots) + tuple(nonpivots)
    a_block = _frozen(S.basis[:, nonpivots].T.reshape(len(nonpivots), S.dim))
    return StandardForm(S.spec, perm, a_block, len(nonpivots))


# -- text format -------------------------------------------------------------------


def parse_matrix(text: str, spec: FieldSpec | None = None) -> Matrix:
    """Parse ``q n k`` followed by n rows of k encodings; ``#`` lines are comments."""
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise MatrixFormatError("empty matrix input (expected header 'q n k')")
    try:
        q, n, k = (int(t) for t in lines[0].split())
    except ValueError:
        raise MatrixFormatError(f"bad header {lines[0]!r} (expected 'q n k')") from None
    if spec is None:
        try:
            spec = field_from_order(q)
        except ValueError as exc:
            raise MatrixFormatError(str(exc)) from None
    elif spec.q != q:
        raise MatrixFormatError(f"header declares q={q} but field is {spec}")
    body = lines[1:]
    if len(body) != n:
        raise MatrixFormatError(f"header declares {n} rows, found {len(body)}")
    rows = []
    for t, ln in enumerate(body):
        try:
            row = [int(x) for x in ln.split()]
        except ValueError:
            raise MatrixFormatError(f"row {t}: non-integer entry in {ln!r}") from None
        if len(row) != k:
            raise MatrixFormatError(f"row {t}: expected {k} entries, found {len(row)}")
        if any(not 0 <= x < q for x in row):
            raise MatrixFormatError(f"row {t}: entries must lie in [0, {q})")
        rows.append(row)
    return Matrix(spec, np.array(rows, dtype=np.int64).reshape(n, k))


def read_matrix(path: str, spec: FieldSpec | None = None) -> Matrix:
    with open(path) as fh:
        return parse_matrix(fh.read(), spec)


def format_matrix(M: Matrix) -> str:
    lines = [f"{M.spec.q} {M.nrows} {M.ncols}"]
    lines += [" ".join(str(x) for x in row) for row in M.tolist()]
    return "\n".join(lines) + "\n"
