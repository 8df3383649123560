"""Permanents over GF(q): evaluation, minors, permanental rank.

The fast evaluator is Ryser's inclusion-exclusion formula

    per A = (-1)^n  sum_{T subset [n]} (-1)^{|T|} prod_i sum_{j in T} a_ij

run over whole stacks of matrices at once.  Column subsets are split into a
low part, tabulated once by doubling, and a high part walked in Gray-code
order so that each step updates the running row sums by a single column.
"""

from __future__ import annotations

import enum
import functools
import itertools
import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .errors import BudgetExceededError
from .field import FieldElement, FieldSpec
from .linalg import Matrix, Vector

NAIVE_BUDGET = 9
RYSER_BUDGET = 24
SUBMATRIX_BUDGET = 1 << 24

# elements touched per Gray-code step; bounds temporary memory
_STEP_ELEMENTS = 1 << 18


def _require_square(A: Matrix) -> None:
    if not A.is_square:
        raise ValueError(f"permanent needs a square matrix, got shape {A.nrows}x{A.ncols}")


@functools.lru_cache(maxsize=None)
def _permutations(n: int) -> np.ndarray:
    return np.array(list(itertools.permutations(range(n))), dtype=np.int64).reshape(-1, n)


def per_naive(A: Matrix, budget: int = NAIVE_BUDGET) -> FieldElement:
    """Permanent as the plain sum over all n! permutations."""
    _require_square(A)
    n = A.nrows
    if n > budget:
        raise BudgetExceededError(f"naive permanent limited to n <= {budget}, got n={n}")
    spec = A.spec
    if n == 0:
        return spec.one
    perms = _permutations(n)
    entries = A.data[np.arange(n), perms]
    terms = entries[:, 0]
    for i in range(1, n):
        terms = spec.mul(terms, entries[:, i])
    return FieldElement(spec, spec.sum(terms))


def _popcount_sign(count: int) -> np.ndarray:
    bits = np.arange(count, dtype=np.int64)
    parity = np.zeros(count, dtype=np.int64)
    while bits.any():
        parity ^= bits & 1
        bits >>= 1
    return 1 - 2 * parity


def _ryser_chunk(spec: FieldSpec, a: np.ndarray) -> np.ndarray:
    b, n, _ = a.shape
    low = n
    while low > 0 and b * n * (1 << low) > _STEP_ELEMENTS:
        low -= 1
    # row sums for every subset of the low columns, index bit j <-> column j
    sums = np.zeros((b, 1, n), dtype=np.int64)
    for j in range(low):
        sums = np.concatenate([sums, spec.add(sums, a[:, None, :, j])], axis=1)
    low_sign = _popcount_sign(1 << low)

    acc = np.zeros((b, spec.m), dtype=np.int64)
    high = np.zeros((b, n), dtype=np.int64)
    gray = 0
    for i in range(1 << (n - low)):
        sign = 1
        if i:
            j = (i & -i).bit_length() - 1
            gray ^= 1 << j
            col = a[:, :, low + j]
            high = spec.add(high, col) if gray >> j & 1 else spec.sub(high, col)
        if bin(gray).count("1") & 1:
            sign = -1
        prods = spec.prod(spec.add(sums, high[:, None, :]), axis=2)
        acc += sign * np.einsum("blm,l->bm", spec.digits(prods), low_sign)
    if n & 1:
        acc = -acc
    return spec.from_digits(acc % spec.p)


def per_many(spec: FieldSpec, arrays: np.ndarray, budget: int = RYSER_BUDGET) -> np.ndarray:
    """Permanents of a stack ``(B, n, n)`` of encoding arrays, via Ryser."""
    a = np.asarray(arrays, dtype=np.int64)
    if a.ndim != 3 or a.shape[1] != a.shape[2]:
        raise ValueError(f"expected a stack of square matrices, got shape {a.shape}")
    b, n, _ = a.shape
    if n > budget:
        raise BudgetExceededError(f"Ryser permanent limited to n <= {budget}, got n={n}")
    if n == 0:
        return np.ones(b, dtype=np.int64)
    chunk = max(1, _STEP_ELEMENTS // (n << min(n, 6)))
    out = np.empty(b, dtype=np.int64)
    for s in range(0, b, chunk):
        out[s : s + chunk] = _ryser_chunk(spec, a[s : s + chunk])
    return out


def per_ryser(A: Matrix, budget: int = RYSER_BUDGET) -> FieldElement:
    """Permanent by Ryser's formula with Gray-code row-sum updates."""
    _require_square(A)
    return FieldElement(A.spec, int(per_many(A.spec, A.data[None], budget)[0]))


per = per_ryser


def cofactor_expand(A: Matrix, row: int) -> list[tuple[FieldElement, FieldElement]]:
    """Pairs ``(A[row, j], per(minor(row, j)))`` for every column j."""
    _require_square(A)
    n = A.nrows
    if not 0 <= row < n:
        raise ValueError(f"row {row} out of range for {n}x{n} matrix")
    minors = np.stack([A.minor(row, j).data for j in range(n)])
    pers = per_many(A.spec, minors)
    return [(A[row, j], FieldElement(A.spec, int(pers[j]))) for j in range(n)]


@dataclass(frozen=True)
class PrkResult:
    """Permanental rank with a witness ``(rows, cols)`` of nonzero subpermanent."""

    value: int
    witness: tuple[tuple[int, ...], tuple[int, ...]] | None = None


def _chunks(it: Iterator, size: int) -> Iterator[list]:
    while True:
        block = list(itertools.islice(it, size))
        if not block:
            return
        yield block


def prk(A: Matrix, budget: int = SUBMATRIX_BUDGET) -> PrkResult:
    """Exact permanental rank: largest r with a nonzero r x r subpermanent.

    Sizes are tried from ``min(n, k)`` downwards; within a size, row subsets
    are the outer and column subsets the inner lexicographic loop.
    """
    n, k = A.shape
    top = min(n, k)
    total = sum(math.comb(n, r) * math.comb(k, r) for r in range(1, top + 1))
    if total > budget:
        raise BudgetExceededError(f"prk search over {total} submatrices exceeds budget {budget}")
    spec = A.spec
    for r in range(top, 0, -1):
        pairs = itertools.product(itertools.combinations(range(n), r), itertools.combinations(range(k), r))
        for block in _chunks(pairs, 4096):
            rows = np.array([p[0] for p in block], dtype=np.int64)
            cols = np.array([p[1] for p in block], dtype=np.int64)
            subs = A.data[rows[:, :, None], cols[:, None, :]]
            hits = np.flatnonzero(per_many(spec, subs))
            if hits.size:
                rw, cl = block[int(hits[0])]
                return PrkResult(r, (tuple(rw), tuple(cl)))
    return PrkResult(0, None)


def full_prk_witness(A: Matrix, budget: int = SUBMATRIX_BUDGET) -> tuple[int, ...] | None:
    """First row subset (lexicographic) whose k x k submatrix has nonzero permanent."""
    n, k = A.shape
    if n < k:
        raise ValueError(f"full permanental rank needs n >= k, got {n}x{k}")
    if math.comb(n, k) > budget:
        raise BudgetExceededError(f"C({n},{k}) row subsets exceed budget {budget}")
    if k == 0:
        return ()
    subsets = itertools.combinations(range(n), k)
    size = 16
    while True:
        block = list(itertools.islice(subsets, size))
        if not block:
            return None
        rows = np.array(block, dtype=np.int64)
        hits = np.flatnonzero(per_many(A.spec, A.data[rows]))
        if hits.size:
            return block[int(hits[0])]
        size = min(size * 4, 4096)


def has_full_prk(A: Matrix, budget: int = SUBMATRIX_BUDGET) -> bool:
    """True iff some k x k submatrix of the n x k matrix A has nonzero permanent."""
    return full_prk_witness(A, budget) is not None


def per_3x2(B: Matrix) -> Vector:
    """The three 2x2 subpermanents of a 3x2 matrix, deleting row 0, 1, 2 in turn."""
    if B.shape != (3, 2):
        raise ValueError(f"per_3x2 needs a 3x2 matrix, got {B.nrows}x{B.ncols}")
    spec, a = B.spec, B.data
    out = []
    for skip in range(3):
        r, s = (i for i in range(3) if i != skip)
        out.append(spec.add(spec.mul(int(a[r, 0]), int(a[s, 1])), spec.mul(int(a[r, 1]), int(a[s, 0]))))
    return Vector(spec, np.array(out, dtype=np.int64))


class Nx2Class(enum.Enum):
    FULL_PRK = "FULL_PRK"
    ZERO_COLUMN = "ZERO_COLUMN"
    SINGLE_ROW = "SINGLE_ROW"
    PAIRED_ROWS = "PAIRED_ROWS"


def classify_nx2(A: Matrix) -> Nx2Class:
    """Which of the three ways an n x 2 matrix can have prk < 2 applies, if any.

    The cases are detected structurally: (i) a zero column; (ii) exactly one
    nonzero row, a multiple of (1, x) with x != 0; (iii) exactly two nonzero
    rows, multiples of (1, x) and (1, -x) with x != 0.  Anything else is
    reported as FULL_PRK.
    """
    if A.ncols != 2 or A.nrows < 2:
        raise ValueError(f"classify_nx2 needs an n x 2 matrix with n >= 2, got {A.nrows}x{A.ncols}")
    spec, a = A.spec, A.data
    if not a[:, 0].any() or not a[:, 1].any():
        return Nx2Class.ZERO_COLUMN
    nonzero = [r for r in a if r.any()]
    if not all(r[0] and r[1] for r in nonzero):
        return Nx2Class.FULL_PRK
    if len(nonzero) == 1:
        return Nx2Class.SINGLE_ROW
    if len(nonzero) == 2:
        x0, x1 = (spec.mul(int(r[1]), spec.inv(int(r[0]))) for r in nonzero)
        if spec.add(x0, x1) == 0:
            return Nx2Class.PAIRED_ROWS
    return Nx2Class.FULL_PRK
