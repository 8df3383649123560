"""Permanull and jointly-permanull subspaces.

A subspace S of F^n is permanull when every n x n matrix with all columns in
S has zero permanent; a list S_1..S_n is jointly permanull when every matrix
whose i-th column lies in S_i does.  By multilinearity it is enough to test
columns drawn from bases.

The fast test works from the standard form of S: with basis rows
``(e_i, a_i)`` and the ``d x k`` block ``a`` (column i is a_i), S is
permanull iff every coefficient ``n_alpha * per(a[:, alpha])`` of the
permanental polynomial vanishes, alpha ranging over ``[k]^d``.  Index
tuples alpha are 0-based throughout.
"""

from __future__ import annotations

import enum
import itertools
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import BudgetExceededError
from .field import FieldElement, FieldSpec
from .linalg import (
    Matrix,
    Subspace,
    coordinate_hyperplane,
    enumerate_subspaces,
    standard_form,
)
from .parallel import run_tasks, split_range
from .permanent import per_many

BRUTE_BUDGET = 1 << 22
LIST_BUDGET = 1 << 24


class Method(enum.Enum):
    POLYNOMIAL = "POLYNOMIAL"
    BRUTE_FORCE = "BRUTE_FORCE"


@dataclass(frozen=True)
class PermanullVerdict:
    """Outcome of a permanull test.

    For a negative verdict ``witness`` is a square matrix with admissible
    columns and nonzero permanent; the polynomial method also reports the
    failing index tuple ``alpha``.
    """

    is_permanull: bool
    method: Method
    alpha: tuple[int, ...] | None = None
    witness: Matrix | None = None

    def __bool__(self) -> bool:
        return self.is_permanull


# -- the permanental polynomial ------------------------------------------------


def n_alpha(alpha: Sequence[int]) -> int:
    """Number of partial configurations: product of (block size + 1) over the blocks of alpha."""
    return math.prod(c + 1 for c in Counter(alpha).values())


def _alpha_matrices(a_block: np.ndarray, alphas: np.ndarray) -> np.ndarray:
    # stack of d x d matrices a[:, alpha]
    return np.moveaxis(a_block[:, alphas], 1, 0)


def coefficient(spec: FieldSpec, alpha: Sequence[int], a_block: np.ndarray) -> FieldElement:
    """Coefficient ``n_alpha * per(a[:, alpha])`` of the monomial ``x^alpha``."""
    a_block = np.asarray(a_block, dtype=np.int64)
    d, k = a_block.shape
    alpha = tuple(int(j) for j in alpha)
    if len(alpha) != d:
        raise ValueError(f"alpha must have length d={d}, got {len(alpha)}")
    if any(not 0 <= j < k for j in alpha):
        raise ValueError(f"alpha entries must lie in [0, {k})")
    sub = a_block[:, list(alpha)].reshape(d, d)
    value = int(per_many(spec, sub[None])[0])
    return FieldElement(spec, spec.mul(spec.from_int(n_alpha(alpha)), value))


def permanental_matrix(spec: FieldSpec, a_block: np.ndarray, xs: np.ndarray) -> Matrix:
    """The ``(k+d) x (k+d)`` matrix ``[[I_k, X], [a^T... ]]`` evaluated at ``xs``.

    ``a_block`` is ``d x k`` (row i is a_i^T) and ``xs`` is ``d x k`` (row j is
    x_j); the top block is ``[I_k | x_1 .. x_d]`` and row i of the bottom block
    is ``[a_i^T | a_i^T x_1 .. a_i^T x_d]``.
    """
    a = np.asarray(a_block, dtype=np.int64)
    x = np.asarray(xs, dtype=np.int64)
    d, k = a.shape
    if x.shape != (d, k):
        raise ValueError(f"xs must have shape {(d, k)}, got {x.shape}")
    top = np.hstack([np.eye(k, dtype=np.int64), x.T])
    bottom = np.hstack([a, spec.dot(a, x.T)])
    return Matrix(spec, np.vstack([top, bottom]))


def polynomial_value(spec: FieldSpec, a_block: np.ndarray, xs: np.ndarray) -> FieldElement:
    """Sum over all alpha of ``n_alpha A^alpha x^alpha``, term by term."""
    a = np.asarray(a_block, dtype=np.int64)
    x = np.asarray(xs, dtype=np.int64)
    d, k = a.shape
    total = 0
    for alpha in itertools.product(range(k), repeat=d):
        c = int(coefficient(spec, alpha, a))
        for i, j in enumerate(alpha):
            c = spec.mul(c, int(x[i, j]))
        total = spec.add(total, c)
    return FieldElement(spec, total)


def _poly_witness(S: Subspace, sf, alpha: tuple[int, ...]) -> Matrix:
    # columns v_1..v_k, v_alpha_1..v_alpha_d: its permanent is exactly the alpha coefficient
    basis = sf.basis_rows()
    cols = list(range(sf.dim)) + list(alpha)
    return Matrix(S.spec, basis[cols].T)


def is_permanull_poly(S: Subspace, symmetric: bool = True) -> PermanullVerdict:
    """Permanull test through the coefficients of the permanental polynomial.

    With ``symmetric`` only non-decreasing alpha are scanned; a rearranged
    alpha permutes the columns of ``a[:, alpha]`` and keeps n_alpha, so its
    coefficient vanishes together with the sorted one.
    """
    spec, n = S.spec, S.ambient_dim
    if S.dim == 0:
        # per of the empty matrix is 1, so {0} in F^0 is not permanull
        if n == 0:
            return PermanullVerdict(False, Method.POLYNOMIAL, (), Matrix.zeros(spec, 0, 0))
        return PermanullVerdict(True, Method.POLYNOMIAL)
    sf = standard_form(S)
    d, k = sf.codim, sf.dim
    a = np.asarray(sf.a_block, dtype=np.int64).reshape(d, k)
    if symmetric:
        alphas = itertools.combinations_with_replacement(range(k), d)
    else:
        alphas = itertools.product(range(k), repeat=d)
    while True:
        block = list(itertools.islice(alphas, 4096))
        if not block:
            return PermanullVerdict(True, Method.POLYNOMIAL)
        arr = np.array(block, dtype=np.int64).reshape(len(block), d)
        pers = per_many(spec, _alpha_matrices(a, arr))
        mult = np.array([n_alpha(al) % spec.p for al in block], dtype=np.int64)
        coeffs = spec.mul(pers, mult)
        hits = np.flatnonzero(np.atleast_1d(coeffs))
        if hits.size:
            alpha = tuple(int(j) for j in block[int(hits[0])])
            return PermanullVerdict(False, Method.POLYNOMIAL, alpha, _poly_witness(S, sf, alpha))


def _brute_columns(spec: FieldSpec, n: int, bases: Sequence[np.ndarray], budget: int):
    """First index tuple (lexicographic) whose column choice has nonzero permanent."""
    sizes = [b.shape[0] for b in bases]
    total = math.prod(sizes)
    if total > budget:
        raise BudgetExceededError(f"{total} column tuples exceed budget {budget}")
    if total == 0:
        return None
    tuples = itertools.product(*(range(s) for s in sizes))
    while True:
        block = list(itertools.islice(tuples, 8192))
        if not block:
            return None
        idx = np.array(block, dtype=np.int64).reshape(len(block), n)
        mats = np.stack([bases[i][idx[:, i]] for i in range(n)], axis=2)
        hits = np.flatnonzero(per_many(spec, mats))
        if hits.size:
            t = int(hits[0])
            return Matrix(spec, mats[t])


def is_permanull_brute(S: Subspace, budget: int = BRUTE_BUDGET) -> PermanullVerdict:
    """Permanull test by direct enumeration of all n-tuples of basis columns."""
    n = S.ambient_dim
    if n == 0:
        return PermanullVerdict(False, Method.BRUTE_FORCE, witness=Matrix.zeros(S.spec, 0, 0))
    w = _brute_columns(S.spec, n, [S.basis] * n, budget)
    return PermanullVerdict(w is None, Method.BRUTE_FORCE, witness=w)


def is_jointly_permanull_brute(spaces: Sequence[Subspace], budget: int = BRUTE_BUDGET) -> PermanullVerdict:
    """Joint test: column i ranges over the basis of ``spaces[i]``."""
    if not spaces:
        raise ValueError("need at least one subspace")
    spec, n = spaces[0].spec, spaces[0].ambient_dim
    if len(spaces) != n:
        raise ValueError(f"a list for F^{n} needs {n} subspaces, got {len(spaces)}")
    for s in spaces:
        if s.spec != spec or s.ambient_dim != n:
            raise ValueError("subspaces must share field and ambient dimension")
    w = _brute_columns(spec, n, [s.basis for s in spaces], budget)
    return PermanullVerdict(w is None, Method.BRUTE_FORCE, witness=w)


def is_trivial(S: Subspace) -> int | None:
    """Least coordinate (0-based) vanishing on all of S, or None."""
    zero_cols = np.flatnonzero(~S.basis.any(axis=0))
    if S.ambient_dim == 0 or zero_cols.size == 0:
        return None
    return int(zero_cols[0])


def sufficient_condition_check(S: Subspace) -> bool:
    """Permanull test of the span of the a_i inside F^d.

    A True answer implies S is permanull; False says nothing.
    """
    sf = standard_form(S)
    d = sf.codim
    s_hat = Subspace.from_rows(S.spec, np.asarray(sf.a_block).T.reshape(-1, d), d)
    return is_permanull_poly(s_hat).is_permanull


def puv_dimension(U: Subspace, V: Subspace) -> int:
    """Dimension of the span of ``per_3x2([u v])`` over u in U, v in V (F^3 only).

    Images are taken over basis vectors and pairwise sums of basis vectors on
    each side.
    """
    for s in (U, V):
        if s.ambient_dim != 3:
            raise ValueError(f"puv_dimension works in F^3, got ambient dimension {s.ambient_dim}")
        if s.dim < 2:
            raise ValueError("puv_dimension needs dim U, dim V >= 2")
    if U.spec != V.spec:
        raise ValueError("U and V must share a field")
    spec = U.spec

    def generators(s: Subspace) -> np.ndarray:
        sums = [spec.add(s.basis[i], s.basis[j]) for i, j in itertools.combinations(range(s.dim), 2)]
        return np.vstack([s.basis] + sums)

    us, vs = generators(U), generators(V)
    u = us[:, None, :]
    v = vs[None, :, :]
    images = []
    for skip in range(3):
        r, t = (i for i in range(3) if i != skip)
        images.append(spec.add(spec.mul(u[..., r], v[..., t]), spec.mul(u[..., t], v[..., r])))
    rows = np.stack(images, axis=-1).reshape(-1, 3)
    return Subspace.from_rows(spec, rows, 3).dim


# -- exhaustive verifiers --------------------------------------------------------


@dataclass
class VerificationReport:
    theorem: str
    params: dict
    total_enumerated: int = 0
    passing: int = 0
    violations: list = field(default_factory=list)
    findings: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {
            "theorem": self.theorem,
            "params": self.params,
            "total_enumerated": self.total_enumerated,
            "passing": self.passing,
            "violations": self.violations,
            "findings": self.findings,
            "ok": self.ok,
        }


def _basis_json(S: Subspace) -> list[list[int]]:
    return S.basis.tolist()


def _poly_flags(task) -> list[bool]:
    spec, n, dim, lo, hi = task
    subs = itertools.islice(enumerate_subspaces(spec, n, dim), lo, hi)
    return [is_permanull_poly(s).is_permanull for s in subs]


def _permanull_flags(spec: FieldSpec, n: int, dim: int, count: int, workers: int) -> list[bool]:
    tasks = [(spec, n, dim, lo, hi) for lo, hi in split_range(count, workers)]
    return [f for part in run_tasks(_poly_flags, tasks, workers) for f in part]


def verify_c1_classification(spec: FieldSpec, n: int, workers: int = 1) -> VerificationReport:
    """Check that the permanull hyperplanes of F^n are exactly the n coordinate ones."""
    report = VerificationReport("c1", {"q": spec.q, "n": n})
    hyperplanes = list(enumerate_subspaces(spec, n, n - 1))
    flags = _permanull_flags(spec, n, n - 1, len(hyperplanes), workers)
    coordinate = {coordinate_hyperplane(spec, n, i) for i in range(n)}
    report.total_enumerated = len(hyperplanes)
    report.passing = sum(flags)
    for s, flag in zip(hyperplanes, flags):
        if flag != (s in coordinate):
            report.violations.append({"basis": _basis_json(s), "permanull": flag})
    return report


def verify_char_threshold(spec: FieldSpec, n: int, d: int, workers: int = 1) -> VerificationReport:
    """Permanull versus trivial over every codimension-d subspace of F^n.

    When p > d + 1 the two must coincide.  Otherwise only 'trivial implies
    permanull' is enforced and nontrivial permanull subspaces are reported as
    findings.
    """
    if not 0 <= d <= n:
        raise ValueError(f"need 0 <= d <= n, got d={d}, n={n}")
    strict = spec.p > d + 1
    report = VerificationReport("charthreshold", {"q": spec.q, "n": n, "d": d, "strict": strict})
    subs = list(enumerate_subspaces(spec, n, n - d))
    flags = _permanull_flags(spec, n, n - d, len(subs), workers)
    report.total_enumerated = len(subs)
    report.passing = sum(flags)
    for s, flag in zip(subs, flags):
        trivial = is_trivial(s) is not None
        if flag == trivial:
            continue
        entry = {"basis": _basis_json(s), "permanull": flag, "trivial": trivial}
        if strict or trivial:
            report.violations.append(entry)
        else:
            report.findings.append(entry)
    return report


def manyfriends_options(spec: FieldSpec, n: int) -> list[Subspace]:
    """All subspaces of dimension >= n - 1: hyperplanes in enumeration order, then F^n."""
    return list(enumerate_subspaces(spec, n, n - 1)) + [Subspace.full(spec, n)]


def _padded_bases(options: Sequence[Subspace], n: int) -> np.ndarray:
    # a zero basis vector never changes a joint-vanishing verdict
    out = np.zeros((len(options), n, n), dtype=np.int64)
    for i, s in enumerate(options):
        out[i, : s.dim] = s.basis
    return out


def _joint_sweep(task) -> list[int]:
    """Flat indices (base len(options), lexicographic) of jointly permanull lists.

    The first position ranges over ``[lo, hi)``.  A subset recursion over used
    rows carries, for every prefix of options and every choice of basis
    vectors, the partial permanents on each row set; prefixes are shared by
    all their completions.
    """
    spec, vecs, lo, hi = task
    n_opts, n, _ = vecs.shape
    states = [[m for m in range(1 << n) if bin(m).count("1") == t] for t in range(n + 1)]
    index = [{m: i for i, m in enumerate(level)} for level in states]
    full = (1 << n) - 1

    d = np.ones((1, 1, 1), dtype=np.int64)  # (prefixes, vector choices, row sets)
    for t in range(1, n):
        v = vecs[lo:hi] if t == 1 else vecs
        p, j, _ = d.shape
        new = np.zeros((p, v.shape[0], j, n, len(states[t])), dtype=np.int64)
        for s, mask in enumerate(states[t]):
            acc = 0
            for r in range(n):
                if mask >> r & 1:
                    prev = d[:, None, :, None, index[t - 1][mask ^ (1 << r)]]
                    acc = spec.add(acc, spec.mul(prev, v[None, :, None, :, r]))
            new[..., s] = acc
        d = new.reshape(p * v.shape[0], j * n, len(states[t]))

    v = vecs[lo:hi] if n == 1 else vecs
    cols = [index[n - 1][full ^ (1 << r)] for r in range(n)]
    dm = d[:, :, cols]  # (P, J, n)
    vm = v.transpose(2, 0, 1).reshape(n, -1)  # (n, O*n)
    p, j, _ = dm.shape
    hits: list[int] = []
    chunk = max(1, (1 << 22) // max(1, j * vm.shape[1]))
    for s in range(0, p, chunk):
        block = dm[s : s + chunk].reshape(-1, n)
        if spec.m == 1:
            pers = np.fmod(block.astype(np.float64) @ vm.astype(np.float64), spec.p)
        else:
            pers = spec.sum(spec.mul(block[:, :, None], vm[None]), axis=1)
        bad = pers.reshape(-1, j, v.shape[0], n).any(axis=(1, 3))
        for pi, oi in zip(*np.nonzero(~bad)):
            hits.append(int((s + pi) * v.shape[0] + oi))
    offset = lo * n_opts ** (n - 1)
    return [offset + h for h in hits]


def jointly_permanull_lists(
    spec: FieldSpec, options: Sequence[Subspace], n: int, workers: int = 1, budget: int = LIST_BUDGET
) -> list[tuple[int, ...]]:
    """Every length-n list of option indices whose subspaces are jointly permanull."""
    total = len(options) ** n
    if total > budget:
        raise BudgetExceededError(f"{total} lists exceed budget {budget}")
    vecs = _padded_bases(options, n)
    tasks = [(spec, vecs, o, o + 1) for o in range(len(options))]
    flat = [h for part in run_tasks(_joint_sweep, tasks, workers) for h in part]
    out = []
    for h in sorted(flat):
        digits = []
        for _ in range(n):
            h, r = divmod(h, len(options))
            digits.append(r)
        out.append(tuple(reversed(digits)))
    return out


def _constant_trivial_lists(spec: FieldSpec, options: Sequence[Subspace], n: int) -> set[tuple[int, ...]]:
    pos = {s: i for i, s in enumerate(options)}
    return {(pos[coordinate_hyperplane(spec, n, i)],) * n for i in range(n)}


def verify_manyfriends(spec: FieldSpec, n: int, workers: int = 1, budget: int = LIST_BUDGET) -> VerificationReport:
    """Over all lists of subspaces of dimension >= n-1 (n >= 3), the jointly
    permanull ones must be exactly the n constant coordinate-hyperplane lists."""
    if n < 3:
        raise ValueError(f"the classification needs n >= 3, got n={n}")
    options = manyfriends_options(spec, n)
    report = VerificationReport("manyfriends", {"q": spec.q, "n": n})
    passing = jointly_permanull_lists(spec, options, n, workers, budget)
    expected = _constant_trivial_lists(spec, options, n)
    report.total_enumerated = len(options) ** n
    report.passing = len(passing)
    for lst in sorted(set(passing) ^ expected):
        report.violations.append(
            {"list": [_basis_json(options[i]) for i in lst], "jointly_permanull": lst in set(passing)}
        )
    return report


def manyfriends_counterexamples(spec: FieldSpec, n: int = 2, workers: int = 1) -> VerificationReport:
    """Jointly permanull lists that are not constant coordinate-hyperplane lists.

    Nothing is asserted: for n = 2 such lists exist and are reported as findings.
    """
    options = manyfriends_options(spec, n)
    report = VerificationReport("manyfriends-search", {"q": spec.q, "n": n})
    passing = jointly_permanull_lists(spec, options, n, workers)
    expected = _constant_trivial_lists(spec, options, n)
    report.total_enumerated = len(options) ** n
    report.passing = len(passing)
    report.findings = [[_basis_json(options[i]) for i in lst] for lst in passing if lst not in expected]
    return report
