"""Exact counts and seeded Monte-Carlo estimates of vanishing probabilities.

Monte-Carlo randomness is keyed by sample block, not by worker: block b of
``BLOCK`` consecutive samples is drawn from ``substream(seed, b)``.  Workers
receive contiguous runs of blocks, so hit counts do not depend on how many
workers there are.
"""

from __future__ import annotations

import csv
import enum
import itertools
import json
import math
import os
import time
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import BudgetExceededError
from .field import FieldSpec, field_from_order
from .linalg import Matrix, batch_rank
from .parallel import run_tasks, split_range
from .permanent import RYSER_BUDGET, per_many
from .rng import RNG_ID, substream
from .wellspread import Certificate, certify_full_prk

SCHEMA_VERSION = 1
BLOCK = 1024
EXACT_CELL_BUDGET = 3**16
CSV_COLUMNS = ("kind", "q", "n", "k", "samples", "hits", "estimate", "stderr", "seed")


class Kind(str, enum.Enum):
    MC_PER_ZERO = "MC_PER_ZERO"
    MC_DET_ZERO = "MC_DET_ZERO"
    MC_Z = "MC_Z"
    EXACT_PER_ZERO = "EXACT_PER_ZERO"
    EXACT_Z = "EXACT_Z"
    EXACT_PRK_DEFICIENT = "EXACT_PRK_DEFICIENT"

    @property
    def is_exact(self) -> bool:
        return self.value.startswith("EXACT")


# -- closed forms ----------------------------------------------------------------


def det_zero_probability_exact(q: int, n: int) -> Fraction:
    """``1 - prod_{i<n} (1 - q^i / q^n)``: chance a uniform n x n matrix is singular."""
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    prod = Fraction(1)
    for i in range(n):
        prod *= 1 - Fraction(q**i, q**n)
    return 1 - prod


def sc0_probability_exact(q: int, n: int, k: int) -> Fraction:
    """``1 - (1 - q^-n)^k``: chance a uniform n x k matrix has a zero column."""
    return 1 - (1 - Fraction(1, q**n)) ** k


# -- records ---------------------------------------------------------------------


@dataclass
class ExperimentRecord:
    kind: Kind
    q: int
    n: int
    k: int
    samples: int
    hits: int
    seed: int | None = None
    rng_id: str | None = None
    workers: int = 1
    wall_time_ms: int = 0
    methods: dict = field(default_factory=dict)

    @property
    def total(self) -> int:
        return self.samples

    @property
    def estimate(self) -> Fraction:
        return Fraction(self.hits, self.samples)

    @property
    def stderr(self) -> float | None:
        if self.kind.is_exact:
            return None
        p = self.hits / self.samples
        return math.sqrt(p * (1 - p) / self.samples)

    def to_json(self) -> dict:
        out = {"v": SCHEMA_VERSION, "kind": self.kind.value, "q": self.q, "n": self.n, "k": self.k}
        out["total" if self.kind.is_exact else "samples"] = self.samples
        est = self.estimate
        out.update(
            hits=self.hits,
            estimate=f"{est.numerator}/{est.denominator}",
            estimate_decimal=float(est),
            stderr=self.stderr,
            seed=self.seed,
            rng_id=self.rng_id,
            workers=self.workers,
            wall_time_ms=self.wall_time_ms,
            methods=dict(self.methods),
        )
        return out

    def csv_row(self) -> list:
        err = self.stderr
        return [
            self.kind.value,
            self.q,
            self.n,
            self.k,
            self.samples,
            self.hits,
            f"{float(self.estimate):.10g}",
            "" if err is None else f"{err:.10g}",
            "" if self.seed is None else self.seed,
        ]


def append_jsonl(path: str, record: ExperimentRecord) -> None:
    with open(path, "a") as fh:
        fh.write(json.dumps(record.to_json(), sort_keys=True) + "\n")


def append_csv(path: str, record: ExperimentRecord) -> None:
    fresh = not os.path.exists(path) or os.path.getsize(path) == 0
    with open(path, "a", newline="") as fh:
        w = csv.writer(fh)
        if fresh:
            w.writerow(CSV_COLUMNS)
        w.writerow(record.csv_row())


# -- exhaustive counts -------------------------------------------------------------


def _index_matrices(q: int, lo: int, hi: int, n: int, k: int) -> np.ndarray:
    # matrix number t has cell c (row-major) equal to base-q digit c of t, least significant first
    idx = np.arange(lo, hi, dtype=np.int64)
    powers = np.int64(q) ** np.arange(n * k, dtype=np.int64)
    return ((idx[:, None] // powers[None, :]) % q).reshape(-1, n, k)


def _deficient_mask(spec: FieldSpec, mats: np.ndarray) -> np.ndarray:
    """True where every k x k subpermanent of the n x k matrix vanishes."""
    b, n, k = mats.shape
    if k > n:
        return np.ones(b, dtype=bool)
    full = np.zeros(b, dtype=bool)
    for rows in itertools.combinations(range(n), k):
        todo = np.flatnonzero(~full)
        if todo.size == 0:
            break
        full[todo] |= per_many(spec, mats[todo][:, list(rows)]) != 0
    return ~full


def _count_chunk(task) -> int:
    spec, kind, n, k, lo, hi = task
    hits = 0
    for s in range(lo, hi, 1 << 15):
        mats = _index_matrices(spec.q, s, min(hi, s + (1 << 15)), n, k)
        if kind is Kind.EXACT_PER_ZERO:
            hits += int(np.count_nonzero(per_many(spec, mats) == 0))
        else:
            hits += int(np.count_nonzero(_deficient_mask(spec, mats)))
    return hits


def _exact_count(kind: Kind, q: int, n: int, k: int, workers: int, budget: int) -> ExperimentRecord:
    spec = field_from_order(q)
    total = q ** (n * k)
    if total > budget:
        raise BudgetExceededError(f"exhaustive count over {q}^{n * k} matrices exceeds budget {budget}")
    start = time.perf_counter()
    tasks = [(spec, kind, n, k, lo, hi) for lo, hi in split_range(total, workers)]
    hits = sum(run_tasks(_count_chunk, tasks, workers))
    ms = int((time.perf_counter() - start) * 1000)
    return ExperimentRecord(kind, q, n, k, total, hits, workers=workers, wall_time_ms=ms)


def exact_count_per_zero(q: int, n: int, workers: int = 1, budget: int = EXACT_CELL_BUDGET) -> ExperimentRecord:
    """Number of n x n matrices over GF(q) with zero permanent."""
    return _exact_count(Kind.EXACT_PER_ZERO, q, n, n, workers, budget)


def exact_count_prk_deficient(
    q: int, n: int, k: int, workers: int = 1, budget: int = EXACT_CELL_BUDGET, kind: Kind = Kind.EXACT_PRK_DEFICIENT
) -> ExperimentRecord:
    """Number of n x k matrices over GF(q) with prk < k (every k x k subpermanent zero)."""
    if kind not in (Kind.EXACT_PRK_DEFICIENT, Kind.EXACT_Z):
        raise ValueError(f"not a deficiency kind: {kind}")
    return _exact_count(kind, q, n, k, workers, budget)


@dataclass(frozen=True)
class CofactorCheck:
    q: int
    n: int
    per_zero: Fraction
    prk_deficient: Fraction

    @property
    def rhs(self) -> Fraction:
        return Fraction(1, self.q) + (1 - Fraction(1, self.q)) * self.prk_deficient

    @property
    def holds(self) -> bool:
        return self.per_zero == self.rhs

    def to_json(self) -> dict:
        return {
            "q": self.q,
            "n": self.n,
            "per_zero": str(self.per_zero),
            "prk_deficient": str(self.prk_deficient),
            "rhs": str(self.rhs),
            "holds": self.holds,
        }


def cofactor_identity_check(q: int, n: int, workers: int = 1, budget: int = EXACT_CELL_BUDGET) -> CofactorCheck:
    """Compare Pr[per A = 0] with 1/q + (1 - 1/q) Pr[prk B < n - 1], both counted exhaustively."""
    a = exact_count_per_zero(q, n, workers, budget)
    b = exact_count_prk_deficient(q, n, n - 1, workers, budget)
    return CofactorCheck(q, n, a.estimate, b.estimate)


# -- Monte Carlo ---------------------------------------------------------------------


def _mc_blocks(task) -> tuple[int, Counter]:
    spec, kind, n, k, samples, seed, b_lo, b_hi = task
    hits = 0
    methods: Counter = Counter()
    for b in range(b_lo, b_hi):
        count = min(BLOCK, samples - b * BLOCK)
        mats = substream(seed, b).integers(0, spec.q, size=(count, n, k), dtype=np.int64)
        if kind is Kind.MC_PER_ZERO:
            hits += int(np.count_nonzero(per_many(spec, mats) == 0))
            methods["ryser"] += count
        elif kind is Kind.MC_DET_ZERO:
            hits += int(np.count_nonzero(batch_rank(spec, mats) < n))
            methods["rank"] += count
        else:
            # certificate first; whatever it leaves open is searched in one batch
            pending = []
            for i, a in enumerate(mats):
                if k >= 3:
                    verdict = certify_full_prk(Matrix(spec, a))
                    if verdict is Certificate.CERTIFIED_FULL:
                        methods["certificate"] += 1
                        continue
                    if verdict is Certificate.ZERO_COLUMN:
                        methods["zero_column"] += 1
                        hits += 1
                        continue
                pending.append(i)
            if pending:
                methods["search"] += len(pending)
                hits += int(np.count_nonzero(_deficient_mask(spec, mats[pending])))
    return hits, methods


def mc_estimate(
    kind: Kind | str,
    q: int,
    n: int,
    k: int | None = None,
    samples: int = 10_000,
    seed: int = 0,
    workers: int = 1,
) -> ExperimentRecord:
    """Monte-Carlo frequency of the event ``kind`` over uniform random matrices.

    MC_PER_ZERO and MC_DET_ZERO use square n x n matrices (k is ignored);
    MC_Z uses n x k matrices, certified by the greedy partition when k >= 3
    and searched directly otherwise.
    """
    kind = Kind(kind)
    if kind.is_exact:
        raise ValueError(f"{kind.value} is not a Monte-Carlo kind")
    if samples < 1:
        raise ValueError("need at least one sample")
    spec = field_from_order(q)
    if kind is Kind.MC_Z:
        if k is None or k < 1 or n < k:
            raise ValueError(f"MC_Z needs 1 <= k <= n, got n={n}, k={k}")
    else:
        if kind is Kind.MC_PER_ZERO and n > RYSER_BUDGET:
            raise BudgetExceededError(f"Ryser permanent limited to n <= {RYSER_BUDGET}, got n={n}")
        k = n
    start = time.perf_counter()
    n_blocks = -(-samples // BLOCK)
    tasks = [(spec, kind, n, k, samples, seed, lo, hi) for lo, hi in split_range(n_blocks, workers)]
    hits = 0
    methods: Counter = Counter()
    for h, m in run_tasks(_mc_blocks, tasks, workers):
        hits += h
        methods.update(m)
    ms = int((time.perf_counter() - start) * 1000)
    return ExperimentRecord(
        kind, q, n, k, samples, hits, seed=seed, rng_id=RNG_ID, workers=workers,
        wall_time_ms=ms, methods=dict(sorted(methods.items())),
    )


def run_exact(kind: Kind | str, q: int, n: int, k: int | None = None, workers: int = 1) -> ExperimentRecord:
    """Dispatch an EXACT_* kind."""
    kind = Kind(kind)
    if kind is Kind.EXACT_PER_ZERO:
        return exact_count_per_zero(q, n, workers)
    if kind.is_exact:
        if k is None:
            raise ValueError(f"{kind.value} needs k")
        return exact_count_prk_deficient(q, n, k, workers, kind=kind)
    raise ValueError(f"{kind.value} is not an exact kind")
