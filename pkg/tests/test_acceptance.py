"""One block of tests per acceptance criterion; a summary line per criterion is printed at the end."""

import itertools
import math
import time
from fractions import Fraction

import numpy as np
import pytest

from permrank.experiments import (
    Kind,
    cofactor_identity_check,
    det_zero_probability_exact,
    exact_count_per_zero,
    exact_count_prk_deficient,
    mc_estimate,
)
from permrank.field import field_from_order, field_new
from permrank.linalg import Matrix, Subspace, enumerate_subspaces
from permrank.parallel import default_workers
from permrank.permanent import has_full_prk, per_naive, per_ryser
from permrank.permanull import (
    coefficient,
    is_permanull_brute,
    is_permanull_poly,
    is_trivial,
    manyfriends_counterexamples,
    permanental_matrix,
    polynomial_value,
    verify_c1_classification,
    verify_char_threshold,
    verify_manyfriends,
)
from permrank.wellspread import (
    BipartiteGraph,
    Certificate,
    certify_full_prk,
    satisfies_r1,
    satisfies_r2,
    star_avoid,
)

from oracles import census_prk_deficient_nx2, gaussian_binomial, per_mod, singular_by_search

criterion = pytest.mark.criterion
EXAMPLE = [[1, 1, 1, 0], [0, 0, 0, 1], [1, 1, 1, 1], [1, 1, 1, -1]]


class Timer:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.seconds = time.perf_counter() - self.start


# -- 1 -------------------------------------------------------------------------------


@criterion(1, "Ryser equals the permutation sum (random n <= 8 over GF(3), GF(5), GF(9); all 2x2 over GF(3))")
def test_c01_ryser_matches_naive():
    rng = np.random.default_rng(20260101)
    with Timer() as t:
        for q in (3, 5, 9):
            F = field_from_order(q)
            for n in range(1, 9):
                for _ in range(500):
                    A = Matrix(F, rng.integers(0, q, size=(n, n)))
                    assert per_ryser(A) == per_naive(A)
        F3 = field_new(3)
        for cells in itertools.product(range(3), repeat=4):
            A = Matrix(F3, np.array(cells).reshape(2, 2))
            assert int(per_ryser(A)) == int(per_naive(A)) == per_mod([cells[:2], cells[2:]], 3)
    assert t.seconds < 30


# -- 2 -------------------------------------------------------------------------------


@criterion(2, "permanent values: 4x4 example, 2x2 block, 3x3 family")
def test_c02_example_matrix():
    assert int(per_ryser(Matrix.of(field_new(7), EXAMPLE))) == 6
    assert int(per_ryser(Matrix.of(field_new(3), EXAMPLE))) == 0


@criterion(2, "permanent values: 4x4 example, 2x2 block, 3x3 family")
def test_c02_two_by_two_block():
    for p in (3, 5, 7, 11):
        F = field_new(p)
        assert per_ryser(Matrix.of(F, [[1, 1], [-1, -1]])) == F(-2)


@criterion(2, "permanent values: 4x4 example, 2x2 block, 3x3 family")
def test_c02_three_by_three_family():
    F = field_new(7)
    rng = np.random.default_rng(7)
    for _ in range(20):
        alpha, lam, mu = (int(x) for x in rng.integers(0, 7, size=3))
        A = Matrix.of(F, [[lam, 0, 0], [-alpha, mu, mu], [0, -lam, -lam]])
        assert per_ryser(A) == F(-2) * F(mu) * F(lam) ** 2


# -- 3 -------------------------------------------------------------------------------


@criterion(3, "exact census of zero permanents and the cofactor identity")
def test_c03_census_and_cofactor_identity():
    with Timer() as t:
        r = exact_count_per_zero(3, 2)
        pers = sum(per_mod([c[:2], c[2:]], 3) == 0 for c in itertools.product(range(3), repeat=4))
        dets = sum(singular_by_search([c[:2], c[2:]], 3) for c in itertools.product(range(3), repeat=4))
        assert r.hits == pers == dets == 33
        for q, n in ((3, 2), (3, 3), (5, 2)):
            check = cofactor_identity_check(q, n)
            assert check.holds, check.to_json()
            # the right-hand side rebuilt from an independent count
            cells = itertools.product(range(q), repeat=n * (n - 1))
            deficient = 0
            for c in cells:
                rows = [c[i * (n - 1) : (i + 1) * (n - 1)] for i in range(n)]
                deficient += all(
                    per_mod([rows[i] for i in sub], q) == 0 for sub in itertools.combinations(range(n), n - 1)
                )
            assert check.prk_deficient == Fraction(deficient, q ** (n * (n - 1)))
    assert t.seconds < 120


# -- 4 -------------------------------------------------------------------------------


@criterion(4, "n x 2 deficiency counts equal the three-case formula")
def test_c04_three_case_census():
    for n in (2, 3, 4):
        counted = exact_count_prk_deficient(3, n, 2).hits
        assert counted == census_prk_deficient_nx2(3, n), (n, counted)
        brute = 0
        for cells in itertools.product(range(3), repeat=2 * n):
            rows = [cells[2 * i : 2 * i + 2] for i in range(n)]
            brute += all(per_mod([rows[i], rows[j]], 3) == 0 for i, j in itertools.combinations(range(n), 2))
        assert brute == counted


# -- 5 -------------------------------------------------------------------------------


@criterion(5, "permanull hyperplanes are exactly the coordinate hyperplanes")
def test_c05_hyperplane_classification():
    with Timer() as t:
        for q, n in ((3, 3), (3, 4), (5, 3)):
            r = verify_c1_classification(field_from_order(q), n, workers=default_workers())
            assert r.ok, r.violations
            assert r.total_enumerated == (q**n - 1) // (q - 1) and r.passing == n
    assert t.seconds < 60


# -- 6 -------------------------------------------------------------------------------


@criterion(6, "jointly permanull lists of large subspaces are the constant coordinate ones; n = 2 fails")
def test_c06_many_friends():
    with Timer() as t:
        for q, n, total in ((3, 3, 14**3), (5, 3, 32**3), (3, 4, 41**4)):
            r = verify_manyfriends(field_from_order(q), n, workers=default_workers())
            assert r.ok, r.violations[:5]
            assert (r.total_enumerated, r.passing) == (total, n)
    assert t.seconds < 600


@criterion(6, "jointly permanull lists of large subspaces are the constant coordinate ones; n = 2 fails")
def test_c06_two_dimensional_counterexample():
    r = manyfriends_counterexamples(field_new(3), 2)
    pairs = [[Subspace.from_rows(field_new(3), b, 2) for b in f] for f in r.findings]
    assert any(all(is_trivial(s) is None for s in pair) for pair in pairs)


# -- 7 -------------------------------------------------------------------------------


@criterion(7, "coefficient test agrees with brute force on all subspaces of F_3^n, n <= 4; example verdicts")
def test_c07_poly_matches_brute_everywhere():
    F = field_new(3)
    with Timer() as t:
        count = 0
        for n in range(1, 5):
            for dim in range(n + 1):
                for S in enumerate_subspaces(F, n, dim):
                    assert is_permanull_poly(S).is_permanull == is_permanull_brute(S).is_permanull
                    count += 1
        # 2 + 5 + 28 + 212 subspaces
        assert count == sum(gaussian_binomial(n, d, 3) for n in range(1, 5) for d in range(n + 1))
    assert t.seconds < 300


@criterion(7, "coefficient test agrees with brute force on all subspaces of F_3^n, n <= 4; example verdicts")
def test_c07_example_verdicts():
    rows = [[1, 0, 1, 1], [0, 1, 1, -1]]
    F3, F5 = field_new(3), field_new(5)
    assert is_permanull_poly(Subspace.from_rows(F3, F3.encode(rows), 4))
    v = is_permanull_poly(Subspace.from_rows(F5, F5.encode(rows), 4))
    # first basis vector repeated: the (1, 1) monomial in 1-based labels
    assert not v and v.alpha == (0, 0) and int(per_ryser(v.witness)) != 0


# -- 8 -------------------------------------------------------------------------------


@criterion(8, "term-by-term polynomial equals the block-matrix permanent; multiplicity patterns")
def test_c08_polynomial_identity():
    F = field_new(11)
    rng = np.random.default_rng(8)
    for d, k in ((2, 3), (3, 3)):
        a = rng.integers(0, 11, size=(d, k))
        for _ in range(100):
            xs = rng.integers(0, 11, size=(d, k))
            assert per_ryser(permanental_matrix(F, a, xs)) == polynomial_value(F, a, xs)


@criterion(8, "term-by-term polynomial equals the block-matrix permanent; multiplicity patterns")
def test_c08_multiplicity_patterns():
    F = field_new(11)
    rng = np.random.default_rng(9)
    a = rng.integers(1, 11, size=(2, 3))
    for i in range(3):
        assert int(coefficient(F, (i, i), a)) == 6 * a[0, i] * a[1, i] % 11
    for i, j in itertools.permutations(range(3), 2):
        assert int(coefficient(F, (i, j), a)) == 4 * per_mod(a[:, [i, j]].tolist(), 11) % 11
    a = rng.integers(1, 11, size=(3, 3))
    for alpha in itertools.product(range(3), repeat=3):
        mult = {1: 4, 2: 6, 3: 8}[len(set(alpha))]
        assert int(coefficient(F, alpha, a)) == mult * per_mod(a[:, list(alpha)].tolist(), 11) % 11


# -- 9 -------------------------------------------------------------------------------


@criterion(9, "above the characteristic threshold permanull equals trivial (GF(5), n = 4, d = 2)")
def test_c09_char_threshold():
    r = verify_char_threshold(field_new(5), 4, 2, workers=default_workers())
    assert r.ok and r.params["strict"]
    assert r.total_enumerated == 806 == gaussian_binomial(4, 2, 5)


# -- 10 ------------------------------------------------------------------------------


@criterion(10, "star avoidance keeps R1 and R2 on every valid 4 x 4 bipartite graph")
def test_c10_star_avoid_exhaustive():
    with Timer() as t:
        valid = 0
        for bits in range(1 << 16):
            adj = np.array([(bits >> i) & 1 for i in range(16)], dtype=bool).reshape(4, 4)
            if not (adj.any(axis=0).all() and adj.any(axis=1).all()):
                continue
            G = BipartiteGraph.from_biadjacency(adj)
            a, b = star_avoid(G)
            assert satisfies_r1(G, a, b) and satisfies_r2(G, a, b), sorted(G.edges)
            valid += 1
        # inclusion-exclusion count of 4 x 4 biadjacency matrices with no zero row or column
        want = sum((-1) ** (i + j) * math.comb(4, i) * math.comb(4, j) * 2 ** ((4 - i) * (4 - j)) for i in range(5) for j in range(5))
        assert valid == want
    assert t.seconds < 60


# -- 11 ------------------------------------------------------------------------------


@criterion(11, "partition certificate is sound and succeeds on > 99% of tall random matrices")
def test_c11_certificate_soundness():
    rng = np.random.default_rng(11)
    certified = 0
    trials = 10_000
    for _ in range(trials):
        n = int(rng.integers(20, 41))
        k = int(rng.choice([3, 4]))
        q = int(rng.choice([3, 5]))
        X = Matrix(field_from_order(q), rng.integers(0, q, size=(n, k)))
        if certify_full_prk(X) is Certificate.CERTIFIED_FULL:
            certified += 1
            assert has_full_prk(X)
    assert certified / trials > 0.99


# -- 12 ------------------------------------------------------------------------------


@criterion(12, "Monte-Carlo estimates agree with exact values and bounds")
def test_c12_monte_carlo_calibration():
    workers = default_workers()
    with Timer() as t:
        r = mc_estimate(Kind.MC_DET_ZERO, 3, 10, samples=100_000, seed=12, workers=workers)
        assert abs(float(r.estimate) - float(det_zero_probability_exact(3, 10))) <= 3 * r.stderr
        r = mc_estimate(Kind.MC_PER_ZERO, 3, 2, samples=100_000, seed=12, workers=workers)
        assert abs(float(r.estimate) - 33 / 81) <= 3 * r.stderr
        r = mc_estimate(Kind.MC_PER_ZERO, 3, 14, samples=10_000, seed=12, workers=workers)
        est = float(r.estimate)
        assert 1 / 3 - 3 * r.stderr <= est <= float(det_zero_probability_exact(3, 14)) + 3 * r.stderr
    assert t.seconds < 300


# -- 13 ------------------------------------------------------------------------------


@criterion(13, "hit counts do not depend on the number of workers")
def test_c13_worker_independence():
    cases = [
        (Kind.MC_PER_ZERO, 3, 6, None, 5000),
        (Kind.MC_DET_ZERO, 5, 8, None, 5000),
        (Kind.MC_Z, 3, 8, 3, 3000),
        (Kind.MC_Z, 5, 4, 2, 3000),
    ]
    for kind, q, n, k, samples in cases:
        hits = {w: mc_estimate(kind, q, n, k, samples=samples, seed=13, workers=w).hits for w in (1, 2, 8)}
        assert len(set(hits.values())) == 1, (kind, hits)
    exact = {w: exact_count_per_zero(3, 3, workers=w).hits for w in (1, 2, 8)}
    assert len(set(exact.values())) == 1
