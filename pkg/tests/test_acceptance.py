"""Acceptance suite: one check per criterion, one PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py -s`` to see the lines, or execute
this file directly.
"""

import random
import sys

import pytest

from qbailey import catalogue as C
from qbailey import partitions as P
from qbailey import qdsl
from qbailey.bailey import (
    chain_step,
    lemma2_contract,
    limiting_conjugate,
    prop1_transform,
    product_two_fold,
    verify_conjugate_pair,
    verify_pair,
    verify_symmetric_pair,
    verify_two_fold_lemma,
)
from qbailey.series import (
    QMonomial,
    euler_product,
    first_difference,
    from_coeffs,
    invert,
    monomial,
    one,
    pochhammer,
)


def same(a, b, T):
    return first_difference(a, b, T) is None


def passes_grid(identity_id, grid, T):
    return all(C.run(C.build(identity_id, params, T)).passed for params in grid)


def euler_identity():
    task = C.build("EULER", {}, 80)
    assert C.run(task).passed
    lhs = task.sides[0](80)
    assert [lhs.coeff(n) for n in range(41)] == [P.p(n) for n in range(41)]


def pentagonal_cube():
    for T in (20, 40, 60):
        report = C.run(C.build("E8_PENTA_CUBE", {}, T))
        assert report.passed, report.summary()
        K0 = report.detail["K0"]
        target = C.penta_cube(T)
        for K in range(K0, K0 + 40):
            assert same(C.penta_partial_sum(K, T), target, T), (T, K)


def reciprocal_pair_check():
    for M in range(1, 9):
        assert verify_pair(C.reciprocal_pair(M), 8, 60).passed, M
    assert passes_grid("QCHU", [{"N": N, "M": M} for N in range(7) for M in range(9)], 40)


def spt_star_corollary():
    assert passes_grid("C4_SPT", [{"M": M} for M in range(1, 7)], 50)
    for M in range(1, 7):
        lhs = C.spt_star_series(M, 25)
        assert [lhs.coeff(n) for n in range(1, 26)] == [P.spt_star(M, n) for n in range(1, 26)]
    d = C.divisor_series(25)
    assert [d.coeff(N) for N in range(1, 26)] == [P.sigma(N) for N in range(1, 26)]


def spt_relation():
    for n in range(1, 26):
        assert P.spt(n) == n * P.p(n) - P.second_moment(n)
    assert P.spt(2) != 2 * P.p(2) - P.raw_second_moment(2)


def spt_star_pair_check():
    p = C.spt_star_pair()
    assert p.alpha(0, 50) == C.divisor_series(50)
    assert verify_pair(p, 6, 50).passed


def joshi_vyas_conjugate():
    cp = C.joshi_vyas_conjugate()
    assert cp.delta(0, 50).is_zero()
    assert verify_conjugate_pair(cp, 6, 50).passed


def theta_transform():
    for cp in (limiting_conjugate(), C.joshi_vyas_conjugate()):
        p = prop1_transform(cp)
        assert p.kernel.m == 1
        assert verify_pair(p, 6, 40).passed, cp.name


def two_fold_contraction():
    cp = limiting_conjugate()
    tf = product_two_fold(C.reciprocal_pair(1), C.reciprocal_pair(2))
    assert verify_pair(lemma2_contract(tf, cp), 5, 40).passed
    assert verify_two_fold_lemma(tf, cp, cp, 30).passed


def symmetric_pair():
    p = C.symmetric_pair()
    assert verify_symmetric_pair(p, 5, 40).passed
    assert p.alpha_at(-1, 40).is_zero()
    assert p.alpha_at(1, 40) == monomial(-1, 0).with_order(40)


def durfee_corollary():
    assert passes_grid("C6_DURFEE", [{"k": k, "M": M} for k in (1, 2, 3) for M in range(6)], 40)
    for k in (1, 2, 3):
        for M in range(5):
            target = C.chain_pair(k, M)
            assert verify_pair(target, 5, 40).passed, (k, M)
            it = C.alt_qchu_pair(M)
            for _ in range(k):
                it = chain_step(it)
            for n in range(6):
                assert same(it.alpha(n, 40), target.alpha(n, 40), 40)
                assert same(it.beta(n, 40), target.beta(n, 40), 40)
    for M in range(6):
        assert same(C.durfee_corollary_lhs(2, M, 40), C.single_sum_durfee(M, 40), 40)


def split_identity():
    assert passes_grid("E29_SPLIT", [{"n": n, "M": M} for n in range(11) for M in range(7)], 40)


def durfee_refinement():
    assert passes_grid("A23_DURFEE", [{"k": k, "m": m} for k in (2, 3, 4) for m in range(4)], 40)
    task = C.build("A23_DURFEE", {"k": 2, "m": 1}, 40)
    assert task.sides[0](40).coeff(4) == task.sides[1](40).coeff(4) == 2


def dsl_equivalence():
    T = 30
    manifest = qdsl.parse_manifest(qdsl.shipped_manifest_text())
    cases = [
        ("EULER", {}, "EULER", {}),
        ("C4_SPT", {"M": 2}, "C4_SPT", {"M": 2}),
        ("C6_DURFEE_K2", {"k": 2, "M": 1}, "C6_DURFEE", {"k": 2, "M": 1}),
        ("E29_SPLIT", {"n": 4, "M": 2}, "E29_SPLIT", {"n": 4, "M": 2}),
    ]
    for name, params, cid, cparams in cases:
        check = manifest.check(name)
        task = C.build(cid, cparams, T)
        assert same(qdsl.evaluate(check.lhs, params, T), task.sides[0](T), T), name
        assert same(qdsl.evaluate(check.rhs, params, T), task.sides[-1](T), T), name


def property_suites():
    rng = random.Random(20240)
    T = 15

    def rand_series():
        lo = rng.randint(-2, 3)
        return from_coeffs([rng.randint(-20, 20) for _ in range(rng.randint(0, T + 1))], order=T, min_exp=lo)

    def eq(x, y):
        return x.agrees_with(y, min(x.order, y.order))

    for _ in range(200):
        a, b, c = rand_series(), rand_series(), rand_series()
        assert eq((a + b) + c, a + (b + c)) and eq(a + b, b + a)
        assert eq((a * b) * c, a * (b * c)) and eq(a * b, b * a)
        assert eq(a * (b + c), a * b + a * c)
        # truncation coherence on power series
        t = rng.randint(0, 12)
        pa, pb = a.shift(max(0, -a.min_exp)), b.shift(max(0, -b.min_exp))
        assert (pa * pb).truncate(t) == (pa.truncate(t) * pb.truncate(t)).truncate(t)
        s = from_coeffs([rng.choice([1, -1])] + [rng.randint(-9, 9) for _ in range(8)], order=T)
        assert (s * invert(s)).agrees_with(one(), T)
    for x in (QMonomial(1, 1), QMonomial(-1, 1), QMonomial(1, 2)):
        for n in range(13):
            assert pochhammer(x, n + 1) == pochhammer(x, n) * (one() - monomial(x.coeff, x.exp + n))
    assert invert(euler_product(40)) == P.gf_from_stat("p", 40)
    for n in range(1, 26):
        table = P.rank_counts(n)
        assert sum(table.counts.values()) == P.p(n)
        assert all(table.counts.get(-r) == c for r, c in table.counts.items())


CRITERIA = [
    (1, "Euler identity to q^80, coefficients p(n) for n <= 40", euler_identity),
    (2, "triple sum equals (q)_inf^3 to q^60 for every K >= K0", pentagonal_cube),
    (3, "reciprocal pair (M <= 8, n <= 8, T = 60) and q-Chu-Vandermonde sums", reciprocal_pair_check),
    (4, "spt* generating function (M <= 6, T = 50) against enumeration and sigma", spt_star_corollary),
    (5, "spt(n) = n p(n) - N2(n) for n <= 25; raw moment fails at n = 2", spt_relation),
    (6, "spt* pair at T = 50, n <= 6", spt_star_pair_check),
    (7, "Joshi-Vyas conjugate pair, |n| <= 6, T = 50", joshi_vyas_conjugate),
    (8, "theta transform of both conjugate pairs to a = q, N <= 6, T = 40", theta_transform),
    (9, "2-fold contraction and the 2-fold lemma", two_fold_contraction),
    (10, "symmetric pair n <= 5 with A_-1 = 0, A_1 = -1", symmetric_pair),
    (11, "Durfee corollary grid, k-fold pair, chain iterates, single-sum reduction", durfee_corollary),
    (12, "splitting identity n <= 10, M <= 6", split_identity),
    (13, "Durfee refinement k in {2,3,4}, z = q^m, m <= 3", durfee_refinement),
    (14, "manifest evaluation equals catalogue series at T = 30", dsl_equivalence),
    (15, "ring axioms, Pochhammer recurrence, truncation, rank symmetry", property_suites),
]


def check(number, title, fn):
    try:
        fn()
    except AssertionError:
        print(f"criterion {number:2d}: FAIL  {title}")
        raise
    print(f"criterion {number:2d}: PASS  {title}")


@pytest.mark.parametrize("number, title, fn", CRITERIA, ids=[f"criterion_{n:02d}" for n, _, _ in CRITERIA])
def test_criterion(number, title, fn):
    check(number, title, fn)


if __name__ == "__main__":
    failed = 0
    for number, title, fn in CRITERIA:
        try:
            check(number, title, fn)
        except AssertionError:
            failed += 1
    sys.exit(1 if failed else 0)
