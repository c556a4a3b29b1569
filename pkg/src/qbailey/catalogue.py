"""Registry of the checkable identities and the Bailey pairs they rest on.

Each registry entry compiles, for given parameters and order T, to a
:class:`Task`; :func:`run` executes a task and returns a VerificationReport.
"""

from __future__ import annotations

import time
from collections import defaultdict
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Callable, Optional

from . import bailey
from .bailey import BaileyKernel, BaileyPair, ConjugatePair, memoized
from .report import FAIL, PASS, TRUNCATION_FAILURE, Mismatch, TruncationFailure, VerificationReport
from .series import (
    INFINITE,
    QMonomial,
    QSeries,
    euler_product,
    first_difference,
    from_terms,
    inv_qpoch,
    invert,
    monomial,
    one,
    pochhammer,
    qpoch,
    zero,
)

SERIES = "series-equality"
PAIR = "pair-check"
SYMMETRIC = "symmetric-pair-check"
CONJUGATE = "conjugate-check"


class BadParams(ValueError):
    pass


class UnknownIdentity(KeyError):
    pass


# -- shared pieces -------------------------------------------------------------


@lru_cache(maxsize=None)
def _inv_euler(T: int) -> QSeries:
    return invert(euler_product(T))


def _inv_one_minus_qn(n: int, T: int) -> QSeries:
    return invert(one() - monomial(1, n), order=T)


def divisor_series(T: int) -> QSeries:
    """sum_{n>=1} n q^n / (1 - q^n)."""
    total = zero(T)
    for n in range(1, T + 1):
        total = total + monomial(n, n) * _inv_one_minus_qn(n, T - n)
    return total.with_order(T)


def _qchu_alpha(M: int, n: int, T: int, quad: int) -> QSeries:
    """(q)_M (-1)^n (1+q^n) q^quad / ((q)_{M-n} (q)_{M+n}) for n > 0, 1/(q)_M at n = 0."""
    if n == 0:
        return inv_qpoch(M, T)
    if n > M or quad > T:
        return zero(T)
    num = qpoch(M) * (one() + monomial(1, n)) * monomial((-1) ** n, quad)
    return (num * inv_qpoch(M - n, T) * inv_qpoch(M + n, T)).with_order(T)


# -- Bailey pairs ------------------------------------------------------------


def reciprocal_pair(M: int) -> BaileyPair:
    """alpha_n with q^(n(3n-1)/2), beta_n = 1/((q)_n (q)_(n+M)), relative to a = 1."""

    @memoized
    def alpha(n: int, T: int) -> QSeries:
        return _qchu_alpha(M, n, T, n * (3 * n - 1) // 2)

    @memoized
    def beta(n: int, T: int) -> QSeries:
        return (inv_qpoch(n, T) * inv_qpoch(n + M, T)).with_order(T)

    return BaileyPair(BaileyKernel(0), alpha, beta, name=f"reciprocal(M={M})")


def alt_qchu_pair(M: int) -> BaileyPair:
    """alpha_n with q^(n(n-1)/2), beta_n = q^(nM)/((q)_n (q)_(n+M)), relative to a = 1."""

    @memoized
    def alpha(n: int, T: int) -> QSeries:
        return _qchu_alpha(M, n, T, n * (n - 1) // 2)

    @memoized
    def beta(n: int, T: int) -> QSeries:
        if n * M > T:
            return zero(T)
        return (inv_qpoch(n, T - n * M) * inv_qpoch(n + M, T - n * M)).shift(n * M).with_order(T)

    return BaileyPair(BaileyKernel(0), alpha, beta, name=f"alt_qchu(M={M})")


def _descending_chains(top: int, length: int, budget: int, weight: Callable[[int], int]):
    """Tuples top >= n1 >= ... >= n_length >= 0 whose summed weight stays <= budget."""
    if length == 0:
        yield ()
        return
    for first in range(top + 1):
        w = weight(first)
        if w > budget:
            break
        for rest in _descending_chains(first, length - 1, budget - w, weight):
            yield (first,) + rest


def chain_pair_beta(k: int, M: int, n: int, T: int) -> QSeries:
    """The k-fold sum beta_n of the iterated pair, by direct enumeration.

    sum q^(n1^2+...+nk^2 + M nk) / ((q)_(n-n1) (q)_(n1-n2) ... (q)_(nk) (q)_(nk+M))
    """
    total = zero(T)
    for chain in _descending_chains(n, k, T, lambda x: x * x):
        e = sum(x * x for x in chain) + M * chain[-1]
        if e > T:
            continue
        idx = (n,) + chain
        term = inv_qpoch(chain[-1] + M, T - e)
        for hi, lo in zip(idx, idx[1:]):
            term = term * inv_qpoch(hi - lo, T - e)
        term = term * inv_qpoch(chain[-1], T - e)
        total = total + term.shift(e)
    return total.with_order(T)


def chain_pair(k: int, M: int) -> BaileyPair:
    """alpha_n with q^(kn^2 + n(n-1)/2) and the k-fold beta_n, relative to a = 1."""

    @memoized
    def alpha(n: int, T: int) -> QSeries:
        return _qchu_alpha(M, n, T, k * n * n + n * (n - 1) // 2)

    @memoized
    def beta(n: int, T: int) -> QSeries:
        return chain_pair_beta(k, M, n, T)

    return BaileyPair(BaileyKernel(0), alpha, beta, name=f"chain_pair(k={k},M={M})")


def spt_star_series(M: int, T: int) -> QSeries:
    """sum_{n>=1} q^n/(1-q^n)^2 * 1/((q^(n+1))_M): generating function of spt*_M(n)."""
    total = zero(T)
    for n in range(1, T + 1):
        w = monomial(1, n) * _inv_one_minus_qn(n, T) ** 2
        tail = invert(pochhammer(QMonomial(1, n + 1), M), order=T) if M else one(T)
        total = total + (w * tail).with_order(T)
    return total.with_order(T)


def spt_star_rhs(M: int, T: int) -> QSeries:
    """1/(q)_M sum n q^n/(1-q^n) + (q)_M sum_{n=1}^M (-1)^n (1+q^n) q^(n(3n+1)/2) / (...)."""
    total = inv_qpoch(M, T) * divisor_series(T)
    for n in range(1, M + 1):
        e = n * (3 * n + 1) // 2
        if e > T:
            break
        num = qpoch(M) * (one() + monomial(1, n)) * monomial((-1) ** n, e)
        den = inv_qpoch(M - n, T) * inv_qpoch(M + n, T) * _inv_one_minus_qn(n, T) ** 2
        total = total + num * den
    return total.with_order(T)


def spt_star_pair() -> BaileyPair:
    """alpha_0 = sum n q^n/(1-q^n), alpha_M = (-1)^M (1+q^M) q^(M(3M+1)/2)/(1-q^M)^2,
    beta_M = spt*-series(M)/(q)_M, relative to a = 1."""

    @memoized
    def alpha(M: int, T: int) -> QSeries:
        if M == 0:
            return divisor_series(T)
        e = M * (3 * M + 1) // 2
        if e > T:
            return zero(T)
        num = (one() + monomial(1, M)) * monomial((-1) ** M, e)
        return (num * _inv_one_minus_qn(M, T) ** 2).with_order(T)

    @memoized
    def beta(M: int, T: int) -> QSeries:
        return (inv_qpoch(M, T) * spt_star_series(M, T)).with_order(T)

    return BaileyPair(BaileyKernel(0), alpha, beta, name="spt_star_pair")


def symmetric_pair() -> BaileyPair:
    """B_n = q^(n^2)/(q)_(2n) and
    A_n = (-1)^n q^(n(n-1)/2)/(q)_inf * sum_{j in Z} (-1)^j q^(j(3j-1)/2 + nj),
    evaluated as written for every integer n."""

    def theta(n: int, T: int) -> QSeries:
        base = n * (n - 1) // 2
        terms: dict = defaultdict(int)

        def exponent(j: int) -> int:
            return base + j * (3 * j - 1) // 2 + n * j

        vertex = round((1 - 2 * n) / 6)
        for step in (1, -1):
            j = vertex if step == 1 else vertex - 1
            while True:
                e = exponent(j)
                if e > T and (j - vertex) * step > 1:
                    break
                if e <= T:
                    terms[e] += (-1) ** ((n + j) % 2)
                j += step
        return from_terms(terms, T)

    @memoized
    def alpha(n: int, T: int) -> QSeries:
        th = theta(n, T)
        slack = bailey._neg_part(th)
        return (th * _inv_euler(T + slack)).with_order(T)

    @memoized
    def beta(n: int, T: int) -> QSeries:
        if n < 0 or n * n > T:
            return zero(T)
        return inv_qpoch(2 * n, T - n * n).shift(n * n).with_order(T)

    return BaileyPair(BaileyKernel(0), alpha, beta, symmetric=True, name="symmetric_pair")


def joshi_vyas_conjugate() -> ConjugatePair:
    """delta_n = (q)_(n-1)^2 q^n (delta_0 = 0), gamma_n = q^|n|/(1-q^|n|)^2,
    gamma_0 = sum n q^n/(1-q^n), relative to a = 1."""

    @memoized
    def delta(n: int, T: int) -> QSeries:
        if n == 0 or n > T:
            return zero(T)
        return (qpoch(n - 1) ** 2).shift(n).with_order(T)

    @memoized
    def gamma(n: int, T: int) -> QSeries:
        n = abs(n)
        if n == 0:
            return divisor_series(T)
        if n > T:
            return zero(T)
        return (_inv_one_minus_qn(n, T) ** 2).shift(n).with_order(T)

    return ConjugatePair(BaileyKernel(0), gamma, delta, lambda j: j, name="joshi_vyas")


# -- series identities -------------------------------------------------------


def euler_lhs(T: int) -> QSeries:
    """sum_{n>=0} q^(n^2)/(q)_n^2."""
    total = zero(T)
    n = 0
    while n * n <= T:
        total = total + (inv_qpoch(n, T - n * n) ** 2).shift(n * n)
        n += 1
    return total.with_order(T)


def penta_cube(T: int) -> QSeries:
    """((q;q)_inf)^3 by direct cubing."""
    return euler_product(T) ** 3


def penta_block(N: int, T: int) -> dict:
    """Terms of the (n, j) double sum for fixed N, all exponents <= T (may be negative)."""
    out: dict = defaultdict(int)
    base = N * (N - 1) // 2
    n = 0
    while True:
        J = n // 2
        # with |j| <= n/2 every exponent is >= base + n^2/8 + n/4 - n|N|/2,
        # a bound that increases in n once n >= 2|N|
        if n >= 2 * abs(N) and 8 * base + n * n + 2 * n - 4 * n * abs(N) > 8 * T:
            break
        tri = base + n * (n + 1) // 2
        for j in range(-J, J + 1):
            e = tri - j * (3 * j - 1) // 2 + j * N
            if e <= T:
                out[e] += -1 if (N + n + j) % 2 else 1
        n += 1
    return {e: c for e, c in out.items() if c}


def penta_partial_sum(K: int, T: int) -> QSeries:
    """The triple sum restricted to |N| <= K, modulo q^(T+1)."""
    acc: dict = defaultdict(int)
    for N in range(-K, K + 1):
        for e, c in penta_block(N, T).items():
            acc[e] += c
    return from_terms(acc, T)


def penta_partial_sums(T: int, K_max: int, window: int = 6):
    """Grow the symmetric N-cutoff K until the partial sum matches ((q)_inf)^3
    and the next ``window`` N-blocks contribute nothing up to q^T.

    Returns (K0, K_checked, last partial sum, target); K0 is None when the
    cap K_max is hit first.
    """
    target = penta_cube(T)
    acc: dict = defaultdict(int)
    K0 = None
    empty_run = 0
    K = -1
    partial = zero(T)
    while K < K_max:
        K += 1
        blocks = [penta_block(K, T)] if K == 0 else [penta_block(K, T), penta_block(-K, T)]
        contributes = False
        for b in blocks:
            for e, c in b.items():
                acc[e] += c
                contributes = True
        partial = from_terms(acc, T)
        ok = first_difference(partial, target, T) is None
        if not ok:
            K0 = None
            empty_run = 0
            continue
        if K0 is None:
            K0 = K
            empty_run = 0
        elif contributes:
            # blocks that change nothing overall are fine; nonzero ones reset the window
            empty_run = 0
        else:
            empty_run += 1
        if empty_run >= window:
            return K0, K, partial, target
    return None, K, partial, target


def durfee_refinement_sides(k: int, m: int, T: int) -> tuple[QSeries, QSeries]:
    """Both sides of the Durfee refinement with z = q^m.

    lhs = sum over n_1..n_(k-1) >= 0 of q^(N_1^2+...+N_(k-1)^2) z^(N_1+...+N_(k-1))
          / ((q)_(n_1) ... (q)_(n_(k-1)) (zq)_(n_(k-1))),  N_j = n_j + ... + n_(k-1)
    rhs = 1/(zq)_inf
    """
    lhs = zero(T)
    r = k - 1

    # build n_(k-1), n_(k-2), ..., n_1 so each partial N_j is known as we go
    def walk(j: int, N_prev: int, exp: int, counts: tuple):
        nonlocal lhs
        if j == 0:
            ns = counts  # n_1 .. n_(k-1)
            t = T - exp
            den = invert(pochhammer(QMonomial(1, m + 1), ns[-1]), order=t) if ns[-1] else one(t)
            for c in ns:
                den = den * inv_qpoch(c, t)
            lhs = lhs + den.with_order(t).shift(exp)
            return
        c = 0
        while True:
            N = N_prev + c
            e = exp + N * N + m * N
            if e > T:
                break
            walk(j - 1, N, e, (c,) + counts)
            c += 1

    walk(r, 0, 0, ())
    rhs = invert(pochhammer(QMonomial(1, m + 1), INFINITE, T))
    return lhs.with_order(T), rhs


def durfee_corollary_lhs(k: int, M: int, T: int) -> QSeries:
    """sum q^(n1^2+...+nk^2 + M nk) / ((q)_(n1-n2) ... (q)_(n(k-1)-nk) (q)_nk (q)_(nk+M))."""
    total = zero(T)

    def walk(depth: int, prev: Optional[int], exp: int, ns: tuple):
        nonlocal total
        if depth == k:
            last = ns[-1]
            e = exp + M * last
            if e > T:
                return
            term = inv_qpoch(last, T - e) * inv_qpoch(last + M, T - e)
            for hi, lo in zip(ns, ns[1:]):
                term = term * inv_qpoch(hi - lo, T - e)
            total = total + term.with_order(T - e).shift(e)
            return
        c = 0
        while (prev is None or c <= prev) and exp + c * c <= T:
            walk(depth + 1, c, exp + c * c, ns + (c,))
            c += 1

    walk(0, None, 0, ())
    return total.with_order(T)


def durfee_corollary_rhs(k: int, M: int, T: int) -> QSeries:
    """1/((q)_inf (q)_M) + (q)_M/(q)_inf sum_{n=1}^M (-1)^n (1+q^n) q^(n((2k+1)n-1)/2)/(...)."""
    inner = inv_qpoch(M, T)
    for n in range(1, M + 1):
        inner = inner + _qchu_alpha(M, n, T, n * ((2 * k + 1) * n - 1) // 2)
    return (inner * _inv_euler(T)).with_order(T)


def single_sum_durfee(M: int, T: int) -> QSeries:
    """sum_{n>=0} q^(n^2)/((q)_n (q)_(n+M))."""
    total = zero(T)
    n = 0
    while n * n <= T:
        total = total + (inv_qpoch(n, T) * inv_qpoch(n + M, T)).shift(n * n)
        n += 1
    return total.with_order(T)


def split_sides(n: int, M: int, T: int) -> tuple[QSeries, QSeries]:
    """1/((q)_n (q)_(n+M)) against sum_j q^(j^2+jM)/((q)_(n-j) (q)_j (q)_(j+M))."""
    lhs = (inv_qpoch(n, T) * inv_qpoch(n + M, T)).with_order(T)
    rhs = zero(T)
    for j in range(n + 1):
        e = j * j + j * M
        if e > T:
            break
        term = inv_qpoch(n - j, T) * inv_qpoch(j, T) * inv_qpoch(j + M, T)
        rhs = rhs + term.shift(e)
    return lhs, rhs.with_order(T)


def qchu_sides(N: int, M: int, T: int) -> tuple[QSeries, QSeries, QSeries]:
    """The three members of the q-Chu-Vandermonde evaluation behind the first pair:

    (q)_M sum_{j=0}^N (q^N)_j (q^-N)_j q^j / ((q)_j (q)_(j+M))
      = (q^(M-N+1))_N q^(N^2) / (q^(M+1))_N
      = (q)_M^2 q^(N^2) / ((q)_(M-N) (q)_(M+N))
    """
    slack = N * N + N  # (q^-N)_j carries exponents down to -N(N+1)/2
    total = zero(T + slack)
    for j in range(N + 1):
        num = pochhammer(QMonomial(1, N), j) * pochhammer(QMonomial(1, -N), j) * monomial(1, j)
        total = total + num * inv_qpoch(j, T + slack) * inv_qpoch(j + M, T + slack)
    first = (qpoch(M) * total).with_order(T)
    second = (pochhammer(QMonomial(1, M - N + 1), N) * monomial(1, N * N)
              * invert(pochhammer(QMonomial(1, M + 1), N), order=T)).with_order(T)
    third = (qpoch(M) ** 2 * monomial(1, N * N) * inv_qpoch(M - N, T) * inv_qpoch(M + N, T)).with_order(T)
    return first, second, third


def pair_relation_sides(p: BaileyPair, n: int, T: int) -> tuple[QSeries, QSeries]:
    return p.beta(n, T).with_order(T), bailey.pair_sum(p, n, T)


# -- registry ------------------------------------------------------------------


@dataclass(frozen=True)
class Param:
    lo: int
    hi: int
    default: Optional[int] = None
    grid: Optional[tuple] = None

    def values(self) -> tuple:
        return self.grid if self.grid is not None else tuple(range(self.lo, self.hi + 1))


@dataclass(frozen=True)
class IdentityEntry:
    id: str
    kind: str
    params: dict
    builder: Callable[[dict, int], "Task"]
    summary: str = ""

    def resolve(self, params: dict) -> dict:
        unknown = set(params) - set(self.params)
        if unknown:
            raise BadParams(f"{self.id}: unknown parameter(s) {sorted(unknown)}")
        out = {}
        for name, spec in self.params.items():
            value = params.get(name, spec.default)
            if value is None:
                raise BadParams(f"{self.id}: parameter {name} is required")
            if not isinstance(value, int) or not spec.lo <= value <= spec.hi:
                raise BadParams(f"{self.id}: {name}={value!r} outside {spec.lo}..{spec.hi}")
            out[name] = value
        return out

    def grid(self) -> list[dict]:
        combos = [{}]
        for name, spec in self.params.items():
            if spec.default is not None and spec.grid is None:
                continue
            combos = [dict(c, **{name: v}) for c in combos for v in spec.values()]
        return combos


@dataclass(frozen=True)
class Task:
    entry_id: str
    kind: str
    params: dict
    order: int
    sides: tuple = ()                # callables T -> QSeries (series-equality)
    pair: object = None              # BaileyPair / ConjugatePair
    n_max: int = 0
    special: Optional[Callable[["Task"], VerificationReport]] = None


def _series_task(entry_id: str, params: dict, T: int, *sides: Callable[[int], QSeries]) -> Task:
    return Task(entry_id, SERIES, params, T, sides=tuple(sides))


def _build_euler(params: dict, T: int) -> Task:
    return _series_task("EULER", params, T, euler_lhs, lambda t: _inv_euler(t))


def _run_penta(task: Task) -> VerificationReport:
    t0 = time.perf_counter()
    T = task.order
    K0, K_checked, partial, target = penta_partial_sums(T, task.params["K"])
    if K0 is None:
        # the cap ran out before the partial sums settled
        diff = first_difference(partial, target, T)
        return VerificationReport(
            task.entry_id, task.params, T, TRUNCATION_FAILURE,
            Mismatch(*diff) if diff else None, time.perf_counter() - t0,
            {"K_checked": K_checked}, partial, target,
        )
    return VerificationReport(task.entry_id, task.params, T, PASS, None, time.perf_counter() - t0,
                              {"K0": K0, "K_checked": K_checked}, target, partial)


def _build_penta(params: dict, T: int) -> Task:
    return Task("E8_PENTA_CUBE", SERIES, params, T, special=_run_penta)


def _build_sym(params: dict, T: int) -> Task:
    return Task("P13_SYM", SYMMETRIC, params, T, pair=symmetric_pair(), n_max=params["n_max"])


def _build_l3(params: dict, T: int) -> Task:
    return Task("L3_PAIR", PAIR, params, T, pair=reciprocal_pair(params["M"]), n_max=params["n_max"])


def _build_qchu(params: dict, T: int) -> Task:
    N, M = params["N"], params["M"]
    return _series_task("QCHU", params, T,
                        lambda t: qchu_sides(N, M, t)[0],
                        lambda t: qchu_sides(N, M, t)[1],
                        lambda t: qchu_sides(N, M, t)[2])


def _build_c4(params: dict, T: int) -> Task:
    M = params["M"]
    return _series_task("C4_SPT", params, T, lambda t: spt_star_series(M, t), lambda t: spt_star_rhs(M, t))


def _build_l5(params: dict, T: int) -> Task:
    return Task("L5_PAIR", PAIR, params, T, pair=spt_star_pair(), n_max=params["n_max"])


def _build_jv(params: dict, T: int) -> Task:
    return Task("JV_CONJ", CONJUGATE, params, T, pair=joshi_vyas_conjugate(), n_max=params["n_max"])


def _build_a23(params: dict, T: int) -> Task:
    k, m = params["k"], params["m"]
    return _series_task("A23_DURFEE", params, T,
                        lambda t: durfee_refinement_sides(k, m, t)[0],
                        lambda t: invert(pochhammer(QMonomial(1, m + 1), INFINITE, t)))


def _build_c6(params: dict, T: int) -> Task:
    k, M = params["k"], params["M"]
    return _series_task("C6_DURFEE", params, T,
                        lambda t: durfee_corollary_lhs(k, M, t),
                        lambda t: durfee_corollary_rhs(k, M, t))


def _build_p27(params: dict, T: int) -> Task:
    return Task("P27_PAIR", PAIR, params, T, pair=chain_pair(params["k"], params["M"]),
                n_max=params["n_max"])


def _build_c6_alt(params: dict, T: int) -> Task:
    N, M = params["N"], params["M"]
    p = alt_qchu_pair(M)
    return _series_task("C6_ALT_QCHU", params, T,
                        lambda t: pair_relation_sides(p, N, t)[0],
                        lambda t: pair_relation_sides(p, N, t)[1])


def _build_e29(params: dict, T: int) -> Task:
    n, M = params["n"], params["M"]
    return _series_task("E29_SPLIT", params, T,
                        lambda t: split_sides(n, M, t)[0],
                        lambda t: split_sides(n, M, t)[1])


def _entries() -> list[IdentityEntry]:
    Mg = Param(0, 8, grid=tuple(range(0, 7)))
    return [
        IdentityEntry("E8_PENTA_CUBE", SERIES, {"K": Param(0, 400, default=200)}, _build_penta,
                      "triple-sum expansion of (q)_inf^3, N-sum outermost"),
        IdentityEntry("P13_SYM", SYMMETRIC, {"n_max": Param(0, 10, default=5)}, _build_sym,
                      "symmetric pair built from the pentagonal theta sum"),
        IdentityEntry("L3_PAIR", PAIR,
                      {"M": Param(0, 8, grid=tuple(range(1, 9))), "n_max": Param(0, 10, default=6)},
                      _build_l3, "Bailey pair with beta_n = 1/((q)_n (q)_(n+M))"),
        IdentityEntry("QCHU", SERIES,
                      {"N": Param(0, 10, grid=tuple(range(0, 7))), "M": Param(0, 8, grid=tuple(range(0, 9)))},
                      _build_qchu, "finite q-Chu-Vandermonde evaluation"),
        IdentityEntry("C4_SPT", SERIES, {"M": Param(0, 8, grid=tuple(range(1, 7)))}, _build_c4,
                      "generating function of spt*_M(n)"),
        IdentityEntry("L5_PAIR", PAIR, {"n_max": Param(0, 10, default=6)}, _build_l5,
                      "Bailey pair indexed by M built from the spt* series"),
        IdentityEntry("JV_CONJ", CONJUGATE, {"n_max": Param(0, 10, default=6)}, _build_jv,
                      "conjugate pair with gamma_0 the divisor-sum series"),
        IdentityEntry("A23_DURFEE", SERIES,
                      {"k": Param(2, 5, grid=(2, 3, 4)), "m": Param(0, 8, grid=(0, 1, 2, 3))},
                      _build_a23, "Durfee refinement of Euler's identity at z = q^m"),
        IdentityEntry("C6_DURFEE", SERIES,
                      {"k": Param(1, 5, grid=(1, 2, 3)), "M": Param(0, 8, grid=tuple(range(0, 6)))},
                      _build_c6, "k-fold sum against the finite M-sum"),
        IdentityEntry("P27_PAIR", PAIR,
                      {"k": Param(1, 5, grid=(1, 2, 3)), "M": Param(0, 8, grid=(0, 1, 2, 3, 4)),
                       "n_max": Param(0, 10, default=5)},
                      _build_p27, "iterated pair with a k-fold beta"),
        IdentityEntry("C6_ALT_QCHU", SERIES,
                      {"N": Param(0, 10, grid=tuple(range(0, 7))), "M": Param(0, 8, grid=tuple(range(0, 7)))},
                      _build_c6_alt, "pair relation for beta_n = q^(nM)/((q)_n (q)_(n+M))"),
        IdentityEntry("E29_SPLIT", SERIES,
                      {"n": Param(0, 10, grid=tuple(range(0, 11))), "M": Param(0, 8, grid=tuple(range(0, 7)))},
                      _build_e29, "splitting 1/((q)_n (q)_(n+M)) into a finite sum"),
        IdentityEntry("EULER", SERIES, {}, _build_euler,
                      "sum q^(n^2)/(q)_n^2 = 1/(q)_inf"),
    ]


_REGISTRY = {e.id: e for e in _entries()}


def registry() -> list[IdentityEntry]:
    return list(_REGISTRY.values())


def entry(identity_id: str) -> IdentityEntry:
    try:
        return _REGISTRY[identity_id]
    except KeyError:
        raise UnknownIdentity(identity_id) from None


def build(identity_id: str, params: Optional[dict] = None, T: int = 40) -> Task:
    if T < 0:
        raise BadParams("order must be nonnegative")
    e = entry(identity_id)
    resolved = e.resolve(params or {})
    return e.builder(resolved, T)


def run(task: Task) -> VerificationReport:
    t0 = time.perf_counter()
    try:
        if task.special is not None:
            return task.special(task)
        if task.kind == SERIES:
            report = _run_series(task)
        elif task.kind == PAIR:
            report = bailey.verify_pair(task.pair, task.n_max, task.order)
        elif task.kind == SYMMETRIC:
            report = bailey.verify_symmetric_pair(task.pair, task.n_max, task.order)
        elif task.kind == CONJUGATE:
            report = bailey.verify_conjugate_pair(task.pair, task.n_max, task.order)
        else:
            raise ValueError(f"unknown task kind {task.kind}")
    except TruncationFailure as exc:
        return VerificationReport(task.entry_id, task.params, task.order, TRUNCATION_FAILURE,
                                  None, time.perf_counter() - t0, {"error": str(exc)})
    report.id = task.entry_id
    report.params = task.params
    report.elapsed = time.perf_counter() - t0
    return report


def _run_series(task: Task) -> VerificationReport:
    T = task.order
    first = task.sides[0](T)
    mismatch = None
    other = first
    for k, side in enumerate(task.sides[1:], start=1):
        other = side(T)
        diff = first_difference(first, other, T)
        if diff is not None:
            mismatch = Mismatch(*diff, index=None if len(task.sides) == 2 else k)
            break
    return VerificationReport(task.entry_id, task.params, T, PASS if mismatch is None else FAIL,
                              mismatch, 0.0, {}, first.with_order(T), other.with_order(T))


def corrupt(task: Task, exponent: int, delta: int = 1) -> Task:
    """Copy of a task with delta*q^exponent added to one side (mismatch detection checks)."""
    bump = monomial(delta, exponent)
    if task.special is not None:
        raise ValueError("the stabilization task cannot be corrupted side-wise")
    if task.kind == SERIES:
        first = task.sides[0]
        return replace(task, sides=(lambda t: (first(t) + bump).with_order(t),) + task.sides[1:])
    if task.kind in (PAIR, SYMMETRIC):
        return replace(task, pair=bailey.perturbed(task.pair, task.n_max, exponent, delta))
    cp = task.pair
    gamma = cp.gamma

    def bumped(n: int, T: int) -> QSeries:
        g = gamma(n, T)
        return (g + bump).with_order(T) if n == 0 and exponent <= T else g

    return replace(task, pair=replace(cp, gamma=bumped))


def run_grid(identity_id: str, T: int, extra: Optional[dict] = None) -> list[VerificationReport]:
    e = entry(identity_id)
    return [run(build(identity_id, dict(p, **(extra or {})), T)) for p in e.grid()]
