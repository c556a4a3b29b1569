"""Bailey pairs, conjugate pairs and 2-fold pairs over the kernel a = q^m.

Index functions everywhere have the signature ``f(n, T) -> QSeries`` and must
return a series known at least modulo q^(T+1).  Infinite and bilateral sums
are cut off with a valuation lower bound ``vlb(j)`` that is nondecreasing in
``j`` and unbounded.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional, Union

from .report import FAIL, PASS, Mismatch, TruncationFailure, VerificationReport
from .series import (
    INFINITE,
    QMonomial,
    QSeries,
    first_difference,
    inv_qpoch,
    invert,
    monomial,
    one,
    pochhammer,
    zero,
)

IndexFn = Callable[[int, int], QSeries]
Bound = Callable[[int], int]

DEFAULT_BUDGET = 10_000


class DivergenceRejected(ValueError):
    pass


def memoized(fn: IndexFn) -> IndexFn:
    return lru_cache(maxsize=None)(fn)


@lru_cache(maxsize=None)
def _inv_shifted_poch(m: int, n: int, T: int) -> QSeries:
    # 1/(q^(m+1); q)_n
    if n < 0:
        return zero(T)
    if n == 0:
        return one(T)
    return invert(pochhammer(QMonomial(1, m + 1), n), order=T)


@lru_cache(maxsize=None)
def _inv_qpoch(n: int, T: int) -> QSeries:
    return inv_qpoch(n, T)


@dataclass(frozen=True)
class BaileyKernel:
    """u_n = 1/(q)_n, v_n = 1/(aq)_n with a = q^m."""

    m: int = 0

    def __post_init__(self):
        if self.m < 0:
            raise ValueError("kernel exponent m must be nonnegative")

    @property
    def a(self) -> QMonomial:
        return QMonomial(1, self.m)

    def u(self, n: int, T: int) -> QSeries:
        return _inv_qpoch(n, T)

    def v(self, n: int, T: int) -> QSeries:
        return _inv_shifted_poch(self.m, n, T)


@dataclass(frozen=True)
class BaileyPair:
    kernel: BaileyKernel
    alpha: IndexFn
    beta: IndexFn
    symmetric: bool = False
    name: str = "pair"
    # optional valuation lower bounds, used to cut infinite sums
    alpha_vlb: Optional[Bound] = None
    beta_vlb: Optional[Bound] = None

    def alpha_at(self, n: int, T: int) -> QSeries:
        if n < 0 and not self.symmetric:
            return zero(T)
        return self.alpha(n, T)


@dataclass(frozen=True)
class ConjugatePair:
    kernel: BaileyKernel
    gamma: IndexFn
    delta: IndexFn
    vlb: Bound
    name: str = "conjugate"


@dataclass(frozen=True)
class TwoFoldPair:
    kernels: tuple
    A: Callable[[int, int, int], QSeries]
    B: Callable[[int, int, int], QSeries]
    bilateral: tuple = (False, False)
    name: str = "two-fold"


# -- helpers -----------------------------------------------------------------


def _report(name: str, params: dict, T: int, mismatch: Optional[Mismatch], t0: float,
            lhs=None, rhs=None, **detail) -> VerificationReport:
    return VerificationReport(
        id=name,
        params=params,
        order=T,
        status=PASS if mismatch is None else FAIL,
        first_mismatch=mismatch,
        elapsed=time.perf_counter() - t0,
        detail=detail,
        lhs=lhs,
        rhs=rhs,
    )


def _mismatch(lhs: QSeries, rhs: QSeries, T: int, index=None) -> Optional[Mismatch]:
    diff = first_difference(lhs, rhs, T)
    if diff is None:
        return None
    return Mismatch(diff[0], diff[1], diff[2], index)


def _vlb_cutoff(vlb: Bound, start: int, T: int, budget: int) -> int:
    """Smallest j >= start with vlb(j) > T."""
    j = start
    while vlb(j) <= T:
        j += 1
        if j - start > budget:
            raise TruncationFailure(f"valuation bound stayed <= {T} for {budget} terms")
    return j


def _neg_part(s: QSeries) -> int:
    v = s.valuation
    return 0 if v is None or v >= 0 else -v


def pair_sum(p: BaileyPair, n: int, T: int) -> QSeries:
    """sum_j alpha_j u_{n-j} v_{n+j}, over |j| <= n (symmetric) or 0 <= j <= n."""
    lo = -n if p.symmetric else 0
    total = zero(T)
    for j in range(lo, n + 1):
        a = p.alpha_at(j, T)
        if a.is_zero():
            continue
        slack = _neg_part(a)
        term = a * p.kernel.u(n - j, T + slack) * p.kernel.v(n + j, T + slack)
        total = total + term
    return total.with_order(T)


# -- verifiers ---------------------------------------------------------------


def _verify_pair_relation(p: BaileyPair, n_max: int, T: int) -> VerificationReport:
    t0 = time.perf_counter()
    lhs = rhs = None
    for n in range(n_max + 1):
        lhs = p.beta(n, T).with_order(T)
        rhs = pair_sum(p, n, T)
        bad = _mismatch(lhs, rhs, T, index=n)
        if bad is not None:
            return _report(p.name, {}, T, bad, t0, lhs, rhs, n_max=n_max)
    return _report(p.name, {}, T, None, t0, lhs, rhs, n_max=n_max)


def verify_pair(p: BaileyPair, n_max: int, T: int) -> VerificationReport:
    """Check beta_n = sum_{j=0}^n alpha_j u_{n-j} v_{n+j} for n <= n_max mod q^(T+1)."""
    if p.symmetric:
        raise ValueError("verify_pair expects a one-sided pair; use verify_symmetric_pair")
    return _verify_pair_relation(p, n_max, T)


def verify_symmetric_pair(p: BaileyPair, n_max: int, T: int) -> VerificationReport:
    """Check B_n = sum_{j=-n}^n A_j u_{n-j} v_{n+j} for n <= n_max mod q^(T+1)."""
    if not p.symmetric:
        raise ValueError("verify_symmetric_pair expects a symmetric pair")
    return _verify_pair_relation(p, n_max, T)


def conjugate_sum(cp: ConjugatePair, n: int, T: int, budget: int = DEFAULT_BUDGET) -> QSeries:
    """sum_{j >= |n|} delta_j u_{j-n} v_{j+n}, cut where vlb(j) > T."""
    start = abs(n)
    stop = _vlb_cutoff(cp.vlb, start, T, budget)
    total = zero(T)
    k = cp.kernel
    for j in range(start, stop):
        d = cp.delta(j, T)
        if d.is_zero():
            continue
        total = total + d * k.u(j - n, T) * k.v(j + n, T)
    return total.with_order(T)


def verify_conjugate_pair(cp: ConjugatePair, n_max: int, T: int,
                          budget: int = DEFAULT_BUDGET) -> VerificationReport:
    """Check gamma_n = sum_{j>=|n|} delta_j u_{j-n} v_{j+n} for |n| <= n_max.

    Negative n are only checked for a = 1, where the relation depends on |n|.
    """
    t0 = time.perf_counter()
    lo = -n_max if cp.kernel.m == 0 else 0
    lhs = rhs = None
    for n in sorted(range(lo, n_max + 1), key=lambda i: (abs(i), i)):
        lhs = cp.gamma(n, T).with_order(T)
        rhs = conjugate_sum(cp, n, T, budget)
        bad = _mismatch(lhs, rhs, T, index=n)
        if bad is not None:
            return _report(cp.name, {}, T, bad, t0, lhs, rhs, n_max=n_max)
    return _report(cp.name, {}, T, None, t0, lhs, rhs, n_max=n_max)


# -- conjugate pair constructor ----------------------------------------------

Rho = Union[QMonomial, str]


def _tail_product(c: int, e: int, T: int) -> QSeries:
    """prod_{i>=0} (1 - c q^(e+i)) for e >= 0; the constant factor is peeled off."""
    if e < 0:
        raise DivergenceRejected(f"tail product with base exponent {e} diverges")
    if e == 0:
        const = 1 - c
        if const == 0:
            return zero(T)
        return pochhammer(QMonomial(c, 1), INFINITE, T) * const
    return pochhammer(QMonomial(c, e), INFINITE, T)


def bailey_conjugate(rho1: Rho, rho2: Rho, a: QMonomial = QMonomial(1, 0)) -> ConjugatePair:
    """Bailey's conjugate pair for monomial rho's (or their limits to infinity).

    delta_n = (rho1)_n (rho2)_n (aq/rho1 rho2)^n
    gamma_n = (aq/rho1)_inf (aq/rho2)_inf / ((aq)_inf (aq/rho1 rho2)_inf)
              * delta_n / ((aq/rho1)_n (aq/rho2)_n)
    A rho equal to INFINITE replaces (rho)_n rho^(-n) by (-1)^n q^(n(n-1)/2)
    and drops its (aq/rho) factors.
    """
    if a.coeff != 1 or a.exp < 0:
        raise ValueError("a must be q^m with m >= 0")
    m = a.exp
    finite = []
    n_inf = 0
    for rho in (rho1, rho2):
        if rho == INFINITE:
            n_inf += 1
            continue
        if not isinstance(rho, QMonomial) or rho.coeff not in (1, -1):
            raise ValueError(f"rho must be INFINITE or ±q^e, got {rho!r}")
        if not 1 <= rho.exp <= m + 1:
            raise DivergenceRejected(
                f"rho = {rho.coeff}q^{rho.exp} needs 1 <= exponent <= {m + 1} so that aq/rho is a power series"
            )
        finite.append(rho)
    lin = m + 1 - sum(r.exp for r in finite)
    if n_inf == 0 and lin < 1:
        raise DivergenceRejected(f"aq/(rho1 rho2) = q^{lin}: delta_n gains no valuation with n")
    sign = (-1) ** n_inf
    for r in finite:
        sign *= r.coeff

    def vlb(j: int) -> int:
        return j * lin + n_inf * (j * (j - 1) // 2)

    @memoized
    def delta(n: int, T: int) -> QSeries:
        if n < 0:
            raise ValueError("delta is indexed by n >= 0")
        val = n * lin + n_inf * (n * (n - 1) // 2)
        if val > T:
            return zero(T)
        d = monomial(sign**n, val)
        for r in finite:
            d = d * pochhammer(r, n)
        return d.with_order(T)

    @memoized
    def gamma(n: int, T: int) -> QSeries:
        if n < 0:
            if m != 0:
                raise ValueError("gamma at negative index is only defined for a = 1")
            n = -n
        d = delta(n, T)
        if d.is_zero():
            return zero(T)
        g = d * invert(pochhammer(QMonomial(1, m + 1), INFINITE, T))
        for r in finite:
            g = g * _tail_product(r.coeff, m + 1 - r.exp + n, T)
        if n_inf == 0:
            g = g * invert(pochhammer(QMonomial(finite[0].coeff * finite[1].coeff, lin), INFINITE, T))
        return g.with_order(T)

    label = ",".join("inf" if r == INFINITE else f"{r.coeff}q^{r.exp}" for r in (rho1, rho2))
    return ConjugatePair(BaileyKernel(m), gamma, delta, vlb, name=f"bailey_conjugate({label};a=q^{m})")


# -- transforms --------------------------------------------------------------


def _bilateral_theta_sum(cp: ConjugatePair, N: int, T: int, budget: int) -> QSeries:
    """sum_{j in Z} gamma_j (-1)^j q^(j(j+1)/2 + jN) modulo q^(T+1)."""
    total = zero(T)

    def add_term(j: int):
        nonlocal total
        e = j * (j + 1) // 2 + j * N
        g = cp.gamma(j, T - e)
        if not g.is_zero():
            total = total + g.shift(e) * (-1) ** (j % 2)

    # j >= 0: the exponent increases with j
    j = 0
    while cp.vlb(j) + j * (j + 1) // 2 + j * N <= T:
        add_term(j)
        j += 1
        if j > budget:
            raise TruncationFailure("bilateral sum (j >= 0) did not truncate")
    # j = -k: the exponent increases once k >= N
    k = 1
    while k < N or cp.vlb(k) + k * (k - 1) // 2 - k * N <= T:
        if cp.vlb(k) + k * (k - 1) // 2 - k * N <= T:
            add_term(-k)
        k += 1
        if k > budget + N:
            raise TruncationFailure("bilateral sum (j < 0) did not truncate")
    return total


def prop1_transform(cp: ConjugatePair, budget: int = DEFAULT_BUDGET) -> BaileyPair:
    """Bailey pair relative to a = q built from a conjugate pair relative to a = 1.

    alpha_N = (-1)^N (1 - q^(2N+1)) q^(N(N-1)/2) / (1 - q)
              * sum_{j in Z} gamma_j (-1)^j q^(j(j+1)/2 + jN)
    beta_N  = delta_N q^(-N) / (q)_(2N)
    """
    if cp.kernel.m != 0:
        raise ValueError("prop1_transform needs a conjugate pair relative to a = 1")

    @memoized
    def alpha(N: int, T: int) -> QSeries:
        base = N * (N - 1) // 2
        inner = _bilateral_theta_sum(cp, N, T - base, budget)
        pre = (one() - monomial(1, 2 * N + 1)).shift(base) * (-1) ** (N % 2)
        slack = _neg_part(inner)
        out = pre * inner * invert(one() - monomial(1, 1), order=T + slack)
        return out.with_order(T)

    @memoized
    def beta(N: int, T: int) -> QSeries:
        d = cp.delta(N, T + N).shift(-N)
        slack = _neg_part(d)
        return (d * inv_qpoch(2 * N, T + slack)).with_order(T)

    return BaileyPair(BaileyKernel(1), alpha, beta, name=f"theta({cp.name})")


def product_two_fold(p1: BaileyPair, p2: BaileyPair) -> TwoFoldPair:
    """A(n1, n2) = alpha1(n1) alpha2(n2), B(n1, n2) = beta1(n1) beta2(n2)."""

    def A(n1: int, n2: int, T: int) -> QSeries:
        a1 = p1.alpha_at(n1, T)
        if a1.is_zero():
            return zero(T)
        return (a1 * p2.alpha_at(n2, T + _neg_part(a1))).with_order(T)

    def B(n1: int, n2: int, T: int) -> QSeries:
        if n1 < 0 or n2 < 0:
            return zero(T)
        b1 = p1.beta(n1, T)
        if b1.is_zero():
            return zero(T)
        return (b1 * p2.beta(n2, T + _neg_part(b1))).with_order(T)

    return TwoFoldPair(
        (p1.kernel, p2.kernel), A, B, (p1.symmetric, p2.symmetric), name=f"{p1.name}x{p2.name}"
    )


def _index_range(cp: ConjugatePair, bilateral: bool, T: int, budget: int) -> list[int]:
    stop = _vlb_cutoff(cp.vlb, 0, T, budget)
    if bilateral:
        return [j for k in range(stop) for j in ((k,) if k == 0 else (k, -k))]
    return list(range(stop))


def two_fold_sides(tf: TwoFoldPair, cp1: ConjugatePair, cp2: ConjugatePair, T: int,
                   budget: int = DEFAULT_BUDGET) -> tuple[QSeries, QSeries]:
    """Both sides of the 2-fold Bailey lemma, assuming A and B have nonnegative valuation."""
    lhs = zero(T)
    for n1 in _index_range(cp1, tf.bilateral[0], T, budget):
        g1 = cp1.gamma(n1, T)
        if g1.is_zero():
            continue
        for n2 in _index_range(cp2, tf.bilateral[1], T - cp1.vlb(abs(n1)), budget):
            a = tf.A(n1, n2, T)
            if a.is_zero():
                continue
            lhs = lhs + a * g1 * cp2.gamma(n2, T)
    rhs = zero(T)
    for n1 in _index_range(cp1, False, T, budget):
        d1 = cp1.delta(n1, T)
        if d1.is_zero():
            continue
        for n2 in _index_range(cp2, False, T - cp1.vlb(n1), budget):
            b = tf.B(n1, n2, T)
            if b.is_zero():
                continue
            rhs = rhs + b * d1 * cp2.delta(n2, T)
    return lhs.with_order(T), rhs.with_order(T)


def verify_two_fold_lemma(tf: TwoFoldPair, cp1: ConjugatePair, cp2: ConjugatePair, T: int,
                          budget: int = DEFAULT_BUDGET) -> VerificationReport:
    t0 = time.perf_counter()
    if any(k.m != 0 for k in tf.kernels) or cp1.kernel.m != 0 or cp2.kernel.m != 0:
        raise ValueError("the 2-fold lemma check is implemented for a = 1")
    lhs, rhs = two_fold_sides(tf, cp1, cp2, T, budget)
    return _report(tf.name, {}, T, _mismatch(lhs, rhs, T), t0, lhs, rhs)


def lemma2_contract(tf: TwoFoldPair, cp: ConjugatePair, budget: int = DEFAULT_BUDGET) -> BaileyPair:
    """Contract the first index of a 2-fold pair against a conjugate pair.

    A_n = sum_{n1} gamma(n1) A(n1, n),  B_n = sum_{n1 >= 0} delta(n1) B(n1, n).
    """
    if cp.kernel != tf.kernels[0]:
        raise ValueError("conjugate pair kernel must match the contracted index")

    @memoized
    def alpha(n: int, T: int) -> QSeries:
        total = zero(T)
        for n1 in _index_range(cp, tf.bilateral[0], T, budget):
            g = cp.gamma(n1, T)
            if not g.is_zero():
                total = total + g * tf.A(n1, n, T)
        return total.with_order(T)

    @memoized
    def beta(n: int, T: int) -> QSeries:
        total = zero(T)
        for n1 in _index_range(cp, False, T, budget):
            d = cp.delta(n1, T)
            if not d.is_zero():
                total = total + d * tf.B(n1, n, T)
        return total.with_order(T)

    return BaileyPair(tf.kernels[1], alpha, beta, symmetric=tf.bilateral[1],
                      name=f"contract({tf.name};{cp.name})")


def chain_step(p: BaileyPair) -> BaileyPair:
    """One link of the Bailey chain with rho1, rho2 -> infinity.

    alpha'_n = a^n q^(n^2) alpha_n,
    beta'_n  = sum_{j=0}^n a^j q^(j^2) beta_j / (q)_(n-j).
    """
    m = p.kernel.m

    @memoized
    def alpha(n: int, T: int) -> QSeries:
        e = n * n + m * n
        return p.alpha_at(n, T - e).shift(e).with_order(T)

    @memoized
    def beta(n: int, T: int) -> QSeries:
        total = zero(T)
        for j in range(n + 1):
            e = j * j + m * j
            b = p.beta(j, T - e)
            if b.is_zero():
                continue
            total = total + b.shift(e) * _inv_qpoch(n - j, T - e + _neg_part(b))
        return total.with_order(T)

    return BaileyPair(p.kernel, alpha, beta, p.symmetric, name=f"chain({p.name})")


def limit_identity(p: BaileyPair, T: int, budget: int = DEFAULT_BUDGET) -> tuple[QSeries, QSeries]:
    """(sum a^n q^(n^2) beta_n, 1/(aq)_inf * sum a^n q^(n^2) alpha_n) modulo q^(T+1).

    Sums stop once a^n q^(n^2) alone exceeds T, which assumes alpha and beta
    have nonnegative valuation unless the pair carries explicit bounds.
    """
    m = p.kernel.m
    a_vlb = p.alpha_vlb or (lambda n: 0)
    b_vlb = p.beta_vlb or (lambda n: 0)

    def weight(n: int) -> int:
        return n * n + m * n

    lhs = zero(T)
    stop = _vlb_cutoff(lambda n: weight(n) + b_vlb(n), 0, T, budget)
    for n in range(stop):
        e = weight(n)
        lhs = lhs + p.beta(n, T - e).shift(e)
    rhs = zero(T)
    stop = _vlb_cutoff(lambda n: n * n + a_vlb(n), 0, T, budget)
    for k in range(stop):
        for n in ((k,) if k == 0 or not p.symmetric else (k, -k)):
            e = n * n + m * n
            if e > T:
                continue
            rhs = rhs + p.alpha_at(n, T - e).shift(e)
    rhs = rhs * invert(pochhammer(QMonomial(1, m + 1), INFINITE, T))
    return lhs.with_order(T), rhs.with_order(T)


# -- small standard pairs ----------------------------------------------------


def unit_pair(kernel: BaileyKernel = BaileyKernel(0)) -> BaileyPair:
    """alpha = (1, 0, 0, ...), beta_n = u_n v_n."""

    def alpha(n: int, T: int) -> QSeries:
        return one(T) if n == 0 else zero(T)

    def beta(n: int, T: int) -> QSeries:
        return (kernel.u(n, T) * kernel.v(n, T)).with_order(T)

    return BaileyPair(kernel, alpha, beta, name="unit")


def zero_pair(kernel: BaileyKernel = BaileyKernel(0), symmetric: bool = False) -> BaileyPair:
    def nothing(n: int, T: int) -> QSeries:
        return zero(T)

    return BaileyPair(kernel, nothing, nothing, symmetric, name="zero")


def scaled(p: BaileyPair, factor: QSeries) -> BaileyPair:
    """(c alpha, c beta) for a series c of nonnegative valuation."""

    def alpha(n: int, T: int) -> QSeries:
        return (p.alpha_at(n, T) * factor.with_order(T)).with_order(T)

    def beta(n: int, T: int) -> QSeries:
        return (p.beta(n, T) * factor.with_order(T)).with_order(T)

    return BaileyPair(p.kernel, alpha, beta, p.symmetric, name=f"scaled({p.name})")


def perturbed(p: BaileyPair, n: int, exponent: int, delta: int = 1, side: str = "beta") -> BaileyPair:
    """Copy of p with delta*q^exponent added to one side at index n (for mismatch tests)."""
    bump = monomial(delta, exponent)

    def wrap(fn: IndexFn) -> IndexFn:
        def inner(k: int, T: int) -> QSeries:
            s = fn(k, T)
            return (s + bump).with_order(T) if k == n and exponent <= T else s
        return inner

    alpha = wrap(p.alpha) if side == "alpha" else p.alpha
    beta = wrap(p.beta) if side == "beta" else p.beta
    return BaileyPair(p.kernel, alpha, beta, p.symmetric, f"{p.name}+perturbed",
                      p.alpha_vlb, p.beta_vlb)


def limiting_conjugate() -> ConjugatePair:
    """(delta_n, gamma_n) = (q^(n^2), q^(n^2)/(q)_inf) relative to a = 1."""
    return bailey_conjugate(INFINITE, INFINITE)
