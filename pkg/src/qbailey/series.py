"""Truncated Laurent series in q with integer coefficients.

A :class:`QSeries` stores a dense run of coefficients starting at ``min_exp``
together with a truncation ``order``: the value is known exactly modulo
``q**(order + 1)``.  ``order=None`` marks an exact (finite) Laurent polynomial.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Union

INFINITE = "inf"

Count = Union[int, str]


class SeriesError(ArithmeticError):
    pass


class NotInvertible(SeriesError):
    pass


class DivergentProduct(SeriesError):
    pass


class OrderExceeded(SeriesError, IndexError):
    pass


def _min_order(*orders: Optional[int]) -> Optional[int]:
    known = [t for t in orders if t is not None]
    return min(known) if known else None


@dataclass(frozen=True)
class QMonomial:
    coeff: int
    exp: int

    def __post_init__(self):
        if self.coeff == 0:
            raise ValueError("QMonomial coefficient must be nonzero")

    def series(self) -> "QSeries":
        return monomial(self.coeff, self.exp)

    def __mul__(self, other: "QMonomial") -> "QMonomial":
        return QMonomial(self.coeff * other.coeff, self.exp + other.exp)


@dataclass(frozen=True, eq=False)
class QSeries:
    min_exp: int
    coeffs: tuple
    order: Optional[int] = None

    def __post_init__(self):
        coeffs = list(self.coeffs)
        lo = self.min_exp
        if self.order is not None and coeffs:
            keep = self.order - lo + 1
            if keep < len(coeffs):
                coeffs = coeffs[: max(keep, 0)]
        start = 0
        while start < len(coeffs) and coeffs[start] == 0:
            start += 1
        end = len(coeffs)
        while end > start and coeffs[end - 1] == 0:
            end -= 1
        coeffs = coeffs[start:end]
        lo = lo + start if coeffs else 0
        if not coeffs and self.order is not None:
            lo = self.order + 1
        object.__setattr__(self, "min_exp", lo)
        object.__setattr__(self, "coeffs", tuple(coeffs))

    # -- inspection --------------------------------------------------------

    @property
    def is_exact(self) -> bool:
        return self.order is None

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def valuation(self) -> Optional[int]:
        """Lowest exponent with a nonzero coefficient.

        For a zero series this is ``order + 1`` (nothing is known to be
        nonzero up to the order), or None when the zero is exact.
        """
        if self.coeffs:
            return self.min_exp
        return None if self.order is None else self.order + 1

    @property
    def max_exp(self) -> Optional[int]:
        return self.min_exp + len(self.coeffs) - 1 if self.coeffs else None

    def coeff(self, n: int) -> int:
        if self.order is not None and n > self.order:
            raise OrderExceeded(f"coefficient of q^{n} requested beyond order {self.order}")
        i = n - self.min_exp
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return 0

    def __getitem__(self, n: int) -> int:
        return self.coeff(n)

    def coefficient_list(self, lo: int, hi: int) -> list[int]:
        return [self.coeff(n) for n in range(lo, hi + 1)]

    def terms(self) -> Iterable[tuple[int, int]]:
        for i, c in enumerate(self.coeffs):
            if c:
                yield self.min_exp + i, c

    # -- truncation ----------------------------------------------------------

    def truncate(self, order: int) -> "QSeries":
        """Drop everything above ``order``; never raises the known precision."""
        if self.order is not None and order > self.order:
            raise OrderExceeded(f"cannot truncate order {self.order} up to {order}")
        return QSeries(self.min_exp, self.coeffs, order)

    def with_order(self, order: Optional[int]) -> "QSeries":
        """Truncate to ``order`` if given, keep exactness otherwise."""
        if order is None:
            return self
        if self.order is not None and self.order < order:
            return self
        return self.truncate(order)

    def shift(self, k: int) -> "QSeries":
        """Multiply by q**k."""
        order = None if self.order is None else self.order + k
        return QSeries(self.min_exp + k, self.coeffs, order)

    # -- ring operations ---------------------------------------------------

    def __neg__(self) -> "QSeries":
        return QSeries(self.min_exp, tuple(-c for c in self.coeffs), self.order)

    def __add__(self, other) -> "QSeries":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        order = _min_order(self.order, other.order)
        parts = [s for s in (self, other) if s.coeffs]
        if not parts:
            return zero(order)
        lo = min(s.min_exp for s in parts)
        hi = max(s.max_exp for s in parts)
        if order is not None:
            hi = min(hi, order)
        if hi < lo:
            return zero(order)
        out = [0] * (hi - lo + 1)
        for s in parts:
            off = s.min_exp - lo
            for i, c in enumerate(s.coeffs[: max(0, hi - s.min_exp + 1)]):
                out[off + i] += c
        return QSeries(lo, tuple(out), order)

    __radd__ = __add__

    def __sub__(self, other) -> "QSeries":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "QSeries":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other) -> "QSeries":
        if isinstance(other, int):
            return QSeries(self.min_exp, tuple(c * other for c in self.coeffs), self.order)
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        order = _product_order(self, other)
        if not self.coeffs or not other.coeffs:
            return zero(order)
        lo = self.min_exp + other.min_exp
        n_out = len(self.coeffs) + len(other.coeffs) - 1
        if order is not None:
            n_out = min(n_out, order - lo + 1)
        if n_out <= 0:
            return zero(order)
        out = [0] * n_out
        b = other.coeffs
        nb = len(b)
        for i, ai in enumerate(self.coeffs):
            if i >= n_out:
                break
            if not ai:
                continue
            lim = min(nb, n_out - i)
            for j in range(lim):
                bj = b[j]
                if bj:
                    out[i + j] += ai * bj
        return QSeries(lo, tuple(out), order)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "QSeries":
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return invert(self) ** (-k)
        result = one()
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __truediv__(self, other) -> "QSeries":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * invert(other, order=_division_order(self, other))

    def __rtruediv__(self, other) -> "QSeries":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other / self

    # -- comparison --------------------------------------------------------

    def __eq__(self, other) -> bool:
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return (self.min_exp, self.coeffs, self.order) == (other.min_exp, other.coeffs, other.order)

    def __hash__(self):
        return hash((self.min_exp, self.coeffs, self.order))

    def agrees_with(self, other: "QSeries", order: int) -> bool:
        return first_difference(self, other, order) is None

    def __repr__(self) -> str:
        return f"QSeries({format_series(self)})"


def _coerce(x) -> QSeries:
    if isinstance(x, QSeries):
        return x
    if isinstance(x, int):
        return monomial(x, 0)
    if isinstance(x, QMonomial):
        return x.series()
    return NotImplemented


def _product_order(s: QSeries, t: QSeries) -> Optional[int]:
    # s known mod q^(T1+1), t has valuation v2: the product is known mod q^(T1+v2+1)
    cands = []
    if s.order is not None and t.valuation is not None:
        cands.append(s.order + t.valuation)
    if t.order is not None and s.valuation is not None:
        cands.append(t.order + s.valuation)
    return min(cands) if cands else None


def _division_order(num: QSeries, den: QSeries) -> Optional[int]:
    # precision needed from 1/den so that num/den is as precise as num allows
    if den.order is not None or den.is_zero():
        return None
    if len(den.coeffs) == 1:
        return None
    if num.order is None:
        return None
    return num.order - (num.valuation or 0)


def monomial(c: int, e: int, order: Optional[int] = None) -> QSeries:
    if c == 0:
        return zero(order)
    return QSeries(e, (c,), order)


def zero(order: Optional[int] = None) -> QSeries:
    return QSeries(0, (), order)


def one(order: Optional[int] = None) -> QSeries:
    return QSeries(0, (1,), order)


def from_coeffs(coeffs: Sequence[int], order: Optional[int] = None, min_exp: int = 0) -> QSeries:
    return QSeries(min_exp, tuple(coeffs), order)


def from_terms(terms: dict, order: Optional[int] = None) -> QSeries:
    """Build a series from an exponent -> coefficient mapping."""
    items = {e: c for e, c in terms.items() if c and (order is None or e <= order)}
    if not items:
        return zero(order)
    lo, hi = min(items), max(items)
    out = [0] * (hi - lo + 1)
    for e, c in items.items():
        out[e - lo] = c
    return QSeries(lo, tuple(out), order)


def add(s: QSeries, t: QSeries) -> QSeries:
    return s + t


def sub(s: QSeries, t: QSeries) -> QSeries:
    return s - t


def mul(s: QSeries, t: QSeries) -> QSeries:
    return s * t


def power(s: QSeries, k: int) -> QSeries:
    if k < 0:
        raise ValueError("power expects a nonnegative exponent")
    return s ** k


def coeff(s: QSeries, n: int) -> int:
    return s.coeff(n)


def invert(s: QSeries, order: Optional[int] = None) -> QSeries:
    """Multiplicative inverse of a series whose lowest coefficient is a unit.

    For an exact input that is not a monomial the result is an infinite series,
    so ``order`` must say where to stop.  For a truncated input the result's
    order follows from the input's (``order - 2*valuation``); a requested
    ``order`` may only lower it.
    """
    if s.is_zero():
        raise NotInvertible("zero series has no inverse")
    lead = s.coeffs[0]
    if lead not in (1, -1):
        raise NotInvertible(f"lowest coefficient {lead} is not a unit")
    v = s.min_exp
    if s.order is None and len(s.coeffs) == 1:
        return QSeries(-v, (lead,), order)
    if s.order is not None:
        out_order = s.order - 2 * v
        if order is not None:
            out_order = min(out_order, order)
    elif order is None:
        raise ValueError("inverting an exact non-monomial series needs an order")
    else:
        out_order = order
    n = out_order + v + 1  # coefficients of the unit part needed
    if n <= 0:
        return zero(out_order)
    a = s.coeffs
    na = len(a)
    inv = [0] * n
    inv[0] = lead
    for k in range(1, n):
        acc = 0
        for i in range(1, min(k, na - 1) + 1):
            acc += a[i] * inv[k - i]
        inv[k] = -acc * lead
    return QSeries(-v, tuple(inv), out_order)


def _as_series(base) -> QSeries:
    if isinstance(base, QSeries):
        return base
    if isinstance(base, QMonomial):
        return base.series()
    if isinstance(base, int):
        return monomial(base, 0)
    raise TypeError(f"cannot use {base!r} as a Pochhammer base")


def pochhammer(base, count: Count, T: Optional[int] = None) -> QSeries:
    """(x; q)_n = prod_{i<n} (1 - x q^i), and (x; q)_inf for ``count=INFINITE``.

    ``base`` is a QMonomial, an int, or any QSeries.  Finite products are exact
    when ``T`` is None; infinite products need ``T`` and a base of positive
    valuation.  Negative counts follow (x)_{-n} = 1/(x q^{-n})_n.
    """
    x = _as_series(base)
    if count == INFINITE:
        if T is None:
            raise ValueError("infinite product needs a truncation order")
        v = x.valuation
        if x.is_zero():
            return one(T)
        if v <= 0:
            raise DivergentProduct(f"(x;q)_inf diverges for base of valuation {v}")
        if T < 0:
            return one(T)
        n_factors = max(T - v + 1, 0)
        return _product(x, n_factors, T)
    if not isinstance(count, int):
        raise TypeError(f"bad Pochhammer count {count!r}")
    if count < 0:
        m = -count
        den = _product(x.shift(-m), m, None if x.is_exact else T)
        return invert(den, order=T)
    return _product(x, count, T)


def _product(x: QSeries, n: int, T: Optional[int]) -> QSeries:
    result = one(None)
    v = x.valuation
    if x.is_zero() or v is None:
        return one(T)
    # remaining factors can lower the valuation by at most this much
    deficit = [0] * (n + 1)
    for i in range(n - 1, -1, -1):
        deficit[i] = deficit[i + 1] + max(0, -(v + i))
    for i in range(n):
        factor = 1 - x.shift(i)
        result = result * factor
        if T is not None:
            result = result.with_order(T + deficit[i + 1])
    if T is not None:
        result = result.with_order(T)
        if result.order is None:
            result = result.truncate(T)
    return result


def qpoch(n: int, T: Optional[int] = None) -> QSeries:
    """(q; q)_n, zero-safe shorthand."""
    return pochhammer(QMonomial(1, 1), n, T)


def inv_qpoch(n: int, T: int) -> QSeries:
    """1/(q; q)_n with the convention 1/(q)_n = 0 for n < 0."""
    if n < 0:
        return zero(T)
    if n == 0:
        return one(T)
    return invert(qpoch(n), order=T)


def euler_product(T: int) -> QSeries:
    """(q; q)_inf truncated at T."""
    return pochhammer(QMonomial(1, 1), INFINITE, T)


def first_difference(s: QSeries, t: QSeries, order: int) -> Optional[tuple[int, int, int]]:
    """First exponent <= order where s and t differ, as (exponent, s_coeff, t_coeff)."""
    for o in (s.order, t.order):
        if o is not None and o < order:
            raise OrderExceeded(f"comparison to order {order} but a side is only known to {o}")
    lo_candidates = [u.min_exp for u in (s, t) if u.coeffs]
    if not lo_candidates:
        return None
    lo = min(lo_candidates)
    for n in range(lo, order + 1):
        a, b = s.coeff(n), t.coeff(n)
        if a != b:
            return n, a, b
    return None


def format_series(s: QSeries, var: str = "q") -> str:
    parts = []
    for e, c in s.terms():
        if e == 0:
            body = str(abs(c))
        else:
            mon = var if e == 1 else f"{var}^{e}"
            body = mon if abs(c) == 1 else f"{abs(c)}*{mon}"
        sign = "-" if c < 0 else "+"
        parts.append((sign, body))
    if not parts:
        text = "0"
    else:
        text = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            text += f" {sign} {body}"
    if s.order is not None:
        text += f" + O({var}^{s.order + 1})"
    return text
