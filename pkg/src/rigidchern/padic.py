"""Truncated p-adic integers with explicit absolute precision.

An element is a residue modulo ``p**prec`` together with ``prec``; every
operation returns the minimum of its inputs' precisions (never more), and
the logarithm additionally reports the digits lost to its divisions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from .errors import PrecisionExhausted, ValuationError

MAX_PRECISION = 64


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def vp(p: int, n: int) -> int:
    """Valuation of a nonzero integer ``n`` at ``p``."""
    if n == 0:
        raise ValueError("valuation of 0 is infinite")
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


@dataclass(frozen=True)
class PAdicContext:
    """Prime ``p`` and working precision ``N`` (digits in base ``p``)."""

    p: int
    N: int
    bound: int = MAX_PRECISION

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"p={self.p} is not prime")
        if not 1 <= self.N <= self.bound:
            raise ValueError(f"precision N={self.N} outside [1, {self.bound}]")

    @property
    def modulus(self) -> int:
        return self.p**self.N

    def __call__(self, value: int, prec: int | None = None) -> PAdicElem:
        return PAdicElem.from_int(self, value, prec)

    def zero(self) -> PAdicElem:
        return PAdicElem(self, 0, self.N)

    def one(self) -> PAdicElem:
        return PAdicElem(self, 1, self.N)


class PAdicElem:
    """Residue modulo ``p**prec``.

    ``prec == 0`` is the element carrying no information; it absorbs every
    operation instead of raising.
    """

    __slots__ = ("ctx", "residue", "prec")

    def __init__(self, ctx: PAdicContext, residue: int, prec: int):
        if prec < 0:
            raise ValueError("negative precision")
        prec = min(prec, ctx.N)
        self.ctx = ctx
        self.prec = prec
        self.residue = residue % ctx.p**prec

    @classmethod
    def from_int(cls, ctx: PAdicContext, value: int, prec: int | None = None) -> PAdicElem:
        return cls(ctx, value, ctx.N if prec is None else prec)

    # -- inspection --------------------------------------------------------

    @property
    def p(self) -> int:
        return self.ctx.p

    def valuation(self) -> int:
        """Valuation at known precision; a residue of 0 reports ``prec``."""
        if self.residue == 0:
            return self.prec
        return vp(self.ctx.p, self.residue)

    def is_zero(self) -> bool:
        return self.residue == 0

    def lift(self) -> int:
        return self.residue

    def symmetric(self) -> int:
        """Representative in ``(-p**prec/2, p**prec/2]``."""
        m = self.ctx.p**self.prec
        r = self.residue
        return r - m if 2 * r > m else r

    # -- arithmetic --------------------------------------------------------

    def _coerce(self, other) -> PAdicElem:
        if isinstance(other, PAdicElem):
            if other.ctx.p != self.ctx.p:
                raise ValueError("mixing different primes")
            return other
        if isinstance(other, int):
            return PAdicElem(self.ctx, other, self.ctx.N)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return PAdicElem(self.ctx, self.residue + other.residue, min(self.prec, other.prec))

    __radd__ = __add__

    def __neg__(self):
        return PAdicElem(self.ctx, -self.residue, self.prec)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return PAdicElem(self.ctx, self.residue - other.residue, min(self.prec, other.prec))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return PAdicElem(self.ctx, self.residue * other.residue, min(self.prec, other.prec))

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        return PAdicElem(self.ctx, pow(self.residue, n, self.ctx.p**self.prec), self.prec)

    def inverse(self) -> PAdicElem:
        """Inverse of a unit; raises ValuationError otherwise."""
        if self.prec == 0:
            return self
        if self.residue % self.ctx.p == 0:
            raise ValuationError(f"{self!r} is not a unit")
        m = self.ctx.p**self.prec
        return PAdicElem(self.ctx, pow(self.residue, -1, m), self.prec)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def divide_by_p_power(self, v: int) -> PAdicElem:
        """Exact division by ``p**v``; costs ``v`` digits of precision."""
        if v == 0 or self.prec == 0:
            return self
        if v > self.prec:
            raise PrecisionExhausted(f"cannot divide an element of precision {self.prec} by p^{v}")
        if self.residue % self.ctx.p**v:
            raise ValuationError(f"{self!r} is not divisible by p^{v}")
        return PAdicElem(self.ctx, self.residue // self.ctx.p**v, self.prec - v)

    def with_prec(self, prec: int) -> PAdicElem:
        return PAdicElem(self.ctx, self.residue, min(prec, self.prec))

    # -- comparison --------------------------------------------------------

    def __eq__(self, other):
        """Equality at the minimum of the two precisions."""
        if isinstance(other, int):
            m = self.ctx.p**self.prec
            return (self.residue - other) % m == 0
        if isinstance(other, PAdicElem):
            if other.ctx.p != self.ctx.p:
                return False
            m = self.ctx.p ** min(self.prec, other.prec)
            return (self.residue - other.residue) % m == 0
        return NotImplemented

    def __hash__(self):
        raise TypeError("PAdicElem equality is precision-dependent; not hashable")

    def __repr__(self):
        return f"PAdicElem({self.residue} + O({self.ctx.p}^{self.prec}))"

    # -- serialization -----------------------------------------------------

    def to_json(self) -> dict:
        return {"residue": str(self.residue), "prec": self.prec}

    @classmethod
    def from_json(cls, ctx: PAdicContext, data: dict) -> PAdicElem:
        return cls(ctx, int(data["residue"]), int(data["prec"]))


# ---------------------------------------------------------------------------
# series


def log_series_plan(p: int, prec: int, v: int) -> tuple[list[int], int]:
    """Indices ``n`` of the terms ``x**n/n`` that survive modulo ``p**prec``.

    ``x`` has valuation at least ``v >= 1``.  Returns the contributing
    indices and the precision loss ``max v_p(n)`` over them.  Iteration stops
    once ``n*v - floor(log_p n) >= prec``, which bounds every later term.
    """
    if v < 1:
        raise ValuationError("logarithm needs v_p(u - 1) >= 1")
    terms = []
    loss = 0
    n = 1
    while True:
        floor_log = 0
        q = n
        while q >= p:
            q //= p
            floor_log += 1
        if n * v - floor_log >= prec:
            break
        e = vp(p, n)
        if n * v - e < prec:
            terms.append(n)
            loss = max(loss, e)
        n += 1
    return terms, loss


def inv_one_unit(ctx: PAdicContext, a: PAdicElem) -> PAdicElem:
    """``(1 + a)**-1`` by the alternating geometric series, for ``v_p(a) >= 1``."""
    prec = min(a.prec, ctx.N)
    if prec == 0:
        return PAdicElem(ctx, 0, 0)
    v = a.valuation()
    if v == 0:
        raise ValuationError(f"{a!r} has valuation 0; 1 + a need not be a 1-unit")
    if a.residue == 0:
        return PAdicElem(ctx, 1, prec)
    m = ctx.p**prec
    total, term, n = 1, 1, 1
    while n * v < prec:
        term = (-term * a.residue) % m
        total += term
        n += 1
    return PAdicElem(ctx, total, prec)


def log_one_unit(ctx: PAdicContext, u: PAdicElem) -> PAdicElem:
    """p-adic logarithm of a 1-unit, with the series' precision loss reported."""
    if u.prec == 0:
        return PAdicElem(ctx, 0, 0)
    x = (u - 1).with_prec(u.prec)
    v = x.valuation()
    if v == 0:
        raise ValuationError(f"{u!r} is not a 1-unit")
    if x.residue == 0:
        return PAdicElem(ctx, 0, u.prec)
    terms, loss = log_series_plan(ctx.p, u.prec, v)
    prec = u.prec - loss
    if prec <= 0:
        raise PrecisionExhausted("logarithm consumed all available precision")
    m = ctx.p**u.prec
    total = 0
    for n in terms:
        e = vp(ctx.p, n)
        unit = n // ctx.p**e
        power = pow(x.residue, n, m * ctx.p**e) // ctx.p**e
        term = power * pow(unit, -1, m)
        total += term if n % 2 else -term
    return PAdicElem(ctx, total, prec)


def vp_factorial(ctx: PAdicContext | int, n: int) -> int:
    """Legendre's formula ``(n - s_p(n)) / (p - 1)``."""
    p = ctx.p if isinstance(ctx, PAdicContext) else ctx
    if n < 0:
        raise ValueError("n must be non-negative")
    return (n - sum(digits(n, p))) // (p - 1)


def digits(n: int, p: int) -> Iterator[int]:
    while n:
        n, r = divmod(n, p)
        yield r
