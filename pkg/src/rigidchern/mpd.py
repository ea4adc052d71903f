"""Divided powers of level m in the principal-ideal model.

The ideal is generated by one element ``x`` of valuation ``v`` (by default
``x = p``).  The level-m divided power ``x^{{k}_m}`` is a formal symbol tied
to the ordinary power by ``x**k = q! * x^{{k}_m}`` where ``k = p**m q + r``
with ``0 <= r < p**m``; it is never expanded, only given the valuation that
relation forces.

On 1-units ``psi_m(1 + x) = log((1 + x)**(p**m))``.  The level-m first Chern
cocycle uses ``psi_m`` of the triple products divided back by ``p**m``.
"""

from __future__ import annotations

from dataclasses import dataclass

from .cech import TotalCochain
from .charts import LaurentSection
from .chern import LiftedUnitCocycle, c1_cocycle
from .errors import PrecisionExhausted, ValuationError
from .padic import PAdicContext, PAdicElem, log_one_unit, vp_factorial

MAX_LEVEL = 6


@dataclass(frozen=True)
class MpdContext:
    ctx: PAdicContext
    m: int
    v: int = 1

    def __post_init__(self):
        if not 0 <= self.m <= MAX_LEVEL:
            raise ValueError(f"level m={self.m} outside [0, {MAX_LEVEL}]")
        if self.v < 1:
            raise ValueError("the generator must have valuation at least 1")

    @property
    def p(self) -> int:
        return self.ctx.p

    @property
    def period(self) -> int:
        return self.p**self.m

    def assigned_valuation(self, k: int) -> int:
        """Valuation given to ``x^{{k}_m}``: ``k*v - v_p(q_k!)``."""
        q, _ = divmod(k, self.period)
        return k * self.v - vp_factorial(self.p, q)

    def pd_condition(self) -> bool:
        """``x**(p**m)`` and ``p*x`` both lie in the PD-part in this model.

        ``x**(p**m) = 1! * x^{{p**m}_m}`` and ``p*x`` has valuation ``v + 1``;
        both have valuation at least ``1`` as the PD-ideal ``(p)`` requires.
        """
        return self.assigned_valuation(self.period) >= 1 and self.v + 1 >= 1


@dataclass(frozen=True)
class MpdTerm:
    """``coefficient * x^{{k}_m}``; the index is stored as given."""

    coefficient: PAdicElem
    k: int
    m: int

    def __post_init__(self):
        if self.k < 0:
            raise ValueError("divided-power index must be non-negative")

    def valuation(self, mctx: MpdContext) -> int:
        if self.m != mctx.m:
            raise ValueError("term and context have different levels")
        if self.coefficient.is_zero():
            return self.coefficient.prec + mctx.assigned_valuation(self.k)
        return self.coefficient.valuation() + mctx.assigned_valuation(self.k)

    def as_power(self, mctx: MpdContext) -> tuple[PAdicElem, int]:
        """Rewrite as ``c * x**k``; only possible when ``q_k!`` is a unit."""
        _, _, fact = mpd_reduce(mctx, self.k)
        if fact.valuation() != 0:
            raise ValuationError(f"q_k! is not a unit for k={self.k}; the term has no power form")
        return self.coefficient * fact.inverse(), self.k


def mpd_reduce(mctx: MpdContext, k: int) -> tuple[int, int, PAdicElem]:
    """``(q, r, q!)`` with ``k = p**m q + r`` and ``0 <= r < p**m``."""
    if k < 0:
        raise ValueError("k must be non-negative")
    q, r = divmod(k, mctx.period)
    fact = 1
    for j in range(2, q + 1):
        fact *= j
    elem = PAdicElem(mctx.ctx, fact, mctx.ctx.N)
    return q, r, elem


def factorial_valuation_ok(mctx: MpdContext, k: int) -> bool:
    """``v_p(q_k!)`` from Legendre agrees with the factorial, and the bookkeeping closes."""
    q, r, fact = mpd_reduce(mctx, k)
    exact = 1
    for j in range(2, q + 1):
        exact *= j
    legendre = vp_factorial(mctx.p, q)
    direct = 0
    while exact % mctx.p == 0:
        exact //= mctx.p
        direct += 1
    return (
        k == mctx.period * q + r
        and 0 <= r < mctx.period
        and legendre == direct
        and legendre + mctx.assigned_valuation(k) == k * mctx.v
    )


def psi_m(mctx: MpdContext, u: PAdicElem | int) -> PAdicElem:
    """``log(u**(p**m))`` for a 1-unit ``u``."""
    if isinstance(u, int):
        u = PAdicElem(mctx.ctx, u, mctx.ctx.N)
    if (u - 1).valuation() < 1:
        raise ValuationError(f"{u!r} is not a 1-unit")
    return log_one_unit(mctx.ctx, u ** mctx.period)


def psi_m_section(mctx: MpdContext, u: LaurentSection) -> LaurentSection:
    """``psi_m`` applied to a 1-unit section."""
    if not u.is_one_unit():
        raise ValuationError("psi_m needs a 1-unit")
    return u.power(mctx.period).log_one_unit()


def compatible_lift_cocycle(U: LiftedUnitCocycle, m: int) -> TotalCochain:
    """Level-m cocycle from one lift system used at every level.

    Edges carry ``dlog u_ij``; triangles carry ``-(1/p**m) psi_m(T)`` with ``T``
    the triple product, matching the sign of the level-0 cocycle.
    """
    space = U.space
    mctx = MpdContext(space.ctx, m)
    base = c1_cocycle(U)
    if m == 0:
        return base
    vals = {}
    prec = base.prec
    for s, f in base.values.items():
        if len(s) == 2:
            vals[s] = f
    for tri in space.simplices(2):
        T = U.triple_product(*tri)
        if (T - 1).is_zero():
            continue
        psi = psi_m_section(mctx, T)
        if psi.prec <= m:
            raise PrecisionExhausted(f"dividing by p^{m} would exhaust the precision on triangle {tri}")
        term = -psi.divide_by_p_power(m)
        vals[tri] = space.function_form(term)
        prec = min(prec, term.prec)
    return TotalCochain(space, 2, vals, prec)


def level_rescale_check(U: LiftedUnitCocycle, m: int, m2: int) -> dict:
    """``psi_{m2}(T) == p**(m2 - m) psi_m(T)`` on every triangle."""
    if not 0 <= m < m2 <= MAX_LEVEL:
        raise ValueError("need 0 <= m < m' <= 6")
    space = U.space
    p = space.ctx.p
    lo, hi = MpdContext(space.ctx, m), MpdContext(space.ctx, m2)
    ratio = p ** (m2 - m)
    cases = []
    for tri in space.simplices(2):
        T = U.triple_product(*tri)
        a = psi_m_section(lo, T)
        b = psi_m_section(hi, T)
        scaled = a.scale(ratio)
        prec = min(b.prec, scaled.prec)
        cases.append({
            "triangle": list(tri),
            "precision": prec,
            "valuation_low": a.min_valuation() if not a.is_zero() else None,
            "valuation_high": b.min_valuation() if not b.is_zero() else None,
            "pass": b == scaled,
        })
    return {
        "m": m,
        "m_prime": m2,
        "ratio": ratio,
        "precision": min((c["precision"] for c in cases), default=space.ctx.N),
        "triangles": cases,
        "pass": all(c["pass"] for c in cases),
    }
