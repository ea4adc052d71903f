"""Projective bundles of split bundles over P^1 and P^2.

On ``P(O(a_1) + ... + O(a_r))`` the tautological class ``xi`` together with
the pulled-back hyperplane class ``h`` generate cohomology freely over the
base on ``1, xi, ..., xi**(r-1)``.  Writing ``xi**r`` in that basis gives the
Chern classes through

    xi**r = sum_{i>=1} (-1)**(i+1) c_i xi**(r-i).
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

from .cech import (
    TotalCochain,
    betti_ranks,
    cup,
    cup_power,
    hyperplane_cocycle,
    solve_in_span,
    total_diff,
)
from .charts import ChartedSpace, SpaceDescriptor, build_space, power_pullback
from .chern import LiftedUnitCocycle, c1_cocycle, character_cocycle, perturb
from .errors import NotInSpan, UnsupportedSpace
from .padic import PAdicContext, PAdicElem


def _require_bundle(space: ChartedSpace) -> None:
    if space.descriptor.kind != "ProjBundle":
        raise UnsupportedSpace("expected a projective bundle")


def bundle_space(base_n: int, twists: Sequence[int], ctx: PAdicContext | None = None, window: int = 12) -> ChartedSpace:
    return build_space(SpaceDescriptor.bundle(base_n, twists), ctx, window)


def tautological_cocycle(space: ChartedSpace) -> LiftedUnitCocycle:
    """Transition units of ``O_P(1)``, built from its local generators ``y_a * x_i**(-a_a)``."""
    _require_bundle(space)
    desc = space.descriptor
    n, r = desc.n, desc.rank
    size = len(space.homogeneous)

    def gen(c):
        i, a = divmod(c, r)
        v = [0] * size
        v[n + 1 + a] = 1
        v[i] += space.TWIST_SIGN * desc.twists[a]
        return v

    return character_cocycle(space, gen)


def xi_cocycle(space: ChartedSpace, lifts: LiftedUnitCocycle | None = None) -> TotalCochain:
    """First Chern class cocycle of ``O_P(1)`` (optionally for perturbed lifts)."""
    return c1_cocycle(lifts if lifts is not None else tautological_cocycle(space))


def basis_labels(space: ChartedSpace, degree: int) -> list[tuple[int, int]]:
    """Pairs ``(a, b)`` with ``2(a + b) == degree``, ``a <= n`` and ``b < r``."""
    desc = space.descriptor
    return [(a, b) for b in range(desc.rank) for a in range(desc.n + 1) if 2 * (a + b) == degree]


@lru_cache(maxsize=None)
def _xi_power(space: ChartedSpace, b: int) -> TotalCochain:
    return cup_power(xi_cocycle(space), b)


@lru_cache(maxsize=None)
def _h_power(space: ChartedSpace, a: int) -> TotalCochain:
    return cup_power(hyperplane_cocycle(space), a)


def basis_class(space: ChartedSpace, a: int, b: int) -> TotalCochain:
    """The cocycle ``h**a cup xi**b``."""
    return cup(_h_power(space, a), _xi_power(space, b))


def basis_classes(space: ChartedSpace, degree: int) -> dict[tuple[int, int], TotalCochain]:
    return {ab: basis_class(space, *ab) for ab in basis_labels(space, degree)}


def decompose(z: TotalCochain) -> dict[tuple[int, int], PAdicElem]:
    """Coefficients of a closed cochain over the classes ``h**a cup xi**b``."""
    space = z.space
    _require_bundle(space)
    basis = basis_classes(space, z.degree)
    if not basis:
        solve_in_span(z, [])
        return {}
    labels = list(basis)
    sol = solve_in_span(z, [basis[ab] for ab in labels])
    if not sol.unique:
        raise NotInSpan("basis classes are not independent on the solved blocks; enlarge the window")
    return dict(zip(labels, sol.coefficients))


# ---------------------------------------------------------------------------
# Chern classes


def elementary_symmetric(values: Sequence[int], i: int) -> int:
    total = 0
    for combo in itertools.combinations(values, i):
        prod = 1
        for x in combo:
            prod *= x
        total += prod
    return total


@dataclass
class ChernVector:
    """``c_0 .. c_r`` of a split bundle, each the coefficient on ``h**i``."""

    base_n: int
    twists: tuple[int, ...]
    c: list[PAdicElem]

    @property
    def precision(self) -> int:
        return min(x.prec for x in self.c)

    def values(self) -> list[int]:
        return [x.symmetric() for x in self.c]

    def to_json(self) -> dict:
        return {
            "base": f"P{self.base_n}",
            "twists": list(self.twists),
            "c": [[str(x.symmetric()), x.prec] for x in self.c],
        }


def chern_classes(base_n: int, twists: Sequence[int], ctx: PAdicContext | None = None, window: int = 12,
                  lifts: LiftedUnitCocycle | None = None) -> ChernVector:
    """Chern classes of ``O(a_1) + ... + O(a_r)`` on P^n from the decomposition of ``xi**r``."""
    space = bundle_space(base_n, twists, ctx, window)
    r = space.descriptor.rank
    xi = xi_cocycle(space, lifts)
    top = cup_power(xi, r)
    coeffs = decompose(top)
    one = PAdicElem(space.ctx, 1, space.ctx.N)
    c = [one]
    for i in range(1, r + 1):
        if i > base_n:
            c.append(PAdicElem(space.ctx, 0, top.prec))
            continue
        lam = coeffs[(i, r - i)]
        c.append(lam if i % 2 else -lam)
    return ChernVector(base_n, tuple(twists), c)


def whitney_oracle(twists: Sequence[int], base_n: int) -> list[int]:
    r = len(twists)
    return [elementary_symmetric(twists, i) if i <= base_n else 0 for i in range(r + 1)]


def whitney_check(base_n: int, first: Sequence[int], second: Sequence[int], ctx: PAdicContext | None = None) -> dict:
    """``c(E' + E'') = c(E') c(E'')`` where line bundles enter through their degrees."""
    total = chern_classes(base_n, tuple(first) + tuple(second), ctx)

    def line_or_bundle(tw):
        if len(tw) == 1:
            return [1, tw[0] if base_n >= 1 else 0]
        return chern_classes(base_n, tw, ctx).values()

    cf, cs = line_or_bundle(tuple(first)), line_or_bundle(tuple(second))
    product = [0] * (len(total.c))
    for a, x in enumerate(cf):
        for b, y in enumerate(cs):
            if a + b < len(product) and a + b <= base_n:
                product[a + b] += x * y
    passed = all(total.c[i] == product[i] for i in range(len(product)))
    return {
        "base": f"P{base_n}",
        "first": list(first),
        "second": list(second),
        "sum": total.values(),
        "product": product,
        "precision": total.precision,
        "pass": passed,
    }


def frobenius_bundle_check(base_n: int, twists: Sequence[int], ctx: PAdicContext | None = None) -> dict:
    """Classes of the bundle with twists multiplied by ``p`` scale as ``p**i``."""
    ctx = ctx or PAdicContext(5, 8)
    p = ctx.p
    base = chern_classes(base_n, twists, ctx)
    scaled = chern_classes(base_n, [p * a for a in twists], ctx)
    expected = [x * p**i for i, x in enumerate(base.c)]
    return {
        "base": f"P{base_n}",
        "twists": list(twists),
        "scaled": scaled.values(),
        "expected": [x.symmetric() for x in expected],
        "precision": min(scaled.precision, base.precision),
        "pass": all(scaled.c[i] == expected[i] for i in range(len(expected))),
    }


def perturbed_xi_coefficients(space: ChartedSpace, rng: random.Random) -> dict[tuple[int, int], PAdicElem]:
    """Decomposition of ``xi`` built from randomly perturbed tautological lifts."""
    return decompose(xi_cocycle(space, perturb(tautological_cocycle(space), rng)))


# ---------------------------------------------------------------------------
# ranks


def predicted_ranks(space: ChartedSpace) -> list[int]:
    """Direct-sum prediction ``sum_i H^{k-2i}(base) xi**i`` from the base's ranks."""
    desc = space.descriptor
    n = desc.n
    base = [1 if d % 2 == 0 else 0 for d in range(2 * n + 1)]
    if desc.kind == "Pn":
        return base
    top = 2 * space.dim
    out = [0] * (top + 1)
    for i in range(desc.rank):
        for d, b in enumerate(base):
            if d + 2 * i <= top:
                out[d + 2 * i] += b
    return out


def cohomology_ranks(space: ChartedSpace, window: int | None = None) -> dict:
    """Ranks of the total complex mod ``p**N`` per degree against the prediction."""
    ranks = betti_ranks(space, window)
    predicted = predicted_ranks(space)
    return {
        "space": space.descriptor.to_json(),
        "window": space.window if window is None else window,
        "ranks": ranks,
        "predicted": predicted,
        "pass": ranks == predicted,
    }


def is_closed(z: TotalCochain) -> bool:
    return total_diff(z).is_zero()


def power_pullback_cochain(z: TotalCochain, k: int) -> TotalCochain:
    """Pull a cochain on P^n back along the chart-wise ``k``-th power map."""
    space = z.space
    vals = {s: power_pullback(space, f, k) for s, f in z.values.items()}
    return TotalCochain(space, z.degree, vals, z.prec)
