"""First Chern class cocycles from lifted unit cocycles.

For a line bundle given on the standard cover by transition units ``u_ij``
with chosen lifts, the class is represented by the degree-2 total cochain

    0 on charts,  dlog(u_ij) on edges,  -log(u_ij u_ik^-1 u_jk) on triangles,

whose triangle entries are logarithms of 1-units because the lifts satisfy
the cocycle condition modulo p.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .cech import TotalCochain, class_coeff, total_diff
from .charts import ChartedSpace, LaurentSection, SpaceDescriptor, UnitWitness, build_space, dlog_witness
from .errors import GaugeMismatch, UnsupportedSpace, ValuationError, WindowOverflow
from .padic import PAdicContext, PAdicElem

Edge = tuple[int, int]


def transport_unit(space: ChartedSpace, u: UnitWitness, to_chart: int) -> UnitWitness:
    """Rewrite a factored unit in another chart's coordinates."""
    if u.chart == to_chart:
        return u
    A = space.transition_matrix(u.chart, to_chart)
    e = tuple(sum(u.exponent[j] * A[j][k] for j in range(space.dim)) for k in range(space.dim))
    space.check_window(e)
    return UnitWitness(u.constant, e, space.transition(u.chart, to_chart, u.one_unit))


@dataclass
class LiftedUnitCocycle:
    """Lifts ``u_ij`` (``i < j``, on chart ``i``) of a unit Cech 1-cocycle.

    The reverse edge is the series inverse of the stored lift, so edge
    antisymmetry holds by construction.  The cocycle condition is checked
    modulo p on every triangle when the object is built.
    """

    space: ChartedSpace
    lifts: dict[Edge, UnitWitness]
    check: bool = field(default=True, repr=False)

    def __post_init__(self):
        for (i, j), u in self.lifts.items():
            if not i < j:
                raise ValueError(f"edges are stored with i < j, got {(i, j)}")
            if u.chart != i:
                raise ValueError(f"lift on edge {(i, j)} must live on chart {i}")
            u.validate()
        if self.check:
            for tri in self.space.simplices(2):
                self.triple_product(*tri)

    @property
    def prec(self) -> int:
        return min((u.prec for u in self.lifts.values()), default=self.space.ctx.N)

    def edge(self, i: int, j: int) -> UnitWitness:
        """Lift on ``(i, j)`` in chart ``i`` coordinates; trivial edges give 1."""
        if i < j:
            u = self.lifts.get((i, j))
            return u if u is not None else UnitWitness(1, (0,) * self.space.dim, self.space.constant(i))
        return transport_unit(self.space, self.edge(j, i).inverse(), i)

    def triple_product(self, i: int, j: int, k: int) -> LaurentSection:
        """``u_ij * u_ik**-1 * u_jk`` on chart ``i``; must be a 1-unit."""
        prod = self.edge(i, j) * self.edge(i, k).inverse() * transport_unit(self.space, self.edge(j, k), i)
        if any(prod.exponent):
            raise ValuationError(f"monomial parts do not cancel on triangle {(i, j, k)}")
        section = prod.one_unit.scale(prod.constant)
        if not section.is_one_unit():
            raise ValuationError(f"triangle {(i, j, k)} fails the cocycle condition mod p")
        return section

    def __mul__(self, other: LiftedUnitCocycle) -> LiftedUnitCocycle:
        edges = set(self.lifts) | set(other.lifts)
        return LiftedUnitCocycle(self.space, {e: self.edge(*e) * other.edge(*e) for e in sorted(edges)})

    def power(self, k: int) -> LiftedUnitCocycle:
        return LiftedUnitCocycle(self.space, {e: u.power(k) for e, u in self.lifts.items()})

    def to_json(self) -> dict:
        return {
            "space": self.space.descriptor.to_json(),
            "p": self.space.ctx.p,
            "N": self.space.ctx.N,
            "window": self.space.window,
            "edges": [dict(edge=list(e), **u.to_json()) for e, u in sorted(self.lifts.items())],
        }

    @classmethod
    def from_json(cls, data: Mapping, space: ChartedSpace | None = None) -> LiftedUnitCocycle:
        if space is None:
            ctx = PAdicContext(int(data["p"]), int(data["N"]))
            space = build_space(SpaceDescriptor.from_json(data["space"]), ctx, int(data.get("window", 12)))
        lifts = {}
        for item in data["edges"]:
            i, j = item["edge"]
            if int(item["chart"]) != i:
                raise ValueError("edge lifts must be given on the chart of the smaller index")
            lifts[(i, j)] = UnitWitness.from_json(space.ctx, space.dim, item)
        return cls(space, lifts)


@dataclass
class GaugeCochain:
    """Units ``theta_i`` on each chart."""

    space: ChartedSpace
    units: dict[int, UnitWitness]

    def __post_init__(self):
        for i, t in self.units.items():
            if t.chart != i:
                raise ValueError(f"gauge unit for chart {i} lives on chart {t.chart}")
            if not self.space.is_regular_monomial((i,), t.exponent) or not all(
                self.space.is_regular_monomial((i,), e) for e in t.one_unit.coeffs
            ):
                raise ValueError(f"gauge unit on chart {i} is not regular there")
            t.validate()

    def __getitem__(self, i: int) -> UnitWitness:
        if i in self.units:
            return self.units[i]
        return UnitWitness(1, (0,) * self.space.dim, self.space.constant(i))


# ---------------------------------------------------------------------------
# standard cocycles


def character_cocycle(space: ChartedSpace, generator: Mapping[int, Sequence[int]] | callable) -> LiftedUnitCocycle:
    """Monomial cocycle ``u_ij = g_j / g_i`` for local generators ``g_c`` given as
    exponent vectors over the homogeneous coordinates."""
    gen = generator if callable(generator) else generator.__getitem__
    lifts = {}
    for i, j in space.simplices(1):
        vec = [a - b for a, b in zip(gen(j), gen(i))]
        if not any(vec):
            continue
        e = space.character_exponent(i, vec)
        space.check_window(e)
        lifts[(i, j)] = UnitWitness(1, e, space.constant(i))
    return LiftedUnitCocycle(space, lifts)


def _base_chart(space: ChartedSpace, c: int) -> int:
    return c // space.descriptor.rank if space.descriptor.kind == "ProjBundle" else c


def line_bundle_cocycle(space: ChartedSpace, degree: int) -> LiftedUnitCocycle:
    """``O(d)`` on P^n (pulled back from the base on a bundle): ``u_ij = (x_j / x_i)**d``."""
    size = len(space.homogeneous)

    def gen(c):
        v = [0] * size
        v[_base_chart(space, c)] = degree
        return v

    return character_cocycle(space, gen)


def structure_cocycle(space: ChartedSpace) -> LiftedUnitCocycle:
    return LiftedUnitCocycle(space, {})


# ---------------------------------------------------------------------------
# perturbations


def perturbation_degree(space: ChartedSpace) -> int:
    """Largest total degree keeping every series of a perturbed cocycle in the window.

    Inverse and logarithm series reach ``N - 1`` factors of the perturbation.
    """
    N = space.ctx.N
    return max(1, min(3, space.window // max(1, N - 1)))


def random_one_unit(space: ChartedSpace, simplex: tuple[int, ...], rng: random.Random, terms: int = 2, degree: int | None = None) -> LaurentSection:
    """``1 + p*g`` with ``g`` regular on the simplex, ``|g|`` of total degree <= ``degree``."""
    degree = perturbation_degree(space) if degree is None else degree
    p = space.ctx.p
    inv = space.inverted(simplex)
    chart = simplex[0]
    coeffs: dict[tuple[int, ...], int] = {(0,) * space.dim: 1}
    for _ in range(terms):
        e = [0] * space.dim
        budget = rng.randint(0, degree)
        for _ in range(budget):
            k = rng.randrange(space.dim)
            step = rng.choice((-1, 1)) if k in inv else 1
            e[k] += step
        e = tuple(e)
        coeffs[e] = coeffs.get(e, 0) + p * rng.randrange(1, p * p)
    return space.section(chart, coeffs)


def perturb(U: LiftedUnitCocycle, rng: random.Random, terms: int = 2) -> LiftedUnitCocycle:
    """Multiply every lift (including trivial edges) by a random 1-unit ``1 + p*g``."""
    space = U.space
    lifts = {}
    for e in space.simplices(1):
        w = random_one_unit(space, e, rng, terms)
        base = U.edge(*e)
        lifts[e] = UnitWitness(base.constant, base.exponent, base.one_unit * w)
    return LiftedUnitCocycle(space, lifts)


def random_gauge(space: ChartedSpace, rng: random.Random, monomial_only: bool = True) -> GaugeCochain:
    """Random ``theta_i``: a unit constant times (optionally) a 1-unit polynomial.

    Units on a single chart are constants times 1-units; monomials with
    nonzero exponent are not invertible on an affine chart.
    """
    p = space.ctx.p
    units = {}
    for i in range(space.n_charts):
        c = rng.randrange(1, p * p)
        while c % p == 0:
            c = rng.randrange(1, p * p)
        w = space.constant(i) if monomial_only else random_one_unit(space, (i,), rng, terms=1)
        units[i] = UnitWitness(c, (0,) * space.dim, w)
    return GaugeCochain(space, units)


def apply_gauge(U: LiftedUnitCocycle, theta: GaugeCochain) -> LiftedUnitCocycle:
    """Lifts of ``u * delta(theta)``: ``u'_ij = theta_j u_ij theta_i**-1``."""
    space = U.space
    lifts = {}
    for i, j in space.simplices(1):
        tj = transport_unit(space, theta[j], i)
        lifts[(i, j)] = tj * U.edge(i, j) * theta[i].inverse()
    return LiftedUnitCocycle(space, lifts)


# ---------------------------------------------------------------------------
# the cocycle and its properties


def c1_cocycle(U: LiftedUnitCocycle) -> TotalCochain:
    space = U.space
    vals = {}
    for i, j in space.simplices(1):
        u = U.edge(i, j)
        if any(u.exponent) or not (u.one_unit - 1).is_zero():
            vals[(i, j)] = dlog_witness(u)
    for tri in space.simplices(2):
        T = U.triple_product(*tri)
        if (T - 1).is_zero():
            continue
        vals[tri] = space.function_form(-T.log_one_unit())
    return TotalCochain(space, 2, vals, U.prec)


def zeta_witness(U: LiftedUnitCocycle, theta: GaugeCochain, U2: LiftedUnitCocycle) -> TotalCochain:
    """Degree-1 cochain ``zeta`` with ``Delta(zeta) = c1(U2) - c1(U)``.

    ``zeta_i = dlog theta_i`` and ``zeta_ij = -log(1 + alpha_ij)`` where
    ``theta_i u2_ij = theta_j u_ij (1 + alpha_ij)``.
    """
    space = U.space
    vals = {}
    for i in range(space.n_charts):
        t = theta[i]
        f = dlog_witness(t)
        if not f.is_zero():
            vals[(i,)] = f
    for i, j in space.simplices(1):
        lhs = theta[i] * U2.edge(i, j)
        rhs = transport_unit(space, theta[j], i) * U.edge(i, j)
        ratio = lhs * rhs.inverse()
        if any(ratio.exponent):
            raise GaugeMismatch(f"edge {(i, j)}: monomial parts differ")
        a = ratio.one_unit.scale(ratio.constant)
        if not a.is_one_unit():
            raise GaugeMismatch(f"edge {(i, j)}: lifts are not congruent mod p after the gauge change")
        if (a - 1).is_zero():
            continue
        vals[(i, j)] = space.function_form(-a.log_one_unit())
    return TotalCochain(space, 1, vals, min(U.prec, U2.prec))


def _require_pn(space: ChartedSpace) -> None:
    if space.descriptor.kind != "Pn":
        raise UnsupportedSpace("c1_class reads the coefficient on h for projective spaces only")


def c1_class(space: ChartedSpace, bundle: int | LiftedUnitCocycle) -> PAdicElem:
    """Coefficient of ``c_1`` on ``h``; ``bundle`` is a twist ``d`` or an explicit cocycle."""
    _require_pn(space)
    U = line_bundle_cocycle(space, bundle) if isinstance(bundle, int) else bundle
    return class_coeff(c1_cocycle(U), space)


def is_closed(U: LiftedUnitCocycle) -> bool:
    return total_diff(c1_cocycle(U)).is_zero()


def rebuild_on(U: LiftedUnitCocycle, space: ChartedSpace) -> LiftedUnitCocycle:
    """The same lifts on another charted copy of the space (e.g. a wider window)."""
    if space.descriptor != U.space.descriptor or space.ctx != U.space.ctx:
        raise ValueError("can only move a cocycle to a copy of the same space")
    return LiftedUnitCocycle.from_json(U.to_json(), space)


def _power_class(U: LiftedUnitCocycle, k: int, max_window: int = 96) -> PAdicElem:
    """Class of the ``k``-th power cocycle, widening the window while it overflows."""
    space = U.space
    window = space.window
    while True:
        try:
            wide = build_space(space.descriptor, space.ctx, window)
            return c1_class(wide, rebuild_on(U, wide).power(k))
        except WindowOverflow:
            if window >= max_window:
                raise
            window = min(2 * window, max_window)


def frobenius_check(space: ChartedSpace, U: LiftedUnitCocycle) -> dict:
    """Compare the class of ``u**p`` with ``p`` times the class of ``u``.

    The p-th power multiplies every exponent by ``p``, so the computation
    moves to a wider window when the configured one is too small.
    """
    p = space.ctx.p
    base = c1_class(space, U)
    frob = _power_class(U, p)
    expected = base * p
    prec = min(frob.prec, expected.prec)
    return {
        "p": p,
        "class": base.symmetric(),
        "frobenius_class": frob.symmetric(),
        "expected": expected.symmetric(),
        "precision": prec,
        "pass": frob == expected,
    }
