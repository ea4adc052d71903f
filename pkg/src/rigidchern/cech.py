"""The Cech-de Rham bicomplex of the standard cover and its total complex.

A total cochain of degree ``n`` assigns to each Cech ``p``-simplex a form of
degree ``n - p``, written in the coordinates of the simplex's smallest
chart.  The differential is ``Delta = delta + (-1)**p d``.

All three maps (Cech differential, exterior derivative, chart changes)
preserve torus weight, so the complex is the direct sum of its weight
blocks, each a small complex of free Z/p^k-modules with integer matrices.
Exactness questions are answered block by block with Howell forms.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from .charts import ChartedSpace, DiffForm, Exponent, SpaceDescriptor, Wedge, build_space, d, dlog_witness, monomial_unit
from .errors import NotClosed, NotInSpan, PrecisionExhausted, UnsupportedSpace, WindowTooSmall
from .linalg import RowSpace, free_rank_of_homology, module_length
from .padic import PAdicContext, PAdicElem

Simplex = tuple[int, ...]
Weight = tuple[int, ...]


# ---------------------------------------------------------------------------
# cochains


@dataclass
class Cochain:
    """One bidegree ``(p, q)``: a form of degree ``q`` on every ``p``-simplex (missing = 0)."""

    space: ChartedSpace
    p: int
    q: int
    values: dict[Simplex, DiffForm] = field(default_factory=dict)

    def __getitem__(self, simplex: Simplex) -> DiffForm:
        simplex = tuple(simplex)
        if simplex in self.values:
            return self.values[simplex]
        return self.space.zero_form(simplex[0], self.q)

    def is_zero(self) -> bool:
        return all(f.is_zero() for f in self.values.values())


def delta(c: Cochain) -> Cochain:
    """Alternating-sum Cech differential, restrictions through chart transitions."""
    space = c.space
    if c.p + 1 >= space.n_charts:
        raise ValueError(f"no Cech {c.p + 1}-simplices on a cover with {space.n_charts} opens")
    out: dict[Simplex, DiffForm] = {}
    for tau in space.simplices(c.p + 1):
        acc = None
        for l in range(len(tau)):
            face = tau[:l] + tau[l + 1:]
            if face not in c.values:
                continue
            f = space.transition(face[0], tau[0], c.values[face])
            f = f if l % 2 == 0 else -f
            acc = f if acc is None else acc + f
        if acc is not None and not acc.is_zero():
            out[tau] = acc
    return Cochain(space, c.p + 1, c.q, out)


class TotalCochain:
    """Element of the total complex; ``prec`` is the precision floor of all entries."""

    def __init__(self, space: ChartedSpace, degree: int, values: Mapping[Simplex, DiffForm] | None = None, prec: int | None = None):
        self.space = space
        self.degree = degree
        floor = space.ctx.N if prec is None else prec
        vals: dict[Simplex, DiffForm] = {}
        for s, f in (values or {}).items():
            s = tuple(s)
            if f.degree != degree - (len(s) - 1) or f.chart != s[0]:
                raise ValueError(f"entry on {s} has form degree {f.degree} / chart {f.chart}")
            floor = min(floor, f.prec)
            vals[s] = f
        self.prec = floor
        self.values = {s: f.with_prec(floor) for s, f in vals.items() if not f.with_prec(floor).is_zero()}

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, space: ChartedSpace, degree: int, prec: int | None = None) -> TotalCochain:
        return cls(space, degree, {}, prec)

    @classmethod
    def unit(cls, space: ChartedSpace) -> TotalCochain:
        """The degree-0 cochain equal to 1 on every chart."""
        return cls(space, 0, {(i,): space.function_form(space.constant(i, 1)) for i in range(space.n_charts)})

    @classmethod
    def from_components(cls, space: ChartedSpace, degree: int, components: Iterable[Cochain]) -> TotalCochain:
        vals: dict[Simplex, DiffForm] = {}
        for c in components:
            if c.p + c.q != degree:
                raise ValueError(f"component ({c.p},{c.q}) does not have total degree {degree}")
            vals.update(c.values)
        return cls(space, degree, vals)

    # -- views -------------------------------------------------------------

    def component(self, p: int, q: int | None = None) -> Cochain:
        q = self.degree - p if q is None else q
        if p + q != self.degree:
            raise ValueError("bidegree does not match total degree")
        return Cochain(self.space, p, q, {s: f for s, f in self.values.items() if len(s) == p + 1})

    @property
    def components(self) -> dict[tuple[int, int], Cochain]:
        out = {}
        for p in range(min(self.degree, self.space.n_charts - 1) + 1):
            q = self.degree - p
            if q <= self.space.dim:
                out[(p, q)] = self.component(p, q)
        return out

    def __getitem__(self, simplex: Simplex) -> DiffForm:
        simplex = tuple(simplex)
        if simplex in self.values:
            return self.values[simplex]
        q = self.degree - (len(simplex) - 1)
        return self.space.zero_form(simplex[0], max(0, min(q, self.space.dim)), self.prec)

    # -- arithmetic --------------------------------------------------------

    def _same(self, other: TotalCochain) -> None:
        if other.space is not self.space and other.space.key() != self.space.key():
            raise ValueError("cochains on different spaces")
        if other.degree != self.degree:
            raise ValueError(f"degree mismatch {self.degree} vs {other.degree}")

    def __add__(self, other: TotalCochain) -> TotalCochain:
        self._same(other)
        out = dict(self.values)
        for s, f in other.values.items():
            out[s] = out[s] + f if s in out else f
        return TotalCochain(self.space, self.degree, out, min(self.prec, other.prec))

    def __neg__(self) -> TotalCochain:
        return TotalCochain(self.space, self.degree, {s: -f for s, f in self.values.items()}, self.prec)

    def __sub__(self, other: TotalCochain) -> TotalCochain:
        return self + (-other)

    def scale(self, c: int | PAdicElem) -> TotalCochain:
        prec = min(self.prec, c.prec) if isinstance(c, PAdicElem) else self.prec
        return TotalCochain(self.space, self.degree, {s: f.scale(c) for s, f in self.values.items()}, prec)

    def __mul__(self, c):
        if isinstance(c, (int, PAdicElem)):
            return self.scale(c)
        return NotImplemented

    __rmul__ = __mul__

    def with_prec(self, prec: int) -> TotalCochain:
        return TotalCochain(self.space, self.degree, self.values, min(prec, self.prec))

    def is_zero(self) -> bool:
        return not self.values

    def __eq__(self, other):
        if not isinstance(other, TotalCochain):
            return NotImplemented
        if other.degree != self.degree:
            return False
        return (self - other).is_zero()

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self):
        return f"TotalCochain(degree={self.degree}, entries={len(self.values)}, prec={self.prec})"

    def max_abs_exponent(self) -> int:
        return max((abs(x) for f in self.values.values() for _, e, _ in f.monomials() for x in e), default=0)

    # -- serialization -----------------------------------------------------

    def to_json(self) -> dict:
        return {
            "space": self.space.descriptor.to_json(),
            "p": self.space.ctx.p,
            "N": self.space.ctx.N,
            "window": self.space.window,
            "degree": self.degree,
            "prec": self.prec,
            "entries": [[list(s), f.to_json()] for s, f in sorted(self.values.items())],
        }

    @classmethod
    def from_json(cls, data: Mapping, space: ChartedSpace | None = None) -> TotalCochain:
        if space is None:
            ctx = PAdicContext(int(data["p"]), int(data["N"]))
            space = build_space(SpaceDescriptor.from_json(data["space"]), ctx, int(data.get("window", 12)))
        vals = {tuple(s): DiffForm.from_json(space.ctx, space.dim, f) for s, f in data["entries"]}
        return cls(space, int(data["degree"]), vals, int(data["prec"]))


def total_diff(z: TotalCochain) -> TotalCochain:
    """``Delta = delta + (-1)**p d`` on the total complex."""
    space = z.space
    out: dict[Simplex, DiffForm] = {}

    def push(s: Simplex, f: DiffForm):
        if f.is_zero():
            return
        out[s] = out[s] + f if s in out else f

    for sigma, form in z.values.items():
        p = len(sigma) - 1
        if form.degree < space.dim:
            df = d(form)
            push(sigma, df if p % 2 == 0 else -df)
        for c in range(space.n_charts):
            if c in sigma:
                continue
            tau = tuple(sorted(sigma + (c,)))
            l = tau.index(c)
            f = space.transition(sigma[0], tau[0], form)
            push(tau, f if l % 2 == 0 else -f)
    return TotalCochain(space, z.degree + 1, out, z.prec)


def cup(a: TotalCochain, b: TotalCochain) -> TotalCochain:
    """Alexander-Whitney product with sign ``(-1)**(q_a * p_b)``."""
    if a.space.key() != b.space.key():
        raise ValueError("cup of cochains on different spaces")
    space = a.space
    n = a.degree + b.degree
    prec = min(a.prec, b.prec)
    by_first: dict[int, list[tuple[Simplex, DiffForm]]] = {}
    for s, f in b.values.items():
        by_first.setdefault(s[0], []).append((s, f))
    out: dict[Simplex, DiffForm] = {}
    for sa, fa in a.values.items():
        qa = fa.degree
        for sb, fb in by_first.get(sa[-1], ()):
            if qa + fb.degree > space.dim:
                continue
            pb = len(sb) - 1
            tau = sa + sb[1:]
            fb_here = space.transition(sb[0], sa[0], fb)
            term = fa.wedge(fb_here)
            if (qa * pb) % 2:
                term = -term
            if term.is_zero():
                continue
            out[tau] = out[tau] + term if tau in out else term
    return TotalCochain(space, n, out, prec)


# ---------------------------------------------------------------------------
# reference classes


def hyperplane_cocycle(space: ChartedSpace) -> TotalCochain:
    """``c_1`` of the pullback of O(1) from the base, with monomial lifts ``x_j / x_i``.

    On P^n this is the hyperplane class ``h``; on a bundle it is its
    pullback.  Its triangle terms vanish because monomial lifts multiply to
    exactly 1.
    """
    vals = {}
    for s in space.simplices(1):
        i, j = _base_index(space, s[0]), _base_index(space, s[1])
        if i == j:
            continue
        chart = space.charts[s[0]]
        e = [0] * space.dim
        e[chart.coords.index(j)] = 1
        vals[s] = dlog_witness(monomial_unit(space, s[0], tuple(e)))
    return TotalCochain(space, 2, vals)


def _base_index(space: ChartedSpace, chart: int) -> int:
    return chart // space.descriptor.rank if space.descriptor.kind == "ProjBundle" else chart


def cup_power(z: TotalCochain, k: int) -> TotalCochain:
    """Left-nested ``z ∪ (z ∪ ...)``; ``k = 0`` gives the unit cochain."""
    out = TotalCochain.unit(z.space)
    for _ in range(k):
        out = cup(z, out) if out.degree else z
    return out


# ---------------------------------------------------------------------------
# weight blocks


def weight_decomposition(z: TotalCochain) -> dict[Weight, dict[tuple[Simplex, Wedge, Exponent], int]]:
    space = z.space
    out: dict[Weight, dict] = {}
    for s, f in z.values.items():
        for J, e, c in f.monomials():
            w = space.weight(s[0], e, J)
            out.setdefault(w, {})[(s, J, e)] = c
    return out


@lru_cache(maxsize=None)
def _block_basis(space: ChartedSpace, w: Weight, degree: int) -> tuple[tuple[tuple[Simplex, Wedge, Exponent], ...], dict]:
    basis = []
    if degree >= 0:
        for p in range(min(degree, space.n_charts - 1) + 1):
            q = degree - p
            if q > space.dim:
                continue
            for s in space.simplices(p):
                for J in itertools.combinations(range(space.dim), q):
                    e = space.exponent_for_weight(s[0], w, J)
                    if space.is_regular_monomial(s, e):
                        basis.append((s, J, e))
    basis = tuple(basis)
    return basis, {b: i for i, b in enumerate(basis)}


def _diff_monomial(space: ChartedSpace, s: Simplex, J: Wedge, e: Exponent) -> dict[tuple[Simplex, Wedge, Exponent], int]:
    out: dict = {}
    p = len(s) - 1
    sign_p = -1 if p % 2 else 1
    for k in range(space.dim):
        if k in J or not e[k]:
            continue
        sgn = -1 if sum(1 for j in J if j < k) % 2 else 1
        K = tuple(sorted(J + (k,)))
        ee = list(e)
        ee[k] -= 1
        key = (s, K, tuple(ee))
        out[key] = out.get(key, 0) + sign_p * sgn * e[k]
    for c in range(space.n_charts):
        if c in s:
            continue
        tau = tuple(sorted(s + (c,)))
        l = tau.index(c)
        sgn = -1 if l % 2 else 1
        for ee, K, m in space.transition_monomial(s[0], tau[0], e, J):
            key = (tau, K, ee)
            out[key] = out.get(key, 0) + sgn * m
    return {k: v for k, v in out.items() if v}


@lru_cache(maxsize=None)
def _block_differential(space: ChartedSpace, w: Weight, degree: int) -> tuple[tuple[int, ...], ...]:
    """Rows: images under Delta of the degree-``degree`` basis, in degree+1 coordinates."""
    src, _ = _block_basis(space, w, degree)
    dst, index = _block_basis(space, w, degree + 1)
    rows = []
    for s, J, e in src:
        row = [0] * len(dst)
        for key, c in _diff_monomial(space, s, J, e).items():
            row[index[key]] += c
        rows.append(tuple(row))
    return tuple(rows)


@lru_cache(maxsize=4096)
def _image_space(space: ChartedSpace, w: Weight, degree: int, k: int) -> RowSpace:
    """Howell data of ``Delta(C^{degree-1}_w)`` inside ``C^{degree}_w`` modulo p^k."""
    gens = [list(r) for r in _block_differential(space, w, degree - 1)]
    ncols = len(_block_basis(space, w, degree)[0])
    return RowSpace.build(gens, ncols, space.ctx.p, k)


def _vector(block: Mapping, index: Mapping, size: int) -> list[int]:
    v = [0] * size
    for key, c in block.items():
        v[index[key]] = c
    return v


def _cochain_from_block(space: ChartedSpace, degree: int, basis, coeffs: Sequence[int], prec: int) -> dict[Simplex, dict[Wedge, dict[Exponent, int]]]:
    out: dict = {}
    for (s, J, e), c in zip(basis, coeffs):
        if c:
            out.setdefault(s, {}).setdefault(J, {})[e] = c
    return out


def _assemble(space: ChartedSpace, degree: int, raw: Mapping, prec: int) -> TotalCochain:
    vals = {}
    for s, comps in raw.items():
        q = degree - (len(s) - 1)
        vals[s] = DiffForm.from_raw(space.ctx, s[0], space.dim, q, comps, prec)
    return TotalCochain(space, degree, vals, prec)


def _merge_raw(target: dict, raw: Mapping) -> None:
    for s, comps in raw.items():
        ts = target.setdefault(s, {})
        for J, terms in comps.items():
            tj = ts.setdefault(J, {})
            for e, c in terms.items():
                tj[e] = tj.get(e, 0) + c


# ---------------------------------------------------------------------------
# solving


@dataclass
class CoboundaryWitness:
    """``w`` with ``Delta(w) == target`` at precision ``precision``."""

    w: TotalCochain
    certified: bool
    precision: int

    def to_json(self) -> dict:
        return {"exact": True, "precision": self.precision, "certified": self.certified, "witness": self.w.to_json()}


@dataclass
class NotExact:
    """Certificate that a closed cochain is not a coboundary: the failing weight block."""

    weight: Weight
    precision: int

    exact = False

    def to_json(self) -> dict:
        return {"exact": False, "precision": self.precision, "weight": list(self.weight)}


def _check_closed(z: TotalCochain) -> None:
    dz = total_diff(z)
    if not dz.is_zero():
        raise NotClosed(f"Delta(z) has {len(dz.values)} nonzero entries")


def _working_precision(z: TotalCochain) -> int:
    if z.prec <= 0:
        raise PrecisionExhausted("cochain carries no precision")
    return z.prec


def _window_of(blocks: Iterable[Weight]) -> int:
    return max((abs(x) for w in blocks for x in w), default=0)


def solve_coboundary(z: TotalCochain, window: int | None = None) -> CoboundaryWitness | NotExact:
    """Find ``w`` with ``Delta(w) = z`` or certify that none exists.

    The verdict is computed on the weight box of half-width ``D`` and of
    ``D + 2`` (``D`` at least the space window and large enough to hold
    ``z``); disagreeing verdicts raise WindowTooSmall.
    """
    space = z.space
    _check_closed(z)
    k = _working_precision(z)
    blocks = weight_decomposition(z)
    D = max(window or space.window, _window_of(blocks))

    def verdict(box: int):
        raw: dict = {}
        for w in sorted(blocks):
            if _window_of([w]) > box:
                continue
            basis, index = _block_basis(space, w, z.degree)
            b = _vector(blocks[w], index, len(basis))
            rs = _image_space(space, w, z.degree, k)
            sol = rs.solve(b)
            if sol is None:
                return NotExact(w, k)
            src, _ = _block_basis(space, w, z.degree - 1)
            _merge_raw(raw, _cochain_from_block(space, z.degree - 1, src, sol, k))
        return raw

    first = verdict(D)
    second = verdict(D + 2)
    if isinstance(first, NotExact) != isinstance(second, NotExact):
        raise WindowTooSmall(f"exactness verdict changes between windows {D} and {D + 2}")
    if isinstance(first, NotExact):
        return first
    w = _assemble(space, z.degree - 1, first, k) if z.degree >= 1 else TotalCochain.zero(space, max(z.degree - 1, 0), k)
    ok = (total_diff(w) - z).is_zero() and all(space.is_regular(f, s) for s, f in w.values.items())
    if not ok:
        raise AssertionError("coboundary witness failed its post-check")
    return CoboundaryWitness(w, True, k)


def is_exact(z: TotalCochain) -> bool:
    return isinstance(solve_coboundary(z), CoboundaryWitness)


@dataclass
class SpanSolution:
    coefficients: list[PAdicElem]
    witness: TotalCochain
    precision: int
    unique: bool


def solve_in_span(z: TotalCochain, classes: Sequence[TotalCochain]) -> SpanSolution:
    """Coefficients ``c`` with ``z - sum c_i classes_i`` exact.

    Weight blocks touched by some class are solved jointly; the rest must be
    exact on their own.  ``unique`` reports whether the classes are
    independent free generators modulo coboundaries on the touched blocks.
    """
    space = z.space
    for c in classes:
        if c.degree != z.degree:
            raise ValueError("class degree does not match the cochain")
    _check_closed(z)
    k = min([z.prec] + [c.prec for c in classes])
    if k <= 0:
        raise PrecisionExhausted("no precision left")
    p = space.ctx.p
    blocks = weight_decomposition(z)
    class_blocks = [weight_decomposition(c) for c in classes]
    touched = sorted(set().union(*[set(cb) for cb in class_blocks]) if classes else set())
    raw: dict = {}
    # independent blocks
    for w in sorted(blocks):
        if w in touched:
            continue
        basis, index = _block_basis(space, w, z.degree)
        sol = _image_space(space, w, z.degree, k).solve(_vector(blocks[w], index, len(basis)))
        if sol is None:
            raise NotInSpan(f"weight block {w} is not exact and no class reaches it")
        src, _ = _block_basis(space, w, z.degree - 1)
        _merge_raw(raw, _cochain_from_block(space, z.degree - 1, src, sol, k))
    # joint system on touched blocks
    offsets, total = {}, 0
    for w in touched:
        offsets[w] = total
        total += len(_block_basis(space, w, z.degree)[0])
    src_offsets, src_total = {}, 0
    for w in touched:
        src_offsets[w] = src_total
        src_total += len(_block_basis(space, w, z.degree - 1)[0])

    def joint(block_map: Mapping) -> list[int]:
        v = [0] * total
        for w, blk in block_map.items():
            _, index = _block_basis(space, w, z.degree)
            for key, c in blk.items():
                v[offsets[w] + index[key]] = c
        return v

    gens = [joint(cb) for cb in class_blocks]
    for w in touched:
        for row in _block_differential(space, w, z.degree - 1):
            v = [0] * total
            v[offsets[w]:offsets[w] + len(row)] = row
            gens.append(v)
    target = joint({w: blocks[w] for w in touched if w in blocks})
    rs = RowSpace.build(gens, total, p, k)
    sol = rs.solve(target)
    if sol is None:
        raise NotInSpan("cochain is not a combination of the given classes modulo coboundaries")
    n_cls = len(classes)
    for w in touched:
        src, _ = _block_basis(space, w, z.degree - 1)
        part = sol[n_cls + src_offsets[w]: n_cls + src_offsets[w] + len(src)]
        _merge_raw(raw, _cochain_from_block(space, z.degree - 1, src, part, k))
    im_len = module_length(gens[n_cls:], p, k) if gens[n_cls:] else 0
    unique = module_length(gens, p, k) - im_len == n_cls * k
    witness = _assemble(space, z.degree - 1, raw, k)
    coeffs = [PAdicElem(space.ctx, c, k) for c in sol[:n_cls]]
    return SpanSolution(coeffs, witness, k, unique)


# ---------------------------------------------------------------------------
# classes on P^n


def _require_pn(space: ChartedSpace) -> None:
    if space.descriptor.kind != "Pn":
        raise UnsupportedSpace("class_coeff applies to projective spaces; use proj_bundle.decompose for bundles")


@lru_cache(maxsize=None)
def hyperplane_power(space: ChartedSpace, k: int) -> TotalCochain:
    return cup_power(hyperplane_cocycle(space), k)


def class_coeff(z: TotalCochain, space: ChartedSpace | None = None) -> PAdicElem:
    """``lambda`` with ``z - lambda * h**k`` exact, for closed ``z`` of degree ``2k`` on P^n."""
    space = space or z.space
    _require_pn(space)
    if z.degree % 2 or z.degree > 2 * space.dim:
        raise ValueError(f"degree {z.degree} carries no h-power class on P^{space.dim}")
    k = z.degree // 2
    sol = solve_in_span(z, [hyperplane_power(space, k)])
    if not sol.unique:
        raise NotInSpan("h^k is not a free generator at this precision")
    return sol.coefficients[0]


def residue_coeff(z: TotalCochain, space: ChartedSpace | None = None) -> PAdicElem:
    """Independent residue functional on P^n.

    Reads the coefficient of ``(t_1 ... t_k)**-1 dt_1 ^ ... ^ dt_k`` in the
    ``C^k(Omega^k)`` entry on the simplex ``(0, ..., k)``, normalized by the
    same coefficient of ``h**k``.
    """
    space = space or z.space
    _require_pn(space)
    k = z.degree // 2
    if z.degree % 2 or k > space.dim:
        raise ValueError("residue functional needs even degree <= 2n")
    if k == 0:
        return z[(0,)].component(()).constant_term()
    s = tuple(range(k + 1))
    J = tuple(range(k))
    e = tuple([-1] * k + [0] * (space.dim - k))
    raw = z[s].component(J).coefficient(e)
    ref = hyperplane_power(space, k)[s].component(J).coefficient(e)
    return raw * ref.inverse()


# ---------------------------------------------------------------------------
# Betti numbers


def block_free_ranks(space: ChartedSpace, w: Weight, k: int, degrees: Sequence[int]) -> list[int]:
    p = space.ctx.p
    out = []
    for n in degrees:
        dim = len(_block_basis(space, w, n)[0])
        if dim == 0:
            out.append(0)
            continue
        incoming = [list(r) for r in _block_differential(space, w, n - 1)] if n >= 1 else []
        outgoing = [list(r) for r in _block_differential(space, w, n)]
        out.append(free_rank_of_homology(incoming, outgoing, dim, p, k))
    return out


def total_ranks(space: ChartedSpace, window: int | None = None, k: int | None = None) -> list[int]:
    """Free ranks over Z/p^k of the total-complex cohomology, weights in ``[-D, D]``."""
    D = space.window if window is None else window
    k = space.ctx.N if k is None else k
    degrees = list(range(2 * space.dim + 1))
    totals = [0] * len(degrees)
    for w in itertools.product(range(-D, D + 1), repeat=space.dim):
        for i, r in enumerate(block_free_ranks(space, w, k, degrees)):
            totals[i] += r
    return totals


def betti_ranks(space: ChartedSpace, window: int | None = None) -> list[int]:
    """Ranks at window ``D`` and ``D + 2``; raises WindowTooSmall if they differ."""
    D = space.window if window is None else window
    a = total_ranks(space, D)
    b = total_ranks(space, D + 2)
    if a != b:
        raise WindowTooSmall(f"ranks {a} at window {D} but {b} at window {D + 2}")
    return a
