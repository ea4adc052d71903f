"""Standard toric charts of P^n and of projective bundles of split bundles.

Every chart is an affine space whose coordinates are Laurent monomials in
the homogeneous coordinates; all transitions are therefore monomial.  A
chart coordinate is recorded by its exponent row over the coordinates of
the *reference* chart (chart 0), so the transition from chart ``a`` to chart
``b`` is the integer matrix ``M_a @ inv(M_b)``.

Forms are stored in the ``du_J`` basis.  A monomial ``u**e du_J`` on chart
``c`` has torus weight ``(e + 1_J) @ M_c``; weights are preserved by
transitions, by ``d`` and by the Cech differential, which is what lets the
solver work one weight block at a time.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Iterable, Mapping, Sequence

from .errors import NotAUnit, PrecisionExhausted, UnsupportedSpace, ValuationError, WindowOverflow
from .padic import PAdicContext, PAdicElem, log_series_plan, vp

DEFAULT_WINDOW = 12

Exponent = tuple[int, ...]
Wedge = tuple[int, ...]


# ---------------------------------------------------------------------------
# small exact integer matrices


def _mat_inverse(M: Sequence[Sequence[int]]) -> list[list[int]]:
    n = len(M)
    A = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(M)]
    for c in range(n):
        piv = next(r for r in range(c, n) if A[r][c] != 0)
        A[c], A[piv] = A[piv], A[c]
        inv = 1 / A[c][c]
        A[c] = [x * inv for x in A[c]]
        for r in range(n):
            if r != c and A[r][c] != 0:
                f = A[r][c]
                A[r] = [x - f * y for x, y in zip(A[r], A[c])]
    out = [[x for x in row[n:]] for row in A]
    if any(x.denominator != 1 for row in out for x in row):
        raise ValueError("chart matrix is not unimodular")
    return [[int(x) for x in row] for row in out]


def _mat_mul(A, B):
    return [[sum(a * b for a, b in zip(row, col)) for col in zip(*B)] for row in A]


def _vec_mat(v: Sequence[int], M: Sequence[Sequence[int]]) -> Exponent:
    if not M:
        return ()
    return tuple(sum(v[i] * M[i][j] for i in range(len(v))) for j in range(len(M[0])))


def _det(M: Sequence[Sequence[int]]) -> int:
    n = len(M)
    if n == 0:
        return 1
    if n == 1:
        return M[0][0]
    return sum((-1) ** j * M[0][j] * _det([row[:j] + row[j + 1:] for row in M[1:]]) for j in range(n) if M[0][j])


def wedge_sign(J: Wedge, K: Wedge) -> int:
    """Sign of the shuffle sorting ``J + K``; 0 if they overlap."""
    if set(J) & set(K):
        return 0
    inversions = sum(1 for j in J for k in K if j > k)
    return -1 if inversions % 2 else 1


# ---------------------------------------------------------------------------
# spaces


@dataclass(frozen=True)
class SpaceDescriptor:
    """``Pn`` with ``n`` in {1, 2}, or ``ProjBundle`` over P^n of ``O(a_1) + ... + O(a_r)``."""

    kind: str
    n: int
    twists: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "twists", tuple(int(a) for a in self.twists))
        if self.kind not in ("Pn", "ProjBundle"):
            raise UnsupportedSpace(f"unknown space kind {self.kind!r}")
        if self.n not in (1, 2):
            raise UnsupportedSpace(f"base dimension {self.n} not in {{1, 2}}")
        if self.kind == "Pn" and self.twists:
            raise UnsupportedSpace("projective space takes no twists")
        if self.kind == "ProjBundle":
            if len(self.twists) not in (2, 3):
                raise UnsupportedSpace(f"bundle rank {len(self.twists)} not in {{2, 3}}")
            if any(abs(a) > 9 for a in self.twists):
                raise UnsupportedSpace("twists must satisfy |a| <= 9")

    @classmethod
    def projective(cls, n: int) -> SpaceDescriptor:
        return cls("Pn", n)

    @classmethod
    def bundle(cls, base_n: int, twists: Iterable[int]) -> SpaceDescriptor:
        return cls("ProjBundle", base_n, tuple(twists))

    @property
    def rank(self) -> int:
        return len(self.twists) if self.kind == "ProjBundle" else 1

    def to_json(self) -> dict:
        if self.kind == "Pn":
            return {"kind": "Pn", "n": self.n}
        return {"kind": "ProjBundle", "base_n": self.n, "twists": list(self.twists)}

    @classmethod
    def from_json(cls, data: Mapping) -> SpaceDescriptor:
        if data.get("kind") == "Pn":
            return cls("Pn", int(data["n"]))
        if data.get("kind") == "ProjBundle":
            return cls("ProjBundle", int(data["base_n"]), tuple(data["twists"]))
        raise UnsupportedSpace(f"unknown space kind {data.get('kind')!r}")

    def label(self) -> str:
        if self.kind == "Pn":
            return f"P{self.n}"
        return "P(" + "+".join(f"O({a})" for a in self.twists) + f") over P{self.n}"


@dataclass(frozen=True)
class Chart:
    index: int
    label: str
    nonvanishing: frozenset[int]
    coords: tuple[int, ...]  # homogeneous coordinate carried by each chart variable
    matrix: tuple[tuple[int, ...], ...]  # rows: variables in reference coordinates
    inverse: tuple[tuple[int, ...], ...]


@dataclass(eq=False)
class ChartedSpace:
    """Charts, nerve and monomial transition data of a supported space."""

    descriptor: SpaceDescriptor
    ctx: PAdicContext
    window: int = DEFAULT_WINDOW
    charts: list[Chart] = field(init=False)
    homogeneous: list[str] = field(init=False)

    # Twist convention: y_b has weight +a_b under the base torus, so that
    # xi**r decomposes with c_i = e_i(a_1, ..., a_r).
    TWIST_SIGN = 1

    def __post_init__(self):
        if self.window < 1:
            raise UnsupportedSpace("window must be positive")
        desc = self.descriptor
        n = desc.n
        if desc.kind == "Pn":
            self.homogeneous = [f"x{i}" for i in range(n + 1)]
            specs = []
            for i in range(n + 1):
                rows = []
                coords = []
                for j in range(n + 1):
                    if j == i:
                        continue
                    vec = [0] * (n + 1)
                    vec[j] += 1
                    vec[i] -= 1
                    rows.append(vec)
                    coords.append(j)
                specs.append((f"U{i}", frozenset({i}), tuple(coords), rows))
            ref_coords = list(range(1, n + 1))
        else:
            r = desc.rank
            a = desc.twists
            self.homogeneous = [f"x{i}" for i in range(n + 1)] + [f"y{b}" for b in range(r)]
            y = lambda b: n + 1 + b  # noqa: E731
            specs = []
            for i in range(n + 1):
                for aa in range(r):
                    rows, coords = [], []
                    for j in range(n + 1):
                        if j == i:
                            continue
                        vec = [0] * (n + 1 + r)
                        vec[j] += 1
                        vec[i] -= 1
                        rows.append(vec)
                        coords.append(j)
                    for b in range(r):
                        if b == aa:
                            continue
                        vec = [0] * (n + 1 + r)
                        vec[y(b)] += 1
                        vec[y(aa)] -= 1
                        vec[i] += self.TWIST_SIGN * (a[b] - a[aa])
                        rows.append(vec)
                        coords.append(y(b))
                    specs.append((f"U{i},{aa}", frozenset({i, y(aa)}), tuple(coords), rows))
            ref_coords = list(range(1, n + 1)) + [y(b) for b in range(1, r)]
        self.ref_coords = tuple(ref_coords)
        self._ref_rows = [row for row in specs[0][3]]
        self.charts = []
        for idx, (label, nonvan, coords, rows) in enumerate(specs):
            M = [[vec[h] for h in ref_coords] for vec in rows]
            Minv = _mat_inverse(M)
            self.charts.append(
                Chart(idx, label, nonvan, coords, tuple(map(tuple, M)), tuple(map(tuple, Minv)))
            )

    # -- combinatorics -----------------------------------------------------

    @property
    def dim(self) -> int:
        return len(self.charts[0].coords)

    @property
    def n_charts(self) -> int:
        return len(self.charts)

    @cached_property
    def nerve(self) -> dict[int, list[tuple[int, ...]]]:
        """Simplices by Cech degree; every intersection of standard opens is nonempty."""
        idx = range(self.n_charts)
        return {p: list(itertools.combinations(idx, p + 1)) for p in range(self.n_charts)}

    def simplices(self, p: int) -> list[tuple[int, ...]]:
        return self.nerve.get(p, [])

    @lru_cache(maxsize=None)
    def inverted(self, simplex: tuple[int, ...]) -> frozenset[int]:
        """Variable positions of chart ``simplex[0]`` that are units on the intersection."""
        chart = self.charts[simplex[0]]
        nonvan = frozenset().union(*(self.charts[c].nonvanishing for c in simplex))
        return frozenset(k for k, h in enumerate(chart.coords) if h in nonvan)

    @lru_cache(maxsize=None)
    def transition_matrix(self, src: int, dst: int) -> tuple[tuple[int, ...], ...]:
        """Exponent rows of ``src`` variables in ``dst`` variables."""
        A = _mat_mul(self.charts[src].matrix, self.charts[dst].inverse)
        return tuple(map(tuple, A))

    @lru_cache(maxsize=None)
    def _minors(self, src: int, dst: int, J: Wedge) -> tuple[tuple[Wedge, int], ...]:
        A = self.transition_matrix(src, dst)
        out = []
        for K in itertools.combinations(range(self.dim), len(J)):
            m = _det([[A[j][k] for k in K] for j in J])
            if m:
                out.append((K, m))
        return tuple(out)

    def weight(self, chart: int, e: Exponent, J: Wedge = ()) -> Exponent:
        v = list(e)
        for j in J:
            v[j] += 1
        return _vec_mat(v, self.charts[chart].matrix)

    def exponent_for_weight(self, chart: int, w: Exponent, J: Wedge = ()) -> Exponent:
        v = list(_vec_mat(w, self.charts[chart].inverse))
        for j in J:
            v[j] -= 1
        return tuple(v)

    def character_exponent(self, chart: int, vec: Sequence[int]) -> Exponent:
        """Chart exponents of the Laurent monomial in homogeneous coordinates ``vec``.

        Raises ValueError unless ``vec`` is a torus character, i.e. a genuine
        function on the space (degree zero in every grading).
        """
        refc = [vec[h] for h in self.ref_coords]
        rebuilt = [sum(c * row[h] for c, row in zip(refc, self._ref_rows)) for h in range(len(vec))]
        if list(vec) != rebuilt:
            raise ValueError(f"{list(vec)} is not a function on {self.descriptor.label()}")
        return _vec_mat(refc, self.charts[chart].inverse)

    def is_regular_monomial(self, simplex: tuple[int, ...], e: Exponent) -> bool:
        inv = self.inverted(simplex)
        return all(x >= 0 for k, x in enumerate(e) if k not in inv)

    def transition_monomial(self, src: int, dst: int, e: Exponent, J: Wedge = ()) -> list[tuple[Exponent, Wedge, int]]:
        """Image of ``u**e du_J`` under the change of charts, as ``(e', K, coeff)`` terms."""
        if src == dst:
            return [(e, J, 1)]
        A = self.transition_matrix(src, dst)
        v = list(e)
        for j in J:
            v[j] += 1
        base = _vec_mat(v, A)
        out = []
        for K, m in self._minors(src, dst, J):
            ee = list(base)
            for k in K:
                ee[k] -= 1
            out.append((tuple(ee), K, m))
        return out

    def key(self) -> tuple:
        return (self.descriptor, self.ctx.p)

    # -- constructors ------------------------------------------------------

    def check_window(self, e: Exponent) -> None:
        if any(abs(x) > self.window for x in e):
            raise WindowOverflow(f"exponent {e} leaves window [-{self.window}, {self.window}]")

    def section(self, chart: int, terms: Mapping[Exponent, int] | Iterable[tuple[Exponent, int]] = (), prec: int | None = None) -> LaurentSection:
        items = terms.items() if isinstance(terms, Mapping) else terms
        coeffs: dict[Exponent, int] = {}
        for e, c in items:
            e = tuple(e)
            if len(e) != self.dim:
                raise ValueError(f"exponent {e} has wrong length for dimension {self.dim}")
            self.check_window(e)
            coeffs[e] = coeffs.get(e, 0) + int(c)
        return LaurentSection(self.ctx, chart, self.dim, coeffs, self.ctx.N if prec is None else prec)

    def constant(self, chart: int, value: int = 1, prec: int | None = None) -> LaurentSection:
        return self.section(chart, {(0,) * self.dim: value}, prec)

    def monomial(self, chart: int, e: Exponent, coeff: int = 1) -> LaurentSection:
        return self.section(chart, {tuple(e): coeff})

    def variable(self, chart: int, k: int) -> LaurentSection:
        e = [0] * self.dim
        e[k] = 1
        return self.monomial(chart, tuple(e))

    def form(self, chart: int, comps: Mapping[Wedge, LaurentSection], degree: int | None = None) -> DiffForm:
        if degree is None:
            if not comps:
                raise ValueError("degree required for an empty form")
            degree = len(next(iter(comps)))
        return DiffForm.from_sections(self.ctx, chart, self.dim, degree, comps)

    def zero_form(self, chart: int, degree: int, prec: int | None = None) -> DiffForm:
        return DiffForm(self.ctx, chart, self.dim, degree, {}, self.ctx.N if prec is None else prec)

    def function_form(self, s: LaurentSection) -> DiffForm:
        return DiffForm.from_sections(self.ctx, s.chart, self.dim, 0, {(): s})

    # -- maps --------------------------------------------------------------

    def transition(self, from_chart: int, to_chart: int, s):
        """Rewrite a section or form given on ``from_chart`` in the coordinates of ``to_chart``."""
        if isinstance(s, LaurentSection):
            if s.chart != from_chart:
                raise ValueError(f"section lives on chart {s.chart}, not {from_chart}")
            f = self.transition(from_chart, to_chart, self.function_form(s))
            return f.comps.get((), LaurentSection(self.ctx, to_chart, self.dim, {}, s.prec))
        if s.chart != from_chart:
            raise ValueError(f"form lives on chart {s.chart}, not {from_chart}")
        if from_chart == to_chart:
            return s
        acc: dict[Wedge, dict[Exponent, int]] = {}
        for J, sec in s.comps.items():
            for e, c in sec.coeffs.items():
                for ee, K, m in self.transition_monomial(from_chart, to_chart, e, J):
                    self.check_window(ee)
                    bucket = acc.setdefault(K, {})
                    bucket[ee] = bucket.get(ee, 0) + c * m
        return DiffForm.from_raw(self.ctx, to_chart, self.dim, s.degree, acc, s.prec)

    def is_regular(self, form: DiffForm, simplex: tuple[int, ...]) -> bool:
        if form.chart != simplex[0]:
            return False
        return all(self.is_regular_monomial(simplex, e) for sec in form.comps.values() for e in sec.coeffs)


def build_space(desc: SpaceDescriptor | Mapping | str, ctx: PAdicContext | None = None, window: int = DEFAULT_WINDOW) -> ChartedSpace:
    """Charted space for a descriptor, a JSON descriptor, or a name like ``"P2"``."""
    if isinstance(desc, str):
        desc = parse_space_name(desc)
    elif isinstance(desc, Mapping):
        desc = SpaceDescriptor.from_json(desc)
    return _build_cached(desc, ctx or PAdicContext(5, 8), window)


@lru_cache(maxsize=64)
def _build_cached(desc: SpaceDescriptor, ctx: PAdicContext, window: int) -> ChartedSpace:
    return ChartedSpace(desc, ctx, window)


def parse_space_name(name: str) -> SpaceDescriptor:
    name = name.strip().upper()
    if name in ("P1", "P2"):
        return SpaceDescriptor.projective(int(name[1]))
    raise UnsupportedSpace(f"unsupported space {name!r}; expected P1 or P2")


def transition(space: ChartedSpace, from_chart: int, to_chart: int, s):
    return space.transition(from_chart, to_chart, s)


# ---------------------------------------------------------------------------
# sections


class LaurentSection:
    """Sparse Laurent polynomial on one chart with truncated p-adic coefficients.

    Coefficients share one absolute precision ``prec``; residues are kept
    modulo ``p**prec`` and zero residues are pruned.
    """

    __slots__ = ("ctx", "chart", "nvars", "coeffs", "prec")

    def __init__(self, ctx: PAdicContext, chart: int, nvars: int, coeffs: Mapping[Exponent, int], prec: int):
        prec = max(0, min(prec, ctx.N))
        m = ctx.p**prec
        self.ctx = ctx
        self.chart = chart
        self.nvars = nvars
        self.prec = prec
        self.coeffs = {e: c % m for e, c in coeffs.items() if c % m}

    def _like(self, coeffs, prec) -> LaurentSection:
        return LaurentSection(self.ctx, self.chart, self.nvars, coeffs, prec)

    def _check(self, other: LaurentSection) -> None:
        if other.chart != self.chart:
            raise ValueError(f"sections on different charts ({self.chart}, {other.chart})")

    # -- inspection --------------------------------------------------------

    def coefficient(self, e: Exponent) -> PAdicElem:
        return PAdicElem(self.ctx, self.coeffs.get(tuple(e), 0), self.prec)

    def terms(self):
        for e, c in sorted(self.coeffs.items()):
            yield e, PAdicElem(self.ctx, c, self.prec)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __len__(self):
        return len(self.coeffs)

    def min_valuation(self) -> int:
        """Smallest coefficient valuation (``prec`` for the zero section)."""
        if not self.coeffs:
            return self.prec
        return min(vp(self.ctx.p, c) for c in self.coeffs.values())

    def max_abs_exponent(self) -> int:
        return max((abs(x) for e in self.coeffs for x in e), default=0)

    def constant_term(self) -> PAdicElem:
        return self.coefficient((0,) * self.nvars)

    def with_prec(self, prec: int) -> LaurentSection:
        return self._like(self.coeffs, min(prec, self.prec))

    # -- ring operations ---------------------------------------------------

    def __add__(self, other):
        if isinstance(other, int):
            other = self._like({(0,) * self.nvars: other}, self.ctx.N)
        self._check(other)
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            out[e] = out.get(e, 0) + c
        return self._like(out, min(self.prec, other.prec))

    __radd__ = __add__

    def __neg__(self):
        return self._like({e: -c for e, c in self.coeffs.items()}, self.prec)

    def __sub__(self, other):
        if isinstance(other, int):
            return self + (-other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c: int | PAdicElem) -> LaurentSection:
        prec = self.prec
        if isinstance(c, PAdicElem):
            prec = min(prec, c.prec)
            c = c.residue
        return self._like({e: x * c for e, x in self.coeffs.items()}, prec)

    def __mul__(self, other):
        if isinstance(other, (int, PAdicElem)):
            return self.scale(other)
        self._check(other)
        prec = min(self.prec, other.prec)
        m = self.ctx.p**prec
        out: dict[Exponent, int] = {}
        for e1, c1 in self.coeffs.items():
            for e2, c2 in other.coeffs.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = (out.get(e, 0) + c1 * c2) % m
        return self._like(out, prec)

    __rmul__ = __mul__

    def shift(self, e: Exponent) -> LaurentSection:
        """Multiply by the monomial ``u**e``."""
        return self._like({tuple(a + b for a, b in zip(k, e)): c for k, c in self.coeffs.items()}, self.prec)

    def derivative(self, k: int) -> LaurentSection:
        out = {}
        for e, c in self.coeffs.items():
            if e[k]:
                ee = list(e)
                ee[k] -= 1
                out[tuple(ee)] = c * e[k]
        return self._like(out, self.prec)

    def divide_by_p_power(self, v: int) -> LaurentSection:
        if v == 0:
            return self
        q = self.ctx.p**v
        if any(c % q for c in self.coeffs.values()):
            raise ValuationError(f"section not divisible by p^{v}")
        return self._like({e: c // q for e, c in self.coeffs.items()}, self.prec - v)

    def __eq__(self, other):
        if isinstance(other, int):
            other = self._like({(0,) * self.nvars: other}, self.ctx.N)
        if not isinstance(other, LaurentSection):
            return NotImplemented
        if other.chart != self.chart:
            return False
        return (self - other).is_zero()

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self):
        if not self.coeffs:
            return f"LaurentSection(chart={self.chart}, 0 + O(p^{self.prec}))"
        body = " + ".join(f"{c}*u^{e}" for e, c in sorted(self.coeffs.items())[:6])
        more = " + ..." if len(self.coeffs) > 6 else ""
        return f"LaurentSection(chart={self.chart}, {body}{more} + O(p^{self.prec}))"

    # -- series on 1-units -------------------------------------------------

    def is_one_unit(self) -> bool:
        return (self - 1).min_valuation() >= 1

    def inv_one_unit(self) -> LaurentSection:
        """``self**-1`` for a 1-unit, by the truncated geometric series."""
        y = self - 1
        if y.is_zero():
            return self._like({(0,) * self.nvars: 1}, self.prec)
        v = y.min_valuation()
        if v < 1:
            raise NotAUnit("not a 1-unit: some coefficient of u - 1 is a p-adic unit")
        total = self._like({(0,) * self.nvars: 1}, self.prec)
        term = total
        n = 1
        while n * v < self.prec:
            term = -(term * y)
            total = total + term
            n += 1
        return total

    def log_one_unit(self) -> LaurentSection:
        """``log(self)`` for a 1-unit; precision drops by the largest ``v_p(n)`` used."""
        y = self - 1
        if y.is_zero():
            return self._like({}, self.prec)
        v = y.min_valuation()
        if v < 1:
            raise ValuationError("logarithm of a section that is not a 1-unit")
        terms, loss = log_series_plan(self.ctx.p, self.prec, v)
        if self.prec - loss <= 0:
            raise PrecisionExhausted("logarithm consumed all available precision")
        # Powers are taken modulo p**(prec + loss) so the divisions stay exact.
        work = LaurentSection(self.ctx, self.chart, self.nvars, y.coeffs, self.prec)
        p = self.ctx.p
        mod = p ** (self.prec + loss)
        acc: dict[Exponent, int] = {}
        power: dict[Exponent, int] = {(0,) * self.nvars: 1}
        n = 0
        for target in terms:
            while n < target:
                nxt: dict[Exponent, int] = {}
                for e1, c1 in power.items():
                    for e2, c2 in work.coeffs.items():
                        e = tuple(a + b for a, b in zip(e1, e2))
                        nxt[e] = (nxt.get(e, 0) + c1 * c2) % mod
                power = {e: c for e, c in nxt.items() if c}
                n += 1
            e_n = vp(p, n)
            unit_inv = pow(n // p**e_n, -1, mod)
            sign = 1 if n % 2 else -1
            for e, c in power.items():
                acc[e] = acc.get(e, 0) + sign * (c // p**e_n) * unit_inv
        return self._like(acc, self.prec - loss)

    def power(self, k: int) -> LaurentSection:
        if k < 0:
            raise ValueError("negative power of a section; use a unit factorization")
        out = self._like({(0,) * self.nvars: 1}, self.prec)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # -- serialization -----------------------------------------------------

    def to_json(self) -> list:
        return [[list(e), str(c), self.prec] for e, c in sorted(self.coeffs.items())]

    @classmethod
    def from_json(cls, ctx: PAdicContext, chart: int, nvars: int, data: list) -> LaurentSection:
        prec = min((int(t[2]) for t in data), default=ctx.N)
        return cls(ctx, chart, nvars, {tuple(t[0]): int(t[1]) for t in data}, prec)


# ---------------------------------------------------------------------------
# forms


class DiffForm:
    """Degree-``q`` form ``sum_J f_J du_J`` on one chart, one precision for all components."""

    __slots__ = ("ctx", "chart", "nvars", "degree", "comps", "prec")

    def __init__(self, ctx, chart, nvars, degree, comps: Mapping[Wedge, LaurentSection], prec: int):
        if degree > nvars:
            raise ValueError(f"form degree {degree} exceeds dimension {nvars}")
        self.ctx = ctx
        self.chart = chart
        self.nvars = nvars
        self.degree = degree
        self.prec = max(0, min(prec, ctx.N))
        clean = {}
        for J, s in comps.items():
            if len(J) != degree or list(J) != sorted(set(J)):
                raise ValueError(f"bad wedge index {J} for degree {degree}")
            s = s.with_prec(self.prec)
            if not s.is_zero():
                clean[tuple(J)] = s
        self.comps = clean

    @classmethod
    def from_sections(cls, ctx, chart, nvars, degree, comps: Mapping[Wedge, LaurentSection]) -> DiffForm:
        prec = min((s.prec for s in comps.values()), default=ctx.N)
        return cls(ctx, chart, nvars, degree, comps, prec)

    @classmethod
    def from_raw(cls, ctx, chart, nvars, degree, raw: Mapping[Wedge, Mapping[Exponent, int]], prec: int) -> DiffForm:
        comps = {J: LaurentSection(ctx, chart, nvars, c, prec) for J, c in raw.items()}
        return cls(ctx, chart, nvars, degree, comps, prec)

    def _like(self, comps, prec=None, degree=None) -> DiffForm:
        return DiffForm(self.ctx, self.chart, self.nvars, self.degree if degree is None else degree, comps, self.prec if prec is None else prec)

    def is_zero(self) -> bool:
        return not self.comps

    def with_prec(self, prec: int) -> DiffForm:
        return self._like(self.comps, min(prec, self.prec))

    def component(self, J: Wedge) -> LaurentSection:
        return self.comps.get(tuple(J), LaurentSection(self.ctx, self.chart, self.nvars, {}, self.prec))

    def monomials(self):
        """Iterate ``(J, e, residue)`` over all nonzero terms."""
        for J, s in self.comps.items():
            for e, c in s.coeffs.items():
                yield J, e, c

    def __add__(self, other: DiffForm) -> DiffForm:
        if other.chart != self.chart or other.degree != self.degree:
            raise ValueError("adding forms of different charts or degrees")
        prec = min(self.prec, other.prec)
        out = dict(self.comps)
        for J, s in other.comps.items():
            out[J] = out[J] + s if J in out else s
        return self._like(out, prec)

    def __neg__(self):
        return self._like({J: -s for J, s in self.comps.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> DiffForm:
        comps = {J: s.scale(c) for J, s in self.comps.items()}
        prec = min(self.prec, c.prec) if isinstance(c, PAdicElem) else self.prec
        return self._like(comps, prec)

    def __mul__(self, other):
        """Product with a scalar or a function (section)."""
        if isinstance(other, (int, PAdicElem)):
            return self.scale(other)
        if isinstance(other, LaurentSection):
            return self._like({J: s * other for J, s in self.comps.items()}, min(self.prec, other.prec))
        return NotImplemented

    __rmul__ = __mul__

    def wedge(self, other: DiffForm) -> DiffForm:
        if other.chart != self.chart:
            raise ValueError("wedge of forms on different charts")
        q = self.degree + other.degree
        prec = min(self.prec, other.prec)
        if q > self.nvars:
            return _zero_like(self, q, prec)
        out: dict[Wedge, LaurentSection] = {}
        for J, f in self.comps.items():
            for K, g in other.comps.items():
                sgn = wedge_sign(J, K)
                if not sgn:
                    continue
                L = tuple(sorted(J + K))
                term = f * g if sgn > 0 else -(f * g)
                out[L] = out[L] + term if L in out else term
        return DiffForm(self.ctx, self.chart, self.nvars, q, out, prec)

    def __eq__(self, other):
        if not isinstance(other, DiffForm):
            return NotImplemented
        if other.chart != self.chart or other.degree != self.degree:
            return False
        return (self - other).is_zero()

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self):
        if not self.comps:
            return f"DiffForm(chart={self.chart}, q={self.degree}, 0 + O(p^{self.prec}))"
        body = ", ".join(f"du{list(J)}: {len(s)} terms" for J, s in sorted(self.comps.items()))
        return f"DiffForm(chart={self.chart}, q={self.degree}, {body}, prec={self.prec})"

    def to_json(self) -> dict:
        return {
            "chart": self.chart,
            "degree": self.degree,
            "prec": self.prec,
            "components": [[list(J), s.to_json()] for J, s in sorted(self.comps.items())],
        }

    @classmethod
    def from_json(cls, ctx: PAdicContext, nvars: int, data: Mapping) -> DiffForm:
        chart = int(data["chart"])
        comps = {tuple(J): LaurentSection.from_json(ctx, chart, nvars, s) for J, s in data["components"]}
        return cls(ctx, chart, nvars, int(data["degree"]), comps, int(data["prec"]))


def _zero_like(f: DiffForm, degree: int, prec: int) -> DiffForm:
    # Forms above the top degree are identically zero; keep the degree capped
    # so the object stays well formed.
    return DiffForm(f.ctx, f.chart, f.nvars, min(degree, f.nvars), {}, prec)


def d(f: DiffForm) -> DiffForm:
    """Exterior derivative in the ``du_J`` basis."""
    q = f.degree + 1
    if q > f.nvars:
        return _zero_like(f, q, f.prec)
    out: dict[Wedge, dict[Exponent, int]] = {}
    for J, s in f.comps.items():
        for k in range(f.nvars):
            if k in J:
                continue
            sign = -1 if sum(1 for j in J if j < k) % 2 else 1
            L = tuple(sorted(J + (k,)))
            bucket = out.setdefault(L, {})
            for e, c in s.coeffs.items():
                if e[k]:
                    ee = list(e)
                    ee[k] -= 1
                    ee = tuple(ee)
                    bucket[ee] = bucket.get(ee, 0) + sign * e[k] * c
    return DiffForm.from_raw(f.ctx, f.chart, f.nvars, q, out, f.prec)


# ---------------------------------------------------------------------------
# units


@dataclass(frozen=True, eq=False)
class UnitWitness:
    """Factorization ``u = c * u**e * w`` with ``c`` a p-adic unit and ``w`` a 1-unit."""

    constant: int
    exponent: Exponent
    one_unit: LaurentSection

    @property
    def chart(self) -> int:
        return self.one_unit.chart

    @property
    def prec(self) -> int:
        return self.one_unit.prec

    def validate(self) -> None:
        p = self.one_unit.ctx.p
        if self.constant % p == 0:
            raise NotAUnit(f"constant {self.constant} is divisible by p")
        if len(self.exponent) != self.one_unit.nvars:
            raise NotAUnit("exponent vector has the wrong length")
        if not self.one_unit.is_one_unit():
            raise NotAUnit("one-unit factor is not congruent to 1 mod p")

    def section(self) -> LaurentSection:
        return self.one_unit.shift(self.exponent).scale(self.constant)

    def inverse(self) -> UnitWitness:
        s = self.one_unit
        c_inv = pow(self.constant, -1, s.ctx.p**s.prec) if s.prec else 0
        return UnitWitness(c_inv, tuple(-x for x in self.exponent), s.inv_one_unit())

    def inverse_section(self) -> LaurentSection:
        return self.inverse().section()

    def __mul__(self, other: UnitWitness) -> UnitWitness:
        if other.chart != self.chart:
            raise ValueError("multiplying units on different charts")
        return UnitWitness(
            self.constant * other.constant,
            tuple(a + b for a, b in zip(self.exponent, other.exponent)),
            self.one_unit * other.one_unit,
        )

    def power(self, k: int) -> UnitWitness:
        if k < 0:
            return self.inverse().power(-k)
        return UnitWitness(self.constant**k, tuple(k * x for x in self.exponent), self.one_unit.power(k))

    def to_json(self) -> dict:
        return {
            "chart": self.chart,
            "constant": str(self.constant),
            "monomial": list(self.exponent),
            "one_unit": self.one_unit.to_json(),
        }

    @classmethod
    def from_json(cls, ctx: PAdicContext, nvars: int, data: Mapping) -> UnitWitness:
        chart = int(data["chart"])
        w = cls(
            int(data.get("constant", 1)),
            tuple(data["monomial"]),
            LaurentSection.from_json(ctx, chart, nvars, data["one_unit"]),
        )
        w.validate()
        return w


def monomial_unit(space: ChartedSpace, chart: int, e: Exponent, constant: int = 1) -> UnitWitness:
    return UnitWitness(constant, tuple(e), space.constant(chart, 1))


def dlog(u: LaurentSection, witness: UnitWitness) -> DiffForm:
    """``du / u`` for a unit presented as monomial times 1-unit."""
    witness.validate()
    if witness.chart != u.chart or not (witness.section() == u):
        raise NotAUnit("witness does not reproduce the section")
    return dlog_witness(witness)


def dlog_witness(witness: UnitWitness) -> DiffForm:
    w = witness.one_unit
    ctx, chart, n = w.ctx, w.chart, w.nvars
    comps: dict[Wedge, LaurentSection] = {}
    for k, x in enumerate(witness.exponent):
        if x:
            e = [0] * n
            e[k] = -1
            comps[(k,)] = LaurentSection(ctx, chart, n, {tuple(e): x}, ctx.N)
    if not (w - 1).is_zero():
        w_inv = w.inv_one_unit()
        for k in range(n):
            dk = w.derivative(k)
            if dk.is_zero():
                continue
            term = dk * w_inv
            comps[(k,)] = comps[(k,)] + term if (k,) in comps else term
    prec = w.prec
    return DiffForm(ctx, chart, n, 1, comps, prec)


def power_pullback(space: ChartedSpace, f: DiffForm, k: int) -> DiffForm:
    """Pull back along the chart-wise power map ``u -> u**k`` (the k-th power endomorphism of P^n)."""
    if space.descriptor.kind != "Pn":
        raise UnsupportedSpace("power map defined on projective spaces only")
    out: dict[Wedge, dict[Exponent, int]] = {}
    for J, e, c in f.monomials():
        ee = [k * x for x in e]
        for j in J:
            ee[j] += k - 1
        ee = tuple(ee)
        space.check_window(ee)
        bucket = out.setdefault(J, {})
        bucket[ee] = bucket.get(ee, 0) + c * k ** len(J)
    return DiffForm.from_raw(f.ctx, f.chart, f.nvars, f.degree, out, f.prec)
