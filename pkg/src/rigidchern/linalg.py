"""Row-space computations over the chain ring Z/p^k.

The Howell form of a matrix over Z/p^k is an echelon form whose pivots are
powers of p, normalized so that the rows with leading zeros in the first
``j`` columns generate every element of the row space with that property.
That extra closure (adding ``p**(k - v) * row`` back into the pool after
using a pivot of valuation ``v``) is what makes membership testing by plain
top-down reduction correct.

Applying the form to ``[G | I]`` tracks, for each output row, the
combination of input generators that produced it; rows whose left block
vanishes then generate the left kernel of ``G``.
"""

from __future__ import annotations

from dataclasses import dataclass

from .padic import vp


def _val(p: int, x: int, k: int) -> int:
    return k if x == 0 else vp(p, x)


def howell_form(rows: list[list[int]], p: int, k: int) -> list[list[int]]:
    """Howell normal form of the row space spanned by ``rows`` (entries mod p^k).

    Pivots are exactly ``p**v``; entries above a pivot are reduced modulo it.
    """
    m = p**k
    if not rows:
        return []
    ncols = len(rows[0])
    pool = [[x % m for x in r] for r in rows]
    pool = [r for r in pool if any(r)]
    result: list[tuple[int, int, list[int]]] = []  # (col, valuation, row)
    for col in range(ncols):
        best = None
        best_v = k
        for idx, r in enumerate(pool):
            if r[col]:
                v = vp(p, r[col])
                if v < best_v:
                    best, best_v = idx, v
                    if v == 0:
                        break
        if best is None:
            continue
        piv = pool.pop(best)
        unit = piv[col] // p**best_v
        inv = pow(unit, -1, m)
        piv = [(x * inv) % m for x in piv]
        q = p**best_v
        nxt = []
        for r in pool:
            if r[col]:
                f = r[col] // q
                r = [(a - f * b) % m for a, b in zip(r, piv)]
            if any(r):
                nxt.append(r)
        if best_v:
            extra = [(x * p ** (k - best_v)) % m for x in piv]
            if any(extra):
                nxt.append(extra)
        pool = nxt
        result.append((col, best_v, piv))
    # Reduce entries above each pivot into [0, p^v).
    for i in range(len(result) - 1, -1, -1):
        col, v, piv = result[i]
        q = p**v
        for j in range(i):
            cj, vj, rj = result[j]
            f = rj[col] // q
            if f:
                result[j] = (cj, vj, [(a - f * b) % m for a, b in zip(rj, piv)])
    return [r for _, _, r in result]


def module_length(rows: list[list[int]], p: int, k: int) -> int:
    """Composition length of the submodule of (Z/p^k)^n generated by ``rows``."""
    total = 0
    for r in howell_form(rows, p, k):
        lead = next(x for x in r if x)
        total += k - vp(p, lead)
    return total


@dataclass
class RowSpace:
    """Howell form of a generator matrix with the combination that produced each row."""

    p: int
    k: int
    n_gens: int
    ncols: int
    pivots: list[tuple[int, int, list[int], list[int]]]  # (col, v, row, combo)
    kernel: list[list[int]]

    @classmethod
    def build(cls, gens: list[list[int]], ncols: int, p: int, k: int) -> RowSpace:
        n = len(gens)
        aug = [list(g) + [int(i == j) for j in range(n)] for i, g in enumerate(gens)]
        form = howell_form(aug, p, k) if aug else []
        pivots, kernel = [], []
        for row in form:
            left, right = row[:ncols], row[ncols:]
            lead = next((c for c, x in enumerate(left) if x), None)
            if lead is None:
                kernel.append(right)
            else:
                pivots.append((lead, vp(p, left[lead]), left, right))
        return cls(p, k, n, ncols, pivots, kernel)

    def solve(self, b: list[int]) -> list[int] | None:
        """Coefficients ``c`` with ``sum c_i gens_i == b`` mod p^k, or None."""
        m = self.p**self.k
        resid = [x % m for x in b]
        coeffs = [0] * self.n_gens
        for col, v, row, combo in self.pivots:
            x = resid[col]
            if not x:
                continue
            q = self.p**v
            if x % q:
                return None
            f = x // q
            resid = [(a - f * r) % m for a, r in zip(resid, row)]
            coeffs = [(a + f * c) % m for a, c in zip(coeffs, combo)]
        if any(resid):
            return None
        return coeffs

    def length(self) -> int:
        return sum(self.k - v for _, v, _, _ in self.pivots)

    def echelon(self) -> list[list[int]]:
        return [row for _, _, row, _ in self.pivots]


def free_rank_of_homology(incoming: list[list[int]], outgoing: list[list[int]], dim: int, p: int, k: int) -> int:
    """Number of Z/p^k summands of ``ker(out) / im(in)`` on ``(Z/p^k)^dim``.

    ``incoming`` are generators of the image (vectors of length ``dim``);
    ``outgoing`` are the images of the ``dim`` basis vectors.  A module over
    Z/p^k has as many free summands as the length of ``p**(k-1) * M``.
    """
    if dim == 0:
        return 0
    if outgoing and len(outgoing[0]):
        ker = RowSpace.build(outgoing, len(outgoing[0]), p, k).kernel
    else:
        ker = [[int(i == j) for j in range(dim)] for i in range(dim)]
    m = p**k
    scaled = [[(x * p ** (k - 1)) % m for x in r] for r in ker]
    return module_length(scaled + list(incoming), p, k) - module_length(list(incoming), p, k)
