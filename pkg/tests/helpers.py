"""Random inputs and independent oracles shared by the test modules."""

import itertools
import random
from fractions import Fraction

from rigidchern.cech import TotalCochain, hyperplane_power
from rigidchern.charts import build_space
from rigidchern.padic import PAdicContext

# Lines printed by the acceptance tests, echoed again in the terminal summary.
ACCEPTANCE_LINES = []


def space(name="P2", p=5, N=8, window=12):
    return build_space(name, PAdicContext(p, N), window)


def egcd_inverse(a, m):
    """Inverse of ``a`` modulo ``m`` by the extended Euclidean algorithm."""
    old_r, r = a % m, m
    old_s, s = 1, 0
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
    assert old_r == 1, "not invertible"
    return old_s % m


def log_oracle(u, p, N, terms=200):
    """Residue mod ``p**N`` of the first ``terms`` terms of log(u), summed over the rationals."""
    x = Fraction(u - 1)
    total = Fraction(0)
    power = Fraction(1)
    for n in range(1, terms + 1):
        power *= x
        total += (power / n) if n % 2 else -(power / n)
    m = p**N
    assert total.denominator % p != 0
    return total.numerator * egcd_inverse(total.denominator, m) % m


def factorial_valuation(p, n):
    f = 1
    for j in range(2, n + 1):
        f *= j
    v = 0
    while f % p == 0:
        f //= p
        v += 1
    return v


def random_exponent(sp, simplex, rng, bound=3):
    inv = sp.inverted(simplex)
    return tuple(
        rng.randint(-bound, bound) if k in inv else rng.randint(0, bound) for k in range(sp.dim)
    )


def random_form(sp, simplex, q, rng, terms=2, bound=3):
    """Random q-form regular on the intersection ``simplex`` (in chart ``simplex[0]``)."""
    modulus = sp.ctx.modulus
    comps = {}
    wedges = list(itertools.combinations(range(sp.dim), q))
    for _ in range(terms):
        J = rng.choice(wedges)
        e = random_exponent(sp, simplex, rng, bound)
        sec = sp.section(simplex[0], {e: rng.randrange(modulus)})
        comps[J] = comps[J] + sec if J in comps else sec
    return sp.form(simplex[0], comps, degree=q)


def random_cochain(sp, degree, rng, entries=3, terms=2, bound=3):
    """Random total cochain of the given degree with regular entries."""
    slots = []
    for p in range(0, degree + 1):
        q = degree - p
        if q > sp.dim:
            continue
        slots.extend((s, q) for s in sp.simplices(p))
    values = {}
    for _ in range(entries):
        if not slots:
            break
        s, q = rng.choice(slots)
        f = random_form(sp, s, q, rng, terms, bound)
        values[s] = values[s] + f if s in values else f
    return TotalCochain(sp, degree, values)


def random_class(sp, k, rng, coeff=None):
    """``c * h**k + Delta(w)`` for random ``c`` and ``w``; returns (cochain, c)."""
    from rigidchern.cech import total_diff

    c = rng.randrange(sp.ctx.modulus) if coeff is None else coeff
    z = hyperplane_power(sp, k).scale(c)
    if k > 0:
        z = z + total_diff(random_cochain(sp, 2 * k - 1, rng))
    return z, c


def seeded(seed):
    return random.Random(seed)
