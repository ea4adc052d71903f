import random

import pytest

from helpers import random_class, random_cochain, random_form, space
from rigidchern.cech import (
    Cochain,
    CoboundaryWitness,
    NotExact,
    TotalCochain,
    betti_ranks,
    class_coeff,
    cup,
    delta,
    hyperplane_cocycle,
    hyperplane_power,
    residue_coeff,
    solve_coboundary,
    total_diff,
)
from rigidchern.charts import d
from rigidchern.errors import NotClosed


def test_delta_of_constant_is_zero():
    sp = space("P2")
    c = Cochain(sp, 0, 0, {(i,): sp.function_form(sp.constant(i, 4)) for i in range(3)})
    assert delta(c).is_zero()


def test_delta_on_p1_example():
    sp = space("P1")
    c = Cochain(sp, 0, 0, {(0,): sp.function_form(sp.variable(0, 0))})
    assert delta(c)[(0, 1)] == -sp.function_form(sp.variable(0, 0))


def test_delta_squared():
    sp = space("P2")
    rng = random.Random(2)
    for _ in range(100):
        c = Cochain(sp, 0, 0, {(i,): random_form(sp, (i,), 0, rng) for i in range(3)})
        assert delta(delta(c)).is_zero()


def test_delta_commutes_with_d():
    sp = space("P2")
    rng = random.Random(4)
    for _ in range(100):
        c = Cochain(sp, 0, 0, {(i,): random_form(sp, (i,), 0, rng) for i in range(3)})
        dc = Cochain(sp, 0, 1, {s: d(f) for s, f in c.values.items()})
        lhs = delta(dc)
        rhs = {s: d(f) for s, f in delta(c).values.items()}
        for s in sp.simplices(1):
            assert lhs[s] == rhs.get(s, sp.zero_form(s[0], 1))


@pytest.mark.parametrize("name", ["P1", "P2"])
def test_total_diff_squared(name):
    sp = space(name)
    rng = random.Random(6)
    for _ in range(100):
        deg = rng.randint(0, 2 * sp.dim - 1)
        z = random_cochain(sp, deg, rng, bound=2)
        assert total_diff(total_diff(z)).is_zero()


def test_total_diff_of_constant():
    sp = space("P2")
    assert total_diff(TotalCochain.unit(sp).scale(3)).is_zero()


def test_total_diff_unfolds_definition():
    sp = space("P2")
    rng = random.Random(8)
    f = random_form(sp, (0, 1), 1, rng)
    z = TotalCochain(sp, 2, {(0, 1): f})
    dz = total_diff(z)
    c = Cochain(sp, 1, 1, {(0, 1): f})
    assert dz.component(2, 1).values.keys() == delta(c).values.keys()
    assert dz[(0, 1, 2)] == delta(c)[(0, 1, 2)]
    assert dz[(0, 1)] == -d(f)


def test_cup_unit():
    sp = space("P2")
    rng = random.Random(10)
    for _ in range(10):
        b = random_cochain(sp, rng.randint(0, 3), rng, bound=2)
        assert cup(TotalCochain.unit(sp), b) == b
        assert cup(b, TotalCochain.unit(sp)) == b


@pytest.mark.parametrize("name", ["P1", "P2"])
def test_leibniz(name):
    sp = space(name)
    rng = random.Random(12)
    for _ in range(50):
        da = rng.randint(0, min(2, 2 * sp.dim - 1))
        db = rng.randint(0, 2 * sp.dim - 1 - da)
        a = random_cochain(sp, da, rng, bound=2)
        b = random_cochain(sp, db, rng, bound=2)
        lhs = total_diff(cup(a, b))
        rhs = cup(total_diff(a), b) + cup(a, total_diff(b)).scale((-1) ** da)
        assert lhs == rhs


def test_cup_associative():
    sp = space("P2")
    rng = random.Random(14)
    for _ in range(20):
        a, b, c = (random_cochain(sp, rng.randint(0, 1), rng, bound=2) for _ in range(3))
        assert cup(cup(a, b), c) == cup(a, cup(b, c))


def test_cup_graded_commutative_up_to_coboundary():
    sp = space("P2")
    rng = random.Random(16)
    for _ in range(5):
        a, _ = random_class(sp, 1, rng)
        b, _ = random_class(sp, 1, rng)
        diff = cup(a, b) - cup(b, a)
        assert isinstance(solve_coboundary(diff), CoboundaryWitness)


def test_h_squared_vanishes_on_p1():
    sp = space("P1")
    h = hyperplane_cocycle(sp)
    assert cup(h, h).is_zero()


def test_solve_zero():
    sp = space("P2")
    sol = solve_coboundary(TotalCochain.zero(sp, 2))
    assert isinstance(sol, CoboundaryWitness) and sol.w.is_zero()


@pytest.mark.parametrize("name", ["P1", "P2"])
def test_solve_coboundaries(name):
    sp = space(name)
    rng = random.Random(18)
    for _ in range(25):
        deg = rng.randint(1, 2 * sp.dim)
        w0 = random_cochain(sp, deg - 1, rng, bound=2)
        z = total_diff(w0)
        sol = solve_coboundary(z)
        assert isinstance(sol, CoboundaryWitness)
        assert total_diff(sol.w) == z


def test_dt_over_t_is_not_exact():
    sp = space("P1")
    z = TotalCochain(sp, 2, {(0, 1): sp.form(0, {(0,): sp.monomial(0, (-1,))})})
    verdict = solve_coboundary(z)
    assert isinstance(verdict, NotExact)
    assert verdict.to_json()["exact"] is False


def test_not_closed_is_rejected():
    sp = space("P1")
    z = TotalCochain(sp, 1, {(0,): sp.form(0, {(0,): sp.monomial(0, (1,))})})
    with pytest.raises(NotClosed):
        solve_coboundary(z)


@pytest.mark.parametrize("name", ["P1", "P2"])
def test_class_coeff_examples(name):
    sp = space(name)
    assert class_coeff(TotalCochain.zero(sp, 2), sp) == 0
    assert class_coeff(hyperplane_cocycle(sp), sp) == 1
    assert residue_coeff(hyperplane_cocycle(sp), sp) == 1
    rng = random.Random(20)
    for _ in range(10):
        z, c = random_class(sp, 1, rng, coeff=3)
        assert class_coeff(z, sp) == 3 == residue_coeff(z, sp)


def test_h_squared_on_p2():
    sp = space("P2")
    h2 = hyperplane_power(sp, 2)
    assert total_diff(h2).is_zero()
    assert class_coeff(h2, sp) == 1


def test_class_coeff_is_additive():
    sp = space("P2")
    rng = random.Random(22)
    for k in (1, 2):
        z1, c1 = random_class(sp, k, rng)
        z2, c2 = random_class(sp, k, rng)
        assert class_coeff(z1 + z2, sp) == class_coeff(z1, sp) + class_coeff(z2, sp) == c1 + c2


def test_total_cochain_json_round_trip():
    sp = space("P2")
    z, _ = random_class(sp, 1, random.Random(24))
    back = TotalCochain.from_json(z.to_json())
    assert back == z and back.degree == 2


@pytest.mark.parametrize("name,ranks", [("P1", [1, 0, 1]), ("P2", [1, 0, 1, 0, 1])])
def test_betti_ranks(name, ranks):
    assert betti_ranks(space(name)) == ranks
