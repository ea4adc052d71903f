import random

import pytest

from helpers import space
from rigidchern.cech import class_coeff, residue_coeff, total_diff
from rigidchern.chern import (
    GaugeCochain,
    LiftedUnitCocycle,
    apply_gauge,
    c1_class,
    c1_cocycle,
    frobenius_check,
    line_bundle_cocycle,
    perturb,
    random_gauge,
    structure_cocycle,
    transport_unit,
    zeta_witness,
)
from rigidchern.charts import UnitWitness
from rigidchern.errors import GaugeMismatch, UnsupportedSpace, ValuationError


def test_trivial_cocycle_gives_zero():
    sp = space("P2")
    assert c1_cocycle(structure_cocycle(sp)).is_zero()
    assert c1_class(sp, 0) == 0


def test_p1_degree_d_components():
    sp = space("P1")
    for d in (-2, 1, 4):
        z = c1_cocycle(line_bundle_cocycle(sp, d))
        assert set(z.values) == {(0, 1)}
        assert z[(0, 1)] == sp.form(0, {(0,): sp.monomial(0, (-1,), d)})
        assert class_coeff(z, sp) == d == residue_coeff(z, sp)


@pytest.mark.parametrize("d", range(-5, 6))
def test_p2_line_bundles(d):
    sp = space("P2")
    z = c1_cocycle(line_bundle_cocycle(sp, d))
    assert class_coeff(z, sp) == d
    assert residue_coeff(z, sp) == d


def test_c1_of_tensor_product():
    sp = space("P2")
    U = line_bundle_cocycle(sp, 2) * line_bundle_cocycle(sp, 3)
    assert c1_class(sp, U) == 5 == c1_class(sp, 2) + c1_class(sp, 3)


def test_perturbed_p2_closed_and_invariant():
    sp = space("P2")
    base = line_bundle_cocycle(sp, 1)
    for seed in range(100):
        U = perturb(base, random.Random(seed))
        z = c1_cocycle(U)
        assert total_diff(z).is_zero()
        assert class_coeff(z, sp) == 1


def test_triangle_terms_appear_for_perturbed_lifts():
    sp = space("P2")
    U = perturb(line_bundle_cocycle(sp, 1), random.Random(1))
    z = c1_cocycle(U)
    assert (0, 1, 2) in z.values
    assert z.prec < sp.ctx.N


def test_mod_p_cocycle_condition_is_checked():
    sp = space("P2")
    bad = {(0, 1): UnitWitness(2, (0, 0), sp.constant(0))}
    with pytest.raises(ValuationError):
        LiftedUnitCocycle(sp, bad)


def test_monomial_parts_must_cancel():
    sp = space("P2")
    bad = {(0, 1): UnitWitness(1, (1, 0), sp.constant(0))}
    with pytest.raises(ValuationError):
        LiftedUnitCocycle(sp, bad)


def test_reverse_edge_is_inverse():
    sp = space("P2")
    U = perturb(line_bundle_cocycle(sp, 2), random.Random(3))
    for i, j in sp.simplices(1):
        prod = transport_unit(sp, U.edge(j, i), i) * U.edge(i, j)
        assert prod.exponent == (0, 0)
        assert prod.one_unit.scale(prod.constant) == sp.constant(i)


def test_multiplicativity_componentwise():
    sp = space("P2")
    for seed in range(10):
        rng = random.Random(seed)
        U = perturb(line_bundle_cocycle(sp, rng.randint(-3, 3)), rng)
        V = perturb(line_bundle_cocycle(sp, rng.randint(-3, 3)), rng)
        assert c1_cocycle(U * V) == c1_cocycle(U) + c1_cocycle(V)


def test_zeta_trivial():
    sp = space("P1")
    U = line_bundle_cocycle(sp, 1)
    assert zeta_witness(U, GaugeCochain(sp, {}), U).is_zero()


@pytest.mark.parametrize("name", ["P1", "P2"])
def test_zeta_identity_with_gauge(name):
    sp = space(name)
    for seed in range(25):
        rng = random.Random(seed)
        U = perturb(line_bundle_cocycle(sp, 2), rng)
        theta = random_gauge(sp, rng, monomial_only=(seed % 2 == 0))
        U2 = perturb(apply_gauge(U, theta), rng)
        zeta = zeta_witness(U, theta, U2)
        assert total_diff(zeta) == c1_cocycle(U2) - c1_cocycle(U)


def test_zeta_relift_only_has_log_part():
    sp = space("P1")
    for seed in range(10):
        rng = random.Random(seed)
        U = line_bundle_cocycle(sp, 3)
        U2 = perturb(U, rng)
        zeta = zeta_witness(U, GaugeCochain(sp, {}), U2)
        assert all(len(s) == 2 for s in zeta.values)
        assert total_diff(zeta) == c1_cocycle(U2) - c1_cocycle(U)


def test_zeta_detects_mismatch():
    sp = space("P2")
    with pytest.raises(GaugeMismatch):
        zeta_witness(line_bundle_cocycle(sp, 1), GaugeCochain(sp, {}), line_bundle_cocycle(sp, 2))


def test_c1_class_rejects_bundles():
    from rigidchern.charts import SpaceDescriptor, build_space

    pe = build_space(SpaceDescriptor.bundle(1, (0, 1)))
    with pytest.raises(UnsupportedSpace):
        c1_class(pe, 1)


@pytest.mark.parametrize("name", ["P1", "P2"])
@pytest.mark.parametrize("d", [0, 1, 3])
def test_frobenius(name, d):
    sp = space(name)
    U = line_bundle_cocycle(sp, d)
    if name == "P2" and d == 3:
        U = perturb(U, random.Random(5))
    rep = frobenius_check(sp, U)
    assert rep["pass"]
    assert rep["frobenius_class"] == 5 * d


def test_cocycle_json_round_trip():
    sp = space("P2")
    U = perturb(line_bundle_cocycle(sp, 1), random.Random(9))
    data = U.to_json()
    assert {"edge", "chart", "constant", "monomial", "one_unit"} <= set(data["edges"][0])
    back = LiftedUnitCocycle.from_json(data)
    assert c1_cocycle(back) == c1_cocycle(U)
