from fractions import Fraction

import numpy as np
import pytest

from artifact.errors import ArgumentError, DiagramError
from artifact.filtration import FinitePoset
from artifact.heegaard import (
    ALPHA,
    BoundaryChain,
    Curve,
    DiagramDomain,
    GridBuilder,
    HeegaardMultiDiagram,
    admissibility,
    bordered_torus,
    chord_invariants,
    close_approximation,
    connecting_domains,
    domain_boundary,
    enumerate_generators,
    euler_measure,
    finger_torus,
    grid_region,
    h1_order,
    index,
    jittered_intersection,
    linking,
    parallel_torus,
    periodic_domains,
    point_multiplicity,
    polyline,
    three_point_torus,
    torus_triple,
    zero_domain,
)
from artifact.algebra import linear_pmc
from artifact.testing import random_domain_cases


def curve_chain(d, family, name, scale=1):
    return BoundaryChain(d, family, {e: scale for e, (c, _) in d.edge_curve.items() if c == name})


def small_triangle():
    d = close_approximation()
    V = d.surface.vertex
    return DiagramDomain(
        d, {grid_region(d, (4, 4)): 1}, [V((5, 4)), V((4, 6)), V((4, 4))], [ALPHA, "beta_prime", "beta"]
    )


# diagrams and generators


def test_fixture_genus_and_validity():
    for f in (parallel_torus, finger_torus, three_point_torus, torus_triple, close_approximation, bordered_torus):
        d = f()
        assert d.genus == 1
        assert d.validation_errors() == []


def test_generator_counts():
    assert len(enumerate_generators(three_point_torus(), "beta")) == 3
    assert len(enumerate_generators(finger_torus(), "beta")) == 2
    assert len(enumerate_generators(bordered_torus(), "beta")) == 3


def test_torus_triple_pairs_meet_once():
    d = torus_triple()
    for i, j in [(0, 1), (1, "inf"), (0, "inf")]:
        assert len(enumerate_generators(d, j, first=i)) == 1


def test_bordered_pmc_binding():
    d = bordered_torus()
    assert d.pmc_errors() == []


def test_null_homologous_beta_rejected():
    gb = GridBuilder(4, 4)
    gb.glue_torus()
    S = gb.build()
    a = Curve("a", S.path(polyline((0, 1), (4, 1))))
    b = Curve("b", S.path(polyline((2, 2), (3, 2), (3, 3), (2, 3), (2, 2))))
    with pytest.raises(DiagramError):
        HeegaardMultiDiagram(S, [a, b], ["a"], {"beta": ["b"]}, S.face((0, 0)))


def test_h1_orders():
    assert h1_order(three_point_torus(), "beta") in (1, 3)
    assert h1_order(parallel_torus(), "beta") == 0


# domains


def test_zero_domain_quantities():
    d = three_point_torus()
    z = zero_domain(d)
    assert euler_measure(z) == 0
    assert domain_boundary(z, ALPHA).is_zero()
    x = enumerate_generators(d, "beta")[0]
    assert point_multiplicity(z, x) == 0


def test_basepoint_multiplicity_rejected():
    d = finger_torus()
    with pytest.raises(ArgumentError):
        DiagramDomain(d, {d.z_region: 1})


def test_euler_measure_formula_instances():
    d = close_approximation()
    assert euler_measure(small_triangle()) == Fraction(1, 4)
    for r in range(d.n_regions):
        if r == d.z_region:
            continue
        expected = d.region_chi[r] - Fraction(d.region_corners[r], 4)
        assert euler_measure(DiagramDomain(d, {r: 1})) == expected
        if d.region_chi[r] == 1 and d.region_corners[r] == 2:
            assert expected == Fraction(1, 2)


def test_point_multiplicity_single_quadrant():
    d = close_approximation()
    T = small_triangle()
    # the triangle touches each of its three corners in exactly one quadrant
    for v in T.corners:
        assert point_multiplicity(T, v) == Fraction(1, 4)


def test_point_multiplicity_off_diagram():
    d = three_point_torus()
    with pytest.raises(ArgumentError):
        point_multiplicity(zero_domain(d), 10 ** 6)


def test_boundary_additivity(rng):
    d = three_point_torus()
    regions = [r for r in range(d.n_regions) if r != d.z_region]
    for _ in range(20):
        m1 = {r: int(rng.integers(-3, 4)) for r in regions}
        m2 = {r: int(rng.integers(-3, 4)) for r in regions}
        b1, b2 = DiagramDomain(d, m1), DiagramDomain(d, m2)
        for fam in (ALPHA, "beta"):
            s = domain_boundary(b1 + b2, fam).coeffs
            p, q = domain_boundary(b1, fam).coeffs, domain_boundary(b2, fam).coeffs
            keys = set(s) | set(p) | set(q)
            assert all(s.get(k, 0) == p.get(k, 0) + q.get(k, 0) for k in keys)
        x = enumerate_generators(d, "beta")[0]
        assert point_multiplicity(b1 + b2, x) == point_multiplicity(b1, x) + point_multiplicity(b2, x)


# jittered intersections and chords


def test_jittered_disjoint_and_single_crossing():
    d = torus_triple()
    assert jittered_intersection(curve_chain(d, 0, "b0"), curve_chain(d, "inf", "binf")) in (1, -1)
    assert jittered_intersection(BoundaryChain(d, 0, {}), curve_chain(d, "inf", "binf")) == 0


def test_jittered_antisymmetric_and_bilinear():
    d = torus_triple()
    a, b, c = curve_chain(d, 0, "b0"), curve_chain(d, 1, "b1"), curve_chain(d, "inf", "binf")
    assert jittered_intersection(a, c) == -jittered_intersection(c, a)
    a3 = curve_chain(d, 0, "b0", 3)
    assert jittered_intersection(a3, b) == 3 * jittered_intersection(a, b)


def test_jittered_same_family_rejected():
    d = torus_triple()
    with pytest.raises(ArgumentError):
        jittered_intersection(curve_chain(d, 0, "b0"), curve_chain(d, 0, "b0"))


def test_chord_invariants_singleton():
    ch = chord_invariants([[(0, 1)]])
    assert ch.iota == (Fraction(-1, 2),)


def test_nested_chords_half_integer():
    assert abs(linking((0, 2), (0, 1))) == Fraction(1, 2)


def test_chord_through_basepoint():
    with pytest.raises(ArgumentError):
        chord_invariants([[(2, 1)]])
    z = linear_pmc(1)
    with pytest.raises(ArgumentError):
        chord_invariants([[(3, 0)]], z)


def test_linking_bilinear(rng):
    for _ in range(30):
        chords = []
        for _ in range(3):
            a, b = sorted(rng.choice(8, 2, replace=False))
            chords.append((int(a), int(b)))
        s1, s2 = chords[:2], chords[2:]
        ch = chord_invariants([s1, s2])
        assert ch.linking[(0, 1)] == linking(s1[0], s2[0]) + linking(s1[1], s2[0])


# index


def test_trivial_strip_index_zero():
    d = three_point_torus()
    x = enumerate_generators(d, "beta")[0].points[0][2]
    strip = zero_domain(d).with_corners([x, x], [ALPHA, "beta"])
    assert index(strip).ind == 0
    assert index(strip, source_chi=d.genus).ind == 0


def test_small_triangle_index_zero():
    assert index(small_triangle()).ind == 0


def test_bad_asymptotics_rejected():
    d = close_approximation()
    V = d.surface.vertex
    bad = DiagramDomain(d, {grid_region(d, (4, 4)): 1}, [V((4, 4)), V((4, 6)), V((5, 4))], [ALPHA, "beta_prime", "beta"])
    with pytest.raises(ArgumentError):
        index(bad)


def test_random_domain_linearity_and_additivity():
    cases = random_domain_cases(np.random.default_rng(7), 60)
    for k in cases:
        i1, i2 = index(k.first).ind, index(k.second).ind
        assert index(k.joined).ind == i1 + i2
        assert euler_measure(k.first + k.scale * k.second) == euler_measure(k.first) + k.scale * euler_measure(k.second)
        if k.periodic is not None:
            one = (k.first + k.periodic).with_corners(k.first.corners, k.first.families)
            many = (k.first + k.scale * k.periodic).with_corners(k.first.corners, k.first.families)
            assert index(many).ind - i1 == k.scale * (index(one).ind - i1)


def test_connecting_domains_bigons():
    d = three_point_torus()
    pts = [g.points[0][2] for g in enumerate_generators(d, "beta")]
    b, lattice = connecting_domains(d, [pts[0], pts[1]], [ALPHA, "beta"])
    assert b is not None
    assert len(lattice) == len(periodic_domains(d))
    assert Fraction(index(b).ind).denominator == 1
    d = finger_torus()
    pts = [g.points[0][2] for g in enumerate_generators(d, "beta")]
    b, lattice = connecting_domains(d, [pts[0], pts[1]], [ALPHA, "beta"])
    assert len(lattice) == 1
    assert index(b).ind in (-1, 1)


# admissibility


def test_admissible_without_periodic_domains():
    d = torus_triple()
    cert = admissibility(d, families=[0, 1])
    assert cert.admissible and cert.rank == 0


def test_parallel_torus_not_admissible():
    d = parallel_torus()
    cert = admissibility(d)
    assert not cert.admissible
    assert cert.witness is not None and all(x >= 0 for x in cert.witness) and any(cert.witness)
    assert cert.witness[d.z_region] == 0


def test_finger_torus_admissible():
    d = finger_torus()
    assert len(periodic_domains(d)) == 1
    cert = admissibility(d)
    assert cert.admissible
    K = periodic_domains(d)
    assert all(sum(w * x for w, x in zip(cert.weights, k)) == 0 for k in K)


def test_admissibility_monotone():
    d = torus_triple()
    assert admissibility(d).admissible
    for fams in ([0], [1], ["inf"], [0, 1], [1, "inf"], [0, "inf"]):
        assert admissibility(d, families=fams).admissible


def test_diagram_round_trip():
    d = three_point_torus()
    e = HeegaardMultiDiagram.from_dict(d.to_dict())
    assert e.to_dict() == d.to_dict()
