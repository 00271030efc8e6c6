import itertools

import pytest

from artifact.algebra import (
    DgAlgebraPresentation,
    linear_pmc,
    opposite_pmc,
    torus_algebra,
    trivial_algebra,
    validate_algebra,
)


def boundary_circles(point_count, matching):
    """Walk the boundary of a disk with one band per matched pair."""
    partner = {}
    for a, b in matching:
        partner[a], partner[b] = b, a
    # arc k runs from point k to point k+1; at its end we cross the band and
    # continue along the arc that starts at the partner point
    unvisited = set(range(point_count))
    count = 0
    while unvisited:
        count += 1
        arc = min(unvisited)
        while arc in unvisited:
            unvisited.remove(arc)
            arc = partner[(arc + 1) % point_count]
    return count


def test_torus_algebra_valid():
    assert validate_algebra(torus_algebra()) == []


def test_torus_associativity_exhaustive():
    A = torus_algebra()
    for a, b, c in itertools.product(A.names, repeat=3):
        assert A.mu2(A.mu2((a,), (b,)), (c,)) == A.mu2((a,), A.mu2((b,), (c,)))


def test_torus_forced_vanishings():
    A = torus_algebra()
    assert A.mu2(("rho2",), ("rho23",)) == frozenset()
    assert A.mu2(("rho23",), ("rho23",)) == frozenset()
    assert A.mu2(("rho12",), ("rho1",)) == frozenset()
    assert A.mu2(("rho1",), ("rho2",)) == frozenset({"rho12"})
    assert A.mu2(("rho1",), ("rho23",)) == frozenset({"rho123"})
    assert A.mu2(("rho12",), ("rho3",)) == frozenset({"rho123"})


def test_augmentation_kills_chords():
    A = torus_algebra()
    for c in A.designated_chords:
        assert A.augmentation_basis(c) == 0
    for i in A.idempotents:
        assert A.augmentation_basis(i) == 1


def test_trivial_algebra_valid():
    assert validate_algebra(trivial_algebra()) == []


def test_mutated_product_gives_witness():
    A = torus_algebra({("rho2", "rho3"): []})
    kinds = {w.kind for w in validate_algebra(A)}
    assert "associativity" in kinds


def test_bad_idempotent_discipline():
    A = DgAlgebraPresentation(
        ["e", "f"],
        [("e", "e", "e"), ("f", "f", "f"), ("x", "e", "f"), ("y", "e", "f")],
        {},
        {("x", "x"): ["y"]},
        name="bad",
    )
    assert any(w.kind == "idempotent discipline" for w in validate_algebra(A))


def test_leibniz_failure():
    A = DgAlgebraPresentation(
        ["e"],
        [("e", "e", "e"), ("x", "e", "e"), ("y", "e", "e")],
        {"x": ["y"]},
        {("x", "y"): ["y"]},
        name="leibniz",
    )
    assert any(w.kind == "Leibniz rule" for w in validate_algebra(A))


def test_rename_and_opposite_preserve_validity():
    A = torus_algebra()
    B = A.rename("'")
    assert validate_algebra(B) == []
    assert B.mu2(("rho1'",), ("rho2'",)) == frozenset({"rho12'"})
    assert validate_algebra(A.opposite()) == []


def test_round_trip_dict():
    A = torus_algebra()
    B = DgAlgebraPresentation.from_dict(A.to_dict())
    assert B.to_dict() == A.to_dict()


def test_linear_pmc_genus_one():
    z = linear_pmc(1)
    assert z.point_count == 4
    assert z.matching == ((0, 2), (1, 3))


def test_linear_pmc_genus_three():
    z = linear_pmc(3)
    assert z.point_count == 12
    assert z.matching == ((0, 2), (1, 4), (3, 6), (5, 8), (7, 10), (9, 11))


@pytest.mark.parametrize("k", range(1, 7))
def test_linear_pmc_single_circle(k):
    z = linear_pmc(k)
    assert boundary_circles(z.point_count, z.matching) == 1
    assert z.surgery_circle_count() == 1


def test_linear_pmc_rejects_zero():
    with pytest.raises(ValueError):
        linear_pmc(0)


def test_opposite_involution():
    for k in (1, 2, 3):
        z = linear_pmc(k)
        assert opposite_pmc(opposite_pmc(z)) == z


def test_opposite_positions():
    z = linear_pmc(2)
    o = opposite_pmc(z)
    n = z.point_count
    assert o.matching == tuple(sorted(tuple(sorted((n - 1 - a, n - 1 - b))) for a, b in z.matching))
    assert o.is_valid()
    t = opposite_pmc(linear_pmc(1))
    assert t.matching == ((0, 2), (1, 3))


def test_bad_matching_rejected():
    with pytest.raises(ValueError):
        from artifact.algebra import PointedMatchedCircle

        PointedMatchedCircle(4, ((0, 1), (1, 2)))
