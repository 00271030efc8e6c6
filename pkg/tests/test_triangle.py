import pytest

from artifact import triangle
from artifact.algebra import torus_algebra
from artifact.errors import FixtureError, StructureError
from artifact.f2chain import total_homology_rank
from artifact.filtration import INF, validate_filtered
from artifact.structures import (
    TypeDMorphism,
    box_tensor,
    check_typeD,
    compose_typeD,
    mapping_cone,
    morphism_differential,
)


@pytest.fixture(scope="module")
def fx():
    return triangle.build_fixture()


def as_set(terms):
    return set(terms)


def test_idempotents(fx):
    assert fx.h_inf.generators == {"r": "iota1"}
    assert fx.h_minus1.generators == {"a": "iota0", "b": "iota1"}
    assert fx.h_0.generators == {"n": "iota0"}


def test_delta_r(fx):
    assert as_set(fx.h_inf.delta["r"]) == {("rho23", "r")}


def test_delta_a(fx):
    assert as_set(fx.h_minus1.delta["a"]) == {("rho1", "b"), ("rho3", "b")}


def test_delta_b_is_zero(fx):
    assert fx.h_minus1.delta["b"] == frozenset()


def test_delta_n(fx):
    assert as_set(fx.h_0.delta["n"]) == {("rho12", "n")}


def test_map_inf_to_minus1(fx):
    assert fx.f_inf_m1.table == {"r": frozenset({("rho2", "a"), ("iota1", "b")})}


def test_map_minus1_to_0(fx):
    assert fx.f_m1_0.table == {"a": frozenset({("iota0", "n")}), "b": frozenset({("rho2", "n")})}


def test_map_inf_to_0_zero(fx):
    assert fx.f_inf_0.is_zero()


def test_theta(fx):
    assert fx.theta.table == {"n": frozenset({("rho1", "r"), ("rho3", "r")})}


def test_structure_equations(fx):
    for x in fx.parts.values():
        assert check_typeD(x) == []


def test_maps_are_cycles(fx):
    for f in (fx.f_inf_m1, fx.f_m1_0, fx.f_inf_0, fx.theta):
        assert morphism_differential(f).is_zero()


def test_filtered_compatibility(fx):
    assert compose_typeD(fx.f_m1_0, fx.f_inf_m1).is_zero()
    assert fx.filtered().violations() == []


def test_fixture_check_lines(fx):
    lines = triangle.fixture_checks(fx)
    assert lines and all(c.ok for c in lines)


def test_bad_theta_raises():
    with pytest.raises(FixtureError):
        triangle.build_fixture(theta_terms=[("rho1", "r")])
    fx = triangle.load_fixture_unchecked(theta_terms=[("rho1", "r")])
    assert not all(c.ok for c in triangle.fixture_checks(fx))


def test_cone_iso(fx):
    res = triangle.verify_cone_iso(fx)
    assert res.ok
    assert res.phi.table["a"] == frozenset({("iota0", "n")})
    assert res.phi.table["b"] == frozenset({("iota1", "r"), ("rho2", "n")})


def test_cone_iso_fails_on_wrong_algebra():
    A = torus_algebra({("rho2", "rho3"): []})
    try:
        ok = triangle.verify_cone_iso(triangle.load_fixture_unchecked(A)).ok
    except StructureError:
        ok = False
    assert not ok


def test_reordered_cones(fx):
    res = triangle.verify_reordered_cones(fx)
    assert res.ok
    for ranks in res.ranks.values():
        vals = sorted(ranks.values())
        # exact triangle: the largest rank is at most the sum of the other two
        assert vals[2] <= vals[0] + vals[1]


def test_cone_of_zero_sums_ranks(fx):
    for m in triangle.probe_modules(fx.algebra).values():
        z = TypeDMorphism.zero(fx.h_inf, fx.h_0)
        total = total_homology_rank(box_tensor(m, mapping_cone(z)))
        assert total == total_homology_rank(box_tensor(m, fx.h_inf)) + total_homology_rank(box_tensor(m, fx.h_0))


def test_triangle_filtered_complex_valid():
    for m in triangle.probe_modules().values():
        assert validate_filtered(triangle.triangle_filtered_complex(m)) == []


def test_verify_all_passes():
    lines = triangle.verify_all()
    assert len(lines) >= 20
    assert all(c.ok for c in lines)


def test_levels():
    assert triangle.LEVELS == (INF, -1, 0)
