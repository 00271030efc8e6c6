import pytest

from artifact.errors import StructureError
from artifact.f2chain import F2Complex, F2Matrix, homology_rank, mat_mul, total_homology_rank
from artifact.filtration import (
    INF,
    FilteredComplex,
    FinitePoset,
    associated_graded,
    cube_rank,
    spectral_sequence,
    total_complex,
    validate_filtered,
)
from artifact.structures import chain_cone
from artifact.testing import cone_filtration, cube_filtration, random_filtered_complex
from artifact.triangle import triangle_filtered_complex


def test_poset_rejects_non_transitive():
    with pytest.raises(ValueError):
        FinitePoset([0, 1, 2], [(0, 1), (1, 2)])
    with pytest.raises(ValueError):
        FinitePoset([0], [(0, 0)])


def test_poset_constructors():
    c = FinitePoset.three_chain()
    assert c.less(0, INF) and c.less(1, INF) and c.less(0, 1)
    cube = FinitePoset.cube(3)
    assert len(cube) == 8
    assert cube.less((0, 0, 0), (1, 1, 1))
    assert not cube.less((1, 0, 0), (0, 1, 0))
    assert len(FinitePoset.cube3(2)) == 9
    prod = FinitePoset.product(FinitePoset.chain([0, 1]), FinitePoset.chain(["a", "b"]))
    assert prod.less((0, "a"), (1, "b"))
    assert not prod.less((0, "b"), (1, "a"))
    assert cube_rank((0, INF, 1)) == 3


def two_step(connector_ok=True):
    p = FinitePoset.chain([0, 1])
    a = F2Complex.from_boundaries({"x": ["y"]}, ["x", "y"])
    b = F2Complex.from_boundaries({"u": ["v"]}, ["u", "v"])
    # chain map x -> u, y -> v; the broken version sends only x -> u
    ents = [(0, 0), (1, 1)] if connector_ok else [(0, 0)]
    return FilteredComplex(p, {0: a, 1: b}, {(0, 1): F2Matrix(2, 2, ents)})


def test_two_step_chain_map_valid():
    assert validate_filtered(two_step()) == []
    bad = validate_filtered(two_step(False))
    assert [(v.source, v.target) for v in bad] == [(0, 1)]


def test_three_chain_violation_at_ends():
    p = FinitePoset.chain([0, 1, 2])
    parts = {k: F2Complex([f"g{k}"]) for k in range(3)}
    one = F2Matrix(1, 1, [(0, 0)])
    fc = FilteredComplex(p, parts, {(0, 1): one, (1, 2): one})
    bad = validate_filtered(fc)
    assert [(v.source, v.target) for v in bad] == [(0, 2)]
    with pytest.raises(StructureError):
        total_complex(fc)


def test_triangle_complex_valid():
    assert validate_filtered(triangle_filtered_complex()) == []


def test_single_level_total_is_part():
    c = F2Complex.from_boundaries({"x": ["y"]}, ["x", "y", "z"])
    fc = FilteredComplex(FinitePoset(["pt"], []), {"pt": c})
    t = total_complex(fc)
    assert t.differential == c.differential
    ss = spectral_sequence(fc, {"pt": 0})
    assert ss.page(1) == {0: 1}
    assert ss.stabilization_page <= 1


def test_zero_connector_direct_sum():
    fc = two_step()
    fc = FilteredComplex(fc.poset, fc.parts, {})
    assert total_homology_rank(total_complex(fc)) == 0
    assert associated_graded(fc).differential == total_complex(fc).differential


def test_associated_graded_drops_connectors():
    fc = triangle_filtered_complex()
    assert fc.connectors
    ag = associated_graded(fc)
    assert len(ag) == sum(len(p) for p in fc.parts.values())
    offset = 0
    expected = set()
    for e in fc.poset.elements:
        expected |= {(r + offset, c + offset) for r, c in fc.parts[e].differential.entries}
        offset += len(fc.parts[e])
    assert set(ag.differential.entries) == expected
    assert ag.differential != total_complex(fc).differential


def test_associated_graded_zero_internal():
    fc = FilteredComplex(FinitePoset.chain([0, 1]), {0: F2Complex(["x"]), 1: F2Complex(["y"])},
                         {(0, 1): F2Matrix(1, 1, [(0, 0)])})
    assert associated_graded(fc).differential.is_zero()
    assert spectral_sequence(fc, {0: 0, 1: 1}).page(0) == {0: 1, 1: 1}


def test_random_totals_square_to_zero(rng):
    for _ in range(50):
        fc = random_filtered_complex(rng)
        assert validate_filtered(fc) == []
        d = total_complex(fc).differential
        assert mat_mul(d, d).is_zero()


def test_cone_filtration_e2_matches_cone(rng):
    for _ in range(40):
        fc = cone_filtration(rng)
        ss = spectral_sequence(fc, {0: 0, 1: 1})
        cone = chain_cone(fc.connector(0, 1), fc.parts[0], fc.parts[1])
        assert ss.total(2) == total_homology_rank(cone)
        assert ss.page(1) == {
            0: total_homology_rank(fc.parts[0]),
            1: total_homology_rank(fc.parts[1]),
        }


def test_convergence_and_euler(rng):
    for _ in range(40):
        fc = cube_filtration(rng, dim=int(rng.integers(1, 4)))
        ss = spectral_sequence(fc)
        assert sum(ss.e_infinity().values()) == total_homology_rank(total_complex(fc))
        span = max(ss.degrees) - min(ss.degrees)
        assert ss.stabilization_page <= span + 1
        for p in ss.degrees:
            vals = [ss.rank_grid[(r, p)] for r in range(ss.last_page + 1)]
            assert vals == sorted(vals, reverse=True)


def test_triangle_pages_converge():
    fc = triangle_filtered_complex()
    ss = spectral_sequence(fc, lambda e: {INF: 0, -1: 1, 0: 2}[e[-1]])
    assert sum(ss.e_infinity().values()) == total_homology_rank(total_complex(fc))


def test_page_ranks_independent_of_order(rng):
    for _ in range(20):
        fc = random_filtered_complex(rng)
        t = total_complex(fc)
        gens = list(t.generators)
        perm = list(rng.permutation(len(gens)))
        new = [gens[k] for k in perm]
        pos = {g: i for i, g in enumerate(new)}
        ents = [(pos[gens[r]], pos[gens[c]]) for r, c in t.differential.entries]
        fc2 = FilteredComplex.from_total(fc.poset, new, F2Matrix(len(new), len(new), ents))
        rank = {e: k for k, e in enumerate(fc.poset.elements)}
        assert spectral_sequence(fc, rank).rank_grid == spectral_sequence(fc2, rank).rank_grid


def test_non_monotone_rank_rejected():
    with pytest.raises(ValueError):
        spectral_sequence(two_step(), {0: 1, 1: 0})


def test_homology_rank_graded_and_ungraded():
    c = F2Complex.from_boundaries({"x": ["y"]}, ["x", "y", "z"], {"x": 1, "y": 0, "z": 0})
    assert homology_rank(c) == {0: 1, 1: 0}
