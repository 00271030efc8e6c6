import itertools

import pytest

from artifact import triangle
from artifact.algebra import torus_algebra, trivial_algebra
from artifact.errors import BoundednessError, StructureError
from artifact.f2chain import F2Complex, homology_rank, mat_mul, total_homology_rank
from artifact.filtration import FinitePoset, validate_filtered
from artifact.structures import (
    AInfModule,
    DAStructure,
    FilteredAInfModule,
    FilteredTypeD,
    PolygonData,
    TypeDMorphism,
    TypeDStructure,
    box_tensor,
    box_tensor_DA,
    box_tensor_DD,
    box_tensor_morphism,
    chain_cone,
    check_DA,
    check_DD,
    check_dd_identity,
    check_module,
    check_typeD,
    compose_typeD,
    connected_sum_chains,
    dd_identity,
    direct_sum_typeD,
    filtered_box_tensor,
    mapping_cone,
    morphism_differential,
    regular_module,
    torus_identity_expectations,
    twisted_complex_validate,
)
from artifact.testing import (
    box_connector_oracle,
    filtered_terms,
    random_filtered_module,
    random_filtered_typeD,
)

A = torus_algebra()


def fixture():
    return triangle.build_fixture()


def random_morphism(rng, X, Y):
    terms = [
        (x, (b.name, y))
        for x in X.generators
        for y in Y.generators
        for b in A.basis
        if b.left == X.idem(x) and b.right == Y.idem(y)
    ]
    table = {}
    for x, t in terms:
        if rng.random() < 0.4:
            table.setdefault(x, []).append(t)
    return TypeDMorphism(X, Y, table)


# type D structures


def test_r_structure_valid():
    r = TypeDStructure(A, {"r": "iota1"}, {"r": [("rho23", "r")]})
    assert check_typeD(r) == []


def test_ab_structure_valid():
    ab = TypeDStructure(A, {"a": "iota0", "b": "iota1"}, {"a": [("rho1", "b"), ("rho3", "b")]})
    assert check_typeD(ab) == []


def test_idempotent_coefficient_invalid():
    x = TypeDStructure(A, {"x": "iota0"}, {"x": [("iota0", "x")]}, check=False)
    res = check_typeD(x)
    assert res and res[0].generator == "x"
    with pytest.raises(StructureError):
        TypeDStructure(A, {"x": "iota0"}, {"x": [("iota0", "x")]})


def test_idempotent_mismatch_raises():
    with pytest.raises(StructureError):
        TypeDStructure(A, {"x": "iota0", "y": "iota0"}, {"x": [("rho1", "y")]})


# morphisms


def test_theta_is_cycle():
    fx = fixture()
    d = morphism_differential(fx.theta)
    assert d.is_zero()


def test_theta_cycle_needs_both_terms():
    fx = fixture()
    t = TypeDMorphism(fx.h_0, fx.h_inf, {"n": [("rho1", "r")]})
    d = morphism_differential(t)
    assert d("n") == frozenset({("rho123", "r")})


def test_identity_morphism_closed():
    fx = fixture()
    for X in fx.parts.values():
        assert morphism_differential(TypeDMorphism.identity(X)).is_zero()


def test_d_squared_zero_on_random_morphisms(rng):
    fx = fixture()
    parts = list(fx.parts.values())
    for X, Y in itertools.product(parts, repeat=2):
        for _ in range(5):
            h = random_morphism(rng, X, Y)
            assert morphism_differential(morphism_differential(h)).is_zero()


def test_composition_of_filtration_maps_vanishes():
    fx = fixture()
    assert compose_typeD(fx.f_m1_0, fx.f_inf_m1).is_zero()


def test_compose_identity():
    fx = fixture()
    f = fx.f_inf_m1
    assert compose_typeD(f, TypeDMorphism.identity(f.source)) == f
    assert compose_typeD(TypeDMorphism.identity(f.target), f) == f


def test_leibniz_on_random_morphisms(rng):
    fx = fixture()
    parts = list(fx.parts.values())
    for X, Y, Z in itertools.product(parts, repeat=3):
        for _ in range(2):
            g = random_morphism(rng, X, Y)
            h = random_morphism(rng, Y, Z)
            lhs = morphism_differential(compose_typeD(h, g))
            rhs = compose_typeD(morphism_differential(h), g) + compose_typeD(h, morphism_differential(g))
            assert lhs == rhs


# cones


def test_cone_of_zero_is_sum():
    fx = fixture()
    z = TypeDMorphism.zero(fx.h_inf, fx.h_0)
    c = mapping_cone(z)
    s = direct_sum_typeD(fx.h_inf, fx.h_0)
    assert len(c.generators) == len(s.generators) == 2
    assert sorted(map(len, c.delta.values())) == sorted(map(len, s.delta.values()))


def test_cone_of_theta():
    fx = fixture()
    c = mapping_cone(fx.theta)
    assert check_typeD(c) == []
    names = {x: x[-1] if isinstance(x, tuple) else x for x in c.generators}
    delta = {names[x]: {(a, names[y]) for a, y in t} for x, t in c.delta.items()}
    assert delta["n"] == {("rho12", "n"), ("rho1", "r"), ("rho3", "r")}
    assert delta["r"] == {("rho23", "r")}


def test_cone_rejects_non_cycle():
    fx = fixture()
    t = TypeDMorphism(fx.h_0, fx.h_inf, {"n": [("rho1", "r")]})
    with pytest.raises(ValueError):
        mapping_cone(t)


def test_cone_of_identity_acyclic():
    fx = fixture()
    mods = triangle.probe_modules(A)
    for X in fx.parts.values():
        c = mapping_cone(TypeDMorphism.identity(X))
        for m in mods.values():
            assert total_homology_rank(box_tensor(m, c)) == 0


def test_box_commutes_with_cones():
    fx = fixture()
    mods = triangle.probe_modules(A)
    for f in (fx.theta, fx.f_inf_m1, fx.f_m1_0):
        for m in mods.values():
            lhs = box_tensor(m, mapping_cone(f))
            rhs = chain_cone(box_tensor_morphism(m, f), box_tensor(m, f.source), box_tensor(m, f.target))
            assert total_homology_rank(lhs) == total_homology_rank(rhs)
            assert lhs.differential.nnz() == rhs.differential.nnz()
            # match generators via their (module, structure) pair
            key = lambda g: (g[0], g[1][-1] if isinstance(g[1], tuple) else g[1])  # noqa: E731
            lmap = {key(g): i for i, g in enumerate(lhs.generators)}
            rmap = {(g[1][0], g[1][1]): i for i, g in enumerate(rhs.generators)}
            rmap = {key((k[0], k[1])): v for k, v in rmap.items()}
            assert set(lmap) == set(rmap)
            le = {(key(lhs.generators[r]), key(lhs.generators[c])) for r, c in lhs.differential.entries}
            rg = {i: k for k, i in rmap.items()}
            re = {(rg[r], rg[c]) for r, c in rhs.differential.entries}
            assert le == re


# modules and box tensor


def test_probe_modules_valid():
    for m in triangle.probe_modules(A).values():
        assert check_module(m) == []


def test_regular_module_valid():
    for i in A.idempotents:
        assert check_module(regular_module(A, i)) == []


def test_trivial_algebra_box_is_kunneth():
    F = trivial_algebra()
    m = AInfModule(F, {"u": "1", "v": "1", "w": "1"}, {("u", ()): ["v"]})
    p = TypeDStructure(F, {"x": "1", "y": "1"})
    c = box_tensor(m, p)
    assert total_homology_rank(c) == 1 * 2


def test_random_box_squares_to_zero(rng):
    for _ in range(20):
        fp = random_filtered_typeD(rng)
        fm = random_filtered_module(rng)
        c = box_tensor(fm.total(), fp.total())
        assert mat_mul(c.differential, c.differential).is_zero()


def test_unbounded_pair_raises():
    loop = TypeDStructure(A, {"x": "iota0"}, {"x": [("rho12", "x")]})
    assert not loop.is_bounded()
    m = AInfModule(A, {"u": "iota0"}, {}, bounded=False, arity_bound=1)
    with pytest.raises(BoundednessError):
        box_tensor(m, loop)


# filtered box tensor


def test_trivial_filtrations_give_plain_box():
    fx = fixture()
    m = triangle.probe_modules(A)["T1"]
    pt = FinitePoset(["pt"], [])
    fp = FilteredTypeD(pt, {"pt": fx.h_minus1}, {})
    fm = FilteredAInfModule(pt, {"pt": m}, {})
    fc = filtered_box_tensor(fm, fp)
    plain = box_tensor(m, fx.h_minus1)
    assert total_homology_rank(fc.parts[("pt", "pt")]) == total_homology_rank(plain)
    assert fc.parts[("pt", "pt")].differential.nnz() == plain.differential.nnz()


def test_filtered_box_matches_oracle(rng):
    for _ in range(20):
        fp = random_filtered_typeD(rng)
        fm = random_filtered_module(rng)
        fc = filtered_box_tensor(fm, fp)
        assert validate_filtered(fc) == []
        assert box_connector_oracle(fm, fp) == filtered_terms(fc)


def test_filtered_box_parts_match_plain_box(rng):
    for _ in range(10):
        fp = random_filtered_typeD(rng)
        fm = random_filtered_module(rng)
        fc = filtered_box_tensor(fm, fp)
        for (i, j), part in fc.parts.items():
            plain = box_tensor(fm.parts[i], fp.parts[j])
            assert set(part.generators) == set(plain.generators)
            pe = {(part.generators[r], part.generators[c]) for r, c in part.differential.entries}
            qe = {(plain.generators[r], plain.generators[c]) for r, c in plain.differential.entries}
            assert pe == qe


def test_triangle_box_probe_module_valid():
    fx = fixture()
    for m in triangle.probe_modules(A).values():
        pt = FinitePoset(["pt"], [])
        fc = filtered_box_tensor(FilteredAInfModule(pt, {"pt": m}, {}), fx.filtered())
        assert validate_filtered(fc) == []


# DA and DD


def test_da_without_inputs_is_type_d():
    F = trivial_algebra()
    p = DAStructure(A, F, {"r": ("iota1", "1")}, {("r", ()): [("rho23", "r")]})
    assert check_DA(p) == []
    q = TypeDStructure(F, {"x": "1"})
    out = box_tensor_DA(p, q)
    assert check_typeD(out) == []
    bad = DAStructure(A, F, {"x": ("iota0", "1")}, {("x", ()): [("iota0", "x")]}, check=False)
    assert check_DA(bad)


def test_dd_identity_valid():
    dd = dd_identity(A)
    assert len(dd.generators) == 2
    assert check_DD(dd) == []
    assert check_dd_identity(dd, torus_identity_expectations()) == []


def test_dd_identity_terms():
    dd = dd_identity(A)
    x, y = "iota0|iota1'", "iota1|iota0'"
    assert dd.delta[x] == {("rho1", y, "rho1'"), ("rho3", y, "rho3'"), ("rho123", y, "rho123'")}
    assert dd.delta[y] == {("rho2", x, "rho2'")}


def test_dd_identity_mutations_named():
    dd = dd_identity(A)
    for t in dd.terms():
        mutated = dd.without_term(t[0], t[1:])
        res = check_DD(mutated)
        extra = check_dd_identity(mutated, torus_identity_expectations())
        assert res or extra
        assert all(str(w) for w in extra)


def test_dd_identity_empty_chords():
    from artifact.algebra import DgAlgebraPresentation

    B = DgAlgebraPresentation(["e"], [("e", "e", "e")], {}, {}, [], name="point")
    dd = dd_identity(B)
    assert all(not t for t in dd.delta.values())
    with pytest.raises(ValueError):
        dd_identity(trivial_algebra())


def test_dd_box_regular_reproduces_type_d():
    dd = dd_identity(A)
    for i in A.idempotents:
        out = box_tensor_DD(regular_module(A, i), dd)
        assert check_typeD(out) == []


# chains of attaching circles


def three_chain_data(m2=()):
    P = FinitePoset.chain([0, 1, "inf"])
    gens = {(0, 1): ["x01"], (1, "inf"): ["x1i"], (0, "inf"): ["x0i", "y0i"]}
    prods = {("x1i", "x01"): list(m2)}
    return PolygonData(P, gens, prods)


def test_twisted_trivial():
    rep = twisted_complex_validate(three_chain_data(), {}, alpha=None)
    assert rep["compatibility"] == []


def test_twisted_canceling_triangles():
    chains = {(0, 1): ["x01"], (1, "inf"): ["x1i"], (0, "inf"): []}
    rep = twisted_complex_validate(three_chain_data(), chains, alpha=None)
    assert rep["compatibility"] == []


def test_twisted_mutated_product_fails():
    chains = {(0, 1): ["x01"], (1, "inf"): ["x1i"], (0, "inf"): []}
    rep = twisted_complex_validate(three_chain_data(["x0i"]), chains, alpha=None)
    assert [r.generator for r in rep["compatibility"]] == [(0, "inf")]


def test_twisted_with_alpha_builds_filtered_complex():
    P = FinitePoset(["alpha", 0, 1], [("alpha", 0), ("alpha", 1), (0, 1)])
    gens = {("alpha", 0): ["a0"], ("alpha", 1): ["a1"], (0, 1): ["t"]}
    data = PolygonData(P, gens, {("t", "a0"): ["a1"]})
    rep = twisted_complex_validate(data, {(0, 1): ["t"]})
    assert rep["filtered"] == []
    assert rep["complex"].connector(0, 1).nnz() == 1


def test_connected_sum_pattern():
    I = FinitePoset.chain([0, 1])
    J = FinitePoset.chain(["a", "b"])
    out = connected_sum_chains(
        {(0, 1): ["e"]}, {("a", "b"): ["z"]}, I, J, {0: "T0", 1: "T1"}, {"a": "Ta", "b": "Tb"}
    )
    assert out[((0, "a"), (0, "b"))] == {("T0", "z")}
    assert out[((1, "a"), (1, "b"))] == {("T1", "z")}
    assert out[((0, "a"), (1, "a"))] == {("e", "Ta")}
    assert out[((0, "a"), (1, "b"))] == frozenset()


def test_connected_sum_singletons():
    pt = FinitePoset(["p"], [])
    assert connected_sum_chains({}, {}, pt, pt, {"p": "T"}, {"p": "T"}) == {}


def test_connected_sum_cube_sparsity():
    C = FinitePoset.cube(2)
    left = {(i, j): [f"e{i}{j}"] for i, j in C.pairs()}
    right = {(i, j): [f"z{i}{j}"] for i, j in C.pairs()}
    th = {e: f"T{e}" for e in C.elements}
    out = connected_sum_chains(left, right, C, C, th, th)
    for (a, b), v in out.items():
        both = a[0] != b[0] and a[1] != b[1]
        assert (not v) == both


def test_connected_sum_rejects_non_injective():
    I = FinitePoset.chain([0, 1])
    pt = FinitePoset(["p"], [])
    with pytest.raises(ValueError):
        connected_sum_chains({(0, 1): ["e"]}, {}, I, pt, {0: "T", 1: "T"}, {"p": "T"},
                             nearest_point={("e", "T"): "q", ("f", "T"): "q"})
