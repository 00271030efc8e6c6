import itertools

import numpy as np
import pytest
import sympy

from artifact import _kernels
from artifact.errors import ShapeError, StructureError
from artifact.f2chain import (
    F2Complex,
    F2Matrix,
    cancel_reduce,
    direct_sum,
    homology_rank,
    is_reduced,
    mat_mul,
    total_homology_rank,
)
from artifact.filtration import total_complex
from artifact.testing import random_filtered_complex


def naive_mul(a, b):
    n, k = a.shape
    m = b.shape[1]
    out = np.zeros((n, m), dtype=np.uint8)
    for i in range(n):
        for j in range(m):
            s = 0
            for t in range(k):
                s ^= int(a[i, t]) & int(b[t, j])
            out[i, j] = s
    return out


def test_identity_product():
    i3 = F2Matrix.identity(3)
    assert mat_mul(i3, i3) == i3


def test_char_two_cancellation():
    a = F2Matrix.from_dense([[1, 1], [0, 1]])
    assert mat_mul(a, a) == F2Matrix.identity(2)


def test_random_product_matches_dense_loop(rng):
    for _ in range(5):
        a = rng.integers(0, 2, (20, 20))
        b = rng.integers(0, 2, (20, 20))
        got = mat_mul(F2Matrix.from_dense(a), F2Matrix.from_dense(b)).to_dense()
        assert np.array_equal(got, naive_mul(a, b))


def test_shape_errors():
    with pytest.raises(ShapeError):
        mat_mul(F2Matrix.zero(2, 3), F2Matrix.zero(2, 3))
    with pytest.raises(ShapeError):
        F2Matrix(2, 2, [(2, 0)])
    with pytest.raises(ShapeError):
        F2Matrix(2, 2, [(0, 0), (0, 0)])


def dense_rank(a):
    m = [list(map(int, row)) for row in a]
    rank, col, rows = 0, 0, len(m)
    ncols = len(m[0]) if m else 0
    while rank < rows and col < ncols:
        piv = next((i for i in range(rank, rows) if m[i][col]), None)
        if piv is None:
            col += 1
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for i in range(rows):
            if i != rank and m[i][col]:
                m[i] = [x ^ y for x, y in zip(m[i], m[rank])]
        rank += 1
        col += 1
    return rank


def test_rank_matches_elimination(rng):
    for _ in range(30):
        a = rng.integers(0, 2, (rng.integers(1, 15), rng.integers(1, 15)))
        assert F2Matrix.from_dense(a).rank() == dense_rank(a)


def test_zero_differential_rank():
    c = F2Complex(["a", "b", "c", "d"])
    assert homology_rank(c) == {None: 4}


def test_acyclic_pair():
    c = F2Complex.from_boundaries({"x": ["y"]})
    assert total_homology_rank(c) == 0


def sphere():
    verts = [0, 1, 2, 3]
    edges = list(itertools.combinations(verts, 2))
    faces = list(itertools.combinations(verts, 3))
    bd = {}
    for e in edges:
        bd[("e",) + e] = [("v", v) for v in e]
    for f in faces:
        bd[("f",) + f] = [("e",) + e for e in itertools.combinations(f, 2)]
    gens = [("v", v) for v in verts] + [("e",) + e for e in edges] + [("f",) + f for f in faces]
    grad = {g: {"v": 0, "e": 1, "f": 2}[g[0]] for g in gens}
    return F2Complex.from_boundaries(bd, gens, grad), edges, faces


def test_sphere_ranks_match_smith_normal_form():
    c, edges, faces = sphere()
    assert homology_rank(c) == {0: 1, 1: 0, 2: 1}
    # integer boundary matrices; the sphere has no torsion so mod 2 ranks agree
    d1 = sympy.zeros(4, len(edges))
    for j, (a, b) in enumerate(edges):
        d1[a, j], d1[b, j] = -1, 1
    d2 = sympy.zeros(len(edges), len(faces))
    for j, f in enumerate(faces):
        for k, e in enumerate(itertools.combinations(f, 2)):
            d2[edges.index(e), j] = (-1) ** (2 - k)
    from sympy.matrices.normalforms import smith_normal_form

    r1 = sum(1 for x in smith_normal_form(d1).diagonal() if x != 0)
    r2 = sum(1 for x in smith_normal_form(d2).diagonal() if x != 0)
    assert (4 - r1, len(edges) - r1 - r2, len(faces) - r2) == (1, 0, 1)


def test_grading_violation():
    with pytest.raises(StructureError):
        F2Complex.from_boundaries({"x": ["y"]}, ["x", "y"], {"x": 0, "y": 0})
    with pytest.raises(StructureError):
        F2Complex.from_boundaries({"x": ["y"], "y": ["z"]}, ["x", "y", "z"])


def test_cancel_acyclic_pair():
    c = F2Complex.from_boundaries({"x": ["y"]})
    red, eq = cancel_reduce(c)
    assert len(red) == 0
    assert eq.check() == []


def test_cancel_zero_differential_unchanged():
    c = F2Complex(["a", "b"])
    red, _ = cancel_reduce(c)
    assert red.generators == c.generators


def test_cancel_random_preserves_homology(rng):
    for _ in range(10):
        c = total_complex(random_filtered_complex(rng, max_generators=50))
        red, eq = cancel_reduce(c)
        assert total_homology_rank(red) == total_homology_rank(c)
        assert is_reduced(red)
        assert eq.check() == []
        again, _ = cancel_reduce(red)
        assert again.generators == red.generators
        assert again.differential == red.differential


def test_direct_sum():
    a = F2Complex.from_boundaries({"x": ["y"]})
    b = F2Complex(["z"])
    assert total_homology_rank(direct_sum(a, b)) == 1


def test_backends_agree(rng):
    for _ in range(20):
        a = rng.integers(0, 2, (rng.integers(1, 90), rng.integers(1, 90))).astype(np.uint8)
        b = rng.integers(0, 2, (a.shape[1], rng.integers(1, 40))).astype(np.uint8)
        assert _kernels.gf2_rank(a, backend="numpy") == _kernels.gf2_rank(a, backend=_kernels.BACKEND)
        ents = list(zip(*np.nonzero(a)))
        assert _kernels.gf2_rank_sparse(a.shape[0], a.shape[1], ents, backend="numpy") == _kernels.gf2_rank(a)
        prod = _kernels.gf2_matmul(a, b, backend="numpy")
        assert np.array_equal(prod, _kernels.gf2_matmul(a, b, backend=_kernels.BACKEND))
        assert np.array_equal(prod, (a.astype(np.int64) @ b) % 2)
