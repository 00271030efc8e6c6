"""Random valid inputs and brute-force oracles for property tests.

Filtered complexes are built by conjugating a square-zero differential by
random filtered transvections. Filtered type D structures and modules are
direct sums of known valid blocks, placed along random chains of a random
poset and then conjugated by idempotent-preserving filtered basis changes.
All of these are valid by construction.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Hashable, Sequence

import numpy as np

from .algebra import DgAlgebraPresentation, torus_algebra
from .f2chain import F2Matrix
from .filtration import FilteredComplex, FinitePoset
from .heegaard import (
    ALPHA,
    DiagramDomain,
    HeegaardMultiDiagram,
    close_approximation,
    connecting_domains,
    enumerate_generators,
    finger_torus,
    three_point_torus,
)
from .structures import (
    AInfModule,
    AInfMorphism,
    FilteredAInfModule,
    FilteredTypeD,
    TypeDMorphism,
    TypeDStructure,
)
from .triangle import build_fixture, probe_modules


def random_poset(rng: np.random.Generator, size: int, density: float = 0.5) -> FinitePoset:
    """Random order on 0..size-1 compatible with the integer order."""
    rel = {(i, j) for i in range(size) for j in range(i + 1, size) if rng.random() < density}
    changed = True
    while changed:
        changed = False
        for a, b in list(rel):
            for c, e in list(rel):
                if b == c and (a, e) not in rel:
                    rel.add((a, e))
                    changed = True
    return FinitePoset(list(range(size)), rel)


def random_filtered_complex(
    rng: np.random.Generator,
    max_generators: int = 30,
    max_levels: int = 4,
    poset: FinitePoset | None = None,
) -> FilteredComplex:
    """A valid filtered complex with at most ``max_generators`` generators."""
    if poset is None:
        poset = random_poset(rng, int(rng.integers(1, max_levels + 1)))
    n = int(rng.integers(1, max_generators + 1))
    levels = sorted(poset.elements[int(k)] for k in rng.integers(0, len(poset), n))
    levels.sort(key=poset.elements.index)
    d = np.zeros((n, n), dtype=np.uint8)
    free = list(range(n))
    rng.shuffle(free)
    while len(free) >= 2 and rng.random() < 0.8:
        x, y = free.pop(), free.pop()
        if poset.leq(levels[y], levels[x]):
            x, y = y, x
        if poset.leq(levels[x], levels[y]):
            d[y, x] = 1
    for _ in range(int(rng.integers(0, 3 * n + 1))):
        r, c = (int(v) for v in rng.integers(0, n, 2))
        if r == c or not poset.leq(levels[c], levels[r]):
            continue
        # conjugate by the involution I + e_{rc}
        d[:, c] ^= d[:, r]
        d[r, :] ^= d[c, :]
    gens = [(levels[k], f"g{k}") for k in range(n)]
    return FilteredComplex.from_total(poset, gens, F2Matrix.from_dense(d))


def cone_filtration(rng: np.random.Generator, max_generators: int = 30) -> FilteredComplex:
    """A two-level filtered complex, i.e. the cone of the connector between its parts."""
    return random_filtered_complex(rng, max_generators, poset=FinitePoset.chain([0, 1]))


def cube_filtration(rng: np.random.Generator, dim: int = 2, max_generators: int = 30) -> FilteredComplex:
    return random_filtered_complex(rng, max_generators, poset=FinitePoset.cube(dim))


# ---------------------------------------------------------------------------
# filtered type D structures and modules
# ---------------------------------------------------------------------------


def _chains(poset: FinitePoset, length: int) -> list[tuple]:
    out = []

    def rec(cur):
        if len(cur) == length:
            out.append(tuple(cur))
            return
        for e in poset.elements:
            if not cur or poset.less(cur[-1], e):
                rec(cur + [e])

    rec([])
    return out


def _typeD_blocks(A: DgAlgebraPresentation) -> list[tuple[list, dict, dict]]:
    """Blocks as (level-ordered list of (gens, delta)), connectors keyed by level positions."""
    fx = build_fixture(A)
    h = [fx.h_inf, fx.h_minus1, fx.h_0]

    def part(x: TypeDStructure):
        return (dict(x.generators), {g: set(t) for g, t in x.delta.items()})

    def table(f: TypeDMorphism):
        return {g: set(t) for g, t in f.table.items()}

    return [
        ([part(h[0]), part(h[1]), part(h[2])], {(0, 1): table(fx.f_inf_m1), (1, 2): table(fx.f_m1_0)}),
        ([part(h[0]), part(h[1])], {(0, 1): table(fx.f_inf_m1)}),
        ([part(h[1]), part(h[2])], {(0, 1): table(fx.f_m1_0)}),
        ([part(h[2]), part(h[0])], {(0, 1): table(fx.theta)}),
        ([part(h[0])], {}),
        ([part(h[1])], {}),
        ([part(h[2])], {}),
    ]


def _place_blocks(rng, poset, blocks, count):
    """Choose blocks and chains of the poset to put them on; returns (block, chain) pairs."""
    placed = []
    for _ in range(count):
        for _attempt in range(10):
            b = blocks[int(rng.integers(0, len(blocks)))]
            chains = _chains(poset, len(b[0]))
            if chains:
                placed.append((b, chains[int(rng.integers(0, len(chains)))]))
                break
    return placed


def _split_typeD(A, poset, idem: dict, delta: dict, check: bool) -> FilteredTypeD:
    parts_g: dict = {e: {} for e in poset.elements}
    parts_d: dict = {e: {} for e in poset.elements}
    conns: dict = {}
    for (e, x), i in idem.items():
        parts_g[e][x] = i
        parts_d[e][x] = []
    for (e, x), terms in delta.items():
        for a, (e2, y) in terms:
            if e2 == e:
                parts_d[e][x].append((a, y))
            else:
                conns.setdefault((e, e2), {}).setdefault(x, []).append((a, y))
    parts = {e: TypeDStructure(A, parts_g[e], parts_d[e], check=False) for e in poset.elements}
    morphs = {k: TypeDMorphism(parts[k[0]], parts[k[1]], t) for k, t in conns.items()}
    return FilteredTypeD(poset, parts, morphs, check=check)


def _toggle(acc: set, item) -> None:
    if item in acc:
        acc.remove(item)
    else:
        acc.add(item)


def random_filtered_typeD(
    rng: np.random.Generator,
    poset: FinitePoset | None = None,
    max_blocks: int = 3,
    algebra: DgAlgebraPresentation | None = None,
) -> FilteredTypeD:
    A = algebra if algebra is not None else torus_algebra()
    if poset is None:
        poset = random_poset(rng, int(rng.integers(1, 4)))
    placed = _place_blocks(rng, poset, _typeD_blocks(A), int(rng.integers(1, max_blocks + 1)))
    idem: dict = {}
    delta: dict = {}
    for b, ((parts, conns), chain) in enumerate(placed):
        for pos, (gens, dl) in enumerate(parts):
            e = chain[pos]
            for g, i in gens.items():
                idem[(e, (b, g))] = i
                delta[(e, (b, g))] = {(a, (e, (b, y))) for a, y in dl[g]}
        for (p, q), table in conns.items():
            for g, terms in table.items():
                for a, y in terms:
                    _toggle(delta[(chain[p], (b, g))], (a, (chain[q], (b, y))))
    keys = list(idem)
    for _ in range(int(rng.integers(0, 2 * len(keys) + 1))):
        x, y = (keys[int(k)] for k in rng.integers(0, len(keys), 2))
        if x == y or idem[x] != idem[y] or not poset.leq(x[0], y[0]):
            continue
        # conjugate by the involution x -> x + y
        new = {}
        for g, terms in delta.items():
            src = set(terms)
            if g == x:
                for t in delta[y]:
                    _toggle(src, t)
            out: set = set()
            for a, h in src:
                _toggle(out, (a, h))
                if h == x:
                    _toggle(out, (a, y))
            new[g] = out
        delta = new
    return _split_typeD(A, poset, idem, delta, check=True)


def _module_blocks(A: DgAlgebraPresentation) -> list:
    mods = list(probe_modules(A).values())
    blocks = []
    for m in mods:
        acts = {k: set(v) for k, v in m.actions.items()}
        blocks.append(([(dict(m.generators), acts)], {}))
        ident = {(x, ()): {x} for x in m.generators}
        blocks.append(([(dict(m.generators), acts), (dict(m.generators), acts)], {(0, 1): ident}))
    return blocks


def random_filtered_module(
    rng: np.random.Generator,
    poset: FinitePoset | None = None,
    max_blocks: int = 2,
    algebra: DgAlgebraPresentation | None = None,
) -> FilteredAInfModule:
    A = algebra if algebra is not None else torus_algebra()
    if poset is None:
        poset = random_poset(rng, int(rng.integers(1, 3)))
    placed = _place_blocks(rng, poset, _module_blocks(A), int(rng.integers(1, max_blocks + 1)))
    idem: dict = {}
    acts: dict = {}
    for b, ((parts, conns), chain) in enumerate(placed):
        for pos, (gens, table) in enumerate(parts):
            e = chain[pos]
            for g, i in gens.items():
                idem[(e, (b, g))] = i
            for (g, seq), ys in table.items():
                acts[((e, (b, g)), seq)] = {(e, (b, y)) for y in ys}
        for (p, q), table in conns.items():
            for (g, seq), ys in table.items():
                acc = acts.setdefault(((chain[p], (b, g)), seq), set())
                for y in ys:
                    _toggle(acc, (chain[q], (b, y)))
    keys = list(idem)
    for _ in range(int(rng.integers(0, 2 * len(keys) + 1))):
        x, y = (keys[int(k)] for k in rng.integers(0, len(keys), 2))
        if x == y or idem[x] != idem[y] or not poset.leq(x[0], y[0]):
            continue
        seqs_y = {seq for (g, seq) in acts if g == y}
        new: dict = {}
        for g, seq in set(acts) | {(x, seq) for seq in seqs_y}:
            src = set(acts.get((g, seq), set()))
            if g == x:
                for t in acts.get((y, seq), set()):
                    _toggle(src, t)
            out: set = set()
            for h in src:
                _toggle(out, h)
                if h == x:
                    _toggle(out, y)
            if out:
                new[(g, seq)] = out
        acts = new
    return _split_module(A, poset, idem, acts)


def _split_module(A, poset, idem: dict, acts: dict) -> FilteredAInfModule:
    parts_g: dict = {e: {} for e in poset.elements}
    parts_a: dict = {e: {} for e in poset.elements}
    conns: dict = {}
    for (e, x), i in idem.items():
        parts_g[e][x] = i
    for ((e, x), seq), outs in acts.items():
        for e2, y in outs:
            if e2 == e:
                parts_a[e].setdefault((x, seq), set()).add(y)
            else:
                conns.setdefault((e, e2), {}).setdefault((x, seq), set()).add(y)
    parts = {e: AInfModule(A, parts_g[e], parts_a[e], check=False) for e in poset.elements}
    morphs = {k: AInfMorphism(parts[k[0]], parts[k[1]], t) for k, t in conns.items()}
    return FilteredAInfModule(poset, parts, morphs, check=True)


# ---------------------------------------------------------------------------
# brute-force term expansion of the filtered box tensor product
# ---------------------------------------------------------------------------


def _op(fm: FilteredAInfModule, i, i2, x, word: tuple) -> frozenset:
    A = fm.algebra
    has_idem = any(A.is_idempotent(a) for a in word)
    if i == i2:
        part = fm.parts[i]
        if has_idem:
            if len(word) == 1 and word[0] == part.idem(x):
                return frozenset((x,))
            return frozenset()
        return part.actions.get((x, word), frozenset())
    f = fm.connectors.get((i, i2))
    if f is None or has_idem:
        return frozenset()
    return f.table.get((x, word), frozenset())


def box_connector_oracle(fm: FilteredAInfModule, fp: FilteredTypeD) -> dict:
    """Every term of the filtered box differential, summed over explicit step sequences.

    Returns {((i, j), (x, y)): set of ((i2, j2), (x2, y2))} with F2 coefficients.
    """
    kmax = max(p.arity_bound for p in fm.parts.values())
    counts: Counter = Counter()
    for i in fm.poset.elements:
        for j in fp.poset.elements:
            for x, ix in fm.parts[i].generators.items():
                for y, iy in fp.parts[j].generators.items():
                    if ix != iy:
                        continue
                    stack = [(j, y, ())]
                    while stack:
                        j2, y2, word = stack.pop()
                        for i2 in fm.poset.elements:
                            if fm.poset.leq(i, i2):
                                for x2 in _op(fm, i, i2, x, word):
                                    counts[((i, j), (x, y), (i2, j2), (x2, y2))] += 1
                        if len(word) == kmax:
                            continue
                        for a, z in fp.parts[j2].delta[y2]:
                            stack.append((j2, z, word + (a,)))
                        for (ja, jb), h in fp.connectors.items():
                            if ja == j2:
                                for a, z in h(y2):
                                    stack.append((jb, z, word + (a,)))
    out: dict = {}
    for (src, g, tgt, g2), c in counts.items():
        if c % 2:
            out.setdefault((src, g), set()).add((tgt, g2))
    return out


def filtered_terms(fc: FilteredComplex) -> dict:
    """The same term dictionary read off a filtered complex."""
    out: dict = {}
    for e in fc.poset.elements:
        c = fc.parts[e]
        for r, col in c.differential.entries:
            out.setdefault((e, c.generators[col]), set()).add((e, c.generators[r]))
    for (i, j), m in fc.connectors.items():
        src, tgt = fc.parts[i].generators, fc.parts[j].generators
        for r, col in m.entries:
            out.setdefault((i, src[col]), set()).add((j, tgt[r]))
    return out


# ---------------------------------------------------------------------------
# random domains
# ---------------------------------------------------------------------------


@dataclass
class DomainCase:
    """Two juxtaposable domains, their concatenation, and a periodic domain for linearity."""

    name: str
    first: DiagramDomain
    second: DiagramDomain
    joined: DiagramDomain
    periodic: DiagramDomain | None
    scale: int


def _combo(rng, base: DiagramDomain, lattice: Sequence[DiagramDomain], span: int = 2) -> DiagramDomain:
    out = base
    for p in lattice:
        out = out + int(rng.integers(-span, span + 1)) * p
    return out.with_corners(base.corners, base.families)


def _connecting(cache: dict, d: HeegaardMultiDiagram, corners: list, fams: list):
    key = (id(d), tuple(corners), tuple(fams))
    if key not in cache:
        cache[key] = connecting_domains(d, corners, fams)
    return cache[key]


def _point(g) -> int:
    return g.points[0][2]


def _bigon_case(rng, d: HeegaardMultiDiagram, name: str, cache: dict) -> DomainCase:
    pts = [_point(g) for g in enumerate_generators(d, "beta")]
    x, y, z = (pts[int(k)] for k in rng.integers(0, len(pts), 3))
    fams = [ALPHA, "beta"]
    b1, lat = _connecting(cache, d, [x, y], fams)
    b2, _ = _connecting(cache, d, [y, z], fams)
    first, second = _combo(rng, b1, lat), _combo(rng, b2, lat)
    joined = (first + second).with_corners([x, z], fams)
    per = lat[int(rng.integers(0, len(lat)))] if lat else None
    return DomainCase(name, first, second, joined, per, int(rng.integers(-3, 4)))


def _triangle_case(rng, d: HeegaardMultiDiagram, cache: dict) -> DomainCase:
    V = d.surface.vertex
    a0, c = V((5, 4)), V((4, 4))
    mids = [V((4, 6)), V((4, 12))]
    p, q = (mids[int(k)] for k in rng.integers(0, 2, 2))
    fams = [ALPHA, "beta_prime", "beta"]
    t, lat = _connecting(cache, d, [a0, p, c], fams)
    phi, lat2 = _connecting(cache, d, [q, p], ["beta_prime", "beta"])
    first = _combo(rng, t, lat)
    second = _combo(rng, phi, lat2)
    joined = (first + second).with_corners([a0, q, c], fams)
    per = lat[0] if lat else None
    return DomainCase("close approximation triangle", first, second, joined, per, int(rng.integers(-3, 4)))


def random_domain_cases(rng: np.random.Generator, count: int = 100) -> list[DomainCase]:
    """Juxtaposable domain pairs on the finger torus, three-point torus and close approximation."""
    diagrams = [("finger torus", finger_torus()), ("three point torus", three_point_torus())]
    close = close_approximation()
    out = []
    cache: dict = {}
    for k in range(count):
        if k % 3 == 2:
            out.append(_triangle_case(rng, close, cache))
        else:
            name, d = diagrams[k % 3]
            out.append(_bigon_case(rng, d, name, cache))
    return out


__all__ = [
    "DomainCase",
    "box_connector_oracle",
    "cone_filtration",
    "cube_filtration",
    "filtered_terms",
    "random_domain_cases",
    "random_filtered_complex",
    "random_filtered_module",
    "random_filtered_typeD",
    "random_poset",
]
