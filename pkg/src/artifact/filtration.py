"""Finite posets, poset-filtered chain complexes, and their spectral sequences."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Mapping, Sequence

from .errors import StructureError
from .f2chain import F2Complex, F2Matrix, cancel_reduce, direct_sum, homology_rank, mat_mul, name_key

INF = "inf"


class FinitePoset:
    """A finite set with a strict partial order given as a set of pairs (a, b) meaning a < b."""

    __slots__ = ("elements", "relation", "_index")

    def __init__(self, elements: Sequence[Hashable], relation: Iterable[tuple[Hashable, Hashable]]):
        self.elements = tuple(elements)
        self._index = {e: i for i, e in enumerate(self.elements)}
        if len(self._index) != len(self.elements):
            raise ValueError("duplicate poset elements")
        self.relation = frozenset((a, b) for a, b in relation)
        for a, b in self.relation:
            if a not in self._index or b not in self._index:
                raise ValueError(f"relation pair ({a!r}, {b!r}) uses unknown elements")
            if a == b:
                raise ValueError(f"relation is not irreflexive at {a!r}")
        for a, b in self.relation:
            for c in self.elements:
                if (b, c) in self.relation and (a, c) not in self.relation:
                    raise ValueError(f"relation is not transitive: {a!r} < {b!r} < {c!r}")

    def __repr__(self) -> str:
        return f"FinitePoset({len(self.elements)} elements, {len(self.relation)} relations)"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FinitePoset):
            return NotImplemented
        return set(self.elements) == set(other.elements) and self.relation == other.relation

    def __hash__(self) -> int:
        return hash((frozenset(self.elements), self.relation))

    def __contains__(self, e: Hashable) -> bool:
        return e in self._index

    def __iter__(self):
        return iter(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def less(self, a: Hashable, b: Hashable) -> bool:
        return (a, b) in self.relation

    def leq(self, a: Hashable, b: Hashable) -> bool:
        return a == b or (a, b) in self.relation

    def between(self, a: Hashable, b: Hashable) -> list:
        """Elements j with a < j < b, in element order."""
        return [j for j in self.elements if (a, j) in self.relation and (j, b) in self.relation]

    def pairs(self) -> list[tuple[Hashable, Hashable]]:
        """All strict pairs in deterministic order."""
        return sorted(self.relation, key=lambda p: (self._index[p[0]], self._index[p[1]]))

    def chains(self, a: Hashable, b: Hashable) -> list[tuple]:
        """All strictly increasing chains from a to b (inclusive)."""
        if a == b:
            return [(a,)]
        out = []
        for j in [b] + self.between(a, b):
            if j == b:
                out.append((a, b))
            else:
                for rest in self.chains(j, b):
                    out.append((a,) + rest)
        return sorted(out, key=lambda ch: [self._index[e] for e in ch])

    def is_consecutive(self, a: Hashable, b: Hashable) -> bool:
        return self.less(a, b) and not self.between(a, b)

    @classmethod
    def chain(cls, elements: Sequence[Hashable]) -> "FinitePoset":
        """Totally ordered set e0 < e1 < ..."""
        els = list(elements)
        return cls(els, [(els[i], els[j]) for i in range(len(els)) for j in range(i + 1, len(els))])

    @classmethod
    def three_chain(cls) -> "FinitePoset":
        """The 3-chain 0 < 1 < inf."""
        return cls.chain([0, 1, INF])

    @classmethod
    def product(cls, p: "FinitePoset", q: "FinitePoset") -> "FinitePoset":
        """Product order on pairs (a, b)."""
        els = [(a, b) for a in p.elements for b in q.elements]
        rel = [
            (x, y)
            for x in els
            for y in els
            if x != y and p.leq(x[0], y[0]) and q.leq(x[1], y[1])
        ]
        return cls(els, rel)

    @classmethod
    def power(cls, base: "FinitePoset", n: int) -> "FinitePoset":
        """Product order on n-tuples over base (flat tuples)."""
        els = [tuple(t) for t in itertools.product(base.elements, repeat=n)]
        rel = [
            (x, y)
            for x in els
            for y in els
            if x != y and all(base.leq(a, b) for a, b in zip(x, y))
        ]
        return cls(els, rel)

    @classmethod
    def cube(cls, n: int) -> "FinitePoset":
        """{0,1}^n with the product order."""
        return cls.power(cls.chain([0, 1]), n)

    @classmethod
    def cube3(cls, c: int) -> "FinitePoset":
        """{0,1,inf}^c with the product order."""
        return cls.power(cls.three_chain(), c)


def cube_rank(element) -> int:
    """Default rank on cube elements: coordinate sum with inf counted as 2."""
    if isinstance(element, tuple):
        return sum(2 if v == INF else int(v) for v in element)
    return 2 if element == INF else int(element)


class FilteredComplex:
    """Poset-filtered chain complex: parts C^i and connectors D^{i<j}: C^i -> C^j."""

    __slots__ = ("poset", "parts", "connectors")

    def __init__(
        self,
        poset: FinitePoset,
        parts: Mapping[Hashable, F2Complex],
        connectors: Mapping[tuple[Hashable, Hashable], F2Matrix] | None = None,
    ):
        self.poset = poset
        self.parts = {e: parts.get(e, F2Complex([])) for e in poset.elements}
        for e in parts:
            if e not in poset:
                raise StructureError(f"part at unknown poset element {e!r}")
        conns = {}
        for (i, j), m in (connectors or {}).items():
            if not poset.less(i, j):
                raise StructureError(f"connector ({i!r}, {j!r}) is not on a strict pair")
            if m.shape != (len(self.parts[j]), len(self.parts[i])):
                raise StructureError(f"connector ({i!r}, {j!r}) has shape {m.shape}")
            if not m.is_zero():
                conns[(i, j)] = m
        self.connectors = conns

    def connector(self, i, j) -> F2Matrix:
        m = self.connectors.get((i, j))
        if m is None:
            return F2Matrix.zero(len(self.parts[j]), len(self.parts[i]))
        return m

    def keyed_generators(self) -> list[tuple]:
        return [(e, g) for e in self.poset.elements for g in self.parts[e].generators]

    @classmethod
    def from_total(
        cls,
        poset: FinitePoset,
        generators: Sequence[tuple[Hashable, Hashable]],
        differential: F2Matrix,
    ) -> "FilteredComplex":
        """Split a complex on keyed generators (element, name) into parts and connectors."""
        names: dict = {e: [] for e in poset.elements}
        for e, g in generators:
            names[e].append(g)
        local = {e: {g: i for i, g in enumerate(names[e])} for e in poset.elements}
        blocks: dict = {}
        for r, c in differential.entries:
            (ei, gi), (ej, gj) = generators[c], generators[r]
            if not poset.leq(ei, ej):
                raise StructureError(f"differential entry {generators[c]!r} -> {generators[r]!r} lowers the filtration")
            blocks.setdefault((ei, ej), []).append((local[ej][gj], local[ei][gi]))
        parts = {}
        for e in poset.elements:
            n = len(names[e])
            parts[e] = F2Complex(names[e], F2Matrix(n, n, blocks.get((e, e), [])))
        conns = {}
        for (i, j), ents in blocks.items():
            if i != j:
                conns[(i, j)] = F2Matrix(len(names[j]), len(names[i]), ents)
        return cls(poset, parts, conns)

    def __repr__(self) -> str:
        return f"FilteredComplex({len(self.poset)} levels, {len(self.keyed_generators())} generators)"


@dataclass(frozen=True)
class Violation:
    source: Hashable
    target: Hashable
    witness: tuple  # (generator in C^i, generator in C^k) with nonzero residual coefficient

    def __str__(self) -> str:
        return f"compatibility fails at ({self.source!r}, {self.target!r}): witness {self.witness!r}"


def compatibility_residual(fc: FilteredComplex, i, k) -> F2Matrix:
    """d D^{ik} + D^{ik} d + sum_j D^{jk} D^{ij}."""
    dik = fc.connector(i, k)
    res = mat_mul(fc.parts[k].differential, dik) + mat_mul(dik, fc.parts[i].differential)
    for j in fc.poset.between(i, k):
        res = res + mat_mul(fc.connector(j, k), fc.connector(i, j))
    return res


def validate_filtered(fc: FilteredComplex) -> list[Violation]:
    """Every strict pair (i, k) at which the compatibility identity fails."""
    out = []
    for e in fc.poset.elements:
        if fc.parts[e].violations():
            out.append(Violation(e, e, tuple(fc.parts[e].violations())))
    for i, k in fc.poset.pairs():
        res = compatibility_residual(fc, i, k)
        if not res.is_zero():
            r, c = min(res.entries)
            out.append(Violation(i, k, (fc.parts[i].generators[c], fc.parts[k].generators[r])))
    return out


def total_complex(fc: FilteredComplex, check: bool = True) -> F2Complex:
    """Direct sum of the parts with D = sum of internal differentials and connectors."""
    if check:
        bad = validate_filtered(fc)
        if bad:
            raise StructureError(str(bad[0]))
    gens = fc.keyed_generators()
    offset = {}
    k = 0
    for e in fc.poset.elements:
        offset[e] = k
        k += len(fc.parts[e])
    entries = []
    for e in fc.poset.elements:
        o = offset[e]
        entries.extend((r + o, c + o) for r, c in fc.parts[e].differential.entries)
    for (i, j), m in fc.connectors.items():
        entries.extend((r + offset[j], c + offset[i]) for r, c in m.entries)
    return F2Complex(gens, F2Matrix(k, k, entries), check=check)


def associated_graded(fc: FilteredComplex) -> F2Complex:
    """Direct sum of the parts with only their internal differentials."""
    gens = fc.keyed_generators()
    offset = 0
    entries = []
    for e in fc.poset.elements:
        entries.extend((r + offset, c + offset) for r, c in fc.parts[e].differential.entries)
        offset += len(fc.parts[e])
    return F2Complex(gens, F2Matrix(offset, offset, entries))


@dataclass
class SpectralSequencePages:
    rank_grid: dict[tuple[int, int], int]
    page_differentials: dict[int, F2Complex]
    stabilization_page: int
    degrees: tuple[int, ...]
    degree_of: dict = field(repr=False, default_factory=dict)

    def page(self, r: int) -> dict[int, int]:
        r = min(r, max(p for p, _ in self.rank_grid))
        return {p: self.rank_grid[(r, p)] for p in self.degrees}

    def total(self, r: int) -> int:
        return sum(self.page(r).values())

    @property
    def last_page(self) -> int:
        return max(p for p, _ in self.rank_grid)

    def e_infinity(self) -> dict[int, int]:
        return self.page(self.last_page)


def _rank_lookup(rank_fn) -> Callable[[Hashable], int]:
    if rank_fn is None:
        return cube_rank
    if isinstance(rank_fn, Mapping):
        return lambda e: int(rank_fn[e])
    return rank_fn


def spectral_sequence(fc: FilteredComplex, rank_fn=None) -> SpectralSequencePages:
    """Pages of the spectral sequence of the Z-filtration induced by ``rank_fn``.

    ``rank_fn`` maps poset elements to integers and must be strictly increasing
    on comparable pairs. It may be a callable or a mapping; default is the cube rank.
    """
    rank = _rank_lookup(rank_fn)
    for a, b in fc.poset.relation:
        if not rank(a) < rank(b):
            raise ValueError(f"rank function is not strictly monotone on {a!r} < {b!r}")
    total = total_complex(fc)
    deg = {g: rank(g[0]) for g in total.generators}
    degrees = tuple(sorted({rank(e) for e in fc.poset.elements}))
    current = total
    rank_grid: dict = {}
    diffs: dict = {}
    r = 0
    while True:
        for p in degrees:
            rank_grid[(r, p)] = 0
        for g in current.generators:
            rank_grid[(r, deg[g])] += 1
        bnd = current.boundaries()
        page_bnd = {g: {t for t in ts if deg[t] - deg[g] == r} for g, ts in bnd.items()}
        diffs[r] = F2Complex.from_boundaries(page_bnd, current.generators)
        if current.differential.is_zero():
            break
        rr = r
        current, _ = cancel_reduce(current, allowed=lambda x, y: deg[y] - deg[x] == rr, track=False)
        leftover = [g for g in current.generators for t in current.boundary(g) if deg[t] - deg[g] == r]
        if leftover:
            raise StructureError(f"page {r}: entries at {leftover[0]!r} cannot be cancelled")
        r += 1
    last = r
    stab = last
    while stab > 0 and all(rank_grid[(stab - 1, p)] == rank_grid[(last, p)] for p in degrees):
        stab -= 1
    return SpectralSequencePages(rank_grid, diffs, stab, degrees, deg)
