"""Type D structures, A-infinity modules, DA and DD bimodules over dg algebras.

All structures are finite structure-constant tables. Algebra elements are
frozensets of basis names; tensor elements are frozensets of tuples such as
(a, y) for a in the algebra basis and y a generator.

Conventions:
  * Strict unitality is implicit for modules and DA bimodules:
    m_2(x, iota) = x when iota is the right idempotent of x, and any higher
    operation with an idempotent input vanishes.
  * When two maps are applied in sequence along the module flow, the
    algebra output of the earlier one is the left input of mu_2.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Iterator, Mapping, Sequence

from .algebra import DgAlgebraPresentation, add
from .errors import BoundednessError, StructureError
from .f2chain import F2Complex, F2Matrix, name_key
from .filtration import FilteredComplex, FinitePoset, validate_filtered


def _toggle(acc: dict | set, item) -> None:
    if item in acc:
        acc.remove(item) if isinstance(acc, set) else acc.pop(item)
    else:
        acc.add(item) if isinstance(acc, set) else acc.__setitem__(item, 1)


def _same_algebra(a: DgAlgebraPresentation, b: DgAlgebraPresentation) -> bool:
    return a is b or a.to_dict() == b.to_dict()


def _require_same(a: DgAlgebraPresentation, b: DgAlgebraPresentation, what: str) -> None:
    if not _same_algebra(a, b):
        raise ValueError(f"{what}: algebras differ ({a.name!r} vs {b.name!r})")


def _fmt_terms(terms: Iterable) -> str:
    parts = []
    for t in sorted(terms, key=repr):
        if isinstance(t, tuple):
            parts.append("*".join(str(u) for u in t))
        else:
            parts.append(str(t))
    return " + ".join(parts) or "0"


@dataclass(frozen=True)
class Residual:
    """Nonzero residual of a structure equation at a generator (and inputs)."""

    generator: Hashable
    terms: frozenset
    inputs: tuple = ()
    note: str = ""

    def __str__(self) -> str:
        where = f"{self.generator!r}" + (f" with inputs {self.inputs}" if self.inputs else "")
        s = f"residual at {where}: {_fmt_terms(self.terms)}"
        return s + (f" ({self.note})" if self.note else "")


# ---------------------------------------------------------------------------
# type D structures and their morphisms
# ---------------------------------------------------------------------------


def _gens_dict(generators) -> dict:
    if isinstance(generators, Mapping):
        return dict(generators)
    return {g: i for g, i in generators}


class TypeDStructure:
    """Left type D structure: generators with idempotents and delta^1(x) in A (x) X."""

    def __init__(
        self,
        algebra: DgAlgebraPresentation,
        generators: Mapping[Hashable, str] | Sequence[tuple[Hashable, str]],
        delta: Mapping[Hashable, Iterable[tuple[str, Hashable]]] | None = None,
        check: bool = True,
        name: str = "",
    ):
        self.algebra = algebra
        self.name = name
        self.generators = _gens_dict(generators)
        self.delta: dict = {}
        for x in self.generators:
            if self.generators[x] not in algebra.idempotents:
                raise StructureError(f"generator {x!r} has unknown idempotent {self.generators[x]!r}")
        for x, terms in (delta or {}).items():
            if x not in self.generators:
                raise StructureError(f"delta given for unknown generator {x!r}")
            acc: set = set()
            for a, y in terms:
                _toggle(acc, (a, y))
            self.delta[x] = frozenset(acc)
        for x in self.generators:
            self.delta.setdefault(x, frozenset())
        bad = self.discipline_errors()
        if bad:
            raise StructureError(bad[0])
        if check:
            res = check_typeD(self)
            if res:
                raise StructureError(str(res[0]))

    def discipline_errors(self) -> list[str]:
        out = []
        A = self.algebra
        for x, terms in self.delta.items():
            for a, y in terms:
                if a not in A:
                    out.append(f"delta({x!r}) uses unknown algebra element {a!r}")
                elif y not in self.generators:
                    out.append(f"delta({x!r}) hits unknown generator {y!r}")
                elif A.left(a) != self.generators[x] or A.right(a) != self.generators[y]:
                    out.append(f"idempotent mismatch in delta({x!r}): term {a}*{y!r}")
        return out

    def __repr__(self) -> str:
        return f"TypeDStructure({self.name or '?'}, {len(self.generators)} generators)"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TypeDStructure):
            return NotImplemented
        return (
            _same_algebra(self.algebra, other.algebra)
            and self.generators == other.generators
            and self.delta == other.delta
        )

    def idem(self, x: Hashable) -> str:
        return self.generators[x]

    def iterates(self, kmax: int) -> list[dict]:
        """delta^k for k = 0..kmax as maps x -> frozenset of (word, y)."""
        cur = {x: frozenset({((), x)}) for x in self.generators}
        out = [cur]
        for _ in range(kmax):
            nxt = {}
            for x, terms in cur.items():
                acc: set = set()
                for w, y in terms:
                    for a, z in self.delta[y]:
                        _toggle(acc, (w + (a,), z))
                nxt[x] = frozenset(acc)
            out.append(nxt)
            cur = nxt
            if not any(cur.values()):
                break
        return out

    def is_bounded(self) -> bool:
        """Iterates of delta^1 vanish eventually (checked at the generator count)."""
        its = self.iterates(len(self.generators) + 1)
        return not any(its[-1].values())

    def boundedness_degree(self) -> int | None:
        """Smallest k with delta^k = 0, or None if unbounded."""
        its = self.iterates(len(self.generators) + 1)
        if any(its[-1].values()):
            return None
        return len(its) - 1

    def to_dict(self) -> dict:
        return {
            "generators": [[str(x), i] for x, i in self.generators.items()],
            "delta": {str(x): sorted([a, str(y)] for a, y in t) for x, t in self.delta.items() if t},
        }


def check_typeD(x: TypeDStructure) -> list[Residual]:
    """Residual of the type D structure equation at each generator."""
    bad = x.discipline_errors()
    if bad:
        raise StructureError(bad[0])
    A = x.algebra
    out = []
    for g in x.generators:
        acc: set = set()
        for a, y in x.delta[g]:
            for c in A.mu1_basis(a):
                _toggle(acc, (c, y))
            for b, z in x.delta[y]:
                for c in A.mu2_basis(a, b):
                    _toggle(acc, (c, z))
        if acc:
            out.append(Residual(g, frozenset(acc)))
    return out


class TypeDMorphism:
    """A morphism h^1: X -> A (x) Y of type D structures."""

    def __init__(
        self,
        source: TypeDStructure,
        target: TypeDStructure,
        table: Mapping[Hashable, Iterable[tuple[str, Hashable]]] | None = None,
    ):
        _require_same(source.algebra, target.algebra, "morphism")
        self.source = source
        self.target = target
        A = source.algebra
        self.table: dict = {}
        for x, terms in (table or {}).items():
            if x not in source.generators:
                raise StructureError(f"morphism defined on unknown generator {x!r}")
            acc: set = set()
            for a, y in terms:
                if y not in target.generators:
                    raise StructureError(f"morphism hits unknown generator {y!r}")
                if A.left(a) != source.idem(x) or A.right(a) != target.idem(y):
                    raise StructureError(f"idempotent mismatch in morphism term {x!r} -> {a}*{y!r}")
                _toggle(acc, (a, y))
            if acc:
                self.table[x] = frozenset(acc)

    @property
    def algebra(self) -> DgAlgebraPresentation:
        return self.source.algebra

    def __call__(self, x: Hashable) -> frozenset:
        return self.table.get(x, frozenset())

    def __add__(self, other: "TypeDMorphism") -> "TypeDMorphism":
        self._check_parallel(other)
        t = {x: self(x) ^ other(x) for x in self.source.generators}
        return TypeDMorphism(self.source, self.target, t)

    def _check_parallel(self, other: "TypeDMorphism") -> None:
        if self.source is not other.source and self.source != other.source:
            raise ValueError("morphisms have different sources")
        if self.target is not other.target and self.target != other.target:
            raise ValueError("morphisms have different targets")

    def is_zero(self) -> bool:
        return not self.table

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TypeDMorphism):
            return NotImplemented
        return self.table == other.table and set(self.source.generators) == set(other.source.generators)

    def __repr__(self) -> str:
        return f"TypeDMorphism({_fmt_table(self.table)})"

    @classmethod
    def zero(cls, source: TypeDStructure, target: TypeDStructure) -> "TypeDMorphism":
        return cls(source, target, {})

    @classmethod
    def identity(cls, x: TypeDStructure) -> "TypeDMorphism":
        return cls(x, x, {g: [(i, g)] for g, i in x.generators.items()})


def _fmt_table(table: Mapping) -> str:
    return "; ".join(f"{k!r} -> {_fmt_terms(v)}" for k, v in sorted(table.items(), key=lambda kv: repr(kv[0])))


def morphism_differential(h: TypeDMorphism) -> TypeDMorphism:
    """d(h) = mu1 h + mu2(delta_X then h) + mu2(h then delta_Y)."""
    A = h.algebra
    X, Y = h.source, h.target
    table = {}
    for x in X.generators:
        acc: set = set()
        for a, y in h(x):
            for c in A.mu1_basis(a):
                _toggle(acc, (c, y))
            for b, z in Y.delta[y]:
                for c in A.mu2_basis(a, b):
                    _toggle(acc, (c, z))
        for a, x2 in X.delta[x]:
            for b, y in h(x2):
                for c in A.mu2_basis(a, b):
                    _toggle(acc, (c, y))
        table[x] = acc
    return TypeDMorphism(X, Y, table)


def compose_typeD(h: TypeDMorphism, g: TypeDMorphism) -> TypeDMorphism:
    """(h o g)(x) = mu2(output of g, output of h)."""
    _require_same(h.algebra, g.algebra, "composition")
    if g.target is not h.source and g.target != h.source:
        raise ValueError("composition: target of g is not source of h")
    A = h.algebra
    table = {}
    for x in g.source.generators:
        acc: set = set()
        for a, y in g(x):
            for b, z in h(y):
                for c in A.mu2_basis(a, b):
                    _toggle(acc, (c, z))
        table[x] = acc
    return TypeDMorphism(g.source, h.target, table)


def _disjoint_names(xs: Iterable, ys: Iterable) -> tuple[Callable, Callable]:
    if set(xs) & set(ys):
        return (lambda x: ("src", x)), (lambda y: ("tgt", y))
    return (lambda x: x), (lambda y: y)


def mapping_cone(f: TypeDMorphism, name: str = "") -> TypeDStructure:
    """Cone of a cycle f: X -> Y; generators X and Y (tagged if names collide)."""
    if not morphism_differential(f).is_zero():
        raise ValueError(f"mapping cone: morphism is not a cycle, d(f) = {morphism_differential(f)!r}")
    X, Y = f.source, f.target
    sx, sy = _disjoint_names(X.generators, Y.generators)
    gens = {sx(x): i for x, i in X.generators.items()}
    gens.update({sy(y): i for y, i in Y.generators.items()})
    delta: dict = {}
    for x in X.generators:
        delta[sx(x)] = [(a, sx(x2)) for a, x2 in X.delta[x]] + [(a, sy(y)) for a, y in f(x)]
    for y in Y.generators:
        delta[sy(y)] = [(a, sy(y2)) for a, y2 in Y.delta[y]]
    return TypeDStructure(X.algebra, gens, delta, name=name or "cone")


def direct_sum_typeD(*xs: TypeDStructure) -> TypeDStructure:
    gens: dict = {}
    delta: dict = {}
    for x in xs:
        for g, i in x.generators.items():
            if g in gens:
                raise StructureError(f"duplicate generator {g!r} in direct sum")
            gens[g] = i
            delta[g] = x.delta[g]
    return TypeDStructure(xs[0].algebra, gens, delta)


# ---------------------------------------------------------------------------
# A-infinity modules
# ---------------------------------------------------------------------------


class AInfModule:
    """Right A-infinity module over a dg algebra, as a finite action table.

    ``actions[(x, (a1, ..., ak))]`` is m_{1+k}(x, a1, ..., ak), for k >= 0 and
    non-idempotent inputs. If ``bounded`` is true, every operation missing from
    the table vanishes. Otherwise the table is only known up to ``arity_bound``
    algebra inputs.
    """

    def __init__(
        self,
        algebra: DgAlgebraPresentation,
        generators: Mapping[Hashable, str] | Sequence[tuple[Hashable, str]],
        actions: Mapping[tuple[Hashable, tuple], Iterable[Hashable]] | None = None,
        bounded: bool = True,
        arity_bound: int | None = None,
        check: bool = True,
        name: str = "",
    ):
        self.algebra = algebra
        self.name = name
        self.generators = _gens_dict(generators)
        self.bounded = bounded
        A = algebra
        self.actions: dict = {}
        for (x, seq), out in (actions or {}).items():
            seq = tuple(seq)
            if x not in self.generators:
                raise StructureError(f"action on unknown generator {x!r}")
            if any(A.is_idempotent(a) for a in seq):
                raise StructureError(f"idempotent inputs are implicit; got {seq}")
            out = frozenset(out)
            for y in out:
                if y not in self.generators:
                    raise StructureError(f"action output {y!r} unknown")
            if out:
                self.actions[(x, seq)] = out
        top = max((len(s) for _, s in self.actions), default=0)
        if bounded:
            self.arity_bound = max(top, 1) if arity_bound is None else max(arity_bound, top, 1)
        else:
            if arity_bound is None:
                raise StructureError("an unbounded module needs an arity bound for its table")
            self.arity_bound = arity_bound
        bad = self.discipline_errors()
        if bad:
            raise StructureError(bad[0])
        if check:
            res = check_module(self)
            if res:
                raise StructureError(str(res[0]))

    def __repr__(self) -> str:
        return f"AInfModule({self.name or '?'}, {len(self.generators)} generators, arity {self.arity_bound})"

    def idem(self, x: Hashable) -> str:
        return self.generators[x]

    def discipline_errors(self) -> list[str]:
        A = self.algebra
        out = []
        for (x, seq), ys in self.actions.items():
            cur = self.idem(x)
            for a in seq:
                if A.left(a) != cur:
                    out.append(f"idempotent mismatch in m({x!r}, {seq})")
                    break
                cur = A.right(a)
            else:
                for y in ys:
                    if self.idem(y) != cur:
                        out.append(f"output {y!r} of m({x!r}, {seq}) has the wrong idempotent")
        return out

    def m(self, x: Hashable, seq: tuple) -> frozenset:
        """m_{1+k}(x, a1..ak) on basis inputs."""
        A = self.algebra
        k = len(seq)
        if k and any(A.is_idempotent(a) for a in seq):
            if k == 1:
                return frozenset((x,)) if seq[0] == self.idem(x) else frozenset()
            return frozenset()
        cur = self.idem(x)
        for a in seq:
            if A.left(a) != cur:
                return frozenset()
            cur = A.right(a)
        if k > self.arity_bound and not self.bounded:
            raise BoundednessError(f"operation of arity {k + 1} is beyond the tabulated range of {self.name or 'module'}")
        return self.actions.get((x, seq), frozenset())

    def m_elems(self, xs: Iterable[Hashable], seqs: Sequence[Iterable[str]]) -> frozenset:
        """Multilinear extension over F2-combinations."""
        acc: set = set()
        xs = list(xs)
        for combo in itertools.product(*[sorted(s) for s in seqs]):
            for x in xs:
                for y in self.m(x, tuple(combo)):
                    _toggle(acc, y)
        return frozenset(acc)


def _compatible_sequences(A: DgAlgebraPresentation, start: str, length: int) -> Iterator[tuple]:
    """Sequences of non-idempotent basis elements composable from idempotent ``start``."""
    by_left: dict = {}
    for a in A.nonidempotent():
        by_left.setdefault(A.left(a), []).append(a)

    def rec(cur, n):
        if n == 0:
            yield ()
            return
        for a in by_left.get(cur, []):
            for rest in rec(A.right(a), n - 1):
                yield (a,) + rest

    yield from rec(start, length)


def _module_relation(m: AInfModule, x, seq: tuple, op: Callable[[Hashable, tuple], frozenset]) -> frozenset:
    A = m.algebra
    n = len(seq)
    acc: set = set()
    for i in range(n + 1):
        for y in op(x, seq[:i]):
            for z in op(y, seq[i:]):
                _toggle(acc, z)
    for k in range(n):
        for c in A.mu1_basis(seq[k]):
            for z in op(x, seq[:k] + (c,) + seq[k + 1:]):
                _toggle(acc, z)
    for k in range(n - 1):
        for c in A.mu2_basis(seq[k], seq[k + 1]):
            for z in op(x, seq[:k] + (c,) + seq[k + 2:]):
                _toggle(acc, z)
    return frozenset(acc)


def check_module(m: AInfModule, max_inputs: int | None = None) -> list[Residual]:
    """A-infinity module relations on all composable non-idempotent inputs.

    For bounded modules the relations are checked up to twice the arity bound
    (beyond that every term vanishes); for truncated tables up to the bound.
    """
    if max_inputs is None:
        max_inputs = 2 * m.arity_bound if m.bounded else m.arity_bound
    out = []
    for x in m.generators:
        for n in range(max_inputs + 1):
            for seq in _compatible_sequences(m.algebra, m.idem(x), n):
                r = _module_relation(m, x, seq, m.m)
                if r:
                    out.append(Residual(x, r, seq))
    return out


def regular_module(A: DgAlgebraPresentation, idem: str) -> AInfModule:
    """The right module idem*A with m1 = mu1 and m2 = mu2."""
    gens = {b.name: b.right for b in A.basis if b.left == idem}
    actions = {}
    for t in gens:
        if A.mu1_basis(t):
            actions[(t, ())] = A.mu1_basis(t)
        for a in A.nonidempotent():
            p = A.mu2_basis(t, a)
            if p:
                actions[(t, (a,))] = p
    return AInfModule(A, gens, actions, name=f"{idem}A")


def identity_module_morphism(m: AInfModule) -> "AInfMorphism":
    return AInfMorphism(m, m, {(x, ()): [x] for x in m.generators})


class AInfMorphism:
    """Morphism f_{1+k}(x, a1..ak) -> target generators, given as a table."""

    def __init__(self, source: AInfModule, target: AInfModule, table: Mapping[tuple[Hashable, tuple], Iterable[Hashable]] | None = None):
        _require_same(source.algebra, target.algebra, "module morphism")
        self.source = source
        self.target = target
        self.table = {}
        for (x, seq), ys in (table or {}).items():
            ys = frozenset(ys)
            if ys:
                self.table[(x, tuple(seq))] = ys

    def f(self, x: Hashable, seq: tuple) -> frozenset:
        A = self.source.algebra
        if seq and any(A.is_idempotent(a) for a in seq):
            return frozenset()
        return self.table.get((x, seq), frozenset())


# ---------------------------------------------------------------------------
# box tensor products
# ---------------------------------------------------------------------------


def _path_limit(m: AInfModule, p: TypeDStructure) -> int:
    """Longest delta-path length that can contribute to M box P."""
    if m.bounded:
        return m.arity_bound
    deg = p.boundedness_degree()
    if deg is None:
        raise BoundednessError("neither side is bounded: module table is truncated and type D structure is unbounded")
    if deg - 1 > m.arity_bound:
        raise BoundednessError(
            f"type D structure needs operations with {deg - 1} inputs but the module table stops at {m.arity_bound}"
        )
    return deg - 1


def box_tensor(m: AInfModule, p: TypeDStructure) -> F2Complex:
    """The chain complex M box P on idempotent-compatible pairs (x, y)."""
    _require_same(m.algebra, p.algebra, "box tensor")
    kmax = _path_limit(m, p)
    its = p.iterates(kmax)
    gens = [(x, y) for x in m.generators for y in p.generators if m.idem(x) == p.idem(y)]
    bnd: dict = {}
    for x, y in gens:
        acc: set = set()
        for it in its:
            for w, y2 in it[y]:
                for x2 in m.m(x, w):
                    _toggle(acc, (x2, y2))
        bnd[(x, y)] = acc
    return F2Complex.from_boundaries(bnd, gens)


def box_tensor_morphism(m: AInfModule, f: TypeDMorphism) -> F2Matrix:
    """The chain map id_M box f between M box X and M box Y.

    A generator x (y) goes to the sum over delta-paths in X, one term of f,
    then delta-paths in Y, fed into the module operations of M.
    """
    _require_same(m.algebra, f.algebra, "box tensor of a morphism")
    X, Y = f.source, f.target
    kx = _path_limit(m, X)
    ky = _path_limit(m, Y)
    its_x = X.iterates(kx)
    its_y = Y.iterates(ky)
    src = box_tensor(m, X)
    tgt = box_tensor(m, Y)
    cols: dict = {}
    for j, (x, y) in enumerate(src.generators):
        acc: set = set()
        for itx in its_x:
            for w1, y1 in itx[y]:
                for a, y2 in f(y1):
                    for ity in its_y:
                        for w2, y3 in ity[y2]:
                            for x2 in m.m(x, w1 + (a,) + w2):
                                _toggle(acc, tgt.index((x2, y3)))
        cols[j] = acc
    return F2Matrix.from_columns(len(tgt), len(src), cols)


def chain_cone(fmat: F2Matrix, source: F2Complex, target: F2Complex) -> F2Complex:
    """Cone of a chain map on generators ("src", x) and ("tgt", y)."""
    if fmat.shape != (len(target), len(source)):
        raise ValueError(f"chain map shape {fmat.shape} does not match {len(target)}x{len(source)}")
    if not (target.differential @ fmat + fmat @ source.differential).is_zero():
        raise ValueError("chain cone: map does not commute with the differentials")
    gens = [("src", x) for x in source.generators] + [("tgt", y) for y in target.generators]
    bnd = {}
    for j, x in enumerate(source.generators):
        bnd[("src", x)] = [("src", z) for z in source.boundary(x)] + [
            ("tgt", target.generators[r]) for r in fmat.column(j)
        ]
    for y in target.generators:
        bnd[("tgt", y)] = [("tgt", z) for z in target.boundary(y)]
    return F2Complex.from_boundaries(bnd, gens)


# ---------------------------------------------------------------------------
# filtered structures
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FilteredViolation:
    source: Hashable
    target: Hashable
    residual: Residual

    def __str__(self) -> str:
        return f"compatibility fails at ({self.source!r}, {self.target!r}): {self.residual}"


def _split_residuals(residuals: Iterable[Residual], key_of: Callable) -> list[FilteredViolation]:
    out = []
    for r in residuals:
        i, x = r.generator
        by_target: dict = {}
        for t in r.terms:
            by_target.setdefault(key_of(t), set()).add(t)
        for k in sorted(by_target, key=repr):
            out.append(FilteredViolation(i, k, Residual(r.generator, frozenset(by_target[k]), r.inputs)))
    return out


class FilteredTypeD:
    """Poset-filtered type D structure: parts and connector morphisms h^{i<j}."""

    def __init__(
        self,
        poset: FinitePoset,
        parts: Mapping[Hashable, TypeDStructure],
        connectors: Mapping[tuple[Hashable, Hashable], TypeDMorphism] | None = None,
        check: bool = True,
    ):
        self.poset = poset
        self.parts = {e: parts[e] for e in poset.elements}
        algs = [p.algebra for p in self.parts.values()]
        for a in algs[1:]:
            _require_same(algs[0], a, "filtered type D")
        self.algebra = algs[0]
        self.connectors = {}
        for (i, j), h in (connectors or {}).items():
            if not poset.less(i, j):
                raise StructureError(f"connector ({i!r}, {j!r}) is not on a strict pair")
            if not h.is_zero():
                self.connectors[(i, j)] = h
        if check:
            bad = self.violations()
            if bad:
                raise StructureError(str(bad[0]))

    def connector(self, i, j) -> TypeDMorphism:
        h = self.connectors.get((i, j))
        return h if h is not None else TypeDMorphism.zero(self.parts[i], self.parts[j])

    def total(self, check: bool = False) -> TypeDStructure:
        gens = {(e, x): i for e in self.poset.elements for x, i in self.parts[e].generators.items()}
        delta: dict = {}
        for e in self.poset.elements:
            for x, terms in self.parts[e].delta.items():
                delta[(e, x)] = [(a, (e, y)) for a, y in terms]
        for (i, j), h in self.connectors.items():
            for x, terms in h.table.items():
                delta[(i, x)] = delta.get((i, x), []) + [(a, (j, y)) for a, y in terms]
        return TypeDStructure(self.algebra, gens, delta, check=check)

    def violations(self) -> list[FilteredViolation]:
        return _split_residuals(check_typeD(self.total()), lambda t: t[1][0])


class FilteredAInfModule:
    """Poset-filtered A-infinity module: parts and connector morphisms F^{i<j}."""

    def __init__(
        self,
        poset: FinitePoset,
        parts: Mapping[Hashable, AInfModule],
        connectors: Mapping[tuple[Hashable, Hashable], AInfMorphism] | None = None,
        check: bool = True,
    ):
        self.poset = poset
        self.parts = {e: parts[e] for e in poset.elements}
        algs = [p.algebra for p in self.parts.values()]
        for a in algs[1:]:
            _require_same(algs[0], a, "filtered module")
        self.algebra = algs[0]
        self.connectors = {}
        for (i, j), f in (connectors or {}).items():
            if not poset.less(i, j):
                raise StructureError(f"connector ({i!r}, {j!r}) is not on a strict pair")
            self.connectors[(i, j)] = f
        if check:
            bad = self.violations()
            if bad:
                raise StructureError(str(bad[0]))

    def total(self, check: bool = False) -> AInfModule:
        gens = {(e, x): i for e in self.poset.elements for x, i in self.parts[e].generators.items()}
        actions: dict = {}
        for e, part in self.parts.items():
            for (x, seq), ys in part.actions.items():
                actions[((e, x), seq)] = {(e, y) for y in ys}
        for (i, j), f in self.connectors.items():
            for (x, seq), ys in f.table.items():
                key = ((i, x), seq)
                acc = set(actions.get(key, set()))
                for y in ys:
                    _toggle(acc, (j, y))
                actions[key] = acc
        bounded = all(p.bounded for p in self.parts.values())
        bound = max([p.arity_bound for p in self.parts.values()] + [len(s) for _, s in actions] + [1])
        if not bounded:
            bound = min(p.arity_bound for p in self.parts.values() if not p.bounded)
        return AInfModule(self.algebra, gens, actions, bounded=bounded, arity_bound=bound, check=check)

    def violations(self) -> list[FilteredViolation]:
        return _split_residuals(check_module(self.total()), lambda t: t[0])


def _as_filtered_module(m) -> FilteredAInfModule:
    if isinstance(m, FilteredAInfModule):
        return m
    return FilteredAInfModule(FinitePoset(["pt"], []), {"pt": m}, check=False)


def _as_filtered_typeD(p) -> FilteredTypeD:
    if isinstance(p, FilteredTypeD):
        return p
    return FilteredTypeD(FinitePoset(["pt"], []), {"pt": p}, check=False)


def _module_op(fm: FilteredAInfModule, i, i2, x, seq: tuple) -> frozenset:
    """F^{i <= i2}(x, seq): internal action when i == i2."""
    if i == i2:
        return fm.parts[i].m(x, seq)
    f = fm.connectors.get((i, i2))
    return f.f(x, seq) if f is not None else frozenset()


def filtered_box_tensor(m, p) -> FilteredComplex:
    """I x J filtered complex from an I-filtered module and a J-filtered type D structure.

    The connector from (i, j) to (i2, j2) sums, over every sequence
    j = j_0 <= j_1 <= ... <= j_k = j2 and every choice of one map per step
    (delta of the part when j_s = j_{s+1}, the connector h^{j_s < j_{s+1}}
    otherwise), the term F^{i <= i2}_{1+k}(x, a_1, ..., a_k) (x) y_k.
    """
    fm = _as_filtered_module(m)
    fp = _as_filtered_typeD(p)
    _require_same(fm.algebra, fp.algebra, "filtered box tensor")
    tm = fm.total()
    tp = fp.total()
    if tm.bounded:
        kmax = tm.arity_bound
    else:
        kmax = _path_limit(tm, tp)
    poset = FinitePoset.product(fm.poset, fp.poset)

    # step maps of the filtered type D structure, grouped by source level
    steps: dict = {}
    for j in fp.poset.elements:
        for y in fp.parts[j].generators:
            out = [(a, j, z) for a, z in fp.parts[j].delta[y]]
            for (j1, j2), h in fp.connectors.items():
                if j1 == j:
                    out.extend((a, j2, z) for a, z in h(y))
            steps[(j, y)] = out

    parts = {}
    for i in fm.poset.elements:
        for j in fp.poset.elements:
            M, P = fm.parts[i], fp.parts[j]
            gens = [(x, y) for x in M.generators for y in P.generators if M.idem(x) == P.idem(y)]
            parts[(i, j)] = gens

    blocks: dict = {}
    for (i, j), gens in parts.items():
        for x, y in gens:
            # paths in the filtered type D structure starting at (j, y)
            frontier = {((), j, y): 1}
            for k in range(kmax + 1):
                for (w, j2, y2) in frontier:
                    for i2 in fm.poset.elements:
                        if not fm.poset.leq(i, i2):
                            continue
                        for x2 in _module_op(fm, i, i2, x, w):
                            key = ((i, j), (i2, j2))
                            acc = blocks.setdefault(key, {}).setdefault((x, y), set())
                            _toggle(acc, (x2, y2))
                if k == kmax:
                    break
                nxt: dict = {}
                for (w, j2, y2) in frontier:
                    for a, j3, z in steps[(j2, y2)]:
                        _toggle(nxt, (w + (a,), j3, z))
                frontier = nxt
                if not frontier:
                    break

    complexes = {}
    for key, gens in parts.items():
        bnd = {g: set() for g in gens}
        for g, tgts in blocks.get((key, key), {}).items():
            bnd[g] = tgts
        complexes[key] = F2Complex.from_boundaries(bnd, gens)
    connectors = {}
    for (src, tgt), cols in blocks.items():
        if src == tgt:
            continue
        sidx = {g: n for n, g in enumerate(parts[src])}
        tidx = {g: n for n, g in enumerate(parts[tgt])}
        ents = [(tidx[t], sidx[g]) for g, ts in cols.items() for t in ts]
        connectors[(src, tgt)] = F2Matrix(len(parts[tgt]), len(parts[src]), ents)
    return FilteredComplex(poset, complexes, connectors)


# ---------------------------------------------------------------------------
# DA bimodules
# ---------------------------------------------------------------------------


class DAStructure:
    """Type DA bimodule: delta^1_{1+k}(x, b1..bk) in A (x) X, inputs from B.

    ``bounded`` certifies that operations missing from the table vanish.
    Unitality is implicit: delta^1_2(x, iota) = iota_x (x) x.
    """

    def __init__(
        self,
        left: DgAlgebraPresentation,
        right: DgAlgebraPresentation,
        generators: Mapping[Hashable, tuple[str, str]] | Sequence[tuple[Hashable, tuple[str, str]]],
        delta: Mapping[tuple[Hashable, tuple], Iterable[tuple[str, Hashable]]] | None = None,
        bounded: bool = True,
        arity_bound: int | None = None,
        check: bool = True,
        name: str = "",
    ):
        self.left = left
        self.right = right
        self.name = name
        self.generators = _gens_dict(generators)
        self.bounded = bounded
        self.delta: dict = {}
        for (x, seq), terms in (delta or {}).items():
            seq = tuple(seq)
            if x not in self.generators:
                raise StructureError(f"delta on unknown generator {x!r}")
            if any(right.is_idempotent(b) for b in seq):
                raise StructureError("idempotent inputs are implicit")
            acc: set = set()
            for a, y in terms:
                _toggle(acc, (a, y))
            if acc:
                self.delta[(x, seq)] = frozenset(acc)
        top = max((len(s) for _, s in self.delta), default=0)
        self.arity_bound = max(top, 1) if arity_bound is None else max(top, arity_bound)
        bad = self.discipline_errors()
        if bad:
            raise StructureError(bad[0])
        if check:
            res = check_DA(self)
            if res:
                raise StructureError(str(res[0]))

    def discipline_errors(self) -> list[str]:
        out = []
        A, B = self.left, self.right
        for (x, seq), terms in self.delta.items():
            il, ir = self.generators[x]
            cur = ir
            ok = True
            for b in seq:
                if B.left(b) != cur:
                    ok = False
                    break
                cur = B.right(b)
            if not ok:
                out.append(f"idempotent mismatch in inputs of delta({x!r}, {seq})")
                continue
            for a, y in terms:
                jl, jr = self.generators[y]
                if A.left(a) != il or A.right(a) != jl or jr != cur:
                    out.append(f"idempotent mismatch in delta({x!r}, {seq}) term {a}*{y!r}")
        return out

    def d(self, x: Hashable, seq: tuple) -> frozenset:
        B = self.right
        k = len(seq)
        if k and any(B.is_idempotent(b) for b in seq):
            if k == 1 and seq[0] == self.generators[x][1]:
                return frozenset({(self.generators[x][0], x)})
            return frozenset()
        cur = self.generators[x][1]
        for b in seq:
            if B.left(b) != cur:
                return frozenset()
            cur = B.right(b)
        if k > self.arity_bound and not self.bounded:
            raise BoundednessError("DA operation beyond the tabulated range")
        return self.delta.get((x, seq), frozenset())


def check_DA(p: DAStructure, max_inputs: int | None = None) -> list[Residual]:
    """DA structure relation for dg algebras on all composable inputs."""
    bad = p.discipline_errors()
    if bad:
        raise StructureError(bad[0])
    A, B = p.left, p.right
    if max_inputs is None:
        max_inputs = 2 * p.arity_bound if p.bounded else p.arity_bound
    out = []
    for x in p.generators:
        for n in range(max_inputs + 1):
            for seq in _compatible_sequences(B, p.generators[x][1], n):
                acc: set = set()
                for i in range(n + 1):
                    for a, y in p.d(x, seq[:i]):
                        for a2, z in p.d(y, seq[i:]):
                            for c in A.mu2_basis(a, a2):
                                _toggle(acc, (c, z))
                for a, y in p.d(x, seq):
                    for c in A.mu1_basis(a):
                        _toggle(acc, (c, y))
                for k in range(n):
                    for c in B.mu1_basis(seq[k]):
                        for t in p.d(x, seq[:k] + (c,) + seq[k + 1:]):
                            _toggle(acc, t)
                for k in range(n - 1):
                    for c in B.mu2_basis(seq[k], seq[k + 1]):
                        for t in p.d(x, seq[:k] + (c,) + seq[k + 2:]):
                            _toggle(acc, t)
                if acc:
                    out.append(Residual(x, frozenset(acc), seq))
    return out


def box_tensor_DA(p: DAStructure, q: TypeDStructure) -> TypeDStructure:
    """DA box D: a type D structure over the left algebra on pairs (x, y)."""
    _require_same(p.right, q.algebra, "DA box tensor")
    if p.bounded:
        kmax = p.arity_bound
    else:
        deg = q.boundedness_degree()
        if deg is None:
            raise BoundednessError("neither side is bounded")
        kmax = deg - 1
    its = q.iterates(kmax)
    gens = {(x, y): p.generators[x][0] for x in p.generators for y in q.generators if p.generators[x][1] == q.idem(y)}
    delta = {}
    for x, y in gens:
        acc: set = set()
        for it in its:
            for w, y2 in it[y]:
                for a, x2 in p.d(x, w):
                    _toggle(acc, (a, (x2, y2)))
        delta[(x, y)] = acc
    return TypeDStructure(p.left, gens, delta)


class DAMorphism:
    """Morphism of DA bimodules: F(x, b1..bk) in A (x) Y."""

    def __init__(self, source: DAStructure, target: DAStructure, table: Mapping[tuple[Hashable, tuple], Iterable[tuple[str, Hashable]]] | None = None):
        self.source = source
        self.target = target
        self.table = {}
        for (x, seq), terms in (table or {}).items():
            acc: set = set()
            for t in terms:
                _toggle(acc, tuple(t))
            if acc:
                self.table[(x, tuple(seq))] = frozenset(acc)

    def f(self, x, seq: tuple) -> frozenset:
        B = self.source.right
        if seq and any(B.is_idempotent(b) for b in seq):
            return frozenset()
        return self.table.get((x, seq), frozenset())


class FilteredDAStructure:
    """Poset-filtered DA bimodule, validated through its total bimodule."""

    def __init__(
        self,
        poset: FinitePoset,
        parts: Mapping[Hashable, DAStructure],
        connectors: Mapping[tuple[Hashable, Hashable], DAMorphism] | None = None,
        check: bool = True,
    ):
        self.poset = poset
        self.parts = {e: parts[e] for e in poset.elements}
        first = next(iter(self.parts.values()))
        self.left, self.right = first.left, first.right
        self.connectors = {}
        for (i, j), f in (connectors or {}).items():
            if not poset.less(i, j):
                raise StructureError(f"connector ({i!r}, {j!r}) is not on a strict pair")
            self.connectors[(i, j)] = f
        if check:
            bad = self.violations()
            if bad:
                raise StructureError(str(bad[0]))

    def total(self, check: bool = False) -> DAStructure:
        gens = {(e, x): v for e in self.poset.elements for x, v in self.parts[e].generators.items()}
        delta: dict = {}
        for e, part in self.parts.items():
            for (x, seq), terms in part.delta.items():
                delta[((e, x), seq)] = [(a, (e, y)) for a, y in terms]
        for (i, j), f in self.connectors.items():
            for (x, seq), terms in f.table.items():
                delta[((i, x), seq)] = delta.get(((i, x), seq), []) + [(a, (j, y)) for a, y in terms]
        bounded = all(p.bounded for p in self.parts.values())
        bound = max([p.arity_bound for p in self.parts.values()] + [len(s) for _, s in delta] + [1])
        return DAStructure(self.left, self.right, gens, delta, bounded=bounded, arity_bound=bound, check=check)

    def violations(self) -> list[FilteredViolation]:
        return _split_residuals(check_DA(self.total()), lambda t: t[1][0])


def check_filtered(obj) -> list:
    """Violations of a filtered type D, module, DA structure or filtered complex."""
    if isinstance(obj, FilteredComplex):
        return validate_filtered(obj)
    return obj.violations()


# ---------------------------------------------------------------------------
# DD bimodules and the identity bimodule
# ---------------------------------------------------------------------------


class DDStructure:
    """Type DD bimodule, left type D over A and right type D over A2.

    A term (a, y, b) of delta(x) requires left(a) = I_x, right(a) = I_y,
    left(b) = I2_y and right(b) = I2_x. Following two steps, the right
    outputs multiply with the later one on the left.
    """

    def __init__(
        self,
        left: DgAlgebraPresentation,
        right: DgAlgebraPresentation,
        generators: Mapping[Hashable, tuple[str, str]] | Sequence[tuple[Hashable, tuple[str, str]]],
        delta: Mapping[Hashable, Iterable[tuple[str, Hashable, str]]] | None = None,
        check: bool = True,
        name: str = "",
    ):
        self.left = left
        self.right = right
        self.name = name
        self.generators = _gens_dict(generators)
        self.delta: dict = {}
        for x, terms in (delta or {}).items():
            acc: set = set()
            for t in terms:
                _toggle(acc, tuple(t))
            self.delta[x] = frozenset(acc)
        for x in self.generators:
            self.delta.setdefault(x, frozenset())
        bad = self.discipline_errors()
        if bad:
            raise StructureError(bad[0])
        if check:
            res = check_DD(self)
            if res:
                raise StructureError(str(res[0]))

    def discipline_errors(self) -> list[str]:
        out = []
        A, A2 = self.left, self.right
        for x, terms in self.delta.items():
            ix, jx = self.generators[x]
            for a, y, b in terms:
                iy, jy = self.generators[y]
                if A.left(a) != ix or A.right(a) != iy or A2.left(b) != jy or A2.right(b) != jx:
                    out.append(f"idempotent mismatch in delta({x!r}): term {a}*{y!r}*{b}")
        return out

    def without_term(self, x: Hashable, term: tuple) -> "DDStructure":
        """Copy with one differential term removed (for mutation tests)."""
        delta = {g: set(t) for g, t in self.delta.items()}
        if term not in delta[x]:
            raise KeyError(term)
        delta[x].discard(term)
        return DDStructure(self.left, self.right, self.generators, delta, check=False, name=self.name + "-mutated")

    def terms(self) -> list[tuple]:
        return sorted(((x,) + t for x, ts in self.delta.items() for t in ts), key=repr)


@dataclass(frozen=True)
class DDResidual:
    generator: Hashable
    term: tuple  # (a, z, b) with nonzero coefficient in d^2(x)
    contributors: tuple  # pairs of (first step, second step) terms producing it

    def __str__(self) -> str:
        pairs = ", ".join(f"({p[0][0]}|{p[0][2]}, {p[1][0]}|{p[1][2]})" for p in self.contributors if len(p) == 2)
        return f"d^2({self.generator!r}) contains {'*'.join(map(str, self.term))}" + (f" from chord pairs {pairs}" if pairs else "")


def check_DD(dd: DDStructure) -> list[DDResidual]:
    """Residual of d^2 = 0 for a DD bimodule, naming the contributing chord pairs."""
    bad = dd.discipline_errors()
    if bad:
        raise StructureError(bad[0])
    A, A2 = dd.left, dd.right
    out = []
    for x in dd.generators:
        acc: dict = {}
        for t1 in sorted(dd.delta[x], key=repr):
            a, y, b = t1
            for c in A.mu1_basis(a):
                acc.setdefault((c, y, b), []).append((t1,))
            for c in A2.mu1_basis(b):
                acc.setdefault((a, y, c), []).append((t1,))
            for t2 in sorted(dd.delta[y], key=repr):
                a2, z, b2 = t2
                for c in A.mu2_basis(a, a2):
                    for e in A2.mu2_basis(b2, b):
                        acc.setdefault((c, z, e), []).append((t1, t2))
        for term, contribs in sorted(acc.items(), key=lambda kv: repr(kv[0])):
            if len(contribs) % 2:
                out.append(DDResidual(x, term, tuple(contribs)))
    return out


def default_pairing(A: DgAlgebraPresentation, A2: DgAlgebraPresentation) -> dict[str, str]:
    """Complementary idempotents: the i-th idempotent of A pairs with the reversed i-th of A2."""
    ids, ids2 = list(A.idempotents), list(A2.idempotents)
    if len(ids) != len(ids2):
        raise ValueError("algebras have different numbers of idempotents")
    return dict(zip(ids, reversed(ids2)))


def dd_identity(
    A: DgAlgebraPresentation,
    suffix: str = "'",
    pairing: Mapping[str, str] | None = None,
    check: bool = True,
) -> DDStructure:
    """The identity DD bimodule over A and its primed copy.

    Generators are complementary idempotent pairs I (x) I'. The differential
    is the sum over designated chords xi of xi (x) y (x) xi', keeping a term
    only when both sides satisfy the idempotent conditions.
    """
    if A.designated_chords is None:
        raise ValueError("algebra has no designated chords")
    A2 = A.rename(suffix)
    pairing = dict(pairing) if pairing is not None else default_pairing(A, A2)
    gen_name = lambda i: f"{i}|{pairing[i]}"  # noqa: E731
    gens = {gen_name(i): (i, pairing[i]) for i in A.idempotents}
    by_left = {i: gen_name(i) for i in A.idempotents}
    delta: dict = {g: [] for g in gens}
    for i in A.idempotents:
        x = gen_name(i)
        jx = pairing[i]
        for xi in A.designated_chords:
            if A.left(xi) != i:
                continue
            y = by_left[A.right(xi)]
            jy = gens[y][1]
            xi2 = xi + suffix
            if A2.left(xi2) == jy and A2.right(xi2) == jx:
                delta[x].append((xi, y, xi2))
    return DDStructure(A, A2, gens, delta, check=check, name=f"DD(Id_{A.name})")


def box_tensor_DD(m: AInfModule, dd: DDStructure) -> TypeDStructure:
    """M box DD as a right type D structure over the second algebra.

    The result is returned as a left type D structure over the opposite of
    the second algebra, which is the same data.
    """
    _require_same(m.algebra, dd.left, "module box DD")
    if not m.bounded:
        raise BoundednessError("module box DD requires a bounded module")
    A2op = dd.right.opposite()
    kmax = m.arity_bound
    gens = {(x, y): dd.generators[y][1] for x in m.generators for y in dd.generators if m.idem(x) == dd.generators[y][0]}
    delta = {}
    for x, y in gens:
        acc: set = set()
        # paths: (left word, right product as element, endpoint)
        frontier: dict = {((), None, y): 1}
        for k in range(kmax + 1):
            for (w, rprod, y2) in frontier:
                if k == 0:
                    continue
                for x2 in m.m(x, w):
                    for c in rprod:
                        _toggle(acc, (c, (x2, y2)))
            if k == kmax:
                break
            nxt: dict = {}
            for (w, rprod, y2) in frontier:
                for a, z, b in dd.delta[y2]:
                    if rprod is None:
                        prods = [frozenset((b,))]
                    else:
                        prods = [dd.right.mu2((b,), rprod)]
                    for pr in prods:
                        if pr:
                            _toggle(nxt, (w + (a,), pr, z))
            frontier = nxt
            if not frontier:
                break
        for x2 in m.m(x, ()):
            _toggle(acc, (dd.generators[y][1], (x2, y)))
        delta[(x, y)] = acc
    return TypeDStructure(A2op, gens, delta, check=False)


def identity_reproduction(
    dd: DDStructure,
    expected: Mapping[str, Mapping[tuple, Iterable[tuple[str, tuple]]]],
) -> list[str]:
    """Compare iota*A box DD against stored expectations, one per idempotent.

    ``expected[iota][(t, g)]`` lists the terms (b, (t2, g2)) of the resulting
    type D structure. Returns human-readable witnesses for every missing or
    extra term; an empty list means every expectation is met.
    """
    out = []
    for idem, table in expected.items():
        got = box_tensor_DD(regular_module(dd.left, idem), dd)
        for g in sorted(set(got.generators) | set(table), key=repr):
            want = {(b, tuple(t)) for b, t in table.get(g, [])}
            have = set(got.delta.get(g, frozenset()))
            for b, t in sorted(want - have, key=repr):
                out.append(f"{idem}A box DD: missing term {b}*{t!r} in delta({g!r})")
            for b, t in sorted(have - want, key=repr):
                out.append(f"{idem}A box DD: unexpected term {b}*{t!r} in delta({g!r})")
    return out


def torus_identity_expectations(suffix: str = "'") -> dict:
    """Hand-derived iota*A box DD(Id) for the torus algebra.

    With x = iota0|iota1' and y = iota1|iota0', the identity bimodule has
    delta(x) = (rho1 rho1' + rho3 rho3' + rho123 rho123') y and
    delta(y) = rho2 rho2' x, and pairing with iota*A multiplies on the right.
    """
    p = lambda s: s + suffix  # noqa: E731
    x, y = f"iota0|{p('iota1')}", f"iota1|{p('iota0')}"
    return {
        "iota0": {
            ("iota0", x): [(p("rho1"), ("rho1", y)), (p("rho3"), ("rho3", y)), (p("rho123"), ("rho123", y))],
            ("rho12", x): [(p("rho3"), ("rho123", y))],
            ("rho1", y): [(p("rho2"), ("rho12", x))],
            ("rho3", y): [],
            ("rho123", y): [],
        },
        "iota1": {
            ("iota1", y): [(p("rho2"), ("rho2", x))],
            ("rho2", x): [(p("rho3"), ("rho23", y))],
            ("rho23", y): [],
        },
    }


def check_dd_identity(dd: DDStructure, expected: Mapping | None = None) -> list[str]:
    """d^2 residuals plus identity-reproduction witnesses (when expectations are given)."""
    out = [str(r) for r in check_DD(dd)]
    if expected is not None:
        out.extend(identity_reproduction(dd, expected))
    return out


# ---------------------------------------------------------------------------
# chain complexes of attaching circles as finite data
# ---------------------------------------------------------------------------


@dataclass
class PolygonData:
    """Generators CF(b^i, b^j) for i < j and tabulated polygon counts m_n.

    ``families`` is a finite poset; ``generators[(i, j)]`` lists the
    intersection generators for each strict pair; ``products`` maps an input
    tuple (x_n, ..., x_1), read right to left along the chain, to the set of
    output generators. Missing entries vanish. Generator names are global.
    """

    families: FinitePoset
    generators: dict
    products: dict = field(default_factory=dict)

    def __post_init__(self):
        self.generators = {tuple(k): list(v) for k, v in self.generators.items()}
        self.products = {tuple(k): frozenset(v) for k, v in self.products.items() if frozenset(v)}
        self.home: dict = {}
        for (i, j), gens in self.generators.items():
            if not self.families.less(i, j):
                raise StructureError(f"generator set on a non-strict pair ({i!r}, {j!r})")
            for g in gens:
                if g in self.home:
                    raise StructureError(f"generator {g!r} listed twice")
                self.home[g] = (i, j)
        for ins, outs in self.products.items():
            pairs = [self.home[g] for g in reversed(ins)]
            for (a, b), (c, d) in zip(pairs, pairs[1:]):
                if b != c:
                    raise StructureError(f"product inputs {ins} are not composable")
            want = (pairs[0][0], pairs[-1][1])
            for o in outs:
                if self.home[o] != want:
                    raise StructureError(f"product {ins} outputs {o!r} outside CF{want}")

    def m(self, inputs: tuple) -> frozenset:
        return self.products.get(tuple(inputs), frozenset())

    def m_elems(self, elems: Sequence[Iterable]) -> frozenset:
        acc: set = set()
        for combo in itertools.product(*[sorted(e, key=repr) for e in elems]):
            for o in self.m(combo):
                _toggle(acc, o)
        return frozenset(acc)

    def ainf_violations(self) -> list[Residual]:
        """A-infinity relations on all composable generator sequences."""
        P = self.families
        out = []
        chains = []
        for i in P.elements:
            for j in P.elements:
                if P.less(i, j):
                    chains.extend(P.chains(i, j))
        for ch in chains:
            gen_lists = [self.generators.get((ch[k], ch[k + 1]), []) for k in range(len(ch) - 1)]
            for seq in itertools.product(*gen_lists):
                inputs = tuple(reversed(seq))  # (x_n, ..., x_1)
                n = len(inputs)
                acc: set = set()
                for s in range(n):
                    for e in range(s + 1, n + 1):
                        inner = self.m(inputs[s:e])
                        for o in inner:
                            for r in self.m(inputs[:s] + (o,) + inputs[e:]):
                                _toggle(acc, r)
                if acc:
                    out.append(Residual(inputs, frozenset(acc), note="A-infinity relation"))
        return out


def twisted_complex_validate(
    data: PolygonData,
    chains: Mapping[tuple, Iterable],
    alpha: Hashable | None = "alpha",
) -> dict:
    """Validate a chain complex of attaching circles given by finite tables.

    ``data.families`` orders the beta families and, optionally, an element
    ``alpha`` below all of them. The check runs the A-infinity relations of
    the tables, then the compatibility sum over chains i = i_0 < ... < i_n = j
    of m_n(eta, ..., eta) = 0 for every pair of beta families (the n = 1 term
    is m_1(eta^{i<j})). When alpha is present, the filtered complex with
    parts CF(alpha, beta^i) and connectors x -> sum m(eta, ..., eta, x) is
    built and validated too.

    Returns a dict with "ainf", "compatibility", "filtered" and "complex".
    """
    report: dict = {"ainf": data.ainf_violations(), "compatibility": [], "filtered": [], "complex": None}
    if report["ainf"]:
        raise StructureError(f"input tables fail the A-infinity relation: {report['ainf'][0]}")
    P = data.families
    has_alpha = alpha is not None and alpha in P
    if has_alpha:
        for e in P.elements:
            if e != alpha and not P.less(alpha, e):
                raise StructureError(f"alpha must lie below every family, not below {e!r}")
    fams = [e for e in P.elements if not (has_alpha and e == alpha)]
    B = FinitePoset(fams, [(i, j) for i, j in P.pairs() if i in fams and j in fams])
    eta = {tuple(k): frozenset(v) for k, v in chains.items()}
    for (i, j), v in eta.items():
        if not B.less(i, j):
            raise ValueError(f"chain given on a non-strict pair ({i!r}, {j!r})")
        for g in v:
            if data.home.get(g) != (i, j):
                raise ValueError(f"chain eta^{(i, j)} uses generator {g!r} from elsewhere")

    def chain_terms(i, j):
        for ch in B.chains(i, j):
            yield list(reversed([eta.get((ch[k], ch[k + 1]), frozenset()) for k in range(len(ch) - 1)]))

    for i, j in B.pairs():
        acc: set = set()
        for elems in chain_terms(i, j):
            for o in data.m_elems(elems):
                _toggle(acc, o)
        if acc:
            report["compatibility"].append(Residual((i, j), frozenset(acc), note="compatibility"))
    if has_alpha:
        parts = {}
        gens_of = {i: data.generators.get((alpha, i), []) for i in fams}
        for i in fams:
            bnd = {g: data.m((g,)) for g in gens_of[i]}
            parts[i] = F2Complex.from_boundaries(bnd, gens_of[i], check=False)
        conns = {}
        for i, j in B.pairs():
            tidx = {g: n for n, g in enumerate(gens_of[j])}
            ents: set = set()
            for n, x in enumerate(gens_of[i]):
                acc2: set = set()
                for elems in chain_terms(i, j):
                    for o in data.m_elems(elems + [{x}]):
                        _toggle(acc2, o)
                ents |= {(tidx[o], n) for o in acc2}
            conns[(i, j)] = F2Matrix(len(gens_of[j]), len(gens_of[i]), ents)
        try:
            fc = FilteredComplex(B, parts, conns)
            report["filtered"] = validate_filtered(fc)
            report["complex"] = fc
        except StructureError as e:
            report["filtered"] = [str(e)]
    return report


def connected_sum_chains(
    left: Mapping[tuple, Iterable],
    right: Mapping[tuple, Iterable],
    left_poset: FinitePoset,
    right_poset: FinitePoset,
    theta_left: Mapping[Hashable, Hashable],
    theta_right: Mapping[Hashable, Hashable],
    nearest_point: Mapping[tuple, Hashable] | None = None,
) -> dict:
    """Chains on the product poset from chains on each factor.

    omega^{(i, j0) < (i, j1)} = Theta_i (x) zeta^{j0 < j1},
    omega^{(i0, j) < (i1, j)} = eta^{i0 < i1} (x) Theta_j, and zero when both
    coordinates change. Products of generators are pairs (x, y) unless a
    ``nearest_point`` bijection renames them.
    """
    if nearest_point is not None:
        values = list(nearest_point.values())
        if len(set(values)) != len(values):
            raise ValueError("nearest-point correspondence is not injective")
    rename = (lambda p: nearest_point[p]) if nearest_point is not None else (lambda p: p)
    prod = FinitePoset.product(left_poset, right_poset)
    out = {}
    for (a, b) in prod.pairs():
        (i0, j0), (i1, j1) = a, b
        terms: set = set()
        if i0 == i1:
            for z in right.get((j0, j1), ()):
                p = (theta_left[i0], z)
                if nearest_point is not None and p not in nearest_point:
                    raise ValueError(f"nearest-point correspondence misses {p!r}")
                _toggle(terms, rename(p))
        elif j0 == j1:
            for e in left.get((i0, i1), ()):
                p = (e, theta_right[j0])
                if nearest_point is not None and p not in nearest_point:
                    raise ValueError(f"nearest-point correspondence misses {p!r}")
                _toggle(terms, rename(p))
        out[(a, b)] = frozenset(terms)
    return out
