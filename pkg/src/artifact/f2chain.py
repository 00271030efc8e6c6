"""Sparse linear algebra over F2, chain complexes, homology and cancellation."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping, Sequence

import numpy as np

from . import _kernels
from .errors import ShapeError, StructureError


def name_key(name: Hashable) -> str:
    """Canonical sort key for generator names."""
    return name if isinstance(name, str) else repr(name)


class F2Matrix:
    """Sparse F2 matrix stored column-wise: column index -> frozenset of row indices."""

    __slots__ = ("rows", "cols", "_cols")

    def __init__(self, rows: int, cols: int, entries: Iterable[tuple[int, int]] = ()):
        self.rows = int(rows)
        self.cols = int(cols)
        colmap: dict[int, set[int]] = {}
        for r, c in entries:
            if not (0 <= r < self.rows and 0 <= c < self.cols):
                raise ShapeError(f"entry ({r}, {c}) out of bounds for {self.rows}x{self.cols}")
            s = colmap.setdefault(c, set())
            if r in s:
                raise ShapeError(f"duplicate entry ({r}, {c})")
            s.add(r)
        self._cols = {c: frozenset(s) for c, s in colmap.items() if s}

    @classmethod
    def from_columns(cls, rows: int, cols: int, columns: Mapping[int, Iterable[int]]) -> "F2Matrix":
        m = cls(rows, cols)
        out = {}
        for c, rs in columns.items():
            rs = frozenset(rs)
            if not (0 <= c < cols) or any(not (0 <= r < rows) for r in rs):
                raise ShapeError("column data out of bounds")
            if rs:
                out[c] = rs
        m._cols = out
        return m

    @classmethod
    def from_dense(cls, dense) -> "F2Matrix":
        dense = np.asarray(dense) % 2
        r, c = dense.shape
        return cls(r, c, zip(*np.nonzero(dense)))

    @classmethod
    def identity(cls, n: int) -> "F2Matrix":
        return cls.from_columns(n, n, {i: (i,) for i in range(n)})

    @classmethod
    def zero(cls, rows: int, cols: int) -> "F2Matrix":
        return cls(rows, cols)

    @property
    def entries(self) -> frozenset[tuple[int, int]]:
        return frozenset((r, c) for c, rs in self._cols.items() for r in rs)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def column(self, c: int) -> frozenset[int]:
        return self._cols.get(c, frozenset())

    def nnz(self) -> int:
        return sum(len(rs) for rs in self._cols.values())

    def is_zero(self) -> bool:
        return not self._cols

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.rows, self.cols), dtype=np.uint8)
        for c, rs in self._cols.items():
            for r in rs:
                out[r, c] = 1
        return out

    def transpose(self) -> "F2Matrix":
        return F2Matrix(self.cols, self.rows, ((c, r) for r, c in self.entries))

    def __add__(self, other: "F2Matrix") -> "F2Matrix":
        if self.shape != other.shape:
            raise ShapeError(f"cannot add {self.shape} and {other.shape}")
        cols = dict(self._cols)
        for c, rs in other._cols.items():
            cols[c] = cols.get(c, frozenset()) ^ rs
        return F2Matrix.from_columns(self.rows, self.cols, cols)

    def __matmul__(self, other: "F2Matrix") -> "F2Matrix":
        return mat_mul(self, other)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, F2Matrix):
            return NotImplemented
        return self.shape == other.shape and self._cols == other._cols

    def __hash__(self) -> int:
        return hash((self.rows, self.cols, frozenset(self._cols.items())))

    def __repr__(self) -> str:
        return f"F2Matrix({self.rows}x{self.cols}, nnz={self.nnz()})"

    def apply(self, support: Iterable[int]) -> frozenset[int]:
        """Image of the vector with the given support."""
        out: set[int] = set()
        for c in support:
            out ^= self._cols.get(c, frozenset())
        return frozenset(out)

    def rank(self) -> int:
        if not self._cols:
            return 0
        return _kernels.gf2_rank_sparse(self.rows, self.cols, self.entries)


def mat_mul(a: F2Matrix, b: F2Matrix) -> F2Matrix:
    """Exact product a*b over F2."""
    if a.cols != b.rows:
        raise ShapeError(f"cannot multiply {a.shape} by {b.shape}")
    cols = {}
    for c, rs in b._cols.items():
        acc: set[int] = set()
        for r in rs:
            acc ^= a._cols.get(r, frozenset())
        if acc:
            cols[c] = acc
    return F2Matrix.from_columns(a.rows, b.cols, cols)


class F2Complex:
    """Chain complex over F2 on named generators.

    The differential is an F2Matrix on the generator basis (column j is the
    boundary of generator j). Gradings are optional; if given, the
    differential must lower grading by exactly one.
    """

    __slots__ = ("generators", "gradings", "differential", "_index")

    def __init__(
        self,
        generators: Sequence[Hashable],
        differential: F2Matrix | None = None,
        gradings: Mapping[Hashable, int] | Sequence[int] | None = None,
        check: bool = True,
    ):
        self.generators = tuple(generators)
        self._index = {g: i for i, g in enumerate(self.generators)}
        if len(self._index) != len(self.generators):
            raise StructureError("duplicate generator names")
        n = len(self.generators)
        if differential is None:
            differential = F2Matrix.zero(n, n)
        if differential.shape != (n, n):
            raise StructureError(f"differential shape {differential.shape} does not match {n} generators")
        self.differential = differential
        if gradings is None:
            self.gradings = None
        elif isinstance(gradings, Mapping):
            self.gradings = tuple(int(gradings[g]) for g in self.generators)
        else:
            self.gradings = tuple(int(x) for x in gradings)
            if len(self.gradings) != n:
                raise StructureError("gradings length mismatch")
        if check:
            problems = self.violations()
            if problems:
                raise StructureError("; ".join(problems))

    @classmethod
    def from_boundaries(
        cls,
        boundaries: Mapping[Hashable, Iterable[Hashable]],
        generators: Sequence[Hashable] | None = None,
        gradings: Mapping[Hashable, int] | None = None,
        check: bool = True,
    ) -> "F2Complex":
        """Build from a map generator -> boundary support (names)."""
        if generators is None:
            names: list = list(boundaries)
            for tgts in boundaries.values():
                for t in tgts:
                    if t not in names:
                        names.append(t)
            generators = sorted(set(names), key=name_key)
        idx = {g: i for i, g in enumerate(generators)}
        cols = {}
        for g, tgts in boundaries.items():
            acc: set[int] = set()
            for t in tgts:
                acc ^= {idx[t]}
            cols[idx[g]] = acc
        n = len(generators)
        return cls(generators, F2Matrix.from_columns(n, n, cols), gradings, check=check)

    def __len__(self) -> int:
        return len(self.generators)

    def index(self, name: Hashable) -> int:
        return self._index[name]

    def boundary(self, name: Hashable) -> frozenset:
        return frozenset(self.generators[r] for r in self.differential.column(self._index[name]))

    def boundaries(self) -> dict:
        return {g: self.boundary(g) for g in self.generators}

    def grading(self, name: Hashable) -> int | None:
        return None if self.gradings is None else self.gradings[self._index[name]]

    def violations(self) -> list[str]:
        out = []
        sq = mat_mul(self.differential, self.differential)
        if not sq.is_zero():
            r, c = min(sq.entries)
            out.append(f"d^2 != 0: coefficient of {self.generators[r]!r} in d^2({self.generators[c]!r})")
        if self.gradings is not None:
            for c in range(len(self)):
                for r in self.differential.column(c):
                    if self.gradings[r] != self.gradings[c] - 1:
                        out.append(
                            f"d({self.generators[c]!r}) hits {self.generators[r]!r} in grading "
                            f"{self.gradings[r]} (expected {self.gradings[c] - 1})"
                        )
        return out

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, F2Complex):
            return NotImplemented
        return (
            set(self.generators) == set(other.generators)
            and self.boundaries() == other.boundaries()
            and (self.gradings is None) == (other.gradings is None)
            and (self.gradings is None or all(self.grading(g) == other.grading(g) for g in self.generators))
        )

    def __repr__(self) -> str:
        return f"F2Complex({len(self)} generators, nnz={self.differential.nnz()})"

    def restricted_matrix(self, rows: Sequence[int], cols: Sequence[int]) -> np.ndarray:
        d = self.differential
        rpos = {r: i for i, r in enumerate(rows)}
        out = np.zeros((len(rows), len(cols)), dtype=np.uint8)
        for j, c in enumerate(cols):
            for r in d.column(c):
                i = rpos.get(r)
                if i is not None:
                    out[i, j] = 1
        return out


def direct_sum(*complexes: F2Complex) -> F2Complex:
    gens: list = []
    entries = []
    offset = 0
    grads: list | None = [] if all(c.gradings is not None for c in complexes) else None
    for c in complexes:
        gens.extend(c.generators)
        entries.extend((r + offset, col + offset) for r, col in c.differential.entries)
        if grads is not None:
            grads.extend(c.gradings)
        offset += len(c)
    return F2Complex(gens, F2Matrix(offset, offset, entries), grads)


def homology_rank(c: F2Complex) -> dict[int | None, int]:
    """Rank of homology per grading, or {None: total} for ungraded complexes."""
    problems = c.violations()
    if problems:
        raise StructureError("; ".join(problems))
    n = len(c)
    if c.gradings is None:
        return {None: n - 2 * c.differential.rank()}
    by_grade: dict[int, list[int]] = {}
    for i, k in enumerate(c.gradings):
        by_grade.setdefault(k, []).append(i)
    ranks = {}
    for k, idx in by_grade.items():
        below = by_grade.get(k - 1, [])
        above = by_grade.get(k + 1, [])
        r_out = _kernels.gf2_rank(c.restricted_matrix(below, idx)) if below else 0
        r_in = _kernels.gf2_rank(c.restricted_matrix(idx, above)) if above else 0
        ranks[k] = len(idx) - r_out - r_in
    return dict(sorted(ranks.items()))


def total_homology_rank(c: F2Complex) -> int:
    return sum(homology_rank(c).values())


@dataclass(frozen=True)
class Equivalence:
    """Chain homotopy equivalence data between a complex C and a reduction C'.

    f: C -> C', g: C' -> C, h: C -> C with f g = id and g f = id + d h + h d.
    """

    source: F2Complex
    target: F2Complex
    f: F2Matrix
    g: F2Matrix
    h: F2Matrix

    def check(self) -> list[str]:
        d, dp = self.source.differential, self.target.differential
        out = []
        if mat_mul(self.f, d) != mat_mul(dp, self.f):
            out.append("f is not a chain map")
        if mat_mul(self.g, dp) != mat_mul(d, self.g):
            out.append("g is not a chain map")
        if mat_mul(self.f, self.g) != F2Matrix.identity(len(self.target)):
            out.append("f g != id")
        lhs = mat_mul(self.g, self.f) + F2Matrix.identity(len(self.source))
        if lhs != mat_mul(d, self.h) + mat_mul(self.h, d):
            out.append("g f != id + d h + h d")
        return out


class _Work:
    """Mutable dict-of-sets form of a differential used during cancellation."""

    def __init__(self, boundaries: Mapping[Hashable, Iterable[Hashable]]):
        self.down: dict[Hashable, set] = {g: set(b) for g, b in boundaries.items()}
        self.up: dict[Hashable, set] = {g: set() for g in self.down}
        for g, b in self.down.items():
            for t in b:
                self.up[t].add(g)

    def cancellable(self, x, y) -> bool:
        # only the unit entry y in d(x) is needed; loops at x or y are harmless
        return x != y and y in self.down[x]

    def cancel(self, x, y) -> None:
        """Cancel the entry y in d(x); patch the zig-zags through x and y."""
        dx = self.down[x] - {y}
        sources = self.up[y] - {x}
        for a in sources:
            for b in dx:
                self._toggle(a, b)
        for g in (x, y):
            for t in list(self.down[g]):
                self.up[t].discard(g)
            for s in list(self.up[g]):
                self.down[s].discard(g)
            del self.down[g]
            del self.up[g]

    def _toggle(self, a, b) -> None:
        if b in self.down[a]:
            self.down[a].discard(b)
            self.up[b].discard(a)
        else:
            self.down[a].add(b)
            self.up[b].add(a)


def _columns_to_matrix(cols: Mapping[Hashable, Iterable[Hashable]], src: Sequence, tgt: Sequence) -> F2Matrix:
    si = {g: i for i, g in enumerate(src)}
    ti = {g: i for i, g in enumerate(tgt)}
    return F2Matrix.from_columns(
        len(tgt), len(src), {si[g]: {ti[t] for t in ts} for g, ts in cols.items() if ts}
    )


def _sym(a: set, b: Iterable) -> None:
    for t in b:
        if t in a:
            a.remove(t)
        else:
            a.add(t)


def cancel_reduce(
    c: F2Complex,
    allowed: "callable | None" = None,
    track: bool = True,
) -> tuple[F2Complex, Equivalence | None]:
    """Cancel differential entries until none remain.

    Entries are scanned in canonical (lexicographic) order. ``allowed(x, y)``
    may restrict which entries y in d(x) are cancelled. Returns the reduced
    complex and, if ``track``, the homotopy equivalence data.
    """
    problems = c.violations()
    if problems:
        raise StructureError("; ".join(problems))
    w = _Work(c.boundaries())
    # f, g, h stored as column maps on names
    f: dict | None = {v: {v} for v in c.generators} if track else None
    g: dict | None = {v: {v} for v in c.generators} if track else None
    h: dict | None = {v: set() for v in c.generators} if track else None
    order = sorted(c.generators, key=name_key)
    rank_of = {v: i for i, v in enumerate(order)}
    changed = True
    while changed:
        changed = False
        for x in order:
            if x not in w.down:
                continue
            for y in sorted(w.down[x], key=lambda t: rank_of[t]):
                if allowed is not None and not allowed(x, y):
                    continue
                if not w.cancellable(x, y):
                    continue
                if track:
                    _track_step(w, x, y, f, g, h)
                w.cancel(x, y)
                changed = True
                break
    remaining = [v for v in c.generators if v in w.down]
    grads = None if c.gradings is None else {v: c.grading(v) for v in remaining}
    reduced = F2Complex.from_boundaries({v: w.down[v] for v in remaining}, remaining, grads)
    if not track:
        return reduced, None
    eq = Equivalence(
        source=c,
        target=reduced,
        f=_columns_to_matrix(f, c.generators, remaining),
        g=_columns_to_matrix(g, remaining, c.generators),
        h=_columns_to_matrix(h, c.generators, c.generators),
    )
    return reduced, eq


def _track_step(w: _Work, x, y, f: dict, g: dict, h: dict) -> None:
    """Update accumulated (f, g, h) for cancelling y in d(x).

    One step has f1(v) = pi(v) + <v, y> pi(dx), g1(a) = a + <da, y> x,
    h1(y) = x. Totals compose as f <- f1 f, g <- g g1, h <- h + g h1 f.
    """
    dx_rest = w.down[x] - {x, y}
    # h += g h1 f : for each source v whose f-image contains y, add g(x)
    gx = g[x]
    for v, img in f.items():
        if y in img:
            _sym(h[v], gx)
    # f <- f1 f
    for v, img in f.items():
        hit_y = y in img
        img.discard(x)
        img.discard(y)
        if hit_y:
            _sym(img, dx_rest)
    # g <- g g1 : for a with y in d(a), g(a) += g(x)
    for a in w.up[y]:
        if a != x:
            _sym(g[a], gx)
    del g[x]
    del g[y]


def is_reduced(c: F2Complex) -> bool:
    return c.differential.is_zero()
