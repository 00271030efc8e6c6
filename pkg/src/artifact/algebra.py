"""Dg algebras over idempotent ground rings, the torus algebra, pointed matched circles."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .errors import StructureError

Element = frozenset  # F2-combination of basis names


def elt(*names: str) -> frozenset:
    """F2-combination of basis names (repeated names cancel)."""
    out: set = set()
    for n in names:
        out ^= {n}
    return frozenset(out)


def add(*xs: Iterable) -> frozenset:
    out: set = set()
    for x in xs:
        out ^= set(x)
    return frozenset(out)


@dataclass(frozen=True)
class IdempotentRing:
    idempotents: tuple[str, ...]

    def __post_init__(self):
        if not self.idempotents:
            raise StructureError("ground ring needs at least one idempotent")
        if len(set(self.idempotents)) != len(self.idempotents):
            raise StructureError("idempotent names must be unique")


@dataclass(frozen=True)
class BasisElement:
    name: str
    left: str
    right: str


@dataclass(frozen=True)
class Witness:
    kind: str
    inputs: tuple
    residual: frozenset

    def __str__(self) -> str:
        res = " + ".join(sorted(map(str, self.residual))) or "0"
        return f"{self.kind} fails at {self.inputs}: residual {res}"


class DgAlgebraPresentation:
    """Dg algebra given by structure constants on a basis.

    Idempotents are basis elements and act as two-sided units through the
    left/right idempotent of each basis element; they need not appear in the
    product table. ``mu2`` lists products of non-idempotent basis elements
    (missing entries are zero); ``mu1`` lists nonzero differentials.
    """

    def __init__(
        self,
        ground: IdempotentRing | Sequence[str],
        basis: Sequence[BasisElement | tuple[str, str, str]],
        mu1: Mapping[str, Iterable[str]] | None = None,
        mu2: Mapping[tuple[str, str], Iterable[str]] | None = None,
        designated_chords: Sequence[str] | None = None,
        name: str = "",
    ):
        if not isinstance(ground, IdempotentRing):
            ground = IdempotentRing(tuple(ground))
        self.ground = ground
        self.name = name
        bl = [b if isinstance(b, BasisElement) else BasisElement(*b) for b in basis]
        names = [b.name for b in bl]
        for i in ground.idempotents:
            if i not in names:
                bl.insert(0, BasisElement(i, i, i))
                names.insert(0, i)
        if len(set(names)) != len(names):
            raise StructureError("basis names must be unique")
        self.basis = tuple(bl)
        self._by_name = {b.name: b for b in self.basis}
        self.mu1_table = {k: frozenset(v) for k, v in (mu1 or {}).items() if frozenset(v)}
        self.mu2_table = {tuple(k): frozenset(v) for k, v in (mu2 or {}).items() if frozenset(v)}
        self.designated_chords = None if designated_chords is None else tuple(designated_chords)
        for n in list(self.mu1_table) + [x for k in self.mu2_table for x in k]:
            if n not in self._by_name:
                raise StructureError(f"table refers to unknown basis element {n!r}")
        for v in list(self.mu1_table.values()) + list(self.mu2_table.values()):
            for n in v:
                if n not in self._by_name:
                    raise StructureError(f"table output {n!r} is not a basis element")
        if self.designated_chords is not None:
            for c in self.designated_chords:
                if c not in self._by_name or self.is_idempotent(c):
                    raise StructureError(f"designated chord {c!r} is not a non-idempotent basis element")

    def __repr__(self) -> str:
        return f"DgAlgebraPresentation({self.name or '?'}, {len(self.basis)} basis elements)"

    # basic data
    @property
    def idempotents(self) -> tuple[str, ...]:
        return self.ground.idempotents

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(b.name for b in self.basis)

    def nonidempotent(self) -> tuple[str, ...]:
        return tuple(b.name for b in self.basis if not self.is_idempotent(b.name))

    def is_idempotent(self, name: str) -> bool:
        return name in self.ground.idempotents

    def left(self, name: str) -> str:
        return self._by_name[name].left

    def right(self, name: str) -> str:
        return self._by_name[name].right

    def __contains__(self, name: str) -> bool:
        return name in self._by_name

    # operations on basis elements
    def mu1_basis(self, a: str) -> frozenset:
        return self.mu1_table.get(a, frozenset())

    def mu2_basis(self, a: str, b: str) -> frozenset:
        if self.right(a) != self.left(b):
            return frozenset()
        if self.is_idempotent(a):
            return frozenset((b,))
        if self.is_idempotent(b):
            return frozenset((a,))
        return self.mu2_table.get((a, b), frozenset())

    def augmentation_basis(self, a: str) -> int:
        return 1 if self.is_idempotent(a) else 0

    # operations on elements
    def mu1(self, x: Iterable[str]) -> frozenset:
        out: set = set()
        for a in x:
            out ^= self.mu1_basis(a)
        return frozenset(out)

    def mu2(self, x: Iterable[str], y: Iterable[str]) -> frozenset:
        out: set = set()
        ys = list(y)
        for a in x:
            for b in ys:
                out ^= self.mu2_basis(a, b)
        return frozenset(out)

    def product(self, *xs: Iterable[str]) -> frozenset:
        """Iterated product of elements, left to right."""
        if not xs:
            raise ValueError("empty product")
        acc = frozenset(xs[0])
        for x in xs[1:]:
            acc = self.mu2(acc, x)
        return acc

    def nilpotency_degree(self, limit: int = 64) -> int | None:
        """Smallest N such that products of N non-idempotent basis elements vanish (support bound)."""
        gens = set(self.nonidempotent())
        cur = set(gens)
        n = 1
        while cur:
            if n > limit:
                return None
            nxt: set = set()
            for s in cur:
                for t in gens:
                    nxt |= self.mu2_basis(s, t)
            cur = nxt
            n += 1
        return n - 1 if gens else 1

    def is_bounded(self) -> bool:
        return self.nilpotency_degree() is not None

    def rename(self, suffix: str = "'", name: str | None = None) -> "DgAlgebraPresentation":
        """Primed copy: every basis name and idempotent gets ``suffix``."""
        f = lambda n: n + suffix  # noqa: E731
        return DgAlgebraPresentation(
            [f(i) for i in self.idempotents],
            [BasisElement(f(b.name), f(b.left), f(b.right)) for b in self.basis],
            {f(k): [f(x) for x in v] for k, v in self.mu1_table.items()},
            {(f(a), f(b)): [f(x) for x in v] for (a, b), v in self.mu2_table.items()},
            None if self.designated_chords is None else [f(c) for c in self.designated_chords],
            name=name or (self.name + suffix),
        )

    def opposite(self) -> "DgAlgebraPresentation":
        """Opposite algebra: swap left/right idempotents and reverse products."""
        return DgAlgebraPresentation(
            list(self.idempotents),
            [BasisElement(b.name, b.right, b.left) for b in self.basis],
            dict(self.mu1_table),
            {(b, a): v for (a, b), v in self.mu2_table.items()},
            self.designated_chords,
            name=self.name + "^op",
        )

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "idempotents": list(self.idempotents),
            "basis": [[b.name, b.left, b.right] for b in self.basis],
            "mu1": {k: sorted(v) for k, v in sorted(self.mu1_table.items())},
            "mu2": [[a, b, sorted(v)] for (a, b), v in sorted(self.mu2_table.items())],
            "designated_chords": None if self.designated_chords is None else list(self.designated_chords),
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "DgAlgebraPresentation":
        return cls(
            d["idempotents"],
            [tuple(b) for b in d["basis"]],
            {k: v for k, v in d.get("mu1", {}).items()},
            {(a, b): v for a, b, v in d.get("mu2", [])},
            d.get("designated_chords"),
            name=d.get("name", ""),
        )


def validate_algebra(p: DgAlgebraPresentation) -> list[Witness]:
    """Failed axioms of a dg algebra presentation, each with a witness."""
    out: list[Witness] = []
    for b in p.basis:
        if p.is_idempotent(b.name) and (b.left != b.name or b.right != b.name):
            out.append(Witness("idempotent pattern", (b.name,), frozenset()))
        for side in (b.left, b.right):
            if side not in p.idempotents:
                out.append(Witness("unknown idempotent", (b.name, side), frozenset()))
    if out:
        return out
    for (a, b), v in sorted(p.mu2_table.items()):
        if p.is_idempotent(a) or p.is_idempotent(b):
            out.append(Witness("idempotent product tabulated", (a, b), v))
        if p.right(a) != p.left(b):
            out.append(Witness("idempotent discipline", (a, b), v))
        for c in v:
            if p.left(c) != p.left(a) or p.right(c) != p.right(b):
                out.append(Witness("idempotent discipline", (a, b), frozenset((c,))))
    for a, v in sorted(p.mu1_table.items()):
        if p.is_idempotent(a):
            out.append(Witness("differential of idempotent", (a,), v))
        for c in v:
            if p.left(c) != p.left(a) or p.right(c) != p.right(a):
                out.append(Witness("idempotent discipline", (a,), frozenset((c,))))
    names = p.names
    for a in names:
        r = p.mu1(p.mu1_basis(a))
        if r:
            out.append(Witness("mu1^2 = 0", (a,), r))
    for a, b in itertools.product(names, repeat=2):
        if p.right(a) != p.left(b):
            continue
        lhs = p.mu1(p.mu2_basis(a, b))
        rhs = add(p.mu2(p.mu1_basis(a), (b,)), p.mu2((a,), p.mu1_basis(b)))
        if lhs != rhs:
            out.append(Witness("Leibniz rule", (a, b), add(lhs, rhs)))
        ab = p.mu2_basis(a, b)
        if not p.is_idempotent(a) and not p.is_idempotent(b):
            hit = frozenset(x for x in ab if p.is_idempotent(x))
            if hit:
                out.append(Witness("augmentation", (a, b), hit))
        for c in names:
            if p.right(b) != p.left(c):
                continue
            left = p.mu2(ab, (c,))
            right = p.mu2((a,), p.mu2_basis(b, c))
            if left != right:
                out.append(Witness("associativity", (a, b, c), add(left, right)))
    for a in names:
        if not p.is_idempotent(a) and any(p.is_idempotent(x) for x in p.mu1_basis(a)):
            out.append(Witness("augmentation", (a,), p.mu1_basis(a)))
    return out


def trivial_algebra(idem: str = "1") -> DgAlgebraPresentation:
    """F2 with a single idempotent."""
    return DgAlgebraPresentation([idem], [], name="F2")


TORUS_CHORDS = ("rho1", "rho2", "rho3", "rho12", "rho23", "rho123")


def torus_algebra(mu2_overrides: Mapping[tuple[str, str], Iterable[str]] | None = None) -> DgAlgebraPresentation:
    """The torus algebra with idempotents iota0, iota1 and six chord elements.

    ``mu2_overrides`` replaces individual products (used for mutation tests).
    """
    basis = [
        ("iota0", "iota0", "iota0"),
        ("iota1", "iota1", "iota1"),
        ("rho1", "iota0", "iota1"),
        ("rho2", "iota1", "iota0"),
        ("rho3", "iota0", "iota1"),
        ("rho12", "iota0", "iota0"),
        ("rho23", "iota1", "iota1"),
        ("rho123", "iota0", "iota1"),
    ]
    mu2 = {
        ("rho1", "rho2"): ["rho12"],
        ("rho2", "rho3"): ["rho23"],
        ("rho1", "rho23"): ["rho123"],
        ("rho12", "rho3"): ["rho123"],
    }
    if mu2_overrides:
        for k, v in mu2_overrides.items():
            mu2[tuple(k)] = list(v)
    return DgAlgebraPresentation(["iota0", "iota1"], basis, {}, mu2, TORUS_CHORDS, name="torus")


# chord endpoints on the torus pointed matched circle, points 0..3 in order
TORUS_CHORD_ENDPOINTS = {
    "rho1": (0, 1),
    "rho2": (1, 2),
    "rho3": (2, 3),
    "rho12": (0, 2),
    "rho23": (1, 3),
    "rho123": (0, 3),
}


@dataclass(frozen=True)
class PointedMatchedCircle:
    """4k points 0..4k-1 in cyclic order, a pairing, and the basepoint position.

    The basepoint sits between point 4k-1 and point 0 unless ``basepoint`` says
    otherwise (it names the gap after that point index).
    """

    point_count: int
    matching: tuple[tuple[int, int], ...]
    basepoint: int = -1

    def __post_init__(self):
        n = self.point_count
        if n <= 0 or n % 4:
            raise ValueError("point count must be a positive multiple of 4")
        seen = sorted(p for pair in self.matching for p in pair)
        if seen != list(range(n)) or any(a == b for a, b in self.matching):
            raise ValueError("matching must be a fixed-point-free involution on all points")
        norm = tuple(sorted(tuple(sorted(p)) for p in self.matching))
        object.__setattr__(self, "matching", norm)
        if self.basepoint == -1:
            object.__setattr__(self, "basepoint", n - 1)

    @property
    def genus(self) -> int:
        return self.point_count // 4

    def partner(self, p: int) -> int:
        for a, b in self.matching:
            if p == a:
                return b
            if p == b:
                return a
        raise KeyError(p)

    def surgery_circle_count(self) -> int:
        """Number of circles after surgering the circle along the matched pairs.

        Tracing: from point p, go along the circle to p+1, then jump across the
        handle to partner(p+1). Each cycle of this permutation is one boundary
        circle of the surgered surface.
        """
        n = self.point_count
        sigma = [self.partner((p + 1) % n) for p in range(n)]
        seen = [False] * n
        cycles = 0
        for s in range(n):
            if not seen[s]:
                cycles += 1
                p = s
                while not seen[p]:
                    seen[p] = True
                    p = sigma[p]
        return cycles

    def is_valid(self) -> bool:
        return self.surgery_circle_count() == 1

    def pair_index(self, p: int) -> int:
        for k, pair in enumerate(self.matching):
            if p in pair:
                return k
        raise KeyError(p)


def linear_pmc(k: int) -> PointedMatchedCircle:
    """The linear pointed matched circle of genus k."""
    if k < 1:
        raise ValueError("genus must be at least 1")
    if k == 1:
        pmc = PointedMatchedCircle(4, ((0, 2), (1, 3)))
    else:
        pairs = [(0, 2)]
        pairs += [(2 * t - 1, 2 * t + 2) for t in range(1, 2 * k - 1)]
        pairs.append((4 * k - 3, 4 * k - 1))
        pmc = PointedMatchedCircle(4 * k, tuple(pairs))
    if not pmc.is_valid():
        raise StructureError("linear matching failed the genus check")
    return pmc


def opposite_pmc(z: PointedMatchedCircle) -> PointedMatchedCircle:
    """Orientation reversal: point i becomes point N-1-i; basepoint gap moves accordingly."""
    n = z.point_count
    flip = lambda p: n - 1 - p  # noqa: E731
    bp = (n - 2 - z.basepoint) % n
    return PointedMatchedCircle(n, tuple((flip(a), flip(b)) for a, b in z.matching), bp)
