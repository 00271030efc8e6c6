"""Heegaard multi-diagrams for branched double covers of plat closures.

The plat closure of a 2n-strand braid is drawn rotated, with the n maxima
(caps) on the right and the n minima (cups) on the left. Strands are
labelled s_1..s_2n from bottom to top and the topmost pair never crosses.

The diagram is laid out on a grid: horizontal alpha rows, a pair of glued
disks (a one-handle) for every crossing, U-turns and glued feet closing the
rows in the cap and cup regions, and small beta rings there. Crossing k of
the word sits in slice k counted from the right.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Sequence

from .errors import ArgumentError, ConventionError, CorrespondenceError
from .filtration import INF, FinitePoset
from .heegaard import (
    Curve,
    Generator,
    GridBuilder,
    GridSurface,
    HeegaardMultiDiagram,
    enumerate_generators,
    polyline,
)

LABELS = (0, 1, INF)
ROW_GAP = 8
CUP_WIDTH = 14
CAP_WIDTH = 14
SLICE_WIDTH = 20


@dataclass(frozen=True)
class PlatPresentation:
    """A braid word on 2n strands in plat position.

    word entries are signed generator indices: +i for sigma_i, -i for its
    inverse. forbid names the stationary pair: "top" forbids sigma_{2n-1},
    "bottom" forbids sigma_1.
    """

    strand_count: int
    word: tuple[int, ...] = ()
    forbid: str = "top"

    def __post_init__(self):
        object.__setattr__(self, "word", tuple(int(x) for x in self.word))
        m = self.strand_count
        if m < 2 or m % 2:
            raise ArgumentError(f"strand count must be a positive even number, got {m}")
        if self.forbid not in ("top", "bottom"):
            raise ArgumentError(f"forbid must be 'top' or 'bottom', got {self.forbid!r}")
        bad = m - 1 if self.forbid == "top" else 1
        for x in self.word:
            if x == 0 or abs(x) >= m:
                raise ArgumentError(f"braid letter {x} out of range for {m} strands")
            if abs(x) == bad:
                raise ConventionError(f"braid letter {x} moves the stationary pair of strands ({bad}, {bad + 1})")

    @property
    def n(self) -> int:
        return self.strand_count // 2

    @property
    def crossings(self) -> int:
        return len(self.word)

    def normalized(self) -> "PlatPresentation":
        """The same link with the top pair stationary."""
        if self.forbid == "top":
            return self
        m = self.strand_count
        return PlatPresentation(m, tuple((1 if x > 0 else -1) * (m - abs(x)) for x in self.word), "top")

    @classmethod
    def parse(cls, text: str, forbid: str = "top") -> "PlatPresentation":
        """Parse the literal "<2n>:[i, -j, ...]"."""
        m = re.fullmatch(r"\s*(\d+)\s*:\s*\[\s*([-+\d\s,]*)\]\s*", text)
        if not m:
            raise ArgumentError(f"cannot parse braid {text!r}; expected '<2n>:[i,-j,...]'")
        body = m.group(2).strip()
        word = tuple(int(t) for t in body.split(",") if t.strip()) if body else ()
        return cls(int(m.group(1)), word, forbid)

    def __str__(self) -> str:
        return f"{self.strand_count}:[{','.join(str(x) for x in self.word)}]"

    def to_dict(self) -> dict:
        return {"strand_count": self.strand_count, "word": list(self.word), "forbid": self.forbid}


# ---------------------------------------------------------------------------
# the projection: regions, smoothings, Kauffman states, determinant
# ---------------------------------------------------------------------------


def _x_order(p: PlatPresentation) -> list[int]:
    """Crossing numbers 1..c in left-to-right order (crossing 1 is rightmost)."""
    return list(range(p.crossings, 0, -1))


def _smoothing(sign: int, label) -> str | None:
    """'=' keeps the strands parallel (meridian), ')(' turns them back (longitude)."""
    if label == INF:
        return None
    if label not in (0, 1):
        raise ArgumentError(f"resolution label must be 0, 1 or inf, got {label!r}")
    meridian = (label == 0) if sign < 0 else (label == 1)
    return "=" if meridian else ")("


class _UF:
    def __init__(self):
        self.p = {}

    def find(self, x):
        self.p.setdefault(x, x)
        while self.p[x] != x:
            self.p[x] = self.p[self.p[x]]
            x = self.p[x]
        return x

    def union(self, a, b):
        self.p[self.find(a)] = self.find(b)


def _components(p: PlatPresentation, shapes: Sequence) -> int:
    c, m = p.crossings, p.strand_count
    uf = _UF()
    for t, k in enumerate(_x_order(p)):
        i = abs(p.word[k - 1])
        sm = shapes[k - 1]
        for q in range(1, m + 1):
            if q not in (i, i + 1):
                uf.union((t, q), (t + 1, q))
        if sm is None:
            uf.union((t, i), (t + 1, i + 1))
            uf.union((t, i + 1), (t + 1, i))
        elif sm == "x":
            for a, b in ((t, i), (t, i + 1)), ((t, i), (t + 1, i)), ((t, i), (t + 1, i + 1)):
                uf.union(a, b)
        elif sm == "=":
            uf.union((t, i), (t + 1, i))
            uf.union((t, i + 1), (t + 1, i + 1))
        else:
            uf.union((t, i), (t, i + 1))
            uf.union((t + 1, i), (t + 1, i + 1))
    for j in range(1, p.n + 1):
        uf.union((0, 2 * j - 1), (0, 2 * j))
        uf.union((c, 2 * j - 1), (c, 2 * j))
    return len({uf.find((t, q)) for t in range(c + 1) for q in range(1, m + 1)})


def link_components(p: PlatPresentation, labels: Sequence | None = None) -> int:
    """Number of components of the plat closure, optionally with crossings smoothed."""
    p = p.normalized()
    labels = tuple(labels) if labels is not None else (INF,) * p.crossings
    if len(labels) != p.crossings:
        raise ArgumentError(f"need {p.crossings} resolution labels, got {len(labels)}")
    return _components(p, [_smoothing(x, j) for x, j in zip(p.word, labels)])


def is_connected(p: PlatPresentation) -> bool:
    """Whether the projection is connected as a planar graph."""
    p = p.normalized()
    return _components(p, ["x"] * p.crossings) == 1


@dataclass(frozen=True)
class ProjectionCells:
    """Cells of the projection between consecutive strands, cut at crossings.

    cell (g, t): gap g (between strand g and g+1; gap 0 below, gap 2n above),
    t-th piece counted from the left. region maps each cell to its region id;
    the outer region and the marked region (gap 2n-1) are named.
    """

    cells: tuple
    region: dict
    outer: int
    marked: int
    corners: dict  # crossing -> {"N","S","E","W"} -> cell

    def unmarked_regions(self) -> list[int]:
        return sorted({r for r in self.region.values()} - {self.outer, self.marked})


def projection_cells(p: PlatPresentation) -> ProjectionCells:
    p = p.normalized()
    m = p.strand_count
    order = _x_order(p)
    pieces = {g: 0 for g in range(m + 1)}
    corners = {}
    for k in order:
        i = abs(p.word[k - 1])
        corners[k] = {
            "W": (i, pieces[i]),
            "E": (i, pieces[i] + 1),
            "N": (i + 1, pieces[i + 1]),
            "S": (i - 1, pieces[i - 1]),
        }
        pieces[i] += 1
    cells = tuple((g, t) for g in range(m + 1) for t in range(pieces[g] + 1))
    uf = _UF()
    outer = ("outer",)
    for cell in cells:
        uf.find(cell)
    uf.union((0, 0), outer)
    uf.union((m, 0), outer)
    for g in range(2, m - 1, 2):
        # even gaps open out between caps on the right and cups on the left
        uf.union((g, 0), outer)
        uf.union((g, pieces[g]), outer)
    roots = {}
    region = {}
    for cell in cells:
        r = uf.find(cell)
        region[cell] = roots.setdefault(r, len(roots))
    return ProjectionCells(cells, region, region[(0, 0)], region[(m - 1, 0)], corners)


@dataclass(frozen=True)
class KauffmanState:
    """A corner at every crossing, hitting each unmarked region exactly once."""

    assignment: tuple  # per crossing 1..c, one of "N", "S", "E", "W"
    marked_edge: tuple = ("top strand",)

    def __str__(self) -> str:
        return "".join(self.assignment)


def kauffman_states(p: PlatPresentation) -> list[KauffmanState]:
    """All Kauffman states with the marked edge on the stationary top strand.

    A disconnected projection has none (more regions than crossings).
    """
    p = p.normalized()
    if not is_connected(p):
        return []
    pc = projection_cells(p)
    targets = set(pc.unmarked_regions())
    c = p.crossings
    if len(targets) != c:
        return []
    options = []
    for k in range(1, c + 1):
        opts = []
        for corner in ("N", "E", "S", "W"):
            r = pc.region[pc.corners[k][corner]]
            if r in targets:
                opts.append((corner, r))
        options.append(opts)
    out: list[KauffmanState] = []

    def rec(k: int, used: set, chosen: list) -> None:
        if k == c:
            out.append(KauffmanState(tuple(chosen)))
            return
        for corner, r in options[k]:
            if r not in used:
                used.add(r)
                chosen.append(corner)
                rec(k + 1, used, chosen)
                chosen.pop()
                used.discard(r)

    rec(0, set(), [])
    return out


def _zmul(a: Sequence[int], b: Sequence[int]) -> list[int]:
    """Product in Z[zeta_8] with zeta^4 = -1, elements as 4 coefficients."""
    out = [0] * 4
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            k = i + j
            if k >= 4:
                out[k - 4] -= x * y
            else:
                out[k] += x * y
    return out


def determinant(p: PlatPresentation) -> int:
    """|Kauffman bracket| at A = exp(i pi / 4), computed exactly in Z[zeta_8].

    At this value the loop factor -A^2 - A^-2 vanishes, so only smoothings
    with a single circle contribute, each with A^(#A - #B).
    """
    p = p.normalized()
    c = p.crossings
    z = [0] * 4
    for bits in itertools.product((0, 1), repeat=c):
        # bit 0 is the A-smoothing: parallel at positive letters, turning back at negative ones
        shapes = [("=" if (b == 0) == (x > 0) else ")(") for b, x in zip(bits, p.word)]
        if _components(p, shapes) != 1:
            continue
        e = (c - 2 * sum(bits)) % 8
        if e >= 4:
            z[e - 4] -= 1
        else:
            z[e] += 1
    conj = [z[0], -z[3], -z[2], -z[1]]
    norm = _zmul(z, conj)
    if any(norm[1:]):
        raise ArithmeticError("bracket norm is not rational")
    n2 = norm[0]
    root = int(round(n2 ** 0.5))
    while root * root > n2:
        root -= 1
    while (root + 1) * (root + 1) <= n2:
        root += 1
    if root * root != n2:
        raise ArithmeticError(f"bracket norm {n2} is not a square")
    return root


# ---------------------------------------------------------------------------
# the branched cover diagram
# ---------------------------------------------------------------------------


def _rows(n: int) -> list[tuple[int, str]]:
    """alpha rows bottom to top as (pair, side)."""
    rows = [(1, "-")]
    for j in range(2, 2 * n - 1):
        rows += [(j, "-"), (j - 1, "+")]
    rows.append((2 * n - 2, "+"))
    return rows


@dataclass
class CrossingData:
    k: int
    letter: int
    pair: int
    x_center: int
    slice_range: tuple[int, int]
    meridian: str
    longitude: str
    resolution: str
    points: dict = field(default_factory=dict)  # corner -> vertex on the resolution curve

    def beta(self, label) -> str:
        sm = _smoothing(self.letter, label)
        if sm is None:
            return self.resolution
        return self.meridian if sm == "=" else self.longitude


@dataclass
class ResolutionFamily:
    label: tuple
    curves: tuple
    theta: dict  # successor label -> top generator, or None when not adjacent


@dataclass
class BranchedCoverDiagram:
    presentation: PlatPresentation
    stabilized: bool
    surface: GridSurface
    curves: dict
    alpha: tuple
    cap_beta: tuple
    cup_beta: tuple
    shared_beta: tuple
    crossings: list
    basepoint: int
    alpha_cells: dict  # alpha name -> projection cell (g, t)
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def genus(self) -> int:
        return self.surface.genus

    @property
    def expected_genus(self) -> int:
        n, c = self.presentation.n, self.presentation.crossings
        g = 2 * n - 2 + c
        return g + c * (2 * n - 3) if self.stabilized else g

    def labels(self) -> list[tuple]:
        return list(itertools.product(LABELS, repeat=len(self.crossings)))

    def poset(self, labels: Iterable[tuple] | None = None) -> FinitePoset:
        """Product order on {0 < 1 < inf}^c, restricted to the given labels."""
        labels = list(labels) if labels is not None else self.labels()
        rank = {0: 0, 1: 1, INF: 2}
        rel = []
        for a in labels:
            for b in labels:
                if a != b and all(rank[x] <= rank[y] for x, y in zip(a, b)):
                    rel.append((a, b))
        return FinitePoset(labels, rel)

    def family_curves(self, label: Sequence) -> tuple[str, ...]:
        label = tuple(label)
        if len(label) != len(self.crossings):
            raise ArgumentError(f"label needs {len(self.crossings)} entries")
        return self.cup_beta + tuple(cx.beta(j) for cx, j in zip(self.crossings, label)) + self.shared_beta + self.cap_beta

    def diagram(self, labels: Iterable[Sequence] | None = None, check: bool = True) -> HeegaardMultiDiagram:
        """The multi-diagram restricted to some resolution labels (default all-inf)."""
        labels = [tuple(l) for l in labels] if labels is not None else [(INF,) * len(self.crossings)]
        key = (tuple(labels), check)
        if key not in self._cache:
            beta = {l: self.family_curves(l) for l in labels}
            self._cache[key] = HeegaardMultiDiagram(
                self.surface, self.curves, self.alpha, beta, self.basepoint,
                poset=self.poset(labels), name=f"branched cover of {self.presentation}", check=check,
            )
        return self._cache[key]

    def slice_map(self) -> dict[int, tuple[int, int]]:
        return {cx.k: cx.slice_range for cx in self.crossings}


def _block(x0: int, y0: int, half: int = 2) -> list[tuple[int, int]]:
    """Perimeter of the square of given half-size centred at (x0, y0), ccw from the bottom-left."""
    a, b = x0 - half, y0 - half
    c, d = x0 + half, y0 + half
    return polyline((a, b), (c, b), (c, d), (a, d), (a, b))


def _reflect(points, y_from: int, y_to: int):
    return [(x, y_to - (y - y_from)) for x, y in points]


def _ring(x0: int, y0: int, x1: int, y1: int) -> list[tuple[int, int]]:
    return polyline((x0, y0), (x1, y0), (x1, y1), (x0, y1), (x0, y0))


def build_cover_diagram(p: PlatPresentation, stabilized: bool = False) -> BranchedCoverDiagram:
    """Grid realization of the multi-diagram for the branched double cover of the plat closure."""
    p = p.normalized()
    n, c = p.n, p.crossings
    if n < 2:
        raise ArgumentError("need at least four strands")
    rows = _rows(n)
    row_y = {rp: ROW_GAP * r + ROW_GAP for r, rp in enumerate(rows)}
    H = ROW_GAP * len(rows) + ROW_GAP
    X0 = CUP_WIDTH + SLICE_WIDTH * c
    W = X0 + CAP_WIDTH
    gb = GridBuilder(W, H)
    gb.add_outer_face()

    def handle(xc: int, pair: int):
        ym, yp = row_y[(pair, "-")], row_y[(pair, "+")]
        gb.remove_block(xc - 2, ym - 2, xc + 2, ym + 2)
        gb.remove_block(xc - 2, yp - 2, xc + 2, yp + 2)
        a = _block(xc, ym)
        gb.glue(a, _reflect(a, ym, yp))
        return ym, yp

    # crossing handles, slice k counted from the right
    crossings = []
    handles: dict[int, list[int]] = {q: [] for q in range(1, 2 * n - 1)}
    stab: list[tuple[int, int, int]] = []
    for k in range(1, c + 1):
        letter = p.word[k - 1]
        i = abs(letter)
        start = CUP_WIDTH + SLICE_WIDTH * (c - k)
        xc = start + 6
        handle(xc, i)
        handles[i].append(xc)
        crossings.append(CrossingData(k, letter, i, xc, (start, start + SLICE_WIDTH), f"mu{k}", f"lambda{k}", f"res{k}"))
        if stabilized:
            for q in range(1, 2 * n - 1):
                if q != i:
                    handle(xc + 9, q)
                    handles[q].append(xc + 9)
                    stab.append((k, q, xc + 9))
    # feet for even pairs
    for q in range(2, 2 * n - 1, 2):
        ym, yp = row_y[(q, "-")], row_y[(q, "+")]
        for xf in (8, X0 + 6):
            gb.remove_block(xf - 2, ym - 2, xf + 2, ym + 2)
            gb.remove_block(xf - 2, yp - 2, xf + 2, yp + 2)
            a = _block(xf, ym)
            gb.glue(a, _reflect(a, ym, yp))
    S = gb.build()

    curves: dict[str, Curve] = {}
    alpha: list[str] = []
    alpha_cells: dict[str, tuple[int, int]] = {}
    for q in range(1, 2 * n - 1):
        ym, yp = row_y[(q, "-")], row_y[(q, "+")]
        if q % 2:
            left, right = 3, X0 + 11
        else:
            left, right = 10, X0 + 4
        cuts = sorted(handles[q])
        bounds = [left] + [v for x in cuts for v in (x - 2, x + 2)] + [right]
        for t in range(len(cuts) + 1):
            a, b = bounds[2 * t], bounds[2 * t + 1]
            u_left = q % 2 == 1 and t == 0
            u_right = q % 2 == 1 and t == len(cuts)
            pts = polyline((a, ym), (b, ym))
            pts += polyline((b, ym), (b, yp))[1:] if u_right else [(b, yp)]
            pts += polyline((b, yp), (a, yp))[1:]
            pts += polyline((a, yp), (a, ym))[1:] if u_left else [(a, ym)]
            name = f"a{q}.{t}"
            curves[name] = Curve(name, S.path(pts))
            alpha.append(name)
    # projection cells: alpha piece t of pair q is cell (q, t) once stabilization cuts are merged
    for q in range(1, 2 * n - 1):
        cuts = sorted(handles[q])
        real = sorted(cx.x_center for cx in crossings if cx.pair == q)
        for t in range(len(cuts) + 1):
            x_left = cuts[t - 1] if t else -1
            alpha_cells[f"a{q}.{t}"] = (q, sum(1 for x in real if x <= x_left))
    # crossing curves
    for cx in crossings:
        xc, q = cx.x_center, cx.pair
        ym, yp = row_y[(q, "-")], row_y[(q, "+")]
        curves[cx.meridian] = Curve(cx.meridian, S.path(_ring(xc - 5, ym - 5, xc + 5, ym + 5)))
        curves[cx.longitude] = Curve(cx.longitude, S.path(polyline((xc, ym + 2), (xc, yp - 2)) + [(xc, ym + 2)]))
        if cx.letter < 0:
            spiral = polyline((xc + 1, ym + 2), (xc + 1, ym + 3), (xc + 3, ym + 3), (xc + 3, ym - 3), (xc - 3, ym - 3), (xc - 3, ym + 4), (xc + 1, ym + 4), (xc + 1, yp - 2))
        else:
            spiral = polyline((xc + 1, ym + 2), (xc + 1, ym + 3), (xc - 3, ym + 3), (xc - 3, ym - 3), (xc + 3, ym - 3), (xc + 3, ym + 4), (xc + 1, ym + 4), (xc + 1, yp - 2))
        curves[cx.resolution] = Curve(cx.resolution, S.path(spiral + [(xc + 1, ym + 2)]))
        between = [r for r in rows[rows.index((q, "-")) + 1 : rows.index((q, "+"))]]
        cx.points = {"W": S.vertex((xc - 3, ym)), "E": S.vertex((xc + 3, ym)), "N": None, "S": None}
        for rp in between:
            cx.points["S" if rp[0] == q - 1 else "N"] = S.vertex((xc + 1, row_y[rp]))
    shared = []
    for k, q, xs in stab:
        ym = row_y[(q, "-")]
        name = f"sb{k}.{q}"
        curves[name] = Curve(name, S.path(_ring(xs - 3, ym - 3, xs + 3, ym + 3)))
        shared.append(name)
    # cap and cup rings
    cap, cup = [], []
    for i in range(1, n):
        if i == 1:
            lo = hi = row_y[(2, "-")]
        else:
            lo, hi = row_y[(2 * i - 2, "+")], row_y[(2 * i, "-")]
        for side, xs, out in (("l", 8, cup), ("r", X0 + 6, cap)):
            name = f"b{side}{i}"
            curves[name] = Curve(name, S.path(_ring(xs - 3, lo - 3, xs + 3, hi + 3)))
            out.append(name)
    return BranchedCoverDiagram(
        p, stabilized, S, curves, tuple(alpha), tuple(cap), tuple(cup), tuple(shared), crossings,
        S.face("outer"), alpha_cells,
    )


# ---------------------------------------------------------------------------
# families, correspondence, destabilization
# ---------------------------------------------------------------------------

_RANK = {0: 0, 1: 1, INF: 2}


def resolution_family(d: BranchedCoverDiagram, label: Sequence) -> ResolutionFamily:
    """The beta curves for a label in {0,1,inf}^c and its theta slots.

    For every label obtained by raising one coordinate, the slot holds the
    top generator between the two families (shared circles at their top
    point, the changed circles at their unique crossing). Labels differing in
    two or more coordinates get no theta (slot value None).
    """
    label = tuple(label)
    mine = d.family_curves(label)
    theta: dict = {}
    for other in d.labels():
        if other == label or not all(_RANK[a] <= _RANK[b] for a, b in zip(label, other)):
            continue
        diff = [k for k, (a, b) in enumerate(zip(label, other)) if a != b]
        if len(diff) != 1:
            theta[other] = None
            continue
        k = diff[0]
        cx = d.crossings[k]
        c1, c2 = cx.beta(label[k]), cx.beta(other[k])
        dd = d.diagram([label, other], check=False)
        pts = dd.intersections(c2, c1)
        if len(pts) != 1:
            raise CorrespondenceError(f"{c1} and {c2} meet {len(pts)} times, expected once")
        points = []
        for a, b in zip(mine, d.family_curves(other)):
            points.append((a, b, pts[0]) if a != b else (a, b, "top"))
        theta[other] = Generator(label, other, tuple(points))
    return ResolutionFamily(label, mine, theta)


@dataclass
class CorrespondenceResult:
    ok: bool
    pairs: list  # (state, generator)
    generator_count: int
    state_count: int
    note: str = ""

    def __bool__(self) -> bool:
        return self.ok


def generator_correspondence(d: BranchedCoverDiagram, states: Sequence[KauffmanState] | None = None) -> CorrespondenceResult:
    """Map each Kauffman state to a generator of (alpha, beta^inf) and check bijectivity."""
    if d.stabilized:
        raise ArgumentError("the correspondence is stated for the small diagram")
    p = d.presentation
    if not is_connected(p):
        raise CorrespondenceError("the projection is disconnected, so it has no Kauffman states")
    states = kauffman_states(p) if states is None else list(states)
    label = (INF,) * len(d.crossings)
    hd = d.diagram([label])
    gens = enumerate_generators(hd, label)
    by_points = {frozenset(g.points): g for g in gens}
    alive_beta = list(d.family_curves(label))
    pairs = []
    for st in states:
        chosen = {}
        used_alpha = set()
        for cx, corner in zip(d.crossings, st.assignment):
            v = cx.points.get(corner)
            if v is None:
                raise CorrespondenceError(f"state {st} uses corner {corner} at crossing {cx.k}, which has no alpha")
            a = [nm for nm in hd.crossings[v] if nm in hd.alpha]
            if len(a) != 1:
                raise CorrespondenceError(f"point {v} is not on exactly one alpha circle")
            chosen[cx.resolution] = (a[0], cx.resolution, v)
            used_alpha.add(a[0])
        rest_beta = [b for b in alive_beta if b not in chosen]
        rest_alpha = [a for a in hd.alpha if a not in used_alpha]
        completions = _matchings(hd, rest_alpha, rest_beta)
        if len(completions) != 1:
            raise CorrespondenceError(f"state {st} has {len(completions)} completions, expected exactly one")
        points = dict(chosen)
        points.update(completions[0])
        key = frozenset(points[b] for b in alive_beta)
        if key not in by_points:
            raise CorrespondenceError(f"state {st} does not give a generator")
        pairs.append((st, by_points[key]))
    images = {id(g) for _, g in pairs}
    ok = len(images) == len(pairs) == len(gens)
    return CorrespondenceResult(ok, pairs, len(gens), len(states), "" if ok else "not a bijection")


def _matchings(hd: HeegaardMultiDiagram, alphas: Sequence[str], betas: Sequence[str]) -> list[dict]:
    out = []
    opts = [[(a, b, v) for a in alphas for v in hd.intersections(a, b)] for b in betas]

    def rec(k, used, acc):
        if k == len(betas):
            out.append(dict(acc))
            return
        for a, b, v in opts[k]:
            if a not in used:
                acc[b] = (a, b, v)
                rec(k + 1, used | {a}, acc)
                del acc[b]

    rec(0, frozenset(), {})
    return out


@dataclass
class DestabilizationResult:
    count: int
    expected: int
    steps: list  # (beta, alpha)
    generators_before: int
    generators_after: int

    @property
    def ok(self) -> bool:
        return self.count == self.expected and self.generators_before == self.generators_after


def destabilization_count_check(d: BranchedCoverDiagram) -> DestabilizationResult:
    """Greedily destabilize cap and cup circles meeting exactly one alpha exactly once."""
    if d.stabilized:
        raise ArgumentError("destabilization is counted on the small diagram")
    label = (INF,) * len(d.crossings)
    hd = d.diagram([label])
    alive_a = list(hd.alpha)
    cand = list(d.cup_beta) + list(d.cap_beta)
    steps = []
    progress = True
    while progress:
        progress = False
        for b in cand:
            hits = [(a, v) for a in alive_a for v in hd.intersections(a, b)]
            if len(hits) == 1:
                steps.append((b, hits[0][0]))
                alive_a.remove(hits[0][0])
                cand.remove(b)
                progress = True
                break
    betas = list(hd.family(label))
    before = len(_matchings(hd, hd.alpha, betas))
    gone_b = {b for b, _ in steps}
    after = len(_matchings(hd, alive_a, [b for b in betas if b not in gone_b]))
    return DestabilizationResult(len(steps), 2 * d.presentation.n - 2, steps, before, after)


def complete_resolutions(p: PlatPresentation) -> list[tuple[tuple, int]]:
    """Every label in {0,1}^c with the number of components of that resolution."""
    p = p.normalized()
    return [(lab, link_components(p, lab)) for lab in itertools.product((0, 1), repeat=p.crossings)]


def corpus() -> dict[str, PlatPresentation]:
    """Small braid words used for bookkeeping checks."""
    words = {
        "unlink2": (4, ()),
        "unknot1": (4, (2,)),
        "trefoil": (4, (2, 2, 2)),
        "trefoil_mirror": (4, (-2, -2, -2)),
        "figure_eight": (4, (2, -1, 2, 2)),
        "hopf": (4, (2, 2)),
        "cinquefoil": (4, (2, 2, 2, 2, 2)),
        "two_bridge_7_3": (4, (2, 2, -1, -1, 2)),
        "six_strand_a": (6, (2, 4, 3)),
        "six_strand_b": (6, (1, -2, 3, 4)),
    }
    return {k: PlatPresentation(m, w) for k, (m, w) in words.items()}
