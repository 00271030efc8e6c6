"""Pointed Heegaard multi-diagrams on cellulated surfaces.

A surface is a 2-complex given by vertices, oriented edges and faces, each
face a counterclockwise cycle of signed edges. Attaching curves are embedded
edge paths. Regions are the components of the complement of all curves, and
domains are integer combinations of regions.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Iterable, Mapping, Sequence

from sympy import Matrix, QQ
from sympy.matrices.normalforms import smith_normal_decomp
from sympy.polys.matrices import DomainMatrix

from .algebra import PointedMatchedCircle
from .errors import ArgumentError, DiagramError
from .f2chain import F2Matrix
from .filtration import FinitePoset

ALPHA = "alpha"


class _UnionFind:
    """Union-find with an optional Z/2 parity relative to the root."""

    def __init__(self):
        self.parent: dict = {}
        self.parity: dict = {}

    def add(self, x) -> None:
        if x not in self.parent:
            self.parent[x] = x
            self.parity[x] = 0

    def find(self, x):
        self.add(x)
        path = []
        while self.parent[x] != x:
            path.append(x)
            x = self.parent[x]
        root = x
        # compress, accumulating parity from the far end
        acc = 0
        for y in reversed(path):
            acc ^= self.parity[y]
            self.parity[y] = acc
            self.parent[y] = root
        return root

    def parity_of(self, x) -> int:
        self.find(x)
        return self.parity[x]

    def union(self, a, b, par: int = 0) -> bool:
        """Join a and b with parity(a) + parity(b) = par; False on a conflict."""
        ra, rb = self.find(a), self.find(b)
        pa, pb = self.parity[a], self.parity[b]
        if ra == rb:
            return (pa ^ pb) == par
        self.parent[rb] = ra
        self.parity[rb] = pa ^ pb ^ par
        return True


# ---------------------------------------------------------------------------
# surfaces
# ---------------------------------------------------------------------------


def _in_end(e: int, s: int) -> tuple[int, int]:
    """Edge end at the vertex where the traversal (e, s) arrives."""
    return (e, 1) if s > 0 else (e, 0)


def _out_end(e: int, s: int) -> tuple[int, int]:
    """Edge end at the vertex where the traversal (e, s) leaves."""
    return (e, 0) if s > 0 else (e, 1)


class SurfaceCW:
    """A compact oriented surface as a 2-complex.

    edges[e] = (tail, head); faces[f] = ccw cycle of (edge, sign) with sign
    +1 when the face traverses the edge from tail to head. Every edge is used
    by two faces with opposite signs, or by one face if it lies on the
    boundary.
    """

    def __init__(
        self,
        n_vertices: int,
        edges: Sequence[tuple[int, int]],
        faces: Sequence[Sequence[tuple[int, int]]],
        check: bool = True,
    ):
        self.n_vertices = int(n_vertices)
        self.edges = tuple((int(t), int(h)) for t, h in edges)
        self.faces = tuple(tuple((int(e), 1 if s > 0 else -1) for e, s in f) for f in faces)
        self._d2_cache: dict = {}
        sides: list[list] = [[None, None] for _ in self.edges]
        for f, cyc in enumerate(self.faces):
            if not cyc:
                raise DiagramError(f"face {f} is empty")
            for k, (e, s) in enumerate(cyc):
                if not 0 <= e < len(self.edges):
                    raise DiagramError(f"face {f} uses unknown edge {e}")
                slot = 0 if s > 0 else 1
                if sides[e][slot] is not None:
                    raise DiagramError(f"edge {e} is traversed twice in the same direction")
                sides[e][slot] = f
                e2, s2 = cyc[(k + 1) % len(cyc)]
                if self.head(e, s) != self.tail(e2, s2):
                    raise DiagramError(f"face {f} is not a closed cycle at position {k}")
        self.sides = tuple((a, b) for a, b in sides)
        for e, (a, b) in enumerate(self.sides):
            if a is None and b is None:
                raise DiagramError(f"edge {e} is not used by any face")
        # rotation systems: ccw successor of an edge end and the face between them
        self._succ: dict = {}
        self._sector: dict = {}
        for f, cyc in enumerate(self.faces):
            for k, (e1, s1) in enumerate(cyc):
                e2, s2 = cyc[(k + 1) % len(cyc)]
                a, b = _out_end(e2, s2), _in_end(e1, s1)
                if a in self._succ:
                    raise DiagramError(f"edge end {a} has two ccw successors")
                self._succ[a] = b
                self._sector[a] = f
        self.rotation = self._build_rotation()
        if check:
            self._check_connected()

    # edge helpers
    def tail(self, e: int, s: int = 1) -> int:
        t, h = self.edges[e]
        return t if s > 0 else h

    def head(self, e: int, s: int = 1) -> int:
        t, h = self.edges[e]
        return h if s > 0 else t

    def end_vertex(self, end: tuple[int, int]) -> int:
        e, k = end
        return self.edges[e][k]

    def _build_rotation(self) -> tuple:
        ends_at: list[list] = [[] for _ in range(self.n_vertices)]
        for e, (t, h) in enumerate(self.edges):
            ends_at[t].append((e, 0))
            ends_at[h].append((e, 1))
        preds = {b: a for a, b in self._succ.items()}
        rot = []
        for v in range(self.n_vertices):
            ends = ends_at[v]
            if not ends:
                raise DiagramError(f"vertex {v} is isolated")
            starts = [x for x in ends if x not in preds]
            if len(starts) > 1:
                raise DiagramError(f"vertex {v} is not a manifold point")
            cur = starts[0] if starts else ends[0]
            order = [cur]
            while cur in self._succ and self._succ[cur] != order[0]:
                cur = self._succ[cur]
                order.append(cur)
            if len(order) != len(ends):
                raise DiagramError(f"vertex {v} link is disconnected")
            rot.append(tuple(order))
        return tuple(rot)

    def _check_connected(self) -> None:
        uf = _UnionFind()
        for f in range(len(self.faces)):
            uf.add(f)
        for a, b in self.sides:
            if a is not None and b is not None:
                uf.union(a, b)
        roots = {uf.find(f) for f in range(len(self.faces))}
        if len(roots) > 1:
            raise DiagramError("surface is disconnected")

    def is_boundary_vertex(self, v: int) -> bool:
        first = self.rotation[v][0]
        return self._succ.get(self.rotation[v][-1]) != first

    def sector_face(self, end: tuple[int, int]):
        """Face lying ccw after the given edge end, or None on the boundary."""
        return self._sector.get(end)

    @property
    def boundary_edges(self) -> tuple[int, ...]:
        return tuple(e for e, (a, b) in enumerate(self.sides) if a is None or b is None)

    def euler_characteristic(self) -> int:
        return self.n_vertices - len(self.edges) + len(self.faces)

    def boundary_components(self) -> list[list[tuple[int, int]]]:
        """Boundary circles as edge cycles oriented with the surface on the left."""
        out_from: dict = {}
        for e in self.boundary_edges:
            a, b = self.sides[e]
            s = 1 if a is not None else -1
            out_from.setdefault(self.tail(e, s), []).append((e, s))
        seen: set = set()
        comps = []
        for e in self.boundary_edges:
            if e in seen:
                continue
            a, _ = self.sides[e]
            cur = (e, 1 if a is not None else -1)
            cyc = []
            while cur[0] not in seen:
                seen.add(cur[0])
                cyc.append(cur)
                nxt = [x for x in out_from[self.head(*cur)] if x[0] not in seen]
                if not nxt:
                    break
                cur = nxt[0]
            comps.append(cyc)
        return comps

    @property
    def genus(self) -> int:
        b = len(self.boundary_components())
        twice = 2 - self.euler_characteristic() - b
        if twice < 0 or twice % 2:
            raise DiagramError(f"Euler characteristic {self.euler_characteristic()} with {b} boundary circles is not a surface")
        return twice // 2

    def face_boundary_matrix(self, drop_edges: Iterable[int] = ()) -> tuple[F2Matrix, dict[int, int]]:
        """F2 matrix of faces -> edges with some edge rows removed, and the row index of each kept edge."""
        drop = frozenset(drop_edges)
        if drop in self._d2_cache:
            return self._d2_cache[drop][:2]
        keep = [e for e in range(len(self.edges)) if e not in drop]
        idx = {e: i for i, e in enumerate(keep)}
        cols = {}
        for f, cyc in enumerate(self.faces):
            rows: set = set()
            for e, _ in cyc:
                if e in idx:
                    rows ^= {idx[e]}
            cols[f] = rows
        m = F2Matrix.from_columns(len(keep), len(self.faces), cols)
        self._d2_cache[drop] = [m, idx, None]
        return m, idx

    def face_boundary_rank(self, drop_edges: Iterable[int] = ()) -> int:
        drop = frozenset(drop_edges)
        m, _ = self.face_boundary_matrix(drop)
        entry = self._d2_cache[drop]
        if entry[2] is None:
            entry[2] = m.rank()
        return entry[2]

    def to_dict(self) -> dict:
        return {
            "n_vertices": self.n_vertices,
            "edges": [list(e) for e in self.edges],
            "faces": [[[e, s] for e, s in f] for f in self.faces],
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "SurfaceCW":
        return cls(d["n_vertices"], [tuple(e) for e in d["edges"]], [[tuple(x) for x in f] for f in d["faces"]])


def polyline(*corners: tuple[int, int]) -> list[tuple[int, int]]:
    """Lattice points along axis-parallel segments through the given corners."""
    pts = [tuple(corners[0])]
    for (x0, y0), (x1, y1) in zip(corners, corners[1:]):
        if x0 != x1 and y0 != y1:
            raise ArgumentError(f"segment {(x0, y0)} -> {(x1, y1)} is not axis parallel")
        n = abs(x1 - x0) + abs(y1 - y0)
        dx, dy = (x1 > x0) - (x1 < x0), (y1 > y0) - (y1 < y0)
        pts.extend((x0 + dx * k, y0 + dy * k) for k in range(1, n + 1))
    return pts


def _seg(p, q) -> tuple[tuple, int]:
    """Canonical lattice edge key and the sign of p -> q against it."""
    (x0, y0), (x1, y1) = p, q
    if y0 == y1 and abs(x1 - x0) == 1:
        x = min(x0, x1)
        return ("h", x, y0), (1 if x1 > x0 else -1)
    if x0 == x1 and abs(y1 - y0) == 1:
        y = min(y0, y1)
        return ("v", x0, y), (1 if y1 > y0 else -1)
    raise ArgumentError(f"{p} and {q} are not lattice neighbours")


class GridSurface(SurfaceCW):
    """A SurfaceCW built from unit squares, remembering lattice coordinates."""

    def __init__(self, n_vertices, edges, faces, vertex_of: dict, seg_of: dict, face_of: dict, check: bool = True):
        super().__init__(n_vertices, edges, faces, check=check)
        self.vertex_of = vertex_of
        self.seg_of = seg_of
        self.face_of = face_of
        self.coords: dict = {}
        for p, v in sorted(vertex_of.items()):
            self.coords.setdefault(v, p)

    def vertex(self, p) -> int:
        try:
            return self.vertex_of[tuple(p)]
        except KeyError:
            raise ArgumentError(f"lattice point {p} is not on the surface") from None

    def edge(self, p, q) -> tuple[int, int]:
        key, s = _seg(p, q)
        if key not in self.seg_of:
            raise ArgumentError(f"lattice segment {p} -> {q} is not on the surface")
        e, s0 = self.seg_of[key]
        return e, s * s0

    def face(self, square) -> int:
        return self.face_of[tuple(square) if not isinstance(square, str) else square]

    def path(self, points: Sequence, closed: bool = True) -> tuple[tuple[int, int], ...]:
        """Signed edges along lattice points; identified neighbours are jumps."""
        pts = [tuple(p) for p in points]
        out = []
        for p, q in zip(pts, pts[1:]):
            if self.vertex(p) == self.vertex(q):
                continue
            out.append(self.edge(p, q))
        if closed and self.vertex(pts[0]) != self.vertex(pts[-1]):
            raise ArgumentError("closed curve does not return to its start")
        return tuple(out)


class GridBuilder:
    """Unit squares in [0, W] x [0, H] with removed blocks and boundary gluings."""

    def __init__(self, width: int, height: int):
        self.width = int(width)
        self.height = int(height)
        self.squares = {(i, j) for i in range(self.width) for j in range(self.height)}
        self.gluings: list[tuple[list, list]] = []
        self.outer = False

    def remove_block(self, x0: int, y0: int, x1: int, y1: int) -> None:
        """Remove the open rectangle (x0, x1) x (y0, y1)."""
        for i in range(x0, x1):
            for j in range(y0, y1):
                if (i, j) not in self.squares:
                    raise ArgumentError(f"square {(i, j)} removed twice")
                self.squares.discard((i, j))

    def glue(self, path_a: Sequence, path_b: Sequence) -> None:
        """Identify two lattice paths point by point."""
        a, b = [tuple(p) for p in path_a], [tuple(p) for p in path_b]
        if len(a) != len(b):
            raise ArgumentError("glued paths must have equal length")
        self.gluings.append((a, b))

    def glue_torus(self) -> None:
        self.glue([(0, y) for y in range(self.height + 1)], [(self.width, y) for y in range(self.height + 1)])
        self.glue([(x, 0) for x in range(self.width + 1)], [(x, self.height) for x in range(self.width + 1)])

    def add_outer_face(self) -> None:
        """Cap the rectangle with one face (the sphere point at infinity)."""
        self.outer = True

    def build(self, check: bool = True) -> GridSurface:
        segs: set = set()
        square_cycles = {}
        for i, j in sorted(self.squares):
            pts = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1), (i, j)]
            cyc = [_seg(p, q) for p, q in zip(pts, pts[1:])]
            square_cycles[(i, j)] = cyc
            segs.update(k for k, _ in cyc)
        outer_cycle = None
        if self.outer:
            W, H = self.width, self.height
            pts = polyline((0, 0), (0, H), (W, H), (W, 0), (0, 0))
            outer_cycle = [_seg(p, q) for p, q in zip(pts, pts[1:])]
            segs.update(k for k, _ in outer_cycle)
        points: set = set()
        for kind, x, y in segs:
            points.add((x, y))
            points.add((x + 1, y) if kind == "h" else (x, y + 1))
        vuf = _UnionFind()
        euf = _UnionFind()
        for p in points:
            vuf.add(p)
        for k in segs:
            euf.add(k)
        for a, b in self.gluings:
            for p, q in zip(a, b):
                if p not in points or q not in points:
                    raise ArgumentError(f"glued point {p} or {q} is not on the surface")
                vuf.union(p, q)
            for (p0, p1), (q0, q1) in zip(zip(a, a[1:]), zip(b, b[1:])):
                ka, sa = _seg(p0, p1)
                kb, sb = _seg(q0, q1)
                if not euf.union(ka, kb, 0 if sa == sb else 1):
                    raise DiagramError("gluing identifies an edge with itself reversed")
        vroots = sorted({vuf.find(p) for p in points})
        vid = {r: i for i, r in enumerate(vroots)}
        vertex_of = {p: vid[vuf.find(p)] for p in points}
        eroots = sorted({euf.find(k) for k in segs})
        eid = {r: i for i, r in enumerate(eroots)}
        seg_of = {}
        edges = [None] * len(eroots)
        for k in sorted(segs):
            r = euf.find(k)
            par = euf.parity_of(k)
            kind, x, y = k
            t, h = (x, y), ((x + 1, y) if kind == "h" else (x, y + 1))
            tv, hv = vertex_of[t], vertex_of[h]
            if par:
                tv, hv = hv, tv
            i = eid[r]
            if edges[i] is None:
                edges[i] = (tv, hv)
            elif edges[i] != (tv, hv):
                raise DiagramError(f"gluing is inconsistent along lattice edge {k}")
            seg_of[k] = (i, -1 if par else 1)
        faces = []
        face_of = {}
        for sq, cyc in square_cycles.items():
            face_of[sq] = len(faces)
            faces.append([(seg_of[k][0], s * seg_of[k][1]) for k, s in cyc])
        if outer_cycle is not None:
            face_of["outer"] = len(faces)
            faces.append([(seg_of[k][0], s * seg_of[k][1]) for k, s in outer_cycle])
        return GridSurface(len(vroots), edges, faces, vertex_of, seg_of, face_of, check=check)


# ---------------------------------------------------------------------------
# curves and multi-diagrams
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Curve:
    """An embedded closed curve or an arc with both ends on the boundary."""

    name: str
    edges: tuple
    closed: bool = True

    def to_dict(self) -> dict:
        return {"name": self.name, "edges": [list(x) for x in self.edges], "closed": self.closed}


@dataclass(frozen=True)
class BoundarySpec:
    """A boundary circle of a bordered diagram: label, pointed matched circle and the edge holding z."""

    label: str
    z_edge: int
    pmc: PointedMatchedCircle | None = None


@dataclass(frozen=True)
class Generator:
    """One intersection point on each curve of the second family, matched injectively to the first."""

    first: Hashable
    second: Hashable
    points: tuple  # (first curve, second curve, vertex or formal tag)
    occupied: frozenset = frozenset()

    def vertices(self) -> tuple:
        return tuple(p for _, _, p in self.points)

    def label(self) -> str:
        return "{" + ", ".join(f"{a}^{b}@{p}" for a, b, p in self.points) + "}"

    def __str__(self) -> str:
        return self.label()


class HeegaardMultiDiagram:
    """A surface, alpha curves, families of beta circles, and a basepoint face.

    beta maps each family label to curve names; families may share curves.
    For bordered diagrams, boundary lists the boundary circles with their
    pointed matched circles, and alpha may contain arcs.
    """

    def __init__(
        self,
        surface: SurfaceCW,
        curves: Mapping[str, Curve] | Iterable[Curve],
        alpha: Sequence[str],
        beta: Mapping[Hashable, Sequence[str]],
        basepoint: int,
        poset: FinitePoset | None = None,
        boundary: Sequence[BoundarySpec] = (),
        name: str = "",
        check: bool = True,
    ):
        self.surface = surface
        if not isinstance(curves, Mapping):
            curves = {c.name: c for c in curves}
        self.curves = dict(curves)
        self.alpha = tuple(alpha)
        self.beta = {k: tuple(v) for k, v in beta.items()}
        if ALPHA in self.beta:
            raise DiagramError(f"'{ALPHA}' is reserved for the alpha curves")
        self.basepoint = int(basepoint)
        self.poset = poset if poset is not None else FinitePoset.chain(list(self.beta))
        self.boundary = tuple(boundary)
        self.name = name
        for nm in self.alpha + tuple(n for v in self.beta.values() for n in v):
            if nm not in self.curves:
                raise DiagramError(f"unknown curve {nm!r}")
        self._index_curves()
        self._build_regions()
        self._build_crossings()
        if check:
            problems = self.validation_errors()
            if problems:
                raise DiagramError("; ".join(problems))

    # -- curve bookkeeping
    def family(self, sel) -> tuple[str, ...]:
        if sel == ALPHA:
            return self.alpha
        try:
            return self.beta[sel]
        except KeyError:
            raise ArgumentError(f"unknown curve family {sel!r}") from None

    @property
    def families(self) -> tuple:
        return (ALPHA,) + tuple(self.beta)

    @property
    def genus(self) -> int:
        return self.surface.genus

    def _index_curves(self) -> None:
        S = self.surface
        self.edge_curve: dict[int, tuple[str, int]] = {}
        self.curve_vertices: dict[str, tuple] = {}
        self.vertex_curves: dict[int, dict] = {}
        for name, c in self.curves.items():
            if not c.edges:
                raise DiagramError(f"curve {name!r} is empty")
            verts = []
            for k, (e, s) in enumerate(c.edges):
                if e in self.edge_curve:
                    raise DiagramError(f"curves {self.edge_curve[e][0]!r} and {name!r} share edge {e}")
                self.edge_curve[e] = (name, s)
                if k and S.tail(e, s) != S.head(*c.edges[k - 1]):
                    raise DiagramError(f"curve {name!r} is not connected at position {k}")
                verts.append(S.tail(e, s))
            last = S.head(*c.edges[-1])
            if c.closed:
                if last != verts[0]:
                    raise DiagramError(f"closed curve {name!r} does not close up")
            else:
                verts.append(last)
            if len(set(verts)) != len(verts):
                raise DiagramError(f"curve {name!r} is not embedded")
            self.curve_vertices[name] = tuple(verts)
            n = len(c.edges)
            for k, v in enumerate(verts):
                if c.closed:
                    ein, eout = c.edges[k - 1], c.edges[k]
                    info = (_in_end(*ein), _out_end(*eout), ein, eout)
                else:
                    ein = c.edges[k - 1] if k > 0 else None
                    eout = c.edges[k] if k < n else None
                    info = (
                        _in_end(*ein) if ein else None,
                        _out_end(*eout) if eout else None,
                        ein,
                        eout,
                    )
                self.vertex_curves.setdefault(v, {})[name] = info

    def _build_regions(self) -> None:
        S = self.surface
        uf = _UnionFind()
        for f in range(len(S.faces)):
            uf.add(f)
        for e, (a, b) in enumerate(S.sides):
            if e not in self.edge_curve and a is not None and b is not None:
                uf.union(a, b)
        roots: dict = {}
        self.region_of_face = []
        for f in range(len(S.faces)):
            r = uf.find(f)
            if r not in roots:
                roots[r] = len(roots)
            self.region_of_face.append(roots[r])
        self.n_regions = len(roots)
        self.region_faces = [[] for _ in range(self.n_regions)]
        for f, r in enumerate(self.region_of_face):
            self.region_faces[r].append(f)
        chi = [len(fs) for fs in self.region_faces]
        for e, (a, b) in enumerate(S.sides):
            if e not in self.edge_curve and a is not None and b is not None:
                chi[self.region_of_face[a]] -= 1
        for v in range(S.n_vertices):
            if v in self.vertex_curves or S.is_boundary_vertex(v):
                continue
            f = S.sector_face(S.rotation[v][0])
            chi[self.region_of_face[f]] += 1
        self.region_chi = tuple(chi)
        self.boundary_regions: dict[str, set] = {}
        comps = S.boundary_components()
        self._boundary_edge_comp = {}
        for ci, comp in enumerate(comps):
            for e, _ in comp:
                self._boundary_edge_comp[e] = ci
        for spec in self.boundary:
            if spec.z_edge not in self._boundary_edge_comp:
                raise DiagramError(f"boundary {spec.label!r}: edge {spec.z_edge} is not on the boundary")
        label_of_comp = {self._boundary_edge_comp[spec.z_edge]: spec.label for spec in self.boundary}
        for e, ci in self._boundary_edge_comp.items():
            a, b = S.sides[e]
            f = a if a is not None else b
            self.boundary_regions.setdefault(label_of_comp.get(ci, f"boundary{ci}"), set()).add(self.region_of_face[f])
        self.z_region = self.region_of_face[self.basepoint]

    def _build_crossings(self) -> None:
        S = self.surface
        self.crossings: dict[int, tuple[str, str]] = {}
        self.quadrants: dict[int, tuple] = {}
        corners = [0] * self.n_regions
        self._crossing_errors = []
        for v, info in self.vertex_curves.items():
            rot = S.rotation[v]
            pos = {end: i for i, end in enumerate(rot)}
            names = sorted(info)
            if len(names) == 1:
                nm = names[0]
                ein, eout, _, _ = info[nm]
                if ein is None or eout is None:
                    if not S.is_boundary_vertex(v):
                        self._crossing_errors.append(f"arc {nm!r} ends at interior vertex {v}")
                    else:
                        end = ein if ein is not None else eout
                        for side in (S.sector_face(end), S.sector_face(self._pred(v, end))):
                            if side is not None:
                                corners[self.region_of_face[side]] += 1
                continue
            if len(names) > 2:
                self._crossing_errors.append(f"vertex {v} lies on curves {names}")
                continue
            a, b = names
            ends = []
            for nm in (a, b):
                ein, eout, _, _ = info[nm]
                if ein is None or eout is None:
                    self._crossing_errors.append(f"curve {nm!r} ends on curve at vertex {v}")
                    break
                ends.append((pos[ein], nm, "in"))
                ends.append((pos[eout], nm, "out"))
            else:
                ends.sort()
                seq = [nm for _, nm, _ in ends]
                if seq[0] == seq[1] or seq[1] == seq[2]:
                    self._crossing_errors.append(f"curves {a!r} and {b!r} touch without crossing at vertex {v}")
                    continue
                self.crossings[v] = (a, b)
                quads = []
                for k in range(4):
                    i0, i1 = ends[k][0], ends[(k + 1) % 4][0]
                    f = S.sector_face(rot[i0])
                    if f is None:
                        self._crossing_errors.append(f"crossing at boundary vertex {v}")
                        break
                    r = self.region_of_face[f]
                    quads.append((ends[k][1:], ends[(k + 1) % 4][1:], r))
                    corners[r] += 1
                self.quadrants[v] = tuple(quads)
        self.region_corners = tuple(corners)

    def _pred(self, v: int, end) -> tuple:
        rot = self.surface.rotation[v]
        return rot[rot.index(end) - 1]

    def crossing_sign(self, v: int, first: str, second: str) -> int:
        """+1 when (first, second) is an oriented basis at the crossing v."""
        if self.crossings.get(v) is None or set(self.crossings[v]) != {first, second}:
            raise ArgumentError(f"{first!r} and {second!r} do not cross at vertex {v}")
        rot = self.surface.rotation[v]
        pos = {end: i for i, end in enumerate(rot)}
        a_in, a_out = self.vertex_curves[v][first][:2]
        b_in, b_out = self.vertex_curves[v][second][:2]
        n = len(rot)
        # walking ccw from the outgoing end of the first curve
        rel = lambda end: (pos[end] - pos[a_out]) % n  # noqa: E731
        return 1 if rel(b_out) < rel(b_in) else -1

    # -- validation
    def validation_errors(self) -> list[str]:
        out = list(self._crossing_errors)
        S = self.surface
        try:
            g = S.genus
        except DiagramError as exc:
            return out + [str(exc)]
        for fam in self.families:
            names = self.family(fam)
            vs = [v for nm in names for v in self.curve_vertices[nm]]
            if len(vs) != len(set(vs)) and len(set(names)) == len(names):
                out.append(f"curves of family {fam!r} are not pairwise disjoint")
        for nm in self.alpha:
            if not self.curves[nm].closed and not self.boundary:
                out.append(f"alpha arc {nm!r} in a closed diagram")
        for fam, names in self.beta.items():
            if any(not self.curves[nm].closed for nm in names):
                out.append(f"family {fam!r} contains an arc")
            if len(names) != g:
                out.append(f"family {fam!r} has {len(names)} circles but the genus is {g}")
            elif not self.independent(names):
                out.append(f"circles of family {fam!r} are not homologically independent")
        if self.alpha:
            arcs = [nm for nm in self.alpha if not self.curves[nm].closed]
            circles = len(self.alpha) - len(arcs)
            k = sum(spec.pmc.genus for spec in self.boundary if spec.pmc is not None)
            if all(spec.pmc is not None for spec in self.boundary):
                if len(arcs) != 2 * k or circles != g - k:
                    out.append(f"alpha has {len(arcs)} arcs and {circles} circles; expected {2 * k} and {g - k}")
            if not self.independent(self.alpha, relative=True):
                out.append("alpha curves are not homologically independent")
        if len(S.boundary_components()) != len(self.boundary):
            out.append(f"surface has {len(S.boundary_components())} boundary circles but {len(self.boundary)} are declared")
        out.extend(self.pmc_errors())
        return out

    def independent(self, names: Sequence[str], relative: bool = False) -> bool:
        """F2 independence of the curves in H_1(Sigma) (or relative to the boundary)."""
        S = self.surface
        drop = S.boundary_edges if relative else ()
        d2, idx = S.face_boundary_matrix(drop)
        cols = {j: set(d2.column(j)) for j in range(d2.cols)}
        base = S.face_boundary_rank(drop)
        extra = dict(cols)
        for k, nm in enumerate(names):
            extra[d2.cols + k] = {idx[e] for e, _ in self.curves[nm].edges if e in idx}
        m = F2Matrix.from_columns(d2.rows, d2.cols + len(names), extra)
        return m.rank() - base == len(names)

    def pmc_errors(self) -> list[str]:
        out = []
        for spec, pts in zip(self.boundary, self.boundary_points()):
            if spec.pmc is None:
                continue
            arcs = [nm for nm, _ in pts]
            n = spec.pmc.point_count
            if len(arcs) != n:
                out.append(f"boundary {spec.label!r} meets {len(arcs)} arc ends, expected {n}")
                continue
            start = (spec.pmc.basepoint + 1) % n
            label = {k: (start + k) % n for k in range(n)}
            pairs = []
            for nm in set(arcs):
                ks = [label[k] for k, a in enumerate(arcs) if a == nm]
                if len(ks) != 2:
                    out.append(f"arc {nm!r} meets boundary {spec.label!r} {len(ks)} times")
                    continue
                pairs.append(tuple(sorted(ks)))
            if tuple(sorted(pairs)) != spec.pmc.matching:
                out.append(f"boundary {spec.label!r} reads matching {sorted(pairs)} not {list(spec.pmc.matching)}")
        return out

    def boundary_points(self) -> list[list[tuple[str, int]]]:
        """Per declared boundary circle, the arc ends met walking from z."""
        S = self.surface
        comps = S.boundary_components()
        res = []
        for spec in self.boundary:
            comp = comps[self._boundary_edge_comp[spec.z_edge]]
            k0 = [e for e, _ in comp].index(spec.z_edge)
            walk = comp[k0 + 1:] + comp[: k0 + 1]
            pts = []
            for e, s in walk:
                v = S.tail(e, s)
                for nm, info in self.vertex_curves.get(v, {}).items():
                    if info[0] is None or info[1] is None:
                        pts.append((nm, v))
            # the tail of the first edge is the head of z; rotate so z sits last
            pts = pts[1:] + pts[:1] if pts and S.tail(*walk[0]) == S.head(*comp[k0]) else pts
            res.append(pts)
        return res

    def arc_idempotent(self, occupied: Iterable[str], label: str | None = None) -> tuple[int, ...]:
        """Matched-pair indices of the occupied alpha arcs on one boundary circle."""
        specs = [s for s in self.boundary if label is None or s.label == label]
        if not specs or specs[0].pmc is None:
            raise ArgumentError("no pointed matched circle declared")
        spec = specs[0]
        pts = self.boundary_points()[self.boundary.index(spec)]
        n = spec.pmc.point_count
        start = (spec.pmc.basepoint + 1) % n
        occ = set(occupied)
        out = set()
        for k, (nm, _) in enumerate(pts):
            if nm in occ:
                out.add(spec.pmc.pair_index((start + k) % n))
        return tuple(sorted(out))

    # -- intersections and generators
    def intersections(self, c1: str, c2: str) -> list:
        """Crossing vertices of two curves in order along the second; formal points if equal."""
        if c1 == c2:
            return [(c1, "top"), (c1, "bottom")]
        return [v for v in self.curve_vertices[c2] if self.crossings.get(v) is not None and set(self.crossings[v]) == {c1, c2}]

    def region_at_face(self, f: int) -> int:
        return self.region_of_face[f]

    def __repr__(self) -> str:
        return f"HeegaardMultiDiagram(genus {self.genus}, {len(self.alpha)} alpha, families {list(self.beta)}, {self.n_regions} regions)"

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "surface": self.surface.to_dict(),
            "curves": [c.to_dict() for c in self.curves.values()],
            "alpha": list(self.alpha),
            "beta": [[k, list(v)] for k, v in self.beta.items()],
            "poset": [[a, b] for a, b in sorted(self.poset.relation, key=repr)],
            "basepoint": self.basepoint,
            "boundary": [
                {
                    "label": s.label,
                    "z_edge": s.z_edge,
                    "pmc": None if s.pmc is None else {"points": s.pmc.point_count, "matching": [list(p) for p in s.pmc.matching], "basepoint": s.pmc.basepoint},
                }
                for s in self.boundary
            ],
        }

    @classmethod
    def from_dict(cls, d: Mapping, check: bool = True) -> "HeegaardMultiDiagram":
        surface = SurfaceCW.from_dict(d["surface"])
        curves = [Curve(c["name"], tuple(tuple(x) for x in c["edges"]), c.get("closed", True)) for c in d["curves"]]
        beta = {_label(k): v for k, v in d["beta"]}
        poset = FinitePoset(list(beta), [(_label(a), _label(b)) for a, b in d.get("poset", [])]) if "poset" in d else None
        boundary = []
        for b in d.get("boundary", []):
            p = b.get("pmc")
            pmc = None if p is None else PointedMatchedCircle(p["points"], tuple(tuple(x) for x in p["matching"]), p.get("basepoint", -1))
            boundary.append(BoundarySpec(b["label"], b["z_edge"], pmc))
        return cls(
            surface, curves, d["alpha"], beta, d["basepoint"], poset=poset, boundary=boundary, name=d.get("name", ""), check=check
        )


def _label(x):
    return tuple(_label(y) for y in x) if isinstance(x, list) else x


def enumerate_generators(d: HeegaardMultiDiagram, i: Hashable, first: Hashable = ALPHA) -> list[Generator]:
    """All injective matchings of the curves of family i to curves of `first` at crossings.

    Every closed curve of `first` must be used; arcs may stay unoccupied.
    Order is deterministic: second-family curves in declared order, points in
    order along each curve.
    """
    seconds = d.family(i)
    firsts = d.family(first)
    closed_first = {nm for nm in firsts if d.curves[nm].closed}
    options = []
    for b in seconds:
        opts = []
        for a in firsts:
            for p in d.intersections(a, b):
                opts.append((a, b, p))
        options.append(opts)
    out: list[Generator] = []

    def rec(k: int, used: frozenset, chosen: list) -> None:
        if k == len(seconds):
            if closed_first <= used:
                out.append(Generator(first, i, tuple(chosen), frozenset(used - closed_first)))
            return
        for a, b, p in options[k]:
            if a not in used:
                chosen.append((a, b, p))
                rec(k + 1, used | {a}, chosen)
                chosen.pop()

    rec(0, frozenset(), [])
    return out


# ---------------------------------------------------------------------------
# domains
# ---------------------------------------------------------------------------


class DiagramDomain:
    """An integer combination of regions, with optional corner and Reeb chord data.

    families lists the curve families (F_0, F_1, ..., F_n) met in order along
    the boundary, F_0 playing the role of alpha; corners are x^0..x^n with
    x^0 on F_0 and F_1, x^k on F_k and F_{k+1}, and x^n on F_n and F_0.
    """

    def __init__(
        self,
        diagram: HeegaardMultiDiagram,
        multiplicities: Mapping[int, int] | Sequence[int],
        corners: Sequence = (),
        families: Sequence | None = None,
        rho_sets: Sequence[Sequence[tuple[int, int]]] = (),
        pmc: PointedMatchedCircle | None = None,
    ):
        self.diagram = diagram
        R = diagram.n_regions
        if isinstance(multiplicities, Mapping):
            mult = [0] * R
            for r, n in multiplicities.items():
                if not 0 <= r < R:
                    raise ArgumentError(f"unknown region {r}")
                mult[r] = n
        else:
            mult = list(multiplicities)
            if len(mult) != R:
                raise ArgumentError(f"expected {R} region multiplicities, got {len(mult)}")
        self.mult = tuple(int(x) if Fraction(x).denominator == 1 else Fraction(x) for x in mult)
        if self.mult[diagram.z_region] != 0:
            raise ArgumentError(f"domain has multiplicity {self.mult[diagram.z_region]} at the basepoint region")
        self.corners = tuple(corners)
        if families is None:
            families = (ALPHA,) + tuple(diagram.beta)[: max(len(self.corners) - 1, 0)] if self.corners else ()
        self.families = tuple(families)
        if self.corners and len(self.corners) != len(self.families):
            raise ArgumentError(f"{len(self.corners)} corners need {len(self.corners)} families, got {len(self.families)}")
        self.rho_sets = tuple(tuple(tuple(c) for c in s) for s in rho_sets)
        self.pmc = pmc

    @classmethod
    def from_faces(cls, diagram: HeegaardMultiDiagram, faces: Mapping[int, int], **kw) -> "DiagramDomain":
        mult: dict = {}
        for f, n in faces.items():
            r = diagram.region_of_face[f]
            if mult.setdefault(r, n) != n:
                raise ArgumentError(f"faces of region {r} were given different multiplicities")
        return cls(diagram, mult, **kw)

    def with_corners(self, corners: Sequence, families: Sequence, rho_sets=(), pmc=None) -> "DiagramDomain":
        return DiagramDomain(self.diagram, self.mult, corners, families, rho_sets, pmc)

    def _check(self, other: "DiagramDomain") -> None:
        if other.diagram is not self.diagram:
            raise ArgumentError("domains live on different diagrams")

    def __add__(self, other: "DiagramDomain") -> "DiagramDomain":
        self._check(other)
        return DiagramDomain(self.diagram, [a + b for a, b in zip(self.mult, other.mult)])

    def __sub__(self, other: "DiagramDomain") -> "DiagramDomain":
        self._check(other)
        return DiagramDomain(self.diagram, [a - b for a, b in zip(self.mult, other.mult)])

    def __neg__(self) -> "DiagramDomain":
        return DiagramDomain(self.diagram, [-a for a in self.mult])

    def __mul__(self, k: int) -> "DiagramDomain":
        return DiagramDomain(self.diagram, [k * a for a in self.mult])

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        return isinstance(other, DiagramDomain) and other.diagram is self.diagram and other.mult == self.mult

    def __hash__(self) -> int:
        return hash(self.mult)

    def is_zero(self) -> bool:
        return not any(self.mult)

    def is_positive(self) -> bool:
        return all(x >= 0 for x in self.mult)

    def support(self) -> dict[int, int]:
        return {r: n for r, n in enumerate(self.mult) if n}

    def __repr__(self) -> str:
        return f"DiagramDomain({self.support()})"


def zero_domain(d: HeegaardMultiDiagram) -> DiagramDomain:
    return DiagramDomain(d, [0] * d.n_regions)


@dataclass(frozen=True)
class BoundaryChain:
    """A 1-chain on the curves of one family, coefficients along curve orientation."""

    diagram: HeegaardMultiDiagram
    family: Hashable
    coeffs: Mapping[int, int] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "coeffs", {e: c for e, c in self.coeffs.items() if c})

    def __add__(self, other: "BoundaryChain") -> "BoundaryChain":
        if other.family != self.family or other.diagram is not self.diagram:
            raise ArgumentError("chains on different families")
        acc = dict(self.coeffs)
        for e, c in other.coeffs.items():
            acc[e] = acc.get(e, 0) + c
        return BoundaryChain(self.diagram, self.family, acc)

    def __mul__(self, k: int) -> "BoundaryChain":
        return BoundaryChain(self.diagram, self.family, {e: k * c for e, c in self.coeffs.items()})

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        return isinstance(other, BoundaryChain) and self.family == other.family and dict(self.coeffs) == dict(other.coeffs)

    def is_zero(self) -> bool:
        return not self.coeffs

    def curves(self) -> set[str]:
        return {self.diagram.edge_curve[e][0] for e in self.coeffs}

    def coefficient(self, edge) -> int:
        """Coefficient on a signed curve edge (e, s) in the curve's direction."""
        if edge is None:
            return 0
        return self.coeffs.get(edge[0], 0)

    def zero_boundary(self) -> dict[int, int]:
        """The 0-chain: head minus tail of every edge, with multiplicity."""
        S = self.diagram.surface
        acc: dict = {}
        for e, c in self.coeffs.items():
            _, s = self.diagram.edge_curve[e]
            acc[S.head(e, s)] = acc.get(S.head(e, s), 0) + c
            acc[S.tail(e, s)] = acc.get(S.tail(e, s), 0) - c
        return {v: c for v, c in acc.items() if c}


def _edge_boundary(b: DiagramDomain) -> dict[int, int]:
    d = b.diagram
    out = {}
    for e, (left, right) in enumerate(d.surface.sides):
        nl = b.mult[d.region_of_face[left]] if left is not None else 0
        nr = b.mult[d.region_of_face[right]] if right is not None else 0
        if nl != nr:
            out[e] = nl - nr
    return out


def domain_boundary(b: DiagramDomain, family: Hashable) -> BoundaryChain:
    """The part of the boundary of b lying along the curves of one family."""
    d = b.diagram
    names = set(d.family(family))
    coeffs = {}
    for e, c in _edge_boundary(b).items():
        owner = d.edge_curve.get(e)
        if owner is not None and owner[0] in names:
            coeffs[e] = c * owner[1]
    return BoundaryChain(d, family, coeffs)


def euler_measure(b: DiagramDomain) -> Fraction:
    """Sum of n_r (chi(r) - corners(r)/4) over regions."""
    d = b.diagram
    return sum(
        (Fraction(n) * (d.region_chi[r] - Fraction(d.region_corners[r], 4)) for r, n in enumerate(b.mult) if n),
        Fraction(0),
    )


def _point_list(x) -> list:
    if isinstance(x, Generator):
        return list(x.vertices())
    if isinstance(x, int):
        return [x]
    return list(x)


def point_multiplicity(b: DiagramDomain, x) -> Fraction:
    """Sum over the points of x of the average multiplicity of the four quadrants."""
    d = b.diagram
    total = Fraction(0)
    for v in _point_list(x):
        if not isinstance(v, int) or v not in d.quadrants:
            raise ArgumentError(f"point {v!r} is not a crossing of the diagram")
        total += Fraction(sum(b.mult[r] for _, _, r in d.quadrants[v]), 4)
    return total


def jittered_intersection(c1: BoundaryChain, c2: BoundaryChain) -> Fraction:
    """Intersection number of two chains, endpoints resolved by averaging pushoffs."""
    d = c1.diagram
    if c2.diagram is not d:
        raise ArgumentError("chains live on different diagrams")
    if c1.family == c2.family:
        raise ArgumentError("chains on the same curve family are not transverse")
    shared = c1.curves() & c2.curves()
    if shared:
        raise ArgumentError(f"chains share the curves {sorted(shared)}")
    total = Fraction(0)
    cur1, cur2 = c1.curves(), c2.curves()
    for v, (a, b) in d.crossings.items():
        for p, q, sgn in ((a, b, 1), (b, a, -1)):
            if p in cur1 and q in cur2:
                ip = d.vertex_curves[v][p]
                iq = d.vertex_curves[v][q]
                x = Fraction(c1.coefficient(ip[2]) + c1.coefficient(ip[3]), 2)
                y = Fraction(c2.coefficient(iq[2]) + c2.coefficient(iq[3]), 2)
                if x and y:
                    total += sgn * d.crossing_sign(v, a, b) * x * y
    return total


@dataclass(frozen=True)
class ChordInvariants:
    iota: tuple
    linking: dict

    def total_iota(self) -> Fraction:
        return sum(self.iota, Fraction(0))

    def total_linking(self) -> Fraction:
        return sum((v for (i, j), v in self.linking.items() if i < j), Fraction(0))


def _unrolled(chord, pmc: PointedMatchedCircle | None) -> tuple[int, int]:
    a, b = chord
    if pmc is None:
        if a >= b:
            raise ArgumentError(f"chord {chord} runs through the basepoint")
        return a, b
    n = pmc.point_count
    if not (0 <= a < n and 0 <= b < n) or a == b:
        raise ArgumentError(f"chord {chord} is not on the matched circle")
    start = (pmc.basepoint + 1) % n
    ta, tb = (a - start) % n, (b - start) % n
    if ta >= tb:
        raise ArgumentError(f"chord {chord} runs through the basepoint")
    return ta, tb


def _coverage(chord: tuple[int, int], p: int) -> Fraction:
    a, b = chord
    if a < p < b:
        return Fraction(1)
    if p == a or p == b:
        return Fraction(1, 2)
    return Fraction(0)


def linking(r1, r2, pmc: PointedMatchedCircle | None = None) -> Fraction:
    """Multiplicity with which chord r2 covers the boundary of chord r1."""
    a1, b1 = _unrolled(r1, pmc)
    c2 = _unrolled(r2, pmc)
    return _coverage(c2, b1) - _coverage(c2, a1)


def linking_sets(s1, s2, pmc=None) -> Fraction:
    return sum((linking(r1, r2, pmc) for r1 in s1 for r2 in s2), Fraction(0))


def iota(rho: Sequence, pmc: PointedMatchedCircle | None = None) -> Fraction:
    rho = list(rho)
    for r in rho:
        _unrolled(r, pmc)
    val = -Fraction(len(rho), 2)
    for r1, r2 in itertools.combinations(rho, 2):
        val -= abs(linking(r1, r2, pmc))
    return val


def chord_invariants(rho_sets: Sequence[Sequence[tuple[int, int]]], pmc: PointedMatchedCircle | None = None) -> ChordInvariants:
    """iota of each chord set and the linking L of each ordered pair of sets."""
    sets = [list(s) for s in rho_sets]
    iotas = tuple(iota(s, pmc) for s in sets)
    L = {}
    for i, j in itertools.permutations(range(len(sets)), 2):
        L[(i, j)] = linking_sets(sets[i], sets[j], pmc)
    return ChordInvariants(iotas, L)


@dataclass(frozen=True)
class IndexResult:
    ind: Fraction
    expected_dimension: Fraction
    embedded_chi: Fraction
    embedded_ind: Fraction


def asymptotics_errors(b: DiagramDomain) -> list[str]:
    """Mismatches between the boundary of b and its declared corners."""
    d = b.diagram
    if not b.corners:
        return ["domain has no corner data"]
    n = len(b.families) - 1
    pts = []
    for x in b.corners:
        vs = [v for v in _point_list(x) if isinstance(v, int)]
        pts.append(vs)
    out = []
    for k, fam in enumerate(b.families):
        chain = domain_boundary(b, fam)
        got = {v: c for v, c in chain.zero_boundary().items() if not d.surface.is_boundary_vertex(v)}
        want: dict = {}
        plus, minus = (pts[0], pts[n]) if k == 0 else (pts[k % (n + 1)] if k <= n else [], pts[k - 1])
        if k == 0:
            plus, minus = pts[0], pts[n]
        else:
            plus, minus = pts[k] if k < n else pts[n], pts[k - 1]
        for v in plus:
            want[v] = want.get(v, 0) + 1
        for v in minus:
            want[v] = want.get(v, 0) - 1
        want = {v: c for v, c in want.items() if c}
        if got != want:
            out.append(f"boundary along {fam!r} ends at {got}, expected {want}")
    return out


def index(b: DiagramDomain, source_chi: int | None = None) -> IndexResult:
    """Index, expected dimension and embedded Euler characteristic of a polygon class."""
    errs = asymptotics_errors(b)
    if errs:
        raise ArgumentError("; ".join(errs))
    d = b.diagram
    g = d.genus
    n = len(b.families) - 1
    m = len(b.rho_sets)
    e = euler_measure(b)
    nx0 = point_multiplicity(b, b.corners[0])
    nxn = point_multiplicity(b, b.corners[-1])
    chains = [domain_boundary(b, fam) for fam in b.families]
    cross = Fraction(0)
    for j in range(1, n + 1):
        for l in range(1, j):
            if chains[j].is_zero() or chains[l].is_zero():
                continue
            cross += jittered_intersection(chains[j], chains[l])
    ch = chord_invariants(b.rho_sets, b.pmc)
    io, lk = ch.total_iota(), ch.total_linking()
    ind_emb = e + nx0 + nxn - Fraction(n - 1, 2) * g + cross + m + io + lk
    chi_emb = g + e - nx0 - nxn - cross - io - lk
    if source_chi is None:
        ind = ind_emb
    else:
        ind = Fraction(3 - n, 2) * g - source_chi + 2 * e + m
    return IndexResult(ind, ind + n - 2, chi_emb, ind_emb)


def _integer_solve(rows: list[list[int]], rhs: list[int], ncols: int):
    """Integer solutions of rows * n = rhs: a particular solution (or None) and a kernel basis."""
    if not rows:
        return [0] * ncols, [[int(i == j) for j in range(ncols)] for i in range(ncols)]
    A = Matrix(rows)
    S, U, V = smith_normal_decomp(A)
    c = U * Matrix(rhs)
    y = [0] * ncols
    rank = 0
    for i in range(min(S.rows, S.cols)):
        if S[i, i] != 0:
            rank = i + 1
            if c[i] % S[i, i]:
                return None, []
            y[i] = int(c[i] // S[i, i])
    if any(c[i] != 0 for i in range(rank, S.rows)):
        return None, []
    part = [int(x) for x in V * Matrix(y)]
    kernel = [[int(V[r, j]) for r in range(ncols)] for j in range(rank, ncols)]
    return part, kernel


def connecting_domains(d: HeegaardMultiDiagram, corners: Sequence, families: Sequence) -> tuple[DiagramDomain | None, list[DiagramDomain]]:
    """All domains with the given corner asymptotics: one particular class and the periodic lattice.

    The families must not share curves, since the split of the boundary
    among them would then not be determined by the multiplicities.
    """
    fams = list(families)
    if len(corners) != len(fams):
        raise ArgumentError("need one corner per family")
    owner: dict[str, int] = {}
    for k, f in enumerate(fams):
        for nm in d.family(f):
            if nm in owner and owner[nm] != k:
                raise ArgumentError(f"families {fams[owner[nm]]!r} and {f!r} share the curve {nm!r}")
            owner[nm] = k
    n = len(fams) - 1
    pts = [[v for v in _point_list(x)] for x in corners]
    for vs in pts:
        for v in vs:
            if not isinstance(v, int) or v not in d.crossings:
                raise ArgumentError(f"corner point {v!r} is not a crossing")
    R = d.n_regions
    S = d.surface
    rows: list[list[int]] = []
    rhs: list[int] = []
    zrow = [0] * R
    zrow[d.z_region] = 1
    rows.append(zrow)
    rhs.append(0)
    vertex_rows: dict = {}
    for e, (left, right) in enumerate(S.sides):
        if left is None or right is None:
            continue
        o = d.edge_curve.get(e)
        if o is None:
            continue
        nm, s = o
        rl, rr = d.region_of_face[left], d.region_of_face[right]
        if nm not in owner:
            if rl != rr:
                row = [0] * R
                row[rl] += 1
                row[rr] -= 1
                rows.append(row)
                rhs.append(0)
            continue
        k = owner[nm]
        for v, sign in ((S.head(e, s), 1), (S.tail(e, s), -1)):
            if S.is_boundary_vertex(v):
                continue
            row = vertex_rows.setdefault((k, v), [0] * R)
            row[rl] += sign * s
            row[rr] -= sign * s
    for (k, v), row in sorted(vertex_rows.items()):
        plus, minus = (pts[0], pts[n]) if k == 0 else (pts[k], pts[k - 1])
        want = sum(1 for p in plus if p == v) - sum(1 for p in minus if p == v)
        rows.append(row)
        rhs.append(want)
    part, kernel = _integer_solve(rows, rhs, R)
    lattice = [DiagramDomain(d, vec) for vec in kernel]
    if part is None:
        return None, lattice
    return DiagramDomain(d, part, corners, fams), lattice


# ---------------------------------------------------------------------------
# periodic domains and admissibility
# ---------------------------------------------------------------------------


def _nullspace(rows: list[list[Fraction]], ncols: int) -> list[list[Fraction]]:
    if not rows:
        return [[Fraction(int(i == j)) for j in range(ncols)] for i in range(ncols)]
    M = DomainMatrix([[QQ(x.numerator, x.denominator) for x in r] for r in rows], (len(rows), ncols), QQ)
    ns = M.nullspace().to_Matrix()
    return [[Fraction(int(x.p), int(x.q)) for x in ns.row(i)] for i in range(ns.rows)]


def _independent_rows(vecs: list[list[Fraction]]) -> list[list[Fraction]]:
    if not vecs:
        return []
    M = DomainMatrix([[QQ(x.numerator, x.denominator) for x in v] for v in vecs], (len(vecs), len(vecs[0])), QQ)
    rref, pivots = M.rref()
    R = rref.to_Matrix()
    return [[Fraction(int(x.p), int(x.q)) for x in R.row(i)] for i in range(len(pivots))]


def _primitive(v: Sequence[Fraction]) -> tuple[int, ...]:
    den = 1
    for x in v:
        den = den * Fraction(x).denominator // math.gcd(den, Fraction(x).denominator)
    ints = [int(Fraction(x) * den) for x in v]
    g = 0
    for x in ints:
        g = math.gcd(g, x)
    return tuple(x // g for x in ints) if g else tuple(ints)


def periodic_domains(d: HeegaardMultiDiagram, families: Sequence | None = None, mode: str = "weak") -> list[tuple[int, ...]]:
    """A basis of the multi-periodic domains as primitive integer region vectors.

    The boundary must be a combination of whole alpha curves (arcs may end on
    the boundary) and whole circles of the selected beta families, and n_z = 0.
    mode "provincial" also forces zero near every boundary circle; "left"
    (right-provincial domains) forces zero near the boundary labelled "R";
    "right" forces zero near "L".
    """
    fams = list(d.beta) if families is None else list(families)
    allowed: dict[str, int] = {}
    for nm in d.alpha:
        allowed.setdefault(nm, len(allowed))
    for f in fams:
        for nm in d.family(f):
            allowed.setdefault(nm, len(allowed))
    R = d.n_regions
    nvar = R + len(allowed)
    rows: set = set()
    S = d.surface
    for e, (left, right) in enumerate(S.sides):
        if left is None or right is None:
            continue
        rl, rr = d.region_of_face[left], d.region_of_face[right]
        owner = d.edge_curve.get(e)
        if owner is None:
            continue
        nm, s = owner
        row = [0] * nvar
        row[rl] += s
        row[rr] -= s
        if nm in allowed:
            row[R + allowed[nm]] -= 1
        rows.add(tuple(row))
    zero_regions = {d.z_region}
    if mode == "provincial":
        for rs in d.boundary_regions.values():
            zero_regions |= rs
    elif mode == "left":
        zero_regions |= d.boundary_regions.get("R", set())
    elif mode == "right":
        zero_regions |= d.boundary_regions.get("L", set())
    elif mode != "weak":
        raise ArgumentError(f"unknown admissibility mode {mode!r}")
    for r in zero_regions:
        row = [0] * nvar
        row[r] = 1
        rows.add(tuple(row))
    ns = _nullspace([[Fraction(x) for x in r] for r in sorted(rows)], nvar)
    proj = [v[:R] for v in ns if any(v[:R])]
    basis = _independent_rows(proj)
    return [_primitive(v) for v in basis]


def _fm_solve(A: list[list[Fraction]], b: list[Fraction], limit: int = 20000):
    """Solve A x >= b over Q by Fourier-Motzkin; returns a solution, None, or 'abort'."""
    nvar = len(A[0]) if A else 0
    systems = []
    cur = [(list(r), bi) for r, bi in zip(A, b)]
    for j in range(nvar - 1, -1, -1):
        systems.append(cur)
        pos, neg, zer = [], [], []
        for r, bi in cur:
            c = r[j]
            if c > 0:
                pos.append((r, bi))
            elif c < 0:
                neg.append((r, bi))
            else:
                zer.append((r, bi))
        nxt = {}
        for r, bi in zer:
            nxt[_norm_row(r[:j], bi)] = None
        for rp, bp in pos:
            for rn, bn in neg:
                cp, cn = rp[j], -rn[j]
                row = [cn * x + cp * y for x, y in zip(rp[:j], rn[:j])]
                nxt[_norm_row(row, cn * bp + cp * bn)] = None
                if len(nxt) > limit:
                    return "abort"
        cur = [(list(r), bi) for r, bi in nxt]
    if any(bi > 0 for r, bi in cur):
        return None
    x: list[Fraction] = []
    for sysj in reversed(systems):
        j = len(x)
        lo, hi = None, None
        for r, bi in sysj:
            c = r[j]
            rest = bi - sum(r[k] * x[k] for k in range(j))
            if c > 0:
                v = rest / c
                lo = v if lo is None or v > lo else lo
            elif c < 0:
                v = rest / c
                hi = v if hi is None or v < hi else hi
        if lo is not None:
            x.append(lo)
        elif hi is not None:
            x.append(hi)
        else:
            x.append(Fraction(0))
    return x


def _norm_row(r, bi):
    scale = max((abs(v) for v in r), default=Fraction(0))
    if scale == 0:
        return (tuple(Fraction(0) for _ in r), Fraction(bi).__class__(1 if bi > 0 else (-1 if bi < 0 else 0)))
    return (tuple(Fraction(v) / scale for v in r), Fraction(bi) / scale)


@dataclass
class AdmissibilityCertificate:
    admissible: bool
    mode: str
    rank: int
    witness: tuple | None = None
    weights: tuple | None = None
    method: str = "fourier-motzkin"

    def __bool__(self) -> bool:
        return self.admissible

    def __str__(self) -> str:
        verdict = "ADMISSIBLE" if self.admissible else "NOT admissible"
        extra = f", witness {self.witness}" if self.witness is not None else ""
        return f"{verdict} ({self.mode}, periodic rank {self.rank}{extra})"


def _nonneg_periodic(K: list[tuple[int, ...]]):
    """A nonzero nonnegative combination of the basis vectors, or None if there is none."""
    R = len(K[0])
    k = len(K)
    A = [[Fraction(K[i][r]) for i in range(k)] for r in range(R)]
    b = [Fraction(0)] * R
    A.append([sum(A[r][i] for r in range(R)) for i in range(k)])
    b.append(Fraction(1))
    uniq = {}
    for r, bi in zip(A, b):
        uniq[_norm_row(r, bi)] = None
    rows = [list(r) for r, _ in uniq]
    rhs = [bi for _, bi in uniq]
    sol = _fm_solve(rows, rhs)
    if sol == "abort":
        return "abort"
    if sol is None:
        return None
    vec = [sum(sol[i] * K[i][r] for i in range(k)) for r in range(R)]
    return _primitive(vec)


def _lp_nonneg_periodic(K: list[tuple[int, ...]]):
    from scipy.optimize import linprog

    import numpy as np

    M = np.array(K, dtype=float).T
    R, k = M.shape
    A_ub = np.vstack([-M, -M.sum(axis=0, keepdims=True)])
    b_ub = np.concatenate([np.zeros(R), [-1.0]])
    res = linprog(np.zeros(k), A_ub=A_ub, b_ub=b_ub, bounds=[(None, None)] * k, method="highs")
    if res.status == 2:
        return None
    if res.status != 0:
        raise DiagramError("linear program for admissibility failed")
    c = [Fraction(x).limit_denominator(10**6) for x in res.x]
    vec = [sum(c[i] * K[i][r] for i in range(k)) for r in range(R)]
    if all(v >= 0 for v in vec) and any(vec):
        return _primitive(vec)
    raise DiagramError("could not certify a nonnegative periodic domain exactly")


def _positive_weights(K: list[tuple[int, ...]]):
    """Strictly positive region weights orthogonal to every periodic domain, verified exactly."""
    from scipy.optimize import linprog

    import numpy as np

    R = len(K[0])
    N = _nullspace([[Fraction(x) for x in row] for row in K], R)
    if not N:
        return None
    B = np.array([[float(x) for x in v] for v in N]).T
    res = linprog(np.zeros(B.shape[1]), A_ub=-B, b_ub=-np.ones(R), bounds=[(None, None)] * B.shape[1], method="highs")
    if res.status != 0:
        return None
    u = [Fraction(x).limit_denominator(10**6) for x in res.x]
    w = [sum(u[i] * N[i][r] for i in range(len(N))) for r in range(R)]
    if all(x > 0 for x in w):
        return _primitive(w)
    return None


def _in_span(K: list[tuple[int, ...]], v: Sequence[int]) -> bool:
    rows = [[Fraction(x) for x in r] for r in K]
    return len(_independent_rows(rows + [[Fraction(x) for x in v]])) == len(_independent_rows(rows))


def _bounded_search(K: list[tuple[int, ...]], bound: int = 8):
    """Nonnegative nonzero combinations of the basis with coefficients in [-bound, bound]."""
    for coeffs in itertools.product(range(-bound, bound + 1), repeat=len(K)):
        if not any(coeffs):
            continue
        v = [sum(c * row[r] for c, row in zip(coeffs, K)) for r in range(len(K[0]))]
        if all(x >= 0 for x in v) and any(v):
            return tuple(v)
    return None


def admissibility(d: HeegaardMultiDiagram, mode: str = "weak", families: Sequence | None = None) -> AdmissibilityCertificate:
    """Decide whether every nonzero (restricted) multi-periodic domain has mixed signs.

    Returns a certificate carrying either a nonnegative periodic domain
    (not admissible) or, when available, strictly positive region weights
    orthogonal to all periodic domains (admissible).
    """
    K = periodic_domains(d, families, mode)
    if not K:
        return AdmissibilityCertificate(True, mode, 0, method="no periodic domains")
    method = "fourier-motzkin"
    wit = _nonneg_periodic(K)
    if wit == "abort":
        method = "linear programming, verified exactly"
        wit = _lp_nonneg_periodic(K)
    if wit is not None:
        if any(x < 0 for x in wit) or not _in_span(K, wit):
            raise DiagramError("admissibility witness failed exact verification")
        return AdmissibilityCertificate(False, mode, len(K), witness=wit, method=method)
    if len(K) <= 3:
        found = _bounded_search(K)
        if found is not None:
            raise DiagramError(f"bounded search found the nonnegative periodic domain {found}")
        method += " + bounded search"
    return AdmissibilityCertificate(True, mode, len(K), weights=_positive_weights(K), method=method)


def intersection_matrix(d: HeegaardMultiDiagram, family: Hashable, alpha: Sequence[str] | None = None) -> list[list[int]]:
    """Signed intersection numbers alpha_i . beta_j for one beta family."""
    al = d.alpha if alpha is None else tuple(alpha)
    be = d.family(family)
    M = [[0] * len(be) for _ in al]
    for i, a in enumerate(al):
        for j, b in enumerate(be):
            if a == b:
                continue
            for v in d.intersections(a, b):
                M[i][j] += d.crossing_sign(v, a, b)
    return M


def h1_order(d: HeegaardMultiDiagram, family: Hashable) -> int:
    """|det| of the signed alpha-beta intersection matrix (0 means infinite H_1)."""
    al, be = d.alpha, d.family(family)
    if len(al) != len(be) or any(not d.curves[a].closed for a in al):
        raise ArgumentError("h1_order needs a closed diagram with matching curve counts")
    M = intersection_matrix(d, family)
    return abs(int(Matrix(M).det())) if M else 1


def h1_rank(d: HeegaardMultiDiagram, family: Hashable) -> int:
    """Rank of H_1 of the closed three-manifold: genus minus the rank of the intersection matrix."""
    M = intersection_matrix(d, family)
    return len(d.alpha) - (Matrix(M).rank() if M else 0)


def to_dot(d: HeegaardMultiDiagram) -> str:
    """Region adjacency graph, edges labelled by the separating curve."""
    lines = ["graph diagram {"]
    for r in range(d.n_regions):
        tag = " z" if r == d.z_region else ""
        lines.append(f'  r{r} [label="r{r}{tag} chi={d.region_chi[r]} c={d.region_corners[r]}"];')
    seen = set()
    for e, (a, b) in enumerate(d.surface.sides):
        if a is None or b is None or e not in d.edge_curve:
            continue
        ra, rb = sorted((d.region_of_face[a], d.region_of_face[b]))
        key = (ra, rb, d.edge_curve[e][0])
        if key not in seen:
            seen.add(key)
            lines.append(f'  r{ra} -- r{rb} [label="{key[2]}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# fixtures
# ---------------------------------------------------------------------------


def _torus(w: int, h: int) -> GridSurface:
    gb = GridBuilder(w, h)
    gb.glue_torus()
    return gb.build()


def _most_corners_face(d_builder, *args, **kw) -> int:
    d = d_builder(*args, basepoint=0, check=False, **kw)
    r = max(range(d.n_regions), key=lambda r: (d.region_corners[r], -r))
    return d.region_faces[r][0]


def parallel_torus() -> HeegaardMultiDiagram:
    """Torus with alpha and beta parallel: the annulus between them is periodic and positive."""
    S = _torus(4, 4)
    a = Curve("a", S.path(polyline((0, 1), (4, 1))))
    b = Curve("b", S.path(polyline((0, 3), (4, 3))))
    return HeegaardMultiDiagram(S, [a, b], ["a"], {"beta": ["b"]}, S.face((0, 0)), name="parallel torus")


def finger_torus() -> HeegaardMultiDiagram:
    """Parallel alpha and beta after a finger move: two generators and a periodic domain."""
    S = _torus(8, 8)
    a = Curve("a", S.path(polyline((0, 2), (8, 2))))
    b = Curve("b", S.path(polyline((0, 5), (3, 5), (3, 1), (5, 1), (5, 5), (8, 5))))
    return HeegaardMultiDiagram(S, [a, b], ["a"], {"beta": ["b"]}, S.face((7, 7)), name="finger torus")


def three_point_torus() -> HeegaardMultiDiagram:
    """Genus one, alpha horizontal and beta zigzagging through it three times."""
    S = _torus(6, 6)
    a = Curve("a", S.path(polyline((0, 3), (6, 3))))
    b = Curve("b", S.path(polyline((1, 0), (1, 4), (2, 4), (2, 2), (3, 2), (3, 6)) + polyline((3, 0), (1, 0))))
    return HeegaardMultiDiagram(S, [a, b], ["a"], {"beta": ["b"]}, S.face((5, 5)), name="three point torus")


def torus_triple(basepoint: int | None = None, check: bool = True) -> HeegaardMultiDiagram:
    """Three circles of slopes 0, 1 and infinity on a torus, pairwise meeting once."""
    S = _torus(8, 8)
    b0 = Curve("b0", S.path(polyline((0, 1), (8, 1))))
    binf = Curve("binf", S.path(polyline((1, 0), (1, 8))))
    b1 = Curve("b1", S.path(polyline((0, 0), (2, 0), (2, 2), (4, 2), (4, 4), (6, 4), (6, 6), (8, 6), (8, 8))))
    poset = FinitePoset.chain([0, 1, "inf"])
    fams = {0: ["b0"], 1: ["b1"], "inf": ["binf"]}
    if basepoint is None:
        probe = HeegaardMultiDiagram(S, [b0, b1, binf], [], fams, 0, poset=poset, check=False)
        r = max(range(probe.n_regions), key=lambda r: (probe.region_corners[r], -r))
        basepoint = probe.region_faces[r][0]
    return HeegaardMultiDiagram(S, [b0, b1, binf], [], fams, basepoint, poset=poset, name="torus triple", check=check)


def close_approximation() -> HeegaardMultiDiagram:
    """Torus with alpha, beta and a pushoff beta' that jogs across beta twice.

    The square [4,5] x [4,6] is the small triangle with corners on alpha-beta',
    beta'-beta and beta-alpha; the rectangle [3,4] x [6,12] is a bigon
    between beta' and beta.
    """
    S = _torus(16, 16)
    a = Curve("a", S.path(polyline((0, 4), (16, 4))))
    b = Curve("b", S.path(polyline((4, 0), (4, 16))))
    bp = Curve("bp", S.path(polyline((5, 0), (5, 6), (3, 6), (3, 12), (5, 12), (5, 16))))
    poset = FinitePoset.chain(["beta_prime", "beta"])
    return HeegaardMultiDiagram(
        S, [a, b, bp], ["a"], {"beta_prime": ["bp"], "beta": ["b"]}, S.face((10, 10)), poset=poset, name="close approximation"
    )


def bordered_torus() -> HeegaardMultiDiagram:
    """A genus one bordered diagram: two alpha arcs through a square hole and one beta circle.

    beta meets a1 once and a2 twice, giving three generators.
    """
    gb = GridBuilder(8, 8)
    gb.glue_torus()
    gb.remove_block(3, 3, 5, 5)
    S = gb.build()
    a1 = Curve("a1", S.path(polyline((5, 4), (8, 4)) + polyline((0, 4), (3, 4)), closed=False), closed=False)
    a2 = Curve("a2", S.path(polyline((4, 5), (4, 8)) + polyline((4, 0), (4, 3)), closed=False), closed=False)
    b = Curve("b", S.path(polyline((1, 0), (1, 2), (6, 2), (6, 8)) + polyline((6, 0), (1, 0))))
    z_edge = S.edge((3, 3), (4, 3))[0]
    spec = BoundarySpec("L", z_edge, PointedMatchedCircle(4, ((0, 2), (1, 3))))
    base = S.sides[z_edge][0] if S.sides[z_edge][0] is not None else S.sides[z_edge][1]
    return HeegaardMultiDiagram(S, [a1, a2, b], ["a1", "a2"], {"beta": ["b"]}, base, boundary=[spec], name="bordered torus")


def grid_region(d: HeegaardMultiDiagram, square) -> int:
    """Region containing a unit square of a grid-built diagram."""
    return d.region_of_face[d.surface.face(square)]
