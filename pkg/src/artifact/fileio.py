"""JSON file format for algebras, modules, filtered complexes, diagrams and braids.

Every file is an object {"kind": ..., "version": ..., "payload": ...}.
Generator and poset names may be strings, integers or nested tuples; tuples
are written as JSON lists and read back as tuples. Tables are written in a
fixed sorted order so that equal objects serialize to identical bytes.
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Hashable, Mapping

from .algebra import DgAlgebraPresentation, torus_algebra, trivial_algebra
from .errors import ArtifactError, ParseError
from .f2chain import F2Complex, F2Matrix
from .filtration import FilteredComplex, FinitePoset
from .heegaard import HeegaardMultiDiagram
from .platcover import PlatPresentation
from .structures import (
    AInfModule,
    AInfMorphism,
    DAStructure,
    DDStructure,
    FilteredAInfModule,
    FilteredTypeD,
    TypeDMorphism,
    TypeDStructure,
)
from .triangle import LEVELS, SurgeryTriangleFixture

FORMAT_VERSION = 1
KINDS = ("algebra", "module", "filtered-complex", "diagram", "braid")
MODULE_SPECIES = ("typeD", "ainf", "DA", "DD", "filtered-typeD", "filtered-ainf", "surgery-triangle")
FIXTURE_ENV = "ARTIFACT_FIXTURE_DIR"
TRIANGLE_MAPS = ("f_inf_m1", "f_m1_0", "f_inf_0", "theta")


# ---------------------------------------------------------------------------
# names and small helpers
# ---------------------------------------------------------------------------


def enc(name: Hashable) -> Any:
    """JSON form of a generator or poset name."""
    if isinstance(name, tuple):
        return [enc(x) for x in name]
    if name is None or isinstance(name, (str, int)):
        return name
    raise TypeError(f"cannot serialize name {name!r}")


def dec(obj: Any) -> Hashable:
    if isinstance(obj, list):
        return tuple(dec(x) for x in obj)
    return obj


def _key(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True)


def _sorted(rows: list) -> list:
    return sorted(rows, key=_key)


def _get(d: Any, key: str, loc: str) -> Any:
    if not isinstance(d, Mapping):
        raise ParseError("expected an object", loc)
    if key not in d:
        raise ParseError(f"missing field {key!r}", loc)
    return d[key]


def _list(v: Any, loc: str) -> list:
    if not isinstance(v, list):
        raise ParseError("expected a list", loc)
    return v


def _guard(loc: str, fn: Callable, *args):
    """Run a decoder step and turn malformed shapes into a ParseError at ``loc``."""
    try:
        return fn(*args)
    except ArtifactError:
        raise
    except (KeyError, TypeError, IndexError, ValueError) as exc:
        raise ParseError(f"malformed entry ({exc})", loc) from None


# ---------------------------------------------------------------------------
# algebras and posets
# ---------------------------------------------------------------------------

BUILTIN_ALGEBRAS = {"torus": torus_algebra, "trivial": trivial_algebra}


def algebra_payload(A: DgAlgebraPresentation) -> dict:
    return A.to_dict()


def algebra_from_payload(d: Any, loc: str = "algebra") -> DgAlgebraPresentation:
    if isinstance(d, Mapping) and "builtin" in d:
        name = d["builtin"]
        if name not in BUILTIN_ALGEBRAS:
            raise ParseError(f"unknown builtin algebra {name!r}", loc)
        A = BUILTIN_ALGEBRAS[name]()
        return A.rename(d["suffix"]) if d.get("suffix") else A
    _get(d, "idempotents", loc)
    _get(d, "basis", loc)
    return _guard(loc, DgAlgebraPresentation.from_dict, d)


def poset_payload(p: FinitePoset) -> dict:
    return {
        "elements": [enc(e) for e in p.elements],
        "relation": _sorted([[enc(a), enc(b)] for a, b in p.relation]),
    }


def poset_from_payload(d: Any, loc: str = "poset") -> FinitePoset:
    els = [dec(e) for e in _list(_get(d, "elements", loc), loc + ".elements")]
    rows = _list(d.get("relation", []), loc + ".relation")
    rel = _guard(loc + ".relation", lambda: [tuple(dec(x) for x in r) for r in rows])
    return _guard(loc, FinitePoset, els, rel)


# ---------------------------------------------------------------------------
# modules
# ---------------------------------------------------------------------------


def _typeD_body(x: TypeDStructure) -> dict:
    return {
        "name": x.name,
        "generators": [[enc(g), i] for g, i in x.generators.items()],
        "delta": _sorted([[enc(g), _sorted([[a, enc(y)] for a, y in t])] for g, t in x.delta.items() if t]),
    }


def _typeD_from(body: Any, A: DgAlgebraPresentation, loc: str) -> TypeDStructure:
    rows = _list(_get(body, "generators", loc), loc + ".generators")
    gens = _guard(loc + ".generators", lambda: [(dec(g), i) for g, i in rows])
    drows = _list(body.get("delta", []), loc + ".delta")
    delta = _guard(loc + ".delta", lambda: {dec(g): [(a, dec(y)) for a, y in ts] for g, ts in drows})
    return _guard(loc, lambda: TypeDStructure(A, gens, delta, check=False, name=body.get("name", "")))


def _ainf_body(m: AInfModule) -> dict:
    return {
        "name": m.name,
        "generators": [[enc(g), i] for g, i in m.generators.items()],
        "bounded": m.bounded,
        "arity_bound": m.arity_bound,
        "actions": _sorted([[enc(x), list(seq), _sorted([enc(y) for y in ys])] for (x, seq), ys in m.actions.items()]),
    }


def _ainf_from(body: Any, A: DgAlgebraPresentation, loc: str) -> AInfModule:
    rows = _list(_get(body, "generators", loc), loc + ".generators")
    gens = _guard(loc + ".generators", lambda: [(dec(g), i) for g, i in rows])
    arows = _list(body.get("actions", []), loc + ".actions")
    acts = _guard(loc + ".actions", lambda: {(dec(x), tuple(seq)): [dec(y) for y in ys] for x, seq, ys in arows})
    return _guard(
        loc,
        lambda: AInfModule(
            A,
            gens,
            acts,
            bounded=body.get("bounded", True),
            arity_bound=body.get("arity_bound"),
            check=False,
            name=body.get("name", ""),
        ),
    )


def _typeD_table(table: Mapping) -> list:
    return _sorted([[enc(x), _sorted([[a, enc(y)] for a, y in ts])] for x, ts in table.items() if ts])


def _typeD_table_from(rows: Any, loc: str) -> dict:
    return _guard(loc, lambda: {dec(x): [(a, dec(y)) for a, y in ts] for x, ts in _list(rows, loc)})


def _ainf_table(table: Mapping) -> list:
    return _sorted([[enc(x), list(seq), _sorted([enc(y) for y in ys])] for (x, seq), ys in table.items() if ys])


def _ainf_table_from(rows: Any, loc: str) -> dict:
    return _guard(loc, lambda: {(dec(x), tuple(seq)): [dec(y) for y in ys] for x, seq, ys in _list(rows, loc)})


def module_payload(obj) -> dict:
    if isinstance(obj, TypeDStructure):
        return {"species": "typeD", "algebra": algebra_payload(obj.algebra), **_typeD_body(obj)}
    if isinstance(obj, AInfModule):
        return {"species": "ainf", "algebra": algebra_payload(obj.algebra), **_ainf_body(obj)}
    if isinstance(obj, DAStructure):
        return {
            "species": "DA",
            "name": obj.name,
            "left": algebra_payload(obj.left),
            "right": algebra_payload(obj.right),
            "generators": [[enc(g), list(v)] for g, v in obj.generators.items()],
            "bounded": obj.bounded,
            "arity_bound": obj.arity_bound,
            "delta": _sorted(
                [[enc(x), list(seq), _sorted([[a, enc(y)] for a, y in ts])] for (x, seq), ts in obj.delta.items()]
            ),
        }
    if isinstance(obj, DDStructure):
        return {
            "species": "DD",
            "name": obj.name,
            "left": algebra_payload(obj.left),
            "right": algebra_payload(obj.right),
            "generators": [[enc(g), list(v)] for g, v in obj.generators.items()],
            "delta": _sorted([[enc(x), _sorted([[a, enc(y), b] for a, y, b in ts])] for x, ts in obj.delta.items() if ts]),
        }
    if isinstance(obj, FilteredTypeD):
        return {
            "species": "filtered-typeD",
            "algebra": algebra_payload(obj.algebra),
            "poset": poset_payload(obj.poset),
            "parts": [[enc(e), _typeD_body(obj.parts[e])] for e in obj.poset.elements],
            "connectors": _sorted([[enc(i), enc(j), _typeD_table(h.table)] for (i, j), h in obj.connectors.items()]),
        }
    if isinstance(obj, FilteredAInfModule):
        return {
            "species": "filtered-ainf",
            "algebra": algebra_payload(obj.algebra),
            "poset": poset_payload(obj.poset),
            "parts": [[enc(e), _ainf_body(obj.parts[e])] for e in obj.poset.elements],
            "connectors": _sorted([[enc(i), enc(j), _ainf_table(f.table)] for (i, j), f in obj.connectors.items()]),
        }
    if isinstance(obj, SurgeryTriangleFixture):
        maps = [obj.f_inf_m1, obj.f_m1_0, obj.f_inf_0, obj.theta]
        return {
            "species": "surgery-triangle",
            "algebra": algebra_payload(obj.algebra),
            "parts": [[enc(e), _typeD_body(obj.parts[e])] for e in LEVELS],
            "maps": [[k, _typeD_table(f.table)] for k, f in zip(TRIANGLE_MAPS, maps)],
        }
    raise TypeError(f"no module format for {type(obj).__name__}")


def module_from_payload(d: Any, loc: str = "payload"):
    species = _get(d, "species", loc)
    if species not in MODULE_SPECIES:
        raise ParseError(f"unknown module species {species!r}", loc + ".species")
    if species in ("DA", "DD"):
        A = algebra_from_payload(_get(d, "left", loc), loc + ".left")
        B = algebra_from_payload(_get(d, "right", loc), loc + ".right")
        gens = _guard(loc, lambda: [(dec(g), tuple(v)) for g, v in _list(d["generators"], loc + ".generators")])
        if species == "DD":
            delta = _guard(
                loc + ".delta",
                lambda: {dec(x): [(a, dec(y), b) for a, y, b in ts] for x, ts in _list(d.get("delta", []), loc + ".delta")},
            )
            return DDStructure(A, B, gens, delta, check=False, name=d.get("name", ""))
        delta = _guard(
            loc + ".delta",
            lambda: {
                (dec(x), tuple(seq)): [(a, dec(y)) for a, y in ts] for x, seq, ts in _list(d.get("delta", []), loc + ".delta")
            },
        )
        return DAStructure(
            A, B, gens, delta, bounded=d.get("bounded", True), arity_bound=d.get("arity_bound"), check=False, name=d.get("name", "")
        )
    A = algebra_from_payload(_get(d, "algebra", loc), loc + ".algebra")
    if species == "typeD":
        return _typeD_from(d, A, loc)
    if species == "ainf":
        return _ainf_from(d, A, loc)
    if species == "surgery-triangle":
        parts = {}
        for n, row in enumerate(_list(_get(d, "parts", loc), loc + ".parts")):
            e, body = _guard(f"{loc}.parts[{n}]", lambda r: (dec(r[0]), r[1]), row)
            parts[e] = _typeD_from(body, A, f"{loc}.parts[{n}]")
        if set(parts) != set(LEVELS):
            raise ParseError(f"expected parts at levels {list(LEVELS)}", loc + ".parts")
        maps = dict(_guard(loc + ".maps", lambda: [(k, v) for k, v in _list(d["maps"], loc + ".maps")]))
        ends = {
            "f_inf_m1": (LEVELS[0], LEVELS[1]),
            "f_m1_0": (LEVELS[1], LEVELS[2]),
            "f_inf_0": (LEVELS[0], LEVELS[2]),
            "theta": (LEVELS[2], LEVELS[0]),
        }
        morphs = []
        for k in TRIANGLE_MAPS:
            if k not in maps:
                raise ParseError(f"missing map {k!r}", loc + ".maps")
            s, t = ends[k]
            morphs.append(TypeDMorphism(parts[s], parts[t], _typeD_table_from(maps[k], f"{loc}.maps.{k}")))
        return SurgeryTriangleFixture(A, parts[LEVELS[0]], parts[LEVELS[1]], parts[LEVELS[2]], *morphs)
    poset = poset_from_payload(_get(d, "poset", loc), loc + ".poset")
    build = _typeD_from if species == "filtered-typeD" else _ainf_from
    parts = {}
    for n, row in enumerate(_list(_get(d, "parts", loc), loc + ".parts")):
        e, body = _guard(f"{loc}.parts[{n}]", lambda r: (dec(r[0]), r[1]), row)
        parts[e] = build(body, A, f"{loc}.parts[{n}]")
    missing = [e for e in poset.elements if e not in parts]
    if missing:
        raise ParseError(f"no part at poset element {missing[0]!r}", loc + ".parts")
    conns = {}
    for n, row in enumerate(_list(d.get("connectors", []), loc + ".connectors")):
        cloc = f"{loc}.connectors[{n}]"
        i, j, rows = _guard(cloc, lambda r: (dec(r[0]), dec(r[1]), r[2]), row)
        if i not in parts or j not in parts:
            raise ParseError(f"connector between unknown levels {i!r}, {j!r}", cloc)
        if species == "filtered-typeD":
            conns[(i, j)] = TypeDMorphism(parts[i], parts[j], _typeD_table_from(rows, cloc))
        else:
            conns[(i, j)] = AInfMorphism(parts[i], parts[j], _ainf_table_from(rows, cloc))
    cls = FilteredTypeD if species == "filtered-typeD" else FilteredAInfModule
    return cls(poset, parts, conns, check=False)


# ---------------------------------------------------------------------------
# filtered complexes
# ---------------------------------------------------------------------------


def _complex_body(c: F2Complex) -> dict:
    return {
        "generators": [enc(g) for g in c.generators],
        "gradings": None if c.gradings is None else list(c.gradings),
        "differential": sorted([r, c_] for r, c_ in c.differential.entries),
    }


def _complex_from(body: Any, loc: str) -> F2Complex:
    gens = [dec(g) for g in _list(_get(body, "generators", loc), loc + ".generators")]
    n = len(gens)
    ents = _guard(loc + ".differential", lambda: [(int(r), int(c)) for r, c in body.get("differential", [])])
    for r, c in ents:
        if not (0 <= r < n and 0 <= c < n):
            raise ParseError(f"entry ({r}, {c}) outside a {n} x {n} differential", loc + ".differential")
    return F2Complex(gens, F2Matrix(n, n, ents), body.get("gradings"), check=False)


def filtered_payload(fc: FilteredComplex) -> dict:
    return {
        "poset": poset_payload(fc.poset),
        "parts": [[enc(e), _complex_body(fc.parts[e])] for e in fc.poset.elements],
        "connectors": _sorted(
            [[enc(i), enc(j), sorted([r, c] for r, c in m.entries)] for (i, j), m in fc.connectors.items()]
        ),
    }


def filtered_from_payload(d: Any, loc: str = "payload") -> FilteredComplex:
    poset = poset_from_payload(_get(d, "poset", loc), loc + ".poset")
    parts = {}
    for n, row in enumerate(_list(_get(d, "parts", loc), loc + ".parts")):
        e, body = _guard(f"{loc}.parts[{n}]", lambda r: (dec(r[0]), r[1]), row)
        if e not in poset:
            raise ParseError(f"part at unknown poset element {e!r}", f"{loc}.parts[{n}]")
        parts[e] = _complex_from(body, f"{loc}.parts[{n}]")
    conns = {}
    for n, row in enumerate(_list(d.get("connectors", []), loc + ".connectors")):
        cloc = f"{loc}.connectors[{n}]"
        i, j, ents = _guard(cloc, lambda r: (dec(r[0]), dec(r[1]), [tuple(x) for x in r[2]]), row)
        if i not in poset or j not in poset:
            raise ParseError(f"connector between unknown levels {i!r}, {j!r}", cloc)
        rows = len(parts.get(j, ())) if j in parts else 0
        cols = len(parts.get(i, ())) if i in parts else 0
        for r, c in ents:
            if not (0 <= r < rows and 0 <= c < cols):
                raise ParseError(f"entry ({r}, {c}) outside a {rows} x {cols} connector", cloc)
        conns[(i, j)] = F2Matrix(rows, cols, ents)
    return FilteredComplex(poset, parts, conns)


def complex_as_filtered(c: F2Complex, level: Hashable = "pt") -> FilteredComplex:
    """A plain complex as a one-level filtered complex."""
    return FilteredComplex(FinitePoset([level], []), {level: c})


# ---------------------------------------------------------------------------
# the file wrapper
# ---------------------------------------------------------------------------


@dataclass
class ArtifactFile:
    kind: str
    payload: dict
    version: int = FORMAT_VERSION

    def to_json(self) -> str:
        doc = {"kind": self.kind, "version": self.version, "payload": self.payload}
        return json.dumps(doc, indent=1, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "ArtifactFile":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(exc.msg, f"line {exc.lineno} column {exc.colno}") from None
        kind = _get(doc, "kind", "top level")
        if kind not in KINDS:
            raise ParseError(f"unknown kind {kind!r}", "kind")
        version = doc.get("version", FORMAT_VERSION)
        if version != FORMAT_VERSION:
            raise ParseError(f"unsupported version {version!r}", "version")
        return cls(kind, _get(doc, "payload", "top level"), version)

    @classmethod
    def wrap(cls, obj) -> "ArtifactFile":
        if isinstance(obj, DgAlgebraPresentation):
            return cls("algebra", algebra_payload(obj))
        if isinstance(obj, FilteredComplex):
            return cls("filtered-complex", filtered_payload(obj))
        if isinstance(obj, F2Complex):
            return cls("filtered-complex", filtered_payload(complex_as_filtered(obj)))
        if isinstance(obj, HeegaardMultiDiagram):
            return cls("diagram", obj.to_dict())
        if isinstance(obj, PlatPresentation):
            return cls("braid", obj.to_dict())
        return cls("module", module_payload(obj))

    @property
    def species(self) -> str:
        if self.kind == "module":
            return self.payload.get("species", "?") if isinstance(self.payload, Mapping) else "?"
        return self.kind

    def build(self):
        """The library object described by this file."""
        p = self.payload
        if self.kind == "algebra":
            return algebra_from_payload(p, "payload")
        if self.kind == "module":
            return module_from_payload(p)
        if self.kind == "filtered-complex":
            return filtered_from_payload(p)
        if self.kind == "diagram":
            for k in ("surface", "curves", "alpha", "beta", "basepoint"):
                _get(p, k, "payload")
            return _guard("payload", HeegaardMultiDiagram.from_dict, p)
        if self.kind == "braid":
            n = _get(p, "strand_count", "payload")
            w = _list(_get(p, "word", "payload"), "payload.word")
            return PlatPresentation(int(n), tuple(int(x) for x in w), p.get("forbid", "top"))
        raise ParseError(f"unknown kind {self.kind!r}", "kind")


def dumps(obj) -> str:
    return ArtifactFile.wrap(obj).to_json()


def loads(text: str):
    return ArtifactFile.from_json(text).build()


def read_file(path: str | os.PathLike) -> ArtifactFile:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(str(exc.strerror or exc), str(path)) from None
    return ArtifactFile.from_json(text)


def write_file(path: str | os.PathLike, obj) -> None:
    Path(path).write_text(dumps(obj))


# ---------------------------------------------------------------------------
# shipped fixtures
# ---------------------------------------------------------------------------


def fixture_dir() -> Path:
    """Directory holding the fixture files; ARTIFACT_FIXTURE_DIR overrides the shipped one."""
    env = os.environ.get(FIXTURE_ENV)
    if env:
        return Path(env)
    return Path(__file__).parent / "fixtures"


def fixture_objects() -> dict[str, Any]:
    """Every object shipped as a fixture file, keyed by file stem."""
    from .platcover import corpus
    from .structures import box_tensor_DD, dd_identity, regular_module
    from .triangle import build_fixture, probe_modules, triangle_filtered_complex
    from . import heegaard

    A = torus_algebra()
    fx = build_fixture(A)
    out: dict[str, Any] = {
        "torus_algebra": A,
        "surgery_triangle": fx,
        "triangle_filtered_typeD": fx.filtered(),
        "dd_identity_torus": dd_identity(A),
        "regular_iota0": regular_module(A, "iota0"),
        "dd_box_regular_iota0": box_tensor_DD(regular_module(A, "iota0"), dd_identity(A)),
        "triangle_box_T1": triangle_filtered_complex(),
        "empty_module": AInfModule(A, {}, name="empty"),
        "parallel_torus": heegaard.parallel_torus(),
        "three_point_torus": heegaard.three_point_torus(),
        "bordered_torus": heegaard.bordered_torus(),
    }
    for k, m in probe_modules(A).items():
        out[f"module_{k}"] = m
    for k, p in corpus().items():
        out[f"braid_{k}"] = p
    return out


def write_fixtures(directory: str | os.PathLike | None = None) -> list[Path]:
    d = Path(directory) if directory is not None else fixture_dir()
    d.mkdir(parents=True, exist_ok=True)
    paths = []
    for stem, obj in fixture_objects().items():
        path = d / f"{stem}.json"
        write_file(path, obj)
        paths.append(path)
    return paths


def load_fixture(stem: str):
    path = fixture_dir() / f"{stem}.json"
    if not path.exists():
        raise FileNotFoundError(f"no fixture {stem!r} in {path.parent}")
    return read_file(path).build()
