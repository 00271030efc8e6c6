"""Command line interface.

Exit codes: 0 success, 1 verification failed, 2 parse error, 3 boundedness
error, 4 input-convention error.
"""
from __future__ import annotations

import functools
import json
import sys
from pathlib import Path

import click

from . import fileio
from .algebra import DgAlgebraPresentation, validate_algebra
from .errors import (
    ArgumentError,
    BoundednessError,
    ConventionError,
    CorrespondenceError,
    DiagramError,
    ParseError,
    StructureError,
)
from .f2chain import F2Complex, total_homology_rank
from .filtration import FilteredComplex, FinitePoset, cube_rank, spectral_sequence, total_complex, validate_filtered
from .heegaard import HeegaardMultiDiagram, admissibility, to_dot
from .platcover import (
    PlatPresentation,
    build_cover_diagram,
    complete_resolutions,
    destabilization_count_check,
    determinant,
    generator_correspondence,
    is_connected,
    kauffman_states,
)
from .structures import (
    AInfModule,
    DAStructure,
    DDStructure,
    FilteredAInfModule,
    FilteredTypeD,
    TypeDStructure,
    box_tensor,
    box_tensor_DD,
    check_DA,
    check_DD,
    check_module,
    check_typeD,
    filtered_box_tensor,
)
from .triangle import SurgeryTriangleFixture, fixture_checks, verify_all

EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_BOUNDED, EXIT_CONVENTION = 0, 1, 2, 3, 4


def _exits(fn):
    """Map library errors to exit codes."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except ParseError as exc:
            click.echo(f"parse error: {exc}", err=True)
            sys.exit(EXIT_PARSE)
        except BoundednessError as exc:
            click.echo(f"boundedness error: {exc}", err=True)
            sys.exit(EXIT_BOUNDED)
        except ConventionError as exc:
            click.echo(f"input convention error: {exc}", err=True)
            sys.exit(EXIT_CONVENTION)
        except ArgumentError as exc:
            click.echo(f"parse error: {exc}", err=True)
            sys.exit(EXIT_PARSE)

    return wrapper


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        click.echo(text, nl=not text.endswith("\n"))


@click.group()
@click.version_option(package_name="artifact")
def main() -> None:
    """Filtered bordered structures, surgery triangle and plat-closure diagrams over F2."""


# ---------------------------------------------------------------------------
# check
# ---------------------------------------------------------------------------

SPECIES = ("auto", "algebra", "filtered-complex", "diagram", "braid") + fileio.MODULE_SPECIES


def _structure_problems(obj) -> tuple[list[str], int]:
    """(violations as text, number of identities examined)."""
    if isinstance(obj, DgAlgebraPresentation):
        return [str(w) for w in validate_algebra(obj)], len(obj.basis)
    if isinstance(obj, TypeDStructure):
        return [str(r) for r in check_typeD(obj)], len(obj.generators)
    if isinstance(obj, AInfModule):
        return [str(r) for r in check_module(obj)], len(obj.generators)
    if isinstance(obj, DAStructure):
        return [str(r) for r in check_DA(obj)], len(obj.generators)
    if isinstance(obj, DDStructure):
        return [str(r) for r in check_DD(obj)], len(obj.generators)
    if isinstance(obj, (FilteredTypeD, FilteredAInfModule)):
        return [str(v) for v in obj.violations()], len(obj.poset.pairs()) + len(obj.poset)
    if isinstance(obj, FilteredComplex):
        return [str(v) for v in validate_filtered(obj)], len(obj.poset.pairs()) + len(obj.poset)
    if isinstance(obj, SurgeryTriangleFixture):
        lines = fixture_checks(obj)
        return [str(c) for c in lines if not c.ok], len(lines)
    if isinstance(obj, HeegaardMultiDiagram):
        return obj.validation_errors(), len(obj.families) + 1
    if isinstance(obj, PlatPresentation):
        return [], 1
    raise ParseError(f"nothing to check for {type(obj).__name__}")


def _build_for_check(af: fileio.ArtifactFile):
    if af.kind == "diagram":
        # build without raising so that every violated invariant is reported
        p = af.payload
        for k in ("surface", "curves", "alpha", "beta", "basepoint"):
            fileio._get(p, k, "payload")
        try:
            return HeegaardMultiDiagram.from_dict(p, check=False)
        except (KeyError, TypeError, IndexError) as exc:
            raise ParseError(f"malformed diagram ({exc})", "payload") from None
    return af.build()


@main.command()
@click.argument("path", type=click.Path())
@click.option("--species", type=click.Choice(SPECIES), default="auto", show_default=True, help="Expected file species.")
@_exits
def check(path: str, species: str) -> None:
    """Validate a file and list every violated identity with a witness."""
    af = fileio.read_file(path)
    if species != "auto" and af.species != species:
        raise ParseError(f"file holds {af.species!r}, expected {species!r}", "payload.species")
    try:
        obj = _build_for_check(af)
        problems, n = _structure_problems(obj)
    except (StructureError, DiagramError) as exc:
        problems, n = [str(exc)], 1
    if problems:
        click.echo(f"INVALID {af.species} ({len(problems)} violation(s))")
        for p in problems:
            click.echo(f"  {p}")
        sys.exit(EXIT_FAIL)
    click.echo(f"VALID {af.species} ({n} identities checked)")


# ---------------------------------------------------------------------------
# box
# ---------------------------------------------------------------------------


def _height_rank(poset: FinitePoset) -> dict:
    """Length of the longest chain below each element; strictly monotone."""
    h: dict = {}
    for e in poset.elements:
        h[e] = 0
    changed = True
    while changed:
        changed = False
        for a, b in poset.relation:
            if h[b] < h[a] + 1:
                h[b] = h[a] + 1
                changed = True
    return h


def _rank_fn(spec: str, poset: FinitePoset):
    if spec == "height":
        return _height_rank(poset)
    if spec == "cube":
        return cube_rank
    try:
        rows = json.loads(spec)
        table = {fileio.dec(e): int(r) for e, r in rows}
    except (json.JSONDecodeError, TypeError, ValueError) as exc:
        raise ParseError(f"rank function must be 'height', 'cube' or a JSON list of [element, rank] ({exc})", "--rank-fn")
    missing = [e for e in poset.elements if e not in table]
    if missing:
        raise ParseError(f"rank function misses element {missing[0]!r}", "--rank-fn")
    return table


def _page_lines(pages) -> list[str]:
    head = "page " + " ".join(f"{p:>5}" for p in pages.degrees) + "  total"
    lines = [head]
    for r in range(pages.last_page + 1):
        row = pages.page(r)
        lines.append(f"E{r:<3} " + " ".join(f"{row[p]:>5}" for p in pages.degrees) + f"  {sum(row.values()):>5}")
    return lines


def _pages_json(pages) -> dict:
    return {
        "degrees": list(pages.degrees),
        "pages": [[r, [pages.page(r)[p] for p in pages.degrees]] for r in range(pages.last_page + 1)],
        "stabilization_page": pages.stabilization_page,
    }


@main.command()
@click.argument("m_path", type=click.Path())
@click.argument("p_path", type=click.Path())
@click.option("--filtered", is_flag=True, help="Keep the filtrations and write the product-filtered complex.")
@click.option("-o", "--output", type=click.Path(), help="Write the result here instead of stdout.")
@click.option("--homology", is_flag=True, help="Print the homology rank of the total complex.")
@click.option("--pages", is_flag=True, help="Print spectral sequence page ranks (height filtration).")
@_exits
def box(m_path: str, p_path: str, filtered: bool, output: str | None, homology: bool, pages: bool) -> None:
    """Box tensor product of a type A side (M) with a type D side (P)."""
    m = fileio.read_file(m_path).build()
    p = fileio.read_file(p_path).build()
    if isinstance(p, SurgeryTriangleFixture):
        p = p.filtered()
    if not isinstance(m, (AInfModule, FilteredAInfModule)):
        raise ParseError(f"first argument must be a type A module, got {type(m).__name__}", m_path)
    if isinstance(p, DDStructure):
        mm = m.total() if isinstance(m, FilteredAInfModule) else m
        if not mm.bounded:
            raise BoundednessError("the module side is unbounded and the DD side needs a bounded module")
        _emit(fileio.dumps(box_tensor_DD(mm, p)), output)
        return
    if not isinstance(p, (TypeDStructure, FilteredTypeD)):
        raise ParseError(f"second argument must be a type D structure, got {type(p).__name__}", p_path)
    if filtered:
        fc = filtered_box_tensor(m, p)
        bad = validate_filtered(fc)
        if bad:
            click.echo(f"filtered compatibility fails: {bad[0]}", err=True)
            sys.exit(EXIT_FAIL)
    else:
        mm = m.total() if isinstance(m, FilteredAInfModule) else m
        pp = p.total() if isinstance(p, FilteredTypeD) else p
        fc = fileio.complex_as_filtered(box_tensor(mm, pp))
    if output or not (homology or pages):
        _emit(fileio.dumps(fc), output)
    if homology:
        click.echo(f"homology rank: {total_homology_rank(total_complex(fc))}")
    if pages:
        for line in _page_lines(spectral_sequence(fc, _height_rank(fc.poset))):
            click.echo(line)


# ---------------------------------------------------------------------------
# ss
# ---------------------------------------------------------------------------


@main.command()
@click.argument("path", type=click.Path())
@click.option("--rank-fn", default="height", show_default=True, help="'height', 'cube' or a JSON list of [element, rank].")
@click.option("--json", "json_out", type=click.Path(), help="Also write the page table as JSON.")
@_exits
def ss(path: str, rank_fn: str, json_out: str | None) -> None:
    """Spectral sequence page ranks of a filtered complex."""
    fc = fileio.read_file(path).build()
    if isinstance(fc, F2Complex):
        fc = fileio.complex_as_filtered(fc)
    if not isinstance(fc, FilteredComplex):
        raise ParseError(f"expected a filtered complex, got {type(fc).__name__}", path)
    bad = validate_filtered(fc)
    if bad:
        raise ParseError(f"invalid filtered complex: {bad[0]}", path)
    try:
        pages = spectral_sequence(fc, _rank_fn(rank_fn, fc.poset))
    except ValueError as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(str(exc), "--rank-fn") from None
    for line in _page_lines(pages):
        click.echo(line)
    h = total_homology_rank(total_complex(fc))
    click.echo(f"E_inf total {sum(pages.e_infinity().values())}, H(total) {h}")
    if json_out:
        data = _pages_json(pages)
        data["homology_rank"] = h
        Path(json_out).write_text(json.dumps(data, indent=1, sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# plat
# ---------------------------------------------------------------------------


def _state_json(p: PlatPresentation, states) -> dict:
    return {
        "braid": str(p),
        "count": len(states),
        "states": [{"corners": list(s.assignment), "marked_edge": s.marked_edge} for s in states],
    }


def _plat_report(p: PlatPresentation) -> list[tuple[str, bool, str]]:
    rows: list[tuple[str, bool, str]] = []
    d = build_cover_diagram(p)
    g, want = d.genus, d.expected_genus
    rows.append(("small diagram genus 2n-2+c", g == want, f"{g} vs {want}"))
    sd = build_cover_diagram(p, stabilized=True)
    rows.append(("stabilized genus adds c(2n-3)", sd.genus == sd.expected_genus, f"{sd.genus} vs {sd.expected_genus}"))
    connected = is_connected(p)
    if connected:
        states = kauffman_states(p)
        det = determinant(p)
        rows.append(("Kauffman states = determinant", len(states) == det, f"{len(states)} states, det {det}"))
        try:
            corr = generator_correspondence(d, states)
            rows.append(("state/generator correspondence is a bijection", corr.ok, f"{corr.state_count} states, {corr.generator_count} generators"))
        except CorrespondenceError as exc:
            rows.append(("state/generator correspondence is a bijection", False, str(exc)))
    else:
        rows.append(("Kauffman states", True, "skipped: the projection is disconnected"))
    verdicts = []
    for lab, comps in complete_resolutions(p):
        cert = admissibility(d.diagram([lab], check=False), families=[lab])
        verdicts.append(bool(cert) == (comps == 1))
    rows.append((
        "complete resolutions admissible iff connected",
        all(verdicts),
        f"{sum(verdicts)}/{len(verdicts)} resolutions agree",
    ))
    ds = destabilization_count_check(d)
    if connected:
        rows.append(("destabilization count 2n-2", ds.ok, f"count {ds.count}, expected {ds.expected}"))
    else:
        ok = ds.generators_before == ds.generators_after
        rows.append(("destabilization count", ok, f"count {ds.count} (2n-2 applies to connected projections)"))
    return rows


@main.command()
@click.argument("braid")
@click.argument("action", type=click.Choice(["diagram", "kauffman", "verify"]))
@click.option("--forbid", type=click.Choice(["top", "bottom"]), default="top", show_default=True, help="Which stationary pair is forbidden.")
@click.option("--stabilized", is_flag=True, help="Use the stabilized diagram (diagram action only).")
@click.option("--dot", is_flag=True, help="Emit DOT instead of JSON (diagram action only).")
@click.option("-o", "--output", type=click.Path(), help="Write the result here instead of stdout.")
@_exits
def plat(braid: str, action: str, forbid: str, stabilized: bool, dot: bool, output: str | None) -> None:
    """Plat closure tools for a braid literal "<2n>:[i,-j,...]"."""
    p = PlatPresentation.parse(braid, forbid=forbid)
    if action == "diagram":
        d = build_cover_diagram(p, stabilized=stabilized)
        hd = d.diagram()
        text = to_dot(hd) if dot else fileio.dumps(hd)
        _emit(text, output)
        click.echo(f"genus {d.genus}", err=True)
        return
    if action == "kauffman":
        if not is_connected(p):
            states = []
        else:
            states = kauffman_states(p)
        _emit(json.dumps(_state_json(p, states), indent=1, sort_keys=True) + "\n", output)
        click.echo(f"{len(states)} states", err=True)
        return
    rows = _plat_report(p)
    lines = [f"{'PASS' if ok else 'FAIL'}  {name}  ({detail})" for name, ok, detail in rows]
    _emit("\n".join(lines) + "\n", output)
    if not all(ok for _, ok, _ in rows):
        sys.exit(EXIT_FAIL)


# ---------------------------------------------------------------------------
# surgery-triangle
# ---------------------------------------------------------------------------


@main.group("surgery-triangle")
def surgery_triangle() -> None:
    """The explicit torus-boundary surgery triangle."""


@surgery_triangle.command("verify")
@click.option("--fixture", type=click.Path(), help="Check a surgery-triangle file instead of the built-in data.")
@_exits
def triangle_verify(fixture: str | None) -> None:
    """Print a pass/fail table of the triangle identities."""
    if fixture:
        fx = fileio.read_file(fixture).build()
        if not isinstance(fx, SurgeryTriangleFixture):
            raise ParseError("file is not a surgery-triangle fixture", fixture)
        lines = fixture_checks(fx)
    else:
        lines = verify_all()
    for c in lines:
        click.echo(str(c))
    bad = sum(not c.ok for c in lines)
    click.echo(f"{len(lines) - bad}/{len(lines)} identities hold")
    if bad:
        sys.exit(EXIT_FAIL)


# ---------------------------------------------------------------------------
# fixtures
# ---------------------------------------------------------------------------


@main.command()
@click.argument("directory", type=click.Path(), required=False)
def fixtures(directory: str | None) -> None:
    """Write the fixture files (default: the fixture directory)."""
    for path in fileio.write_fixtures(directory):
        click.echo(str(path))


if __name__ == "__main__":
    main()
