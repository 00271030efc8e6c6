"""The surgery exact triangle over the torus algebra as explicit type D data.

Three type D structures for the fillings with framings infinity, -1 and 0:
  CFD(H_inf) = {r},    delta r = rho23 r
  CFD(H_-1)  = {a, b}, delta a = (rho1 + rho3) b, delta b = 0
  CFD(H_0)   = {n},    delta n = rho12 n
joined by F^{inf<-1}(r) = rho2 a + b, F^{-1<0}(a) = n, F^{-1<0}(b) = rho2 n,
F^{inf<0} = 0, and theta(n) = (rho1 + rho3) r from H_0 back to H_inf.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .algebra import DgAlgebraPresentation, torus_algebra
from .errors import FixtureError
from .f2chain import cancel_reduce, homology_rank
from .filtration import INF, FinitePoset
from .structures import (
    AInfModule,
    FilteredTypeD,
    TypeDMorphism,
    TypeDStructure,
    box_tensor,
    check_module,
    check_typeD,
    compose_typeD,
    filtered_box_tensor,
    mapping_cone,
    morphism_differential,
)

LEVELS = (INF, -1, 0)


@dataclass
class SurgeryTriangleFixture:
    algebra: DgAlgebraPresentation
    h_inf: TypeDStructure
    h_minus1: TypeDStructure
    h_0: TypeDStructure
    f_inf_m1: TypeDMorphism
    f_m1_0: TypeDMorphism
    f_inf_0: TypeDMorphism
    theta: TypeDMorphism
    checks: list = field(default_factory=list)

    @property
    def parts(self) -> dict:
        return {INF: self.h_inf, -1: self.h_minus1, 0: self.h_0}

    def poset(self) -> FinitePoset:
        return FinitePoset.chain(LEVELS)

    def filtered(self) -> FilteredTypeD:
        return FilteredTypeD(
            self.poset(),
            self.parts,
            {(INF, -1): self.f_inf_m1, (-1, 0): self.f_m1_0, (INF, 0): self.f_inf_0},
        )


@dataclass
class CheckLine:
    name: str
    ok: bool
    detail: str = ""

    def __str__(self) -> str:
        return f"{'PASS' if self.ok else 'FAIL'}  {self.name}" + (f"  ({self.detail})" if self.detail else "")


def _structures(A: DgAlgebraPresentation, theta_terms=None):
    h_inf = TypeDStructure(A, {"r": "iota1"}, {"r": [("rho23", "r")]}, check=False, name="H_inf")
    h_m1 = TypeDStructure(
        A, {"a": "iota0", "b": "iota1"}, {"a": [("rho1", "b"), ("rho3", "b")], "b": []}, check=False, name="H_-1"
    )
    h_0 = TypeDStructure(A, {"n": "iota0"}, {"n": [("rho12", "n")]}, check=False, name="H_0")
    f1 = TypeDMorphism(h_inf, h_m1, {"r": [("rho2", "a"), ("iota1", "b")]})
    f2 = TypeDMorphism(h_m1, h_0, {"a": [("iota0", "n")], "b": [("rho2", "n")]})
    f3 = TypeDMorphism.zero(h_inf, h_0)
    if theta_terms is None:
        theta_terms = [("rho1", "r"), ("rho3", "r")]
    theta = TypeDMorphism(h_0, h_inf, {"n": theta_terms})
    return h_inf, h_m1, h_0, f1, f2, f3, theta


def fixture_checks(fx: SurgeryTriangleFixture) -> list[CheckLine]:
    """One line per identity the triangle data must satisfy."""
    out = []
    for label, x in (("H_inf", fx.h_inf), ("H_-1", fx.h_minus1), ("H_0", fx.h_0)):
        res = check_typeD(x)
        out.append(CheckLine(f"structure equation for CFD({label})", not res, "; ".join(map(str, res))))
    for label, f in (
        ("F^{inf<-1}", fx.f_inf_m1),
        ("F^{-1<0}", fx.f_m1_0),
        ("F^{inf<0}", fx.f_inf_0),
        ("theta", fx.theta),
    ):
        d = morphism_differential(f)
        out.append(CheckLine(f"d({label}) = 0", d.is_zero(), "" if d.is_zero() else repr(d)))
    comp = compose_typeD(fx.f_m1_0, fx.f_inf_m1)
    lhs = morphism_differential(fx.f_inf_0)
    ok = (comp + lhs).is_zero()
    out.append(CheckLine("d(F^{inf<0}) = F^{-1<0} o F^{inf<-1}", ok, "" if ok else f"{comp!r} vs {lhs!r}"))
    viol = fx.filtered().violations() if ok else []
    out.append(CheckLine("filtered compatibility over inf < -1 < 0", ok and not viol, "; ".join(map(str, viol))))
    return out


def build_fixture(algebra: DgAlgebraPresentation | None = None, theta_terms=None) -> SurgeryTriangleFixture:
    """Build and verify the triangle data; raises FixtureError naming a failed identity."""
    A = algebra if algebra is not None else torus_algebra()
    parts = _structures(A, theta_terms)
    fx = SurgeryTriangleFixture(A, *parts)
    fx.checks = fixture_checks(fx)
    bad = [c for c in fx.checks if not c.ok]
    if bad:
        raise FixtureError(f"surgery triangle identity fails: {bad[0]}")
    return fx


def load_fixture_unchecked(algebra: DgAlgebraPresentation | None = None, theta_terms=None) -> SurgeryTriangleFixture:
    A = algebra if algebra is not None else torus_algebra()
    fx = SurgeryTriangleFixture(A, *_structures(A, theta_terms))
    fx.checks = fixture_checks(fx)
    return fx


@dataclass
class ConeIsoResult:
    ok: bool
    phi: TypeDMorphism
    psi: TypeDMorphism
    lines: list

    def __bool__(self) -> bool:
        return self.ok


def verify_cone_iso(fx: SurgeryTriangleFixture | None = None) -> ConeIsoResult:
    """Check that a -> n, b -> r + rho2 n is an isomorphism CFD(H_-1) -> Cone(theta)."""
    fx = fx or build_fixture()
    cone = mapping_cone(fx.theta, name="Cone(theta)")
    X = fx.h_minus1
    phi = TypeDMorphism(X, cone, {"a": [("iota0", "n")], "b": [("iota1", "r"), ("rho2", "n")]})
    psi = TypeDMorphism(cone, X, {"n": [("iota0", "a")], "r": [("iota1", "b"), ("rho2", "a")]})
    lines = []
    for label, f in (("Phi", phi), ("Phi inverse", psi)):
        d = morphism_differential(f)
        lines.append(CheckLine(f"{label} commutes with the differentials", d.is_zero(), "" if d.is_zero() else repr(d)))
    for label, comp, src in (
        ("Phi inverse o Phi = id", compose_typeD(psi, phi), X),
        ("Phi o Phi inverse = id", compose_typeD(phi, psi), cone),
    ):
        ok = comp == TypeDMorphism.identity(src)
        lines.append(CheckLine(label, ok, "" if ok else repr(comp)))
    # the idempotent part of Phi is a bijection on generators
    A = fx.algebra
    idem_part = {x: {y for a, y in phi(x) if A.is_idempotent(a)} for x in X.generators}
    images = [next(iter(v)) for v in idem_part.values() if len(v) == 1]
    ok = len(images) == len(X.generators) and len(set(images)) == len(cone.generators)
    lines.append(CheckLine("Phi is unitriangular on generators", ok, repr(idem_part)))
    return ConeIsoResult(all(c.ok for c in lines), phi, psi, lines)


def probe_modules(algebra: DgAlgebraPresentation | None = None) -> dict[str, AInfModule]:
    """Small bounded right modules over the torus algebra used to probe the triangle."""
    A = algebra if algebra is not None else torus_algebra()
    mods = {
        "T1": AInfModule(A, {"p": "iota0", "q": "iota1"}, {("p", ("rho1",)): ["q"]}, name="T1"),
        "T2": AInfModule(A, {"p": "iota0", "q": "iota1"}, {("p", ("rho3",)): ["q"]}, name="T2"),
        "T3": AInfModule(
            A,
            {"p": "iota0", "s": "iota1", "q": "iota0"},
            {("p", ("rho1",)): ["s"], ("s", ("rho2",)): ["q"], ("p", ("rho12",)): ["q"]},
            name="T3",
        ),
        "T4": AInfModule(
            A,
            {"p": "iota1", "s": "iota0", "q": "iota1"},
            {("p", ("rho2",)): ["s"], ("s", ("rho3",)): ["q"], ("p", ("rho23",)): ["q"]},
            name="T4",
        ),
    }
    for m in mods.values():
        if check_module(m):
            raise FixtureError(f"test module {m.name} fails the module relations")
    return mods


def _rank(m: AInfModule, x: TypeDStructure) -> int:
    c = box_tensor(m, x)
    reduced, _ = cancel_reduce(c, track=False)
    r = sum(homology_rank(reduced).values())
    if r != sum(homology_rank(c).values()):
        raise FixtureError("reduction changed the homology rank")
    return r


@dataclass
class ReorderedResult:
    ok: bool
    ranks: dict
    lines: list

    def __bool__(self) -> bool:
        return self.ok


def verify_reordered_cones(fx: SurgeryTriangleFixture | None = None, modules: dict | None = None) -> ReorderedResult:
    """Compare ranks of each cone with the third vertex after pairing with test modules.

    Cone(F^{inf<-1}) ~ CFD(H_0), Cone(F^{-1<0}) ~ CFD(H_inf) and
    Cone(theta) ~ CFD(H_-1), each certified by equal homology ranks of the
    reduced box tensor products with every supplied bounded test module.
    """
    fx = fx or build_fixture()
    modules = modules if modules is not None else probe_modules(fx.algebra)
    cones = {
        "Cone(F^{inf<-1}) vs H_0": (mapping_cone(fx.f_inf_m1), fx.h_0),
        "Cone(F^{-1<0}) vs H_inf": (mapping_cone(fx.f_m1_0), fx.h_inf),
        "Cone(theta) vs H_-1": (mapping_cone(fx.theta), fx.h_minus1),
    }
    lines, ranks = [], {}
    for mname, m in modules.items():
        triple = {k: _rank(m, x) for k, x in fx.parts.items()}
        ranks[mname] = triple
        for label, (cone, target) in cones.items():
            a, b = _rank(m, cone), _rank(m, target)
            lines.append(CheckLine(f"{label} boxed with {mname}", a == b, f"{a} vs {b}"))
        vals = list(triple.values())
        exact = all(vals[i] <= vals[(i + 1) % 3] + vals[(i + 2) % 3] for i in range(3))
        lines.append(CheckLine(f"exactness of rank triple for {mname}", exact, repr(triple)))
    return ReorderedResult(all(c.ok for c in lines), ranks, lines)


def triangle_filtered_complex(module: AInfModule | None = None):
    """The filtered type D structure boxed with a bounded test module."""
    fx = build_fixture()
    m = module if module is not None else probe_modules(fx.algebra)["T1"]
    return filtered_box_tensor(m, fx.filtered())


def verify_all() -> list[CheckLine]:
    fx = build_fixture()
    lines = list(fx.checks)
    lines.extend(verify_cone_iso(fx).lines)
    lines.extend(verify_reordered_cones(fx).lines)
    return lines
