import json

import pytest
from click.testing import CliRunner

from artifact import fileio, triangle
from artifact.cli import EXIT_BOUNDED, EXIT_CONVENTION, EXIT_FAIL, EXIT_OK, EXIT_PARSE, main
from artifact.structures import AInfModule, TypeDStructure
from artifact.algebra import torus_algebra, trivial_algebra
from artifact.f2chain import F2Complex

FIX = fileio.fixture_dir()


@pytest.fixture
def run():
    runner = CliRunner()

    def invoke(*args):
        return runner.invoke(main, [str(a) for a in args], catch_exceptions=False)

    return invoke


def write(tmp_path, name, obj):
    path = tmp_path / name
    fileio.write_file(path, obj)
    return path


# check


def test_check_triangle_fixture(run):
    r = run("check", FIX / "surgery_triangle.json")
    assert r.exit_code == EXIT_OK
    assert r.output.startswith("VALID surgery-triangle")


def test_check_mutated_theta(run, tmp_path):
    fx = triangle.load_fixture_unchecked(theta_terms=[("rho1", "r")])
    path = write(tmp_path, "bad.json", fx)
    r = run("check", path)
    assert r.exit_code == EXIT_FAIL
    assert "d(theta)" in r.output and "rho123" in r.output


def test_check_empty_module(run):
    r = run("check", FIX / "empty_module.json")
    assert r.exit_code == EXIT_OK


def test_check_all_fixtures_valid(run):
    for path in sorted(FIX.glob("*.json")):
        r = run("check", path)
        assert r.exit_code == EXIT_OK, (path, r.output)


def test_check_species_mismatch(run):
    r = run("check", FIX / "module_T1.json", "--species", "typeD")
    assert r.exit_code == EXIT_PARSE


def test_check_bad_json(run, tmp_path):
    p = tmp_path / "broken.json"
    p.write_text('{"kind": "module", "payload": [}')
    r = run("check", p)
    assert r.exit_code == EXIT_PARSE
    assert "line 1" in r.output


def test_check_missing_file(run, tmp_path):
    r = run("check", tmp_path / "nope.json")
    assert r.exit_code == EXIT_PARSE


# box


def test_box_trivial_algebra(run, tmp_path):
    F = trivial_algebra()
    m = write(tmp_path, "m.json", AInfModule(F, {"u": "1", "v": "1", "w": "1"}, {("u", ()): ["v"]}))
    p = write(tmp_path, "p.json", TypeDStructure(F, {"x": "1", "y": "1"}))
    r = run("box", m, p, "--homology")
    assert r.exit_code == EXIT_OK
    assert "homology rank: 2" in r.output


def test_box_dd_matches_fixture(run):
    r = run("box", FIX / "regular_iota0.json", FIX / "dd_identity_torus.json")
    assert r.exit_code == EXIT_OK
    assert r.output == (FIX / "dd_box_regular_iota0.json").read_text()


def test_box_filtered_triangle(run, tmp_path):
    out = tmp_path / "box.json"
    r = run("box", FIX / "module_T1.json", FIX / "surgery_triangle.json", "--filtered", "-o", out, "--pages")
    assert r.exit_code == EXIT_OK
    assert out.read_text() == (FIX / "triangle_box_T1.json").read_text()
    assert "E0" in r.output


def test_box_unbounded(run, tmp_path):
    A = torus_algebra()
    m = write(tmp_path, "m.json", AInfModule(A, {"u": "iota0"}, {}, bounded=False, arity_bound=1))
    p = write(tmp_path, "p.json", TypeDStructure(A, {"x": "iota0"}, {"x": [("rho12", "x")]}))
    r = run("box", m, p)
    assert r.exit_code == EXIT_BOUNDED
    assert "unbounded" in r.output


def test_box_wrong_order(run):
    r = run("box", FIX / "surgery_triangle.json", FIX / "module_T1.json")
    assert r.exit_code == EXIT_PARSE


# ss


def test_ss_single_level(run, tmp_path):
    c = F2Complex.from_boundaries({"x": ["y"]}, ["x", "y", "z"])
    p = write(tmp_path, "c.json", c)
    r = run("ss", p)
    assert r.exit_code == EXIT_OK
    assert "E_inf total 1, H(total) 1" in r.output


def test_ss_triangle_json(run, tmp_path):
    out = tmp_path / "pages.json"
    r = run("ss", FIX / "triangle_box_T1.json", "--json", out)
    assert r.exit_code == EXIT_OK
    data = json.loads(out.read_text())
    last = data["pages"][-1][1]
    assert sum(last) == data["homology_rank"]


def test_ss_explicit_rank(run):
    ranks = json.dumps([[["pt", "inf"], 0], [["pt", -1], 1], [["pt", 0], 2]])
    r = run("ss", FIX / "triangle_box_T1.json", "--rank-fn", ranks)
    assert r.exit_code == EXIT_OK


def test_ss_bad_rank(run):
    r = run("ss", FIX / "triangle_box_T1.json", "--rank-fn", "[1,2")
    assert r.exit_code == EXIT_PARSE
    ranks = json.dumps([[["pt", "inf"], 2], [["pt", -1], 1], [["pt", 0], 0]])
    r = run("ss", FIX / "triangle_box_T1.json", "--rank-fn", ranks)
    assert r.exit_code == EXIT_PARSE


def test_ss_invalid_input(run):
    r = run("ss", FIX / "module_T1.json")
    assert r.exit_code == EXIT_PARSE


# plat


def test_plat_kauffman_trefoil(run):
    r = run("plat", "4:[2,2,2]", "kauffman")
    assert r.exit_code == EXIT_OK
    data = json.loads(r.stdout)
    assert len(data["states"]) == 3


def test_plat_trivial_diagram(run, tmp_path):
    out = tmp_path / "d.json"
    r = run("plat", "4:[]", "diagram", "-o", out)
    assert r.exit_code == EXIT_OK
    d = fileio.read_file(out).build()
    assert d.genus == 2


def test_plat_dot(run):
    r = run("plat", "4:[2]", "diagram", "--dot")
    assert r.exit_code == EXIT_OK
    assert r.output.startswith("graph")


def test_plat_verify_trefoil(run):
    r = run("plat", "4:[2,2,2]", "verify")
    assert r.exit_code == EXIT_OK
    assert "FAIL" not in r.output
    assert "destabilization" in r.output and "2" in r.output


def test_plat_top_strand(run):
    r = run("plat", "4:[3]", "kauffman")
    assert r.exit_code == EXIT_CONVENTION
    assert "3" in r.output


def test_plat_parse_error(run):
    r = run("plat", "4:[2,x]", "kauffman")
    assert r.exit_code == EXIT_PARSE


def test_plat_deterministic(run):
    a = run("plat", "4:[2,-1,2,2]", "diagram").output
    b = run("plat", "4:[2,-1,2,2]", "diagram").output
    assert a == b


# surgery triangle and fixtures


def test_triangle_verify(run):
    r = run("surgery-triangle", "verify")
    assert r.exit_code == EXIT_OK
    assert "FAIL" not in r.output


def test_triangle_verify_bad_fixture(run, tmp_path):
    fx = triangle.load_fixture_unchecked(theta_terms=[("rho1", "r")])
    path = write(tmp_path, "bad.json", fx)
    r = run("surgery-triangle", "verify", "--fixture", path)
    assert r.exit_code == EXIT_FAIL


def test_fixtures_command(run, tmp_path):
    r = run("fixtures", tmp_path)
    assert r.exit_code == EXIT_OK
    for line in r.output.splitlines():
        name = line.rsplit("/", 1)[-1]
        assert (tmp_path / name).read_text() == (FIX / name).read_text()
