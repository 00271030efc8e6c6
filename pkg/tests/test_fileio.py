import json

import pytest

from artifact import fileio
from artifact.errors import ParseError
from artifact.f2chain import F2Complex
from artifact.filtration import validate_filtered
from artifact.heegaard import HeegaardMultiDiagram
from artifact.platcover import build_cover_diagram, corpus


def test_fixtures_are_current():
    d = fileio.fixture_dir()
    for stem, obj in fileio.fixture_objects().items():
        assert (d / f"{stem}.json").read_text() == fileio.dumps(obj), stem


@pytest.mark.parametrize("stem", sorted(fileio.fixture_objects()))
def test_fixture_round_trip(stem):
    text = (fileio.fixture_dir() / f"{stem}.json").read_text()
    assert fileio.dumps(fileio.loads(text)) == text


def test_trefoil_diagram_round_trip():
    hd = build_cover_diagram(corpus()["trefoil"]).diagram()
    text = fileio.dumps(hd)
    again = fileio.loads(text)
    assert isinstance(again, HeegaardMultiDiagram)
    assert fileio.dumps(again) == text


def test_name_encoding():
    for name in ["x", 3, ("pt", "inf"), (("a", 1), "b")]:
        assert fileio.dec(json.loads(json.dumps(fileio.enc(name)))) == name


def test_plain_complex_wrapped():
    c = F2Complex.from_boundaries({"x": ["y"]}, ["x", "y"])
    fc = fileio.loads(fileio.dumps(c))
    assert validate_filtered(fc) == []
    assert list(fc.parts) == ["pt"]


def test_env_override(tmp_path, monkeypatch):
    monkeypatch.setenv(fileio.FIXTURE_ENV, str(tmp_path))
    assert fileio.fixture_dir() == tmp_path
    paths = fileio.write_fixtures()
    assert len(paths) == len(fileio.fixture_objects())
    A = fileio.load_fixture("torus_algebra")
    assert A.name == "torus"
    with pytest.raises(FileNotFoundError):
        fileio.load_fixture("missing")


def test_bad_json_location():
    with pytest.raises(ParseError) as e:
        fileio.loads('{"kind": "algebra",\n "payload": }')
    assert "line 2" in str(e.value)


def test_unknown_kind_and_version():
    with pytest.raises(ParseError):
        fileio.loads(json.dumps({"kind": "spreadsheet", "payload": {}}))
    with pytest.raises(ParseError):
        fileio.loads(json.dumps({"kind": "algebra", "version": 99, "payload": {}}))


def test_missing_field_reports_location():
    text = fileio.dumps(fileio.fixture_objects()["module_T1"])
    doc = json.loads(text)
    del doc["payload"]["generators"]
    with pytest.raises(ParseError) as e:
        fileio.loads(json.dumps(doc))
    assert "generators" in str(e.value)


def test_malformed_entries_are_parse_errors():
    text = fileio.dumps(fileio.fixture_objects()["triangle_box_T1"])
    doc = json.loads(text)
    doc["payload"]["parts"][0] = ["oops"]
    with pytest.raises(ParseError):
        fileio.loads(json.dumps(doc))


def test_builtin_algebra_reference():
    A = fileio.algebra_from_payload({"builtin": "torus"})
    assert A.name == "torus"
    B = fileio.algebra_from_payload({"builtin": "torus", "suffix": "'"})
    assert "rho1'" in B.names
    with pytest.raises(ParseError):
        fileio.algebra_from_payload({"builtin": "klein"})
