import pytest

from artifact.errors import ArgumentError, ConventionError, CorrespondenceError
from artifact.filtration import INF
from artifact.heegaard import admissibility, enumerate_generators, h1_rank
from artifact.platcover import (
    PlatPresentation,
    build_cover_diagram,
    complete_resolutions,
    corpus,
    destabilization_count_check,
    determinant,
    generator_correspondence,
    is_connected,
    kauffman_states,
    link_components,
    resolution_family,
)

CORPUS = corpus()


def bracket_determinant(p):
    """|<K>| at A = exp(i pi/4): only one-loop resolutions survive."""
    return round(abs(sum((-1j) ** sum(lab) for lab, comps in complete_resolutions(p) if comps == 1)))


def test_parse_and_print():
    p = PlatPresentation.parse("4:[2,-2, 2]")
    assert p.word == (2, -2, 2) and str(p) == "4:[2,-2,2]"
    assert PlatPresentation.parse("4:[]").word == ()


def test_parse_errors():
    with pytest.raises(ArgumentError):
        PlatPresentation.parse("4:[2,x]")
    with pytest.raises(ArgumentError):
        PlatPresentation.parse("5:[1]")
    with pytest.raises(ArgumentError):
        PlatPresentation(4, (4,))


def test_top_strand_forbidden():
    with pytest.raises(ConventionError):
        PlatPresentation.parse("4:[3]")
    with pytest.raises(ConventionError):
        PlatPresentation.parse("4:[1]", forbid="bottom")
    flipped = PlatPresentation(4, (3, 3, 3), forbid="bottom")
    assert flipped.normalized().word == (1, 1, 1)


@pytest.mark.parametrize("name", sorted(CORPUS))
def test_determinant_matches_bracket(name):
    p = CORPUS[name]
    assert determinant(p) == bracket_determinant(p)


def test_trefoil_states():
    assert len(kauffman_states(CORPUS["trefoil"])) == 3


def test_figure_eight_states():
    p = CORPUS["figure_eight"]
    assert len(kauffman_states(p)) == 5 == bracket_determinant(p)


def test_unlink_has_no_states():
    p = CORPUS["unlink2"]
    assert not is_connected(p)
    assert kauffman_states(p) == []
    with pytest.raises(CorrespondenceError):
        generator_correspondence(build_cover_diagram(p))


def test_link_components():
    assert link_components(CORPUS["unlink2"]) == 2
    assert link_components(CORPUS["hopf"]) == 2
    assert link_components(CORPUS["trefoil"]) == 1


@pytest.mark.parametrize("name", sorted(CORPUS))
def test_genus_bookkeeping(name):
    p = CORPUS[name]
    n, c = p.n, p.crossings
    assert build_cover_diagram(p).genus == 2 * n - 2 + c
    assert build_cover_diagram(p, stabilized=True).genus == 2 * n - 2 + c + c * (2 * n - 3)


def test_curve_counts():
    d = build_cover_diagram(CORPUS["trefoil"])
    assert len(d.alpha) == d.genus
    for lab in [(0, 1, INF), (INF, INF, INF), (0, 0, 0)]:
        assert len(d.family_curves(lab)) == d.genus
    assert len(d.crossings) == 3


def test_trivial_word_cover():
    d = build_cover_diagram(CORPUS["unlink2"])
    assert d.genus == 2
    hd = d.diagram()
    # branched double cover of the two component unlink is S^2 x S^1
    assert h1_rank(hd, ()) == 1


@pytest.mark.parametrize("name", [k for k in sorted(CORPUS) if is_connected(CORPUS[k])])
def test_correspondence_bijective(name):
    d = build_cover_diagram(CORPUS[name])
    res = generator_correspondence(d)
    assert res.ok
    assert res.state_count == res.generator_count == len(kauffman_states(CORPUS[name]))


def test_trefoil_generators_all_inf():
    d = build_cover_diagram(CORPUS["trefoil"])
    lab = (INF, INF, INF)
    assert len(enumerate_generators(d.diagram([lab]), lab)) == 3


def test_resolution_family_theta_slots():
    d = build_cover_diagram(CORPUS["trefoil"])
    fam = resolution_family(d, (0, 1, INF))
    assert fam.curves == d.family_curves((0, 1, INF))
    for other, th in fam.theta.items():
        changed = sum(a != b for a, b in zip(fam.label, other))
        assert (th is None) == (changed >= 2)
    assert fam.theta[(1, 1, INF)] is not None
    assert fam.theta[(1, INF, INF)] is None


def test_all_inf_family_is_cover_family():
    d = build_cover_diagram(CORPUS["trefoil"])
    hd = d.diagram()
    assert tuple(hd.beta) == ((INF, INF, INF),)


def test_complete_resolution_on_unknot_word():
    p = PlatPresentation(4, (2, -2))
    d = build_cover_diagram(p)
    fam = resolution_family(d, (0, 0))
    assert len(fam.curves) == d.genus


@pytest.mark.parametrize("name", ["trefoil", "figure_eight", "hopf"])
def test_disconnected_resolutions_not_admissible(name):
    p = CORPUS[name]
    d = build_cover_diagram(p)
    for lab, comps in complete_resolutions(p):
        cert = admissibility(d.diagram([lab], check=False), families=[lab])
        assert cert.admissible == (comps == 1)


def test_destabilization_counts():
    for name in ("trefoil", "figure_eight", "six_strand_a"):
        p = CORPUS[name]
        res = destabilization_count_check(build_cover_diagram(p))
        assert res.count == 2 * p.n - 2
        assert res.generators_before == res.generators_after


def test_trivial_destabilization_limited_by_h1():
    # the projection is disconnected; the cover S^2 x S^1 keeps one handle
    res = destabilization_count_check(build_cover_diagram(CORPUS["unlink2"]))
    assert res.count == 1
    assert res.generators_before == res.generators_after


def test_stabilized_refuses_correspondence():
    d = build_cover_diagram(CORPUS["trefoil"], stabilized=True)
    with pytest.raises(ArgumentError):
        generator_correspondence(d)
    with pytest.raises(ArgumentError):
        destabilization_count_check(d)
