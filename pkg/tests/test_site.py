import pytest

from presheaf_cech.errors import InvalidSiteError
from presheaf_cech.generators import diamond_site, two_point_space_site
from presheaf_cech.site import Cover, validate_site


def _raw(**over):
    raw = diamond_site().to_json()
    raw.update(over)
    return raw


def test_diamond_site_structure():
    s = diamond_site()
    assert s.objects == ("0", "a", "b", "X")
    assert set(s.hasse_edges) == {("0", "a"), ("0", "b"), ("a", "X"), ("b", "X")}
    assert s.meet("a", "b") == "0"
    assert s.leq("0", "X") and not s.leq("a", "b")
    assert s.linear_extension[0] == "X" and s.linear_extension[-1] == "0"
    assert s.warnings == []


def test_covers_are_normalized():
    raw = _raw(covers={"X": [["X"], ["b", "a", "b"]], "a": [["a"], ["a", "0"]],
                       "b": [["b"], ["b", "0"]], "0": [["0"]]})
    s = validate_site(raw)
    assert Cover("X", ("a", "b")) in s.covers["X"]
    assert s.find_cover("X", ["b", "a"]) == Cover("X", ("a", "b"))


def test_pullback_cover():
    s = diamond_site()
    c = s.find_cover("X", ["a", "b"])
    assert s.pullback_cover(c, "a") == Cover("a", ("0", "a"))
    assert s.pullback_cover(c, "0") == Cover("0", ("0",))


def test_nerve_of_two_leg_cover():
    s = diamond_site()
    nerve = s.nerve(s.find_cover("X", ["a", "b"]), 1)
    lv1 = nerve[1]
    assert lv1.tuples == ((0, 0), (0, 1), (1, 0), (1, 1))
    assert lv1.tuple_object[(0, 1)] == "0" and lv1.tuple_object[(1, 1)] == "b"
    assert dict(lv1.faces[(0, 1)]) == {0: (1,), 1: (0,)}


def test_cover_poset_refinement_and_filtering():
    s = diamond_site()
    cp = s.cover_poset("X")
    i, j = cp.index(s.find_cover("X", ["X"])), cp.index(s.find_cover("X", ["a", "b"]))
    assert cp.refines(j, i) and not cp.refines(i, j)
    assert (i, j) in cp.generating_edges
    assert cp.filtered


def test_empty_cover_allowed_and_round_trips():
    s = diamond_site(empty_cover_at_bottom=True)
    assert Cover("0", ()) in s.covers["0"]
    again = validate_site(s.to_json())
    assert again.to_json() == s.to_json()
    assert validate_site(two_point_space_site().to_json()).objects == ("0", "p", "q", "pq")


@pytest.mark.parametrize("raw, fragment", [
    (_raw(leq=[["a", "X"], ["X", "a"]]), "antisymmetry"),
    (_raw(covers={"X": [["a", "b"]], "a": [["a"]], "b": [["b"]], "0": [["0"]]}), "identity cover"),
    (_raw(covers={"X": [["X"], ["a", "q"]], "a": [["a"]], "b": [["b"]], "0": [["0"]]}), "unknown"),
    (_raw(covers={"X": [["X"]], "a": [["a"], ["X"]], "b": [["b"]], "0": [["0"]]}), "not below"),
    # {a,b} pulled back to a is {0,a}, absent from J(a)
    (_raw(covers={"X": [["X"], ["a", "b"]], "a": [["a"]], "b": [["b"], ["b", "0"]], "0": [["0"]]}), "stability"),
])
def test_invalid_sites_report_violations(raw, fragment):
    with pytest.raises(InvalidSiteError) as info:
        validate_site(raw)
    assert any(fragment in v for v in info.value.violations)


def test_missing_meet_detected():
    raw = {"objects": ["p", "q", "X"], "leq": [["p", "X"], ["q", "X"]],
           "covers": {"X": [["X"], ["p", "q"]], "p": [["p"]], "q": [["q"]]}}
    with pytest.raises(InvalidSiteError) as info:
        validate_site(raw)
    assert any("meet" in v for v in info.value.violations)


def test_transitivity_gap_is_only_a_warning():
    # {0} covers a, but composing {a,b} with it gives {0,b}, whose sieve is not in J(X)
    raw = _raw(covers={"X": [["X"], ["a", "b"]], "a": [["a"], ["a", "0"], ["0"]],
                       "b": [["b"], ["b", "0"]], "0": [["0"]]})
    s = validate_site(raw)
    assert s.warnings
