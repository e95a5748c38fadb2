import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracle import Oracle
from presheaf_cech.classify import classify, xi
from presheaf_cech.generators import (GeneratorConfig, curated_examples, diamond_site, f1_presheaf,
                                      function_sheaf, random_presheaf, random_site)
from presheaf_cech.linalg import Matrix, is_iso
from presheaf_cech.plus import plus, sheafify, unit_via_cover
from presheaf_cech.presheaf import constant_presheaf, zero_presheaf


def test_f1_verdict_and_witness():
    v = classify(f1_presheaf())
    assert (v.separated, v.lavish, v.sheaf) == (True, False, False)
    assert v.witnesses == {"separated": None, "lavish": ("X", "a,b"), "sheaf": ("X", "a,b")}
    js = v.to_json()
    assert js["witnesses"]["lavish"] == {"object": "X", "cover": "a,b"}


def test_xi_of_f1():
    F = f1_presheaf()
    k = xi(F, F.site.find_cover("X", ["a", "b"]))
    assert k.shape == (2, 1)


def test_curated_verdicts():
    for ex in curated_examples():
        v = classify(ex.presheaf)
        assert {"separated": v.separated, "lavish": v.lavish, "sheaf": v.sheaf} == ex.expected, ex.name


def test_empty_cover_breaks_separation():
    s = diamond_site(empty_cover_at_bottom=True)
    v = classify(constant_presheaf(s))
    assert v.witnesses["separated"] == ("0", "")
    assert v.lavish


def test_plus_of_f1():
    F = f1_presheaf()
    r = plus(F)
    assert r.plus_presheaf.dims == {"0": 0, "a": 1, "b": 1, "X": 2}
    eta = r.unit["X"]
    assert eta.shape == (2, 1)
    # through the two-leg cover eta is the diagonal, and it agrees with the identity-cover route
    c = F.site.find_cover("X", ["a", "b"])
    assert unit_via_cover(F, r, "X", c) == eta
    assert classify(r.plus_presheaf).sheaf


def test_plus_of_sheaf_is_iso():
    F = function_sheaf()
    assert plus(F).unit.is_iso()


def test_plus_of_zero():
    F = zero_presheaf(diamond_site())
    r = plus(F)
    assert set(r.plus_presheaf.dims.values()) == {0}


def test_sheafify_empty_cover_collapses_bottom():
    s = diamond_site(empty_cover_at_bottom=True)
    sh, unit = sheafify(constant_presheaf(s))
    assert sh.dims == {"0": 0, "a": 1, "b": 1, "X": 2}
    assert classify(sh).sheaf
    assert unit.source.dims["0"] == 1


def test_sheafify_f1_is_one_plus():
    F = f1_presheaf()
    sh, unit = sheafify(F)
    fp = plus(F).plus_presheaf
    assert sh.dims == fp.dims
    assert plus(fp).unit.is_iso()


def _random(seed):
    cfg = GeneratorConfig(seed=seed)
    return random_presheaf(random_site(cfg), cfg)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_plus_properties(seed):
    F = _random(seed)
    r = plus(F)
    v = classify(F)
    assert classify(r.plus_presheaf).separated
    # the unit does not depend on the cover it is computed through
    for x in F.site.objects:
        for c in F.site.covers[x]:
            assert unit_via_cover(F, r, x, c) == r.unit[x]
    if v.sheaf:
        assert r.unit.is_iso()
    if v.separated:
        assert r.unit.is_mono()
        assert classify(r.plus_presheaf).sheaf
    sh, _ = sheafify(F)
    assert classify(sh).sheaf


@pytest.mark.parametrize("seed", range(25))
def test_classify_and_plus_against_oracle(seed):
    F = _random(seed)
    o = Oracle(F.site.to_json(), F.to_json())
    v = classify(F)
    assert o.classify() == {"separated": v.separated, "lavish": v.lavish, "sheaf": v.sheaf}
    fp = plus(F).plus_presheaf
    assert {x: o.plus_dim(x) for x in F.site.objects} == fp.dims


def test_unit_diagonal_on_f1_in_cover_coordinates():
    F = f1_presheaf()
    r = plus(F)
    cp, pieces, colim = r.colimits["X"]
    k = cp.index(F.site.find_cover("X", ["a", "b"]))
    # F1+(X) is the matching space of {a,b}; the cocone there is an iso
    assert is_iso(colim.cocone[k])
    assert pieces[k].inclusion @ xi(F, cp.nodes[k]) == Matrix.from_rows([[1], [1]])
