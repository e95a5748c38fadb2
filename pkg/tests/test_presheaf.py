import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from presheaf_cech.errors import FunctorialityError, NaturalityError
from presheaf_cech.generators import (GeneratorConfig, diamond_site, f1_presheaf, random_presheaf,
                                      random_set_presheaf, random_site)
from presheaf_cech.linalg import Matrix, is_epi, is_mono, rank
from presheaf_cech.presheaf import (NatTransformation, Presheaf, abelianize, cokernel_presheaf,
                                    constant_presheaf, epi_mono_factorization, identity_nat,
                                    image_presheaf, is_flasque, kernel_presheaf, validate_presheaf,
                                    zero_nat, zero_presheaf)


def test_f1_restrictions_compose():
    F = f1_presheaf()
    assert F.restriction("a", "X") == Matrix.identity(1)
    assert F.restriction("0", "X").shape == (0, 1)
    assert F.restriction("X", "X") == Matrix.identity(1)
    with pytest.raises(ValueError):
        F.restriction("a", "b")


def test_path_dependence_is_rejected():
    s = diamond_site()
    two = Matrix.identity(2)
    swap = Matrix.from_rows([[0, 1], [1, 0]])
    with pytest.raises(FunctorialityError):
        Presheaf(s, {o: 2 for o in s.objects},
                 {("a", "X"): two, ("b", "X"): two, ("0", "a"): two, ("0", "b"): swap})


def test_bad_shapes_and_missing_edges():
    s = diamond_site()
    with pytest.raises(FunctorialityError):
        Presheaf(s, {"X": 1, "a": 1, "b": 1, "0": 0}, {("a", "X"): Matrix.identity(2)})
    with pytest.raises(FunctorialityError):
        Presheaf(s, {"X": 1, "a": 1, "b": 1, "0": 0}, {("a", "X"): Matrix.identity(1)})
    with pytest.raises(FunctorialityError):
        validate_presheaf(s, {"dims": {"X": 1}})
    with pytest.raises(FunctorialityError):
        validate_presheaf(s, {"dims": {"X": 1, "a": 1, "b": 1, "0": 0},
                              "restrictions": {"a-X": Matrix.identity(1).to_json()}})


def test_json_round_trip():
    F = f1_presheaf()
    G = validate_presheaf(F.site, F.to_json())
    assert G.dims == F.dims and G.edges == F.edges


def test_flasque():
    assert is_flasque(f1_presheaf()) == (True, None)
    s = diamond_site()
    F = Presheaf(s, {"X": 0, "a": 1, "b": 1, "0": 1},
                 {("0", "a"): Matrix.identity(1), ("0", "b"): Matrix.identity(1)})
    ok, edge = is_flasque(F)
    assert not ok and edge[1] == "X"


def test_naturality_checked():
    s = diamond_site()
    C = constant_presheaf(s)
    with pytest.raises(NaturalityError):
        NatTransformation(C, C, {"X": Matrix.identity(1), "a": Matrix.zeros(1, 1),
                                 "b": Matrix.identity(1), "0": Matrix.identity(1)})
    t = identity_nat(C)
    assert t.is_iso() and t.then(t).is_iso()
    z = zero_nat(C, C)
    assert not z.is_mono() and not z.is_epi()


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_kernel_cokernel_image_of_random_maps(seed):
    cfg = GeneratorConfig(seed=seed, max_objects=5)
    site = random_site(cfg)
    F = random_presheaf(site, cfg)
    # a random natural map F -> F: scalar multiples keep naturality
    t = NatTransformation(F, F, {x: Matrix.identity(d).scale(seed % 3) for x, d in F.dims.items()})
    K, incl = kernel_presheaf(t)
    C, proj = cokernel_presheaf(t)
    mid, lam = image_presheaf(t)
    sigma, mid2, lam2 = epi_mono_factorization(t)
    for x in site.objects:
        assert is_mono(incl[x]) and is_epi(proj[x]) and is_mono(lam[x])
        assert (t[x] @ incl[x]).is_zero() and (proj[x] @ t[x]).is_zero()
        assert K.dims[x] + mid.dims[x] == F.dims[x]
        assert C.dims[x] == F.dims[x] - rank(t[x])
        assert lam2[x] @ sigma[x] == t[x]


def test_zero_and_constant():
    s = diamond_site()
    assert set(zero_presheaf(s).dims.values()) == {0}
    assert constant_presheaf(s, 2).restriction("0", "X") == Matrix.identity(2)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_abelianized_sets_have_selection_matrices(seed):
    cfg = GeneratorConfig(seed=seed, max_objects=6, flavor="set-valued")
    S = random_set_presheaf(random_site(cfg), cfg)
    F = abelianize(S)
    for m in F.edges.values():
        for j in range(m.cols):
            assert sorted(m.col(j)) == [0] * (m.rows - 1) + [1]
