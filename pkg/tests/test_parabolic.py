import pytest

from kmcrystal.b_infinity import enumerate_graph
from kmcrystal.parabolic import (
    LeviSpec,
    c_nu_elements,
    check_parabolic,
    extract_bm,
    highest_weight_split,
    hom_multiplicity_oracle,
    parabolic_table,
    star_fiber_report,
    verify_complete_decomposition,
)
from kmcrystal.root_datum import RootDatumError, affinize, build_finite


@pytest.fixture(scope="module")
def a2_graph8(a2):
    return enumerate_graph(a2, 8)


def test_levi_spec_validation(a2, a1_aff):
    with pytest.raises(RootDatumError):
        LeviSpec.make(a2, {3})
    with pytest.raises(RootDatumError):
        LeviSpec.make(a1_aff, {0, 1})  # the whole affine diagram is not finite type


def test_bm_counts_example(a2_graph8):
    # |B(a1+a2)| = |B^m(a2)| |B_m(a1)| + |B^m(a1+a2)| = 1 + 1 for m = {1}
    bm = extract_bm(a2_graph8, {1}).weight_counts()
    assert bm[(0, 1)] == 1 and bm[(1, 1)] == 1
    assert (1, 0) not in bm
    assert bm[(0, 0)] == 1


def test_complete_decomposition(a2_graph8, a1_aff_graph4):
    for m in ({1}, {2}, set(), {1, 2}):
        assert verify_complete_decomposition(a2_graph8, m).ok
    for m in ({0}, {1}):
        assert verify_complete_decomposition(a1_aff_graph4, m).ok


def test_empty_levi_is_torus_case(a2):
    g = enumerate_graph(a2, 4)
    split = highest_weight_split(extract_bm(g, set()))
    assert len(split.components) == len(g)
    for lam in [(0, 0), (1, 1), (2, 1), (2, 2)]:
        assert hom_multiplicity_oracle(a2, set(), lam, 4) == a2.kostant_partition(lam)


def test_rank_one_collapses_into_strings():
    a1 = build_finite("A", 1)
    g = enumerate_graph(a1, 5)
    bm = extract_bm(g, {1})
    assert bm.members == [0]
    split = highest_weight_split(bm)
    assert split.multiplicities == {(0,): 1}


def test_symmetric_power_multiplicities(a2):
    # m = {1}: U(n(p)) = Sym(V) with V two-dimensional; Sym^k V is irreducible
    g = enumerate_graph(a2, 6)
    split = highest_weight_split(extract_bm(g, {1}))
    for k in range(0, 4):
        assert split.multiplicities.get((0, k)) == 1
        assert hom_multiplicity_oracle(a2, {1}, (0, k), 6) == 1


def test_weight_a1_plus_2a2_has_no_invariant(a2_graph8, a2):
    # the monomial of weight a1 + 2 a2 is the middle vector of Sym^2 V, not an invariant
    assert hom_multiplicity_oracle(a2, {1}, (1, 2), 8) == 0
    assert c_nu_elements(a2_graph8, {1}, (1, 2)) == []


def test_oracle_undetermined_beyond_bound(a2):
    assert hom_multiplicity_oracle(a2, {1}, (0, 5), 4) is None


def test_c_nu_examples(a2_graph8):
    assert c_nu_elements(a2_graph8, {1}, (0, 0)) == [0]
    assert len(c_nu_elements(a2_graph8, {1}, (0, 1))) == 1
    # m = I: only the zero element is killed by all f_i
    assert c_nu_elements(a2_graph8, {1, 2}, (1, 1)) == []


@pytest.mark.parametrize("m", [{1}, {2}])
def test_three_way_a2(a2_graph8, m):
    rows = parabolic_table(a2_graph8, m)
    assert rows and all(r.status != "MISMATCH" for r in rows)
    complete = [r for r in rows if r.mult_graph is not None]
    assert complete
    assert all(r.mult_graph == r.mult_char == r.mult_cnu for r in complete)


@pytest.mark.parametrize(
    "datum,height,levis",
    [
        (build_finite("B", 2), 6, [{1}, {2}]),
        (build_finite("A", 3), 5, [{1, 2}, {2}, {1, 3}]),
        (affinize(build_finite("A", 1)), 5, [{0}, {1}]),
        (affinize(build_finite("A", 2)), 4, [{1, 2}, {0}]),
    ],
    ids=["B2", "A3", "A1aff", "A2aff"],
)
def test_check_parabolic_other_types(datum, height, levis):
    g = enumerate_graph(datum, height)
    for m in levis:
        rep = check_parabolic(g, m)
        assert rep.ok, rep.violations[:3]


def test_star_fibres(a2_graph8):
    rep = star_fiber_report(a2_graph8, {1})
    assert rep.ok and rep.checked == len(a2_graph8)
