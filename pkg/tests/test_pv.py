import mpmath
import pytest
from hypothesis import given, strategies as st

from pvcoh.abelian import GroupPresentation, Status
from pvcoh.delta_complex import coboundary_matrix, simplicial_cohomology
from pvcoh.errors import DegreeOutOfRange, FaceOutOfRange, InsufficientSample
from pvcoh.pv import (
    CantorCircleFunction,
    canonical_form,
    cantor_circle_normal_form,
    chain_equivalence_violations,
    discrete_transversal,
    dd_violations,
    evaluate,
    frequency_module,
    h1_rank_from_normal_form,
    integral,
    pv_cohomology_hull,
    pv_cohomology_level,
    pv_differential,
    rotation_number,
    theta_matrix,
    theta_relations,
    transversal_of,
)
from pvcoh.tiling import e_minus_two, golden, silver

mpmath.mp.dps = 50
Z, Z2 = GroupPresentation(1), GroupPresentation(2)


def mp(x):
    return mpmath.mpf(str(x.to_decimal(40)))


# ---------------------------------------------------------------- PV complexes

def test_transversal_partitions_level(golden_seq5):
    for l, lv in enumerate(golden_seq5.levels):
        dt = transversal_of(golden_seq5, l)
        for n, cells in lv.complex.cells.items():
            assert sorted(s for _, s in dt.atoms[n]) == sorted(cells)


def test_theta_is_face_incidence(golden_seq5):
    dt = transversal_of(golden_seq5, 2)
    L = dt.level.complex
    for sigma in dt.base.complex.cells[1]:
        for i in (0, 1):
            th = theta_matrix(dt, sigma, i)
            # every sigma-atom has exactly one i-th face
            assert all(sum(th.matrix.row(r)) == 1 for r in range(th.matrix.rows))
            for r, s in enumerate(th.rows):
                assert th.cols[th.matrix.row(r).index(1)] == L.faces[s][i]


def test_chain_equivalence_and_dd(golden_seq5, silver_seq5):
    for seq in (golden_seq5, silver_seq5):
        for l in range(len(seq.levels)):
            dt = transversal_of(seq, l)
            assert chain_equivalence_violations(dt) == []
            assert dd_violations(dt) == []


def test_pv_level_equals_simplicial(golden_seq5):
    for l, lv in enumerate(golden_seq5.levels):
        assert pv_cohomology_level(transversal_of(golden_seq5, l)) == simplicial_cohomology(lv.complex)


def test_base_as_its_own_level(golden_seq5):
    B0 = golden_seq5.levels[0]
    dt = discrete_transversal(B0)
    assert dt.rank(0) == 1 and dt.rank(1) == 2
    assert pv_differential(dt, 1) @ dt.rho(0) == dt.rho(1) @ coboundary_matrix(B0.complex, 1)


def test_face_out_of_range(golden_seq5):
    dt = transversal_of(golden_seq5, 1)
    sigma = dt.base.complex.cells[1][0]
    with pytest.raises(FaceOutOfRange):
        theta_matrix(dt, sigma, 2)
    with pytest.raises(FaceOutOfRange):
        theta_matrix(dt, "no such simplex", 0)


def test_degree_out_of_range(golden_seq5):
    with pytest.raises(DegreeOutOfRange):
        pv_differential(transversal_of(golden_seq5, 1), 2)


def test_theta_relations(golden_seq5, silver_seq5):
    for seq in (golden_seq5, silver_seq5):
        for l in range(len(seq.levels) - 1):
            rep = theta_relations(seq, l)
            assert rep.ok and rep.checks > 0, rep.failures


def test_theta_relations_need_next_level(golden_seq5):
    with pytest.raises(InsufficientSample):
        theta_relations(golden_seq5, len(golden_seq5.levels) - 1)


def test_pv_hull(golden_seq5):
    rep = pv_cohomology_hull(golden_seq5)
    assert list(rep) == [(Z, Status.STABILIZED), (Z2, Status.STABILIZED)]
    assert all(r.ok for r in rep.theta)
    for d in rep.limits[1].maps:
        assert d.isomorphism


# ---------------------------------------------------------------- Cantor circle

def test_golden_frequency_module():
    r = frequency_module(golden()).rotation
    assert abs(mp(r) - (3 - mpmath.sqrt(5)) / 2) < 1e-30


def test_silver_and_e_rotation_numbers():
    assert abs(mp(rotation_number(silver())) - (1 - 1 / mpmath.sqrt(2))) < 1e-30
    e = mpmath.e
    assert abs(mp(rotation_number(e_minus_two())) - (e - 2) / (e - 1)) < 1e-12


def test_normal_form_examples():
    a = golden()
    chi = CantorCircleFunction(((1, 0, 1),))
    assert cantor_circle_normal_form(CantorCircleFunction((), 1), a) == (0, 1)
    assert cantor_circle_normal_form(chi, a) == (1, 0)
    assert cantor_circle_normal_form(chi.rotated(3), a) == (1, 0)
    assert cantor_circle_normal_form(chi.coboundary(), a) == (0, 0)


def test_full_circle_in_two_arcs():
    # [0, a') + [a', 0) covers the circle once
    f = CantorCircleFunction(((1, 0, 1), (1, 1, 0)))
    assert cantor_circle_normal_form(f, golden()) == (0, 1)
    assert canonical_form(f, golden()) == CantorCircleFunction((), 1)


def test_h1_rank_is_two():
    for a in (golden(), silver(), e_minus_two()):
        assert h1_rank_from_normal_form(a) == 2


arcs = st.lists(st.tuples(st.integers(-5, 5), st.integers(-12, 12), st.integers(-12, 12)), max_size=5)


@given(arcs, st.integers(-3, 3), arcs, st.integers(-4, 4))
def test_normal_form_invariant_under_coboundaries(terms, c, gterms, k):
    a = golden()
    f = CantorCircleFunction(tuple(terms), c)
    g = CantorCircleFunction(tuple(gterms))
    assert cantor_circle_normal_form(f + g.rotated(k) - g.rotated(k + 1), a) == cantor_circle_normal_form(f, a)


@given(arcs, st.integers(-3, 3))
def test_integral_matches_arc_lengths(terms, c):
    a = golden()
    ap = (3 - mpmath.sqrt(5)) / 2
    f = CantorCircleFunction(tuple(terms), c)
    want = c + sum(k * mpmath.frac((m - l) * ap) for k, l, m in terms)
    got = integral(f, a)
    got = mpmath.mpf(got) if isinstance(got, int) else mp(got)
    assert abs(got - want) < 1e-30


@given(arcs, st.integers(-30, 30))
def test_canonical_form_same_function(terms, x):
    a = silver()
    f = CantorCircleFunction(tuple(terms))
    assert evaluate(canonical_form(f, a), a, x) == evaluate(f, a, x)


def test_evaluate_against_floats():
    a = golden()
    ap = (3 - mpmath.sqrt(5)) / 2
    f = CantorCircleFunction(((2, 1, 4), (-1, 5, 2)), 1)
    for x in range(-20, 20):
        p = mpmath.frac(x * ap)
        want = 1
        for c, l, m in f.terms:
            lo, hi = mpmath.frac(l * ap), mpmath.frac(m * ap)
            inside = lo <= p < hi if lo < hi else (p >= lo or p < hi)
            want += c * inside
        assert evaluate(f, a, x) == want


def test_json_roundtrip():
    f = CantorCircleFunction(((2, 1, 4),), 3)
    assert CantorCircleFunction.from_json(f.to_json()) == f
