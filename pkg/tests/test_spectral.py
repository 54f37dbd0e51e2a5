from dataclasses import replace
from pathlib import Path

import pytest
from hypothesis import given, settings

from strategies import random_2_complexes, simplex_closure
from pvcoh.abelian import GroupPresentation, IntMatrix, Status
from pvcoh.approximants import cech_cohomology_of_hull
from pvcoh.delta_complex import CellularMap, DeltaComplex, point, simplicial_cohomology, wedge_of_circles
from pvcoh.errors import NotAMorphism, NotExact
from pvcoh.spectral import (
    CoupleMorphism,
    check_morphism,
    cellular_cochain_map,
    cofiltration_couple,
    couple_equivalence,
    couple_from_skeleton_filtration,
    derive_couple,
    derive_morphism,
    direct_limit_couples,
    filtered_map_morphism,
    identity_morphism,
    pages,
    same_couple,
    sequence_couple_limit,
    skeleton_filtered_complex,
    trivial_couple,
    validate_couple,
)

DATA = Path(__file__).parent / "data"
Z, Z2 = GroupPresentation(1), GroupPresentation(2)


def interval():
    return DeltaComplex({0: ["a", "b"], 1: ["e"]}, {"e": ("b", "a")})


def complexes():
    return {
        "point": point(),
        "wedge": wedge_of_circles(["x", "y"]),
        "interval": interval(),
        "torus": DeltaComplex.load(DATA / "torus.json"),
        "rp2": DeltaComplex.load(DATA / "projective_plane.json"),
        "disk": simplex_closure([(0, 1, 2)], 3),
        "sphere": simplex_closure([(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)], 4),
    }


def check_e2_is_cohomology(K):
    P = pages(couple_from_skeleton_filtration(K))
    H = simplicial_cohomology(K)
    for p, g in enumerate(H):
        assert P.entry(2, p, 0) == g
        assert P.entry(2, p, 1).is_trivial
    return P


@pytest.mark.parametrize("name", list(complexes()))
def test_e2_even_row_is_cohomology(name):
    K = complexes()[name]
    P = check_e2_is_cohomology(K)
    assert P.converged_at is not None and P.converged_at <= 2


@pytest.mark.parametrize("name", list(complexes()))
def test_filtration_and_cofiltration_agree(name):
    eq = couple_equivalence(skeleton_filtered_complex(complexes()[name]))
    assert len(eq.e_isomorphisms) == len(eq.pages_I.pages) == len(eq.pages_F.pages)


def test_cofiltration_couple_is_exact():
    for K in complexes().values():
        validate_couple(cofiltration_couple(K))


def test_k_groups():
    assert pages(couple_from_skeleton_filtration(DeltaComplex.load(DATA / "torus.json"))).k_groups() == \
        {"K^0": Z2, "K^1": Z2}
    assert pages(couple_from_skeleton_filtration(wedge_of_circles(["x", "y"]))).k_groups() == \
        {"K^0": Z, "K^1": Z2}
    # torsion in E_infinity: no assembly
    assert pages(couple_from_skeleton_filtration(DeltaComplex.load(DATA / "projective_plane.json"))).k_groups() is None


def test_derived_trivial_couple():
    D = {(p, n): GroupPresentation(n + 1) for p in range(0, 3) for n in range(2)}
    T = trivial_couple(D, (-1, 0), (0, 0), (1, 1), (0, 2))
    dT = derive_couple(T)
    assert dT.is_trivial()
    assert same_couple(dT, replace(T, deg_j=dT.deg_j))
    assert dT.deg_j == (1, 0)


def test_derivation_changes_only_deg_j():
    T = couple_from_skeleton_filtration(DeltaComplex.load(DATA / "torus.json"))
    dT = derive_couple(T)
    assert (dT.deg_i, dT.deg_k) == (T.deg_i, T.deg_k)
    assert dT.deg_j == (T.deg_j[0] - T.deg_i[0], (T.deg_j[1] - T.deg_i[1]) % 2)


def test_broken_couple_not_exact():
    T = couple_from_skeleton_filtration(DeltaComplex.load(DATA / "torus.json"))
    b = next(b for b, m in T.k.items() if not m.is_zero())
    bad = replace(T, k={**T.k, b: IntMatrix.zeros(T.k[b].rows, T.k[b].cols)}, validated=False)
    with pytest.raises(NotExact):
        validate_couple(bad)


def test_broken_morphism():
    T = couple_from_skeleton_filtration(wedge_of_circles(["x", "y"]))
    check_morphism(identity_morphism(T))
    phi = identity_morphism(T)
    b = next(b for b, m in T.E.items() if m.n_generators)
    bad = CoupleMorphism(T, T, phi.alpha_D, {**phi.alpha_E, b: IntMatrix.identity(T.E[b].n_generators) * 2})
    with pytest.raises(NotAMorphism) as err:
        check_morphism(bad)
    assert "square" in str(err.value)


def fold_map():
    """The wedge of two circles onto one circle."""
    W, C = wedge_of_circles(["x", "y"]), wedge_of_circles(["z"])
    return CellularMap(W, C, {0: {"v": "v"}, 1: {"x": "z", "y": "z"}})


def test_functoriality_of_derivation():
    f = fold_map()
    FC_c, FC_w = skeleton_filtered_complex(f.target), skeleton_filtered_complex(f.source)
    Tc, Tw = couple_from_skeleton_filtration(f.target), couple_from_skeleton_filtration(f.source)
    phi = filtered_map_morphism(FC_c, FC_w, cellular_cochain_map(f), Tc, Tw)
    d1 = derive_morphism(phi, derive_couple(Tc), derive_couple(Tw))
    check_morphism(d1)
    # E_2^{1,0}: Z -> Z^2 is the diagonal
    b = (1, 1)
    assert d1.alpha_E[b].to_lists() in ([[1], [1]], [[-1], [-1]])


def test_derived_identity_is_identity():
    T = couple_from_skeleton_filtration(DeltaComplex.load(DATA / "torus.json"))
    dT = derive_couple(T)
    d1 = derive_morphism(identity_morphism(T), dT, dT)
    check_morphism(d1)
    for b, m in d1.alpha_E.items():
        assert m == IntMatrix.identity(dT.E[b].n_generators)


def test_constant_sequence():
    T = couple_from_skeleton_filtration(DeltaComplex.load(DATA / "torus.json"))
    lim = direct_limit_couples([T, T, T], [identity_morphism(T)] * 2)
    assert lim.status == Status.STABILIZED
    assert all(d.limit == T.E_at(b) for b, d in lim.E_limits.items())


def test_sequence_couple_limit_matches_cech(small_golden_seq):
    seq = small_golden_seq
    complexes_ = [lv.complex for lv in seq.levels]
    res = sequence_couple_limit(complexes_, list(seq.connecting_maps))
    assert res.e2_limit.status == Status.STABILIZED
    E = {b: d.limit for b, d in res.e2_limit.E_limits.items()}
    cech = cech_cohomology_of_hull(seq)
    assert E[(0, 0)] == cech[0].limit == Z
    assert E[(1, 1)] == cech[1].limit == Z2
    assert all(g.is_trivial for b, g in E.items() if b not in ((0, 0), (1, 1)))


def test_pages_json_format():
    out = pages(couple_from_skeleton_filtration(interval())).to_json()
    assert [p["page"] for p in out] == list(range(1, len(out) + 1))
    assert set(out[0]) == {"page", "entries", "converged_at"}
    assert all(k.startswith("(") and k.endswith(")") for k in out[0]["entries"])


@settings(max_examples=25)
@given(random_2_complexes)
def test_random_complexes(K):
    check_e2_is_cohomology(K)
    couple_equivalence(skeleton_filtered_complex(K))
