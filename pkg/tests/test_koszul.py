import json
from math import comb
from pathlib import Path

import pytest
from hypothesis import given, strategies as st

from pvcoh.abelian import GroupPresentation, Status
from pvcoh.delta_complex import DeltaComplex, simplicial_cohomology
from pvcoh.errors import ResolutionUnavailable
from pvcoh.koszul import (
    CantorZdSystem,
    _box,
    build_koszul_complex,
    chain_isomorphism,
    koszul_cohomology,
    kunneth,
    load_system,
    point_system,
    product_system,
    system_from_json,
    system_from_tiling,
    system_from_word,
    torus_covariant_complex,
)

DATA = Path(__file__).parent / "data"
Z, Z2 = GroupPresentation(1), GroupPresentation(2)


def periodic_system(arr, max_R):
    """Two-dimensional system of all cube patterns of a doubly periodic array."""
    p, q = len(arr), len(arr[0])
    windows = {
        R: [tuple(arr[(x + a) % p][(y + b) % q] for a, b in _box(2, R)) for x in range(p) for y in range(q)]
        for R in range(max_R + 1)
    }
    return CantorZdSystem(2, sorted({c for r in arr for c in r}), windows)


def rauzy_complex(word, R):
    """Graph whose vertices are the factors of length R + 1 and edges the factors of length R + 2."""
    V = sorted({word[k:k + R + 1] for k in range(len(word) - R)})
    E = sorted({word[k:k + R + 2] for k in range(len(word) - R - 1)})
    return DeltaComplex({0: V, 1: E}, {e: (e[1:], e[:-1]) for e in E})


@pytest.mark.parametrize("d", [1, 2, 3])
def test_point_binomial(d):
    H = build_koszul_complex(point_system(d, 3), 2).cohomology()
    assert H == [GroupPresentation(comb(d, k)) for k in range(d + 1)]


def test_point_file():
    sys = load_system(DATA / "point_system.json")
    assert [g.rank for g in build_koszul_complex(sys, 3).cohomology()] == [1, 1]
    two = system_from_json({**json.loads((DATA / "point_system.json").read_text()), "d": 2})
    assert [g.rank for g in build_koszul_complex(two, 3).cohomology()] == [1, 2, 1]


def test_fibonacci(fib_sample):
    rep = koszul_cohomology(system_from_tiling(fib_sample, 7), 6)
    assert list(rep) == [(Z, Status.STABILIZED), (Z2, Status.STABILIZED)]
    assert rep.dd_ok


@pytest.mark.parametrize("R", [1, 2, 3, 4])
def test_one_dimensional_is_rauzy_graph(fib_sample, R):
    w = fib_sample.letters
    sys = system_from_word(w, 5)
    assert build_koszul_complex(sys, R).cohomology() == simplicial_cohomology(rauzy_complex(w, R))


@pytest.mark.parametrize("R", [2, 3, 4, 5])
def test_rank_stable_in_resolution(fib_sample, R):
    sys = system_from_tiling(fib_sample, 6)
    assert build_koszul_complex(sys, R).cohomology() == [Z, Z2]


def test_torus_form_isomorphic():
    for sys in (point_system(2, 3), point_system(3, 3), periodic_system([[0, 1], [1, 0]], 3)):
        for R in (1, 2):
            chain_isomorphism(build_koszul_complex(sys, R), torus_covariant_complex(sys, R))
            assert build_koszul_complex(sys, R).cohomology() == torus_covariant_complex(sys, R).cohomology()


def test_kunneth_product(fib_sample):
    one = system_from_tiling(fib_sample, 4)
    prod = product_system(one, one)
    H = build_koszul_complex(prod, 2).cohomology()
    assert H == kunneth([Z, Z2], [Z, Z2]) == [Z, GroupPresentation(4), GroupPresentation(4)]


def test_checkerboard_from_local_rules():
    sys = system_from_json({
        "d": 2,
        "alphabet": [0, 1],
        "allowed_patterns": {"1": [[[0, 1], [1, 0]], [[1, 0], [0, 1]]]},
        "max_resolution": 3,
    })
    assert len(sys.window_basis(3)) == 2
    assert [g.rank for g in build_koszul_complex(sys, 2).cohomology()] == [1, 2, 1]


arrays = st.integers(1, 3).flatmap(
    lambda p: st.integers(1, 3).flatmap(
        lambda q: st.lists(st.lists(st.integers(0, 2), min_size=q, max_size=q), min_size=p, max_size=p)
    )
)


@given(arrays)
def test_periodic_arrays(arr):
    # a finite orbit suspends to a 2-torus
    cx = build_koszul_complex(periodic_system(arr, 4), 3)
    assert cx.dd_violations() == []
    assert cx.cohomology() == [Z, Z2, Z]


@given(st.text("ab", min_size=6, max_size=12), st.integers(1, 3))
def test_dd_and_rauzy_for_random_words(u, R):
    w = u * (40 // len(u) + 2)
    sys = system_from_word(w, R + 1)
    cx = build_koszul_complex(sys, R)
    assert cx.dd_violations() == []
    assert cx.cohomology() == simplicial_cohomology(rauzy_complex(w, R))


def test_resolution_unavailable(fib_sample):
    sys = system_from_tiling(fib_sample, 3)
    with pytest.raises(ResolutionUnavailable):
        build_koszul_complex(sys, 3)
    with pytest.raises(ResolutionUnavailable):
        koszul_cohomology(sys, 1)
