from collections import Counter

import pytest

from pvcoh.abelian import GroupPresentation, Status, determinant
from pvcoh.approximants import (
    build_patch_space,
    build_prototile_space,
    build_proper_sequence,
    cech_cohomology_of_hull,
    is_zoomed_out,
    key_word,
)
from pvcoh.delta_complex import simplicial_cohomology, validate_complex
from pvcoh.errors import NotComparable, PatternNotFound
from pvcoh.tiling import Pattern, Tiling1DSample, cut_and_project_sample, golden, silver

Z = GroupPresentation(1)
Z2 = GroupPresentation(2)


def test_prototile_space_fibonacci(fib_sample):
    B0 = build_prototile_space(fib_sample)
    assert simplicial_cohomology(B0.complex) == [Z, Z2]


def test_prototile_space_periodic():
    B0 = build_prototile_space(Tiling1DSample.from_word("a" * 40))
    assert (B0.complex.n_cells(0), B0.complex.n_cells(1)) == (1, 1)


def test_collared_prototile_space(fib_sample):
    B = build_prototile_space(fib_sample, collared=True)
    w = fib_sample.letters
    collared = {w[i - 1:i + 2] for i in range(1, len(w) - 1)}
    assert B.complex.n_cells(1) == len(collared)
    assert validate_complex(B.complex).valid


def test_patch_space_single_letter(fib_sample):
    ps = build_patch_space(fib_sample, Pattern("a"))
    w = fib_sample.letters
    for u in ps.units:
        block = w[u.start:u.end]
        # a 'b' sits on the midpoint between two 'a' punctures and joins the cell on its right
        assert block.count("a") == 1 and w[u.anchor] == "a"
        assert block in ("a", "ba")
    assert [u.start for u in ps.units[1:]] == [u.end for u in ps.units[:-1]]


def test_patch_space_right_rule():
    # anchors at 0 and 2 put the boundary exactly on the puncture of tile 1
    s = Tiling1DSample.from_word("abababababab")
    ps = build_patch_space(s, Pattern("a"))
    assert all(s.letters[u.start:u.end] == "ba" for u in ps.units)


def test_patch_space_periodic():
    ps = build_patch_space(Tiling1DSample.from_word("ab" * 30), Pattern("ab"))
    assert len(ps.classes) == 1
    assert simplicial_cohomology(ps.complex) == [Z, Z]


def test_pattern_not_found(fib_sample):
    with pytest.raises(PatternNotFound):
        build_patch_space(fib_sample, Pattern("bb"))


def test_zoom_self_fails(golden_seq5):
    lv = golden_seq5.levels[2]
    cert = is_zoomed_out(lv, lv)
    assert not cert and cert.violated == "(ii)"


def test_zoom_collared_over_prototiles(golden_seq5):
    assert is_zoomed_out(golden_seq5.levels[1], golden_seq5.levels[0])


def test_zoom_consecutive_levels(golden_seq5):
    for fine, coarse in zip(golden_seq5.levels[1:], golden_seq5.levels):
        assert is_zoomed_out(fine, coarse)


def test_zoom_not_comparable(golden_seq5, silver_seq5):
    with pytest.raises(NotComparable):
        is_zoomed_out(golden_seq5.levels[1], silver_seq5.levels[1])


def test_proper_sequence_fibonacci(golden_seq5):
    seq = golden_seq5
    assert len(seq.levels) >= 4 and seq.proper
    for f in seq.connecting_maps:
        f.check()
        assert f.is_surjective()
    for l in range(len(seq.levels)):
        p = seq.projection(l)
        p.check()
        assert p.is_surjective()


def test_zoom_decompositions_are_exact(golden_seq5):
    for l, cert in enumerate(golden_seq5.zoom_certificates):
        fine = golden_seq5.levels[l + 1]
        coarse_units = {u.key for u in golden_seq5.levels[l].units}
        for patch, pieces in cert.decompositions.items():
            assert Counter("".join(key_word(p) for p in pieces)) == Counter(key_word(patch))
            assert set(pieces) <= coarse_units
        assert set(cert.decompositions) == {u.key for u in fine.units if u.key in cert.decompositions}


def test_one_level():
    seq = build_proper_sequence(cut_and_project_sample(golden(), 200), 1)
    assert len(seq.levels) == 1 and not seq.connecting_maps


def test_h1_maps_unimodular(golden_seq5):
    seq = golden_seq5.prefix(4)
    h0, h1 = cech_cohomology_of_hull(seq)
    for r in h1.maps:
        assert r.matrix.shape == (2, 2) and abs(determinant(r.matrix)) == 1
    for r in h0.maps:
        assert r.matrix.to_lists() == [[1]]


def test_cech_golden(golden_seq5):
    h0, h1 = cech_cohomology_of_hull(golden_seq5.prefix(4))
    assert tuple(h0) == (Z, Status.STABILIZED)
    assert tuple(h1) == (Z2, Status.STABILIZED)


def test_cech_silver(silver_seq5):
    h0, h1 = cech_cohomology_of_hull(silver_seq5.prefix(4))
    assert (h0.limit, h1.limit, h1.status) == (Z, Z2, Status.STABILIZED)


def test_cech_periodic():
    seq = build_proper_sequence(Tiling1DSample.from_word("a" * 300), 3, allow_unzoomed=True)
    h0, h1 = cech_cohomology_of_hull(seq)
    assert (h0.limit, h1.limit) == (Z, Z)
    assert not seq.proper


def test_rebuild_from_doubled_sample():
    a = build_proper_sequence(cut_and_project_sample(golden(), 1500), 4)
    b = build_proper_sequence(cut_and_project_sample(golden(), 3000), 4)
    for x, y in zip(a.levels, b.levels):
        assert (x.complex.n_cells(0), x.complex.n_cells(1)) == (y.complex.n_cells(0), y.complex.n_cells(1))
        assert {key_word(k[1]) if isinstance(k, tuple) and len(k) == 3 else key_word(k) for k in x.classes} == \
            {key_word(k[1]) if isinstance(k, tuple) and len(k) == 3 else key_word(k) for k in y.classes}


def test_truncation_reported():
    seq = build_proper_sequence(cut_and_project_sample(silver(), 150), 8)
    assert seq.truncated and len(seq.levels) < 8
