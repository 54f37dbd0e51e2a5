"""Hypothesis strategies shared by several test modules."""

from hypothesis import strategies as st

from pvcoh.delta_complex import DeltaComplex


def simplex_closure(tris, n_vertices):
    """Ordered simplicial complex generated by triangles and edges on vertices 0..n-1."""
    edges = sorted({(t[i], t[j]) for t in tris for i in range(3) for j in range(i + 1, 3)})
    verts = [f"v{k}" for k in range(n_vertices)]
    cells = {0: verts, 1: [f"e{a}{b}" for a, b in edges], 2: [f"t{a}{b}{c}" for a, b, c in tris]}
    faces = {f"e{a}{b}": (f"v{b}", f"v{a}") for a, b in edges}
    faces.update({f"t{a}{b}{c}": (f"e{b}{c}", f"e{a}{c}", f"e{a}{b}") for a, b, c in tris})
    return DeltaComplex(cells, faces)


random_2_complexes = st.integers(3, 6).flatmap(
    lambda n: st.lists(
        st.tuples(st.integers(0, n - 1), st.integers(0, n - 1), st.integers(0, n - 1))
        .filter(lambda t: len(set(t)) == 3)
        .map(lambda t: tuple(sorted(t))),
        min_size=1, max_size=6, unique=True,
    ).map(lambda tris: simplex_closure(tris, n))
)
