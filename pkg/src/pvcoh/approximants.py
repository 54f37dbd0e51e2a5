"""Prototile spaces, patch spaces and proper sequences for 1D samples.

Every approximant is a graph-like Delta-complex whose edges are the tiles
of the sample, sorted into classes (prototiles, collared prototiles, or
tiles at a given position inside a collared patch). Vertex cells come from
gluing tile ends along the adjacencies seen in the sample. Each approximant
also remembers which cell every tile and every tile endpoint of the sample
falls in; connecting maps are read off from these records.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Any, Hashable

from .abelian import DirectLimit, DirectSystem, GroupPresentation, direct_limit_fg
from .delta_complex import CellularMap, DeltaComplex, simplicial_cohomology, simplicial_cohomology_bases
from .errors import InsufficientSample, NotComparable, PatternNotFound
from .tiling import Pattern, Tiling1DSample


@dataclass(frozen=True)
class Unit:
    """A run of tiles [start, end) of the sample forming one tile of a (super)tiling."""

    start: int
    end: int
    key: Hashable
    anchor: int  # tile index carrying the puncture


class _UnionFind:
    def __init__(self):
        self.parent: dict = {}

    def find(self, x):
        self.parent.setdefault(x, x)
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            # smaller repr wins so the result does not depend on call order
            if repr(rb) < repr(ra):
                ra, rb = rb, ra
            self.parent[rb] = ra


def _unit_length(key) -> int:
    if isinstance(key, str):
        return 1
    children, _ = key
    return sum(_unit_length(c) for c in children)


def key_word(key) -> str:
    """Tile word of a (possibly nested) supertile key."""
    if isinstance(key, str):
        return key
    return "".join(key_word(c) for c in key[0])


@dataclass
class Approximant:
    """Common part of prototile and patch spaces."""

    sample: Tiling1DSample
    complex: DeltaComplex
    units: list[Unit]
    classes: dict[Hashable, list[str]]  # class -> its edge ids in tile order
    tile_cell: dict[int, str]
    vertex_cell: dict[int, str]
    collared: bool
    level: int = 0
    adjacencies: frozenset = frozenset()
    projection: CellularMap | None = None  # map onto the uncollared prototile space

    @property
    def covered(self) -> tuple[int, int]:
        ts = sorted(self.tile_cell)
        return (ts[0], ts[-1] + 1) if ts else (0, 0)

    def cohomology(self) -> list[GroupPresentation]:
        return simplicial_cohomology(self.complex)

    def to_json(self) -> dict:
        return {
            "level": self.level,
            "collared": self.collared,
            "complex": self.complex.to_json(),
            "classes": [
                {"key": key_json(k), "word": key_word(_core(k, self.collared)), "edges": es}
                for k, es in self.classes.items()
            ],
        }

    def to_dot(self, name: str = "B") -> str:
        K = self.complex
        lines = [f"digraph {name} {{", "  rankdir=LR;"]
        for v in K.cells[0]:
            lines.append(f'  "{v}" [shape=point];')
        labels = {}
        for k, es in self.classes.items():
            w = key_word(_core(k, self.collared))
            for j, e in enumerate(es):
                labels[e] = w[j]
        for e in K.cells.get(1, []):
            tail, head = K.faces[e][1], K.faces[e][0]
            lines.append(f'  "{tail}" -> "{head}" [label="{e}:{labels.get(e, "")}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def _core(key, collared: bool):
    return key[1] if collared else key


def key_json(key) -> Any:
    if isinstance(key, str):
        return key
    if isinstance(key, tuple) and len(key) == 2 and isinstance(key[1], int):
        return {"children": [key_json(c) for c in key[0]], "anchor": key[1]}
    return [key_json(k) for k in key]


@dataclass
class PrototileSpace(Approximant):
    @property
    def tile_cells(self) -> dict[Hashable, list[str]]:
        return self.classes


@dataclass
class PatchSpace(Approximant):
    pattern: Pattern | None = None
    patches: dict[Hashable, str] = field(default_factory=dict)
    puncture_assignment: str = "u=+1: a puncture on a Voronoi boundary joins the cell on its right"


def _glue(sample: Tiling1DSample, units: list[Unit], collared: bool):
    """Build the complex of a supertiling given as consecutive units."""
    if collared:
        if len(units) < 3:
            raise InsufficientSample("need at least three consecutive patches to collar")
        classified = [
            (u, (units[k - 1].key, u.key, units[k + 1].key)) for k, u in enumerate(units) if 0 < k < len(units) - 1
        ]
    else:
        if not units:
            raise InsufficientSample("empty sample")
        classified = [(u, u.key) for u in units]

    class_keys = sorted({c for _, c in classified}, key=repr)
    uf = _UnionFind()
    adj = set()
    for (u1, c1), (u2, c2) in zip(classified, classified[1:]):
        uf.union(("R", c1), ("L", c2))
        adj.add((c1, c2))
    lengths = {c: u.end - u.start for u, c in classified}

    members = []
    for c in class_keys:
        members.append(("L", c))
        members.append(("R", c))
        members += [("I", c, j) for j in range(1, lengths[c])]
    groups: dict = {}
    for m in members:
        r = m if m[0] == "I" else uf.find(m)
        groups.setdefault(r, []).append(m)
    ordered = sorted(groups.values(), key=lambda g: min(repr(x) for x in g))
    vid = {}
    for i, g in enumerate(ordered):
        for m in g:
            vid[m] = f"v{i}"

    def vertex(c, j):
        if j == 0:
            return vid[("L", c)]
        if j == lengths[c]:
            return vid[("R", c)]
        return vid[("I", c, j)]

    edges, faces, classes = [], {}, {}
    for c in class_keys:
        es = []
        for j in range(lengths[c]):
            e = f"e{len(edges)}"
            edges.append(e)
            faces[e] = (vertex(c, j + 1), vertex(c, j))  # (d_0 = head, d_1 = tail)
            es.append(e)
        classes[c] = es
    verts = [f"v{i}" for i in range(len(ordered))]
    punct = {v: "vertex" for v in verts}
    punct.update({e: "left endpoint" for e in edges})
    K = DeltaComplex({0: verts, 1: edges}, faces, punct)

    tile_cell, vertex_cell = {}, {}
    for u, c in classified:
        for t in range(u.start, u.end):
            tile_cell[t] = classes[c][t - u.start]
            vertex_cell[t] = vertex(c, t - u.start)
        vertex_cell[u.end] = vertex(c, lengths[c])
    return K, classes, tile_cell, vertex_cell, frozenset(adj)


def tile_units(sample: Tiling1DSample) -> list[Unit]:
    return [Unit(t, t + 1, c, t) for t, c in enumerate(sample.letters)]


def build_prototile_space(sample: Tiling1DSample, collared: bool = False) -> PrototileSpace:
    """Glue (collared) prototiles along the adjacencies observed in the sample."""
    if len(sample) < (3 if collared else 1):
        raise InsufficientSample("sample too short")
    units = tile_units(sample)
    K, classes, tc, vc, adj = _glue(sample, units, collared)
    sp = PrototileSpace(sample, K, units, classes, tc, vc, collared, 0, adj)
    if not collared:
        sp.projection = CellularMap(K, K, {n: {c: c for c in cs} for n, cs in K.cells.items()})
    return sp


def map_between(finer: Approximant, coarser: Approximant) -> CellularMap:
    """The cellular map sending each cell of ``finer`` to the cell of ``coarser`` under the same sample tile.

    Raises InsufficientSample if the records do not define a function or do
    not reach every cell.
    """
    if finer.sample is not coarser.sample:
        raise NotComparable("approximants come from different samples")
    imgs: dict[int, dict[str, str]] = {0: {}, 1: {}}
    for dim, src, tgt in ((1, finer.tile_cell, coarser.tile_cell), (0, finer.vertex_cell, coarser.vertex_cell)):
        for pos, cell in src.items():
            if pos not in tgt:
                continue
            prev = imgs[dim].setdefault(cell, tgt[pos])
            if prev != tgt[pos]:
                raise InsufficientSample(f"cell {cell} has two images {prev} and {tgt[pos]}")
    f = CellularMap(finer.complex, coarser.complex, imgs)
    missing = [c for n in (0, 1) for c in finer.complex.cells.get(n, []) if c not in imgs[n]]
    if missing:
        raise InsufficientSample(f"cells {missing[:3]} have no image in the coarser space")
    f.check()
    return f


# ---------------------------------------------------------------- patch spaces

def find_occurrences(sample: Tiling1DSample, word: str, anchor: int) -> list[int]:
    """Tile indices carrying the anchor tile of an occurrence of ``word``."""
    letters = sample.letters
    out = []
    start = letters.find(word)
    while start != -1:
        out.append(start + anchor)
        start = letters.find(word, start + 1)
    return out


def voronoi_units(sample: Tiling1DSample, base: list[Unit], anchors: list[int]) -> list[Unit]:
    """Group the base units into the Voronoi cells of the given anchor punctures.

    A base unit goes to cell k when its puncture x satisfies
    m_{k-1} <= x < m_k, with m_k the midpoint of consecutive anchor
    punctures: a puncture on a boundary is u-interior, u = +1, to the cell on
    its right. Cells at the two ends of the sample are dropped because their
    outer boundary is unknown.
    """
    P = sample.punctures
    base_anchor = {u.anchor: k for k, u in enumerate(base)}
    anchors = [a for a in anchors if a in base_anchor]
    if len(anchors) < 3:
        return []
    two_x = [P[u.anchor] * 2 for u in base]
    out = []
    b = 0
    for k in range(1, len(anchors) - 1):
        lo = P[anchors[k - 1]] + P[anchors[k]]
        hi = P[anchors[k]] + P[anchors[k + 1]]
        while b < len(base) and two_x[b] < lo:
            b += 1
        first = b
        while b < len(base) and two_x[b] < hi:
            b += 1
        members = base[first:b]
        if not members or members[0].start != (out[-1].end if out else members[0].start):
            raise InsufficientSample("Voronoi cells do not tile the sample")
        own = base_anchor[anchors[k]] - first
        key = (tuple(u.key for u in members), own)
        out.append(Unit(members[0].start, members[-1].end, key, anchors[k]))
    return out


def _make_patch_space(sample, units, pattern, level) -> PatchSpace:
    K, classes, tc, vc, adj = _glue(sample, units, True)
    patches = {c: key_word(c[1]) for c in classes}
    return PatchSpace(sample, K, units, classes, tc, vc, True, level, adj, None, pattern, patches)


def build_patch_space(sample: Tiling1DSample, pattern: Pattern, base: Approximant | None = None,
                      level: int = 1) -> PatchSpace:
    """Patch space of ``pattern``: Voronoi cells of its occurrences, filled with tiles, collared and glued.

    With ``base`` the cells are filled with the patches of ``base`` instead of
    single tiles, so that every new patch is a union of old ones.
    """
    occ = find_occurrences(sample, pattern.word, pattern.anchor)
    if not occ:
        raise PatternNotFound(f"pattern {pattern.word!r} does not occur in the sample")
    if len(occ) < 2:
        raise InsufficientSample(f"pattern {pattern.word!r} occurs only once")
    base_units = base.units if base is not None else tile_units(sample)
    units = voronoi_units(sample, base_units, occ)
    if len(units) < 3:
        raise InsufficientSample(f"too few complete Voronoi cells for {pattern.word!r}")
    pat = Pattern(pattern.word, len(occ), pattern.collared, pattern.left_context, pattern.right_context, pattern.anchor)
    ps = _make_patch_space(sample, units, pat, level)
    b0 = build_prototile_space(sample, collared=False)
    ps.projection = map_between(ps, b0)
    return ps


# ---------------------------------------------------------------- zoom

@dataclass
class ZoomCertificate:
    holds: bool
    violated: str | None = None
    detail: str = ""
    decompositions: dict = field(default_factory=dict)  # finer patch -> coarser pieces
    interior_witness: dict = field(default_factory=dict)  # finer patch -> index of an interior piece

    def __bool__(self) -> bool:
        return self.holds

    def to_json(self) -> dict:
        return {
            "holds": self.holds,
            "violated": self.violated,
            "detail": self.detail,
            "decompositions": {key_word(k): [key_word(p) for p in v] for k, v in self.decompositions.items()},
            "interior_witness": {key_word(k): v for k, v in self.interior_witness.items()},
        }


def _zoom_from_units(fine: list[Unit], coarse: list[Unit]) -> ZoomCertificate:
    by_start = {u.start: k for k, u in enumerate(coarse)}
    lo, hi = coarse[0].start, coarse[-1].end
    decomp, witness = {}, {}
    for u in fine:
        if u.start < lo or u.end > hi:
            continue
        k = by_start.get(u.start)
        pieces = []
        while k is not None and k < len(coarse) and coarse[k].end <= u.end:
            pieces.append(coarse[k])
            k += 1
        if k is None or not pieces or pieces[-1].end != u.end:
            return ZoomCertificate(False, "(i)", f"patch at tiles [{u.start}, {u.end}) is not a union of coarser patches")
        if "".join(key_word(p.key) for p in pieces) != key_word(u.key):
            return ZoomCertificate(False, "(i)", f"tile words disagree at [{u.start}, {u.end})")
        inner = [j for j, p in enumerate(pieces) if p.start > u.start and p.end < u.end]
        if not inner:
            return ZoomCertificate(False, "(ii)", f"patch {key_word(u.key)!r} has no coarser patch in its interior")
        decomp.setdefault(u.key, [p.key for p in pieces])
        witness.setdefault(u.key, inner[0])
    return ZoomCertificate(True, None, "", decomp, witness)


def is_zoomed_out(finer: Approximant, coarser: Approximant) -> ZoomCertificate:
    """Check that every patch of ``finer`` is a union of patches of ``coarser``
    and contains one of them in its interior."""
    if finer.sample is not coarser.sample:
        raise NotComparable("approximants were built from different samples")
    return _zoom_from_units(finer.units, coarser.units)


# ---------------------------------------------------------------- proper sequences

@dataclass
class ProperSequence:
    levels: list[Approximant]
    connecting_maps: list[CellularMap]
    zoom_certificates: list[ZoomCertificate]
    requested_levels: int
    certified: list[bool] = field(default_factory=list)

    @property
    def truncated(self) -> bool:
        return len(self.levels) < self.requested_levels

    @property
    def proper(self) -> bool:
        return all(self.zoom_certificates)

    @property
    def sample(self) -> Tiling1DSample:
        return self.levels[0].sample

    def prefix(self, k: int) -> ProperSequence:
        """The first k levels."""
        return ProperSequence(self.levels[:k], self.connecting_maps[:k - 1], self.zoom_certificates[:k - 1],
                              k, self.certified[:k])

    def projection(self, l: int) -> CellularMap:
        """f_1 o ... o f_l : B_l -> B_0."""
        f = self.levels[0].projection if l == 0 else self.connecting_maps[l - 1]
        for k in range(l - 1, 0, -1):
            f = f.compose(self.connecting_maps[k - 1])
        return f

    def to_json(self) -> dict:
        return {
            "requested_levels": self.requested_levels,
            "truncated": self.truncated,
            "proper": self.proper,
            "levels": [
                dict(
                    lv.to_json(),
                    pattern=lv.pattern.to_json() if isinstance(lv, PatchSpace) and lv.pattern else None,
                    certified=self.certified[l] if l < len(self.certified) else None,
                )
                for l, lv in enumerate(self.levels)
            ],
            "connecting_maps": [f.to_json() for f in self.connecting_maps],
            "zoom_certificates": [z.to_json() for z in self.zoom_certificates],
        }

    def to_dot(self) -> str:
        return "".join(lv.to_dot(f"B{l}") for l, lv in enumerate(self.levels))


def _extensions(sample: Tiling1DSample, word: str, anchor: int, allowed: set[int] | None) -> Counter:
    letters = sample.letters
    c = Counter()
    for a in find_occurrences(sample, word, anchor):
        s = a - anchor
        if s >= 1 and s + len(word) < len(letters) and (allowed is None or a in allowed):
            c[letters[s - 1] + word + letters[s + len(word)]] += 1
    return c


def _pick(c: Counter) -> str | None:
    if not c:
        return None
    return sorted(c.items(), key=lambda kv: (-kv[1], kv[0]))[0][0]


def _certified(sample: Tiling1DSample, units: list[Unit], collared: bool = True) -> bool:
    """Patch classes and adjacencies seen in the first half of the sample already include all seen overall."""
    def seen(us):
        if collared:
            cls = [(a.key, b.key, c.key) for a, b, c in zip(us, us[1:], us[2:])]
        else:
            cls = [u.key for u in us]
        return set(cls), set(zip(cls, cls[1:]))
    half = [u for u in units if u.end <= len(sample) // 2]
    return len(half) >= 4 and seen(half) == seen(units)


def build_proper_sequence(sample: Tiling1DSample, n_levels: int, max_pattern_length: int | None = None,
                          strict: bool = False, allow_unzoomed: bool = False) -> ProperSequence:
    """B_0 (uncollared prototile space) followed by n_levels - 1 zoomed-out patch spaces.

    The level-l pattern extends the level-(l-1) pattern by one tile on each
    side around the same anchor tile, starting from a three-tile pattern, and
    keeps growing until every new patch contains an old one in its interior.
    Levels the sample cannot certify are not built; the result is then
    flagged as truncated (or InsufficientSample is raised when ``strict``).
    A level that never zooms out also ends the sequence, unless
    ``allow_unzoomed`` keeps the first candidate with a failing certificate
    (useful for periodic samples; the sequence is then not proper).
    """
    if n_levels < 1:
        raise ValueError("need at least one level")
    b0 = build_prototile_space(sample, collared=False)
    levels: list[Approximant] = [b0]
    maps, certs, certified = [], [], [_certified(sample, b0.units, collared=False)]
    if max_pattern_length is None:
        max_pattern_length = max(3, len(sample) // 8)
    word, anchor = None, 0
    base_units = b0.units
    for l in range(1, n_levels):
        if word is None:
            counts = Counter(sample.letters[i:i + 3] for i in range(len(sample) - 2))
            word, anchor = _pick(counts), 1
            if word is None:
                break
        else:
            allowed = {u.anchor for u in base_units}
            nxt = _pick(_extensions(sample, word, anchor, allowed))
            if nxt is None:
                break
            word, anchor = nxt, anchor + 1
        chosen = None
        fallback = None
        while len(word) <= max_pattern_length:
            units = voronoi_units(sample, base_units, find_occurrences(sample, word, anchor))
            if len(units) >= 4:
                cert = _zoom_from_units(units, base_units)
                if fallback is None:
                    fallback = (word, anchor, units, cert)
                if cert.holds:
                    chosen = (word, anchor, units, cert)
                    break
            allowed = {u.anchor for u in base_units}
            nxt = _pick(_extensions(sample, word, anchor, allowed))
            if nxt is None:
                break
            word, anchor = nxt, anchor + 1
        if chosen is None and allow_unzoomed:
            chosen = fallback
        if chosen is None:
            break
        word, anchor, units, cert = chosen
        ok = _certified(sample, units)
        if not ok:
            break
        try:
            occ = len(find_occurrences(sample, word, anchor))
            ps = _make_patch_space(sample, units, Pattern(word, occ, False, "", "", anchor), l)
            f = map_between(ps, levels[-1])
            ps.projection = map_between(ps, b0)
        except InsufficientSample:
            break
        levels.append(ps)
        maps.append(f)
        certs.append(cert)
        certified.append(ok)
        base_units = units
    seq = ProperSequence(levels, maps, certs, n_levels, certified)
    if strict and seq.truncated:
        raise InsufficientSample(f"sample certifies only {len(levels)} of {n_levels} levels")
    return seq


# ---------------------------------------------------------------- cohomology

def _window(n_maps: int) -> int:
    return max(1, min(2, n_maps))


def cech_cohomology_of_hull(seq: ProperSequence) -> list[DirectLimit]:
    """Direct limit of H^n(B_l) along the maps induced by the connecting maps.

    Each entry unpacks as (group, status) and carries the per-level groups and
    the connecting matrices on cohomology generators.
    """
    if len(seq.levels) < 2:
        raise InsufficientSample("the hull limit needs at least two levels")
    bases = [simplicial_cohomology_bases(lv.complex) for lv in seq.levels]
    out = []
    for n in range(2):
        groups = [b[n].group for b in bases]
        mats = [
            bases[l][n].induced_matrix(bases[l + 1][n], f.cochain_map(n))
            for l, f in enumerate(seq.connecting_maps)
        ]
        out.append(direct_limit_fg(DirectSystem(groups, mats, _window(len(mats)))))
    return out
