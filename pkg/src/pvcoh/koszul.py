"""Koszul (PV) complexes of Cantor Z^d systems given as block subshifts.

Cylinder functions on a box are integer combinations of indicators of the
allowed patterns on that box. The shift in direction i sends the indicator
of a pattern P to the sum of the patterns on the box grown by one cell in
direction i that show P on the window moved by e_i. In the complex at
resolution R the e_S block lives on the box [0, R]^d grown by one cell in
every direction of S, so each differential lands on a box one cell longer
in its direction and the identity is refined before it is subtracted. In
d = 1 this is the cochain complex of a Rauzy graph.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from functools import lru_cache

from .abelian import (
    DirectLimit,
    DirectSystem,
    GroupPresentation,
    IntMatrix,
    cohomology_at,
    cohomology_basis,
    direct_limit_fg,
)
from .errors import InvalidComplex, ResolutionUnavailable
from .tiling import Tiling1DSample, sample_from_spec


@lru_cache(maxsize=None)
def _cells(shape: tuple[int, ...]) -> tuple[tuple[int, ...], ...]:
    """Points of [0, shape_1] x ... x [0, shape_d] in row-major order (first coordinate slowest)."""
    return tuple(itertools.product(*(range(n + 1) for n in shape)))


def _box(d: int, R: int) -> tuple[tuple[int, ...], ...]:
    return _cells((R,) * d)


@lru_cache(maxsize=None)
def _restriction_index(big: tuple[int, ...], small: tuple[int, ...], offset: tuple[int, ...]) -> tuple[int, ...]:
    """Positions inside the big box of the small box moved by ``offset``."""
    pos = {p: k for k, p in enumerate(_cells(big))}
    return tuple(pos[tuple(a + b for a, b in zip(p, offset))] for p in _cells(small))


def restrict_shape(pattern: tuple, big: tuple[int, ...], small: tuple[int, ...],
                   offset: tuple[int, ...] | None = None) -> tuple:
    if offset is None:
        offset = (0,) * len(big)
    return tuple(pattern[k] for k in _restriction_index(big, small, offset))


def restrict(pattern: tuple, d: int, R_big: int, R: int, offset: tuple[int, ...] | None = None) -> tuple:
    return restrict_shape(pattern, (R_big,) * d, (R,) * d, offset)


def unit_vector(d: int, i: int) -> tuple[int, ...]:
    return tuple(1 if k == i else 0 for k in range(d))


@dataclass
class CantorZdSystem:
    """Allowed patterns per resolution; pattern = tuple of symbols over _box(d, R)."""

    d: int
    alphabet: list
    windows: dict[int, list[tuple]]
    name: str = ""

    def __post_init__(self):
        self.windows = {int(R): sorted(set(map(tuple, ps)), key=repr) for R, ps in self.windows.items()}
        self._shape_cache = {}
        for R, ps in self.windows.items():
            n = (R + 1) ** self.d
            if any(len(p) != n for p in ps):
                raise InvalidComplex(f"patterns at resolution {R} must have {n} cells")

    @property
    def max_resolution(self) -> int:
        return max(self.windows) if self.windows else -1

    def window_basis(self, R: int) -> list[tuple]:
        if R not in self.windows:
            raise ResolutionUnavailable(f"no patterns at resolution {R} (available {sorted(self.windows)})")
        return self.windows[R]

    def shape_basis(self, shape: tuple[int, ...]) -> list[tuple]:
        """Allowed patterns on a box, read off the cube patterns of the smallest enclosing resolution."""
        shape = tuple(shape)
        if shape not in self._shape_cache:
            M = max(shape)
            cube = (M,) * self.d
            self._shape_cache[shape] = sorted({restrict_shape(q, cube, shape) for q in self.window_basis(M)}, key=repr)
        return self._shape_cache[shape]

    def restriction(self, small: tuple[int, ...], big: tuple[int, ...], offset: tuple[int, ...]) -> IntMatrix:
        """Indicators of ``small`` patterns seen at ``offset`` in the ``big`` pattern basis."""
        sb = {p: k for k, p in enumerate(self.shape_basis(small))}
        bb = self.shape_basis(big)
        rows = [[0] * len(sb) for _ in bb]
        for r, q in enumerate(bb):
            p = restrict_shape(q, tuple(big), tuple(small), offset)
            if p not in sb:
                raise InvalidComplex(f"a pattern on {big} shows a disallowed pattern on {small} at {offset}")
            rows[r][sb[p]] = 1
        return IntMatrix(rows, len(bb), len(sb))

    def refinement(self, R: int) -> IntMatrix:
        """Cube at resolution R into the cube at resolution R + 1."""
        return self.restriction((R,) * self.d, (R + 1,) * self.d, (0,) * self.d)

    def step(self, shape: tuple[int, ...], i: int, shifted: bool) -> IntMatrix:
        """Refinement (or the shift alpha_i^*, f -> f o T^{e_i}) from ``shape`` to ``shape`` grown in direction i."""
        big = tuple(n + (k == i) for k, n in enumerate(shape))
        off = unit_vector(self.d, i) if shifted else (0,) * self.d
        return self.restriction(tuple(shape), big, off)

    def shift(self, i: int, R: int) -> IntMatrix:
        """alpha_i^* from the resolution-R cube to the cube grown by one cell in direction i."""
        return self.step((R,) * self.d, i, True)

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "alphabet": list(self.alphabet),
            "allowed_patterns": {str(R): [list(p) for p in ps] for R, ps in sorted(self.windows.items())},
        }


def point_system(d: int, resolution: int = 8) -> CantorZdSystem:
    """The one-point space with the trivial Z^d action."""
    return CantorZdSystem(d, ["*"], {R: [("*",) * (R + 1) ** d] for R in range(resolution + 1)}, "point")


def _prune(windows: dict[int, list[tuple]], d: int) -> dict[int, list[tuple]]:
    """Drop patterns that do not extend to the next resolution (the top resolution is kept as is)."""
    out = dict(windows)
    rs = sorted(out)
    for R in reversed(rs[:-1]):
        if R + 1 not in out:
            continue
        seen = {restrict(q, d, R + 1, R) for q in out[R + 1]}
        out[R] = [p for p in out[R] if p in seen]
    return out


def system_from_word(word: str, max_resolution: int, name: str = "") -> CantorZdSystem:
    """One-dimensional subshift of the factors of a (long, repetitive) word."""
    windows = {}
    for R in range(max_resolution + 2):
        n = R + 1
        windows[R] = [tuple(word[k:k + n]) for k in range(len(word) - n + 1)]
    windows = _prune(windows, 1)
    del windows[max_resolution + 1]
    return CantorZdSystem(1, sorted(set(word)), windows, name)


def system_from_tiling(sample: Tiling1DSample, max_resolution: int) -> CantorZdSystem:
    return system_from_word(sample.letters, max_resolution, (sample.source or {}).get("type", "tiling"))


def extend_windows(d: int, alphabet: list, given: dict[int, list[tuple]], max_resolution: int,
                   limit: int = 1_000_000) -> dict[int, list[tuple]]:
    """Fill in radii above the largest given one by local admissibility.

    A pattern at resolution R + 1 is admissible when every resolution-R
    subwindow at offsets in {0, 1}^d is. Lower radii are then pruned to patterns that
    extend; the top resolution computed stays unpruned.
    """
    windows = {R: list(ps) for R, ps in given.items()}
    R = max(windows)
    while R < max_resolution + 1:
        allowed = set(windows[R])
        box = _box(d, R + 1)
        inner = {p: k for k, p in enumerate(_box(d, R))}
        n_border = len(box) - len(inner)
        if len(windows[R]) * len(alphabet) ** n_border > limit:
            raise ResolutionUnavailable(f"resolution {R + 1} too large to enumerate from local rules")
        big = []
        for p in windows[R]:
            for border in itertools.product(alphabet, repeat=n_border):
                it = iter(border)
                q = tuple(p[inner[pt]] if pt in inner else next(it) for pt in box)
                if all(restrict(q, d, R + 1, R, off) in allowed for off in itertools.product((0, 1), repeat=d)):
                    big.append(q)
        windows[R + 1] = big
        R += 1
    return _prune(windows, d)


def product_system(a: CantorZdSystem, b: CantorZdSystem) -> CantorZdSystem:
    """X x Y with Z^{d_a + d_b} acting coordinatewise."""
    d = a.d + b.d
    radii = sorted(set(a.windows) & set(b.windows))
    windows = {}
    for R in radii:
        ba, bb = _box(a.d, R), _box(b.d, R)
        ia = {p: k for k, p in enumerate(ba)}
        ib = {p: k for k, p in enumerate(bb)}
        pats = []
        for p in a.windows[R]:
            for q in b.windows[R]:
                pats.append(tuple((p[ia[pt[:a.d]]], q[ib[pt[a.d:]]]) for pt in _box(d, R)))
        windows[R] = pats
    alphabet = [(x, y) for x in a.alphabet for y in b.alphabet]
    return CantorZdSystem(d, alphabet, windows, f"{a.name}x{b.name}")


def _decode_pattern(p, d: int):
    if isinstance(p, str):
        return tuple(p)

    def flat(x):
        if isinstance(x, list) and d > 1 and x and isinstance(x[0], list):
            return [y for z in x for y in flat(z)]
        return list(x)

    return tuple(tuple(v) if isinstance(v, list) else v for v in flat(p))


def system_from_json(obj: dict) -> CantorZdSystem:
    """{"d", "alphabet", "allowed_patterns": {"R": [...]}} or {"from_tiling": spec, "d": 1}."""
    if "from_tiling" in obj:
        if int(obj.get("d", 1)) != 1:
            raise InvalidComplex("tiling systems are one-dimensional")
        sample = sample_from_spec(obj["from_tiling"])
        return system_from_tiling(sample, int(obj.get("max_resolution", 8)))
    if obj.get("point"):
        return point_system(int(obj.get("d", 1)), int(obj.get("max_resolution", 8)))
    d = int(obj["d"])
    given = {int(R): [_decode_pattern(p, d) for p in ps] for R, ps in obj["allowed_patterns"].items()}
    alphabet = list(obj.get("alphabet") or sorted({c for ps in given.values() for p in ps for c in p}, key=repr))
    max_resolution = int(obj.get("max_resolution", max(given)))
    if max_resolution > max(given):
        given = extend_windows(d, alphabet, given, max_resolution)
    return CantorZdSystem(d, alphabet, given, obj.get("name", ""))


def load_system(path) -> CantorZdSystem:
    with open(path) as fh:
        return system_from_json(json.load(fh))


# ---------------------------------------------------------------- complexes

def subsets(d: int, k: int) -> list[tuple[int, ...]]:
    return list(itertools.combinations(range(d), k))


def wedge_sign(i: int, S: tuple[int, ...]) -> int:
    """e_i ^ e_S = sign * e_{S + i}; 0 when i is in S."""
    if i in S:
        return 0
    return -1 if sum(1 for j in S if j < i) % 2 else 1


def block_shape(d: int, R: int, S: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(R + (i in S) for i in range(d))


@dataclass
class KoszulComplex:
    d: int
    resolution: int
    ranks: list[int]
    differentials: list[IntMatrix]  # d^0 .. d^{d-1}
    blocks: list[list[tuple[int, ...]]] = field(default_factory=list)  # degree -> exterior basis order
    block_sizes: dict[tuple[int, ...], int] = field(default_factory=dict)  # S -> cylinder basis size

    def offsets(self, k: int) -> dict[tuple[int, ...], int]:
        out, pos = {}, 0
        for S in self.blocks[k]:
            out[S] = pos
            pos += self.block_sizes[S]
        return out

    def padded(self) -> list[IntMatrix]:
        return [IntMatrix.zeros(self.ranks[0], 0)] + list(self.differentials) + [IntMatrix.zeros(0, self.ranks[-1])]

    def dd_violations(self) -> list[int]:
        ds = self.differentials
        return [k + 1 for k in range(len(ds) - 1) if not (ds[k + 1] @ ds[k]).is_zero()]

    def cohomology(self) -> list[GroupPresentation]:
        mats = self.padded()
        return [cohomology_at(mats[k], mats[k + 1]) for k in range(self.d + 1)]

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "resolution": self.resolution,
            "ranks": list(self.ranks),
            "differentials": [m.to_lists() for m in self.differentials],
        }


def _require(sys: CantorZdSystem, R: int) -> None:
    need = R + 1 if sys.d else R
    if R < 0 or any(r not in sys.windows for r in range(R, need + 1)):
        raise ResolutionUnavailable(f"resolution {R} needs cube patterns up to resolution {need}")


def _place(rows: list[list[int]], M: IntMatrix, r0: int, c0: int, sign: int) -> None:
    for r in range(M.rows):
        src = M.row(r)
        row = rows[r0 + r]
        for c, x in enumerate(src):
            if x:
                row[c0 + c] += sign * x


def _assemble(sys: CantorZdSystem, R: int, blocks: list[list[tuple[int, ...]]], sign_rule) -> KoszulComplex:
    d = sys.d
    sizes = {S: len(sys.shape_basis(block_shape(d, R, S))) for bl in blocks for S in bl}
    cx = KoszulComplex(d, R, [sum(sizes[S] for S in bl) for bl in blocks], [], blocks, sizes)
    for k in range(d):
        src, dst = cx.offsets(k), cx.offsets(k + 1)
        rows = [[0] * cx.ranks[k] for _ in range(cx.ranks[k + 1])]
        for T in blocks[k]:
            for i in range(d):
                if i in T:
                    continue
                S = tuple(sorted(T + (i,)))
                sh = block_shape(d, R, T)
                for shifted, s in sign_rule(i, T):
                    _place(rows, sys.step(sh, i, shifted), dst[S], src[T], s)
        cx.differentials.append(IntMatrix(rows, cx.ranks[k + 1], cx.ranks[k]))
    return cx


def build_koszul_complex(sys: CantorZdSystem, R: int) -> KoszulComplex:
    """Cylinder functions (x) Lambda^* Z^d with d = sum_i (alpha_i^* - 1) (x) e_i ^ .

    The exterior sign is e_i ^ e_T = (-1)^{#{j in T : j < i}} e_{T + i}.
    """
    _require(sys, R)
    d = sys.d

    def rule(i, T):
        s = wedge_sign(i, T)
        return ((True, s), (False, -s))

    return _assemble(sys, R, [subsets(d, k) for k in range(d + 1)], rule)


def torus_covariant_complex(sys: CantorZdSystem, R: int) -> KoszulComplex:
    """Covariant cochains on the cube cells of R^d, one block per open face orbit of the unit cube.

    A face of [0, 1]^d is (S, v): the free directions S and the fixed
    coordinates v in {0, 1} for the others. Covariance phi(e + a) =
    alpha^a phi(e) reduces a cochain to its values on the faces (S, 0).
    The coboundary reads phi on the oriented boundary of (S, 0): the face at
    x_i = 1, which is (S - i, 0) moved by e_i, enters with (-1)^r and the
    face at x_i = 0 with -(-1)^r, where r is the position of i in S.
    """
    _require(sys, R)
    d = sys.d
    # cells ordered by bit mask rather than lexicographically
    masks = sorted(range(1 << d), key=lambda m: (bin(m).count("1"), m))
    blocks = [[tuple(i for i in range(d) if m >> i & 1) for m in masks if bin(m).count("1") == k] for k in range(d + 1)]

    def rule(i, T):
        S = tuple(sorted(T + (i,)))
        s = -1 if S.index(i) % 2 else 1
        return ((True, s), (False, -s))

    return _assemble(sys, R, blocks, rule)


def chain_isomorphism(src: KoszulComplex, dst: KoszulComplex) -> list[IntMatrix]:
    """Block permutation matching exterior basis elements of the two complexes.

    Raises InvalidComplex if the permutation is not a chain map.
    """
    if src.d != dst.d or src.block_sizes != dst.block_sizes:
        raise InvalidComplex("complexes have different shapes")
    Ps = []
    for k in range(src.d + 1):
        so, do = src.offsets(k), dst.offsets(k)
        n = src.ranks[k]
        rows = [[0] * n for _ in range(n)]
        for S in src.blocks[k]:
            for c in range(src.block_sizes[S]):
                rows[do[S] + c][so[S] + c] = 1
        Ps.append(IntMatrix(rows, n, n))
    for k in range(src.d):
        if dst.differentials[k] @ Ps[k] != Ps[k + 1] @ src.differentials[k]:
            raise InvalidComplex(f"basis matching is not a chain map in degree {k}")
    return Ps


def refinement_chain_map(sys: CantorZdSystem, R: int) -> list[IntMatrix]:
    """Degree-wise refinement from the resolution-R complex to the resolution-(R+1) complex."""
    d = sys.d
    zero = (0,) * d
    return [
        IntMatrix.block_diagonal([
            sys.restriction(block_shape(d, R, S), block_shape(d, R + 1, S), zero) for S in subsets(d, k)
        ])
        for k in range(d + 1)
    ]


@dataclass
class KoszulReport:
    resolutions: list[int]
    groups: list[list[GroupPresentation]]  # resolution -> degree -> group
    limits: list[DirectLimit]
    dd_ok: bool

    def __iter__(self):
        return iter((d.limit, d.status) for d in self.limits)

    def __getitem__(self, k):
        return (self.limits[k].limit, self.limits[k].status)

    def to_json(self) -> dict:
        return {
            "resolutions": list(self.resolutions),
            "levels": [{str(k): g.to_json() for k, g in enumerate(gs)} for gs in self.groups],
            "connecting_maps": {str(k): [m.matrix.to_lists() for m in d.maps] for k, d in enumerate(self.limits)},
            "limit": {str(k): {"group": d.limit.to_json(), "status": d.status.value} for k, d in enumerate(self.limits)},
            "certificates": {"dd_zero": self.dd_ok},
        }


def koszul_cohomology(sys: CantorZdSystem, R_max: int, R_min: int = 1) -> KoszulReport:
    """Cohomology at resolutions R_min..R_max, and its limit along refinement."""
    if R_max < 2 or R_max <= R_min:
        raise ResolutionUnavailable("need R_max >= 2 and at least two resolutions")
    Rs = list(range(R_min, R_max + 1))
    cxs = [build_koszul_complex(sys, R) for R in Rs]
    d = sys.d
    bases = [[cohomology_basis(m[k], m[k + 1]) for k in range(d + 1)] for m in (c.padded() for c in cxs)]
    chains = [refinement_chain_map(sys, R) for R in Rs[:-1]]
    limits = []
    for k in range(d + 1):
        groups = [b[k].group for b in bases]
        mats = [bases[a][k].induced_matrix(bases[a + 1][k], chains[a][k]) for a in range(len(chains))]
        limits.append(direct_limit_fg(DirectSystem(groups, mats, min(2, len(mats)))))
    return KoszulReport(Rs, [[b.group for b in bs] for bs in bases], limits, all(not c.dd_violations() for c in cxs))


def kunneth(a: list[GroupPresentation], b: list[GroupPresentation]) -> list[GroupPresentation]:
    """Cohomology of a tensor product of free cochain complexes from the factors' cohomology.

    Only the free parts are combined, which is exact when both factors are torsion free.
    """
    if any(g.torsion for g in a + b):
        raise ValueError("torsion in a factor; the Tor terms are not modelled")
    out = []
    for n in range(len(a) + len(b) - 1):
        out.append(GroupPresentation.free(sum(a[p].rank * b[n - p].rank for p in range(len(a)) if 0 <= n - p < len(b))))
    return out
