"""PV cochain complexes over patch spaces, and the Cantor-circle model of the 1D hull.

A level B_l of a proper sequence sits over the prototile space B_0 through
its projection. The n-cells of B_l lying over a base simplex sigma are the
atoms of sigma's acceptance zone; integer functions on all atoms form the PV
cochain group in degree n. The differential is assembled from 0/1 face
incidence operators theta, one per base simplex and face index.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cmp_to_key

from .abelian import (
    DirectLimit,
    DirectSystem,
    GroupPresentation,
    IntMatrix,
    cohomology_at,
    cohomology_basis,
    direct_limit_fg,
    matrix_rank,
)
from .approximants import Approximant, ProperSequence, _window, key_word, _core
from .delta_complex import CellularMap, coboundary_matrix, identity_map
from .errors import (
    DegreeOutOfRange,
    FaceOutOfRange,
    InsufficientSample,
    MissingConnectingMap,
    NotComparable,
)
from .tiling import AlgebraicNumber, CFPrefix, QuadraticNumber


# ---------------------------------------------------------------- transversal

@dataclass
class DiscreteTransversal:
    level: Approximant
    base: Approximant
    projection: CellularMap
    atoms: dict[int, list[tuple[str, str]]]  # degree -> [(base simplex, level simplex)]
    partition: dict[str, list[str]]  # base simplex -> level simplices over it

    @property
    def dimension(self) -> int:
        return self.base.complex.dimension

    def atom_index(self, n: int) -> dict[str, int]:
        return {s: k for k, (_, s) in enumerate(self.atoms[n])}

    def rank(self, n: int) -> int:
        return len(self.atoms.get(n, ()))

    def rho(self, n: int) -> IntMatrix:
        """Permutation carrying the cell basis of C^n(B_l) to the atom basis."""
        cells = self.level.complex.cells.get(n, [])
        idx = self.atom_index(n)
        rows = [[0] * len(cells) for _ in cells]
        for c, s in enumerate(cells):
            rows[idx[s]][c] = 1
        return IntMatrix(rows, len(cells), len(cells))

    def to_json(self) -> dict:
        return {
            "level": self.level.level,
            "atoms": {str(n): [list(a) for a in at] for n, at in sorted(self.atoms.items())},
        }


def discrete_transversal(level: Approximant, base: Approximant | None = None,
                         projection: CellularMap | None = None) -> DiscreteTransversal:
    """Atoms of every base simplex: the level simplices mapped onto it.

    Atoms are listed base simplex by base simplex (in the base order), and
    inside each acceptance zone in the level order.
    """
    if base is None:
        base = level
    if projection is None:
        if level is base:
            projection = identity_map(base.complex)
        elif level.projection is not None and level.projection.target is base.complex:
            projection = level.projection
        else:
            raise MissingConnectingMap("no projection from this level onto the given base")
    if projection.source is not level.complex or projection.target is not base.complex:
        raise MissingConnectingMap("projection does not connect the level to the base")
    atoms, partition = {}, {}
    for n, base_cells in base.complex.cells.items():
        imgs = projection.cell_images.get(n, {})
        over = {s: [] for s in base_cells}
        for c in level.complex.cells.get(n, []):
            if c not in imgs:
                raise MissingConnectingMap(f"level cell {c!r} has no image")
            over[imgs[c]].append(c)
        atoms[n] = [(s, c) for s in base_cells for c in over[s]]
        partition.update(over)
    for n, cs in level.complex.cells.items():
        if len(atoms.get(n, [])) != len(cs):
            raise MissingConnectingMap(f"atoms in degree {n} do not match the level cells")
    return DiscreteTransversal(level, base, projection, atoms, partition)


def transversal_of(seq: ProperSequence, l: int) -> DiscreteTransversal:
    return discrete_transversal(seq.levels[l], seq.levels[0], seq.projection(l))


# ---------------------------------------------------------------- theta operators

def _translation(dt: DiscreteTransversal, sigma: str, i: int) -> str:
    """From the puncture of the i-th face to the puncture of sigma, symbolically."""
    K = dt.base.complex
    n = K.dim_of(sigma)
    if n == 1 and K.punctures.get(sigma) == "left endpoint":
        # the tail carries the edge puncture; the head sits one tile length to the right
        return "0" if i == 1 else f"-len({_label(dt.base, sigma)})"
    return f"x({sigma},{K.faces[sigma][i]})"


def _label(ap: Approximant, edge: str) -> str:
    for k, es in ap.classes.items():
        if edge in es:
            return key_word(_core(k, ap.collared))[es.index(edge)]
    return edge


@dataclass
class ThetaOperator:
    target_simplex: str  # sigma
    source_simplex: str  # tau, the i-th face of sigma
    face_index: int
    translation_vector: str
    matrix: IntMatrix  # rows: sigma-atoms, columns: tau-atoms
    rows: list[str] = field(default_factory=list)
    cols: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "sigma": self.target_simplex,
            "tau": self.source_simplex,
            "i": self.face_index,
            "translation": self.translation_vector,
            "matrix": self.matrix.to_lists(),
        }


def theta_matrix(dt: DiscreteTransversal, sigma: str, i: int) -> ThetaOperator:
    """0/1 operator from the atoms of d_i(sigma) to the atoms of sigma."""
    K = dt.base.complex
    if sigma not in K._dim_of:
        raise FaceOutOfRange(f"{sigma!r} is not a simplex of the base")
    n = K.dim_of(sigma)
    if n < 1 or not 0 <= i <= n:
        raise FaceOutOfRange(f"face index {i} outside 0..{n} for {sigma!r}")
    tau = K.faces[sigma][i]
    rows, cols = dt.partition[sigma], dt.partition[tau]
    col = {c: k for k, c in enumerate(cols)}
    L = dt.level.complex
    m = [[0] * len(cols) for _ in rows]
    for r, s in enumerate(rows):
        m[r][col[L.faces[s][i]]] = 1
    return ThetaOperator(sigma, tau, i, _translation(dt, sigma, i), IntMatrix(m, len(rows), len(cols)), rows, cols)


def _embed(dt: DiscreteTransversal, th: ThetaOperator, n: int) -> IntMatrix:
    """theta as a map C(atoms^{n-1}) -> C(atoms^n)."""
    ri, ci = dt.atom_index(n), dt.atom_index(n - 1)
    out = [[0] * dt.rank(n - 1) for _ in range(dt.rank(n))]
    for r, s in enumerate(th.rows):
        for c, t in enumerate(th.cols):
            if th.matrix[r, c]:
                out[ri[s]][ci[t]] += th.matrix[r, c]
    return IntMatrix(out, dt.rank(n), dt.rank(n - 1))


def pv_differential(dt: DiscreteTransversal, n: int) -> IntMatrix:
    """d_PV^n = sum over base n-simplices sigma and i of (-1)^i theta_{sigma, d_i sigma}."""
    d = dt.dimension
    if n < 1 or n > d:
        raise DegreeOutOfRange(f"degree {n} outside 1..{d}")
    ri, ci = dt.atom_index(n), dt.atom_index(n - 1)
    out = [[0] * dt.rank(n - 1) for _ in range(dt.rank(n))]
    for sigma in dt.base.complex.cells[n]:
        for i in range(n + 1):
            th = theta_matrix(dt, sigma, i)
            sgn = -1 if i % 2 else 1
            for r, s in enumerate(th.rows):
                for c, t in enumerate(th.cols):
                    if th.matrix[r, c]:
                        out[ri[s]][ci[t]] += sgn * th.matrix[r, c]
    return IntMatrix(out, dt.rank(n), dt.rank(n - 1))


@dataclass
class PVComplex:
    cochain_ranks: list[int]
    differentials: list[IntMatrix]  # d^1, ..., d^d

    def padded(self) -> list[IntMatrix]:
        r = self.cochain_ranks
        return [IntMatrix.zeros(r[0], 0)] + list(self.differentials) + [IntMatrix.zeros(0, r[-1])]

    def to_json(self) -> dict:
        return {"cochain_ranks": list(self.cochain_ranks), "differentials": [d.to_lists() for d in self.differentials]}


def pv_complex(dt: DiscreteTransversal) -> PVComplex:
    d = dt.dimension
    return PVComplex([dt.rank(n) for n in range(d + 1)], [pv_differential(dt, n) for n in range(1, d + 1)])


def chain_equivalence_violations(dt: DiscreteTransversal) -> list[str]:
    """Degrees where d_PV^n rho_{n-1} and rho_n delta^n differ."""
    out = []
    for n in range(1, dt.dimension + 1):
        lhs = pv_differential(dt, n) @ dt.rho(n - 1)
        rhs = dt.rho(n) @ coboundary_matrix(dt.level.complex, n)
        if lhs != rhs:
            out.append(f"degree {n}")
    return out


def dd_violations(dt: DiscreteTransversal) -> list[str]:
    ds = pv_complex(dt).differentials
    return [f"degree {n + 1}" for n in range(len(ds) - 1) if not (ds[n + 1] @ ds[n]).is_zero()]


def pv_cohomology_level(dt: DiscreteTransversal) -> list[GroupPresentation]:
    mats = pv_complex(dt).padded()
    return [cohomology_at(mats[n], mats[n + 1]) for n in range(dt.dimension + 1)]


# ---------------------------------------------------------------- refinement and theta relations

def refinement_matrix(fine: DiscreteTransversal, coarse: DiscreteTransversal, f: CellularMap, n: int,
                      sigma: str | None = None) -> IntMatrix:
    """Entry (p, q) is 1 when f sends fine atom p to coarse atom q.

    It expresses the indicator of a coarse atom in the fine atom basis. With
    ``sigma`` only the atoms over that base simplex are kept.
    """
    if f.source is not fine.level.complex or f.target is not coarse.level.complex:
        raise NotComparable("map does not connect the two levels")
    if sigma is None:
        rows = [s for _, s in fine.atoms.get(n, [])]
        cols = [s for _, s in coarse.atoms.get(n, [])]
    else:
        rows, cols = fine.partition[sigma], coarse.partition[sigma]
    ci = {c: k for k, c in enumerate(cols)}
    imgs = f.cell_images.get(n, {})
    m = [[0] * len(cols) for _ in rows]
    for r, s in enumerate(rows):
        t = imgs[s]
        if t not in ci:
            raise NotComparable(f"{s!r} and its image {t!r} lie over different base simplices")
        m[r][ci[t]] = 1
    return IntMatrix(m, len(rows), len(cols))


def theta_adjoint(coarse: DiscreteTransversal, fine: DiscreteTransversal, f: CellularMap,
                  sigma: str, i: int) -> IntMatrix:
    """theta*_{sigma, d_i sigma} from coarse sigma-atoms to fine tau-atoms.

    A fine tau-atom w goes to the coarse sigma-atom under the fine simplex
    whose i-th face is w. The collar forces that image: all fine simplices
    with i-th face w lie in one coarse simplex, which is checked here.
    """
    K = coarse.base.complex
    n = K.dim_of(sigma)
    if n < 1 or not 0 <= i <= n:
        raise FaceOutOfRange(f"face index {i} outside 0..{n} for {sigma!r}")
    tau = K.faces[sigma][i]
    rows, cols = fine.partition[tau], coarse.partition[sigma]
    ci = {c: k for k, c in enumerate(cols)}
    L = fine.level.complex
    above: dict[str, set[str]] = {}
    for s in L.cells[n]:
        above.setdefault(L.faces[s][i], set()).add(f.cell_images[n][s])
    m = [[0] * len(cols) for _ in rows]
    for r, w in enumerate(rows):
        imgs = above.get(w, set())
        if len(imgs) > 1:
            raise InsufficientSample(f"cofaces of {w!r} in direction {i} are not forced by the collar")
        for t in imgs:
            if t in ci:
                m[r][ci[t]] = 1
    return IntMatrix(m, len(rows), len(cols))


@dataclass
class ThetaRelationReport:
    level: int
    checks: int = 0
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return {"level": self.level, "checks": self.checks, "ok": self.ok, "failures": list(self.failures)}


def theta_relations(seq: ProperSequence, l: int) -> ThetaRelationReport:
    """Partial isometry relations for every theta of level l, with adjoints through level l + 1.

    With R the refinement from level l to level l + 1:
      theta^{(l+1)}_{sigma,i} theta*_{sigma,i} = R^sigma        (theta theta* = chi_sigma)
      sum over sigma with d_i sigma = tau of theta*_{sigma,i} theta^{(l)}_{sigma,i} = R^tau
                                                                  (sum theta* theta = chi_tau)
    """
    if l + 1 >= len(seq.levels):
        raise InsufficientSample(f"relations at level {l} need level {l + 1}")
    coarse, fine = transversal_of(seq, l), transversal_of(seq, l + 1)
    f = seq.connecting_maps[l]
    K = coarse.base.complex
    rep = ThetaRelationReport(l)
    for n in range(1, K.dimension + 1):
        for i in range(n + 1):
            sums: dict[str, IntMatrix] = {}
            for sigma in K.cells[n]:
                tau = K.faces[sigma][i]
                adj = theta_adjoint(coarse, fine, f, sigma, i)
                lhs = theta_matrix(fine, sigma, i).matrix @ adj
                rep.checks += 1
                if lhs != refinement_matrix(fine, coarse, f, n, sigma):
                    rep.failures.append(f"theta theta* != chi on {sigma!r}, i={i}")
                term = adj @ theta_matrix(coarse, sigma, i).matrix
                sums[tau] = sums[tau] + term if tau in sums else term
            for tau in K.cells[n - 1]:
                rep.checks += 1
                want = refinement_matrix(fine, coarse, f, n - 1, tau)
                got = sums.get(tau, IntMatrix.zeros(want.rows, want.cols))
                if got != want:
                    rep.failures.append(f"sum theta* theta != chi on {tau!r}, i={i}")
    return rep


# ---------------------------------------------------------------- hull

@dataclass
class PVHullReport:
    limits: list[DirectLimit]
    level_groups: list[list[GroupPresentation]]
    theta: list[ThetaRelationReport]
    chain_equivalence: list[list[str]]
    dd: list[list[str]]

    def __iter__(self):
        return iter((d.limit, d.status) for d in self.limits)

    def __getitem__(self, n):
        return (self.limits[n].limit, self.limits[n].status)

    def __len__(self):
        return len(self.limits)

    def to_json(self) -> dict:
        return {
            "levels": [{str(n): g.to_json() for n, g in enumerate(gs)} for gs in self.level_groups],
            "connecting_maps": {
                str(n): [m.matrix.to_lists() for m in d.maps] for n, d in enumerate(self.limits)
            },
            "limit": {str(n): {"group": d.limit.to_json(), "status": d.status.value} for n, d in enumerate(self.limits)},
            "certificates": {
                "theta_relations": [r.to_json() for r in self.theta],
                "chain_equivalence": [not v for v in self.chain_equivalence],
                "dd_zero": [not v for v in self.dd],
            },
        }


def pv_cohomology_hull(seq: ProperSequence, check_relations: bool = True) -> PVHullReport:
    """Direct limit of PV cohomology along the refinement matrices of the connecting maps."""
    if len(seq.levels) < 2:
        raise InsufficientSample("the hull limit needs at least two levels")
    dts = [transversal_of(seq, l) for l in range(len(seq.levels))]
    d = dts[0].dimension
    cxs = [pv_complex(dt).padded() for dt in dts]
    bases = [[cohomology_basis(m[n], m[n + 1]) for n in range(d + 1)] for m in cxs]
    limits = []
    for n in range(d + 1):
        groups = [b[n].group for b in bases]
        mats = [
            bases[l][n].induced_matrix(bases[l + 1][n], refinement_matrix(dts[l + 1], dts[l], f, n))
            for l, f in enumerate(seq.connecting_maps)
        ]
        limits.append(direct_limit_fg(DirectSystem(groups, mats, _window(len(mats)))))
    theta = [theta_relations(seq, l) for l in range(len(seq.levels) - 1)] if check_relations else []
    return PVHullReport(
        limits,
        [[b.group for b in bs] for bs in bases],
        theta,
        [chain_equivalence_violations(dt) for dt in dts],
        [dd_violations(dt) for dt in dts],
    )


# ---------------------------------------------------------------- Cantor circle

def rotation_number(alpha: AlgebraicNumber) -> AlgebraicNumber:
    """alpha' = alpha / (1 + alpha), exact in the field of alpha."""
    alpha.require_irrational_positive()
    if isinstance(alpha, QuadraticNumber):
        return alpha / (alpha + 1)
    if isinstance(alpha, CFPrefix):
        ds = list(alpha.digits)
        tail = alpha._tail
        if ds[0] == 0:
            # alpha = [0; a1, ...] gives alpha' = [0; a1 + 1, a2, ...]
            new = [0, ds[1] + 1] + ds[2:] if len(ds) > 1 else [0]
            shifted = tail
        else:
            # alpha' = 1 / (1 + 1/alpha) = [0; 1, a0, a1, ...]
            new = [0, 1] + ds
            shifted = (lambda k: tail(k - 1)) if tail is not None else None
        if len(new) == 1:
            raise ValueError("continued fraction prefix too short")
        name = f"{alpha.name}/(1+{alpha.name})" if alpha.name else None
        return CFPrefix(new, shifted, name=name)
    raise TypeError(f"unsupported number type {type(alpha).__name__}")


def _floor_multiple(alpha: AlgebraicNumber, k: int) -> int:
    """floor(k alpha') for an integer k, compared exactly through alpha."""
    if k == 0:
        return 0
    # q <= k alpha/(1+alpha)  iff  q + (q - k) alpha <= 0
    le = lambda q: alpha.sign_linear(q, q - k) <= 0
    q = int(k * float(alpha) / (1 + float(alpha)))
    while not le(q):
        q -= 1
    while le(q + 1):
        q += 1
    return q


@dataclass(frozen=True)
class CantorCircleFunction:
    """constant + sum of c * chi of the arc [l alpha', m alpha') mod 1.

    The arc runs counterclockwise from the orbit point l alpha' to the orbit
    point m alpha'; it is empty when l = m. Orbit points are distinct because
    alpha' is irrational, so arcs are clopen in the Cantor circle.
    """

    terms: tuple[tuple[int, int, int], ...] = ()
    constant: int = 0

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple((int(c), int(l), int(m)) for c, l, m in self.terms))

    def __add__(self, other: CantorCircleFunction) -> CantorCircleFunction:
        return CantorCircleFunction(self.terms + other.terms, self.constant + other.constant)

    def __neg__(self):
        return CantorCircleFunction(tuple((-c, l, m) for c, l, m in self.terms), -self.constant)

    def __sub__(self, other):
        return self + (-other)

    def scaled(self, k: int) -> CantorCircleFunction:
        return CantorCircleFunction(tuple((k * c, l, m) for c, l, m in self.terms), k * self.constant)

    def rotated(self, k: int = 1) -> CantorCircleFunction:
        """f(x - k alpha'): every arc moves forward by k orbit steps."""
        return CantorCircleFunction(tuple((c, l + k, m + k) for c, l, m in self.terms), self.constant)

    def coboundary(self) -> CantorCircleFunction:
        """(id - theta) f."""
        return self - self.rotated(1)

    def breakpoints(self) -> list[int]:
        return sorted({x for _, l, m in self.terms if l != m for x in (l, m)})

    def to_json(self) -> dict:
        return {"terms": [list(t) for t in self.terms], "constant": self.constant}

    @classmethod
    def from_json(cls, obj: dict) -> CantorCircleFunction:
        return cls(tuple(tuple(t) for t in obj.get("terms", [])), int(obj.get("constant", 0)))


def _frac_cmp(alpha: AlgebraicNumber):
    """Compare orbit indices by the position of k alpha' in [0, 1)."""
    floors: dict[int, int] = {}

    def fl(k):
        if k not in floors:
            floors[k] = _floor_multiple(alpha, k)
        return floors[k]

    def cmp(j, k):
        if j == k:
            return 0
        # frac(j a') - frac(k a') = (j - k) a' - (fj - fk); multiply by 1 + alpha > 0
        dk, df = j - k, fl(j) - fl(k)
        return alpha.sign_linear(-df, dk - df)

    return cmp


def _in_arc(cmp, x: int, l: int, m: int) -> bool:
    """Is the orbit point x in the arc [l alpha', m alpha') mod 1."""
    if l == m:
        return False
    if cmp(l, m) < 0:
        return cmp(l, x) <= 0 and cmp(x, m) < 0
    return cmp(l, x) <= 0 or cmp(x, m) < 0


def canonical_form(f: CantorCircleFunction, alpha: AlgebraicNumber) -> CantorCircleFunction:
    """The same function as disjoint arcs between consecutive value changes.

    Arcs come in circle order starting from the first breakpoint after 0,
    adjacent pieces with equal values are merged and the constant is the
    minimal value, so equal functions give equal forms.
    """
    pts = f.breakpoints()
    if not pts:
        return CantorCircleFunction((), f.constant)
    cmp = _frac_cmp(alpha)
    pts.sort(key=cmp_to_key(cmp))
    vals = []
    for k, p in enumerate(pts):
        v = f.constant + sum(c for c, l, m in f.terms if _in_arc(cmp, p, l, m))
        vals.append(v)
    # merge cyclically equal neighbours
    keep = [k for k in range(len(pts)) if vals[k] != vals[k - 1]]
    if not keep:
        return CantorCircleFunction((), vals[0])
    base = min(vals)
    terms = []
    for a, k in enumerate(keep):
        nxt = keep[(a + 1) % len(keep)]
        if vals[k] != base:
            terms.append((vals[k] - base, pts[k], pts[nxt]))
    return CantorCircleFunction(tuple(terms), base)


def evaluate(f: CantorCircleFunction, alpha: AlgebraicNumber, k: int) -> int:
    """Value of f on the orbit point k alpha' (arcs are closed on the left)."""
    cmp = _frac_cmp(alpha)
    return f.constant + sum(c for c, l, m in f.terms if _in_arc(cmp, k, l, m))


def cantor_circle_normal_form(f: CantorCircleFunction, alpha: AlgebraicNumber) -> tuple[int, int]:
    """(n_f, m_f) with f = n_f chi_[0, alpha') + m_f modulo (id - theta) C(S^1_alpha, Z).

    Each arc [l a', m a') is the sum of the m - l unit arcs [j a', (j+1) a')
    minus one full circle for every time the chain of unit arcs wraps past 0,
    and every unit arc is a rotate of [0, a'). So an arc contributes
    (m - l, -floor((m - l) a')), and the same formula holds for m < l.
    """
    alpha.require_irrational_positive()
    n_f, m_f = 0, f.constant
    for c, l, m in f.terms:
        if l == m:
            continue
        n_f += c * (m - l)
        m_f -= c * _floor_multiple(alpha, m - l)
    return n_f, m_f


def integral(f: CantorCircleFunction, alpha: AlgebraicNumber):
    """Lebesgue integral of f as an exact element of Z + Z alpha'."""
    n_f, m_f = cantor_circle_normal_form(f, alpha)
    return m_f + n_f * rotation_number(alpha) if n_f else m_f


@dataclass
class FrequencyModule:
    alpha: AlgebraicNumber
    rotation: AlgebraicNumber
    generators: tuple[str, str] = ("chi_S1", "chi_[0,alpha')")

    @property
    def integrals(self) -> tuple:
        return (1, self.rotation)

    def to_json(self) -> dict:
        r = self.rotation
        return {
            "alpha": self.alpha.to_json(),
            "generators": list(self.generators),
            "integrals": [
                {"exact": "1", "decimal": "1"},
                {"exact": str(r), "decimal": str(r.to_decimal(30)), **r.to_json()},
            ],
        }


def frequency_module(alpha: AlgebraicNumber) -> FrequencyModule:
    """Integrals of the two H^1 generators: the constant 1 and chi_[0, alpha')."""
    return FrequencyModule(alpha, rotation_number(alpha))


def h1_rank_from_normal_form(alpha: AlgebraicNumber, samples: list[CantorCircleFunction] | None = None) -> int:
    """Rank of the lattice spanned by normal forms; the generators give the full rank 2."""
    gens = [CantorCircleFunction((), 1), CantorCircleFunction(((1, 0, 1),), 0)]
    vecs = [list(cantor_circle_normal_form(g, alpha)) for g in gens + list(samples or [])]
    return matrix_rank(IntMatrix(vecs, len(vecs), 2))
