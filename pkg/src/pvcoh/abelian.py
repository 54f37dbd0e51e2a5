"""Exact integer linear algebra.

Smith normal form, cohomology of integer cochain complexes with explicit
generators, and direct limits of finitely generated abelian groups.

>>> smith_normal_form(IntMatrix([[2, 4], [6, 8]]))[1].to_lists()
[[2, 0], [0, 4]]
>>> GroupPresentation(1, (2,))
GroupPresentation(rank=1, torsion=(2,))
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .errors import CompositionNotZero, EmptySystem, ShapeMismatch


class IntMatrix:
    """Immutable dense matrix of Python ints with an explicit shape.

    The shape is stored separately so that 0 x n and n x 0 matrices behave.
    """

    __slots__ = ("rows", "cols", "_data", "_nz")

    def __init__(self, entries: Iterable[Iterable[int]] = (), rows: int | None = None, cols: int | None = None):
        data = tuple(tuple(int(x) for x in row) for row in entries)
        if rows is None:
            rows = len(data)
        if cols is None:
            cols = len(data[0]) if data else 0
        if not data:
            data = tuple((0,) * cols for _ in range(rows))
        if len(data) != rows or any(len(r) != cols for r in data):
            raise ShapeMismatch(f"entries do not form a {rows}x{cols} matrix")
        self.rows = rows
        self.cols = cols
        self._data = data
        self._nz = None

    @classmethod
    def zeros(cls, rows: int, cols: int) -> IntMatrix:
        return cls((), rows, cols)

    @classmethod
    def identity(cls, n: int) -> IntMatrix:
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)], n, n)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[int]], rows: int) -> IntMatrix:
        return cls([[c[i] for c in columns] for i in range(rows)], rows, len(columns))

    @classmethod
    def diagonal(cls, values: Sequence[int]) -> IntMatrix:
        n = len(values)
        return cls([[values[i] if i == j else 0 for j in range(n)] for i in range(n)], n, n)

    @classmethod
    def block_diagonal(cls, blocks: Sequence[IntMatrix]) -> IntMatrix:
        rows = sum(b.rows for b in blocks)
        cols = sum(b.cols for b in blocks)
        out = [[0] * cols for _ in range(rows)]
        r0 = c0 = 0
        for b in blocks:
            for i in range(b.rows):
                out[r0 + i][c0:c0 + b.cols] = b._data[i]
            r0 += b.rows
            c0 += b.cols
        return cls(out, rows, cols)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def __getitem__(self, idx: tuple[int, int]) -> int:
        i, j = idx
        return self._data[i][j]

    def row(self, i: int) -> tuple[int, ...]:
        return self._data[i]

    def col(self, j: int) -> tuple[int, ...]:
        return tuple(r[j] for r in self._data)

    def to_lists(self) -> list[list[int]]:
        return [list(r) for r in self._data]

    @property
    def T(self) -> IntMatrix:
        return IntMatrix([list(c) for c in zip(*self._data)] if self.rows else (), self.cols, self.rows)

    def is_zero(self) -> bool:
        return all(x == 0 for r in self._data for x in r)

    def apply(self, vec: Sequence[int]) -> list[int]:
        if len(vec) != self.cols:
            raise ShapeMismatch(f"vector of length {len(vec)} for {self.rows}x{self.cols} matrix")
        if self._nz is None:
            self._nz = [[(k, a) for k, a in enumerate(r) if a] for r in self._data]
        return [sum(a * vec[k] for k, a in r) for r in self._nz]

    def __matmul__(self, other: IntMatrix) -> IntMatrix:
        if self.cols != other.rows:
            raise ShapeMismatch(f"cannot multiply {self.shape} by {other.shape}")
        cols = other.T._data
        out = []
        for r in self._data:
            nz = [(k, a) for k, a in enumerate(r) if a]
            out.append([sum(a * c[k] for k, a in nz) for c in cols])
        return IntMatrix(out, self.rows, other.cols)

    def _check_same(self, other: IntMatrix) -> None:
        if self.shape != other.shape:
            raise ShapeMismatch(f"shapes {self.shape} and {other.shape} differ")

    def __add__(self, other: IntMatrix) -> IntMatrix:
        self._check_same(other)
        return IntMatrix([[a + b for a, b in zip(r, s)] for r, s in zip(self._data, other._data)], self.rows, self.cols)

    def __sub__(self, other: IntMatrix) -> IntMatrix:
        self._check_same(other)
        return IntMatrix([[a - b for a, b in zip(r, s)] for r, s in zip(self._data, other._data)], self.rows, self.cols)

    def __neg__(self) -> IntMatrix:
        return IntMatrix([[-a for a in r] for r in self._data], self.rows, self.cols)

    def __mul__(self, k: int) -> IntMatrix:
        return IntMatrix([[k * a for a in r] for r in self._data], self.rows, self.cols)

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, IntMatrix):
            return NotImplemented
        return self.shape == other.shape and self._data == other._data

    def __hash__(self) -> int:
        return hash((self.rows, self.cols, self._data))

    def __repr__(self) -> str:
        return f"IntMatrix({self.to_lists()!r}, rows={self.rows}, cols={self.cols})"

    def hstack(self, other: IntMatrix) -> IntMatrix:
        if self.rows != other.rows:
            raise ShapeMismatch("hstack needs equal row counts")
        return IntMatrix([a + b for a, b in zip(self._data, other._data)], self.rows, self.cols + other.cols)

    def vstack(self, other: IntMatrix) -> IntMatrix:
        if self.cols != other.cols:
            raise ShapeMismatch("vstack needs equal column counts")
        return IntMatrix(self._data + other._data, self.rows + other.rows, self.cols)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> IntMatrix:
        return IntMatrix([[self._data[i][j] for j in cols] for i in rows], len(rows), len(cols))


# ---------------------------------------------------------------- Smith form

def _add_row(A, src, dst, k):
    # row dst += k * row src
    A[dst] = [d + k * x for d, x in zip(A[dst], A[src])]


def _add_col(A, src, dst, k):
    # column dst += k * column src
    for r in A:
        x = r[src]
        if x:
            r[dst] += k * x


def _swap_cols(A, i, j):
    for r in A:
        r[i], r[j] = r[j], r[i]


class _Smith:
    """Elimination state: A = working matrix; optional U, U^-1, V^T, V^-1 trackers."""

    def __init__(self, M: IntMatrix, transforms: bool):
        m, n = M.rows, M.cols
        self.m, self.n = m, n
        self.A = M.to_lists()
        self.tr = transforms
        if transforms:
            eye = lambda k: [[1 if i == j else 0 for j in range(k)] for i in range(k)]
            self.U, self.Ui = eye(m), eye(m)
            self.Vt, self.Vi = eye(n), eye(n)

    # row operations act on U from the left and on U^-1 from the right
    def row_add(self, src, dst, k):
        _add_row(self.A, src, dst, k)
        if self.tr:
            _add_row(self.U, src, dst, k)
            _add_col(self.Ui, dst, src, -k)

    def row_swap(self, i, j):
        A = self.A
        A[i], A[j] = A[j], A[i]
        if self.tr:
            self.U[i], self.U[j] = self.U[j], self.U[i]
            _swap_cols(self.Ui, i, j)

    def row_neg(self, i):
        self.A[i] = [-x for x in self.A[i]]
        if self.tr:
            self.U[i] = [-x for x in self.U[i]]
            for r in self.Ui:
                r[i] = -r[i]

    # column operations act on V from the right and on V^-1 from the left
    def col_add(self, src, dst, k):
        _add_col(self.A, src, dst, k)
        if self.tr:
            _add_row(self.Vt, src, dst, k)
            _add_row(self.Vi, dst, src, -k)

    def col_swap(self, i, j):
        _swap_cols(self.A, i, j)
        if self.tr:
            self.Vt[i], self.Vt[j] = self.Vt[j], self.Vt[i]
            self.Vi[i], self.Vi[j] = self.Vi[j], self.Vi[i]

    def _pivot(self, t):
        """Minimal |entry| in the block A[t:, t:], lowest row then column on ties."""
        best = None
        n = self.n
        for i in range(t, self.m):
            row = self.A[i]
            if not any(row[t:]):
                continue
            for j in range(t, n):
                a = row[j]
                if a:
                    a = -a if a < 0 else a
                    if best is None or a < best[0]:
                        best = (a, i, j)
                        if a == 1:
                            return best
        return best

    def run(self):
        A, m, n = self.A, self.m, self.n
        t = 0
        while t < min(m, n):
            best = self._pivot(t)
            if best is None:
                break
            _, pi, pj = best
            if pi != t:
                self.row_swap(pi, t)
            if pj != t:
                self.col_swap(pj, t)
            while True:
                p = A[t][t]
                clean = True
                for i in range(t + 1, m):
                    if A[i][t]:
                        self.row_add(t, i, -(A[i][t] // p))
                        if A[i][t]:
                            clean = False
                row = A[t]
                for j in range(t + 1, n):
                    if row[j]:
                        self.col_add(t, j, -(row[j] // p))
                        row = A[t]
                        if row[j]:
                            clean = False
                if not clean:
                    # a remainder smaller than the pivot is left in row or column t
                    best = None
                    for i in range(t, m):
                        a = abs(A[i][t])
                        if a and (best is None or a < best[0]):
                            best = (a, i, t)
                    for j in range(t + 1, n):
                        a = abs(A[t][j])
                        if a and a < best[0]:
                            best = (a, t, j)
                    _, pi, pj = best
                    if pi != t:
                        self.row_swap(pi, t)
                    if pj != t:
                        self.col_swap(pj, t)
                    continue
                if p in (1, -1):
                    break
                bad = next(
                    (i for i in range(t + 1, m) if any(x % p for x in A[i][t + 1:])), None
                )
                if bad is None:
                    break
                self.row_add(bad, t, 1)
            if A[t][t] < 0:
                self.row_neg(t)
            t += 1
        self.rank = t
        return self

    def D(self) -> IntMatrix:
        return IntMatrix(self.A, self.m, self.n)


def smith_normal_form(M: IntMatrix) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Return (U, D, V) with U*M*V = D, U and V unimodular, D in Smith form.

    Pivots are chosen as entries of minimal absolute value in the remaining
    block, ties broken by lowest row then lowest column, so the output is a
    deterministic function of M.
    """
    s = _Smith(M, True).run()
    return IntMatrix(s.U, s.m, s.m), s.D(), IntMatrix(s.Vt, s.n, s.n).T


def smith_with_inverses(M: IntMatrix):
    """(U, D, V, U^-1, V^-1, rank)."""
    s = _Smith(M, True).run()
    return (
        IntMatrix(s.U, s.m, s.m),
        s.D(),
        IntMatrix(s.Vt, s.n, s.n).T,
        IntMatrix(s.Ui, s.m, s.m),
        IntMatrix(s.Vi, s.n, s.n),
        s.rank,
    )


def invariant_factors(M: IntMatrix) -> list[int]:
    """Nonzero diagonal entries of the Smith form, in divisibility order."""
    s = _Smith(M, False).run()
    return [s.A[i][i] for i in range(s.rank)]


def matrix_rank(M: IntMatrix) -> int:
    return len(invariant_factors(M))


def unimodular_inverse(U: IntMatrix) -> IntMatrix:
    """Inverse of a square unimodular integer matrix."""
    n = U.rows
    P, D, Q = smith_normal_form(U)
    # P U Q = D = identity for unimodular U, so U^-1 = Q P
    if any(D[i, i] != 1 for i in range(n)):
        raise ValueError("matrix is not unimodular")
    return Q @ P


def determinant(M: IntMatrix) -> int:
    """Exact determinant via fraction-free Bareiss elimination."""
    if M.rows != M.cols:
        raise ShapeMismatch("determinant of a non-square matrix")
    n = M.rows
    A = M.to_lists()
    sign = 1
    prev = 1
    for k in range(n - 1):
        if A[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if A[i][k]), None)
            if swap is None:
                return 0
            A[k], A[swap] = A[swap], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1] if n else 1


# ---------------------------------------------------------------- groups

@dataclass(frozen=True)
class GroupPresentation:
    """Z^rank plus torsion Z/d1 + Z/d2 + ... with d1 | d2 | ... and each di >= 2."""

    rank: int = 0
    torsion: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "torsion", tuple(int(d) for d in self.torsion))
        if self.rank < 0:
            raise ValueError("negative rank")
        for a, b in zip(self.torsion, self.torsion[1:]):
            if b % a:
                raise ValueError(f"torsion {self.torsion} is not a divisibility chain")
        if any(d < 2 for d in self.torsion):
            raise ValueError("invariant factors must be >= 2")

    @classmethod
    def from_relations(cls, n_generators: int, relation_factors: Iterable[int]) -> GroupPresentation:
        """Group Z^n / (f1 e1, f2 e2, ...) where the factors are Smith diagonal entries."""
        facs = [abs(f) for f in relation_factors if f]
        return cls(n_generators - len(facs), tuple(f for f in facs if f > 1))

    @classmethod
    def free(cls, rank: int) -> GroupPresentation:
        return cls(rank, ())

    @property
    def is_trivial(self) -> bool:
        return self.rank == 0 and not self.torsion

    @property
    def n_generators(self) -> int:
        return len(self.torsion) + self.rank

    def to_json(self) -> dict:
        return {"rank": self.rank, "torsion": list(self.torsion)}

    @classmethod
    def from_json(cls, obj: dict) -> GroupPresentation:
        return cls(obj["rank"], tuple(obj.get("torsion", ())))

    def __str__(self) -> str:
        parts = []
        if self.rank == 1:
            parts.append("Z")
        elif self.rank > 1:
            parts.append(f"Z^{self.rank}")
        parts += [f"Z/{d}" for d in self.torsion]
        return " + ".join(parts) if parts else "0"


def check_composition(d_in: IntMatrix, d_out: IntMatrix) -> None:
    if d_in.rows != d_out.cols:
        raise ShapeMismatch(f"d_in has {d_in.rows} rows but d_out has {d_out.cols} columns")
    if not (d_out @ d_in).is_zero():
        raise CompositionNotZero("d_out * d_in is not zero")


def cohomology_at(d_in: IntMatrix, d_out: IntMatrix) -> GroupPresentation:
    """ker(d_out) / im(d_in) as a normal-form group."""
    check_composition(d_in, d_out)
    n = d_in.rows
    f_in = invariant_factors(d_in)
    r_out = matrix_rank(d_out)
    return GroupPresentation(n - len(f_in) - r_out, tuple(f for f in f_in if f > 1))


@dataclass
class CohomologyBasis:
    """ker(d_out)/im(d_in) together with explicit cocycle generators.

    Generators are ordered torsion first (matching ``group.torsion``) then free.
    ``coordinates`` expresses any cocycle in these generators; torsion
    coordinates are reduced modulo their orders.
    """

    group: GroupPresentation
    generators: list[list[int]]
    _U: IntMatrix
    _r: int
    _torsion_slots: list[int]
    _Vinv: IntMatrix
    _rank_a: int

    def coordinates(self, cocycle: Sequence[int]) -> list[int]:
        y = self._U.apply(list(cocycle))
        tors = [y[k] % self.group.torsion[i] for i, k in enumerate(self._torsion_slots)]
        tail = y[self._r:]
        z = self._Vinv.apply(tail) if tail else []
        return tors + z[self._rank_a:]

    def induced_matrix(self, target: CohomologyBasis, cochain_map: IntMatrix) -> IntMatrix:
        """Matrix of the map on cohomology induced by a cochain map (source -> target)."""
        cols = [target.coordinates(cochain_map.apply(g)) for g in self.generators]
        return IntMatrix.from_columns(cols, target.group.n_generators)


def cohomology_basis(d_in: IntMatrix, d_out: IntMatrix) -> CohomologyBasis:
    check_composition(d_in, d_out)
    n = d_in.rows
    U, D, _, Uinv, _, r = smith_with_inverses(d_in)
    torsion_slots = [k for k in range(r) if D[k, k] > 1]
    # the directions r.. (columns of U^-1) span a complement of the saturation of im d_in;
    # the cocycles among them are found from the Smith form of d_out restricted there
    tail = list(range(r, n))
    B = Uinv.submatrix(list(range(n)), tail)
    A = d_out @ B
    _, _, VA, _, VAinv, rank_a = smith_with_inverses(A)
    free_gens = [B.apply(list(VA.col(k))) for k in range(rank_a, VA.cols)]
    tors_gens = [list(Uinv.col(k)) for k in torsion_slots]
    group = GroupPresentation(len(free_gens), tuple(D[k, k] for k in torsion_slots))
    return CohomologyBasis(group, tors_gens + free_gens, U, r, torsion_slots, VAinv, rank_a)


# ---------------------------------------------------------------- morphisms

def relation_matrix(G: GroupPresentation) -> IntMatrix:
    """Columns are the relations of G on its generators (torsion first, then free)."""
    k = G.n_generators
    return IntMatrix.from_columns(
        [[d if i == t else 0 for i in range(k)] for t, d in enumerate(G.torsion)], k
    )


def cokernel(M: IntMatrix, source: GroupPresentation, target: GroupPresentation) -> GroupPresentation:
    """Cokernel of a homomorphism given on generators."""
    if M.rows != target.n_generators or M.cols != source.n_generators:
        raise ShapeMismatch("map does not match its groups")
    rel = M.hstack(relation_matrix(target))
    return GroupPresentation.from_relations(target.n_generators, invariant_factors(rel))


def image_rank(M: IntMatrix, source: GroupPresentation) -> int:
    """Rank of the image; torsion generators contribute nothing to it."""
    free_cols = list(range(len(source.torsion), source.n_generators))
    return matrix_rank(M.submatrix(list(range(M.rows)), free_cols))


def is_isomorphism(M: IntMatrix, source: GroupPresentation, target: GroupPresentation) -> bool:
    # a surjection between isomorphic finitely generated abelian groups is injective
    return source == target and cokernel(M, source, target).is_trivial


class Status(str, enum.Enum):
    STABILIZED = "Stabilized"
    NOT_STABILIZED = "NotStabilized"


@dataclass(frozen=True)
class DirectSystem:
    groups: tuple[GroupPresentation, ...]
    maps: tuple[IntMatrix, ...]
    stabilization_window: int = 1

    def __post_init__(self):
        object.__setattr__(self, "groups", tuple(self.groups))
        object.__setattr__(self, "maps", tuple(self.maps))
        if self.groups and len(self.maps) != len(self.groups) - 1:
            raise ShapeMismatch("need exactly one map between consecutive groups")
        for l, M in enumerate(self.maps):
            if M.cols != self.groups[l].n_generators or M.rows != self.groups[l + 1].n_generators:
                raise ShapeMismatch(f"map {l} does not match groups {l} and {l + 1}")


@dataclass
class MapReport:
    index: int
    matrix: IntMatrix
    isomorphism: bool
    cokernel: GroupPresentation
    kernel_rank: int

    def to_json(self) -> dict:
        return {
            "index": self.index,
            "matrix": self.matrix.to_lists(),
            "isomorphism": self.isomorphism,
            "cokernel": self.cokernel.to_json(),
            "kernel_rank": self.kernel_rank,
        }


@dataclass
class DirectLimit:
    limit: GroupPresentation
    status: Status
    maps: list[MapReport] = field(default_factory=list)
    groups: list[GroupPresentation] = field(default_factory=list)

    def __iter__(self) -> Iterator:
        yield self.limit
        yield self.status

    def to_json(self) -> dict:
        return {
            "limit": self.limit.to_json(),
            "status": self.status.value,
            "levels": [g.to_json() for g in self.groups],
            "maps": [m.to_json() for m in self.maps],
        }


def direct_limit_fg(sys: DirectSystem) -> DirectLimit:
    """Limit of a direct system when its tail consists of isomorphisms.

    Stabilized is reported only if the last ``stabilization_window`` maps are
    all isomorphisms. Otherwise the last group is returned as a finite-level
    stand-in, flagged NotStabilized, with per-map kernel and cokernel data.
    """
    if not sys.groups:
        raise EmptySystem("direct system has no groups")
    reports = []
    for l, M in enumerate(sys.maps):
        src, tgt = sys.groups[l], sys.groups[l + 1]
        coker = cokernel(M, src, tgt)
        krank = src.rank - image_rank(M, src)
        reports.append(MapReport(l, M, is_isomorphism(M, src, tgt), coker, krank))
    w = max(1, sys.stabilization_window)
    tail = reports[-w:]
    ok = len(tail) == w and all(r.isomorphism for r in tail)
    status = Status.STABILIZED if ok else Status.NOT_STABILIZED
    return DirectLimit(sys.groups[-1], status, reports, list(sys.groups))


# ---------------------------------------------------------------- subgroups and subquotients

class IntegerSolver:
    """Integer solutions of A y = b for a fixed matrix A."""

    def __init__(self, A: IntMatrix):
        self.A = A
        self.U, self.D, self.V, _, _, self.r = smith_with_inverses(A)

    def solve(self, b: Sequence[int]) -> list[int] | None:
        if len(b) != self.A.rows:
            raise ShapeMismatch("right-hand side has the wrong length")
        c = self.U.apply(list(b))
        z = [0] * self.A.cols
        for k in range(self.r):
            q, rem = divmod(c[k], self.D[k, k])
            if rem:
                return None
            z[k] = q
        if any(c[self.r:]):
            return None
        return self.V.apply(z)


def kernel_lattice(A: IntMatrix) -> IntMatrix:
    """Columns form a basis of {y : A y = 0}."""
    _, _, V, _, _, r = smith_with_inverses(A)
    return V.submatrix(list(range(V.rows)), list(range(r, V.cols)))


def _reduce(x: Sequence[int], G: GroupPresentation) -> list[int]:
    t = len(G.torsion)
    return [v % G.torsion[k] if k < t else v for k, v in enumerate(x)]


def same_morphism(M1: IntMatrix, M2: IntMatrix, target: GroupPresentation) -> bool:
    """Do two matrices define the same homomorphism into ``target``."""
    if M1.shape != M2.shape:
        return False
    return all(not any(_reduce(list((M1 - M2).col(c)), target)) for c in range(M1.cols))


def is_homomorphism(M: IntMatrix, source: GroupPresentation, target: GroupPresentation) -> bool:
    """Does M send the relations of ``source`` into those of ``target``."""
    if M.rows != target.n_generators or M.cols != source.n_generators:
        return False
    return same_morphism(M @ relation_matrix(source), IntMatrix.zeros(M.rows, len(source.torsion)), target)


def kernel_generators(M: IntMatrix, source: GroupPresentation, target: GroupPresentation) -> IntMatrix:
    """Generators (columns, in source coordinates) of the kernel of M : source -> target."""
    n = source.n_generators
    big = M.hstack(-relation_matrix(target))
    K = kernel_lattice(big)
    return K.submatrix(list(range(n)), list(range(K.cols)))


def contains(G: GroupPresentation, gens: IntMatrix, x: Sequence[int]) -> bool:
    """Is x in the subgroup of G generated by the columns of ``gens``."""
    return IntegerSolver(gens.hstack(relation_matrix(G))).solve(list(x)) is not None


def same_subgroup(G: GroupPresentation, A: IntMatrix, B: IntMatrix) -> bool:
    sa = IntegerSolver(A.hstack(relation_matrix(G)))
    sb = IntegerSolver(B.hstack(relation_matrix(G)))
    return all(sb.solve(list(A.col(c))) is not None for c in range(A.cols)) and all(
        sa.solve(list(B.col(c))) is not None for c in range(B.cols)
    )


class Subquotient:
    """A/B for subgroups B <= A of a group G, both given by generator columns in G coordinates.

    ``group`` is the normal form; ``coordinates`` takes an element of A (in G
    coordinates) to normal-form coordinates and ``representatives`` lists an
    element of A for every normal-form generator.
    """

    def __init__(self, ambient: GroupPresentation, A: IntMatrix, B: IntMatrix | None = None):
        n = ambient.n_generators
        if B is None:
            B = IntMatrix.zeros(n, 0)
        if A.rows != n or B.rows != n:
            raise ShapeMismatch("generators do not live in the ambient group")
        self.ambient = ambient
        rel = relation_matrix(ambient)
        t = A.cols
        K = kernel_lattice(A.hstack(-B).hstack(-rel))
        rel_y = K.submatrix(list(range(t)), list(range(K.cols)))
        U, D, _, Uinv, _, r = smith_with_inverses(rel_y)
        self._keep = [k for k in range(t) if k >= r or D[k, k] != 1]
        self.group = GroupPresentation(t - r, tuple(D[k, k] for k in range(r) if D[k, k] != 1))
        self._U = U
        self._t = t
        self._solver = IntegerSolver(A.hstack(rel))
        self.representatives = [_reduce(A.apply(list(Uinv.col(k))), ambient) for k in self._keep]

    def coordinates(self, x: Sequence[int]) -> list[int]:
        y = self._solver.solve(list(x))
        if y is None:
            raise ValueError("element is not in the numerator subgroup")
        z = self._U.apply(y[: self._t])
        return _reduce([z[k] for k in self._keep], self.group)

    def matrix_from(self, vectors: Sequence[Sequence[int]]) -> IntMatrix:
        return IntMatrix.from_columns([self.coordinates(v) for v in vectors], self.group.n_generators)
