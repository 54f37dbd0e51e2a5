"""Exact couples of finitely generated abelian groups and their spectral sequences.

Couples are bigraded by (p, n): p is the filtration index and n the total
degree, taken modulo ``period`` (2 for K-theory, where the coefficients of a
point are Z in even and 0 in odd degrees). Every group is a normal-form
GroupPresentation with explicit generators and every map is an integer
matrix on generators.

A couple is stored on a finite window of p. Outside the window E is zero
and D is either zero or constant, continuing with i equal to the identity.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .abelian import (
    CohomologyBasis,
    DirectLimit,
    DirectSystem,
    GroupPresentation,
    IntegerSolver,
    IntMatrix,
    Status,
    Subquotient,
    cohomology_basis,
    direct_limit_fg,
    is_homomorphism,
    is_isomorphism,
    kernel_generators,
    relation_matrix,
    same_morphism,
)
from .delta_complex import CellularMap, DeltaComplex, _require_valid, coboundary_matrix
from .errors import InvalidComplex, NotAMorphism, NotExact, ShapeMismatch

Bideg = tuple[int, int]
ZERO = GroupPresentation(0, ())


def _add(a: Bideg, b: Bideg, period: int) -> Bideg:
    return (a[0] + b[0], (a[1] + b[1]) % period)


def _sub(a: Bideg, b: Bideg, period: int) -> Bideg:
    return (a[0] - b[0], (a[1] - b[1]) % period)


# ---------------------------------------------------------------- filtered complexes

@dataclass
class FilteredComplex:
    """A free cochain complex on named basis cells with a decreasing filtration.

    F^p is spanned by the cells with ``filt >= p``; the differential may not
    lower the filtration. Degrees are taken modulo ``period``.
    """

    cells: list[str]
    grade: dict[str, int]
    filt: dict[str, int]
    delta: dict[str, dict[str, int]]
    period: int = 2

    def __post_init__(self):
        self.grade = {c: g % self.period for c, g in self.grade.items()}
        self._cache: dict = {}
        for c, img in self.delta.items():
            for t, x in img.items():
                if x and self.filt[t] < self.filt[c]:
                    raise InvalidComplex(f"differential lowers the filtration at {c!r}")
                if x and self.grade[t] != (self.grade[c] + 1) % self.period:
                    raise InvalidComplex(f"differential does not raise the degree at {c!r}")

    @property
    def p_min(self) -> int:
        return min(self.filt.values()) if self.filt else 0

    @property
    def p_max(self) -> int:
        return max(self.filt.values()) if self.filt else 0

    def span(self, a: int, b: int, n: int) -> list[str]:
        """Cells of degree n with a <= filt < b."""
        return [c for c in self.cells if a <= self.filt[c] < b and self.grade[c] == n % self.period]

    def _d(self, a: int, b: int, n: int) -> IntMatrix:
        src, tgt = self.span(a, b, n), self.span(a, b, n + 1)
        ti = {c: k for k, c in enumerate(tgt)}
        rows = [[0] * len(src) for _ in tgt]
        for c, s in enumerate(src):
            for t, x in self.delta.get(s, {}).items():
                if t in ti:
                    rows[ti[t]][c] += x
        return IntMatrix(rows, len(tgt), len(src))

    def H(self, a: int, b: int, n: int) -> tuple[list[str], CohomologyBasis]:
        """Cohomology of F^a / F^b in degree n with its cocycle basis."""
        key = (a, b, n % self.period)
        if key not in self._cache:
            self._cache[key] = (self.span(a, b, n), cohomology_basis(self._d(a, b, n - 1), self._d(a, b, n)))
        return self._cache[key]

    def apply_delta(self, vec: dict[str, int]) -> dict[str, int]:
        out: dict[str, int] = {}
        for c, x in vec.items():
            if x:
                for t, y in self.delta.get(c, {}).items():
                    out[t] = out.get(t, 0) + x * y
        return {t: x for t, x in out.items() if x}


def _as_vec(cells: list[str], v: list[int]) -> dict[str, int]:
    return {c: x for c, x in zip(cells, v) if x}


def _as_list(cells: list[str], v: dict[str, int]) -> list[int]:
    return [v.get(c, 0) for c in cells]


def skeleton_filtered_complex(K: DeltaComplex, period: int = 2) -> FilteredComplex:
    """Cellular cochains of K with the skeleton filtration and K-theory of a point as coefficients.

    With period 2 the cochains are summed into even and odd parts, which
    encodes K^s(point) = Z for even s and 0 for odd s.
    """
    _require_valid(K)
    cells = [c for n in sorted(K.cells) for c in K.cells[n]]
    delta: dict[str, dict[str, int]] = {c: {} for c in cells}
    for n in range(1, K.dimension + 1):
        M = coboundary_matrix(K, n)
        for r, s in enumerate(K.cells[n]):
            for c, t in enumerate(K.cells[n - 1]):
                if M[r, c]:
                    delta[t][s] = delta[t].get(s, 0) + M[r, c]
    grade = {c: K.dim_of(c) for c in cells}
    filt = {c: K.dim_of(c) for c in cells}
    return FilteredComplex(cells, grade, filt, delta, period)


# ---------------------------------------------------------------- exact couples

@dataclass
class ExactCouple:
    """The triangle D --i--> D --j--> E --k--> D with bidegrees deg_i, deg_j, deg_k."""

    D: dict[Bideg, GroupPresentation]
    E: dict[Bideg, GroupPresentation]
    i: dict[Bideg, IntMatrix]  # keyed by source bidegree
    j: dict[Bideg, IntMatrix]
    k: dict[Bideg, IntMatrix]
    deg_i: Bideg
    deg_j: Bideg
    deg_k: Bideg
    d_window: tuple[int, int]
    e_window: tuple[int, int]
    below: str = "zero"  # D below the window: "zero" or "stable"
    above: str = "zero"
    period: int = 2
    name: str = ""
    # bookkeeping from derivation: subquotients of the parent's groups
    parent: ExactCouple | None = field(default=None, repr=False)
    sq_D: dict = field(default_factory=dict, repr=False)
    sq_E: dict = field(default_factory=dict, repr=False)
    validated: bool = field(default=False, repr=False, compare=False)

    # -- virtual access outside the window

    def _d_in(self, p: int) -> bool:
        return self.d_window[0] <= p <= self.d_window[1]

    def _side(self, p: int) -> str | None:
        if p < self.d_window[0]:
            return self.below
        if p > self.d_window[1]:
            return self.above
        return None

    def _clamp(self, b: Bideg) -> Bideg | None:
        """Stored node standing in for b, or None when D is zero at b."""
        p, n = b[0], b[1] % self.period
        side = self._side(p)
        if side is None:
            return (p, n)
        if side == "zero":
            return None
        lo, hi = self.d_window
        return (lo if p < lo else hi, n)

    def D_at(self, b: Bideg) -> GroupPresentation:
        c = self._clamp(b)
        return self.D.get(c, ZERO) if c is not None else ZERO

    def E_at(self, b: Bideg) -> GroupPresentation:
        b = (b[0], b[1] % self.period)
        return self.E.get(b, ZERO)

    def i_at(self, b: Bideg) -> IntMatrix:
        b = (b[0], b[1] % self.period)
        t = _add(b, self.deg_i, self.period)
        src, tgt = self.D_at(b), self.D_at(t)
        if self._d_in(b[0]) and self._d_in(t[0]):
            return self.i[b]
        if src.is_trivial or tgt.is_trivial:
            return IntMatrix.zeros(tgt.n_generators, src.n_generators)
        if src != tgt:
            raise ShapeMismatch(f"stable continuation of D at {b} changes the group")
        return IntMatrix.identity(src.n_generators)

    def j_at(self, b: Bideg) -> IntMatrix:
        b = (b[0], b[1] % self.period)
        t = _add(b, self.deg_j, self.period)
        if b in self.j:
            return self.j[b]
        return IntMatrix.zeros(self.E_at(t).n_generators, self.D_at(b).n_generators)

    def k_at(self, b: Bideg) -> IntMatrix:
        b = (b[0], b[1] % self.period)
        t = _add(b, self.deg_k, self.period)
        if b in self.k:
            return self.k[b]
        return IntMatrix.zeros(self.D_at(t).n_generators, self.E_at(b).n_generators)

    @property
    def deg_d(self) -> Bideg:
        return _add(self.deg_k, self.deg_j, self.period)

    def d_at(self, b: Bideg) -> IntMatrix:
        """d = j k : E^b -> E^{b + deg_k + deg_j}."""
        return self.j_at(_add(b, self.deg_k, self.period)) @ self.k_at(b)

    def e_bidegrees(self) -> list[Bideg]:
        lo, hi = self.e_window
        return [(p, n) for p in range(lo, hi + 1) for n in range(self.period)]

    def d_bidegrees(self) -> list[Bideg]:
        lo, hi = self.d_window
        return [(p, n) for p in range(lo, hi + 1) for n in range(self.period)]

    def is_trivial(self) -> bool:
        """E = 0 everywhere (then i is an isomorphism)."""
        return all(g.is_trivial for g in self.E.values())

    def to_json(self) -> dict:
        key = lambda b: f"({b[0]},{b[1]})"
        return {
            "name": self.name,
            "period": self.period,
            "degrees": {"i": list(self.deg_i), "j": list(self.deg_j), "k": list(self.deg_k)},
            "D": {key(b): g.to_json() for b, g in sorted(self.D.items())},
            "E": {key(b): g.to_json() for b, g in sorted(self.E.items())},
        }


def _check_exact_at(name: str, f: IntMatrix, X: GroupPresentation, Y: GroupPresentation,
                    g: IntMatrix, Z: GroupPresentation, fname: str, gname: str) -> None:
    if not same_morphism(g @ f, IntMatrix.zeros(Z.n_generators, X.n_generators), Z):
        raise NotExact(name, f"{gname} o {fname} is not zero")
    K = kernel_generators(g, Y, Z)
    solver = IntegerSolver(f.hstack(relation_matrix(Y)))
    for c in range(K.cols):
        if solver.solve(list(K.col(c))) is None:
            raise NotExact(name, f"ker {gname} is larger than im {fname}")


def validate_couple(T: ExactCouple) -> None:
    """Exactness at every node of the triangle, including the nodes next to the window."""
    if T.validated:
        return
    P = T.period
    lo = min(T.d_window[0], T.e_window[0]) - 2
    hi = max(T.d_window[1], T.e_window[1]) + 2
    for p in range(lo, hi + 1):
        for n in range(P):
            b = (p, n)
            for name, M, src, tgt in (
                ("i", T.i_at(b), T.D_at(b), T.D_at(_add(b, T.deg_i, P))),
                ("j", T.j_at(b), T.D_at(b), T.E_at(_add(b, T.deg_j, P))),
                ("k", T.k_at(b), T.E_at(b), T.D_at(_add(b, T.deg_k, P))),
            ):
                if not is_homomorphism(M, src, tgt):
                    raise NotExact(f"{name}{b}", "map does not respect relations")
            # at D^b: im i = ker j
            a = _sub(b, T.deg_i, P)
            _check_exact_at(f"D{b}", T.i_at(a), T.D_at(a), T.D_at(b), T.j_at(b),
                            T.E_at(_add(b, T.deg_j, P)), "i", "j")
            # at E^b: im j = ker k
            a = _sub(b, T.deg_j, P)
            _check_exact_at(f"E{b}", T.j_at(a), T.D_at(a), T.E_at(b), T.k_at(b),
                            T.D_at(_add(b, T.deg_k, P)), "j", "k")
            # at D^b: im k = ker i
            a = _sub(b, T.deg_k, P)
            _check_exact_at(f"D{b}", T.k_at(a), T.E_at(a), T.D_at(b), T.i_at(b),
                            T.D_at(_add(b, T.deg_i, P)), "k", "i")
    T.validated = True


def same_couple(S: ExactCouple, T: ExactCouple) -> bool:
    """Equal groups and equal maps at every bidegree, including the continuations past the windows."""
    if (S.deg_i, S.deg_j, S.deg_k, S.period) != (T.deg_i, T.deg_j, T.deg_k, T.period):
        return False
    P = S.period
    lo = min(S.d_window[0], T.d_window[0], S.e_window[0], T.e_window[0]) - 2
    hi = max(S.d_window[1], T.d_window[1], S.e_window[1], T.e_window[1]) + 2
    for p in range(lo, hi + 1):
        for n in range(P):
            b = (p, n)
            if S.D_at(b) != T.D_at(b) or S.E_at(b) != T.E_at(b):
                return False
            for m, deg, tgt in (("i_at", S.deg_i, T.D_at), ("j_at", S.deg_j, T.E_at), ("k_at", S.deg_k, T.D_at)):
                if not same_morphism(getattr(S, m)(b), getattr(T, m)(b), tgt(_add(b, deg, P))):
                    return False
    return True


def derive_couple(T: ExactCouple, validate: bool = True) -> ExactCouple:
    """D' = i(D), E' = ker d / im d, i' = i on i(D), j'(i x) = [j x], k'[e] = k e."""
    if validate:
        validate_couple(T)
    P = T.period
    lo, hi = T.d_window
    d_window = (lo - 1, hi + 1)
    sq_D: dict[Bideg, Subquotient] = {}
    for p in range(d_window[0], d_window[1] + 1):
        for n in range(P):
            b = (p, n)
            a = _sub(b, T.deg_i, P)
            sq_D[b] = Subquotient(T.D_at(b), T.i_at(a))
    sq_E: dict[Bideg, Subquotient] = {}
    dd = T.deg_d
    for b in T.e_bidegrees():
        E = T.E_at(b)
        ker = kernel_generators(T.d_at(b), E, T.E_at(_add(b, dd, P)))
        im = T.d_at(_sub(b, dd, P))
        sq_E[b] = Subquotient(E, ker, im)

    D = {b: s.group for b, s in sq_D.items()}
    E = {b: s.group for b, s in sq_E.items()}
    i_new, j_new, k_new = {}, {}, {}
    deg_j = _sub(T.deg_j, T.deg_i, P)
    for b, s in sq_D.items():
        t = _add(b, T.deg_i, P)
        if t in sq_D:
            Mi = T.i_at(b)
            i_new[b] = sq_D[t].matrix_from([Mi.apply(g) for g in s.representatives])
        t = _add(b, deg_j, P)
        if t in sq_E:
            a = _sub(b, T.deg_i, P)
            solver = IntegerSolver(T.i_at(a).hstack(relation_matrix(T.D_at(b))))
            Mj = T.j_at(a)
            cols = []
            for g in s.representatives:
                x = solver.solve(g)
                cols.append(sq_E[t].coordinates(Mj.apply(x[: T.D_at(a).n_generators])))
            j_new[b] = IntMatrix.from_columns(cols, sq_E[t].group.n_generators)
    for b, s in sq_E.items():
        t = _add(b, T.deg_k, P)
        if t in sq_D:
            Mk = T.k_at(b)
            k_new[b] = sq_D[t].matrix_from([Mk.apply(e) for e in s.representatives])
    out = ExactCouple(D, E, i_new, j_new, k_new, T.deg_i, deg_j, T.deg_k, d_window, T.e_window,
                      T.below, T.above, P, T.name + "'", T, sq_D, sq_E)
    if validate:
        validate_couple(out)
    return out


def trivial_couple(D: dict[Bideg, GroupPresentation], deg_i: Bideg, deg_j: Bideg, deg_k: Bideg,
                   window: tuple[int, int], period: int = 2, name: str = "T_A") -> ExactCouple:
    """(D, 0, id, 0, 0): D constant along i on the window and beyond."""
    i = {}
    for b, g in D.items():
        t = _add(b, deg_i, period)
        if t in D:
            i[b] = IntMatrix.identity(g.n_generators)
    return ExactCouple(dict(D), {}, i, {}, {}, deg_i, deg_j, deg_k, window, window, "stable", "stable",
                       period, name)


# ---------------------------------------------------------------- couples of filtered complexes

def _coords(cb: tuple[list[str], CohomologyBasis], vec: dict[str, int]) -> list[int]:
    cells, basis = cb
    return basis.coordinates(_as_list(cells, vec))


def _gens(cb: tuple[list[str], CohomologyBasis]) -> list[dict[str, int]]:
    cells, basis = cb
    return [_as_vec(cells, g) for g in basis.generators]


def _restrict(vec: dict[str, int], FC: FilteredComplex, a: int, b: int) -> dict[str, int]:
    return {c: x for c, x in vec.items() if a <= FC.filt[c] < b}


def filtration_couple(FC: FilteredComplex, name: str = "T_I") -> ExactCouple:
    """From 0 -> F^{p+1} -> F^p -> F^p/F^{p+1} -> 0.

    D^{p,n} = H^n(F^p), E^{p,n} = H^n(F^p/F^{p+1}); i is induced by inclusion,
    j by projection and k is the connecting map.
    """
    P, lo, hi = FC.period, FC.p_min, FC.p_max
    top = hi + 1
    D, E, i, j, k = {}, {}, {}, {}, {}
    for p in range(lo, hi + 2):
        for n in range(P):
            D[(p, n)] = FC.H(p, top, n)[1].group
    for p in range(lo, hi + 1):
        for n in range(P):
            E[(p, n)] = FC.H(p, p + 1, n)[1].group
    for p in range(lo, hi + 2):
        for n in range(P):
            src = FC.H(p, top, n)
            if p - 1 >= lo:
                tgt = FC.H(p - 1, top, n)
                i[(p, n)] = IntMatrix.from_columns([_coords(tgt, g) for g in _gens(src)], tgt[1].group.n_generators)
            if p <= hi:
                tgt = FC.H(p, p + 1, n)
                j[(p, n)] = IntMatrix.from_columns(
                    [_coords(tgt, _restrict(g, FC, p, p + 1)) for g in _gens(src)], tgt[1].group.n_generators
                )
    for p in range(lo, hi + 1):
        for n in range(P):
            src, tgt = FC.H(p, p + 1, n), FC.H(p + 1, top, n + 1)
            k[(p, n)] = IntMatrix.from_columns(
                [_coords(tgt, _restrict(FC.apply_delta(g), FC, p + 1, top)) for g in _gens(src)],
                tgt[1].group.n_generators,
            )
    return ExactCouple(D, E, i, j, k, (-1, 0), (0, 0), (1, 1), (lo, hi + 1), (lo, hi), "stable", "zero", P, name)


def cofiltration_couple_of(FC: FilteredComplex, name: str = "T_F") -> ExactCouple:
    """From 0 -> Q_p -> F_p -> F_{p-1} -> 0 with F_p = C / F^{p+1} and Q_p = F^p / F^{p+1}.

    D^{p,n} = H^n(F_p), E^{p,n} = H^n(Q_p); the inclusion Q_p -> F_p plays the
    part of k, restriction F_p -> F_{p-1} that of i, and the connecting map
    H^n(F_{p-1}) -> H^{n+1}(Q_p) that of j.
    """
    P, lo, hi = FC.period, FC.p_min, FC.p_max
    D, E, i, j, k = {}, {}, {}, {}, {}
    for p in range(lo - 1, hi + 1):
        for n in range(P):
            D[(p, n)] = FC.H(lo, p + 1, n)[1].group
    for p in range(lo, hi + 1):
        for n in range(P):
            E[(p, n)] = FC.H(p, p + 1, n)[1].group
    for p in range(lo - 1, hi + 1):
        for n in range(P):
            src = FC.H(lo, p + 1, n)
            if p - 1 >= lo - 1:
                tgt = FC.H(lo, p, n)
                i[(p, n)] = IntMatrix.from_columns(
                    [_coords(tgt, _restrict(g, FC, lo, p)) for g in _gens(src)], tgt[1].group.n_generators
                )
            if p + 1 <= hi:
                tgt = FC.H(p + 1, p + 2, n + 1)
                j[(p, n)] = IntMatrix.from_columns(
                    [_coords(tgt, _restrict(FC.apply_delta(g), FC, p + 1, p + 2)) for g in _gens(src)],
                    tgt[1].group.n_generators,
                )
    for p in range(lo, hi + 1):
        for n in range(P):
            src, tgt = FC.H(p, p + 1, n), FC.H(lo, p + 1, n)
            k[(p, n)] = IntMatrix.from_columns([_coords(tgt, g) for g in _gens(src)], tgt[1].group.n_generators)
    return ExactCouple(D, E, i, j, k, (-1, 0), (1, 1), (0, 0), (lo - 1, hi), (lo, hi), "zero", "stable", P, name)


def couple_from_skeleton_filtration(K: DeltaComplex) -> ExactCouple:
    """Couple of the skeleton filtration with K-theory coefficients: E_1^{r,s} = Z^{#r-cells} for even s."""
    T = filtration_couple(skeleton_filtered_complex(K), "T_I")
    validate_couple(T)
    return T


def cofiltration_couple(K: DeltaComplex) -> ExactCouple:
    T = cofiltration_couple_of(skeleton_filtered_complex(K), "T_F")
    validate_couple(T)
    return T


# ---------------------------------------------------------------- morphisms

@dataclass
class CoupleMorphism:
    source: ExactCouple
    target: ExactCouple
    alpha_D: dict[Bideg, IntMatrix]
    alpha_E: dict[Bideg, IntMatrix]
    shift: Bideg = (0, 0)  # added to bidegrees of the source

    def D_at(self, b: Bideg) -> IntMatrix:
        S, T = self.source, self.target
        b = (b[0], b[1] % S.period)
        if b in self.alpha_D:
            return self.alpha_D[b]
        t = _add(b, self.shift, S.period)
        cs, ct = S._clamp(b), T._clamp(t)
        if cs is None or ct is None:
            return IntMatrix.zeros(T.D_at(t).n_generators, S.D_at(b).n_generators)
        cb = _sub(ct, self.shift, S.period)
        if cb in self.alpha_D and S._clamp(cb) == cs:
            return self.alpha_D[cb]
        if cs in self.alpha_D and T._clamp(_add(cs, self.shift, S.period)) == ct:
            return self.alpha_D[cs]
        raise NotAMorphism(f"alpha_D{b}", "no map available outside the window")

    def E_at(self, b: Bideg) -> IntMatrix:
        S, T = self.source, self.target
        b = (b[0], b[1] % S.period)
        if b in self.alpha_E:
            return self.alpha_E[b]
        t = _add(b, self.shift, S.period)
        return IntMatrix.zeros(T.E_at(t).n_generators, S.E_at(b).n_generators)


def identity_morphism(T: ExactCouple) -> CoupleMorphism:
    return CoupleMorphism(
        T, T,
        {b: IntMatrix.identity(g.n_generators) for b, g in T.D.items()},
        {b: IntMatrix.identity(g.n_generators) for b, g in T.E.items()},
    )


def check_morphism(phi: CoupleMorphism) -> None:
    """All three squares commute at every bidegree near the windows; raises NotAMorphism."""
    S, T = phi.source, phi.target
    P = S.period
    if (S.deg_i, S.deg_j, S.deg_k) != (T.deg_i, T.deg_j, T.deg_k) or S.period != T.period:
        raise NotAMorphism("degrees", "couples have different bidegrees")
    lo = min(S.d_window[0], T.d_window[0]) - 2
    hi = max(S.d_window[1], T.d_window[1]) + 2
    sh = phi.shift
    for p in range(lo, hi + 1):
        for n in range(P):
            b = (p, n)
            tb = _add(b, sh, P)
            for name, lhs, rhs, tgt in (
                ("i", phi.D_at(_add(b, S.deg_i, P)) @ S.i_at(b), T.i_at(tb) @ phi.D_at(b),
                 T.D_at(_add(tb, T.deg_i, P))),
                ("j", phi.E_at(_add(b, S.deg_j, P)) @ S.j_at(b), T.j_at(tb) @ phi.D_at(b),
                 T.E_at(_add(tb, T.deg_j, P))),
                ("k", phi.D_at(_add(b, S.deg_k, P)) @ S.k_at(b), T.k_at(tb) @ phi.E_at(b),
                 T.D_at(_add(tb, T.deg_k, P))),
            ):
                if not same_morphism(lhs, rhs, tgt):
                    raise NotAMorphism(f"{name}-square at {b}", "square does not commute")


def derive_morphism(phi: CoupleMorphism, dS: ExactCouple, dT: ExactCouple) -> CoupleMorphism:
    """The induced morphism of derived couples; dS and dT must be derived from phi's ends."""
    if dS.parent is not phi.source or dT.parent is not phi.target:
        raise NotAMorphism("derivation", "derived couples do not come from this morphism's ends")
    P = dS.period
    aD, aE = {}, {}
    for b, s in dS.sq_D.items():
        t = _add(b, phi.shift, P)
        if t in dT.sq_D:
            M = phi.D_at(b)
            aD[b] = dT.sq_D[t].matrix_from([M.apply(g) for g in s.representatives])
    for b, s in dS.sq_E.items():
        t = _add(b, phi.shift, P)
        if t in dT.sq_E:
            M = phi.E_at(b)
            aE[b] = dT.sq_E[t].matrix_from([M.apply(g) for g in s.representatives])
    return CoupleMorphism(dS, dT, aD, aE, phi.shift)


def filtered_map_morphism(FC_s: FilteredComplex, FC_t: FilteredComplex, cmap: dict[str, dict[str, int]],
                          S: ExactCouple, T: ExactCouple) -> CoupleMorphism:
    """Morphism of filtration couples induced by a filtration-preserving cochain map FC_s -> FC_t.

    ``cmap`` sends each source cell to a combination of target cells.
    """
    def push(vec):
        out: dict[str, int] = {}
        for c, x in vec.items():
            for t, y in cmap.get(c, {}).items():
                out[t] = out.get(t, 0) + x * y
        return {t: x for t, x in out.items() if x}

    top_s, top_t = FC_s.p_max + 1, FC_t.p_max + 1
    aD, aE = {}, {}
    for b in S.d_bidegrees():
        p, n = b
        if b not in T.D:
            continue
        src, tgt = FC_s.H(p, top_s, n), FC_t.H(p, top_t, n)
        aD[b] = IntMatrix.from_columns([_coords(tgt, push(g)) for g in _gens(src)], tgt[1].group.n_generators)
    for b in S.e_bidegrees():
        p, n = b
        if b not in T.E:
            continue
        src, tgt = FC_s.H(p, p + 1, n), FC_t.H(p, p + 1, n)
        aE[b] = IntMatrix.from_columns(
            [_coords(tgt, _restrict(push(g), FC_t, p, p + 1)) for g in _gens(src)], tgt[1].group.n_generators
        )
    phi = CoupleMorphism(S, T, aD, aE)
    check_morphism(phi)
    return phi


def cellular_cochain_map(f: CellularMap) -> dict[str, dict[str, int]]:
    """f^# : C(target) -> C(source) on cells: chi_tau goes to the sum of chi_sigma with f(sigma) = tau."""
    out: dict[str, dict[str, int]] = {}
    for n, m in f.cell_images.items():
        for s, t in m.items():
            out.setdefault(t, {})[s] = 1
    return out


# ---------------------------------------------------------------- pages

@dataclass
class SpectralPages:
    pages: list[dict[Bideg, GroupPresentation]]  # index r - 1 holds E_r keyed by (p, n)
    differentials: list[dict[Bideg, IntMatrix]]
    d_degrees: list[Bideg]
    converged_at: int | None
    couples: list[ExactCouple] = field(default_factory=list, repr=False)
    period: int = 2

    def entry(self, r: int, p: int, s: int) -> GroupPresentation:
        if r > len(self.pages):
            # past the last computed page only a degenerated sequence is known
            if self.converged_at is None:
                raise IndexError(f"page {r} was not computed")
            r = len(self.pages)
        return self.pages[r - 1].get((p, (p + s) % self.period), ZERO)

    def k_groups(self) -> dict | None:
        """K^0 and K^1 as direct sums along the filtration, when E_infinity allows it."""
        if self.converged_at is None:
            return None
        last = self.pages[-1]
        if any(g.torsion for g in last.values()):
            return None
        odd = [g for (p, n), g in last.items() if (n - p) % self.period and not g.is_trivial]
        if odd:
            return None
        ranks = [0] * self.period
        for (p, n), g in last.items():
            ranks[n] += g.rank
        return {f"K^{n}": GroupPresentation.free(r) for n, r in enumerate(ranks)}

    def to_json(self) -> list[dict]:
        out = []
        for r, page in enumerate(self.pages, start=1):
            entries = {}
            for (p, n), g in sorted(page.items()):
                s = (n - p) % self.period
                entries[f"({p},{s})"] = g.to_json()
            out.append({"page": r, "entries": entries, "converged_at": self.converged_at})
        return out


def pages(T: ExactCouple, max_page: int | None = None) -> SpectralPages:
    """E_r and d_r for r = 1, 2, ... by repeated derivation.

    Without ``max_page`` derivation continues until d_r vanishes for bidegree
    reasons (its p-shift exceeds the width of the E window). ``converged_at``
    is the first page from which every computed differential is zero; it is
    None when the computation stopped before that could be decided.
    """
    validate_couple(T)
    width = T.e_window[1] - T.e_window[0]
    limit = max_page if max_page is not None else None
    out_pages, out_d, degs, couples = [], [], [], [T]
    cur = T
    r = 1
    while True:
        out_pages.append(dict(cur.E))
        dd = cur.deg_d
        diffs = {b: cur.d_at(b) for b in cur.e_bidegrees()}
        out_d.append(diffs)
        degs.append(dd)
        settled = abs(dd[0]) > width
        if settled or (limit is not None and r >= limit):
            break
        cur = derive_couple(cur)
        couples.append(cur)
        r += 1
    zero = [all(m.is_zero() for m in d.values()) for d in out_d]
    conv = None
    if zero[-1] and abs(degs[-1][0]) > width:
        conv = len(zero)
        while conv > 1 and zero[conv - 2]:
            conv -= 1
    return SpectralPages(out_pages, out_d, degs, conv, couples, T.period)


# ---------------------------------------------------------------- direct limits

@dataclass
class CoupleLimit:
    couple: ExactCouple
    D_limits: dict[Bideg, DirectLimit]
    E_limits: dict[Bideg, DirectLimit]

    @property
    def status(self) -> Status:
        ok = all(d.status == Status.STABILIZED for d in list(self.D_limits.values()) + list(self.E_limits.values()))
        return Status.STABILIZED if ok else Status.NOT_STABILIZED

    def to_json(self) -> dict:
        key = lambda b: f"({b[0]},{b[1]})"
        return {
            "status": self.status.value,
            "D": {key(b): {"group": d.limit.to_json(), "status": d.status.value} for b, d in sorted(self.D_limits.items())},
            "E": {key(b): {"group": d.limit.to_json(), "status": d.status.value} for b, d in sorted(self.E_limits.items())},
        }


def direct_limit_couples(couples: list[ExactCouple], morphisms: list[CoupleMorphism], window: int = 1) -> CoupleLimit:
    """Bidegree-wise direct limit of a sequence of couples.

    Every morphism is checked square by square (NotAMorphism names the first
    failing square). The limit couple is the last couple, exact by
    validation, with the per-bidegree stabilization status of D and E.
    """
    if not couples:
        raise NotAMorphism("sequence", "no couples")
    if len(morphisms) != len(couples) - 1:
        raise NotAMorphism("sequence", "need one morphism between consecutive couples")
    for l, phi in enumerate(morphisms):
        if phi.source is not couples[l] or phi.target is not couples[l + 1]:
            raise NotAMorphism(f"morphism {l}", "does not connect consecutive couples")
        check_morphism(phi)
    last = couples[-1]
    validate_couple(last)
    w = max(1, min(window, len(morphisms)))
    D_lim, E_lim = {}, {}
    for b in last.d_bidegrees():
        groups = [T.D_at(b) for T in couples]
        D_lim[b] = direct_limit_fg(DirectSystem(groups, [phi.D_at(b) for phi in morphisms], w))
    for b in last.e_bidegrees():
        groups = [T.E_at(b) for T in couples]
        E_lim[b] = direct_limit_fg(DirectSystem(groups, [phi.E_at(b) for phi in morphisms], w))
    return CoupleLimit(last, D_lim, E_lim)


# ---------------------------------------------------------------- filtration versus cofiltration

@dataclass
class CoupleEquivalence:
    to_trivial: CoupleMorphism  # T_I -> T_A (shifted by one step in p)
    from_trivial: CoupleMorphism  # T_A -> T_F
    e_isomorphisms: list[dict[Bideg, IntMatrix]]  # per page, E_r(T_I) -> E_r(T_F)
    pages_I: SpectralPages
    pages_F: SpectralPages

    def to_json(self) -> dict:
        return {
            "pages": len(self.e_isomorphisms),
            "e_isomorphisms": [
                {f"({b[0]},{b[1]})": m.to_lists() for b, m in sorted(iso.items())} for iso in self.e_isomorphisms
            ],
        }


def _triangle_morphisms(FC: FilteredComplex, TI: ExactCouple, TA: ExactCouple, TF: ExactCouple):
    """T_I -> T_A (inclusion F^{p+1} -> C) and T_A -> T_F (projection C -> C / F^{p+1})."""
    P, lo, hi = FC.period, FC.p_min, FC.p_max
    top = hi + 1
    whole = {n: FC.H(lo, top, n) for n in range(P)}
    a1, a2 = {}, {}
    for p in range(lo - 1, hi + 1):
        for n in range(P):
            # T_I at (p + 1, n) is H^n(F^{p+1}); T_A and T_F are indexed by p
            src = FC.H(p + 1, top, n)
            a1[(p + 1, n)] = IntMatrix.from_columns([_coords(whole[n], g) for g in _gens(src)],
                                                    whole[n][1].group.n_generators)
            tgt = FC.H(lo, p + 1, n)
            a2[(p, n)] = IntMatrix.from_columns(
                [_coords(tgt, _restrict(g, FC, lo, p + 1)) for g in _gens(whole[n])], tgt[1].group.n_generators
            )
    to_A = CoupleMorphism(TI, TA, a1, {}, (-1, 0))
    from_A = CoupleMorphism(TA, TF, a2, {})
    return to_A, from_A


def _check_triangle(FC: FilteredComplex, to_A: CoupleMorphism, from_A: CoupleMorphism) -> None:
    """H(F^{p+1}) -> H(C) -> H(C/F^{p+1}) is exact in the middle for every p."""
    P, lo, hi = FC.period, FC.p_min, FC.p_max
    for p in range(lo - 1, hi + 1):
        for n in range(P):
            f = to_A.alpha_D[(p + 1, n)]
            g = from_A.alpha_D[(p, n)]
            X = to_A.source.D_at((p + 1, n))
            Y = to_A.target.D_at((p, n))
            Z = from_A.target.D_at((p, n))
            _check_exact_at(f"H(C) at {(p, n)}", f, X, Y, g, Z, "incl", "proj")


def couple_equivalence(FC: FilteredComplex, max_page: int | None = None) -> CoupleEquivalence:
    """Filtration and cofiltration couples of FC, related through the trivial couple of H(C).

    The morphisms T_I -> T_A -> T_F are checked square by square and the
    triangle of D-groups is checked to be exact; then the identity of E_1
    is shown to be a chain isomorphism on every page.
    """
    TI, TF = filtration_couple(FC), cofiltration_couple_of(FC)
    validate_couple(TI)
    validate_couple(TF)
    P, lo, hi = FC.period, FC.p_min, FC.p_max
    D_A = {(p, n): FC.H(lo, hi + 1, n)[1].group for p in range(lo - 1, hi + 1) for n in range(P)}
    TA = trivial_couple(D_A, (-1, 0), (0, 0), (1, 1), (lo - 1, hi), P)
    to_A, from_A = _triangle_morphisms(FC, TI, TA, TF)
    _check_triangle(FC, to_A, from_A)
    pI, pF = pages(TI, max_page), pages(TF, max_page)
    if len(pI.pages) != len(pF.pages):
        raise NotAMorphism("pages", "filtration and cofiltration sequences have different lengths")
    isos = []
    for r in range(1, len(pI.pages) + 1):
        CI, CF = pI.couples[r - 1], pF.couples[r - 1]
        iso = {}
        for b, g in CI.E.items():
            tgt = CF.E_at(b)
            cols = [_descend(CF, b, _lift(CI, b, e)) for e in IntMatrix.identity(g.n_generators).to_lists()]
            iso[b] = IntMatrix.from_columns(cols, tgt.n_generators)
            if not is_isomorphism(iso[b], g, tgt):
                raise NotAMorphism(f"E_{r} at {b}", "identity of E_1 does not induce an isomorphism")
        dd = CI.deg_d
        for b in CI.e_bidegrees():
            t = _add(b, dd, P)
            lhs = iso.get(t, IntMatrix.zeros(CF.E_at(t).n_generators, CI.E_at(t).n_generators)) @ CI.d_at(b)
            rhs = CF.d_at(b) @ iso[b]
            if not same_morphism(lhs, rhs, CF.E_at(t)):
                raise NotAMorphism(f"d_{r} at {b}", "identity of E does not intertwine the differentials")
        isos.append(iso)
    return CoupleEquivalence(to_A, from_A, isos, pI, pF)


def _lift(T: ExactCouple, b: Bideg, x: list[int]) -> list[int]:
    """An E_1 representative of an element of E_r given in E_r coordinates."""
    while T.parent is not None:
        reps = T.sq_E[b].representatives
        n = T.parent.E_at(b).n_generators
        x = [sum(c * rep[k] for c, rep in zip(x, reps)) for k in range(n)]
        T = T.parent
    return x


def _descend(T: ExactCouple, b: Bideg, x: list[int]) -> list[int]:
    """E_r coordinates of the class of an E_1 element that survives to E_r."""
    chain = []
    while T.parent is not None:
        chain.append(T)
        T = T.parent
    for C in reversed(chain):
        x = C.sq_E[b].coordinates(x)
    return x


@dataclass
class SequenceCoupleLimit:
    """Couples of the levels of an inverse sequence of complexes and their limits on E_1 and E_2."""

    couples: list[ExactCouple]
    morphisms: list[CoupleMorphism]
    limit: CoupleLimit
    e2_limit: CoupleLimit
    pages: SpectralPages  # pages of the last couple

    def to_json(self) -> dict:
        return {"E1": self.limit.to_json(), "E2": self.e2_limit.to_json(),
                "pages": self.pages.to_json(), "converged_at": self.pages.converged_at}


def sequence_couple_limit(complexes: list[DeltaComplex], maps: list[CellularMap], window: int = 1) -> SequenceCoupleLimit:
    """Direct limit of skeleton couples along f_l : K_{l+1} -> K_l.

    Cellular maps preserve skeleta, so each f_l^# gives a couple morphism
    T(K_l) -> T(K_{l+1}); the morphisms are derived once to compare E_2.
    """
    if len(maps) != len(complexes) - 1:
        raise NotAMorphism("sequence", "need one map between consecutive complexes")
    FCs = [skeleton_filtered_complex(K) for K in complexes]
    couples = [filtration_couple(FC, f"T_I[{l}]") for l, FC in enumerate(FCs)]
    morphisms = []
    for l, f in enumerate(maps):
        f.check()
        morphisms.append(filtered_map_morphism(FCs[l], FCs[l + 1], cellular_cochain_map(f), couples[l], couples[l + 1]))
    limit = direct_limit_couples(couples, morphisms, window)
    derived = [derive_couple(T) for T in couples]
    dmorph = [derive_morphism(phi, derived[l], derived[l + 1]) for l, phi in enumerate(morphisms)]
    e2 = direct_limit_couples(derived, dmorph, window)
    return SequenceCoupleLimit(couples, morphisms, limit, e2, pages(couples[-1]))
