"""One-dimensional repetitive tilings with exact coordinates.

Samples come from the cut-and-project strip construction or from
substitutions; both produce a finite word with exact tile endpoints.
Coordinates for a cut-and-project tiling of slope alpha live in Z + Z*alpha,
so every order comparison is a sign test of x + y*alpha.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from collections import Counter
from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Any, Callable, Sequence

from .errors import InsufficientSample, NonPrimitive, RationalAlpha, TooFewPoints, UncertifiedComparison


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def _is_square(n: int) -> bool:
    return n >= 0 and math.isqrt(n) ** 2 == n


# ---------------------------------------------------------------- numbers

class AlgebraicNumber(ABC):
    """A positive real alpha on which signs of x + y*alpha can be decided."""

    @abstractmethod
    def sign_linear(self, x, y) -> int:
        """Exact sign of x + y*alpha for rational x, y."""

    @abstractmethod
    def is_rational(self) -> bool: ...

    @abstractmethod
    def to_decimal(self, digits: int = 40) -> Decimal: ...

    @abstractmethod
    def to_json(self) -> dict: ...

    def __float__(self) -> float:
        return float(self.to_decimal(30))

    def require_irrational_positive(self) -> None:
        if self.is_rational():
            raise RationalAlpha(f"alpha = {self} is rational")
        if self.sign_linear(0, 1) <= 0:
            raise ValueError("alpha must be positive")


class QuadraticNumber(AlgebraicNumber):
    """p + q*sqrt(n) with rational p, q; a field element of Q(sqrt n).

    >>> golden = QuadraticNumber.from_abcn(-1, 1, 2, 5)
    >>> golden / (1 + golden) == QuadraticNumber.from_abcn(3, -1, 2, 5)
    True
    """

    __slots__ = ("p", "q", "n", "_cache")

    def __init__(self, p, q, n: int):
        p, q, n = Fraction(p), Fraction(q), int(n)
        if n < 0:
            raise ValueError("only real quadratic fields are supported")
        if _is_square(n):
            p, q, n = p + q * math.isqrt(n), Fraction(0), 1
        # pull square factors out of n so equal numbers compare equal
        k = 2
        while k * k <= n:
            while n % (k * k) == 0:
                n //= k * k
                q *= k
            k += 1
        if q == 0:
            n = 1
        self.p, self.q, self.n = p, q, n

    @classmethod
    def from_abcn(cls, a: int, b: int, c: int, n: int) -> QuadraticNumber:
        """(a + b*sqrt(n)) / c"""
        if c == 0:
            raise ZeroDivisionError("c must be nonzero")
        return cls(Fraction(a, c), Fraction(b, c), n)

    def _coerce(self, other) -> QuadraticNumber:
        if isinstance(other, QuadraticNumber):
            if other.q and self.q and other.n != self.n:
                raise ValueError("numbers from different quadratic fields")
            return other
        if isinstance(other, (int, Fraction)):
            return QuadraticNumber(other, 0, self.n)
        return NotImplemented

    def _field_n(self, o: QuadraticNumber) -> int:
        return self.n if self.q else o.n

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadraticNumber(self.p + o.p, self.q + o.q, self._field_n(o))

    __radd__ = __add__

    def __neg__(self):
        return QuadraticNumber(-self.p, -self.q, self.n)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        n = self._field_n(o)
        return QuadraticNumber(self.p * o.p + self.q * o.q * n, self.p * o.q + self.q * o.p, n)

    __rmul__ = __mul__

    def conjugate(self) -> QuadraticNumber:
        return QuadraticNumber(self.p, -self.q, self.n)

    def norm(self) -> Fraction:
        return self.p * self.p - self.q * self.q * self.n

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        nrm = o.norm()
        if nrm == 0:
            raise ZeroDivisionError("division by zero in quadratic field")
        num = self * o.conjugate()
        return QuadraticNumber(num.p / nrm, num.q / nrm, num.n)

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def sign(self) -> int:
        sp, sq = _sign(self.p), _sign(self.q)
        if sq == 0:
            return sp
        if sp == 0 or sp == sq:
            return sq
        # opposite signs: compare p^2 with q^2 n
        return sp if self.p * self.p > self.q * self.q * self.n else sq

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return (self - o).sign() == 0

    def __hash__(self):
        return hash((self.p, self.q, self.n if self.q else 1))

    def __lt__(self, other):
        return (self - self._coerce(other)).sign() < 0

    def __le__(self, other):
        return (self - self._coerce(other)).sign() <= 0

    def __gt__(self, other):
        return (self - self._coerce(other)).sign() > 0

    def __ge__(self, other):
        return (self - self._coerce(other)).sign() >= 0

    def sign_linear(self, x, y) -> int:
        if self.q == 0:
            return _sign(Fraction(x) + Fraction(y) * self.p)
        if type(x) is not int or type(y) is not int:
            x, y = Fraction(x), Fraction(y)
            den = x.denominator * y.denominator
            x, y = int(x * den), int(y * den)
        a, b, c, n = self._ints()
        # sign of (x*c + y*a) + (y*b)*sqrt(n), with c > 0
        P, Q = x * c + y * a, y * b
        sp, sq = _sign(P), _sign(Q)
        if sq == 0 or sp == sq:
            return sq if sp == 0 else sp
        if sp == 0:
            return sq
        return sp if P * P > Q * Q * n else sq

    def _ints(self) -> tuple[int, int, int, int]:
        try:
            return self._cache
        except AttributeError:
            self._cache = self.to_abcn()
            return self._cache

    def is_rational(self) -> bool:
        return self.q == 0

    def to_decimal(self, digits: int = 40) -> Decimal:
        with localcontext() as ctx:
            ctx.prec = digits + 10
            v = Decimal(self.p.numerator) / Decimal(self.p.denominator)
            v += Decimal(self.q.numerator) / Decimal(self.q.denominator) * Decimal(self.n).sqrt()
            return +v

    def to_abcn(self) -> tuple[int, int, int, int]:
        c = math.lcm(self.p.denominator, self.q.denominator)
        return (int(self.p * c), int(self.q * c), c, self.n)

    def to_json(self) -> dict:
        return {"quadratic": list(self.to_abcn())}

    def __str__(self):
        a, b, c, n = self.to_abcn()
        if b == 0:
            return str(Fraction(a, c))
        root = f"sqrt({n})" if abs(b) == 1 else f"{abs(b)}*sqrt({n})"
        if a:
            s = f"{a} {'+' if b > 0 else '-'} {root}"
        else:
            s = root if b > 0 else f"-{root}"
        return f"({s})/{c}" if c != 1 else s

    def __repr__(self):
        return f"QuadraticNumber({self})"


def _convergents(digits: Sequence[int]) -> tuple[tuple[int, int], tuple[int, int]]:
    """(p_k, q_k), (p_{k-1}, q_{k-1}) for [a0; a1, ..., ak]."""
    p_prev, q_prev, p, q = 1, 0, digits[0], 1
    for a in digits[1:]:
        p_prev, q_prev, p, q = p, q, a * p + p_prev, a * q + q_prev
    return (p, q), (p_prev, q_prev)


class CFPrefix(AlgebraicNumber):
    """An irrational alpha known through a continued-fraction prefix [a0; a1, ..., ak].

    The unknown tail t = [a_{k+1}; ...] satisfies t > 1, which confines alpha
    to the open interval between p_k/q_k and (p_k + p_{k-1})/(q_k + q_{k-1}).
    A comparison is certified when the linear form has one strict sign over
    that interval. ``tail`` optionally supplies further digits on demand.
    """

    MAX_REFINE = 4000

    def __init__(self, digits: Sequence[int], tail: Callable[[int], int] | None = None, name: str | None = None):
        digits = [int(a) for a in digits]
        if not digits:
            raise ValueError("empty continued fraction")
        if digits[0] < 0 or any(a < 1 for a in digits[1:]):
            raise ValueError("continued fraction digits must be a0 >= 0 and ai >= 1")
        self._digits = digits
        self._tail = tail
        self.name = name

    @property
    def digits(self) -> tuple[int, ...]:
        return tuple(self._digits)

    def interval(self) -> tuple[Fraction, Fraction]:
        (p, q), (pp, qp) = _convergents(self._digits)
        a, b = Fraction(p, q), Fraction(p + pp, q + qp)
        return (a, b) if a < b else (b, a)

    def _conv(self):
        if getattr(self, "_conv_len", None) != len(self._digits):
            self._conv_cache = _convergents(self._digits)
            self._conv_len = len(self._digits)
        return self._conv_cache

    def _refine(self) -> bool:
        if self._tail is None or len(self._digits) >= self.MAX_REFINE:
            return False
        self._digits.append(int(self._tail(len(self._digits))))
        return True

    def sign_linear(self, x, y) -> int:
        if type(x) is not int or type(y) is not int:
            x, y = Fraction(x), Fraction(y)
        if y == 0:
            return _sign(x)
        while True:
            (p, q), (pp, qp) = self._conv()
            # x + y*(p/q) has the sign of x*q + y*p since q > 0
            s1, s2 = _sign(x * q + y * p), _sign(x * (q + qp) + y * (p + pp))
            if s1 >= 0 and s2 >= 0 and (s1 or s2):
                return 1
            if s1 <= 0 and s2 <= 0 and (s1 or s2):
                return -1
            if not self._refine():
                raise UncertifiedComparison(
                    f"sign of {x} + {y}*alpha undecided with {len(self._digits)} digits"
                )

    def is_rational(self) -> bool:
        return False

    def to_decimal(self, digits: int = 40) -> Decimal:
        lo, hi = self.interval()
        while hi - lo > Fraction(1, 10 ** (digits + 2)) and self._refine():
            lo, hi = self.interval()
        mid = (lo + hi) / 2
        with localcontext() as ctx:
            ctx.prec = digits + 10
            return Decimal(mid.numerator) / Decimal(mid.denominator)

    def to_json(self) -> dict:
        out: dict[str, Any] = {"cf_prefix": list(self._digits)}
        if self.name:
            out["name"] = self.name
        return out

    def __str__(self):
        if self.name:
            return self.name
        head, rest = self._digits[0], self._digits[1:]
        return f"[{head}; {', '.join(map(str, rest))}, ...]"

    def __repr__(self):
        return f"CFPrefix({self})"


def golden() -> QuadraticNumber:
    """(sqrt(5) - 1) / 2"""
    return QuadraticNumber.from_abcn(-1, 1, 2, 5)


def silver() -> QuadraticNumber:
    """sqrt(2) - 1"""
    return QuadraticNumber.from_abcn(-1, 1, 1, 2)


def _e_digit(k: int) -> int:
    # e - 2 = [0; 1, 2, 1, 1, 4, 1, 1, 6, ...]
    if k == 0:
        return 0
    return 2 * (k + 1) // 3 if k % 3 == 2 else 1


def e_minus_two(n_digits: int = 12, refine: bool = True) -> CFPrefix:
    """e - 2 through a prefix of its continued fraction; not a quadratic irrational."""
    return CFPrefix([_e_digit(k) for k in range(n_digits)], _e_digit if refine else None, name="e-2")


def parse_alpha(text: str) -> AlgebraicNumber:
    """Parse 'golden', 'silver', 'e', 'a,b,c,n' (meaning (a+b*sqrt n)/c) or 'cf:a0,a1,...'."""
    t = text.strip().lower()
    if t in ("golden", "phi"):
        return golden()
    if t == "silver":
        return silver()
    if t in ("e", "e-2"):
        return e_minus_two()
    if t.startswith("cf:"):
        return CFPrefix([int(s) for s in t[3:].replace(";", ",").split(",") if s.strip()])
    if t.startswith("q:"):
        t = t[2:]
    parts = [s for s in t.split(",") if s.strip()]
    if len(parts) == 4:
        a, b, c, n = (int(s) for s in parts)
        return QuadraticNumber.from_abcn(a, b, c, n)
    raise ValueError(f"cannot parse alpha {text!r}")


def alpha_from_json(obj: dict) -> AlgebraicNumber:
    if "quadratic" in obj:
        return QuadraticNumber.from_abcn(*obj["quadratic"])
    if "cf_prefix" in obj:
        if obj.get("name") == "e-2":
            return CFPrefix(obj["cf_prefix"], _e_digit, name="e-2")
        return CFPrefix(obj["cf_prefix"])
    if "name" in obj:
        return parse_alpha(obj["name"])
    raise ValueError(f"unrecognised alpha specification {obj!r}")


class ZAlpha:
    """Exact element x + y*alpha of Z[alpha] (rational x, y allowed for midpoints)."""

    __slots__ = ("x", "y", "alpha")

    def __init__(self, x, y, alpha: AlgebraicNumber):
        # ints stay ints; only midpoints and scalings need fractions
        self.x = x if type(x) is int else Fraction(x)
        self.y = y if type(y) is int else Fraction(y)
        self.alpha = alpha

    def _xy(self, other):
        if isinstance(other, ZAlpha):
            return other.x, other.y
        return other, 0

    def __add__(self, other):
        x, y = self._xy(other)
        return ZAlpha(self.x + x, self.y + y, self.alpha)

    __radd__ = __add__

    def __sub__(self, other):
        x, y = self._xy(other)
        return ZAlpha(self.x - x, self.y - y, self.alpha)

    def __rsub__(self, other):
        x, y = self._xy(other)
        return ZAlpha(x - self.x, y - self.y, self.alpha)

    def __neg__(self):
        return ZAlpha(-self.x, -self.y, self.alpha)

    def __mul__(self, k):
        return ZAlpha(self.x * k, self.y * k, self.alpha)

    __rmul__ = __mul__

    def __truediv__(self, k):
        k = Fraction(k)
        return ZAlpha(self.x / k, self.y / k, self.alpha)

    def _cmp(self, other) -> int:
        d = self - other
        return self.alpha.sign_linear(d.x, d.y)

    def __eq__(self, other):
        if isinstance(other, ZAlpha):
            return self.x == other.x and self.y == other.y
        if isinstance(other, (int, Fraction)):
            return self.y == 0 and self.x == other
        return NotImplemented

    def __hash__(self):
        return hash((self.x, self.y))

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __float__(self):
        return float(self.x) + float(self.y) * float(self.alpha)

    def __str__(self):
        return f"{self.x} + {self.y}*alpha"

    __repr__ = __str__


def exact_str(v) -> str:
    return str(v)


# ---------------------------------------------------------------- samples

@dataclass
class Tiling1DSample:
    """A finite patch of a 1D tiling: tile word plus exact endpoints.

    ``endpoints`` has one more entry than ``letters``; tile k covers
    [endpoints[k], endpoints[k+1]]. Punctures default to left endpoints.
    """

    letters: str
    lengths: dict[str, Any]
    endpoints: list
    origin_index: int = 0
    punctures: list | None = None
    puncture_rule: str = "left"
    scale: str = "1"
    source: dict | None = None

    def __post_init__(self):
        if len(self.endpoints) != len(self.letters) + 1:
            raise ValueError("need one more endpoint than tiles")
        if self.punctures is None:
            if self.puncture_rule == "left":
                self.punctures = list(self.endpoints[:-1])
            elif self.puncture_rule == "barycenter":
                self.punctures = [(a + b) / 2 for a, b in zip(self.endpoints, self.endpoints[1:])]
            else:
                raise ValueError(f"unknown puncture rule {self.puncture_rule!r}")

    @classmethod
    def from_word(cls, word: str, lengths: dict[str, Any] | None = None, origin_index: int = 0,
                  puncture_rule: str = "left", source: dict | None = None) -> Tiling1DSample:
        if lengths is None:
            lengths = {c: Fraction(1) for c in sorted(set(word))}
        pos = [next(iter(lengths.values())) * 0 if lengths else Fraction(0)]
        for c in word:
            pos.append(pos[-1] + lengths[c])
        return cls(word, dict(lengths), pos, origin_index, puncture_rule=puncture_rule, source=source)

    def __len__(self) -> int:
        return len(self.letters)

    @property
    def alphabet(self) -> list[str]:
        return sorted(set(self.letters))

    def check_abutting(self) -> bool:
        return all(
            self.endpoints[k + 1] - self.endpoints[k] == self.lengths[c]
            for k, c in enumerate(self.letters)
        )

    def to_json(self) -> dict:
        return {
            "letters": self.letters,
            "lengths": {k: exact_str(v) for k, v in sorted(self.lengths.items())},
            "endpoints": [exact_str(e) for e in self.endpoints],
            "punctures": [exact_str(p) for p in self.punctures],
            "puncture_rule": self.puncture_rule,
            "origin_index": self.origin_index,
            "scale": self.scale,
            "source": self.source,
        }


def cut_and_project_sample(alpha: AlgebraicNumber, n_points: int, centered: bool = True,
                           puncture_rule: str = "left") -> Tiling1DSample:
    """Project the lattice points of the strip -alpha <= a2 - a1*alpha < 1 onto the line of slope alpha.

    Consecutive strip points differ by e1 (letter 'a') or e2 (letter 'b').
    Coordinates are recorded as a1 + a2*alpha, i.e. the projection scaled by
    sqrt(1 + alpha^2); tile lengths are 1 and alpha in these units.
    """
    alpha.require_irrational_positive()
    if n_points < 2:
        raise TooFewPoints("need at least two lattice points")
    back = (n_points - 1) // 2 if centered else 0
    a1, a2 = 0, 0
    for _ in range(back):
        # predecessor: a - e1 if still in the strip, else a - e2
        if alpha.sign_linear(a2 - 1, 1 - a1) < 0:  # a2 - (a1-1)*alpha < 1
            a1 -= 1
        else:
            a2 -= 1
    points = [(a1, a2)]
    letters = []
    for _ in range(n_points - 1):
        # successor: a + e2 if a2 - a1*alpha < 0, else a + e1
        if alpha.sign_linear(a2, -a1) < 0:
            a2 += 1
            letters.append("b")
        else:
            a1 += 1
            letters.append("a")
        points.append((a1, a2))
    endpoints = [ZAlpha(x, y, alpha) for x, y in points]
    lengths = {"a": ZAlpha(1, 0, alpha), "b": ZAlpha(0, 1, alpha)}
    return Tiling1DSample(
        "".join(letters), lengths, endpoints, origin_index=back,
        puncture_rule=puncture_rule, scale="1/sqrt(1+alpha^2)",
        source={"type": "cut_and_project", "alpha": alpha.to_json(), "n_points": n_points},
    )


@dataclass(frozen=True)
class SubstitutionRule:
    images: dict
    lengths: dict | None = None

    def __post_init__(self):
        if not self.images or any(not w for w in self.images.values()):
            raise ValueError("substitution images must be nonempty words")
        for w in self.images.values():
            for c in w:
                if c not in self.images:
                    raise ValueError(f"letter {c!r} has no image")

    @property
    def alphabet(self) -> list[str]:
        return sorted(self.images)

    def incidence_matrix(self) -> list[list[int]]:
        """M[i][j] = number of occurrences of letter i in the image of letter j."""
        al = self.alphabet
        return [[self.images[b].count(a) for b in al] for a in al]

    def is_primitive(self) -> bool:
        n = len(self.alphabet)
        M = [[1 if x else 0 for x in row] for row in self.incidence_matrix()]
        P = M
        # Wielandt: a primitive n x n matrix has a positive power at most (n-1)^2 + 1
        for _ in range((n - 1) ** 2 + 1):
            if all(all(row) for row in P):
                return True
            P = [[1 if any(P[i][k] and M[k][j] for k in range(n)) else 0 for j in range(n)] for i in range(n)]
        return all(all(row) for row in P)

    def apply(self, word: str) -> str:
        return "".join(self.images[c] for c in word)


def fibonacci_rule() -> SubstitutionRule:
    return SubstitutionRule({"a": "ab", "b": "a"})


def substitution_sample(rule: SubstitutionRule, seed: str, iterations: int, repetitive: bool = True) -> Tiling1DSample:
    """The word rule^iterations(seed) laid out from the origin."""
    if iterations < 0:
        raise ValueError("iterations must be non-negative")
    if repetitive and not rule.is_primitive():
        raise NonPrimitive("substitution is not primitive")
    w = seed
    for _ in range(iterations):
        w = rule.apply(w)
    src = {"type": "substitution", "rules": dict(sorted(rule.images.items())), "seed": seed, "iterations": iterations}
    return Tiling1DSample.from_word(w, rule.lengths, source=src)


def sample_from_spec(spec: dict) -> Tiling1DSample:
    kind = spec.get("type")
    if kind == "cut_and_project":
        return cut_and_project_sample(alpha_from_json(spec["alpha"]), int(spec["n_points"]))
    if kind == "substitution":
        return substitution_sample(SubstitutionRule(dict(spec["rules"])), spec.get("seed", "a"), int(spec["iterations"]))
    if kind == "word":
        return Tiling1DSample.from_word(spec["word"])
    raise ValueError(f"unknown tiling type {kind!r}")


# ---------------------------------------------------------------- Delone / Voronoi

@dataclass
class DeloneSet1DSample:
    points: list
    r: Any = None
    R: Any = None

    def __post_init__(self):
        pts = list(self.points)
        if any(b <= a for a, b in zip(pts, pts[1:])):
            raise ValueError("points must be strictly increasing")
        gaps = [b - a for a, b in zip(pts, pts[1:])]
        if gaps:
            if self.r is None:
                self.r = min(gaps) / 2
            if self.R is None:
                self.R = max(gaps) / 2
            if any(g < 2 * self.r or g > 2 * self.R for g in gaps):
                raise ValueError("gaps violate the (r, R) bounds")


def voronoi_1d(points: DeloneSet1DSample) -> Tiling1DSample:
    """Voronoi tiles of the points whose cells are bounded on both sides.

    Boundaries sit at midpoints of consecutive points; each tile is punctured
    by its generating point. Tile types are labelled 'a', 'b', ... by
    decreasing length.
    """
    pts = list(points.points)
    if len(pts) < 2:
        raise TooFewPoints("Voronoi construction needs at least two points")
    mids = [(a + b) / 2 for a, b in zip(pts, pts[1:])]
    lens = [b - a for a, b in zip(mids, mids[1:])]
    classes = []
    for L in lens:
        if not any(L == c for c in classes):
            classes.append(L)
    classes.sort(reverse=True)
    names = "abcdefghijklmnopqrstuvwxyz"
    letter_of = lambda L: names[next(i for i, c in enumerate(classes) if c == L)]
    letters = "".join(letter_of(L) for L in lens)
    lengths = {letter_of(c): c for c in classes}
    return Tiling1DSample(letters, lengths, mids, 0, punctures=list(pts[1:-1]), puncture_rule="voronoi")


# ---------------------------------------------------------------- patterns

@dataclass(frozen=True)
class Pattern:
    """A finite factor; ``anchor`` is the index of the tile carrying its puncture."""

    word: str
    multiplicity: int = 1
    collared: bool = False
    left_context: str = ""
    right_context: str = ""
    anchor: int = 0

    def to_json(self) -> dict:
        return {
            "word": self.word,
            "multiplicity": self.multiplicity,
            "collared": self.collared,
            "left_context": self.left_context,
            "right_context": self.right_context,
            "anchor": self.anchor,
        }


def _pattern_counts(letters: str, radius: int, collared: bool) -> Counter:
    c = Counter()
    lo = 1 if collared else 0
    for i in range(lo, len(letters) - radius - lo + 1):
        if collared:
            c[(letters[i:i + radius], letters[i - 1], letters[i + radius])] += 1
        else:
            c[(letters[i:i + radius], "", "")] += 1
    return c


def enumerate_patterns(sample: Tiling1DSample, radius: int, collared: bool = False, certify: bool = True) -> list[Pattern]:
    """All distinct factors of ``radius`` tiles, with multiplicities, sorted.

    With ``certify`` the pattern set of the first half of the sample must
    equal that of the whole sample, otherwise InsufficientSample is raised.
    """
    if radius < 1:
        raise ValueError("radius must be at least one tile")
    if len(sample) < 4 * radius:
        raise InsufficientSample(f"sample of {len(sample)} tiles cannot certify radius {radius}")
    counts = _pattern_counts(sample.letters, radius, collared)
    if certify:
        half = _pattern_counts(sample.letters[: len(sample) // 2], radius, collared)
        if set(half) != set(counts):
            raise InsufficientSample(f"pattern set at radius {radius} not yet stable in this sample")
    pats = [Pattern(w, n, collared, l, r) for (w, l, r), n in counts.items()]
    return sorted(pats, key=lambda p: (p.word, p.left_context, p.right_context))
