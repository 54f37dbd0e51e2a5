"""Finite Delta-complexes with ordered face maps and punctured cells.

An n-cell lists its n+1 faces in the order d_0, ..., d_n, where d_i omits
vertex i. For an edge [v0, v1] this means d_0 = v1 and d_1 = v0.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable

from .abelian import CohomologyBasis, GroupPresentation, IntMatrix, cohomology_at, cohomology_basis
from .errors import DegreeOutOfRange, InvalidComplex, InvalidMap


@dataclass
class DeltaComplex:
    cells: dict[int, list[str]]
    faces: dict[str, tuple[str, ...]] = field(default_factory=dict)
    punctures: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        self.cells = {int(k): list(v) for k, v in self.cells.items()}
        top = max(self.cells) if self.cells else 0
        for n in range(top + 1):
            self.cells.setdefault(n, [])
        self.faces = {k: tuple(v) for k, v in self.faces.items()}
        self._index = {n: {c: i for i, c in enumerate(cs)} for n, cs in self.cells.items()}
        self._dim_of = {c: n for n, cs in self.cells.items() for c in cs}
        for c in self._dim_of:
            self.punctures.setdefault(c, "barycenter")

    @property
    def dimension(self) -> int:
        nonempty = [n for n, cs in self.cells.items() if cs]
        return max(nonempty) if nonempty else 0

    def dim_of(self, cell: str) -> int:
        return self._dim_of[cell]

    def index(self, n: int, cell: str) -> int:
        return self._index[n][cell]

    def n_cells(self, n: int) -> int:
        return len(self.cells.get(n, ()))

    def face(self, cell: str, i: int) -> str:
        return self.faces[cell][i]

    def to_json(self) -> dict:
        out = {
            "dim": self.dimension,
            "cells": {str(n): list(cs) for n, cs in sorted(self.cells.items()) if n <= self.dimension},
            "faces": {c: list(self.faces[c]) for n in sorted(self.cells) if n > 0 for c in self.cells[n]},
        }
        if any(p != "barycenter" for p in self.punctures.values()):
            out["punctures"] = {c: self.punctures[c] for n in sorted(self.cells) for c in self.cells[n]}
        return out

    @classmethod
    def from_json(cls, obj: dict) -> DeltaComplex:
        cells = {int(k): [str(c) for c in v] for k, v in obj["cells"].items()}
        faces = {str(k): tuple(str(f) for f in v) for k, v in obj.get("faces", {}).items()}
        K = cls(cells, faces, dict(obj.get("punctures") or {}))
        if "dim" in obj and obj["dim"] != K.dimension and any(K.cells.get(obj["dim"], [])):
            raise InvalidComplex("declared dim does not match cells")
        return K

    @classmethod
    def load(cls, path) -> DeltaComplex:
        with open(path) as fh:
            return cls.from_json(json.load(fh))

    def relabeled(self, perm: dict[str, str], order: dict[int, list[str]] | None = None) -> DeltaComplex:
        """Rename cells by ``perm`` and optionally reorder each dimension."""
        cells = order or {n: [perm[c] for c in cs] for n, cs in self.cells.items()}
        faces = {perm[c]: tuple(perm[f] for f in fs) for c, fs in self.faces.items()}
        punct = {perm[c]: p for c, p in self.punctures.items()}
        return DeltaComplex(cells, faces, punct)


@dataclass
class ValidationReport:
    violations: list[str] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.valid

    def to_json(self) -> dict:
        return {"valid": self.valid, "violations": list(self.violations)}


def validate_complex(K: DeltaComplex) -> ValidationReport:
    """Dangling references, wrong face counts and face-of-face inconsistencies."""
    out = []
    seen = set()
    for n, cs in sorted(K.cells.items()):
        for c in cs:
            if c in seen:
                out.append(f"cell {c!r} listed twice")
            seen.add(c)
    for n, cs in sorted(K.cells.items()):
        for c in cs:
            fs = K.faces.get(c, ())
            if n == 0:
                if fs:
                    out.append(f"vertex {c!r} has faces")
                continue
            if len(fs) != n + 1:
                out.append(f"{n}-cell {c!r} has {len(fs)} faces, expected {n + 1}")
                continue
            bad = [f for f in fs if f not in K._index.get(n - 1, {})]
            for f in bad:
                out.append(f"{n}-cell {c!r} refers to missing {n - 1}-cell {f!r}")
            if bad or n < 2:
                continue
            for j in range(n + 1):
                for i in range(j):
                    a = K.faces.get(fs[j], ())
                    b = K.faces.get(fs[i], ())
                    if len(a) != n or len(b) != n:
                        continue
                    if a[i] != b[j - 1]:
                        out.append(
                            f"{n}-cell {c!r}: d_{i} d_{j} = {a[i]!r} but d_{j - 1} d_{i} = {b[j - 1]!r}"
                        )
    for c in K.faces:
        if c not in seen:
            out.append(f"faces given for unknown cell {c!r}")
    return ValidationReport(out)


def coboundary_matrix(K: DeltaComplex, n: int) -> IntMatrix:
    """delta^n : C^{n-1} -> C^n, entry (sigma, tau) = sum over i with d_i sigma = tau of (-1)^i."""
    if n < 1 or n > K.dimension:
        raise DegreeOutOfRange(f"degree {n} outside 1..{K.dimension}")
    rows = K.cells[n]
    cols_idx = K._index[n - 1]
    out = [[0] * len(cols_idx) for _ in rows]
    for r, c in enumerate(rows):
        for i, f in enumerate(K.faces[c]):
            out[r][cols_idx[f]] += -1 if i % 2 else 1
    return IntMatrix(out, len(rows), len(cols_idx))


def cochain_complex(K: DeltaComplex) -> list[IntMatrix]:
    """[delta^0, ..., delta^{d+1}] with zero maps padded at both ends."""
    d = K.dimension
    mats = [IntMatrix.zeros(K.n_cells(0), 0)]
    mats += [coboundary_matrix(K, n) for n in range(1, d + 1)]
    mats.append(IntMatrix.zeros(0, K.n_cells(d)))
    return mats


def _require_valid(K: DeltaComplex) -> None:
    rep = validate_complex(K)
    if not rep.valid:
        raise InvalidComplex("; ".join(rep.violations[:5]))


def simplicial_cohomology(K: DeltaComplex) -> list[GroupPresentation]:
    """H^0, ..., H^d of K with integer coefficients."""
    _require_valid(K)
    mats = cochain_complex(K)
    return [cohomology_at(mats[n], mats[n + 1]) for n in range(K.dimension + 1)]


def simplicial_cohomology_bases(K: DeltaComplex) -> list[CohomologyBasis]:
    _require_valid(K)
    mats = cochain_complex(K)
    return [cohomology_basis(mats[n], mats[n + 1]) for n in range(K.dimension + 1)]


@dataclass
class CellularMap:
    """A dimension-preserving map of cells that commutes with every face map."""

    source: DeltaComplex
    target: DeltaComplex
    cell_images: dict[int, dict[str, str]]

    def violations(self) -> list[str]:
        out = []
        for n, cs in self.source.cells.items():
            imgs = self.cell_images.get(n, {})
            for c in cs:
                if c not in imgs:
                    out.append(f"{n}-cell {c!r} has no image")
                    continue
                img = imgs[c]
                if img not in self.target._index.get(n, {}):
                    out.append(f"image {img!r} of {c!r} is not a {n}-cell of the target")
                    continue
                if n == 0:
                    continue
                for i, f in enumerate(self.source.faces[c]):
                    if self.cell_images.get(n - 1, {}).get(f) != self.target.faces[img][i]:
                        out.append(f"d_{i} does not commute on {c!r}")
        return out

    def check(self) -> None:
        v = self.violations()
        if v:
            raise InvalidMap("; ".join(v[:5]))

    def is_surjective(self) -> bool:
        return all(
            set(self.cell_images.get(n, {}).values()) >= set(cs) for n, cs in self.target.cells.items()
        )

    def cochain_map(self, n: int) -> IntMatrix:
        """f^# : C^n(target) -> C^n(source), (f^# psi)(c) = psi(f(c))."""
        rows = self.source.cells.get(n, [])
        tidx = self.target._index.get(n, {})
        out = [[0] * len(tidx) for _ in rows]
        imgs = self.cell_images.get(n, {})
        for r, c in enumerate(rows):
            out[r][tidx[imgs[c]]] = 1
        return IntMatrix(out, len(rows), len(tidx))

    def compose(self, after: CellularMap) -> CellularMap:
        """``after`` o ``self``."""
        imgs = {
            n: {c: after.cell_images[n][t] for c, t in m.items()} for n, m in self.cell_images.items()
        }
        return CellularMap(self.source, after.target, imgs)

    def to_json(self) -> dict:
        return {str(n): dict(sorted(m.items())) for n, m in sorted(self.cell_images.items())}


def identity_map(K: DeltaComplex) -> CellularMap:
    return CellularMap(K, K, {n: {c: c for c in cs} for n, cs in K.cells.items()})


def wedge_of_circles(names: Iterable[str]) -> DeltaComplex:
    """One vertex and one loop edge per name."""
    names = list(names)
    return DeltaComplex({0: ["v"], 1: names}, {e: ("v", "v") for e in names})


def point() -> DeltaComplex:
    return DeltaComplex({0: ["v"]})
