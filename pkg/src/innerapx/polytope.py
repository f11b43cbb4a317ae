"""Exact polyhedral engine for upper sets of the form ``conv(V) + C``.

``C`` is the orientation cone generated by ``e_i`` for minimised and
``-e_i`` for maximised objectives.  Facets are computed by homogenising
``conv(V) + C`` to a cone in dimension ``d + 1`` and running the double
description method on its polar: every generator ``(1, v)`` / ``(0, g)``
becomes a constraint ``a . r >= 0``, and every extreme ray ``(a0, w)`` of
the polar with ``w != 0`` is the facet ``w . z >= -a0``.  All arithmetic is
done on Python integers, so results are exact and canonical.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .exceptions import (
    BadConeError,
    DimensionError,
    EmptyInputError,
    InvalidHalfspaceError,
)

MIN = "min"
MAX = "max"

Point = tuple  # tuple[Fraction, ...]


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, float):
        # floats enter through decimal text so 0.1 means 1/10
        return Fraction(repr(x))
    return Fraction(x)


def as_point(coords: Iterable) -> Point:
    return tuple(as_fraction(x) for x in coords)


def dot(u: Sequence, v: Sequence):
    return sum(a * b for a, b in zip(u, v))


@dataclass(frozen=True)
class Orientation:
    """Per-objective optimisation sense."""

    senses: tuple

    def __post_init__(self):
        senses = tuple(self.senses)
        if not senses:
            raise DimensionError("orientation needs at least one objective")
        for s in senses:
            if s not in (MIN, MAX):
                raise ValueError(f"unknown sense {s!r}")
        object.__setattr__(self, "senses", senses)

    @classmethod
    def all_min(cls, d: int) -> "Orientation":
        return cls((MIN,) * d)

    @classmethod
    def all_max(cls, d: int) -> "Orientation":
        return cls((MAX,) * d)

    @property
    def d(self) -> int:
        return len(self.senses)

    def sign(self, i: int) -> int:
        return 1 if self.senses[i] == MIN else -1

    @property
    def signs(self) -> tuple:
        return tuple(self.sign(i) for i in range(self.d))

    def generators(self) -> list:
        """Integer generators of the cone C."""
        d = self.d
        return [tuple(self.sign(i) if j == i else 0 for j in range(d)) for i in range(d)]

    @property
    def is_all_min(self) -> bool:
        return all(s == MIN for s in self.senses)

    @property
    def is_all_max(self) -> bool:
        return all(s == MAX for s in self.senses)


@dataclass(frozen=True, order=True)
class Halfspace:
    """The set ``{z : w . z >= c}``."""

    w: tuple
    c: Fraction

    def __post_init__(self):
        object.__setattr__(self, "w", as_point(self.w))
        object.__setattr__(self, "c", as_fraction(self.c))

    @property
    def d(self) -> int:
        return len(self.w)

    def value(self, z: Sequence):
        return dot(self.w, z)

    def satisfied_by(self, z: Sequence) -> bool:
        return dot(self.w, z) >= self.c

    def to_json(self) -> dict:
        return {"w": [str(x) for x in self.w], "c": str(self.c)}

    @classmethod
    def from_json(cls, obj: dict) -> "Halfspace":
        return cls(tuple(obj["w"]), obj["c"])

    def __str__(self):
        return f"{list(map(str, self.w))} . z >= {self.c}"


def _lcm_denominators(values) -> int:
    m = 1
    for x in values:
        m = m * x.denominator // math.gcd(m, x.denominator)
    return m


def _primitive(vec):
    g = math.gcd(*vec)
    if g in (0, 1):
        return tuple(vec)
    return tuple(x // g for x in vec)


def canonicalize_halfspace(h: Halfspace) -> Halfspace:
    """Scale ``(w, c)`` by a positive rational to integers with gcd 1."""
    if all(x == 0 for x in h.w):
        raise InvalidHalfspaceError("halfspace normal must be nonzero")
    ints = _int_vec((*h.w, h.c))
    return Halfspace(ints[:-1], ints[-1])


# ---------------------------------------------------------------------------
# double description kernel


def _rank(vectors) -> int:
    rows = [[Fraction(x) for x in v] for v in vectors]
    if not rows:
        return 0
    ncols = len(rows[0])
    rank = 0
    for col in range(ncols):
        pivot = next((r for r in range(rank, len(rows)) if rows[r][col] != 0), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        p = rows[rank]
        for r in range(rank + 1, len(rows)):
            f = rows[r][col] / p[col]
            if f:
                rows[r] = [a - f * b for a, b in zip(rows[r], p)]
        rank += 1
    return rank


def _solve_basis(basis):
    """Columns of ``basis^{-1}`` as primitive integer vectors."""
    m = len(basis)
    aug = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(m)]
           for i, row in enumerate(basis)]
    for col in range(m):
        pivot = next(r for r in range(col, m) if aug[r][col] != 0)
        aug[col], aug[pivot] = aug[pivot], aug[col]
        p = aug[col][col]
        aug[col] = [x / p for x in aug[col]]
        for r in range(m):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[col])]
    cols = []
    for k in range(m):
        col = [aug[i][m + k] for i in range(m)]
        scale = _lcm_denominators(col)
        cols.append(_primitive([int(x * scale) for x in col]))
    return cols


class _DoubleDescription:
    """Extreme rays of the pointed cone ``{a : r . a >= 0 for each row r}``.

    Rows are added one at a time; each ray carries a bitmask of the rows it
    is tight on, which drives the combinatorial adjacency test.  With
    ``tol`` set, rows and rays are floats compared against that tolerance.
    """

    def __init__(self, m: int, tol: float | None = None):
        self.m = m
        self.tol = tol
        self.rows: list = []
        self.rays: list = []
        self.masks: list = []

    def _sign(self, x) -> int:
        if self.tol is None:
            return (x > 0) - (x < 0)
        if abs(x) <= self.tol:
            return 0
        return 1 if x > 0 else -1

    def _normalize(self, vec):
        if self.tol is None:
            return _primitive(vec)
        scale = max(abs(x) for x in vec)
        return tuple(x / scale for x in vec)

    @classmethod
    def from_rows(cls, rows: list, tol: float | None = None) -> "_DoubleDescription":
        m = len(rows[0])
        dd = cls(m, tol)
        basis_idx = []
        chosen = []
        for i, r in enumerate(rows):
            if _rank(chosen + [r]) > len(chosen):
                chosen.append(r)
                basis_idx.append(i)
                if len(chosen) == m:
                    break
        if len(chosen) < m:
            raise BadConeError("constraint rows do not span the space; cone has lineality")
        rays = _solve_basis(chosen)
        if tol is not None:
            rays = [tuple(float(x) for x in r) for r in rays]
        dd.rows = [rows[i] if tol is None else tuple(float(x) for x in rows[i]) for i in basis_idx]
        dd.rays = [dd._normalize(r) for r in rays]
        full = (1 << m) - 1
        dd.masks = [full & ~(1 << k) for k in range(m)]
        used = set(basis_idx)
        for r in (r for i, r in enumerate(rows) if i not in used):
            dd.add_row(r)
        return dd

    @classmethod
    def from_state(cls, rows: list, rays: list) -> "_DoubleDescription":
        """Resume from known rows and the complete set of extreme rays."""
        dd = cls(len(rows[0]))
        dd.rows = list(rows)
        dd.rays = list(rays)
        dd.masks = []
        for ray in rays:
            mask = 0
            for j, row in enumerate(rows):
                if dot(row, ray) == 0:
                    mask |= 1 << j
            dd.masks.append(mask)
        return dd

    def add_row(self, row) -> bool:
        """Intersect with ``row . a >= 0``; return True if any ray was cut."""
        if self.tol is not None:
            row = tuple(float(x) for x in row)
        j = len(self.rows)
        self.rows.append(row)
        bit = 1 << j
        values = [dot(row, ray) for ray in self.rays]
        signs = [self._sign(v) for v in values]
        pos = [k for k, s in enumerate(signs) if s > 0]
        neg = [k for k, s in enumerate(signs) if s < 0]
        zero = [k for k, s in enumerate(signs) if s == 0]
        if not neg:
            for k in zero:
                self.masks[k] |= bit
            return False

        new_rays, new_masks = [], []
        all_masks = self.masks
        need = self.m - 2
        for p in pos:
            mp = all_masks[p]
            for n in neg:
                common = mp & all_masks[n]
                if common.bit_count() < need:
                    continue
                adjacent = True
                for k, mk in enumerate(all_masks):
                    if k != p and k != n and (mk & common) == common:
                        adjacent = False
                        break
                if not adjacent:
                    continue
                vp, vn = values[p], values[n]
                rp, rn = self.rays[p], self.rays[n]
                ray = tuple(vp * b - vn * a for a, b in zip(rp, rn))
                new_rays.append(self._normalize(ray))
                new_masks.append(common | bit)

        rays = [self.rays[k] for k in pos]
        masks = [self.masks[k] for k in pos]
        for k in zero:
            rays.append(self.rays[k])
            masks.append(self.masks[k] | bit)
        self.rays = rays + new_rays
        self.masks = masks + new_masks
        return True


def _int_vec(entries: Sequence) -> tuple:
    """Primitive integer vector with the same direction as ``entries``."""
    entries = [Fraction(x) for x in entries]
    m = _lcm_denominators(entries)
    return _primitive([int(x * m) for x in entries])


def _int_row(head: int, coords: Sequence) -> tuple:
    return _int_vec((head, *coords))


def _check_points(V, d: int | None = None):
    pts = [as_point(v) for v in V]
    if not pts:
        raise EmptyInputError("point set is empty")
    d = len(pts[0]) if d is None else d
    for p in pts:
        if len(p) != d:
            raise DimensionError(f"point {p} has dimension {len(p)}, expected {d}")
    return sorted(set(pts))


def _cone_rows(orientation: Orientation) -> list:
    return [(0, *g) for g in orientation.generators()]


def _facets_from_rays(rays, tol=None) -> frozenset:
    facets = set()
    for ray in rays:
        a0, w = ray[0], ray[1:]
        if tol is None:
            if any(w):
                facets.add(Halfspace(w, -a0))
        elif any(abs(x) > tol for x in w):
            w = [Fraction(x).limit_denominator(10**9) for x in w]
            c = Fraction(-a0).limit_denominator(10**9)
            facets.add(canonicalize_halfspace(Halfspace(w, c)))
    return frozenset(facets)


def _facet_ray(h: Halfspace) -> tuple:
    return tuple(int(x) for x in (-h.c, *h.w))


def facet_enumeration(V: Iterable, orientation: Orientation, tol: float | None = None) -> frozenset:
    """Canonical facet-supporting halfspaces of ``conv(V) + C``.

    ``tol`` switches to floating point with that zero tolerance; results are
    then only approximately canonical and meant for timing experiments.
    """
    pts = _check_points(V, orientation.d)
    rows = _cone_rows(orientation) + [_int_row(1, p) for p in pts]
    dd = _DoubleDescription.from_rows(rows, tol)
    return _facets_from_rays(dd.rays, tol)


def _vertex_subset(points, facets, d: int) -> tuple:
    verts = []
    for p in points:
        tight = [h.w for h in facets if dot(h.w, p) == h.c]
        if len(tight) >= d and _rank(tight) == d:
            verts.append(p)
    return tuple(sorted(verts))


@dataclass(frozen=True)
class Polyhedron:
    """``conv(vertices) + C`` with both representations held exactly."""

    vertices: tuple
    facets: tuple
    orientation: Orientation

    @classmethod
    def from_points(cls, V: Iterable, orientation: Orientation) -> "Polyhedron":
        pts = _check_points(V, orientation.d)
        facets = facet_enumeration(pts, orientation)
        return cls(_vertex_subset(pts, facets, orientation.d), tuple(sorted(facets)), orientation)

    @property
    def d(self) -> int:
        return self.orientation.d

    def contains(self, p: Sequence) -> bool:
        return contains(self, p)

    def to_json(self) -> dict:
        return {
            "orientation": list(self.orientation.senses),
            "vertices": [[str(x) for x in v] for v in self.vertices],
            "facets": [h.to_json() for h in self.facets],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)

    @classmethod
    def from_json(cls, obj: dict) -> "Polyhedron":
        return cls(
            tuple(as_point(v) for v in obj["vertices"]),
            tuple(sorted(Halfspace.from_json(h) for h in obj["facets"])),
            Orientation(tuple(obj["orientation"])),
        )


def insert_point(poly: Polyhedron, p: Sequence) -> tuple:
    """Add ``p`` to the generating set of ``poly``.

    Returns ``(new_poly, new_facets)``.  Only the one new constraint is run
    through the double description update; the existing facets seed it.
    """
    p = as_point(p)
    if len(p) != poly.d:
        raise DimensionError(f"point has dimension {len(p)}, polyhedron {poly.d}")
    if contains(poly, p):
        return poly, frozenset()
    rows = _cone_rows(poly.orientation) + [_int_row(1, v) for v in poly.vertices]
    infinity = (1,) + (0,) * poly.d
    rays = [_facet_ray(h) for h in poly.facets] + [infinity]
    dd = _DoubleDescription.from_state(rows, rays)
    dd.add_row(_int_row(1, p))
    facets = _facets_from_rays(dd.rays)
    points = sorted(set(poly.vertices) | {p})
    new_poly = Polyhedron(_vertex_subset(points, facets, poly.d), tuple(sorted(facets)), poly.orientation)
    return new_poly, facets - frozenset(poly.facets)


def contains(poly: Polyhedron, p: Sequence) -> bool:
    p = as_point(p)
    if len(p) != poly.d:
        raise DimensionError(f"point has dimension {len(p)}, polyhedron {poly.d}")
    return all(dot(h.w, p) >= h.c for h in poly.facets)


def extreme_filter(V: Iterable, orientation: Orientation) -> frozenset:
    """The points of ``V`` that are vertices of ``conv(V) + C``."""
    return frozenset(Polyhedron.from_points(V, orientation).vertices)


def vertex_enumeration(H: Iterable, orientation: Orientation) -> frozenset:
    """Vertices of ``{z : w . z >= c for (w, c) in H}``.

    Raises ``BadConeError`` unless the polyhedron is nonempty and its
    recession cone is exactly the orientation cone.
    """
    hs = list(H)
    d = orientation.d
    if not hs:
        raise BadConeError("no halfspaces: recession cone is the whole space")
    for h in hs:
        if h.d != d:
            raise DimensionError(f"halfspace dimension {h.d}, expected {d}")
        if not any(h.w):
            raise InvalidHalfspaceError("halfspace normal must be nonzero")
    rows = [_int_vec((-h.c, *h.w)) for h in hs]
    rows.append((1,) + (0,) * d)
    dd = _DoubleDescription.from_rows(rows)
    vertices, directions = set(), set()
    for ray in dd.rays:
        t, z = ray[0], ray[1:]
        if t > 0:
            vertices.add(tuple(Fraction(x, t) for x in z))
        else:
            directions.add(_primitive(z))
    if not vertices:
        raise BadConeError("polyhedron is empty")
    if directions != set(orientation.generators()):
        raise BadConeError(f"recession cone generated by {sorted(directions)}, not the orientation cone")
    return frozenset(vertices)
