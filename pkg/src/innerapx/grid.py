"""Geometric grid diagnostics.

Coordinates of images are either 0 or lie in ``[LB, UB] = [2^-p, 2^p]``.
Per objective the grid has cells ``[LB b^k, LB b^(k+1)]`` for
``k = 0..kappa`` with base ``b = 1 + eps`` (minimised) or ``1 / (1 - eps)``
(maximised).  A run of the inner approximation never receives two oracle
images from the same cell; :func:`check_once_per_cell` asserts that on a
trace.

All comparisons are exact; logarithms only provide the starting guess.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .polytope import MAX, Orientation, as_fraction, as_point

ZERO_CELL = -1


def _log2(x: Fraction) -> float:
    return math.log2(x.numerator) - math.log2(x.denominator)


def _max_power_below(base: Fraction, bound: Fraction, strict: bool) -> int:
    """Largest k >= 0 with ``base^k < bound`` (strict) or ``<= bound``.

    Assumes ``base > 1`` and that ``k = 0`` qualifies.
    """
    def ok(k):
        v = base**k
        return v < bound if strict else v <= bound

    k = max(0, int(_log2(bound) / _log2(base)))
    while k > 0 and not ok(k):
        k -= 1
    while ok(k + 1):
        k += 1
    return k


def _kappa(p: int, base: Fraction) -> int:
    return _max_power_below(base, Fraction(2) ** (2 * p), strict=True)


def grid_kappa(p: int, eps) -> int:
    """``max {k : 2^-p (1 + eps)^k < 2^p}``."""
    eps = as_fraction(eps)
    if p < 1 or eps <= 0:
        raise ValueError("need p >= 1 and eps > 0")
    return _kappa(p, 1 + eps)


@dataclass(frozen=True)
class GridSpec:
    p: int
    eps: tuple
    orientation: Orientation

    def __post_init__(self):
        eps = tuple(as_fraction(e) for e in self.eps)
        object.__setattr__(self, "eps", eps)
        if self.p < 1:
            raise ValueError("p must be at least 1")
        if len(eps) != self.orientation.d:
            raise ValueError("one epsilon per objective required")
        for e, s in zip(eps, self.orientation.senses):
            if e < 0 or (s == MAX and e >= 1):
                raise ValueError(f"invalid epsilon {e} for a {s} objective")

    @classmethod
    def uniform(cls, p: int, eps, orientation: Orientation) -> "GridSpec":
        return cls(p, (as_fraction(eps),) * orientation.d, orientation)

    @property
    def lb(self) -> Fraction:
        return Fraction(1, 2**self.p)

    @property
    def ub(self) -> Fraction:
        return Fraction(2**self.p)

    @property
    def bases(self) -> tuple:
        """Cell side ratio per objective; 1 marks a degenerate (eps = 0) axis."""
        return tuple(1 / (1 - e) if s == MAX else 1 + e
                     for e, s in zip(self.eps, self.orientation.senses))

    @property
    def kappa(self) -> tuple:
        return tuple(None if b == 1 else _kappa(self.p, b) for b in self.bases)

    def cardinality_bound(self) -> int:
        """``prod (kappa_i + 2)``: number of cells including the zero slab."""
        if any(k is None for k in self.kappa):
            raise ValueError("grid is degenerate for eps = 0")
        return math.prod(k + 2 for k in self.kappa)


def _coordinate_cell(x: Fraction, base: Fraction, spec: GridSpec, kappa: int) -> int:
    if x == 0:
        return ZERO_CELL
    if x < spec.lb or x > spec.ub:
        raise ValueError(f"coordinate {x} outside [2^-{spec.p}, 2^{spec.p}]")
    k = _max_power_below(base, x / spec.lb, strict=False)
    return min(k, kappa)


def cell_index(y, spec: GridSpec) -> tuple:
    """Per-coordinate cell number ``k`` with ``LB b^k <= y_i < LB b^(k+1)``."""
    y = as_point(y)
    if len(y) != spec.orientation.d:
        raise ValueError("dimension mismatch")
    out = []
    for x, b, k in zip(y, spec.bases, spec.kappa):
        if k is None:
            raise ValueError("cell index undefined for eps = 0")
        out.append(_coordinate_cell(x, b, spec, k))
    return tuple(out)


def minimal_vertex(cell, spec: GridSpec) -> tuple:
    return tuple(Fraction(0) if k == ZERO_CELL else spec.lb * b**k
                 for k, b in zip(cell, spec.bases))


def cell_key(y, spec: GridSpec) -> tuple:
    """Like :func:`cell_index`, but an ``eps = 0`` axis keys on the exact
    coordinate (cells shrink to points)."""
    y = as_point(y)
    return tuple(
        ("exact", x) if k is None else _coordinate_cell(x, b, spec, k)
        for x, b, k in zip(y, spec.bases, spec.kappa)
    )


def check_once_per_cell(images, spec: GridSpec) -> bool:
    seen = set()
    for y in images:
        key = cell_key(y, spec)
        if key in seen:
            return False
        seen.add(key)
    return True


def derive_p(inst) -> int:
    """Bit bound ``p`` with every nonzero image coordinate in ``[2^-p, 2^p]``."""
    bound = as_fraction(inst.coordinate_bound())
    p = max(1, math.ceil(bound).bit_length())
    images = getattr(inst, "images", None)
    if images is not None:
        den = max(x.denominator for y in images for x in y)
        p = max(p, den.bit_length())
    return p
