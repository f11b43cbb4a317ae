"""Quality measures for approximation runs.

Everything is computed in exact rational arithmetic.  The representation
metrics (coverage error, median error, hypervolume ratio, range ratio)
compare an image set against a reference non-dominated set; maximised
objectives are negated first so a single minimisation code path serves
both senses.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction

from .core import EpsilonSpec
from .exceptions import (
    EmptyInputError,
    MetricUndefinedError,
    UnsupportedDimensionError,
)
from .oracles import EXACT, OracleQuality
from .polytope import Orientation, Polyhedron, as_point, contains, dot


@dataclass(frozen=True)
class ReferenceSet:
    points: tuple
    source: str = "brute-force"  # or "exact-mode"

    def __post_init__(self):
        pts = tuple(sorted({as_point(p) for p in self.points}))
        if not pts:
            raise EmptyInputError("reference set is empty")
        if any(x < 0 for p in pts for x in p):
            raise ValueError("reference points must be nonnegative")
        object.__setattr__(self, "points", pts)

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)


def _points(ref):
    pts = list(ref.points if isinstance(ref, ReferenceSet) else ref)
    if not pts:
        raise EmptyInputError("reference set is empty")
    return [as_point(p) for p in pts]


def eps_convex_indicator(A: Polyhedron, ref):
    """Smallest factor ``t >= 1`` with ``t * v`` in ``A`` for every reference point.

    For all-min orientation this is ``max c / (w . v)`` over facets and
    points.  For all-max orientation the reference points are shrunk
    instead and the reciprocal of the largest admissible shrink factor is
    reported.  Returns ``math.inf`` when no finite factor exists.
    """
    pts = _points(ref)
    o = A.orientation
    if o.is_all_min:
        worst = Fraction(1)
        for v in pts:
            for h in A.facets:
                wv = dot(h.w, v)
                if wv == 0:
                    if h.c > 0:
                        return math.inf
                    continue
                worst = max(worst, h.c / wv)
        return worst
    if o.is_all_max:
        shrink = Fraction(1)
        for v in pts:
            for h in A.facets:
                wv = dot(h.w, v)
                if wv < 0:
                    shrink = min(shrink, h.c / wv)
                elif h.c > 0:
                    return math.inf
        if shrink <= 0:
            return math.inf
        return 1 / shrink
    raise ValueError("indicator is defined for uniform orientations only")


def indicator_bound(spec: EpsilonSpec, quality: OracleQuality = EXACT) -> Fraction:
    """Largest indicator value a run with ``spec`` and ``quality`` may produce.

    ``alpha * (1 + eps)`` for minimisation; ``1 / (alpha * (1 - eps))`` for
    maximisation, where points are shrunk rather than stretched.
    """
    g = set(spec.guarantee(quality))
    if len(g) != 1:
        raise ValueError("bound is defined for uniform epsilon and orientation only")
    (factor,) = g
    if spec.orientation.is_all_min:
        return factor
    if spec.orientation.is_all_max:
        return 1 / factor
    raise ValueError("bound is defined for uniform orientations only")


def cardinality_ratio(R, Rstar) -> Fraction:
    r = R if isinstance(R, int) else len(R)
    rs = Rstar if isinstance(Rstar, int) else len(Rstar)
    if rs == 0:
        raise EmptyInputError("reference set is empty")
    return Fraction(r, rs)


def _oriented(points, orientation):
    if orientation is None:
        return [as_point(p) for p in points]
    signs = orientation.signs
    return [tuple(s * x for s, x in zip(signs, as_point(p))) for p in points]


def median(values) -> Fraction:
    vals = sorted(values)
    if not vals:
        raise EmptyInputError("median of empty sequence")
    mid = len(vals) // 2
    if len(vals) % 2:
        return Fraction(vals[mid])
    return Fraction(vals[mid - 1] + vals[mid], 2)


def hypervolume(points, ref_point) -> Fraction:
    """Exact volume of the union of boxes ``[p, ref_point]`` (minimisation), d <= 3."""
    ref = as_point(ref_point)
    pts = [as_point(p) for p in points]
    d = len(ref)
    if d > 3:
        raise UnsupportedDimensionError("hypervolume is implemented for d <= 3")
    for p in pts:
        if len(p) != d:
            raise ValueError("point and reference dimensions differ")
        if any(a > b for a, b in zip(p, ref)):
            raise ValueError(f"point {p} is not dominated-bounded by reference {ref}")
    if not pts:
        return Fraction(0)
    if d == 1:
        return ref[0] - min(p[0] for p in pts)
    if d == 2:
        return _area_2d([(p[0], p[1]) for p in pts], ref[0], ref[1])
    volume = Fraction(0)
    levels = sorted({p[2] for p in pts})
    for k, z in enumerate(levels):
        top = levels[k + 1] if k + 1 < len(levels) else ref[2]
        active = [(p[0], p[1]) for p in pts if p[2] <= z]
        volume += _area_2d(active, ref[0], ref[1]) * (top - z)
    return volume


def _area_2d(pts, rx, ry) -> Fraction:
    area = Fraction(0)
    pts = sorted(pts)
    low = ry
    for k, (x, y) in enumerate(pts):
        low = min(low, y)
        nxt = pts[k + 1][0] if k + 1 < len(pts) else rx
        area += (nxt - x) * (ry - low)
    return area


def representation_metrics(R_images, Ynd, orientation: Orientation | None = None,
                           with_hvr: bool = True) -> tuple:
    """``(ce, me, hvr, rr)`` of ``R_images`` against the non-dominated set.

    ``hvr`` is ``None`` when ``with_hvr`` is false.
    """
    ref = _oriented(_points(Ynd), orientation)
    R = _oriented(R_images, orientation)
    if not R:
        raise EmptyInputError("representation is empty")
    d = len(ref[0])
    spans = []
    for i in range(d):
        lo, hi = min(y[i] for y in ref), max(y[i] for y in ref)
        if hi == lo:
            raise MetricUndefinedError(f"objective {i} has no range in the reference set")
        spans.append(hi - lo)
    omega = [1 / s for s in spans]

    def dist(a, b):
        return max(o * abs(x - y) for o, x, y in zip(omega, a, b))

    errors = [min(dist(y, r) for r in R) for y in ref]
    ce = max(errors)
    me = median(errors)

    hvr = None
    if with_hvr:
        p = tuple(max(y[i] for y in ref) + 1 for i in range(d))
        inside = [r for r in R if all(a <= b for a, b in zip(r, p))]
        hvr = hypervolume(inside, p) / hypervolume(ref, p)

    rr = sum(
        (max(r[i] for r in R) - min(r[i] for r in R)) / spans[i] for i in range(d)
    ) / d
    return ce, me, hvr, Fraction(rr)


def verify_convex_approx(R_images, all_images, spec: EpsilonSpec,
                         alpha: OracleQuality = EXACT) -> bool:
    """Certificate: every image scaled by the guaranteed factor lies in
    ``conv(R_images) + C``."""
    A = Polyhedron.from_points(R_images, spec.orientation)
    return all(contains(A, spec.scale_point(y, alpha)) for y in all_images)


def _fmt(x) -> str:
    if x is None:
        return ""
    if x == math.inf:
        return "inf"
    if isinstance(x, Fraction):
        return f"{float(x):.6g}"
    return str(x)


@dataclass(frozen=True)
class MetricsReport:
    instance_id: str
    eps: Fraction
    alpha: Fraction
    r_size: int
    rstar_size: int | None
    eps_indicator: object
    ce: Fraction | None = None
    me: Fraction | None = None
    hvr: Fraction | None = None
    rr: Fraction | None = None
    wall_ms: float = 0.0

    FIELDS = ("instance", "eps", "alpha", "R", "Rstar", "eps_indicator",
              "ce", "me", "hvr", "rr", "wall_ms")

    @property
    def cardinality_ratio(self):
        return None if not self.rstar_size else cardinality_ratio(self.r_size, self.rstar_size)

    def row(self) -> list:
        return [self.instance_id, str(self.eps), str(self.alpha), str(self.r_size),
                "" if self.rstar_size is None else str(self.rstar_size),
                _fmt(self.eps_indicator), _fmt(self.ce), _fmt(self.me), _fmt(self.hvr),
                _fmt(self.rr), f"{self.wall_ms:.3f}"]

    def to_csv(self, header: bool = True) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        if header:
            writer.writerow(self.FIELDS)
        writer.writerow(self.row())
        return buf.getvalue()
