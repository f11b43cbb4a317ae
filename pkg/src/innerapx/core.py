"""Inner approximation driver for convex approximation sets.

Starting from ``f(x_init) + C`` the driver repeatedly picks an unchecked
facet ``w . z >= c`` of the current inner polyhedron, asks the oracle about
the scaled halfspace ``(E w) . z >= c`` and either marks the facet as
checked or adds the returned image to the polyhedron.  ``E`` is the
diagonal matrix with ``1 + eps_i`` on minimised and ``1 - eps_i`` on
maximised objectives.  When every facet is checked, the image set of ``R``
scaled by ``E`` (and the oracle's approximation factor) lies inside the
final polyhedron.
"""

from __future__ import annotations

import logging
import time
from collections import deque
from dataclasses import dataclass, field

from .exceptions import DimensionError, LimitExceeded, OracleContractError, OracleError
from .oracles import EXACT, OracleQuality, make_oracle
from .polytope import (
    MAX,
    Halfspace,
    Orientation,
    Polyhedron,
    as_fraction,
    as_point,
    dot,
    insert_point,
)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class EpsilonSpec:
    orientation: Orientation
    eps: tuple

    def __post_init__(self):
        eps = tuple(as_fraction(e) for e in self.eps)
        object.__setattr__(self, "eps", eps)
        if len(eps) != self.orientation.d:
            raise DimensionError(f"{len(eps)} epsilons for {self.orientation.d} objectives")
        for e, sense in zip(eps, self.orientation.senses):
            if e < 0:
                raise ValueError("epsilon must be nonnegative")
            if sense == MAX and e >= 1:
                raise ValueError("epsilon of a maximised objective must be below 1")

    @classmethod
    def uniform(cls, eps, orientation: Orientation) -> "EpsilonSpec":
        return cls(orientation, (as_fraction(eps),) * orientation.d)

    @property
    def d(self) -> int:
        return self.orientation.d

    @property
    def factors(self) -> tuple:
        """Diagonal of E."""
        return tuple(1 - e if s == MAX else 1 + e for e, s in zip(self.eps, self.orientation.senses))

    def guarantee(self, quality: OracleQuality = EXACT) -> tuple:
        """Per-objective factor at which ``R`` is guaranteed to approximate."""
        return tuple(f * quality.factor(s) for f, s in zip(self.factors, self.orientation.senses))

    def scale_point(self, y, quality: OracleQuality = EXACT) -> tuple:
        return tuple(g * x for g, x in zip(self.guarantee(quality), y))

    @property
    def exact_mode(self) -> bool:
        return not any(self.eps)


@dataclass(frozen=True)
class RunConfig:
    max_iterations: int = 100_000
    time_limit: float | None = None
    trace_level: str = "calls"  # "calls" keeps records, "debug" also logs each call

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")
        if self.trace_level not in ("calls", "debug"):
            raise ValueError(f"unknown trace level {self.trace_level!r}")


@dataclass(frozen=True)
class OracleCallRecord:
    halfspace: Halfspace
    scaled: Halfspace
    status: str
    solution: object = None
    image: tuple | None = None

    def to_json(self) -> dict:
        return {
            "halfspace": self.halfspace.to_json(),
            "scaled": self.scaled.to_json(),
            "status": self.status,
            "solution": _solution_to_json(self.solution),
            "image": None if self.image is None else [str(x) for x in self.image],
        }

    @classmethod
    def from_json(cls, obj) -> "OracleCallRecord":
        return cls(
            Halfspace.from_json(obj["halfspace"]),
            Halfspace.from_json(obj["scaled"]),
            obj["status"],
            _solution_from_json(obj["solution"]),
            None if obj["image"] is None else as_point(obj["image"]),
        )


def _solution_to_json(sol):
    return list(sol) if isinstance(sol, tuple) else sol


def _solution_from_json(sol):
    return tuple(sol) if isinstance(sol, list) else sol


@dataclass(frozen=True)
class RunStats:
    iterations: int = 0
    oracle_calls: int = 0
    wall_ms: float = 0.0


@dataclass(frozen=True)
class RunResult:
    solutions: tuple
    images: tuple
    polyhedron: Polyhedron
    trace: tuple
    stats: RunStats
    spec: EpsilonSpec
    quality: OracleQuality = EXACT
    complete: bool = True
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def returned_images(self) -> list:
        """Images handed back by the oracle, in order."""
        return [r.image for r in self.trace if r.image is not None]

    def to_json(self) -> dict:
        return {
            "complete": self.complete,
            "orientation": list(self.spec.orientation.senses),
            "eps": [str(e) for e in self.spec.eps],
            "quality": self.quality.to_json(),
            "solutions": [_solution_to_json(s) for s in self.solutions],
            "images": [[str(x) for x in y] for y in self.images],
            "vertices": [[str(x) for x in v] for v in self.polyhedron.vertices],
            "facets": [h.to_json() for h in self.polyhedron.facets],
            "trace": [r.to_json() for r in self.trace],
            "stats": {
                "iterations": self.stats.iterations,
                "oracle_calls": self.stats.oracle_calls,
                "wall_ms": round(self.stats.wall_ms, 3),
            },
            "meta": dict(self.meta),
        }

    @classmethod
    def from_json(cls, obj) -> "RunResult":
        orientation = Orientation(tuple(obj["orientation"]))
        poly = Polyhedron.from_json({"orientation": obj["orientation"], "vertices": obj["vertices"],
                                     "facets": obj["facets"]})
        q = obj["quality"]
        return cls(
            tuple(_solution_from_json(s) for s in obj["solutions"]),
            tuple(as_point(y) for y in obj["images"]),
            poly,
            tuple(OracleCallRecord.from_json(r) for r in obj["trace"]),
            RunStats(**obj["stats"]),
            EpsilonSpec(orientation, tuple(obj["eps"])),
            OracleQuality(q["alpha"], q["sense"]),
            obj["complete"],
            obj.get("meta", {}),
        )


def scale_halfspace(h: Halfspace, spec: EpsilonSpec) -> Halfspace:
    """``{z : (E w) . z >= c}``."""
    if h.d != spec.d:
        raise DimensionError(f"halfspace dimension {h.d}, epsilon spec {spec.d}")
    return Halfspace(tuple(f * x for f, x in zip(spec.factors, h.w)), h.c)


def find_initial_solution(ws, inst):
    """Solve the weighted sum with all weights 1 (negated on max objectives)."""
    try:
        return ws(inst.orientation.signs, inst)
    except (ValueError, ArithmeticError) as exc:
        raise OracleError(f"initial weighted-sum call failed: {exc}") from exc


def compose_eps(eps) -> tuple:
    """Split ``eps`` into ``(beta, gamma)`` with ``(1 + beta)(1 + gamma) = 1 + eps``.

    Run the driver with ``gamma`` and a ``(1 + beta)``-approximate weighted-sum
    solver to get a ``(1 + eps)`` guarantee.
    """
    eps = as_fraction(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    beta = eps / 2
    gamma = (1 + eps) / (1 + beta) - 1
    return beta, gamma


def inner_approximate(oracle, x_init, spec: EpsilonSpec, cfg: RunConfig | None = None) -> RunResult:
    """Compute a convex approximation set starting from ``x_init``.

    ``oracle`` maps a halfspace to an :class:`~innerapx.oracles.OracleAnswer`
    and exposes the bound ``instance`` (used to evaluate solutions) and its
    ``quality``.  Unchecked facets are processed first-in first-out, new
    facets of each refinement appended in sorted order.  Raises
    :class:`LimitExceeded` carrying the partial result when a limit is hit.
    """
    cfg = cfg or RunConfig()
    inst = oracle.instance
    quality = getattr(oracle, "quality", EXACT)
    orientation = spec.orientation
    start = time.perf_counter()

    y_init = as_point(inst.evaluate(x_init))
    if len(y_init) != spec.d:
        raise DimensionError("initial image does not match the epsilon spec")
    if any(x < 0 for x in y_init):
        raise ValueError("images must be nonnegative")

    solutions, images = [x_init], [y_init]
    poly = Polyhedron.from_points([y_init], orientation)
    checked: set = set()
    queried: set = set()
    queue = deque(poly.facets)
    trace: list = []
    iterations = 0

    def result(complete):
        stats = RunStats(iterations, len(trace), (time.perf_counter() - start) * 1000)
        return RunResult(tuple(solutions), tuple(images), poly, tuple(trace), stats, spec, quality, complete)

    while queue:
        h = queue.popleft()
        if h in checked or h not in poly.facets:
            continue
        if iterations >= cfg.max_iterations:
            raise LimitExceeded(f"iteration limit {cfg.max_iterations} reached", result(False))
        if cfg.time_limit is not None and time.perf_counter() - start > cfg.time_limit:
            raise LimitExceeded(f"time limit {cfg.time_limit}s reached", result(False))

        assert h not in queried, f"halfspace {h} queried twice"
        queried.add(h)
        scaled = scale_halfspace(h, spec)
        answer = oracle(scaled)
        if answer.inside:
            checked.add(h)
            trace.append(OracleCallRecord(h, scaled, answer.status))
            if cfg.trace_level == "debug":
                log.debug("inside: %s", h)
            continue

        y = as_point(inst.evaluate(answer.solution))
        if dot(scaled.w, y) >= scaled.c:
            raise OracleContractError(f"returned image {y} satisfies the queried halfspace {scaled}")
        trace.append(OracleCallRecord(h, scaled, answer.status, answer.solution, y))
        solutions.append(answer.solution)
        images.append(y)
        iterations += 1
        poly, new_facets = insert_point(poly, y)
        queue.extend(sorted(new_facets))
        if h in poly.facets:
            raise OracleContractError(f"returned image {y} does not cut off facet {h}")
        if cfg.trace_level == "debug":
            log.debug("not inside: %s -> %s, %d facets", h, y, len(poly.facets))

    return result(True)


def postprocess(result: RunResult) -> RunResult:
    """Keep one solution per vertex of the final polyhedron, earliest first."""
    vertices = set(result.polyhedron.vertices)
    seen, sols, imgs = set(), [], []
    for x, y in zip(result.solutions, result.images):
        if y in vertices and y not in seen:
            seen.add(y)
            sols.append(x)
            imgs.append(y)
    return RunResult(tuple(sols), tuple(imgs), result.polyhedron, result.trace, result.stats,
                     result.spec, result.quality, result.complete, result.meta)


def solve(inst, eps, oracle_name: str | None = None, cfg: RunConfig | None = None,
          post: bool = True) -> RunResult:
    """One-call convenience: build the oracle, bootstrap, run, post-process."""
    oracle = make_oracle(inst, oracle_name)
    spec = eps if isinstance(eps, EpsilonSpec) else EpsilonSpec.uniform(eps, inst.orientation)
    x_init = find_initial_solution(oracle.ws, inst)
    res = inner_approximate(oracle, x_init, spec, cfg)
    return postprocess(res) if post else res
