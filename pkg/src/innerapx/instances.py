"""Problem instances, their objective functions, generators and file formats.

Solutions are plain hashable values: a sorted tuple of item indices (KP),
a permutation tuple ``perm[row] = column`` (AP), a tour tuple starting at
city 0 (TSP) or an image index (explicit list).

File formats are whitespace separated ASCII.  The first non-comment line is
the type keyword (``kp``, ``ap``, ``tsp``, ``explicit``); ``# key=value``
comment lines carry generator metadata and survive a round trip.

* kp: ``d n W`` then n lines ``weight p_1 .. p_d``
* ap: ``d n`` then d stacked n x n matrices, row-major
* tsp: ``d n`` then d blocks of n lines ``x y``, or ``d n M`` then d
  explicit n x n matrices
* explicit: ``d m [sense_1 .. sense_d]`` then m rows of rationals ``num/den``
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .exceptions import DimensionError, FeasibilityError, InstanceParseError, TooLargeError
from .polytope import Orientation, as_point

DEFAULT_LIMIT = 10**6


def _check_square(layers, name):
    if not layers:
        raise DimensionError(f"{name} needs at least one cost layer")
    n = len(layers[0])
    for layer in layers:
        if len(layer) != n or any(len(row) != n for row in layer):
            raise DimensionError(f"{name} cost layers must all be {n}x{n}")
    return n


@dataclass(frozen=True)
class KPInstance:
    """Multi-objective 0/1 knapsack, all objectives maximised."""

    weights: tuple
    profits: tuple  # profits[j][i]: profit of item j in objective i
    capacity: int
    meta: dict = field(default_factory=dict, compare=False)

    kind = "kp"

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(int(x) for x in self.weights))
        object.__setattr__(self, "profits", tuple(tuple(int(p) for p in row) for row in self.profits))
        if len(self.weights) != len(self.profits):
            raise DimensionError("one weight per item required")
        if not self.profits:
            raise DimensionError("knapsack needs at least one item")
        d = len(self.profits[0])
        if d == 0 or any(len(row) != d for row in self.profits):
            raise DimensionError("every item needs the same number of profits")
        if self.capacity < 0 or any(w < 0 for w in self.weights):
            raise ValueError("capacity and weights must be nonnegative")
        if any(p < 0 for row in self.profits for p in row):
            raise ValueError("profits must be nonnegative")

    @property
    def n(self) -> int:
        return len(self.weights)

    @property
    def d(self) -> int:
        return len(self.profits[0])

    @property
    def orientation(self) -> Orientation:
        return Orientation.all_max(self.d)

    def evaluate(self, sol) -> tuple:
        items = tuple(sol)
        if len(set(items)) != len(items) or any(not 0 <= j < self.n for j in items):
            raise FeasibilityError(f"invalid item subset {items}")
        if sum(self.weights[j] for j in items) > self.capacity:
            raise FeasibilityError("capacity exceeded")
        return tuple(Fraction(sum(self.profits[j][i] for j in items)) for i in range(self.d))

    def solutions(self, limit=DEFAULT_LIMIT):
        if 2**self.n > limit:
            raise TooLargeError(f"2^{self.n} subsets exceed limit {limit}")
        for r in range(self.n + 1):
            for items in itertools.combinations(range(self.n), r):
                if sum(self.weights[j] for j in items) <= self.capacity:
                    yield items

    def coordinate_bound(self) -> int:
        return max(sum(row[i] for row in self.profits) for i in range(self.d))


@dataclass(frozen=True)
class APInstance:
    """Multi-objective assignment problem, all objectives minimised."""

    layers: tuple
    meta: dict = field(default_factory=dict, compare=False)

    kind = "ap"

    def __post_init__(self):
        layers = tuple(tuple(tuple(int(x) for x in row) for row in layer) for layer in self.layers)
        object.__setattr__(self, "layers", layers)
        _check_square(layers, "assignment")
        if any(x < 1 for layer in layers for row in layer for x in row):
            raise ValueError("assignment costs must be at least 1")

    @property
    def n(self) -> int:
        return len(self.layers[0])

    @property
    def d(self) -> int:
        return len(self.layers)

    @property
    def orientation(self) -> Orientation:
        return Orientation.all_min(self.d)

    def evaluate(self, sol) -> tuple:
        perm = tuple(sol)
        if sorted(perm) != list(range(self.n)):
            raise FeasibilityError(f"{perm} is not a permutation of 0..{self.n - 1}")
        return tuple(Fraction(sum(layer[i][perm[i]] for i in range(self.n))) for layer in self.layers)

    def solutions(self, limit=DEFAULT_LIMIT):
        if math.factorial(self.n) > limit:
            raise TooLargeError(f"{self.n}! permutations exceed limit {limit}")
        return itertools.permutations(range(self.n))

    def coordinate_bound(self) -> int:
        return max(sum(max(row) for row in layer) for layer in self.layers)


def ceil_euclidean(p, q) -> int:
    sq = (p[0] - q[0]) ** 2 + (p[1] - q[1]) ** 2
    r = math.isqrt(sq)
    return r if r * r == sq else r + 1


def canonical_tour(tour) -> tuple:
    """Rotate to start at city 0 and orient towards the smaller neighbour."""
    tour = list(tour)
    k = tour.index(0)
    tour = tour[k:] + tour[:k]
    if len(tour) > 2 and tour[-1] < tour[1]:
        tour = [0] + tour[:0:-1]
    return tuple(tour)


@dataclass(frozen=True)
class TSPInstance:
    """Symmetric metric TSP, all objectives minimised.

    ``coords`` (one point list per objective) is kept when the cost layers
    were derived from plane points, so the file can be written back as
    coordinates.
    """

    layers: tuple
    coords: tuple | None = None
    meta: dict = field(default_factory=dict, compare=False)

    kind = "tsp"

    def __post_init__(self):
        layers = tuple(tuple(tuple(int(x) for x in row) for row in layer) for layer in self.layers)
        object.__setattr__(self, "layers", layers)
        n = _check_square(layers, "TSP")
        if n < 3:
            raise DimensionError("TSP needs at least 3 cities")
        for layer in layers:
            for i in range(n):
                if layer[i][i] != 0:
                    raise ValueError("TSP costs need a zero diagonal")
                for j in range(i):
                    if layer[i][j] != layer[j][i]:
                        raise ValueError("TSP costs must be symmetric")
                    if layer[i][j] < 0:
                        raise ValueError("TSP costs must be nonnegative")

    @classmethod
    def from_coords(cls, coords, meta=None) -> "TSPInstance":
        coords = tuple(tuple((int(x), int(y)) for x, y in pts) for pts in coords)
        layers = [[[ceil_euclidean(p, q) for q in pts] for p in pts] for pts in coords]
        return cls(layers, coords, meta or {})

    @property
    def n(self) -> int:
        return len(self.layers[0])

    @property
    def d(self) -> int:
        return len(self.layers)

    @property
    def orientation(self) -> Orientation:
        return Orientation.all_min(self.d)

    def is_metric(self) -> bool:
        n = self.n
        for layer in self.layers:
            for i in range(n):
                row_i = layer[i]
                for j in range(n):
                    bound = row_i[j]
                    for k in range(n):
                        if row_i[k] + layer[k][j] < bound:
                            return False
        return True

    def evaluate(self, sol) -> tuple:
        tour = tuple(sol)
        if sorted(tour) != list(range(self.n)):
            raise FeasibilityError(f"{tour} is not a Hamiltonian cycle on {self.n} cities")
        return tuple(
            Fraction(sum(layer[tour[k]][tour[(k + 1) % self.n]] for k in range(self.n)))
            for layer in self.layers
        )

    def solutions(self, limit=DEFAULT_LIMIT):
        if math.factorial(self.n - 1) // 2 > limit:
            raise TooLargeError(f"({self.n}-1)!/2 tours exceed limit {limit}")
        for rest in itertools.permutations(range(1, self.n)):
            if rest[0] < rest[-1]:
                yield (0, *rest)

    def coordinate_bound(self) -> int:
        return max(sum(max(row) for row in layer) for layer in self.layers)


@dataclass(frozen=True)
class ExplicitInstance:
    """A problem given by the list of its images."""

    images: tuple
    orientation: Orientation = None
    meta: dict = field(default_factory=dict, compare=False)

    kind = "explicit"

    def __post_init__(self):
        images = tuple(as_point(y) for y in self.images)
        if not images:
            raise DimensionError("explicit instance needs at least one image")
        d = len(images[0])
        if any(len(y) != d for y in images):
            raise DimensionError("all images need the same dimension")
        if any(x < 0 for y in images for x in y):
            raise ValueError("images must be nonnegative")
        object.__setattr__(self, "images", images)
        if self.orientation is None:
            object.__setattr__(self, "orientation", Orientation.all_min(d))
        elif self.orientation.d != d:
            raise DimensionError("orientation does not match image dimension")

    @property
    def d(self) -> int:
        return len(self.images[0])

    @property
    def n(self) -> int:
        return len(self.images)

    def evaluate(self, sol) -> tuple:
        if not isinstance(sol, int) or not 0 <= sol < len(self.images):
            raise FeasibilityError(f"no image with index {sol!r}")
        return self.images[sol]

    def solutions(self, limit=DEFAULT_LIMIT):
        if len(self.images) > limit:
            raise TooLargeError("image list exceeds limit")
        return iter(range(len(self.images)))

    def coordinate_bound(self):
        return max(x for y in self.images for x in y)


def evaluate(inst, sol) -> tuple:
    """Objective vector of ``sol``; raises ``FeasibilityError`` if infeasible."""
    return inst.evaluate(sol)


def enumerate_solutions(inst, limit=DEFAULT_LIMIT):
    return list(inst.solutions(limit))


def enumerate_images(inst, limit=DEFAULT_LIMIT) -> frozenset:
    """Exact image set of all feasible solutions (brute force)."""
    return frozenset(inst.evaluate(s) for s in inst.solutions(limit))


def nondominated(points, orientation: Orientation) -> list:
    """Points not dominated by any other point of the set."""
    signs = orientation.signs
    pts = sorted(set(points))
    keyed = [tuple(s * x for s, x in zip(signs, p)) for p in pts]
    keep = []
    for p, kp in zip(pts, keyed):
        dominated = any(kq != kp and all(a <= b for a, b in zip(kq, kp)) for kq in keyed)
        if not dominated:
            keep.append(p)
    return keep


# ---------------------------------------------------------------------------
# generators


def generate_kp(n: int, d: int, seed: int, mode: str = "uniform") -> KPInstance:
    """Random knapsack: profits and weights uniform in [1, 1000], capacity half
    the total weight.  ``conflicting`` makes objectives 2..d anti-correlated
    with objective 1 (``1001 - p1`` plus noise in [-100, 100])."""
    if n < 1 or d < 2:
        raise ValueError("need n >= 1 items and d >= 2 objectives")
    if mode not in ("uniform", "conflicting"):
        raise ValueError(f"unknown mode {mode!r}")
    rng = random.Random(seed)
    weights, profits = [], []
    for _ in range(n):
        weights.append(rng.randint(1, 1000))
        p1 = rng.randint(1, 1000)
        row = [p1]
        for _ in range(1, d):
            if mode == "uniform":
                row.append(rng.randint(1, 1000))
            else:
                row.append(min(1000, max(1, 1001 - p1 + rng.randint(-100, 100))))
        profits.append(row)
    meta = {"generator": "kp", "mode": mode, "seed": seed, "profit_range": "1-1000",
            "weight_range": "1-1000", "capacity": "ceil(sum/2)"}
    return KPInstance(weights, profits, -(-sum(weights) // 2), meta)


def generate_ap(n: int, d: int, seed: int, high: int = 20) -> APInstance:
    """Random assignment costs, uniform integers in [1, high]."""
    if n < 2 or d < 1 or high < 1:
        raise ValueError("need n >= 2, d >= 1, high >= 1")
    rng = random.Random(seed)
    layers = [[[rng.randint(1, high) for _ in range(n)] for _ in range(n)] for _ in range(d)]
    return APInstance(layers, {"generator": "ap", "seed": seed, "cost_range": f"1-{high}"})


def generate_tsp(n: int, seed: int, d: int = 3, side: int = 1000) -> TSPInstance:
    """d independent uniform point sets in [0, side]^2; ceiled Euclidean costs."""
    if n < 3 or d < 1:
        raise ValueError("need n >= 3 cities and d >= 1")
    rng = random.Random(seed)
    coords = [[(rng.randint(0, side), rng.randint(0, side)) for _ in range(n)] for _ in range(d)]
    return TSPInstance.from_coords(coords, {"generator": "tsp", "seed": seed, "side": side})


# ---------------------------------------------------------------------------
# file formats


def _fmt_matrix(rows) -> list:
    return [" ".join(str(x) for x in row) for row in rows]


def format_instance(inst) -> str:
    lines = [inst.kind]
    lines += [f"# {k}={v}" for k, v in sorted(inst.meta.items())]
    if inst.kind == "kp":
        lines.append(f"{inst.d} {inst.n} {inst.capacity}")
        lines += [" ".join(map(str, (w, *p))) for w, p in zip(inst.weights, inst.profits)]
    elif inst.kind == "ap":
        lines.append(f"{inst.d} {inst.n}")
        for layer in inst.layers:
            lines += _fmt_matrix(layer)
    elif inst.kind == "tsp":
        if inst.coords is not None:
            lines.append(f"{inst.d} {inst.n}")
            for pts in inst.coords:
                lines += [f"{x} {y}" for x, y in pts]
        else:
            lines.append(f"{inst.d} {inst.n} M")
            for layer in inst.layers:
                lines += _fmt_matrix(layer)
    elif inst.kind == "explicit":
        lines.append(" ".join([str(inst.d), str(inst.n), *inst.orientation.senses]))
        lines += [" ".join(str(x) for x in y) for y in inst.images]
    else:
        raise TypeError(f"unknown instance kind {inst.kind!r}")
    return "\n".join(lines) + "\n"


def write_instance(inst, path) -> None:
    Path(path).write_text(format_instance(inst))


_SUFFIX_KINDS = {".kp": "kp", ".ap": "ap", ".tsp": "tsp", ".explicit": "explicit"}


class _Tokens:
    def __init__(self, lines):
        self.lines = lines  # list of (lineno, tokens)
        self.pos = 0

    def next_line(self, what):
        if self.pos >= len(self.lines):
            last = self.lines[-1][0] if self.lines else 0
            raise InstanceParseError(f"unexpected end of file, expected {what}", last + 1)
        item = self.lines[self.pos]
        self.pos += 1
        return item

    def ints(self, what, count=None):
        lineno, toks = self.next_line(what)
        if count is not None and len(toks) != count:
            raise InstanceParseError(f"expected {count} values for {what}, got {len(toks)}", lineno)
        try:
            return lineno, [int(t) for t in toks]
        except ValueError:
            raise InstanceParseError(f"non-integer value in {what}", lineno) from None

    def done(self):
        if self.pos < len(self.lines):
            raise InstanceParseError("trailing data", self.lines[self.pos][0])


def parse_instance(text: str, kind: str | None = None):
    """Parse instance text; ``kind`` is needed only if the file has no type line."""
    meta, lines = {}, []
    for lineno, raw in enumerate(text.splitlines(), 1):
        s = raw.strip()
        if not s:
            continue
        if s.startswith("#"):
            body = s[1:].strip()
            if "=" in body:
                k, v = body.split("=", 1)
                meta[k.strip()] = v.strip()
            continue
        lines.append((lineno, s.split()))
    if lines and len(lines[0][1]) == 1 and lines[0][1][0].lower() in _SUFFIX_KINDS.values():
        kind = lines.pop(0)[1][0].lower()
    if kind is None:
        raise InstanceParseError("cannot determine instance type", lines[0][0] if lines else 1)
    toks = _Tokens(lines)
    try:
        inst = _PARSERS[kind](toks, meta)
    except (ValueError, DimensionError) as exc:
        if isinstance(exc, InstanceParseError):
            raise
        raise InstanceParseError(str(exc)) from exc
    toks.done()
    return inst


def _parse_matrices(toks, d, n, what):
    layers = []
    for k in range(d):
        layers.append([toks.ints(f"{what} {k + 1}", n)[1] for _ in range(n)])
    return layers


def _parse_kp(toks, meta):
    lineno, (d, n, cap) = toks.ints("header 'd n W'", 3)
    if n < 1 or d < 1:
        raise InstanceParseError("need n >= 1 and d >= 1", lineno)
    weights, profits = [], []
    for _ in range(n):
        _, vals = toks.ints("item line 'weight p_1..p_d'", d + 1)
        weights.append(vals[0])
        profits.append(vals[1:])
    return KPInstance(weights, profits, cap, meta)


def _parse_ap(toks, meta):
    _, (d, n) = toks.ints("header 'd n'", 2)
    return APInstance(_parse_matrices(toks, d, n, "cost layer"), meta)


def _parse_tsp(toks, meta):
    lineno, head = toks.next_line("header 'd n' or 'd n M'")
    if len(head) == 3 and head[2] == "M":
        try:
            d, n = int(head[0]), int(head[1])
        except ValueError:
            raise InstanceParseError("bad header", lineno) from None
        return TSPInstance(_parse_matrices(toks, d, n, "cost layer"), None, meta)
    if len(head) != 2:
        raise InstanceParseError("expected header 'd n' or 'd n M'", lineno)
    try:
        d, n = int(head[0]), int(head[1])
    except ValueError:
        raise InstanceParseError("bad header", lineno) from None
    coords = []
    for _ in range(d):
        coords.append([tuple(toks.ints("coordinate line 'x y'", 2)[1]) for _ in range(n)])
    return TSPInstance.from_coords(coords, meta)


def _parse_explicit(toks, meta):
    lineno, head = toks.next_line("header 'd m [senses]'")
    try:
        d, m = int(head[0]), int(head[1])
    except (ValueError, IndexError):
        raise InstanceParseError("expected header 'd m [senses]'", lineno) from None
    senses = head[2:]
    if senses and len(senses) != d:
        raise InstanceParseError(f"expected {d} senses", lineno)
    orientation = Orientation(tuple(senses)) if senses else None
    images = []
    for _ in range(m):
        lineno, vals = toks.next_line("image row")
        if len(vals) != d:
            raise InstanceParseError(f"expected {d} coordinates", lineno)
        try:
            images.append(tuple(Fraction(v) for v in vals))
        except ValueError:
            raise InstanceParseError("bad rational", lineno) from None
    return ExplicitInstance(images, orientation, meta)


_PARSERS = {"kp": _parse_kp, "ap": _parse_ap, "tsp": _parse_tsp, "explicit": _parse_explicit}


def read_instance(path, kind: str | None = None):
    path = Path(path)
    if kind is None:
        kind = _SUFFIX_KINDS.get(path.suffix.lower())
    return parse_instance(path.read_text(), kind)
