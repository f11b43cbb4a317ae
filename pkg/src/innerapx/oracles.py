"""Plane separating oracles built on weighted-sum solvers.

A weighted-sum solver maps a signed weight vector ``w`` (``w_i >= 0`` on
minimised objectives, ``w_i <= 0`` on maximised ones) to a feasible solution
that (approximately) minimises ``w . f(x)``.  Maximised objectives therefore
become a maximisation of ``|w| . f(x)`` inside the solver.  The adaptor
answers a halfspace query ``w . z >= c`` with *inside* iff the solver's
solution satisfies it.

All solvers first scale the weights to coprime integers; the optimum does
not change and the inner loops stay on machine-sized ints.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import networkx as nx

from .exceptions import OracleError
from .instances import APInstance, ExplicitInstance, KPInstance, TSPInstance, canonical_tour
from .polytope import Halfspace, Orientation, _int_vec, as_fraction, dot

INSIDE = "inside"
NOT_INSIDE = "not_inside"


@dataclass(frozen=True)
class OracleAnswer:
    status: str
    solution: object = None
    image: tuple | None = None

    def __post_init__(self):
        if self.status == INSIDE and self.solution is not None:
            raise ValueError("an inside answer carries no solution")
        if self.status == NOT_INSIDE and self.solution is None:
            raise ValueError("a not_inside answer needs a solution")
        if self.status not in (INSIDE, NOT_INSIDE):
            raise ValueError(f"unknown status {self.status!r}")

    @property
    def inside(self) -> bool:
        return self.status == INSIDE


@dataclass(frozen=True)
class OracleQuality:
    """Approximation guarantee of a weighted-sum solver.

    ``sense="min"`` means the solver value is at most ``alpha * OPT`` for a
    minimisation weighted sum (``alpha >= 1``); ``sense="max"`` means at least
    ``alpha * OPT`` for a maximisation (``0 < alpha <= 1``).
    """

    alpha: Fraction = Fraction(1)
    sense: str = "min"

    def __post_init__(self):
        alpha = as_fraction(self.alpha)
        object.__setattr__(self, "alpha", alpha)
        if self.sense == "min" and alpha < 1:
            raise ValueError("min-approximation needs alpha >= 1")
        if self.sense == "max" and not 0 < alpha <= 1:
            raise ValueError("max-approximation needs 0 < alpha <= 1")
        if self.sense not in ("min", "max"):
            raise ValueError(f"unknown sense {self.sense!r}")

    @property
    def exact(self) -> bool:
        return self.alpha == 1

    def factor(self, sense: str) -> Fraction:
        """Multiplier applied to an objective of the given sense."""
        if self.exact:
            return Fraction(1)
        if sense != self.sense:
            raise ValueError(f"{self.sense}-approximation cannot guarantee a {sense} objective")
        return self.alpha

    def to_json(self) -> dict:
        return {"alpha": str(self.alpha), "sense": self.sense}


EXACT = OracleQuality()


def check_weights(w, orientation: Orientation) -> tuple:
    """Validate the sign pattern of ``w`` and return it as integers."""
    w = tuple(as_fraction(x) for x in w)
    if len(w) != orientation.d:
        raise ValueError(f"weight vector has length {len(w)}, expected {orientation.d}")
    if not any(w):
        raise ValueError("weight vector must not be zero")
    for i, x in enumerate(w):
        if x * orientation.sign(i) < 0:
            raise ValueError(f"weight {x} has the wrong sign for a {orientation.senses[i]} objective")
    return _int_vec(w)


# ---------------------------------------------------------------------------
# explicit lists


def ws_explicit(w, inst: ExplicitInstance) -> int:
    """Index minimising ``w . y``; ties go to the smallest index."""
    w = check_weights(w, inst.orientation)
    values = [dot(w, y) for y in inst.images]
    return values.index(min(values))


def weakened_explicit(alpha) -> Callable:
    """An explicit solver that is only an ``alpha``-approximation.

    Among the images within ``alpha`` of the optimum it returns the worst
    one, so the approximation slack is used to the full.  Minimisation only.
    """
    alpha = as_fraction(alpha)

    def solve(w, inst: ExplicitInstance) -> int:
        if not inst.orientation.is_all_min:
            raise ValueError("weakened explicit solver supports minimisation only")
        w = check_weights(w, inst.orientation)
        values = [dot(w, y) for y in inst.images]
        bound = alpha * min(values)
        allowed = [k for k, v in enumerate(values) if v <= bound]
        return max(allowed, key=lambda k: (values[k], -k))

    return solve


# ---------------------------------------------------------------------------
# assignment


def hungarian(cost) -> list:
    """Minimum-cost perfect assignment of a square matrix, ``perm[row] = col``.

    Shortest augmenting path version with row/column potentials, O(n^3).
    """
    n = len(cost)
    if n == 0 or any(len(row) != n for row in cost):
        raise ValueError("cost matrix must be non-empty and square")
    inf = float("inf")
    u = [0] * (n + 1)
    v = [0] * (n + 1)
    match = [0] * (n + 1)  # match[col] = row, 1-based, 0 = free
    way = [0] * (n + 1)
    for i in range(1, n + 1):
        match[0] = i
        j0 = 0
        minv = [inf] * (n + 1)
        used = [False] * (n + 1)
        while True:
            used[j0] = True
            i0 = match[j0]
            delta, j1 = inf, 0
            row = cost[i0 - 1]
            ui0 = u[i0]
            for j in range(1, n + 1):
                if not used[j]:
                    cur = row[j - 1] - ui0 - v[j]
                    if cur < minv[j]:
                        minv[j] = cur
                        way[j] = j0
                    if minv[j] < delta:
                        delta, j1 = minv[j], j
            for j in range(n + 1):
                if used[j]:
                    u[match[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if match[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            match[j0] = match[j1]
            j0 = j1
    perm = [0] * n
    for j in range(1, n + 1):
        perm[match[j] - 1] = j - 1
    return perm


def ws_assignment(w, inst: APInstance) -> tuple:
    """Optimal permutation for the combined cost ``sum_i w_i L_i``.

    Among optimal permutations the lexicographically smallest is returned:
    costs are scaled by ``n^n`` and cell ``(i, j)`` gets ``j * n^(n-1-i)``
    added, which orders equal-cost permutations lexicographically without
    changing the optimum.
    """
    w = check_weights(w, inst.orientation)
    n = inst.n
    combined = [[sum(wk * layer[i][j] for wk, layer in zip(w, inst.layers)) for j in range(n)]
                for i in range(n)]
    scale = n**n
    perturbed = [[combined[i][j] * scale + j * n ** (n - 1 - i) for j in range(n)] for i in range(n)]
    return tuple(hungarian(perturbed))


# ---------------------------------------------------------------------------
# knapsack


def ws_knapsack_extgreedy(w, inst: KPInstance) -> tuple:
    """Extended greedy for the scalarised knapsack (0.5-approximation).

    Items heavier than the capacity are dropped, the rest sorted by
    profit/weight ratio; the greedy prefix up to the first item that does
    not fit is compared with the best single item.
    """
    w = check_weights(w, inst.orientation)
    scal = [sum(-wi * p for wi, p in zip(w, row)) for row in inst.profits]
    cap = inst.capacity
    items = [j for j in range(inst.n) if inst.weights[j] <= cap]
    if not items:
        return ()
    def ratio_key(j):
        wt = inst.weights[j]
        if wt == 0:
            return (0, -scal[j], j)
        return (1, Fraction(-scal[j], wt), j)

    items.sort(key=ratio_key)
    prefix, load, value = [], 0, 0
    for j in items:
        if load + inst.weights[j] > cap:
            break
        prefix.append(j)
        load += inst.weights[j]
        value += scal[j]
    best = max(items, key=lambda j: (scal[j], -j))
    if scal[best] > value:
        return (best,)
    return tuple(sorted(prefix))


# ---------------------------------------------------------------------------
# metric TSP


def _combined_tsp(w, inst: TSPInstance):
    if inst.n < 3:
        raise ValueError("TSP needs at least 3 cities")
    w = check_weights(w, inst.orientation)
    n = inst.n
    cost = [[sum(wk * layer[i][j] for wk, layer in zip(w, inst.layers)) for j in range(n)]
            for i in range(n)]
    for i in range(n):
        for j in range(i):
            if cost[i][j] != cost[j][i]:
                raise ValueError("TSP costs must be symmetric")
    return cost


def minimum_spanning_tree(cost) -> list:
    """Prim's algorithm from city 0; returns ``parent`` (``parent[0] = -1``)."""
    n = len(cost)
    parent = [-1] * n
    best = [None] * n
    in_tree = [False] * n
    best[0] = 0
    for _ in range(n):
        u = min((k for k in range(n) if not in_tree[k] and best[k] is not None),
                key=lambda k: (best[k], k))
        in_tree[u] = True
        for v in range(n):
            if not in_tree[v] and (best[v] is None or cost[u][v] < best[v]):
                best[v] = cost[u][v]
                parent[v] = u
    return parent


def tour_cost(cost, tour) -> int:
    n = len(tour)
    return sum(cost[tour[k]][tour[(k + 1) % n]] for k in range(n))


def double_tree_tour(cost) -> tuple:
    """Preorder walk of a minimum spanning tree (cost <= 2 * MST)."""
    parent = minimum_spanning_tree(cost)
    children = [[] for _ in cost]
    for v, p in enumerate(parent):
        if p >= 0:
            children[p].append(v)
    order, stack = [], [0]
    while stack:
        u = stack.pop()
        order.append(u)
        stack.extend(sorted(children[u], reverse=True))
    return canonical_tour(order)


def christofides_tour(cost) -> tuple:
    """Christofides: MST plus exact minimum-weight perfect matching on the
    odd-degree vertices, Euler tour, shortcut (cost <= 1.5 * OPT)."""
    n = len(cost)
    parent = minimum_spanning_tree(cost)
    multi = nx.MultiGraph()
    multi.add_nodes_from(range(n))
    degree = [0] * n
    for v, p in enumerate(parent):
        if p >= 0:
            multi.add_edge(p, v)
            degree[p] += 1
            degree[v] += 1
    odd = [v for v in range(n) if degree[v] % 2]
    g = nx.Graph()
    for a in range(len(odd)):
        for b in range(a + 1, len(odd)):
            g.add_edge(odd[a], odd[b], weight=cost[odd[a]][odd[b]])
    multi.add_edges_from(nx.min_weight_matching(g))
    seen, order = set(), []
    for u, _ in nx.eulerian_circuit(multi, source=0):
        if u not in seen:
            seen.add(u)
            order.append(u)
    return canonical_tour(order)


def ws_tsp_doubletree(w, inst: TSPInstance, christofides: bool = False) -> tuple:
    cost = _combined_tsp(w, inst)
    return christofides_tour(cost) if christofides else double_tree_tour(cost)


def ws_tsp_christofides(w, inst: TSPInstance) -> tuple:
    return ws_tsp_doubletree(w, inst, christofides=True)


# ---------------------------------------------------------------------------
# oracle adaptor


def hpo_ws(h: Halfspace, ws: Callable, inst) -> OracleAnswer:
    """Weighted-sum plane separating oracle for ``h = {z : w . z >= c}``."""
    try:
        x = ws(h.w, inst)
    except (ValueError, ArithmeticError) as exc:
        raise OracleError(f"weighted-sum solver failed: {exc}") from exc
    y = inst.evaluate(x)
    if dot(h.w, y) >= h.c:
        return OracleAnswer(INSIDE)
    return OracleAnswer(NOT_INSIDE, x, y)


def approx_oracle(h: Halfspace, ws_alpha: Callable, quality: OracleQuality, inst) -> OracleAnswer:
    """Same decision rule as :func:`hpo_ws`; ``quality`` only changes what the
    caller may conclude from an *inside* answer."""
    return hpo_ws(h, ws_alpha, inst)


class WeightedSumOracle:
    """Callable oracle ``halfspace -> OracleAnswer`` bound to one instance."""

    def __init__(self, inst, ws: Callable, quality: OracleQuality = EXACT, name: str = "custom"):
        self.instance = inst
        self.ws = ws
        self.quality = quality
        self.name = name

    def __call__(self, h: Halfspace) -> OracleAnswer:
        return approx_oracle(h, self.ws, self.quality, self.instance)

    def solve(self, w):
        return self.ws(w, self.instance)

    def __repr__(self):
        return f"WeightedSumOracle({self.name}, alpha={self.quality.alpha})"


ORACLES = {
    # name: (instance kind, solver, quality)
    "exact": ("explicit", ws_explicit, EXACT),
    "hungarian": ("ap", ws_assignment, EXACT),
    "extgreedy": ("kp", ws_knapsack_extgreedy, OracleQuality(Fraction(1, 2), "max")),
    "doubletree": ("tsp", ws_tsp_doubletree, OracleQuality(Fraction(2), "min")),
    "christofides": ("tsp", ws_tsp_christofides, OracleQuality(Fraction(3, 2), "min")),
}

DEFAULT_ORACLE = {"explicit": "exact", "ap": "hungarian", "kp": "extgreedy", "tsp": "doubletree"}


def make_oracle(inst, name: str | None = None) -> WeightedSumOracle:
    name = name or DEFAULT_ORACLE[inst.kind]
    try:
        kind, ws, quality = ORACLES[name]
    except KeyError:
        raise ValueError(f"unknown oracle {name!r}; choose from {sorted(ORACLES)}") from None
    if kind != inst.kind:
        raise ValueError(f"oracle {name!r} needs a {kind} instance, got {inst.kind}")
    return WeightedSumOracle(inst, ws, quality, name)
