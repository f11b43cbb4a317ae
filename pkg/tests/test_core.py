import json
import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from brute import brute_facets, hkey, in_hull
from innerapx import instances as I
from innerapx import oracles as O
from innerapx.core import (
    EpsilonSpec,
    RunConfig,
    RunResult,
    compose_eps,
    find_initial_solution,
    inner_approximate,
    postprocess,
    scale_halfspace,
    solve,
)
from innerapx.exceptions import LimitExceeded, OracleContractError
from innerapx.polytope import Halfspace as H
from innerapx.polytope import Orientation, Polyhedron, contains

MIN2 = Orientation.all_min(2)
TOY = I.ExplicitInstance([(1, 4), (2, 2), (4, 1)])


def run(inst, eps, **kw):
    oracle = O.make_oracle(inst)
    spec = EpsilonSpec.uniform(eps, inst.orientation)
    return inner_approximate(oracle, find_initial_solution(oracle.ws, inst), spec, RunConfig(**kw))


def test_scale_halfspace_examples():
    assert scale_halfspace(H((1, 0), 2), EpsilonSpec.uniform(1, MIN2)) == H((2, 0), 2)
    assert scale_halfspace(H((1, 1), 4), EpsilonSpec.uniform(0, MIN2)) == H((1, 1), 4)
    spec = EpsilonSpec.uniform(F(1, 2), Orientation.all_max(2))
    assert scale_halfspace(H((-1, 0), -9), spec) == H((F(-1, 2), 0), -9)


def test_epsilon_spec_validation():
    with pytest.raises(ValueError):
        EpsilonSpec.uniform(-1, MIN2)
    with pytest.raises(ValueError):
        EpsilonSpec.uniform(1, Orientation.all_max(2))
    assert EpsilonSpec.uniform(0, MIN2).exact_mode


def test_find_initial_solution_examples():
    assert TOY.images[find_initial_solution(O.ws_explicit, TOY)] == (2, 2)
    single = I.ExplicitInstance([(3, 3)])
    assert find_initial_solution(O.ws_explicit, single) == 0
    ap = I.APInstance([[[1, 2], [2, 1]], [[1, 1], [1, 1]]])
    assert find_initial_solution(O.ws_assignment, ap) == (0, 1)


def test_toy_exact_run():
    res = run(TOY, 0)
    assert set(res.images) == {(2, 2), (1, 4), (4, 1)}
    assert set(res.polyhedron.facets) == {H((1, 0), 1), H((0, 1), 1), H((2, 1), 6), H((1, 2), 6)}
    assert res.complete


def test_toy_eps_one_run():
    res = run(TOY, 1)
    assert res.images == ((2, 2),)
    assert res.stats.oracle_calls == 2
    assert all(r.status == O.INSIDE for r in res.trace)


@pytest.mark.parametrize("eps", [0, F(1, 10), 1, 5])
def test_single_image_instance(eps):
    inst = I.ExplicitInstance([(3, 3, 3)])
    res = run(inst, eps)
    assert res.solutions == (0,)
    assert res.stats.oracle_calls == 3
    assert all(r.status == O.INSIDE for r in res.trace)


def test_postprocess_examples():
    poly = Polyhedron.from_points([(1, 4), (2, 2), (4, 1)], MIN2)
    spec = EpsilonSpec.uniform(0, MIN2)
    imgs = ((1, 4), (2, 2), (4, 1), (3, 3), (2, 2))
    res = RunResult(("a", "b", "c", "d", "e"), imgs, poly, (), None, spec)
    out = postprocess(res)
    assert out.solutions == ("a", "b", "c")
    assert postprocess(out) == out


@pytest.mark.parametrize("eps,beta,gamma", [
    ("0.2", F(1, 10), F(1, 11)),
    (1, F(1, 2), F(1, 3)),
    ("0.01", F(1, 200), F(1, 201)),
])
def test_compose_eps_examples(eps, beta, gamma):
    b, g = compose_eps(F(eps))
    assert (b, g) == (beta, gamma)
    assert (1 + b) * (1 + g) == 1 + F(eps)


def test_iteration_limit_returns_partial():
    inst = I.ExplicitInstance([(1, 9), (2, 5), (3, 3), (5, 2), (9, 1)])
    with pytest.raises(LimitExceeded) as exc:
        run(inst, 0, max_iterations=1)
    partial = exc.value.partial
    assert not partial.complete and len(partial.images) == 2


def test_time_limit():
    inst = I.generate_ap(4, 3, 1)
    with pytest.raises(LimitExceeded):
        run(inst, 0, time_limit=0.0)


def test_lying_oracle_is_caught():
    class Liar:
        instance = TOY
        quality = O.EXACT

        def __call__(self, h):
            return O.OracleAnswer(O.NOT_INSIDE, 1, (2, 2))

    spec = EpsilonSpec.uniform(0, MIN2)
    with pytest.raises(OracleContractError):
        inner_approximate(Liar(), 1, spec)


def test_json_round_trip():
    res = solve(I.generate_kp(8, 3, 4), F(1, 4))
    again = RunResult.from_json(json.loads(json.dumps(res.to_json())))
    assert again.images == res.images and again.polyhedron == res.polyhedron
    assert again.quality == res.quality and again.trace == res.trace


def test_deterministic_output():
    inst = I.generate_ap(4, 3, 9)
    a, b = solve(inst, F(1, 10)).to_json(), solve(inst, F(1, 10)).to_json()
    a.pop("stats"), b.pop("stats")
    assert a == b


# --- properties -------------------------------------------------------------

@st.composite
def explicit_instances(draw):
    d = draw(st.integers(2, 3))
    coord = st.fractions(min_value=0, max_value=12, max_denominator=2)
    imgs = draw(st.lists(st.tuples(*[coord] * d), min_size=1, max_size=9))
    return I.ExplicitInstance(imgs)


eps_values = st.sampled_from([F(0), F(1, 20), F(1, 4), F(1), F(3)])


@settings(max_examples=50, deadline=None)
@given(explicit_instances(), eps_values)
def test_soundness_innerness_monotonicity(inst, eps):
    res = run(inst, eps)
    spec = res.spec
    facets = [(h.w, h.c) for h in res.polyhedron.facets]
    for y in inst.images:
        assert contains(res.polyhedron, spec.scale_point(y))
        assert in_hull(facets, spec.scale_point(y))
    # replay the refinements
    prev = None
    for k in range(1, len(res.images) + 1):
        poly = Polyhedron.from_points(res.images[:k], inst.orientation)
        imgs = set(res.images[:k])
        assert set(poly.vertices) <= imgs
        if prev is not None:
            assert all(contains(poly, v) for v in prev.vertices)
        prev = poly
    assert prev == res.polyhedron
    queried = [r.halfspace for r in res.trace]
    assert len(queried) == len(set(queried))


@settings(max_examples=40, deadline=None)
@given(explicit_instances())
def test_exact_mode_matches_brute_hull(inst):
    res = run(inst, 0)
    got = {hkey(h) for h in res.polyhedron.facets}
    assert got == brute_facets(inst.images, inst.orientation.senses)


def test_max_orientation_explicit_run_sound():
    rnd = random.Random(11)
    o = Orientation.all_max(2)
    for _ in range(20):
        imgs = [(rnd.randint(0, 20), rnd.randint(0, 20)) for _ in range(8)]
        inst = I.ExplicitInstance(imgs, o)
        res = run(inst, F(1, 5))
        assert all(contains(res.polyhedron, res.spec.scale_point(y)) for y in imgs)


def test_mixed_orientation_explicit_run_sound():
    rnd = random.Random(12)
    o = Orientation(("min", "max", "min"))
    for _ in range(20):
        imgs = [tuple(rnd.randint(0, 15) for _ in range(3)) for _ in range(8)]
        inst = I.ExplicitInstance(imgs, o)
        res = run(inst, F(1, 3))
        assert all(contains(res.polyhedron, res.spec.scale_point(y)) for y in imgs)
