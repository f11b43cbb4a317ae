import math
import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from brute import hv_inclusion_exclusion
from innerapx.core import EpsilonSpec
from innerapx.exceptions import EmptyInputError, MetricUndefinedError, UnsupportedDimensionError
from innerapx.metrics import (
    MetricsReport,
    ReferenceSet,
    cardinality_ratio,
    eps_convex_indicator,
    hypervolume,
    indicator_bound,
    representation_metrics,
    verify_convex_approx,
)
from innerapx.oracles import OracleQuality
from innerapx.polytope import Orientation, Polyhedron

MIN2 = Orientation.all_min(2)
YN = [(1, 4), (2, 2), (4, 1)]


def test_indicator_examples():
    single = Polyhedron.from_points([(2, 2)], MIN2)
    full = Polyhedron.from_points(YN, MIN2)
    assert eps_convex_indicator(single, ReferenceSet(YN)) == 2
    assert eps_convex_indicator(full, ReferenceSet(YN)) == 1
    assert eps_convex_indicator(single, ReferenceSet([(2, 2)])) == 1


def test_indicator_infinite_when_no_stretch_helps():
    single = Polyhedron.from_points([(2, 2)], MIN2)
    assert eps_convex_indicator(single, [(0, 5)]) == math.inf


def test_indicator_max_orientation():
    o = Orientation.all_max(2)
    A = Polyhedron.from_points([(2, 2)], o)
    assert eps_convex_indicator(A, [(4, 1), (1, 4)]) == 2


def test_indicator_bound():
    spec = EpsilonSpec.uniform(F(1, 4), MIN2)
    assert indicator_bound(spec) == F(5, 4)
    assert indicator_bound(spec, OracleQuality(2, "min")) == F(5, 2)
    spec = EpsilonSpec.uniform(F(1, 4), Orientation.all_max(2))
    assert indicator_bound(spec, OracleQuality(F(1, 2), "max")) == F(8, 3)


def test_cardinality_ratio_examples():
    assert cardinality_ratio(1, 3) == F(1, 3)
    assert cardinality_ratio([1, 2], {3, 4}) == 1
    assert cardinality_ratio(5, 2) == F(5, 2)
    with pytest.raises(EmptyInputError):
        cardinality_ratio(1, 0)


def test_representation_examples():
    assert representation_metrics([(2, 2)], ReferenceSet(YN)) == (F(2, 3), F(2, 3), F(9, 11), 0)
    assert representation_metrics(YN, ReferenceSet(YN)) == (0, 0, 1, 1)
    ce, me, _, rr = representation_metrics([(1, 2)], ReferenceSet([(1, 2), (2, 1)]))
    assert (ce, me, rr) == (1, F(1, 2), 0)


def test_representation_undefined_without_range():
    with pytest.raises(MetricUndefinedError):
        representation_metrics([(1, 1)], ReferenceSet([(1, 1), (1, 2)]))


def test_verify_examples():
    assert verify_convex_approx([(2, 2)], YN, EpsilonSpec.uniform(1, MIN2))
    assert not verify_convex_approx([(2, 2)], YN, EpsilonSpec.uniform(F(1, 10), MIN2))
    assert verify_convex_approx(YN, YN, EpsilonSpec.uniform(0, MIN2))


def test_hypervolume_examples():
    assert hypervolume([(2, 2)], (5, 5)) == 9
    assert hypervolume(YN, (5, 5)) == 11
    assert hypervolume([(1, 1, 1)], (2, 2, 2)) == 1
    with pytest.raises(UnsupportedDimensionError):
        hypervolume([(1, 1, 1, 1)], (2, 2, 2, 2))


def test_hypervolume_matches_inclusion_exclusion_seeded():
    rnd = random.Random(1)
    for _ in range(30):
        d = rnd.randint(1, 3)
        pts = [tuple(F(rnd.randint(0, 20), rnd.randint(1, 2)) for _ in range(d))
               for _ in range(rnd.randint(1, 8))]
        ref = (F(21),) * d
        assert hypervolume(pts, ref) == hv_inclusion_exclusion(pts, ref)


def test_report_row():
    rep = MetricsReport("x", F(1, 10), F(1, 2), 1, 3, F(2), F(2, 3), F(2, 3), F(9, 11), F(0), 1.5)
    assert rep.to_csv().splitlines()[1] == "x,1/10,1/2,1,3,2,0.666667,0.666667,0.818182,0,1.500"
    assert rep.cardinality_ratio == F(1, 3)


# --- properties -------------------------------------------------------------

pts2 = st.lists(st.tuples(st.integers(0, 15), st.integers(0, 15)), min_size=2, max_size=8, unique=True)


def _has_range(pts):
    return all(len({p[i] for p in pts}) > 1 for i in range(2))


@settings(max_examples=60, deadline=None)
@given(pts2, st.data())
def test_ce_me_relations_and_monotonicity(ref, data):
    if not _has_range(ref):
        return
    R = data.draw(st.lists(st.sampled_from(ref), min_size=1, unique=True))
    extra = data.draw(st.tuples(st.integers(0, 15), st.integers(0, 15)))
    ce, me, hvr, rr = representation_metrics(R, ReferenceSet(ref))
    assert ce >= me
    assert (ce == 0) == (set(ref) <= set(R))
    ce2, me2, hvr2, rr2 = representation_metrics(R + [extra], ReferenceSet(ref))
    assert ce2 <= ce and me2 <= me and hvr2 >= hvr and rr2 >= rr


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(*[st.integers(0, 9)] * 3), min_size=1, max_size=9))
def test_hypervolume_matches_inclusion_exclusion(pts):
    assert hypervolume(pts, (10, 10, 10)) == hv_inclusion_exclusion(pts, (10, 10, 10))
