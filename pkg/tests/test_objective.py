import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from celllayout import (
    Assignment,
    CellLayoutInstance,
    DimensionMismatch,
    IndexOutOfRange,
    InvalidPermutation,
    SameIndex,
    apply_swap,
    evaluate,
    generate_random_instance,
    swap_delta,
)
from oracles import instance_cost


@st.composite
def instance_and_perm(draw, min_n=2, max_n=8):
    n = draw(st.integers(min_n, max_n))
    inst = generate_random_instance(
        n, draw(st.integers(0, 2**31)), draw(st.floats(0.1, 1.0)), 10.0, w=draw(st.floats(0.0, 1.0))
    )
    perm = draw(st.permutations(range(n)))
    return inst, Assignment(perm)


def test_worked_example(two_cell):
    cost = evaluate(two_cell, [0, 1])
    assert cost.flow_term == pytest.approx(3.0, abs=1e-12)
    assert cost.closeness_term == pytest.approx(3.0, abs=1e-12)
    assert cost.total == pytest.approx(4.5, abs=1e-12)
    assert evaluate(two_cell, [1, 0]) == cost


def test_single_cell_costs_nothing():
    inst = CellLayoutInstance(flow=[[0]], closeness=[[0]], distance=[[0]], w=0.7)
    assert evaluate(inst, [0]).total == 0


def test_w_zero_is_pure_flow(table1):
    for perm in ([0, 1, 2, 3, 4, 5], [5, 3, 1, 0, 2, 4]):
        cost = evaluate(table1.with_w(0.0), perm)
        assert cost.total == cost.flow_term


@settings(max_examples=200, deadline=None)
@given(instance_and_perm())
def test_evaluate_matches_quadruple_sum(case):
    inst, perm = case
    cost = evaluate(inst, perm)
    ft, ct, total = instance_cost(inst, perm)
    assert cost.flow_term == pytest.approx(ft, rel=1e-12, abs=1e-12)
    assert cost.closeness_term == pytest.approx(ct, rel=1e-12, abs=1e-12)
    assert cost.total == pytest.approx(total, rel=1e-12, abs=1e-12)
    assert cost.total == pytest.approx(cost.flow_term + inst.w * cost.closeness_term, rel=1e-12)
    assert min(cost.flow_term, cost.closeness_term, cost.total) >= 0


@settings(max_examples=300, deadline=None)
@given(instance_and_perm(), st.data())
def test_swap_delta_matches_full_reevaluation(case, data):
    inst, perm = case
    a, b = data.draw(st.lists(st.integers(0, inst.n - 1), min_size=2, max_size=2, unique=True))
    delta = swap_delta(inst, perm, a, b)
    swapped = apply_swap(perm, a, b)
    assert abs(delta - (evaluate(inst, swapped).total - evaluate(inst, perm).total)) <= 1e-9
    assert abs(delta + swap_delta(inst, swapped, a, b)) <= 1e-12


def test_swap_delta_two_cell_is_zero(two_cell):
    assert swap_delta(two_cell, [0, 1], 0, 1) == pytest.approx(0.0, abs=1e-15)


def test_swap_delta_handles_asymmetric_distance():
    rng = np.random.default_rng(5)
    n = 6
    inst = CellLayoutInstance(
        flow=rng.random((n, n)) * (1 - np.eye(n)),
        closeness=np.ones((n, n), dtype=int),
        distance=rng.random((n, n)) * (1 - np.eye(n)),
        w=0.3,
    )
    perm = Assignment(tuple(rng.permutation(n)))
    for a in range(n):
        for b in range(n):
            if a != b:
                expected = evaluate(inst, apply_swap(perm, a, b)).total - evaluate(inst, perm).total
                assert swap_delta(inst, perm, a, b) == pytest.approx(expected, abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(instance_and_perm(), st.floats(0.0, 1.0))
def test_total_is_affine_in_w(case, w):
    inst, perm = case
    lo, mid, hi = (evaluate(inst.with_w(x), perm) for x in (0.0, w, 1.0))
    assert lo.total == lo.flow_term
    assert mid.total == pytest.approx(lo.total + w * (hi.total - lo.total), rel=1e-12, abs=1e-15)
    assert lo.total - 1e-15 <= mid.total <= hi.total + 1e-15


@settings(max_examples=100, deadline=None)
@given(instance_and_perm(), st.data())
def test_location_relabeling_equivariance(case, data):
    inst, perm = case
    n = inst.n
    sigma = np.array(data.draw(st.permutations(range(n))))
    relabeled_d = np.empty_like(inst.distance)
    relabeled_d[np.ix_(sigma, sigma)] = inst.distance
    relabeled = CellLayoutInstance(inst.flow, inst.closeness, relabeled_d, inst.w)
    moved = Assignment(tuple(sigma[list(perm)]))
    a, b = evaluate(inst, perm), evaluate(relabeled, moved)
    for x, y in ((a.flow_term, b.flow_term), (a.closeness_term, b.closeness_term), (a.total, b.total)):
        assert x == pytest.approx(y, rel=1e-12, abs=1e-15)


def test_apply_swap():
    p = Assignment((0, 1, 2))
    assert apply_swap(p, 0, 2) == Assignment((2, 1, 0))
    assert apply_swap(apply_swap(p, 0, 2), 0, 2) == p
    assert p.perm == (0, 1, 2)


@given(st.permutations(range(7)), st.integers(0, 6), st.integers(0, 6))
def test_apply_swap_closure(perm, a, b):
    if a == b:
        return
    out = apply_swap(perm, a, b)
    assert sorted(out) == list(range(7))


def test_swap_argument_errors(two_cell):
    with pytest.raises(SameIndex):
        swap_delta(two_cell, [0, 1], 1, 1)
    with pytest.raises(IndexOutOfRange):
        swap_delta(two_cell, [0, 1], 0, 2)
    with pytest.raises(IndexOutOfRange):
        apply_swap([0, 1], -1, 0)
    with pytest.raises(SameIndex):
        apply_swap([0, 1], 0, 0)


@pytest.mark.parametrize("perm,index", [((0, 0, 1), 1), ((0, 3, 1), 1), ((-1, 0, 1), 0)])
def test_invalid_permutations(perm, index):
    with pytest.raises(InvalidPermutation) as info:
        Assignment(perm)
    assert info.value.index == index


def test_dimension_mismatch(two_cell):
    with pytest.raises(DimensionMismatch):
        evaluate(two_cell, [0, 1, 2])


def test_assignment_parse_and_str():
    assert str(Assignment.parse("2, 0,1")) == "2,0,1"
    with pytest.raises(InvalidPermutation):
        Assignment.parse("0,a")
