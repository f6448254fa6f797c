import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from lpdecode.cuts import (
    THETA,
    SolutionVector,
    brute_force_cut,
    cut_search,
    cut_to_constraint,
    g_minimum,
    necessary_condition,
    necessary_condition_gap_form,
    parity_lhs,
    sufficient_condition,
    sufficient_condition_gap_form,
    sweep,
)
from lpdecode.selftest import random_point

unit = st.one_of(st.just(0.0), st.just(1.0), st.just(0.5), st.floats(0.0, 1.0))
points = st.lists(unit, min_size=2, max_size=12)


def naive_cuts(u, support):
    """Independent oracle: every odd subset, evaluated with a plain sum."""
    found = []
    for k in range(1, len(support) + 1, 2):
        for V in itertools.combinations(support, k):
            lhs = sum(1 - u[i] if i in V else u[i] for i in support)
            if lhs < THETA:
                found.append(V)
    return sorted(found)


def test_solution_vector():
    v = SolutionVector([0.0, 0.5, 1.0])
    assert v.integral_mask.tolist() == [True, False, True]
    assert v.fractional.tolist() == [1] and not v.is_integral
    with pytest.raises(ValueError):
        SolutionVector([1.2])
    with pytest.raises(ValueError):
        SolutionVector([np.nan])


def test_parity_lhs_examples():
    assert parity_lhs([1, 0, 0], (0, 1, 2), (0,)) == 0.0
    assert parity_lhs([0.9, 0.1, 0.1], (0, 1, 2), (0,)) == pytest.approx(0.3)
    assert parity_lhs([1, 1, 1], (0, 1, 2), (0, 1, 2)) == 0.0
    assert parity_lhs([1, 1, 1, 1], (0, 1, 2, 3), (0, 1, 2)) == 1.0
    with pytest.raises(ValueError):
        parity_lhs([0, 0], (0,), (1,))


def test_condition_examples():
    assert not necessary_condition([0.5, 0.5, 0.5], (0, 1, 2))
    assert g_minimum([0.5, 0.5, 0.5], (0, 1, 2)) == 1.5
    assert necessary_condition([0.9, 0.1, 0.1], (0, 1, 2))
    assert not necessary_condition([1, 1, 0], (0, 1, 2))
    # g(T) = 0.3 but every gap |1/2 - u_i| is 0.4, so 0.3 + 0.8 is not below 1;
    # the check still cuts, the condition is only sufficient
    assert not sufficient_condition([0.9, 0.1, 0.1], (0, 1, 2))
    assert cut_search([0.9, 0.1, 0.1], (0, 1, 2)) is not None
    assert sufficient_condition([0.6, 0.45], (0, 1))
    assert not sufficient_condition([0.5] * 4, (0, 1, 2, 3))


def test_cut_search_examples():
    cut = cut_search([1, 0, 0], (0, 1, 2))
    assert cut.subset == (0,) and cut.lhs == 0.0
    assert cut_search([0.5, 0.5, 0.5], (0, 1, 2)) is None
    assert naive_cuts([0.5, 0.5, 0.5], (0, 1, 2)) == []
    cut = cut_search([0.9, 0.1, 0.1], (0, 1, 2))
    assert cut.subset == (0,) and cut.lhs == pytest.approx(0.3)
    assert cut_search([0.3], ()) is None


def test_cut_search_tie_and_integral_toggles():
    # |T| = 0 with two equally uncertain entries: the smaller index is toggled
    assert cut_search([0.4, 0.4, 0.0], (0, 1, 2)) is None
    cut = cut_search([0.45, 0.45, 0.0], (0, 1, 2))
    assert cut is None or cut.subset == (0,)
    # integral, even T, no fractional entries: the smallest index is toggled and no cut results
    assert cut_search([1.0, 1.0, 0.0], (0, 1, 2)) is None


def test_brute_force_examples():
    assert brute_force_cut([0.9, 0.1, 0.1], (0, 1, 2)) == [(0,)]
    assert brute_force_cut([0, 0, 0], (0, 1, 2)) == []
    with pytest.raises(ValueError):
        brute_force_cut(np.zeros(21), tuple(range(21)))


@given(points)
def test_brute_force_matches_naive_enumeration(u):
    support = tuple(range(len(u)))
    assert brute_force_cut(u, support) == naive_cuts(u, support)


@given(points)
def test_cut_search_matches_brute_force(u):
    support = tuple(range(len(u)))
    found = brute_force_cut(u, support)
    cut = cut_search(u, support)
    assert len(found) <= 1
    assert found == ([] if cut is None else [cut.subset])


@given(points)
def test_conditions(u):
    support = tuple(range(len(u)))
    cut = cut_search(u, support) is not None
    if cut:
        assert necessary_condition(u, support)
    if sufficient_condition(u, support):
        assert cut
    T = [i for i in support if u[i] > 0.5]
    if len(T) % 2:
        assert necessary_condition(u, support) == cut
    else:
        assert sufficient_condition(u, support) == cut


@given(points)
def test_gap_forms_agree(u):
    support = tuple(range(len(u)))
    vals = np.asarray(u)
    T = [i for i in support if vals[i] > 0.5]
    S = [i for i in support if 0 < vals[i] < 1]
    g = parity_lhs(vals, support, T)
    gap = 0.5 * len(S) - sum(abs(0.5 - vals[i]) for i in S)
    assert abs(g - gap) < 1e-12
    assert necessary_condition(u, support) == necessary_condition_gap_form(u, support)
    assert sufficient_condition(u, support) == sufficient_condition_gap_form(u, support)


def test_cut_to_constraint_examples():
    from lpdecode.cuts import ParityCut
    c = cut_to_constraint(ParityCut((0, 1, 2), (0,), 0.0))
    assert c.coefficients == (-1.0, 1.0, 1.0) and c.bound == 0.0
    c = cut_to_constraint(ParityCut((0, 1, 2), (0, 1, 2), 0.0))
    assert c.coefficients == (-1.0, -1.0, -1.0) and c.bound == -2.0
    u = [0.9, 0.1, 0.1]
    cut = cut_search(u, (0, 1, 2))
    assert cut_to_constraint(cut).evaluate(u) <= -(1 - THETA)


def test_sweep_matches_row_by_row(rng):
    for _ in range(300):
        m, n = int(rng.integers(1, 10)), int(rng.integers(2, 15))
        bits = (rng.random((m, n)) < 0.4).astype(np.uint8)
        u = SolutionVector(random_point(rng, n))
        expected = []
        for j in range(m):
            c = cut_search(u, tuple(np.flatnonzero(bits[j]).tolist()), row=j)
            if c is not None:
                expected.append(c)
        assert sweep(u, bits) == expected
        rows = sorted(rng.choice(m, size=int(rng.integers(0, m + 1)), replace=False).tolist())
        assert sweep(u, bits, rows) == [c for c in expected if c.row in rows]
