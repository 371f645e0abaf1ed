"""The profile DP against plain brute-force enumeration on tiny horizons."""

import itertools
from collections import defaultdict

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rangelab.enumeration import marked_sum_law, profile_states, value_distribution


def brute_marked_sum_law(steps, n, mark_moves, site_values):
    """Enumerate every step sequence and every site-value assignment."""
    out = defaultdict(float)
    for seq in itertools.product(steps, repeat=n):
        w = 1.0
        pos = 0
        marks = defaultdict(int)
        for delta, q in seq:
            w *= q
            pos += delta
            if mark_moves or delta == 0:
                marks[pos] += 1
        sites = sorted(marks)
        for assign in itertools.product(site_values, repeat=len(sites)):
            total = sum(v * marks[s] for s, (v, _) in zip(sites, assign))
            wa = w
            for _, q in assign:
                wa *= q
            out[(total, pos)] += wa
    return dict(out)


LAZY = ((0, 0.5), (1, 0.25), (-1, 0.25))
SIMPLE = ((1, 0.5), (-1, 0.5))
SIGNS = ((-1, 0.5), (1, 0.5))
TERN = ((-1, 0.25), (0, 0.5), (1, 0.25))


@pytest.mark.parametrize("steps,mark_moves,values,n", [
    (LAZY, False, SIGNS, 4),
    (LAZY, False, SIGNS, 5),
    (SIMPLE, True, SIGNS, 5),
    (SIMPLE, True, TERN, 4),
    (LAZY, True, TERN, 3),
])
def test_dp_agrees_with_brute_force(steps, mark_moves, values, n):
    got = marked_sum_law(steps, n, mark_moves, values)
    want = brute_marked_sum_law(steps, n, mark_moves, values)
    assert set(got) == set(want)
    for key in want:
        assert got[key] == pytest.approx(want[key], abs=1e-12)


def test_zero_steps_is_a_point_mass():
    assert profile_states(LAZY, 0, False) == {(0, ()): 1.0}
    assert marked_sum_law(SIMPLE, 0, True, SIGNS) == {(0, 0): 1.0}


@given(st.integers(min_value=1, max_value=7), st.booleans())
@settings(max_examples=20, deadline=None)
def test_profile_mass_and_structure(n, mark_moves):
    states = profile_states(LAZY, n, mark_moves)
    assert sum(states.values()) == pytest.approx(1.0)
    for (pos, prof), w in states.items():
        assert w > 0
        sites = [s for s, _ in prof]
        assert sites == sorted(sites)
        assert all(c >= 1 for _, c in prof)
        if mark_moves:
            # every step marks its arrival site
            assert sum(c for _, c in prof) == n


def test_value_distribution_convolves():
    # two sites with counts 1 and 2 under fair signs: sum in {-3,-1,1,3}
    dist = value_distribution((1, 2), SIGNS)
    assert dist == pytest.approx({-3: 0.25, -1: 0.25, 1: 0.25, 3: 0.25})
    assert value_distribution((), SIGNS) == {0: 1.0}
