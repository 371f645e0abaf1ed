"""Exact small-horizon laws via dynamic programming over occupation profiles.

Both exact oracles in this package reduce to the same computation: a
walk on Z takes i.i.d. integer steps, certain steps mark a site, and the
quantity of interest is a sum over sites of (i.i.d. site value) times
(mark count at the site).  Conditionally on the path, that sum only
depends on the multiset of positive mark counts, so paths can be merged
by (position, mark profile) instead of enumerating all step sequences.
The state space stays far below |support|^n, which is what makes
horizons around 12-14 tractable.

Probabilities are float64 throughout; the DP performs only additions
and multiplications of nonnegative numbers, so the total mass stays
within a few ulp of 1.
"""

from __future__ import annotations

from collections import defaultdict
from functools import lru_cache


def profile_states(steps: tuple[tuple[int, float], ...], n: int,
                   mark_moves: bool) -> dict:
    """Distribution of (position, profile) after n steps.

    steps        -- ((delta, probability), ...) of one walk step
    mark_moves   -- True marks the arrival site of every step; False
                    marks only holds (delta == 0), which is the lazy
                    walk whose holds carry the horizontal displacement

    The profile is a tuple of (site, count) pairs sorted by site, with
    counts > 0 only.
    """
    states: dict = {(0, ()): 1.0}
    for _ in range(n):
        nxt: dict = defaultdict(float)
        for (pos, prof), w in states.items():
            for delta, q in steps:
                pos2 = pos + delta
                if mark_moves or delta == 0:
                    prof2 = _bump(prof, pos2)
                else:
                    prof2 = prof
                nxt[(pos2, prof2)] += w * q
        states = dict(nxt)
    return states


def _bump(prof: tuple, site: int) -> tuple:
    out = []
    placed = False
    for s, c in prof:
        if s == site:
            out.append((s, c + 1))
            placed = True
        else:
            out.append((s, c))
    if not placed:
        out.append((site, 1))
        out.sort()
    return tuple(out)


def value_distribution(counts: tuple[int, ...],
                       site_values: tuple[tuple[int, float], ...]) -> dict:
    """Law of sum over sites of (value at site) * count, values i.i.d.

    counts must be sorted so equal multisets share a cache entry.
    """
    return _value_distribution_cached(counts, site_values)


@lru_cache(maxsize=200_000)
def _value_distribution_cached(counts, site_values):
    dist = {0: 1.0}
    for c in counts:
        nxt: dict = defaultdict(float)
        for total, w in dist.items():
            for v, q in site_values:
                nxt[total + v * c] += w * q
        dist = dict(nxt)
    return dist


def marked_sum_law(steps, n: int, mark_moves: bool,
                   site_values) -> dict:
    """Joint law of (marked sum, final position) after n steps.

    Returns {(value, position): probability}.
    """
    steps = tuple(steps)
    site_values = tuple(site_values)
    out: dict = defaultdict(float)
    for (pos, prof), w in profile_states(steps, n, mark_moves).items():
        counts = tuple(sorted(c for _, c in prof))
        for val, q in value_distribution(counts, site_values).items():
            out[(val, pos)] += w * q
    return dict(out)
