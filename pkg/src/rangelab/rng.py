"""Deterministic randomness shared by every simulator in the package.

All random quantities are pure functions of a 64-bit master seed.  Bulk
draws (path increments, stable variates) come from numpy's counter-based
Philox generator keyed by ``(master_seed, stream_id)``, so any number of
streams can be split off without coordination and trials may run in any
order, on any worker, with identical results.

Individual lattice sites (environment rows, scenery cells) are hashed
directly with a splitmix64 finalizer instead of consuming generator
state.  That makes site values lazy: a site can be evaluated at any
time, in any order, scalar or vectorized, and always yields the same
value for the same ``(seed, site)`` pair.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_M64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_INIT = 0x243F6A8885A308D3  # arbitrary nonzero sponge state


def _finalize(z: int) -> int:
    # scalar splitmix64 finalizer
    z = (z + _GOLDEN) & _M64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _M64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _M64
    return z ^ (z >> 31)


def mix64(*words: int) -> int:
    """Hash any tuple of integers down to one 64-bit word.

    Used to derive sub-seeds (environment keys, per-size seeds) from the
    master seed.  Order-sensitive, so mix64(a, b) != mix64(b, a) in
    general.  Negative inputs are folded in by their two's complement.
    """
    state = _INIT
    for w in words:
        state = _finalize(state ^ (w & _M64))
    return state


def _finalize_vec(z: np.ndarray) -> np.ndarray:
    z = z + np.uint64(_GOLDEN)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


def site_hash(seed: int, sites, counter: int = 0) -> np.ndarray:
    """Vectorized ``mix64(seed, counter, site)`` over an integer array.

    Bit-identical to the scalar route: the scalar prefix is absorbed
    first, then each site gets one more finalizer round.
    """
    prefix = np.uint64(mix64(seed, counter))
    z = np.asarray(sites, dtype=np.int64).astype(np.uint64) ^ prefix
    return _finalize_vec(z)


def site_uniform(seed: int, sites, counter: int = 0) -> np.ndarray:
    """Uniform [0, 1) variates attached to lattice sites, 53-bit mantissa."""
    return (site_hash(seed, sites, counter) >> np.uint64(11)) * 2.0**-53


def keyed_uniform(keys, sites) -> np.ndarray:
    """Uniforms from (key, site) pairs; keys broadcast against sites.

    ``site_uniform(seed, sites, c)`` equals ``keyed_uniform(mix64(seed, c),
    sites)``; the split form lets many independent fields (one key per
    trial row) be evaluated in a single vectorized pass.
    """
    z = np.asarray(sites, dtype=np.int64).astype(np.uint64) \
        ^ np.asarray(keys, dtype=np.uint64)
    return (_finalize_vec(z) >> np.uint64(11)) * 2.0**-53


def site_sign(seed: int, sites, counter: int = 0) -> np.ndarray:
    """Plus/minus one variates attached to lattice sites (top hash bit)."""
    h = site_hash(seed, sites, counter)
    return np.where((h >> np.uint64(63)).astype(bool), 1, -1).astype(np.int64)


@dataclass(frozen=True)
class RngStream:
    """One independent random stream, identified by (master_seed, stream_id).

    The pair is the Philox key, so streams with distinct ids never share
    state and need no central bookkeeping.  ``generator()`` returns a
    fresh numpy Generator positioned at the start of the stream.
    """

    master_seed: int
    stream_id: int

    def generator(self) -> np.random.Generator:
        key = np.array([self.master_seed & _M64, self.stream_id & _M64],
                       dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))

    def child(self, tag: int) -> "RngStream":
        """Split off a sub-stream, e.g. one per independent noise source."""
        return RngStream(mix64(self.master_seed, self.stream_id, tag), 0)


def derive_stream(master_seed: int, stream_id: int) -> RngStream:
    """Stream for trial ``stream_id`` of the experiment seeded by master_seed."""
    return RngStream(master_seed, stream_id)


def as_generator(rng) -> np.random.Generator:
    """Accept either an RngStream or an already-built numpy Generator."""
    if isinstance(rng, RngStream):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    raise TypeError(f"expected RngStream or numpy Generator, got {type(rng)!r}")
