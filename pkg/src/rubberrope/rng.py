"""Counter-based random substreams.

Every raw draw is a pure function of ``(master_seed, namespace,
substream_id, lane, draw_index)``: the key is derived by chained SplitMix64
finalisation of the identifiers and draw ``i`` is the SplitMix64 output for
counter ``i + 1`` under that key.  Nothing depends on evaluation order, so
trajectories can be computed in any order or in parallel and still agree
bit for bit.

Lanes separate the ant's steps from the rope's stretches inside one
trajectory; namespaces separate the grid points of a parameter sweep.
"""

from __future__ import annotations

import numpy as np

from .errors import DomainError

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB

STEP_LANE = 0
STRETCH_LANE = 1

#: Raw draws are generated in aligned blocks of this many values.
BLOCK = 256

_U64 = np.uint64
_SHIFT_UNIFORM = 12
_UNIT = 2.0 ** -52


def mix64(z: int) -> int:
    """SplitMix64 finaliser on a Python int."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def _mix64_array(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> _U64(30))) * _U64(_M1)
    z = (z ^ (z >> _U64(27))) * _U64(_M2)
    return z ^ (z >> _U64(31))


def check_seed(master_seed: int) -> int:
    if isinstance(master_seed, bool) or not isinstance(master_seed, (int, np.integer)):
        raise DomainError(f"master seed must be an integer, got {master_seed!r}")
    master_seed = int(master_seed)
    if not 0 <= master_seed <= MASK64:
        raise DomainError(f"master seed must fit in 64 unsigned bits, got {master_seed}")
    return master_seed


def substream_key(master_seed: int, substream_id: int, lane: int = 0, namespace: int = 0) -> int:
    master_seed = check_seed(master_seed)
    if substream_id < 0 or lane < 0 or namespace < 0:
        raise DomainError("substream id, lane and namespace must be nonnegative")
    k = mix64(master_seed)
    k = mix64(k ^ ((namespace + 1) * GOLDEN))
    k = mix64(k ^ ((substream_id + 1) * _M1))
    k = mix64(k ^ ((lane + 1) * _M2))
    return k


def raw_draws(key: int, start: int, count: int) -> np.ndarray:
    """Raw 64-bit draws ``start .. start+count-1`` for ``key`` as uint64."""
    idx = np.arange(start + 1, start + count + 1, dtype=_U64)
    with np.errstate(over="ignore"):
        z = _U64(key) + idx * _U64(GOLDEN)
        return _mix64_array(z)


def to_unit(raw: np.ndarray) -> np.ndarray:
    """Map raw draws to the open interval (0, 1).

    The top 52 bits give ``k`` and the result is ``(k + 0.5) * 2**-52``,
    which is exact in double precision and never equals 0 or 1.
    """
    k = (raw >> _U64(_SHIFT_UNIFORM)).astype(np.float64)
    return (k + 0.5) * _UNIT


def uniforms(key: int, start: int, count: int) -> np.ndarray:
    return to_unit(raw_draws(key, start, count))


class Stream:
    """Sequential cursor over one substream lane.

    Values are produced from aligned blocks, so the ``i``-th uniform is the
    same regardless of how the cursor was advanced to reach it.
    """

    __slots__ = ("key", "position", "_block_start", "_block")

    def __init__(self, master_seed: int, substream_id: int = 0, lane: int = 0,
                 namespace: int = 0, position: int = 0):
        self.key = substream_key(master_seed, substream_id, lane, namespace)
        self.position = position
        self._block_start = -2 * BLOCK
        self._block: list[float] = []

    @classmethod
    def from_key(cls, key: int, position: int = 0) -> "Stream":
        self = cls.__new__(cls)
        self.key = key
        self.position = position
        self._block_start = -2 * BLOCK
        self._block = []
        return self

    def _load(self, index: int) -> None:
        start = index - index % BLOCK
        self._block = uniforms(self.key, start, BLOCK).tolist()
        self._block_start = start

    def uniform_at(self, index: int) -> float:
        if not self._block_start <= index < self._block_start + BLOCK:
            self._load(index)
        return self._block[index - self._block_start]

    def next_uniform(self) -> float:
        u = self.uniform_at(self.position)
        self.position += 1
        return u

    def next_uniforms(self, n: int) -> list[float]:
        """The next ``n`` uniforms as Python floats (bulk path, same values)."""
        start = self.position
        first = start - start % BLOCK
        stop = start + n
        last = -(-stop // BLOCK) * BLOCK
        values = uniforms(self.key, first, last - first).tolist()[start - first:stop - first]
        self.position = stop
        return values
