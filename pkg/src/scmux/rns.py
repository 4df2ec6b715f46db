"""Deterministic number sources emitting one n-bit word per clock cycle.

Kinds:
  lfsr                   maximal-length Fibonacci LFSR; never emits 0,
                         period 2^n - 1
  lfsr_all0              the same LFSR made non-linear by inserting the all-0
                         word once per period; period 2^n
  counter                plain modulo-2^n up counter
  sobol_reversed_counter first low-discrepancy (van der Corput) sequence,
                         the bit-reversed state of a counter
  permutation            a seed-determined uniform random permutation of
                         [0, 2^n - 1], repeated each period
  bernoulli              i.i.d. uniform words from a seeded 64-bit generator

All full-period kinds emit every word in [0, 2^n - 1] exactly once per
period. The seed selects the starting phase for the cyclic kinds and the
permutation/bit-generator state for the random kinds.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

# One primitive polynomial per width; taps are polynomial exponents.
# Maximal period for each entry is asserted by the test suite.
LFSR_TAPS = {
    3: (3, 2),
    4: (4, 3),
    5: (5, 3),
    6: (6, 5),
    7: (7, 6),
    8: (8, 6, 5, 4),
    9: (9, 5),
    10: (10, 7),
    11: (11, 9),
    12: (12, 6, 4, 1),
    13: (13, 4, 3, 1),
    14: (14, 5, 3, 1),
    15: (15, 14),
    16: (16, 15, 13, 4),
}

KINDS = (
    "lfsr",
    "lfsr_all0",
    "counter",
    "sobol_reversed_counter",
    "permutation",
    "bernoulli",
)
FULL_PERIOD_KINDS = ("lfsr_all0", "counter", "sobol_reversed_counter", "permutation")


@dataclass(frozen=True)
class RnsSpec:
    kind: str
    width: int
    seed: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown RNS kind {self.kind!r}; expected one of {KINDS}")
        if not 3 <= self.width <= 16:
            raise ValueError("RNS width must be in [3, 16]")

    @property
    def period(self) -> int:
        """Words per period (bernoulli has no period; 0 is returned)."""
        if self.kind == "bernoulli":
            return 0
        if self.kind == "lfsr":
            return (1 << self.width) - 1
        return 1 << self.width


@lru_cache(maxsize=None)
def _lfsr_cycle(width: int) -> np.ndarray:
    """Full state cycle of the width-n LFSR starting from state 1."""
    taps = LFSR_TAPS[width]
    mask = 0
    for t in taps:
        mask |= 1 << (t - 1)
    full = (1 << width) - 1
    out = np.empty(full, dtype=np.int64)
    s = 1
    for i in range(full):
        out[i] = s
        fb = bin(s & mask).count("1") & 1
        s = ((s << 1) | fb) & full
    out.setflags(write=False)
    return out


@lru_cache(maxsize=None)
def _lfsr_position(width: int) -> np.ndarray:
    cycle = _lfsr_cycle(width)
    pos = np.zeros(1 << width, dtype=np.int64)
    pos[cycle] = np.arange(cycle.size)
    pos.setflags(write=False)
    return pos


@lru_cache(maxsize=None)
def _bit_reverse_table(width: int) -> np.ndarray:
    vals = np.arange(1 << width, dtype=np.int64)
    rev = np.zeros_like(vals)
    for _ in range(width):
        rev = (rev << 1) | (vals & 1)
        vals >>= 1
    rev.setflags(write=False)
    return rev


def _one_period(spec: RnsSpec) -> np.ndarray:
    n = spec.width
    size = 1 << n
    if spec.kind == "counter":
        start = spec.seed % size
        return (start + np.arange(size, dtype=np.int64)) % size
    if spec.kind == "sobol_reversed_counter":
        start = spec.seed % size
        idx = (start + np.arange(size, dtype=np.int64)) % size
        return _bit_reverse_table(n)[idx]
    if spec.kind == "permutation":
        return np.random.default_rng(spec.seed).permutation(size).astype(np.int64)
    if spec.kind in ("lfsr", "lfsr_all0"):
        cycle = _lfsr_cycle(n)
        state0 = spec.seed % size
        if state0 == 0:
            state0 = 1
        i = int(_lfsr_position(n)[state0])
        rolled = np.concatenate((cycle[i:], cycle[:i]))
        if spec.kind == "lfsr":
            return rolled
        # the all-0 word goes after the state whose successor is the seed,
        # i.e. at the end of one seed-rooted period
        return np.concatenate((rolled, np.zeros(1, dtype=np.int64)))
    raise ValueError(f"{spec.kind} has no period")


def rns_sequence(spec: RnsSpec, count: int) -> np.ndarray:
    """First `count` output words of the source, as an int64 array."""
    if count < 0:
        raise ValueError("count must be >= 0")
    if spec.kind == "bernoulli":
        rng = np.random.default_rng(spec.seed)
        return rng.integers(0, 1 << spec.width, size=count, dtype=np.int64)
    period = _one_period(spec)
    if count <= period.size:
        return period[:count].copy()
    reps = -(-count // period.size)
    return np.tile(period, reps)[:count]


class RnsState:
    """Running state of one number source, owned by a single simulation."""

    def __init__(self, spec: RnsSpec):
        self.spec = spec
        self.t = 0
        if spec.kind == "bernoulli":
            self._rng = np.random.default_rng(spec.seed)
            self._period = None
        else:
            self._rng = None
            self._period = _one_period(spec)

    @property
    def register(self) -> int:
        """The word that the next clock cycle will emit (cyclic kinds only)."""
        if self._period is None:
            raise ValueError("bernoulli source has no inspectable register")
        return int(self._period[self.t % self._period.size])

    def next_word(self) -> int:
        """Emit the current word and advance one clock cycle."""
        if self._period is None:
            w = int(self._rng.integers(0, 1 << self.spec.width))
        else:
            w = int(self._period[self.t % self._period.size])
        self.t += 1
        return w

    def take(self, count: int) -> np.ndarray:
        """Emit the next `count` words as an array (same stream as next_word)."""
        if self._period is None:
            out = self._rng.integers(0, 1 << self.spec.width, size=count, dtype=np.int64)
        else:
            idx = (self.t + np.arange(count, dtype=np.int64)) % self._period.size
            out = self._period[idx]
        self.t += count
        return out


def complement_output(word, n: int):
    """Bitwise complement within n bits: 2^n - 1 - word. Accepts arrays."""
    return (1 << n) - 1 - word
