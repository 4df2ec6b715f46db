"""Stochastic number (SN) bit-streams, value estimators, and cross correlation.

A stochastic number is a fixed-length stream of bits whose value is encoded
by the frequency of 1s: unipolar value = P(bit = 1), bipolar value =
2 P(bit = 1) - 1.
"""

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

import numpy as np


class SnFormat(Enum):
    UNIPOLAR = "unipolar"
    BIPOLAR = "bipolar"


@dataclass(frozen=True)
class SnValue:
    """A stochastic number's numeric value together with its encoding format."""

    value: float
    format: SnFormat

    def __post_init__(self):
        lo = 0.0 if self.format is SnFormat.UNIPOLAR else -1.0
        if not lo <= self.value <= 1.0:
            raise ValueError(f"{self.format.value} value {self.value} outside [{lo}, 1]")

    def to_probability(self) -> Fraction:
        """Exact unipolar (probability-domain) equivalent of this value."""
        p = Fraction(self.value)
        if self.format is SnFormat.BIPOLAR:
            p = (p + 1) / 2
        return p


class Bitstream:
    """An immutable sequence of bits, one bit per clock cycle.

    Bits are stored packed, eight cycles per byte, in clock-cycle order.
    Simulation streams always have power-of-two length; arbitrary lengths are
    accepted so that the correlation metric can be applied to hand-written
    streams.
    """

    __slots__ = ("_packed", "_n")

    def __init__(self, bits):
        arr = np.asarray(bits, dtype=np.uint8)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("bits must be a non-empty one-dimensional sequence")
        if arr.max() > 1:
            raise ValueError("bits must be 0 or 1")
        self._n = int(arr.size)
        packed = np.packbits(arr)
        packed.setflags(write=False)
        self._packed = packed

    @classmethod
    def from_string(cls, s: str) -> "Bitstream":
        return cls([int(c) for c in s])

    def __len__(self) -> int:
        return self._n

    @property
    def packed(self) -> np.ndarray:
        return self._packed

    @property
    def unpacked(self) -> np.ndarray:
        return np.unpackbits(self._packed)[: self._n]

    def count_ones(self) -> int:
        # packbits pads the final byte with 0s, so padding never adds ones
        return int(np.bitwise_count(self._packed).sum())

    def overlap_ones(self, other: "Bitstream") -> int:
        """Number of clock cycles in which both streams carry a 1."""
        if len(other) != self._n:
            raise ValueError("length mismatch")
        return int(np.bitwise_count(self._packed & other._packed).sum())

    def complement(self) -> "Bitstream":
        return Bitstream(1 - self.unpacked)

    def __eq__(self, other):
        if not isinstance(other, Bitstream):
            return NotImplemented
        return self._n == other._n and np.array_equal(self._packed, other._packed)

    def __hash__(self):
        return hash((self._n, self._packed.tobytes()))

    def __repr__(self):
        bits = "".join(map(str, self.unpacked[:32]))
        tail = "..." if self._n > 32 else ""
        return f"Bitstream({bits}{tail}, len={self._n})"


def estimate_value(stream: Bitstream, fmt: SnFormat) -> SnValue:
    """Counter-based value estimate of a stream.

    The count of 1s is exact; for power-of-two lengths the returned float is
    the exact dyadic rational count/N (bipolar: 2*count/N - 1).
    """
    ones = stream.count_ones()
    n = len(stream)
    if fmt is SnFormat.UNIPOLAR:
        return SnValue(ones / n, fmt)
    return SnValue(2.0 * ones / n - 1.0, fmt)


def scc(x: Bitstream, y: Bitstream) -> float:
    """Stochastic cross correlation between two equal-length streams.

    Measures how far the observed 1-overlap sits between the maximum and the
    minimum overlap attainable at the streams' fixed 1-densities:

        delta = p_xy - p_x p_y
        scc   = delta / (min(p_x, p_y) - p_x p_y)            if delta > 0
              = delta / (p_x p_y - max(p_x + p_y - 1, 0))    if delta < 0
              = 0                                            otherwise

    Degenerate denominators (constant streams) yield 0. Computed in exact
    rational arithmetic, so maximal/minimal overlap returns exactly +/-1.0.
    """
    if len(x) != len(y):
        raise ValueError("scc requires equal-length streams")
    n = len(x)
    px = Fraction(x.count_ones(), n)
    py = Fraction(y.count_ones(), n)
    pxy = Fraction(x.overlap_ones(y), n)
    delta = pxy - px * py
    if delta == 0:
        return 0.0
    if delta > 0:
        denom = min(px, py) - px * py
    else:
        denom = px * py - max(px + py - 1, Fraction(0))
    if denom == 0:
        return 0.0
    return float(delta / denom)


def quantize_to_probability(v: SnValue, n: int) -> int:
    """Comparator threshold B in [0, 2^n] whose stream probability is closest to v.

    Ties round half away from zero in the probability domain. B needs n+1
    bits so that probability exactly 1 is representable. Exact: the value's
    dyadic float representation is taken as-is and rounded in integer
    arithmetic.
    """
    if n < 1:
        raise ValueError("bit-width must be >= 1")
    a, b = float(v.value).as_integer_ratio()  # exact, b > 0
    if v.format is SnFormat.BIPOLAR:
        a += b  # p = (v + 1) / 2 = (a + b) / (2 b)
        b *= 2
    # floor(p * 2^n + 1/2); p >= 0, so half rounds away from zero
    return (2 * (a << n) + b) // (2 * b)


def bipolar_thresholds(values: np.ndarray, n: int) -> np.ndarray:
    """Vectorized comparator thresholds for bipolar values (bulk sweep path).

    Same rounding rule as quantize_to_probability, evaluated in float64; for
    dyadic values the two agree exactly.
    """
    v = np.asarray(values, dtype=np.float64)
    if np.any(v < -1.0) or np.any(v > 1.0):
        raise ValueError("bipolar values must lie in [-1, 1]")
    return np.floor((v + 1.0) * (1 << (n - 1)) + 0.5).astype(np.int64)


def threshold_to_value(b: int, n: int, fmt: SnFormat) -> float:
    """Exact value of the SN generated by threshold b over a full-period source."""
    if not 0 <= b <= (1 << n):
        raise ValueError(f"threshold {b} outside [0, 2^{n}]")
    if fmt is SnFormat.UNIPOLAR:
        return b / (1 << n)
    return 2.0 * b / (1 << n) - 1.0
