"""Assembled weighted-adder designs and their cycle-accurate simulation.

Six named designs are provided. The feature matrix (tree style, data PCC,
select source, select PCCs, full correlation, precise sampling):

    cemux            hardwired  comparators  counter  -     yes  yes
    cemux_wbg        hardwired  WBGs         counter  -     no   yes
    cemux_biased     biased     comparators  LFSRs    WBGs  yes  no
    basic_hardwired  hardwired  WBGs         LFSRs    -     no   no
    basic_biased     biased     WBGs         LFSRs    WBGs  no   no
    apc              XNOR array + accumulative parallel counter

All designs share one low-discrepancy source for the data inputs. Ablation
variants of cemux (suffixes _nofc, _nops, _nofc_nops, _lfsr) remove full
correlation, precise sampling, or swap the data source for an LFSR.
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .bitstream import (
    Bitstream,
    SnFormat,
    SnValue,
    quantize_to_probability,
    threshold_to_value,
)
from .muxtree import (
    BiasedSelectorTreeSpec,
    HardwiredTreeSpec,
    QuantizedWeights,
    build_biased_selector_tree,
    build_hardwired_tree,
    quantize_weights,
)
from .rns import RnsSpec, rns_sequence
from .sngen import PccKind, input_bit_matrix, make_channels, pcc_bits

DESIGN_NAMES = (
    "cemux",
    "cemux_wbg",
    "cemux_biased",
    "basic_hardwired",
    "basic_biased",
    "apc",
)
ABLATION_NAMES = ("cemux_nofc", "cemux_nops", "cemux_nofc_nops", "cemux_lfsr")


@dataclass(frozen=True)
class AdderDesign:
    name: str
    n: int
    weights: tuple[float, ...]
    tree_type: str  # hardwired | biased | apc
    data_pcc: PccKind
    data_rns_kind: str
    select_rns_kind: str | None
    select_pcc: PccKind | None
    full_correlation: bool
    precise_sampling: bool


_PRESETS = {
    "cemux": dict(
        tree_type="hardwired",
        data_pcc=PccKind.COMPARATOR,
        data_rns_kind="sobol_reversed_counter",
        select_rns_kind="counter",
        select_pcc=None,
        full_correlation=True,
        precise_sampling=True,
    ),
    "cemux_wbg": dict(
        tree_type="hardwired",
        data_pcc=PccKind.WBG,
        data_rns_kind="sobol_reversed_counter",
        select_rns_kind="counter",
        select_pcc=None,
        full_correlation=False,
        precise_sampling=True,
    ),
    "cemux_biased": dict(
        tree_type="biased",
        data_pcc=PccKind.COMPARATOR,
        data_rns_kind="sobol_reversed_counter",
        select_rns_kind="lfsr",
        select_pcc=PccKind.WBG,
        full_correlation=True,
        precise_sampling=False,
    ),
    "basic_hardwired": dict(
        tree_type="hardwired",
        data_pcc=PccKind.WBG,
        data_rns_kind="sobol_reversed_counter",
        select_rns_kind="lfsr",
        select_pcc=None,
        full_correlation=False,
        precise_sampling=False,
    ),
    "basic_biased": dict(
        tree_type="biased",
        data_pcc=PccKind.WBG,
        data_rns_kind="sobol_reversed_counter",
        select_rns_kind="lfsr",
        select_pcc=PccKind.WBG,
        full_correlation=False,
        precise_sampling=False,
    ),
    "apc": dict(
        tree_type="apc",
        data_pcc=PccKind.COMPARATOR,
        data_rns_kind="sobol_reversed_counter",
        select_rns_kind=None,
        select_pcc=None,
        full_correlation=False,
        precise_sampling=False,
    ),
    # cemux ablations
    "cemux_nofc": dict(
        tree_type="hardwired",
        data_pcc=PccKind.COMPARATOR,
        data_rns_kind="sobol_reversed_counter",
        select_rns_kind="counter",
        select_pcc=None,
        full_correlation=False,
        precise_sampling=True,
    ),
    "cemux_nops": dict(
        tree_type="hardwired",
        data_pcc=PccKind.COMPARATOR,
        data_rns_kind="sobol_reversed_counter",
        select_rns_kind="lfsr",
        select_pcc=None,
        full_correlation=True,
        precise_sampling=False,
    ),
    "cemux_nofc_nops": dict(
        tree_type="hardwired",
        data_pcc=PccKind.COMPARATOR,
        data_rns_kind="sobol_reversed_counter",
        select_rns_kind="lfsr",
        select_pcc=None,
        full_correlation=False,
        precise_sampling=False,
    ),
    "cemux_lfsr": dict(
        tree_type="hardwired",
        data_pcc=PccKind.COMPARATOR,
        data_rns_kind="lfsr",
        select_rns_kind="counter",
        select_pcc=None,
        full_correlation=True,
        precise_sampling=True,
    ),
}


def normalize_design_name(name: str) -> str:
    key = name.lower().replace("-", "_")
    if key not in _PRESETS:
        raise ValueError(
            f"unknown design {name!r}; known: {', '.join(sorted(_PRESETS))}"
        )
    return key


def make_design(name: str, weights, n: int) -> AdderDesign:
    """Instantiate a named design at precision n with the given weights."""
    key = normalize_design_name(name)
    if not 3 <= n <= 16:
        raise ValueError("precision n must be in [3, 16]")
    w = tuple(float(x) for x in weights)
    if not w or all(x == 0.0 for x in w):
        raise ValueError("zero weight mass")
    return AdderDesign(name=key, n=n, weights=w, **_PRESETS[key])


@dataclass(frozen=True)
class SimulationReport:
    """One simulation run: output stream, estimate, target and error."""

    design: str
    estimate: float
    target: float
    error: float
    output: Bitstream | None  # None for the APC, whose output is multi-bit
    sampling_counts: np.ndarray | None
    quantized: QuantizedWeights | None


def _seed_ints(master_seed: int, count: int) -> list[int]:
    """Stable expansion of one 64-bit master seed into per-source seeds."""
    children = np.random.SeedSequence(master_seed).spawn(count)
    return [int(c.generate_state(2, np.uint64)[0]) for c in children]


def target_value(weights, values, n: int, height: int | None = None) -> float:
    """Weighted mean of the inputs with weights and values quantized to the
    circuit precision: sum_i sign_i * (q_i / 2^m) * quantized(value_i)."""
    w = tuple(float(x) for x in weights)
    if len(w) != len(values):
        raise ValueError("weights and values must have equal length")
    q = quantize_weights(w, height if height is not None else n)
    chans = make_channels(values, w, n, PccKind.COMPARATOR)
    return _target_from_thresholds(
        q, [c.threshold for c in chans], n
    )


def _target_from_thresholds(q: QuantizedWeights, thresholds, n: int) -> float:
    # every product is a dyadic rational representable exactly in float64
    terms = [
        s * (num / q.denominator) * threshold_to_value(b, n, SnFormat.BIPOLAR)
        for num, s, b in zip(q.numerators, q.signs, thresholds)
    ]
    return math.fsum(terms)


def _validate_values(values, weights):
    if len(values) != len(weights):
        raise ValueError("values and weights must have equal length")
    for v in values:
        if not -1.0 <= float(v) <= 1.0:
            raise ValueError(f"input value {v} outside [-1, 1]")


@lru_cache(maxsize=128)
def _hardwired_tree_cached(numerators: tuple[int, ...], h: int) -> HardwiredTreeSpec:
    q = QuantizedWeights(numerators, h, (1,) * len(numerators), (0.0,) * len(numerators))
    return build_hardwired_tree(q)


@lru_cache(maxsize=128)
def _biased_tree_cached(
    numerators: tuple[int, ...], pcc: PccKind, rns_kind: str, n: int
) -> BiasedSelectorTreeSpec:
    q = QuantizedWeights(numerators, n, (1,) * len(numerators), (0.0,) * len(numerators))
    return build_biased_selector_tree(q, pcc, rns_kind, n)


def _owner_sequence(design: AdderDesign, q, n, big_n, select_seeds) -> np.ndarray:
    """Input index sampled at each clock cycle, per the design's select wiring."""
    if design.tree_type == "hardwired":
        tree = _hardwired_tree_cached(q.numerators, q.height)
        h = tree.height
        if design.precise_sampling:
            # the counter starts from its reset state so its dyadic blocks stay
            # aligned with the low-discrepancy data source
            words = np.arange(big_n, dtype=np.int64) % (1 << h)
        else:
            # one independent LFSR per level; its word's MSB is the select bit
            words = np.zeros(big_n, dtype=np.int64)
            for lvl in range(1, h + 1):
                seq = rns_sequence(
                    RnsSpec(design.select_rns_kind, n, select_seeds[lvl - 1]), big_n
                )
                bits = seq >> (n - 1)
                words |= bits << (h - lvl)
        return tree.owner[words]

    tree = _biased_tree_cached(q.numerators, design.select_pcc, design.select_rns_kind, n)
    if tree.root < 0:
        return np.full(big_n, ~tree.root, dtype=np.int64)
    levels = tree.num_levels
    node_bits = np.empty((tree.mux_count, big_n), dtype=np.uint8)
    level_words = [
        rns_sequence(RnsSpec(design.select_rns_kind, n, select_seeds[lvl]), big_n)
        for lvl in range(levels)
    ]
    for k in range(tree.mux_count):
        node_bits[k] = pcc_bits(
            tree.select_pcc, level_words[int(tree.node_level[k]) - 1],
            int(tree.thresholds[k]), n,
        )
    cur = np.full(big_n, tree.root, dtype=np.int64)
    cols = np.arange(big_n)
    while True:
        internal = cur >= 0
        if not internal.any():
            break
        idx = np.where(internal)[0]
        refs = cur[idx]
        b = node_bits[refs, cols[idx]]
        # select bit 1 routes toward child0, whose mass fraction is p_node
        cur[idx] = np.where(b == 1, tree.child0[refs], tree.child1[refs])
    return ~cur


def run_adder(design: AdderDesign, values, big_n: int, seed: int) -> SimulationReport:
    """Cycle-accurate simulation of one adder run.

    Generates the data streams from the shared source, routes them through
    the design's tree (or the XNOR/parallel-counter datapath for the APC),
    and accumulates the output with an up-down counter.
    """
    if design.tree_type == "apc":
        return run_apc(design.weights, values, big_n, seed)
    n = design.n
    if big_n != (1 << n):
        raise ValueError(f"stream length must be 2^n = {1 << n} for design {design.name}")
    _validate_values(values, design.weights)

    q = quantize_weights(design.weights, n)
    # fixed-size expansion keeps seed assignment stable across designs
    seeds = _seed_ints(seed, 25)
    data_seed, select_seeds = seeds[0], seeds[1:]
    if design.data_rns_kind in ("sobol_reversed_counter", "counter"):
        # deterministic low-discrepancy sources run from their reset state,
        # as in hardware; seeds only drive the pseudo-random source kinds
        data_seed = 0

    words = rns_sequence(RnsSpec(design.data_rns_kind, n, data_seed), big_n)
    channels = make_channels(
        values, design.weights, n, design.data_pcc,
        correlated_wiring=design.full_correlation,
    )
    _, y = input_bit_matrix(channels, words, design.data_pcc, n)

    owners = _owner_sequence(design, q, n, big_n, select_seeds)
    z = y[owners, np.arange(big_n)]
    counts = np.bincount(owners, minlength=len(channels))

    ones = int(z.sum())
    estimate = min(1.0, max(-1.0, 2.0 * ones / big_n - 1.0))
    target = _target_from_thresholds(q, [c.threshold for c in channels], n)
    return SimulationReport(
        design=design.name,
        estimate=estimate,
        target=target,
        error=estimate - target,
        output=Bitstream(z),
        sampling_counts=counts,
        quantized=q,
    )


def run_apc(weights, values, big_n: int, seed: int = 0) -> SimulationReport:
    """Accumulative-parallel-counter adder with two shared sources.

    Data SNs share one low-discrepancy source and coefficient SNs (values
    |w_i|, signs folded into the XNOR array) share a second one; the two
    sources are the bit-reversed counter and the plain counter, whose paired
    outputs are jointly equidistributed. The parallel counter adds all M
    product bits each cycle; the accumulator's mean is rescaled so the report
    targets the same normalized weighted mean as the mux designs.
    """
    n = int(round(math.log2(big_n)))
    if (1 << n) != big_n or not 3 <= n <= 16:
        raise ValueError("stream length must be a power of two with 3 <= log2(N) <= 16")
    w = tuple(float(x) for x in weights)
    _validate_values(values, w)
    m = len(w)
    if any(abs(x) > 1.0 for x in w):
        raise ValueError("APC coefficient values |w_i| must lie in [0, 1]")

    # both sources run from canonical phase; the design is fully deterministic
    data_words = rns_sequence(RnsSpec("sobol_reversed_counter", n, 0), big_n)
    coeff_words = rns_sequence(RnsSpec("counter", n, 0), big_n)

    bx = np.array(
        [quantize_to_probability(SnValue(float(v), SnFormat.BIPOLAR), n) for v in values],
        dtype=np.int64,
    )
    bw = np.array(
        [quantize_to_probability(SnValue(abs(x), SnFormat.BIPOLAR), n) for x in w],
        dtype=np.int64,
    )
    negs = np.array([x < 0 for x in w], dtype=np.uint8)

    x_bits = (data_words[None, :] < bx[:, None]).astype(np.uint8)
    w_bits = (coeff_words[None, :] < bw[:, None]).astype(np.uint8)
    prod = (1 - (x_bits ^ w_bits)) ^ negs[:, None]

    per_cycle = prod.sum(axis=0)  # parallel counter output
    acc = int(per_cycle.sum())
    raw = 2.0 * acc / (big_n * m) - 1.0

    w_hat = np.array([threshold_to_value(int(b), n, SnFormat.BIPOLAR) for b in bw])
    denom = math.fsum(w_hat)
    if denom <= 0.0:
        raise ValueError("zero weight mass after quantization")
    estimate = min(1.0, max(-1.0, raw * m / denom))

    mu_hat = np.array([threshold_to_value(int(b), n, SnFormat.BIPOLAR) for b in bx])
    signs = np.where(negs == 1, -1.0, 1.0)
    target = math.fsum(signs * w_hat * mu_hat) / denom
    return SimulationReport(
        design="apc",
        estimate=estimate,
        target=target,
        error=estimate - target,
        output=None,
        sampling_counts=None,
        quantized=None,
    )


def structural_report(design: AdderDesign) -> dict[str, int]:
    """Exact component counts for a constructed design.

    inverters = the n source-complement inverters (present when full
    correlation is wired and some weight is negative) plus one sign inverter
    per negative-weight input. Inputs whose quantized weight is zero are
    dropped from the datapath. counter bits cover the select counter
    (precise-sampling designs) and the output up-down counter.
    """
    n = design.n
    q = quantize_weights(design.weights, n)
    active = sum(1 for num in q.numerators if num > 0)
    negatives = sum(
        1 for num, w in zip(q.numerators, design.weights) if num > 0 and w < 0
    )
    counts = {
        "muxes": 0,
        "comparators": 0,
        "wbgs": 0,
        "inverters": 0,
        "xnors": 0,
        "rns_instances": 0,
        "select_counter_bits": 0,
        "output_counter_bits": n,
        "parallel_counter_bits": 0,
    }
    if design.tree_type == "apc":
        m = len(design.weights)
        counts["comparators"] = 2 * m
        counts["xnors"] = m
        counts["rns_instances"] = 2
        counts["parallel_counter_bits"] = math.ceil(math.log2(m + 1))
        return counts

    data_key = "comparators" if design.data_pcc is PccKind.COMPARATOR else "wbgs"
    counts[data_key] = active
    counts["inverters"] = negatives + (
        n if design.full_correlation and negatives else 0
    )
    counts["rns_instances"] = 1  # shared data source
    if design.tree_type == "hardwired":
        tree = _hardwired_tree_cached(q.numerators, q.height)
        counts["muxes"] = tree.mux_count
        if design.precise_sampling:
            counts["select_counter_bits"] = tree.height
        else:
            counts["rns_instances"] += tree.height  # one LFSR per level
    else:
        tree = _biased_tree_cached(q.numerators, design.select_pcc, design.select_rns_kind, n)
        counts["muxes"] = tree.mux_count
        counts["rns_instances"] += tree.num_levels
        key = "comparators" if design.select_pcc is PccKind.COMPARATOR else "wbgs"
        counts[key] += tree.mux_count  # one select PCC per mux
    return counts
