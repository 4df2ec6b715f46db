"""Bit-accurate simulation and accuracy analysis of stochastic-computing
mux-based weighted adders."""

from .bitstream import (
    Bitstream,
    SnFormat,
    SnValue,
    estimate_value,
    quantize_to_probability,
    scc,
    threshold_to_value,
)
from .rns import RnsSpec, RnsState, complement_output, rns_sequence
from .sngen import InputChannel, PccKind, QuantizationWarning, generate_inputs, make_channels
from .muxtree import (
    BiasedSelectorTreeSpec,
    HardwiredTreeSpec,
    QuantizedWeights,
    biased_leaf_path_products,
    build_biased_selector_tree,
    build_hardwired_tree,
    dump_tree,
    precise_sampling_counts,
    quantize_weights,
    select_leaf_noisy,
    select_leaf_precise,
)
from .adders import (
    AdderDesign,
    SimulationReport,
    make_design,
    run_adder,
    run_apc,
    structural_report,
    target_value,
)
from .analysis import (
    AccuracyStats,
    ModelConfig,
    VarianceReport,
    accuracy_stats,
    closed_form_variance,
    decompose_variance,
    expected_closed_form,
    monte_carlo_variance,
)
from .filterapp import (
    FilterSpec,
    Signal,
    filter_rmse_vs_length,
    make_lowpass,
    make_noisy_signal,
    normalize_signal,
    pulse_train_signal,
    reference_fir,
    stochastic_fir,
)

__all__ = [name for name in dir() if not name.startswith("_")]
