"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines and measured values.
"""

import itertools
import math
import time
from pathlib import Path

import numpy as np

from oracles import (
    enumerate_model_variance,
    full_tree_select,
    quantize_weights_transcription,
)
from scmux.adders import make_design, run_adder, structural_report
from scmux.analysis import (
    ModelConfig,
    accuracy_stats,
    closed_form_variance,
    decompose_variance,
    monte_carlo_variance,
)
from scmux.bitstream import bipolar_thresholds, scc
from scmux.cli import main as cli_main
from scmux.filterapp import make_lowpass, filter_rmse_vs_length
from scmux.muxtree import (
    QuantizedWeights,
    build_hardwired_tree,
    dump_tree,
    quantize_weights,
    select_leaf_precise,
)
from scmux.rns import RnsSpec, RnsState
from scmux.sngen import PccKind, generate_inputs, make_channels

GOLDEN = Path(__file__).parent / "golden"


def _check(num, label, ok, detail=""):
    print(f"[acceptance] criterion {num:>2} ({label}): {'PASS' if ok else 'FAIL'} {detail}")
    assert ok, f"criterion {num} ({label}) {detail}"


def test_criterion_01_quantization_totality():
    t0 = time.monotonic()
    rng = np.random.default_rng(101)
    for _ in range(10_000):
        m_inputs = 1 << int(rng.integers(0, 10))  # M in {1..512}
        m_inputs = int(rng.integers(1, m_inputs + 1))
        m = int(rng.integers(1, 13))
        w = rng.uniform(-1, 1, m_inputs)
        if not np.any(w):
            continue
        q = quantize_weights(w, m)
        assert sum(q.numerators) == 1 << m
        assert list(q.numerators) == quantize_weights_transcription(w, m)
    elapsed = time.monotonic() - t0
    _check(
        1,
        "quantization totality + oracle equivalence",
        elapsed < 10.0,
        f"10000 configs in {elapsed:.2f}s",
    )


def test_criterion_02_precise_sampling_exactness():
    rng = np.random.default_rng(202)
    worst = 0
    for _ in range(1000):
        m_inputs = int(rng.integers(1, 65))
        n = int(rng.integers(3, 11))
        w = rng.uniform(-1, 1, m_inputs)
        if not np.any(w):
            continue
        name = "cemux" if rng.random() < 0.5 else "cemux_wbg"
        design = make_design(name, w, n)
        rep = run_adder(
            design, rng.uniform(-1, 1, m_inputs), 1 << n, int(rng.integers(0, 2**63))
        )
        expected = quantize_weights(w, n).numerators
        worst = max(worst, int(np.abs(rep.sampling_counts - np.array(expected)).max()))
    _check(2, "precise sampling counts exact", worst == 0, f"max |C_i - q_i N/2^n| = {worst}")


def test_criterion_03_full_correlation_all_pairs():
    rng = np.random.default_rng(303)
    worst = 1.0
    for _ in range(1000):
        m_inputs = int(rng.integers(2, 17))
        n = int(rng.integers(4, 11))
        w = rng.uniform(0.05, 1.0, m_inputs) * np.where(rng.random(m_inputs) < 0.5, -1, 1)
        if not (np.any(w > 0) and np.any(w < 0)):
            w[0] = abs(w[0])
            w[1] = -abs(w[1])
        values = rng.uniform(-0.9, 0.9, m_inputs)
        chans = make_channels(values, w, n, PccKind.COMPARATOR, correlated_wiring=True)
        state = RnsState(RnsSpec("sobol_reversed_counter", n, 0))
        ys = [y for _, y in generate_inputs(chans, state, PccKind.COMPARATOR, 1 << n)]
        for i in range(m_inputs):
            for j in range(i + 1, m_inputs):
                worst = min(worst, scc(ys[i], ys[j]))
    _check(3, "full correlation SCC=+1 all pairs", worst == 1.0, f"min pair SCC = {worst}")


def test_criterion_04_ddg_structure_and_equivalence():
    rng = np.random.default_rng(404)
    for _ in range(300):
        m_inputs = int(rng.integers(1, 40))
        h = int(rng.integers(1, 11))
        w = rng.uniform(-1, 1, m_inputs)
        if not np.any(w):
            continue
        q = quantize_weights(w, h)
        tree = build_hardwired_tree(q)
        popcount = sum(bin(x).count("1") for x in q.numerators)
        assert tree.mux_count == popcount - 1
        assert tree.mux_count <= min(m_inputs * h - 1, (1 << h) - 1)
    mismatches = 0
    checked = 0
    for h in range(1, 5):
        size = 1 << h
        for m_inputs in range(1, 5):
            for nums in itertools.product(range(size + 1), repeat=m_inputs):
                if sum(nums) != size:
                    continue
                q = QuantizedWeights(nums, h, (1,) * m_inputs, (0.0,) * m_inputs)
                tree = build_hardwired_tree(q)
                for word in range(size):
                    checked += 1
                    if select_leaf_precise(tree, word) != full_tree_select(nums, h, word):
                        mismatches += 1
    _check(
        4,
        "DDG counts + exhaustive select equivalence",
        mismatches == 0,
        f"{checked} exhaustive routings checked",
    )


def test_criterion_05_table3_closed_forms():
    t0 = time.monotonic()
    rng = np.random.default_rng(505)
    rows = (
        ("bernoulli", "noisy", None),
        ("bernoulli", "precise", None),
        ("hypergeometric", "noisy", 0),
        ("hypergeometric", "noisy", 1),
        ("hypergeometric", "precise", 0),
        ("hypergeometric", "precise", 1),
    )
    details = []
    ok = True
    for model, sampling, scc_level in rows:
        m_inputs = int(rng.integers(2, 6))
        n = int(rng.integers(3, 9))
        w = rng.uniform(-1, 1, m_inputs)
        v = rng.uniform(-1, 1, m_inputs)
        cfg = ModelConfig(model, sampling, scc_level, tuple(w), tuple(v), 1 << n)
        cf = closed_form_variance(cfg)
        mc, se = monte_carlo_variance(cfg, 20_000, int(rng.integers(0, 2**63)))
        ok &= abs(cf - mc) <= 3 * se
        details.append(f"{model[:4]}/{sampling[:4]}/{scc_level}: |cf-mc|/se={abs(cf-mc)/max(se,1e-18):.2f}")
        # exact enumeration at M=2, N=4
        cfg2 = ModelConfig(model, sampling, scc_level, (0.7, -0.3), (0.4, 0.6), 4)
        q = quantize_weights(cfg2.weights, cfg2.effective_height)
        tree = build_hardwired_tree(q)
        b = bipolar_thresholds(np.asarray(cfg2.values), 2)
        bp = [int(x) if s > 0 else 4 - int(x) for x, s in zip(b, q.signs)]
        exact = float(enumerate_model_variance(cfg2, [int(x) for x in tree.owner], bp))
        ok &= abs(closed_form_variance(cfg2) - exact) <= 1e-12 * max(exact, 1e-30)
    elapsed = time.monotonic() - t0
    ok &= elapsed < 300.0
    _check(5, "six closed forms vs MC + enumeration", ok, f"{'; '.join(details)}; {elapsed:.1f}s")


def test_criterion_06_decomposition_identity():
    rng = np.random.default_rng(606)
    worst = 0.0
    for _ in range(50):
        m_inputs = int(rng.integers(2, 7))
        n = int(rng.integers(4, 9))
        model = "hypergeometric" if rng.random() < 0.5 else "bernoulli"
        sampling = "noisy" if rng.random() < 0.5 else "precise"
        scc_level = int(rng.integers(0, 2)) if model == "hypergeometric" else None
        w = rng.uniform(-1, 1, m_inputs)
        if not np.any(w):
            continue
        cfg = ModelConfig(model, sampling, scc_level, tuple(w), None, 1 << n)
        rep = decompose_variance(cfg, 3000, int(rng.integers(0, 2**63)), pair_stats=False)
        ratio = abs(rep.identity_gap) / max(3 * rep.se_identity, 1e-18)
        worst = max(worst, ratio)
    _check(
        6,
        "noise+samp+corr equals total variance",
        worst <= 1.0,
        f"max |gap|/(3se) = {worst:.2f} over 50 configs",
    )


def test_criterion_07_error_ratio_vs_basic():
    t0 = time.monotonic()
    ratios = {}
    for m in range(3, 9):
        M = 1 << m
        rmse = {}
        for name in ("cemux", "basic_hardwired"):
            design = make_design(name, [1.0 / M] * M, 9)
            rmse[name] = accuracy_stats(
                design, 512, 1000, 700 + m, values="uniform", weight_mode="pm"
            ).rmse
        ratios[m] = rmse["basic_hardwired"] / rmse["cemux"]
    elapsed = time.monotonic() - t0
    detail = " ".join(f"m{m}:{r:.2f}" for m, r in ratios.items()) + f" ({elapsed:.0f}s)"
    _check(7, "RMSE(basic_hardwired)/RMSE(cemux) >= 3.0",
           elapsed < 300.0 and all(r >= 3.0 for r in ratios.values()), detail)


def test_criterion_08_fig6b_components():
    rng = np.random.default_rng(808)
    M = 256
    w = tuple(np.where(rng.random(M) < 0.5, -1.0, 1.0) / M)
    cfg = ModelConfig("hypergeometric", "precise", 1, w, None, 256)
    rep = decompose_variance(cfg, 5000, 88, pair_stats=False)
    n_samp = 256 * rep.eps_samp
    n_corr = 256 * rep.eps_corr
    ok = n_samp == 0.0 and abs(n_corr - (-1.0 / 3.0)) <= 0.1
    _check(8, "N*eps_samp=0 and N*eps_corr=-1/3", ok, f"N*samp={n_samp} N*corr={n_corr:.4f}")


def test_criterion_09_ablation_bands():
    names = ("cemux", "cemux_nofc", "cemux_nops", "cemux_lfsr")
    rmse = {name: {} for name in names}
    for m in range(3, 9):
        M = 1 << m
        for name in names:
            design = make_design(name, [1.0 / M] * M, 10)
            rmse[name][M] = accuracy_stats(
                design, 1024, 1000, 900 + m, values="uniform", weight_mode="uniform"
            ).rmse
    ok = True
    details = []
    for M in sorted(rmse["cemux"]):
        base = rmse["cemux"][M]
        r_fc = rmse["cemux_nofc"][M] / base
        r_ps = rmse["cemux_nops"][M] / base
        r_lf = rmse["cemux_lfsr"][M] / base
        ok &= 1.15 <= r_fc <= 1.40
        if M >= 64:
            ok &= r_ps >= 2.0
        ok &= r_lf >= 1.3
        details.append(f"M{M}: fc={r_fc:.2f} ps={r_ps:.2f} lfsr={r_lf:.2f}")
    _check(9, "ablation ratio bands", ok, "; ".join(details))


def test_criterion_10_filter_latency():
    spec = make_lowpass(150, 0.1 * math.pi)
    res = filter_rmse_vs_length(
        ["cemux", "basic_hardwired", "basic_biased"], spec, range(4, 9), 1000, 1010
    )
    threshold = 2.0**-4
    cemux_at_64 = res["cemux"][6]
    basics_early = {
        name: min(res[name][n] for n in range(4, 8))
        for name in ("basic_hardwired", "basic_biased")
    }
    ok = cemux_at_64 < threshold and all(v >= threshold for v in basics_early.values())
    _check(
        10,
        "cemux under 2^-4 at N=64; basics not before N=256",
        ok,
        f"cemux@64={cemux_at_64:.4f} basic_hw<256={basics_early['basic_hardwired']:.4f} "
        f"basic_bias<256={basics_early['basic_biased']:.4f}",
    )


def test_criterion_11_structural_goldens_and_filter_ordering(tmp_path, capsys):
    # structural component-count regression against golden files
    golden_ok = True
    q15 = make_design("cemux", [7 / 16, 1 / 4, 1 / 4, 1 / 16], 4)
    tree_text = dump_tree(build_hardwired_tree(quantize_weights(q15.weights, 4)))
    golden_ok &= tree_text == (GOLDEN / "tree_eq15.txt").read_text()
    for name in ("cemux", "cemux_biased", "basic_hardwired", "apc"):
        design = make_design(name, [0.5, -0.25, 0.125, -0.125], 6)
        counts = structural_report(design)
        lines = [f"{k},{counts[k]}" for k in sorted(counts)]
        golden_ok &= "\n".join(lines) + "\n" == (GOLDEN / f"counts_{name}.txt").read_text()

    # relative RMSE ordering through the filtering front end
    out = tmp_path / "filter.csv"
    code = cli_main(
        [
            "filter",
            "--synthetic", "pulse_train",
            "--length", "260",
            "--taps", "40",
            "--designs", "cemux,cemux_wbg,basic_hardwired,basic_biased",
            "--n", "8",
            "--seed", "4",
            "--out", str(out),
        ]
    )
    capsys.readouterr()
    stats = {}
    for line in out.read_text().splitlines():
        if line.startswith("# stats"):
            parts = dict(p.split("=") for p in line[8:].split() if "=" in p)
            stats[parts["design"]] = float(parts["rmse"])
    ordering_ok = code == 0 and all(
        stats["cemux"] < stats[d] for d in ("cemux_wbg", "basic_hardwired", "basic_biased")
    )
    _check(
        11,
        "golden structural counts + cemux lowest filter RMSE",
        golden_ok and ordering_ok,
        f"stats={stats}",
    )
