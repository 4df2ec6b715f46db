"""Command-line front end: quantization, sweeps, decomposition, filtering,
and structural reports, all emitting flat CSV with a reproducibility stamp.

Exit codes: 0 success, 1 usage error, 2 runtime/precondition error.
"""

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from .adders import make_design, normalize_design_name, structural_report
from .analysis import (
    ModelConfig,
    accuracy_stats,
    decompose_variance,
    expected_closed_form,
)
from .filterapp import (
    FilterSpec,
    Signal,
    filter_rmse_vs_length,
    make_lowpass,
    make_noisy_signal,
    pulse_train_signal,
    reference_fir,
    stochastic_fir,
)
from .muxtree import quantize_weights


class _Parser(argparse.ArgumentParser):
    """argparse flavor whose usage errors exit with code 1, not 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _fmt(x: float) -> str:
    return f"{x:.10g}"


def _emit(args, header_lines, rows):
    lines = [f"# invocation: {args._invocation}"]
    if hasattr(args, "seed"):
        lines.append(f"# seed: {args.seed}")
    lines.extend(header_lines)
    lines.extend(rows)
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _read_coefficients(path: str) -> list[float]:
    """One coefficient per line; blank lines and # comments are skipped."""
    vals = []
    for line in Path(path).read_text().splitlines():
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        vals.append(float(s))
    if not vals:
        raise ValueError(f"no coefficients found in {path}")
    return vals


def read_signal_csv(path: str) -> Signal:
    """Signal CSV: one `index,value` header line, one sample per row."""
    lines = [l for l in Path(path).read_text().splitlines() if l.strip() and not l.startswith("#")]
    if not lines or lines[0].strip().lower() != "index,value":
        raise ValueError("signal CSV must start with an 'index,value' header line")
    samples = [float(l.split(",")[1]) for l in lines[1:]]
    if not samples:
        raise ValueError(f"no samples found in {path}")
    return Signal(np.asarray(samples))


def write_signal_csv(path: str, signal: Signal) -> None:
    rows = ["index,value"]
    rows += [f"{i},{_fmt(v)}" for i, v in enumerate(signal.samples)]
    Path(path).write_text("\n".join(rows) + "\n")


def _design_list(raw: str) -> list[str]:
    return [normalize_design_name(s) for s in raw.split(",") if s.strip()]


# ----- subcommands -----


def cmd_quantize(args):
    w = _read_coefficients(args.weights)
    q = quantize_weights(w, args.m)
    rows = ["index,numerator,denominator,sign"]
    rows += [
        f"{i},{num},{q.denominator},{s:+d}"
        for i, (num, s) in enumerate(zip(q.numerators, q.signs))
    ]
    _emit(args, [], rows)


def cmd_sweep_m(args):
    designs = _design_list(args.designs)
    big_n = 1 << args.n
    norm = math.sqrt(big_n) if args.normalize else 1.0
    rows = ["design,M,rmse"]
    for name in sorted(designs):
        for m in range(args.m_min, args.m_max + 1):
            M = 1 << m
            design = make_design(name, [1.0 / M] * M, args.n)
            stats = accuracy_stats(
                design,
                big_n,
                args.runs,
                args.seed + m,
                values="uniform",
                weight_mode="pm" if args.weight_dist == "pm" else "uniform",
            )
            rows.append(f"{name},{M},{_fmt(stats.rmse * norm)}")
    _emit(args, [], rows)


def cmd_sweep_n(args):
    designs = _design_list(args.designs)
    if args.coeff_file:
        spec = FilterSpec(tuple(_read_coefficients(args.coeff_file)))
    else:
        spec = make_lowpass(args.taps, args.cutoff * math.pi)
    result = filter_rmse_vs_length(
        designs, spec, range(args.n_min, args.n_max + 1), args.runs, args.seed
    )
    rows = ["design,N,rmse"]
    for name in sorted(result):
        for n in sorted(result[name]):
            rows.append(f"{name},{1 << n},{_fmt(result[name][n])}")
    _emit(args, [], rows)


def cmd_decompose(args):
    if args.weights_file:
        weight_sets = {len(_read_coefficients(args.weights_file)): _read_coefficients(args.weights_file)}
        m_list = sorted(weight_sets)
    else:
        m_list = [int(s) for s in args.m_list.split(",")]
        rng = np.random.default_rng(args.seed)
        weight_sets = {
            M: list(np.where(rng.random(M) < 0.5, -1.0, 1.0) / M) for M in m_list
        }
    values = tuple(_read_coefficients(args.values_file)) if args.values_file else None
    scc = None if args.scc == "none" else int(args.scc)
    rows = ["M,eps_noise,eps_samp,eps_corr,total,closed_form"]
    for M in m_list:
        cfg = ModelConfig(
            sn_model=args.model,
            sampling=args.sampling,
            input_scc=scc,
            weights=tuple(weight_sets[M]),
            values=values,
            N=1 << args.n,
        )
        rep = decompose_variance(cfg, args.runs, args.seed + M, pair_stats=False)
        try:
            closed = _fmt(expected_closed_form(cfg, min(args.runs, 2000), args.seed + M))
        except ValueError:
            closed = ""
        rows.append(
            f"{M},{_fmt(rep.eps_noise)},{_fmt(rep.eps_samp)},{_fmt(rep.eps_corr)},"
            f"{_fmt(rep.total_variance)},{closed}"
        )
    _emit(args, [], rows)


def cmd_filter(args):
    if args.signal:
        sig = read_signal_csv(args.signal)
    elif args.synthetic == "pulse_train":
        sig = pulse_train_signal(args.length, seed=args.seed, noise_sigma=args.noise_sigma)
    else:
        sig = make_noisy_signal(args.synthetic, args.noise_sigma, args.seed, args.length)
    if args.coeff_file:
        spec = FilterSpec(tuple(_read_coefficients(args.coeff_file)))
    else:
        spec = make_lowpass(args.taps, args.cutoff * math.pi)
    designs = _design_list(args.designs)
    ref = reference_fir(spec, sig)

    outputs = {}
    footer = []
    for name in designs:
        design = make_design(name, spec.coefficients, args.n)
        filtered, stats = stochastic_fir(design, sig, 1 << args.n, args.seed)
        outputs[name] = filtered.samples
        footer.append(
            f"# stats design={name} rmse={_fmt(stats.rmse)} bias={_fmt(stats.bias)} "
            f"runs={stats.runs} warmup={spec.taps - 1}"
        )
    header = "index,noisy,reference," + ",".join(designs)
    rows = [header]
    for i in range(len(sig)):
        cells = [str(i), _fmt(sig.samples[i]), _fmt(ref.samples[i])]
        cells += [_fmt(outputs[name][i]) for name in designs]
        rows.append(",".join(cells))
    rows.extend(footer)
    _emit(args, [], rows)


def cmd_report(args):
    if args.coeff_file:
        weights = _read_coefficients(args.coeff_file)
    elif args.lowpass_taps:
        weights = list(make_lowpass(args.lowpass_taps, args.cutoff * math.pi).coefficients)
    else:
        rng = np.random.default_rng(args.seed)
        weights = list(np.where(rng.random(args.pm) < 0.5, -1.0, 1.0) / args.pm)
    design = make_design(args.design, weights, args.n)
    counts = structural_report(design)
    rows = ["component,count"]
    rows += [f"{key},{counts[key]}" for key in sorted(counts)]
    _emit(args, [], rows)


def build_parser() -> _Parser:
    p = _Parser(prog="scmux", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    q = sub.add_parser(
        "quantize",
        help="quantize weights to numerators over 2^m",
        description="CSV schema: index,numerator,denominator,sign",
    )
    q.add_argument("--weights", required=True, help="coefficient file, one per line")
    q.add_argument("--m", type=int, required=True, help="tree height (denominator 2^m)")

    sm = sub.add_parser(
        "sweep-m",
        help="RMSE vs input count for named designs",
        description="CSV schema: design,M,rmse (rmse scaled by sqrt(N) with --normalize)",
    )
    sm.add_argument("--designs", required=True, help="comma-separated design names")
    sm.add_argument("--n", type=int, default=10, help="precision; stream length 2^n")
    sm.add_argument("--m-min", type=int, default=3, help="smallest input-count exponent")
    sm.add_argument("--m-max", type=int, default=8, help="largest input-count exponent")
    sm.add_argument("--runs", type=int, default=1000)
    sm.add_argument(
        "--weight-dist",
        choices=("uniform", "pm"),
        default="uniform",
        help="per-run weights: uniform [-1,1] or random-sign 1/M",
    )
    sm.add_argument("--normalize", action="store_true", help="report rmse * sqrt(N)")

    sn = sub.add_parser(
        "sweep-n",
        help="filter RMSE vs stream length at fixed taps",
        description="CSV schema: design,N,rmse, sorted by (design, N)",
    )
    sn.add_argument("--designs", required=True)
    sn.add_argument("--taps", type=int, default=150)
    sn.add_argument("--cutoff", type=float, default=0.1, help="lowpass cutoff, in pi rad/sample")
    sn.add_argument("--coeff-file", help="use these coefficients instead of the lowpass")
    sn.add_argument("--n-min", type=int, default=4)
    sn.add_argument("--n-max", type=int, default=8)
    sn.add_argument("--runs", type=int, default=1000)

    dc = sub.add_parser(
        "decompose",
        help="Monte Carlo variance decomposition",
        description=(
            "CSV schema: M,eps_noise,eps_samp,eps_corr,total,closed_form "
            "(closed_form empty when no formula row applies)"
        ),
    )
    dc.add_argument("--model", choices=("bernoulli", "hypergeometric"), required=True)
    dc.add_argument("--sampling", choices=("noisy", "precise"), required=True)
    dc.add_argument("--scc", choices=("0", "1", "none"), default="none")
    dc.add_argument("--m-list", default="2,4,8,16", help="input counts, random-sign 1/M weights")
    dc.add_argument("--weights-file", help="fixed weights instead of --m-list")
    dc.add_argument("--values-file", help="fixed values (default: uniform per run)")
    dc.add_argument("--n", type=int, default=8, help="precision; stream length 2^n")
    dc.add_argument("--runs", type=int, default=2000)

    fl = sub.add_parser(
        "filter",
        help="filter a signal with stochastic designs",
        description=(
            "CSV schema: index,noisy,reference,<one column per design>, then "
            "'# stats design=<name> rmse=... bias=... runs=... warmup=...' "
            "footer lines (statistics exclude the warm-up samples)"
        ),
    )
    fl.add_argument("--signal", help="input signal CSV (index,value)")
    fl.add_argument(
        "--synthetic",
        choices=("sine_mix", "chirp", "pulse_train"),
        default="pulse_train",
        help="synthetic input when no --signal file is given",
    )
    fl.add_argument("--noise-sigma", type=float, default=0.05)
    fl.add_argument("--length", type=int, default=720)
    fl.add_argument("--coeff-file")
    fl.add_argument("--taps", type=int, default=100)
    fl.add_argument("--cutoff", type=float, default=0.1, help="in pi rad/sample")
    fl.add_argument("--designs", default="cemux")
    fl.add_argument("--n", type=int, default=10)

    rp = sub.add_parser(
        "report",
        help="structural component counts for a design",
        description="CSV schema: component,count",
    )
    rp.add_argument("--design", required=True)
    rp.add_argument("--n", type=int, default=10)
    rp.add_argument("--coeff-file")
    rp.add_argument("--lowpass-taps", type=int)
    rp.add_argument("--cutoff", type=float, default=0.1)
    rp.add_argument("--pm", type=int, default=16, help="random-sign 1/M weights with M inputs")

    for cmd in (q, sm, sn, dc, fl, rp):
        cmd.add_argument("--seed", type=int, default=0, help="master seed")
        cmd.add_argument("--out", help="output CSV path (default: stdout)")
    q.set_defaults(func=cmd_quantize)
    sm.set_defaults(func=cmd_sweep_m)
    sn.set_defaults(func=cmd_sweep_n)
    dc.set_defaults(func=cmd_decompose)
    fl.set_defaults(func=cmd_filter)
    rp.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    args._invocation = "scmux " + " ".join(argv)
    try:
        args.func(args)
    except (ValueError, OSError) as exc:
        print(f"scmux: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
