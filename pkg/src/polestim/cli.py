"""Command-line interface.

Subcommands: ``probs``, ``verify``, ``estimate``, ``sample``, ``fisher``,
``dist`` and ``figure``. Data goes to stdout (or ``--out``); diagnostics go to
stderr. Exit codes: 0 success, 1 usage, 2 verification failure, 3 I/O.

An optional ``--config FILE`` holds ``key = value`` lines using the long
option names; flags given on the command line take precedence.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import distributions as dist_mod
from . import information as info
from . import optics
from .errors import PolestimError
from .estimation import EventCounts, estimate, mle_delta_shifted
from .probabilities import ALL_PATTERNS, EVENT_ORDER, coarse_probs_array, detailed_probs_array, pattern_label
from .sampling import rng_metadata, run_trials
from .states import HALF_PI, PolarizationParams, ReducedParams, reduce

EXIT_OK, EXIT_USAGE, EXIT_VERIFY, EXIT_IO = 0, 1, 2, 3

ANGLE_KEYS = ("theta", "delta_phi", "phi1", "phi2", "epsilon")
OPTION_TYPES = {
    "theta": float,
    "delta_phi": float,
    "phi1": float,
    "phi2": float,
    "epsilon": float,
    "n": int,
    "trials": int,
    "seed": int,
    "grid": int,
    "out": str,
    "format": str,
    "ndbh": int,
    "ndbv": int,
    "nsb": int,
    "nc": int,
    "perturb": float,
    "max_n": int,
    "ns": str,
    "sweep": str,
    "estimator": str,
}
DEFAULTS = {
    "n": 100,
    "trials": 1000,
    "seed": 0,
    "ndbh": 0,
    "ndbv": 0,
    "nsb": 0,
    "nc": 0,
    "perturb": 0.0,
    "max_n": 10,
    "ns": "25,100,400",
    "sweep": "theta",
    "estimator": "both",
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def fmt(x) -> str:
    """17 significant digits: enough to round-trip a double."""
    return format(float(x), ".17g")


def sweep_grid(upper: float, k: int) -> np.ndarray:
    """``k`` points from 0 to ``upper``; the midpoint is exactly ``upper / 2`` for odd k."""
    return upper * (np.arange(k) / (k - 1))


# ---------------------------------------------------------------- parsing


def _add_params(p, angles=True):
    if angles:
        p.add_argument("--theta", type=float)
        p.add_argument("--delta-phi", dest="delta_phi", type=float)
        p.add_argument("--phi1", type=float)
        p.add_argument("--phi2", type=float)
        p.add_argument("--degrees", action="store_true", help="angles are given in degrees")
    p.add_argument("--out", help="output file (directory for `figure`)")
    p.add_argument("--format", choices=("csv", "json", "svg"))
    p.add_argument("--config", help="key = value file; flags override it")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="polestim", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser, required=True)

    p = sub.add_parser("probs", help="event probabilities (four classes or ten patterns)")
    _add_params(p)
    p.add_argument("--detailed", action="store_true", help="emit the ten detector patterns")
    p.add_argument("--grid", type=int, help="sweep the --sweep variable over this many points")
    p.add_argument("--sweep", choices=("theta", "delta_phi"))

    p = sub.add_parser("verify", help="check closed forms against independent oracles")
    _add_params(p, angles=False)
    p.add_argument("--grid", type=int)
    p.add_argument("--max-n", dest="max_n", type=int)
    p.add_argument("--perturb", type=float, help="fault injection: offset added to checked values")

    p = sub.add_parser("estimate", help="maximum-likelihood estimates from counts")
    _add_params(p, angles=False)
    p.add_argument("--degrees", action="store_true")
    for flag in ("ndbh", "ndbv", "nsb", "nc"):
        p.add_argument(f"--{flag}", type=int)
    p.add_argument("--epsilon", type=float)

    p = sub.add_parser("sample", help="Monte Carlo experiments")
    _add_params(p)
    p.add_argument("--n", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)

    p = sub.add_parser("fisher", help="Fisher and quantum Fisher information matrices")
    _add_params(p)
    p.add_argument("--n", type=int, help="also emit the Cramér-Rao bound for n shots")
    p.add_argument("--grid", type=int)
    p.add_argument("--sweep", choices=("theta", "delta_phi"))

    p = sub.add_parser("dist", help="exact finite-N estimator distributions")
    _add_params(p)
    p.add_argument("--n", type=int)
    p.add_argument("--estimator", choices=("theta", "delta", "both"))

    p = sub.add_parser("figure", help="reproduce a figure as CSV + SVG")
    _add_params(p)
    p.add_argument("which", type=int, choices=(3, 4, 5, 6))
    p.add_argument("--ns", help="comma-separated shot counts")
    p.add_argument("--grid", type=int)
    return parser


def read_config(path: str) -> dict:
    values = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected 'key = value'")
            key, value = (part.strip() for part in line.split("=", 1))
            key = key.replace("-", "_")
            if key == "degrees":
                values[key] = value.lower() in ("1", "true", "yes", "on")
                continue
            if key not in OPTION_TYPES:
                raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
            try:
                values[key] = OPTION_TYPES[key](value)
            except ValueError as exc:
                raise UsageError(f"{path}:{lineno}: bad value for {key}: {value!r}") from exc
    return values


def resolve(args: argparse.Namespace) -> argparse.Namespace:
    """Layer config-file values and defaults under the parsed flags."""
    if getattr(args, "config", None):
        try:
            config = read_config(args.config)
        except OSError as exc:
            raise UsageError(f"cannot read config: {exc}") from exc
        for key, value in config.items():
            if key == "degrees":
                if hasattr(args, "degrees") and not args.degrees:
                    args.degrees = value
            elif hasattr(args, key) and getattr(args, key) is None:
                setattr(args, key, value)
    for key, value in DEFAULTS.items():
        if hasattr(args, key) and getattr(args, key) is None:
            setattr(args, key, value)
    if args.format is None:
        args.format = "json" if args.command == "estimate" else "csv"
    if getattr(args, "degrees", False):
        for key in ANGLE_KEYS:
            if getattr(args, key, None) is not None:
                setattr(args, key, math.radians(getattr(args, key)))
    if getattr(args, "grid", None) is not None and args.grid < 2:
        raise UsageError("--grid must be at least 2")
    return args


def reduced_params(args, need_theta=True, need_delta=True) -> ReducedParams:
    has_delta = args.delta_phi is not None
    has_phases = args.phi1 is not None or args.phi2 is not None
    if has_delta and has_phases:
        raise UsageError("give either --delta-phi or --phi1/--phi2, not both")
    if need_theta and args.theta is None:
        raise UsageError("--theta is required")
    theta = args.theta if args.theta is not None else 0.0
    try:
        if has_phases:
            if args.phi1 is None or args.phi2 is None:
                raise UsageError("--phi1 and --phi2 must be given together")
            return reduce(PolarizationParams(theta, args.phi1, args.phi2))
        if need_delta and not has_delta:
            raise UsageError("--delta-phi (or --phi1/--phi2) is required")
        return ReducedParams(theta, args.delta_phi if has_delta else 0.0)
    except PolestimError as exc:
        raise UsageError(str(exc)) from exc


# ---------------------------------------------------------------- output


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    with open(out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


# ---------------------------------------------------------------- commands


def _sweep_points(args):
    if args.grid is None:
        rp = reduced_params(args)
        return [(rp.theta, rp.delta_phi)]
    if args.sweep == "theta":
        rp = reduced_params(args, need_theta=False)
        return [(t, rp.delta_phi) for t in sweep_grid(math.pi, args.grid)]
    rp = reduced_params(args, need_delta=False)
    return [(rp.theta, d) for d in sweep_grid(HALF_PI, args.grid)]


def cmd_probs(args) -> int:
    points = _sweep_points(args)
    thetas = np.array([p[0] for p in points])
    deltas = np.array([p[1] for p in points])
    if args.detailed:
        table = detailed_probs_array(thetas, deltas)
        header = ["theta", "delta_phi"] + [f"p_{pattern_label(p)}" for p in ALL_PATTERNS]
    else:
        table = coarse_probs_array(thetas, deltas)[:, [3, 2, 0, 1]]
        header = ["theta", "delta_phi", "p_c", "p_sb", "p_dbh", "p_dbv"]
    rows = [[fmt(t), fmt(d), *map(fmt, row)] for t, d, row in zip(thetas, deltas, table)]
    if args.format == "json":
        text = json.dumps([dict(zip(header, map(float, r))) for r in rows], indent=2) + "\n"
    else:
        text = _csv_text(header, rows)
    _emit(text, args.out)
    return EXIT_OK


def run_verification(grid: int = 11, max_n: int = 10, perturb: float = 0.0) -> list[dict]:
    """Three oracle suites; each entry reports max deviation, tolerance and worst point."""
    thetas = sweep_grid(math.pi, grid)
    deltas = sweep_grid(HALF_PI, grid)
    reports = []

    worst, where = 0.0, None
    for t in thetas:
        for d in deltas:
            oracle = optics.detailed_probs_oracle(PolarizationParams(t, 2.0 * d, 0.0))
            expected = np.array([oracle[optics.pattern_from_detectors(p)] for p in ALL_PATTERNS])
            dev = float(np.max(np.abs(detailed_probs_array(t, d) + perturb - expected)))
            if dev > worst:
                worst, where = dev, (float(t), float(d))
    reports.append({"suite": "optics_oracle", "max_deviation": worst, "tolerance": 1e-12, "worst_point": where})

    worst, where = 0.0, None
    for t in thetas:
        for d in deltas:
            dev = float(np.max(np.abs(info.fim_total(ReducedParams(t, d)) + perturb - info.qfim_reduced(t))))
            if dev > worst:
                worst, where = dev, (float(t), float(d))
    reports.append({"suite": "fim_equals_qfim", "max_deviation": worst, "tolerance": 1e-12, "worst_point": where})

    worst, where = 0.0, None
    for t in thetas:
        for d in deltas:
            rp = ReducedParams(t, d)
            for n in range(1, max_n + 1):
                exact = dist_mod.theta_distribution(t, n).as_dict()
                brute = dist_mod.theta_distribution_bruteforce(t, n)
                exact_d = dist_mod.delta_distribution(rp, n)
                brute_d, brute_fail = dist_mod.delta_distribution_bruteforce(rp, n)
                devs = [abs(exact.get(k, 0.0) + perturb - brute.get(k, 0.0)) for k in set(exact) | set(brute)]
                ed = exact_d.as_dict()
                devs += [abs(ed.get(k, 0.0) + perturb - brute_d.get(k, 0.0)) for k in set(ed) | set(brute_d)]
                devs.append(abs(exact_d.failure_mass - brute_fail))
                dev = max(devs)
                if dev > worst:
                    worst, where = dev, (float(t), float(d), n)
    reports.append({"suite": "exact_distributions", "max_deviation": worst, "tolerance": 1e-10, "worst_point": where})
    for r in reports:
        r["passed"] = r["max_deviation"] <= r["tolerance"]
    return reports


def cmd_verify(args) -> int:
    grid = args.grid if args.grid is not None else 11
    reports = run_verification(grid, args.max_n, args.perturb)
    rows = [[r["suite"], fmt(r["max_deviation"]), fmt(r["tolerance"]), "pass" if r["passed"] else "FAIL"] for r in reports]
    if args.format == "json":
        text = json.dumps(reports, indent=2) + "\n"
    else:
        text = _csv_text(["suite", "max_deviation", "tolerance", "status"], rows)
    _emit(text, args.out)
    failed = [r for r in reports if not r["passed"]]
    for r in failed:
        print(f"verification failed: {r['suite']} at {r['worst_point']} "
              f"(deviation {r['max_deviation']:.3g} > {r['tolerance']:.0e})", file=sys.stderr)
    return EXIT_VERIFY if failed else EXIT_OK


def cmd_estimate(args) -> int:
    try:
        counts = EventCounts(args.ndbh, args.ndbv, args.nsb, args.nc)
    except PolestimError as exc:
        raise UsageError(str(exc)) from exc
    if counts.n_total == 0:
        raise UsageError("at least one count must be positive")
    result = estimate(counts)
    record = {
        "n_dbh": counts.n_dbh,
        "n_dbv": counts.n_dbv,
        "n_sb": counts.n_sb,
        "n_c": counts.n_c,
        "theta_hat": result.theta_hat,
        "delta_hat": "FAILURE" if result.failed else result.delta_hat,
        "hessian_ok": result.hessian_ok,
        "hessian_theta": None if result.hessian is None else float(result.hessian[0, 0]),
        "hessian_delta": None if result.hessian is None else float(result.hessian[1, 1]),
    }
    if args.epsilon is not None:
        shifted = mle_delta_shifted(counts, args.epsilon)
        record["epsilon"] = args.epsilon
        record["delta_hat_shifted"] = "FAILURE" if shifted is None else shifted
    if args.format == "csv":
        def cell(v):
            if v is None:
                return ""
            if isinstance(v, bool) or isinstance(v, (int, str)):
                return str(v)
            return fmt(v)
        text = _csv_text(list(record), [[cell(v) for v in record.values()]])
    else:
        text = json.dumps(record, indent=2) + "\n"
    _emit(text, args.out)
    return EXIT_OK


def cmd_sample(args) -> int:
    rp = reduced_params(args)
    if args.n < 1 or args.trials < 1 or args.seed < 0:
        raise UsageError("--n and --trials must be positive and --seed nonnegative")
    summary = run_trials(rp, args.n, args.trials, args.seed)
    if args.format == "json":
        record = {
            "metadata": {**rng_metadata(), "seed": args.seed},
            "theta": rp.theta,
            "delta_phi": rp.delta_phi,
            "n": args.n,
            "trials": summary.trials,
            "failure_count": summary.failure_count,
            "empirical_bias_theta": summary.empirical_bias_theta,
            "empirical_variance_theta": summary.empirical_variance_theta,
            "empirical_bias_delta": summary.empirical_bias_delta,
            "empirical_variance_delta": summary.empirical_variance_delta,
        }
        text = json.dumps(record, indent=2) + "\n"
    else:
        ok = (summary.counts[:, 2] + summary.counts[:, 3]) > 0
        delta_iter = iter(summary.estimates_delta)
        rows = []
        for i, (row, theta_hat, success) in enumerate(zip(summary.counts, summary.estimates_theta, ok)):
            rows.append([i, *map(int, row), fmt(theta_hat), fmt(next(delta_iter)) if success else "FAILURE"])
        text = _csv_text(["trial", "n_dbh", "n_dbv", "n_sb", "n_c", "theta_hat", "delta_hat"], rows)
    _emit(text, args.out)
    print(f"rng={rng_metadata()['rng']} seed={args.seed} failures={summary.failure_count}", file=sys.stderr)
    return EXIT_OK


def cmd_fisher(args) -> int:
    rows = []
    for t, d in _sweep_points(args):
        rp = ReducedParams(t, d)
        mats = {f"fim_{e.value.lower()}": info.fim_event(e, rp) for e in EVENT_ORDER}
        mats["fim_total"] = info.fim_total(rp)
        mats["qfim"] = info.qfim_reduced(t)
        if args.n is not None:
            try:
                mats["crb"] = info.crb(rp, args.n)
            except PolestimError as exc:
                print(f"crb skipped at theta={t:g}: {exc}", file=sys.stderr)
        for name, m in mats.items():
            rows.append([fmt(t), fmt(d), name, fmt(m[0, 0]), fmt(m[0, 1]), fmt(m[1, 1])])
    _emit(_csv_text(["theta", "delta_phi", "matrix", "m11", "m12", "m22"], rows), args.out)
    return EXIT_OK


def cmd_dist(args) -> int:
    rp = reduced_params(args, need_delta=args.estimator != "theta")
    if args.n < 1:
        raise UsageError("--n must be positive")
    rows, summaries = [], {}
    if args.estimator in ("theta", "both"):
        d = dist_mod.theta_distribution(rp.theta, args.n)
        cdf = np.cumsum(d.conditional_probs())
        for key, v, p, c in zip(d.key_tuples(), d.values, d.probs, cdf):
            rows.append(["theta", args.n, str(key), fmt(v), fmt(p), fmt(min(c, 1.0))])
        summaries["theta"] = dist_mod.theta_moments(rp.theta, args.n).__dict__
    if args.estimator in ("delta", "both"):
        d = dist_mod.delta_distribution(rp, args.n)
        if len(d):
            cdf = np.cumsum(d.conditional_probs())
            for (a, b), v, p, c in zip(d.key_tuples(), d.values, d.probs, cdf):
                rows.append(["delta", args.n, f"{a}:{b}", fmt(v), fmt(p), fmt(min(c, 1.0))])
            try:
                summaries["delta"] = dist_mod.delta_moments(rp, args.n).__dict__
            except PolestimError:
                pass
        rows.append(["delta", args.n, "FAILURE", "", fmt(d.failure_mass), ""])
    if args.format == "json":
        text = json.dumps({"theta": rp.theta, "delta_phi": rp.delta_phi, "n": args.n, "moments": summaries}, indent=2) + "\n"
    else:
        text = _csv_text(["estimator", "n", "key", "value", "prob", "cumulative"], rows)
    _emit(text, args.out)
    return EXIT_OK


# ---------------------------------------------------------------- figures


Z_WINDOW = 6.0


def figure_rows(which: int, ns, grid: int | None = None, theta: float | None = None):
    """Long-format rows ``(header, rows)`` for one of the four figures.

    Cumulative-distribution figures keep support points with
    ``|z| <= Z_WINDOW``; the CDF is flat at 0 or 1 to plotting precision
    beyond it.
    """
    if which == 3:
        thetas = sweep_grid(math.pi, grid or 181)
        rows = []
        for n in ns:
            for t in thetas:
                m = dist_mod.theta_moments(t, n)
                rows.append([t, n, "normalized_variance", m.normalized_variance])
                rows.append([t, n, "bias", m.bias])
        return ["theta", "n", "series", "value"], rows
    if which == 5:
        deltas = sweep_grid(HALF_PI, grid or 91)
        thetas = [theta] if theta is not None else [HALF_PI, math.pi / 4]
        rows = []
        for t in thetas:
            for n in ns:
                for d in deltas:
                    m = dist_mod.delta_moments(ReducedParams(t, d), n)
                    rows.append([d, t, n, "normalized_variance", m.normalized_variance])
                    rows.append([d, t, n, "bias", m.bias])
        return ["delta_phi", "theta", "n", "series", "value"], rows
    if which == 4:
        thetas = [theta] if theta is not None else [HALF_PI, math.pi / 4, math.pi / 10]
        rows = []
        for t in thetas:
            for n in ns:
                z, cdf = dist_mod.standardized_cumulative(dist_mod.theta_distribution(t, n))
                rows += [[zi, t, n, "cdf", ci] for zi, ci in zip(z, cdf) if abs(zi) <= Z_WINDOW]
        for zi in np.linspace(-4, 4, 161):
            rows.append([zi, "", "", "normal", dist_mod.normal_cdf(zi)])
        return ["z", "theta", "n", "series", "value"], rows
    if which == 6:
        cases = [(HALF_PI, math.pi / 4), (HALF_PI, math.pi / 8), (math.pi / 4, math.pi / 4)]
        if theta is not None:
            cases = [(theta, math.pi / 4), (theta, math.pi / 8)]
        rows = []
        for t, d in cases:
            for n in ns:
                z, cdf = dist_mod.standardized_cumulative(dist_mod.delta_distribution(ReducedParams(t, d), n))
                rows += [[zi, t, d, n, "cdf", ci] for zi, ci in zip(z, cdf) if abs(zi) <= Z_WINDOW]
        for zi in np.linspace(-4, 4, 161):
            rows.append([zi, "", "", "", "normal", dist_mod.normal_cdf(zi)])
        return ["z", "theta", "delta_phi", "n", "series", "value"], rows
    raise UsageError(f"unknown figure {which}")


def _plot_svg(which: int, header, rows, path: Path) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    col = {name: i for i, name in enumerate(header)}
    series_names = sorted({r[col["series"]] for r in rows if r[col["series"]] != "normal"})
    if which in (3, 5):
        fig, axes = plt.subplots(1, len(series_names), figsize=(5 * len(series_names), 4))
        axes = np.atleast_1d(axes)
        xkey = header[0]
        for ax, series in zip(axes, series_names):
            groups = {}
            for r in rows:
                if r[col["series"]] != series:
                    continue
                label = f"N={r[col['n']]}" if which == 3 else f"N={r[col['n']]}, theta={r[col['theta']]:.3g}"
                groups.setdefault(label, []).append((r[0], r[-1]))
            for label, pts in groups.items():
                xs, ys = zip(*pts)
                ax.plot(xs, ys, label=label)
            ax.set_xlabel(xkey)
            ax.set_ylabel(series)
            ax.legend(fontsize=7)
    else:
        fig, ax = plt.subplots(figsize=(6, 4))
        groups = {}
        for r in rows:
            if r[col["series"]] == "normal":
                groups.setdefault("normal", []).append((r[0], r[-1]))
                continue
            label = ", ".join(f"{k}={r[col[k]]:.3g}" if k != "n" else f"N={r[col[k]]}"
                              for k in header[1:-2])
            groups.setdefault(label, []).append((r[0], r[-1]))
        for label, pts in groups.items():
            xs, ys = zip(*pts)
            if label == "normal":
                ax.plot(xs, ys, "k-", lw=1.5, label=label)
            else:
                ax.step(xs, ys, where="post", label=label, lw=0.8)
        ax.set_xlabel("standardized estimate")
        ax.set_ylabel("cumulative probability")
        ax.set_xlim(-4, 4)
        ax.legend(fontsize=6)
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)


def cmd_figure(args) -> int:
    try:
        ns = [int(x) for x in args.ns.split(",") if x.strip()]
    except ValueError as exc:
        raise UsageError(f"--ns must be comma-separated integers, got {args.ns!r}") from exc
    if not ns or min(ns) < 1:
        raise UsageError("--ns must list positive integers")
    header, rows = figure_rows(args.which, ns, args.grid, args.theta)
    outdir = Path(args.out or ".")
    outdir.mkdir(parents=True, exist_ok=True)
    text_rows = [[fmt(v) if isinstance(v, (float, np.floating)) else v for v in r] for r in rows]
    csv_path = outdir / f"figure{args.which}.csv"
    with open(csv_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(_csv_text(header, text_rows))
    _plot_svg(args.which, header, rows, outdir / f"figure{args.which}.svg")
    print(f"wrote {csv_path} and figure{args.which}.svg", file=sys.stderr)
    return EXIT_OK


COMMANDS = {
    "probs": cmd_probs,
    "verify": cmd_verify,
    "estimate": cmd_estimate,
    "sample": cmd_sample,
    "fisher": cmd_fisher,
    "dist": cmd_dist,
    "figure": cmd_figure,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        resolve(args)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"polestim {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PolestimError as exc:
        print(f"polestim {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"polestim {args.command}: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
