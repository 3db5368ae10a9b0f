"""Command-line harness.

Three subcommands:

* ``estimate``  - read an L x T mixture matrix from CSV and print the
  estimated source count for one method.
* ``simulate``  - run a scenario sweep from a config file and write the
  error-rate table, mean dependency curves, figures and a run manifest.
* ``plot``      - render the error-rate figure from an existing results CSV.

Exit codes: 0 success, 2 input/config error, 3 computation error.
"""

import argparse
import sys
import time

from . import __version__, config as config_mod, estimators, report, simkit

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_COMPUTE = 3


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="sdcount",
        description="Blind source-count estimation and Monte-Carlo benchmarks",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    est = sub.add_parser("estimate", help="estimate the source count from a CSV matrix")
    est.add_argument("--input", required=True, help="CSV file, L rows x T columns, no header")
    est.add_argument("--method", required=True, choices=("sdc", "mdl", "sorte", "rmt"))
    est.add_argument("--curve-out", help="write the dependency curve CSV (sdc only)")
    est.add_argument("--alpha", type=float, default=0.1,
                     help="significance level for the rmt method (default 0.1)")

    sim = sub.add_parser("simulate", help="run a Monte-Carlo scenario sweep")
    sim.add_argument("--config", required=True,
                     help="scenario config file (path or bundled name like scenario1)")
    sim.add_argument("--out", required=True, help="output directory")
    sim.add_argument("--methods", help="comma-separated subset of sdc,mdl,sorte,rmt")
    sim.add_argument("--trials", type=int, help="override the config trial count")
    sim.add_argument("--seed", type=int, help="override the config base seed")
    sim.add_argument("--no-figures", action="store_true",
                     help="skip SVG figure rendering")

    plot = sub.add_parser("plot", help="render an error-rate figure from results CSV")
    plot.add_argument("--results", required=True, help="results CSV from simulate")
    plot.add_argument("--out", required=True, help="output SVG path")
    return parser


def cmd_estimate(args):
    try:
        x = report.read_matrix_csv(args.input)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    sensors, samples = x.shape
    if samples <= 10 * sensors:
        print(
            f"error: need more than 10 * {sensors} samples, got {samples}",
            file=sys.stderr,
        )
        return EXIT_INPUT
    try:
        if args.method == "sdc":
            estimate = estimators.sdc_estimate(x)
        else:
            spectrum = estimators.covariance_spectrum(x)
            if args.method == "mdl":
                estimate = estimators.mdl_estimate(spectrum)
            elif args.method == "sorte":
                estimate = estimators.sorte_estimate(spectrum)
            else:
                estimate = estimators.rmt_estimate(spectrum, alpha=args.alpha)
    except Exception as exc:  # noqa: BLE001 - reported via exit code
        print(f"error: estimation failed: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    print(estimate.m_hat)
    if args.curve_out and args.method == "sdc":
        curve = estimators.SdcCurve(sensor_count=sensors,
                                    values=estimate.diagnostics["curve"])
        report.write_curve_csv(args.curve_out, curve)
    return EXIT_OK


def cmd_simulate(args):
    import os

    try:
        cfg = config_mod.load_config(args.config)
        overrides = {}
        if args.trials is not None:
            overrides["trials"] = args.trials
        if args.seed is not None:
            overrides["base_seed"] = args.seed
        if overrides:
            from dataclasses import replace

            cfg = replace(cfg, **overrides)
        methods = cfg.methods
        if args.methods:
            methods = tuple(m.strip() for m in args.methods.split(",") if m.strip())
            for m in methods:
                if m not in simkit.METHODS:
                    raise ValueError(f"unknown method {m!r}")
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    os.makedirs(args.out, exist_ok=True)
    started = time.strftime("%Y-%m-%dT%H:%M:%S%z")
    sweep = simkit.run_sweep(cfg, methods=methods)
    stem = f"scenario{cfg.scenario_id}"
    results_path = os.path.join(args.out, f"{stem}_results.csv")
    report.write_results_csv(results_path, sweep)
    outputs = [("results_csv", results_path)]
    if sweep.curves:
        curves_path = os.path.join(args.out, f"{stem}_curves.csv")
        report.write_curves_csv(curves_path, sweep)
        outputs.append(("curves_csv", curves_path))
    if not args.no_figures:
        rates_svg = os.path.join(args.out, f"{stem}_error_rates.svg")
        report.render_error_rates(report.read_results_csv(results_path),
                                  rates_svg, title=stem)
        outputs.append(("figure_error_rates", rates_svg))
        if sweep.curves:
            curves_svg = os.path.join(args.out, f"{stem}_sdc_curves.svg")
            report.render_sdc_curves(sweep.curves, curves_svg,
                                     grid_label=cfg.grid_param, title=stem)
            outputs.append(("figure_sdc_curves", curves_svg))
    entries = [
        ("tool", "sdcount"),
        ("version", __version__),
        ("timestamp", started),
        ("base_seed", cfg.base_seed),
        ("trials", cfg.trials),
        ("methods", ",".join(methods)),
        ("failures", len(sweep.failures)),
    ]
    entries.extend(outputs)
    for index, failure in enumerate(sweep.failures):
        entries.append((f"failure.{index}", failure))
    current = ""
    for line in config_mod.dump_config(cfg).strip().splitlines():
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("["):
            current = stripped.strip("[]")
            continue
        key, _, value = stripped.partition("=")
        entries.append((f"config.{current}.{key.strip()}", value.strip()))
    report.write_manifest(os.path.join(args.out, "manifest.txt"), entries)
    for method in sorted(set(methods)):
        points = [r for r in sweep.rows if r.method == method]
        rates = ", ".join(
            f"{r.grid_value:g}:{r.error_rate:.3f}" for r in points
        )
        print(f"{method}: {rates}")
    if sweep.failures:
        print(f"{len(sweep.failures)} trial failure(s); see manifest", file=sys.stderr)
    return EXIT_OK


def cmd_plot(args):
    try:
        rows = report.read_results_csv(args.results)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    report.render_error_rates(rows, args.out)
    return EXIT_OK


def main(argv=None):
    args = _build_parser().parse_args(argv)
    if args.command == "estimate":
        return cmd_estimate(args)
    if args.command == "simulate":
        return cmd_simulate(args)
    return cmd_plot(args)


if __name__ == "__main__":
    sys.exit(main())
