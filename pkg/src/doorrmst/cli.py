"""Command-line front end.

Four subcommands: ``analyze`` a dataset, ``simulate`` one trial,
``study`` the replicated quality and power runs, ``oracle`` for Monte
Carlo truths. Exit codes: 0 success, 2 usage, 3 configuration or schema
or record validation problems, 4 estimation preconditions (nobody at
risk, singular covariance, too few usable replicates), 5 file I/O.
"""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys

from ._version import __version__
from .config import AnalysisSettings, load_config
from .dataio import (
    file_digest,
    read_dataset,
    write_km_curves_csv,
    write_wide_csv,
)
from .door import CONTROL, TREATMENT
from .errors import (
    ConfigError,
    EmptyCohort,
    InsufficientReplicates,
    NoRiskAtTau,
    SchemaError,
    SingularCovariance,
    ValidationError,
)
from .km import build_risk_table, km_fit
from .oracle import true_rmst_mc
from .report import build_report, render_text, write_estimates_csv, write_tests_csv
from .rmst import estimate_arm
from .rng import child_seed
from .simulate import simulate_trial
from .study import (
    run_power_study,
    run_table1_study,
    write_power_csv,
    write_table1_csv,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_SCHEMA = 3
EXIT_PRECONDITION = 4
EXIT_IO = 5

# spawn-key namespace separating oracle streams from replicate streams
_ORACLE_BRANCH = 9


def _dedupe_taus(taus):
    return tuple(dict.fromkeys(float(t) for t in taus))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="doorrmst",
        description="Restricted mean survival analysis over tiered ordinal outcomes.",
    )
    parser.add_argument("--version", action="version", version=f"doorrmst {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    pa = sub.add_parser("analyze", help="estimate tier means and run tests on a dataset")
    pa.add_argument("--data", required=True, help="wide or longitudinal CSV")
    pa.add_argument("--config", help="TOML configuration")
    pa.add_argument("--out-dir", default=".", help="directory for report files")
    pa.add_argument("--tau", action="append", type=float,
                    help="restriction horizon; repeatable, overrides configuration")
    pa.add_argument("--alpha", type=float, help="two-sided level, default 0.05")
    pa.add_argument("--format", choices=("text", "csv"), default="text",
                    help="stdout summary format")
    pa.add_argument("--no-plots", action="store_true", help="skip SVG figures")
    pa.set_defaults(func=cli_analyze)

    ps = sub.add_parser("simulate", help="draw one two-arm trial and write it as CSV")
    ps.add_argument("--config", required=True)
    ps.add_argument("--out-dir", default=".")
    ps.add_argument("--out", help="output CSV path (default out-dir/simulated_trial.csv)")
    ps.add_argument("--seed", type=int, help="override the configured seed")
    ps.set_defaults(func=cli_simulate)

    pt = sub.add_parser("study", help="replicated estimator-quality and power studies")
    pt.add_argument("--config", required=True)
    pt.add_argument("--out-dir", default=".")
    pt.add_argument("--alpha", type=float)
    pt.add_argument("--seed", type=int)
    pt.add_argument("--jobs", type=int, default=1, help="worker threads")
    pt.add_argument("--no-plots", action="store_true")
    pt.set_defaults(func=cli_study)

    po = sub.add_parser("oracle", help="Monte Carlo truth for a configured rate vector")
    po.add_argument("--config", required=True)
    po.add_argument("--arm", choices=(CONTROL, TREATMENT, "null"), default=CONTROL,
                    help="which configured rate vector to evaluate")
    po.add_argument("--tau", action="append", type=float)
    po.add_argument("--reps", type=int, help="Monte Carlo draws per horizon")
    po.add_argument("--seed", type=int)
    po.add_argument("--format", choices=("text", "csv"), default="text")
    po.set_defaults(func=cli_oracle)
    return parser


def _ensure_dir(path: str) -> None:
    os.makedirs(path, exist_ok=True)


def cli_analyze(args) -> int:
    if args.config:
        run = load_config(args.config, tau_override=args.tau, alpha_override=args.alpha)
        analysis = run.analysis
        door_cfg = run.door
        digest = run.digest
    else:
        if not args.tau:
            raise ConfigError("provide --config or at least one --tau")
        analysis = AnalysisSettings(
            tau_list=_dedupe_taus(args.tau),
            alpha=args.alpha if args.alpha is not None else 0.05,
        )
        door_cfg = None
        digest = "none"
    taus = _dedupe_taus(analysis.tau_list)
    if not taus:
        raise ConfigError("no restriction horizons: set analysis.tau or pass --tau")

    door, cohorts = read_dataset(args.data, door_cfg, analysis.round_decimals)
    estimates = {
        tau: {arm: estimate_arm(cohort, tau) for arm, cohort in sorted(cohorts.items())}
        for tau in taus
    }
    report = build_report(
        config_digest=digest,
        data_digest=file_digest(args.data),
        door=door,
        alpha=analysis.alpha,
        estimates=estimates,
        tests=analysis.tests,
        single_null=analysis.single_null,
        within_pairs=analysis.within_pairs,
    )

    _ensure_dir(args.out_dir)
    text = render_text(report)
    with open(os.path.join(args.out_dir, "report.txt"), "w") as fh:
        fh.write(text)
    write_estimates_csv(report, os.path.join(args.out_dir, "estimates.csv"))
    write_tests_csv(report, os.path.join(args.out_dir, "tests.csv"))
    curves = {
        (arm, tier): km_fit(build_risk_table(cohort, tier))
        for arm, cohort in sorted(cohorts.items())
        for tier in range(1, door.num_tiers + 1)
    }
    write_km_curves_csv(os.path.join(args.out_dir, "km_curves.csv"), curves)
    if not args.no_plots:
        from .plots import km_staircase_figure

        km_staircase_figure(
            curves, os.path.join(args.out_dir, "km_curves.svg"), tau=max(taus)
        )

    if args.format == "text":
        sys.stdout.write(text)
    else:
        write_estimates_csv(report, sys.stdout)
    return EXIT_OK


def cli_simulate(args) -> int:
    run = load_config(args.config, seed_override=args.seed)
    if run.sim is None:
        raise ConfigError("simulate needs a [simulation] section")
    control, treatment = simulate_trial(run.sim)
    path = args.out or os.path.join(args.out_dir, "simulated_trial.csv")
    _ensure_dir(os.path.dirname(path) or ".")
    write_wide_csv(path, [control, treatment])
    print(f"wrote {path} ({control.n + treatment.n} subjects, config {run.digest})")
    return EXIT_OK


def cli_study(args) -> int:
    run = load_config(args.config, alpha_override=args.alpha, seed_override=args.seed)
    if run.sim is None:
        raise ConfigError("study needs a [simulation] section")
    if run.sim.replicates < 1:
        raise ConfigError("simulation.replicates must be at least 1 for study runs")
    sim = run.sim
    alpha = run.analysis.alpha
    _ensure_dir(args.out_dir)

    truths = {
        tau: true_rmst_mc(
            sim.rates_control,
            tau,
            reps=run.study.oracle_reps,
            seed=child_seed(sim.seed, _ORACLE_BRANCH, k),
        )
        for k, tau in enumerate(sim.tau_list)
    }
    summary_lines = [f"study (config {run.digest}, seed {sim.seed})"]
    for n in run.study.table1_n:
        rows = run_table1_study(
            dataclasses.replace(sim, n_per_arm=n), truths, n_jobs=args.jobs
        )
        path = os.path.join(args.out_dir, f"table1_n{n}.csv")
        write_table1_csv(rows, path)
        summary_lines.append(f"\nestimator quality, {n} subjects per arm ({path})")
        summary_lines.append("tier  tau    bias    se     see    cp     events")
        for r in rows:
            summary_lines.append(
                f"{r.tier:<5d} {r.tau:<6g} {r.bias:<7.3f} {r.se:<6.3f} "
                f"{r.see:<6.3f} {r.cp:<6.3f} {r.events:.2f}"
            )

    power_rows = run_power_study(
        sim, alpha=alpha, n_grid=run.study.power_n, n_jobs=args.jobs
    )
    write_power_csv(power_rows, os.path.join(args.out_dir, "power.csv"))

    null_rates = (
        run.study.null_rates if run.study.null_rates is not None else sim.rates_treatment
    )
    null_sim = dataclasses.replace(
        sim, rates_control=null_rates, rates_treatment=null_rates
    )
    calib_rows = run_power_study(
        null_sim, alpha=alpha, n_grid=run.study.power_n, n_jobs=args.jobs
    )
    write_power_csv(calib_rows, os.path.join(args.out_dir, "calibration.csv"))

    if not args.no_plots:
        from .plots import km_staircase_figure, power_figure

        power_figure(power_rows, os.path.join(args.out_dir, "power_curves.svg"))
        power_figure(
            calib_rows,
            os.path.join(args.out_dir, "calibration_curves.svg"),
            title="type-I error rate",
        )
        control, treatment = simulate_trial(sim)
        curves = {
            (arm.arm, tier): km_fit(build_risk_table(arm, tier))
            for arm in (control, treatment)
            for tier in range(1, arm.num_tiers + 1)
        }
        km_staircase_figure(
            curves, os.path.join(args.out_dir, "km_example.svg"), tau=max(sim.tau_list)
        )

    summary_lines.append(f"\npower rows: {len(power_rows)}, calibration rows: {len(calib_rows)}")
    print("\n".join(summary_lines))
    return EXIT_OK


def cli_oracle(args) -> int:
    run = load_config(args.config, tau_override=args.tau, seed_override=args.seed)
    if run.sim is None:
        raise ConfigError("oracle needs a [simulation] section")
    if args.arm == CONTROL:
        rates = run.sim.rates_control
    elif args.arm == TREATMENT:
        rates = run.sim.rates_treatment
    else:
        rates = (
            run.study.null_rates
            if run.study.null_rates is not None
            else run.sim.rates_treatment
        )
    taus = _dedupe_taus(run.analysis.tau_list or run.sim.tau_list)
    reps = args.reps if args.reps is not None else run.study.oracle_reps
    results = [
        (
            tau,
            true_rmst_mc(
                rates, tau, reps=reps, seed=child_seed(run.sim.seed, _ORACLE_BRANCH, k)
            ),
        )
        for k, tau in enumerate(taus)
    ]
    if args.format == "text":
        print(f"true restricted means ({args.arm} rates, {reps} draws, config {run.digest})")
        for tau, res in results:
            cells = "  ".join(
                f"tier{j + 1} {v:.3f} (mc se {s:.4f})"
                for j, (v, s) in enumerate(zip(res.values, res.mc_standard_error))
            )
            print(f"tau={tau:g}  {cells}")
    else:
        print("tau,tier,value,mc_se")
        for tau, res in results:
            for j, (v, s) in enumerate(zip(res.values, res.mc_standard_error)):
                print(f"{tau!r},{j + 1},{v!r},{s!r}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except (ConfigError, SchemaError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except (NoRiskAtTau, SingularCovariance, InsufficientReplicates, EmptyCohort) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
