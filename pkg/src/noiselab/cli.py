"""Batch front end: identifiability checks, simulation, estimation and
oracle comparison driven by a single JSON configuration file.

Exit codes are a stable contract: 0 on success (and identifiable), 2 when the
logical channel is not identifiable, 1 on usage or data errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import __version__
from .codes import coset_transversal
from .errors import NoiseLabError, NotIdentifiableError
from .estimation import (
    DEFAULT_ROW_CAP,
    adjusted_data_syndrome_model,
    ds_postprocess,
    estimate_logical_moments,
    exact_measured_moments,
    identifiability_check,
    logical_channel_probabilities,
)
from .config import load_config
from .noise import MomentTable
from .oracle import brute_fourier, coset_logical_channel, full_distribution
from .pauli import element_to_string, enumerate_group, parse_element
from .simulate import (
    dataset_to_csv,
    empirical_moments,
    load_dataset,
    run_rounds,
    save_dataset,
    save_sidecar,
)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NOT_IDENTIFIABLE = 2

CHANNEL_AUTO_RANK = 12
EMPIRICAL_ROW_CAP = 1 << 16


def _default_threads() -> int:
    env = os.environ.get("NOISE_LAB_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


def _emit(report: dict, out_path) -> None:
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _stamp(report: dict, cfg) -> dict:
    report["version"] = __version__
    report["config_sha256"] = cfg.sha256
    return report


def _solve_model(cfg):
    if cfg.code.kind == "data-syndrome":
        return adjusted_data_syndrome_model(cfg.model)
    return cfg.model


def _resolve_targets(spec: str, code):
    if spec == "all-cosets":
        return coset_transversal(code.logical, code.meas)
    if spec == "all":
        return list(enumerate_group(code.logical))
    targets = []
    for token in spec.split(","):
        token = token.strip()
        if token:
            targets.append(parse_element(token, ambient=code.ambient))
    if not targets:
        raise ValueError("empty target list")
    return targets


def cmd_check(args) -> int:
    cfg = load_config(args.config)
    report = identifiability_check(cfg.code, _solve_model(cfg), row_cap=args.row_cap)
    _emit(_stamp(report.to_dict(), cfg), args.out)
    return EXIT_OK if report.identifiable else EXIT_NOT_IDENTIFIABLE


def cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    dataset = run_rounds(
        cfg.code, cfg.model, args.rounds, seed=args.seed, threads=args.threads
    )
    dataset.meta["config_sha256"] = cfg.sha256
    dataset.meta["version"] = __version__
    save_dataset(args.out, dataset, n_pauli=cfg.code.n_pauli)
    save_sidecar(args.out + ".json", dataset)
    if args.csv:
        dataset_to_csv(args.csv, dataset)
    return EXIT_OK


def _moment_rows(table: MomentTable) -> list[dict]:
    rows = []
    for a in sorted(table.entries, key=lambda e: e.sort_key()):
        row = {"element": element_to_string(a), "value": table.entries[a]}
        if table.stderr is not None:
            row["stderr"] = table.stderr.get(a, 0.0)
        rows.append(row)
    return rows


def _channel_block(e_all: MomentTable, code) -> dict:
    reps = coset_transversal(code.logical, code.gauge)
    dist = logical_channel_probabilities(e_all, code, reps)
    gauge_size = 1 << code.gauge.rank
    return {
        "cosets": [
            {
                "representative": element_to_string(r),
                "probability": dist[r],
                "coset_mass": dist[r] * gauge_size,
            }
            for r in reps
        ]
    }


def cmd_estimate(args) -> int:
    cfg = load_config(args.config)
    code = cfg.code
    solve_model = _solve_model(cfg)
    check = identifiability_check(code, solve_model, row_cap=args.row_cap)
    report = _stamp(check.to_dict(), cfg)
    report["mode"] = "exact" if args.exact else "empirical"
    if not check.identifiable:
        report["warnings"] = ["not identifiable; no moments estimated"]
        _emit(report, args.out)
        return EXIT_NOT_IDENTIFIABLE

    if args.exact:
        table = exact_measured_moments(code, solve_model, row_cap=args.row_cap)
    else:
        dataset = load_dataset(args.data)
        if (1 << code.meas.rank) > EMPIRICAL_ROW_CAP:
            raise ValueError(
                "measured group too large for full empirical moment estimation"
            )
        elements = list(enumerate_group(code.meas))
        table = empirical_moments(dataset, code, elements)

    targets = _resolve_targets(args.targets, code)
    result = estimate_logical_moments(table, code, solve_model, targets)
    moments = result.moments
    if code.kind == "data-syndrome":
        moments = ds_postprocess(moments, code)
        report["ds_normalization"] = {
            "constant": 1.0,
            "note": "paired-round moments divided by the square root of the "
            "bit-marginal moment; constant pinned by the two-round oracle",
        }
    report["logical_moments"] = _moment_rows(moments)
    warnings = list(result.warnings)
    warnings.extend(f"dropped {element_to_string(t)}: {why}" for t, why in result.dropped)

    want_channel = args.channel == "on" or (
        args.channel == "auto" and code.logical.rank <= CHANNEL_AUTO_RANK
    )
    if want_channel:
        all_logical = list(enumerate_group(code.logical))
        full = estimate_logical_moments(table, code, solve_model, all_logical).moments
        if code.kind == "data-syndrome":
            full = ds_postprocess(full, code)
        report["logical_channel"] = _channel_block(full, code)
    report["warnings"] = warnings
    _emit(report, args.out)
    return EXIT_OK


def cmd_oracle(args) -> int:
    cfg = load_config(args.config)
    code = cfg.code
    dist = full_distribution(cfg.model)
    targets = _resolve_targets(args.targets, code)
    entries = {t: brute_fourier(dist, t) for t in targets}
    table = MomentTable(entries=entries, tag="exact")
    report = _stamp({"logical_moments": _moment_rows(table)}, cfg)
    reps = coset_transversal(code.logical, code.gauge)
    report["logical_channel"] = {
        "cosets": [
            {
                "representative": element_to_string(r),
                "probability": coset_logical_channel(dist, code.gauge, r),
                "coset_mass": coset_logical_channel(dist, code.gauge, r)
                * (1 << code.gauge.rank),
            }
            for r in reps
        ]
    }
    if args.against:
        with open(args.against) as fh:
            other = json.load(fh)
        theirs = {
            row["element"]: row["value"] for row in other.get("logical_moments", [])
        }
        deviations = [
            abs(entries[t] - theirs[element_to_string(t)])
            for t in targets
            if element_to_string(t) in theirs
        ]
        max_dev = max(deviations) if deviations else None
        report["max_deviation_vs_estimate"] = max_dev
        print(f"estimate-vs-oracle max deviation: {max_dev}", file=sys.stderr)
    _emit(report, args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="noiselab",
        description="Identifiability checks and logical-noise estimation from "
        "syndrome statistics.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_check = sub.add_parser("check", help="decide identifiability for a config")
    p_check.add_argument("config")
    p_check.add_argument("--out", default=None, help="report JSON path (default stdout)")
    p_check.add_argument("--row-cap", type=int, default=DEFAULT_ROW_CAP)
    p_check.set_defaults(func=cmd_check)

    p_sim = sub.add_parser("simulate", help="generate a syndrome dataset")
    p_sim.add_argument("config")
    p_sim.add_argument("--rounds", type=int, required=True)
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.add_argument("--out", required=True, help="binary dataset path")
    p_sim.add_argument("--csv", default=None, help="also export rows as CSV")
    p_sim.add_argument("--threads", type=int, default=_default_threads())
    p_sim.set_defaults(func=cmd_simulate)

    p_est = sub.add_parser("estimate", help="estimate logical moments")
    p_est.add_argument("config")
    mode = p_est.add_mutually_exclusive_group(required=True)
    mode.add_argument("--exact", action="store_true", help="use exact model moments")
    mode.add_argument("--data", default=None, help="syndrome dataset path")
    p_est.add_argument(
        "--targets",
        default="all-cosets",
        help="'all-cosets', 'all', or comma-separated element strings",
    )
    p_est.add_argument("--channel", choices=("auto", "on", "off"), default="auto")
    p_est.add_argument("--out", default=None)
    p_est.add_argument("--row-cap", type=int, default=DEFAULT_ROW_CAP)
    p_est.add_argument("--threads", type=int, default=_default_threads())
    p_est.set_defaults(func=cmd_estimate)

    p_or = sub.add_parser("oracle", help="brute-force reference values")
    p_or.add_argument("config")
    p_or.add_argument(
        "--targets",
        default="all-cosets",
        help="'all-cosets', 'all', or comma-separated element strings",
    )
    p_or.add_argument("--against", default=None, help="estimate report to compare")
    p_or.add_argument("--out", default=None)
    p_or.set_defaults(func=cmd_oracle)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NotIdentifiableError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_IDENTIFIABLE
    except (NoiseLabError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
