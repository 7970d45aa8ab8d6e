"""Command-line interface: estimate, sweep, orbit, bench.

Exit codes: 0 success, 2 configuration error, 3 numerical error. All file
output lands in the --out directory together with a manifest that echoes the
resolved configuration and digests every emitted file.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import secrets
import sys
import time
from datetime import datetime, timezone

from . import __version__, config as cfgmod, plots, scenarios
from .errors import ConfigurationError, NumericalError
from .music import detect_peaks, music_spectrum, score_detection, write_spectrum_csv
from .orbit import OrbitSpec, orbit_metrics, spot_metrics
from .scenarios import (SCENARIO_NAMES, run_sweep, scenario_config,
                        timing_report, timing_scenario_configs)
from .signal_synth import synthesize
from .subspace import eig_hermitian, sample_covariance, split_subspaces


def _utc_now() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%S.%fZ")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH",
                        help="JSON run configuration (flags override fields)")
    common.add_argument("--seed", type=int, metavar="U64",
                        help="top-level seed for all randomness")
    common.add_argument("--out", metavar="DIR",
                        help="output directory (default from config: runs)")
    common.add_argument("--paper-compat", action="store_true",
                        help="rounded constants: propagation speed 3.0e8 m/s, "
                             "circle constant 3.14")
    common.add_argument("--threads", type=int, metavar="N",
                        help="parallel trials (default 1 for timing fidelity)")
    common.add_argument("--no-plot", action="store_true",
                        help="skip PNG figure rendering")
    common.add_argument("--print-config", action="store_true",
                        help="print the default configuration document and exit")

    parser = argparse.ArgumentParser(
        prog="islmusic",
        description="MUSIC direction-of-arrival simulator for inter-satellite links",
        parents=[common])
    parser.add_argument("--version", action="version", version=f"islmusic {__version__}")
    sub = parser.add_subparsers(dest="command")

    sub.add_parser("estimate", parents=[common],
                   help="single end-to-end run: spectrum CSV + detection JSON")

    p_sweep = sub.add_parser("sweep", parents=[common],
                             help="named Monte-Carlo sweep, CSV + manifest")
    p_sweep.add_argument("scenario", help=f"one of: {', '.join(SCENARIO_NAMES)}")

    p_orbit = sub.add_parser("orbit", parents=[common],
                             help="circular-orbit metrics JSON")
    p_orbit.add_argument("altitude_km", type=float)
    p_orbit.add_argument("period_min", type=float)

    p_bench = sub.add_parser("bench", parents=[common],
                             help="timing study plus orbit-deadline verdict")
    p_bench.add_argument("--altitude-km", type=float, default=830.0)
    p_bench.add_argument("--period-min", type=float, default=101.0)

    return parser


def _load_run_config(args) -> cfgmod.RunConfig:
    doc = None
    origin = "defaults"
    if args.config:
        doc = cfgmod.load_config_file(args.config)
        origin = args.config
    run = cfgmod.parse_config(doc, origin=origin)
    updates = {}
    if args.seed is not None:
        updates["seed"] = args.seed
    if args.out is not None:
        updates["out_dir"] = args.out
    if args.paper_compat:
        updates["constants"] = "paper-compat"
    if args.threads is not None:
        if args.threads < 1:
            raise ConfigurationError(f"--threads must be >= 1, got {args.threads}")
        updates["threads"] = args.threads
    if args.no_plot:
        updates["plots"] = False
    if updates:
        run = dataclasses.replace(run, provided=run.provided | set(updates), **updates)
    return run


def _resolve_seed(run: cfgmod.RunConfig) -> int:
    if run.seed is not None:
        return run.seed
    return secrets.randbits(63)


def _finish(run, command, config_doc, seed, out_dir, outputs, started) -> None:
    cfgmod.write_manifest(out_dir, command, config_doc, seed, run.constants,
                          started, _utc_now(), outputs)


def cmd_estimate(args) -> int:
    run = _load_run_config(args)
    seed = _resolve_seed(run)
    started = _utc_now()
    if run.random_sources or not run.sources:
        raise ConfigurationError("estimate needs explicit sources in the configuration")

    geometry = run.geometry()
    carrier = run.carrier()
    sources = run.source_set()

    snapshots = synthesize(geometry, carrier, sources, run.n_snapshots, run.noise, seed)
    covariance = sample_covariance(snapshots)
    split = split_subspaces(eig_hermitian(covariance), len(sources))
    spectrum = music_spectrum(split, geometry, carrier, run.grid, run.polar_deg)
    detection = detect_peaks(spectrum, len(sources))
    detection = score_detection(detection, sources.azimuths(), run.tolerance_deg)

    out_dir = run.out_dir
    os.makedirs(out_dir, exist_ok=True)
    outputs = ["spectrum.csv", "detection.json"]
    write_spectrum_csv(spectrum, os.path.join(out_dir, "spectrum.csv"))
    detection_doc = detection.to_json_dict()
    detection_doc.update({
        "seed": seed,
        "constants_mode": run.constants,
        "tolerance_deg": run.tolerance_deg,
        "n_snapshots": run.n_snapshots,
        "noise": run.noise.describe(),
        "geometry_hash": geometry.content_hash(),
    })
    with open(os.path.join(out_dir, "detection.json"), "w") as fh:
        json.dump(detection_doc, fh, indent=2)
        fh.write("\n")
    if run.plots:
        plots.save_spectrum_plot(spectrum, os.path.join(out_dir, "spectrum.png"),
                                 detection=detection)
        outputs.append("spectrum.png")

    _finish(run, "estimate", run.to_document(seed), seed, out_dir, outputs, started)
    print(f"estimate: {len(detection.detected_azimuths_deg)} detections, "
          f"accuracy {detection.accuracy:.3f}, outputs in {out_dir}")
    return 0


def _sweep_config_for(name, run: cfgmod.RunConfig, seed: int):
    overrides = cfgmod.scenario_overrides(run)
    if run.sweep_axis is not None:
        base = scenario_config(name, seed=seed)
        if run.sweep_axis != base.swept_axis:
            raise ConfigurationError(
                f"scenario {name!r} sweeps {base.swept_axis!r}, but the config "
                f"sweep.axis says {run.sweep_axis!r}")
        overrides["swept_values"] = run.sweep_values
    return scenario_config(name, seed=seed, **overrides)


def cmd_sweep(args) -> int:
    name = args.scenario
    if name not in SCENARIO_NAMES:
        raise ConfigurationError(
            f"unknown scenario {name!r}; valid: {', '.join(SCENARIO_NAMES)}")
    run = _load_run_config(args)
    seed = _resolve_seed(run)
    started = _utc_now()
    out_dir = run.out_dir
    os.makedirs(out_dir, exist_ok=True)
    outputs = []

    if name == "timing":
        if run.sweep_axis is not None:
            raise ConfigurationError("the timing scenario does not take sweep overrides")
        overrides = cfgmod.scenario_overrides(run)
        overrides.pop("sources", None)
        overrides.pop("random_sources", None)
        trials = overrides.pop("trials", 100)
        n_snapshots = overrides.pop("n_snapshots", 1024)
        configs = timing_scenario_configs(seed=seed, trials=trials,
                                          n_snapshots=n_snapshots, **overrides)
        sweeps = {}
        for axis, cfg in configs.items():
            sweeps[axis] = run_sweep(cfg)
            csv_name = f"sweep_timing_{axis}.csv"
            sweeps[axis].write_csv(os.path.join(out_dir, csv_name))
            outputs.append(csv_name)
        metrics = spot_metrics(paper_compat=run.paper_compat)
        summary = timing_report(sweeps, metrics)
        report = {"orbit": metrics.to_json_dict(), **summary.to_json_dict()}
        with open(os.path.join(out_dir, "timing_report.json"), "w") as fh:
            json.dump(report, fh, indent=2)
            fh.write("\n")
        outputs.append("timing_report.json")
        if run.plots:
            plots.save_timing_plot(sweeps, summary,
                                   os.path.join(out_dir, "sweep_timing.png"))
            outputs.append("sweep_timing.png")
        print(f"sweep timing: max {summary.overall_max_s:.4f} s vs deadline "
              f"{summary.verdict.deadline_s:.2f} s: {summary.verdict.verdict}")
        config_doc = run.to_document(seed)
    else:
        cfg = _sweep_config_for(name, run, seed)
        sweep = run_sweep(cfg)
        csv_name = f"sweep_{name}.csv"
        sweep.write_csv(os.path.join(out_dir, csv_name))
        outputs.append(csv_name)
        if run.plots:
            png_name = f"sweep_{name}.png"
            plots.save_sweep_plot(sweep, os.path.join(out_dir, png_name))
            outputs.append(png_name)
        if name == "beamwidth":
            width = scenarios.resolved_beamwidth(sweep)
            print(f"sweep beamwidth: smallest reliably resolved separation: "
                  f"{width if width is not None else 'none in range'} deg")
        else:
            print(f"sweep {name}: {len(sweep.points)} points x {cfg.trials} trials, "
                  f"outputs in {out_dir}")
        config_doc = run.to_document(seed)
        config_doc["sweep"] = {
            "axis": cfg.swept_axis,
            "values": [list(v) if isinstance(v, tuple) else v for v in cfg.swept_values],
        }

    _finish(run, f"sweep {name}", config_doc, seed, out_dir, outputs, started)
    return 0


def cmd_orbit(args) -> int:
    if args.altitude_km <= 0 or args.period_min <= 0:
        raise ConfigurationError("altitude and period must be positive")
    spec = OrbitSpec(altitude_km=args.altitude_km, period_s=args.period_min * 60.0,
                     paper_compat=args.paper_compat)
    metrics = orbit_metrics(spec)
    doc = {
        "altitude_km": args.altitude_km,
        "period_min": args.period_min,
        "constants_mode": "paper-compat" if args.paper_compat else "exact",
        **metrics.to_json_dict(),
    }
    print(json.dumps(doc, indent=2))
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        with open(os.path.join(args.out, "orbit.json"), "w") as fh:
            json.dump(doc, fh, indent=2)
            fh.write("\n")
        cfgmod.write_manifest(args.out, "orbit", doc, None, doc["constants_mode"],
                              _utc_now(), _utc_now(), ["orbit.json"])
    return 0


def cmd_bench(args) -> int:
    if args.altitude_km <= 0 or args.period_min <= 0:
        raise ConfigurationError("altitude and period must be positive")
    run = _load_run_config(args)
    seed = _resolve_seed(run)
    started = _utc_now()
    out_dir = run.out_dir
    os.makedirs(out_dir, exist_ok=True)

    overrides = cfgmod.scenario_overrides(run)
    overrides.pop("sources", None)
    overrides.pop("random_sources", None)
    trials = overrides.pop("trials", 100)
    n_snapshots = overrides.pop("n_snapshots", 1024)
    configs = timing_scenario_configs(seed=seed, trials=trials,
                                      n_snapshots=n_snapshots, **overrides)
    outputs = []
    sweeps = {}
    for axis, cfg in configs.items():
        sweeps[axis] = run_sweep(cfg)
        csv_name = f"sweep_timing_{axis}.csv"
        sweeps[axis].write_csv(os.path.join(out_dir, csv_name))
        outputs.append(csv_name)

    spec = OrbitSpec(altitude_km=args.altitude_km, period_s=args.period_min * 60.0,
                     paper_compat=run.paper_compat)
    metrics = orbit_metrics(spec)
    summary = timing_report(sweeps, metrics)
    report = {"orbit": metrics.to_json_dict(), **summary.to_json_dict()}
    with open(os.path.join(out_dir, "bench_report.json"), "w") as fh:
        json.dump(report, fh, indent=2)
        fh.write("\n")
    outputs.append("bench_report.json")
    if run.plots:
        plots.save_timing_plot(sweeps, summary, os.path.join(out_dir, "bench.png"))
        outputs.append("bench.png")

    _finish(run, "bench", run.to_document(seed), seed, out_dir, outputs, started)
    verdict = summary.verdict
    print(f"bench: max pipeline time {summary.overall_max_s:.4f} s, deadline "
          f"{verdict.deadline_s:.2f} s, margin {verdict.margin_s:.2f} s: "
          f"{verdict.verdict}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.print_config:
            print(json.dumps(cfgmod.DEFAULT_CONFIG, indent=2))
            return 0
        if args.command is None:
            parser.print_usage(sys.stderr)
            print("islmusic: error: a command is required "
                  "(estimate, sweep, orbit, bench)", file=sys.stderr)
            return 2
        handlers = {
            "estimate": cmd_estimate,
            "sweep": cmd_sweep,
            "orbit": cmd_orbit,
            "bench": cmd_bench,
        }
        return handlers[args.command](args)
    except ConfigurationError as exc:
        print(f"islmusic: config error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"islmusic: numerical error: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"islmusic: config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
