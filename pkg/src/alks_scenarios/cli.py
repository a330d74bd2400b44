"""Command line interface: one subcommand per pipeline stage.

Machine-readable results go to files or standard output, diagnostics to
standard error.  The exit code is 0 only when no error occurred.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from functools import partial
from pathlib import Path
from typing import List, Optional

from .database import atomic_write_text, dumps_lines, read_database, write_database
from .detection import DetectionConfig
from .exceptions import ExportError, IngestError, ReplayError, TriggerError
from .export import PROFILES, export_all
from .extraction import SCENARIO_TYPES, OddConfig, filter_odd
from .ingest import canonicalize, find_recordings, load_recording
from .pipeline import extract_files
from .replay import DEFAULT_TIMESTEP, replay, write_trace_csv
from .stats import compare, mean_rmse, scenario_ref, summarize, write_gnuplot_tables
from .synthetic import plants_from_json, synthesize_recording, write_highd_csv, write_ledger

log = logging.getLogger("alks_scenarios")


class CommandError(Exception):
    """A failure already described for the user; the command exits with status 1."""


def _timestep(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0 < value <= 0.1:
        raise argparse.ArgumentTypeError(f"timestep must lie in (0, 0.1] s, got {text}")
    return value


def _positive(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return value


def _jobs(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("--jobs must be at least 1")
    return value


def _map(func, items, jobs: int):
    if jobs <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(func, items))


def _odd(args) -> OddConfig:
    return OddConfig(max_ego_velocity=args.max_ego_speed,
                     min_peak_deceleration=args.brake_threshold,
                     min_swerve_range=args.swerve_range,
                     max_cutin_thw=args.max_cutin_thw)


def _print_json(obj):
    sys.stdout.write(json.dumps(obj, sort_keys=True) + "\n")


# -- subcommands ---------------------------------------------------------------


def cmd_extract(args) -> int:
    config = DetectionConfig(brake_peak_threshold=args.brake_threshold,
                             swerve_range_threshold=args.swerve_range)
    triples = []
    for directory in args.inputs:
        path = Path(directory)
        if not path.is_dir():
            raise CommandError(f"{path}: not a directory")
        found = find_recordings(path)
        if not found:
            log.warning("%s: no *_recordingMeta.csv files found", path)
        triples.extend(found)

    scenarios, skips, failed = [], Counter(), 0
    results = _map(partial(_extract_safe, config=config), triples, args.jobs)
    for paths, (result, error) in zip(triples, results):
        if error is not None:
            log.error("%s", error)
            failed += 1
            continue
        found, skipped, warnings = result
        for w in warnings:
            log.warning("%s: %s", paths[0].name, w)
        scenarios.extend(found)
        skips.update(skipped)

    write_database(scenarios, args.output)
    counts = Counter(s.kind for s in scenarios)
    _print_json({"recordings": len(triples) - failed, "failed": failed,
                 "scenarios": {k: counts.get(k, 0) for k in SCENARIO_TYPES},
                 "skipped": dict(sorted(skips.items()))})
    return 1 if failed else 0


def _extract_safe(paths, config):
    try:
        return extract_files(paths, config), None
    except (IngestError, ValueError, OSError) as exc:
        return None, str(exc)


def cmd_filter(args) -> int:
    db = read_database(args.database)
    kept = filter_odd(db, _odd(args))
    write_database(kept, args.output)
    _print_json({"input": len(db), "kept": len(kept)})
    return 0


def cmd_export(args) -> int:
    db = read_database(args.database)
    dirs = export_all(db, PROFILES[args.profile], args.output, jobs=args.jobs)
    for d in dirs:
        sys.stdout.write(f"{d}\n")
    return 0


def _load_canonical(paths):
    return canonicalize(load_recording(*paths))


def cmd_replay_validate(args) -> int:
    db = read_database(args.database)
    triples = [t for d in args.recordings for t in find_recordings(d)]
    recordings = {r.meta.recording_id: r for r in _map(_load_canonical, triples, args.jobs)}
    missing = sorted({s.recording_id for s in db} - set(recordings))
    if missing:
        raise CommandError(f"database references recording id(s) {missing} not found in "
                           f"{', '.join(map(str, args.recordings))}")
    reports = []
    for s in db:
        trace = replay(s, args.timestep)
        if args.traces:
            write_trace_csv(trace, Path(args.traces) / f"{scenario_ref(s).replace(':', '_')}.csv")
        reports.append(compare(s, recordings[s.recording_id], args.timestep, trace))
    atomic_write_text(args.output, dumps_lines(r.to_dict() for r in reports))
    summary = {"scenarios": len(reports)}
    for kind in SCENARIO_TYPES:
        subset = [r for r, s in zip(reports, db) if s.kind == kind]
        if subset:
            means = mean_rmse(subset)
            summary[kind] = {"n": len(subset), "mean_rmse_velocity_kmh": means["rmse_velocity"],
                             "mean_rmse_lateral_m": means["rmse_lateral"]}
    _print_json(summary)
    return 0


def cmd_stats(args) -> int:
    report = summarize(read_database(args.database), _odd(args))
    text = dumps_lines(report.to_records())
    if args.output:
        atomic_write_text(args.output, text)
    else:
        sys.stdout.write(text)
    if args.gnuplot:
        write_gnuplot_tables(report, args.gnuplot)
    return 0


def cmd_synth(args) -> int:
    with open(args.plants, encoding="utf-8") as fh:
        data = json.load(fh)
    try:
        plants, meta, background = plants_from_json(data)
    except (TypeError, KeyError) as exc:
        raise CommandError(f"{args.plants}: bad plant file: {exc}") from None
    recording, ledger = synthesize_recording(plants, meta, seed=args.seed, background=background)
    paths = write_highd_csv(recording, args.output)
    ledger_path = write_ledger(ledger, Path(args.output) / f"{recording.meta.recording_id:02d}_ledger.jsonl")
    for p in (*paths, ledger_path):
        sys.stdout.write(f"{p}\n")
    return 0


# -- parser --------------------------------------------------------------------


def _add_odd_flags(p):
    p.add_argument("--max-ego-speed", type=_positive, default=70.0, metavar="KMH",
                   help="largest initial ego speed kept (km/h, default 70)")
    p.add_argument("--brake-threshold", type=_positive, default=2.0, metavar="MPS2",
                   help="smallest peak deceleration of a brake scenario (m/s^2, default 2.0)")
    p.add_argument("--swerve-range", type=_positive, default=1.2, metavar="M",
                   help="smallest lateral range of a swerve scenario (m, default 1.2)")
    p.add_argument("--max-cutin-thw", type=_positive, default=None, metavar="S",
                   help="optional largest time headway of a cut-in (s)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="alks-scenarios", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="more diagnostics")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="detect scenarios in highD recordings")
    p.add_argument("inputs", nargs="+", help="directories holding *_recordingMeta.csv files")
    p.add_argument("-o", "--output", required=True, help="scenario database (JSON lines)")
    p.add_argument("--brake-threshold", type=_positive, default=2.0, metavar="MPS2",
                   help="peak deceleration that marks a brake maneuver (m/s^2, default 2.0)")
    p.add_argument("--swerve-range", type=_positive, default=1.2, metavar="M",
                   help="lateral range that marks a swerve (m, default 1.2)")
    p.add_argument("--jobs", type=_jobs, default=1)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("filter", help="apply the operational design domain bounds")
    p.add_argument("database")
    p.add_argument("-o", "--output", required=True)
    _add_odd_flags(p)
    p.set_defaults(func=cmd_filter)

    p = sub.add_parser("export", help="write OpenSCENARIO/OpenDRIVE files")
    p.add_argument("database")
    p.add_argument("-o", "--output", required=True, help="output directory")
    p.add_argument("--profile", choices=sorted(PROFILES), default="generic")
    p.add_argument("--jobs", type=_jobs, default=1)
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("replay-validate", help="replay scenarios and compare with the recordings")
    p.add_argument("database")
    p.add_argument("recordings", nargs="+", help="directories holding the source recordings")
    p.add_argument("-o", "--output", required=True, help="comparison reports (JSON lines)")
    p.add_argument("--timestep", type=_timestep, default=DEFAULT_TIMESTEP, metavar="S")
    p.add_argument("--traces", metavar="DIR", help="also write each replay trace as CSV")
    p.add_argument("--jobs", type=_jobs, default=1)
    p.set_defaults(func=cmd_replay_validate)

    p = sub.add_parser("stats", help="scenario counts and parameter histograms")
    p.add_argument("database")
    p.add_argument("-o", "--output", help="report file (JSON lines); standard output if omitted")
    p.add_argument("--gnuplot", metavar="DIR", help="also write histogram tables for gnuplot")
    _add_odd_flags(p)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("synth", help="write a synthetic recording with planted scenarios")
    p.add_argument("plants", help="JSON plant description")
    p.add_argument("-o", "--output", required=True, help="output directory")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(stream=sys.stderr, format="alks-scenarios: %(levelname)s: %(message)s",
                        level=logging.DEBUG if args.verbose else logging.INFO)
    try:
        return args.func(args)
    except (CommandError, IngestError, ExportError, ReplayError, TriggerError,
            ValueError, OSError) as exc:
        log.error("%s", exc)
        return 1


if __name__ == "__main__":
    sys.exit(main())
