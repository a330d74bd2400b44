#!/usr/bin/env python3
"""Check scenario counts on the real highD recordings 1 to 60.

Needs a highD licence.  Point ``HIGHD_DIR`` (or the first argument) at the
dataset's ``data`` directory.  The expected numbers after the default ODD
filter are 136 cut-in and 38 brake scenarios, with a largest peak
deceleration of 3.3 m/s^2 among the brakes.  ``--check-rmse`` also replays
the filtered scenarios and requires a mean velocity RMSE of at most 6 km/h.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from alks_scenarios.extraction import BrakeScenario, OddConfig, filter_odd
from alks_scenarios.ingest import canonicalize, load_recording
from alks_scenarios.pipeline import extract_scenarios
from alks_scenarios.stats import compare, mean_rmse

EXPECTED = {"cutin": 136, "brake": 38}
EXPECTED_MAX_DECELERATION = 3.3
RMSE_CEILING = 6.0  # km/h
RECORDINGS = range(1, 61)


def _paths(root: Path, rid: int):
    prefix = f"{rid:02d}"
    return tuple(root / f"{prefix}_{name}.csv" for name in ("recordingMeta", "tracksMeta", "tracks"))


def reproduce(root: Path, check_rmse: bool = False) -> dict:
    kept, reports = [], []
    for rid in RECORDINGS:
        paths = _paths(root, rid)
        missing = [p for p in paths if not p.exists()]
        if missing:
            raise FileNotFoundError(f"recording {rid}: missing {missing[0]}")
        recording = canonicalize(load_recording(*paths))
        scenarios = filter_odd(extract_scenarios(recording), OddConfig())
        kept.extend(scenarios)
        if check_rmse:
            reports.extend(compare(s, recording) for s in scenarios if s.kind == "brake")

    counts = {kind: sum(s.kind == kind for s in kept) for kind in ("cutin", "brake", "swerve")}
    peaks = [s.peak_deceleration for s in kept if isinstance(s, BrakeScenario)]
    max_decel = max(peaks) if peaks else float("nan")
    ok = (counts["cutin"] == EXPECTED["cutin"] and counts["brake"] == EXPECTED["brake"]
          and round(max_decel, 1) == EXPECTED_MAX_DECELERATION)
    result = {"counts": counts, "max_deceleration": max_decel}
    if check_rmse:
        rmse = mean_rmse(reports)["rmse_velocity"]
        result["mean_rmse_velocity_kmh"] = rmse
        ok = ok and rmse <= RMSE_CEILING
    result["ok"] = ok
    result["summary"] = (f"cut-in {counts['cutin']} (want {EXPECTED['cutin']}), "
                         f"brake {counts['brake']} (want {EXPECTED['brake']}), "
                         f"max deceleration {max_decel:.2f} (want {EXPECTED_MAX_DECELERATION})")
    return result


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("data_dir", nargs="?", default=os.environ.get("HIGHD_DIR"))
    parser.add_argument("--check-rmse", action="store_true")
    args = parser.parse_args(argv)
    if not args.data_dir:
        parser.error("pass the highD data directory or set HIGHD_DIR")
    result = reproduce(Path(args.data_dir), args.check_rmse)
    json.dump(result, sys.stdout, indent=2)
    sys.stdout.write("\n")
    return 0 if result["ok"] else 1


if __name__ == "__main__":
    sys.exit(main())
