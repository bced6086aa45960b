"""Batch command line interface.

Subcommands:

compute   discover artery/vein mask pairs in a directory, compute one
          biomarker report per mask (optionally in parallel), write
          per-image JSON reports, a cohort CSV table and annotated
          overlays.
compare   group a cohort table by a two-column labels file and emit a
          per-biomarker comparison table (median, quartiles, rank-test p).
overlay   render the annotated overlay of a single mask.

Options may come from a flat key=value config file (--config); command
line flags win over file values. Exit codes: 0 success, 1 data error,
2 usage error. Outputs are a pure function of (input bytes, config, seed):
processing order and worker count never change a single output byte.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .graph import ParticularPoints, branching_angles, build_connectivity, detect_particular_points
from .mask_io import load_mask, render_overlay, save_overlay
from .morphology import skeletonize
from .multifractal import ExclusionPolicy, MultifractalConfig
from .report import (
    AnalysisConfig,
    BIOMARKER_COLUMNS,
    compute_all,
    derive_seed,
    parse_table,
    reports_to_table,
    serialize_report,
)
from .stats import rank_test, summarize

EXIT_OK = 0
EXIT_DATA = 1
EXIT_USAGE = 2

_CONFIG_KEYS = {
    "input", "out", "artery_suffix", "vein_suffix", "norm", "seed",
    "overlays", "workers", "rotations", "min_box_fill", "min_box_pixels",
    "saturated_exclusion",
}


def read_config_file(path: str) -> dict[str, str]:
    """Parse a flat key=value config file (blank lines and # comments skipped)."""
    values: dict[str, str] = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key = value, got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        if key not in _CONFIG_KEYS:
            raise UsageError(f"{path}:{lineno}: unknown config key {key!r}")
        values[key] = value.strip()
    return values


class UsageError(Exception):
    pass


def parse_norm(text: str) -> float | None:
    """'image' -> None (use image area); 'fixed:N' -> N square pixels."""
    if text == "image":
        return None
    if text.startswith("fixed:"):
        try:
            value = float(text.split(":", 1)[1])
        except ValueError:
            raise UsageError(f"bad --norm value {text!r}")
        if value <= 0:
            raise UsageError(f"--norm fixed value must be positive, got {value}")
        return value
    raise UsageError(f"--norm must be 'image' or 'fixed:N', got {text!r}")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vesselmetrics",
                                     description="Vascular biomarkers from binary vessel masks")
    sub = parser.add_subparsers(dest="command", required=True)

    comp = sub.add_parser("compute", help="compute biomarker reports for a mask directory")
    comp.add_argument("--config", help="flat key=value config file; flags override")
    comp.add_argument("--input", help="directory with segmentation mask PNGs")
    comp.add_argument("--out", help="output directory")
    comp.add_argument("--artery-suffix", dest="artery_suffix", help="default: _a.png")
    comp.add_argument("--vein-suffix", dest="vein_suffix", help="default: _v.png")
    comp.add_argument("--norm", help="'image' (default) or 'fixed:N' square pixels")
    comp.add_argument("--seed", type=int, help="run seed (default 0)")
    comp.add_argument("--overlays", action="store_true", default=None,
                      help="also write annotated overlays")
    comp.add_argument("--workers", type=int, help="parallel workers (default 1)")
    comp.add_argument("--rotations", type=int, help="multifractal rotation candidates (default 16)")
    comp.add_argument("--min-box-fill", dest="min_box_fill", type=float,
                      help="exclude grid boxes filled below this fraction (default 0.02)")
    comp.add_argument("--min-box-pixels", dest="min_box_pixels", type=int,
                      help="absolute pixel floor for grid boxes (default 0 = disabled)")
    comp.add_argument("--no-saturated-exclusion", dest="saturated_exclusion",
                      action="store_false", default=None,
                      help="keep completely filled grid boxes in the regressions")

    cmpr = sub.add_parser("compare", help="two-group comparison of a cohort table")
    cmpr.add_argument("--table", required=True, help="CSV table written by compute")
    cmpr.add_argument("--labels", required=True,
                      help="two-column text file: image_id group")
    cmpr.add_argument("--out", required=True, help="comparison CSV to write")

    ovl = sub.add_parser("overlay", help="render the annotated overlay of one mask")
    ovl.add_argument("--input", required=True, help="mask PNG")
    ovl.add_argument("--out", required=True, help="overlay PNG to write")
    ovl.add_argument("--threshold", type=int, default=127)
    return parser


def _merged(args, file_values: dict[str, str]):
    """Config file values with CLI flags layered on top."""
    merged = {
        "input": None, "out": "reports", "artery_suffix": "_a.png",
        "vein_suffix": "_v.png", "norm": "image", "seed": 0,
        "overlays": False, "workers": 1, "rotations": 16,
        "min_box_fill": 0.02, "min_box_pixels": 0, "saturated_exclusion": True,
    }
    for key, raw in file_values.items():
        if key in ("seed", "workers", "rotations", "min_box_pixels"):
            merged[key] = int(raw)
        elif key == "min_box_fill":
            merged[key] = float(raw)
        elif key in ("overlays", "saturated_exclusion"):
            merged[key] = raw.lower() in ("1", "true", "yes", "on")
        else:
            merged[key] = raw
    for key in merged:
        flag = getattr(args, key, None)
        if flag is not None:
            merged[key] = flag
    return merged


def discover_masks(input_dir: Path, artery_suffix: str, vein_suffix: str):
    """(image_id, kind, path) for every mask file matching either suffix."""
    jobs = []
    for path in sorted(input_dir.iterdir()):
        if not path.is_file():
            continue
        if path.name.endswith(artery_suffix):
            jobs.append((path.name[: -len(artery_suffix)], "arterioles", path))
        elif path.name.endswith(vein_suffix):
            jobs.append((path.name[: -len(vein_suffix)], "venules", path))
    return jobs


def _compute_job(job):
    """Worker: load one mask and compute its report (exceptions serialized)."""
    image_id, kind, path, config, seed = job
    try:
        mask = load_mask(path)
        report = compute_all(mask, image_id, kind, config=config, seed=seed)
        return (image_id, kind, report, None)
    except Exception as exc:  # partial-failure contract: keep going
        return (image_id, kind, None, f"{path}: {exc}")


def cmd_compute(args) -> int:
    try:
        file_values = read_config_file(args.config) if args.config else {}
        opts = _merged(args, file_values)
        if not opts["input"]:
            raise UsageError("--input is required (flag or config file)")
        norm_area = parse_norm(opts["norm"])
        if opts["artery_suffix"] == opts["vein_suffix"]:
            raise UsageError("artery and vein suffixes must differ")
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    input_dir = Path(opts["input"])
    if not input_dir.is_dir():
        print(f"error: input directory {input_dir} does not exist", file=sys.stderr)
        return EXIT_USAGE
    jobs = discover_masks(input_dir, opts["artery_suffix"], opts["vein_suffix"])
    if not jobs:
        print(f"error: no masks matching *{opts['artery_suffix']} or *{opts['vein_suffix']} "
              f"in {input_dir}", file=sys.stderr)
        return EXIT_DATA

    config = AnalysisConfig(
        norm_area=norm_area,
        multifractal=MultifractalConfig(
            rotations=opts["rotations"],
            exclusions=ExclusionPolicy(
                saturated=opts["saturated_exclusion"],
                min_fill=opts["min_box_fill"],
                min_pixels=opts["min_box_pixels"],
            ),
        ),
    )
    run_seed = opts["seed"]
    work = [(image_id, kind, path, config, derive_seed(run_seed, image_id))
            for image_id, kind, path in jobs]

    if opts["workers"] > 1:
        with ProcessPoolExecutor(max_workers=opts["workers"]) as pool:
            results = list(pool.map(_compute_job, work))
    else:
        results = [_compute_job(job) for job in work]

    out_dir = Path(opts["out"])
    reports_dir = out_dir / "reports"
    reports_dir.mkdir(parents=True, exist_ok=True)
    reports, failures = [], []
    for image_id, kind, report, error in results:
        if error is not None:
            failures.append(error)
            continue
        reports.append(report)
        (reports_dir / f"{image_id}_{kind}.json").write_text(serialize_report(report))

    (out_dir / "biomarkers.csv").write_text(reports_to_table(reports))

    if opts["overlays"]:
        overlay_dir = out_dir / "overlays"
        overlay_dir.mkdir(parents=True, exist_ok=True)
        for image_id, kind, path in jobs:
            try:
                _write_overlay(path, overlay_dir / f"{image_id}_{kind}.png")
            except Exception as exc:
                failures.append(f"{path}: overlay failed: {exc}")

    for failure in failures:
        print(f"error: {failure}", file=sys.stderr)
    print(f"computed {len(reports)}/{len(jobs)} reports -> {out_dir / 'biomarkers.csv'}")
    return EXIT_DATA if failures else EXIT_OK


def _write_overlay(mask_path, out_path, threshold: int = 127) -> None:
    """Overlay with junction clusters collapsed to one marker per site.

    Junctions where a branching angle was measured are annotated in the
    angle color on top of the intersection marker.
    """
    mask = load_mask(mask_path, threshold=threshold)
    skeleton = skeletonize(mask)
    points = detect_particular_points(skeleton)
    graph = build_connectivity(skeleton, points)
    merged = ParticularPoints(
        endpoints=points.endpoints,
        intersections=tuple(sorted(graph.junction_clusters)),
    )
    measurements, _ = branching_angles(graph, skeleton)
    save_overlay(render_overlay(mask, skeleton, merged, measurements), out_path)


def read_labels(path: Path) -> dict[str, str]:
    labels = {}
    for lineno, raw in enumerate(path.read_text().splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise UsageError(f"{path}:{lineno}: expected 'image_id group', got {raw!r}")
        labels[parts[0]] = parts[1]
    return labels


def cmd_compare(args) -> int:
    try:
        labels = read_labels(Path(args.labels))
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        rows = parse_table(Path(args.table).read_text())
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA

    known = {r["image_id"] for r in rows}
    for image_id in sorted(set(labels) - known):
        print(f"warning: labels file names unknown image_id {image_id!r}", file=sys.stderr)
    unlabeled = sorted({r["image_id"] for r in rows} - set(labels))
    for image_id in unlabeled:
        print(f"warning: image {image_id!r} missing from labels; excluded", file=sys.stderr)
    rows = [r for r in rows if r["image_id"] in labels]

    groups = sorted({labels[r["image_id"]] for r in rows})
    if len(groups) != 2:
        print(f"error: need exactly two groups, found {groups}", file=sys.stderr)
        return EXIT_DATA

    kinds = sorted({r["kind"] for r in rows})
    lines = ["biomarker,kind," +
             f"{groups[0]} median (Q1-Q3),{groups[1]} median (Q1-Q3),p,significant"]
    for kind in kinds:
        kind_rows = [r for r in rows if r["kind"] == kind]
        for biomarker in BIOMARKER_COLUMNS:
            by_group: dict[str, list[float]] = {g: [] for g in groups}
            for row in kind_rows:
                cell = row[biomarker]
                if cell != "":
                    by_group[labels[row["image_id"]]].append(float(cell))
            cells = [biomarker, kind]
            try:
                for g in groups:
                    med, q1, q3 = summarize(by_group[g])
                    cells.append(f"{med:.6g} ({q1:.6g}-{q3:.6g})")
                p = rank_test(by_group[groups[0]], by_group[groups[1]])
                cells.append(f"{p:.6g}")
                cells.append("yes" if p < 0.05 else "no")
            except ValueError as exc:
                print(f"warning: {biomarker} ({kind}): {exc}", file=sys.stderr)
                cells += [""] * (6 - len(cells))
            lines.append(",".join(cells))

    Path(args.out).write_text("\n".join(lines) + "\n")
    print(f"wrote comparison table -> {args.out}")
    return EXIT_OK


def cmd_overlay(args) -> int:
    try:
        _write_overlay(Path(args.input), Path(args.out), threshold=args.threshold)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    print(f"wrote overlay -> {args.out}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.command == "compute":
        return cmd_compute(args)
    if args.command == "compare":
        return cmd_compare(args)
    return cmd_overlay(args)


if __name__ == "__main__":
    sys.exit(main())
