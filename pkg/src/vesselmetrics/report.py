"""Per-network biomarker reports: computation, serialization, tabulation.

A report carries the eleven biomarkers of one vessel network in fixed
order: OVLEN, OVPER, OVAREA, END, INTER, TOR, BA, D0, D1, D2, SL. Values
that cannot be measured (a skeleton without junctions has no branching
angle) are explicit missing markers (None in Python, null in JSON, empty
CSV cells) - never zero.
"""

from __future__ import annotations

import hashlib
import io
import json
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from ._grid import validate_raster
from .geometry import geometry_biomarkers
from .graph import topology_biomarkers
from .morphology import extract_edges, skeletonize
from .multifractal import MultifractalConfig, optimized_multifractal

NETWORK_KINDS = ("arterioles", "venules")

BIOMARKER_COLUMNS = ("OVLEN", "OVPER", "OVAREA", "END", "INTER", "TOR", "BA", "D0", "D1", "D2", "SL")
TABLE_COLUMNS = ("image_id", "kind") + BIOMARKER_COLUMNS + ("norm_area", "seed", "version")


@dataclass(frozen=True)
class AnalysisConfig:
    """Knobs of the per-image pipeline."""

    norm_area: float | None = None  # None: use image height*width
    multifractal: MultifractalConfig = field(default_factory=MultifractalConfig)
    arm_step: int = 5
    arm_mode: str = "path"


@dataclass(frozen=True)
class BiomarkerReport:
    """All eleven biomarkers of one vessel network plus provenance."""

    image_id: str
    network_kind: str
    ovlen: float
    ovper: float
    ovarea: float
    end_count: int
    inter_count: int
    tortuosity: float | None
    branching_angle: float | None
    d0: float | None
    d1: float | None
    d2: float | None
    singularity_length: float | None
    norm_area: float
    seed: int
    toolbox_version: str = __version__


def derive_seed(run_seed: int, image_id: str) -> int:
    """Stable per-image seed from the run seed and image id (order independent)."""
    digest = hashlib.sha256(f"{run_seed}:{image_id}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def compute_all(mask: np.ndarray, image_id: str, kind: str,
                config: AnalysisConfig = AnalysisConfig(), seed: int = 0) -> BiomarkerReport:
    """Compute the full biomarker report of one vessel network.

    Runs skeleton/edge extraction, geometry, topology and the optimized
    multifractal estimation. Degenerate inputs (empty masks, masks too
    small for the box-counting ladder) yield reports with zero geometry
    counts and missing topology/fractal fields instead of raising.
    """
    if kind not in NETWORK_KINDS:
        raise ValueError(f"kind must be one of {NETWORK_KINDS}, got {kind!r}")
    mask = validate_raster(mask)

    skeleton = skeletonize(mask)
    edges = extract_edges(mask)
    geom = geometry_biomarkers(mask, skeleton, edges, norm_area=config.norm_area)
    topo = topology_biomarkers(skeleton, arm_step=config.arm_step, arm_mode=config.arm_mode)

    d0 = d1 = d2 = sl = None
    if mask.any():
        try:
            mf = optimized_multifractal(mask, config.multifractal, seed=seed)
            d0, d1, d2, sl = mf.d0, mf.d1, mf.d2, mf.singularity_length
        except ValueError:
            pass  # mask too sparse/small for a usable regression: leave missing

    return BiomarkerReport(
        image_id=image_id,
        network_kind=kind,
        ovlen=geom.ovlen,
        ovper=geom.ovper,
        ovarea=geom.ovarea,
        end_count=topo.end_count,
        inter_count=topo.inter_count,
        tortuosity=topo.median_tortuosity,
        branching_angle=topo.median_branching_angle,
        d0=d0, d1=d1, d2=d2,
        singularity_length=sl,
        norm_area=geom.norm_area,
        seed=seed,
    )


_FIELD_ORDER = (
    "image_id", "network_kind", "ovlen", "ovper", "ovarea", "end_count",
    "inter_count", "tortuosity", "branching_angle", "d0", "d1", "d2",
    "singularity_length", "norm_area", "seed", "toolbox_version",
)


def serialize_report(report: BiomarkerReport) -> str:
    """Serialize a report as a JSON document with stable key order."""
    doc = {name: getattr(report, name) for name in _FIELD_ORDER}
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"


def parse_report(text: str) -> BiomarkerReport:
    """Inverse of serialize_report."""
    doc = json.loads(text)
    return BiomarkerReport(**{name: doc[name] for name in _FIELD_ORDER})


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def report_row(report: BiomarkerReport) -> list[str]:
    """CSV cells of one report in TABLE_COLUMNS order."""
    return [
        report.image_id,
        report.network_kind,
        _cell(report.ovlen),
        _cell(report.ovper),
        _cell(report.ovarea),
        _cell(report.end_count),
        _cell(report.inter_count),
        _cell(report.tortuosity),
        _cell(report.branching_angle),
        _cell(report.d0),
        _cell(report.d1),
        _cell(report.d2),
        _cell(report.singularity_length),
        _cell(report.norm_area),
        _cell(report.seed),
        report.toolbox_version,
    ]


def reports_to_table(reports) -> str:
    """Render reports as a CSV table, one row per (image, kind).

    Rows are sorted by (image_id, kind) so the table is independent of
    computation order; missing values render as empty cells.
    """
    out = io.StringIO()
    out.write(",".join(TABLE_COLUMNS) + "\n")
    for report in sorted(reports, key=lambda r: (r.image_id, r.network_kind)):
        out.write(",".join(report_row(report)) + "\n")
    return out.getvalue()


def parse_table(text: str) -> list[dict[str, str]]:
    """Parse a CSV table produced by reports_to_table into row dicts."""
    lines = [ln for ln in text.splitlines() if ln]
    if not lines:
        return []
    header = lines[0].split(",")
    if tuple(header) != TABLE_COLUMNS:
        raise ValueError(f"unexpected table header: {header}")
    return [dict(zip(header, ln.split(","))) for ln in lines[1:]]
