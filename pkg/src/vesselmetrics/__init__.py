"""Vascular biomarkers from binary vessel segmentation masks.

Computes geometry (overall length, perimeter, area), topology (endpoint and
junction counts, arc-chord tortuosity, branching angles) and multifractal
measures (capacity/entropy/correlation dimensions, singularity length) from
binary rasters of segmented vessel networks, plus cohort-level statistics
and a batch CLI.

Masks, skeletons and edge images are plain 2-D boolean ``numpy`` arrays
indexed ``[row, col]`` with ``True`` marking foreground (vessel) pixels.
"""

__version__ = "0.1.0"

from .geometry import GeometryBiomarkers, geometry_biomarkers, overall_area, overall_length, overall_perimeter
from .graph import (
    AngleMeasurement,
    ParticularPoints,
    TopologyBiomarkers,
    VesselGraph,
    branching_angles,
    build_connectivity,
    compute_centroids,
    detect_particular_points,
    median_tortuosity,
    topology_biomarkers,
)
from .mask_io import load_mask, render_overlay, save_mask, save_overlay
from .morphology import extract_edges, skeletonize
from .multifractal import (
    BoxGridMeasure,
    ExclusionPolicy,
    MultifractalConfig,
    MultifractalResult,
    box_probabilities,
    generalized_dimension,
    optimized_multifractal,
    singularity_spectrum,
)
from .report import AnalysisConfig, BiomarkerReport, compute_all, derive_seed, parse_report, reports_to_table, serialize_report
from .stats import GroupSummary, compare_groups, rank_test, summarize

__all__ = [
    "AngleMeasurement",
    "AnalysisConfig",
    "BiomarkerReport",
    "BoxGridMeasure",
    "ExclusionPolicy",
    "GeometryBiomarkers",
    "GroupSummary",
    "MultifractalConfig",
    "MultifractalResult",
    "ParticularPoints",
    "TopologyBiomarkers",
    "VesselGraph",
    "box_probabilities",
    "branching_angles",
    "build_connectivity",
    "compare_groups",
    "compute_all",
    "compute_centroids",
    "derive_seed",
    "detect_particular_points",
    "extract_edges",
    "generalized_dimension",
    "geometry_biomarkers",
    "load_mask",
    "median_tortuosity",
    "optimized_multifractal",
    "overall_area",
    "overall_length",
    "overall_perimeter",
    "parse_report",
    "rank_test",
    "render_overlay",
    "reports_to_table",
    "save_mask",
    "save_overlay",
    "serialize_report",
    "singularity_spectrum",
    "skeletonize",
    "summarize",
    "topology_biomarkers",
]
