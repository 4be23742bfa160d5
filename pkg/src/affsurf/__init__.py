"""Numerics for a family of glued affine surfaces and its enriched limit."""

from .similitude import Similitude
from .surface import (
    ChartId,
    SurfacePoint,
    SurfaceSpec,
    GeodesicTrace,
    chart_contains,
    corner_holonomy,
    gluing_map,
    hole_monodromy,
    trace_geodesic,
    transport,
)
from .connection import (
    RationalConnection,
    connection_limit_check,
    prevertex_ring,
)
from .develop import DevelopingMap
from .embedding import (
    EmbedChart,
    VirtualPointRep,
    edge_strip_chart,
    embed_eval,
    embed_invert,
    half_strip_chart,
    outer_chart,
    separation_check,
    spiral_ball_chart,
    transition_continuity_check,
)
from .limitset import (
    HAUSDORFF_ACCEPT,
    CurveCloud,
    RegionSample,
    convergence_report,
    hausdorff_distance,
    limit_image_cloud,
    rectangle_image_boundary,
    resample_curve,
    sample_limit_region,
)
from .pointcloud import PointCloud, read_points, write_points
from .quadrature import QuadratureError, integrate_polyline, integrate_segment
from .solver import (
    LimitEstimate,
    SolveResult,
    continuation_sweep,
    corner_residual,
    extract_limit,
    solve_prevertex,
)
from .svg import PALETTE, PlaneCurve, PlaneDots, figure
from .tracking import (
    TrackResult,
    circle_target,
    segment_target,
    track_level_curve,
)
from .cli import RunConfig, RunReport, UsageError, make_config, run

__all__ = [
    "Similitude",
    "ChartId",
    "SurfacePoint",
    "SurfaceSpec",
    "GeodesicTrace",
    "chart_contains",
    "corner_holonomy",
    "gluing_map",
    "hole_monodromy",
    "trace_geodesic",
    "transport",
    "RationalConnection",
    "connection_limit_check",
    "prevertex_ring",
    "DevelopingMap",
    "QuadratureError",
    "integrate_polyline",
    "integrate_segment",
    "LimitEstimate",
    "SolveResult",
    "continuation_sweep",
    "corner_residual",
    "extract_limit",
    "solve_prevertex",
    "TrackResult",
    "circle_target",
    "segment_target",
    "track_level_curve",
    "HAUSDORFF_ACCEPT",
    "CurveCloud",
    "RegionSample",
    "convergence_report",
    "hausdorff_distance",
    "limit_image_cloud",
    "rectangle_image_boundary",
    "resample_curve",
    "sample_limit_region",
    "EmbedChart",
    "VirtualPointRep",
    "edge_strip_chart",
    "embed_eval",
    "embed_invert",
    "half_strip_chart",
    "outer_chart",
    "separation_check",
    "spiral_ball_chart",
    "transition_continuity_check",
    "PointCloud",
    "read_points",
    "write_points",
    "PALETTE",
    "PlaneCurve",
    "PlaneDots",
    "figure",
    "RunConfig",
    "RunReport",
    "UsageError",
    "make_config",
    "run",
]

__version__ = "0.1.0"
