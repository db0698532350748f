"""Maximize the crossing (or angular/total) resolution of straight-line
graph drawings by randomized hill climbing."""

from .graph_model import BoundingBox, Drawing, Graph, GraphError, InvalidDrawing, bounding_box, validate
from .initializer import InitSpec, circular_layout, random_grid_layout, spring_layout
from .io import load_graph, load_layout, render_svg, save_layout
from .metrics import (
    CriticalSet,
    MetricsRecord,
    Objective,
    angular_resolution,
    aspect_ratio,
    crossing_count,
    crossing_resolution,
    local_min_angular,
    local_min_crossing_angle,
    metrics_record,
    total_resolution,
)
from .optimizer import Escape, OptimizerParams, RunReport, optimize

__version__ = "0.1.0"
