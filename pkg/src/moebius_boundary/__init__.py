"""Moebius structure on the boundary of negatively curved spaces: metric trees and the hyperbolic disk."""

from .boundary_metrics import LogMetric, FiniteBoundary, dM, log_derivative, validate_membership
from .disk import MoebiusTransform, GeodesicState, disk_distance
from .tree import TreeSpace, TreePoint, tree_distance, visual_log_metric
from .schwarzian import FourierDiffeo, integrated_schwarzian
from .extension import DiskMetric, embed_point, pushforward, project, extend_moebius, conf_extension
from .classifier import classify, classify_matrix, orbit

__all__ = [
    "LogMetric",
    "FiniteBoundary",
    "dM",
    "log_derivative",
    "validate_membership",
    "MoebiusTransform",
    "GeodesicState",
    "disk_distance",
    "TreeSpace",
    "TreePoint",
    "tree_distance",
    "visual_log_metric",
    "FourierDiffeo",
    "integrated_schwarzian",
    "DiskMetric",
    "embed_point",
    "pushforward",
    "project",
    "extend_moebius",
    "conf_extension",
    "classify",
    "classify_matrix",
    "orbit",
]
