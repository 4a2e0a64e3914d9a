"""Map projection: Russel-Rao dissimilarity, neighbor embedding, zones."""

from ._backend import backend
from .color import default_color_path
from .embed import (
    ProjectedMap,
    ProjectionCancelled,
    ProjectionConfig,
    Zone,
    find_ab_params,
    project,
)
from .mapio import COORDINATES_FILENAME, ZONES_FILENAME, load_map, save_map
from .metric import pack_rows, russel_rao, self_dissimilarity
from .zones import compute_zones

__all__ = [
    "backend",
    "default_color_path",
    "ProjectedMap",
    "ProjectionCancelled",
    "ProjectionConfig",
    "Zone",
    "find_ab_params",
    "project",
    "compute_zones",
    "russel_rao",
    "self_dissimilarity",
    "pack_rows",
    "load_map",
    "save_map",
    "COORDINATES_FILENAME",
    "ZONES_FILENAME",
]
