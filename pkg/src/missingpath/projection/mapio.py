"""On-disk formats for the projected map: coordinates.csv and zones.json."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from ..errors import StoreFormatError
from .embed import ProjectedMap, ProjectionConfig, Zone

COORDINATES_FILENAME = "coordinates.csv"
ZONES_FILENAME = "zones.json"
_COORD_HEADER = ["id", "x", "y"]


def save_map(projected: ProjectedMap, directory: str | Path) -> None:
    directory = Path(directory)
    with open(directory / COORDINATES_FILENAME, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(_COORD_HEADER)
        for eid, (x, y) in enumerate(projected.coordinates):
            writer.writerow([eid, repr(float(x)), repr(float(y))])
    zones_doc = [
        {
            "zone_id": z.zone_id,
            "member_ids": z.member_entity_ids,
            "boundary": [[x, y] for x, y in z.boundary],
            "missing_path_indices": z.missing_path_indices,
        }
        for z in projected.zones
    ]
    config_doc = {
        "selected_path_indices": list(projected.config_used.selected_path_indices or []),
        "n_neighbors": projected.config_used.n_neighbors,
        "min_dist": projected.config_used.min_dist,
        "n_epochs": projected.config_used.n_epochs,
        "seed": projected.config_used.seed,
    }
    payload = {"zones": zones_doc, "config": config_doc}
    (directory / ZONES_FILENAME).write_text(
        json.dumps(payload, ensure_ascii=False, indent=1), encoding="utf-8"
    )


def load_map(directory: str | Path) -> ProjectedMap:
    directory = Path(directory)
    coords: list[tuple[float, float]] = []
    with open(directory / COORDINATES_FILENAME, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != _COORD_HEADER:
            raise StoreFormatError("unexpected coordinates header")
        for eid, x, y in reader:
            if int(eid) != len(coords):
                raise StoreFormatError(f"non-dense coordinate ids near {eid}")
            coords.append((float(x), float(y)))
    payload = json.loads((directory / ZONES_FILENAME).read_text(encoding="utf-8"))
    zones = [
        Zone(
            zone_id=z["zone_id"],
            member_entity_ids=list(z["member_ids"]),
            boundary=[(float(x), float(y)) for x, y in z["boundary"]],
            missing_path_indices=list(z["missing_path_indices"]),
        )
        for z in payload["zones"]
    ]
    config = payload.get("config", {})
    selected = tuple(config.get("selected_path_indices") or ()) or None
    cfg = ProjectionConfig(
        selected_path_indices=selected,
        n_neighbors=config.get("n_neighbors", 15),
        min_dist=config.get("min_dist", 0.1),
        n_epochs=config.get("n_epochs", 200),
        seed=config.get("seed", 42),
    )
    return ProjectedMap(
        coordinates=np.asarray(coords, dtype=np.float64).reshape(len(coords), 2),
        zones=zones,
        config_used=cfg,
    )
