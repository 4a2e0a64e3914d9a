"""Conjunctive selection queries over the local store.

A selection is a conjunction of conditions -- zone membership, a drawn
lasso, path presence, or a value at the end of a path -- each of which
can be negated, scoped either to the whole set or to the current
selection. Resolution is purely local: the matrix answers presence, the
cells answer values, the map answers geometry. Queries also render to
the pseudo-code sentences shown to users.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace

from .errors import ValidationError
from .projection import ProjectedMap
from .store import EntityVectorStore, FACETS
from .terms import RDFS_LABEL, compact, uri_tail


class Scope(enum.Enum):
    WHOLE_SET = "whole_set"
    CURRENT_SELECTION = "current_selection"


class ConditionKind(enum.Enum):
    ZONE = "zone"
    LASSO = "lasso"
    PATH = "path"
    VALUE = "value"


@dataclass(frozen=True)
class Condition:
    kind: ConditionKind
    negated: bool = False
    # PATH / VALUE
    path_index: int | None = None
    present: bool = True
    facet: str = "values"
    bucket_key: str | None = None
    # Captured member keys: OTHER aggregates and date bins carry the raw
    # keys they covered when the condition was created, so recomputed
    # summaries cannot change its meaning.
    member_keys: tuple[str, ...] | None = None
    is_other: bool = False
    # ZONE
    zone_id: int | None = None
    # LASSO
    polygon: tuple[tuple[float, float], ...] | None = None

    def __post_init__(self):
        if self.kind is ConditionKind.PATH and self.path_index is None:
            raise ValidationError("path condition requires path_index")
        if self.kind is ConditionKind.VALUE:
            if self.path_index is None:
                raise ValidationError("value condition requires path_index")
            if self.facet not in FACETS:
                raise ValidationError(f"unknown facet {self.facet!r}")
            if self.bucket_key is None and not self.is_other:
                raise ValidationError("value condition requires a bucket key or OTHER")
            if self.is_other and self.member_keys is None:
                raise ValidationError("OTHER condition must capture its member keys")
        if self.kind is ConditionKind.ZONE and self.zone_id is None:
            raise ValidationError("zone condition requires zone_id")
        if self.kind is ConditionKind.LASSO:
            if self.polygon is None or len(self.polygon) < 3:
                raise ValidationError("lasso condition requires a polygon of >= 3 points")


@dataclass(frozen=True)
class SelectionQuery:
    conditions: tuple[Condition, ...]
    scope: Scope = Scope.WHOLE_SET

    def __post_init__(self):
        object.__setattr__(self, "conditions", tuple(self.conditions))


@dataclass
class Selection:
    query_used: SelectionQuery
    entity_ids: list[int]
    manually_removed: set[int] = field(default_factory=set)


def _point_in_polygon(x: float, y: float, polygon) -> bool:
    """Ray casting; boundary points count as inside on left/bottom edges."""
    inside = False
    n = len(polygon)
    for i in range(n):
        x1, y1 = polygon[i]
        x2, y2 = polygon[(i + 1) % n]
        if (y1 > y) != (y2 > y):
            x_cross = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
            if x < x_cross:
                inside = not inside
    return inside


def _match_set(
    cond: Condition,
    store: EntityVectorStore,
    projected: ProjectedMap | None,
) -> set[int]:
    """Entity ids matching the (un-negated) condition over the whole store."""
    if cond.kind is ConditionKind.PATH:
        _check_path(cond.path_index, store)
        want_present = cond.present
        return {
            eid
            for eid in range(store.n_entities)
            if (store.cell(eid, cond.path_index) is not None) == want_present
        }
    if cond.kind is ConditionKind.VALUE:
        _check_path(cond.path_index, store)
        keys = set(cond.member_keys) if cond.member_keys is not None else {cond.bucket_key}
        matched = set()
        for eid in range(store.n_entities):
            cell = store.cell(eid, cond.path_index)
            if cell is None:
                continue
            if any(entry in keys for entry in cell.facet(cond.facet)):
                matched.add(eid)
        return matched
    if cond.kind is ConditionKind.ZONE:
        if projected is None:
            raise ValidationError("zone condition requires a projected map")
        for zone in projected.zones:
            if zone.zone_id == cond.zone_id:
                return set(zone.member_entity_ids)
        raise ValidationError(f"unknown zone {cond.zone_id}")
    if cond.kind is ConditionKind.LASSO:
        if projected is None:
            raise ValidationError("lasso condition requires a projected map")
        coords = projected.coordinates
        return {
            eid
            for eid in range(len(coords))
            if _point_in_polygon(coords[eid, 0], coords[eid, 1], cond.polygon)
        }
    raise ValidationError(f"unsupported condition kind {cond.kind}")  # pragma: no cover


def _check_path(path_index: int, store: EntityVectorStore) -> None:
    if not (0 <= path_index < store.n_paths):
        raise ValidationError(f"unknown path index {path_index}")


def resolve(
    query: SelectionQuery,
    store: EntityVectorStore,
    projected: ProjectedMap | None = None,
    current: Selection | None = None,
) -> Selection:
    """Evaluate the conjunction locally; never touches the endpoint.

    Negated conditions take the complement within the base set. The result
    preserves entity id order.
    """
    if not query.conditions:
        raise ValidationError("a selection needs at least one condition")
    if query.scope is Scope.CURRENT_SELECTION:
        if current is None:
            raise ValidationError("no current selection to scope to")
        base = set(current.entity_ids)
    else:
        base = set(range(store.n_entities))
    result = set(base)
    for cond in query.conditions:
        matched = _match_set(cond, store, projected)
        result &= (base - matched) if cond.negated else matched
    return Selection(query_used=query, entity_ids=sorted(result))


def remove_entities(selection: Selection, ids) -> Selection:
    """Move ids into the manually-removed set; summaries downstream see
    only the remaining entities."""
    removed = set(selection.manually_removed) | (set(ids) & set(selection.entity_ids))
    remaining = [e for e in selection.entity_ids if e not in removed]
    return Selection(
        query_used=selection.query_used,
        entity_ids=remaining,
        manually_removed=removed,
    )


# -- pseudo-code rendering -----------------------------------------------------


def _condition_phrase(cond: Condition, store: EntityVectorStore | None) -> str:
    def label_for(path_index: int) -> str:
        if store is not None and 0 <= path_index < store.n_paths:
            return store.paths[path_index].label
        return str(path_index)

    if cond.kind is ConditionKind.PATH:
        return f"the path {label_for(cond.path_index)}"
    if cond.kind is ConditionKind.VALUE:
        key = "other" if cond.is_other else compact(cond.bucket_key)
        return f"the value {key} at the end of the path {label_for(cond.path_index)}"
    if cond.kind is ConditionKind.ZONE:
        return f"the zone {cond.zone_id}"
    return "the zone lasso"


def condition_pseudocode(cond: Condition, store: EntityVectorStore | None = None) -> str:
    if cond.kind is ConditionKind.PATH:
        having = cond.present ^ cond.negated
    else:
        having = not cond.negated
    word = "HAVING" if having else "NOT HAVING"
    return f"{word} {_condition_phrase(cond, store)}"


def to_pseudocode(query: SelectionQuery, store: EntityVectorStore | None = None) -> str:
    """`SELECT entities HAVING ... [AND ...] among the whole set` sentences."""
    if not query.conditions:
        raise ValidationError("cannot render an empty condition list")
    parts = [condition_pseudocode(c, store) for c in query.conditions]
    scope = (
        "the whole set" if query.scope is Scope.WHOLE_SET else "the current selection"
    )
    return f"SELECT entities {' AND '.join(parts)} among {scope}"


def toggle_negated(query: SelectionQuery, position: int) -> SelectionQuery:
    conds = list(query.conditions)
    conds[position] = replace(conds[position], negated=not conds[position].negated)
    return SelectionQuery(conditions=tuple(conds), scope=query.scope)


# -- labels ---------------------------------------------------------------------


def resolve_labels(
    ids,
    store: EntityVectorStore,
    preferred_language: str = "en",
) -> list[tuple[str, str]]:
    """(uri, label) pairs: label in the preferred language when available,
    else the first label, else the tail of the URI."""
    label_path = None
    for p in store.paths:
        if p.predicates == (RDFS_LABEL,):
            label_path = p.index
            break
    out: list[tuple[str, str]] = []
    for eid in ids:
        uri_text = store.entity_index.entries[eid][0]
        label = None
        if label_path is not None:
            cell = store.cell(eid, label_path)
            if cell is not None:
                if cell.languages is not None:
                    for value, lang in zip(cell.values, cell.languages):
                        if lang == preferred_language:
                            label = value
                            break
                if label is None:
                    label = cell.values[0]
        out.append((uri_text, label if label is not None else uri_tail(uri_text)))
    return out
