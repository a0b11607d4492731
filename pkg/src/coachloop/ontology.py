"""Physical activity ontology: a category tree plus intensity attributes.

Activity-to-activity distance blends tree hop distance with normalized MET
and duration gaps; it drives the "eliminate similar candidates" narrowing
step of the recommender.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Sequence, Tuple

DEFAULT_WEIGHTS = (0.5, 0.3, 0.2)  # (tree, met, duration)
DEFAULT_SIMILARITY_THRESHOLD = 0.15


class OntologyError(ValueError):
    pass


@dataclass(frozen=True)
class PhysicalActivity:
    id: str
    name: str
    category_path: Tuple[str, ...]  # from the root, e.g. ("root", "cardio", "walking")
    met: float
    typical_duration_min: float
    indoor: bool

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "name": self.name,
            "category_path": list(self.category_path),
            "met": self.met,
            "typical_duration_min": self.typical_duration_min,
            "indoor": self.indoor,
        }


class ActivityOntology:
    def __init__(
        self,
        category_tree: dict,
        activities: Sequence[PhysicalActivity],
        weights: Tuple[float, float, float] = DEFAULT_WEIGHTS,
    ):
        if any(w < 0 for w in weights):
            raise OntologyError("weights must be non-negative")
        if abs(sum(weights) - 1.0) > 1e-9:
            raise OntologyError("weights must sum to 1")
        self.category_tree = category_tree
        self.weights = tuple(float(w) for w in weights)
        self._depths: Dict[Tuple[str, ...], int] = {}
        self._index_tree(category_tree, ())
        self.height = max(self._depths.values())

        self.activities: Dict[str, PhysicalActivity] = {}
        for act in activities:
            if act.id in self.activities:
                raise OntologyError(f"duplicate activity id: {act.id}")
            if act.met <= 0:
                raise OntologyError(f"activity {act.id}: met must be positive")
            if act.typical_duration_min <= 0:
                raise OntologyError(f"activity {act.id}: duration must be positive")
            if tuple(act.category_path) not in self._depths:
                raise OntologyError(
                    f"activity {act.id}: dangling category path "
                    f"{'/'.join(act.category_path)}"
                )
            self.activities[act.id] = act
        if self.activities:
            mets = [a.met for a in self.activities.values()]
            durs = [a.typical_duration_min for a in self.activities.values()]
            self.met_range = max(mets) - min(mets)
            self.duration_range = max(durs) - min(durs)
        else:
            self.met_range = 0.0
            self.duration_range = 0.0

    def _index_tree(self, node: dict, prefix: Tuple[str, ...]) -> None:
        if "name" not in node:
            raise OntologyError("category node missing 'name'")
        path = prefix + (node["name"],)
        if path in self._depths:
            raise OntologyError(f"duplicate category path: {'/'.join(path)}")
        self._depths[path] = len(path) - 1  # depth in edges from the root
        for child in node.get("children", []):
            self._index_tree(child, path)

    def __len__(self) -> int:
        return len(self.activities)

    def get(self, activity_id: str) -> PhysicalActivity:
        try:
            return self.activities[activity_id]
        except KeyError:
            raise OntologyError(f"unknown activity: {activity_id}") from None

    def tree_hops(self, a: PhysicalActivity, b: PhysicalActivity) -> int:
        pa, pb = tuple(a.category_path), tuple(b.category_path)
        common = 0
        for x, y in zip(pa, pb):
            if x != y:
                break
            common += 1
        return (len(pa) - common) + (len(pb) - common)

    def distance(self, a_id: str, b_id: str) -> float:
        """Weighted blend of tree hop distance and normalized MET/duration
        gaps; symmetric, 0 on the diagonal, bounded in [0, 1]."""
        a, b = self.get(a_id), self.get(b_id)
        w_tree, w_met, w_dur = self.weights
        tree_term = (
            self.tree_hops(a, b) / (2 * self.height) if self.height > 0 else 0.0
        )
        met_term = abs(a.met - b.met) / self.met_range if self.met_range > 0 else 0.0
        dur_term = (
            abs(a.typical_duration_min - b.typical_duration_min) / self.duration_range
            if self.duration_range > 0
            else 0.0
        )
        return w_tree * tree_term + w_met * met_term + w_dur * dur_term

    def to_document(self) -> dict:
        return {
            "categories": self.category_tree,
            "activities": [a.to_dict() for a in self.activities.values()],
            "weights": {
                "tree": self.weights[0],
                "met": self.weights[1],
                "duration": self.weights[2],
            },
        }


def load_ontology_document(doc: dict) -> ActivityOntology:
    if "categories" not in doc:
        raise OntologyError("ontology document missing 'categories'")
    weights_doc = doc.get("weights", {})
    weights = (
        weights_doc.get("tree", DEFAULT_WEIGHTS[0]),
        weights_doc.get("met", DEFAULT_WEIGHTS[1]),
        weights_doc.get("duration", DEFAULT_WEIGHTS[2]),
    )
    activities = []
    for raw in doc.get("activities", []):
        try:
            activities.append(
                PhysicalActivity(
                    id=raw["id"],
                    name=raw["name"],
                    category_path=tuple(raw["category_path"]),
                    met=float(raw["met"]),
                    typical_duration_min=float(raw["typical_duration_min"]),
                    indoor=bool(raw.get("indoor", False)),
                )
            )
        except KeyError as exc:
            raise OntologyError(
                f"activity {raw.get('id', '<missing id>')}: missing field {exc}"
            ) from None
    return ActivityOntology(doc["categories"], activities, weights)


def load_ontology(path) -> ActivityOntology:
    text = Path(path).read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise OntologyError(
            f"{path}: parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from None
    return load_ontology_document(doc)


def eliminate_similar(
    candidates: Sequence[str],
    threshold: float,
    ontology: ActivityOntology,
) -> List[str]:
    """Greedy earliest-kept-wins narrowing: scan in input order and keep a
    candidate only if it is at distance >= threshold (and not an exact
    duplicate, distance 0) from every already-kept candidate."""
    if not 0 <= threshold <= 1:
        raise ValueError("threshold must be in [0, 1]")
    kept: List[str] = []
    for cand in candidates:
        ok = True
        for prev in kept:
            d = ontology.distance(cand, prev)
            if d == 0.0 or d < threshold:
                ok = False
                break
        if ok:
            kept.append(cand)
    return kept
