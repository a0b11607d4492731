"""Brute-force oracles, coded independently of the main modules.

These deliberately avoid numpy vector tricks and do not import the
clustering, recommender, or ontology distance code; they re-derive every
quantity with naive loops over plain Python data so that agreement with the
main path is meaningful evidence.
"""

from __future__ import annotations

import math
from itertools import combinations
from typing import Dict, List, Sequence, Tuple


def _dist2(a: Sequence[float], b: Sequence[float]) -> float:
    total = 0.0
    for x, y in zip(a, b):
        total += (x - y) * (x - y)
    return total


def oracle_nearest(
    vectors: Sequence[Sequence[float]], centroids: Sequence[Sequence[float]]
) -> List[int]:
    """Nearest-centroid label per vector, ties to the lowest index."""
    labels = []
    for vec in vectors:
        best = 0
        best_d = _dist2(vec, centroids[0])
        for j in range(1, len(centroids)):
            d = _dist2(vec, centroids[j])
            if d < best_d:
                best_d = d
                best = j
        labels.append(best)
    return labels


def oracle_knn(
    query: Sequence[float],
    vectors: Sequence[Sequence[float]],
    ids: Sequence[str],
    k: int,
) -> List[str]:
    """Full sort of all distances, ties by ascending id."""
    scored = [(math.sqrt(_dist2(query, vectors[i])), ids[i]) for i in range(len(ids))]
    scored.sort()
    return [pid for _, pid in scored[:k]]


def oracle_best_two_partition(
    points: Sequence[Sequence[float]],
) -> Tuple[frozenset, float]:
    """Exhaustive minimum-WCSS split into two nonempty clusters. Returns the
    partition as a frozenset of frozensets of row indices plus its WCSS.
    Feasible for n <= ~16."""
    n = len(points)
    if n < 2:
        raise ValueError("need at least two points")
    d = len(points[0])
    indices = list(range(n))
    best = None
    best_wcss = math.inf
    # fix point 0 in the first cluster to halve the enumeration
    for size in range(1, n):
        for rest in combinations(indices[1:], size - 1) if size >= 1 else [()]:
            group_a = {0, *rest}
            group_b = set(indices) - group_a
            if not group_b:
                continue
            wcss = 0.0
            for group in (group_a, group_b):
                mean = [0.0] * d
                for i in group:
                    for c in range(d):
                        mean[c] += points[i][c]
                mean = [m / len(group) for m in mean]
                for i in group:
                    wcss += _dist2(points[i], mean)
            if wcss < best_wcss:
                best_wcss = wcss
                best = frozenset({frozenset(group_a), frozenset(group_b)})
    return best, best_wcss


# ---------------------------------------------------------------------------
# combine/dedup oracle: recomputes activity distance straight from the
# ontology JSON document
# ---------------------------------------------------------------------------

def _index_categories(node: dict, prefix: tuple, table: Dict[tuple, int]) -> None:
    path = prefix + (node["name"],)
    table[path] = len(path) - 1
    for child in node.get("children", []):
        _index_categories(child, path, table)


def _activity_distance_doc(doc: dict, a_id: str, b_id: str) -> float:
    activities = {act["id"]: act for act in doc["activities"]}
    a, b = activities[a_id], activities[b_id]
    table: Dict[tuple, int] = {}
    _index_categories(doc["categories"], (), table)
    height = max(table.values())
    pa, pb = tuple(a["category_path"]), tuple(b["category_path"])
    shared = 0
    for x, y in zip(pa, pb):
        if x != y:
            break
        shared += 1
    hops = (len(pa) - shared) + (len(pb) - shared)
    mets = [act["met"] for act in doc["activities"]]
    durs = [act["typical_duration_min"] for act in doc["activities"]]
    met_range = max(mets) - min(mets)
    dur_range = max(durs) - min(durs)
    w = doc.get("weights", {"tree": 0.5, "met": 0.3, "duration": 0.2})
    tree_term = hops / (2 * height) if height > 0 else 0.0
    met_term = abs(a["met"] - b["met"]) / met_range if met_range > 0 else 0.0
    dur_term = (
        abs(a["typical_duration_min"] - b["typical_duration_min"]) / dur_range
        if dur_range > 0
        else 0.0
    )
    return w["tree"] * tree_term + w["met"] * met_term + w["duration"] * dur_term


def oracle_union_dedup(
    sources: Sequence[Tuple[Sequence[Tuple[str, int]], str]],
    ontology_doc: dict,
    threshold: float,
    cap: int,
) -> List[Tuple[str, str, int]]:
    """Independent recomputation of the combine step: concatenate sources in
    order, merge duplicate ids (sum support, keep earliest provenance),
    greedy-drop items at distance < threshold (or exactly 0) from an earlier
    kept item, then keep the top `cap` by (support desc, original order)."""
    merged: List[List] = []  # [activity_id, provenance, support]
    position: Dict[str, int] = {}
    for source, provenance in sources:
        for activity_id, count in source:
            if activity_id in position:
                merged[position[activity_id]][2] += count
            else:
                position[activity_id] = len(merged)
                merged.append([activity_id, provenance, count])
    kept: List[List] = []
    for item in merged:
        drop = False
        for prev in kept:
            d = _activity_distance_doc(ontology_doc, item[0], prev[0])
            if d == 0.0 or d < threshold:
                drop = True
                break
        if not drop:
            kept.append(item)
    order = sorted(range(len(kept)), key=lambda i: (-kept[i][2], i))
    return [tuple(kept[i]) for i in order[:cap]]
