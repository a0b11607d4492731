"""Candidate activity recommendation from three closeness schemes.

PA1 comes from the nearest cluster among high-adherence patients, PA2 from
the nearest of the three adherence-band clusters, and pa from the activities
of the K nearest neighbors. The sources are concatenated, duplicate ids
merged, ontology-similar activities eliminated, and the result capped for
the coach's review.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import kernels
from .clustering import ClusterModel, ClusteringConfig, cluster
from .ontology import ActivityOntology, DEFAULT_SIMILARITY_THRESHOLD, eliminate_similar
from .patients import BandLevel

CASE_SCHEMA_VERSION = 1


class Provenance(str, Enum):
    HIGH_ADH = "HIGH_ADH"
    DIFF_ADH = "DIFF_ADH"
    KNN = "KNN"


class CaseStatus(str, Enum):
    PENDING = "PENDING"
    ACCEPTED = "ACCEPTED"
    REJECTED = "REJECTED"


class NoCandidatesError(ValueError):
    pass


@dataclass
class Candidate:
    activity_id: str
    provenance: Provenance
    support_count: int

    def to_dict(self) -> dict:
        return {
            "activity_id": self.activity_id,
            "provenance": self.provenance.value,
            "support_count": self.support_count,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Candidate":
        return cls(d["activity_id"], Provenance(d["provenance"]), d["support_count"])


@dataclass
class RecommendationCase:
    id: str
    patient_id: str
    candidates: List[Candidate]
    created_at: float
    status: CaseStatus = CaseStatus.PENDING
    accepted_activity: Optional[str] = None
    coach_note: Optional[str] = None
    cold_start: bool = False

    def to_dict(self) -> dict:
        return {
            "version": CASE_SCHEMA_VERSION,
            "id": self.id,
            "patient_id": self.patient_id,
            "candidates": [c.to_dict() for c in self.candidates],
            "created_at": self.created_at,
            "status": self.status.value,
            "accepted_activity": self.accepted_activity,
            "coach_note": self.coach_note,
            "cold_start": self.cold_start,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RecommendationCase":
        if d.get("version") != CASE_SCHEMA_VERSION:
            raise ValueError(f"unsupported case version: {d.get('version')}")
        return cls(
            id=d["id"],
            patient_id=d["patient_id"],
            candidates=[Candidate.from_dict(c) for c in d["candidates"]],
            created_at=d["created_at"],
            status=CaseStatus(d["status"]),
            accepted_activity=d.get("accepted_activity"),
            coach_note=d.get("coach_note"),
            cold_start=d.get("cold_start", False),
        )


@dataclass(frozen=True)
class RecommenderConfig:
    knn_k: int = 5
    candidate_cap: int = 5
    dedup_threshold: float = DEFAULT_SIMILARITY_THRESHOLD
    clustering: ClusteringConfig = field(default_factory=ClusteringConfig)


@dataclass
class AdherenceGroupModel:
    """Cluster models over the high-adherence subpopulation and over the
    whole population seeded by the three bands, plus each cluster's multiset
    of completed activities."""

    high_rows: np.ndarray  # population row indices of HIGH-band patients
    high_model: Optional[ClusterModel]
    high_activities: List[Counter]
    band_model: ClusterModel
    band_activities: List[Counter]


def _cluster_activity_counters(
    model: ClusterModel, rows: Sequence[int], completed: Sequence[Sequence[str]]
) -> List[Counter]:
    counters = [Counter() for _ in range(model.k)]
    for local, row in enumerate(rows):
        counters[model.labels[local]].update(completed[row])
    return counters


def build_group_model(
    vectors: np.ndarray,
    bands: Sequence[BandLevel],
    completed: Sequence[Sequence[str]],
    config: RecommenderConfig = RecommenderConfig(),
) -> AdherenceGroupModel:
    vectors = np.asarray(vectors, dtype=np.float64)
    n = vectors.shape[0]
    if n == 0:
        raise ValueError("empty population")

    high_rows = np.array([i for i in range(n) if bands[i] == BandLevel.HIGH], dtype=int)
    high_model = None
    high_activities: List[Counter] = []
    if high_rows.size:
        k_high = min(config.clustering.k, high_rows.size)
        cfg = ClusteringConfig(
            k=k_high,
            max_iters=config.clustering.max_iters,
            seed_mode=config.clustering.seed_mode,
        )
        high_model = cluster(
            vectors[high_rows], [bands[i] for i in high_rows], cfg
        )
        high_activities = _cluster_activity_counters(high_model, high_rows, completed)

    k_band = min(3, n)
    band_cfg = ClusteringConfig(k=k_band, max_iters=config.clustering.max_iters)
    band_model = cluster(vectors, bands, band_cfg)
    band_activities = _cluster_activity_counters(band_model, range(n), completed)

    return AdherenceGroupModel(
        high_rows=high_rows,
        high_model=high_model,
        high_activities=high_activities,
        band_model=band_model,
        band_activities=band_activities,
    )


def _rank_counter(counter: Counter) -> List[Tuple[str, int]]:
    # descending completion count, ties by ascending activity id
    return sorted(counter.items(), key=lambda kv: (-kv[1], kv[0]))


def _nearest_centroid(query: np.ndarray, centroids: np.ndarray) -> int:
    labels, _ = kernels.assign_labels(query[None, :], centroids)
    return int(labels[0])


def recommend_high_adherence(
    query: np.ndarray, groups: AdherenceGroupModel
) -> List[Tuple[str, int]]:
    """PA1: ranked activities of the nearest high-adherence cluster; empty
    when there are no high-adherence patients."""
    if groups.high_model is None:
        return []
    idx = _nearest_centroid(np.asarray(query, dtype=np.float64), groups.high_model.centroids)
    return _rank_counter(groups.high_activities[idx])


def recommend_different_adherence(
    query: np.ndarray, groups: AdherenceGroupModel
) -> List[Tuple[str, int]]:
    """PA2: ranked activities of the nearest cluster among the band-seeded
    model over the whole population."""
    idx = _nearest_centroid(np.asarray(query, dtype=np.float64), groups.band_model.centroids)
    return _rank_counter(groups.band_activities[idx])


def knn_neighbors(
    query: np.ndarray,
    vectors: np.ndarray,
    patient_ids: Sequence[str],
    k: int,
) -> List[Tuple[str, float]]:
    """The min(k, n) nearest patients by Euclidean distance, ascending,
    ties broken by ascending patient id."""
    if k < 1:
        raise ValueError("k must be >= 1")
    vectors = np.asarray(vectors, dtype=np.float64)
    if vectors.shape[0] == 0:
        raise ValueError("empty population")
    query = np.asarray(query, dtype=np.float64)
    d2 = np.sum((vectors - query) ** 2, axis=1)
    order = sorted(range(vectors.shape[0]), key=lambda i: (d2[i], patient_ids[i]))
    return [(patient_ids[i], float(np.sqrt(d2[i]))) for i in order[:k]]


def knn_activities(
    neighbor_ids: Sequence[str],
    completed_by_id: Dict[str, Sequence[str]],
) -> List[Tuple[str, int]]:
    """pa: union of the neighbors' completed activities, ranked like the
    cluster sources."""
    counter: Counter = Counter()
    for pid in neighbor_ids:
        counter.update(completed_by_id.get(pid, ()))
    return _rank_counter(counter)


def combine(
    pa1: Sequence[Tuple[str, int]],
    pa2: Sequence[Tuple[str, int]],
    pa: Sequence[Tuple[str, int]],
    ontology: ActivityOntology,
    threshold: float = DEFAULT_SIMILARITY_THRESHOLD,
    cap: int = 5,
) -> List[Candidate]:
    """Union of the three sources in order, duplicate ids merged (support
    summed, earliest provenance kept), similar activities eliminated, then
    capped by (support desc, original order)."""
    merged: List[Candidate] = []
    seen: Dict[str, Candidate] = {}
    for source, provenance in (
        (pa1, Provenance.HIGH_ADH),
        (pa2, Provenance.DIFF_ADH),
        (pa, Provenance.KNN),
    ):
        for activity_id, count in source:
            if activity_id in seen:
                seen[activity_id].support_count += count
            else:
                cand = Candidate(activity_id, provenance, count)
                seen[activity_id] = cand
                merged.append(cand)
    if not merged:
        raise NoCandidatesError("no candidates")
    kept_ids = eliminate_similar([c.activity_id for c in merged], threshold, ontology)
    kept_set = set(kept_ids)
    kept = [c for c in merged if c.activity_id in kept_set]
    ranked = sorted(
        range(len(kept)), key=lambda i: (-kept[i].support_count, i)
    )
    return [kept[i] for i in ranked[:cap]]


def recommend(
    case_id: str,
    patient_id: str,
    query: np.ndarray,
    vectors: np.ndarray,
    patient_ids: Sequence[str],
    bands: Sequence[BandLevel],
    completed: Sequence[Sequence[str]],
    ontology: ActivityOntology,
    config: RecommenderConfig = RecommenderConfig(),
    now: float = 0.0,
    groups: Optional[AdherenceGroupModel] = None,
) -> RecommendationCase:
    """Run all three sources for one patient and emit a PENDING case. A
    population with no completed activities yields an empty cold-start case
    for manual assignment."""
    if groups is None:
        groups = build_group_model(vectors, bands, completed, config)
    pa1 = recommend_high_adherence(query, groups)
    pa2 = recommend_different_adherence(query, groups)
    neighbors = knn_neighbors(query, vectors, patient_ids, config.knn_k)
    completed_by_id = {pid: completed[i] for i, pid in enumerate(patient_ids)}
    pa = knn_activities([pid for pid, _ in neighbors], completed_by_id)
    try:
        candidates = combine(
            pa1, pa2, pa, ontology, config.dedup_threshold, config.candidate_cap
        )
        cold_start = False
    except NoCandidatesError:
        candidates = []
        cold_start = True
    return RecommendationCase(
        id=case_id,
        patient_id=patient_id,
        candidates=candidates,
        created_at=now,
        cold_start=cold_start,
    )
