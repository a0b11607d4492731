"""Adherence-seeded iterative-refinement clustering (Lloyd-style).

Seeding uses adherence bands (HIGH, MEDIUM, LOW band means) when k <= 3,
falling back to deterministic farthest-first otherwise. The refinement loop
alternates nearest-centroid assignment (ties to the lowest index) and
member-mean centroid updates until labels stop changing or the iteration
limit is hit.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Sequence

import numpy as np

from . import kernels
from .patients import BandLevel

MODEL_SCHEMA_VERSION = 1

BAND_ORDER = (BandLevel.HIGH, BandLevel.MEDIUM, BandLevel.LOW)


class SeedMode(str, Enum):
    ADHERENCE_BANDS = "ADHERENCE_BANDS"
    FARTHEST_FIRST = "FARTHEST_FIRST"


@dataclass(frozen=True)
class ClusteringConfig:
    k: int = 3
    max_iters: int = 100
    seed_mode: SeedMode = SeedMode.ADHERENCE_BANDS

    def validate(self, population_size: int) -> None:
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.k > population_size:
            raise ValueError(
                f"k={self.k} exceeds population size {population_size}"
            )


@dataclass
class ClusterModel:
    centroids: np.ndarray  # (k, d)
    labels: np.ndarray  # (n,)
    iterations_run: int
    wcss: float
    # WCSS recorded after every assignment and every update step
    wcss_trajectory: List[float] = field(default_factory=list)

    @property
    def k(self) -> int:
        return self.centroids.shape[0]

    def members(self, cluster: int) -> np.ndarray:
        return np.flatnonzero(self.labels == cluster)

    def to_dict(self, config: Optional[ClusteringConfig] = None) -> dict:
        doc = {
            "version": MODEL_SCHEMA_VERSION,
            "centroids": self.centroids.tolist(),
            "labels": self.labels.tolist(),
            "iterations_run": self.iterations_run,
            "wcss": self.wcss,
            "wcss_trajectory": list(self.wcss_trajectory),
        }
        if config is not None:
            doc["config"] = {
                "k": config.k,
                "max_iters": config.max_iters,
                "seed_mode": config.seed_mode.value,
            }
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "ClusterModel":
        if doc.get("version") != MODEL_SCHEMA_VERSION:
            raise ValueError(f"unsupported cluster model version: {doc.get('version')}")
        return cls(
            centroids=np.asarray(doc["centroids"], dtype=np.float64),
            labels=np.asarray(doc["labels"], dtype=np.int64),
            iterations_run=doc["iterations_run"],
            wcss=doc["wcss"],
            wcss_trajectory=list(doc.get("wcss_trajectory", [])),
        )


def euclidean_distance(a: Sequence[float], b: Sequence[float]) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return float(np.sqrt(kernels.sq_dist(a, b)))


def _farthest_first(points: np.ndarray, chosen: List[np.ndarray], count: int) -> None:
    """Append `count` centroids to `chosen`: if none chosen yet, start with
    the point nearest the global mean, then repeatedly take the point
    maximizing its min distance to all chosen (ties -> lowest row index)."""
    for _ in range(count):
        if not chosen:
            mean = points.mean(axis=0)
            d2 = np.sum((points - mean) ** 2, axis=1)
            chosen.append(points[int(np.argmin(d2))].copy())
            continue
        centers = np.vstack(chosen)
        min_d2 = kernels.pairwise_sq_dists(points, centers).min(axis=1)
        chosen.append(points[int(np.argmax(min_d2))].copy())


def seed_centroids(
    points: np.ndarray,
    bands: Sequence[BandLevel],
    config: ClusteringConfig,
) -> np.ndarray:
    """Deterministic initial centroids. ADHERENCE_BANDS: band means in the
    order HIGH, MEDIUM, LOW (empty bands fall back to farthest-first picks);
    only valid for k <= 3, larger k switches to FARTHEST_FIRST."""
    points = np.asarray(points, dtype=np.float64)
    config.validate(points.shape[0])
    mode = config.seed_mode
    if mode == SeedMode.ADHERENCE_BANDS and config.k > 3:
        mode = SeedMode.FARTHEST_FIRST

    chosen: List[np.ndarray] = []
    if mode == SeedMode.ADHERENCE_BANDS:
        band_arr = np.asarray([BAND_ORDER.index(b) for b in bands])
        pending = 0
        for i, level in enumerate(BAND_ORDER[: config.k]):
            member_rows = np.flatnonzero(band_arr == i)
            if member_rows.size:
                _farthest_first(points, chosen, pending)
                pending = 0
                chosen.append(points[member_rows].mean(axis=0))
            else:
                pending += 1
        _farthest_first(points, chosen, pending)
    else:
        _farthest_first(points, chosen, config.k)
    return np.vstack(chosen)


def _wcss(points: np.ndarray, centroids: np.ndarray, labels: np.ndarray) -> float:
    total = 0.0
    for i in range(points.shape[0]):
        total += kernels.sq_dist(points[i], centroids[labels[i]])
    return float(total)


def cluster(
    points: np.ndarray,
    bands: Sequence[BandLevel],
    config: ClusteringConfig = ClusteringConfig(),
) -> ClusterModel:
    """Run iterative refinement to a fixed point (or max_iters).

    Empty clusters are repaired by reseeding them with the point currently
    farthest from its own centroid.
    """
    points = np.asarray(points, dtype=np.float64)
    if points.ndim != 2 or points.shape[0] == 0:
        raise ValueError("empty population")
    config.validate(points.shape[0])

    centroids = seed_centroids(points, bands, config)
    labels, dists = kernels.assign_labels(points, centroids)
    trajectory = [float(dists.sum())]

    iterations = 0
    while iterations < config.max_iters:
        iterations += 1
        new_centroids, counts = kernels.update_centroids(points, labels, config.k)
        # repair empty clusters before measuring WCSS against the new centroids
        for j in range(config.k):
            if counts[j] == 0:
                per_point = np.array(
                    [kernels.sq_dist(points[i], new_centroids[labels[i]])
                     for i in range(points.shape[0])]
                )
                far = int(np.argmax(per_point))
                new_centroids[j] = points[far]
                labels = labels.copy()
                labels[far] = j
        centroids = new_centroids
        trajectory.append(_wcss(points, centroids, labels))

        new_labels, dists = kernels.assign_labels(points, centroids)
        trajectory.append(float(dists.sum()))
        changed = bool(np.any(new_labels != labels))
        labels = new_labels
        if not changed:
            break

    return ClusterModel(
        centroids=centroids,
        labels=labels,
        iterations_run=iterations,
        wcss=trajectory[-1],
        wcss_trajectory=trajectory,
    )
