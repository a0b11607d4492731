"""Patient data model, featurization, and adherence scoring.

A patient is reduced to a fixed 6-dimensional feature vector
(bmi, diet_score, sleep_hours, activity_level, profession_sedentariness, age)
which is z-score normalized over the whole population before any distance
is taken.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

FEATURE_FIELDS = (
    "bmi",
    "diet_score",
    "sleep_hours",
    "activity_level",
    "profession_sedentariness",
    "age",
)
FEATURE_DIM = len(FEATURE_FIELDS)

DEFAULT_PROFESSION_ORDINAL = 2
DEFAULT_HIGH_CUTOFF = 0.75
DEFAULT_MEDIUM_CUTOFF = 0.4


class BandLevel(str, Enum):
    HIGH = "HIGH"
    MEDIUM = "MEDIUM"
    LOW = "LOW"


@dataclass(frozen=True)
class AdherenceBand:
    """Discretized adherence. ``score`` is None for cold-start patients with
    no history; they are treated as MEDIUM."""

    level: BandLevel
    score: Optional[float]

    @property
    def absent(self) -> bool:
        return self.score is None


@dataclass
class AdherenceRecord:
    activity_id: str
    assigned_at: float
    completed: bool
    feedback_text: Optional[str] = None
    motivation_rating: Optional[int] = None

    def to_dict(self) -> dict:
        return {
            "activity_id": self.activity_id,
            "assigned_at": self.assigned_at,
            "completed": self.completed,
            "feedback_text": self.feedback_text,
            "motivation_rating": self.motivation_rating,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "AdherenceRecord":
        return cls(
            activity_id=d["activity_id"],
            assigned_at=d["assigned_at"],
            completed=d["completed"],
            feedback_text=d.get("feedback_text"),
            motivation_rating=d.get("motivation_rating"),
        )


@dataclass
class PatientProfile:
    id: str
    age: float
    profession_label: str
    bmi: float
    diet_score: float
    sleep_hours: float
    activity_level: float
    health_flags: set = field(default_factory=set)
    adherence_history: list = field(default_factory=list)

    def validate(self) -> None:
        if self.bmi <= 0:
            raise ValueError(f"bmi must be positive, got {self.bmi}")
        if not 0 <= self.sleep_hours <= 24:
            raise ValueError(f"sleep_hours must be in [0, 24], got {self.sleep_hours}")
        if not 0 <= self.diet_score <= 1:
            raise ValueError(f"diet_score must be in [0, 1], got {self.diet_score}")
        if not 0 <= self.activity_level <= 1:
            raise ValueError(
                f"activity_level must be in [0, 1], got {self.activity_level}"
            )
        last = None
        for rec in self.adherence_history:
            if last is not None and rec.assigned_at < last:
                raise ValueError("adherence_history must be monotone in assigned_at")
            last = rec.assigned_at

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "age": self.age,
            "profession_label": self.profession_label,
            "bmi": self.bmi,
            "diet_score": self.diet_score,
            "sleep_hours": self.sleep_hours,
            "activity_level": self.activity_level,
            "health_flags": sorted(self.health_flags),
            "adherence_history": [r.to_dict() for r in self.adherence_history],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PatientProfile":
        return cls(
            id=d["id"],
            age=d["age"],
            profession_label=d["profession_label"],
            bmi=d["bmi"],
            diet_score=d["diet_score"],
            sleep_hours=d["sleep_hours"],
            activity_level=d["activity_level"],
            health_flags=set(d.get("health_flags", [])),
            adherence_history=[
                AdherenceRecord.from_dict(r) for r in d.get("adherence_history", [])
            ],
        )


@dataclass(frozen=True)
class RawFeatures:
    """Unnormalized feature values in FEATURE_FIELDS order."""

    values: tuple
    used_default_profession: bool = False


def load_profession_map(path) -> dict:
    """Read a profession sedentariness table: one ``label: ordinal`` mapping
    per line, ordinals 0 (very active job) to 4 (fully sedentary).
    Blank lines and lines starting with '#' are ignored."""
    table = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if ":" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'label: ordinal'")
        label, _, ordinal = line.rpartition(":")
        label = label.strip().lower()
        try:
            value = int(ordinal.strip())
        except ValueError:
            raise ValueError(f"{path}:{lineno}: ordinal is not an integer") from None
        if not 0 <= value <= 4:
            raise ValueError(f"{path}:{lineno}: ordinal must be in 0..4")
        table[label] = value
    return table


def vectorize(
    profile: PatientProfile,
    profession_map: Mapping[str, int],
    default_ordinal: int = DEFAULT_PROFESSION_ORDINAL,
) -> RawFeatures:
    """Project a profile onto the fixed raw feature tuple. An unknown
    profession falls back to ``default_ordinal`` and is flagged."""
    label = profile.profession_label.strip().lower()
    known = label in profession_map
    ordinal = profession_map.get(label, default_ordinal)
    return RawFeatures(
        values=(
            float(profile.bmi),
            float(profile.diet_score),
            float(profile.sleep_hours),
            float(profile.activity_level),
            float(ordinal),
            float(profile.age),
        ),
        used_default_profession=not known,
    )


@dataclass(frozen=True)
class Normalization:
    mean: np.ndarray
    std: np.ndarray  # zero-variance dimensions carry std 0

    def apply(self, raw: Sequence[float]) -> np.ndarray:
        raw = np.asarray(raw, dtype=np.float64)
        out = np.zeros_like(raw)
        nonzero = self.std > 0
        out[nonzero] = (raw[nonzero] - self.mean[nonzero]) / self.std[nonzero]
        return out

    def to_dict(self) -> dict:
        return {"mean": self.mean.tolist(), "std": self.std.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "Normalization":
        return cls(
            mean=np.asarray(d["mean"], dtype=np.float64),
            std=np.asarray(d["std"], dtype=np.float64),
        )


def fit_normalization(raw_vectors: Iterable[Sequence[float]]) -> Normalization:
    matrix = np.asarray(list(raw_vectors), dtype=np.float64)
    if matrix.size == 0:
        raise ValueError("empty population")
    mean = matrix.mean(axis=0)
    std = matrix.std(axis=0)  # population std, ddof=0
    return Normalization(mean=mean, std=std)


def normalize(raw_vectors: Iterable[Sequence[float]]) -> np.ndarray:
    """Per-dimension z-score over the population. A zero-variance dimension
    maps to all zeros. Raises on an empty population."""
    matrix = np.asarray(list(raw_vectors), dtype=np.float64)
    if matrix.size == 0:
        raise ValueError("empty population")
    norm = fit_normalization(matrix)
    out = np.zeros_like(matrix)
    nonzero = norm.std > 0
    out[:, nonzero] = (matrix[:, nonzero] - norm.mean[nonzero]) / norm.std[nonzero]
    return out


def band_for(
    score: Optional[float],
    high_cutoff: float = DEFAULT_HIGH_CUTOFF,
    medium_cutoff: float = DEFAULT_MEDIUM_CUTOFF,
) -> BandLevel:
    if score is None:
        return BandLevel.MEDIUM  # cold start joins the middle group
    if score >= high_cutoff:
        return BandLevel.HIGH
    if score >= medium_cutoff:
        return BandLevel.MEDIUM
    return BandLevel.LOW


def adherence_score(
    history: Sequence[AdherenceRecord],
    window: int = 10,
    high_cutoff: float = DEFAULT_HIGH_CUTOFF,
    medium_cutoff: float = DEFAULT_MEDIUM_CUTOFF,
) -> AdherenceBand:
    """Completed / assigned over the most recent ``window`` records."""
    if window < 1:
        raise ValueError("window must be >= 1")
    if not history:
        return AdherenceBand(level=BandLevel.MEDIUM, score=None)
    recent = history[-window:]
    score = sum(1 for r in recent if r.completed) / len(recent)
    return AdherenceBand(level=band_for(score, high_cutoff, medium_cutoff), score=score)
