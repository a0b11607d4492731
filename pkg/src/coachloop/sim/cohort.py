"""Synthetic cohort generation for desk-scale experiments.

Band membership follows the requested mix exactly (largest-remainder
rounding); per-band feature blobs and activity pools are configurable.
Everything is a pure function of the seed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List

import numpy as np

BANDS = ("HIGH", "MEDIUM", "LOW")

# completed-out-of-8 choices that land inside each band at the default
# 0.75 / 0.4 cutoffs
_BAND_COMPLETED_CHOICES = {
    "HIGH": (6, 7, 8),
    "MEDIUM": (4, 5),
    "LOW": (0, 1, 2, 3),
}
_HISTORY_LEN = 8

DEFAULT_BLOBS = {
    "HIGH": {
        "means": [22.0, 0.85, 7.5, 0.8, 1.0, 34.0],
        "noise": [1.5, 0.05, 0.5, 0.08, 0.8, 6.0],
    },
    "MEDIUM": {
        "means": [26.0, 0.55, 6.8, 0.5, 2.0, 45.0],
        "noise": [2.0, 0.08, 0.6, 0.1, 0.8, 8.0],
    },
    "LOW": {
        "means": [31.0, 0.25, 5.9, 0.2, 3.5, 55.0],
        "noise": [2.5, 0.08, 0.8, 0.08, 0.5, 8.0],
    },
}

DEFAULT_HABITS = {
    "HIGH": ["jog", "cycle_vigorous", "swim_laps", "sprint_intervals"],
    "MEDIUM": ["walk_brisk", "cycle_leisure", "squats", "yoga_power"],
    "LOW": ["walk_easy", "stretch_morning", "yoga_gentle"],
}

DEFAULT_DIET_WORDS = {
    "HIGH": ["healthy", "balanced"],
    "MEDIUM": ["mixed", "vegetarian"],
    "LOW": ["junk", "fast", "unhealthy"],
}

DEFAULT_PROFESSIONS = {
    "HIGH": ["nurse", "gardener", "teacher", "farmer"],
    "MEDIUM": ["teacher", "salesperson", "student", "manager"],
    "LOW": ["developer", "accountant", "driver", "writer"],
}


@dataclass
class CohortSpec:
    n: int
    seed: int
    band_mix: Dict[str, float]
    fresh_patients: int = 2
    blob_spread: Dict[str, dict] = field(default_factory=lambda: dict(DEFAULT_BLOBS))
    activity_habits: Dict[str, list] = field(default_factory=lambda: dict(DEFAULT_HABITS))
    diet_words: Dict[str, list] = field(default_factory=lambda: dict(DEFAULT_DIET_WORDS))
    professions: Dict[str, list] = field(default_factory=lambda: dict(DEFAULT_PROFESSIONS))

    def validate(self) -> None:
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if set(self.band_mix) != set(BANDS):
            raise ValueError(f"band_mix must name exactly {BANDS}")
        if any(not 0 <= p <= 1 for p in self.band_mix.values()):
            raise ValueError("band_mix proportions must be in [0, 1]")
        if abs(sum(self.band_mix.values()) - 1.0) > 1e-9:
            raise ValueError("band_mix must sum to 1")

    @classmethod
    def from_file(cls, path) -> "CohortSpec":
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
        spec = cls(
            n=doc["n"],
            seed=doc["seed"],
            band_mix=doc["band_mix"],
            fresh_patients=doc.get("fresh_patients", 2),
            blob_spread=doc.get("blob_spread", dict(DEFAULT_BLOBS)),
            activity_habits=doc.get("activity_habits", dict(DEFAULT_HABITS)),
            diet_words=doc.get("diet_words", dict(DEFAULT_DIET_WORDS)),
            professions=doc.get("professions", dict(DEFAULT_PROFESSIONS)),
        )
        spec.validate()
        return spec


@dataclass
class CohortMember:
    name: str
    external_ref: str
    band: str
    # answers the member gives during intake
    age: int
    bmi: float
    diet_word: str
    sleep_hours: float
    activity_0_10: int
    profession: str
    # pre-existing assignment history seeded into the store
    history: List[dict] = field(default_factory=list)


@dataclass
class Cohort:
    spec: CohortSpec
    members: List[CohortMember]

    def band_counts(self) -> Dict[str, int]:
        counts = {b: 0 for b in BANDS}
        for m in self.members:
            counts[m.band] += 1
        return counts


def _largest_remainder(n: int, mix: Dict[str, float]) -> Dict[str, int]:
    exact = {b: n * mix[b] for b in BANDS}
    counts = {b: int(exact[b]) for b in BANDS}
    leftover = n - sum(counts.values())
    by_remainder = sorted(BANDS, key=lambda b: (-(exact[b] - counts[b]), BANDS.index(b)))
    for b in by_remainder[:leftover]:
        counts[b] += 1
    return counts


def generate(spec: CohortSpec) -> Cohort:
    spec.validate()
    rng = np.random.default_rng(spec.seed)
    counts = _largest_remainder(spec.n, spec.band_mix)
    members: List[CohortMember] = []
    idx = 0
    base_ts = 1_000.0
    for band in BANDS:
        blob = spec.blob_spread[band]
        means = np.asarray(blob["means"], dtype=float)
        noise = np.asarray(blob["noise"], dtype=float)
        for _ in range(counts[band]):
            idx += 1
            raw = rng.normal(means, noise)
            bmi = float(np.clip(raw[0], 14, 55))
            sleep = float(np.clip(raw[2], 3, 12))
            activity = int(np.clip(round(raw[3] * 10), 0, 10))
            age = int(np.clip(round(raw[5]), 18, 90))
            completed_n = int(rng.choice(_BAND_COMPLETED_CHOICES[band]))
            pool = spec.activity_habits[band]
            history = []
            for j in range(_HISTORY_LEN):
                history.append(
                    {
                        "activity_id": str(rng.choice(pool)),
                        "assigned_at": base_ts + idx * 100 + j,
                        "completed": j < completed_n,
                        "feedback_text": None,
                        "motivation_rating": None,
                    }
                )
            members.append(
                CohortMember(
                    name=f"Patient {idx:03d}",
                    external_ref=f"sim-{idx:03d}",
                    band=band,
                    age=age,
                    bmi=round(bmi, 1),
                    diet_word=str(rng.choice(spec.diet_words[band])),
                    sleep_hours=round(sleep, 1),
                    activity_0_10=activity,
                    profession=str(rng.choice(spec.professions[band])),
                    history=history,
                )
            )
    return Cohort(spec=spec, members=members)
