"""Application configuration: one JSON file plus COACHLOOP_* env overrides."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional

from .clustering import ClusteringConfig
from .ontology import DEFAULT_SIMILARITY_THRESHOLD
from .patients import DEFAULT_HIGH_CUTOFF, DEFAULT_MEDIUM_CUTOFF
from .recommender import RecommenderConfig


def bundled_data_path(name: str) -> Path:
    return Path(resources.files("coachloop").joinpath("data", name))


_ENV_KEYS = {
    "COACHLOOP_PORT": ("port", int),
    "COACHLOOP_DATA_DIR": ("data_dir", str),
    "COACHLOOP_K": ("k", int),
    "COACHLOOP_KNN_K": ("knn_k", int),
    "COACHLOOP_DEDUP_THRESHOLD": ("dedup_threshold", float),
    "COACHLOOP_HIGH_CUTOFF": ("high_cutoff", float),
    "COACHLOOP_MEDIUM_CUTOFF": ("medium_cutoff", float),
    "COACHLOOP_SCRIPT_PATH": ("script_path", str),
    "COACHLOOP_ONTOLOGY_PATH": ("ontology_path", str),
    "COACHLOOP_PROFESSIONS_PATH": ("professions_path", str),
    "COACHLOOP_AUTH_TOKEN": ("auth_token", str),
}


@dataclass
class AppConfig:
    port: int = 8080
    data_dir: str = "./coachloop-data"
    k: int = 3
    max_iters: int = 100
    knn_k: int = 5
    candidate_cap: int = 5
    dedup_threshold: float = DEFAULT_SIMILARITY_THRESHOLD
    high_cutoff: float = DEFAULT_HIGH_CUTOFF
    medium_cutoff: float = DEFAULT_MEDIUM_CUTOFF
    adherence_window: int = 10
    script_path: str = ""
    ontology_path: str = ""
    professions_path: str = ""
    auth_token: Optional[str] = None

    def __post_init__(self):
        if not self.script_path:
            self.script_path = str(bundled_data_path("coaching.top"))
        if not self.ontology_path:
            self.ontology_path = str(bundled_data_path("ontology.json"))
        if not self.professions_path:
            self.professions_path = str(bundled_data_path("professions.txt"))

    def recommender_config(self) -> RecommenderConfig:
        return RecommenderConfig(
            knn_k=self.knn_k,
            candidate_cap=self.candidate_cap,
            dedup_threshold=self.dedup_threshold,
            clustering=ClusteringConfig(k=self.k, max_iters=self.max_iters),
        )


def load_config(path: Optional[str] = None, env: Optional[dict] = None) -> AppConfig:
    values = {}
    if path:
        values.update(json.loads(Path(path).read_text(encoding="utf-8")))
    env = os.environ if env is None else env
    for key, (name, cast) in _ENV_KEYS.items():
        if key in env:
            values[name] = cast(env[key])
    known = {f for f in AppConfig.__dataclass_fields__}
    unknown = set(values) - known
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    return AppConfig(**values)
