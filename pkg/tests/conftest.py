import numpy as np
import pytest

from coachloop.config import bundled_data_path
from coachloop.ontology import load_ontology
from coachloop.patients import BandLevel


@pytest.fixture(scope="session")
def starter_ontology():
    return load_ontology(bundled_data_path("ontology.json"))


@pytest.fixture(scope="session")
def coaching_script_text():
    return bundled_data_path("coaching.top").read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def food_music_text():
    return bundled_data_path("food_music.top").read_text(encoding="utf-8")


def random_bands(rng, n):
    levels = (BandLevel.HIGH, BandLevel.MEDIUM, BandLevel.LOW)
    return [levels[int(i)] for i in rng.integers(0, 3, size=n)]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
