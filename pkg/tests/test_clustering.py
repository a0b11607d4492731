import math

import numpy as np
import pytest

from coachloop import kernels
from coachloop.clustering import (
    ClusterModel,
    ClusteringConfig,
    SeedMode,
    cluster,
    euclidean_distance,
    seed_centroids,
)
from coachloop.patients import BandLevel
from coachloop.sim.oracles import oracle_best_two_partition, oracle_nearest

from conftest import random_bands


class TestEuclideanDistance:
    def test_identity(self):
        assert euclidean_distance([1.0, 2.0], [1.0, 2.0]) == 0.0

    def test_3_4_5(self):
        assert euclidean_distance([0.0, 0.0], [3.0, 4.0]) == pytest.approx(5.0)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="dimension mismatch"):
            euclidean_distance([1.0], [1.0, 2.0])

    def test_random_pairs_match_naive_loop(self, rng):
        for _ in range(100):
            a = rng.normal(size=6)
            b = rng.normal(size=6)
            naive = 0.0
            for x, y in zip(a, b):
                naive += (x - y) ** 2
            naive = math.sqrt(naive)
            assert euclidean_distance(a, b) == pytest.approx(naive, abs=1e-12)
            assert euclidean_distance(b, a) == pytest.approx(naive, abs=1e-12)


class TestSeedCentroids:
    def test_all_high_k1_is_population_mean(self, rng):
        points = rng.normal(size=(5, 3))
        bands = [BandLevel.HIGH] * 5
        seeds = seed_centroids(points, bands, ClusteringConfig(k=1))
        assert np.allclose(seeds[0], points.mean(axis=0))

    def test_singleton_band_means(self):
        points = np.array([[0.0, 0.0], [10.0, 10.0]])
        bands = [BandLevel.HIGH, BandLevel.LOW]
        seeds = seed_centroids(points, bands, ClusteringConfig(k=2))
        assert np.allclose(seeds[0], points[0])
        assert np.allclose(seeds[1], points[1])

    def test_band_means_recomputed_independently(self, rng):
        points = rng.normal(size=(10, 4))
        bands = (
            [BandLevel.HIGH] * 4 + [BandLevel.MEDIUM] * 3 + [BandLevel.LOW] * 3
        )
        seeds = seed_centroids(points, bands, ClusteringConfig(k=3))
        for idx, (lo, hi) in enumerate([(0, 4), (4, 7), (7, 10)]):
            mean = [
                sum(points[i][c] for i in range(lo, hi)) / (hi - lo)
                for c in range(4)
            ]
            assert np.allclose(seeds[idx], mean)

    def test_k_exceeds_population(self):
        with pytest.raises(ValueError, match="exceeds population"):
            seed_centroids(
                np.zeros((2, 2)), [BandLevel.HIGH] * 2, ClusteringConfig(k=3)
            )

    def test_farthest_first_deterministic(self, rng):
        points = rng.normal(size=(12, 3))
        bands = [BandLevel.MEDIUM] * 12
        cfg = ClusteringConfig(k=4, seed_mode=SeedMode.FARTHEST_FIRST)
        a = seed_centroids(points, bands, cfg)
        b = seed_centroids(points, bands, cfg)
        assert np.array_equal(a, b)


def assert_model_invariants(points, model: ClusterModel):
    n = points.shape[0]
    assert model.labels.shape == (n,)
    assert set(model.labels.tolist()) <= set(range(model.k))
    # nearest-centroid labeling with lowest-index ties
    expected = oracle_nearest(points.tolist(), model.centroids.tolist())
    assert expected == model.labels.tolist()
    # centroid equals member mean
    for j in range(model.k):
        members = points[model.labels == j]
        if len(members):
            assert np.allclose(model.centroids[j], members.mean(axis=0), atol=1e-9)
    # WCSS non-increasing across recorded steps
    traj = model.wcss_trajectory
    for a, b in zip(traj, traj[1:]):
        assert b <= a + 1e-9


class TestCluster:
    def test_k_equals_n_fixed_point(self, rng):
        points = rng.normal(size=(5, 2)) * 10
        bands = random_bands(rng, 5)
        model = cluster(points, bands, ClusteringConfig(k=5))
        assert model.wcss == pytest.approx(0.0, abs=1e-12)
        assert sorted(model.labels.tolist()) == list(range(5))
        assert model.iterations_run <= 2

    def test_single_point(self):
        points = np.array([[1.0, 2.0, 3.0]])
        model = cluster(points, [BandLevel.MEDIUM], ClusteringConfig(k=1))
        assert np.allclose(model.centroids[0], points[0])
        assert model.wcss == 0.0

    def test_separated_blobs_found(self, rng):
        blob_a = rng.normal(0, 0.3, size=(3, 2))
        blob_b = rng.normal(0, 0.3, size=(3, 2)) + 20.0
        points = np.vstack([blob_a, blob_b])
        bands = random_bands(rng, 6)
        model = cluster(points, bands, ClusteringConfig(k=2))
        partition = frozenset(
            frozenset(np.flatnonzero(model.labels == j).tolist()) for j in range(2)
        )
        expected, _ = oracle_best_two_partition(points.tolist())
        assert partition == expected

    def test_invariants_on_random_instances(self, rng):
        for _ in range(20):
            n = int(rng.integers(3, 40))
            points = rng.normal(size=(n, 6))
            model = cluster(points, random_bands(rng, n), ClusteringConfig(k=3))
            assert_model_invariants(points, model)
            assert model.iterations_run <= 100

    def test_rerunning_assignment_is_stable(self, rng):
        points = rng.normal(size=(30, 6))
        model = cluster(points, random_bands(rng, 30), ClusteringConfig(k=3))
        labels, _ = kernels.assign_labels(points, model.centroids)
        assert np.array_equal(labels, model.labels)

    def test_partition_permutation_consistent(self, rng):
        points = rng.normal(size=(15, 4))
        bands = random_bands(rng, 15)
        model = cluster(points, bands, ClusteringConfig(k=3))
        perm = rng.permutation(15)
        model_p = cluster(points[perm], [bands[i] for i in perm], ClusteringConfig(k=3))
        part_a = frozenset(
            frozenset(np.flatnonzero(model.labels == j).tolist()) for j in range(3)
        )
        part_b = frozenset(
            frozenset(perm[np.flatnonzero(model_p.labels == j)].tolist())
            for j in range(3)
        )
        assert part_a == part_b

    def test_serialization_roundtrip(self, rng):
        points = rng.normal(size=(8, 3))
        model = cluster(points, random_bands(rng, 8), ClusteringConfig(k=2))
        doc = model.to_dict(ClusteringConfig(k=2))
        restored = ClusterModel.from_dict(doc)
        assert np.array_equal(restored.centroids, model.centroids)
        assert np.array_equal(restored.labels, model.labels)
        assert restored.wcss == model.wcss
        assert doc["config"]["k"] == 2


class TestKernelParity:
    """The jit and numpy kernel paths must agree bitwise."""

    def test_assign_and_update_agree(self, rng):
        if not kernels.JIT_ENABLED:
            pytest.skip("jit disabled via COACHLOOP_DISABLE_JIT")
        points = rng.normal(size=(40, 6))
        centers = rng.normal(size=(3, 6))
        labels_j, d_j = kernels.assign_labels_jit(points, centers)
        labels_n, d_n = kernels.assign_labels_numpy(points, centers)
        assert np.array_equal(labels_j, labels_n)
        assert np.allclose(d_j, d_n, atol=1e-12)
        cj, countj = kernels.update_centroids_jit(points, labels_j, 3)
        cn, countn = kernels.update_centroids_numpy(points, labels_n, 3)
        assert np.array_equal(countj, countn)
        assert np.allclose(cj, cn, atol=1e-12)
