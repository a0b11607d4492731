"""Command line entry points: simulation runs, oracle spot checks, and the
HTTP service."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click
import numpy as np

from .config import AppConfig, bundled_data_path, load_config
from .sim.cohort import CohortSpec
from .sim.experiment import run_experiment


@click.group()
def main():
    """Coach-in-the-loop activity recommender toolkit."""


@main.command()
@click.option("--spec", "spec_path", type=click.Path(exists=True), default=None,
              help="Cohort spec JSON (defaults to the bundled spec).")
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--out", "out_dir", type=click.Path(), required=True)
def simulate(spec_path, config_path, out_dir):
    """Run the end-to-end experiment and write report.json / report.txt."""
    spec = CohortSpec.from_file(spec_path or bundled_data_path("cohort.json"))
    config = load_config(config_path)
    config.data_dir = str(Path(out_dir) / "store")
    report = run_experiment(spec, config, out_dir)
    click.echo((Path(out_dir) / "report.txt").read_text())
    disagreements = sum(
        c["checked"] - c["agreed"] for c in report["oracle_agreement"].values()
    )
    if disagreements or report["integrity_problems"]:
        sys.exit(1)


@main.command(name="oracle-check")
@click.option("--module", type=click.Choice(["clustering", "knn", "dedup"]), required=True)
@click.option("--trials", type=int, default=100)
@click.option("--seed", type=int, default=0)
def oracle_check(module, trials, seed):
    """Compare the main implementation against its brute-force oracle."""
    rng = np.random.default_rng(seed)
    failures = 0
    if module == "clustering":
        from .clustering import ClusteringConfig, cluster
        from .patients import BandLevel
        from .sim.oracles import oracle_nearest

        for _ in range(trials):
            n = int(rng.integers(3, 50))
            points = rng.normal(size=(n, 6))
            bands = [
                [BandLevel.HIGH, BandLevel.MEDIUM, BandLevel.LOW][int(b)]
                for b in rng.integers(0, 3, size=n)
            ]
            model = cluster(points, bands, ClusteringConfig(k=3))
            expected = oracle_nearest(points.tolist(), model.centroids.tolist())
            failures += int(expected != model.labels.tolist())
    elif module == "knn":
        from .recommender import knn_neighbors
        from .sim.oracles import oracle_knn

        for _ in range(trials):
            n = int(rng.integers(2, 50))
            points = rng.normal(size=(n, 6))
            ids = [f"p{i:03d}" for i in range(n)]
            query = rng.normal(size=6)
            k = int(rng.integers(1, n + 1))
            got = [pid for pid, _ in knn_neighbors(query, points, ids, k)]
            failures += int(got != oracle_knn(query.tolist(), points.tolist(), ids, k))
    else:
        from .ontology import load_ontology
        from .recommender import Provenance, combine
        from .sim.oracles import oracle_union_dedup

        ontology = load_ontology(bundled_data_path("ontology.json"))
        doc = ontology.to_document()
        all_ids = sorted(ontology.activities)
        for _ in range(trials):
            sources = []
            for _ in range(3):
                size = int(rng.integers(0, 5))
                picks = rng.choice(all_ids, size=size, replace=False) if size else []
                sources.append([(str(a), int(rng.integers(1, 6))) for a in picks])
            threshold = float(rng.uniform(0, 0.5))
            if not any(sources):
                continue
            got = [
                (c.activity_id, c.provenance.value, c.support_count)
                for c in combine(sources[0], sources[1], sources[2], ontology, threshold)
            ]
            expected = oracle_union_dedup(
                [
                    (sources[0], Provenance.HIGH_ADH.value),
                    (sources[1], Provenance.DIFF_ADH.value),
                    (sources[2], Provenance.KNN.value),
                ],
                doc,
                threshold,
                5,
            )
            failures += int(got != expected)
    click.echo(f"{module}: {trials - failures}/{trials} agreements")
    if failures:
        sys.exit(1)


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--static-dir", type=click.Path(exists=True), default=None,
              help="Serve a built dashboard bundle at /.")
def serve(config_path, static_dir):
    """Start the coach service HTTP API."""
    import uvicorn

    from .api import create_app
    from .service import CoachService

    config = load_config(config_path)
    service = CoachService(config)
    uvicorn.run(create_app(service, static_dir), host="0.0.0.0", port=config.port)


if __name__ == "__main__":
    main()
