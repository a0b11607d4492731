"""End-to-end desk-scale experiment: drive the whole service through its
public operations with a synthetic cohort and report oracle agreement."""

from __future__ import annotations

import json
import shutil
import time
from collections import Counter
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np

from ..config import AppConfig
from ..recommender import knn_neighbors
from ..service import CoachService
from ..store import Store
from .cohort import Cohort, CohortMember, CohortSpec, generate
from .oracles import oracle_knn, oracle_nearest, oracle_union_dedup


class SimClock:
    """Deterministic monotone clock so replays are byte-stable."""

    def __init__(self, start: float = 1_700_000_000.0, step: float = 1.0):
        self.now = start
        self.step = step

    def __call__(self) -> float:
        self.now += self.step
        return self.now


_ANSWER_RULES = (
    ("sound good", lambda m: "yes"),
    ("how old are you", lambda m: str(m.age)),
    ("what is your bmi", lambda m: str(m.bmi)),
    ("describe your diet", lambda m: m.diet_word),
    ("hours do you sleep", lambda m: str(m.sleep_hours)),
    ("how active are you", lambda m: str(m.activity_0_10)),
    ("what is your profession", lambda m: m.profession),
    ("complete your assigned activity", lambda m: "no" if m.band == "LOW" else "yes"),
    ("how motivated did you feel", lambda m: "2" if m.band == "LOW" else "4"),
    ("tell your coach", lambda m: "it went fine overall"),
)


def _answer_for(member: CohortMember, bot_text: str) -> Optional[str]:
    lowered = bot_text.lower()
    # the last question in the bot line wins
    best = None
    best_pos = -1
    for needle, make in _ANSWER_RULES:
        pos = lowered.rfind(needle)
        if pos > best_pos:
            best_pos = pos
            best = make(member)
    return best if best_pos >= 0 else None


def _run_conversation(
    service: CoachService,
    session_key: str,
    member: CohortMember,
    opening: str,
    stop_marker: str,
    max_turns: int = 20,
) -> str:
    bot_text = opening
    for _ in range(max_turns):
        if stop_marker in bot_text:
            return bot_text
        answer = _answer_for(member, bot_text)
        if answer is None:
            raise RuntimeError(f"no scripted answer for bot line: {bot_text!r}")
        bot_text = service.chat_webhook(session_key, answer)["text"]
    raise RuntimeError(f"conversation did not reach {stop_marker!r}")


def _register_and_intake(service: CoachService, member: CohortMember) -> str:
    reg = service.register_patient(
        {"external_ref": member.external_ref, "name": member.name}
    )
    _run_conversation(
        service, reg["session_key"], member, reg["first_message"], "profile is complete"
    )
    return reg["patient_id"]


def _seed_history(service: CoachService, patient_id: str, member: CohortMember) -> None:
    patient = service.store.get("patients", patient_id)
    patient["adherence_history"] = list(member.history)
    service.store.put("patients", patient_id, patient)


def _check_nearest(service: CoachService, counters: Dict[str, List[int]]) -> None:
    snapshot = service._latest_snapshot()
    model = snapshot["band_model"]
    expected = oracle_nearest(snapshot["vectors"], model["centroids"])
    counters["nearest"][0] += len(expected)
    counters["nearest"][1] += sum(
        1 for a, b in zip(expected, model["labels"]) if a == b
    )


def run_experiment(spec: CohortSpec, config: AppConfig, out_dir) -> dict:
    spec.validate()
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    store_dir = out_dir / "store"
    if store_dir.exists():
        shutil.rmtree(store_dir)

    clock = SimClock()
    service = CoachService(config, store=Store(store_dir), clock=clock)
    cohort = generate(spec)
    fresh_spec = CohortSpec(
        n=spec.fresh_patients,
        seed=spec.seed + 1,
        band_mix=spec.band_mix,
        blob_spread=spec.blob_spread,
        activity_habits=spec.activity_habits,
        diet_words=spec.diet_words,
        professions=spec.professions,
    )
    fresh = generate(fresh_spec)
    for i, member in enumerate(fresh.members, 1):
        member.external_ref = f"fresh-{i:03d}"
        member.name = f"Fresh patient {i:03d}"
        member.history = []

    # agreement counters: [checked, agreed]
    counters = {"nearest": [0, 0], "knn": [0, 0], "dedup": [0, 0]}

    for member in cohort.members:
        pid = _register_and_intake(service, member)
        _seed_history(service, pid, member)

    first_snapshot = service.refresh_models()
    _check_nearest(service, counters)

    rec_cfg = config.recommender_config()
    ontology_doc = service.ontology.to_document()
    cases = []
    for member in fresh.members:
        pid = _register_and_intake(service, member)
        case = service.get_recommendations(pid)
        snapshot = service._latest_snapshot()
        patient = service.store.get("patients", pid)
        query = service._query_vector(patient, snapshot)

        # KNN agreement against the full-sort oracle
        main_knn = [
            nid
            for nid, _ in knn_neighbors(
                query,
                np.asarray(snapshot["vectors"], dtype=np.float64),
                snapshot["patient_ids"],
                rec_cfg.knn_k,
            )
        ]
        expect_knn = oracle_knn(
            list(query), snapshot["vectors"], snapshot["patient_ids"], rec_cfg.knn_k
        )
        counters["knn"][0] += 1
        counters["knn"][1] += int(main_knn == expect_knn)

        # combine/dedup agreement on the actual case candidates
        from ..recommender import (
            knn_activities,
            recommend_different_adherence,
            recommend_high_adherence,
        )

        groups = service._groups_from_snapshot(snapshot)
        pa1 = recommend_high_adherence(query, groups)
        pa2 = recommend_different_adherence(query, groups)
        completed_by_id = {
            p: snapshot["completed"][i]
            for i, p in enumerate(snapshot["patient_ids"])
        }
        pa = knn_activities(main_knn, completed_by_id)
        expected = oracle_union_dedup(
            [(pa1, "HIGH_ADH"), (pa2, "DIFF_ADH"), (pa, "KNN")],
            ontology_doc,
            rec_cfg.dedup_threshold,
            rec_cfg.candidate_cap,
        )
        got = [
            (c["activity_id"], c["provenance"], c["support_count"])
            for c in case["candidates"]
        ]
        counters["dedup"][0] += 1
        counters["dedup"][1] += int(got == expected)

        accepted = None
        if case["candidates"]:
            accepted = case["candidates"][0]["activity_id"]
            service.decide(case["id"], "ACCEPT", accepted, "auto-accepted top candidate")
            session_key = f"chat-{pid}"
            outbound = [
                doc
                for _, doc in service.store.all("outbound")
                if doc["session_key"] == session_key
            ]
            _run_conversation(
                service, session_key, member, outbound[-1]["text"], "coach has been notified"
            )
        cases.append(
            {
                "patient_id": pid,
                "cold_start": case["cold_start"],
                "candidates": case["candidates"],
                "accepted": accepted,
            }
        )

    second_snapshot = service.refresh_models()
    _check_nearest(service, counters)

    provenance_mix = Counter(
        c["provenance"] for case in cases for c in case["candidates"]
    )
    snapshots = []
    for sid in (first_snapshot, second_snapshot):
        doc = service.store.get("snapshots", sid)
        model = doc["band_model"]
        sizes = Counter(model["labels"])
        snapshots.append(
            {
                "id": sid,
                "cluster_sizes": [sizes.get(i, 0) for i in range(len(model["centroids"]))],
                "wcss": model["wcss"],
                "wcss_trajectory": model["wcss_trajectory"],
                "iterations_run": model["iterations_run"],
            }
        )

    report = {
        "seed": spec.seed,
        "cohort": {"n": spec.n, "band_counts": cohort.band_counts()},
        "fresh_patients": spec.fresh_patients,
        "snapshots": snapshots,
        "cases": cases,
        "provenance_mix": dict(sorted(provenance_mix.items())),
        "oracle_agreement": {
            name: {"checked": c[0], "agreed": c[1]} for name, c in counters.items()
        },
        "decision_log_length": service.store.count("decisions"),
        "integrity_problems": service.check_integrity(),
        "generated_at": time.time(),  # excluded from stability comparisons
    }

    (out_dir / "report.json").write_text(
        json.dumps(report, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    (out_dir / "report.txt").write_text(_text_report(report), encoding="utf-8")
    service.store.close()
    return report


def _text_report(report: dict) -> str:
    lines = [
        "coachloop simulation report",
        f"seed: {report['seed']}",
        f"cohort: n={report['cohort']['n']} bands={report['cohort']['band_counts']}",
        "",
        "snapshots:",
    ]
    for snap in report["snapshots"]:
        lines.append(
            f"  {snap['id']}: sizes={snap['cluster_sizes']} "
            f"wcss={snap['wcss']:.4f} iters={snap['iterations_run']}"
        )
    lines.append("")
    lines.append("cases:")
    for case in report["cases"]:
        cands = ", ".join(
            f"{c['activity_id']}[{c['provenance']}x{c['support_count']}]"
            for c in case["candidates"]
        )
        lines.append(f"  {case['patient_id']}: {cands} -> accepted {case['accepted']}")
    lines.append("")
    lines.append(f"provenance mix: {report['provenance_mix']}")
    lines.append("oracle agreement:")
    for name, c in report["oracle_agreement"].items():
        lines.append(f"  {name}: {c['agreed']}/{c['checked']}")
    lines.append(f"decision log length: {report['decision_log_length']}")
    if report["integrity_problems"]:
        lines.append(f"INTEGRITY PROBLEMS: {report['integrity_problems']}")
    return "\n".join(lines) + "\n"


def report_stable_view(report: dict) -> dict:
    """The report minus its wall-clock field, for replay comparisons."""
    view = dict(report)
    view.pop("generated_at", None)
    return view
