"""Coach service: registration, chat webhook, model refresh, recommendation
queue and coach decisions, over the embedded store.

All writes are serialized through one lock; reads are snapshot-consistent
dict lookups. The HTTP layer in ``api.py`` is a thin adapter over this
class.
"""

from __future__ import annotations

import threading
import time
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import numpy as np

from .clustering import ClusterModel
from .config import AppConfig
from .dialogue import (
    Phase,
    Session,
    advance,
    feedback_summary,
    intake_to_profile,
    parse_script,
    volunteer_gambit,
)
from .dialogue.session import (
    FEEDBACK_TOPIC,
    INTAKE_CAPTURE_FIELDS,
    INTAKE_FIELD_GAMBITS,
    INTAKE_TOPIC,
    clear_feedback_captures,
    _parse_number,
)
from .ontology import load_ontology
from .patients import (
    FEATURE_FIELDS,
    AdherenceRecord,
    BandLevel,
    adherence_score,
    fit_normalization,
    load_profession_map,
    vectorize,
)
from .recommender import (
    AdherenceGroupModel,
    CaseStatus,
    RecommendationCase,
    build_group_model,
    recommend,
)
from .store import Store

PROFILE_FIELDS = (
    "age",
    "bmi",
    "diet_score",
    "sleep_hours",
    "activity_level",
    "profession_label",
)


class ServiceError(Exception):
    status_code = 400

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


class NotFoundError(ServiceError):
    status_code = 404


class ConflictError(ServiceError):
    status_code = 409


class ValidationError(ServiceError):
    status_code = 422


class CoachService:
    def __init__(
        self,
        config: AppConfig,
        store: Optional[Store] = None,
        clock=time.time,
    ):
        self.config = config
        self.store = store or Store(config.data_dir)
        self.clock = clock
        self.script = parse_script(
            Path(config.script_path).read_text(encoding="utf-8")
        )
        self.ontology = load_ontology(config.ontology_path)
        self.profession_map = load_profession_map(config.professions_path)
        self._lock = threading.RLock()

    # ------------------------------------------------------------------ ids

    def _next_id(self, prefix: str, collection: str) -> str:
        return f"{prefix}{self.store.count(collection) + 1:04d}"

    # ----------------------------------------------------------- registration

    def register_patient(self, payload: dict) -> dict:
        for required in ("external_ref", "name"):
            if not payload.get(required):
                raise ValidationError(f"missing required field: {required}")
        with self._lock:
            for _, doc in self.store.all("patients"):
                if doc["external_ref"] == payload["external_ref"]:
                    raise ConflictError(
                        f"external_ref already registered: {payload['external_ref']}"
                    )
            patient_id = self._next_id("p", "patients")
            now = self.clock()
            profile = {
                f: payload[f] for f in PROFILE_FIELDS if f in payload
            }
            doc = {
                "id": patient_id,
                "external_ref": payload["external_ref"],
                "name": payload["name"],
                "created_at": now,
                "profile": profile,
                "health_flags": sorted(payload.get("health_flags", [])),
                "adherence_history": [],
            }
            self.store.put("patients", patient_id, doc)

            session = Session(patient_id=patient_id, current_topic=INTAKE_TOPIC)
            first = volunteer_gambit(session, self.script, now) or ""
            session_key = f"chat-{patient_id}"
            self._save_session(session_key, session)
            return {
                "patient_id": patient_id,
                "session_key": session_key,
                "first_message": first,
            }

    def _save_session(self, session_key: str, session: Session) -> None:
        self.store.put("sessions", session_key, session.to_dict())

    def _load_session(self, session_key: str) -> Session:
        doc = self.store.get("sessions", session_key)
        if doc is None:
            raise NotFoundError(f"unknown session: {session_key}")
        return Session.from_dict(doc)

    # ------------------------------------------------------------------ chat

    def chat_webhook(self, session_key: str, text: str, timestamp: Optional[float] = None) -> dict:
        with self._lock:
            session = self._load_session(session_key)
            now = self.clock() if timestamp is None else timestamp
            response = advance(session, text, self.script, now)

            if session.phase == Phase.INTAKE:
                response = self._after_intake_turn(session, response, now)
            elif session.phase == Phase.FEEDBACK:
                response = self._after_feedback_turn(session, response, now)

            self._save_session(session_key, session)
            return {"session_key": session_key, "text": response}

    def _after_intake_turn(self, session: Session, response: str, now: float) -> str:
        result = intake_to_profile(session)
        # out-of-range answers: drop the capture and queue the gambit again
        for fieldname in result.reask:
            capture = next(
                c for c, f in INTAKE_CAPTURE_FIELDS.items() if f == fieldname
            )
            session.captures.pop(capture, None)
            session.intake_answers.pop(capture, None)
            label = INTAKE_FIELD_GAMBITS[fieldname]
            self._unmark_gambit(session, INTAKE_TOPIC, label)

        patient = self.store.get("patients", session.patient_id)
        changed = False
        for fieldname, value in result.updates.items():
            if patient["profile"].get(fieldname) != value:
                patient["profile"][fieldname] = value
                changed = True
        complete = all(f in patient["profile"] for f in PROFILE_FIELDS)
        if changed or complete:
            self.store.put("patients", patient["id"], patient)
        if complete:
            session.set_phase(Phase.IDLE)
            return self._append_to_bot_line(
                session, response, "Thanks, your profile is complete!"
            )
        if session.pending_gambit is None:
            nxt = self._volunteer_into(session, response, now)
            if nxt is not None:
                response = nxt
        return response

    def _after_feedback_turn(self, session: Session, response: str, now: float) -> str:
        rating = session.captures.get("rating")
        if rating is not None:
            value = _parse_number(rating)
            if value is None or value != int(value) or not 1 <= value <= 5:
                session.captures.pop("rating", None)
                self._unmark_gambit(session, FEEDBACK_TOPIC, "ASKMOTIVATION")

        summary = feedback_summary(session)
        if summary is not None:
            patient = self.store.get("patients", session.patient_id)
            for record in reversed(patient["adherence_history"]):
                if record.get("feedback_text") is None and not record["completed"]:
                    record["completed"] = summary.completed
                    record["motivation_rating"] = summary.motivation_rating
                    record["feedback_text"] = summary.feedback_text
                    break
            else:
                raise ServiceError("no open assignment awaiting feedback")
            self.store.put("patients", patient["id"], patient)
            note_id = self._next_id("note", "notifications")
            self.store.put(
                "notifications",
                note_id,
                {
                    "id": note_id,
                    "patient_id": patient["id"],
                    "kind": "feedback",
                    "completed": summary.completed,
                    "motivation_rating": summary.motivation_rating,
                    "feedback_text": summary.feedback_text,
                    "created_at": now,
                },
            )
            clear_feedback_captures(session)
            session.set_phase(Phase.IDLE)
            return self._append_to_bot_line(
                session, response, "Your coach has been notified."
            )
        if session.pending_gambit is None:
            nxt = self._volunteer_into(session, response, now)
            if nxt is not None:
                response = nxt
        return response

    def _append_to_bot_line(self, session: Session, response: str, suffix: str) -> str:
        combined = f"{response} {suffix}"
        if session.transcript and session.transcript[-1][0] == "bot":
            speaker, _, ts = session.transcript[-1]
            session.transcript[-1] = (speaker, combined, ts)
        return combined

    def _volunteer_into(self, session: Session, response: str, now: float) -> Optional[str]:
        text = volunteer_gambit(session, self.script, now)
        if text is None:
            return None
        return f"{response} {text}"

    def _unmark_gambit(self, session: Session, topic_name: str, label: str) -> None:
        topic = self.script.topic(topic_name)
        for idx, rule in topic.gambits():
            if rule.label == label:
                session.fired_gambits.discard((topic_name, idx))
                return

    # ------------------------------------------------------------ model refresh

    def _complete_patients(self) -> List[dict]:
        return [
            doc
            for _, doc in self.store.all("patients")
            if all(f in doc["profile"] for f in PROFILE_FIELDS)
        ]

    def _patient_band(self, doc: dict):
        records = [AdherenceRecord.from_dict(r) for r in doc["adherence_history"]]
        return adherence_score(
            records,
            window=self.config.adherence_window,
            high_cutoff=self.config.high_cutoff,
            medium_cutoff=self.config.medium_cutoff,
        )

    def refresh_models(self) -> str:
        with self._lock:
            complete = self._complete_patients()
            if not complete:
                raise ServiceError("no patients with complete features")
            raw = []
            bands = []
            scores = []
            completed_lists = []
            for doc in complete:
                profile = doc["profile"]
                from .patients import PatientProfile

                prof = PatientProfile(
                    id=doc["id"],
                    age=profile["age"],
                    profession_label=profile["profession_label"],
                    bmi=profile["bmi"],
                    diet_score=profile["diet_score"],
                    sleep_hours=profile["sleep_hours"],
                    activity_level=profile["activity_level"],
                )
                raw.append(vectorize(prof, self.profession_map).values)
                band = self._patient_band(doc)
                bands.append(band.level)
                scores.append(band.score)
                completed_lists.append(
                    [r["activity_id"] for r in doc["adherence_history"] if r["completed"]]
                )
            norm = fit_normalization(raw)
            matrix = np.array([norm.apply(v) for v in raw])
            rec_cfg = self.config.recommender_config()
            groups = build_group_model(matrix, bands, completed_lists, rec_cfg)

            snapshot_id = self._next_id("snap", "snapshots")
            doc = {
                "id": snapshot_id,
                "created_at": self.clock(),
                "patient_ids": [p["id"] for p in complete],
                "vectors": matrix.tolist(),
                "normalization": norm.to_dict(),
                "bands": [b.value for b in bands],
                "scores": scores,
                "completed": completed_lists,
                "high_rows": groups.high_rows.tolist(),
                "high_model": groups.high_model.to_dict() if groups.high_model else None,
                "high_activities": [dict(c) for c in groups.high_activities],
                "band_model": groups.band_model.to_dict(),
                "band_activities": [dict(c) for c in groups.band_activities],
                "adherence_record_total": self._adherence_record_total(),
                "k": rec_cfg.clustering.k,
            }
            self.store.put("snapshots", snapshot_id, doc)
            return snapshot_id

    def _adherence_record_total(self) -> int:
        return sum(
            len(doc["adherence_history"]) for _, doc in self.store.all("patients")
        )

    def _latest_snapshot(self) -> Optional[dict]:
        ids = self.store.ids("snapshots")
        return self.store.get("snapshots", ids[-1]) if ids else None

    def _snapshot_stale(self, snapshot: Optional[dict]) -> bool:
        if snapshot is None:
            return True
        complete_ids = [p["id"] for p in self._complete_patients()]
        if snapshot["patient_ids"] != complete_ids:
            return True
        return snapshot["adherence_record_total"] != self._adherence_record_total()

    # --------------------------------------------------------- recommendations

    def get_recommendations(self, patient_id: str) -> dict:
        with self._lock:
            patient = self.store.get("patients", patient_id)
            if patient is None:
                raise NotFoundError(f"unknown patient: {patient_id}")
            missing = [f for f in PROFILE_FIELDS if f not in patient["profile"]]
            if missing:
                raise ValidationError(
                    f"intake incomplete, missing fields: {', '.join(missing)}"
                )
            for _, doc in self.store.all("cases"):
                if doc["patient_id"] == patient_id and doc["status"] == "PENDING":
                    return doc

            snapshot = self._latest_snapshot()
            if self._snapshot_stale(snapshot):
                self.refresh_models()
                snapshot = self._latest_snapshot()

            groups = self._groups_from_snapshot(snapshot)
            query = self._query_vector(patient, snapshot)
            case = recommend(
                case_id=self._next_id("case", "cases"),
                patient_id=patient_id,
                query=query,
                vectors=np.asarray(snapshot["vectors"], dtype=np.float64),
                patient_ids=snapshot["patient_ids"],
                bands=[BandLevel(b) for b in snapshot["bands"]],
                completed=snapshot["completed"],
                ontology=self.ontology,
                config=self.config.recommender_config(),
                now=self.clock(),
                groups=groups,
            )
            doc = case.to_dict()
            self.store.put("cases", case.id, doc)
            return doc

    def _groups_from_snapshot(self, snapshot: dict) -> AdherenceGroupModel:
        from collections import Counter

        return AdherenceGroupModel(
            high_rows=np.asarray(snapshot["high_rows"], dtype=int),
            high_model=(
                ClusterModel.from_dict(snapshot["high_model"])
                if snapshot["high_model"]
                else None
            ),
            high_activities=[Counter(c) for c in snapshot["high_activities"]],
            band_model=ClusterModel.from_dict(snapshot["band_model"]),
            band_activities=[Counter(c) for c in snapshot["band_activities"]],
        )

    def _query_vector(self, patient: dict, snapshot: dict) -> np.ndarray:
        if patient["id"] in snapshot["patient_ids"]:
            row = snapshot["patient_ids"].index(patient["id"])
            return np.asarray(snapshot["vectors"][row], dtype=np.float64)
        from .patients import Normalization, PatientProfile

        profile = patient["profile"]
        prof = PatientProfile(
            id=patient["id"],
            age=profile["age"],
            profession_label=profile["profession_label"],
            bmi=profile["bmi"],
            diet_score=profile["diet_score"],
            sleep_hours=profile["sleep_hours"],
            activity_level=profile["activity_level"],
        )
        raw = vectorize(prof, self.profession_map).values
        return Normalization.from_dict(snapshot["normalization"]).apply(raw)

    # ---------------------------------------------------------------- decisions

    def decide(
        self,
        case_id: str,
        decision: str,
        activity_id: Optional[str] = None,
        note: Optional[str] = None,
    ) -> dict:
        with self._lock:
            doc = self.store.get("cases", case_id)
            if doc is None:
                raise NotFoundError(f"unknown case: {case_id}")
            case = RecommendationCase.from_dict(doc)
            if case.status != CaseStatus.PENDING:
                raise ConflictError(f"case {case_id} already decided")
            decision = decision.upper()
            now = self.clock()
            if decision == "ACCEPT":
                if activity_id is None:
                    raise ValidationError("accept requires an activity_id")
                if activity_id not in {c.activity_id for c in case.candidates}:
                    raise ValidationError(
                        f"activity {activity_id} is not a candidate of case {case_id}"
                    )
                case.status = CaseStatus.ACCEPTED
                case.accepted_activity = activity_id
                self._open_assignment(case.patient_id, activity_id, now)
            elif decision == "REJECT":
                case.status = CaseStatus.REJECTED
            else:
                raise ValidationError(f"unknown decision: {decision}")
            case.coach_note = note
            updated = case.to_dict()
            self.store.put("cases", case_id, updated)
            self.store.append_decision(
                {
                    "case_id": case_id,
                    "patient_id": case.patient_id,
                    "decision": decision,
                    "activity_id": activity_id,
                    "note": note,
                    "at": now,
                }
            )
            return updated

    def _open_assignment(self, patient_id: str, activity_id: str, now: float) -> None:
        patient = self.store.get("patients", patient_id)
        activity = self.ontology.get(activity_id)
        patient["adherence_history"].append(
            AdherenceRecord(activity_id=activity_id, assigned_at=now, completed=False).to_dict()
        )
        self.store.put("patients", patient_id, patient)

        session_key = f"chat-{patient_id}"
        session = self._load_session(session_key)
        if session.phase == Phase.IDLE:
            session.set_phase(Phase.FEEDBACK)
        session.reset_topic(FEEDBACK_TOPIC)
        message = (
            f"Your coach assigned you a new activity: {activity.name} "
            f"({int(activity.typical_duration_min)} minutes)."
        )
        first = volunteer_gambit(session, self.script, now)
        if first:
            message = f"{message} {first}"
        self._save_session(session_key, session)
        out_id = self._next_id("out", "outbound")
        self.store.put(
            "outbound",
            out_id,
            {"id": out_id, "session_key": session_key, "text": message, "created_at": now},
        )

    # ------------------------------------------------------------------ reads

    def list_patients(self) -> List[dict]:
        rows = []
        for _, doc in self.store.all("patients"):
            band = self._patient_band(doc)
            history = doc["adherence_history"]
            rows.append(
                {
                    "id": doc["id"],
                    "name": doc["name"],
                    "band": band.level.value,
                    "adherence_score": band.score,
                    "last_activity": history[-1]["activity_id"] if history else None,
                    "intake_complete": all(f in doc["profile"] for f in PROFILE_FIELDS),
                }
            )
        return rows

    def get_patient(self, patient_id: str) -> dict:
        doc = self.store.get("patients", patient_id)
        if doc is None:
            raise NotFoundError(f"unknown patient: {patient_id}")
        return doc

    def transcript(self, patient_id: str) -> List[list]:
        self.get_patient(patient_id)
        session = self._load_session(f"chat-{patient_id}")
        return [list(t) for t in session.transcript]

    def latest_clusters(self) -> dict:
        snapshot = self._latest_snapshot()
        if snapshot is None:
            raise NotFoundError("no cluster snapshot yet")
        model = snapshot["band_model"]
        labels = model["labels"]
        sizes: Dict[int, int] = {}
        for lab in labels:
            sizes[lab] = sizes.get(lab, 0) + 1
        return {
            "snapshot_id": snapshot["id"],
            "created_at": snapshot["created_at"],
            "patient_ids": snapshot["patient_ids"],
            "vectors": snapshot["vectors"],
            "labels": labels,
            "centroids": model["centroids"],
            "bands": snapshot["bands"],
            "cluster_sizes": [sizes.get(i, 0) for i in range(len(model["centroids"]))],
            "feature_names": list(FEATURE_FIELDS),
        }

    def pending_cases(self) -> List[dict]:
        return [
            doc
            for _, doc in self.store.all("cases")
            if doc["status"] == "PENDING"
        ]

    # ------------------------------------------------------------- integrity

    def check_integrity(self) -> List[str]:
        problems = []
        patient_ids = set(self.store.ids("patients"))
        for case_id, doc in self.store.all("cases"):
            if doc["patient_id"] not in patient_ids:
                problems.append(f"case {case_id} references missing patient")
        for pid, doc in self.store.all("patients"):
            for rec in doc["adherence_history"]:
                if rec["activity_id"] not in self.ontology.activities:
                    problems.append(
                        f"patient {pid} history references unknown activity "
                        f"{rec['activity_id']}"
                    )
        seqs = [doc["seq"] for _, doc in self.store.all("decisions")]
        if seqs != list(range(len(seqs))):
            problems.append("decision log sequence numbers are not monotone")
        return problems
