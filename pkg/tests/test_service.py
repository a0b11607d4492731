import numpy as np
import pytest
from fastapi.testclient import TestClient

from coachloop.api import create_app
from coachloop.config import AppConfig, load_config
from coachloop.patients import AdherenceRecord
from coachloop.service import (
    CoachService,
    ConflictError,
    NotFoundError,
    ValidationError,
)
from coachloop.sim.oracles import oracle_nearest

INTAKE_ANSWERS = ["yes", "42", "26.5", "mixed", "7.5", "6", "nurse"]


class TickClock:
    def __init__(self, start=1_000.0):
        self.now = start

    def __call__(self):
        self.now += 1.0
        return self.now


@pytest.fixture
def service(tmp_path):
    config = AppConfig(data_dir=str(tmp_path / "data"))
    svc = CoachService(config, clock=TickClock())
    yield svc
    svc.store.close()


def complete_intake(service, external_ref, answers=None, age=None):
    reg = service.register_patient({"external_ref": external_ref, "name": external_ref})
    answers = list(answers or INTAKE_ANSWERS)
    if age is not None:
        answers[1] = str(age)
    for text in answers:
        out = service.chat_webhook(reg["session_key"], text)
        if "profile is complete" in out["text"]:
            break
    return reg


def seed_history(service, patient_id, completed_flags, activity="jog"):
    patient = service.store.get("patients", patient_id)
    for i, flag in enumerate(completed_flags):
        patient["adherence_history"].append(
            AdherenceRecord(
                activity_id=activity,
                assigned_at=float(i),
                completed=flag,
                feedback_text="seeded",
            ).to_dict()
        )
    service.store.put("patients", patient_id, patient)


def build_population(service, n=8):
    regs = []
    for i in range(n):
        reg = complete_intake(service, f"ext-{i:03d}", age=30 + 3 * i)
        flags = [True] * 6 if i % 2 == 0 else [True, False, False, False]
        activity = ["jog", "swim_laps", "walk_brisk", "yoga_gentle"][i % 4]
        seed_history(service, reg["patient_id"], flags, activity)
        regs.append(reg)
    return regs


class TestRegistration:
    def test_register_opens_intake(self, service):
        reg = service.register_patient({"external_ref": "x1", "name": "Pat"})
        assert reg["patient_id"] == "p0001"
        assert reg["session_key"] == "chat-p0001"
        assert reg["first_message"]
        patient = service.get_patient("p0001")
        assert patient["profile"] == {}

    def test_duplicate_external_ref_conflict(self, service):
        service.register_patient({"external_ref": "x1", "name": "Pat"})
        with pytest.raises(ConflictError, match="x1"):
            service.register_patient({"external_ref": "x1", "name": "Other"})

    def test_missing_fields_rejected(self, service):
        with pytest.raises(ValidationError, match="name"):
            service.register_patient({"external_ref": "x1"})


class TestIntakeFlow:
    def test_full_intake_completes_profile(self, service):
        reg = complete_intake(service, "x1")
        patient = service.get_patient(reg["patient_id"])
        assert patient["profile"] == {
            "age": 42.0,
            "bmi": 26.5,
            "diet_score": 0.5,
            "sleep_hours": 7.5,
            "activity_level": pytest.approx(0.6),
            "profession_label": "nurse",
        }
        session = service.store.get("sessions", reg["session_key"])
        assert session["phase"] == "IDLE"

    def test_out_of_range_answer_reasked(self, service):
        reg = service.register_patient({"external_ref": "x1", "name": "Pat"})
        service.chat_webhook(reg["session_key"], "yes")  # greeting -> age gambit
        out = service.chat_webhook(reg["session_key"], "-5")
        # the age question comes back and no age lands in the profile
        assert "age" in out["text"].lower() or "old" in out["text"].lower()
        assert "age" not in service.get_patient(reg["patient_id"])["profile"]
        out = service.chat_webhook(reg["session_key"], "42")
        assert service.get_patient(reg["patient_id"])["profile"]["age"] == 42.0

    def test_transcript_records_both_sides(self, service):
        reg = complete_intake(service, "x1")
        transcript = service.transcript(reg["patient_id"])
        speakers = {line[0] for line in transcript}
        assert speakers == {"bot", "user"}
        texts = [line[1] for line in transcript]
        assert any("profile is complete" in t for t in texts)

    def test_unknown_session_404(self, service):
        with pytest.raises(NotFoundError, match="unknown session"):
            service.chat_webhook("chat-nope", "hello")


class TestRefresh:
    def test_refresh_requires_complete_patient(self, service):
        with pytest.raises(Exception, match="no patients"):
            service.refresh_models()

    def test_snapshot_labels_match_nearest_oracle(self, service):
        build_population(service)
        snap_id = service.refresh_models()
        snap = service.store.get("snapshots", snap_id)
        assert len(snap["patient_ids"]) == 8
        model = snap["band_model"]
        assert oracle_nearest(snap["vectors"], model["centroids"]) == model["labels"]
        # centroid = member mean, recomputed by hand
        vectors = np.asarray(snap["vectors"])
        labels = np.asarray(model["labels"])
        for j, centroid in enumerate(model["centroids"]):
            members = vectors[labels == j]
            if len(members):
                assert np.allclose(centroid, members.mean(axis=0), atol=1e-9)

    def test_incomplete_patients_excluded(self, service):
        build_population(service, n=4)
        service.register_patient({"external_ref": "partial", "name": "P"})
        snap = service.store.get("snapshots", service.refresh_models())
        assert len(snap["patient_ids"]) == 4


class TestRecommendations:
    def test_intake_incomplete_rejected(self, service):
        reg = service.register_patient({"external_ref": "x1", "name": "Pat"})
        with pytest.raises(ValidationError, match="intake incomplete"):
            service.get_recommendations(reg["patient_id"])

    def test_case_created_and_reused_while_pending(self, service):
        regs = build_population(service)
        case = service.get_recommendations(regs[0]["patient_id"])
        assert case["status"] == "PENDING"
        assert 1 <= len(case["candidates"]) <= 5
        again = service.get_recommendations(regs[0]["patient_id"])
        assert again["id"] == case["id"]
        assert service.store.count("cases") == 1

    def test_auto_refresh_when_no_snapshot(self, service):
        regs = build_population(service)
        assert service.store.count("snapshots") == 0
        service.get_recommendations(regs[0]["patient_id"])
        assert service.store.count("snapshots") == 1

    def test_stale_snapshot_refreshed_on_new_patient(self, service):
        regs = build_population(service)
        service.get_recommendations(regs[0]["patient_id"])
        complete_intake(service, "late-arrival")
        service.get_recommendations(regs[1]["patient_id"])
        assert service.store.count("snapshots") == 2

    def test_unknown_patient_404(self, service):
        with pytest.raises(NotFoundError):
            service.get_recommendations("p9999")


class TestDecisions:
    def pending_case(self, service):
        regs = build_population(service)
        return service.get_recommendations(regs[0]["patient_id"])

    def test_accept_opens_assignment_and_notifies(self, service):
        case = self.pending_case(service)
        activity = case["candidates"][0]["activity_id"]
        decided = service.decide(case["id"], "ACCEPT", activity, note="go")
        assert decided["status"] == "ACCEPTED"
        assert decided["accepted_activity"] == activity

        patient = service.get_patient(case["patient_id"])
        last = patient["adherence_history"][-1]
        assert last["activity_id"] == activity
        assert last["completed"] is False

        session = service.store.get("sessions", f"chat-{case['patient_id']}")
        assert session["phase"] == "FEEDBACK"
        outbound = list(service.store.all("outbound"))
        assert len(outbound) == 1
        assert activity.split("_")[0] in outbound[0][1]["text"].lower()

    def test_feedback_closes_assignment(self, service):
        case = self.pending_case(service)
        activity = case["candidates"][0]["activity_id"]
        service.decide(case["id"], "ACCEPT", activity)
        key = f"chat-{case['patient_id']}"
        for text in ["yes", "4", "felt great"]:
            out = service.chat_webhook(key, text)
            if "coach has been notified" in out["text"]:
                break
        else:
            pytest.fail("feedback conversation did not conclude")
        last = service.get_patient(case["patient_id"])["adherence_history"][-1]
        assert last["completed"] is True
        assert last["motivation_rating"] == 4
        assert last["feedback_text"] == "felt great"
        assert service.store.count("notifications") == 1
        session = service.store.get("sessions", key)
        assert session["phase"] == "IDLE"

    def test_reject(self, service):
        case = self.pending_case(service)
        decided = service.decide(case["id"], "REJECT", note="not yet")
        assert decided["status"] == "REJECTED"
        assert service.pending_cases() == []
        patient = service.get_patient(case["patient_id"])
        assert all(r["feedback_text"] == "seeded" for r in patient["adherence_history"])

    def test_accept_requires_listed_candidate(self, service):
        case = self.pending_case(service)
        with pytest.raises(ValidationError, match="requires an activity_id"):
            service.decide(case["id"], "ACCEPT")
        with pytest.raises(ValidationError, match="not a candidate"):
            service.decide(case["id"], "ACCEPT", "definitely_not_listed")

    def test_double_decide_conflict(self, service):
        case = self.pending_case(service)
        service.decide(case["id"], "REJECT")
        with pytest.raises(ConflictError, match="already decided"):
            service.decide(case["id"], "REJECT")

    def test_decision_log_total_order(self, service):
        regs = build_population(service)
        for reg in regs[:3]:
            case = service.get_recommendations(reg["patient_id"])
            service.decide(case["id"], "REJECT")
        seqs = [doc["seq"] for _, doc in service.store.all("decisions")]
        assert seqs == [0, 1, 2]
        assert service.check_integrity() == []


class TestReads:
    def test_list_patients_bands(self, service):
        build_population(service, n=4)
        rows = service.list_patients()
        assert [r["band"] for r in rows] == ["HIGH", "LOW", "HIGH", "LOW"]
        assert all(r["intake_complete"] for r in rows)

    def test_latest_clusters_consistent(self, service):
        build_population(service)
        service.refresh_models()
        clusters = service.latest_clusters()
        assert len(clusters["labels"]) == len(clusters["patient_ids"])
        assert sum(clusters["cluster_sizes"]) == len(clusters["labels"])
        assert len(clusters["feature_names"]) == len(clusters["vectors"][0])

    def test_no_snapshot_404(self, service):
        with pytest.raises(NotFoundError, match="no cluster snapshot"):
            service.latest_clusters()


class TestPersistenceAcrossRestart:
    def test_service_state_survives_reopen(self, tmp_path):
        config = AppConfig(data_dir=str(tmp_path / "data"))
        svc = CoachService(config, clock=TickClock())
        regs = build_population(svc, n=6)
        case = svc.get_recommendations(regs[0]["patient_id"])
        svc.decide(case["id"], "ACCEPT", case["candidates"][0]["activity_id"])
        state = svc.store.state()
        svc.store.close()

        svc2 = CoachService(config, clock=TickClock())
        assert svc2.store.state() == state
        assert svc2.check_integrity() == []
        svc2.store.close()


class TestHttpApi:
    @pytest.fixture
    def client(self, service):
        return TestClient(create_app(service))

    def test_register_chat_and_queue_roundtrip(self, client, service):
        resp = client.post(
            "/v1/patients", json={"external_ref": "x1", "name": "Pat"}
        )
        assert resp.status_code == 200
        key = resp.json()["session_key"]
        for text in INTAKE_ANSWERS:
            out = client.post(
                "/v1/chat/webhook", json={"session_key": key, "text": text}
            )
            assert out.status_code == 200
            if "profile is complete" in out.json()["text"]:
                break
        else:
            pytest.fail("intake did not complete over HTTP")

        build_population(service, n=5)
        pid = resp.json()["patient_id"]
        case = client.get(f"/v1/patients/{pid}/recommendations").json()
        queue = client.get("/v1/cases", params={"status": "PENDING"}).json()
        assert [c["id"] for c in queue] == [case["id"]]
        decided = client.post(
            f"/v1/cases/{case['id']}/decision",
            json={"decision": "ACCEPT", "activity_id": case["candidates"][0]["activity_id"]},
        )
        assert decided.status_code == 200
        assert client.get("/v1/cases", params={"status": "PENDING"}).json() == []

    def test_error_mapping(self, client):
        assert client.get("/v1/patients/p9999").status_code == 404
        resp = client.post(
            "/v1/patients", json={"external_ref": "a", "name": "A"}
        )
        dup = client.post("/v1/patients", json={"external_ref": "a", "name": "B"})
        assert dup.status_code == 409
        assert "error" in dup.json()
        pid = resp.json()["patient_id"]
        assert client.get(f"/v1/patients/{pid}/recommendations").status_code == 422

    def test_bearer_token_enforced(self, tmp_path):
        config = AppConfig(data_dir=str(tmp_path / "auth-data"), auth_token="s3cret")
        svc = CoachService(config, clock=TickClock())
        client = TestClient(create_app(svc))
        assert client.get("/v1/patients").status_code == 401
        ok = client.get(
            "/v1/patients", headers={"Authorization": "Bearer s3cret"}
        )
        assert ok.status_code == 200
        svc.store.close()

    def test_clusters_endpoint_counts_agree(self, client, service):
        build_population(service, n=6)
        service.refresh_models()
        body = client.get("/v1/clusters/latest").json()
        assert len(body["vectors"]) == len(body["labels"])
        assert sum(body["cluster_sizes"]) == len(body["labels"])


class TestConfig:
    def test_env_overrides_and_unknown_keys(self, tmp_path):
        path = tmp_path / "config.json"
        path.write_text('{"port": 9000, "knn_k": 7}')
        cfg = load_config(str(path), env={"COACHLOOP_K": "4"})
        assert (cfg.port, cfg.knn_k, cfg.k) == (9000, 7, 4)
        path.write_text('{"nope": 1}')
        with pytest.raises(ValueError, match="unknown config keys"):
            load_config(str(path), env={})

    def test_defaults_point_at_bundled_data(self):
        cfg = AppConfig()
        assert cfg.script_path.endswith("coaching.top")
        assert cfg.recommender_config().clustering.k == 3
