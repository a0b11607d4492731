"""HTTP+JSON adapter over CoachService, versioned under /v1."""

from __future__ import annotations

from typing import List, Optional

from fastapi import Depends, FastAPI, Header, HTTPException, Request
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .service import CoachService, ServiceError


class RegisterRequest(BaseModel):
    external_ref: str
    name: str
    health_flags: List[str] = []


class ChatRequest(BaseModel):
    session_key: str
    text: str
    timestamp: Optional[float] = None


class DecisionRequest(BaseModel):
    decision: str
    activity_id: Optional[str] = None
    note: Optional[str] = None


def create_app(service: CoachService, static_dir: Optional[str] = None) -> FastAPI:
    app = FastAPI(title="coachloop", version="1.0")

    def check_auth(authorization: Optional[str] = Header(default=None)):
        token = service.config.auth_token
        if token and authorization != f"Bearer {token}":
            raise HTTPException(status_code=401, detail="invalid bearer token")

    @app.exception_handler(ServiceError)
    async def service_error_handler(request: Request, exc: ServiceError):
        return JSONResponse(
            status_code=exc.status_code, content={"error": exc.message}
        )

    @app.post("/v1/patients", dependencies=[Depends(check_auth)])
    def register(req: RegisterRequest):
        return service.register_patient(req.model_dump())

    @app.get("/v1/patients", dependencies=[Depends(check_auth)])
    def list_patients():
        return service.list_patients()

    @app.get("/v1/patients/{patient_id}", dependencies=[Depends(check_auth)])
    def get_patient(patient_id: str):
        return service.get_patient(patient_id)

    @app.get("/v1/patients/{patient_id}/transcript", dependencies=[Depends(check_auth)])
    def transcript(patient_id: str):
        return service.transcript(patient_id)

    @app.post("/v1/chat/webhook", dependencies=[Depends(check_auth)])
    def chat(req: ChatRequest):
        return service.chat_webhook(req.session_key, req.text, req.timestamp)

    @app.post("/v1/models/refresh", dependencies=[Depends(check_auth)])
    def refresh():
        return {"snapshot_id": service.refresh_models()}

    @app.get(
        "/v1/patients/{patient_id}/recommendations",
        dependencies=[Depends(check_auth)],
    )
    def recommendations(patient_id: str):
        return service.get_recommendations(patient_id)

    @app.get("/v1/cases", dependencies=[Depends(check_auth)])
    def cases(status: Optional[str] = None):
        if status == "PENDING":
            return service.pending_cases()
        return [doc for _, doc in service.store.all("cases")]

    @app.post("/v1/cases/{case_id}/decision", dependencies=[Depends(check_auth)])
    def decide(case_id: str, req: DecisionRequest):
        return service.decide(case_id, req.decision, req.activity_id, req.note)

    @app.get("/v1/clusters/latest", dependencies=[Depends(check_auth)])
    def clusters():
        return service.latest_clusters()

    if static_dir:
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="static")

    return app
