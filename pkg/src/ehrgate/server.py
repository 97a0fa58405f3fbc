"""HTTP+JSON API over the gateway service."""

from __future__ import annotations

from typing import Optional

from fastapi import Depends, FastAPI, Header, Query, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .catalog import ViewKind
from .errors import (
    AmbiguousMatch,
    AuthorizationFailed,
    EhrGateError,
    Forbidden,
    InvalidCredentials,
    MissingProbe,
    NoBiometricTemplate,
    NoMatch,
    ParseError,
    SessionExpired,
    UnknownAttribute,
    UnknownPatient,
    ValidationError,
    ValueTypeMismatch,
)
from .gateway import GatewayService
from .templates import FingerprintTemplate, IrisTemplate

_STATUS = {
    NoMatch: 401,
    InvalidCredentials: 401,
    SessionExpired: 401,
    AuthorizationFailed: 401,
    Forbidden: 403,
    UnknownPatient: 404,
    AmbiguousMatch: 409,
    UnknownAttribute: 422,
    ValueTypeMismatch: 422,
    NoBiometricTemplate: 422,
    MissingProbe: 422,
    ValidationError: 422,
    ParseError: 422,
}

_VIEW_KINDS = {
    "basic": ViewKind.BASIC_SHARE,
    "emergency": ViewKind.EMERGENCY,
    "full": ViewKind.FULL,
}


def _filtered_record_json(fr) -> dict:
    return {
        "patient_ref": fr.patient_ref,
        "view": fr.view.value,
        "values": dict(fr.values),
        "generated_at": fr.generated_at.isoformat(),
    }


def create_app(service: GatewayService) -> FastAPI:
    app = FastAPI(title="ehrgate")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    @app.exception_handler(EhrGateError)
    async def _gate_error(request: Request, exc: EhrGateError):
        status = 422
        for cls, code in _STATUS.items():
            if isinstance(exc, cls):
                status = code
                break
        return JSONResponse(status_code=status, content={"code": exc.code, "message": str(exc)})

    def session(authorization: Optional[str] = Header(default=None)):
        if not authorization or not authorization.startswith("Bearer "):
            raise SessionExpired("missing bearer token")
        return service.resolve_session(authorization.removeprefix("Bearer "))

    @app.post("/auth/biometric")
    def auth_biometric(body: dict):
        iris = body.get("iris")
        fp = body.get("fingerprint")
        ctx, ref = service.authenticate_biometric(
            iris_probe=IrisTemplate.from_wire(iris) if iris else None,
            fingerprint_probe=FingerprintTemplate.from_wire(fp) if fp else None,
            fusion_mode=body.get("fusion_mode", "OR"),
        )
        return {
            "token": ctx.session_token,
            "patient_ref": ref,
            "expires_at": ctx.expires_at.isoformat(),
        }

    @app.post("/auth/doctor")
    def auth_doctor(body: dict):
        ctx = service.doctor_login(body.get("username", ""), body.get("password", ""))
        return {"token": ctx.session_token, "expires_at": ctx.expires_at.isoformat()}

    @app.post("/patients", status_code=201)
    def register(body: dict, ctx=Depends(session)):
        iris_templates = [IrisTemplate.from_wire(t) for t in body.get("iris_templates", [])]
        fp_templates = [
            FingerprintTemplate.from_wire(t) for t in body.get("fingerprint_templates", [])
        ]
        ref, key = service.api_register(
            ctx,
            body.get("demographics", {}),
            body.get("record_values", {}),
            iris_templates,
            fp_templates,
        )
        return {"patient_ref": ref, "private_key": key}

    @app.get("/patients")
    def list_patients(ctx=Depends(session)):
        return {
            "patients": [
                {"patient_ref": r, "display_name": n}
                for r, n in service.api_list_patients(ctx)
            ]
        }

    @app.get("/patients/{ref}/view")
    def get_view(
        ref: str,
        kind: str = Query(...),
        ctx=Depends(session),
        x_patient_key: Optional[str] = Header(default=None),
    ):
        view = _VIEW_KINDS.get(kind)
        if view is None:
            raise ValidationError(f"unknown view kind {kind!r}")
        fr = service.api_get_view(ctx, ref, view, presented_key=x_patient_key)
        return _filtered_record_json(fr)

    @app.put("/patients/{ref}/record")
    def update_record(
        ref: str,
        body: dict,
        ctx=Depends(session),
        x_patient_key: Optional[str] = Header(default=None),
    ):
        version = service.api_update_record(
            ctx, ref, body.get("updates", {}), presented_key=x_patient_key
        )
        return {"patient_ref": ref, "version": version}

    @app.post("/patients/{ref}/share")
    def share(ref: str, body: dict, ctx=Depends(session)):
        export = service.api_share_export(ctx, ref, body.get("recipient_type", ""))
        return {
            "patient_ref": export.patient_ref,
            "recipient_type": export.recipient_type,
            "issued_at": export.issued_at,
            "payload": _filtered_record_json(export.payload),
        }

    @app.get("/audit")
    def audit(
        ctx=Depends(session),
        patient_ref: Optional[str] = Query(default=None),
        role: Optional[str] = Query(default=None),
        start: Optional[str] = Query(default=None),
        end: Optional[str] = Query(default=None),
    ):
        entries = service.api_query_audit(
            ctx, patient_ref=patient_ref, role=role, start=start, end=end
        )
        return {
            "entries": [
                {
                    "timestamp": e.timestamp,
                    "actor": e.actor,
                    "role": e.role,
                    "patient_ref": e.patient_ref,
                    "view": e.view,
                    "outcome": e.outcome,
                    "attribute_count": e.attribute_count,
                }
                for e in entries
            ]
        }

    @app.get("/catalog")
    def catalog():
        return service.store.catalog.to_document()

    return app
