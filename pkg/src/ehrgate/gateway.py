"""Gateway service: sessions, biometric emergency login, doctor flows.

Policy lives here and in the record store; callers (HTTP server, console)
are thin.  Emergency sessions are bound to the biometrically matched
patient and expire after a short TTL; cross-modality identification
conflicts are refused, never resolved by guessing.
"""

from __future__ import annotations

import secrets
import threading
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from typing import Dict, List, Optional, Sequence, Tuple

from .catalog import FilteredRecord, Tag, ViewKind
from .context import AccessContext
from .errors import (
    AmbiguousMatch,
    Forbidden,
    MissingProbe,
    NoMatch,
    InvalidCredentials,
    SessionExpired,
)
from .matching import ThresholdConfig, identify
from .store import AuditEntry, RecordStore, _now
from .templates import FingerprintTemplate, IrisTemplate

DEFAULT_EMERGENCY_TTL = timedelta(minutes=15)
DEFAULT_DOCTOR_TTL = timedelta(hours=8)

RECIPIENT_TYPES = ("practitioner", "employer", "organization", "research_institute")


@dataclass(frozen=True)
class ShareExport:
    patient_ref: str
    recipient_type: str
    payload: FilteredRecord
    issued_at: str


class GatewayService:
    def __init__(
        self,
        store: RecordStore,
        thresholds: ThresholdConfig = ThresholdConfig(),
        emergency_ttl: timedelta = DEFAULT_EMERGENCY_TTL,
        doctor_ttl: timedelta = DEFAULT_DOCTOR_TTL,
    ):
        self.store = store
        self.thresholds = thresholds
        self.emergency_ttl = emergency_ttl
        self.doctor_ttl = doctor_ttl
        self._sessions: Dict[str, AccessContext] = {}
        self._lock = threading.Lock()

    # -- sessions ----------------------------------------------------------

    def _issue(self, role: str, actor: str, ttl: timedelta, bound_ref: Optional[str] = None) -> AccessContext:
        token = secrets.token_urlsafe(24)
        ctx = AccessContext(
            role=role,
            actor=actor,
            session_token=token,
            expires_at=datetime.now(timezone.utc) + ttl,
            bound_patient_ref=bound_ref,
        )
        with self._lock:
            self._sessions[token] = ctx
        return ctx

    def resolve_session(self, token: str) -> AccessContext:
        with self._lock:
            ctx = self._sessions.get(token)
        if ctx is None or ctx.expired():
            if ctx is not None:
                with self._lock:
                    self._sessions.pop(token, None)
            raise SessionExpired("session missing or expired")
        return ctx

    # -- authentication ----------------------------------------------------

    def authenticate_biometric(
        self,
        iris_probe: Optional[IrisTemplate] = None,
        fingerprint_probe: Optional[FingerprintTemplate] = None,
        fusion_mode: str = "OR",
    ) -> Tuple[AccessContext, str]:
        if fusion_mode not in ("OR", "AND"):
            raise MissingProbe(f"unknown fusion mode {fusion_mode!r}")
        if iris_probe is None and fingerprint_probe is None:
            raise MissingProbe("at least one biometric probe is required")
        if fusion_mode == "AND" and (iris_probe is None or fingerprint_probe is None):
            raise MissingProbe("AND fusion requires both probes")

        matches: Dict[str, Optional[str]] = {}
        if iris_probe is not None:
            r = identify(iris_probe, self.store.gallery("iris"), "iris", self.thresholds)
            matches["iris"] = r.matched_ref
        if fingerprint_probe is not None:
            r = identify(
                fingerprint_probe, self.store.gallery("fingerprint"), "fingerprint", self.thresholds
            )
            matches["fingerprint"] = r.matched_ref

        refs = {m for m in matches.values() if m is not None}
        try:
            if len(refs) > 1:
                raise AmbiguousMatch(
                    "modalities identified different patients: "
                    + ", ".join(f"{k}={v}" for k, v in matches.items())
                )
            if fusion_mode == "AND" and (len(refs) != 1 or None in matches.values()):
                raise NoMatch("AND fusion requires both modalities to identify the patient")
            if not refs:
                raise NoMatch("no enrolled patient matched the probe(s)")
        except (AmbiguousMatch, NoMatch):
            self.store.append_audit(AuditEntry(
                timestamp=_now(), actor="biometric-auth", role="emergency_responder",
                patient_ref="", view=ViewKind.EMERGENCY.value, outcome="denied",
                attribute_count=0,
            ))
            raise
        ref = refs.pop()
        ctx = self._issue("emergency_responder", f"responder@{ref}", self.emergency_ttl, bound_ref=ref)
        return ctx, ref

    def doctor_login(self, username: str, password: str) -> AccessContext:
        if not self.store.verify_doctor(username, password):
            raise InvalidCredentials("invalid username or password")
        return self._issue("doctor", username, self.doctor_ttl)

    # -- authorized operations --------------------------------------------

    def _require(self, context: AccessContext, *roles: str) -> None:
        if context.expired():
            raise SessionExpired("session expired")
        if context.role not in roles:
            raise Forbidden(f"role {context.role!r} may not perform this operation")

    def api_get_view(
        self,
        context: AccessContext,
        patient_ref: str,
        view: ViewKind,
        presented_key: Optional[str] = None,
    ) -> FilteredRecord:
        self._require(context, "doctor", "emergency_responder")
        try:
            if context.role == "emergency_responder":
                if view is not ViewKind.EMERGENCY:
                    raise Forbidden("emergency responders may request the emergency view only")
                if patient_ref != context.bound_patient_ref:
                    raise Forbidden("session is bound to a different patient")
            else:  # doctor
                if view is ViewKind.EMERGENCY:
                    raise Forbidden("doctors use BasicShare or Full views")
        except Forbidden:
            self.store.append_audit(AuditEntry(
                timestamp=_now(), actor=context.actor, role=context.role,
                patient_ref=patient_ref, view=view.value, outcome="denied",
                attribute_count=0,
            ))
            raise
        return self.store.fetch_view(patient_ref, view, presented_key, context)

    def api_register(
        self,
        context: AccessContext,
        demographics: Dict,
        record_values: Dict,
        iris_templates: Sequence[IrisTemplate] = (),
        fingerprint_templates: Sequence[FingerprintTemplate] = (),
    ) -> Tuple[str, str]:
        self._require(context, "doctor")
        return self.store.enroll_patient(
            demographics, record_values, iris_templates, fingerprint_templates
        )

    def api_list_patients(self, context: AccessContext) -> List[Tuple[str, str]]:
        self._require(context, "doctor")
        return self.store.list_patients()

    def api_update_record(
        self,
        context: AccessContext,
        patient_ref: str,
        updates: Dict,
        presented_key: Optional[str] = None,
    ) -> int:
        self._require(context, "doctor")
        return self.store.update_record(patient_ref, updates, presented_key)

    def api_share_export(
        self, context: AccessContext, patient_ref: str, recipient_type: str
    ) -> ShareExport:
        self._require(context, "doctor")
        if recipient_type not in RECIPIENT_TYPES:
            raise Forbidden(f"unknown recipient type {recipient_type!r}")
        external = AccessContext(role="external", actor=f"{recipient_type}:{context.actor}")
        payload = self.store.fetch_view(patient_ref, ViewKind.BASIC_SHARE, None, external)
        return ShareExport(
            patient_ref=patient_ref,
            recipient_type=recipient_type,
            payload=payload,
            issued_at=_now(),
        )

    def api_query_audit(self, context: AccessContext, **filters) -> list:
        self._require(context, "doctor")
        return self.store.query_audit(**filters)
