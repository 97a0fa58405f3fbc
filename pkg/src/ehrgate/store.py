"""Persistent patient/record/template store with sealed confidential values.

Confidential-tagged attribute values are encrypted at rest with an
authenticated cipher under a store-managed sealing key.  The patient's
private key is an authorization capability, not the encryption key: it is
checked against a salted one-way verifier before the store is willing to
unseal for a Full view.  Emergency views unseal without the patient key
(the break-glass path) but expose only Emergency-tagged attributes.

Every fetch_view call, granted or denied, appends one audit entry.
"""

from __future__ import annotations

import csv
import hashlib
import hmac
import io
import secrets
import sqlite3
import json
import threading
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Dict, List, Optional, Sequence, Tuple

from cryptography.exceptions import InvalidTag
from cryptography.hazmat.primitives.ciphers.aead import AESGCM

from .catalog import AttributeCatalog, FilteredRecord, Tag, ViewKind, filter_view, load_catalog
from .context import AccessContext
from .errors import (
    AuthorizationFailed,
    NoBiometricTemplate,
    UnknownAttribute,
    UnknownPatient,
    ValidationError,
)
from .templates import FingerprintTemplate, IrisTemplate, template_from_wire

PATIENT_KEY_HEX_LEN = 64
_GCM_TAG_LEN = 16


@dataclass(frozen=True)
class SealedPayload:
    nonce: bytes
    ciphertext: bytes
    integrity_tag: bytes


@dataclass(frozen=True)
class AuditEntry:
    timestamp: str
    actor: str
    role: str
    patient_ref: str
    view: str
    outcome: str  # "granted" | "denied"
    attribute_count: int


def generate_patient_key() -> str:
    return secrets.token_hex(32)


def _key_digest(key: str, salt: bytes) -> bytes:
    return hashlib.sha256(salt + key.encode("ascii")).digest()


def _password_digest(password: str, salt: bytes) -> bytes:
    return hashlib.pbkdf2_hmac("sha256", password.encode("utf-8"), salt, 10_000)


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


_SCHEMA = """
CREATE TABLE IF NOT EXISTS meta (k TEXT PRIMARY KEY, v TEXT);
CREATE TABLE IF NOT EXISTS patients (
    ref TEXT PRIMARY KEY, demographics TEXT, created_at TEXT);
CREATE TABLE IF NOT EXISTS records (
    ref TEXT PRIMARY KEY, open_values TEXT, nonce BLOB, ciphertext BLOB,
    key_salt BLOB, key_verifier BLOB, version INTEGER);
CREATE TABLE IF NOT EXISTS templates (
    ref TEXT, modality TEXT, idx INTEGER, payload TEXT);
CREATE TABLE IF NOT EXISTS audit (
    id INTEGER PRIMARY KEY AUTOINCREMENT, ts TEXT, actor TEXT, role TEXT,
    patient_ref TEXT, view TEXT, outcome TEXT, attribute_count INTEGER);
CREATE TABLE IF NOT EXISTS doctors (
    username TEXT PRIMARY KEY, salt BLOB, digest BLOB, display_name TEXT);
"""


class RecordStore:
    """Single-node embedded store (sqlite), safe for threaded use."""

    def __init__(self, path: str = ":memory:", catalog: Optional[AttributeCatalog] = None):
        self.catalog = catalog or load_catalog()
        self._conn = sqlite3.connect(path, check_same_thread=False)
        self._lock = threading.RLock()
        with self._lock:
            self._conn.executescript(_SCHEMA)
            row = self._conn.execute("SELECT v FROM meta WHERE k='sealing_key'").fetchone()
            if row is None:
                key = secrets.token_bytes(32)
                self._conn.execute(
                    "INSERT INTO meta (k, v) VALUES ('sealing_key', ?)", (key.hex(),)
                )
                self._conn.commit()
            else:
                key = bytes.fromhex(row[0])
            self._aead = AESGCM(key)

    def close(self) -> None:
        self._conn.close()

    # -- sealing -----------------------------------------------------------

    def _seal(self, confidential: Dict) -> SealedPayload:
        nonce = secrets.token_bytes(12)
        blob = json.dumps(confidential, sort_keys=True).encode("utf-8")
        ct = self._aead.encrypt(nonce, blob, None)
        return SealedPayload(nonce=nonce, ciphertext=ct[:-_GCM_TAG_LEN], integrity_tag=ct[-_GCM_TAG_LEN:])

    def _unseal(self, payload: SealedPayload) -> Dict:
        try:
            blob = self._aead.decrypt(
                payload.nonce, payload.ciphertext + payload.integrity_tag, None
            )
        except InvalidTag:
            raise AuthorizationFailed("sealed payload failed integrity check") from None
        return json.loads(blob.decode("utf-8"))

    # -- validation --------------------------------------------------------

    def _check_values(self, values: Dict) -> None:
        for k, v in values.items():
            self.catalog.get(k).check_value(v)

    def _partition(self, values: Dict) -> Tuple[Dict, Dict]:
        open_values, confidential = {}, {}
        for k, v in values.items():
            if Tag.CONFIDENTIAL in self.catalog.get(k).tags:
                confidential[k] = v
            else:
                open_values[k] = v
        return open_values, confidential

    # -- patients ----------------------------------------------------------

    def enroll_patient(
        self,
        demographics: Dict,
        record_values: Dict,
        iris_templates: Sequence[IrisTemplate] = (),
        fingerprint_templates: Sequence[FingerprintTemplate] = (),
    ) -> Tuple[str, str]:
        if not iris_templates and not fingerprint_templates:
            raise NoBiometricTemplate("enrollment requires at least one biometric template")
        self._check_values(demographics)
        self._check_values(record_values)
        open_values, confidential = self._partition(record_values)
        key = generate_patient_key()
        salt = secrets.token_bytes(16)
        verifier = _key_digest(key, salt)
        sealed = self._seal(confidential)
        with self._lock:
            n = self._conn.execute("SELECT COUNT(*) FROM patients").fetchone()[0]
            ref = f"P{n + 1:08d}"
            self._conn.execute(
                "INSERT INTO patients (ref, demographics, created_at) VALUES (?,?,?)",
                (ref, json.dumps(demographics), _now()),
            )
            self._conn.execute(
                "INSERT INTO records (ref, open_values, nonce, ciphertext, key_salt,"
                " key_verifier, version) VALUES (?,?,?,?,?,?,1)",
                (ref, json.dumps(open_values), sealed.nonce,
                 sealed.ciphertext + sealed.integrity_tag, salt, verifier),
            )
            for i, t in enumerate(iris_templates):
                self._conn.execute(
                    "INSERT INTO templates (ref, modality, idx, payload) VALUES (?,?,?,?)",
                    (ref, "iris", i, json.dumps(t.to_wire())),
                )
            for i, t in enumerate(fingerprint_templates):
                self._conn.execute(
                    "INSERT INTO templates (ref, modality, idx, payload) VALUES (?,?,?,?)",
                    (ref, "fingerprint", i, json.dumps(t.to_wire())),
                )
            self._conn.commit()
        return ref, key

    def _record_row(self, patient_ref: str):
        row = self._conn.execute(
            "SELECT open_values, nonce, ciphertext, key_salt, key_verifier, version"
            " FROM records WHERE ref=?",
            (patient_ref,),
        ).fetchone()
        if row is None:
            raise UnknownPatient(patient_ref)
        open_values = json.loads(row[0])
        sealed = SealedPayload(
            nonce=row[1], ciphertext=row[2][:-_GCM_TAG_LEN], integrity_tag=row[2][-_GCM_TAG_LEN:]
        )
        return open_values, sealed, row[3], row[4], row[5]

    def patient_exists(self, patient_ref: str) -> bool:
        with self._lock:
            return (
                self._conn.execute(
                    "SELECT 1 FROM patients WHERE ref=?", (patient_ref,)
                ).fetchone()
                is not None
            )

    def list_patients(self) -> List[Tuple[str, str]]:
        with self._lock:
            rows = self._conn.execute(
                "SELECT ref, demographics FROM patients ORDER BY ref"
            ).fetchall()
        return [(r, json.loads(d).get("bio_data.name", "")) for r, d in rows]

    def verify_patient_key(self, patient_ref: str, presented: str) -> bool:
        with self._lock:
            _, _, salt, verifier, _ = self._record_row(patient_ref)
        if not isinstance(presented, str) or len(presented) != PATIENT_KEY_HEX_LEN:
            # still burn a digest so wrong keys behave uniformly
            _key_digest(str(presented)[:PATIENT_KEY_HEX_LEN], salt)
            return False
        return hmac.compare_digest(_key_digest(presented, salt), verifier)

    # -- views -------------------------------------------------------------

    def fetch_view(
        self,
        patient_ref: str,
        view: ViewKind,
        presented_key: Optional[str],
        context: AccessContext,
    ) -> FilteredRecord:
        actor = context.actor
        role = context.role
        try:
            with self._lock:
                open_values, sealed, salt, verifier, _ = self._record_row(patient_ref)
            if view is ViewKind.FULL:
                authorized = role == "system" or (
                    presented_key is not None
                    and self.verify_patient_key(patient_ref, presented_key)
                )
                if not authorized:
                    raise AuthorizationFailed("full view requires a verifying patient key")
                values = dict(open_values)
                values.update(self._unseal(sealed))
            elif view is ViewKind.EMERGENCY:
                if role != "emergency_responder":
                    raise AuthorizationFailed("emergency view requires an emergency responder")
                values = dict(open_values)
                confidential = self._unseal(sealed)
                for k, v in confidential.items():
                    if Tag.EMERGENCY in self.catalog.get(k).tags:
                        values[k] = v
            else:
                values = dict(open_values)
            result = filter_view(self.catalog, values, patient_ref, view)
        except Exception:
            self._append_audit(actor, role, patient_ref, view.value, "denied", 0)
            raise
        self._append_audit(actor, role, patient_ref, view.value, "granted", len(result.values))
        return result

    def update_record(
        self, patient_ref: str, updates: Dict, presented_key: Optional[str] = None
    ) -> int:
        self._check_values(updates)
        touches_confidential = any(
            Tag.CONFIDENTIAL in self.catalog.get(k).tags for k in updates
        )
        if touches_confidential:
            if presented_key is None or not self.verify_patient_key(patient_ref, presented_key):
                raise AuthorizationFailed(
                    "updating confidential attributes requires a verifying patient key"
                )
        with self._lock:
            open_values, sealed, salt, verifier, version = self._record_row(patient_ref)
            confidential = self._unseal(sealed)
            merged = dict(open_values)
            merged.update(confidential)
            merged.update(updates)
            new_open, new_confidential = self._partition(merged)
            resealed = self._seal(new_confidential)
            new_version = version + 1
            self._conn.execute(
                "UPDATE records SET open_values=?, nonce=?, ciphertext=?, version=?"
                " WHERE ref=?",
                (json.dumps(new_open), resealed.nonce,
                 resealed.ciphertext + resealed.integrity_tag, new_version, patient_ref),
            )
            self._conn.commit()
        return new_version

    def record_version(self, patient_ref: str) -> int:
        with self._lock:
            return self._record_row(patient_ref)[4]

    # -- templates ---------------------------------------------------------

    def gallery(self, modality: str) -> List[Tuple[str, object]]:
        """All enrolled templates of one modality, in (ref, idx) order."""
        with self._lock:
            rows = self._conn.execute(
                "SELECT ref, payload FROM templates WHERE modality=? ORDER BY ref, idx",
                (modality,),
            ).fetchall()
        return [(ref, template_from_wire(json.loads(p))) for ref, p in rows]

    def templates_of(self, patient_ref: str, modality: str) -> List[object]:
        with self._lock:
            rows = self._conn.execute(
                "SELECT payload FROM templates WHERE ref=? AND modality=? ORDER BY idx",
                (patient_ref, modality),
            ).fetchall()
        return [template_from_wire(json.loads(p)) for (p,) in rows]

    # -- audit -------------------------------------------------------------

    def _append_audit(
        self, actor: str, role: str, patient_ref: str, view: str, outcome: str, count: int
    ) -> None:
        with self._lock:
            self._conn.execute(
                "INSERT INTO audit (ts, actor, role, patient_ref, view, outcome,"
                " attribute_count) VALUES (?,?,?,?,?,?,?)",
                (_now(), actor, role, patient_ref, view, outcome, count),
            )
            self._conn.commit()

    def append_audit(self, entry: AuditEntry) -> None:
        with self._lock:
            self._conn.execute(
                "INSERT INTO audit (ts, actor, role, patient_ref, view, outcome,"
                " attribute_count) VALUES (?,?,?,?,?,?,?)",
                (entry.timestamp, entry.actor, entry.role, entry.patient_ref,
                 entry.view, entry.outcome, entry.attribute_count),
            )
            self._conn.commit()

    def query_audit(
        self,
        patient_ref: Optional[str] = None,
        role: Optional[str] = None,
        start: Optional[str] = None,
        end: Optional[str] = None,
    ) -> List[AuditEntry]:
        q = "SELECT ts, actor, role, patient_ref, view, outcome, attribute_count FROM audit"
        clauses, args = [], []
        if patient_ref is not None:
            clauses.append("patient_ref=?")
            args.append(patient_ref)
        if role is not None:
            clauses.append("role=?")
            args.append(role)
        if start is not None:
            clauses.append("ts>=?")
            args.append(start)
        if end is not None:
            clauses.append("ts<=?")
            args.append(end)
        if clauses:
            q += " WHERE " + " AND ".join(clauses)
        q += " ORDER BY id"
        with self._lock:
            rows = self._conn.execute(q, args).fetchall()
        return [AuditEntry(*r) for r in rows]

    def export_audit_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["timestamp", "actor", "role", "patient_ref", "view", "outcome", "attribute_count"])
        for e in self.query_audit():
            w.writerow([e.timestamp, e.actor, e.role, e.patient_ref, e.view, e.outcome, e.attribute_count])
        return buf.getvalue()

    # -- doctor accounts ---------------------------------------------------

    def add_doctor(self, username: str, password: str, display_name: str = "") -> None:
        if not username:
            raise ValidationError("doctor username must be nonempty")
        salt = secrets.token_bytes(16)
        digest = _password_digest(password, salt)
        with self._lock:
            exists = self._conn.execute(
                "SELECT 1 FROM doctors WHERE username=?", (username,)
            ).fetchone()
            if exists:
                raise ValidationError(f"doctor {username!r} already exists")
            self._conn.execute(
                "INSERT INTO doctors (username, salt, digest, display_name) VALUES (?,?,?,?)",
                (username, salt, digest, display_name),
            )
            self._conn.commit()

    def verify_doctor(self, username: str, password: str) -> bool:
        with self._lock:
            row = self._conn.execute(
                "SELECT salt, digest FROM doctors WHERE username=?", (username,)
            ).fetchone()
        if row is None:
            # burn a digest so unknown users are indistinguishable from wrong passwords
            _password_digest(password, b"\x00" * 16)
            return False
        salt, digest = row
        return hmac.compare_digest(_password_digest(password, salt), digest)

    def doctor_display_name(self, username: str) -> str:
        with self._lock:
            row = self._conn.execute(
                "SELECT display_name FROM doctors WHERE username=?", (username,)
            ).fetchone()
        return row[0] if row else ""
