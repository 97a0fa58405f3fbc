"""Access context shared by the record store and the gateway."""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Optional

ROLES = ("doctor", "emergency_responder", "external", "system")


@dataclass(frozen=True)
class AccessContext:
    role: str
    actor: str
    session_token: str = ""
    expires_at: Optional[datetime] = None
    bound_patient_ref: Optional[str] = None  # emergency responders only

    def expired(self, now: Optional[datetime] = None) -> bool:
        if self.expires_at is None:
            return False
        now = now or datetime.now(timezone.utc)
        return now >= self.expires_at


SYSTEM_CONTEXT = AccessContext(role="system", actor="system")
