import type { Role } from "./types.js";

/** In-memory session mirroring the gateway's access context. Never persisted. */
export interface UiSession {
  token: string;
  role: Role;
  /** Responders are bound to the patient the biometric probe matched. */
  boundPatientRef?: string;
  expiresAt: Date;
}

export function remainingSeconds(session: UiSession, now: Date = new Date()): number {
  return Math.max(0, Math.floor((session.expiresAt.getTime() - now.getTime()) / 1000));
}

export function isExpired(session: UiSession, now: Date = new Date()): boolean {
  return remainingSeconds(session, now) <= 0;
}
