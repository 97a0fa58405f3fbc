/** Wire types mirroring the gateway's JSON responses. */

export type Role = "doctor" | "emergency_responder";

export interface CatalogAttribute {
  id: string;
  heading: string;
  display_name: string;
  tags: string[];
  value_kind: string;
  enum_values?: string[];
}

export interface CatalogDocument {
  version: string;
  attributes: CatalogAttribute[];
}

export interface FilteredRecord {
  patient_ref: string;
  view: string;
  values: Record<string, unknown>;
  generated_at: string;
}

export interface BiometricAuthResponse {
  token: string;
  patient_ref: string;
  expires_at: string;
}

export interface DoctorAuthResponse {
  token: string;
  expires_at: string;
}

export interface RegisterResponse {
  patient_ref: string;
  private_key: string;
}

export interface PatientSummary {
  patient_ref: string;
  display_name: string;
}

export interface AuditEntry {
  timestamp: string;
  actor: string;
  role: string;
  patient_ref: string;
  view: string;
  outcome: string;
  attribute_count: number;
}

export interface ShareResponse {
  patient_ref: string;
  recipient_type: string;
  issued_at: string;
  payload: FilteredRecord;
}

export interface IrisWire {
  kind: "iris";
  code: string;
  mask: string;
}

export interface MinutiaWire {
  x: number;
  y: number;
  angle: number;
  kind: "ridge_ending" | "bifurcation";
}

export interface FingerprintWire {
  kind: "fingerprint";
  minutiae: MinutiaWire[];
}

export type ProbeWire = IrisWire | FingerprintWire;

export interface RegistrationPayload {
  demographics: Record<string, unknown>;
  record_values: Record<string, unknown>;
  iris_templates?: IrisWire[];
  fingerprint_templates?: FingerprintWire[];
}
