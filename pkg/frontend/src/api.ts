import type {
  AuditEntry,
  BiometricAuthResponse,
  CatalogDocument,
  DoctorAuthResponse,
  FilteredRecord,
  PatientSummary,
  ProbeWire,
  RegisterResponse,
  RegistrationPayload,
  ShareResponse,
} from "./types.js";

/** The gateway rejected the request; `code` is its machine-readable reason. */
export class ApiError extends Error {
  constructor(
    public readonly code: string,
    message: string,
    public readonly status: number,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

/** The gateway could not be reached at all — distinct from authorization failure. */
export class NetworkError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "NetworkError";
  }
}

export interface ApiClientOptions {
  baseUrl: string;
  /** Called when the gateway reports an expired or missing session. */
  onSessionExpired?: () => void;
}

/**
 * One function per gateway endpoint. Attaches the bearer token when present;
 * never logs or persists the patient private key or probe payloads.
 */
export class ApiClient {
  private token: string | null = null;

  constructor(private readonly options: ApiClientOptions) {}

  setToken(token: string | null): void {
    this.token = token;
  }

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
    extraHeaders?: Record<string, string>,
  ): Promise<T> {
    const headers: Record<string, string> = { ...extraHeaders };
    if (body !== undefined) headers["Content-Type"] = "application/json";
    if (this.token) headers["Authorization"] = `Bearer ${this.token}`;

    let response: Response;
    try {
      response = await fetch(`${this.options.baseUrl}${path}`, {
        method,
        headers,
        body: body === undefined ? undefined : JSON.stringify(body),
      });
    } catch (err) {
      throw new NetworkError(`gateway unreachable: ${String(err)}`);
    }

    if (!response.ok) {
      let code = "unknown";
      let message = response.statusText;
      try {
        const payload = (await response.json()) as { code?: string; message?: string };
        if (payload.code) code = payload.code;
        if (payload.message) message = payload.message;
      } catch {
        // non-JSON error body; keep status text
      }
      const error = new ApiError(code, message, response.status);
      if (code === "session_expired") {
        this.token = null;
        this.options.onSessionExpired?.();
      }
      throw error;
    }
    return (await response.json()) as T;
  }

  authenticateBiometric(probes: {
    iris?: ProbeWire;
    fingerprint?: ProbeWire;
    fusion_mode?: string;
  }): Promise<BiometricAuthResponse> {
    return this.request("POST", "/auth/biometric", probes);
  }

  doctorLogin(username: string, password: string): Promise<DoctorAuthResponse> {
    return this.request("POST", "/auth/doctor", { username, password });
  }

  registerPatient(payload: RegistrationPayload): Promise<RegisterResponse> {
    return this.request("POST", "/patients", payload);
  }

  listPatients(): Promise<{ patients: PatientSummary[] }> {
    return this.request("GET", "/patients");
  }

  getView(
    patientRef: string,
    kind: "basic" | "emergency" | "full",
    patientKey?: string,
  ): Promise<FilteredRecord> {
    const headers = patientKey ? { "X-Patient-Key": patientKey } : undefined;
    return this.request(
      "GET",
      `/patients/${encodeURIComponent(patientRef)}/view?kind=${kind}`,
      undefined,
      headers,
    );
  }

  updateRecord(
    patientRef: string,
    updates: Record<string, unknown>,
    patientKey?: string,
  ): Promise<{ patient_ref: string; version: number }> {
    const headers = patientKey ? { "X-Patient-Key": patientKey } : undefined;
    return this.request(
      "PUT",
      `/patients/${encodeURIComponent(patientRef)}/record`,
      { updates },
      headers,
    );
  }

  share(patientRef: string, recipientType: string): Promise<ShareResponse> {
    return this.request("POST", `/patients/${encodeURIComponent(patientRef)}/share`, {
      recipient_type: recipientType,
    });
  }

  queryAudit(filters?: {
    patient_ref?: string;
    role?: string;
    start?: string;
    end?: string;
  }): Promise<{ entries: AuditEntry[] }> {
    const params = new URLSearchParams();
    for (const [k, v] of Object.entries(filters ?? {})) {
      if (v !== undefined) params.set(k, v);
    }
    const query = params.size > 0 ? `?${params.toString()}` : "";
    return this.request("GET", `/audit${query}`);
  }

  getCatalog(): Promise<CatalogDocument> {
    return this.request("GET", "/catalog");
  }
}
