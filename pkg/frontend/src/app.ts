import { ApiClient, ApiError, NetworkError } from "./api.js";
import {
  friendlyError,
  groupAttributes,
  isHardStop,
  renderAttributeGroups,
  renderAuditTable,
  renderBenchCsv,
} from "./render.js";
import { isExpired, remainingSeconds, type UiSession } from "./session.js";
import type {
  CatalogDocument,
  FilteredRecord,
  PatientSummary,
  ProbeWire,
  RegistrationPayload,
} from "./types.js";

export type Screen =
  | "auth"
  | "probe-upload"
  | "post-auth"
  | "emergency-view"
  | "doctor-login"
  | "dashboard"
  | "register"
  | "key-reveal"
  | "key-prompt"
  | "confidential-view"
  | "basic-view"
  | "audit"
  | "bench";

interface Banner {
  kind: "error" | "info";
  text: string;
  hardStop: boolean;
}

/**
 * Single-tab console flow. All record policy lives server-side: every screen
 * renders exactly what the gateway returned, nothing more.
 */
export class ConsoleApp {
  readonly api: ApiClient;
  private session: UiSession | null = null;
  private screen: Screen = "auth";
  private banner: Banner | null = null;
  private catalog: CatalogDocument | null = null;
  private probeModality: "iris" | "fingerprint" = "iris";
  private currentView: FilteredRecord | null = null;
  private patients: PatientSummary[] = [];
  private selectedPatientRef: string | null = null;
  /** Held only while the key-reveal screen is showing; cleared on leave. */
  private oneTimeKey: { patientRef: string; privateKey: string } | null = null;
  private auditEntries: Parameters<typeof renderAuditTable>[1] = [];
  private benchCsv = "";

  constructor(
    private readonly root: HTMLElement,
    baseUrl: string,
  ) {
    this.api = new ApiClient({
      baseUrl,
      onSessionExpired: () => this.clearSession("Your session has expired. Please sign in again."),
    });
  }

  async start(): Promise<void> {
    try {
      this.catalog = await this.api.getCatalog();
    } catch (err) {
      this.showError(err);
    }
    this.goTo("auth");
  }

  // -- state accessors (used by the UI and by tests) ----------------------

  currentScreen(): Screen {
    return this.screen;
  }

  currentSession(): UiSession | null {
    return this.session;
  }

  // -- navigation ---------------------------------------------------------

  private goTo(screen: Screen): void {
    if (this.screen === "key-reveal" && screen !== "key-reveal") {
      this.oneTimeKey = null; // the private key is shown exactly once
    }
    this.screen = screen;
    this.render();
  }

  chooseModality(modality: "iris" | "fingerprint"): void {
    this.banner = null;
    this.probeModality = modality;
    this.goTo("probe-upload");
  }

  chooseDoctorLogin(): void {
    this.banner = null;
    this.goTo("doctor-login");
  }

  backToAuth(): void {
    this.banner = null;
    this.goTo("auth");
  }

  private clearSession(message: string): void {
    this.session = null;
    this.api.setToken(null);
    this.currentView = null;
    this.patients = [];
    this.selectedPatientRef = null;
    this.banner = { kind: "info", text: message, hardStop: false };
    this.goTo("auth");
  }

  // -- authentication -----------------------------------------------------

  /** Simulated capture: the probe template arrives as an uploaded fixture file. */
  async submitProbeFile(file: File): Promise<void> {
    let wire: ProbeWire;
    try {
      wire = JSON.parse(await file.text()) as ProbeWire;
      if (wire.kind !== "iris" && wire.kind !== "fingerprint") throw new Error("bad template");
    } catch {
      this.banner = {
        kind: "error",
        text: friendlyError("parse_error", "unreadable file"),
        hardStop: false,
      };
      this.render();
      return;
    }
    await this.submitProbe(wire);
  }

  submitProbe(wire: ProbeWire): Promise<void> {
    return this.submitProbes(wire.kind === "iris" ? { iris: wire } : { fingerprint: wire });
  }

  async submitProbes(probes: {
    iris?: ProbeWire;
    fingerprint?: ProbeWire;
    fusion_mode?: string;
  }): Promise<void> {
    try {
      const response = await this.api.authenticateBiometric(probes);
      this.session = {
        token: response.token,
        role: "emergency_responder",
        boundPatientRef: response.patient_ref,
        expiresAt: new Date(response.expires_at),
      };
      this.api.setToken(response.token);
      this.banner = null;
      this.goTo("post-auth");
    } catch (err) {
      this.showError(err);
    }
  }

  async doctorLogin(username: string, password: string): Promise<void> {
    try {
      const response = await this.api.doctorLogin(username, password);
      this.session = {
        token: response.token,
        role: "doctor",
        expiresAt: new Date(response.expires_at),
      };
      this.api.setToken(response.token);
      this.banner = null;
      this.goTo("post-auth");
    } catch (err) {
      this.showError(err);
    }
  }

  // -- responder flow -----------------------------------------------------

  async openEmergency(): Promise<void> {
    const bound = this.session?.boundPatientRef;
    if (!bound) {
      this.banner = {
        kind: "error",
        text: "Emergency access requires a biometric match first.",
        hardStop: false,
      };
      this.render();
      return;
    }
    try {
      this.currentView = await this.api.getView(bound, "emergency");
      this.banner = null;
      this.goTo("emergency-view");
    } catch (err) {
      this.showError(err);
    }
  }

  // -- doctor flow --------------------------------------------------------

  async openDashboard(): Promise<void> {
    try {
      const response = await this.api.listPatients();
      this.patients = response.patients;
      this.banner = null;
      this.goTo("dashboard");
    } catch (err) {
      this.showError(err);
    }
  }

  selectPatient(patientRef: string): void {
    this.selectedPatientRef = patientRef;
    this.render();
  }

  async openBasicShare(patientRef: string): Promise<void> {
    try {
      this.currentView = await this.api.getView(patientRef, "basic");
      this.banner = null;
      this.goTo("basic-view");
    } catch (err) {
      this.showError(err);
    }
  }

  promptConfidential(patientRef: string): void {
    this.selectedPatientRef = patientRef;
    this.banner = null;
    this.goTo("key-prompt");
  }

  async submitPatientKey(patientKey: string): Promise<void> {
    const ref = this.selectedPatientRef;
    if (!ref) return;
    try {
      this.currentView = await this.api.getView(ref, "full", patientKey);
      this.banner = null;
      this.goTo("confidential-view");
    } catch (err) {
      // stay on the prompt: error banner, no confidential values rendered
      this.currentView = null;
      this.showError(err);
    }
  }

  openRegister(): void {
    this.banner = null;
    this.goTo("register");
  }

  async submitRegistration(payload: RegistrationPayload): Promise<void> {
    try {
      const response = await this.api.registerPatient(payload);
      this.oneTimeKey = {
        patientRef: response.patient_ref,
        privateKey: response.private_key,
      };
      this.banner = null;
      this.goTo("key-reveal");
    } catch (err) {
      this.showError(err);
    }
  }

  /** Leaving the reveal screen discards the key permanently. */
  acknowledgeKey(): void {
    this.goTo("post-auth");
  }

  async openAudit(): Promise<void> {
    try {
      const response = await this.api.queryAudit();
      this.auditEntries = response.entries;
      this.banner = null;
      this.goTo("audit");
    } catch (err) {
      this.showError(err);
    }
  }

  openBench(csvText: string): void {
    this.benchCsv = csvText;
    this.banner = null;
    this.goTo("bench");
  }

  // -- error handling -----------------------------------------------------

  private showError(err: unknown): void {
    if (err instanceof ApiError && err.code === "session_expired") {
      return; // clearSession already moved to the auth screen with a notice
    }
    if (err instanceof ApiError) {
      this.banner = {
        kind: "error",
        text: friendlyError(err.code, err.message),
        hardStop: isHardStop(err.code),
      };
    } else if (err instanceof NetworkError) {
      this.banner = {
        kind: "error",
        text: "Cannot reach the record gateway. Check the connection and retry.",
        hardStop: false,
      };
    } else {
      this.banner = { kind: "error", text: "Something went wrong.", hardStop: false };
    }
    this.render();
  }

  // -- rendering ----------------------------------------------------------

  private render(): void {
    const doc = this.root.ownerDocument;
    this.root.textContent = "";
    this.root.dataset.screen = this.screen;

    if (this.banner) {
      const banner = doc.createElement("div");
      banner.className = this.banner.hardStop ? "banner hard-stop" : `banner ${this.banner.kind}`;
      banner.setAttribute("role", "alert");
      banner.textContent = this.banner.text;
      this.root.appendChild(banner);
    }

    if (this.session && !isExpired(this.session)) {
      const status = doc.createElement("div");
      status.className = "session-status";
      const bound = this.session.boundPatientRef
        ? ` — patient ${this.session.boundPatientRef}`
        : "";
      status.textContent =
        `${this.session.role}${bound} — expires in ${remainingSeconds(this.session)}s`;
      this.root.appendChild(status);
    }

    switch (this.screen) {
      case "auth":
        this.renderAuthChoice(doc);
        break;
      case "probe-upload":
        this.renderProbeUpload(doc);
        break;
      case "doctor-login":
        this.renderDoctorLogin(doc);
        break;
      case "post-auth":
        this.renderPostAuth(doc);
        break;
      case "emergency-view":
      case "basic-view":
      case "confidential-view":
        this.renderRecordView(doc);
        break;
      case "dashboard":
        this.renderDashboard(doc);
        break;
      case "register":
        this.renderRegister(doc);
        break;
      case "key-reveal":
        this.renderKeyReveal(doc);
        break;
      case "key-prompt":
        this.renderKeyPrompt(doc);
        break;
      case "audit":
        this.root.appendChild(renderAuditTable(doc, this.auditEntries));
        break;
      case "bench":
        this.root.appendChild(renderBenchCsv(doc, this.benchCsv));
        break;
    }
  }

  private button(doc: Document, id: string, label: string, onClick: () => void): HTMLElement {
    const button = doc.createElement("button");
    button.id = id;
    button.textContent = label;
    button.addEventListener("click", onClick);
    return button;
  }

  private renderAuthChoice(doc: Document): void {
    const title = doc.createElement("h2");
    title.textContent = "Choose an authentication method";
    this.root.appendChild(title);
    this.root.appendChild(
      this.button(doc, "choose-iris", "Iris capture", () => this.chooseModality("iris")),
    );
    this.root.appendChild(
      this.button(doc, "choose-fingerprint", "Fingerprint capture", () =>
        this.chooseModality("fingerprint"),
      ),
    );
    this.root.appendChild(
      this.button(doc, "choose-doctor", "Doctor login", () => this.chooseDoctorLogin()),
    );
  }

  private renderProbeUpload(doc: Document): void {
    const title = doc.createElement("h2");
    title.textContent = `Upload a ${this.probeModality} capture file`;
    this.root.appendChild(title);
    const input = doc.createElement("input");
    input.type = "file";
    input.id = "probe-file";
    input.accept = "application/json";
    input.addEventListener("change", () => {
      const file = input.files?.[0];
      if (file) void this.submitProbeFile(file);
    });
    this.root.appendChild(input);
    this.root.appendChild(this.button(doc, "back", "Back", () => this.backToAuth()));
  }

  private renderDoctorLogin(doc: Document): void {
    const title = doc.createElement("h2");
    title.textContent = "Doctor login";
    this.root.appendChild(title);
    const username = doc.createElement("input");
    username.id = "login-username";
    username.placeholder = "Username";
    const password = doc.createElement("input");
    password.id = "login-password";
    password.type = "password";
    password.placeholder = "Password";
    this.root.appendChild(username);
    this.root.appendChild(password);
    this.root.appendChild(
      this.button(doc, "login-submit", "Sign in", () =>
        void this.doctorLogin(username.value, password.value),
      ),
    );
    this.root.appendChild(this.button(doc, "back", "Back", () => this.backToAuth()));
  }

  private renderPostAuth(doc: Document): void {
    const title = doc.createElement("h2");
    title.textContent = "What would you like to do?";
    this.root.appendChild(title);
    if (this.session?.role === "emergency_responder") {
      this.root.appendChild(
        this.button(doc, "open-emergency", "Open emergency EHR", () => void this.openEmergency()),
      );
    } else {
      this.root.appendChild(
        this.button(doc, "open-dashboard", "Patient list", () => void this.openDashboard()),
      );
      this.root.appendChild(
        this.button(doc, "open-register", "Register patient", () => this.openRegister()),
      );
      this.root.appendChild(
        this.button(doc, "open-audit", "Audit log", () => void this.openAudit()),
      );
    }
  }

  private renderRecordView(doc: Document): void {
    const view = this.currentView;
    if (!view) return;
    const title = doc.createElement("h2");
    title.textContent = `${view.view} view — ${view.patient_ref}`;
    this.root.appendChild(title);
    const catalog = this.catalog ?? { version: "", attributes: [] };
    this.root.appendChild(renderAttributeGroups(doc, groupAttributes(view.values, catalog)));
    if (this.session?.role === "doctor") {
      this.root.appendChild(
        this.button(doc, "back", "Back to patients", () => void this.openDashboard()),
      );
    }
  }

  private renderDashboard(doc: Document): void {
    const title = doc.createElement("h2");
    title.textContent = "Patients";
    this.root.appendChild(title);
    const list = doc.createElement("ul");
    list.id = "patient-list";
    for (const patient of this.patients) {
      const item = doc.createElement("li");
      item.dataset.patientRef = patient.patient_ref;
      item.textContent = `${patient.patient_ref} — ${patient.display_name} `;
      item.appendChild(
        this.button(doc, `basic-${patient.patient_ref}`, "Basic view", () =>
          void this.openBasicShare(patient.patient_ref),
        ),
      );
      item.appendChild(
        this.button(doc, `confidential-${patient.patient_ref}`, "Confidential view", () =>
          this.promptConfidential(patient.patient_ref),
        ),
      );
      list.appendChild(item);
    }
    this.root.appendChild(list);
  }

  private renderRegister(doc: Document): void {
    const title = doc.createElement("h2");
    title.textContent = "Register patient";
    this.root.appendChild(title);
    const hint = doc.createElement("p");
    hint.textContent =
      "Paste the registration payload (demographics, record values, template fixtures).";
    this.root.appendChild(hint);
    const area = doc.createElement("textarea");
    area.id = "register-payload";
    this.root.appendChild(area);
    this.root.appendChild(
      this.button(doc, "register-submit", "Register", () => {
        try {
          const payload = JSON.parse(area.value) as RegistrationPayload;
          void this.submitRegistration(payload);
        } catch {
          this.banner = {
            kind: "error",
            text: friendlyError("validation_error", "invalid payload"),
            hardStop: false,
          };
          this.render();
        }
      }),
    );
  }

  private renderKeyReveal(doc: Document): void {
    const key = this.oneTimeKey;
    if (!key) return;
    const title = doc.createElement("h2");
    title.textContent = `Patient ${key.patientRef} registered`;
    this.root.appendChild(title);
    const warning = doc.createElement("p");
    warning.className = "key-warning";
    warning.textContent =
      "Save this private key now. It unlocks the confidential record and will never be shown again.";
    this.root.appendChild(warning);
    const keyElement = doc.createElement("code");
    keyElement.id = "private-key";
    keyElement.textContent = key.privateKey;
    this.root.appendChild(keyElement);
    this.root.appendChild(
      this.button(doc, "key-saved", "I have saved the key", () => this.acknowledgeKey()),
    );
  }

  private renderKeyPrompt(doc: Document): void {
    const title = doc.createElement("h2");
    title.textContent = `Enter the patient private key for ${this.selectedPatientRef ?? ""}`;
    this.root.appendChild(title);
    const input = doc.createElement("input");
    input.id = "patient-key";
    input.type = "password";
    this.root.appendChild(input);
    this.root.appendChild(
      this.button(doc, "key-submit", "Unlock", () => void this.submitPatientKey(input.value)),
    );
    this.root.appendChild(
      this.button(doc, "back", "Back to patients", () => void this.openDashboard()),
    );
  }
}
