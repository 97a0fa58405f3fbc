import type { AuditEntry, CatalogDocument } from "./types.js";

/** Human-readable messages for every gateway error code. */
const ERROR_MESSAGES: Record<string, string> = {
  no_match: "No enrolled patient matched this capture. Please try again.",
  ambiguous_match:
    "The captures matched different patients. Stop: re-capture and try again. " +
    "No record will be opened.",
  invalid_credentials: "The username or password is incorrect.",
  session_expired: "Your session has expired. Please sign in again.",
  authorization_failed: "The patient key is not valid for this record.",
  forbidden: "Your role does not allow this action.",
  unknown_patient: "No patient exists with that reference.",
  no_biometric_template: "At least one biometric template is required to register.",
  missing_probe: "Please provide a biometric capture file first.",
  unknown_attribute: "The form contains a field the record system does not recognise.",
  value_type_mismatch: "One of the entered values has the wrong type.",
  validation_error: "The submitted data is not valid.",
  parse_error: "The uploaded file could not be read as a template.",
};

export function friendlyError(code: string, fallback: string): string {
  return ERROR_MESSAGES[code] ?? fallback;
}

/** AmbiguousMatch is a hard stop: the flow must not continue to any record. */
export function isHardStop(code: string): boolean {
  return code === "ambiguous_match";
}

const HEADING_LABELS: Record<string, string> = {
  bio_data: "Bio data",
  common_medical: "Common medical conditions",
  psychiatric: "Psychiatric conditions",
  common_surgical: "Surgical history",
  statuses: "Statuses",
};

export interface AttributeGroup {
  heading: string;
  label: string;
  rows: { id: string; label: string; value: string }[];
}

function formatValue(value: unknown): string {
  if (typeof value === "boolean") return value ? "yes" : "no";
  if (value === null || value === undefined) return "";
  return String(value);
}

/**
 * Group exactly the returned attribute set by catalog heading. Attribute ids
 * missing from the catalog go under a visible "Unknown attributes" group —
 * never dropped silently. No client-side filtering or augmentation.
 */
export function groupAttributes(
  values: Record<string, unknown>,
  catalog: CatalogDocument,
): AttributeGroup[] {
  const byId = new Map(catalog.attributes.map((a) => [a.id, a]));
  const groups = new Map<string, AttributeGroup>();
  for (const [id, value] of Object.entries(values)) {
    const attr = byId.get(id);
    const heading = attr ? attr.heading : "__unknown__";
    let group = groups.get(heading);
    if (!group) {
      group = {
        heading,
        label: attr ? (HEADING_LABELS[heading] ?? heading) : "Unknown attributes",
        rows: [],
      };
      groups.set(heading, group);
    }
    group.rows.push({
      id,
      label: attr ? attr.display_name : id,
      value: formatValue(value),
    });
  }
  for (const group of groups.values()) {
    group.rows.sort((a, b) => a.id.localeCompare(b.id));
  }
  return [...groups.values()].sort((a, b) => a.heading.localeCompare(b.heading));
}

export function renderAttributeGroups(
  doc: Document,
  groups: AttributeGroup[],
): HTMLElement {
  const container = doc.createElement("div");
  container.className = "record-view";
  for (const group of groups) {
    const section = doc.createElement("section");
    section.dataset.heading = group.heading;
    const title = doc.createElement("h3");
    title.textContent = group.label;
    section.appendChild(title);
    const list = doc.createElement("dl");
    for (const row of group.rows) {
      const dt = doc.createElement("dt");
      dt.textContent = row.label;
      const dd = doc.createElement("dd");
      dd.dataset.attributeId = row.id;
      dd.textContent = row.value;
      list.appendChild(dt);
      list.appendChild(dd);
    }
    section.appendChild(list);
    container.appendChild(section);
  }
  return container;
}

export function renderAuditTable(doc: Document, entries: AuditEntry[]): HTMLElement {
  const table = doc.createElement("table");
  table.className = "audit-table";
  const header = doc.createElement("tr");
  for (const col of ["Time", "Actor", "Role", "Patient", "View", "Outcome", "Attrs"]) {
    const th = doc.createElement("th");
    th.textContent = col;
    header.appendChild(th);
  }
  table.appendChild(header);
  for (const entry of entries) {
    const tr = doc.createElement("tr");
    tr.dataset.outcome = entry.outcome;
    for (const cell of [
      entry.timestamp,
      entry.actor,
      entry.role,
      entry.patient_ref,
      entry.view,
      entry.outcome,
      String(entry.attribute_count),
    ]) {
      const td = doc.createElement("td");
      td.textContent = cell;
      tr.appendChild(td);
    }
    table.appendChild(tr);
  }
  return table;
}

/** Render a bench-report CSV (as emitted by the gateway tooling) as a table. */
export function renderBenchCsv(doc: Document, csvText: string): HTMLElement {
  const table = doc.createElement("table");
  table.className = "bench-table";
  const lines = csvText.trim().split(/\r?\n/).filter((line) => line.length > 0);
  lines.forEach((line, index) => {
    const tr = doc.createElement("tr");
    for (const cell of line.split(",")) {
      const el = doc.createElement(index === 0 ? "th" : "td");
      el.textContent = cell;
      tr.appendChild(el);
    }
    table.appendChild(tr);
  });
  return table;
}
