import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import { ConsoleApp } from "../src/app.js";
import type { FingerprintWire, IrisWire, ProbeWire } from "../src/types.js";

export const GATEWAY_PORT = 8791;
export const GATEWAY_URL = `http://127.0.0.1:${GATEWAY_PORT}`;

const here = dirname(fileURLToPath(import.meta.url));
export const FIXTURES_PATH = join(here, ".fixtures.json");

export interface PatientFixture {
  ref: string;
  key: string;
  iris_probe: IrisWire;
  fingerprint_probe: FingerprintWire;
  record_values: Record<string, unknown>;
}

export interface Fixtures {
  doctor: { username: string; password: string };
  patients: PatientFixture[];
}

export function loadFixtures(): Fixtures {
  return JSON.parse(readFileSync(FIXTURES_PATH, "utf8")) as Fixtures;
}

export function makeApp(): { app: ConsoleApp; root: HTMLElement } {
  const root = document.createElement("div");
  document.body.appendChild(root);
  const app = new ConsoleApp(root, GATEWAY_URL);
  return { app, root };
}

export function probeFile(wire: ProbeWire): File {
  return new File([JSON.stringify(wire)], "probe.json", { type: "application/json" });
}
