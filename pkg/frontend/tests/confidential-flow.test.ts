import { afterEach, beforeAll, describe, expect, it } from "vitest";

import { loadFixtures, makeApp, type Fixtures } from "./helpers.js";

let fixtures: Fixtures;

beforeAll(() => {
  fixtures = loadFixtures();
});

afterEach(() => {
  document.body.innerHTML = "";
});

async function doctorApp() {
  const { app, root } = makeApp();
  await app.start();
  app.chooseDoctorLogin();
  await app.doctorLogin(fixtures.doctor.username, fixtures.doctor.password);
  expect(app.currentScreen()).toBe("post-auth");
  return { app, root };
}

describe("doctor confidential flow", () => {
  it("lists one dashboard row per patient in the response", async () => {
    const { app, root } = await doctorApp();
    await app.openDashboard();
    const rows = root.querySelectorAll("#patient-list li");
    expect(rows).toHaveLength(fixtures.patients.length);
  });

  it("wrong key: shows an error and renders nothing confidential", async () => {
    const patient = fixtures.patients[0]!;
    const { app, root } = await doctorApp();
    await app.openDashboard();
    app.promptConfidential(patient.ref);
    expect(app.currentScreen()).toBe("key-prompt");

    await app.submitPatientKey("0".repeat(64));

    expect(app.currentScreen()).toBe("key-prompt");
    const banner = root.querySelector(".banner.error");
    expect(banner).not.toBeNull();
    expect(banner!.textContent).toContain("not valid");
    expect(root.querySelectorAll("[data-attribute-id]")).toHaveLength(0);
    expect(root.textContent).not.toContain("Fixture Patient Zero");
  });

  it("correct key: renders the full record exactly as returned", async () => {
    const patient = fixtures.patients[0]!;
    const { app, root } = await doctorApp();
    await app.openDashboard();
    app.promptConfidential(patient.ref);
    await app.submitPatientKey(patient.key);

    expect(app.currentScreen()).toBe("confidential-view");
    const renderedIds = [...root.querySelectorAll<HTMLElement>("[data-attribute-id]")]
      .map((el) => el.dataset.attributeId)
      .sort();
    expect(renderedIds).toEqual(Object.keys(patient.record_values).sort());
  });

  it("basic view hides confidential attributes", async () => {
    const patient = fixtures.patients[0]!;
    const { app, root } = await doctorApp();
    await app.openDashboard();
    await app.openBasicShare(patient.ref);

    expect(app.currentScreen()).toBe("basic-view");
    const renderedIds = [...root.querySelectorAll<HTMLElement>("[data-attribute-id]")].map(
      (el) => el.dataset.attributeId,
    );
    expect(renderedIds.length).toBeGreaterThan(0);
    expect(renderedIds).not.toContain("statuses.hiv_aids");
    expect(renderedIds).not.toContain("bio_data.sexuality");
  });
});
