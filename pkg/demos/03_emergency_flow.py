"""End-to-end break-glass flow: enroll, authenticate by iris, read the
Emergency view, and inspect the audit trail.

Run: python3 demos/03_emergency_flow.py
"""

from ehrgate import GatewayService, RecordStore, ViewKind, load_catalog
from ehrgate.synth import SynthConfig, gen_enrollee_templates, gen_patient, perturb_iris

catalog = load_catalog()
store = RecordStore(catalog=catalog)
service = GatewayService(store)

config = SynthConfig(seed=21)
iris_t, fp_t = gen_enrollee_templates(config, 0)
demo, values = gen_patient(210, catalog)
values["statuses.hiv_aids"] = "positive"  # Confidential AND Emergency

ref, key = store.enroll_patient(demo, values, [iris_t], [fp_t])
print(f"enrolled {ref}; private key (shown once): {key[:8]}...{key[-8:]}")

probe = perturb_iris(iris_t, config.iris_flip_prob, 0.0, seed=22)
ctx, token = service.authenticate_biometric(iris_probe=probe)
print(f"responder session bound to {ctx.bound_patient_ref}, expires {ctx.expires_at}")

view = service.api_get_view(ctx, ref, ViewKind.EMERGENCY)
print(f"\nEmergency view: {len(view.values)} attributes")
print("  includes sealed hiv status:", view.values["statuses.hiv_aids"])
print("  name is NOT exposed:", "bio_data.name" not in view.values)

print("\naudit trail:")
for entry in store.query_audit(patient_ref=ref):
    print(f"  {entry.timestamp} {entry.actor:>14} {entry.role:>20} "
          f"{entry.view:>10} {entry.outcome}")
