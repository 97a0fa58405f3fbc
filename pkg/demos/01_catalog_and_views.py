"""Walk through the attribute catalog and the three record views.

Run: python3 demos/01_catalog_and_views.py
"""

from ehrgate import ViewKind, filter_view, load_catalog, visible_attributes
from ehrgate.synth import gen_patient

catalog = load_catalog()
print(f"catalog v{catalog.version}: {len(catalog)} attributes")
for view in ViewKind:
    print(f"  {view.value:>10}: {len(visible_attributes(catalog, view))} visible")

demo, values = gen_patient(seed=7, catalog=catalog)
print(f"\nsynthetic patient: {values['bio_data.name']}, "
      f"age {values['bio_data.age']}, blood group {values['statuses.blood_group']}")

for view in ViewKind:
    fr = filter_view(catalog, values, "P00000001", view)
    hidden = sorted(set(values) - set(fr.values))
    print(f"\n{view.value} view keeps {len(fr.values)}/{len(values)} attributes")
    if hidden:
        print("  hides:", ", ".join(hidden[:6]) + ("..." if len(hidden) > 6 else ""))
