"""Small identification benchmark and ROC sweep.

Run: python3 demos/04_benchmark.py   (takes ~20 s on one CPU)
"""

from ehrgate.bench import (
    BenchConfig,
    check_threshold_freeze,
    emit_report,
    fit_latency_scaling,
    run_identify_bench,
    run_roc,
)
from ehrgate.synth import SynthConfig

report = run_identify_bench(BenchConfig(
    modalities=("iris", "fingerprint"),
    gallery_sizes=(50, 100, 200),
    trials_per_cell=3,
    seed=3,
    synth=SynthConfig(fp_count_min=20, fp_count_max=40),
))
print(emit_report(report, "text"))

for modality in ("iris", "fingerprint"):
    slope, intercept, r2 = fit_latency_scaling(report, modality)
    print(f"{modality}: latency ≈ {slope:.3f}·N + {intercept:.1f} ms  (R²={r2:.4f})")

roc = run_roc("iris", [i / 50 for i in range(51)], 200, 200, seed=4)
print(f"\niris EER ≈ {roc.eer_frr:.3f} at threshold {roc.eer_threshold:.2f}")
check_threshold_freeze(roc)
print("frozen operating threshold confirmed inside the calibration window")
