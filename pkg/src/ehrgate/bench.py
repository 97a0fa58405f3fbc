"""Benchmark and calibration harness.

``run_identify_bench`` measures 1:N identification latency and rank-1
accuracy per modality and gallery size; published reference timings
(fingerprint 6 s / iris 11.1 s over a 200-template gallery, and the Diaz
et al. fingerprint baseline of 19.8 s over 200,000) are carried as
annotations, never asserted — they are hardware-bound.

``run_roc`` sweeps a threshold grid over seeded genuine/impostor score
samples and estimates each modality's equal-error operating point, which is
how the default accept thresholds were frozen.
"""

from __future__ import annotations

import dataclasses
import io
import statistics
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import InvalidConfig
from .matching import MODALITIES, ThresholdConfig, identify
from .fingerprint import fingerprint_score
from .iris import iris_distance
from .synth import (
    SynthConfig,
    gen_enrollee_templates,
    gen_fingerprint_template,
    gen_iris_template,
    perturb_fingerprint,
    perturb_iris,
)

# published timings carried as reference annotations (milliseconds)
REFERENCE_TIMINGS = {
    "fingerprint": {"gallery_size": 200, "mean_latency_ms": 6000.0},
    "iris": {"gallery_size": 200, "mean_latency_ms": 11100.0},
}
DIAZ_BASELINE = {"modality": "fingerprint", "gallery_size": 200_000, "mean_latency_ms": 19800.0}
REFERENCE_NOTE = "paper(§4.2): fp 6.0s, iris 11.1s @ N=200"
DIAZ_NOTE = "Diaz et al. baseline: fp 19.8s @ N=200000"

IRIS_FREEZE_WINDOW = (0.32, 0.05)
FP_FREEZE_WINDOW = (0.40, 0.10)


@dataclass(frozen=True)
class BenchConfig:
    modalities: Tuple[str, ...] = ("iris", "fingerprint")
    gallery_sizes: Tuple[int, ...] = (100, 200, 400, 800, 1600)
    trials_per_cell: int = 10
    seed: int = 0
    synth: SynthConfig = field(default_factory=SynthConfig)
    thresholds: ThresholdConfig = field(default_factory=ThresholdConfig)

    def __post_init__(self):
        for m in self.modalities:
            if m not in MODALITIES:
                raise InvalidConfig(f"unknown modality {m!r}")
        if not self.modalities:
            raise InvalidConfig("at least one modality required")
        if not self.gallery_sizes or any(n <= 0 for n in self.gallery_sizes):
            raise InvalidConfig("gallery sizes must be positive")
        if list(self.gallery_sizes) != sorted(self.gallery_sizes):
            raise InvalidConfig("gallery sizes must be ascending")
        if self.trials_per_cell < 1:
            raise InvalidConfig("trials_per_cell must be >= 1")


@dataclass(frozen=True)
class BenchRow:
    modality: str
    gallery_size: int
    trials: int
    mean_latency_ms: float
    p95_latency_ms: float
    rank1_rate: float


@dataclass(frozen=True)
class BenchReport:
    rows: Tuple[BenchRow, ...]
    reference_timings: Dict = field(default_factory=lambda: dict(REFERENCE_TIMINGS))
    diaz_baseline: Dict = field(default_factory=lambda: dict(DIAZ_BASELINE))


@dataclass(frozen=True)
class RocRow:
    modality: str
    threshold: float
    far: float
    frr: float


@dataclass(frozen=True)
class RocReport:
    rows: Tuple[RocRow, ...]
    eer_threshold: float
    eer_far: float
    eer_frr: float
    modality: str


def _ref(i: int) -> str:
    return f"P{i + 1:08d}"


def _population(synth: SynthConfig, n: int, modality: str):
    out = []
    for i in range(n):
        iris_t, fp_t = gen_enrollee_templates(synth, i)
        out.append((_ref(i), iris_t if modality == "iris" else fp_t))
    return out


def run_identify_bench(config: BenchConfig) -> BenchReport:
    rows = []
    for modality in config.modalities:
        big = max(config.gallery_sizes)
        synth = dataclasses.replace(config.synth, seed=config.seed)
        full_gallery = _population(synth, big, modality)
        for n in config.gallery_sizes:
            gallery = full_gallery[:n]
            mod_id = MODALITIES.index(modality)
            rng = np.random.Generator(np.random.PCG64((config.seed, n, mod_id)))
            latencies = []
            hits = 0
            for trial in range(config.trials_per_cell + 1):  # first pass is warm-up
                idx = int(rng.integers(0, n))
                ref, enrolled = gallery[idx]
                probe_seed = int(rng.integers(0, 2**62))
                if modality == "iris":
                    probe = perturb_iris(
                        enrolled, synth.iris_flip_prob, synth.iris_mask_drop_prob, probe_seed
                    )
                else:
                    probe = perturb_fingerprint(enrolled, synth, probe_seed)
                result = identify(probe, gallery, modality, config.thresholds)
                if trial == 0:
                    continue
                latencies.append(result.elapsed_ms)
                if result.matched_ref == ref:
                    hits += 1
            latencies.sort()
            p95 = latencies[min(len(latencies) - 1, int(round(0.95 * len(latencies))) )]
            rows.append(
                BenchRow(
                    modality=modality,
                    gallery_size=n,
                    trials=config.trials_per_cell,
                    mean_latency_ms=statistics.fmean(latencies),
                    p95_latency_ms=p95,
                    rank1_rate=hits / config.trials_per_cell,
                )
            )
    return BenchReport(rows=tuple(rows))


def sample_scores(
    modality: str,
    genuine_trials: int,
    impostor_trials: int,
    synth: SynthConfig = SynthConfig(),
    seed: int = 0,
):
    """Seeded genuine and impostor raw scores for one modality."""
    genuine, impostor = [], []
    base = (seed << 24) ^ 0x5EED
    rng = np.random.Generator(np.random.PCG64(base))
    for i in range(genuine_trials):
        s1 = int(rng.integers(0, 2**62))
        s2 = int(rng.integers(0, 2**62))
        if modality == "iris":
            t = gen_iris_template(s1, synth.iris_mask_drop_prob)
            p = perturb_iris(t, synth.iris_flip_prob, synth.iris_mask_drop_prob, s2)
            genuine.append(iris_distance(t, p))
        else:
            n = int(rng.integers(synth.fp_count_min, synth.fp_count_max + 1))
            t = gen_fingerprint_template(s1, n)
            p = perturb_fingerprint(t, synth, s2)
            genuine.append(fingerprint_score(t, p))
    for i in range(impostor_trials):
        s1 = int(rng.integers(0, 2**62))
        s2 = int(rng.integers(0, 2**62))
        if modality == "iris":
            a = gen_iris_template(s1, synth.iris_mask_drop_prob)
            b = gen_iris_template(s2, synth.iris_mask_drop_prob)
            impostor.append(iris_distance(a, b))
        else:
            na = int(rng.integers(synth.fp_count_min, synth.fp_count_max + 1))
            nb = int(rng.integers(synth.fp_count_min, synth.fp_count_max + 1))
            impostor.append(fingerprint_score(gen_fingerprint_template(s1, na),
                                              gen_fingerprint_template(s2, nb)))
    return genuine, impostor


def far_frr(modality: str, genuine, impostor, threshold: float) -> Tuple[float, float]:
    if modality == "iris":  # accept at or below the distance threshold
        far = sum(1 for s in impostor if s <= threshold) / max(1, len(impostor))
        frr = sum(1 for s in genuine if s > threshold) / max(1, len(genuine))
    else:  # accept at or above the similarity threshold
        far = sum(1 for s in impostor if s >= threshold) / max(1, len(impostor))
        frr = sum(1 for s in genuine if s < threshold) / max(1, len(genuine))
    return far, frr


def run_roc(
    modality: str,
    thresholds: Sequence[float],
    genuine_trials: int,
    impostor_trials: int,
    synth: SynthConfig = SynthConfig(),
    seed: int = 0,
) -> RocReport:
    if modality not in MODALITIES:
        raise InvalidConfig(f"unknown modality {modality!r}")
    if genuine_trials < 1 or impostor_trials < 1:
        raise InvalidConfig("trial counts must be >= 1")
    thresholds = list(thresholds)
    if not thresholds or any(not (0.0 <= t <= 1.0) for t in thresholds):
        raise InvalidConfig("threshold grid must lie within [0, 1]")
    genuine, impostor = sample_scores(modality, genuine_trials, impostor_trials, synth, seed)
    rows = []
    for t in thresholds:
        far, frr = far_frr(modality, genuine, impostor, t)
        rows.append(RocRow(modality=modality, threshold=t, far=far, frr=frr))
    # midpoint of the tied plateau: with clean separation a whole threshold
    # band is zero-error, and the band center is the honest operating point
    best_key = min((abs(r.far - r.frr), r.far + r.frr) for r in rows)
    tied = [r for r in rows if (abs(r.far - r.frr), r.far + r.frr) == best_key]
    eer_row = tied[len(tied) // 2]
    return RocReport(
        rows=tuple(rows),
        eer_threshold=eer_row.threshold,
        eer_far=eer_row.far,
        eer_frr=eer_row.frr,
        modality=modality,
    )


def check_threshold_freeze(roc: RocReport) -> None:
    """Fail loudly if the empirical equal-error point drifts from the frozen default."""
    center, width = IRIS_FREEZE_WINDOW if roc.modality == "iris" else FP_FREEZE_WINDOW
    if not (center - width <= roc.eer_threshold <= center + width):
        raise InvalidConfig(
            f"{roc.modality} equal-error threshold {roc.eer_threshold:.3f} outside "
            f"{center} ± {width}; recalibrate before trusting the defaults"
        )


def fit_latency_scaling(report: BenchReport, modality: str) -> Tuple[float, float, float]:
    """Least-squares (slope, intercept, r_squared) of mean latency vs gallery size."""
    pts = [(r.gallery_size, r.mean_latency_ms) for r in report.rows if r.modality == modality]
    if len(pts) < 2:
        raise InvalidConfig("need at least two gallery sizes to fit scaling")
    x = np.array([p[0] for p in pts], dtype=float)
    y = np.array([p[1] for p in pts], dtype=float)
    slope, intercept = np.polyfit(x, y, 1)
    pred = slope * x + intercept
    ss_res = float(((y - pred) ** 2).sum())
    ss_tot = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return float(slope), float(intercept), r2


def emit_report(report, format: str = "text") -> str:
    if format not in ("csv", "text"):
        raise InvalidConfig(f"unknown format {format!r}")
    buf = io.StringIO()
    if isinstance(report, BenchReport):
        if format == "csv":
            buf.write("modality,gallery_size,trials,mean_latency_ms,p95_latency_ms,rank1_rate\n")
            for r in report.rows:
                buf.write(
                    f"{r.modality},{r.gallery_size},{r.trials},"
                    f"{r.mean_latency_ms:.3f},{r.p95_latency_ms:.3f},{r.rank1_rate:.4f}\n"
                )
        else:
            buf.write(f"{'modality':<12} {'N':>7} {'trials':>6} {'mean ms':>10} "
                      f"{'p95 ms':>10} {'rank-1':>7}\n")
            for r in report.rows:
                line = (f"{r.modality:<12} {r.gallery_size:>7} {r.trials:>6} "
                        f"{r.mean_latency_ms:>10.2f} {r.p95_latency_ms:>10.2f} "
                        f"{r.rank1_rate:>7.4f}")
                ref = report.reference_timings.get(r.modality)
                if ref and ref["gallery_size"] == r.gallery_size:
                    line += f"   [reference: {ref['mean_latency_ms'] / 1000:.1f}s reported]"
                buf.write(line + "\n")
            buf.write(f"\n{REFERENCE_NOTE}\n{DIAZ_NOTE}\n")
            buf.write("reference timings are reported values from other hardware; "
                      "not comparable to measurements above\n")
    elif isinstance(report, RocReport):
        if format == "csv":
            buf.write("modality,threshold,far,frr\n")
            for r in report.rows:
                buf.write(f"{r.modality},{r.threshold:.4f},{r.far:.6f},{r.frr:.6f}\n")
        else:
            buf.write(f"{'modality':<12} {'threshold':>10} {'FAR':>10} {'FRR':>10}\n")
            for r in report.rows:
                buf.write(f"{r.modality:<12} {r.threshold:>10.4f} {r.far:>10.6f} {r.frr:>10.6f}\n")
            buf.write(
                f"\nequal-error estimate: threshold {report.eer_threshold:.4f} "
                f"(FAR {report.eer_far:.6f}, FRR {report.eer_frr:.6f})\n"
            )
    else:
        raise InvalidConfig(f"unknown report type {type(report).__name__}")
    return buf.getvalue()
