"""Verification decisions, decision-level fusion, and 1:N identification."""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from .errors import EmptyDecisionList, ModalityMismatch
from .fingerprint import _match_score, fingerprint_score
from .iris import iris_distance
from .templates import FingerprintTemplate, IrisTemplate, modality_of

MODALITIES = ("iris", "fingerprint")

DEFAULT_IRIS_THRESHOLD = 0.32  # accept at or below
DEFAULT_FINGERPRINT_THRESHOLD = 0.40  # accept at or above


@dataclass(frozen=True)
class ThresholdConfig:
    iris: float = DEFAULT_IRIS_THRESHOLD
    fingerprint: float = DEFAULT_FINGERPRINT_THRESHOLD

    def for_modality(self, modality: str) -> float:
        if modality == "iris":
            return self.iris
        if modality == "fingerprint":
            return self.fingerprint
        raise ModalityMismatch(f"unknown modality {modality!r}")


@dataclass(frozen=True)
class MatchResult:
    modality: str
    raw: float
    threshold: float
    decision: str  # "accept" | "reject"

    @property
    def accepted(self) -> bool:
        return self.decision == "accept"


@dataclass(frozen=True)
class IdentificationResult:
    matched_ref: Optional[str]
    best_raw: float
    candidates_scanned: int
    elapsed_ms: float


def _passes(modality: str, raw: float, threshold: float) -> bool:
    # iris is a distance (lower is closer); fingerprint is a similarity
    if modality == "iris":
        return raw <= threshold
    return raw >= threshold


def verify(probe, enrolled, modality: str, thresholds: ThresholdConfig = ThresholdConfig()) -> MatchResult:
    if modality not in MODALITIES:
        raise ModalityMismatch(f"unknown modality {modality!r}")
    if modality_of(probe) != modality or modality_of(enrolled) != modality:
        raise ModalityMismatch(
            f"templates do not match declared modality {modality!r}"
        )
    if modality == "iris":
        raw = iris_distance(probe, enrolled)
    else:
        raw = fingerprint_score(probe, enrolled)
    threshold = thresholds.for_modality(modality)
    decision = "accept" if _passes(modality, raw, threshold) else "reject"
    return MatchResult(modality=modality, raw=raw, threshold=threshold, decision=decision)


def fuse(decisions: Sequence[MatchResult], mode: str = "OR") -> str:
    if not decisions:
        raise EmptyDecisionList("fuse requires at least one decision")
    if mode == "OR":
        return "accept" if any(d.accepted for d in decisions) else "reject"
    if mode == "AND":
        return "accept" if all(d.accepted for d in decisions) else "reject"
    raise ValueError(f"unknown fusion mode {mode!r}")


def identify(
    probe,
    gallery: Sequence[Tuple[str, object]],
    modality: str,
    thresholds: ThresholdConfig = ThresholdConfig(),
) -> IdentificationResult:
    """Linear 1:N sweep over the gallery.

    Best candidate is the lowest iris distance / highest fingerprint score;
    ties go to the lexicographically smallest patient ref.  Elapsed time
    covers the scan only.
    """
    if modality not in MODALITIES:
        raise ModalityMismatch(f"unknown modality {modality!r}")
    if modality_of(probe) != modality:
        raise ModalityMismatch("probe does not match declared modality")
    for _, t in gallery:
        if modality_of(t) != modality:
            raise ModalityMismatch("gallery template does not match declared modality")

    best_ref = None
    if modality == "iris":
        best_raw = 2.0
        start = time.perf_counter()
        for ref, t in gallery:
            d = iris_distance(probe, t)
            if d < best_raw or (d == best_raw and best_ref is not None and ref < best_ref):
                best_raw = d
                best_ref = ref
        elapsed = (time.perf_counter() - start) * 1000.0
        if not gallery:
            best_raw = 1.0
    else:
        # pull arrays out before the clock starts; the scan is the subject
        probe_arrays = probe.arrays()
        entries = [(ref, t.arrays()) for ref, t in gallery]
        best_raw = -1.0
        start = time.perf_counter()
        pax, pay, paang, pakind = probe_arrays
        for ref, (bx, by, bang, bkind) in entries:
            s = _match_score(pax, pay, paang, pakind, bx, by, bang, bkind)
            if s > best_raw or (s == best_raw and best_ref is not None and ref < best_ref):
                best_raw = s
                best_ref = ref
        elapsed = (time.perf_counter() - start) * 1000.0
        if not gallery:
            best_raw = 0.0

    matched = best_ref if gallery and _passes(modality, best_raw, thresholds.for_modality(modality)) else None
    return IdentificationResult(
        matched_ref=matched,
        best_raw=best_raw,
        candidates_scanned=len(gallery),
        elapsed_ms=elapsed,
    )
