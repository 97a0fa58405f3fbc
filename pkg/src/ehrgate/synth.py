"""Seedable synthetic data: templates, perturbations, and patient records.

All generators draw from numpy's PCG64 generator seeded explicitly, so any
output is a pure function of its inputs and seed and is stable across runs
and machines.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .catalog import AttributeCatalog
from .errors import DegenerateResult, InvalidConfig
from .templates import (
    FP_FIELD,
    FP_MAX_MINUTIAE,
    FP_MIN_MINUTIAE,
    FP_MIN_SEPARATION,
    IRIS_BITS,
    IRIS_MIN_MASK_BITS,
    MINUTIA_KINDS,
    FingerprintTemplate,
    IrisTemplate,
    Minutia,
)

MAX_MASK_DROP = 0.75
GEN_MIN_SEPARATION = 8.0  # generator spacing, looser than the template floor

_FP_MAX_COORD = math.nextafter(FP_FIELD, 0.0)

FIRST_NAMES = ("Ada", "Bayo", "Chidi", "Dayo", "Efe", "Femi", "Gbenga", "Halima", "Ife", "Jide")
LAST_NAMES = ("Adeyemi", "Balogun", "Chukwu", "Danjuma", "Eze", "Falana", "Giwa", "Hassan")
RELIGIONS = ("christian", "muslim", "traditional", "none")
NATIONALITIES = ("Nigerian", "Ghanaian", "Kenyan", "Beninese", "Cameroonian")
SEXUALITIES = ("heterosexual", "homosexual", "bisexual", "undisclosed")
SURGERIES = ("none", "appendectomy", "cesarean section", "hernia repair", "tonsillectomy")
IMPLANTS = ("none", "hip prosthesis", "bone plate", "dental implant")


@dataclass(frozen=True)
class SynthConfig:
    seed: int = 0
    iris_flip_prob: float = 0.10
    iris_mask_drop_prob: float = 0.0
    fp_count_min: int = 20
    fp_count_max: int = 60
    fp_jitter_sigma: float = 4.0
    fp_angle_sigma: float = 5.0
    fp_delete_prob: float = 0.10
    fp_insert_prob: float = 0.05

    def __post_init__(self):
        for name in ("iris_flip_prob", "iris_mask_drop_prob", "fp_delete_prob", "fp_insert_prob"):
            p = getattr(self, name)
            if not (0.0 <= p <= 1.0):
                raise InvalidConfig(f"{name} must be a probability, got {p}")
        if not (FP_MIN_MINUTIAE <= self.fp_count_min <= self.fp_count_max <= FP_MAX_MINUTIAE):
            raise InvalidConfig(
                f"fp count range {self.fp_count_min}-{self.fp_count_max} outside "
                f"{FP_MIN_MINUTIAE}-{FP_MAX_MINUTIAE}"
            )


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def gen_iris_template(seed: int, mask_drop_prob: float = 0.0) -> IrisTemplate:
    if not (0.0 <= mask_drop_prob <= MAX_MASK_DROP):
        raise InvalidConfig(
            f"mask_drop_prob {mask_drop_prob} must be in [0, {MAX_MASK_DROP}]"
        )
    rng = _rng(seed)
    code = rng.integers(0, 2, IRIS_BITS, dtype=np.uint8)
    mask = _draw_mask(rng, mask_drop_prob)
    return IrisTemplate(code=code, mask=mask)


def _draw_mask(rng: np.random.Generator, drop_prob: float) -> np.ndarray:
    # resample until the usable-bit floor holds, so every output is a valid template
    while True:
        mask = (rng.random(IRIS_BITS) >= drop_prob).astype(np.uint8)
        if int(mask.sum()) >= IRIS_MIN_MASK_BITS:
            return mask


def perturb_iris(
    t: IrisTemplate, flip_prob: float = 0.10, mask_drop_prob: float = 0.0, seed: int = 0
) -> IrisTemplate:
    rng = _rng(seed)
    flips = (rng.random(IRIS_BITS) < flip_prob) & (t.mask == 1)
    code = t.code ^ flips.astype(np.uint8)
    mask = t.mask.copy()
    if mask_drop_prob > 0.0:
        keep = rng.random(IRIS_BITS) >= mask_drop_prob
        mask = mask & keep.astype(np.uint8)
        while int(mask.sum()) < IRIS_MIN_MASK_BITS:
            mask = t.mask & (rng.random(IRIS_BITS) >= mask_drop_prob).astype(np.uint8)
    return IrisTemplate(code=code, mask=mask)


def gen_fingerprint_template(seed: int, n: int) -> FingerprintTemplate:
    if not (FP_MIN_MINUTIAE <= n <= FP_MAX_MINUTIAE):
        raise InvalidConfig(f"minutiae count {n} outside {FP_MIN_MINUTIAE}-{FP_MAX_MINUTIAE}")
    rng = _rng(seed)
    pts = []
    while len(pts) < n:
        x = rng.uniform(0.0, FP_FIELD)
        y = rng.uniform(0.0, FP_FIELD)
        if all((x - px) ** 2 + (y - py) ** 2 >= GEN_MIN_SEPARATION**2 for px, py in pts):
            pts.append((x, y))
    minutiae = tuple(
        Minutia(
            x=x,
            y=y,
            angle=rng.uniform(0.0, 360.0),
            kind=MINUTIA_KINDS[int(rng.integers(0, 2))],
        )
        for x, y in pts
    )
    return FingerprintTemplate(minutiae=minutiae)


def perturb_fingerprint(
    t: FingerprintTemplate, config: SynthConfig = SynthConfig(), seed: int = 0
) -> FingerprintTemplate:
    rng = _rng(seed)
    survivors = []
    for m in t.minutiae:
        if rng.random() < config.fp_delete_prob:
            continue
        x = float(np.clip(m.x + rng.normal(0.0, config.fp_jitter_sigma), 0.0, _FP_MAX_COORD))
        y = float(np.clip(m.y + rng.normal(0.0, config.fp_jitter_sigma), 0.0, _FP_MAX_COORD))
        ang = float((m.angle + rng.normal(0.0, config.fp_angle_sigma)) % 360.0)
        survivors.append(Minutia(x=x, y=y, angle=ang, kind=m.kind))
    n_insert = int(rng.binomial(len(t.minutiae), config.fp_insert_prob))
    for _ in range(n_insert):
        survivors.append(
            Minutia(
                x=rng.uniform(0.0, FP_FIELD),
                y=rng.uniform(0.0, FP_FIELD),
                angle=rng.uniform(0.0, 360.0),
                kind=MINUTIA_KINDS[int(rng.integers(0, 2))],
            )
        )
    # enforce the template's minimum separation by dropping later offenders
    kept = []
    for m in survivors:
        if all((m.x - k.x) ** 2 + (m.y - k.y) ** 2 >= FP_MIN_SEPARATION**2 for k in kept):
            kept.append(m)
    kept = kept[:FP_MAX_MINUTIAE]
    if len(kept) < FP_MIN_MINUTIAE:
        raise DegenerateResult(
            f"only {len(kept)} minutiae survived perturbation (need {FP_MIN_MINUTIAE})"
        )
    return FingerprintTemplate(minutiae=tuple(kept))


def gen_patient(seed: int, catalog: AttributeCatalog):
    """Sample (demographics, record_values) consistent with the catalog.

    Booleans are true with probability 0.15, enumerations uniform, age
    uniform 1-90, parity uniform 0-8.
    """
    rng = _rng(seed)
    values = {}
    for a in catalog.attributes:
        if a.value_kind == "boolean":
            values[a.id] = bool(rng.random() < 0.15)
        elif a.value_kind == "enumerated":
            values[a.id] = a.enum_values[int(rng.integers(0, len(a.enum_values)))]
        elif a.value_kind == "integer":
            if a.id == "bio_data.age":
                values[a.id] = int(rng.integers(1, 91))
            elif a.id == "bio_data.parity":
                values[a.id] = int(rng.integers(0, 9))
            else:
                values[a.id] = int(rng.integers(0, 100))
        else:  # text
            if a.id == "bio_data.name":
                values[a.id] = (
                    FIRST_NAMES[int(rng.integers(0, len(FIRST_NAMES)))]
                    + " "
                    + LAST_NAMES[int(rng.integers(0, len(LAST_NAMES)))]
                )
            elif a.id == "bio_data.religion":
                values[a.id] = RELIGIONS[int(rng.integers(0, len(RELIGIONS)))]
            elif a.id == "bio_data.nationality":
                values[a.id] = NATIONALITIES[int(rng.integers(0, len(NATIONALITIES)))]
            elif a.id == "bio_data.sexuality":
                values[a.id] = SEXUALITIES[int(rng.integers(0, len(SEXUALITIES)))]
            elif a.id == "common_surgical.past_surgeries":
                values[a.id] = SURGERIES[int(rng.integers(0, len(SURGERIES)))]
            elif a.id == "common_surgical.surgical_implants":
                values[a.id] = IMPLANTS[int(rng.integers(0, len(IMPLANTS)))]
            else:
                values[a.id] = f"sample-{int(rng.integers(0, 1000))}"
    demographics = {k: v for k, v in values.items() if k.startswith("bio_data.")}
    return demographics, values


def gen_enrollee_templates(config: SynthConfig, index: int):
    """(iris, fingerprint) templates for synthetic enrollee ``index``.

    Seeds are derived from (config.seed, index) so populations are stable.
    """
    base = (config.seed << 20) + index
    rng = _rng(base)
    n = int(rng.integers(config.fp_count_min, config.fp_count_max + 1))
    iris = gen_iris_template(base * 2 + 1, config.iris_mask_drop_prob)
    fp = gen_fingerprint_template(base * 2 + 2, n)
    return iris, fp
