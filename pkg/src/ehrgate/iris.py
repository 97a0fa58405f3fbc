"""Masked fractional Hamming distance for iris codes.

Distance between two templates is the fraction of disagreeing bits among
jointly usable (mask AND mask) bits, minimized over circular shifts of the
second code by -8..+8 bits to absorb rotation.  Shifts whose joint mask
falls below the 512-bit floor are skipped; if no shift qualifies the pair
is incomparable.
"""

from __future__ import annotations

import numpy as np

from .errors import InsufficientMaskOverlap
from .templates import IRIS_MIN_MASK_BITS, IrisTemplate

SHIFTS = range(-8, 9)


def iris_distance(a: IrisTemplate, b: IrisTemplate) -> float:
    best = None
    a_code = a.code
    a_mask = a.mask
    for k in SHIFTS:
        b_code = np.roll(b.code, k)
        b_mask = np.roll(b.mask, k)
        joint = a_mask & b_mask
        usable = int(joint.sum())
        if usable < IRIS_MIN_MASK_BITS:
            continue
        disagree = int(((a_code ^ b_code) & joint).sum())
        d = disagree / usable
        if best is None or d < best:
            best = d
    if best is None:
        raise InsufficientMaskOverlap(
            f"no shift reaches {IRIS_MIN_MASK_BITS} jointly usable bits"
        )
    return best
