"""Biometric template types and their wire serialization.

Iris templates are 2048-bit code/mask pairs, serialized as 512-hex-digit
strings (bits packed most-significant-bit first).  Fingerprint templates are
sets of minutiae points, serialized as lists of ``{x, y, angle, kind}``
records.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .errors import ParseError, ValidationError

IRIS_BITS = 2048
IRIS_MIN_MASK_BITS = 512
FP_MIN_MINUTIAE = 8
FP_MAX_MINUTIAE = 64
FP_FIELD = 500.0
FP_MIN_SEPARATION = 4.0

MINUTIA_KINDS = ("ridge_ending", "bifurcation")


@dataclass(frozen=True)
class IrisTemplate:
    code: np.ndarray  # uint8 0/1, length 2048
    mask: np.ndarray  # uint8 0/1, 1 = usable bit

    def __post_init__(self):
        for name, arr in (("code", self.code), ("mask", self.mask)):
            if arr.shape != (IRIS_BITS,):
                raise ValidationError(f"iris {name} must be {IRIS_BITS} bits")
            if arr.dtype != np.uint8 or not np.isin(arr, (0, 1)).all():
                raise ValidationError(f"iris {name} must be 0/1 uint8")
        if int(self.mask.sum()) < IRIS_MIN_MASK_BITS:
            raise ValidationError(
                f"iris mask must have at least {IRIS_MIN_MASK_BITS} usable bits"
            )
        self.code.setflags(write=False)
        self.mask.setflags(write=False)

    def to_wire(self) -> dict:
        return {"kind": "iris", "code": _bits_to_hex(self.code), "mask": _bits_to_hex(self.mask)}

    @classmethod
    def from_wire(cls, doc: dict) -> "IrisTemplate":
        try:
            return cls(code=_hex_to_bits(doc["code"]), mask=_hex_to_bits(doc["mask"]))
        except KeyError as e:
            raise ParseError(f"iris template missing field {e}") from None


def _bits_to_hex(bits: np.ndarray) -> str:
    return np.packbits(bits).tobytes().hex()


def _hex_to_bits(s: str) -> np.ndarray:
    if len(s) != IRIS_BITS // 4:
        raise ParseError(f"iris hex string must be {IRIS_BITS // 4} digits")
    try:
        raw = bytes.fromhex(s)
    except ValueError:
        raise ParseError("iris template is not valid hex") from None
    return np.unpackbits(np.frombuffer(raw, dtype=np.uint8))


@dataclass(frozen=True)
class Minutia:
    x: float
    y: float
    angle: float  # degrees, [0, 360)
    kind: str

    def __post_init__(self):
        if not (0 <= self.x < FP_FIELD and 0 <= self.y < FP_FIELD):
            raise ValidationError(f"minutia position ({self.x}, {self.y}) out of range")
        if not (0 <= self.angle < 360):
            raise ValidationError(f"minutia angle {self.angle} out of range")
        if self.kind not in MINUTIA_KINDS:
            raise ValidationError(f"unknown minutia kind {self.kind!r}")


@dataclass(frozen=True)
class FingerprintTemplate:
    minutiae: Tuple[Minutia, ...]

    def __post_init__(self):
        n = len(self.minutiae)
        if not (FP_MIN_MINUTIAE <= n <= FP_MAX_MINUTIAE):
            raise ValidationError(
                f"fingerprint template must have {FP_MIN_MINUTIAE}-{FP_MAX_MINUTIAE}"
                f" minutiae, got {n}"
            )
        xs = np.array([m.x for m in self.minutiae])
        ys = np.array([m.y for m in self.minutiae])
        d2 = (xs[:, None] - xs[None, :]) ** 2 + (ys[:, None] - ys[None, :]) ** 2
        np.fill_diagonal(d2, np.inf)
        if d2.min() < FP_MIN_SEPARATION**2:
            raise ValidationError(
                f"minutiae closer than {FP_MIN_SEPARATION} px"
            )

    def arrays(self):
        """(x, y, angle, kind) float64/int8 arrays for the matcher kernel."""
        x = np.array([m.x for m in self.minutiae], dtype=np.float64)
        y = np.array([m.y for m in self.minutiae], dtype=np.float64)
        ang = np.array([m.angle for m in self.minutiae], dtype=np.float64)
        kind = np.array(
            [MINUTIA_KINDS.index(m.kind) for m in self.minutiae], dtype=np.int8
        )
        return x, y, ang, kind

    def to_wire(self) -> dict:
        return {
            "kind": "fingerprint",
            "minutiae": [
                {"x": m.x, "y": m.y, "angle": m.angle, "kind": m.kind}
                for m in self.minutiae
            ],
        }

    @classmethod
    def from_wire(cls, doc: dict) -> "FingerprintTemplate":
        try:
            return cls(
                minutiae=tuple(
                    Minutia(x=float(m["x"]), y=float(m["y"]), angle=float(m["angle"]), kind=m["kind"])
                    for m in doc["minutiae"]
                )
            )
        except KeyError as e:
            raise ParseError(f"fingerprint template missing field {e}") from None


def template_from_wire(doc: dict):
    kind = doc.get("kind")
    if kind == "iris":
        return IrisTemplate.from_wire(doc)
    if kind == "fingerprint":
        return FingerprintTemplate.from_wire(doc)
    raise ParseError(f"unknown template kind {kind!r}")


def modality_of(template) -> str:
    if isinstance(template, IrisTemplate):
        return "iris"
    if isinstance(template, FingerprintTemplate):
        return "fingerprint"
    raise ValidationError(f"not a biometric template: {template!r}")
