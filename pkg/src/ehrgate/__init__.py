"""Privacy-preserving EHR gateway with multimodal biometric emergency access."""

from .catalog import (
    AttributeCatalog,
    AttributeDef,
    FilteredRecord,
    Tag,
    ViewKind,
    filter_view,
    load_catalog,
    tags_of,
    visible_attributes,
)
from .context import AccessContext
from .errors import EhrGateError
from .fingerprint import fingerprint_score
from .gateway import GatewayService, ShareExport
from .iris import iris_distance
from .matching import (
    IdentificationResult,
    MatchResult,
    ThresholdConfig,
    fuse,
    identify,
    verify,
)
from .store import AuditEntry, RecordStore, SealedPayload
from .synth import (
    SynthConfig,
    gen_fingerprint_template,
    gen_iris_template,
    gen_patient,
    perturb_fingerprint,
    perturb_iris,
)
from .templates import FingerprintTemplate, IrisTemplate, Minutia

__version__ = "0.1.0"

__all__ = [
    "AccessContext",
    "AttributeCatalog",
    "AttributeDef",
    "AuditEntry",
    "EhrGateError",
    "FilteredRecord",
    "FingerprintTemplate",
    "GatewayService",
    "IdentificationResult",
    "IrisTemplate",
    "MatchResult",
    "Minutia",
    "RecordStore",
    "SealedPayload",
    "ShareExport",
    "SynthConfig",
    "Tag",
    "ThresholdConfig",
    "ViewKind",
    "filter_view",
    "fingerprint_score",
    "fuse",
    "gen_fingerprint_template",
    "gen_iris_template",
    "gen_patient",
    "identify",
    "iris_distance",
    "load_catalog",
    "perturb_fingerprint",
    "perturb_iris",
    "tags_of",
    "verify",
    "visible_attributes",
]
