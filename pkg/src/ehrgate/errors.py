"""Exception hierarchy shared across the package."""


class EhrGateError(Exception):
    """Base class for all ehrgate errors."""

    code = "error"


class ParseError(EhrGateError):
    code = "parse_error"


class ValidationError(EhrGateError):
    code = "validation_error"


class UnknownAttribute(EhrGateError):
    code = "unknown_attribute"


class ValueTypeMismatch(EhrGateError):
    code = "value_type_mismatch"


class InsufficientMaskOverlap(EhrGateError):
    code = "insufficient_mask_overlap"


class ModalityMismatch(EhrGateError):
    code = "modality_mismatch"


class EmptyDecisionList(EhrGateError):
    code = "empty_decision_list"


class InvalidConfig(EhrGateError):
    code = "invalid_config"


class DegenerateResult(EhrGateError):
    code = "degenerate_result"


class NoBiometricTemplate(EhrGateError):
    code = "no_biometric_template"


class UnknownPatient(EhrGateError):
    code = "unknown_patient"


class AuthorizationFailed(EhrGateError):
    code = "authorization_failed"


class NoMatch(EhrGateError):
    code = "no_match"


class AmbiguousMatch(EhrGateError):
    code = "ambiguous_match"


class MissingProbe(EhrGateError):
    code = "missing_probe"


class InvalidCredentials(EhrGateError):
    code = "invalid_credentials"


class Forbidden(EhrGateError):
    code = "forbidden"


class SessionExpired(EhrGateError):
    code = "session_expired"
