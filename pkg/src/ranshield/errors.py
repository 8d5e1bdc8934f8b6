"""Exception types shared across the package.

Every error that crosses a module boundary has a stable machine code so the
HTTP service can map it onto an ApiError without string matching.
"""

from __future__ import annotations


class RanShieldError(Exception):
    """Base class for all package errors."""

    code = "INTERNAL"


# --- knowledge base -------------------------------------------------------

class FileUnreadable(RanShieldError):
    code = "FILE_UNREADABLE"


class SchemaViolation(RanShieldError):
    code = "SCHEMA_VIOLATION"

    def __init__(self, record_index: int, field: str, detail: str = ""):
        self.record_index = record_index
        self.field = field
        msg = f"record {record_index}: bad field {field!r}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class DuplicateTechniqueId(RanShieldError):
    code = "DUPLICATE_TECHNIQUE_ID"

    def __init__(self, technique_id: str):
        self.technique_id = technique_id
        super().__init__(f"duplicate technique_id {technique_id!r}")


class EmptyCorpus(RanShieldError):
    code = "EMPTY_CORPUS"


class EmptyIndex(RanShieldError):
    code = "EMPTY_INDEX"


class UnknownTechniqueId(RanShieldError):
    code = "UNKNOWN_TECHNIQUE"

    def __init__(self, technique_id: str):
        self.technique_id = technique_id
        super().__init__(f"unknown technique_id {technique_id!r}")


# --- telemetry ------------------------------------------------------------

class DuplicateTraceId(RanShieldError):
    code = "DUPLICATE_TRACE_ID"


class AllRecordsRejected(RanShieldError):
    code = "ALL_RECORDS_REJECTED"


class UnknownTraceId(RanShieldError):
    code = "UNKNOWN_TRACE_ID"


class InvalidWindow(RanShieldError):
    code = "INVALID_WINDOW"


class UnknownUeId(RanShieldError):
    code = "UNKNOWN_UE_ID"


# --- agent core -----------------------------------------------------------

class UnknownRole(RanShieldError):
    code = "UNKNOWN_ROLE"


class ScriptExhausted(RanShieldError):
    code = "SCRIPT_EXHAUSTED"


class ProviderUnavailable(RanShieldError):
    code = "PROVIDER_UNAVAILABLE"


class RemoteBackendUnavailable(RanShieldError):
    code = "REMOTE_BACKEND_UNAVAILABLE"


# --- RAN control ----------------------------------------------------------

class EmptyChangeSet(RanShieldError):
    code = "EMPTY_CHANGE_SET"


class UnknownPath(RanShieldError):
    code = "UNKNOWN_PATH"

    def __init__(self, path: str):
        self.path = path
        super().__init__(f"unknown config path {path!r}")


class InvariantViolation(RanShieldError):
    code = "INVARIANT_VIOLATION"


class AlreadyDecided(RanShieldError):
    code = "ALREADY_DECIDED"


class UnknownApprovalId(RanShieldError):
    code = "UNKNOWN_APPROVAL"


class VersionConflict(RanShieldError):
    code = "VERSION_CONFLICT"


class NotApproved(RanShieldError):
    code = "NOT_APPROVED"


# --- pipeline / eval ------------------------------------------------------

class PlanValidationError(RanShieldError):
    code = "PLAN_INVALID"

    def __init__(self, violations: list[str]):
        self.violations = list(violations)
        super().__init__("; ".join(violations) or "invalid plan")


class EscalatedConfigurationError(RanShieldError):
    code = "CONFIGURATION_ERROR"


class UnknownIncident(RanShieldError):
    code = "UNKNOWN_INCIDENT"


class ScenarioFixtureMissing(RanShieldError):
    code = "SCENARIO_FIXTURE_MISSING"


class MissingScenarioDefinition(RanShieldError):
    code = "MISSING_SCENARIO_DEFINITION"
