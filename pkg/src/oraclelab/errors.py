"""Exception types shared across the package."""


class OracleLabError(Exception):
    """Base class for package errors."""


class InvalidPlacementError(OracleLabError):
    """Gate placed on an illegal qubit pair."""


class InvalidConfigError(OracleLabError):
    """Operation parameters outside the supported domain."""


class InvalidGroupDataError(OracleLabError):
    """Group table or irrep data fails a structural invariant."""


class LabelError(OracleLabError, KeyError):
    """Reference to a label the oracle does not define."""


class DegenerateInputError(OracleLabError):
    """Input is identically zero or otherwise carries no information."""


class SizeError(OracleLabError):
    """Problem size exceeds the documented desk-scale cap."""


class DepthError(OracleLabError):
    """Tree path longer than the instance allows."""


class ProtocolError(OracleLabError):
    """Malformed oracle call (distinct from the in-band FAIL answer)."""


class IntegrityError(OracleLabError):
    """Internal consistency violated: corrupt log or inconsistent instance."""


class CertificationError(OracleLabError):
    """A required per-instance success guarantee does not hold."""


class SchemaVersionError(OracleLabError):
    """Persisted record carries an unsupported schema version."""
