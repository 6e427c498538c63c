"""Exception hierarchy shared across the toolkit.

Everything user-input-related derives from ValidationError so the CLI can
map it to exit code 1; genuine bugs surface as ordinary exceptions.
"""


class ValidationError(ValueError):
    """Invalid user input: files, records, schemas, or arguments."""


class TaxonomyError(ValidationError):
    """Taxonomy file or path violates the schema rules."""


class CorpusError(ValidationError):
    """Segment or annotation records fail validation."""


class ScoringError(ValidationError):
    """A segment or group cannot be scored."""


class AgreementError(ValidationError):
    """Agreement computation is impossible on the given inputs."""


class MetricError(ValidationError):
    """Automatic-metric inputs are unusable (e.g. empty tokenization)."""


class AnalysisError(ValidationError):
    """Statistical analysis preconditions not met."""


class StoreError(ValidationError):
    """Annotation project store rejects a request."""
