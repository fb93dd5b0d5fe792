"""Exception hierarchy shared across the package."""


class CoevoBnError(Exception):
    """Base class for all package errors."""


class ValidationError(CoevoBnError):
    """A domain invariant was violated; the message names the invariant."""


class SchemaError(CoevoBnError):
    """Two artifacts (network, dataset, assignment) have incompatible shapes."""


class ParseError(CoevoBnError):
    """A file could not be parsed; the message carries line/field context."""


class EmptyDataError(CoevoBnError):
    """A score comparison was requested on a dataset with no rows."""


class EncodingError(CoevoBnError):
    """Genome components have inconsistent lengths."""


class EngineError(CoevoBnError):
    """The evolution engine was driven outside its contract."""
