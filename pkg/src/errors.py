"""Exception hierarchy. Every failure raised by the package is a D3flError."""


class D3flError(Exception):
    """Base class for all package errors."""


class ParameterError(D3flError, ValueError):
    """Distribution parameters are invalid (non-positive scale, non-finite field)."""


class DomainError(D3flError, ValueError):
    """Argument lies outside the domain of the operation."""


class EmptyRequestError(D3flError, ValueError):
    """A request asked for zero items."""


class ConfigError(D3flError, ValueError):
    """Configuration key, value or file is invalid."""


class LengthError(D3flError, ValueError):
    """Series is too short for the requested transform or windowing."""


class DataError(D3flError, ValueError):
    """Input data is malformed (non-finite values, unparseable rows, duplicates)."""


class StateError(D3flError, ValueError):
    """A detrend state does not fit the series it is applied to."""


class CapabilityError(D3flError):
    """The operation is not supported for this technique."""


class NumericError(D3flError, ArithmeticError):
    """A computation produced non-finite values or a singular system."""


class ShapeError(D3flError, ValueError):
    """Arrays or parameter vectors have mismatched shapes."""


class ProtocolError(D3flError):
    """Federation protocol violated (e.g. aggregation over no updates)."""


class SchemaError(D3flError, ValueError):
    """Input file lacks a required column or violates a schema."""


class QualityError(D3flError, ValueError):
    """Input data has too many gaps to be used."""


class FederationError(D3flError):
    """A client failed during a federated round."""

    def __init__(self, client_id: int, message: str):
        super().__init__(f"client {client_id}: {message}")
        self.client_id = client_id
