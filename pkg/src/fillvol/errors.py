"""Exception hierarchy shared by all fillvol modules."""

from __future__ import annotations


class FillvolError(Exception):
    """Base class; ``code`` is a short stable identifier used by the CLI."""

    code = "error"


class DomainError(FillvolError, ValueError):
    code = "domain"


class DegreeError(DomainError):
    code = "degree"


class UnsupportedError(FillvolError):
    """The request is well formed but has no exact decision procedure here."""

    code = "unsupported"


class RadiusCapError(UnsupportedError):
    code = "radius-cap"


class SchemaError(FillvolError):
    code = "schema"


class BoundarySquareError(FillvolError):
    """d(d(b)) != 0 for a basis cell; ``cell`` names the offender."""

    code = "d2"

    def __init__(self, message: str, cell: str | None = None):
        super().__init__(message)
        self.cell = cell


class DanglingBasisError(SchemaError):
    code = "dangling"


class RegionError(FillvolError):
    code = "region"

    def __init__(self, message: str, cell=None):
        super().__init__(message)
        self.cell = cell


class FillingNotFound(FillvolError):
    """No filling inside the searched space. Not a proof that none exists."""

    code = "not-found"

    def __init__(self, message: str, trace: dict | None = None):
        super().__init__(message)
        self.trace = trace or {}


class NoFillingExists(FillingNotFound):
    """The searched space was the whole module, so the cycle is not a boundary."""

    code = "no-filling"


class BudgetExceeded(FillvolError):
    code = "budget"
