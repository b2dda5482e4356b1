"""Exception hierarchy shared by all analysis modules.

The CLI maps ``VlsiError`` (and subclasses) to exit status 2, anything
related to malformed input files to exit status 1.
"""


class VlsiError(Exception):
    """Base class for analysis failures."""


class DomainError(VlsiError):
    """A mathematical precondition is violated (negative radicand etc.)."""


class GeometryError(VlsiError):
    """Device or wire geometry is inconsistent."""


class StructureError(VlsiError):
    """An expression or network is not in the supported structural form."""


class SolverError(VlsiError):
    """A numeric solve found no physically consistent solution."""


class InfeasibleError(VlsiError):
    """The requested design point cannot be met."""


class InputError(VlsiError):
    """An input value is missing or out of range."""


class QuantityError(InputError):
    """A quantity string does not parse (malformed input, not an analysis
    failure)."""


class SizeError(VlsiError):
    """A problem instance exceeds the exhaustive-search bound."""


class NetlistError(VlsiError):
    """A gate netlist is malformed (cycle, multiple drivers, ...)."""


class DesignError(VlsiError):
    """A synthesis/optimization routine cannot produce a valid design."""
