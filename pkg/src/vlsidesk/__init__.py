"""Desk-scale VLSI analysis toolkit.

Closed-form device, interconnect, gate-sizing, timing, power, SRAM and
test-logic calculations, exposed as a library and a batch CLI.
"""

from . import (
    device,
    effort,
    gates,
    interconnect,
    memory,
    power,
    testability,
    timing,
)
from .errors import (
    DesignError,
    DomainError,
    GeometryError,
    InfeasibleError,
    InputError,
    NetlistError,
    SizeError,
    SolverError,
    StructureError,
    VlsiError,
)

__all__ = [
    "device",
    "gates",
    "interconnect",
    "effort",
    "timing",
    "power",
    "memory",
    "testability",
    "VlsiError",
    "DomainError",
    "GeometryError",
    "StructureError",
    "SolverError",
    "InfeasibleError",
    "InputError",
    "SizeError",
    "NetlistError",
    "DesignError",
]

__version__ = "0.1.0"
