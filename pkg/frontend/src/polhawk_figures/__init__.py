"""Figure rendering for recorded polariton-wire simulation output.

This package only reads the documented file formats (binary
correlation maps, binary flow records, CSV tables) and draws them; it
never recomputes any physics.
"""

from . import cli
from .figures import DEFAULT_VMAX, KINDS, FigureSpec, render
from .readers import (
    CorrelationMapFile,
    FlowFile,
    FormatError,
    RangeError,
    load_correlation_map,
    load_csv_columns,
    load_flow_record,
)

__version__ = "0.1.0"

__all__ = [
    "CorrelationMapFile",
    "DEFAULT_VMAX",
    "FigureSpec",
    "FlowFile",
    "FormatError",
    "KINDS",
    "RangeError",
    "cli",
    "load_correlation_map",
    "load_csv_columns",
    "load_flow_record",
    "render",
    "__version__",
]
