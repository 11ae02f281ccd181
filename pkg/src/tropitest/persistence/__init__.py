"""Persistent homology: Rips filtrations, barcodes, bottleneck distance."""

from .barcode import Bar, Barcode, load_barcode_json, save_barcode_json
from .bottleneck import (
    Matching,
    bottleneck_bruteforce,
    bottleneck_distance,
    bottleneck_matching,
)
from .reduction import compute_barcode
from .rips import Filtration, build_rips_filtration, validate_filtration

__all__ = [
    "Bar",
    "Barcode",
    "Filtration",
    "Matching",
    "bottleneck_bruteforce",
    "bottleneck_distance",
    "bottleneck_matching",
    "build_rips_filtration",
    "compute_barcode",
    "load_barcode_json",
    "save_barcode_json",
    "validate_filtration",
]
