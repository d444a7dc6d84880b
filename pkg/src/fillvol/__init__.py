"""Exact homological filling volumes and filling functions of finitely generated groups."""

from __future__ import annotations

from .chain_complex import Cell, Chain, FreeComplex, builtin_complex, commutator_cycle, load_complex, save_complex
from .errors import (
    BoundarySquareError,
    BudgetExceeded,
    DegreeError,
    DomainError,
    FillingNotFound,
    FillvolError,
    NoFillingExists,
    RegionError,
    SchemaError,
    UnsupportedError,
)
from .filling import (
    Budget,
    FillingFunctionTable,
    FillingProblem,
    FillingResult,
    bounded_filling,
    fill_bruteforce,
    fill_by_thickening,
    filling_function_table,
    filling_volume,
    polynomial_equivalence_check,
    preccurlyeq_witness,
    weighted_filling_table,
)
from .group_model import CyclicGroup, FiniteGroup, FreeAbelianGroup, TrivialGroup
from .normed_ring import NormedRing, parse_ring_shorthand
from .qi_transfer import QuasiIsometryData, build_chain_map, build_homotopy, qi_transfer_filling
from .support_geometry import build_gr
from .thickening import BasisCollection, thicken, thickening_chain

__version__ = "0.1.0"
