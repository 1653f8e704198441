"""Dimer models, quivers with potential and splitting maximal modifying generators."""

from .dimer_core import (
    BLACK,
    WHITE,
    Arrow,
    DimerError,
    DimerModel,
    Edge,
    Face,
    QuiverWithPotential,
    ValidationReport,
    apply_basis_change,
    canonical_cycle,
    dimer_from_qp,
    dual_qp,
    opposite,
    trace_faces,
    validate,
)

__version__ = "0.1.0"
