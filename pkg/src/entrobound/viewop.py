"""View operators: the informational footprint of a measurement.

The view operator of a POVM lives on the doubled space ``H_d (x) H_d`` and is
assembled from the traceless parts of the effects.  Writing
``T_i = M_i - Tr(M_i)/d * 1``, the row-major flattening of ``T_i`` is exactly
the vector ``sqrt(d) (T_i (x) 1) |psi_d>`` with ``|psi_d>`` the maximally
entangled vector, so the operator is a Gram-style sum of outer products of
flattened effects.  Its largest eigenvalue caps the information gain any state
can offer through that measurement.

Operators are represented densely on the full ``d^2``-dimensional product
space (including the annihilated ``|psi_d>`` direction); norms are unchanged
and indexing stays simple.  All functions are pure.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .qmat import (
    HERMITICITY_TOL,
    Povm,
    ValidationError,
    WeightedEnsemble,
    hermitian_eigs,
    hermiticity_defect,
)

__all__ = [
    "ViewOperator",
    "ViewReport",
    "maximally_entangled_vector",
    "view_operator",
    "average_view",
    "total_view",
    "operator_norm",
    "overlap_matrix",
    "view_report",
]

VIEW_TOL = 1e-9


def maximally_entangled_vector(d: int) -> np.ndarray:
    """``(1/sqrt(d)) sum_i |i> (x) |i>*`` in the computational basis.

    Conjugation is entrywise in the computational basis, so the vector is the
    row-major flattening of the identity divided by ``sqrt(d)``.
    """
    if d < 1:
        raise ValidationError("dimension must be positive")
    return np.eye(d, dtype=complex).reshape(d * d) / np.sqrt(d)


@dataclass(frozen=True, eq=False)
class ViewOperator:
    """Hermitian PSD operator on the product space, vanishing on ``|psi_d>``."""

    d: int
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        dd = self.d * self.d
        if m.shape != (dd, dd):
            raise ValidationError(f"view operator must be {dd}x{dd}, got {m.shape}")
        defect = hermiticity_defect(m)
        if defect > VIEW_TOL:
            raise ValidationError(f"view operator not Hermitian (defect {defect:.3e})")
        psi = maximally_entangled_vector(self.d)
        residual = float(np.linalg.norm(m @ psi))
        if residual > VIEW_TOL:
            raise ValidationError(
                f"view operator does not annihilate the maximally entangled vector "
                f"(residual {residual:.3e})"
            )
        m = m.copy()
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)


@dataclass(frozen=True, eq=False)
class ViewReport:
    """Spectral summary of an ensemble's average and total view operators."""

    g_avg_norm: float
    g_tot_norm: float
    exclusivity: float
    g_avg_spectrum: np.ndarray
    g_tot_spectrum: np.ndarray


def _flattened_traceless(m: Povm) -> np.ndarray:
    """Rows are the flattened traceless parts of the effects."""
    d = m.d
    eye = np.eye(d, dtype=complex)
    return np.array([(e - (np.trace(e) / d) * eye).reshape(d * d) for e in m.effects])


def view_operator(m: Povm) -> ViewOperator:
    """Sum of outer products of the flattened traceless effect parts."""
    rows = _flattened_traceless(m)
    return ViewOperator(m.d, rows.T @ rows.conj())


def average_view(e: WeightedEnsemble) -> ViewOperator:
    """Convex combination of the member view operators."""
    acc = np.zeros((e.d * e.d, e.d * e.d), dtype=complex)
    for w, p in zip(e.weights, e.povms):
        acc += w * view_operator(p).matrix
    return ViewOperator(e.d, acc)


def total_view(povms) -> ViewOperator:
    """Unweighted sum of view operators (all POVMs must share a dimension)."""
    povms = list(povms)
    if not povms:
        raise ValidationError("total_view needs at least one POVM")
    d = povms[0].d
    for idx, p in enumerate(povms):
        if p.d != d:
            raise ValidationError(f"povm {idx} has dimension {p.d}, expected {d}")
    acc = np.zeros((d * d, d * d), dtype=complex)
    for p in povms:
        acc += view_operator(p).matrix
    return ViewOperator(d, acc)


def operator_norm(v: ViewOperator) -> float:
    """Largest eigenvalue (the operator is PSD, so this is the norm)."""
    vals, _ = hermitian_eigs(v.matrix)
    return max(float(vals[0]), 0.0)


def overlap_matrix(povms) -> np.ndarray:
    """Hilbert-Schmidt overlaps ``Tr(M_{i|t} M_{j|t'})`` of all effects.

    Rows/columns run over ``(measurement, outcome)`` pairs in order; the
    result is symmetric and PSD (it is a Gram matrix).
    """
    povms = list(povms)
    if not povms:
        raise ValidationError("overlap_matrix needs at least one POVM")
    d = povms[0].d
    rows = []
    for idx, p in enumerate(povms):
        if p.d != d:
            raise ValidationError(f"povm {idx} has dimension {p.d}, expected {d}")
        rows.extend(e.reshape(d * d) for e in p.effects)
    stack = np.array(rows)
    return (stack @ stack.conj().T).real


def view_report(e: WeightedEnsemble) -> ViewReport:
    """Norms, spectra and total exclusivity for a weighted ensemble."""
    g_avg = average_view(e)
    g_tot = total_view(e.povms)
    avg_spec, _ = hermitian_eigs(g_avg.matrix)
    tot_spec, _ = hermitian_eigs(g_tot.matrix)
    g_avg_norm = max(float(avg_spec[0]), 0.0)
    g_tot_norm = max(float(tot_spec[0]), 0.0)
    return ViewReport(
        g_avg_norm=g_avg_norm,
        g_tot_norm=g_tot_norm,
        exclusivity=e.n_measurements - g_tot_norm,
        g_avg_spectrum=avg_spec,
        g_tot_spectrum=tot_spec,
    )
