"""Complex-matrix foundation: quantum states, POVMs and weighted ensembles.

Matrices are plain complex ``numpy`` arrays in row-major order.  The domain
objects (:class:`DensityState`, :class:`Povm`, :class:`WeightedEnsemble`) are
immutable after validated construction, so everything downstream can operate
on shared instances concurrently.  All entropies in this package are base 2.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

__all__ = [
    "ValidationError",
    "DiagnosticError",
    "DensityState",
    "Povm",
    "WeightedEnsemble",
    "EnsembleDiagnostics",
    "hermitian_eigs",
    "born_probabilities",
    "invariant_information",
    "von_neumann_entropy",
    "validate_ensemble",
    "PAULI_X",
    "PAULI_Y",
    "PAULI_Z",
]

# Tolerances sized so that double-precision constructions of mutually
# unbiased bases up to d = 7 validate cleanly without hiding real defects.
HERMITICITY_TOL = 1e-10
PSD_TOL = 1e-10
TRACE_TOL = 1e-10
COMPLETENESS_TOL = 1e-9
EQUAL_TRACE_TOL = 1e-9
WEIGHT_SUM_TOL = 1e-12
PROB_CLAMP_TOL = 1e-10
PROJECTOR_TOL = 1e-8

PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
PAULI_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
PAULI_X.setflags(write=False)
PAULI_Y.setflags(write=False)
PAULI_Z.setflags(write=False)


class ValidationError(ValueError):
    """An input violates a construction invariant or a precondition."""


class DiagnosticError(RuntimeError):
    """A numerical routine detected an internal inconsistency."""


def as_complex_matrix(m) -> np.ndarray:
    """Copy ``m`` into a finite 2-d complex array."""
    arr = np.array(m, dtype=complex, copy=True)
    if arr.ndim != 2:
        raise ValidationError(f"expected a 2-d matrix, got shape {arr.shape}")
    if not (np.all(np.isfinite(arr.real)) and np.all(np.isfinite(arr.imag))):
        raise ValidationError("matrix entries must be finite")
    return arr


def hermiticity_defect(m: np.ndarray) -> float:
    """Entrywise max of ``|m - m†|``."""
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


def min_eigenvalue(m: np.ndarray) -> float:
    """Smallest eigenvalue of the Hermitian part of ``m``."""
    return float(np.linalg.eigvalsh((m + m.conj().T) / 2.0).min())


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


def _as_weights(weights, count: int) -> np.ndarray:
    w = np.array(weights, dtype=float, copy=True).ravel()
    if w.size != count:
        raise ValidationError(f"expected {count} weights, got {w.size}")
    if not np.all(np.isfinite(w)):
        raise ValidationError("weights must be finite")
    if np.any(w <= 0.0):
        raise ValidationError("all weights must be strictly positive")
    if abs(w.sum() - 1.0) > WEIGHT_SUM_TOL:
        raise ValidationError(f"weights must sum to 1 (got {w.sum()!r})")
    return _frozen(w)


@dataclass(frozen=True, eq=False)
class DensityState:
    """Hermitian, positive semi-definite, unit-trace matrix."""

    matrix: np.ndarray

    def __post_init__(self):
        m = as_complex_matrix(self.matrix)
        if m.shape[0] != m.shape[1]:
            raise ValidationError(f"state matrix must be square, got {m.shape}")
        defect = hermiticity_defect(m)
        if defect > HERMITICITY_TOL:
            raise ValidationError(f"state is not Hermitian (defect {defect:.3e})")
        tr = complex(np.trace(m))
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValidationError(f"state trace must be 1 (got {tr!r})")
        lam_min = min_eigenvalue(m)
        if lam_min < -PSD_TOL:
            raise ValidationError(f"state has negative eigenvalue {lam_min:.3e}")
        object.__setattr__(self, "matrix", _frozen(m))

    @property
    def d(self) -> int:
        return self.matrix.shape[0]

    def purity(self) -> float:
        """Tr(rho^2)."""
        return float(np.einsum("ij,ji->", self.matrix, self.matrix).real)

    @classmethod
    def from_pure(cls, vector) -> "DensityState":
        """Projector onto the (normalised) state vector."""
        v = np.asarray(vector, dtype=complex).ravel()
        norm = np.linalg.norm(v)
        if norm < 1e-12:
            raise ValidationError("state vector must be nonzero")
        v = v / norm
        return cls(np.outer(v, v.conj()))

    @classmethod
    def maximally_mixed(cls, d: int) -> "DensityState":
        return cls(np.eye(d, dtype=complex) / d)


@dataclass(frozen=True, eq=False)
class Povm:
    """Generalized measurement: PSD effects summing to the identity.

    ``ete`` records whether all effects carry equal trace, the precondition
    for reducing the information-gain inequality to an index-of-coincidence
    bound.  Rank-1 projective measurements always qualify.
    """

    effects: tuple
    ete: bool = field(init=False)

    def __post_init__(self):
        effs = tuple(as_complex_matrix(e) for e in self.effects)
        if not effs:
            raise ValidationError("a POVM needs at least one effect")
        d = effs[0].shape[0]
        for idx, e in enumerate(effs):
            if e.shape != (d, d):
                raise ValidationError(f"effect {idx} has shape {e.shape}, expected {(d, d)}")
            defect = hermiticity_defect(e)
            if defect > HERMITICITY_TOL:
                raise ValidationError(f"effect {idx} is not Hermitian (defect {defect:.3e})")
            lam_min = min_eigenvalue(e)
            if lam_min < -PSD_TOL:
                raise ValidationError(f"effect {idx} has negative eigenvalue {lam_min:.3e}")
        total = sum(effs) - np.eye(d)
        defect = float(np.max(np.abs(total)))
        if defect > COMPLETENESS_TOL:
            raise ValidationError(f"effects do not sum to identity (defect {defect:.3e})")
        traces = np.array([np.trace(e).real for e in effs])
        object.__setattr__(self, "effects", tuple(_frozen(e) for e in effs))
        object.__setattr__(self, "ete", bool(traces.max() - traces.min() < EQUAL_TRACE_TOL))

    @property
    def d(self) -> int:
        return self.effects[0].shape[0]

    @property
    def n_outcomes(self) -> int:
        return len(self.effects)

    def is_rank_one_projective(self) -> bool:
        """True iff the POVM is an orthonormal-basis measurement."""
        if self.n_outcomes != self.d:
            return False
        for e in self.effects:
            if abs(np.trace(e).real - 1.0) > PROJECTOR_TOL:
                return False
            if float(np.max(np.abs(e @ e - e))) > PROJECTOR_TOL:
                return False
        return True


@dataclass(frozen=True, eq=False)
class WeightedEnsemble:
    """POVMs with strictly positive selection probabilities summing to 1."""

    povms: tuple
    weights: np.ndarray

    def __post_init__(self):
        povms = tuple(self.povms)
        if not povms:
            raise ValidationError("an ensemble needs at least one POVM")
        for idx, p in enumerate(povms):
            if not isinstance(p, Povm):
                raise ValidationError(f"ensemble member {idx} is not a Povm")
        d = povms[0].d
        l = povms[0].n_outcomes
        for idx, p in enumerate(povms):
            if p.d != d:
                raise ValidationError(f"povm {idx} has dimension {p.d}, expected {d}")
            if p.n_outcomes != l:
                raise ValidationError(f"povm {idx} has {p.n_outcomes} outcomes, expected {l}")
        object.__setattr__(self, "povms", povms)
        object.__setattr__(self, "weights", _as_weights(self.weights, len(povms)))

    @classmethod
    def equal_weights(cls, povms) -> "WeightedEnsemble":
        povms = tuple(povms)
        return cls(povms, np.full(len(povms), 1.0 / len(povms)))

    @property
    def d(self) -> int:
        return self.povms[0].d

    @property
    def n_outcomes(self) -> int:
        return self.povms[0].n_outcomes

    @property
    def n_measurements(self) -> int:
        return len(self.povms)

    @property
    def all_ete(self) -> bool:
        return all(p.ete for p in self.povms)


def hermitian_eigs(m) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix, eigenvalues descending.

    Returns ``(values, vectors)`` with orthonormal eigenvectors in the
    columns of ``vectors``, ordered to match ``values``.
    """
    arr = as_complex_matrix(m)
    if arr.shape[0] != arr.shape[1]:
        raise ValidationError(f"matrix must be square, got {arr.shape}")
    defect = hermiticity_defect(arr)
    if defect > HERMITICITY_TOL:
        raise ValidationError(f"matrix is not Hermitian (defect {defect:.3e})")
    vals, vecs = np.linalg.eigh(arr)
    return vals[::-1].copy(), vecs[:, ::-1].copy()


def born_probabilities(m: Povm, s: DensityState) -> np.ndarray:
    """Outcome distribution ``p_i = Re Tr(M_i rho)``.

    Probabilities within ``-1e-10`` of zero are clamped to zero and the
    vector is renormalised; larger negatives indicate invalid inputs.
    """
    if m.d != s.d:
        raise ValidationError(f"dimension mismatch: POVM is {m.d}, state is {s.d}")
    p = np.array([np.einsum("ij,ji->", e, s.matrix).real for e in m.effects])
    if p.min() < -PROB_CLAMP_TOL:
        raise ValidationError(f"probability {p.min():.3e} below clamping tolerance")
    p = np.clip(p, 0.0, None)
    return p / p.sum()


def invariant_information(s: DensityState) -> float:
    """Tr(rho^2) - 1/d, in [0, 1 - 1/d]."""
    return s.purity() - 1.0 / s.d


def von_neumann_entropy(s: DensityState) -> float:
    """Spectral Shannon entropy of the state, in bits."""
    lam = np.clip(np.linalg.eigvalsh(s.matrix), 0.0, None)
    lam = lam[lam > 0.0]
    return float(-np.sum(lam * np.log2(lam)))


@dataclass
class EnsembleDiagnostics:
    """Structured validation outcome: one entry per invariant violation."""

    problems: list
    ete_flags: list

    @property
    def ok(self) -> bool:
        return not self.problems

    def to_dict(self) -> dict:
        return {"valid": self.ok, "problems": list(self.problems), "ete": list(self.ete_flags)}


def validate_ensemble(povms, weights=None) -> EnsembleDiagnostics:
    """Check ensemble invariants without aborting on the first failure.

    ``povms`` may be a :class:`WeightedEnsemble` or a raw list of lists of
    matrices (with ``weights`` given separately), so unvalidated data, e.g.
    parsed from a scenario file, can be diagnosed before construction.
    """
    if isinstance(povms, WeightedEnsemble):
        weights = povms.weights
        povms = [[np.asarray(e) for e in p.effects] for p in povms.povms]

    problems: list[str] = []
    ete_flags: list[bool] = []
    shapes: list[tuple[int, int]] = []

    for pi, effects in enumerate(povms):
        mats = []
        bad = False
        for ei, raw in enumerate(effects):
            try:
                e = as_complex_matrix(raw)
            except ValidationError as exc:
                problems.append(f"povm {pi} effect {ei}: {exc}")
                bad = True
                continue
            if e.shape[0] != e.shape[1]:
                problems.append(f"povm {pi} effect {ei}: not square {e.shape}")
                bad = True
                continue
            defect = hermiticity_defect(e)
            if defect > HERMITICITY_TOL:
                problems.append(f"povm {pi} effect {ei}: not Hermitian (defect {defect:.3e})")
            lam = min_eigenvalue(e)
            if lam < -PSD_TOL:
                problems.append(f"povm {pi} effect {ei}: negative eigenvalue {lam:.3e}")
            mats.append(e)
        if bad or not mats:
            ete_flags.append(False)
            if not mats:
                problems.append(f"povm {pi}: no usable effects")
            continue
        dims = {m.shape[0] for m in mats}
        if len(dims) != 1:
            problems.append(f"povm {pi}: mixed effect dimensions {sorted(dims)}")
            ete_flags.append(False)
            continue
        d = mats[0].shape[0]
        shapes.append((d, len(mats)))
        defect = float(np.max(np.abs(sum(mats) - np.eye(d))))
        if defect > COMPLETENESS_TOL:
            problems.append(f"povm {pi}: effects do not sum to identity (defect {defect:.3e})")
        traces = np.array([np.trace(m).real for m in mats])
        ete_flags.append(bool(traces.max() - traces.min() < EQUAL_TRACE_TOL))

    if len({s[0] for s in shapes}) > 1:
        problems.append(f"povms disagree on dimension: {sorted({s[0] for s in shapes})}")
    if len({s[1] for s in shapes}) > 1:
        problems.append(f"povms disagree on outcome count: {sorted({s[1] for s in shapes})}")

    if weights is not None:
        w = np.asarray(weights, dtype=float).ravel()
        if w.size != len(list(povms)):
            problems.append(f"expected {len(list(povms))} weights, got {w.size}")
        if np.any(w <= 0.0):
            for idx in np.flatnonzero(w <= 0.0):
                problems.append(f"weight {idx}: must be strictly positive (got {w[idx]!r})")
        if w.size and abs(w.sum() - 1.0) > WEIGHT_SUM_TOL:
            problems.append(f"weights sum to {w.sum()!r}, expected 1")

    return EnsembleDiagnostics(problems=problems, ete_flags=ete_flags)
