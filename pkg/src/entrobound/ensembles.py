"""Constructors for the measurement families used throughout the package.

All constructors are pure given their parameters (and seed, where one
exists) and return validated ensembles with equal weights.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.linalg import schur

from .qmat import (
    PAULI_X,
    PAULI_Y,
    PAULI_Z,
    Povm,
    ValidationError,
    WeightedEnsemble,
)

__all__ = [
    "projective_basis",
    "observable_basis",
    "pauli_triple",
    "qubit_family",
    "mub_family",
    "qutrit_four_bases",
    "haar_random_bases",
    "add_white_noise",
]


def projective_basis(columns) -> Povm:
    """Rank-1 projective measurement onto the columns of a unitary."""
    u = np.asarray(columns, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ValidationError(f"expected a square matrix of basis columns, got {u.shape}")
    return Povm(tuple(np.outer(u[:, i], u[:, i].conj()) for i in range(u.shape[1])))


def observable_basis(bloch) -> Povm:
    """Eigenbasis of the qubit observable with the given Bloch direction."""
    n = np.asarray(bloch, dtype=float).ravel()
    if n.shape != (3,):
        raise ValidationError("Bloch direction must have three components")
    norm = np.linalg.norm(n)
    if norm < 1e-12:
        raise ValidationError("Bloch direction must be nonzero")
    n = n / norm
    sigma = n[0] * PAULI_X + n[1] * PAULI_Y + n[2] * PAULI_Z
    eye = np.eye(2, dtype=complex)
    return Povm(((eye + sigma) / 2.0, (eye - sigma) / 2.0))


def pauli_triple() -> WeightedEnsemble:
    """Eigenbases of sigma_x, sigma_y, sigma_z with equal weights."""
    return qubit_family(0.0, 0.0)


def qubit_family(beta1: float, beta2: float) -> WeightedEnsemble:
    """Eigenbases of the tilted triple used in the steering scans.

    Observables: ``cos(b1) X + sin(b1) Z``, ``cos(b2) Y + sin(b2) Z`` and
    ``Z``.  The documented branch ranges are ``b1 = 0, 0 <= b2 < pi/2`` or
    ``b2 = pi/2, 0 < b1 <= pi/2``; other real angles are accepted as-is.
    """
    return WeightedEnsemble.equal_weights(
        [
            observable_basis((math.cos(beta1), 0.0, math.sin(beta1))),
            observable_basis((0.0, math.cos(beta2), math.sin(beta2))),
            observable_basis((0.0, 0.0, 1.0)),
        ]
    )


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    for q in range(2, int(math.isqrt(n)) + 1):
        if n % q == 0:
            return False
    return True


def mub_family(d: int, count: int) -> WeightedEnsemble:
    """``count`` mutually unbiased bases of a prime-dimensional space.

    All cross overlaps satisfy ``|<i|j>|^2 = 1/d``.  For odd prime ``d`` the
    bases are the computational basis plus the quadratic-phase Fourier family
    with columns ``w^(a j^2 + b j) / sqrt(d)``; for ``d = 2`` they are the
    Pauli eigenbases.  A full set has ``d + 1`` members.
    """
    if not _is_prime(d):
        raise ValidationError(f"dimension {d} is not prime")
    if not (2 <= count <= d + 1):
        raise ValidationError(f"count must be in [2, {d + 1}], got {count}")
    if d == 2:
        s = 1.0 / math.sqrt(2.0)
        candidates = [
            np.eye(2, dtype=complex),
            np.array([[s, s], [s, -s]], dtype=complex),
            np.array([[s, s], [1j * s, -1j * s]], dtype=complex),
        ]
    else:
        omega = np.exp(2j * np.pi / d)
        j = np.arange(d)
        candidates = [np.eye(d, dtype=complex)]
        for a in range(d):
            exponent = (a * j * j)[:, None] + np.outer(j, j)
            candidates.append(omega ** exponent / math.sqrt(d))
    return WeightedEnsemble.equal_weights(
        [projective_basis(u) for u in candidates[:count]]
    )


def _unitary_fractional_power(u: np.ndarray, t: float) -> np.ndarray:
    """``u**t`` with eigenphases taken in the principal branch ``(-pi, pi]``."""
    tri, q = schur(np.asarray(u, dtype=complex), output="complex")
    phases = np.angle(np.diag(tri))
    return (q * np.exp(1j * t * phases)) @ q.conj().T


_QUTRIT_TWISTS = {
    # Diagonal twist with eigenvalues {1, w, w}: equals diag(w^(j^2)), the
    # quadratic phase that makes the beta = pi/4 endpoint mutually unbiased.
    "printed": np.diag([1.0, np.exp(2j * np.pi / 3), np.exp(2j * np.pi / 3)]),
    # Alternative with distinct eigenvalues {1, w, w^2}; kept selectable for
    # comparison, but it merely permutes the Fourier basis columns at the
    # endpoint, so the four bases do NOT become mutually unbiased.
    "distinct": np.diag([1.0, np.exp(2j * np.pi / 3), np.exp(4j * np.pi / 3)]),
}


def qutrit_four_bases(beta: float, variant: str = "printed") -> WeightedEnsemble:
    """Computational basis plus three twisted fractional-Fourier bases.

    The three extra bases are the columns of ``E^k F^(4 beta / pi)`` for
    ``k = 0, 1, 2`` with ``F`` the 3x3 discrete Fourier transform and ``E`` a
    diagonal twist.  At ``beta = 0`` all four collapse to the computational
    basis; at ``beta = pi/4`` (with the default twist) they form four
    mutually unbiased bases.
    """
    if not (-1e-12 <= beta <= math.pi / 4 + 1e-12):
        raise ValidationError(f"beta {beta!r} outside [0, pi/4]")
    if variant not in _QUTRIT_TWISTS:
        raise ValidationError(f"unknown twist variant {variant!r}")
    twist = _QUTRIT_TWISTS[variant]
    j = np.arange(3)
    fourier = np.exp(2j * np.pi * np.outer(j, j) / 3) / math.sqrt(3.0)
    ft = _unitary_fractional_power(fourier, 4.0 * beta / math.pi)
    bases = [np.eye(3, dtype=complex), ft, twist @ ft, twist @ twist @ ft]
    return WeightedEnsemble.equal_weights([projective_basis(u) for u in bases])


def haar_random_bases(d: int, count: int, seed) -> WeightedEnsemble:
    """Haar-distributed orthonormal bases, fully determined by the seed.

    QR of a complex Ginibre matrix with the R-diagonal phases folded back in,
    so the column distribution is exactly Haar.
    """
    if d < 2:
        raise ValidationError("dimension must be at least 2")
    if count < 1:
        raise ValidationError("count must be at least 1")
    rng = np.random.default_rng(seed)
    povms = []
    for _ in range(count):
        z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / math.sqrt(2.0)
        q, r = np.linalg.qr(z)
        diag = np.diag(r)
        q = q * (diag / np.abs(diag))
        povms.append(projective_basis(q))
    return WeightedEnsemble.equal_weights(povms)


def add_white_noise(m: Povm, eta: float) -> Povm:
    """Mix every effect with its trace-matched share of the identity.

    Each effect becomes ``eta M_i + (1 - eta) Tr(M_i)/d * 1``; for rank-1
    projective measurements this is the usual ``eta P_i + (1 - eta) 1/d``.
    Completeness is preserved, and the view operator scales by ``eta^2``.
    """
    if not (0.0 <= eta <= 1.0):
        raise ValidationError(f"visibility {eta!r} outside [0, 1]")
    d = m.d
    eye = np.eye(d, dtype=complex)
    return Povm(
        tuple(eta * e + (1.0 - eta) * (np.trace(e).real / d) * eye for e in m.effects)
    )
