"""Entropic steering detection and measurement-incompatibility estimation.

The criterion compares Bob's weighted conditional Renyi entropy against the
state-independent uncertainty bound of his measurement set: a conditional
entropy below the bound certifies steering from Alice to Bob.

For the white-noise scans the two-qubit maximally entangled state is shared
and each observable is measured on both sides, one side through a depolarised
copy.  The uncertainty bound on the right-hand side is always evaluated for
the CLEAN measurement set while the noise enters only through the correlated
joint distribution; placing the noise on Bob's side *and* degrading the bound
with it would make the test trivially violated for every positive visibility.
For the maximally entangled state the joint distribution itself is identical
whichever side holds the noise, so only the bound assignment matters; the
literal alternative (bound evaluated on the noisy set) remains available via
``noisy_rhs=True`` for comparison.

Threshold searches at distinct family points are independent and can run in
parallel; each search is a sequential bisection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .bounds import bound_q_alpha, bound_q_one
from .ensembles import add_white_noise
from .qmat import (
    DensityState,
    DiagnosticError,
    Povm,
    ValidationError,
    WeightedEnsemble,
    _as_weights,
)

__all__ = [
    "BipartiteState",
    "SteeringScenario",
    "SteeringResult",
    "maximally_entangled_qubits",
    "joint_distribution",
    "conditional_renyi",
    "evaluate_criterion",
    "noise_threshold",
    "optimize_weights",
]

VIOLATION_MARGIN = 1e-12
_MIN_WEIGHT = 1e-4


@dataclass(frozen=True, eq=False)
class BipartiteState:
    """Joint state on ``H_{d_a} (x) H_{d_b}`` with A-then-B factor ordering."""

    d_a: int
    d_b: int
    state: DensityState

    def __post_init__(self):
        if self.d_a < 1 or self.d_b < 1:
            raise ValidationError("subsystem dimensions must be positive")
        if self.state.d != self.d_a * self.d_b:
            raise ValidationError(
                f"joint dimension {self.state.d} != {self.d_a} * {self.d_b}"
            )


def maximally_entangled_qubits() -> BipartiteState:
    """The two-qubit state ``(|00> - |11>)/sqrt(2)`` as a density matrix."""
    v = np.zeros(4, dtype=complex)
    v[0] = 1.0 / math.sqrt(2.0)
    v[3] = -1.0 / math.sqrt(2.0)
    return BipartiteState(2, 2, DensityState.from_pure(v))


def joint_distribution(s: BipartiteState, a_povm: Povm, b_povm: Povm) -> np.ndarray:
    """Outcome table ``p(a, b) = Re Tr[(A_a (x) B_b) rho]``."""
    if a_povm.d != s.d_a:
        raise ValidationError(f"Alice POVM dimension {a_povm.d} != {s.d_a}")
    if b_povm.d != s.d_b:
        raise ValidationError(f"Bob POVM dimension {b_povm.d} != {s.d_b}")
    rho = s.state.matrix
    p = np.empty((a_povm.n_outcomes, b_povm.n_outcomes))
    for a, ea in enumerate(a_povm.effects):
        for b, eb in enumerate(b_povm.effects):
            p[a, b] = np.einsum("ij,ji->", np.kron(ea, eb), rho).real
    if p.min() < -1e-10:
        raise ValidationError(f"joint probability {p.min():.3e} below tolerance")
    p = np.clip(p, 0.0, None)
    return p / p.sum()


def conditional_renyi(p_joint, alpha: float) -> float:
    """Conditional Renyi entropy of the column variable given the row variable.

    ``(alpha/(1-alpha)) log2 sum_a p(a) ||p(.|a)||_alpha`` with the Shannon
    conditional entropy at ``alpha = 1`` and ``-log2 sum_a max_b p(a, b)`` at
    infinite order.  Rows with zero marginal contribute nothing.
    """
    if not alpha > 0.0:
        raise ValidationError(f"Renyi order must be positive, got {alpha!r}")
    p = np.asarray(p_joint, dtype=float)
    if p.ndim != 2 or p.min() < -1e-12:
        raise ValidationError("joint distribution must be a nonnegative 2-d table")
    p = np.clip(p, 0.0, None)
    marg = p.sum(axis=1)
    if math.isinf(alpha):
        return -math.log2(float(p.max(axis=1).sum()))
    if alpha == 1.0:
        total = 0.0
        for pa, row in zip(marg, p):
            if pa <= 0.0:
                continue
            cond = row / pa
            nz = cond[cond > 0.0]
            total += pa * float(-np.sum(nz * np.log2(nz)))
        return total
    acc = 0.0
    for pa, row in zip(marg, p):
        if pa <= 0.0:
            continue
        cond = row / pa
        acc += pa * float(np.sum(cond**alpha)) ** (1.0 / alpha)
    return (alpha / (1.0 - alpha)) * math.log2(acc)


@dataclass(frozen=True, eq=False)
class SteeringScenario:
    """Shared state, per-round measurement pairs, weights and Renyi order."""

    state: BipartiteState
    alice_povms: tuple
    bob_povms: tuple
    weights: np.ndarray
    alpha: float

    def __post_init__(self):
        alice = tuple(self.alice_povms)
        bob = tuple(self.bob_povms)
        if not alice or len(alice) != len(bob):
            raise ValidationError("need matching, nonempty measurement lists")
        for idx, p in enumerate(alice):
            if p.d != self.state.d_a:
                raise ValidationError(f"Alice povm {idx} dimension {p.d} != {self.state.d_a}")
        for idx, p in enumerate(bob):
            if p.d != self.state.d_b:
                raise ValidationError(f"Bob povm {idx} dimension {p.d} != {self.state.d_b}")
        if not (self.alpha == 1.0 or self.alpha >= 2.0 or math.isinf(self.alpha)):
            raise ValidationError("Renyi order must be 1, >= 2, or infinite")
        object.__setattr__(self, "alice_povms", alice)
        object.__setattr__(self, "bob_povms", bob)
        object.__setattr__(self, "weights", _as_weights(self.weights, len(alice)))


@dataclass(frozen=True)
class SteeringResult:
    lhs: float
    rhs: float
    violated: bool
    margin: float


def _bound_for(bob_povms, weights, alpha: float) -> float:
    ensemble = WeightedEnsemble(tuple(bob_povms), weights)
    i_com = 1.0 - 1.0 / ensemble.d
    if alpha == 1.0:
        return bound_q_one(ensemble, i_com)
    return bound_q_alpha(ensemble, i_com, alpha)


def evaluate_criterion(sc: SteeringScenario) -> SteeringResult:
    """Weighted conditional entropy vs the state-independent bound.

    A left-hand side below the bound (beyond a 1e-12 margin) certifies that
    the state is steerable from Alice to Bob.
    """
    rhs = _bound_for(sc.bob_povms, sc.weights, sc.alpha)
    lhs = 0.0
    for w, pa, pb in zip(sc.weights, sc.alice_povms, sc.bob_povms):
        lhs += w * conditional_renyi(joint_distribution(sc.state, pa, pb), sc.alpha)
    margin = lhs - rhs
    return SteeringResult(lhs=lhs, rhs=rhs, violated=margin < -VIOLATION_MARGIN, margin=margin)


def _scan_lhs(bases, weights, alpha: float, eta: float, noisy_rhs: bool) -> SteeringResult:
    state = maximally_entangled_qubits()
    noisy = tuple(add_white_noise(b, eta) for b in bases)
    if noisy_rhs:
        alice, bob = tuple(bases), noisy
    else:
        alice, bob = noisy, tuple(bases)
    sc = SteeringScenario(state=state, alice_povms=alice, bob_povms=bob, weights=weights, alpha=alpha)
    return evaluate_criterion(sc)


def noise_threshold(
    bases,
    weights,
    alpha: float = math.inf,
    tol: float = 1e-4,
    noisy_rhs: bool = False,
    monotone_grid: int = 50,
):
    """Smallest visibility at which the noisy scenario violates the criterion.

    Bisects the violation predicate over ``eta`` in [0, 1] for the maximally
    entangled two-qubit state, measuring each basis on both sides with the
    noise on the side whose uncertainty bound is not used.  Returns ``None``
    when even ``eta = 1`` does not violate (compatible measurements).

    ``monotone_grid`` points of the left-hand side are checked for
    monotonicity before bisecting (0 disables the check).
    """
    bases = tuple(bases)
    if not (0.0 < tol <= 1e-4):
        raise ValidationError(f"tolerance {tol!r} outside (0, 1e-4]")
    for idx, b in enumerate(bases):
        if b.d != 2:
            raise ValidationError(f"basis {idx} is not a qubit measurement")
    weights = _as_weights(weights, len(bases))

    def result_at(eta: float) -> SteeringResult:
        return _scan_lhs(bases, weights, alpha, eta, noisy_rhs)

    if result_at(0.0).violated:
        raise DiagnosticError("criterion already violated at zero visibility")
    if not result_at(1.0).violated:
        return None

    if monotone_grid:
        lhs_vals = [result_at(eta).lhs for eta in np.linspace(0.0, 1.0, monotone_grid)]
        if np.any(np.diff(lhs_vals) > 1e-9):
            raise DiagnosticError("conditional entropy is not monotone in the visibility")

    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if result_at(mid).violated:
            hi = mid
        else:
            lo = mid
    return hi


def _simplex_from_logits(x: np.ndarray, count: int) -> np.ndarray:
    logits = np.concatenate([x, [0.0]])
    logits -= logits.max()
    w = np.exp(logits)
    w /= w.sum()
    w = np.clip(w, _MIN_WEIGHT, None)
    return w / w.sum()


def optimize_weights(
    bases,
    alpha: float = math.inf,
    restarts: int = 32,
    tol: float = 1e-4,
    seed: int = 0,
):
    """Minimise the noise threshold over the open weight simplex.

    Multi-start Nelder-Mead on an interior (softmax) parameterisation with
    weights clipped at 1e-4; the equal-weight point is always evaluated, so
    the returned threshold never exceeds the equal-weight one.  Returns
    ``(weights, threshold)`` with ``threshold = None`` when no weighting
    violates at unit visibility.
    """
    bases = tuple(bases)
    if restarts < 1:
        raise ValidationError("need at least one restart")
    count = len(bases)
    if count < 2:
        raise ValidationError("need at least two measurements to weight")

    best = {"obj": math.inf, "w": np.full(count, 1.0 / count), "eta": None}

    def objective(x: np.ndarray) -> float:
        w = _simplex_from_logits(x, count)
        eta = noise_threshold(bases, w, alpha=alpha, tol=tol, monotone_grid=0)
        obj = 2.0 if eta is None else eta
        if obj < best["obj"]:
            best.update(obj=obj, w=w, eta=eta)
        return obj

    objective(np.zeros(count - 1))
    rng = np.random.default_rng(seed)
    for _ in range(restarts):
        x0 = rng.normal(0.0, 1.5, count - 1)
        minimize(
            objective,
            x0,
            method="Nelder-Mead",
            options={"xatol": 1e-3, "fatol": tol / 10.0, "maxiter": 200},
        )
    return best["w"], best["eta"]
