"""Uncertainty lower bounds for weighted measurement ensembles.

The central quantity is the weighted index of coincidence of the outcome
distributions, which is capped by ``1/l + |g| * I`` with ``|g|`` the norm of
the weighted average view operator and ``I = Tr(rho^2) - 1/d`` the invariant
information of the state.  Feeding that cap into the entropy floors of
:mod:`entrobound.entropy` yields bounds on weighted Renyi and Shannon entropy
sums.  Competitor bounds built from pairwise basis overlaps and numerically
optimal bounds (minimisation over pure states) are provided for comparison.

State dependence enters only through ``i_com`` (and ``s_rho`` where noted);
passing ``i_com = 1 - 1/d`` and ``s_rho = 0`` gives the state-independent
forms, which are valid for every state because the bounds are nonincreasing
in ``i_com``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.optimize import minimize

from .entropy import (
    INTEGER_SNAP_TOL,
    _snap,
    _xlog2,
    binary_entropy,
    q_alpha_estimate,
    q_one_estimate,
    renyi_entropy,
)
from .qmat import (
    DensityState,
    DiagnosticError,
    Povm,
    ValidationError,
    WeightedEnsemble,
    born_probabilities,
    invariant_information,
    von_neumann_entropy,
)
from .viewop import average_view, operator_norm, total_view, view_report

__all__ = [
    "weighted_information_gain",
    "weighted_ic",
    "bound_q_alpha",
    "bound_q_one",
    "bound_q_s",
    "bound_q_s_qubit",
    "bound_q_mu",
    "bound_q_lmf",
    "bound_q_lmf_best",
    "bound_q_scb",
    "numerical_optimal_bound",
    "OptimalBound",
    "BoundReport",
    "compile_bound_report",
]

_ROOT_SLACK = 1e-9


def _require_ete(povms) -> None:
    for idx, p in enumerate(povms):
        if not p.ete:
            raise ValidationError(f"povm {idx} does not have equal-trace effects")


def _require_rank_one(povms) -> None:
    for idx, p in enumerate(povms):
        if not p.is_rank_one_projective():
            raise ValidationError(f"povm {idx} is not a rank-1 projective measurement")


def _check_i_com(i_com: float, d: int) -> float:
    hi = 1.0 - 1.0 / d
    if not (-1e-12 <= i_com <= hi + 1e-9):
        raise ValidationError(f"invariant information {i_com!r} outside [0, {hi}]")
    return min(max(float(i_com), 0.0), hi)


def weighted_information_gain(e: WeightedEnsemble, s: DensityState) -> float:
    """Weighted squared deviation of the outcome statistics from flatness.

    ``sum_{i,t} w_t (p_{i|t} - Tr(M_{i|t})/d)^2``; never exceeds
    ``|g| * I_com(rho)``.
    """
    if e.d != s.d:
        raise ValidationError(f"dimension mismatch: ensemble is {e.d}, state is {s.d}")
    total = 0.0
    for w, p in zip(e.weights, e.povms):
        probs = born_probabilities(p, s)
        flat = np.array([np.trace(eff).real / e.d for eff in p.effects])
        total += w * float(np.sum((probs - flat) ** 2))
    return total


def weighted_ic(e: WeightedEnsemble, s: DensityState) -> float:
    """Weighted index of coincidence ``sum_{i,t} w_t p_{i|t}^2``.

    Requires equal-trace effects, which make flat statistics equal ``1/l``
    and cap this quantity at ``1/l + |g| * I_com(rho)``.
    """
    if e.d != s.d:
        raise ValidationError(f"dimension mismatch: ensemble is {e.d}, state is {s.d}")
    _require_ete(e.povms)
    total = 0.0
    for w, p in zip(e.weights, e.povms):
        probs = born_probabilities(p, s)
        total += w * float(probs @ probs)
    return total


def _ic_cap(e: WeightedEnsemble, i_com: float) -> float:
    """``1/l + |g| * i_com`` clamped into the valid coincidence range."""
    cap = 1.0 / e.n_outcomes + operator_norm(average_view(e)) * i_com
    return min(cap, 1.0)


def bound_q_alpha(e: WeightedEnsemble, i_com: float, alpha: float) -> float:
    """Lower bound on the weighted Renyi entropy average, order >= 2."""
    _require_ete(e.povms)
    i_com = _check_i_com(i_com, e.d)
    return q_alpha_estimate(e.n_outcomes, _ic_cap(e, i_com), alpha)


def bound_q_one(e: WeightedEnsemble, i_com: float) -> float:
    """Lower bound on the weighted Shannon entropy average."""
    _require_ete(e.povms)
    i_com = _check_i_com(i_com, e.d)
    return q_one_estimate(_ic_cap(e, i_com))


def bound_q_s(povms, i_com: float) -> float:
    """Lower bound on the unweighted sum of Shannon entropies.

    Uses the total view operator norm to cap the average coincidence at
    ``cbar = 1/l + |G_tot| * i_com / theta`` and then evaluates the optimal
    multi-distribution floor: with ``n = ceil(1/cbar)`` and
    ``k = floor(n (n-1) (cbar - 1/n) theta)``, the remainder distribution has
    ``n - 1`` entries ``(1-p)/(n-1)`` and one entry ``p``, where ``p`` is the
    root in ``[0, 1/n]`` of the quadratic matching its coincidence.
    """
    povms = list(povms)
    if len(povms) < 2:
        raise ValidationError("need at least two POVMs for a sum bound")
    _require_ete(povms)
    theta = len(povms)
    l = povms[0].n_outcomes
    for idx, p in enumerate(povms):
        if p.n_outcomes != l:
            raise ValidationError(f"povm {idx} has {p.n_outcomes} outcomes, expected {l}")
    i_com = _check_i_com(i_com, povms[0].d)
    g_tot = operator_norm(total_view(povms))
    cbar = min(1.0 / l + g_tot * i_com / theta, 1.0)
    n = int(math.ceil(_snap(1.0 / cbar)))
    if n <= 1:
        return 0.0
    k = int(math.floor(_snap(n * (n - 1) * (cbar - 1.0 / n) * theta)))
    k = min(max(k, 0), theta - 1)
    c_rem = theta * cbar - (k / (n - 1) if k else 0.0) - (theta - k - 1) / n
    disc = 1.0 / n**2 - (1.0 - (n - 1) * c_rem) / n
    if disc < -_ROOT_SLACK:
        raise DiagnosticError(
            f"no real root for the remainder distribution (discriminant {disc:.3e})"
        )
    p = 1.0 / n - math.sqrt(max(disc, 0.0))
    if p < -_ROOT_SLACK or p > 1.0 / n + _ROOT_SLACK:
        raise DiagnosticError(f"remainder root {p!r} outside [0, 1/{n}]")
    p = min(max(p, 0.0), 1.0 / n)
    val = (theta - k - 1) * math.log2(n) - (1.0 - p) * math.log2((1.0 - p) / (n - 1)) - _xlog2(p)
    if k:
        val += k * math.log2(n - 1)
    return val


def bound_q_s_qubit(povms, i_com: float) -> float:
    """Closed form of :func:`bound_q_s` for rank-1 qubit bases."""
    povms = list(povms)
    if not povms or povms[0].d != 2:
        raise ValidationError("qubit closed form requires dimension-2 measurements")
    _require_rank_one(povms)
    theta = len(povms)
    i_com = _check_i_com(i_com, 2)
    x = _snap(2.0 * operator_norm(total_view(povms)) * i_com)
    k = int(math.floor(x))
    return binary_entropy(0.5 + 0.5 * math.sqrt(max(x - k, 0.0))) + theta - 1 - k


def _pair_overlaps(a: Povm, b: Povm) -> np.ndarray:
    """Effect overlaps ``Tr(A_i B_j)``, clipped into [0, 1]."""
    out = np.empty((a.n_outcomes, b.n_outcomes))
    for i, ea in enumerate(a.effects):
        for j, eb in enumerate(b.effects):
            out[i, j] = np.einsum("ij,ji->", ea, eb).real
    return np.clip(out, 0.0, 1.0)


def bound_q_mu(basis_a: Povm, basis_b: Povm) -> float:
    """Two-basis bound ``-log2 max_{i,j} |<i|j>|^2``."""
    _require_rank_one([basis_a, basis_b])
    if basis_a.d != basis_b.d:
        raise ValidationError("bases must share a dimension")
    return -math.log2(float(_pair_overlaps(basis_a, basis_b).max()))


def bound_q_lmf(bases, s_rho: float) -> float:
    """Chain-contraction bound ``-log2 b + (theta - 1) S(rho)``.

    ``b`` contracts the neighbouring overlap tables in the caller's basis
    order: start with the columnwise max of the first table, multiply through
    the chain, then take the max of the resulting vector.  The value depends
    on the ordering; see :func:`bound_q_lmf_best`.
    """
    bases = list(bases)
    if len(bases) < 2:
        raise ValidationError("need at least two bases")
    _require_rank_one(bases)
    v = _pair_overlaps(bases[0], bases[1]).max(axis=0)
    for idx in range(1, len(bases) - 1):
        v = v @ _pair_overlaps(bases[idx], bases[idx + 1])
    return -math.log2(float(v.max())) + (len(bases) - 1) * s_rho


def bound_q_lmf_best(bases, s_rho: float) -> float:
    """Max of :func:`bound_q_lmf` over basis orderings (enumerable sizes).

    A larger valid lower bound is still valid; enumeration is limited to
    5 bases (120 orderings), beyond which the caller's order is used.
    """
    bases = list(bases)
    if len(bases) > 5:
        return bound_q_lmf(bases, s_rho)
    return max(bound_q_lmf(list(perm), s_rho) for perm in itertools.permutations(bases))


def bound_q_scb(bases, s_rho: float) -> float:
    """Pairwise-overlap bound ``-(1/(theta-1)) sum log2 c_max + theta/2 S(rho)``."""
    bases = list(bases)
    if len(bases) < 2:
        raise ValidationError("need at least two bases")
    _require_rank_one(bases)
    theta = len(bases)
    total = 0.0
    for i, j in itertools.combinations(range(theta), 2):
        total -= math.log2(float(_pair_overlaps(bases[i], bases[j]).max()))
    return total / (theta - 1) + 0.5 * theta * s_rho


class OptimalBound(NamedTuple):
    value: float
    state: DensityState


def numerical_optimal_bound(
    e: WeightedEnsemble,
    alpha: float,
    restarts: int = 64,
    seed: int = 0,
) -> OptimalBound:
    """Numerically optimal weighted-average entropy bound.

    Minimises ``sum_t w_t H_alpha(M_t)`` over pure states by multi-start
    local descent on the real parameterisation of the unit sphere in C^d
    (gradients estimated numerically).  Weighted-average form; multiply by
    the number of measurements for equal-weight sum comparisons.
    Deterministic for a fixed seed.
    """
    if restarts < 1:
        raise ValidationError("need at least one restart")
    d = e.d
    effects = [list(p.effects) for p in e.povms]
    weights = e.weights

    def objective(x: np.ndarray) -> float:
        psi = x[:d] + 1j * x[d:]
        norm = np.linalg.norm(psi)
        if norm < 1e-8:
            return math.log2(e.n_outcomes)
        psi = psi / norm
        total = 0.0
        for w, effs in zip(weights, effects):
            probs = np.array([float((psi.conj() @ (m @ psi)).real) for m in effs])
            probs = np.clip(probs, 0.0, None)
            probs /= probs.sum()
            total += w * renyi_entropy(probs, alpha)
        return total

    best_val = math.inf
    best_x = None
    for child in np.random.SeedSequence(seed).spawn(restarts):
        rng = np.random.default_rng(child)
        x0 = rng.standard_normal(2 * d)
        res = minimize(objective, x0, method="L-BFGS-B", options={"maxiter": 500})
        if res.fun < best_val:
            best_val = float(res.fun)
            best_x = res.x
    psi = best_x[:d] + 1j * best_x[d:]
    return OptimalBound(best_val, DensityState.from_pure(psi))


def _alpha_label(alpha: float) -> str:
    if math.isinf(alpha):
        return "inf"
    if float(alpha) == int(alpha):
        return str(int(alpha))
    return repr(float(alpha))


@dataclass
class BoundReport:
    """Everything the CLI emits for one scenario: bounds plus view data.

    Bounds whose preconditions the scenario does not meet are ``None`` and
    explained in ``notes``.  Sum-form entries (``q_s``, ``q_mu``, ``q_lmf``,
    ``q_scb``) bound unweighted entropy sums; ``q_alpha``/``q_one``/``b_alpha``
    are weighted averages.
    """

    d: int
    n_outcomes: int
    n_measurements: int
    weights: tuple
    state_label: str
    i_com: float
    s_rho: float
    g_avg_norm: float
    g_tot_norm: float
    exclusivity: float
    q_alpha: dict
    q_one: float | None
    q_s: float | None
    q_mu: dict | None
    q_lmf: float | None
    q_scb: float | None
    b_alpha: dict
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "scenario": {
                "d": self.d,
                "outcomes": self.n_outcomes,
                "measurements": self.n_measurements,
                "weights": list(self.weights),
                "state": self.state_label,
                "i_com": self.i_com,
                "s_rho": self.s_rho,
            },
            "view": {
                "g_avg_norm": self.g_avg_norm,
                "g_tot_norm": self.g_tot_norm,
                "x_tot": self.exclusivity,
            },
            "bounds": {
                "q_alpha": dict(self.q_alpha),
                "q_1": self.q_one,
                "q_s": self.q_s,
                "q_mu": dict(self.q_mu) if self.q_mu is not None else None,
                "q_lmf": self.q_lmf,
                "q_scb": self.q_scb,
                "b_alpha": dict(self.b_alpha),
            },
            "notes": list(self.notes),
        }


def compile_bound_report(
    e: WeightedEnsemble,
    state: DensityState | None = None,
    alphas=(1.0, 2.0, math.inf),
    include_optimal: bool = True,
    restarts: int = 32,
    seed: int = 0,
) -> BoundReport:
    """Evaluate every applicable bound for one scenario.

    With no state the documented state-independent convention is used:
    ``i_com = 1 - 1/d`` and ``s_rho = 0``.  ``q_lmf`` is maximised over
    basis orderings when enumerable.
    """
    if state is not None:
        if state.d != e.d:
            raise ValidationError(f"state dimension {state.d} != ensemble dimension {e.d}")
        i_com = invariant_information(state)
        s_rho = von_neumann_entropy(state)
        state_label = "explicit"
    else:
        i_com = 1.0 - 1.0 / e.d
        s_rho = 0.0
        state_label = "state-independent"

    report = view_report(e)
    notes: list[str] = []
    q_alpha: dict[str, float | None] = {}
    b_alpha: dict[str, float | None] = {}
    q_one = None
    q_s = None

    if e.all_ete:
        for a in alphas:
            if not math.isinf(a) and a < 2.0:
                continue
            q_alpha[_alpha_label(a)] = bound_q_alpha(e, i_com, a)
        q_one = bound_q_one(e, i_com)
        if e.n_measurements >= 2:
            q_s = bound_q_s(e.povms, i_com)
            if not np.allclose(e.weights, e.weights[0]):
                notes.append("q_s is a sum-form bound and assumes equal weights")
    else:
        notes.append("coincidence-based bounds skipped: not all POVMs have equal-trace effects")

    q_mu = None
    q_lmf = None
    q_scb = None
    if all(p.is_rank_one_projective() for p in e.povms):
        if e.n_measurements >= 2:
            q_mu = {
                f"{i},{j}": bound_q_mu(e.povms[i], e.povms[j])
                for i, j in itertools.combinations(range(e.n_measurements), 2)
            }
            q_lmf = bound_q_lmf_best(e.povms, s_rho)
            q_scb = bound_q_scb(e.povms, s_rho)
    else:
        notes.append("overlap-based bounds skipped: not all measurements are rank-1 projective")

    if include_optimal:
        for idx, a in enumerate(alphas):
            b = numerical_optimal_bound(e, a, restarts=restarts, seed=seed + idx)
            b_alpha[_alpha_label(a)] = b.value

    return BoundReport(
        d=e.d,
        n_outcomes=e.n_outcomes,
        n_measurements=e.n_measurements,
        weights=tuple(float(w) for w in e.weights),
        state_label=state_label,
        i_com=i_com,
        s_rho=s_rho,
        g_avg_norm=report.g_avg_norm,
        g_tot_norm=report.g_tot_norm,
        exclusivity=report.exclusivity,
        q_alpha=q_alpha,
        q_one=q_one,
        q_s=q_s,
        q_mu=q_mu,
        q_lmf=q_lmf,
        q_scb=q_scb,
        b_alpha=b_alpha,
        notes=notes,
    )
