"""Reference values: joint Helstrom success and closed-form bounds."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ParameterError
from .greedy import plateau_bound
from .measurements import ZERO_EIG_TOL
from .problem import DiscriminationProblem
from .quantum import DEFAULT_DIM_CAP, tensor

BOUND_KINDS = ("joint_helstrom", "theorem1", "lemma1", "corollary1", "plateau")


@dataclass(frozen=True)
class BoundReport:
    value: float
    kind: str
    applicable: bool = True
    reason: str = ""

    def __post_init__(self):
        if self.kind not in BOUND_KINDS:
            raise ParameterError(f"unknown bound kind {self.kind!r}")


def _check_prob(name: str, x: float) -> None:
    if not 0.0 <= x <= 1.0:
        raise ParameterError(f"{name} must lie in [0, 1], got {x!r}")


def joint_helstrom_success(q: float, rho_plus, rho_minus) -> float:
    """Optimal joint success ``q + sum of the non-negative eigenvalues of (1-q) rho_- - q rho_+``."""
    _check_prob("q", q)
    rp = np.asarray(rho_plus, dtype=np.float64)
    rm = np.asarray(rho_minus, dtype=np.float64)
    if rp.shape != rm.shape:
        raise ParameterError(f"dimension mismatch: {rp.shape} vs {rm.shape}")
    m = (1.0 - q) * rm - q * rp
    w = np.linalg.eigvalsh(0.5 * (m + m.T))
    return float(np.clip(q + w[w >= -ZERO_EIG_TOL].sum(), 0.0, 1.0))


def problem_joint_success(problem: DiscriminationProblem, q: float | None = None, *, dim_cap: int = DEFAULT_DIM_CAP) -> float:
    """Joint Helstrom success for the full tensor-product states of ``problem``."""
    q = problem.prior_q if q is None else q
    return joint_helstrom_success(q, tensor(problem.plus, dim_cap=dim_cap), tensor(problem.minus, dim_cap=dim_cap))


def overlap_angle(psi_plus, psi_minus) -> float:
    """``arccos |<psi_+|psi_->|`` in [0, pi/2] for real unit vectors."""
    a = np.asarray(psi_plus, dtype=np.float64)
    b = np.asarray(psi_minus, dtype=np.float64)
    c = abs(float(a @ b)) / (np.linalg.norm(a) * np.linalg.norm(b))
    return float(np.arccos(min(1.0, c)))


def pure_state_vector(rho) -> np.ndarray:
    """Unit vector of a rank-1 density matrix (top eigenvector)."""
    w, v = np.linalg.eigh(np.asarray(rho, dtype=np.float64))
    if w[-1] < 1.0 - 1e-9:
        raise ParameterError("density matrix is not pure")
    return v[:, -1]


def problem_overlap_angles(problem: DiscriminationProblem) -> list[float]:
    return [overlap_angle(pure_state_vector(p), pure_state_vector(m)) for p, m in problem.pairs]


def theorem1(q: float, thetas: Sequence[float]) -> float:
    """Closed-form optimal success for pure product states.

    ``thetas`` are per-subsystem overlap angles; the prior enters through
    ``theta_0 = arcsin(2q - 1)`` so that ``cos^2 theta_0 = 4 q (1 - q)``.
    """
    _check_prob("q", q)
    prod = 4.0 * q * (1.0 - q)
    for th in thetas:
        prod *= np.cos(th) ** 2
    return float(0.5 * (1.0 + np.sqrt(max(0.0, 1.0 - prod))))


def lemma1_depolarized(p_succ: float, q: float, gamma: float, d: int, k: int, neg_eig_magnitude: float) -> BoundReport:
    """Affine relation between pure and depolarized Helstrom success.

    ``k`` is the rank of the Helstrom projector of the undepolarized problem
    and ``neg_eig_magnitude`` the magnitude of its largest negative eigenvalue
    of ``(1-q) rho_- - q rho_+``. The relation only holds when the eigenvalue
    shift ``gamma/(1-gamma) (1-2q)/d`` stays below that magnitude; otherwise
    the report is marked inapplicable.
    """
    _check_prob("p_succ", p_succ)
    _check_prob("q", q)
    _check_prob("gamma", gamma)
    if d < 1 or not 0 <= k <= d:
        raise ParameterError("need d >= 1 and 0 <= k <= d")
    value = gamma * q + gamma * (1.0 - 2.0 * q) * k / d + (1.0 - gamma) * p_succ
    value = float(np.clip(value, 0.0, 1.0))
    if q > 0.5:
        return BoundReport(value, "lemma1", False, "requires q <= 1/2 (relabel the states)")
    if gamma >= 1.0:
        return BoundReport(value, "lemma1", False, "gamma = 1 leaves no signal")
    shift = gamma / (1.0 - gamma) * (1.0 - 2.0 * q) / d
    if shift > 0.0 and not shift < neg_eig_magnitude:
        return BoundReport(value, "lemma1", False, f"eigenvalue shift {shift:.3g} >= {neg_eig_magnitude:.3g}")
    return BoundReport(value, "lemma1", True, "")


def corollary1_bound(q: float, gamma_plus: float, gamma_minus: float) -> float:
    """``max(1 - q, q, 1 - gamma_min / 2)`` for depolarized single-system pairs."""
    _check_prob("q", q)
    _check_prob("gamma_plus", gamma_plus)
    _check_prob("gamma_minus", gamma_minus)
    return max(1.0 - q, q, 1.0 - min(gamma_plus, gamma_minus) / 2.0)


def plateau_report(gamma: float) -> BoundReport:
    return BoundReport(plateau_bound(gamma), "plateau", True, "LG ceiling for equal gamma on every subsystem, q = 1/2")
