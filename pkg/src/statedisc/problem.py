"""Binary discrimination problems over tensor-product states, and their JSON form."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .errors import ParameterError
from .quantum import as_density_matrix, depolarize, pure_qubit, pure_qutrit, tensor

IDENTICAL_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class DiscriminationProblem:
    """Candidate states rho_plus = (x)_j plus[j] and rho_minus = (x)_j minus[j].

    ``prior_q`` is the initial probability of rho_plus. ``gammas`` optionally
    records per-subsystem depolarizing parameters as (gamma_plus, gamma_minus)
    when the pair was built by depolarizing pure states.
    """

    plus: tuple
    minus: tuple
    prior_q: float = 0.5
    gammas: tuple | None = field(default=None, repr=False)
    pure: bool = field(default=False, repr=False)

    def __post_init__(self):
        if len(self.plus) != len(self.minus) or len(self.plus) == 0:
            raise ParameterError("need the same positive number of plus and minus factors")
        plus = tuple(as_density_matrix(m) for m in self.plus)
        minus = tuple(as_density_matrix(m) for m in self.minus)
        dims = {m.shape[0] for m in plus + minus}
        if len(dims) != 1:
            raise ParameterError(f"all subsystems must share one dimension, got {sorted(dims)}")
        if not 0.0 <= self.prior_q <= 1.0:
            raise ParameterError(f"prior_q must lie in [0, 1], got {self.prior_q!r}")
        object.__setattr__(self, "plus", plus)
        object.__setattr__(self, "minus", minus)
        object.__setattr__(self, "prior_q", float(self.prior_q))

    @classmethod
    def from_pairs(cls, pairs: Sequence, prior_q: float = 0.5, **kw) -> "DiscriminationProblem":
        return cls(tuple(p for p, _ in pairs), tuple(m for _, m in pairs), prior_q, **kw)

    @property
    def n(self) -> int:
        return len(self.plus)

    @property
    def dim(self) -> int:
        return self.plus[0].shape[0]

    def pair(self, j: int) -> tuple[np.ndarray, np.ndarray]:
        return self.plus[j], self.minus[j]

    @property
    def pairs(self) -> list[tuple[np.ndarray, np.ndarray]]:
        return list(zip(self.plus, self.minus))

    def with_prior(self, q: float) -> "DiscriminationProblem":
        return DiscriminationProblem(self.plus, self.minus, q, self.gammas, self.pure)

    def subproblem(self, order: Sequence[int]) -> "DiscriminationProblem":
        """Problem with subsystems rearranged (or restricted) to ``order``."""
        gam = tuple(self.gammas[j] for j in order) if self.gammas else None
        return DiscriminationProblem(
            tuple(self.plus[j] for j in order),
            tuple(self.minus[j] for j in order),
            self.prior_q,
            gam,
            self.pure,
        )

    def stacked(self) -> tuple[np.ndarray, np.ndarray]:
        """``(N, d, d)`` arrays of the plus and minus factors."""
        return np.stack(self.plus), np.stack(self.minus)

    def is_identical_copies(self, tol: float = IDENTICAL_TOL) -> bool:
        p0, m0 = self.pair(0)
        return all(
            np.max(np.abs(p - p0)) <= tol and np.max(np.abs(m - m0)) <= tol
            for p, m in zip(self.plus, self.minus)
        )

    def joint_states(self, dim_cap: int | None = None) -> tuple[np.ndarray, np.ndarray]:
        kw = {} if dim_cap is None else {"dim_cap": dim_cap}
        return tensor(self.plus, **kw), tensor(self.minus, **kw)

    def content_hash(self) -> str:
        """SHA-256 over the factor matrices (the prior is excluded)."""
        h = hashlib.sha256()
        h.update(f"n={self.n};d={self.dim};".encode())
        for p, m in zip(self.plus, self.minus):
            h.update(np.ascontiguousarray(p, dtype="<f8").tobytes())
            h.update(np.ascontiguousarray(m, dtype="<f8").tobytes())
        return h.hexdigest()


def _gamma_pair(entry: dict) -> tuple[float, float]:
    g = entry.get("gamma")
    gp = entry.get("gamma_plus", g)
    gm = entry.get("gamma_minus", g)
    if gp is None or gm is None:
        raise ParameterError("depolarized subsystem needs 'gamma' or 'gamma_plus'/'gamma_minus'")
    return float(gp), float(gm)


def _subsystem_from_dict(entry: dict) -> tuple[np.ndarray, np.ndarray, tuple | None, bool]:
    kind = entry.get("type")
    try:
        if kind == "pure_qubit":
            return pure_qubit(float(entry["theta_plus"])), pure_qubit(float(entry["theta_minus"])), None, True
        if kind == "depolarized_qubit":
            gp, gm = _gamma_pair(entry)
            rp = depolarize(pure_qubit(float(entry["theta_plus"])), gp, 2)
            rm = depolarize(pure_qubit(float(entry["theta_minus"])), gm, 2)
            return rp, rm, (gp, gm), gp == 0 and gm == 0
        if kind == "pure_qutrit":
            rp = pure_qutrit(float(entry["phi_plus"]), float(entry["theta_plus"]))
            rm = pure_qutrit(float(entry["phi_minus"]), float(entry["theta_minus"]))
            return rp, rm, None, True
        if kind == "depolarized_qutrit":
            gp, gm = _gamma_pair(entry)
            rp = depolarize(pure_qutrit(float(entry["phi_plus"]), float(entry["theta_plus"])), gp, 3)
            rm = depolarize(pure_qutrit(float(entry["phi_minus"]), float(entry["theta_minus"])), gm, 3)
            return rp, rm, (gp, gm), gp == 0 and gm == 0
        if kind == "matrix":
            rp = as_density_matrix(entry["rho_plus"])
            rm = as_density_matrix(entry["rho_minus"])
            pure = bool(np.isclose(np.trace(rp @ rp), 1.0) and np.isclose(np.trace(rm @ rm), 1.0))
            return rp, rm, None, pure
    except KeyError as exc:
        raise ParameterError(f"subsystem of type {kind!r} is missing field {exc}") from None
    raise ParameterError(f"unknown subsystem type {kind!r}")


def problem_from_dict(doc: dict[str, Any]) -> DiscriminationProblem:
    if not isinstance(doc, dict) or "subsystems" not in doc:
        raise ParameterError("problem document needs a 'subsystems' list")
    subs = doc["subsystems"]
    if not isinstance(subs, list) or not subs:
        raise ParameterError("'subsystems' must be a non-empty list")
    built = [_subsystem_from_dict(s) for s in subs]
    gammas = tuple(g for *_, g, _ in built)
    has_gammas = all(g is not None for g in gammas)
    return DiscriminationProblem(
        tuple(b[0] for b in built),
        tuple(b[1] for b in built),
        float(doc.get("prior_q", 0.5)),
        gammas if has_gammas else None,
        all(b[3] for b in built),
    )


def load_problem(path: str | Path) -> DiscriminationProblem:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParameterError(f"{path}: invalid JSON ({exc})") from None
    return problem_from_dict(doc)
