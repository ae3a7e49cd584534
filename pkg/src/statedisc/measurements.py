"""Projective measurements, (modified) Helstrom construction and action spaces."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import ParameterError
from .quantum import eig_sym
from .sphere import icosphere_vertices

ZERO_EIG_TOL = 1e-12
PROJECTOR_TOL = 1e-9

# Outcome labels of a binary Helstrom measurement: slot 0 is I - Pi, slot 1 is Pi.
HELSTROM_LABELS = (+1, -1)

BELIEF_DEPENDENT = ("modified_helstrom_only", "helstrom_only")


@dataclass(frozen=True, eq=False)
class ProjectiveMeasurement:
    """Ordered, complete set of orthogonal projectors.

    ``projectors`` is stored as a read-only ``(k, d, d)`` array; outcome ``i``
    corresponds to ``projectors[i]`` and carries ``labels[i]``.
    """

    projectors: np.ndarray
    labels: tuple = ()
    validate: bool = field(default=True, repr=False)

    def __post_init__(self):
        stack = np.array(self.projectors, dtype=np.float64)
        if stack.ndim != 3 or stack.shape[1] != stack.shape[2]:
            raise ParameterError(f"projectors must have shape (k, d, d), got {stack.shape}")
        stack.setflags(write=False)
        object.__setattr__(self, "projectors", stack)
        labels = tuple(self.labels) if self.labels else tuple(range(stack.shape[0]))
        if len(labels) != stack.shape[0]:
            raise ParameterError("one label per projector is required")
        object.__setattr__(self, "labels", labels)
        if self.validate:
            check_projective(stack)

    @property
    def n_outcomes(self) -> int:
        return self.projectors.shape[0]

    @property
    def dim(self) -> int:
        return self.projectors.shape[1]

    def is_trivial(self, tol: float = PROJECTOR_TOL) -> bool:
        """True when one projector is the identity (the outcome is certain)."""
        eye = np.eye(self.dim)
        return any(np.max(np.abs(p - eye)) <= tol for p in self.projectors)

    def probabilities(self, rho) -> np.ndarray:
        rho = np.asarray(rho, dtype=np.float64)
        probs = np.einsum("kij,ji->k", self.projectors, rho)
        return np.clip(probs, 0.0, 1.0)


def check_projective(stack: np.ndarray, tol: float = PROJECTOR_TOL) -> None:
    """Raise ParameterError unless ``stack`` is idempotent, orthogonal and complete."""
    k, d, _ = stack.shape
    for i in range(k):
        p = stack[i]
        if np.max(np.abs(p - p.T)) > tol:
            raise ParameterError(f"projector {i} is not symmetric")
        if np.max(np.abs(p @ p - p)) > tol:
            raise ParameterError(f"projector {i} is not idempotent")
        for j in range(i + 1, k):
            if np.max(np.abs(p @ stack[j])) > tol:
                raise ParameterError(f"projectors {i} and {j} are not orthogonal")
    if np.max(np.abs(stack.sum(axis=0) - np.eye(d))) > tol:
        raise ParameterError("projectors do not sum to the identity")


def binary_measurement(pi: np.ndarray, *, validate: bool = True) -> ProjectiveMeasurement:
    """The measurement ``{I - pi, pi}`` with labels (+1, -1)."""
    pi = np.asarray(pi, dtype=np.float64)
    eye = np.eye(pi.shape[0])
    return ProjectiveMeasurement(np.stack([eye - pi, pi]), HELSTROM_LABELS, validate)


def _check_pair(rho_plus, rho_minus):
    rp = np.asarray(rho_plus, dtype=np.float64)
    rm = np.asarray(rho_minus, dtype=np.float64)
    if rp.shape != rm.shape or rp.ndim != 2:
        raise ParameterError(f"dimension mismatch: {rp.shape} vs {rm.shape}")
    return rp, rm


def helstrom_operator(p: float, rho_plus, rho_minus) -> np.ndarray:
    """``(1 - p) rho_minus - p rho_plus``; its non-negative eigenspace predicts rho_minus."""
    if not 0.0 <= p <= 1.0:
        raise ParameterError(f"prior must lie in [0, 1], got {p!r}")
    rp, rm = _check_pair(rho_plus, rho_minus)
    return (1.0 - p) * rm - p * rp


def helstrom(p: float, rho_plus, rho_minus) -> ProjectiveMeasurement:
    """Locally optimal binary measurement for prior ``p`` on ``rho_plus``.

    Pi projects onto the eigenvectors of ``(1-p) rho_minus - p rho_plus`` with
    eigenvalue >= 0 (|lambda| <= 1e-12 counts as zero). Outcome +1 is
    ``I - Pi`` and outcome -1 is ``Pi``.
    """
    m = helstrom_operator(p, rho_plus, rho_minus)
    values, vectors = eig_sym(m)
    keep = values >= -ZERO_EIG_TOL
    pi = (vectors[:, keep] @ vectors[:, keep].T) if keep.any() else np.zeros_like(m)
    return binary_measurement(pi)


def modified_helstrom(p: float, rho_plus, rho_minus) -> ProjectiveMeasurement:
    """Helstrom measurement, replaced by a rank-1 split whenever it is trivial.

    If Pi = 0 the Pi-slot becomes the top eigenvector of the Helstrom
    operator; if Pi = I it becomes the complement of the bottom eigenvector.
    In both cases the Pi-slot is still the outcome that favours rho_minus.
    """
    m = helstrom_operator(p, rho_plus, rho_minus)
    values, vectors = eig_sym(m)
    keep = values >= -ZERO_EIG_TOL
    d = m.shape[0]
    if keep.all():
        v = vectors[:, -1]
        pi = np.eye(d) - np.outer(v, v)
    elif not keep.any():
        v = vectors[:, 0]
        pi = np.outer(v, v)
    else:
        pi = vectors[:, keep] @ vectors[:, keep].T
    return binary_measurement(pi)


def helstrom_projector_batch(m: np.ndarray, *, modified: bool = False) -> np.ndarray:
    """Pi-slot projectors for a stack of Helstrom operators ``m[..., d, d]``.

    Vectorized counterpart of :func:`helstrom` / :func:`modified_helstrom`;
    2x2 operators use a closed form, larger ones ``numpy.linalg.eigh``.
    """
    m = np.asarray(m, dtype=np.float64)
    d = m.shape[-1]
    if d == 2:
        return _helstrom_projector_2x2(m, modified)
    m = 0.5 * (m + np.swapaxes(m, -1, -2))
    w, v = np.linalg.eigh(m)
    keep = (w >= -ZERO_EIG_TOL).astype(np.float64)
    if modified:
        all_keep = keep.all(axis=-1)
        none_keep = ~keep.any(axis=-1)
        keep = keep.copy()
        # Pi = I  ->  I - v_min v_min^T ;  Pi = 0  ->  v_max v_max^T
        keep[all_keep, 0] = 0.0
        keep[none_keep, -1] = 1.0
    return np.einsum("...ik,...k,...jk->...ij", v, keep, v)


def _helstrom_projector_2x2(m: np.ndarray, modified: bool) -> np.ndarray:
    a = m[..., 0, 0]
    b = 0.5 * (m[..., 0, 1] + m[..., 1, 0])
    c = m[..., 1, 1]
    mean = 0.5 * (a + c)
    r = np.hypot(0.5 * (a - c), b)
    lo = mean - r
    hi = mean + r
    degenerate = r <= 1e-15
    safe_r = np.where(degenerate, 1.0, r)
    # rank-1 projector onto the top eigenvector: (M - lo I) / (hi - lo)
    top = np.empty(m.shape)
    top[..., 0, 0] = (a - lo) / (2 * safe_r)
    top[..., 1, 1] = (c - lo) / (2 * safe_r)
    top[..., 0, 1] = top[..., 1, 0] = b / (2 * safe_r)
    if np.any(degenerate):
        top[degenerate] = np.array([[1.0, 0.0], [0.0, 0.0]])
    full = lo >= -ZERO_EIG_TOL
    empty = hi < -ZERO_EIG_TOL
    out = top.copy()
    eye = np.eye(2)
    if modified:
        # both trivial cases reduce to the top eigenvector for a qubit
        return out
    out[full] = eye
    out[empty] = 0.0
    return out


def outcome_prob(m: ProjectiveMeasurement, rho, outcome_index: int) -> float:
    """Tr(Pi_outcome rho) clamped to [0, 1]."""
    if not 0 <= outcome_index < m.n_outcomes:
        raise ParameterError(f"outcome index {outcome_index} out of range")
    val = float(np.einsum("ij,ji->", m.projectors[outcome_index], np.asarray(rho, dtype=np.float64)))
    return min(1.0, max(0.0, val))


@dataclass(frozen=True, eq=False)
class ActionSpace:
    """A finite list of measurements plus a descriptor of how it was built.

    The ``("modified_helstrom_only",)`` and ``("helstrom_only",)`` descriptors
    mark belief-dependent actions (MLG and LG); they carry no stored
    measurements.
    """

    actions: tuple
    descriptor: tuple

    def __post_init__(self):
        object.__setattr__(self, "actions", tuple(self.actions))
        if not self.actions and not self.is_belief_dependent:
            raise ParameterError("action space must be non-empty")
        if self.actions:
            shapes = {a.projectors.shape for a in self.actions}
            if len(shapes) != 1:
                raise ParameterError("all actions must share outcome count and dimension")

    @property
    def is_modified_helstrom(self) -> bool:
        return self.descriptor[0] == "modified_helstrom_only"

    @property
    def is_belief_dependent(self) -> bool:
        return self.descriptor[0] in BELIEF_DEPENDENT

    def __len__(self) -> int:
        return len(self.actions)

    @cached_property
    def stacked(self) -> np.ndarray:
        """All projectors as one ``(A, D, d, d)`` array."""
        return np.stack([a.projectors for a in self.actions])

    def outcome_table(self, rho) -> np.ndarray:
        """``P(d | rho, a)`` for every action, shape ``(A, D)``."""
        probs = np.einsum("adij,ji->ad", self.stacked, np.asarray(rho, dtype=np.float64))
        return np.clip(probs, 0.0, 1.0)

    def to_descriptor(self) -> dict:
        kind, *params = self.descriptor
        return {"kind": kind, "params": list(params), "size": len(self.actions)}


def modified_helstrom_space() -> ActionSpace:
    return ActionSpace((), ("modified_helstrom_only",))


def helstrom_space() -> ActionSpace:
    return ActionSpace((), ("helstrom_only",))


def qubit_basis_vector(phi: float) -> np.ndarray:
    """Real qubit vector cos(phi)|0> + sin(phi)|1> used by the qubit action grid."""
    return np.array([np.cos(phi), np.sin(phi)])


def qubit_action_space(q_phi: int) -> ActionSpace:
    """Binary measurements {|phi><phi|, |phi_perp><phi_perp|} on an even grid of [0, pi/2]."""
    if q_phi < 2:
        raise ParameterError("q_phi must be at least 2")
    actions = []
    for phi in np.linspace(0.0, np.pi / 2, q_phi):
        v = qubit_basis_vector(phi)
        w = np.array([-v[1], v[0]])
        actions.append(ProjectiveMeasurement(np.stack([np.outer(v, v), np.outer(w, w)]), (0, 1)))
    return ActionSpace(actions, ("qubit_grid", q_phi))


def rotation_matrix(phi: float, theta: float) -> np.ndarray:
    """Rotation whose third column is the unit vector at polar angles (phi, theta)."""
    sp, cp = np.sin(phi), np.cos(phi)
    st, ct = np.sin(theta), np.cos(theta)
    return np.array(
        [
            [-sp, cp * ct, cp * st],
            [cp, sp * ct, sp * st],
            [0.0, -st, ct],
        ]
    )


def vertex_angles(xyz: np.ndarray) -> tuple[float, float]:
    """Polar conversion x = sin t cos p, y = sin t sin p, z = cos t."""
    x, y, z = xyz
    theta = float(np.arccos(np.clip(z, -1.0, 1.0)))
    phi = float(np.arctan2(y, x))
    return phi, theta


def qutrit_bases(r_vec: Sequence[int], q: int) -> np.ndarray:
    """Orthonormal bases as an array ``(B, 3, 3)`` whose columns are u1, u2, u3."""
    if q < 1:
        raise ParameterError("Q must be at least 1")
    bases = []
    omegas = [np.pi * k / (2 * q) for k in range(q)]
    for vertex in icosphere_vertices(r_vec):
        rot = rotation_matrix(*vertex_angles(vertex))
        for w in omegas:
            local = np.array(
                [[np.cos(w), -np.sin(w), 0.0], [np.sin(w), np.cos(w), 0.0], [0.0, 0.0, 1.0]]
            )
            bases.append(rot @ local)
    return np.array(bases)


def qutrit_action_spaces(r_vec: Sequence[int], q: int) -> tuple[ActionSpace, ActionSpace]:
    """Ternary rank-1 measurements and the three binary groupings of each basis.

    Each binary action is ``{sum_{l != k} u_l u_l^T, u_k u_k^T}`` (rank 2
    first, rank 1 second).
    """
    r_vec = tuple(int(r) for r in r_vec)
    ternary, binary = [], []
    eye = np.eye(3)
    for basis in qutrit_bases(r_vec, q):
        rank1 = np.einsum("ik,jk->kij", basis, basis)
        ternary.append(ProjectiveMeasurement(rank1, (0, 1, 2)))
        for k in range(3):
            binary.append(ProjectiveMeasurement(np.stack([eye - rank1[k], rank1[k]]), (0, 1)))
    desc = (r_vec, q)
    return (
        ActionSpace(ternary, ("qutrit_ternary", *desc)),
        ActionSpace(binary, ("qutrit_binary", *desc)),
    )


def action_space_from_descriptor(desc: dict) -> ActionSpace:
    """Rebuild an action space from the output of :meth:`ActionSpace.to_descriptor`."""
    try:
        kind = desc["kind"]
        params = list(desc.get("params", []))
    except (TypeError, KeyError):
        raise ParameterError(f"malformed action-space descriptor {desc!r}") from None
    if kind == "modified_helstrom_only":
        return modified_helstrom_space()
    if kind == "helstrom_only":
        return helstrom_space()
    if kind == "qubit_grid" and len(params) == 1:
        return qubit_action_space(int(params[0]))
    if kind in ("qutrit_ternary", "qutrit_binary") and len(params) == 2:
        ternary, binary = qutrit_action_spaces([int(r) for r in params[0]], int(params[1]))
        return ternary if kind == "qutrit_ternary" else binary
    raise ParameterError(f"unknown action-space descriptor {desc!r}")
