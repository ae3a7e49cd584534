"""Locally greedy (LG) and modified locally greedy (MLG) strategies.

Both strategies are myopic and measure the subsystems in a fixed order, so
the full outcome tree can be enumerated level by level. One traversal to
depth N yields the exact success probability after every prefix length,
which is what the plateau experiments need. The engine is batched over
independent problems ("trials") of equal size.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ParameterError, ResourceError
from .measurements import helstrom_projector_batch
from .problem import DiscriminationProblem

MAX_TREE_N = 16
# upper bound on float64 elements held by one batched level (per array)
_CHUNK_ELEMENTS = 1 << 21


@dataclass(frozen=True)
class LeafRecord:
    word: str
    prob_plus: float
    prob_minus: float
    belief: float
    decode: int


@dataclass(frozen=True)
class StrategyEvaluation:
    """Exact result of running a greedy strategy on one problem.

    ``prefix_success[j]`` is the success probability when decoding after the
    first ``j`` rounds (``j = 0`` means decoding from the prior alone).
    ``per_round_error`` follows the most likely outcome at each round.
    """

    success_probability: float
    per_round_error: list
    prefix_success: np.ndarray
    order: tuple
    leaf_records: list | None = field(default=None, repr=False)


def plateau_bound(gamma: float) -> float:
    """Success ceiling of LG on identical depolarized copies."""
    if not 0.0 <= gamma <= 1.0:
        raise ParameterError(f"gamma must lie in [0, 1], got {gamma!r}")
    a = (1.0 - gamma / 2.0) ** 2
    b = (gamma / 2.0) ** 2
    return a / (a + b)


def _beliefs(q, wp, wm):
    num = q * wp
    den = num + (1.0 - q) * wm
    safe = np.where(den > 0.0, den, 1.0)
    return np.where(den > 0.0, num / safe, 0.5)


def _decode_success(q, wp, wm, b):
    return np.where(b >= 0.5, q * wp, (1.0 - q) * wm).sum(axis=-1)


def _trace_products(pi, rho):
    """``Tr(pi rho)`` summed term by term so results do not depend on batch shape."""
    d = rho.shape[-1]
    out = np.zeros(pi.shape[:-2])
    for i in range(d):
        for j in range(d):
            out += pi[..., i, j] * rho[..., None, j, i]
    return out


def _tree_chunk(rp, rm, q, modified, keep_leaves):
    t, n = rp.shape[:2]
    q = q[:, None]
    wp = np.ones((t, 1))
    wm = np.ones((t, 1))
    prefix = np.empty((t, n + 1))
    b = _beliefs(q, wp, wm)
    prefix[:, 0] = _decode_success(q, wp, wm, b)
    for j in range(n):
        op = (1.0 - b)[..., None, None] * rm[:, j, None] - b[..., None, None] * rp[:, j, None]
        pi = helstrom_projector_batch(op, modified=modified)
        pp = np.clip(_trace_products(pi, rp[:, j]), 0.0, 1.0)
        pm = np.clip(_trace_products(pi, rm[:, j]), 0.0, 1.0)
        # child 2k is outcome +1 (I - Pi), child 2k + 1 is outcome -1 (Pi)
        wp = np.stack([wp * (1.0 - pp), wp * pp], axis=-1).reshape(t, -1)
        wm = np.stack([wm * (1.0 - pm), wm * pm], axis=-1).reshape(t, -1)
        b = _beliefs(q, wp, wm)
        prefix[:, j + 1] = _decode_success(q, wp, wm, b)
    leaves = (wp, wm, b) if keep_leaves else None
    return prefix, leaves


def greedy_prefix_success(rho_plus, rho_minus, q=0.5, *, modified: bool = False) -> np.ndarray:
    """Exact prefix success probabilities for a batch of problems.

    Args:
        rho_plus, rho_minus: ``(T, N, d, d)`` per-trial subsystem states, in
            measurement order.
        q: prior on rho_plus, scalar or shape ``(T,)``.
        modified: use the modified Helstrom measurement (MLG) instead of LG.

    Returns:
        ``(T, N + 1)`` array; column ``j`` is the success after ``j`` rounds.
    """
    rp = np.asarray(rho_plus, dtype=np.float64)
    rm = np.asarray(rho_minus, dtype=np.float64)
    if rp.shape != rm.shape or rp.ndim != 4 or rp.shape[-1] != rp.shape[-2]:
        raise ParameterError(f"expected matching (T, N, d, d) arrays, got {rp.shape} and {rm.shape}")
    t, n, d, _ = rp.shape
    if n > MAX_TREE_N:
        raise ResourceError(f"outcome tree depth {n} exceeds cap {MAX_TREE_N}")
    qv = np.broadcast_to(np.asarray(q, dtype=np.float64), (t,))
    if np.any((qv < 0.0) | (qv > 1.0)):
        raise ParameterError("prior q must lie in [0, 1]")
    per_trial = (1 << n) * d * d
    chunk = max(1, _CHUNK_ELEMENTS // per_trial)
    out = np.empty((t, n + 1))
    for start in range(0, t, chunk):
        sl = slice(start, start + chunk)
        out[sl], _ = _tree_chunk(rp[sl], rm[sl], qv[sl], modified, False)
    return out


def _check_order(order, n: int) -> tuple:
    if order is None:
        return tuple(range(n))
    order = tuple(int(k) for k in order)
    if sorted(order) != list(range(n)):
        raise ParameterError(f"order must be a permutation of 0..{n - 1}, got {order}")
    return order


def _most_likely_path_errors(rp, rm, q, modified) -> list:
    errors = []
    p = q
    for j in range(rp.shape[0]):
        op = (1.0 - p) * rm[j] - p * rp[j]
        pi = helstrom_projector_batch(op[None], modified=modified)[0]
        tp = min(1.0, max(0.0, float(np.trace(pi @ rp[j]))))
        tm = min(1.0, max(0.0, float(np.trace(pi @ rm[j]))))
        errors.append((1.0 - tm) * (1.0 - p) + tp * p)
        lik_plus = (1.0 - tp) * p + (1.0 - tm) * (1.0 - p)
        lik_minus = tp * p + tm * (1.0 - p)
        if lik_plus >= lik_minus:
            p = (1.0 - tp) * p / lik_plus if lik_plus > 0 else p
        else:
            p = tp * p / lik_minus if lik_minus > 0 else p
    return errors


def _run(problem: DiscriminationProblem, order, modified: bool, leaf_records: bool):
    order = _check_order(order, problem.n)
    if problem.n > MAX_TREE_N:
        raise ResourceError(f"outcome tree depth {problem.n} exceeds cap {MAX_TREE_N}")
    rp, rm = problem.stacked()
    rp, rm = rp[list(order)], rm[list(order)]
    q = problem.prior_q
    prefix, leaves = _tree_chunk(rp[None], rm[None], np.array([q]), modified, leaf_records)
    records = None
    if leaf_records:
        wp, wm, b = (x[0] for x in leaves)
        n = problem.n
        records = []
        for idx in range(1 << n):
            word = "".join("-" if (idx >> (n - 1 - j)) & 1 else "+" for j in range(n))
            records.append(
                LeafRecord(word, float(wp[idx]), float(wm[idx]), float(b[idx]), 1 if b[idx] >= 0.5 else -1)
            )
    return StrategyEvaluation(
        success_probability=float(prefix[0, -1]),
        per_round_error=_most_likely_path_errors(rp, rm, q, modified),
        prefix_success=prefix[0],
        order=order,
        leaf_records=records,
    )


def run_lg(
    problem: DiscriminationProblem, order: Sequence[int] | None = None, *, leaf_records: bool = False
) -> StrategyEvaluation:
    """Exact success of the Helstrom-per-round strategy in the given order."""
    return _run(problem, order, False, leaf_records)


def run_mlg(
    problem: DiscriminationProblem, order: Sequence[int] | None = None, *, leaf_records: bool = False
) -> StrategyEvaluation:
    """As :func:`run_lg` but with the modified Helstrom measurement each round."""
    return _run(problem, order, True, leaf_records)
