"""Belief-grid dynamic programming over the set of unmeasured subsystems.

``R_S(p)`` is the smallest expected final error reachable from belief ``p``
with the subsystems in ``S`` still unmeasured. Tables are filled bottom-up in
increasing ``|S|``; child risks are looked up by linear interpolation on the
belief grid, except that children with zero or one remaining subsystem are
evaluated exactly.

Subsets are bitmasks: bit ``k`` set means subsystem ``k`` (0-based) is still
unmeasured.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

import numpy as np

from .errors import ImpossibleObservationError, ParameterError, PolicyFormatError, ResourceError, StalePolicyError
from .measurements import (
    ActionSpace,
    ProjectiveMeasurement,
    action_space_from_descriptor,
    helstrom,
    helstrom_projector_batch,
    helstrom_space,
    modified_helstrom,
    modified_helstrom_space,
    qubit_action_space,
)
from .problem import DiscriminationProblem

MODES = ("moody_best", "moody_worst", "order_opt_mlg", "order_opt_lg", "fixed_order")
FORMAT_VERSION = 1
DEFAULT_Q_P = 1001
DEFAULT_Q_PHI = 128
DEFAULT_N_CAP = 12
WARN_N = 7
# bound on float64 elements in one gathered child-risk block
_BLOCK_ELEMENTS = 1 << 22


@dataclass(frozen=True, eq=False)
class RiskTables:
    """Risk functions and argmin policy on an equi-spaced belief grid.

    When ``keyed_by_size`` is set (identical copies), row ``s`` of ``risk``
    holds ``R_S`` for every ``S`` with ``|S| = s`` and the chosen subsystem is
    always the lowest-index one in ``S``. Otherwise rows are indexed by the
    subset bitmask. ``policy_a`` is ``-1`` for belief-dependent actions.
    """

    mode: str
    n: int
    risk: np.ndarray
    policy_k: np.ndarray
    policy_a: np.ndarray
    keyed_by_size: bool
    problem_hash: str
    actions: ActionSpace = field(repr=False)

    @property
    def q_p(self) -> int:
        return self.risk.shape[1]

    @property
    def grid(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.q_p)

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    def row(self, mask: int) -> int:
        return bin(mask).count("1") if self.keyed_by_size else mask

    def risk_of(self, subset) -> np.ndarray:
        return self.risk[self.row(_as_mask(subset, self.n))]


def _as_mask(subset, n: int) -> int:
    if isinstance(subset, (int, np.integer)):
        mask = int(subset)
    else:
        mask = 0
        for k in subset:
            if not 0 <= int(k) < n:
                raise ParameterError(f"subsystem index {k} out of range")
            mask |= 1 << int(k)
    if not 0 <= mask < (1 << n):
        raise ParameterError(f"subset mask {mask} out of range for N={n}")
    return mask


def _lowest_bit(mask: int) -> int:
    return (mask & -mask).bit_length() - 1


def _interp_rows(rows: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Linear interpolation of each row of ``rows`` (grid on [0, 1]) at ``x``.

    Returns an array of shape ``rows.shape[:1] + x.shape``.
    """
    q = rows.shape[1]
    pos = np.clip(x, 0.0, 1.0) * (q - 1)
    lo = np.minimum(pos.astype(np.intp), q - 2)
    frac = pos - lo
    return rows[:, lo] * (1.0 - frac) + rows[:, lo + 1] * frac


class _LowerEnvelope:
    """Pointwise minimum of lines ``c + m x``, evaluated via breakpoints."""

    def __init__(self, slopes: np.ndarray, intercepts: np.ndarray):
        order = np.lexsort((intercepts, -slopes))
        m, c = slopes[order], intercepts[order]
        hull_m: list[float] = []
        hull_c: list[float] = []
        for mi, ci in zip(m, c):
            if hull_m and mi == hull_m[-1]:
                continue  # same slope, larger (or equal) intercept
            while len(hull_m) >= 2:
                m1, c1, m2, c2 = hull_m[-2], hull_c[-2], hull_m[-1], hull_c[-1]
                # drop line 2 if line 3 overtakes line 1 no later than line 2 does
                if (ci - c1) * (m1 - m2) <= (c2 - c1) * (m1 - mi):
                    hull_m.pop()
                    hull_c.pop()
                else:
                    break
            hull_m.append(mi)
            hull_c.append(ci)
        self.m = np.array(hull_m)
        self.c = np.array(hull_c)
        self.breaks = (self.c[1:] - self.c[:-1]) / (self.m[:-1] - self.m[1:])

    def __call__(self, x: np.ndarray) -> np.ndarray:
        idx = np.searchsorted(self.breaks, x)
        return self.c[idx] + self.m[idx] * x


def _action_envelope(pp: np.ndarray, pm: np.ndarray) -> _LowerEnvelope:
    """Exact one-subsystem risk ``min_a sum_d min(P+ x, P- (1 - x))`` as lines."""
    n_a, n_d = pp.shape
    masks = np.array([[(s >> d) & 1 for d in range(n_d)] for s in range(1 << n_d)], dtype=bool)
    # line for (a, mask): sum_{d in mask} P+_d x + sum_{d not in mask} P-_d (1 - x)
    plus = pp @ masks.T
    minus_out = pm @ (~masks).T
    return _LowerEnvelope((plus - minus_out).ravel(), minus_out.ravel())


def _helstrom_error(rho_plus: np.ndarray, rho_minus: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Minimum one-shot error ``(1 - ||x rho_plus - (1 - x) rho_minus||_1) / 2``."""
    b = x[..., None, None] * rho_plus - (1.0 - x)[..., None, None] * rho_minus
    if rho_plus.shape[0] == 2:
        mean = 0.5 * (b[..., 0, 0] + b[..., 1, 1])
        r = np.hypot(0.5 * (b[..., 0, 0] - b[..., 1, 1]), b[..., 0, 1])
        norm = np.abs(mean + r) + np.abs(mean - r)
    else:
        norm = np.abs(np.linalg.eigvalsh(b)).sum(axis=-1)
    return np.clip(0.5 * (1.0 - norm), 0.0, 0.5)


class _Subsystem:
    """Per-subsystem outcome statistics over the grid and the exact 1-step risk."""

    def __init__(self, rho_plus, rho_minus, actions: ActionSpace, grid: np.ndarray):
        self.rho_plus = np.asarray(rho_plus)
        self.rho_minus = np.asarray(rho_minus)
        if actions.is_belief_dependent:
            op = (1.0 - grid)[:, None, None] * self.rho_minus - grid[:, None, None] * self.rho_plus
            pi = helstrom_projector_batch(op, modified=actions.is_modified_helstrom)
            tp = np.clip(np.einsum("qij,ji->q", pi, self.rho_plus), 0.0, 1.0)
            tm = np.clip(np.einsum("qij,ji->q", pi, self.rho_minus), 0.0, 1.0)
            # (A=1, D=2, Q): outcome 0 is I - Pi, outcome 1 is Pi
            self.pp = np.stack([1.0 - tp, tp])[None]
            self.pm = np.stack([1.0 - tm, tm])[None]
            self._envelope = None
        else:
            pp = actions.outcome_table(self.rho_plus)
            pm = actions.outcome_table(self.rho_minus)
            self.pp = pp[:, :, None]
            self.pm = pm[:, :, None]
            self._envelope = _action_envelope(pp, pm)
        p = grid[None, None, :]
        self.lik = self.pp * p + self.pm * (1.0 - p)
        safe = np.where(self.lik > 0.0, self.lik, 1.0)
        self.post = np.where(self.lik > 0.0, self.pp * p / safe, 0.5)
        # contribution when the child is the empty set: L * min(post, 1 - post)
        self.terminal = np.minimum(self.pp * p, self.pm * (1.0 - p)).sum(axis=1)
        # interpolation of a grid-tabulated child at every posterior, weighted by L
        pos = np.clip(self.post, 0.0, 1.0) * (grid.size - 1)
        self.lo = np.minimum(pos.astype(np.intp), grid.size - 2)
        frac = pos - self.lo
        self.w_lo = self.lik * (1.0 - frac)
        self.w_hi = self.lik * frac

    def interpolated(self, rows: np.ndarray) -> np.ndarray:
        """``sum_d L * R_child(post)`` for each child row, shape ``(M, A, Q)``."""
        out = rows[:, self.lo] * self.w_lo
        out += rows[:, self.lo + 1] * self.w_hi
        return out.sum(axis=2)

    def exact_risk(self, x: np.ndarray) -> np.ndarray:
        if self._envelope is None:
            return _helstrom_error(self.rho_plus, self.rho_minus, x)
        return self._envelope(x)


def _candidates(sub: _Subsystem, child_vals: np.ndarray) -> np.ndarray:
    """Expected child risk per (mask, action, grid point)."""
    return np.einsum("adq,madq->maq", sub.lik, child_vals)


def _reduce_actions(cand: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    if cand.shape[1] == 1:
        return cand[:, 0, :], np.zeros((cand.shape[0], cand.shape[2]), dtype=np.intp)
    a = np.argmin(cand, axis=1)
    val = np.take_along_axis(cand, a[:, None, :], axis=1)[:, 0, :]
    return val, a


def _resolve_actions(problem: DiscriminationProblem, mode: str, actions: ActionSpace | None) -> ActionSpace:
    if mode == "order_opt_mlg":
        return modified_helstrom_space()
    if mode == "order_opt_lg":
        return helstrom_space()
    if actions is not None:
        return actions
    if mode == "fixed_order":
        return modified_helstrom_space()
    if problem.dim == 2:
        return qubit_action_space(DEFAULT_Q_PHI)
    raise ParameterError("an explicit action space is required for qutrit MOODY tables")


def build_risk_tables(
    problem: DiscriminationProblem,
    mode: str = "moody_best",
    actions: ActionSpace | None = None,
    q_p: int = DEFAULT_Q_P,
    *,
    fast_path: bool | None = None,
    n_cap: int = DEFAULT_N_CAP,
) -> RiskTables:
    """Fill ``R_S`` for every subset ``S`` of the problem's subsystems.

    Modes:
        ``moody_best``: min over subsystem and action.
        ``moody_worst``: max over subsystem of min over action.
        ``order_opt_mlg`` / ``order_opt_lg``: min over subsystem, action fixed
            to the modified / plain Helstrom measurement at the current belief.
        ``fixed_order``: subsystems in index order, min over ``actions``
            (modified Helstrom when no action space is given).

    ``fast_path`` keys tables by ``|S|``; ``None`` enables it automatically for
    identical copies.
    """
    return build_risk_tables_multi(problem, (mode,), actions, q_p, fast_path=fast_path, n_cap=n_cap)[mode]


def build_risk_tables_multi(
    problem: DiscriminationProblem,
    modes: Iterable[str],
    actions: ActionSpace | None = None,
    q_p: int = DEFAULT_Q_P,
    *,
    fast_path: bool | None = None,
    n_cap: int = DEFAULT_N_CAP,
) -> dict:
    """Tables for several modes sharing one action space, e.g. best and worst order.

    Work common to all modes is done once. Returns a dict keyed by mode.
    """
    modes = tuple(modes)
    if not modes or any(m not in MODES for m in modes):
        raise ParameterError(f"modes must be a non-empty subset of {MODES}, got {modes}")
    resolved = {repr(_resolve_actions(problem, m, actions).descriptor) for m in modes}
    if len(resolved) != 1:
        raise ParameterError("all modes built together must share one action space")
    mode = modes[0]
    if q_p < 3:
        raise ParameterError("Q_p must be at least 3")
    n = problem.n
    if n > n_cap:
        raise ResourceError(f"N={n} exceeds the DP cap of {n_cap}")
    actions = _resolve_actions(problem, mode, actions)
    if not actions.is_belief_dependent and actions.actions[0].dim != problem.dim:
        raise ParameterError("action space dimension does not match the problem")
    if n > WARN_N and not actions.is_belief_dependent:
        warnings.warn(f"DP over {1 << n} subsets with {len(actions)} actions may be slow", RuntimeWarning)
    if fast_path is None:
        fast_path = problem.is_identical_copies()
    grid = np.linspace(0.0, 1.0, q_p)
    subs = [_Subsystem(*problem.pair(k), actions, grid) for k in range(1 if fast_path else n)]
    if fast_path:
        by_size = _fill_by_size(subs[0], n, grid)
        filled = {m: tuple(a.copy() for a in by_size) for m in modes}
    else:
        filled = _fill_by_mask(subs, n, grid, modes)
    out = {}
    for m, (risk, pk, pa) in filled.items():
        if actions.is_belief_dependent:
            pa[:] = -1
        for arr in (risk, pk, pa):
            arr.setflags(write=False)
        out[m] = RiskTables(m, n, risk, pk, pa, bool(fast_path), problem.content_hash(), actions)
    return out


def _fill_by_size(sub: _Subsystem, n: int, grid: np.ndarray):
    q_p = grid.size
    risk = np.empty((n + 1, q_p))
    pk = np.full((n + 1, q_p), -1, dtype=np.int32)
    pa = np.full((n + 1, q_p), -1, dtype=np.int32)
    risk[0] = np.minimum(grid, 1.0 - grid)
    for s in range(1, n + 1):
        if s == 1:
            cand = sub.terminal[None]
        elif s == 2:
            cand = _candidates(sub, sub.exact_risk(sub.post)[None])
        else:
            cand = sub.interpolated(risk[s - 1][None])
        val, a = _reduce_actions(cand)
        risk[s], pa[s] = val[0], a[0]
        pk[s] = 0  # lowest-index unmeasured subsystem
    return risk, pk, pa


def _child_candidates(subs, sub: _Subsystem, child_masks: np.ndarray, risk, s: int) -> np.ndarray:
    if s == 1:
        return np.broadcast_to(sub.terminal, (child_masks.size,) + sub.terminal.shape)
    if s == 2:
        child = np.empty((child_masks.size,) + sub.post.shape)
        for i, cm in enumerate(child_masks):
            child[i] = subs[_lowest_bit(int(cm))].exact_risk(sub.post)
        return _candidates(sub, child)
    return sub.interpolated(risk[child_masks])


def _fill_by_mask(subs, n: int, grid: np.ndarray, modes: tuple) -> dict:
    """Fill tables for several modes at once.

    The first two levels have exactly evaluated children and are identical
    for every mode, so their candidates are computed once.
    """
    q_p = grid.size
    size = 1 << n
    out = {}
    for mode in modes:
        risk = np.empty((size, q_p))
        risk[0] = np.minimum(grid, 1.0 - grid)
        out[mode] = (risk, np.full((size, q_p), -1, dtype=np.int32), np.full((size, q_p), -1, dtype=np.int32))
    all_masks = np.arange(size)
    popcount = np.array([bin(m).count("1") for m in range(size)])
    for s in range(1, n + 1):
        level = all_masks[popcount == s]
        lowest = level & -level
        state = {}
        for mode in modes:
            worst = mode == "moody_worst"
            state[mode] = (
                np.full((level.size, q_p), -np.inf if worst else np.inf),
                np.full((level.size, q_p), -1, dtype=np.int32),
                np.full((level.size, q_p), -1, dtype=np.int32),
            )
        for k in range(n):
            rows = np.nonzero((level >> k) & 1)[0]
            if rows.size == 0:
                continue
            sub = subs[k]
            step = max(1, _BLOCK_ELEMENTS // int(np.prod(sub.post.shape)))
            for start in range(0, rows.size, step):
                blk = rows[start : start + step]
                shared = None
                for mode in modes:
                    if s <= 2:
                        if shared is None:
                            shared = _reduce_actions(_child_candidates(subs, sub, level[blk] ^ (1 << k), None, s))
                        val, a = shared
                    else:
                        cand = _child_candidates(subs, sub, level[blk] ^ (1 << k), out[mode][0], s)
                        val, a = _reduce_actions(cand)
                    best_val, best_k, best_a = state[mode]
                    cur = best_val[blk]
                    better = val > cur if mode == "moody_worst" else val < cur
                    if mode == "fixed_order":
                        better &= (lowest[blk] == (1 << k))[:, None]
                    np.copyto(cur, val, where=better)
                    best_val[blk] = cur
                    kk = best_k[blk]
                    kk[better] = k
                    best_k[blk] = kk
                    aa = best_a[blk]
                    np.copyto(aa, a, where=better, casting="unsafe")
                    best_a[blk] = aa
        for mode in modes:
            risk, pk, pa = out[mode]
            risk[level], pk[level], pa[level] = state[mode]
    return out


def evaluate(tables: RiskTables, q: float, subset=None) -> float:
    """Success probability ``1 - R_S(q)``, interpolated between grid points.

    ``S`` defaults to all subsystems; any subset gives the success of the
    sub-problem restricted to those subsystems.
    """
    if not 0.0 <= q <= 1.0:
        raise ParameterError(f"q must lie in [0, 1], got {q!r}")
    row = tables.risk_of(tables.full_mask if subset is None else subset)
    return float(1.0 - _interp_rows(row[None], np.asarray(q, dtype=np.float64))[0])


def _nearest_index(q_p: int, p: float) -> int:
    pos = p * (q_p - 1)
    lo = int(np.floor(pos))
    lo = min(max(lo, 0), q_p - 1)
    if lo + 1 < q_p and (pos - lo) > 0.5:
        return lo + 1
    return lo


def next_action(tables: RiskTables, subset, p: float, problem: DiscriminationProblem | None = None):
    """Chosen ``(k, measurement)`` for unmeasured ``subset`` at belief ``p``.

    The stored choice at the nearest grid point is used (the lower one when
    equidistant). Belief-dependent actions are rebuilt at the exact ``p`` and
    need ``problem``.
    """
    mask = _as_mask(subset, tables.n)
    if mask == 0:
        raise ParameterError("no unmeasured subsystem left")
    if not 0.0 <= p <= 1.0:
        raise ParameterError(f"belief must lie in [0, 1], got {p!r}")
    i = _nearest_index(tables.q_p, p)
    row = tables.row(mask)
    k = _lowest_bit(mask) if tables.keyed_by_size else int(tables.policy_k[row, i])
    if tables.actions.is_belief_dependent:
        if problem is None:
            raise ParameterError("belief-dependent policies need the problem to build the measurement")
        build = modified_helstrom if tables.actions.is_modified_helstrom else helstrom
        return k, build(p, *problem.pair(k))
    return k, tables.actions.actions[int(tables.policy_a[row, i])]


@dataclass(frozen=True)
class Trajectory:
    subsystems: tuple
    measurements: tuple = field(repr=False)
    outcomes: tuple
    beliefs: tuple
    decode: int
    true_state: int

    @property
    def correct(self) -> bool:
        return self.decode == self.true_state


def simulate_episode(tables: RiskTables, problem: DiscriminationProblem, true_state: int, rng_seed) -> Trajectory:
    """Sample one run of the policy with outcomes drawn under ``true_state`` (+1 or -1)."""
    if true_state not in (1, -1):
        raise ParameterError("true_state must be +1 or -1")
    check_tables(tables, problem)
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(rng_seed)))
    p = problem.prior_q
    mask = tables.full_mask
    ks, ms, ds, beliefs = [], [], [], [p]
    while mask:
        k, meas = next_action(tables, mask, p, problem)
        rho_plus, rho_minus = problem.pair(k)
        probs = meas.probabilities(rho_plus if true_state == 1 else rho_minus)
        d = int(rng.choice(meas.n_outcomes, p=probs / probs.sum()))
        pp = float(np.einsum("ij,ji->", meas.projectors[d], rho_plus))
        pm = float(np.einsum("ij,ji->", meas.projectors[d], rho_minus))
        lik = pp * p + pm * (1.0 - p)
        if lik <= 0.0:
            raise ImpossibleObservationError("sampled an outcome of zero likelihood")
        p = min(1.0, max(0.0, pp * p / lik))
        ks.append(k)
        ms.append(meas)
        ds.append(d)
        beliefs.append(p)
        mask &= ~(1 << k)
    if p > 0.5:
        decode = 1
    elif p < 0.5:
        decode = -1
    else:
        decode = 1 if rng.random() < 0.5 else -1
    return Trajectory(tuple(ks), tuple(ms), tuple(ds), tuple(beliefs), decode, true_state)


def check_tables(tables: RiskTables, problem: DiscriminationProblem) -> None:
    if tables.problem_hash != problem.content_hash():
        raise StalePolicyError("policy tables were built for a different problem")


def policy_map(tables: RiskTables, subset=None) -> list[tuple[float, int, int]]:
    """``(grid p, k, action index)`` for every grid point of ``subset`` (default: all)."""
    mask = tables.full_mask if subset is None else _as_mask(subset, tables.n)
    row = tables.row(mask)
    ks = tables.policy_k[row]
    if tables.keyed_by_size:
        ks = np.full_like(ks, _lowest_bit(mask) if mask else -1)
    return [(float(g), int(k), int(a)) for g, k, a in zip(tables.grid, ks, tables.policy_a[row])]


def save_tables(tables: RiskTables, path: str | Path) -> None:
    """Write tables as JSON (see the README for the layout)."""
    doc = {
        "format_version": FORMAT_VERSION,
        "problem_hash": tables.problem_hash,
        "N": tables.n,
        "Q_p": tables.q_p,
        "mode": tables.mode,
        "keyed_by_size": tables.keyed_by_size,
        "action_space": tables.actions.to_descriptor(),
        "risk": tables.risk.tolist(),
        "policy_k": tables.policy_k.tolist(),
        "policy_a": tables.policy_a.tolist(),
    }
    Path(path).write_text(json.dumps(doc, separators=(",", ":")), encoding="utf-8")


def load_tables(path: str | Path, problem: DiscriminationProblem | None = None) -> RiskTables:
    """Read tables written by :func:`save_tables`; verifies the problem hash if given."""
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise PolicyFormatError(f"cannot read policy file {path}: {exc}") from None
    try:
        if doc["format_version"] != FORMAT_VERSION:
            raise PolicyFormatError(f"unsupported format_version {doc['format_version']!r}")
        n, q_p, mode = int(doc["N"]), int(doc["Q_p"]), doc["mode"]
        by_size = bool(doc["keyed_by_size"])
        risk = np.array(doc["risk"], dtype=np.float64)
        pk = np.array(doc["policy_k"], dtype=np.int32)
        pa = np.array(doc["policy_a"], dtype=np.int32)
        actions = action_space_from_descriptor(doc["action_space"])
        problem_hash = str(doc["problem_hash"])
    except (KeyError, TypeError, ValueError, ParameterError) as exc:
        raise PolicyFormatError(f"malformed policy file {path}: {exc}") from None
    rows = n + 1 if by_size else 1 << n
    if mode not in MODES or any(a.shape != (rows, q_p) for a in (risk, pk, pa)):
        raise PolicyFormatError(f"policy file {path} has inconsistent shapes or mode")
    for arr in (risk, pk, pa):
        arr.setflags(write=False)
    tables = RiskTables(mode, n, risk, pk, pa, by_size, problem_hash, actions)
    if problem is not None:
        check_tables(tables, problem)
    return tables


def brute_force_risk(
    problem: DiscriminationProblem,
    actions: ActionSpace,
    p: float,
    mask: int | None = None,
    *,
    worst: bool = False,
) -> float:
    """Exhaustive expected error over orders, actions and outcome words.

    Minimizes over subsystem and action, or with ``worst`` maximizes over the
    subsystem and minimizes over the action. Exponential in N; meant as a
    test oracle for small problems.
    """
    if mask is None:
        mask = (1 << problem.n) - 1
    if mask == 0:
        return min(p, 1.0 - p)
    per_k = []
    for k in _bits(mask):
        rho_plus, rho_minus = problem.pair(k)
        meas_list: Iterable[ProjectiveMeasurement]
        if actions.is_belief_dependent:
            build = modified_helstrom if actions.is_modified_helstrom else helstrom
            meas_list = [build(p, rho_plus, rho_minus)]
        else:
            meas_list = actions.actions
        best = np.inf
        for meas in meas_list:
            total = 0.0
            for d in range(meas.n_outcomes):
                pp = float(np.einsum("ij,ji->", meas.projectors[d], rho_plus))
                pm = float(np.einsum("ij,ji->", meas.projectors[d], rho_minus))
                lik = pp * p + pm * (1.0 - p)
                if lik > 0.0:
                    child = brute_force_risk(problem, actions, pp * p / lik, mask & ~(1 << k), worst=worst)
                    total += lik * child
            best = min(best, total)
        per_k.append(best)
    return float(max(per_k) if worst else min(per_k))


def _bits(mask: int) -> list[int]:
    return [k for k in range(mask.bit_length()) if (mask >> k) & 1]


__all__ = [
    "MODES",
    "RiskTables",
    "Trajectory",
    "brute_force_risk",
    "build_risk_tables",
    "build_risk_tables_multi",
    "check_tables",
    "evaluate",
    "load_tables",
    "next_action",
    "policy_map",
    "save_tables",
    "simulate_episode",
]
