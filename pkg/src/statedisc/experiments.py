"""Seeded Monte Carlo harness for the figure studies, with CSV output.

Every averaged value is a mean of exactly computed per-trial success
probabilities, so run-to-run variation comes only from state sampling.

Randomness: each (trial, subsystem, hypothesis) triple owns a Philox
substream derived from ``SeedSequence(seed, spawn_key=(t, j, h))``. Sampled
angles are therefore shared across every gamma of a run and do not depend on
which other gammas, N values or worker counts were requested.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from .dp import build_risk_tables, build_risk_tables_multi, evaluate
from .errors import ParameterError, ResourceError
from .greedy import greedy_prefix_success
from .measurements import qubit_action_space, qutrit_action_spaces
from .problem import DiscriminationProblem
from .quantum import depolarize, pure_qubit, pure_qutrit

FIGURE_IDS = (
    "fig1_lg_copies",
    "fig2_mlg_copies",
    "fig3_qubit_order",
    "fig4_order_diff",
    "fig5_qutrit_succ",
    "fig6_qutrit_diff",
    "appB_lg_distinct",
    "appB_comparison",
)
CSV_HEADER = ("figure_id", "series", "x", "mean", "stderr", "n_trial", "seed")
DEFAULT_SEED = 20240101
QUTRIT_N_CAP = 3

_GREEDY_GAMMAS = (0.01, 0.05, 0.1, 0.3)
_ORDER_GAMMAS = (0.0, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0)
_QUTRIT_GAMMAS = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6)
_N12 = tuple(range(1, 13))

# (defaults, paper-scale overrides) per figure
_FIGURE_DEFAULTS: dict[str, tuple[dict, dict]] = {
    "fig1_lg_copies": ({"gamma_set": _GREEDY_GAMMAS, "N_set": _N12}, {}),
    "fig2_mlg_copies": ({"gamma_set": _GREEDY_GAMMAS, "N_set": _N12}, {}),
    "fig3_qubit_order": ({"gamma_set": _ORDER_GAMMAS, "N_set": (3,)}, {}),
    "fig4_order_diff": (
        {"gamma_set": _ORDER_GAMMAS, "N_set": (3, 4), "n_trial": 100},
        {"N_set": (3, 4, 5, 6, 7), "n_trial": 1000},
    ),
    "fig5_qutrit_succ": ({"gamma_set": _QUTRIT_GAMMAS, "N_set": (3,), "n_trial": 100}, {"n_trial": 1000}),
    "fig6_qutrit_diff": ({"gamma_set": _QUTRIT_GAMMAS, "N_set": (3,), "n_trial": 100}, {"n_trial": 1000}),
    "appB_lg_distinct": ({"gamma_set": _GREEDY_GAMMAS, "N_set": _N12, "Q_p": 201}, {"Q_p": 1001}),
    "appB_comparison": ({"gamma_set": (0.3,), "N_set": _N12, "Q_p": 201}, {"Q_p": 1001}),
}


@dataclass(frozen=True)
class ExperimentConfig:
    """Resolved settings of one figure run.

    ``distinct`` samples an independent pair per subsystem for the greedy
    figures (fig1/fig2), which otherwise use identical copies.
    """

    figure_id: str
    n_trial: int = 1000
    seed: int = DEFAULT_SEED
    gamma_set: tuple = ()
    N_set: tuple = ()
    Q_p: int = 1001
    Q_phi: int = 128
    qutrit_quantization: tuple = ((2,), 4)
    threads: int = 1
    distinct: bool = False
    paper_scale: bool = field(default=False, compare=False)

    def __post_init__(self):
        if self.figure_id not in FIGURE_IDS:
            raise ParameterError(f"unknown figure_id {self.figure_id!r}; expected one of {FIGURE_IDS}")
        if int(self.n_trial) < 1:
            raise ParameterError("n_trial must be at least 1")
        gam = tuple(float(g) for g in self.gamma_set)
        if not gam or any(not 0.0 <= g <= 1.0 for g in gam):
            raise ParameterError(f"gamma_set must be a non-empty list of values in [0, 1], got {self.gamma_set!r}")
        ns = tuple(sorted({int(n) for n in self.N_set}))
        if not ns or ns[0] < 1:
            raise ParameterError(f"N_set must be a non-empty list of positive integers, got {self.N_set!r}")
        if not 0 <= int(self.seed) < 2**64:
            raise ParameterError("seed must be a 64-bit unsigned integer")
        if int(self.Q_p) < 3 or int(self.Q_phi) < 1:
            raise ParameterError("need Q_p >= 3 and Q_phi >= 1")
        try:
            r_vec, q = self.qutrit_quantization
            quant = (tuple(int(r) for r in r_vec), int(q))
        except (TypeError, ValueError):
            raise ParameterError("qutrit_quantization must be (r_vec, Q)") from None
        if quant[1] < 1 or any(r < 1 for r in quant[0]):
            raise ParameterError("qutrit quantization needs Q >= 1 and positive subdivision counts")
        if self.figure_id.startswith(("fig5", "fig6")) and ns[-1] > QUTRIT_N_CAP:
            raise ResourceError(f"qutrit MOODY runs are limited to N <= {QUTRIT_N_CAP}")
        for name, val in (
            ("n_trial", int(self.n_trial)),
            ("seed", int(self.seed)),
            ("gamma_set", gam),
            ("N_set", ns),
            ("Q_p", int(self.Q_p)),
            ("Q_phi", int(self.Q_phi)),
            ("qutrit_quantization", quant),
            ("threads", max(1, int(self.threads))),
        ):
            object.__setattr__(self, name, val)

    @classmethod
    def for_figure(cls, figure_id: str, paper_scale: bool = False, **overrides) -> "ExperimentConfig":
        """Figure defaults, optionally at full scale, then ``overrides`` on top."""
        if figure_id not in _FIGURE_DEFAULTS:
            raise ParameterError(f"unknown figure_id {figure_id!r}; expected one of {FIGURE_IDS}")
        base, full = _FIGURE_DEFAULTS[figure_id]
        kw = dict(base)
        if paper_scale:
            kw.update(full)
        kw.update({k: v for k, v in overrides.items() if v is not None})
        return cls(figure_id=figure_id, paper_scale=paper_scale, **kw)

    @classmethod
    def from_dict(cls, doc: dict[str, Any]) -> "ExperimentConfig":
        """Config from a JSON document using the field names; unset fields take figure defaults."""
        if not isinstance(doc, dict) or "figure_id" not in doc:
            raise ParameterError("experiment config needs a 'figure_id'")
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(doc) - names
        if unknown:
            raise ParameterError(f"unknown config fields {sorted(unknown)}")
        rest = {k: v for k, v in doc.items() if k not in ("figure_id", "paper_scale")}
        return cls.for_figure(doc["figure_id"], bool(doc.get("paper_scale", False)), **rest)

    def to_dict(self) -> dict[str, Any]:
        d = dataclasses.asdict(self)
        d["gamma_set"] = list(self.gamma_set)
        d["N_set"] = list(self.N_set)
        d["qutrit_quantization"] = [list(self.qutrit_quantization[0]), self.qutrit_quantization[1]]
        return d

    def describe(self) -> str:
        r_vec, q = self.qutrit_quantization
        scale = "paper-scale" if self.paper_scale else "default scale"
        return (
            f"{self.figure_id} ({scale}): n_trial={self.n_trial} seed={self.seed} "
            f"gamma_set={list(self.gamma_set)} N_set={list(self.N_set)} Q_p={self.Q_p} "
            f"Q_phi={self.Q_phi} r_vec={list(r_vec)} Q={q} distinct={self.distinct}"
        )


@dataclass(frozen=True)
class FigureRecord:
    figure_id: str
    series: str
    x: float
    mean: float
    stderr: float
    n_trial: int
    seed: int

    def __post_init__(self):
        if self.stderr < 0.0:
            raise ParameterError("stderr must be non-negative")


def substream(seed: int, trial: int, subsystem: int, hypothesis: int) -> np.random.Generator:
    """Independent Philox stream for one (trial, subsystem, hypothesis) triple."""
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(trial), int(subsystem), int(hypothesis)))
    return np.random.Generator(np.random.Philox(ss))


def sample_uniform_angle(rng: np.random.Generator) -> float:
    """Uniform angle in the open interval (0, 2 pi)."""
    while True:
        u = rng.random()
        if u > 0.0:
            return float(2.0 * np.pi * u)


def sphere_angles(alpha: float, beta: float) -> tuple[float, float]:
    """``(2 pi alpha, arccos(1 - 2 beta))``: uniform on the sphere for uniform inputs."""
    return float(2.0 * np.pi * alpha), float(np.arccos(1.0 - 2.0 * beta))


def sample_uniform_sphere(rng: np.random.Generator) -> tuple[float, float]:
    """Polar angles ``(phi, theta)`` of a uniformly distributed unit vector."""
    return sphere_angles(rng.random(), rng.random())


def _qubit_angles(seed: int, trial: int, n_sub: int) -> np.ndarray:
    return np.array(
        [[sample_uniform_angle(substream(seed, trial, j, h)) for h in (0, 1)] for j in range(n_sub)]
    )


def _qutrit_angles(seed: int, trial: int, n_sub: int) -> np.ndarray:
    return np.array(
        [[sample_uniform_sphere(substream(seed, trial, j, h)) for h in (0, 1)] for j in range(n_sub)]
    )


def _qubit_problem(angles: np.ndarray, gamma: float) -> DiscriminationProblem:
    pairs = [(depolarize(pure_qubit(a), gamma, 2), depolarize(pure_qubit(b), gamma, 2)) for a, b in angles]
    return DiscriminationProblem.from_pairs(pairs, 0.5, gammas=((gamma, gamma),) * len(pairs))


def _qutrit_problem(angles: np.ndarray, gamma: float) -> DiscriminationProblem:
    pairs = [
        (depolarize(pure_qutrit(*a), gamma, 3), depolarize(pure_qutrit(*b), gamma, 3)) for a, b in angles
    ]
    return DiscriminationProblem.from_pairs(pairs, 0.5, gammas=((gamma, gamma),) * len(pairs))


def _prefix_masks(n_set: Sequence[int]) -> list[int]:
    return [(1 << n) - 1 for n in n_set]


def _block_greedy(cfg: ExperimentConfig, trials: range, modified: bool, distinct: bool) -> dict:
    n_max = cfg.N_set[-1]
    n_sub = n_max if distinct else 1
    angles = np.stack([_qubit_angles(cfg.seed, t, n_sub) for t in trials])
    cols = list(cfg.N_set)
    out = {}
    for g in cfg.gamma_set:
        rp = np.stack([depolarize(pure_qubit(a), g, 2) for a in angles[..., 0].ravel()])
        rm = np.stack([depolarize(pure_qubit(b), g, 2) for b in angles[..., 1].ravel()])
        rp = rp.reshape(len(trials), n_sub, 2, 2)
        rm = rm.reshape(len(trials), n_sub, 2, 2)
        if not distinct:
            rp = np.broadcast_to(rp, (len(trials), n_max, 2, 2))
            rm = np.broadcast_to(rm, (len(trials), n_max, 2, 2))
        out[f"gamma={g:g}"] = greedy_prefix_success(rp, rm, 0.5, modified=modified)[:, cols]
    return out


def _block_order_opt_lg(cfg: ExperimentConfig, trials: range, gammas: Sequence[float], prefix: str = "gamma=") -> dict:
    n_max = cfg.N_set[-1]
    masks = _prefix_masks(cfg.N_set)
    out = {g: np.empty((len(trials), len(masks))) for g in gammas}
    for i, t in enumerate(trials):
        angles = _qubit_angles(cfg.seed, t, n_max)
        for g in gammas:
            tab = build_risk_tables(_qubit_problem(angles, g), "order_opt_lg", q_p=cfg.Q_p, fast_path=False)
            out[g][i] = [evaluate(tab, 0.5, m) for m in masks]
    return {f"{prefix}{g:g}": v for g, v in out.items()}


def _block_qubit_order(cfg: ExperimentConfig, trials: range) -> dict:
    n_max = cfg.N_set[-1]
    masks = _prefix_masks(cfg.N_set)
    actions = qubit_action_space(cfg.Q_phi)
    best = np.empty((len(trials), len(cfg.N_set), len(cfg.gamma_set)))
    worst = np.empty_like(best)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        for i, t in enumerate(trials):
            angles = _qubit_angles(cfg.seed, t, n_max)
            for c, g in enumerate(cfg.gamma_set):
                tabs = build_risk_tables_multi(
                    _qubit_problem(angles, g), ("moody_best", "moody_worst"), actions, cfg.Q_p, fast_path=False
                )
                best[i, :, c] = [evaluate(tabs["moody_best"], 0.5, m) for m in masks]
                worst[i, :, c] = [evaluate(tabs["moody_worst"], 0.5, m) for m in masks]
    return {"best": best, "worst": worst}


def _block_qutrit(cfg: ExperimentConfig, trials: range) -> dict:
    n = cfg.N_set[-1]
    ternary, binary = qutrit_action_spaces(*cfg.qutrit_quantization)
    out = {k: np.empty((len(trials), len(cfg.gamma_set))) for k in ("ternary_best", "ternary_worst", "binary_best", "binary_worst")}
    for i, t in enumerate(trials):
        angles = _qutrit_angles(cfg.seed, t, n)
        for c, g in enumerate(cfg.gamma_set):
            prob = _qutrit_problem(angles, g)
            for name, space in (("ternary", ternary), ("binary", binary)):
                tabs = build_risk_tables_multi(prob, ("moody_best", "moody_worst"), space, cfg.Q_p, fast_path=False)
                out[f"{name}_best"][i, c] = evaluate(tabs["moody_best"], 0.5)
                out[f"{name}_worst"][i, c] = evaluate(tabs["moody_worst"], 0.5)
    return out


def _trial_block(cfg: ExperimentConfig, trials: range) -> dict:
    fid = cfg.figure_id
    if fid == "fig1_lg_copies":
        return _block_greedy(cfg, trials, False, cfg.distinct)
    if fid == "fig2_mlg_copies":
        return _block_greedy(cfg, trials, True, cfg.distinct)
    if fid in ("fig3_qubit_order", "fig4_order_diff"):
        return _block_qubit_order(cfg, trials)
    if fid in ("fig5_qutrit_succ", "fig6_qutrit_diff"):
        return _block_qutrit(cfg, trials)
    if fid == "appB_lg_distinct":
        return _block_order_opt_lg(cfg, trials, cfg.gamma_set)
    if fid == "appB_comparison":
        out = {f"copies_lg {k}": v for k, v in _block_greedy(cfg, trials, False, False).items()}
        out.update(_block_order_opt_lg(cfg, trials, cfg.gamma_set, "distinct_order_opt_lg gamma="))
        return out
    raise ParameterError(f"unknown figure_id {fid!r}")


def _chunks(n_trial: int, parts: int) -> list[range]:
    parts = max(1, min(parts, n_trial))
    edges = np.linspace(0, n_trial, parts + 1).astype(int)
    return [range(a, b) for a, b in zip(edges[:-1], edges[1:]) if b > a]


def run_trials(cfg: ExperimentConfig) -> dict[str, np.ndarray]:
    """Per-trial exact success values, keyed by raw series name.

    Arrays have the trial index first. Results are bit-identical for any
    ``cfg.threads`` because every trial draws from its own substreams.
    """
    if cfg.threads <= 1 or cfg.n_trial == 1:
        return _trial_block(cfg, range(cfg.n_trial))
    blocks = _chunks(cfg.n_trial, 4 * cfg.threads)
    with ProcessPoolExecutor(max_workers=cfg.threads) as pool:
        parts = list(pool.map(_trial_block, [cfg] * len(blocks), blocks))
    return {k: np.concatenate([p[k] for p in parts]) for k in parts[0]}


def _stats(values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    n = values.shape[0]
    mean = values.mean(axis=0)
    if n < 2:
        return mean, np.zeros_like(mean)
    return mean, values.std(axis=0, ddof=1) / np.sqrt(n)


def _records(cfg: ExperimentConfig, series: str, xs: Iterable[float], values: np.ndarray) -> list[FigureRecord]:
    mean, se = _stats(values)
    return [
        FigureRecord(cfg.figure_id, series, float(x), float(m), float(s), cfg.n_trial, cfg.seed)
        for x, m, s in zip(xs, mean, se)
    ]


def aggregate(cfg: ExperimentConfig, raw: dict[str, np.ndarray]) -> list[FigureRecord]:
    """Turn per-trial values into sorted figure records (paired differences where the figure plots them)."""
    fid = cfg.figure_id
    recs: list[FigureRecord] = []
    if fid == "fig3_qubit_order":
        for name in ("best", "worst"):
            recs += _records(cfg, name, cfg.gamma_set, raw[name][:, -1, :])
    elif fid == "fig4_order_diff":
        diff = raw["best"] - raw["worst"]
        for c, n in enumerate(cfg.N_set):
            recs += _records(cfg, f"N={n}", cfg.gamma_set, diff[:, c, :])
    elif fid == "fig5_qutrit_succ":
        for name, vals in raw.items():
            recs += _records(cfg, name, cfg.gamma_set, vals)
    elif fid == "fig6_qutrit_diff":
        ref = raw["ternary_best"]
        for name in ("ternary_worst", "binary_best", "binary_worst"):
            recs += _records(cfg, f"ternary_best-{name}", cfg.gamma_set, ref - raw[name])
    else:
        for name, vals in raw.items():
            recs += _records(cfg, name, cfg.N_set, vals)
    return sorted(recs, key=lambda r: (r.series, r.x))


def run_experiment(cfg: ExperimentConfig) -> list[FigureRecord]:
    return aggregate(cfg, run_trials(cfg))


def _fmt(x: float) -> str:
    s = repr(float(x))
    return s[:-2] if s.endswith(".0") else s


def format_csv(records: Iterable[FigureRecord], comments: Sequence[str] = ()) -> str:
    buf = io.StringIO()
    for c in comments:
        buf.write(f"# {c}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in sorted(records, key=lambda r: (r.series, r.x)):
        w.writerow([r.figure_id, r.series, _fmt(r.x), _fmt(r.mean), _fmt(r.stderr), r.n_trial, r.seed])
    return buf.getvalue()


def emit_csv(records: Iterable[FigureRecord], path: str | Path, comments: Sequence[str] = ()) -> Path:
    """Write records as UTF-8 CSV with LF endings; ``comments`` become leading ``#`` lines."""
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(format_csv(records, comments))
    return path


def read_csv(path: str | Path) -> list[FigureRecord]:
    with open(path, encoding="utf-8", newline="") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    rows = list(csv.reader(lines))
    if not rows or tuple(rows[0]) != CSV_HEADER:
        raise ParameterError(f"{path}: missing or unexpected CSV header")
    return [
        FigureRecord(fid, series, float(x), float(m), float(se), int(n), int(seed))
        for fid, series, x, m, se, n, seed in rows[1:]
    ]
