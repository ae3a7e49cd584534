"""Bayesian tracking of the probability that the unknown state is rho_plus.

Beliefs are plain floats in [0, 1]. The log-likelihood-ratio form is kept as
an alternative parametrization with ``+inf`` / ``-inf`` standing for
certainty.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import ImpossibleObservationError, ParameterError
from .measurements import ProjectiveMeasurement

LIKELIHOOD_FLOOR = 1e-300


def _conditionals(a: ProjectiveMeasurement, pair, d: int) -> tuple[float, float]:
    if not 0 <= d < a.n_outcomes:
        raise ParameterError(f"outcome index {d} out of range for {a.n_outcomes} outcomes")
    rho_plus, rho_minus = pair
    proj = a.projectors[d]
    pp = float(np.einsum("ij,ji->", proj, np.asarray(rho_plus, dtype=np.float64)))
    pm = float(np.einsum("ij,ji->", proj, np.asarray(rho_minus, dtype=np.float64)))
    return min(1.0, max(0.0, pp)), min(1.0, max(0.0, pm))


def likelihood(p: float, a: ProjectiveMeasurement, pair, d: int) -> float:
    """Probability of outcome ``d`` given belief ``p``: P(d|+) p + P(d|-) (1 - p)."""
    pp, pm = _conditionals(a, pair, d)
    return pp * p + pm * (1.0 - p)


def posterior(p: float, a: ProjectiveMeasurement, pair, d: int) -> float:
    """Bayes update of the belief after observing outcome ``d`` of ``a``."""
    pp, pm = _conditionals(a, pair, d)
    lik = pp * p + pm * (1.0 - p)
    if lik < LIKELIHOOD_FLOOR:
        raise ImpossibleObservationError(f"outcome {d} has zero likelihood at p={p}")
    return min(1.0, max(0.0, pp * p / lik))


def logit(p: float) -> float:
    if p <= 0.0:
        return -math.inf
    if p >= 1.0:
        return math.inf
    return math.log(p) - math.log1p(-p)


def sigmoid(ell: float) -> float:
    if ell == math.inf:
        return 1.0
    if ell == -math.inf:
        return 0.0
    if ell >= 0:
        return 1.0 / (1.0 + math.exp(-ell))
    z = math.exp(ell)
    return z / (1.0 + z)


def llr_increment(a: ProjectiveMeasurement, pair, d: int) -> float:
    """ln P(d|rho_plus, a) - ln P(d|rho_minus, a), with infinite sentinels."""
    pp, pm = _conditionals(a, pair, d)
    if pp < LIKELIHOOD_FLOOR and pm < LIKELIHOOD_FLOOR:
        raise ImpossibleObservationError(f"outcome {d} is impossible under both hypotheses")
    if pm < LIKELIHOOD_FLOOR:
        return math.inf
    if pp < LIKELIHOOD_FLOOR:
        return -math.inf
    return math.log(pp) - math.log(pm)


def llr_update(ell: float, a: ProjectiveMeasurement, pair, d: int) -> float:
    """Additive log-likelihood-ratio update.

    Once a sentinel is reached it is absorbing; an outcome that contradicts a
    certain belief is impossible and raises.
    """
    inc = llr_increment(a, pair, d)
    if math.isinf(ell) and math.isinf(inc) and ell != inc:
        raise ImpossibleObservationError("outcome contradicts a certain belief")
    if math.isinf(ell):
        return ell
    return ell + inc
