import numpy as np
import pytest

from statedisc.problem import DiscriminationProblem
from statedisc.quantum import depolarize, pure_qubit, pure_qutrit


def random_density(rng, d: int = 2) -> np.ndarray:
    a = rng.normal(size=(d, d))
    m = a @ a.T
    return m / np.trace(m)


def random_pure_problem(rng, n: int, q: float = 0.5) -> DiscriminationProblem:
    th = rng.uniform(0.0, 2.0 * np.pi, (n, 2))
    return DiscriminationProblem.from_pairs([(pure_qubit(a), pure_qubit(b)) for a, b in th], q, pure=True)


def random_depolarized_problem(rng, n: int, gammas=None, q: float = 0.5, d: int = 2) -> DiscriminationProblem:
    gammas = rng.uniform(0.0, 0.6, n) if gammas is None else np.broadcast_to(gammas, (n,))
    pairs = []
    for g in gammas:
        if d == 2:
            a, b = rng.uniform(0.0, 2.0 * np.pi, 2)
            pairs.append((depolarize(pure_qubit(a), g), depolarize(pure_qubit(b), g)))
        else:
            a, b = rng.uniform(0.0, np.pi, (2, 2))
            pairs.append((depolarize(pure_qutrit(*a), g), depolarize(pure_qutrit(*b), g)))
    return DiscriminationProblem.from_pairs(pairs, q, gammas=tuple((g, g) for g in gammas))


def random_mixed_problem(rng, n: int, q: float = 0.5) -> DiscriminationProblem:
    return DiscriminationProblem.from_pairs([(random_density(rng), random_density(rng)) for _ in range(n)], q)


def identical_copies(rho_plus, rho_minus, n: int, q: float = 0.5) -> DiscriminationProblem:
    return DiscriminationProblem((rho_plus,) * n, (rho_minus,) * n, q)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
