import numpy as np
import pytest

from statedisc.bounds import (
    BoundReport,
    corollary1_bound,
    joint_helstrom_success,
    lemma1_depolarized,
    overlap_angle,
    plateau_report,
    problem_joint_success,
    problem_overlap_angles,
    theorem1,
)
from statedisc.errors import ParameterError, ResourceError
from statedisc.greedy import plateau_bound
from statedisc.measurements import modified_helstrom
from statedisc.belief import posterior
from statedisc.quantum import depolarize, pure_qubit, pure_qutrit, tensor

from conftest import random_density, random_pure_problem


def lemma1_inputs(q, rp, rm):
    """Rank of the Helstrom projector and the largest negative eigenvalue magnitude."""
    w = np.linalg.eigvalsh((1 - q) * rm - q * rp)
    return int((w >= -1e-12).sum()), float(-w[w < -1e-12].max())


class TestJointHelstrom:
    def test_orthogonal(self):
        rp = tensor([np.diag([1.0, 0.0])] * 2)
        rm = tensor([np.diag([0.0, 1.0]), np.diag([1.0, 0.0])])
        assert joint_helstrom_success(0.5, rp, rm) == pytest.approx(1.0)

    def test_certain_prior(self, rng):
        assert joint_helstrom_success(1.0, random_density(rng), random_density(rng)) == pytest.approx(1.0)

    def test_pure_products(self, rng):
        for n in range(1, 7):
            q = rng.uniform()
            prob = random_pure_problem(rng, n, q)
            assert problem_joint_success(prob) == pytest.approx(theorem1(q, problem_overlap_angles(prob)), abs=1e-9)

    def test_cap(self, rng):
        with pytest.raises(ResourceError):
            problem_joint_success(random_pure_problem(rng, 5), dim_cap=16)

    def test_mismatch(self):
        with pytest.raises(ParameterError):
            joint_helstrom_success(0.5, np.eye(2) / 2, np.eye(3) / 3)


class TestTheorem1:
    def test_examples(self):
        assert theorem1(0.5, [np.pi / 2]) == pytest.approx(1.0)
        assert theorem1(0.5, [np.pi / 4, np.pi / 4]) == pytest.approx(0.5 * (1 + np.sqrt(0.75)))
        assert theorem1(1.0, [0.3, 0.2]) == pytest.approx(1.0)

    def test_overlap_angle_range(self, rng):
        for _ in range(50):
            a, b = rng.normal(size=(2, 3))
            th = overlap_angle(a, b)
            assert 0 <= th <= np.pi / 2 + 1e-15
            assert overlap_angle(a, -b) == pytest.approx(th)


class TestLemma1:
    def test_equal_priors(self):
        r = lemma1_depolarized(0.9, 0.5, 0.2, 2, 1, 0.3)
        assert r.value == pytest.approx(0.1 + 0.8 * 0.9) and r.applicable

    def test_no_channel(self):
        assert lemma1_depolarized(0.83, 0.3, 0.0, 3, 2, 0.1).value == pytest.approx(0.83)

    @pytest.mark.parametrize("d", [2, 3])
    def test_matches_direct_eigensolve(self, rng, d):
        checked = 0
        for _ in range(300):
            q = rng.uniform(0.05, 0.5)
            gamma = rng.uniform(0.0, 0.3)
            if d == 2:
                a, b = rng.uniform(0, 2 * np.pi, 2)
                rp, rm = pure_qubit(a), pure_qubit(b)
            else:
                a, b = rng.uniform(0, np.pi, (2, 2))
                rp, rm = pure_qutrit(*a), pure_qutrit(*b)
            k, mag = lemma1_inputs(q, rp, rm)
            rep = lemma1_depolarized(joint_helstrom_success(q, rp, rm), q, gamma, d, k, mag)
            if not rep.applicable:
                continue
            checked += 1
            direct = joint_helstrom_success(q, depolarize(rp, gamma), depolarize(rm, gamma))
            assert rep.value == pytest.approx(direct, abs=1e-9)
        assert checked > 100

    def test_inapplicable_cases(self):
        assert not lemma1_depolarized(0.9, 0.7, 0.1, 2, 1, 0.5).applicable
        assert not lemma1_depolarized(0.9, 0.2, 1.0, 2, 1, 0.5).applicable
        rep = lemma1_depolarized(0.9, 0.1, 0.5, 2, 1, 0.01)
        assert not rep.applicable and rep.reason


class TestCorollary1:
    def test_examples(self):
        assert corollary1_bound(0.5, 0.3, 0.3) == pytest.approx(0.85)
        assert corollary1_bound(0.95, 0.3, 0.3) == pytest.approx(0.95)
        assert corollary1_bound(0.5, 0.1, 0.4) == pytest.approx(0.95)

    def test_never_violated(self, rng):
        for _ in range(500):
            q = rng.uniform()
            gp, gm = rng.uniform(0, 1, 2)
            a, b = rng.uniform(0, 2 * np.pi, 2)
            val = joint_helstrom_success(q, depolarize(pure_qubit(a), gp), depolarize(pure_qubit(b), gm))
            assert val <= corollary1_bound(q, gp, gm) + 1e-10


class TestPlateau:
    @pytest.mark.parametrize("gamma", [0.1, 0.3, 0.5])
    def test_tight_instance(self, gamma):
        rp, rm = depolarize(pure_qubit(np.pi / 2), gamma), depolarize(pure_qubit(-np.pi / 2), gamma)
        p = 1 - gamma / 2
        m = modified_helstrom(p, rp, rm)
        assert posterior(p, m, (rp, rm), 0) == pytest.approx(plateau_bound(gamma), abs=1e-9)

    def test_report(self):
        r = plateau_report(0.3)
        assert r.kind == "plateau" and r.value == pytest.approx(0.9698, abs=5e-5)
        with pytest.raises(ParameterError):
            BoundReport(0.5, "other")
