import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hqea.qea_core import (
    DEFAULT_DELTA_THETA,
    ROTATION_TABLE,
    QbitIndividual,
    SolutionBank,
    migrate,
    new_individual,
    observe,
    qea_update,
    rotate_all,
    update_bank,
)

from oracles import binomial_ok

STEP = 0.01 * math.pi
angles = st.floats(-2 * math.pi, 2 * math.pi, allow_nan=False)


def bits(*b):
    return np.array(b, dtype=np.uint8)


class TestIndividual:
    def test_uniform_start(self):
        ind = new_individual(3)
        np.testing.assert_allclose(ind.prob_one, 0.5)
        assert new_individual(1).thetas[0] == math.pi / 4
        assert len(new_individual(200)) == 200

    def test_json_roundtrip(self):
        ind = QbitIndividual(np.array([0.1, -2.0, 7.5]))
        assert QbitIndividual.from_json(ind.to_json()) == ind

    @given(st.lists(angles, min_size=1, max_size=30))
    def test_normalized(self, thetas):
        ind = QbitIndividual(np.array(thetas))
        np.testing.assert_allclose(ind.alphas**2 + ind.betas**2, 1.0, atol=1e-12)


class TestObserve:
    def test_zero_angles(self, rng):
        assert observe(QbitIndividual(np.zeros(50)), rng).sum() == 0

    def test_half_pi(self, rng):
        assert observe(QbitIndividual(np.full(50, math.pi / 2)), rng).sum() == 50

    def test_frequency(self, rng):
        ind = new_individual(1)
        ones = sum(int(observe(ind, rng)[0]) for _ in range(10_000))
        assert binomial_ok(ones, 10_000, 0.5)

    def test_independent_bits(self, rng):
        ind = new_individual(2)
        draws = np.array([observe(ind, rng) for _ in range(10_000)], dtype=float)
        cov = np.cov(draws.T)[0, 1]
        # sd of the sample covariance of two independent Bernoulli(0.5) ~ 0.25/sqrt(N)
        assert abs(cov) <= 3 * 0.25 / math.sqrt(10_000)


class TestRotate:
    def test_identity(self):
        ind = QbitIndividual(np.array([0.3, 1.2]))
        assert rotate_all(ind, [0, 0]) == ind

    def test_to_one(self, rng):
        ind = rotate_all(new_individual(4), np.full(4, math.pi / 4))
        np.testing.assert_allclose(ind.thetas, math.pi / 2)
        assert observe(ind, rng).tolist() == [1, 1, 1, 1]

    def test_negative(self):
        assert rotate_all(QbitIndividual(np.zeros(1)), [-math.pi / 100]).thetas[0] == pytest.approx(-0.01 * math.pi)

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            rotate_all(new_individual(3), [0.1])

    @given(st.lists(st.tuples(angles, angles), min_size=1, max_size=20))
    def test_inverse(self, pairs):
        th, d = map(np.array, zip(*pairs))
        back = rotate_all(rotate_all(QbitIndividual(th), d), -d)
        np.testing.assert_allclose(back.thetas, th, atol=1e-12)


class TestQeaUpdate:
    def test_table_shape(self):
        assert len(ROTATION_TABLE) == 8
        assert {k for k, v in ROTATION_TABLE.items() if v} == {(0, 1, False), (1, 0, False)}

    def test_matching_bits_unchanged(self):
        ind = QbitIndividual(np.array([0.3, 2.0, -1.0]))
        x = bits(1, 0, 1)
        assert qea_update(ind, x, x, False) == ind
        assert qea_update(ind, x, x, True) == ind

    # one case per table row, first quadrant (alpha*beta > 0)
    @pytest.mark.parametrize(
        "x_i,b_i,not_worse,delta",
        [
            (0, 0, False, 0.0),
            (0, 0, True, 0.0),
            (0, 1, False, +STEP),
            (0, 1, True, 0.0),
            (1, 0, False, -STEP),
            (1, 0, True, 0.0),
            (1, 1, False, 0.0),
            (1, 1, True, 0.0),
        ],
    )
    def test_rows_first_quadrant(self, x_i, b_i, not_worse, delta):
        th = 0.3
        out = qea_update(QbitIndividual(np.array([th])), bits(x_i), bits(b_i), not_worse)
        assert out.thetas[0] == pytest.approx(th + delta, abs=1e-15)

    @pytest.mark.parametrize(
        "b_i,theta,delta",
        [
            (1, 3 * math.pi / 4, -STEP),  # alpha*beta < 0: back toward pi/2
            (0, 3 * math.pi / 4, +STEP),  # toward pi
            (1, -math.pi / 4, -STEP),  # toward -pi/2
            (0, -math.pi / 4, +STEP),  # toward 0
            (1, 0.0, +STEP),  # beta = 0, either way helps
            (0, 0.0, 0.0),  # already at bit 0
            (1, math.pi / 2, 0.0),  # already at bit 1
            (0, math.pi / 2, +STEP),  # alpha = 0, either way helps
        ],
    )
    def test_quadrants(self, b_i, theta, delta):
        out = qea_update(QbitIndividual(np.array([theta])), bits(1 - b_i), bits(b_i), False)
        assert out.thetas[0] - theta == pytest.approx(delta, abs=1e-15)

    @pytest.mark.parametrize("b_i", [0, 1])
    def test_moves_probability_toward_b(self, b_i):
        th = np.linspace(-3, 3, 61)
        th = th[np.abs(np.sin(2 * th)) > 1e-3]
        ind = QbitIndividual(th)
        n = th.size
        out = qea_update(ind, np.full(n, 1 - b_i, np.uint8), np.full(n, b_i, np.uint8), False)
        if b_i == 1:
            assert np.all(out.prob_one > ind.prob_one)
        else:
            assert np.all(out.prob_one < ind.prob_one)

    @given(
        st.lists(st.tuples(angles, st.integers(0, 1), st.integers(0, 1)), min_size=1, max_size=40),
        st.booleans(),
    )
    def test_step_sizes(self, rows, not_worse):
        th, x, b = (np.array(c) for c in zip(*rows))
        out = qea_update(QbitIndividual(th), x, b, not_worse)
        diff = np.abs(out.thetas - th)
        assert np.all(diff <= DEFAULT_DELTA_THETA + 1e-15)
        assert np.all((diff < 1e-12) | (np.abs(diff - STEP) < 1e-12))

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            qea_update(new_individual(3), bits(1, 0), bits(0, 1), False)


class TestBank:
    def _pop(self, *fits):
        return [(bits(i % 2, 1), f) for i, f in enumerate(fits)]

    def test_first_generation(self):
        bank = update_bank(SolutionBank(), self._pop(3, 8, 5))
        assert bank.fitness == (3, 8, 5)
        assert bank.best_fitness == 8

    def test_all_worse(self):
        bank = update_bank(SolutionBank(), self._pop(10, 10))
        again = update_bank(bank, self._pop(4, 9))
        assert again.fitness == bank.fitness
        assert all(a is b for a, b in zip(again.solutions, bank.solutions))

    def test_replace(self):
        bank = update_bank(SolutionBank(), self._pop(10, 3))
        bank = update_bank(bank, self._pop(12, 1))
        assert bank.fitness == (12, 3)
        assert bank.best_fitness >= 12

    def test_tie_keeps_incumbent(self):
        bank = update_bank(SolutionBank(), [(bits(1, 0), 5)])
        bank2 = update_bank(bank, [(bits(0, 1), 5)])
        assert bank2.solutions[0].tolist() == [1, 0]

    def test_size_mismatch(self):
        bank = update_bank(SolutionBank(), self._pop(1, 2))
        with pytest.raises(ValueError):
            update_bank(bank, self._pop(1))

    @given(st.lists(st.lists(st.integers(0, 100), min_size=4, max_size=4), min_size=1, max_size=20))
    def test_global_best_monotone(self, gens):
        bank = SolutionBank()
        last = -1
        for t, fits in enumerate(gens, 1):
            bank = update_bank(bank, self._pop(*fits))
            bank = migrate(bank, t, 3)
            assert bank.best_fitness >= last
            assert bank.best_fitness == max(max(g) for g in gens[:t])
            last = bank.best_fitness


class TestMigrate:
    def test_on_period(self):
        bank = update_bank(SolutionBank(), self._pop(1, 7, 3))
        out = migrate(bank, 100, 100)
        assert out.fitness == (7, 7, 7)
        assert all(np.array_equal(s, bank.best_solution) for s in out.solutions)

    def test_off_period(self):
        bank = update_bank(SolutionBank(), self._pop(1, 7))
        assert migrate(bank, 101, 100) is bank

    def test_every_generation(self):
        bank = update_bank(SolutionBank(), self._pop(1, 7))
        assert migrate(bank, 37, 1).fitness == (7, 7)

    def test_bad_period(self):
        with pytest.raises(ValueError):
            migrate(SolutionBank(), 1, 0)

    _pop = TestBank._pop
