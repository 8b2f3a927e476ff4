"""Series evaluation, certified tails, quasi-periodicity and shift-law residuals."""

import math

import numpy as np
import pytest

from thetadecomp.errors import (
    DimensionMismatchError,
    RadiusUnachievableError,
    TruncationInsufficientError,
)
from thetadecomp.evaluation import (
    TruncationConfig,
    aux_theta_series,
    choose_radius,
    quasi_period_residual,
    shift_operator_check,
    tail_bound,
    theta_series,
    transformation_factor,
    wderiv_fd,
)
from thetadecomp.numerics import (
    MultiIndex,
    PeriodMatrix,
    enumerate_characteristics,
    validate_level,
)

LEVEL2 = validate_level([[2]])
LEVEL4 = validate_level([[4]])
HEX = validate_level([[2, 1], [1, 2]])
OMEGA_I = PeriodMatrix([[1j]])
CFG = TruncationConfig(radius=8, tail_tol=1e-10)

# frozen from the direct-summation oracle over |n| <= 10 (scratch derivation,
# re-checked by oracle_theta below)
THETA_M2_A0 = 1.0037348854877393
THETA_M2_AHALF = 0.4157606025960271


def oracle_theta(m, a, omega, w, nmax=10):
    """Independent direct summation over |n| <= nmax (h = g = 1 only)."""
    s = 0j
    for n in range(-nmax, nmax + 1):
        b = n + a
        s += np.exp(np.pi * 1j * m * (b * b * omega + 2 * w * b))
    return s


def chars(level, g=1):
    return enumerate_characteristics(level, g)


class TestThetaSeries:
    def test_frozen_value_a0(self):
        got = theta_series(LEVEL2, chars(LEVEL2)[0], OMEGA_I, [[0.0]], CFG)
        assert abs(got.value - THETA_M2_A0) < 1e-12 + got.tail_bound
        assert abs(complex(oracle_theta(2, 0.0, 1j, 0.0)) - THETA_M2_A0) < 1e-14

    def test_frozen_value_ahalf(self):
        got = theta_series(LEVEL2, chars(LEVEL2)[1], OMEGA_I, [[0.0]], CFG)
        assert abs(got.value - THETA_M2_AHALF) < 1e-12 + got.tail_bound
        assert abs(complex(oracle_theta(2, 0.5, 1j, 0.0)) - THETA_M2_AHALF) < 1e-14

    def test_integer_shift_invariance(self):
        w = np.array([[0.1 + 0.2j]])
        base = theta_series(LEVEL2, chars(LEVEL2)[0], OMEGA_I, w, CFG)
        shifted = theta_series(LEVEL2, chars(LEVEL2)[0], OMEGA_I, w + 1.0, CFG)
        assert abs(base.value - shifted.value) <= base.tail_bound + shifted.tail_bound + 1e-12

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            theta_series(LEVEL2, chars(LEVEL2)[0], OMEGA_I, [[0.0, 0.0]], CFG)

    def test_wrong_level_char(self):
        with pytest.raises(DimensionMismatchError):
            theta_series(LEVEL2, chars(LEVEL4)[0], OMEGA_I, [[0.0]], CFG)

    def test_truncation_insufficient(self):
        tight = TruncationConfig(radius=1, tail_tol=1e-14)
        with pytest.raises(TruncationInsufficientError):
            theta_series(LEVEL2, chars(LEVEL2)[0], OMEGA_I, [[0.5j]], tight)

    def test_near_boundary_omega_rejected(self):
        shallow = PeriodMatrix([[1e-4j]])
        with pytest.raises(ValueError, match="boundary"):
            theta_series(LEVEL2, chars(LEVEL2)[0], shallow, [[0.0]], CFG)


class TestAuxThetaSeries:
    def test_j0_matches_theta_for_any_z(self):
        j0 = MultiIndex.zeros(1, 1)
        w = [[0.07 - 0.11j]]
        t = theta_series(LEVEL2, chars(LEVEL2)[0], OMEGA_I, w, CFG)
        for z in ([[0.0]], [[0.3 + 0.2j]], [[-1.7j]]):
            v = aux_theta_series(LEVEL2, j0, chars(LEVEL2)[0], OMEGA_I, z, w, CFG)
            assert v.value == t.value

    def test_odd_symmetry_j1(self):
        j1 = MultiIndex.from_rows([[1]])
        v = aux_theta_series(LEVEL2, j1, chars(LEVEL2)[0], OMEGA_I, [[0.0]], [[0.0]], CFG)
        assert abs(v.value) < v.tail_bound + 1e-12

    def test_j1_matches_w_derivative(self):
        j1 = MultiIndex.from_rows([[1]])
        w = 0.1 + 0.2j
        v = aux_theta_series(LEVEL2, j1, chars(LEVEL2)[0], OMEGA_I, [[0.0]], [[w]], CFG)
        h = 1e-5
        fd = (oracle_theta(2, 0.0, 1j, w + h) - oracle_theta(2, 0.0, 1j, w - h)) / (2 * h)
        assert abs(v.value - fd) / abs(fd) < 1e-6
        assert v.value != 0

    def test_polynomial_degree_in_z(self):
        # total Z-degree is |J|: forward differences of order |J|+1 vanish
        rng = np.random.default_rng(11)
        for rows in ([[0]], [[1]], [[2]], [[3]]):
            j = MultiIndex.from_rows(rows)
            z0 = rng.uniform(-0.3, 0.3, (1, 1)) + 1j * rng.uniform(-0.3, 0.3, (1, 1))
            dz = rng.uniform(-0.5, 0.5, (1, 1)) + 1j * rng.uniform(-0.5, 0.5, (1, 1))
            w = rng.uniform(-0.3, 0.3, (1, 1)) + 1j * rng.uniform(-0.3, 0.3, (1, 1))
            n = j.size + 1
            vals = [
                aux_theta_series(LEVEL2, j, chars(LEVEL2)[0], OMEGA_I, z0 + t * dz, w, CFG).value
                for t in range(n + 1)
            ]
            diff = sum((-1) ** (n - k) * math.comb(n, k) * vals[k] for k in range(n + 1))
            assert abs(diff) < 1e-6


class TestQuasiPeriodicity:
    def test_zero_shift_is_exact(self):
        j = MultiIndex.zeros(1, 1)
        r = quasi_period_residual(
            LEVEL2, j, chars(LEVEL2)[0], OMEGA_I, [[0.0]], [[0.1 + 0.2j]],
            [[0]], [[0]], CFG,
        )
        assert r == 0.0

    def test_unit_shift(self):
        j = MultiIndex.zeros(1, 1)
        r = quasi_period_residual(
            LEVEL2, j, chars(LEVEL2)[0], OMEGA_I, [[0.0]], [[0.1 + 0.2j]],
            [[1]], [[0]], TruncationConfig(radius=8, tail_tol=1e-9),
        )
        assert r < 1e-9

    def test_j2_mixed_shift(self):
        j = MultiIndex.from_rows([[2]])
        r = quasi_period_residual(
            LEVEL2, j, chars(LEVEL2)[0], OMEGA_I, [[0.3]], [[0.1 + 0.2j]],
            [[-1]], [[1]], TruncationConfig(radius=8, tail_tol=1e-8),
        )
        assert r < 1e-8

    def test_g2_omega(self):
        omega = PeriodMatrix([[1j, 0.3j], [0.3j, 2j]])
        level = LEVEL2
        ch = enumerate_characteristics(level, 2)[1]
        j = MultiIndex.from_rows([[1, 0]])
        radius = choose_radius(level, omega, 2.8, 1e-12, j.size)
        cfg = TruncationConfig(radius=radius, tail_tol=1e-11)
        rng = np.random.default_rng(5)
        z = rng.uniform(-0.4, 0.4, (1, 2)) + 1j * rng.uniform(-0.4, 0.4, (1, 2))
        w = rng.uniform(-0.4, 0.4, (1, 2)) + 1j * rng.uniform(-0.4, 0.4, (1, 2))
        r = quasi_period_residual(level, j, ch, omega, z, w, [[1, -1]], [[0, 1]], cfg)
        assert r < 1e-8

    def test_factor_at_zero_shift(self):
        assert transformation_factor(LEVEL2, OMEGA_I, np.zeros((1, 1)), np.zeros((1, 1))) == 1.0


class TestShiftOperator:
    def test_j0(self):
        j = MultiIndex.zeros(1, 1)
        r = shift_operator_check(
            LEVEL2, j, chars(LEVEL2)[0], OMEGA_I, [[0.0]], [[0.1]], 1, 1, CFG,
        )
        assert r < 1e-6

    def test_j1_complex_z(self):
        j = MultiIndex.from_rows([[1]])
        r = shift_operator_check(
            LEVEL2, j, chars(LEVEL2)[0], OMEGA_I, [[0.2 + 0.1j]], [[0.1]], 1, 1, CFG,
        )
        assert r < 1e-6

    def test_z_zero_reduces_to_derivative(self):
        # at Z=0 the multiplication term vanishes: series(J=1) equals dtheta/dW
        j1 = MultiIndex.from_rows([[1]])
        w = 0.1 + 0.0j
        v = aux_theta_series(LEVEL2, j1, chars(LEVEL2)[0], OMEGA_I, [[0.0]], [[w]], CFG)
        h = 1e-5
        fd = (oracle_theta(2, 0.0, 1j, w + h) - oracle_theta(2, 0.0, 1j, w - h)) / (2 * h)
        assert abs(v.value - fd) < 1e-6

    def test_index_range(self):
        from thetadecomp.errors import IndexOutOfRangeError

        with pytest.raises(IndexOutOfRangeError):
            shift_operator_check(
                LEVEL2, MultiIndex.zeros(1, 1), chars(LEVEL2)[0], OMEGA_I,
                [[0.0]], [[0.0]], 2, 1, CFG,
            )


class TestChooseRadius:
    def test_reference_case(self):
        r = choose_radius(LEVEL2, OMEGA_I, 0.5, 1e-12, 0)
        assert r <= 6

    def test_monotone_in_tolerance(self):
        r_tight = choose_radius(LEVEL2, OMEGA_I, 0.5, 1e-12, 0)
        r_loose = choose_radius(LEVEL2, OMEGA_I, 0.5, 1e-3, 0)
        assert r_loose <= r_tight

    def test_monotone_in_degree(self):
        r0 = choose_radius(LEVEL2, OMEGA_I, 0.5, 1e-12, 0)
        r4 = choose_radius(LEVEL2, OMEGA_I, 0.5, 1e-12, 4)
        assert r4 >= r0

    def test_bound_dominates_true_tail(self):
        # oracle: worst-case tail over the box, |n| > R, summed numerically
        w_box = 0.5
        for radius in (2, 3, 4, 6):
            true_tail = sum(
                2.0 * math.exp(-2.0 * math.pi * n * n + 2.0 * math.pi * 2.0 * w_box * n)
                for n in range(radius + 1, radius + 60)
            )
            certified = tail_bound(LEVEL2, OMEGA_I, 0, w_box, 2.0 * w_box, radius, 1)
            assert certified >= true_tail

    def test_unachievable(self):
        # an enormous W box keeps every shell below the cap in the growing
        # regime of the envelope, so no admissible radius certifies the tail
        with pytest.raises(RadiusUnachievableError):
            choose_radius(LEVEL2, OMEGA_I, 50.0, 1e-12, 0)


class TestWDerivFD:
    def test_first_derivative_of_polynomial(self):
        f = lambda w: (w[0, 0] ** 3 + 2 * w[0, 0])
        got = wderiv_fd(f, np.array([[0.3 + 0.1j]]), MultiIndex.from_rows([[1]]))
        want = 3 * (0.3 + 0.1j) ** 2 + 2
        assert abs(got - want) < 1e-10

    def test_mixed_second_derivative(self):
        f = lambda w: w[0, 0] ** 2 * w[0, 1] ** 3
        w = np.array([[0.2 + 0.1j, -0.3 + 0.2j]])
        got = wderiv_fd(f, w, MultiIndex.from_rows([[1, 2]]))
        want = 2 * w[0, 0] * 6 * w[0, 1]
        assert abs(got - want) < 1e-7

    def test_against_series_derivative(self):
        # (d/dW) theta equals the J=1 auxiliary series at Z=0
        ch = chars(LEVEL2)[0]
        w = np.array([[0.1 + 0.2j]])
        f = lambda ww: theta_series(LEVEL2, ch, OMEGA_I, ww, CFG).value
        fd = wderiv_fd(f, w, MultiIndex.from_rows([[1]]))
        v = aux_theta_series(LEVEL2, MultiIndex.from_rows([[1]]), ch, OMEGA_I,
                             np.zeros((1, 1)), w, CFG)
        assert abs(fd - v.value) < 1e-8
