"""Operator algebra on formal symbol combinations: exact identities."""

import itertools
import random

import numpy as np
import pytest

from thetadecomp.algebra import (
    AlgebraElement,
    BasisSymbol,
    apply,
    apply_raising_power,
    commutator,
    evaluate_element,
    in_theta_subalgebra,
    lowering_op,
    raising_op,
    scaling_op,
)
from thetadecomp.errors import DimensionMismatchError, IndexOutOfRangeError
from thetadecomp.evaluation import TruncationConfig, theta_series
from thetadecomp.numerics import (
    MultiIndex,
    PeriodMatrix,
    enumerate_characteristics,
    multi_indices_up_to,
    validate_level,
)

LEVEL2 = validate_level([[2]])
LEVEL4 = validate_level([[4]])
HEX = validate_level([[2, 1], [1, 2]])


def sym(level, j_rows, char_idx=0, g=None):
    g = g if g is not None else len(j_rows[0])
    chars = enumerate_characteristics(level, g)
    return BasisSymbol(level, MultiIndex.from_rows(j_rows), chars[char_idx])


class TestApply:
    def test_lowering_on_j1(self):
        x = AlgebraElement.from_symbol(sym(LEVEL2, [[1]]))
        got = apply(lowering_op(1, 1), x)
        assert got == AlgebraElement.from_symbol(sym(LEVEL2, [[0]]), 2)

    def test_lowering_kills_j0(self):
        x = AlgebraElement.from_symbol(sym(LEVEL2, [[0]], char_idx=1))
        assert apply(lowering_op(1, 1), x).is_zero()

    def test_raising(self):
        x = AlgebraElement.from_symbol(sym(LEVEL2, [[0]]))
        assert apply(raising_op(1, 1), x) == AlgebraElement.from_symbol(sym(LEVEL2, [[1]]))

    def test_lowering_mixes_rows(self):
        # h=2: coefficient of each lowered term comes from the level row
        x = AlgebraElement.from_symbol(sym(HEX, [[1], [1]]))
        got = apply(lowering_op(1, 1), x)
        want = (
            2 * AlgebraElement.from_symbol(sym(HEX, [[0], [1]]))
            + 1 * AlgebraElement.from_symbol(sym(HEX, [[1], [0]]))
        )
        assert got == want

    def test_scaling(self):
        x = AlgebraElement.from_symbol(sym(LEVEL4, [[0]]), coeff=3)
        assert apply(scaling_op(1, 1), x) == AlgebraElement.from_symbol(sym(LEVEL4, [[0]]), 12)

    def test_linearity_is_exact(self):
        rng = random.Random(17)
        chars = enumerate_characteristics(HEX, 1)
        js = multi_indices_up_to(2, 1, 3)
        ops = [lowering_op(1, 1), lowering_op(2, 1), raising_op(1, 1), scaling_op(1, 2)]
        for _ in range(50):
            x = AlgebraElement(
                {
                    BasisSymbol(HEX, rng.choice(js), rng.choice(chars)): rng.randint(-5, 5)
                    for _ in range(4)
                }
            )
            y = AlgebraElement(
                {
                    BasisSymbol(HEX, rng.choice(js), rng.choice(chars)): rng.randint(-5, 5)
                    for _ in range(4)
                }
            )
            c = rng.randint(-3, 3)
            for op in ops:
                assert apply(op, x + c * y) == apply(op, x) + c * apply(op, y)

    def test_index_out_of_range(self):
        x = AlgebraElement.from_symbol(sym(LEVEL2, [[0]]))
        with pytest.raises(IndexOutOfRangeError):
            apply(lowering_op(1, 2), x)
        with pytest.raises(IndexOutOfRangeError):
            apply(scaling_op(2, 1), x)


class TestRaisingPower:
    def test_power_two(self):
        x = AlgebraElement.from_symbol(sym(LEVEL2, [[0]]))
        got = apply_raising_power(MultiIndex.from_rows([[2]]), x)
        assert got == AlgebraElement.from_symbol(sym(LEVEL2, [[2]]))

    def test_zero_power_is_identity(self):
        x = AlgebraElement.from_symbol(sym(LEVEL2, [[1]]), coeff=2 + 1j)
        assert apply_raising_power(MultiIndex.zeros(1, 1), x) == x

    def test_raising_ops_commute(self):
        x = AlgebraElement.from_symbol(sym(LEVEL2, [[1, 0]], g=2))
        one_two = apply(raising_op(1, 1), apply(raising_op(1, 2), x))
        two_one = apply(raising_op(1, 2), apply(raising_op(1, 1), x))
        assert one_two == two_one


class TestCommutators:
    def test_lower_raise_same_column(self):
        x = AlgebraElement.from_symbol(sym(LEVEL2, [[0]]))
        assert commutator(lowering_op(1, 1), raising_op(1, 1), x) == 2 * x

    def test_scale_raise_commute(self):
        x = AlgebraElement.from_symbol(sym(LEVEL2, [[2]]), coeff=5)
        assert commutator(scaling_op(1, 1), raising_op(1, 1), x).is_zero()

    def test_lower_raise_distinct_columns(self):
        x = AlgebraElement.from_symbol(sym(LEVEL2, [[1, 1]], g=2))
        assert commutator(lowering_op(1, 1), raising_op(1, 2), x).is_zero()

    @pytest.mark.parametrize("level,h", [(LEVEL2, 1), (LEVEL4, 1), (HEX, 2)])
    @pytest.mark.parametrize("g", [1, 2])
    def test_full_relation_table(self, level, h, g):
        """All five bracket families, exactly, on every symbol of order <= 3."""
        chars = enumerate_characteristics(level, g)
        scalings = [scaling_op(k, l) for k in range(1, h + 1) for l in range(1, h + 1)]
        lowerings = [lowering_op(m, a) for m in range(1, h + 1) for a in range(1, g + 1)]
        raisings = [raising_op(n, b) for n in range(1, h + 1) for b in range(1, g + 1)]
        symbols = [
            AlgebraElement.from_symbol(BasisSymbol(level, j, ch))
            for j in multi_indices_up_to(h, g, 3)
            for ch in chars[: min(3, len(chars))]
        ]
        for x in symbols:
            for e1, e2 in itertools.combinations(scalings, 2):
                assert commutator(e1, e2, x).is_zero()
            for e in scalings:
                for d in lowerings:
                    assert commutator(e, d, x).is_zero()
                for r in raisings:
                    assert commutator(e, r, x).is_zero()
            for d1, d2 in itertools.combinations(lowerings, 2):
                assert commutator(d1, d2, x).is_zero()
            for r1, r2 in itertools.combinations(raisings, 2):
                assert commutator(r1, r2, x).is_zero()
            for d in lowerings:
                for r in raisings:
                    got = commutator(d, r, x)
                    if d.j == r.j:
                        assert got == apply(scaling_op(d.i, r.i), x)
                    else:
                        assert got.is_zero()

    def test_ladder_on_vacuum(self):
        # lowering after raising on an order-zero symbol scales by the level entry
        for level, h in ((LEVEL2, 1), (HEX, 2)):
            chars = enumerate_characteristics(level, 1)
            for m in range(1, h + 1):
                for n in range(1, h + 1):
                    s = AlgebraElement.from_symbol(
                        BasisSymbol(level, MultiIndex.zeros(h, 1), chars[0])
                    )
                    got = commutator(lowering_op(m, 1), raising_op(n, 1), s)
                    assert got == level.entries[m - 1][n - 1] * s


class TestThetaSubalgebra:
    def test_mixed_levels_order_zero(self):
        x = 3 * AlgebraElement.from_symbol(sym(LEVEL2, [[0]])) + 1j * AlgebraElement.from_symbol(
            sym(LEVEL4, [[0]], char_idx=1)
        )
        assert in_theta_subalgebra(x)

    def test_positive_order_fails(self):
        assert not in_theta_subalgebra(AlgebraElement.from_symbol(sym(LEVEL2, [[1]])))

    def test_zero_element(self):
        assert in_theta_subalgebra(AlgebraElement.zero())

    def test_matches_structural_test_on_random_elements(self):
        rng = random.Random(23)
        chars2 = enumerate_characteristics(LEVEL2, 1)
        chars_hex = enumerate_characteristics(HEX, 1)
        for _ in range(200):
            terms = {}
            for _ in range(rng.randint(1, 5)):
                if rng.random() < 0.5:
                    s = BasisSymbol(
                        LEVEL2,
                        MultiIndex.from_rows([[rng.randint(0, 2)]]),
                        rng.choice(chars2),
                    )
                else:
                    s = BasisSymbol(
                        HEX,
                        MultiIndex.from_rows([[rng.randint(0, 2)], [rng.randint(0, 2)]]),
                        rng.choice(chars_hex),
                    )
                terms[s] = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
            # split by shape: h=1 and h=2 symbols cannot share one element
            for h in (1, 2):
                x = AlgebraElement({s: c for s, c in terms.items() if s.h == h})
                if x.is_zero():
                    continue
                structural = all(s.j.size == 0 for s in x.terms())
                assert in_theta_subalgebra(x) == structural


class TestElementArithmetic:
    def test_exact_cancellation(self):
        x = AlgebraElement.from_symbol(sym(LEVEL2, [[1]]), coeff=3)
        assert (x - x).is_zero()

    def test_levels_and_components(self):
        x = AlgebraElement.from_symbol(sym(LEVEL2, [[0]])) + AlgebraElement.from_symbol(
            sym(LEVEL4, [[1]]), coeff=2j
        )
        assert x.levels() == [LEVEL2, LEVEL4]
        assert x.level_component(LEVEL4) == AlgebraElement.from_symbol(sym(LEVEL4, [[1]]), 2j)
        assert x.degree() == 1

    def test_prune(self):
        x = AlgebraElement(
            {sym(LEVEL2, [[0]]): 1e-15, sym(LEVEL2, [[1]]): 0.5}
        )
        assert len(x.prune()) == 1

    def test_shape_mismatch_detected(self):
        x = AlgebraElement.from_symbol(sym(LEVEL2, [[0]])) + AlgebraElement.from_symbol(
            sym(HEX, [[0], [0]])
        )
        with pytest.raises(DimensionMismatchError):
            x.shape()


class TestEvaluateElement:
    CFG = TruncationConfig(radius=8, tail_tol=1e-10)
    OMEGA = PeriodMatrix([[1j]])

    def test_single_symbol(self):
        from thetadecomp.evaluation import aux_theta_series

        s = sym(LEVEL2, [[1]])
        x = AlgebraElement.from_symbol(s)
        z = np.array([[0.2 + 0.1j]])
        w = np.array([[0.1 - 0.2j]])
        direct = aux_theta_series(s.level, s.j, s.char, self.OMEGA, z, w, self.CFG)
        got = evaluate_element(x, self.OMEGA, z, w, self.CFG)
        assert got.value == direct.value
        assert got.tail_bound == direct.tail_bound

    def test_difference_cancels_exactly(self):
        s = sym(LEVEL2, [[1]])
        x = AlgebraElement.from_symbol(s, coeff=1.0)
        assert (x - x).is_zero()
        got = evaluate_element(x - x, self.OMEGA, [[0.0]], [[0.1]], self.CFG)
        assert got.value == 0 and got.tail_bound == 0

    def test_matches_finite_difference(self):
        x = AlgebraElement.from_symbol(sym(LEVEL2, [[1]]), coeff=2)
        w = 0.1 + 0.2j
        got = evaluate_element(x, self.OMEGA, [[0.0]], [[w]], self.CFG)
        ch = enumerate_characteristics(LEVEL2, 1)[0]
        h = 1e-5
        fd = (
            theta_series(LEVEL2, ch, self.OMEGA, [[w + h]], self.CFG).value
            - theta_series(LEVEL2, ch, self.OMEGA, [[w - h]], self.CFG).value
        ) / (2 * h)
        assert abs(got.value - 2 * fd) < 1e-6

    def test_lowering_matches_z_derivative(self):
        # the symbolic lowering action agrees with (2 pi i)^-1 d/dZ of the series
        x = AlgebraElement.from_symbol(sym(LEVEL2, [[2]]))
        lowered = apply(lowering_op(1, 1), x)
        z = np.array([[0.2 - 0.1j]])
        w = np.array([[0.1 + 0.15j]])
        step = 1e-5
        fd = (
            evaluate_element(x, self.OMEGA, z + step, w, self.CFG).value
            - evaluate_element(x, self.OMEGA, z - step, w, self.CFG).value
        ) / (2 * step) / (2j * np.pi)
        got = evaluate_element(lowered, self.OMEGA, z, w, self.CFG).value
        assert abs(fd - got) < 1e-7
