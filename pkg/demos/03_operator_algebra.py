"""The operator algebra acting on formal symbol combinations.

Three families act on the graded algebra of auxiliary theta symbols: the
scaling operators multiply by level entries, the lowering operators reduce
the multi-index with integer coefficients, and the raising operators
increment it.  They satisfy the Heisenberg bracket relations exactly, and
the derivative-free subalgebra is precisely the kernel of all lowering
operators.
"""

from thetadecomp import (
    AlgebraElement,
    BasisSymbol,
    MultiIndex,
    apply,
    apply_raising_power,
    commutator,
    enumerate_characteristics,
    in_theta_subalgebra,
    lowering_op,
    raising_op,
    scaling_op,
    validate_level,
)

level = validate_level([[2, 1], [1, 2]])
chars = enumerate_characteristics(level, 1)
vac = AlgebraElement.from_symbol(BasisSymbol(level, MultiIndex.zeros(2, 1), chars[0]))

print("level", level)
print("start from the order-zero symbol:", vac)

x = apply_raising_power(MultiIndex.from_rows([[1], [1]]), vac)
print("\nafter raising once in each row:", x)

print("\nlowering mixes rows through the level matrix:")
print("  lower(1,1):", apply(lowering_op(1, 1), x))
print("  lower(2,1):", apply(lowering_op(2, 1), x))

print("\nbracket relations (all exact, integer arithmetic):")
print("  [lower(1,1), raise(1,1)] on vacuum:", commutator(lowering_op(1, 1), raising_op(1, 1), vac))
print("  [lower(2,1), raise(1,1)] on vacuum:", commutator(lowering_op(2, 1), raising_op(1, 1), vac))
print("  [scale(1,2), raise(1,1)] on vacuum:", commutator(scaling_op(1, 2), raising_op(1, 1), vac))

print("\nkernel of the lowering operators = derivative-free combinations:")
print("  vacuum in kernel?   ", in_theta_subalgebra(vac))
print("  raised element?     ", in_theta_subalgebra(x))
print("  vacuum - 2*vacuum?  ", in_theta_subalgebra(vac - 2 * vac))
