"""Level matrices and their characteristic systems.

A level matrix is positive definite, symmetric, even on the diagonal and has
no zero entries.  Its characteristics are the canonical representatives of
M^-1 Z^(h,g) / Z^(h,g); there are det(M)^g of them and they index the basis
theta series.
"""

from thetadecomp import enumerate_characteristics, smith_normal_form, validate_level

for rows in ([[2]], [[4]], [[2, 1], [1, 2]]):
    level = validate_level(rows)
    print(f"level {level}  det = {level.det()}")
    u, d, v = smith_normal_form(level.entries)
    print(f"  smith form diag = {[d[i][i] for i in range(level.h)]}")
    for g in (1, 2):
        chars = enumerate_characteristics(level, g)
        print(f"  g = {g}: {len(chars)} characteristics")
        if g == 1:
            for c in chars:
                print(f"    #{c.index}: {c}")

# admissibility is checked exactly; these are the standard rejections
from thetadecomp.errors import LevelError

for bad in ([[1]], [[2, 0], [0, 2]], [[2, 4], [4, 2]]):
    try:
        validate_level(bad)
    except LevelError as exc:
        print(f"rejected {bad}: {type(exc).__name__}: {exc}")
