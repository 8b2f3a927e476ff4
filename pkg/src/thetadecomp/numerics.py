"""Exact lattice machinery: level matrices, characteristics, multi-indices.

Everything here is integer or rational arithmetic (Python ints and
``fractions.Fraction``), so coset identities and operator coefficients are
exact.  Floating point enters only in the evaluation modules.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import (
    DimensionMismatchError,
    InvalidBinomError,
    NegativeEntryError,
    NotEvenError,
    NotPositiveDefiniteError,
    NotSymmetricError,
    SingularMatrixError,
    ZeroEntryError,
)

Rows = tuple[tuple[int, ...], ...]


def _as_int_rows(m) -> Rows:
    rows = []
    for row in m:
        out = []
        for x in row:
            xi = int(x)
            if xi != x:
                raise DimensionMismatchError(f"non-integer entry {x!r}")
            out.append(xi)
        rows.append(tuple(out))
    if not rows or any(len(r) != len(rows[0]) for r in rows):
        raise DimensionMismatchError("ragged matrix")
    return tuple(rows)


def int_det(m) -> int:
    """Exact determinant of a square integer matrix (fraction-free Bareiss)."""
    a = [list(row) for row in m]
    n = len(a)
    if any(len(row) != n for row in a):
        raise DimensionMismatchError("determinant needs a square matrix")
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


@dataclass(frozen=True)
class LevelMatrix:
    """Positive symmetric even integral matrix with every entry nonzero."""

    entries: Rows

    @property
    def h(self) -> int:
        return len(self.entries)

    def det(self) -> int:
        return int_det(self.entries)

    def as_array(self) -> np.ndarray:
        return np.array(self.entries, dtype=float)

    def __str__(self):
        return str([list(r) for r in self.entries])


def validate_level(m) -> LevelMatrix:
    """Validate an integer square matrix as an admissible level matrix.

    Raises NotSymmetricError, NotPositiveDefiniteError, NotEvenError or
    ZeroEntryError on the first violated condition.
    """
    rows = _as_int_rows(m)
    h = len(rows)
    if any(len(r) != h for r in rows):
        raise DimensionMismatchError("level matrix must be square")
    for i in range(h):
        for j in range(i + 1, h):
            if rows[i][j] != rows[j][i]:
                raise NotSymmetricError(f"entry ({i},{j}) != ({j},{i})")
    # exact positive definiteness over the rationals: leading principal minors
    for k in range(1, h + 1):
        minor = int_det([row[:k] for row in rows[:k]])
        if minor <= 0:
            raise NotPositiveDefiniteError(f"leading {k}x{k} minor is {minor}")
    for i in range(h):
        if rows[i][i] % 2 != 0:
            raise NotEvenError(f"diagonal entry ({i},{i}) = {rows[i][i]} is odd")
    for i in range(h):
        for j in range(h):
            if rows[i][j] == 0:
                raise ZeroEntryError(f"entry ({i},{j}) is zero")
    return LevelMatrix(rows)


class PeriodMatrix:
    """A point of the Siegel upper half plane: symmetric with Im positive definite."""

    _PD_TOL = 1e-12

    def __init__(self, omega):
        om = np.array(omega, dtype=complex)
        if om.ndim != 2 or om.shape[0] != om.shape[1]:
            raise DimensionMismatchError("omega must be a square matrix")
        if not np.array_equal(om, om.T):
            raise NotSymmetricError("omega must equal its transpose exactly")
        eigs = np.linalg.eigvalsh(om.imag)
        if eigs.min() <= self._PD_TOL:
            raise NotPositiveDefiniteError(
                f"Im(omega) must be positive definite; min eigenvalue {eigs.min():.3e}"
            )
        om.setflags(write=False)
        self.omega = om
        self.g = om.shape[0]
        self.im_min_eig = float(eigs.min())

    def __repr__(self):
        return f"PeriodMatrix(g={self.g})"


@dataclass(frozen=True)
class Characteristic:
    """Canonical coset representative with entries in [0,1); M*a is integral."""

    level: LevelMatrix
    a: tuple[tuple[Fraction, ...], ...]
    index: int

    def __post_init__(self):
        # Fraction hashing is expensive; symbols built on characteristics are
        # used as dict keys in the operator algebra's hot path
        object.__setattr__(self, "_hash", hash((self.level, self.a, self.index)))

    def __hash__(self):
        return self._hash

    @property
    def g(self) -> int:
        return len(self.a[0])

    def as_array(self) -> np.ndarray:
        return np.array([[float(x) for x in row] for row in self.a])

    def __str__(self):
        return "[" + "; ".join(",".join(str(x) for x in row) for row in self.a) + "]"


def _identity(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def smith_normal_form(m):
    """Diagonalize a nonsingular integer matrix: U*m*V = D.

    Returns (U, D, V) as lists of lists of ints, with D diagonal, each
    diagonal entry positive and dividing the next, and U, V unimodular.
    """
    a = [list(row) for row in _as_int_rows(m)]
    n = len(a)
    if any(len(row) != n for row in a):
        raise DimensionMismatchError("smith normal form needs a square matrix")
    u = _identity(n)
    v = _identity(n)

    def row_add(i, j, c):
        for t in range(n):
            a[i][t] += c * a[j][t]
            u[i][t] += c * u[j][t]

    def col_add(i, j, c):
        for t in range(n):
            a[t][i] += c * a[t][j]
            v[t][i] += c * v[t][j]

    def row_swap(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def col_swap(i, j):
        for t in range(n):
            a[t][i], a[t][j] = a[t][j], a[t][i]
            v[t][i], v[t][j] = v[t][j], v[t][i]

    def pivot(s):
        best = None
        for i in range(s, n):
            for j in range(s, n):
                if a[i][j] != 0 and (best is None or abs(a[i][j]) < abs(a[best[0]][best[1]])):
                    best = (i, j)
        return best

    for s in range(n):
        while True:
            p = pivot(s)
            if p is None:
                raise SingularMatrixError("matrix is singular")
            row_swap(s, p[0])
            col_swap(s, p[1])
            dirty = False
            for i in range(s + 1, n):
                if a[i][s] != 0:
                    row_add(i, s, -(a[i][s] // a[s][s]))
                    dirty = dirty or a[i][s] != 0
            for j in range(s + 1, n):
                if a[s][j] != 0:
                    col_add(j, s, -(a[s][j] // a[s][s]))
                    dirty = dirty or a[s][j] != 0
            if dirty:
                continue
            # pivot now divides its row and column; enforce divisibility of the rest
            stuck = None
            for i in range(s + 1, n):
                for j in range(s + 1, n):
                    if a[i][j] % a[s][s] != 0:
                        stuck = i
                        break
                if stuck is not None:
                    break
            if stuck is None:
                break
            row_add(s, stuck, 1)
        if a[s][s] < 0:
            for t in range(n):
                a[s][t] = -a[s][t]
                u[s][t] = -u[s][t]
    d = [[a[i][j] if i == j else 0 for j in range(n)] for i in range(n)]
    return u, d, v


def enumerate_characteristics(level: LevelMatrix, g: int) -> list[Characteristic]:
    """All (det M)^g canonical characteristics of a level matrix, in a fixed order.

    Columns range over the residue system derived from the Smith normal form
    U*M*V = diag(d_1..d_h): residue r maps to the column V*(r_i/d_i) reduced
    into [0,1).  Matrices are enumerated lexicographically on the
    concatenated residue tuples (first column slowest), so the index of a
    characteristic is stable across runs.
    """
    if g < 1:
        raise DimensionMismatchError("g must be a positive integer")
    h = level.h
    _, d, v = smith_normal_form(level.entries)
    diag = [d[i][i] for i in range(h)]

    columns = []
    for r in itertools.product(*[range(di) for di in diag]):
        frac = [Fraction(r[i], diag[i]) for i in range(h)]
        col = tuple(
            sum(Fraction(v[i][k]) * frac[k] for k in range(h)) % 1 for i in range(h)
        )
        columns.append(col)

    out = []
    for idx, cols in enumerate(itertools.product(columns, repeat=g)):
        a = tuple(tuple(cols[c][i] for c in range(g)) for i in range(h))
        out.append(Characteristic(level=level, a=a, index=idx))
    return out


@dataclass(frozen=True)
class MultiIndex:
    """Nonnegative integer h x g matrix labelling derivatives and degrees."""

    j: Rows

    def __post_init__(self):
        for row in self.j:
            for x in row:
                if x < 0:
                    raise NegativeEntryError(f"multi-index entry {x} < 0")

    @classmethod
    def zeros(cls, h: int, g: int) -> "MultiIndex":
        return cls(tuple((0,) * g for _ in range(h)))

    @classmethod
    def from_rows(cls, rows) -> "MultiIndex":
        return cls(_as_int_rows(rows))

    @property
    def h(self) -> int:
        return len(self.j)

    @property
    def g(self) -> int:
        return len(self.j[0])

    @property
    def size(self) -> int:
        """Total order |J|."""
        return sum(sum(row) for row in self.j)

    def factorial(self) -> int:
        out = 1
        for row in self.j:
            for x in row:
                out *= math.factorial(x)
        return out

    def bump(self, k: int, a: int, step: int) -> "MultiIndex":
        """J +- epsilon_{ka} with 1-based indices; step is +1 or -1."""
        if step not in (1, -1):
            raise ValueError("step must be +1 or -1")
        if not (1 <= k <= self.h and 1 <= a <= self.g):
            raise DimensionMismatchError(f"bump index ({k},{a}) outside {self.h}x{self.g}")
        new = [list(row) for row in self.j]
        new[k - 1][a - 1] += step
        if new[k - 1][a - 1] < 0:
            raise NegativeEntryError(f"bump would make entry ({k},{a}) negative")
        return MultiIndex(tuple(tuple(r) for r in new))

    def as_array(self) -> np.ndarray:
        return np.array(self.j, dtype=int)

    def __str__(self):
        return str([list(r) for r in self.j])


def multi_binom(k_idx: MultiIndex, p_idx: MultiIndex) -> int:
    """Product of entrywise binomial coefficients; requires P <= K entrywise."""
    if (k_idx.h, k_idx.g) != (p_idx.h, p_idx.g):
        raise DimensionMismatchError("binomial of multi-indices with different shapes")
    out = 1
    for krow, prow in zip(k_idx.j, p_idx.j):
        for kx, px in zip(krow, prow):
            if px > kx:
                raise InvalidBinomError(f"lower index {px} exceeds upper {kx}")
            out *= math.comb(kx, px)
    return out


def multi_indices_of_size(h: int, g: int, size: int) -> list[MultiIndex]:
    """All h x g multi-indices with |J| == size, in lexicographic entry order."""
    out = []
    for flat in itertools.product(range(size + 1), repeat=h * g):
        if sum(flat) == size:
            rows = tuple(flat[i * g:(i + 1) * g] for i in range(h))
            out.append(MultiIndex(rows))
    return out


def multi_indices_up_to(h: int, g: int, max_size: int) -> list[MultiIndex]:
    """All h x g multi-indices with |J| <= max_size, graded then lexicographic."""
    out = []
    for size in range(max_size + 1):
        out.extend(multi_indices_of_size(h, g, size))
    return out
