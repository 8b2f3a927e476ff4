"""Truncated evaluation of theta series and auxiliary theta series.

The series are summed over the sup-norm lattice box |N_ka| <= radius.  Every
evaluation returns the value together with a certified bound on the omitted
tail, derived from the Gaussian decay rate pi * lambda_min(M) * lambda_min(Im
omega) with a polynomial-times-Gaussian envelope when a nonzero multi-index
is present.  Residual checks for the quasi-periodicity and shift-operator
laws are scale-normalized: the raw difference is divided by the magnitude of
the quantities compared (floored at 1), which keeps the checks meaningful in
double precision when the transformation factors grow exponentially.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatchError,
    IndexOutOfRangeError,
    RadiusUnachievableError,
    TruncationInsufficientError,
)
from .numerics import Characteristic, LevelMatrix, MultiIndex, PeriodMatrix

RADIUS_CAP = 64
_IM_OMEGA_FLOOR = 1e-3  # evaluation near the boundary of the upper half plane is rejected


@dataclass(frozen=True)
class TruncationConfig:
    radius: int
    tail_tol: float

    def __post_init__(self):
        if self.radius < 1:
            raise ValueError("radius must be >= 1")
        if not self.tail_tol > 0:
            raise ValueError("tail_tol must be positive")


@dataclass(frozen=True)
class ThetaValue:
    value: complex
    tail_bound: float


def as_matrix(x, h: int, g: int) -> np.ndarray:
    arr = np.asarray(x, dtype=complex)
    if arr.shape != (h, g):
        raise DimensionMismatchError(f"expected a {h}x{g} matrix, got shape {arr.shape}")
    return arr


@functools.lru_cache(maxsize=64)
def _lattice_box(h: int, g: int, radius: int) -> np.ndarray:
    pts = np.array(
        list(itertools.product(range(-radius, radius + 1), repeat=h * g)), dtype=float
    )
    box = pts.reshape(-1, h, g)
    box.setflags(write=False)
    return box


def _decay_rate(level: LevelMatrix, omega: PeriodMatrix) -> float:
    if omega.im_min_eig < _IM_OMEGA_FLOOR:
        raise ValueError(
            f"Im(omega) too close to the boundary: min eigenvalue {omega.im_min_eig:.3e}"
        )
    m_eigs = np.linalg.eigvalsh(level.as_array())
    return float(m_eigs.min()) * omega.im_min_eig


def tail_bound(level: LevelMatrix, omega: PeriodMatrix, degree: int,
               z_sup: float, mv_norm: float, radius: int, hg: int) -> float:
    """Upper bound for the omitted tail of the (possibly weighted) series.

    Shell s > radius of the sup-norm box contributes at most
        count(s) * (2*pi*rho*(z_sup+s+1))^degree * exp(max_t -pi*lam*t^2 + 2*pi*mv*t)
    with t ranging over the Frobenius norms compatible with the shell
    (t >= s-1, since characteristics live in [0,1)), lam the decay rate and
    rho the maximum absolute row sum of the level matrix.
    """
    lam = _decay_rate(level, omega)
    rho = float(np.abs(level.as_array()).sum(axis=1).max())
    t_star = mv_norm / lam
    total = 0.0
    s = radius + 1
    while True:
        count = (2 * s + 1) ** hg - (2 * s - 1) ** hg
        t = max(s - 1.0, t_star)
        expo = -math.pi * lam * t * t + 2.0 * math.pi * mv_norm * t
        if expo > 700.0:
            return math.inf
        if expo < -700.0:
            shell = 0.0
        else:
            shell = count * (2.0 * math.pi * rho * (z_sup + s + 1.0)) ** degree * math.exp(expo)
        total += shell
        if s - 1.0 > t_star and (shell == 0.0 or shell < total * 1e-18):
            break
        if s > radius + 10000:  # defensive cap; decay always wins long before
            break
        s += 1
    # the true tail is strictly positive; never report a certified bound of zero
    return max(total, 5e-324)


def _aux_value(level, j, char, omega, z, w, radius):
    m = level.as_array()
    a = char.as_array()
    box = _lattice_box(level.h, a.shape[1], radius)
    b = box + a
    quad = np.einsum("kl,pla,ab,pkb->p", m, b, omega.omega, b)
    lin = np.einsum("kl,la,pka->p", m, w, b)
    phases = np.exp(np.pi * 1j * (quad + 2.0 * lin))
    order = j.size
    if order:
        lam = np.einsum("kl,pla->pka", m.astype(complex), z[None, :, :] + b)
        phases = np.prod(lam ** j.as_array()[None, :, :], axis=(1, 2)) * phases
    return (2j * np.pi) ** order * complex(phases.sum())


def _check_inputs(level, j, char, omega):
    if char.level != level:
        raise DimensionMismatchError("characteristic belongs to a different level matrix")
    if j is not None and (j.h, j.g) != (level.h, omega.g):
        raise DimensionMismatchError(
            f"multi-index shape {j.h}x{j.g} does not match h={level.h}, g={omega.g}"
        )
    if char.g != omega.g:
        raise DimensionMismatchError("characteristic width does not match omega")


def aux_theta_series(level: LevelMatrix, j: MultiIndex, char: Characteristic,
                     omega: PeriodMatrix, z, w, cfg: TruncationConfig) -> ThetaValue:
    """Auxiliary theta series of the given level, multi-index and characteristic.

    Sums (2 pi i)^|J| * prod_{k,a} (M(Z+N+A))_{ka}^{J_ka}
    * exp{pi i sigma(M((N+A) Omega (N+A)^t + 2 W (N+A)^t))} over the lattice
    box, and certifies the tail.  At J = 0 the value is independent of Z and
    equals the plain theta series.
    """
    _check_inputs(level, j, char, omega)
    h, g = level.h, omega.g
    z = as_matrix(z, h, g)
    w = as_matrix(w, h, g)
    value = _aux_value(level, j, char, omega, z, w, cfg.radius)
    mv_norm = float(np.linalg.norm(level.as_array() @ w.imag))
    z_sup = float(np.abs(z).max()) if j.size else 0.0
    bound = tail_bound(level, omega, j.size, z_sup, mv_norm, cfg.radius, h * g)
    if bound > cfg.tail_tol:
        raise TruncationInsufficientError(
            f"tail bound {bound:.3e} exceeds tolerance {cfg.tail_tol:.3e} at radius {cfg.radius}"
        )
    return ThetaValue(value=value, tail_bound=bound)


def theta_series(level: LevelMatrix, char: Characteristic, omega: PeriodMatrix,
                 w, cfg: TruncationConfig) -> ThetaValue:
    """Theta series of the given level and characteristic at the point w."""
    j0 = MultiIndex.zeros(level.h, omega.g)
    zeros = np.zeros((level.h, omega.g), dtype=complex)
    return aux_theta_series(level, j0, char, omega, zeros, w, cfg)


def transformation_factor(level: LevelMatrix, omega: PeriodMatrix, w, xi) -> complex:
    """exp{-pi i sigma(M(xi Omega xi^t + 2 W xi^t))}, the quasi-periodicity factor."""
    m = level.as_array()
    quad = np.einsum("kl,la,ab,kb->", m, xi, omega.omega, xi)
    lin = np.einsum("kl,la,ka->", m, w, xi)
    return complex(np.exp(-np.pi * 1j * (quad + 2.0 * lin)))


def _as_int_matrix(x, h, g, name):
    arr = np.asarray(x)
    if arr.shape != (h, g):
        raise DimensionMismatchError(f"{name} must be a {h}x{g} integer matrix")
    out = arr.astype(float)
    if not np.array_equal(out, np.round(out)):
        raise DimensionMismatchError(f"{name} must have integer entries")
    return out


def quasi_period_residual(level: LevelMatrix, j: MultiIndex, char: Characteristic,
                          omega: PeriodMatrix, z, w, xi, eta,
                          cfg: TruncationConfig) -> float:
    """Residual of the joint shift law at one sample point.

    Compares the series at (Z+xi, W+xi*Omega+eta) against the transformation
    factor times the series at (Z, W).  The difference is divided by
    max(1, |factor|): the factor grows like exp(pi * xi M xi^t * Im Omega),
    and an unnormalized difference would be dominated by double-precision
    roundoff rather than by the law being tested.
    """
    h, g = level.h, omega.g
    z = as_matrix(z, h, g)
    w = as_matrix(w, h, g)
    xi = _as_int_matrix(xi, h, g, "xi")
    eta = _as_int_matrix(eta, h, g, "eta")
    shifted = aux_theta_series(level, j, char, omega, z + xi, w + xi @ omega.omega + eta, cfg)
    base = aux_theta_series(level, j, char, omega, z, w, cfg)
    factor = transformation_factor(level, omega, w, xi)
    diff = abs(shifted.value - factor * base.value)
    return diff / max(1.0, abs(factor))


def shift_operator_check(level: LevelMatrix, j: MultiIndex, char: Characteristic,
                         omega: PeriodMatrix, z, w, k: int, a: int,
                         cfg: TruncationConfig, step: float = 1e-5) -> float:
    """Residual of the ladder identity raising J by epsilon_{ka}.

    Compares the series at J+epsilon_{ka} against
    2 pi i (M Z)_{ka} * series(J) + d/dW_{ka} series(J), the derivative taken
    as a central difference with the given step.  Scale-normalized like
    quasi_period_residual, since the finite-difference truncation error grows
    with the magnitude of the function.
    """
    h, g = level.h, omega.g
    if not (1 <= k <= h and 1 <= a <= g):
        raise IndexOutOfRangeError(f"shift index ({k},{a}) outside 1..{h} x 1..{g}")
    z = as_matrix(z, h, g)
    w = as_matrix(w, h, g)
    lhs = aux_theta_series(level, j.bump(k, a, +1), char, omega, z, w, cfg).value
    base = aux_theta_series(level, j, char, omega, z, w, cfg).value
    dw = np.zeros((h, g), dtype=complex)
    dw[k - 1, a - 1] = step
    fd = (
        aux_theta_series(level, j, char, omega, z, w + dw, cfg).value
        - aux_theta_series(level, j, char, omega, z, w - dw, cfg).value
    ) / (2.0 * step)
    mz = (level.as_array() @ z)[k - 1, a - 1]
    rhs = 2j * np.pi * mz * base + fd
    return abs(lhs - rhs) / max(1.0, abs(lhs), abs(rhs))


def choose_radius(level: LevelMatrix, omega: PeriodMatrix, w_box: float,
                  tail_tol: float, degree: int) -> int:
    """Smallest radius whose certified tail is below tail_tol.

    ``w_box`` bounds both the entries of Im W and the moduli of the entries
    of Z at every point the caller intends to evaluate.
    """
    if not tail_tol > 0:
        raise ValueError("tail_tol must be positive")
    h, g = level.h, omega.g
    rho = float(np.abs(level.as_array()).sum(axis=1).max())
    mv_norm = rho * w_box * math.sqrt(h * g)
    for radius in range(1, RADIUS_CAP + 1):
        if tail_bound(level, omega, degree, w_box, mv_norm, radius, h * g) <= tail_tol:
            return radius
    raise RadiusUnachievableError(
        f"no radius up to {RADIUS_CAP} certifies tail {tail_tol:.3e}"
    )


def wderiv_fd(f, w, j: MultiIndex, base_step: float | None = None):
    """Mixed W-derivative of order J by Richardson-extrapolated central differences.

    ``f`` maps an (h,g) complex matrix to a complex number and is assumed
    holomorphic, so differences are taken along the real axis of each entry.
    The per-level step defaults to 1e-3 / |J|; each level combines two step
    sizes (h and h/2) into the standard fourth-order extrapolation.
    """
    order = j.size
    if order == 0:
        return f(w)
    step = base_step if base_step is not None else 1e-3 / order
    k, a = next(
        (ki, ai) for ki, row in enumerate(j.j) for ai, x in enumerate(row) if x > 0
    )
    inner = j.bump(k + 1, a + 1, -1)
    unit = np.zeros_like(np.asarray(w, dtype=complex))
    unit[k, a] = 1.0

    def diff(hstep):
        hi = wderiv_fd(f, w + hstep * unit, inner, base_step=step)
        lo = wderiv_fd(f, w - hstep * unit, inner, base_step=step)
        return (hi - lo) / (2.0 * hstep)

    d1 = diff(step)
    d2 = diff(step / 2.0)
    return (4.0 * d2 - d1) / 3.0
