"""Decomposition of differential polynomials into the canonical symbol basis.

The engine realizes the basis property numerically: any product or derivative
combination of theta series is sampled at random interior points and fitted
against the candidate symbols of the appropriate level by a dense
least-squares solve (orthogonal factorization via SVD), with the residual
measured on points held out of the solve.  Derivative checks always use
nested central differences of the plain theta series, never the fitted
values, so the certificates are independent of the solve.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .algebra import (
    AlgebraElement,
    BasisSymbol,
    evaluate_element,
)
from .errors import (
    DimensionMismatchError,
    IllConditionedError,
    LevelError,
    LevelSumInvalidError,
    ResidualTooLargeError,
)
from .evaluation import (
    ThetaValue,
    TruncationConfig,
    aux_theta_series,
    choose_radius,
    theta_series,
    transformation_factor,
    wderiv_fd,
)
from .numerics import (
    Characteristic,
    LevelMatrix,
    MultiIndex,
    PeriodMatrix,
    enumerate_characteristics,
    multi_indices_of_size,
    multi_indices_up_to,
    validate_level,
)

TAIL_TARGET = 1e-12
COND_LIMIT = 1e8
PRUNE_EPS = 1e-12
_MASK64 = (1 << 64) - 1

# sample streams; labels keep the draws for different purposes independent
_STREAM_FIT = 0
_STREAM_CERTIFY = 1
_STREAM_VERIFY = 2
_STREAM_PEEL = 3


@dataclass(frozen=True)
class DerivSymbol:
    """Leaf of an expression tree: one derivative of one theta series."""

    level: LevelMatrix
    j: MultiIndex
    char: Characteristic


@dataclass(frozen=True)
class Sum:
    children: tuple


@dataclass(frozen=True)
class Product:
    children: tuple


@dataclass(frozen=True)
class Scale:
    coeff: complex
    child: object


DiffPolyExpr = Union[DerivSymbol, Sum, Product, Scale]


@dataclass(frozen=True)
class FitConfig:
    seed: int = 0
    oversample: float = 2.0
    sample_box: float = 0.4
    fit_tol: float = 1e-8
    holdout: int = 16

    def __post_init__(self):
        if self.oversample < 1:
            raise ValueError("oversample must be >= 1")
        if not self.fit_tol > 0:
            raise ValueError("fit_tol must be positive")
        if self.holdout < 1:
            raise ValueError("holdout must be a positive integer")


@dataclass
class Decomposition:
    element: AlgebraElement
    residual: float
    conditioning: float


def _rng(seed: int, label: int) -> np.random.Generator:
    # counter-based generator keyed by (seed, stream), deterministic by construction
    return np.random.Generator(np.random.Philox(key=(seed & _MASK64) + (label << 64)))


def _sample_points(seed: int, label: int, count: int, h: int, g: int, box: float):
    rng = _rng(seed, label)
    z = rng.uniform(-box, box, (count, h, g)) + 1j * rng.uniform(-box, box, (count, h, g))
    w = rng.uniform(-box, box, (count, h, g)) + 1j * rng.uniform(-box, box, (count, h, g))
    return z, w


def _eval_cfg(level: LevelMatrix, omega: PeriodMatrix, box: float, degree: int) -> TruncationConfig:
    radius = choose_radius(level, omega, box, TAIL_TARGET, degree)
    return TruncationConfig(radius=radius, tail_tol=TAIL_TARGET)


def candidate_basis(level: LevelMatrix, max_degree: int, omega: PeriodMatrix) -> list[BasisSymbol]:
    """Symbols of one level with |J| <= max_degree: graded-lexicographic J, then characteristic."""
    chars = enumerate_characteristics(level, omega.g)
    return [
        BasisSymbol(level, j, ch)
        for j in multi_indices_up_to(level.h, omega.g, max_degree)
        for ch in chars
    ]


def fit_in_basis(f: Callable, level: LevelMatrix, max_degree: int,
                 omega: PeriodMatrix, cfg: FitConfig) -> Decomposition:
    """Express a sampled function in the candidate basis of one level.

    ``f(z, w) -> complex`` must be deterministic and is assumed to lie in the
    span of the symbols with |J| <= max_degree.  Points are drawn uniformly
    from the sample box; the dense least-squares problem is solved by SVD,
    coefficients below 1e-12 are pruned, and the residual is the largest
    mismatch on ``cfg.holdout`` points not used in the solve.
    """
    h, g = level.h, omega.g
    basis = candidate_basis(level, max_degree, omega)
    n_fit = math.ceil(cfg.oversample * len(basis))
    total = n_fit + cfg.holdout
    eval_cfg = _eval_cfg(level, omega, cfg.sample_box, max_degree)

    conditioning = math.inf
    for seed in (cfg.seed, (cfg.seed + 1) & _MASK64):
        z_pts, w_pts = _sample_points(seed, _STREAM_FIT, total, h, g, cfg.sample_box)
        design = np.array(
            [
                [
                    aux_theta_series(s.level, s.j, s.char, omega, z_pts[i], w_pts[i], eval_cfg).value
                    for s in basis
                ]
                for i in range(total)
            ],
            dtype=complex,
        )
        rhs = np.array([f(z_pts[i], w_pts[i]) for i in range(total)], dtype=complex)
        coeffs, _, _, sv = np.linalg.lstsq(design[:n_fit], rhs[:n_fit], rcond=None)
        conditioning = float(sv[0] / sv[-1]) if sv[-1] > 0 else math.inf
        if conditioning <= COND_LIMIT:
            break
    else:
        raise IllConditionedError(
            f"sample matrix conditioning {conditioning:.3e} above {COND_LIMIT:.0e} after resampling"
        )

    keep = np.abs(coeffs) > PRUNE_EPS
    element = AlgebraElement(
        {s: complex(c) for s, c, k in zip(basis, coeffs, keep) if k}
    )
    pruned = np.where(keep, coeffs, 0.0)
    predicted = design[n_fit:] @ pruned
    residual = float(np.abs(rhs[n_fit:] - predicted).max()) if cfg.holdout else 0.0
    if residual > cfg.fit_tol:
        raise ResidualTooLargeError(
            f"holdout residual {residual:.3e} exceeds fit_tol {cfg.fit_tol:.3e}; "
            "input may not lie in the candidate span"
        )
    return Decomposition(element=element, residual=residual, conditioning=conditioning)


def _as_element(x) -> AlgebraElement:
    if isinstance(x, BasisSymbol):
        return AlgebraElement.from_symbol(x)
    if isinstance(x, AlgebraElement):
        return x
    raise TypeError(f"expected a basis symbol or element, got {type(x).__name__}")


def level_sum(l1: LevelMatrix, l2: LevelMatrix) -> LevelMatrix:
    if l1.h != l2.h:
        raise DimensionMismatchError("cannot add level matrices of different size")
    rows = [
        [a + b for a, b in zip(r1, r2)] for r1, r2 in zip(l1.entries, l2.entries)
    ]
    try:
        return validate_level(rows)
    except LevelError as exc:
        raise LevelSumInvalidError(f"sum of levels is not admissible: {exc}") from exc


def product_expand(s1, s2, omega: PeriodMatrix, cfg: FitConfig) -> Decomposition:
    """Expand a pointwise product of two single-level elements in the summed level.

    The product of functions obeying the two shift laws obeys the law of the
    entrywise sum of the levels, so the fit runs over that level's symbols
    with degree bounded by the sum of the factors' degrees.
    """
    e1, e2 = _as_element(s1), _as_element(s2)
    lv1, lv2 = e1.levels(), e2.levels()
    if len(lv1) != 1 or len(lv2) != 1:
        raise DimensionMismatchError("product factors must each carry a single level")
    lvl = level_sum(lv1[0], lv2[0])
    degree = e1.degree() + e2.degree()
    cfg1 = _eval_cfg(lv1[0], omega, cfg.sample_box, e1.degree())
    cfg2 = _eval_cfg(lv2[0], omega, cfg.sample_box, e2.degree())

    def f(z, w):
        return (
            evaluate_element(e1, omega, z, w, cfg1).value
            * evaluate_element(e2, omega, z, w, cfg2).value
        )

    return fit_in_basis(f, lvl, degree, omega, cfg)


def _expr_shape(expr) -> tuple[int, int]:
    if isinstance(expr, DerivSymbol):
        return (expr.level.h, expr.char.g)
    if isinstance(expr, (Sum, Product)):
        shapes = {_expr_shape(c) for c in expr.children}
        if len(shapes) != 1:
            raise DimensionMismatchError(f"expression mixes shapes {sorted(shapes)}")
        return shapes.pop()
    if isinstance(expr, Scale):
        return _expr_shape(expr.child)
    raise TypeError(f"not an expression node: {expr!r}")


def _decompose_node(expr, omega, cfg):
    """Recursive symbol-level decomposition; returns (element, max conditioning)."""
    if isinstance(expr, DerivSymbol):
        return AlgebraElement.from_symbol(BasisSymbol(expr.level, expr.j, expr.char)), 0.0
    if isinstance(expr, Scale):
        elem, cond = _decompose_node(expr.child, omega, cfg)
        return expr.coeff * elem, cond
    if isinstance(expr, Sum):
        total = AlgebraElement.zero()
        cond = 0.0
        for child in expr.children:
            elem, c = _decompose_node(child, omega, cfg)
            total = total + elem
            cond = max(cond, c)
        return total, cond
    if isinstance(expr, Product):
        acc, cond = _decompose_node(expr.children[0], omega, cfg)
        for child in expr.children[1:]:
            nxt, c = _decompose_node(child, omega, cfg)
            cond = max(cond, c)
            if acc.is_zero() or nxt.is_zero():
                acc = AlgebraElement.zero()
                continue
            out = AlgebraElement.zero()
            for la in acc.levels():
                for lb in nxt.levels():
                    d = product_expand(acc.level_component(la), nxt.level_component(lb), omega, cfg)
                    out = out + d.element
                    cond = max(cond, d.conditioning)
            acc = out.prune(PRUNE_EPS)
        return acc, cond
    raise TypeError(f"not an expression node: {expr!r}")


def _theta_cfg_cache(omega, box):
    cache = {}

    def get(level):
        if level not in cache:
            cache[level] = _eval_cfg(level, omega, box + 0.02, 0)
        return cache[level]

    return get


def _expr_fd_value(expr, omega, w, cfg_for) -> complex:
    """Value of the expression at W with every leaf taken as a W-derivative
    of its theta series, computed by finite differences."""
    if isinstance(expr, DerivSymbol):
        f = lambda ww: theta_series(expr.level, expr.char, omega, ww, cfg_for(expr.level)).value
        return wderiv_fd(f, w, expr.j)
    if isinstance(expr, Sum):
        return sum(_expr_fd_value(c, omega, w, cfg_for) for c in expr.children)
    if isinstance(expr, Product):
        out = 1.0 + 0j
        for c in expr.children:
            out *= _expr_fd_value(c, omega, w, cfg_for)
        return out
    if isinstance(expr, Scale):
        return expr.coeff * _expr_fd_value(expr.child, omega, w, cfg_for)
    raise TypeError(f"not an expression node: {expr!r}")


def _element_fd_value(elem: AlgebraElement, omega, w, cfg_for) -> complex:
    out = 0j
    for s, coeff in elem.sorted_terms():
        f = lambda ww, s=s: theta_series(s.level, s.char, omega, ww, cfg_for(s.level)).value
        out += complex(coeff) * wderiv_fd(f, w, s.j)
    return out


def _expr_aux_value(expr, omega, z, w, cache) -> complex:
    """Value of the expression at (Z, W) with every leaf read as its auxiliary series."""
    if isinstance(expr, DerivSymbol):
        cfg = cache(expr.level, expr.j.size)
        return aux_theta_series(expr.level, expr.j, expr.char, omega, z, w, cfg).value
    if isinstance(expr, Sum):
        return sum(_expr_aux_value(c, omega, z, w, cache) for c in expr.children)
    if isinstance(expr, Product):
        out = 1.0 + 0j
        for c in expr.children:
            out *= _expr_aux_value(c, omega, z, w, cache)
        return out
    if isinstance(expr, Scale):
        return expr.coeff * _expr_aux_value(expr.child, omega, z, w, cache)
    raise TypeError(f"not an expression node: {expr!r}")


def diff_poly_decompose(expr: DiffPolyExpr, omega: PeriodMatrix, cfg: FitConfig) -> Decomposition:
    """Rewrite a differential polynomial as one combination of basis symbols.

    Leaves map to their symbols, sums and scalings combine exactly, and each
    pairwise product is expanded by a certified fit.  The returned residual
    is an end-to-end certificate at ``cfg.holdout`` fresh W points: the
    expression and the returned combination are both evaluated as
    W-derivative polynomials of plain theta series by finite differences and
    compared.
    """
    h, g = _expr_shape(expr)
    if g != omega.g:
        raise DimensionMismatchError("expression width does not match omega")
    element, conditioning = _decompose_node(expr, omega, cfg)
    if conditioning > 0:
        # at least one product was fitted numerically: combinations of fitted
        # blocks can leave cancellation residue below the noise floor
        element = element.prune(PRUNE_EPS)

    _, w_pts = _sample_points(cfg.seed, _STREAM_CERTIFY, cfg.holdout, h, g, cfg.sample_box)
    cfg_for = _theta_cfg_cache(omega, cfg.sample_box)
    residual = 0.0
    for i in range(cfg.holdout):
        lhs = _expr_fd_value(expr, omega, w_pts[i], cfg_for)
        rhs = _element_fd_value(element, omega, w_pts[i], cfg_for)
        residual = max(residual, abs(lhs - rhs))
    return Decomposition(element=element, residual=residual, conditioning=conditioning)


def restrict_z0(x: AlgebraElement, omega: PeriodMatrix, w, cfg: TruncationConfig) -> ThetaValue:
    """Evaluate an element at Z = 0, i.e. as the matching W-derivative combination."""
    if x.is_zero():
        return ThetaValue(value=0j, tail_bound=0.0)
    h, g = x.shape()
    return evaluate_element(x, omega, np.zeros((h, g), dtype=complex), w, cfg)


def verify_theorem3(expr: DiffPolyExpr, dec: Decomposition, omega: PeriodMatrix,
                    cfg: FitConfig) -> dict:
    """Independent checks that a decomposition represents its expression.

    Reports the largest mismatch between the expression and the decomposed
    element (a) as W-derivative polynomials at Z = 0 via finite differences,
    (b) as sampled functions of (Z, W), and (c) the worst shift-law residual
    of the element's level components, certifying that the output transforms
    with the summed level.
    """
    h, g = _expr_shape(expr)
    n = cfg.holdout
    z_pts, w_pts = _sample_points(cfg.seed, _STREAM_VERIFY, n, h, g, cfg.sample_box)
    cfg_for = _theta_cfg_cache(omega, cfg.sample_box)

    aux_cfgs = {}

    def aux_cache(level, degree):
        key = (level, degree)
        if key not in aux_cfgs:
            aux_cfgs[key] = _eval_cfg(level, omega, cfg.sample_box, degree)
        return aux_cfgs[key]

    max_z0 = 0.0
    max_sample = 0.0
    elem_cfg = {
        lvl: _eval_cfg(lvl, omega, cfg.sample_box, dec.element.degree())
        for lvl in dec.element.levels()
    }
    for i in range(n):
        lhs0 = _expr_fd_value(expr, omega, w_pts[i], cfg_for)
        rhs0 = _element_fd_value(dec.element, omega, w_pts[i], cfg_for)
        max_z0 = max(max_z0, abs(lhs0 - rhs0))
        lhs = _expr_aux_value(expr, omega, z_pts[i], w_pts[i], aux_cache)
        rhs = sum(
            evaluate_element(
                dec.element.level_component(lvl), omega, z_pts[i], w_pts[i], elem_cfg[lvl]
            ).value
            for lvl in dec.element.levels()
        )
        max_sample = max(max_sample, abs(lhs - rhs))

    # shift-law residual of each level component of the output
    im_reach = float(np.abs(omega.omega.imag).sum(axis=0).max())
    max_qp = 0.0
    rng = _rng(cfg.seed, _STREAM_VERIFY + 16)
    for lvl in dec.element.levels():
        comp = dec.element.level_component(lvl)
        qp_cfg = _eval_cfg(lvl, omega, cfg.sample_box + im_reach + 1.0, comp.degree())
        for _ in range(4):
            z = rng.uniform(-cfg.sample_box, cfg.sample_box, (h, g)) * (1 + 0j)
            w = rng.uniform(-cfg.sample_box, cfg.sample_box, (h, g)) + 1j * rng.uniform(
                -cfg.sample_box, cfg.sample_box, (h, g)
            )
            xi = rng.integers(-1, 2, (h, g)).astype(float)
            eta = rng.integers(-1, 2, (h, g)).astype(float)
            shifted = evaluate_element(
                comp, omega, z + xi, w + xi @ omega.omega + eta, qp_cfg
            ).value
            factor = transformation_factor(lvl, omega, w, xi)
            base = evaluate_element(comp, omega, z, w, qp_cfg).value
            max_qp = max(max_qp, abs(shifted - factor * base) / max(1.0, abs(factor)))

    return {
        "points": n,
        "max_z0_residual": max_z0,
        "max_sample_residual": max_sample,
        "max_quasiperiod_residual": max_qp,
    }


def fit_in_basis_sequential(f: Callable, level: LevelMatrix, max_degree: int,
                            omega: PeriodMatrix, cfg: FitConfig) -> Decomposition:
    """Degree-peeling fit, kept as a slower diagnostic alternative to fit_in_basis.

    Works down from the top degree: the leading Z-form of the remainder is
    isolated by discrete Fourier extraction along scaled Z rays, fitted
    against the closed-form leading forms (2 pi i)^|J| (MZ)^J theta[A](W) of
    the degree-|J| symbols, and the fitted series are subtracted before
    descending.  Useful for locating the degree block responsible when the
    global solve reports bad conditioning.
    """
    h, g = level.h, omega.g
    chars = enumerate_characteristics(level, omega.g)
    theta_cfg = _eval_cfg(level, omega, cfg.sample_box, 0)
    full_cfg = _eval_cfg(level, omega, cfg.sample_box, max_degree)
    m = level.as_array()

    element = AlgebraElement.zero()

    def remainder(z, w):
        out = f(z, w)
        if not element.is_zero():
            out -= evaluate_element(element, omega, z, w, full_cfg).value
        return out

    cond_worst = 0.0
    for degree in range(max_degree, 0, -1):
        syms = [
            BasisSymbol(level, j, ch)
            for j in multi_indices_of_size(h, g, degree)
            for ch in chars
        ]
        count = math.ceil(cfg.oversample * len(syms)) + 4
        z_pts, w_pts = _sample_points(cfg.seed, _STREAM_PEEL + degree, count, h, g, cfg.sample_box)
        roots = np.exp(2j * np.pi * np.arange(degree + 1) / (degree + 1))

        lead_rhs = np.empty(count, dtype=complex)
        for i in range(count):
            vals = np.array([remainder(t * z_pts[i], w_pts[i]) for t in roots])
            lead_rhs[i] = (vals * np.conj(roots) ** degree).mean()

        design = np.empty((count, len(syms)), dtype=complex)
        for i in range(count):
            mz = m @ z_pts[i]
            for c, s in enumerate(syms):
                poly = np.prod(mz ** s.j.as_array())
                theta = theta_series(level, s.char, omega, w_pts[i], theta_cfg).value
                design[i, c] = (2j * np.pi) ** degree * poly * theta
        coeffs, _, _, sv = np.linalg.lstsq(design, lead_rhs, rcond=None)
        cond_worst = max(cond_worst, float(sv[0] / sv[-1]) if sv[-1] > 0 else math.inf)
        element = element + AlgebraElement(
            {s: complex(c) for s, c in zip(syms, coeffs) if abs(c) > PRUNE_EPS}
        )

    # the remainder now has Z-degree zero: fit it over the plain theta basis
    count = math.ceil(cfg.oversample * len(chars)) + 4
    z_pts, w_pts = _sample_points(cfg.seed, _STREAM_PEEL, count + cfg.holdout, h, g, cfg.sample_box)
    design = np.array(
        [
            [theta_series(level, ch, omega, w_pts[i], theta_cfg).value for ch in chars]
            for i in range(count)
        ],
        dtype=complex,
    )
    rhs = np.array([remainder(z_pts[i], w_pts[i]) for i in range(count)], dtype=complex)
    coeffs, _, _, sv = np.linalg.lstsq(design, rhs, rcond=None)
    cond_worst = max(cond_worst, float(sv[0] / sv[-1]) if sv[-1] > 0 else math.inf)
    j0 = MultiIndex.zeros(h, g)
    element = element + AlgebraElement(
        {
            BasisSymbol(level, j0, ch): complex(c)
            for ch, c in zip(chars, coeffs)
            if abs(c) > PRUNE_EPS
        }
    )

    residual = 0.0
    for i in range(count, count + cfg.holdout):
        got = evaluate_element(element, omega, z_pts[i], w_pts[i], full_cfg).value
        residual = max(residual, abs(f(z_pts[i], w_pts[i]) - got))
    return Decomposition(element=element, residual=residual, conditioning=cond_worst)
