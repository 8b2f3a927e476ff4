"""Built-in verification suites over the desk-scale configurations.

Three suites back the command line and the acceptance tests:

* ``quasiperiodicity``: sampled residuals of the joint shift law and of the
  ladder identity for the shift operators,
* ``commutators``: exact bracket relations, ladder action and the
  kernel characterization of the derivative-free subalgebra,
* ``theorem3``: decomposition of a reference expression set with
  finite-difference certification and two-seed coefficient agreement.

Reports are plain dicts of JSON-serializable values; given a seed they are
deterministic down to the byte.
"""

from __future__ import annotations

import itertools

import numpy as np

from .algebra import (
    AlgebraElement,
    BasisSymbol,
    apply,
    commutator,
    in_theta_subalgebra,
    lowering_op,
    raising_op,
    scaling_op,
)
from .decompose import (
    DerivSymbol,
    FitConfig,
    Product,
    Scale,
    Sum,
    _rng,
    diff_poly_decompose,
    verify_theorem3,
)
from .evaluation import (
    TruncationConfig,
    choose_radius,
    quasi_period_residual,
    shift_operator_check,
)
from .numerics import (
    MultiIndex,
    PeriodMatrix,
    enumerate_characteristics,
    multi_indices_up_to,
    validate_level,
)

QP_TOL = 1e-8
SHIFT_TOL = 1e-6
THEOREM3_TOL = 1e-5
UNIQUENESS_TOL = 1e-6
SAMPLE_BOX = 0.4

_SERIES_CONFIGS = (
    {"name": "h1_level2", "level": [[2]], "omega": [[[0.0, 1.0]]]},
    {"name": "h1_level4", "level": [[4]], "omega": [[[0.0, 1.0]]]},
    {"name": "h2_hex", "level": [[2, 1], [1, 2]], "omega": [[[0.0, 1.0]]]},
    {
        "name": "g2_level2",
        "level": [[2]],
        "omega": [[[0.0, 1.0], [0.0, 0.3]], [[0.0, 0.3], [0.0, 2.0]]],
    },
)


def _omega_from_pairs(rows) -> PeriodMatrix:
    return PeriodMatrix([[complex(re, im) for re, im in row] for row in rows])


def _random_multi_index(rng, h, g, max_size):
    candidates = multi_indices_up_to(h, g, max_size)
    return candidates[int(rng.integers(0, len(candidates)))]


def run_quasiperiodicity_suite(seed: int = 0, tol: float = QP_TOL,
                               cases_per_config: int = 100,
                               shift_tol: float = SHIFT_TOL,
                               shift_cases: int = 50) -> dict:
    """Sampled residuals of the joint shift law and the raising identity."""
    configs_out = []
    passed = True
    for idx, spec_cfg in enumerate(_SERIES_CONFIGS):
        level = validate_level(spec_cfg["level"])
        omega = _omega_from_pairs(spec_cfg["omega"])
        h, g = level.h, omega.g
        chars = enumerate_characteristics(level, g)
        im_reach = float(np.abs(omega.omega.imag).sum(axis=0).max())
        w_box = SAMPLE_BOX + im_reach
        radius = choose_radius(level, omega, w_box + 1.0, 1e-12, 3)
        cfg = TruncationConfig(radius=radius, tail_tol=1e-11)
        rng = _rng(seed, 32 + idx)

        max_qp = 0.0
        failures = []
        for _ in range(cases_per_config):
            w = rng.uniform(-SAMPLE_BOX, SAMPLE_BOX, (h, g)) + 1j * rng.uniform(
                -SAMPLE_BOX, SAMPLE_BOX, (h, g)
            )
            z = rng.uniform(-SAMPLE_BOX, SAMPLE_BOX, (h, g)) + 1j * rng.uniform(
                -SAMPLE_BOX, SAMPLE_BOX, (h, g)
            )
            xi = rng.integers(-1, 2, (h, g)).astype(float)
            eta = rng.integers(-1, 2, (h, g)).astype(float)
            j = _random_multi_index(rng, h, g, 2)
            char = chars[int(rng.integers(0, len(chars)))]
            r = quasi_period_residual(level, j, char, omega, z, w, xi, eta, cfg)
            max_qp = max(max_qp, r)
            if r >= tol:
                failures.append(
                    {"j": [list(row) for row in j.j], "char_index": char.index, "residual": r}
                )

        max_shift = 0.0
        for _ in range(shift_cases):
            w = rng.uniform(-SAMPLE_BOX, SAMPLE_BOX, (h, g)) + 1j * rng.uniform(
                -SAMPLE_BOX, SAMPLE_BOX, (h, g)
            )
            z = rng.uniform(-SAMPLE_BOX, SAMPLE_BOX, (h, g)) + 1j * rng.uniform(
                -SAMPLE_BOX, SAMPLE_BOX, (h, g)
            )
            j = _random_multi_index(rng, h, g, 2)
            char = chars[int(rng.integers(0, len(chars)))]
            k = int(rng.integers(1, h + 1))
            a = int(rng.integers(1, g + 1))
            r = shift_operator_check(level, j, char, omega, z, w, k, a, cfg)
            max_shift = max(max_shift, r)
            if r >= shift_tol:
                failures.append(
                    {"shift": [k, a], "j": [list(row) for row in j.j], "residual": r}
                )

        ok = not failures
        passed = passed and ok
        configs_out.append(
            {
                "name": spec_cfg["name"],
                "cases": cases_per_config,
                "shift_cases": shift_cases,
                "max_residual": max_qp,
                "max_shift_residual": max_shift,
                "radius": radius,
                "passed": ok,
                "failures": failures,
            }
        )
    return {
        "suite": "quasiperiodicity",
        "tolerance": tol,
        "shift_tolerance": shift_tol,
        "passed": passed,
        "configs": configs_out,
    }


_ALGEBRA_CONFIGS = (
    ([[2]], 1), ([[2]], 2), ([[4]], 1), ([[4]], 2),
    ([[2, 1], [1, 2]], 1), ([[2, 1], [1, 2]], 2),
)


def run_commutator_suite(seed: int = 0, max_order: int = 3,
                         kernel_elements: int = 200) -> dict:
    """Exact bracket table, ladder action and the kernel characterization."""
    bracket_checks = 0
    bracket_violations = 0
    symbols_checked = 0
    for rows, g in _ALGEBRA_CONFIGS:
        level = validate_level(rows)
        h = level.h
        chars = enumerate_characteristics(level, g)
        scalings = [scaling_op(k, l) for k in range(1, h + 1) for l in range(1, h + 1)]
        lowerings = [lowering_op(m, a) for m in range(1, h + 1) for a in range(1, g + 1)]
        raisings = [raising_op(n, b) for n in range(1, h + 1) for b in range(1, g + 1)]
        zero_pairs = (
            list(itertools.combinations(scalings, 2))
            + [(e, d) for e in scalings for d in lowerings]
            + [(e, r) for e in scalings for r in raisings]
            + list(itertools.combinations(lowerings, 2))
            + list(itertools.combinations(raisings, 2))
        )
        for j in multi_indices_up_to(h, g, max_order):
            for ch in chars:
                x = AlgebraElement.from_symbol(BasisSymbol(level, j, ch))
                symbols_checked += 1
                for op1, op2 in zero_pairs:
                    bracket_checks += 1
                    if not commutator(op1, op2, x).is_zero():
                        bracket_violations += 1
                for d in lowerings:
                    for r in raisings:
                        bracket_checks += 1
                        got = commutator(d, r, x)
                        want = apply(scaling_op(d.i, r.i), x) if d.j == r.j else AlgebraElement.zero()
                        if got != want:
                            bracket_violations += 1

    # kernel characterization: operator annihilation against the structural test
    rng = _rng(seed, 48)
    levels = [validate_level([[2]]), validate_level([[4]]), validate_level([[2, 1], [1, 2]])]
    kernel_disagreements = 0
    for _ in range(kernel_elements):
        level = levels[int(rng.integers(0, len(levels)))]
        h = level.h
        chars = enumerate_characteristics(level, 1)
        js = multi_indices_up_to(h, 1, 2)
        terms = {}
        zero_only = bool(rng.integers(0, 2))
        for _ in range(int(rng.integers(1, 5))):
            j = MultiIndex.zeros(h, 1) if zero_only else js[int(rng.integers(0, len(js)))]
            sym = BasisSymbol(level, j, chars[int(rng.integers(0, len(chars)))])
            terms[sym] = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
        x = AlgebraElement(terms)
        structural = all(s.j.size == 0 for s in x.terms())
        if in_theta_subalgebra(x) != structural:
            kernel_disagreements += 1

    passed = bracket_violations == 0 and kernel_disagreements == 0
    return {
        "suite": "commutators",
        "passed": passed,
        "symbols_checked": symbols_checked,
        "bracket_checks": bracket_checks,
        "bracket_violations": bracket_violations,
        "kernel_elements": kernel_elements,
        "kernel_disagreements": kernel_disagreements,
    }


def _theorem3_expressions():
    level = validate_level([[2]])
    chars = enumerate_characteristics(level, 1)
    d0 = DerivSymbol(level, MultiIndex.zeros(1, 1), chars[0])
    d0b = DerivSymbol(level, MultiIndex.zeros(1, 1), chars[1])
    d1 = DerivSymbol(level, MultiIndex.from_rows([[1]]), chars[0])
    d2 = DerivSymbol(level, MultiIndex.from_rows([[2]]), chars[0])
    prod01 = Product((d0, d1))
    return [
        ("single_j0", d0),
        ("single_j1", d1),
        ("single_j2", d2),
        ("theta_product", Product((d0, d0b))),
        ("wronskian", Sum((Product((d0, d2)), Scale(-1.0 + 0j, Product((d1, d1)))))),
        ("syntactic_zero", Sum((prod01, Scale(-1.0 + 0j, prod01)))),
    ]


def run_theorem3_suite(seed: int = 0, tol: float = THEOREM3_TOL,
                       uniqueness_tol: float = UNIQUENESS_TOL,
                       holdout: int = 20) -> dict:
    """Decompose the reference expression set and certify it independently."""
    omega = PeriodMatrix([[1j]])
    results = []
    passed = True
    for name, expr in _theorem3_expressions():
        cfg = FitConfig(seed=seed, holdout=holdout)
        dec = diff_poly_decompose(expr, omega, cfg)
        report = verify_theorem3(expr, dec, omega, cfg)
        cfg2 = FitConfig(seed=(seed + 1000003) & ((1 << 64) - 1), holdout=holdout)
        dec2 = diff_poly_decompose(expr, omega, cfg2)
        syms = set(dec.element.terms()) | set(dec2.element.terms())
        seed_diff = max(
            (
                abs(dec.element.terms().get(s, 0) - dec2.element.terms().get(s, 0))
                for s in syms
            ),
            default=0.0,
        )
        kernel_ok = in_theta_subalgebra(dec.element) == all(
            s.j.size == 0 for s in dec.element.terms()
        )
        ok = (
            dec.residual < tol
            and report["max_z0_residual"] < tol
            and report["max_quasiperiod_residual"] < 1e-6
            and seed_diff < uniqueness_tol
            and kernel_ok
        )
        if name == "syntactic_zero":
            ok = ok and dec.element.is_zero()
        passed = passed and ok
        results.append(
            {
                "expression": name,
                "terms": len(dec.element),
                "residual": dec.residual,
                "conditioning": dec.conditioning,
                "max_z0_residual": report["max_z0_residual"],
                "max_sample_residual": report["max_sample_residual"],
                "max_quasiperiod_residual": report["max_quasiperiod_residual"],
                "seed_agreement": seed_diff,
                "passed": ok,
            }
        )
    return {
        "suite": "theorem3",
        "tolerance": tol,
        "uniqueness_tolerance": uniqueness_tol,
        "passed": passed,
        "expressions": results,
    }


def run_suite(name: str, seed: int = 0, tol: float | None = None) -> dict:
    if name == "quasiperiodicity":
        return run_quasiperiodicity_suite(seed, **({"tol": tol} if tol else {}))
    if name == "commutators":
        return run_commutator_suite(seed)
    if name == "theorem3":
        return run_theorem3_suite(seed, **({"tol": tol} if tol else {}))
    if name == "all":
        suites = [
            run_quasiperiodicity_suite(seed, **({"tol": tol} if tol else {})),
            run_commutator_suite(seed),
            run_theorem3_suite(seed),
        ]
        return {"suite": "all", "seed": seed, "passed": all(s["passed"] for s in suites), "suites": suites}
    raise ValueError(f"unknown suite {name!r}")
