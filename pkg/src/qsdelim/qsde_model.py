"""Coefficient families for right Hudson-Parthasarathy equations.

A `QsdeCoefficients` is an assembled quadruple (K, L_i, M_i, N_ij) at one
value of the scaling parameter (or in the limit).  A `ScaledFamily` is the
singular-scaling decomposition K(k) = k^2 Y + k A + B, L_i(k) = k F_i + G_i,
N_ij(k) = W_ij; M is never stored for a family because the unitarity
relations determine it completely.

Validators never raise on a failed relation; they return a report with one
entry per relation group, where the violation is the spectral norm of the
defect operator.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import SingularFastDynamics, StructuralViolation
from .operator_core import (
    DEFAULT_COND_LIMIT,
    DEFAULT_TOL,
    HilbertSpace,
    Operator,
    SubspacePair,
    restricted_inverse,
    spectral_norm,
)


def _check_family(space: HilbertSpace, n: int, ops):
    if n < 1:
        raise ValueError("channel count must be >= 1")
    for op in ops:
        if op.space != space:
            raise ValueError("all coefficients must share one space")


@dataclass(frozen=True)
class QsdeCoefficients:
    """Assembled Hudson-Parthasarathy coefficient quadruple."""

    n: int
    space: HilbertSpace
    k_op: Operator
    l_ops: tuple[Operator, ...]
    m_ops: tuple[Operator, ...]
    n_ops: tuple[tuple[Operator, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "l_ops", tuple(self.l_ops))
        object.__setattr__(self, "m_ops", tuple(self.m_ops))
        object.__setattr__(self, "n_ops", tuple(tuple(row) for row in self.n_ops))
        if len(self.l_ops) != self.n or len(self.m_ops) != self.n:
            raise ValueError("need exactly n L and M operators")
        if len(self.n_ops) != self.n or any(len(r) != self.n for r in self.n_ops):
            raise ValueError("N must be an n x n grid")
        flat = [self.k_op, *self.l_ops, *self.m_ops]
        flat += [op for row in self.n_ops for op in row]
        _check_family(self.space, self.n, flat)


@dataclass(frozen=True)
class ScaledFamily:
    """Singular-scaling decomposition of a prelimit coefficient family."""

    n: int
    space: HilbertSpace
    y: Operator
    a: Operator
    b: Operator
    f_ops: tuple[Operator, ...]
    g_ops: tuple[Operator, ...]
    w_ops: tuple[tuple[Operator, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "f_ops", tuple(self.f_ops))
        object.__setattr__(self, "g_ops", tuple(self.g_ops))
        object.__setattr__(self, "w_ops", tuple(tuple(row) for row in self.w_ops))
        if len(self.f_ops) != self.n or len(self.g_ops) != self.n:
            raise ValueError("need exactly n F and G operators")
        if len(self.w_ops) != self.n or any(len(r) != self.n for r in self.w_ops):
            raise ValueError("W must be an n x n grid")
        flat = [self.y, self.a, self.b, *self.f_ops, *self.g_ops]
        flat += [op for row in self.w_ops for op in row]
        _check_family(self.space, self.n, flat)


@dataclass(frozen=True)
class CheckResult:
    name: str
    max_violation: float
    tolerance: float
    passed: bool


@dataclass(frozen=True)
class ValidationReport:
    checks: tuple[CheckResult, ...]

    def __post_init__(self):
        object.__setattr__(self, "checks", tuple(self.checks))

    @property
    def overall(self) -> bool:
        return all(c.passed for c in self.checks)

    def failing(self) -> tuple[CheckResult, ...]:
        return tuple(c for c in self.checks if not c.passed)

    def __getitem__(self, name: str) -> CheckResult:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)


def _check(name: str, defect_norm: float, tol: float, scale: float) -> CheckResult:
    threshold = tol * max(1.0, scale)
    return CheckResult(name, defect_norm, threshold, defect_norm <= threshold)


def assemble(fam: ScaledFamily, k: float) -> QsdeCoefficients:
    """Materialize the prelimit coefficients at scaling parameter k > 0."""
    k = float(k)
    if k <= 0:
        raise ValueError("scaling parameter k must be positive")
    k_op = (k * k) * fam.y + k * fam.a + fam.b
    l_ops = tuple(k * f + g for f, g in zip(fam.f_ops, fam.g_ops))
    m_ops = tuple(
        -sum((fam.w_ops[i][j] @ l_ops[j].dag() for j in range(fam.n)),
             Operator.zero(fam.space))
        for i in range(fam.n)
    )
    return QsdeCoefficients(fam.n, fam.space, k_op, l_ops, m_ops, fam.w_ops)


def _unitarity_defect(grid, space: HilbertSpace, n: int) -> float:
    """Max spectral-norm defect of the co-isometry/isometry relations."""
    ident = np.eye(space.total_dim)
    worst = 0.0
    for m in range(n):
        for ell in range(n):
            delta = ident if m == ell else 0.0
            right = sum(
                grid[m][j].entries @ grid[ell][j].entries.conj().T for j in range(n)
            ) - delta
            left = sum(
                grid[j][m].entries.conj().T @ grid[j][ell].entries for j in range(n)
            ) - delta
            worst = max(worst, np.linalg.norm(right, 2), np.linalg.norm(left, 2))
    return worst


def hp_validate(c: QsdeCoefficients, tol: float = DEFAULT_TOL) -> ValidationReport:
    """Check the Hudson-Parthasarathy relations of an assembled quadruple."""
    zero = Operator.zero(c.space)
    k_defect = c.k_op + c.k_op.dag() + sum(
        (l @ l.dag() for l in c.l_ops), zero
    )
    m_defect = max(
        spectral_norm(
            c.m_ops[i] + sum(
                (c.n_ops[i][j] @ c.l_ops[j].dag() for j in range(c.n)), zero
            )
        )
        for i in range(c.n)
    )
    n_defect = _unitarity_defect(c.n_ops, c.space, c.n)
    scale = max(
        [spectral_norm(c.k_op)]
        + [spectral_norm(l) for l in c.l_ops]
        + [spectral_norm(m) for m in c.m_ops]
        + [spectral_norm(op) for row in c.n_ops for op in row]
    )
    return ValidationReport((
        _check("hp.k", spectral_norm(k_defect), tol, scale),
        _check("hp.m", m_defect, tol, scale),
        _check("hp.n", n_defect, tol, scale),
    ))


def scaled_hp_validate(fam: ScaledFamily, tol: float = DEFAULT_TOL) -> ValidationReport:
    """Order-by-order unitarity relations of the scaling decomposition.

    Passing implies hp_validate(assemble(fam, k)) passes for every k.
    """
    zero = Operator.zero(fam.space)
    y_defect = fam.y + fam.y.dag() + sum((f @ f.dag() for f in fam.f_ops), zero)
    a_defect = fam.a + fam.a.dag() + sum(
        (f @ g.dag() + g @ f.dag() for f, g in zip(fam.f_ops, fam.g_ops)), zero
    )
    b_defect = fam.b + fam.b.dag() + sum((g @ g.dag() for g in fam.g_ops), zero)
    w_defect = _unitarity_defect(fam.w_ops, fam.space, fam.n)
    norms = [spectral_norm(op) for op in (fam.y, fam.a, fam.b)]
    norms += [spectral_norm(op) for op in fam.f_ops + fam.g_ops]
    norms += [spectral_norm(op) for row in fam.w_ops for op in row]
    scale = max(norms)
    return ValidationReport((
        _check("scaled.y", spectral_norm(y_defect), tol, scale),
        _check("scaled.a", spectral_norm(a_defect), tol, scale),
        _check("scaled.b", spectral_norm(b_defect), tol, scale),
        _check("scaled.w", w_defect, tol, scale),
    ))


def structural_validate(
    fam: ScaledFamily,
    sub: SubspacePair,
    tol: float = DEFAULT_TOL,
    cond_limit: float = DEFAULT_COND_LIMIT,
) -> ValidationReport:
    """Structural requirements for a well-defined elimination limit.

    Covers the fast-generator conditions (b)-(e) on the slow subspace and
    the side conditions that make the limit coefficients close on it.
    """
    p0, p1 = sub.p0, sub.p1
    scale = max(
        [spectral_norm(op) for op in (fam.y, fam.a)]
        + [spectral_norm(f) for f in fam.f_ops]
        + [1.0]
    )
    checks = [
        _check("structural.b", spectral_norm(fam.y @ p0), tol, scale),
        _check(
            "structural.d",
            max(spectral_norm(f.dag() @ p0) for f in fam.f_ops),
            tol,
            scale,
        ),
        _check("structural.e", spectral_norm(p0 @ fam.a @ p0), tol, scale),
    ]
    y_tilde = None
    try:
        y_tilde = restricted_inverse(fam.y, sub, cond_limit=cond_limit, tol=tol)
        inv_defect = max(
            spectral_norm(y_tilde @ fam.y - p1),
            spectral_norm(fam.y @ y_tilde - p1),
        )
        checks.insert(1, _check("structural.c", inv_defect, 1e-10, scale))
    except (SingularFastDynamics, StructuralViolation):
        checks.insert(1, CheckResult("structural.c", float("inf"), tol, False))

    side_names = ("limit.l_side", "limit.n_side_right", "limit.n_side_left")
    if y_tilde is None:
        for name in side_names:
            checks.append(CheckResult(name, float("inf"), tol, False))
    else:
        side_scale = max(scale, max(spectral_norm(g) for g in fam.g_ops))
        l_side = max(
            spectral_norm(p0 @ (g - fam.a @ y_tilde @ f) @ p1)
            for f, g in zip(fam.f_ops, fam.g_ops)
        )
        n_right = 0.0
        n_left = 0.0
        ident = Operator.identity(fam.space)
        for i in range(fam.n):
            for j in range(fam.n):
                term = Operator.zero(fam.space)
                for ell in range(fam.n):
                    inner = fam.f_ops[ell].dag() @ y_tilde @ fam.f_ops[j]
                    if ell == j:
                        inner = inner + ident
                    term = term + fam.w_ops[i][ell] @ inner
                n_right = max(n_right, spectral_norm(p0 @ term @ p1))
                n_left = max(n_left, spectral_norm(p1 @ term @ p0))
        checks.append(_check("limit.l_side", l_side, tol, side_scale))
        checks.append(_check("limit.n_side_right", n_right, tol, side_scale))
        checks.append(_check("limit.n_side_left", n_left, tol, side_scale))
    return ValidationReport(tuple(checks))
