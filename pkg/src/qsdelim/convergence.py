"""Numerical witnesses for both directions of the semigroup limit theorem.

Generator residuals use the corrector expansion u + u1/k + u2/k^2 that
cancels the divergent orders of the prelimit generator; semigroup gaps take
the max over a uniform time grid of the distance between the adjoint
prelimit propagator and the embedded limit propagator, restricted to the
slow subspace.  All studies are deterministic: loops run in a fixed order
and reports are bit-reproducible for fixed inputs.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import PreconditionFailed
from .operator_core import Operator, SubspacePair, restricted_inverse, spectral_norm
from .qsde_model import QsdeCoefficients, ScaledFamily, assemble, structural_validate
from .semigroup import FieldAmplitudes, evolve, generator

log = logging.getLogger(__name__)

RESIDUAL_FLOOR = 1e-14


@dataclass(frozen=True)
class KurtzCorrector:
    """Corrector vectors: u on the slow subspace, u1 and u2 off it."""

    u: np.ndarray
    u1: np.ndarray
    u2: np.ndarray

    def at_k(self, k: float) -> np.ndarray:
        return self.u + self.u1 / k + self.u2 / (k * k)


@dataclass(frozen=True)
class ConvergenceReport:
    """Per-k study values with a fitted log-log rate and a verdict."""

    kind: str
    k_schedule: tuple[float, ...]
    values: tuple[float, ...]
    fitted_rate: float
    t_max: float
    grid_points: int
    verdict: bool
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.values) != len(self.k_schedule):
            raise ValueError("need one value per schedule entry")


def field_dressed_parts(fam: ScaledFamily, amp: FieldAmplitudes):
    """Linear and constant parts of the dressed prelimit generator.

    Returns (a_op, b_op) such that the dressed generator at parameter k
    equals k^2 Y + k a_op + b_op.
    """
    if amp.n != fam.n:
        raise ValueError(f"amplitude channel count {amp.n} != model {fam.n}")
    a_op = fam.a
    for i in range(fam.n):
        a_op = a_op + amp.beta[i] * fam.f_ops[i]
        for j in range(fam.n):
            a_op = a_op - (
                amp.alpha[i].conjugate() * (fam.w_ops[i][j] @ fam.f_ops[j].dag())
            )
    shift = 0.5 * sum(abs(z) ** 2 for z in amp.alpha + amp.beta)
    b_op = fam.b - shift * Operator.identity(fam.space)
    for i in range(fam.n):
        b_op = b_op + amp.beta[i] * fam.g_ops[i]
        for j in range(fam.n):
            wij = fam.w_ops[i][j]
            b_op = b_op + amp.alpha[i].conjugate() * amp.beta[j] * wij
            b_op = b_op - amp.alpha[i].conjugate() * (wij @ fam.g_ops[j].dag())
    return a_op, b_op


def kurtz_corrector(fam: ScaledFamily, sub: SubspacePair, amp: FieldAmplitudes,
                    u, tol: float = 1e-9) -> KurtzCorrector:
    """Build the corrector that cancels the k^2 and k^1 generator orders."""
    report = structural_validate(fam, sub, tol=tol)
    if not report.overall:
        raise PreconditionFailed("structural requirements fail", report)
    u = np.asarray(u, dtype=np.complex128)
    if np.linalg.norm(sub.p0.entries @ u - u) > tol * max(1.0, np.linalg.norm(u)):
        raise PreconditionFailed("u must be supported on the slow subspace")
    yt = restricted_inverse(fam.y, sub, tol=tol)
    a_op, b_op = field_dressed_parts(fam, amp)
    u1 = -yt.entries @ (a_op.entries @ u)
    slow_part = (b_op.entries - a_op.entries @ yt.entries @ a_op.entries) @ u
    u2 = -yt.entries @ (sub.p1.entries @ slow_part)
    return KurtzCorrector(u=u, u1=u1, u2=u2)


def _slow_isometry(sub: SubspacePair) -> np.ndarray:
    return sub.slow_basis()


def generator_residual(fam: ScaledFamily, sub: SubspacePair,
                       limit: QsdeCoefficients, amp: FieldAmplitudes,
                       u, k: float, corrector: KurtzCorrector | None = None) -> float:
    """Norm distance between the corrected prelimit action and the limit action."""
    if corrector is None:
        corrector = kurtz_corrector(fam, sub, amp, u)
    v = _slow_isometry(sub)
    uk = corrector.at_k(k)
    big = generator(assemble(fam, k), amp).entries @ uk
    small = generator(limit, amp).entries @ (v.conj().T @ np.asarray(u))
    return float(np.linalg.norm(big - v @ small))


def semigroup_gap(fam: ScaledFamily, sub: SubspacePair,
                  limit: QsdeCoefficients, amp: FieldAmplitudes,
                  T: float, grid_points: int, k: float) -> float:
    """Max over the time grid of the adjoint-propagator distance on the slow subspace."""
    if T <= 0:
        raise ValueError("T must be positive")
    if grid_points < 2:
        raise ValueError("need at least two grid points")
    v = _slow_isometry(sub)
    pre = assemble(fam, k)
    gap = 0.0
    for t in np.linspace(0.0, T, grid_points):
        big = evolve(pre, amp, float(t)).entries.conj().T
        small = evolve(limit, amp, float(t)).entries.conj().T
        diff = (big - v @ small @ v.conj().T) @ v
        gap = max(gap, float(np.linalg.norm(diff, 2)))
    return gap


def rate_fit(ks, residuals) -> float:
    """Ordinary least-squares slope of log(residual) against log(k)."""
    ks = [float(x) for x in ks]
    residuals = [float(r) for r in residuals]
    if len(ks) != len(residuals) or len(ks) < 3:
        raise ValueError("need at least three (k, residual) pairs")
    if any(r < 0 for r in residuals):
        raise ValueError("residuals must be nonnegative")
    pairs = [(k, r) for k, r in zip(ks, residuals) if r > RESIDUAL_FLOOR]
    dropped = len(ks) - len(pairs)
    if dropped:
        log.info("rate_fit: excluded %d residuals at the numerical floor", dropped)
    if len(pairs) < 2:
        raise ValueError("too few residuals above the numerical floor to fit")
    xs = np.log([p[0] for p in pairs])
    ys = np.log([p[1] for p in pairs])
    return float(np.polyfit(xs, ys, 1)[0])


def _safe_rate(ks, values) -> float:
    try:
        return rate_fit(ks, values)
    except ValueError:
        return math.nan


def generator_study(fam: ScaledFamily, sub: SubspacePair,
                    limit: QsdeCoefficients, amp: FieldAmplitudes,
                    k_schedule, u=None, metadata=None) -> ConvergenceReport:
    """Corrected generator residuals over a k-schedule.

    Verdict: residuals all at the numerical floor, or nonincreasing with a
    clearly negative fitted decay exponent.
    """
    ks = tuple(float(k) for k in k_schedule)
    if len(ks) < 3:
        raise ValueError("need a schedule of >= 3 k-values for rate fitting")
    v = _slow_isometry(sub)
    if u is None:
        u = v @ (np.ones(v.shape[1]) / math.sqrt(v.shape[1]))
    corrector = kurtz_corrector(fam, sub, amp, u)
    values = tuple(
        generator_residual(fam, sub, limit, amp, u, k, corrector=corrector)
        for k in ks
    )
    rate = _safe_rate(ks, values)
    if all(val <= RESIDUAL_FLOOR * 10 for val in values):
        verdict = True
    else:
        monotone = all(a >= b - RESIDUAL_FLOOR for a, b in zip(values, values[1:]))
        verdict = monotone and not math.isnan(rate) and rate <= -0.5
    return ConvergenceReport(
        kind="generator", k_schedule=ks, values=values, fitted_rate=rate,
        t_max=0.0, grid_points=0, verdict=verdict, metadata=dict(metadata or {}),
    )


def semigroup_study(fam: ScaledFamily, sub: SubspacePair,
                    limit: QsdeCoefficients, amp: FieldAmplitudes,
                    k_schedule, T: float, grid_points: int,
                    metadata=None) -> ConvergenceReport:
    """Sup-over-grid semigroup gaps over a k-schedule.

    Verdict: the largest-k gap improves on the smallest-k gap by at least a
    factor of five (or everything sits at the numerical floor).
    """
    ks = tuple(float(k) for k in k_schedule)
    if len(ks) < 3:
        raise ValueError("need a schedule of >= 3 k-values for rate fitting")
    values = tuple(
        semigroup_gap(fam, sub, limit, amp, T, grid_points, k) for k in ks
    )
    rate = _safe_rate(ks, values)
    if all(val <= RESIDUAL_FLOOR * 10 for val in values):
        verdict = True
    else:
        verdict = values[-1] <= values[0] / 5.0
    return ConvergenceReport(
        kind="semigroup", k_schedule=ks, values=values, fitted_rate=rate,
        t_max=float(T), grid_points=int(grid_points), verdict=verdict,
        metadata=dict(metadata or {}),
    )


def truncation_study(limit_family: QsdeCoefficients, cutoffs, amp: FieldAmplitudes,
                     T: float, grid_points: int, metadata=None) -> ConvergenceReport:
    """Successive gaps between truncations of a fixed coefficient set.

    `limit_family` lives on the reference space; each cutoff c keeps the
    first c+1 basis states.  Requires trivial scattering (N = I), since
    plain compression of a nontrivial N would break unitarity.  Values are
    the gaps between consecutive cutoffs, measured on the smallest
    truncated subspace; the verdict asks for a Cauchy-style decrease.
    """
    cutoffs = tuple(int(c) for c in cutoffs)
    if len(cutoffs) < 2 or any(a >= b for a, b in zip(cutoffs, cutoffs[1:])):
        raise ValueError("need >= 2 strictly increasing cutoffs")
    d = limit_family.space.total_dim
    if cutoffs[-1] >= d:
        raise ValueError("largest cutoff must stay inside the reference space")
    ident = np.eye(d)
    n_defect = max(
        spectral_norm(
            limit_family.n_ops[i][j]
            - ((1.0 if i == j else 0.0) * Operator(limit_family.space, ident))
        )
        for i in range(limit_family.n)
        for j in range(limit_family.n)
    )
    if n_defect > 1e-12:
        raise ValueError("truncation study requires trivial scattering (N = I)")

    def truncated(cutoff: int) -> QsdeCoefficients:
        p = np.zeros((d, d))
        p[: cutoff + 1, : cutoff + 1] = np.eye(cutoff + 1)
        proj = Operator(limit_family.space, p)
        k_c = proj @ limit_family.k_op @ proj
        l_c = tuple(proj @ l @ proj for l in limit_family.l_ops)
        m_c = tuple(-l.dag() for l in l_c)
        return QsdeCoefficients(
            limit_family.n, limit_family.space, k_c, l_c, m_c, limit_family.n_ops
        )

    window = np.zeros((d, cutoffs[0] + 1))
    window[: cutoffs[0] + 1, :] = np.eye(cutoffs[0] + 1)
    times = np.linspace(0.0, float(T), int(grid_points))
    gaps = []
    coeffs = [truncated(c) for c in cutoffs]
    for lo, hi in zip(coeffs, coeffs[1:]):
        gap = 0.0
        for t in times:
            diff = (
                evolve(lo, amp, float(t)).entries.conj().T
                - evolve(hi, amp, float(t)).entries.conj().T
            ) @ window
            gap = max(gap, float(np.linalg.norm(diff, 2)))
        gaps.append(gap)
    gaps = tuple(gaps)
    if all(gap <= RESIDUAL_FLOOR * 10 for gap in gaps):
        verdict = True
    else:
        verdict = all(a > b for a, b in zip(gaps, gaps[1:])) or len(gaps) == 1
    rate = _safe_rate(cutoffs[:-1], gaps) if len(gaps) >= 3 else math.nan
    return ConvergenceReport(
        kind="truncation",
        k_schedule=tuple(float(c) for c in cutoffs[:-1]),
        values=gaps,
        fitted_rate=rate,
        t_max=float(T),
        grid_points=int(grid_points),
        verdict=verdict,
        metadata=dict(metadata or {}),
    )
