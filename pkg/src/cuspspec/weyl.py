"""Global eigenvalue counting: fiber sums, phase integrals, Weyl residual fits.

The count over one cusp is the exact integer sum of fiber counts over the
finitely many admissible cross-section modes; the whole-manifold count is
bracketed between Dirichlet and Neumann-like (Robin) decoupled counts plus
a Weyl band for the compact core.  Phase integrals give the semiclassical
term whose sum tracks the cusp Weyl volume.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.integrate import quad

from .cross_section import mu_spectrum, unit_ball_volume
from .fiber import (
    DEFAULT_SETTINGS,
    DIRICHLET,
    BoundaryCondition,
    ContinuousSpectrumError,
    FiberPotential,
    PruferSettings,
    _interior_min,
    allowed_interval,
    fiber_count,
    potential_eval,
)
from .model import ManifoldModel, TorusCrossSection, cusp_volume, total_volume

TWO_PI = 2.0 * math.pi

PHASE_QUAD_TOL = 1e-9


@dataclass(frozen=True)
class CountResult:
    """A counting-function sample: integer count (or bracket) vs Weyl term."""

    lam: float
    count_low: int
    count_high: int
    leading: float

    @property
    def count(self) -> int:
        if self.count_low != self.count_high:
            raise ValueError("bracketed result has no single count")
        return self.count_low

    @property
    def residual_low(self) -> float:
        return self.count_low - self.leading

    @property
    def residual_high(self) -> float:
        return self.count_high - self.leading

    @property
    def residual(self) -> float:
        return self.count - self.leading


@dataclass(frozen=True)
class FitReport:
    """Log-log regression of |count - Weyl| against the remainder models."""

    slope: float
    log_correction: bool
    constant: float
    rss: float
    degenerate: bool = False


def weyl_leading(volume: float, n: int, lam: float) -> float:
    """|M| omega_n / (2 pi)^n * lam^(n/2)."""
    return volume * unit_ball_volume(n) / TWO_PI**n * lam ** (n / 2.0)


def mu_cutoff(model: ManifoldModel, lam: float) -> float:
    """Cross-section modes with mu >= lam / min_j a_j^(4 delta_j) contribute
    nothing below lam: their fiber potentials already sit above lam."""
    return lam / min(c.a ** (4.0 * c.delta) for c in model.cusps)


def admissible_fibers(
    model: ManifoldModel, j: int, lam: float, tau: float = 1.0
) -> list[tuple[int, float]]:
    """Indices ell and eigenvalues mu_ell(j, tau) of the contributing modes."""
    cutoff = mu_cutoff(model, lam)
    if cutoff <= 0:
        return []
    spec = mu_spectrum(model.cusps[j].cross_section, tau, cutoff)
    return list(enumerate(spec.values))


def phase_integral(f: FiberPotential, lam: float, tol: float = PHASE_QUAD_TOL) -> float:
    """w(lam) = integral of sqrt([lam - V]_+) over the classically allowed region.

    The square-root vanishing at a turning point t* is removed by the
    substitution t = t* -+ v^2, which restores smooth integrands for the
    adaptive quadrature.  Returns 0 when lam never exceeds V.
    """
    if f.mu == 0.0:
        if lam <= f.ess_inf:
            return 0.0
        raise ContinuousSpectrumError(
            "phase integral of a mu = 0 channel diverges above the essential infimum"
        )
    interval = allowed_interval(f, lam)
    if interval is None:
        return 0.0
    t_lo, t_hi = interval

    def g(t: float) -> float:
        return math.sqrt(max(lam - potential_eval(f, t), 0.0))

    t_min = min(max(_interior_min(f), t_lo), t_hi)
    total = 0.0
    if t_lo < t_min and t_lo > f.alpha:
        # both endpoints singular on [t_lo, t_min]; substitute at the left one
        span = t_min - t_lo
        val, _ = quad(
            lambda v: 2.0 * v * g(t_lo + v * v),
            0.0,
            math.sqrt(span),
            epsabs=tol,
            epsrel=1e-11,
            limit=200,
        )
        total += val
    elif t_lo < t_min:
        val, _ = quad(g, t_lo, t_min, epsabs=tol, epsrel=1e-11, limit=200)
        total += val
    span = t_hi - t_min
    if span > 0:
        val, _ = quad(
            lambda v: 2.0 * v * g(t_hi - v * v),
            0.0,
            math.sqrt(span),
            epsabs=tol,
            epsrel=1e-11,
            limit=200,
        )
        total += val
    return total


def theta_sum(model: ManifoldModel, j: int, lam: float, tau: float = 1.0) -> float:
    """Sum of phase integrals / pi over the admissible fibers of cusp j.

    Exact-zero modes (the free channel of an A = 0 model) are skipped: they
    carry continuous spectrum and no phase term.
    """
    cusp = model.cusps[j]
    terms = []
    for _, mu in admissible_fibers(model, j, lam, tau):
        if mu == 0.0:
            continue
        f = FiberPotential.from_cusp(model.n, cusp.delta, cusp.a, mu)
        terms.append(phase_integral(f, lam))
    return math.fsum(terms) / math.pi


def rj_sum(x: TorusCrossSection, tau: float, mu: float) -> float:
    """R(mu) = sum over the cross-section spectrum of sqrt([mu - mu_ell]_+)."""
    if mu <= 0:
        return 0.0
    values = mu_spectrum(x, tau, mu).values
    return math.fsum(math.sqrt(mu - v) for v in values)


def identity_residual(
    x: TorusCrossSection, tau: float, mu: float, quad_tol: float = 1e-12
) -> float:
    """|R(mu) - (1/2) int_0^oo [mu - s]_+^(-1/2) N(s) ds|, both sides exact.

    N is a step function, so the integral is a finite sum over jump
    intervals; quad_tol only groups floating-point-equal eigenvalues into
    one jump.  The residual is pure rounding noise.
    """
    if mu <= 0:
        return 0.0
    values = mu_spectrum(x, tau, mu).values
    left = math.fsum(math.sqrt(mu - v) for v in values)
    jumps: list[tuple[float, int]] = []
    for v in values:
        if jumps and abs(v - jumps[-1][0]) <= quad_tol:
            jumps[-1] = (jumps[-1][0], jumps[-1][1] + 1)
        else:
            jumps.append((v, 1))
    terms = []
    cumulative = 0
    for k, (s_k, mult) in enumerate(jumps):
        cumulative += mult
        s_next = jumps[k + 1][0] if k + 1 < len(jumps) else mu
        terms.append(cumulative * (math.sqrt(mu - s_k) - math.sqrt(mu - s_next)))
    right = math.fsum(terms)
    return abs(left - right)


def _group_by_mu(fibers: Sequence[tuple[int, float]]) -> list[tuple[float, int]]:
    groups: dict[float, int] = {}
    for _, mu in fibers:
        groups[mu] = groups.get(mu, 0) + 1
    return sorted(groups.items())


def cusp_count(
    model: ManifoldModel,
    j: int,
    lam: float,
    bc: BoundaryCondition = DIRICHLET,
    tau: float = 1.0,
    settings: PruferSettings = DEFAULT_SETTINGS,
) -> CountResult:
    """Exact count of cusp-j eigenvalues below lam: sum of fiber counts.

    In an A = 0 model the mu = 0 mode is skipped; it contributes continuous
    spectrum but no discrete eigenvalues (constant potential for delta = 1,
    nonnegative decaying potential for delta < 1).
    """
    cusp = model.cusps[j]
    fibers = admissible_fibers(model, j, lam, tau)
    count = 0
    for mu, mult in _group_by_mu(fibers):
        if mu == 0.0:
            continue
        f = FiberPotential.from_cusp(model.n, cusp.delta, cusp.a, mu)
        count += mult * fiber_count(f, lam, bc, settings)
    leading = weyl_leading(cusp_volume(cusp, model.n), model.n, lam)
    return CountResult(lam=lam, count_low=count, count_high=count, leading=leading)


def total_count_bracket(
    model: ManifoldModel,
    lam: float,
    tau: float = 1.0,
    settings: PruferSettings = DEFAULT_SETTINGS,
) -> CountResult:
    """Dirichlet/Robin bracket of the whole-manifold counting function.

    low  = core Weyl band floor + sum_j Dirichlet cusp counts
    high = core Weyl band ceiling + sum_j Robin (default beta_j) cusp counts
    For core volume 0 both ends are exact decoupled counts.
    """
    low = 0
    high = 0
    for j in range(len(model.cusps)):
        low += cusp_count(model, j, lam, DIRICHLET, tau, settings).count
        high += cusp_count(model, j, lam, BoundaryCondition.robin(), tau, settings).count
    core = model.core
    if core.volume > 0 or core.remainder_coeff > 0:
        w_core = weyl_leading(core.volume, model.n, lam)
        band = core.remainder_coeff * lam ** ((model.n - 1) / 2.0)
        low += max(0, math.floor(w_core - band))
        high += max(0, math.ceil(w_core + band))
    leading = weyl_leading(total_volume(model), model.n, lam)
    return CountResult(lam=lam, count_low=low, count_high=high, leading=leading)


def remainder_model(n: int, delta: float, lam: float) -> float:
    """Weyl remainder scale r(lam): ln-corrected power for thick cusps
    (delta >= 1/(n-1)), anomalous power lam^(1/(2 delta)) for thin ones."""
    if delta >= 1.0 / (n - 1):
        return lam ** ((n - 1) / 2.0) * math.log(lam)
    return lam ** (1.0 / (2.0 * delta))


def fit_remainder_samples(
    lams: Sequence[float], residuals: Sequence[float]
) -> FitReport:
    """Regress log|residual| on log(lam), with and without a ln(lam) factor,
    and report the model with the smaller residual sum of squares."""
    lams = np.asarray(lams, dtype=float)
    residuals = np.asarray(residuals, dtype=float)
    if lams.size < 8:
        raise ValueError("remainder fit needs at least 8 lambda samples")
    if lams.max() < 10.0 * lams.min():
        raise ValueError("remainder fit needs samples spanning at least one decade")
    if lams.min() <= 1.0:
        raise ValueError("remainder fit needs lam > 1")
    if np.max(np.abs(residuals)) <= 1.0:
        # counts match the Weyl term to rounding; no exponent to estimate
        return FitReport(
            slope=math.nan, log_correction=False, constant=0.0, rss=0.0, degenerate=True
        )
    mask = np.abs(residuals) > 1e-12
    x = np.log(lams[mask])
    y = np.log(np.abs(residuals[mask]))
    design = np.column_stack([np.ones_like(x), x])
    coef_a, _, _, _ = np.linalg.lstsq(design, y, rcond=None)
    rss_a = float(np.sum((y - design @ coef_a) ** 2))
    loglog = np.log(np.log(lams[mask]))
    coef_b, _, _, _ = np.linalg.lstsq(design, y - loglog, rcond=None)
    rss_b = float(np.sum((y - loglog - design @ coef_b) ** 2))
    if rss_b < rss_a:
        return FitReport(
            slope=float(coef_b[1]),
            log_correction=True,
            constant=float(math.exp(coef_b[0])),
            rss=rss_b,
        )
    return FitReport(
        slope=float(coef_a[1]),
        log_correction=False,
        constant=float(math.exp(coef_a[0])),
        rss=rss_a,
    )


def remainder_fit(
    model: ManifoldModel,
    lambda_grid: Sequence[float],
    tau: float = 1.0,
    bc: BoundaryCondition = DIRICHLET,
    settings: PruferSettings = DEFAULT_SETTINGS,
) -> FitReport:
    """Fit the empirical Weyl remainder of the exact (core-free) count."""
    if model.core.volume != 0.0:
        raise ValueError("remainder_fit needs core.volume = 0 (exact counts)")
    residuals = []
    for lam in lambda_grid:
        count = sum(
            cusp_count(model, j, lam, bc, tau, settings).count
            for j in range(len(model.cusps))
        )
        residuals.append(count - weyl_leading(total_volume(model), model.n, lam))
    return fit_remainder_samples(list(lambda_grid), residuals)
