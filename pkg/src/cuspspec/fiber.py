"""Half-line Schrodinger fibers of a cusp and their eigenvalue counts.

Separating variables in a cusp on the ell-th cross-section mode leaves a
one-dimensional operator -d^2/dt^2 + V(t) on (alpha, oo), where

    delta = 1:      V(t) = mu e^(2t) + (n-1)^2/4,             alpha = 2 ln a
    1/n < delta < 1: V(t) = mu ((1-delta) t)^(2 delta/(1-delta))
                            + (n-1) delta ((n-3) delta + 2) / (4 (1-delta)^2 t^2),
                     alpha = a^(2(1-delta)) / (1-delta)

with mu >= 0 the cross-section eigenvalue.  Counting eigenvalues below a
spectral level lambda is done by shooting the Prufer angle

    theta' = cos^2(theta) + (lambda - V(t)) sin^2(theta)

from the boundary condition at alpha to a point safely inside the
classically forbidden region; the winding floor(theta/pi) is the count.
A three-point finite-difference matrix provides an independent oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.optimize import brentq

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is a declared dependency
    def njit(*args, **kwargs):
        def wrap(func):
            return func

        return wrap(args[0]) if args and callable(args[0]) else wrap

# Local error target for each accepted step of the angle integration.
ODE_RTOL = 1e-12
ODE_ATOL = 1e-12


class ContinuousSpectrumError(ValueError):
    """Counting was requested inside the continuous spectrum of a mu = 0 fiber."""


@dataclass(frozen=True)
class PruferSettings:
    """Tolerances of the shooting/bisection machinery.

    t_margin is the decay budget (in WKB units, i.e. units of the integral
    of sqrt(V - lambda)) added past the turning point before the tail-size
    rule driven by angle_tol takes over.
    """

    rel_tol: float = 1e-10
    angle_tol: float = 1e-9
    t_margin: float = 5.0

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.angle_tol > 0 and self.t_margin > 0):
            raise ValueError("PruferSettings entries must all be positive")


DEFAULT_SETTINGS = PruferSettings()


@dataclass(frozen=True)
class BoundaryCondition:
    """Dirichlet, or the Neumann-like Robin condition u'(alpha) + beta u(alpha) = 0.

    beta = None selects the per-fiber default produced by pushing the
    geometric Neumann condition through the unitary change of functions;
    see default_robin_beta.
    """

    kind: str
    beta: Optional[float] = None

    def __post_init__(self):
        if self.kind not in ("dirichlet", "robin"):
            raise ValueError(f"unknown boundary kind {self.kind!r}")

    @classmethod
    def dirichlet(cls) -> "BoundaryCondition":
        return cls(kind="dirichlet")

    @classmethod
    def robin(cls, beta: Optional[float] = None) -> "BoundaryCondition":
        return cls(kind="robin", beta=beta)


DIRICHLET = BoundaryCondition.dirichlet()


@dataclass(frozen=True)
class FiberPotential:
    """Parameters (n, delta, mu, alpha) of one half-line fiber."""

    n: int
    delta: float
    mu: float
    alpha: float

    def __post_init__(self):
        # the potential formula needs only delta in (0, 1]; the stricter
        # geometric bound delta > 1/n lives in validate_model
        if self.n < 2:
            raise ValueError("fiber needs n >= 2")
        if not (0.0 < self.delta <= 1.0):
            raise ValueError(f"delta = {self.delta} outside (0, 1]")
        if self.mu < 0:
            raise ValueError("mu must be >= 0")
        if self.delta < 1.0 and self.alpha <= 0:
            raise ValueError("delta < 1 requires alpha > 0")

    @classmethod
    def from_cusp(cls, n: int, delta: float, a: float, mu: float) -> "FiberPotential":
        if delta == 1.0:
            alpha = 2.0 * math.log(a)
        else:
            alpha = a ** (2.0 * (1.0 - delta)) / (1.0 - delta)
        return cls(n=n, delta=delta, mu=mu, alpha=alpha)

    @property
    def const_coeff(self) -> float:
        """Additive constant (delta = 1) or 1/t^2 coefficient (delta < 1)."""
        n, d = self.n, self.delta
        if d == 1.0:
            return (n - 1) ** 2 / 4.0
        return (n - 1) * d * ((n - 3) * d + 2.0) / (4.0 * (1.0 - d) ** 2)

    @property
    def power(self) -> float:
        """Growth exponent 2 delta / (1 - delta) of the delta < 1 branch."""
        if self.delta == 1.0:
            raise ValueError("power is defined only for delta < 1")
        return 2.0 * self.delta / (1.0 - self.delta)

    @property
    def ess_inf(self) -> float:
        """Bottom of the essential spectrum of the mu = 0 channel."""
        return (self.n - 1) ** 2 / 4.0 if self.delta == 1.0 else 0.0


def default_robin_beta(f: FiberPotential) -> float:
    """Neumann-like coefficient induced by the unitary change of functions."""
    n, d = f.n, f.delta
    if d == 1.0:
        return (n * d - 1.0) / 2.0
    # (n-1) delta a^(2(delta-1)) / 2 with a^(2(1-delta)) = (1-delta) alpha
    return (n - 1) * d / (2.0 * (1.0 - d) * f.alpha)


def _resolve_beta(f: FiberPotential, bc: BoundaryCondition) -> float:
    if bc.kind == "dirichlet":
        return 0.0
    return default_robin_beta(f) if bc.beta is None else float(bc.beta)


def potential_eval(f: FiberPotential, t: float) -> float:
    """V(t) for t >= alpha; raises on points left of the boundary."""
    if t < f.alpha:
        raise ValueError(f"t = {t} below the fiber boundary alpha = {f.alpha}")
    if f.delta == 1.0:
        return f.mu * math.exp(2.0 * t) + f.const_coeff
    return f.mu * ((1.0 - f.delta) * t) ** f.power + f.const_coeff / (t * t)


def _potential_array(f: FiberPotential, t: np.ndarray) -> np.ndarray:
    if f.delta == 1.0:
        return f.mu * np.exp(2.0 * t) + f.const_coeff
    return f.mu * ((1.0 - f.delta) * t) ** f.power + f.const_coeff / (t * t)


def _interior_min(f: FiberPotential) -> float:
    """Location of the minimum of V on [alpha, oo) for mu > 0."""
    if f.delta == 1.0:
        return f.alpha
    p, sc, c2 = f.power, 1.0 - f.delta, f.const_coeff
    t_star = (2.0 * c2 / (f.mu * p * sc**p)) ** (1.0 / (p + 2.0))
    return max(t_star, f.alpha)


def potential_min(f: FiberPotential) -> float:
    """inf of V over [alpha, oo)."""
    if f.mu == 0.0:
        return f.const_coeff if f.delta == 1.0 else 0.0
    return potential_eval(f, _interior_min(f))


def turning_point(f: FiberPotential, lam: float) -> Optional[float]:
    """Least t with V >= lam on [t, oo), i.e. the right edge of the allowed region.

    None when V >= lam everywhere (no classically allowed region);
    math.inf when mu = 0 and lam sits above the essential infimum, so the
    allowed region never closes.
    """
    if f.delta == 1.0:
        q = f.const_coeff
        if f.mu == 0.0:
            if lam > q:
                return math.inf
            return f.alpha if lam == q else None
        v_alpha = f.mu * math.exp(2.0 * f.alpha) + q
        if lam < v_alpha:
            return None
        if lam == v_alpha:
            return f.alpha
        return max(f.alpha, 0.5 * math.log((lam - q) / f.mu))
    if f.mu == 0.0:
        return math.inf if lam > 0.0 else None
    t_min = _interior_min(f)
    vmin = potential_eval(f, t_min)
    if lam < vmin:
        return None
    if lam == vmin:
        return t_min
    t_hi = (lam / f.mu) ** (1.0 / f.power) / (1.0 - f.delta)
    if t_hi <= t_min:
        return t_min
    return brentq(lambda t: potential_eval(f, t) - lam, t_min, t_hi, xtol=1e-13, rtol=1e-15)


def allowed_interval(f: FiberPotential, lam: float) -> Optional[tuple[float, float]]:
    """Interval {t >= alpha : V(t) < lam}, or None when it is empty.

    Requires a confining fiber (mu > 0); the interval is then a single
    component around the potential minimum.
    """
    if f.mu <= 0.0:
        raise ValueError("allowed_interval needs mu > 0")
    t_min = _interior_min(f)
    vmin = potential_eval(f, t_min)
    if lam <= vmin:
        return None
    t_hi = turning_point(f, lam)
    if potential_eval(f, f.alpha) < lam:
        return (f.alpha, t_hi)
    t_lo = brentq(lambda t: potential_eval(f, t) - lam, f.alpha, t_min, xtol=1e-13, rtol=1e-15)
    return (t_lo, t_hi)


# ---------------------------------------------------------------------------
# Prufer shooting.  The angle ODE is integrated by an adaptive embedded
# Dormand-Prince 5(4) pair; the potential is inlined in the two branch forms
# so the loop can be jit-compiled.


@njit(cache=True)
def _prufer_theta(kind, mu, c_pot, pw, sc, lam, t0, t1, theta0, rtol, atol):
    a21 = 1.0 / 5.0
    a31, a32 = 3.0 / 40.0, 9.0 / 40.0
    a41, a42, a43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
    a51, a52, a53, a54 = (
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
    )
    a61, a62, a63, a64, a65 = (
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
    )
    b1, b3, b4, b5, b6 = (
        35.0 / 384.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    )
    e1 = 35.0 / 384.0 - 5179.0 / 57600.0
    e3 = 500.0 / 1113.0 - 7571.0 / 16695.0
    e4 = 125.0 / 192.0 - 393.0 / 640.0
    e5 = -2187.0 / 6784.0 + 92097.0 / 339200.0
    e6 = 11.0 / 84.0 - 187.0 / 2100.0
    e7 = -1.0 / 40.0

    if t1 <= t0:
        return theta0

    t = t0
    th = theta0
    s = math.sin(th)
    c = math.cos(th)
    if kind == 1:
        v = mu * math.exp(2.0 * t) + c_pot
    else:
        v = mu * (sc * t) ** pw + c_pot / (t * t)
    k1 = c * c + (lam - v) * s * s
    h = min(t1 - t0, 0.1 / math.sqrt(abs(lam - v) + 1.0))
    h_min = 1e-12 * (1.0 + abs(t1) - min(0.0, t0))
    while t < t1:
        if t + h > t1:
            h = t1 - t
        tt = t + 0.2 * h
        th2 = th + h * a21 * k1
        s = math.sin(th2)
        c = math.cos(th2)
        if kind == 1:
            v = mu * math.exp(2.0 * tt) + c_pot
        else:
            v = mu * (sc * tt) ** pw + c_pot / (tt * tt)
        k2 = c * c + (lam - v) * s * s
        tt = t + 0.3 * h
        th2 = th + h * (a31 * k1 + a32 * k2)
        s = math.sin(th2)
        c = math.cos(th2)
        if kind == 1:
            v = mu * math.exp(2.0 * tt) + c_pot
        else:
            v = mu * (sc * tt) ** pw + c_pot / (tt * tt)
        k3 = c * c + (lam - v) * s * s
        tt = t + 0.8 * h
        th2 = th + h * (a41 * k1 + a42 * k2 + a43 * k3)
        s = math.sin(th2)
        c = math.cos(th2)
        if kind == 1:
            v = mu * math.exp(2.0 * tt) + c_pot
        else:
            v = mu * (sc * tt) ** pw + c_pot / (tt * tt)
        k4 = c * c + (lam - v) * s * s
        tt = t + (8.0 / 9.0) * h
        th2 = th + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)
        s = math.sin(th2)
        c = math.cos(th2)
        if kind == 1:
            v = mu * math.exp(2.0 * tt) + c_pot
        else:
            v = mu * (sc * tt) ** pw + c_pot / (tt * tt)
        k5 = c * c + (lam - v) * s * s
        tt = t + h
        th2 = th + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)
        s = math.sin(th2)
        c = math.cos(th2)
        if kind == 1:
            v = mu * math.exp(2.0 * tt) + c_pot
        else:
            v = mu * (sc * tt) ** pw + c_pot / (tt * tt)
        k6 = c * c + (lam - v) * s * s
        th_new = th + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6)
        s = math.sin(th_new)
        c = math.cos(th_new)
        k7 = c * c + (lam - v) * s * s
        err = abs(h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7))
        ratio = err / (atol + rtol * abs(th_new))
        if ratio <= 1.0 or h <= h_min:
            t = t + h
            th = th_new
            k1 = k7
        fac = 0.9 * (ratio + 1e-16) ** -0.2
        if fac > 5.0:
            fac = 5.0
        elif fac < 0.2:
            fac = 0.2
        h = max(h * fac, h_min)
    return th


def _branch_params(f: FiberPotential) -> tuple[int, float, float, float, float]:
    if f.delta == 1.0:
        return 1, f.mu, f.const_coeff, 0.0, 0.0
    return 0, f.mu, f.const_coeff, f.power, 1.0 - f.delta


def _tail_extent(f: FiberPotential, start: float, lam: float, budget: float) -> float:
    """Extent m such that the decay integral of sqrt(V - lam) past `start`
    reaches `budget`; the leftover Prufer winding is then O(exp(-2 budget))."""
    acc = 0.0
    m = 0.0
    step = 1e-3 * (1.0 + abs(start))
    f0 = math.sqrt(max(potential_eval(f, start) - lam, 0.0))
    while acc < budget and m < 1e4:
        f1 = math.sqrt(max(potential_eval(f, start + m + step) - lam, 0.0))
        acc += 0.5 * (f0 + f1) * step
        m += step
        f0 = f1
        step *= 1.4
    return m


def _shoot_count(f: FiberPotential, lam: float, theta0: float, s: PruferSettings) -> int:
    t_turn = turning_point(f, lam)
    start = f.alpha if (t_turn is None or t_turn == math.inf) else t_turn
    budget = s.t_margin + 0.5 * math.log(1.0 / (s.angle_tol * 1e-3))
    t_end = start + _tail_extent(f, start, lam, budget)
    kind, mu, c_pot, pw, sc = _branch_params(f)
    theta = _prufer_theta(
        kind, mu, c_pot, pw, sc, lam, f.alpha, t_end, theta0, ODE_RTOL, ODE_ATOL
    )
    return int(math.floor(theta / math.pi))


def fiber_count(
    f: FiberPotential,
    lam: float,
    bc: BoundaryCondition = DIRICHLET,
    settings: PruferSettings = DEFAULT_SETTINGS,
) -> int:
    """Number of eigenvalues strictly below lam (Prufer winding count).

    mu = 0 channels carry continuous spectrum above the essential infimum;
    asking for a count there raises ContinuousSpectrumError.
    """
    beta = _resolve_beta(f, bc)
    if f.mu == 0.0:
        if lam > f.ess_inf:
            raise ContinuousSpectrumError(
                f"mu = 0 channel has continuous spectrum above {f.ess_inf}; "
                f"cannot count at lam = {lam}"
            )
        if bc.kind == "dirichlet":
            return 0
        if f.delta == 1.0:
            # constant potential q: the only candidate is the boundary state
            # at q - beta^2, present exactly when beta > 0
            q = f.const_coeff
            return 1 if (beta > 0.0 and q - beta * beta < lam) else 0
        if beta <= 0.0:
            return 0
        theta0 = math.atan2(1.0, -beta)
        return _shoot_count(f, lam, theta0, settings)
    vmin = potential_min(f)
    if lam <= vmin and (bc.kind == "dirichlet" or beta <= 0.0):
        return 0
    theta0 = 0.0 if bc.kind == "dirichlet" else math.atan2(1.0, -beta)
    return _shoot_count(f, lam, theta0, settings)


def fiber_eigenvalues(
    f: FiberPotential,
    lam_max: float,
    bc: BoundaryCondition = DIRICHLET,
    settings: PruferSettings = DEFAULT_SETTINGS,
) -> list[float]:
    """All eigenvalues below lam_max, bisected to settings.rel_tol.

    Eigenvalues of these fibers are simple, so each one is the unique jump
    point of the monotone counting function.
    """
    if f.mu <= 0.0:
        raise ValueError("fiber_eigenvalues needs a confining fiber (mu > 0)")
    cache: dict[float, int] = {}

    def count(lam: float) -> int:
        if lam not in cache:
            cache[lam] = fiber_count(f, lam, bc, settings)
        return cache[lam]

    total = count(lam_max)
    if total == 0:
        return []
    beta = _resolve_beta(f, bc)
    lo = potential_min(f)
    if bc.kind == "robin" and beta > 0.0:
        lo -= 2.0 * beta * beta + 1.0
    while count(lo) > 0:
        lo -= 2.0 * (abs(lo) + 1.0)
    values = []
    left_floor = lo
    for k in range(total):
        left, right = left_floor, lam_max
        while right - left > settings.rel_tol * max(1.0, abs(right)):
            mid = 0.5 * (left + right)
            if count(mid) >= k + 1:
                right = mid
            else:
                left = mid
        values.append(0.5 * (left + right))
        left_floor = left
    cut = lam_max - settings.rel_tol * max(1.0, abs(lam_max))
    return [v for v in values if v < cut]


def fd_oracle(
    f: FiberPotential,
    lam_max: float,
    bc: BoundaryCondition = DIRICHLET,
    grid: int = 1 << 15,
) -> list[float]:
    """Independent check: eigenvalues below lam_max of the three-point
    finite-difference matrix on [alpha, T(lam_max) + 8].

    The Robin row comes from the lumped-mass symmetric discretization, so the
    matrix stays tridiagonal-symmetric.  Test-only; O(h^2) accurate.
    """
    if grid < 1000:
        raise ValueError("fd_oracle needs grid >= 1000")
    t_turn = turning_point(f, lam_max)
    if t_turn == math.inf:
        raise ContinuousSpectrumError("fd_oracle cannot resolve a continuum channel")
    right = (f.alpha if t_turn is None else t_turn) + 8.0
    h = (right - f.alpha) / grid
    beta = _resolve_beta(f, bc)
    nodes = f.alpha + h * np.arange(grid + 1)
    if f.delta < 1.0 and nodes[0] <= 0.0:
        raise ValueError("delta < 1 fiber needs alpha > 0")
    v = _potential_array(f, nodes)
    if bc.kind == "dirichlet":
        diag = 2.0 / h**2 + v[1:grid]
        off = np.full(grid - 2, -1.0 / h**2)
    else:
        diag = np.concatenate(([2.0 / h**2 + v[0] - 2.0 * beta / h], 2.0 / h**2 + v[1:grid]))
        off = np.full(grid - 1, -1.0 / h**2)
        off[0] = -math.sqrt(2.0) / h**2
    lo = float(min(v.min(), 0.0) - 2.0 * beta * beta - 10.0)
    vals = eigh_tridiagonal(
        diag, off, eigvals_only=True, select="v", select_range=(lo, lam_max)
    )
    return [float(x) for x in vals if x < lam_max]
