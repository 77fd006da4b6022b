"""Spectrum of the magnetic Laplacian on a flat-torus cross-section.

For the torus with lengths (L_k) and the scaled constant one-form
tau * sum_k omega_k dx_k, the eigenvalues are indexed by the dual lattice:

    mu_m(tau) = sum_k (2 pi m_k / L_k + tau omega_k)^2 ,   m in Z^(n-1).

Everything below is exact lattice enumeration; no discretization enters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import TorusCrossSection

# Default cap on enumerated lattice points, to keep accidental huge cutoffs
# from exhausting memory.
MAX_ELEMENTS = 10_000_000

TWO_PI = 2.0 * math.pi


class EnumerationBudgetError(RuntimeError):
    """Lattice enumeration would exceed the configured element budget."""


@dataclass(frozen=True)
class CrossSpectrum:
    """All cross-section eigenvalues below `cutoff`, sorted, with multiplicity."""

    tau: float
    values: tuple[float, ...]
    cutoff: float

    def __len__(self) -> int:
        return len(self.values)


def _axis_offsets(x: TorusCrossSection, tau: float, cutoff: float):
    """Per-axis arrays of (2 pi m/L + tau*omega) covering every admissible m.

    |2 pi m/L + tau omega| < sqrt(cutoff) forces m into a window of width
    sqrt(cutoff) L / pi around -tau omega L / (2 pi); one extra index on each
    side guards the open/closed boundary.
    """
    root = math.sqrt(max(cutoff, 0.0))
    offsets = []
    indices = []
    for length, omega in zip(x.lengths, x.magnetic):
        shift = tau * omega * length / TWO_PI
        half_width = root * length / TWO_PI
        lo = math.floor(-shift - half_width) - 1
        hi = math.ceil(-shift + half_width) + 1
        m = np.arange(lo, hi + 1, dtype=np.int64)
        offsets.append(TWO_PI * m / length + tau * omega)
        indices.append(m)
    return offsets, indices


def _check_budget(offsets, max_elements: int) -> None:
    count = 1
    for axis in offsets:
        count *= axis.size
    if count > max_elements:
        raise EnumerationBudgetError(
            f"lattice enumeration needs {count} points, budget is {max_elements}"
        )


def mu_spectrum(
    x: TorusCrossSection,
    tau: float,
    cutoff: float,
    max_elements: int = MAX_ELEMENTS,
) -> CrossSpectrum:
    """Exact sorted multiset of eigenvalues mu_m(tau) < cutoff.

    Ties are ordered by the lattice index, lexicographically, so the output
    is deterministic down to the last bit.
    """
    if cutoff <= 0:
        return CrossSpectrum(tau=tau, values=(), cutoff=cutoff)
    offsets, indices = _axis_offsets(x, tau, cutoff)
    _check_budget(offsets, max_elements)
    grids = np.meshgrid(*offsets, indexing="ij")
    total = np.zeros(grids[0].shape)
    for g in grids:
        total += g * g
    mask = total < cutoff
    values = total[mask]
    index_cols = [np.meshgrid(*indices, indexing="ij")[i][mask] for i in range(len(indices))]
    # lexsort: last key is primary
    order = np.lexsort(tuple(reversed(index_cols)) + (values,))
    return CrossSpectrum(tau=tau, values=tuple(float(v) for v in values[order]), cutoff=cutoff)


def cross_count(
    x: TorusCrossSection,
    tau: float,
    mu: float,
    max_elements: int = MAX_ELEMENTS,
) -> int:
    """Number of eigenvalues strictly below mu (with multiplicity)."""
    if mu <= 0:
        return 0
    offsets, _ = _axis_offsets(x, tau, mu)
    _check_budget(offsets, max_elements)
    grids = np.meshgrid(*offsets, indexing="ij")
    total = np.zeros(grids[0].shape)
    for g in grids:
        total += g * g
    return int(np.count_nonzero(total < mu))


def mu0(x: TorusCrossSection, tau: float) -> float:
    """Lowest eigenvalue, minimized per axis over the two nearest integers."""
    total = 0.0
    for length, omega in zip(x.lengths, x.magnetic):
        shift = tau * omega * length / TWO_PI
        best = min(
            (TWO_PI * m / length + tau * omega) ** 2
            for m in (math.floor(-shift), math.ceil(-shift))
        )
        total += best
    return total


def hormander_residual(
    x: TorusCrossSection, tau: float, mu_max: float, grid: int
) -> float:
    """Worst normalized Weyl residual of the cross-section counting function.

    sup over a geometric grid in [1, mu_max] of
    |N(mu) - omega_{d}/(2 pi)^d |X| mu^(d/2)| / max(1, mu^((d-1)/2)),
    d = dim X.  Finite by the sharp Weyl asymptotics on closed manifolds.
    """
    if mu_max <= 1.0:
        raise ValueError("mu_max must exceed 1")
    d = x.dim
    spectrum = np.asarray(mu_spectrum(x, tau, mu_max).values)
    constant = unit_ball_volume(d) / TWO_PI**d * x.volume()
    worst = 0.0
    for mu in np.geomspace(1.0, mu_max, grid):
        count = int(np.searchsorted(spectrum, mu, side="left"))
        # searchsorted('left') counts values < mu except exact ties; nudge ties out
        while count < spectrum.size and spectrum[count] < mu:
            count += 1
        residual = abs(count - constant * mu ** (d / 2.0))
        worst = max(worst, residual / max(1.0, mu ** ((d - 1) / 2.0)))
    return worst


def perturb_c2(x: TorusCrossSection) -> float:
    """Quadratic coefficient of mu_0(tau) = c2 tau^2 + O(tau^3): sum_k omega_k^2.

    Constant forms on flat tori have vanishing first-order term, so this is
    also lim mu_0(tau)/tau^2.
    """
    return math.fsum(w * w for w in x.magnetic)


def tau_quadratic_range(x: TorusCrossSection) -> float:
    """A tau_0 below which mu_0(tau) = tau^2 * perturb_c2 exactly.

    pi / (2 L_max |omega|_max) keeps every shifted frequency inside the first
    Brillouin half-cell, i.e. below the first level crossing.  Infinite when
    the form vanishes.
    """
    w_max = max((abs(w) for w in x.magnetic), default=0.0)
    if w_max == 0.0:
        return math.inf
    return math.pi / (2.0 * max(x.lengths) * w_max)


def unit_ball_volume(d: int) -> float:
    """Euclidean volume of the unit ball in R^d."""
    return math.pi ** (d / 2.0) / math.gamma(1.0 + d / 2.0)
