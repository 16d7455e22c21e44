"""Spectral measure of the pair (W, W - pp^T) and the two analytic representations.

The measure is sum_k a_k delta(lambda_k^2). It is tied to the spectra through

    prod_k (z - mu_k^2) / (z - lambda_k^2) = 1 - sum_k a_k / (lambda_k^2 - z),

i.e. Phi(z) = 1 - F(z) where F is the Cauchy transform of the measure.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DegenerateGap, DivisionDegenerate, InterlacingViolation, PoleEvaluation
from .spectra import InterlacedSpectrum

POLE_RTOL = 1e-13


@dataclass(frozen=True)
class SpectralMeasure:
    positions: np.ndarray  # lambda_k^2, descending
    weights: np.ndarray  # a_k > 0
    log_weights: np.ndarray

    def __post_init__(self):
        for arr in (self.positions, self.weights, self.log_weights):
            arr.flags.writeable = False

    @property
    def atoms(self) -> list[tuple[float, float]]:
        return list(zip(self.positions.tolist(), self.weights.tolist()))

    @property
    def total_mass(self) -> float:
        return float(np.sum(self.weights[::-1]))

    @property
    def inverse_moment(self) -> float:
        """sum_k a_k / lambda_k^2, which equals ||q||^2."""
        return float(np.sum((self.weights / self.positions)[::-1]))

    def to_dict(self) -> dict:
        return {
            "positions": self.positions.tolist(),
            "weights": self.weights.tolist(),
            "log_weights": self.log_weights.tolist(),
        }


@dataclass(frozen=True)
class HerglotzSample:
    z: complex
    F: complex
    F1: complex
    Phi: complex


def _pole_tol(positions: np.ndarray) -> float:
    return POLE_RTOL * max(1.0, float(positions[0]))


def _check_off_poles(z: complex, positions: np.ndarray) -> None:
    dist = np.abs(z - positions)
    k = int(np.argmin(dist))
    if dist[k] < _pole_tol(positions):
        raise PoleEvaluation(f"z = {z!r} coincides with the atom lambda_{k + 1}^2 = {positions[k]!r}")


def compute_weights(spectrum: InterlacedSpectrum) -> SpectralMeasure:
    """a_n = (l_n^2 - m_n^2) prod_{k != n} (l_n^2 - m_k^2) / (l_n^2 - l_k^2), in log space.

    Every factor of the product is a ratio of two numbers of equal sign under
    strict interlacing, so its log is taken as log|num| - log|den| after the
    sign check. Differences of squares are formed as (|x| - |y|)(|x| + |y|).
    """
    la = np.abs(spectrum.lambda_array)
    ma = np.abs(spectrum.mu_array)
    n = la.size

    # num[i, k] = l_i^2 - m_k^2, den[i, k] = l_i^2 - l_k^2
    num = (la[:, None] - ma[None, :]) * (la[:, None] + ma[None, :])
    den = (la[:, None] - la[None, :]) * (la[:, None] + la[None, :])
    off = ~np.eye(n, dtype=bool)

    if np.any(den[off] == 0.0):
        i, k = np.argwhere((den == 0.0) & off)[0]
        raise DegenerateGap(f"lambda_{i + 1}^2 - lambda_{k + 1}^2 underflows to zero")
    if np.any(num == 0.0):
        i, k = np.argwhere(num == 0.0)[0]
        raise DegenerateGap(f"lambda_{i + 1}^2 - mu_{k + 1}^2 underflows to zero")
    bad = ((np.sign(num) != np.sign(den)) & off) | (np.eye(n, dtype=bool) & (num < 0))
    if bad.any():
        i = int(np.argwhere(bad)[0][0])
        raise InterlacingViolation(i + 1, f"negative factor in a_{i + 1}; spectra are not interlaced")

    logs = np.log(np.abs(num))
    logs[off] -= np.log(np.abs(den[off]))
    # sum the small-magnitude logs first
    order = np.argsort(np.abs(logs), axis=1)
    log_w = np.take_along_axis(logs, order, axis=1).sum(axis=1)
    return SpectralMeasure(positions=la**2, weights=np.exp(log_w), log_weights=log_w)


def cauchy_transform(measure: SpectralMeasure, z: complex) -> complex:
    """F(z) = sum_k a_k / (lambda_k^2 - z)."""
    z = complex(z)
    _check_off_poles(z, measure.positions)
    terms = measure.weights / (measure.positions - z)
    return complex(np.sum(terms[::-1]))


def phi_product(spectrum: InterlacedSpectrum, z: complex) -> complex:
    """Phi(z) = prod_k (z - mu_k^2) / (z - lambda_k^2), factor by factor."""
    z = complex(z)
    lam2 = spectrum.lambda_array**2
    mu2 = spectrum.mu_array**2
    _check_off_poles(z, lam2)
    value = 1.0 + 0.0j
    for l2, m2 in zip(lam2, mu2):
        value *= (z - m2) / (z - l2)
    return value


def aronszajn_krein(F_value: complex, alpha: float, tol: float = 1e-14) -> complex:
    """Cauchy transform of W + alpha pp^T from that of W: F / (1 + alpha F)."""
    denom = 1.0 + alpha * F_value
    if abs(denom) < tol:
        raise DivisionDegenerate(f"|1 + alpha F| = {abs(denom):.3e} is below {tol:.1e}")
    return F_value / denom


def herglotz_sample(spectrum: InterlacedSpectrum, measure: SpectralMeasure, z: complex) -> HerglotzSample:
    F = cauchy_transform(measure, z)
    return HerglotzSample(z=complex(z), F=F, F1=aronszajn_krein(F, -1.0), Phi=phi_product(spectrum, z))


def default_grid(spectrum: InterlacedSpectrum, n_circle: int = 100) -> list[complex]:
    """Circle of radius 4 lambda_1^2 plus near-pole points above each atom gap.

    Gap points sit over the midpoint of consecutive atoms (the last gap is
    [0, lambda_N^2]) at height gap/2.
    """
    lam2 = spectrum.lambda_array**2
    radius = 4.0 * lam2[0]
    theta = 2.0 * np.pi * (np.arange(n_circle) + 0.5) / n_circle
    grid = list(radius * np.exp(1j * theta))
    edges = np.append(lam2, 0.0)
    for hi, lo in zip(edges[:-1], edges[1:]):
        gap = hi - lo
        grid.append(complex(0.5 * (hi + lo), 0.5 * gap))
    return grid


def consistency_scan(
    spectrum: InterlacedSpectrum,
    measure: SpectralMeasure,
    grid: Iterable[complex] | None = None,
    min_distance: float = 0.0,
) -> float:
    """max over the grid of |Phi(z) - (1 - F(z))|.

    Grid points closer than ``min_distance`` to sigma or sigma_1 raise
    :class:`PoleEvaluation`.
    """
    points: Sequence[complex] = default_grid(spectrum) if grid is None else list(grid)
    special = np.concatenate([spectrum.lambda_array**2, spectrum.mu_array**2])
    worst = 0.0
    for z in points:
        if min_distance > 0 and np.min(np.abs(complex(z) - special)) < min_distance:
            raise PoleEvaluation(f"grid point {z!r} is within {min_distance:g} of the spectrum")
        residual = abs(phi_product(spectrum, z) - (1.0 - cauchy_transform(measure, z)))
        worst = max(worst, residual)
    return worst
