"""Operator triple (W, W1, p), signed square roots (R, R1) and the contraction Sigma*.

Everything lives in the orthonormal eigenbasis of W, where W = diag(lambda_k^2)
and the cyclic vector has coordinates p_k = sqrt(a_k).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .borg import SpectralMeasure
from .errors import ConvergenceFailure, EigenvalueMismatch, NotSymmetric
from .spectra import InterlacedSpectrum

SYMMETRY_RTOL = 1e-13
MISMATCH_RTOL = 1e-8


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class OperatorTriple:
    W: np.ndarray
    p: np.ndarray
    W1: np.ndarray
    R: np.ndarray
    R1: np.ndarray
    eigenvectors: np.ndarray  # columns v_k of W1, paired with mu_k
    eigen_pairing: tuple[tuple[int, float, float], ...]  # (k, eigenvalue of W1, mu_k)

    @property
    def lambdas(self) -> np.ndarray:
        return np.diag(self.R)

    @property
    def mus(self) -> np.ndarray:
        return np.array([mu for _, _, mu in self.eigen_pairing])


@dataclass(frozen=True)
class ContractionData:
    sigma_star: np.ndarray
    q: np.ndarray
    operator_norm: float
    defect_residual: float
    intertwining_residual: float  # ||R1 - Sigma* R||_F

    @property
    def q_norm_squared(self) -> float:
        return float(self.q @ self.q)


@dataclass(frozen=True)
class StabilityProfile:
    norms: tuple[float, ...]
    parseval_residual: float


def symmetric_eigendecomposition(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues in descending order and orthonormal eigenvectors as columns.

    Each eigenvector is signed so its largest-magnitude entry is positive (the
    first such entry when several tie to 1e-12).
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise NotSymmetric(f"expected a square matrix, got shape {m.shape}")
    scale = float(np.max(np.abs(m))) if m.size else 0.0
    asym = float(np.max(np.abs(m - m.T))) if m.size else 0.0
    if asym > SYMMETRY_RTOL * scale:
        raise NotSymmetric(f"asymmetry {asym:.3e} exceeds {SYMMETRY_RTOL:g} relative")
    try:
        values, vectors = np.linalg.eigh(0.5 * (m + m.T))
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(str(exc)) from exc
    values = values[::-1]
    vectors = vectors[:, ::-1].copy()
    for j in range(vectors.shape[1]):
        col = np.abs(vectors[:, j])
        lead = int(np.argmax(col >= col.max() - 1e-12))
        if vectors[lead, j] < 0:
            vectors[:, j] *= -1.0
    return values, vectors


def assemble_pair(
    measure: SpectralMeasure,
    spectrum: InterlacedSpectrum,
    mismatch_tol: float | None = None,
) -> OperatorTriple:
    """Build W, p, W1 = W - pp^T and the signed roots R = diag(lambda), R1 = V diag(mu) V^T.

    The eigenvalues of W1, sorted descending, are paired with mu_k in order;
    a deviation beyond ``mismatch_tol`` (default 1e-8 lambda_1^2) raises
    :class:`EigenvalueMismatch` naming the worst index.
    """
    lam = spectrum.lambda_array
    mu = spectrum.mu_array
    if mismatch_tol is None:
        mismatch_tol = MISMATCH_RTOL * spectrum.scale

    W = np.diag(measure.positions)
    p = np.sqrt(measure.weights)
    W1 = W - np.outer(p, p)
    values, V = symmetric_eigendecomposition(W1)

    deviation = np.abs(values - mu**2)
    worst = int(np.argmax(deviation))
    if deviation[worst] > mismatch_tol:
        raise EigenvalueMismatch(
            worst + 1,
            float(deviation[worst]),
            f"eigenvalue {worst + 1} of W - pp^T is {values[worst]!r}, expected mu_{worst + 1}^2 = "
            f"{mu[worst] ** 2!r} (deviation {deviation[worst]:.3e} > {mismatch_tol:.3e})",
        )

    # in finite mode with mu_N = 0 the smallest eigenvalue maps to the zero root
    R1 = (V * mu) @ V.T
    R1 = 0.5 * (R1 + R1.T)
    pairing = tuple((k + 1, float(values[k]), float(mu[k])) for k in range(lam.size))
    return OperatorTriple(
        W=_frozen(W),
        p=_frozen(p),
        W1=_frozen(W1),
        R=_frozen(np.diag(lam)),
        R1=_frozen(R1),
        eigenvectors=_frozen(V),
        eigen_pairing=pairing,
    )


def build_sigma_star(triple: OperatorTriple) -> ContractionData:
    """Sigma* = R1 R^{-1} and q = R^{-1} p, with norm and defect certificates."""
    lam = triple.lambdas
    sigma_star = triple.R1 / lam[None, :]
    q = triple.p / lam
    n = lam.size
    # I - Sigma Sigma* as a matrix is I - S^T S for S = matrix of Sigma*
    defect = np.eye(n) - sigma_star.T @ sigma_star - np.outer(q, q)
    return ContractionData(
        sigma_star=_frozen(sigma_star),
        q=_frozen(q),
        operator_norm=float(np.linalg.norm(sigma_star, 2)),
        defect_residual=float(np.linalg.norm(defect, "fro")),
        intertwining_residual=float(np.linalg.norm(triple.R1 - sigma_star @ triple.R, "fro")),
    )


def stability_profile(data: ContractionData, probe: np.ndarray, steps: int) -> StabilityProfile:
    """Norms ||(Sigma*)^n x|| for n = 1..steps and the telescoped Parseval residual

    | ||x||^2 - sum_{k<steps} ((Sigma*)^k x, q)^2 - ||(Sigma*)^steps x||^2 |.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    x = np.asarray(probe, dtype=float)
    start = float(x @ x)
    captured = 0.0
    norms = []
    for _ in range(steps):
        captured += float(x @ data.q) ** 2
        x = data.sigma_star @ x
        norms.append(float(np.linalg.norm(x)))
    residual = abs(start - captured - norms[-1] ** 2)
    return StabilityProfile(norms=tuple(norms), parseval_residual=residual)
