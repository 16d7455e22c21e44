"""Hankel coefficients gamma_k = ((Sigma*)^k p, q) and finite truncations of Gamma, Gamma S."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass

import numpy as np

from .errors import InsufficientCoefficients, TailNotCertified, TooSmall
from .operators import ContractionData, OperatorTriple

DEFAULT_TOL = 1e-10
DEFAULT_MAX_COEFFS = 100_000
RATIO_WINDOW = 10
TAIL_SAFETY = 2.0


@dataclass(frozen=True)
class HankelModel:
    coefficients: np.ndarray
    tail_bound: float
    source_hash: str = ""

    def __post_init__(self):
        self.coefficients.flags.writeable = False

    @property
    def L(self) -> int:
        return int(self.coefficients.size)

    def to_dict(self) -> dict:
        return {"gamma": self.coefficients.tolist(), "tail_bound": self.tail_bound}

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        for g in self.coefficients.tolist():
            writer.writerow([repr(g)])
        return buf.getvalue()

    @classmethod
    def from_json(cls, text: str) -> "HankelModel":
        data = json.loads(text)
        return cls(
            coefficients=np.array(data["gamma"], dtype=float),
            tail_bound=float(data.get("tail_bound", 0.0)),
            source_hash=str(data.get("source_hash", "")),
        )

    @classmethod
    def from_csv(cls, text: str) -> "HankelModel":
        rows = [row for row in csv.reader(io.StringIO(text)) if row and row[0].strip()]
        return cls(coefficients=np.array([float(row[0]) for row in rows]), tail_bound=0.0)


@dataclass(frozen=True)
class IsometryTruncation:
    matrix: np.ndarray  # rows x N, row k = q^T (Sigma*)^k
    orthonormality_residual: float  # ||V^T V - I_N||_F


def hankel_coefficients(
    data: ContractionData,
    triple: OperatorTriple,
    tol: float = DEFAULT_TOL,
    max_coeffs: int = DEFAULT_MAX_COEFFS,
    min_length: int = 1,
    source_hash: str = "",
) -> HankelModel:
    """Iterate w_{j+1} = Sigma* w_j from w_0 = p and record gamma_j = (w_j, q).

    Stops at the first L >= ``min_length`` whose tail sum_{j>=L} gamma_j^2 is
    certified below tol^2. With rho = max ||w_{j+1}|| / ||w_j|| over the last
    ten steps and |gamma_j| <= ||q|| ||w_j||, the tail is bounded by
    2 ||q||^2 ||w_L||^2 / (1 - rho^2). A vanishing w_L certifies a zero tail.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if max_coeffs < 1:
        raise ValueError("max_coeffs must be >= 1")
    S = data.sigma_star
    q = data.q
    q2 = float(q @ q)
    w = np.array(triple.p, dtype=float)

    gammas: list[float] = []
    norms = [float(np.linalg.norm(w))]
    tail = np.inf
    while True:
        gammas.append(float(w @ q))
        w = S @ w
        norms.append(float(np.linalg.norm(w)))
        L = len(gammas)

        if norms[-1] == 0.0:
            tail = 0.0
        elif L >= RATIO_WINDOW:
            window = np.array(norms[-RATIO_WINDOW - 1 :])
            with np.errstate(divide="ignore", invalid="ignore"):
                rho = float(np.max(window[1:] / window[:-1]))
            tail = TAIL_SAFETY * q2 * norms[-1] ** 2 / (1.0 - rho**2) if rho < 1.0 else np.inf

        if tail <= tol**2 and L >= min_length:
            break
        if L >= max_coeffs:
            raise TailNotCertified(
                f"tail not certified below {tol:g} after {L} coefficients "
                f"(||w_L|| = {norms[-1]:.3e}); Sigma* decays too slowly"
            )
    return HankelModel(coefficients=np.array(gammas), tail_bound=float(tail), source_hash=source_hash)


def build_hankel_matrix(model: HankelModel, m: int) -> np.ndarray:
    """m x m block of Gamma, entry (j, k) = gamma_{j+k}."""
    if m < 1:
        raise TooSmall("m must be >= 1")
    if 2 * m - 1 > model.L:
        raise InsufficientCoefficients(f"an {m}x{m} block needs {2 * m - 1} coefficients, model has {model.L}")
    idx = np.add.outer(np.arange(m), np.arange(m))
    return model.coefficients[idx]


def apply_shift(matrix: np.ndarray) -> np.ndarray:
    """(m-1) x m block of Gamma S = S* Gamma: drop the first row of the Gamma block."""
    matrix = np.asarray(matrix)
    if matrix.shape[0] < 2:
        raise TooSmall("need at least a 2x2 block to shift")
    return matrix[1:, :].copy()


def shifted_block(model: HankelModel, m: int) -> np.ndarray:
    """Square m x m principal block of Gamma S, entry (j, k) = gamma_{j+k+1}."""
    if m < 1:
        raise TooSmall("m must be >= 1")
    if 2 * m > model.L:
        raise InsufficientCoefficients(f"an {m}x{m} shifted block needs {2 * m} coefficients, model has {model.L}")
    idx = np.add.outer(np.arange(m), np.arange(m)) + 1
    return model.coefficients[idx]


def isometry_matrix(data: ContractionData, rows: int) -> IsometryTruncation:
    """First ``rows`` rows of V x = (((Sigma*)^k x, q))_k."""
    if rows < 1:
        raise TooSmall("rows must be >= 1")
    St = data.sigma_star.T
    n = data.q.size
    out = np.empty((rows, n))
    r = np.array(data.q, dtype=float)
    for k in range(rows):
        out[k] = r
        r = St @ r
    residual = float(np.linalg.norm(out.T @ out - np.eye(n), "fro"))
    return IsometryTruncation(matrix=out, orthonormality_residual=residual)
