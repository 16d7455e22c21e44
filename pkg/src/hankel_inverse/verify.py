"""Forward eigenanalysis of the synthesized Hankel operator and the full round trip."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, TypeVar

import numpy as np

from .borg import compute_weights
from .errors import HankelInverseError, SpectrumValidationError, TooSmall
from .hankel import (
    DEFAULT_MAX_COEFFS,
    DEFAULT_TOL,
    HankelModel,
    build_hankel_matrix,
    hankel_coefficients,
    isometry_matrix,
    shifted_block,
)
from .operators import assemble_pair, build_sigma_star, stability_profile
from .spectra import InterlacedSpectrum, validate_interlacing

T = TypeVar("T")


@dataclass(frozen=True)
class VerifyConfig:
    tol: float = DEFAULT_TOL  # certified coefficient tail, sqrt(sum_{j>=L} gamma_j^2)
    max_coeffs: int = DEFAULT_MAX_COEFFS
    truncation: int | str = "adaptive"
    max_truncation: int = 4096
    eigen_tol: float = 1e-8  # relative eigenvalue error
    structure_tol: float = 1e-8
    isometry_tol: float = 1e-8
    parseval_tol: float = 1e-10
    defect_tol: float = 1e-10
    seed: int = 0


@dataclass(frozen=True)
class VerificationReport:
    recovered_lambdas: tuple[float, ...]
    recovered_mus: tuple[float, ...]
    lambda_errors: tuple[float, ...]
    mu_errors: tuple[float, ...]
    structure_residual: float
    isometry_residual: float
    parseval_residual: float
    defect_residual: float
    operator_norm: float
    intertwining_residual: float
    truncation_m: int
    coefficient_count: int
    interlaced: bool
    signs_preserved: bool
    passed: bool
    source_hash: str = ""
    failure: dict | None = None
    checks: dict = field(default_factory=dict)

    @property
    def per_eigen_errors(self) -> tuple[tuple[float, ...], tuple[float, ...]]:
        return self.lambda_errors, self.mu_errors

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "source_hash": self.source_hash,
            "truncation_m": self.truncation_m,
            "coefficient_count": self.coefficient_count,
            "recovered_lambdas": list(self.recovered_lambdas),
            "recovered_mus": list(self.recovered_mus),
            "per_eigen_errors": {"lambda": list(self.lambda_errors), "mu": list(self.mu_errors)},
            "structure_residual": self.structure_residual,
            "isometry_residual": self.isometry_residual,
            "parseval_residual": self.parseval_residual,
            "defect_residual": self.defect_residual,
            "operator_norm": self.operator_norm,
            "intertwining_residual": self.intertwining_residual,
            "interlaced": self.interlaced,
            "signs_preserved": self.signs_preserved,
            "checks": dict(self.checks),
            "failure": self.failure,
        }


class StageFailure(HankelInverseError):
    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"{stage}: {type(cause).__name__}: {cause}")
        self.stage = stage
        self.cause = cause


def _top_by_magnitude(values: np.ndarray, k: int) -> np.ndarray:
    order = np.argsort(-np.abs(values), kind="stable")
    return values[order[:k]]


def forward_spectrum(model: HankelModel, m: int, n_wanted: int) -> tuple[np.ndarray, np.ndarray]:
    """Largest-magnitude signed eigenvalues of the m x m Gamma block and the
    (m-1) x (m-1) block of Gamma S (entries gamma_{j+k+1})."""
    if m - 1 < n_wanted:
        raise TooSmall(f"m = {m} is too small to resolve {n_wanted} eigenvalues of the shifted block")
    gamma_block = build_hankel_matrix(model, m)
    shift_block = shifted_block(model, m - 1)
    lam = np.linalg.eigvalsh(gamma_block)
    mu = np.linalg.eigvalsh(shift_block)
    return _top_by_magnitude(lam, n_wanted), _top_by_magnitude(mu, n_wanted)


def _relative_errors(recovered: np.ndarray, target: np.ndarray, scale: float) -> np.ndarray:
    # a zero target (mu_N = 0 in finite mode) is measured against lambda_1
    denom = np.where(target != 0.0, np.abs(target), scale)
    return np.abs(recovered - target) / denom


def _stage(name: str, fn: Callable[[], T]) -> T:
    try:
        return fn()
    except (HankelInverseError, ArithmeticError, np.linalg.LinAlgError) as exc:
        raise StageFailure(name, exc) from exc


def round_trip(spectrum: InterlacedSpectrum, config: VerifyConfig | None = None) -> VerificationReport:
    """Run weights -> triple -> Sigma* -> gamma -> forward spectra and compare with the input.

    A failing stage does not raise: the report comes back with ``passed``
    false and ``failure`` naming the stage.
    """
    config = config or VerifyConfig()
    try:
        return _round_trip(spectrum, config)
    except StageFailure as exc:
        return _failed_report(spectrum, exc)


def _failed_report(spectrum: InterlacedSpectrum, exc: StageFailure) -> VerificationReport:
    nan = float("nan")
    return VerificationReport(
        recovered_lambdas=(),
        recovered_mus=(),
        lambda_errors=(),
        mu_errors=(),
        structure_residual=nan,
        isometry_residual=nan,
        parseval_residual=nan,
        defect_residual=nan,
        operator_norm=nan,
        intertwining_residual=nan,
        truncation_m=0,
        coefficient_count=0,
        interlaced=False,
        signs_preserved=False,
        passed=False,
        source_hash=spectrum.digest(),
        failure={"stage": exc.stage, "error": type(exc.cause).__name__, "message": str(exc.cause)},
    )


def _round_trip(spectrum: InterlacedSpectrum, config: VerifyConfig) -> VerificationReport:
    n = spectrum.n
    lam_in = spectrum.lambda_array
    mu_in = spectrum.mu_array
    scale = abs(lam_in[0])
    digest = spectrum.digest()

    measure = _stage("weights", lambda: compute_weights(spectrum))
    triple = _stage("operators", lambda: assemble_pair(measure, spectrum))
    data = _stage("contraction", lambda: build_sigma_star(triple))

    def coefficients(min_length: int) -> HankelModel:
        return _stage(
            "coefficients",
            lambda: hankel_coefficients(
                data, triple, tol=config.tol, max_coeffs=max(config.max_coeffs, min_length),
                min_length=min_length, source_hash=digest,
            ),
        )

    model = coefficients(1)
    certified_L = model.L

    def spectra_at(m: int) -> tuple[np.ndarray, np.ndarray]:
        nonlocal model
        if model.L < 2 * m - 1:
            model = coefficients(2 * m - 1)
        return _stage("forward", lambda: forward_spectrum(model, m, n))

    if config.truncation == "adaptive":
        m = 2 * n
        lam_rec, mu_rec = spectra_at(m)
        while 2 * m <= config.max_truncation:
            lam_next, mu_next = spectra_at(2 * m)
            change = max(
                np.max(np.abs(lam_next - lam_rec) / np.abs(lam_in)),
                np.max(np.abs(mu_next - mu_rec) / np.where(mu_in != 0.0, np.abs(mu_in), scale)),
            )
            m *= 2
            lam_rec, mu_rec = lam_next, mu_next
            if change < 0.1 * config.eigen_tol:
                break
    else:
        m = int(config.truncation)
        lam_rec, mu_rec = spectra_at(m)

    lam_err = _relative_errors(lam_rec, lam_in, scale)
    mu_err = _relative_errors(mu_rec, mu_in, scale)

    rows = max(certified_L, m)
    iso = isometry_matrix(data, rows)
    V = iso.matrix[:m]
    gamma_est = V @ triple.R @ V.T
    idx = np.add.outer(np.arange(m), np.arange(m))
    structure = float(np.max(np.abs(gamma_est - model.coefficients[idx])))

    rng = np.random.default_rng(config.seed)
    probe = rng.standard_normal(n)
    probe /= np.linalg.norm(probe)
    parseval = stability_profile(data, probe, max(certified_L, 1)).parseval_residual

    try:
        validate_interlacing(lam_rec.tolist(), mu_rec.tolist(), spectrum.mode)
        interlaced = True
    except SpectrumValidationError:
        # mu_N = 0 recovers as round-off of either sign
        interlaced = False
        if mu_in[-1] == 0.0:
            try:
                mu_fixed = np.append(mu_rec[:-1], abs(mu_rec[-1]))
                validate_interlacing(lam_rec.tolist(), mu_fixed.tolist(), spectrum.mode)
                interlaced = True
            except SpectrumValidationError:
                pass

    nonzero = mu_in != 0.0
    signs = bool(
        np.all(np.sign(lam_rec) == np.sign(lam_in)) and np.all(np.sign(mu_rec[nonzero]) == np.sign(mu_in[nonzero]))
    )

    checks = {
        "lambda_errors": bool(np.max(lam_err) <= config.eigen_tol),
        "mu_errors": bool(np.max(mu_err) <= config.eigen_tol),
        "structure": structure <= config.structure_tol,
        "isometry": iso.orthonormality_residual <= config.isometry_tol,
        "parseval": parseval <= config.parseval_tol,
        "defect": data.defect_residual <= config.defect_tol,
        "contraction": data.operator_norm <= 1.0 + config.defect_tol,
        "interlaced": interlaced,
        "signs": signs,
    }
    return VerificationReport(
        recovered_lambdas=tuple(lam_rec.tolist()),
        recovered_mus=tuple(mu_rec.tolist()),
        lambda_errors=tuple(lam_err.tolist()),
        mu_errors=tuple(mu_err.tolist()),
        structure_residual=structure,
        isometry_residual=iso.orthonormality_residual,
        parseval_residual=parseval,
        defect_residual=data.defect_residual,
        operator_norm=data.operator_norm,
        intertwining_residual=data.intertwining_residual,
        truncation_m=m,
        coefficient_count=model.L,
        interlaced=interlaced,
        signs_preserved=signs,
        passed=all(checks.values()),
        source_hash=digest,
        checks=checks,
    )
