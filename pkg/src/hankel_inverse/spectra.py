"""Target spectra: validation, a geometric generator, and kernel diagnostics."""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .errors import (
    BadDecayParameters,
    InterlacingViolation,
    LengthMismatch,
    NonFiniteValue,
    ZeroLambda,
    ZeroMuInInfiniteMode,
)


class Mode(str, Enum):
    FINITE = "finite"
    TRUNCATED = "truncated"

    @classmethod
    def parse(cls, value: "Mode | str") -> "Mode":
        if isinstance(value, Mode):
            return value
        aliases = {
            "finite": cls.FINITE,
            "finite-rank": cls.FINITE,
            "truncated": cls.TRUNCATED,
            "truncated-infinite": cls.TRUNCATED,
        }
        try:
            return aliases[str(value).lower()]
        except KeyError:
            raise ValueError(f"unknown spectrum mode {value!r}") from None


class SignPattern(str, Enum):
    ALL_POSITIVE = "all-positive"
    ALTERNATING = "alternating"  # lambda_k carries (-1)^(k-1), mu_k follows lambda_k
    MU_OPPOSITE = "mu-opposite"  # mu_k has the opposite sign of lambda_k
    ALTERNATING_MU_OPPOSITE = "alternating-mu-opposite"

    def signs(self, n: int) -> tuple[np.ndarray, np.ndarray]:
        """Return (sign_k, sign'_k) arrays of length ``n``."""
        ones = np.ones(n)
        lam = (-1.0) ** np.arange(n) if self in (SignPattern.ALTERNATING, SignPattern.ALTERNATING_MU_OPPOSITE) else ones
        mu = -ones if self in (SignPattern.MU_OPPOSITE, SignPattern.ALTERNATING_MU_OPPOSITE) else ones
        return lam, mu


@dataclass(frozen=True)
class GeometricDescriptor:
    c: float
    r: float
    s: float
    n: int
    sign_pattern: SignPattern = SignPattern.ALL_POSITIVE

    @property
    def term_limits(self) -> tuple[float, float]:
        """Constant terms of the two kernel series for this family.

        For lambda_k = c r^(k-1), |mu_k| = s |lambda_k| every term of
        sum(1 - mu_j^2/lambda_j^2) equals 1 - s^2 and every term of
        sum(mu_j^2/lambda_{j+1}^2 - 1) equals s^2/r^2 - 1.
        """
        return 1.0 - self.s**2, (self.s / self.r) ** 2 - 1.0

    def to_dict(self) -> dict:
        return {
            "kind": "geometric",
            "c": self.c,
            "r": self.r,
            "s": self.s,
            "n": self.n,
            "sign_pattern": self.sign_pattern.value,
        }


@dataclass(frozen=True)
class InterlacedSpectrum:
    """Validated pair of interlaced eigenvalue sequences.

    Build instances through :func:`validate_interlacing` or
    :func:`generate_geometric`; the constructor does not re-check anything.
    """

    lambdas: tuple[float, ...]
    mus: tuple[float, ...]
    mode: Mode = Mode.FINITE
    source: GeometricDescriptor | None = None

    @property
    def n(self) -> int:
        return len(self.lambdas)

    @property
    def lambda_array(self) -> np.ndarray:
        return np.array(self.lambdas, dtype=float)

    @property
    def mu_array(self) -> np.ndarray:
        return np.array(self.mus, dtype=float)

    @property
    def scale(self) -> float:
        """lambda_1^2, the natural magnitude scale of W."""
        return self.lambdas[0] ** 2

    def to_dict(self) -> dict:
        out = {"lambda": list(self.lambdas), "mu": list(self.mus), "mode": self.mode.value}
        if self.source is not None:
            out["source"] = self.source.to_dict()
        return out

    def digest(self) -> str:
        payload = json.dumps(
            {"lambda": list(self.lambdas), "mu": list(self.mus), "mode": self.mode.value},
            separators=(",", ":"),
        )
        return hashlib.sha256(payload.encode()).hexdigest()


@dataclass(frozen=True)
class KernelReport:
    partial_sum_1: tuple[float, ...]
    partial_sum_2: tuple[float, ...]
    verdict: str
    q_norm_squared: float
    term_limits: tuple[float, float] | None = None

    def to_dict(self) -> dict:
        return {
            "partial_sum_1": list(self.partial_sum_1),
            "partial_sum_2": list(self.partial_sum_2),
            "verdict": self.verdict,
            "q_norm_squared": self.q_norm_squared,
            "term_limits": None if self.term_limits is None else list(self.term_limits),
        }


TRIVIAL_KERNEL_LIKELY = "trivial-kernel-likely"
NONTRIVIAL_KERNEL = "nontrivial-kernel"
FINITE_RANK = "finite-rank-always-nontrivial"
UNDETERMINED = "undetermined"


def validate_interlacing(
    lambdas: Sequence[float],
    mus: Sequence[float],
    mode: Mode | str = Mode.FINITE,
    source: GeometricDescriptor | None = None,
) -> InterlacedSpectrum:
    """Check |l1| > |m1| > |l2| > ... > |lN| > |mN| >= 0 and wrap the data.

    ``mu_N = 0`` is accepted only in finite mode. Indices in error messages
    are 1-based, matching the usual lambda_1, mu_1 numbering.
    """
    mode = Mode.parse(mode)
    lam = [float(x) for x in lambdas]
    mu = [float(x) for x in mus]
    if not lam or len(lam) != len(mu):
        raise LengthMismatch(f"need equal, non-empty sequences; got {len(lam)} lambdas and {len(mu)} mus")
    for name, seq in (("lambda", lam), ("mu", mu)):
        for k, x in enumerate(seq, start=1):
            if not math.isfinite(x):
                raise NonFiniteValue(f"{name}_{k} = {x!r} is not finite")
    for k, x in enumerate(lam, start=1):
        if x == 0.0:
            raise ZeroLambda(f"lambda_{k} is zero")
    if mu[-1] == 0.0 and mode is Mode.TRUNCATED:
        raise ZeroMuInInfiniteMode(f"mu_{len(mu)} = 0 is only allowed in finite-rank mode")

    chain = [abs(x) for pair in zip(lam, mu) for x in pair]
    for i in range(len(chain) - 1):
        if not chain[i] > chain[i + 1]:
            k = (i + 1) // 2 + 1
            name = "lambda" if (i + 1) % 2 == 0 else "mu"
            prev = "lambda" if i % 2 == 0 else "mu"
            raise InterlacingViolation(
                k,
                f"interlacing fails at index {k}: |{name}_{k}| = {chain[i + 1]!r} is not below "
                f"|{prev}_{i // 2 + 1}| = {chain[i]!r}",
            )
    return InterlacedSpectrum(tuple(lam), tuple(mu), mode, source)


def generate_geometric(
    c: float,
    r: float,
    s: float,
    n: int,
    sign_pattern: SignPattern | str = SignPattern.ALL_POSITIVE,
    mode: Mode | str = Mode.TRUNCATED,
) -> InterlacedSpectrum:
    """lambda_k = c r^(k-1) sign_k and mu_k = s lambda_k sign'_k for k = 1..n."""
    sign_pattern = SignPattern(sign_pattern)
    if not (math.isfinite(c) and c != 0.0):
        raise BadDecayParameters(f"c must be finite and non-zero, got {c!r}")
    if not (0.0 < r < s < 1.0):
        raise BadDecayParameters(f"need 0 < r < s < 1, got r={r!r}, s={s!r}")
    if int(n) != n or n < 1:
        raise BadDecayParameters(f"n must be a positive integer, got {n!r}")
    n = int(n)
    lam_sign, mu_sign = sign_pattern.signs(n)
    lam = c * r ** np.arange(n) * lam_sign
    mu = s * lam * mu_sign
    descriptor = GeometricDescriptor(float(c), float(r), float(s), n, sign_pattern)
    return validate_interlacing(lam.tolist(), mu.tolist(), mode, source=descriptor)


def kernel_diagnostics(spectrum: InterlacedSpectrum) -> KernelReport:
    la = np.abs(spectrum.lambda_array)
    ma = np.abs(spectrum.mu_array)

    # (|l| - |m|)(|l| + |m|) avoids the cancellation in l^2 - m^2
    terms_1 = (la - ma) * (la + ma) / la**2
    terms_2 = (ma[:-1] - la[1:]) * (ma[:-1] + la[1:]) / la[1:] ** 2
    partial_1 = np.cumsum(terms_1)
    partial_2 = np.cumsum(terms_2)

    if np.any(ma == 0.0):
        q2 = 1.0
    else:
        q2 = float(-np.expm1(2.0 * np.sum(np.log(ma / la))))

    limits = None
    if spectrum.mode is Mode.FINITE:
        verdict = FINITE_RANK
    elif spectrum.source is not None:
        limits = spectrum.source.term_limits
        # constant positive terms make both series diverge
        verdict = TRIVIAL_KERNEL_LIKELY if min(limits) > 0 else NONTRIVIAL_KERNEL
    else:
        verdict = UNDETERMINED

    return KernelReport(
        partial_sum_1=tuple(partial_1.tolist()),
        partial_sum_2=tuple(partial_2.tolist()),
        verdict=verdict,
        q_norm_squared=q2,
        term_limits=limits,
    )
