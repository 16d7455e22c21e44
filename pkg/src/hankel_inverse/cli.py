"""Command-line entry point.

    hankel-inverse solve    --input spectrum.json --output gamma.csv [--format csv|json]
    hankel-inverse forward  --input gamma.json    --output spectra.json [--count K]
    hankel-inverse verify   --input spectrum.json --output report.json
    hankel-inverse diagnose --input spectrum.json --output kernel.json
    hankel-inverse generate --c 1 --r 0.5 --s 0.7 --n 10 --output spectrum.json

Exit status: 0 success, 1 pipeline or verification failure, 2 usage error,
3 invalid spectral data.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .borg import compute_weights
from .errors import HankelInverseError, SpectrumValidationError
from .hankel import DEFAULT_MAX_COEFFS, DEFAULT_TOL, HankelModel, build_hankel_matrix, hankel_coefficients
from .operators import assemble_pair, build_sigma_star
from .spectra import InterlacedSpectrum, generate_geometric, kernel_diagnostics, validate_interlacing
from .verify import VerifyConfig, forward_spectrum, round_trip

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_INVALID = 3

COMMANDS = ("solve", "forward", "verify", "diagnose", "generate")
MAX_TRUNCATION = 4096


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    input_path: str | None = None
    output_path: str | None = None
    tol: float = DEFAULT_TOL
    max_coeffs: int = DEFAULT_MAX_COEFFS
    truncation: int | str = "adaptive"
    format: str = "json"
    seed: int = 0
    count: int | None = None
    c: float | None = None
    r: float | None = None
    s: float | None = None
    n: int | None = None
    signs: str = "all-positive"
    mode: str | None = None

    def check(self) -> None:
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        if not (self.tol > 0 and math.isfinite(self.tol)):
            raise UsageError("--tol must be a positive number")
        if self.max_coeffs < 1:
            raise UsageError("--max-coeffs must be >= 1")
        if self.truncation != "adaptive" and int(self.truncation) < 2:
            raise UsageError("--truncation must be an integer >= 2 or 'adaptive'")
        if self.format not in ("json", "csv"):
            raise UsageError("--format must be json or csv")


def _finite_or_none(obj):
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {k: _finite_or_none(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_finite_or_none(v) for v in obj]
    if isinstance(obj, np.generic):
        return _finite_or_none(obj.item())
    return obj


def dumps(payload: dict) -> str:
    # repr-based float output is the shortest string that round-trips
    return json.dumps(_finite_or_none(payload), indent=2, allow_nan=False) + "\n"


def _read_input(path: str | None) -> str:
    if path is None or path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc


def _write_output(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc}") from exc


def load_spectrum(text: str, mode: str | None = None) -> InterlacedSpectrum:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpectrumValidationError(f"input is not valid JSON: {exc}") from exc
    if not isinstance(data, dict) or "lambda" not in data or "mu" not in data:
        raise SpectrumValidationError('expected an object with "lambda" and "mu" arrays')
    try:
        lam = [float(x) for x in data["lambda"]]
        mu = [float(x) for x in data["mu"]]
    except (TypeError, ValueError) as exc:
        raise SpectrumValidationError(f"non-numeric spectral data: {exc}") from exc
    try:
        spectrum = validate_interlacing(lam, mu, mode or data.get("mode", "finite"))
    except ValueError as exc:
        if isinstance(exc, SpectrumValidationError):
            raise
        raise SpectrumValidationError(str(exc)) from exc
    source = data.get("source")
    if isinstance(source, dict) and source.get("kind") == "geometric":
        spectrum = _attach_geometric_source(spectrum, source)
    return spectrum


def _attach_geometric_source(spectrum: InterlacedSpectrum, source: dict) -> InterlacedSpectrum:
    # the descriptor is only trusted if it regenerates the stored sequences
    try:
        regen = generate_geometric(
            float(source["c"]), float(source["r"]), float(source["s"]), int(source["n"]),
            source.get("sign_pattern", "all-positive"), spectrum.mode,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise SpectrumValidationError(f"bad geometric source block: {exc}") from exc
    same = regen.n == spectrum.n and np.allclose(regen.lambdas, spectrum.lambdas, rtol=1e-12, atol=0) and np.allclose(
        regen.mus, spectrum.mus, rtol=1e-12, atol=0
    )
    if not same:
        raise SpectrumValidationError("geometric source block does not reproduce the lambda/mu arrays")
    return regen


def _envelope(kind: str, source_hash: str | None = None) -> dict:
    out = {"tool": "hankel-inverse", "version": __version__, "kind": kind}
    if source_hash is not None:
        out["source_hash"] = source_hash
    return out


def _solve(config: RunConfig) -> int:
    spectrum = load_spectrum(_read_input(config.input_path), config.mode)
    measure = compute_weights(spectrum)
    triple = assemble_pair(measure, spectrum)
    data = build_sigma_star(triple)
    model = hankel_coefficients(
        data, triple, tol=config.tol, max_coeffs=config.max_coeffs, source_hash=spectrum.digest()
    )
    if config.format == "csv":
        _write_output(config.output_path, model.to_csv())
    else:
        payload = {**model.to_dict(), **_envelope("coefficients", model.source_hash), "L": model.L}
        _write_output(config.output_path, dumps(payload))

    if config.output_path not in (None, "-"):
        out = Path(config.output_path)
        dump = {
            **_envelope("measure", model.source_hash),
            **measure.to_dict(),
            "q_norm_squared": data.q_norm_squared,
            "operator_norm": data.operator_norm,
            "defect_residual": data.defect_residual,
        }
        _write_output(str(out.with_name(out.stem + ".measure.json")), dumps(dump))
    return EXIT_OK


def load_model(text: str) -> HankelModel:
    stripped = text.lstrip()
    try:
        if stripped.startswith("{"):
            return HankelModel.from_json(text)
        return HankelModel.from_csv(text)
    except (ValueError, KeyError, TypeError) as exc:
        raise SpectrumValidationError(f"cannot parse coefficients: {exc}") from exc


def _forward(config: RunConfig) -> int:
    model = load_model(_read_input(config.input_path))
    if model.L < 3:
        raise SpectrumValidationError("need at least 3 coefficients for a forward run")
    if config.truncation == "adaptive":
        m = min((model.L + 1) // 2, MAX_TRUNCATION)
    else:
        m = int(config.truncation)
    if 2 * m - 1 > model.L:
        raise UsageError(f"--truncation {m} needs {2 * m - 1} coefficients, file has {model.L}")

    count = config.count
    if count is None:
        # numerical rank of the Gamma block, relative to --tol
        eig = np.abs(np.linalg.eigvalsh(build_hankel_matrix(model, m)))
        count = max(1, min(int(np.sum(eig > config.tol * eig.max())), m - 1))
    lam, mu = forward_spectrum(model, m, count)
    payload = {
        **_envelope("forward", model.source_hash or None),
        "truncation_m": m,
        "lambda": lam.tolist(),
        "mu": mu.tolist(),
    }
    _write_output(config.output_path, dumps(payload))
    return EXIT_OK


def _verify(config: RunConfig) -> int:
    spectrum = load_spectrum(_read_input(config.input_path), config.mode)
    vconf = VerifyConfig(
        tol=config.tol, max_coeffs=config.max_coeffs, truncation=config.truncation, seed=config.seed
    )
    report = round_trip(spectrum, vconf)
    payload = {**_envelope("verification"), **report.to_dict()}
    _write_output(config.output_path, dumps(payload))
    return EXIT_OK if report.passed else EXIT_FAILED


def _diagnose(config: RunConfig) -> int:
    spectrum = load_spectrum(_read_input(config.input_path), config.mode)
    report = kernel_diagnostics(spectrum)
    payload = {**_envelope("kernel", spectrum.digest()), **report.to_dict()}
    _write_output(config.output_path, dumps(payload))
    return EXIT_OK


def _generate(config: RunConfig) -> int:
    params = {"c": config.c, "r": config.r, "s": config.s, "n": config.n, "sign_pattern": config.signs}
    if config.input_path is not None:
        try:
            loaded = json.loads(_read_input(config.input_path))
        except json.JSONDecodeError as exc:
            raise SpectrumValidationError(f"parameter file is not valid JSON: {exc}") from exc
        params.update({k: v for k, v in loaded.items() if k in params or k == "mode"})
    missing = [k for k in ("c", "r", "s", "n") if params.get(k) is None]
    if missing:
        raise UsageError(f"generate needs {', '.join(missing)} (flags or --input parameter file)")
    mode = config.mode or params.pop("mode", None) or "truncated"
    spectrum = generate_geometric(
        float(params["c"]), float(params["r"]), float(params["s"]), int(params["n"]), params["sign_pattern"], mode
    )
    _write_output(config.output_path, dumps({**spectrum.to_dict(), "source_hash": spectrum.digest()}))
    return EXIT_OK


HANDLERS = {
    "solve": _solve,
    "forward": _forward,
    "verify": _verify,
    "diagnose": _diagnose,
    "generate": _generate,
}


def run(config: RunConfig) -> int:
    try:
        config.check()
        return HANDLERS[config.command](config)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SpectrumValidationError as exc:
        print(f"invalid input: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except HankelInverseError as exc:
        print(f"failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAILED


def _truncation(value: str) -> int | str:
    if value == "adaptive":
        return value
    try:
        return int(value)
    except ValueError:
        raise argparse.ArgumentTypeError("expected an integer or 'adaptive'") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", dest="input_path", help="input file (default: stdin)")
    common.add_argument("--output", dest="output_path", help="output file (default: stdout)")
    common.add_argument("--tol", type=float, default=DEFAULT_TOL)
    common.add_argument("--max-coeffs", type=int, default=DEFAULT_MAX_COEFFS)
    common.add_argument("--truncation", type=_truncation, default="adaptive")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--mode", choices=("finite", "truncated"), default=None)

    parser = argparse.ArgumentParser(
        prog="hankel-inverse", description="Hankel operators from two interlaced spectra."
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("solve", parents=[common], help="spectrum -> Hankel coefficients")
    fwd = sub.add_parser("forward", parents=[common], help="coefficients -> recovered spectra")
    fwd.add_argument("--count", type=int, default=None, help="number of eigenvalues to report")
    sub.add_parser("verify", parents=[common], help="full round trip with residual report")
    sub.add_parser("diagnose", parents=[common], help="kernel conditions and ||q||^2")
    gen = sub.add_parser("generate", parents=[common], help="geometric test spectrum")
    gen.add_argument("--c", type=float)
    gen.add_argument("--r", type=float)
    gen.add_argument("--s", type=float)
    gen.add_argument("--n", type=int)
    gen.add_argument(
        "--signs",
        default="all-positive",
        choices=("all-positive", "alternating", "mu-opposite", "alternating-mu-opposite"),
    )
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    fields = {k: v for k, v in vars(args).items() if k in RunConfig.__dataclass_fields__}
    return run(RunConfig(**fields))


if __name__ == "__main__":
    sys.exit(main())
