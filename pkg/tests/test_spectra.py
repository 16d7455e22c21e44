import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hankel_inverse import (
    BadDecayParameters,
    InterlacingViolation,
    LengthMismatch,
    NonFiniteValue,
    ZeroLambda,
    ZeroMuInInfiniteMode,
    compute_weights,
    generate_geometric,
    kernel_diagnostics,
    validate_interlacing,
)
from hankel_inverse.spectra import FINITE_RANK, TRIVIAL_KERNEL_LIKELY, UNDETERMINED, Mode

from corpus import corpus


def test_single_pair_is_valid():
    s = validate_interlacing([1], [0.5], "finite")
    assert s.lambdas == (1.0,) and s.mus == (0.5,)
    assert s.mode is Mode.FINITE


def test_two_pairs_valid():
    s = validate_interlacing([1, 0.5], [0.7, 0.3])
    assert s.n == 2


def test_violation_reports_first_bad_index():
    with pytest.raises(InterlacingViolation) as info:
        validate_interlacing([1, 0.8], [0.7, 0.75])
    assert info.value.index == 2


@pytest.mark.parametrize(
    "lam, mu, mode, exc",
    [
        ([1, 0.5], [0.7], "finite", LengthMismatch),
        ([], [], "finite", LengthMismatch),
        ([1, 0.0], [0.5, 0.0], "finite", ZeroLambda),
        ([1], [0.0], "truncated", ZeroMuInInfiniteMode),
        ([1, math.nan], [0.5, 0.1], "finite", NonFiniteValue),
        ([1], [math.inf], "finite", NonFiniteValue),
        ([1, 0.5], [0.5, 0.3], "finite", InterlacingViolation),  # tie |mu_1| = |lambda_2|
        ([1, 0.5], [0.0, 0.3], "finite", InterlacingViolation),  # zero mu before the end
        ([1], [-1.0], "finite", InterlacingViolation),
    ],
)
def test_validation_errors(lam, mu, mode, exc):
    with pytest.raises(exc):
        validate_interlacing(lam, mu, mode)


def test_validation_does_not_mutate_inputs():
    lam, mu = [1.0, -0.5], [0.7, 0.3]
    validate_interlacing(lam, mu)
    assert lam == [1.0, -0.5] and mu == [0.7, 0.3]


def test_signs_carried_through():
    s = validate_interlacing([-1.0, 0.5], [0.7, -0.3])
    assert s.lambdas == (-1.0, 0.5) and s.mus == (0.7, -0.3)


def test_geometric_examples():
    s = generate_geometric(1, 0.5, 0.7, 2)
    assert s.lambdas == (1.0, 0.5)
    assert s.mus == pytest.approx((0.7, 0.35), rel=1e-15)
    s = generate_geometric(2, 0.3, 0.5, 1)
    assert s.lambdas == (2.0,) and s.mus == (1.0,)
    with pytest.raises(BadDecayParameters):
        generate_geometric(1, 0.5, 0.4, 3)


def test_geometric_sign_patterns():
    s = generate_geometric(1, 0.5, 0.7, 4, "alternating")
    assert np.sign(s.lambdas).tolist() == [1, -1, 1, -1]
    assert np.sign(s.mus).tolist() == [1, -1, 1, -1]
    s = generate_geometric(-1, 0.5, 0.7, 3, "mu-opposite")
    assert np.sign(s.lambdas).tolist() == [-1, -1, -1]
    assert np.sign(s.mus).tolist() == [1, 1, 1]


@given(
    c=st.floats(0.01, 100) | st.floats(-100, -0.01),
    r=st.floats(0.01, 0.95),
    frac=st.floats(0.01, 0.99),
    n=st.integers(1, 40),
    pattern=st.sampled_from(["all-positive", "alternating", "mu-opposite", "alternating-mu-opposite"]),
)
def test_generator_output_always_validates(c, r, frac, n, pattern):
    s_param = r + frac * (1 - r)
    if not r < s_param < 1:
        return
    spectrum = generate_geometric(c, r, s_param, n, pattern)
    validate_interlacing(spectrum.lambdas, spectrum.mus, spectrum.mode)


def test_kernel_diagnostics_geometric():
    report = kernel_diagnostics(generate_geometric(1, 0.5, 0.7, 10))
    assert report.verdict == TRIVIAL_KERNEL_LIKELY
    assert report.term_limits == pytest.approx((0.51, 0.96), rel=1e-14)
    assert np.diff(report.partial_sum_1) == pytest.approx([0.51] * 9, rel=1e-12)
    assert np.diff(report.partial_sum_2) == pytest.approx([0.96] * 8, rel=1e-12)


def test_kernel_full_mass():
    report = kernel_diagnostics(validate_interlacing([1], [0], "finite"))
    assert report.q_norm_squared == 1.0
    assert report.verdict == FINITE_RANK


def test_kernel_two_by_two(two_by_two):
    report = kernel_diagnostics(two_by_two)
    assert report.q_norm_squared == pytest.approx(0.8236, rel=1e-14)
    assert report.verdict == FINITE_RANK
    assert len(report.partial_sum_2) == 1


def test_raw_truncated_data_gets_no_verdict():
    report = kernel_diagnostics(validate_interlacing([1, 0.5], [0.7, 0.3], "truncated"))
    assert report.verdict == UNDETERMINED
    assert report.term_limits is None


@pytest.mark.parametrize("spectrum", corpus(seed=3, count=50, n_max=30))
def test_kernel_partial_sums_and_q_norm(spectrum):
    report = kernel_diagnostics(spectrum)
    assert np.all(np.diff(report.partial_sum_1) >= 0) and report.partial_sum_1[0] > 0
    if report.partial_sum_2:
        assert np.all(np.diff(report.partial_sum_2) >= 0) and report.partial_sum_2[0] > 0
    assert 0 <= report.q_norm_squared <= 1
    assert report.q_norm_squared == pytest.approx(compute_weights(spectrum).inverse_moment, abs=1e-12)


@settings(max_examples=50)
@given(st.lists(st.floats(0.05, 0.95), min_size=2, max_size=24))
def test_digest_is_stable_and_sensitive(ratios):
    mags = np.cumprod([1.0] + ratios)
    if len(mags) % 2:
        mags = mags[:-1]
    s = validate_interlacing(mags[0::2], mags[1::2])
    assert s.digest() == validate_interlacing(list(mags[0::2]), list(mags[1::2])).digest()
    flipped = validate_interlacing(-mags[0::2], mags[1::2])
    assert flipped.digest() != s.digest()
