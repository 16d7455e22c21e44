import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hankel_inverse import (
    HankelModel,
    InsufficientCoefficients,
    TailNotCertified,
    TooSmall,
    apply_shift,
    assemble_pair,
    build_hankel_matrix,
    build_sigma_star,
    compute_weights,
    generate_geometric,
    hankel_coefficients,
    isometry_matrix,
)

from corpus import corpus

# gamma_0..gamma_5 for lambda = (1, 0.5), mu = (0.7, 0.3), exact rationals
GAMMA_2x2 = [
    0.7212,
    0.32282656,
    0.151894057728,
    0.0784011933272064,
    0.04665609691360837632,
    0.032800608134464792559616,
]


def synthesize(spectrum, **kwargs):
    triple = assemble_pair(compute_weights(spectrum), spectrum)
    data = build_sigma_star(triple)
    return data, triple, hankel_coefficients(data, triple, **kwargs)


def geometric_model(length: int) -> HankelModel:
    return HankelModel(coefficients=0.75 * 0.5 ** np.arange(length), tail_bound=0.0)


def test_single_pair_geometric_series(one_by_one):
    _, _, model = synthesize(one_by_one)
    expected = 0.75 * 0.5 ** np.arange(model.L)
    assert np.max(np.abs(model.coefficients - expected)) <= 1e-15
    # sum_{j>=L} gamma_j^2 = 0.75^2 4^{-L} / (1 - 1/4)
    assert 0.75 * 4.0**-model.L <= 1e-20
    assert model.tail_bound <= 1e-20


def test_full_mass_has_zero_tail(full_mass):
    _, _, model = synthesize(full_mass)
    assert model.coefficients.tolist() == [1.0]
    assert model.tail_bound == 0.0


def test_two_by_two_gamma(two_by_two):
    _, _, model = synthesize(two_by_two)
    assert model.coefficients[:6] == pytest.approx(GAMMA_2x2, rel=1e-13)
    assert model.coefficients[0] == pytest.approx(0.6188 + 0.0512 / 0.5, rel=1e-15)


def test_tail_bound_is_honest(two_by_two):
    data, triple, model = synthesize(two_by_two, tol=1e-6)
    # extend far past L and measure the actual tail
    longer = hankel_coefficients(data, triple, tol=1e-15, min_length=model.L + 2000)
    actual = float(np.sum(longer.coefficients[model.L :] ** 2))
    assert actual <= model.tail_bound <= 1e-12


def test_min_length_extends(two_by_two):
    _, _, short = synthesize(two_by_two)
    _, _, long = synthesize(two_by_two, min_length=short.L + 50)
    assert long.L == short.L + 50
    assert np.array_equal(long.coefficients[: short.L], short.coefficients)


def test_cap_raises_tail_not_certified():
    spectrum = generate_geometric(1, 0.5, 0.7, 10)
    with pytest.raises(TailNotCertified):
        synthesize(spectrum, max_coeffs=2000)


def test_bad_arguments(two_by_two):
    with pytest.raises(ValueError):
        synthesize(two_by_two, tol=0.0)
    with pytest.raises(ValueError):
        synthesize(two_by_two, max_coeffs=0)


def test_model_read_only(two_by_two):
    _, _, model = synthesize(two_by_two)
    with pytest.raises(ValueError):
        model.coefficients[0] = 1.0


def test_model_json_and_csv_round_trip(two_by_two):
    _, _, model = synthesize(two_by_two)
    again = HankelModel.from_json(json.dumps({**model.to_dict(), "source_hash": "abc"}))
    assert np.array_equal(again.coefficients, model.coefficients)
    assert again.tail_bound == model.tail_bound and again.source_hash == "abc"
    assert np.array_equal(HankelModel.from_csv(model.to_csv()).coefficients, model.coefficients)


def test_hankel_matrix_examples():
    e0 = HankelModel(coefficients=np.array([1.0, 0.0, 0.0]), tail_bound=0.0)
    assert build_hankel_matrix(e0, 2).tolist() == [[1.0, 0.0], [0.0, 0.0]]
    assert build_hankel_matrix(geometric_model(3), 2).tolist() == [[0.75, 0.375], [0.375, 0.1875]]
    assert build_hankel_matrix(geometric_model(5), 1).tolist() == [[0.75]]


def test_hankel_matrix_errors():
    with pytest.raises(InsufficientCoefficients):
        build_hankel_matrix(geometric_model(4), 3)
    with pytest.raises(TooSmall):
        build_hankel_matrix(geometric_model(4), 0)


@settings(max_examples=50)
@given(st.lists(st.floats(-1, 1), min_size=1, max_size=40), st.integers(1, 20))
def test_hankel_matrix_structure(gamma, m):
    model = HankelModel(coefficients=np.array(gamma), tail_bound=0.0)
    if 2 * m - 1 > model.L:
        with pytest.raises(InsufficientCoefficients):
            build_hankel_matrix(model, m)
        return
    H = build_hankel_matrix(model, m)
    assert np.array_equal(H, H.T)
    for j in range(m):
        for k in range(m):
            assert H[j, k] == gamma[j + k]


def test_apply_shift_examples():
    assert apply_shift(np.array([[1.0, 0.0], [0.0, 0.0]])).tolist() == [[0.0, 0.0]]
    shifted = apply_shift(build_hankel_matrix(geometric_model(3), 2))
    assert shifted.tolist() == [[0.375, 0.1875]]
    with pytest.raises(TooSmall):
        apply_shift(np.array([[1.0]]))


def test_shift_equals_gamma_s(two_by_two):
    _, _, model = synthesize(two_by_two)
    m = 6
    H = build_hankel_matrix(model, m)
    S = np.eye(m, k=-1)  # forward shift e_k -> e_{k+1}
    # Gamma S drops the first column; by symmetry that is S* Gamma, dropping the first row
    assert np.array_equal(apply_shift(H), (S.T @ H)[:-1])
    assert np.array_equal((H @ S)[:, :-1], apply_shift(H).T)


def test_isometry_single_pair(one_by_one):
    spectrum = one_by_one
    data = build_sigma_star(assemble_pair(compute_weights(spectrum), spectrum))
    iso = isometry_matrix(data, 3)
    assert iso.matrix[:, 0] == pytest.approx(0.8660254037844386 * 0.5 ** np.arange(3), rel=1e-15)
    # ||column||^2 = 0.75 (1 + 1/4 + 1/16)
    assert iso.orthonormality_residual == pytest.approx(1 - 0.75 * 1.3125, rel=1e-13)
    assert isometry_matrix(data, 60).orthonormality_residual <= 1e-15


def test_isometry_full_mass(full_mass):
    data = build_sigma_star(assemble_pair(compute_weights(full_mass), full_mass))
    iso = isometry_matrix(data, 2)
    assert iso.matrix[:, 0].tolist() == [1.0, 0.0]
    assert iso.orthonormality_residual == 0.0


@pytest.mark.parametrize("spectrum", corpus(seed=17, count=15, n_max=8))
def test_isometry_reproduces_gamma(spectrum):
    data, triple, model = synthesize(spectrum, max_coeffs=200_000)
    rows = min((model.L + 1) // 2, 40)
    iso = isometry_matrix(data, model.L)
    assert iso.orthonormality_residual <= 1e-8
    V = iso.matrix
    block = V[:rows] @ triple.R @ V[:rows].T
    idx = np.add.outer(np.arange(rows), np.arange(rows))
    assert np.max(np.abs(block - model.coefficients[idx])) <= 1e-12 * abs(spectrum.lambdas[0])
