"""Eigensolver: examples, certified residuals, oracle agreement."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gapbound import (
    DegenerateGroundState,
    HermitianMatrix,
    NonHermitianError,
    ValidationError,
    lowest_two,
    spectral_scale,
    tridiagonalize,
    write_spectrum,
)

from oracles import (
    bisect_eigenvalues,
    charpoly_eigenvalues,
    hermitian_eigenvalues_bisect,
    random_hermitian,
)


def test_two_site_example():
    res = lowest_two(np.array([[0.0, -1.0], [-1.0, 0.0]]))
    assert res.e0 == pytest.approx(-1.0, abs=1e-14)
    assert res.e1 == pytest.approx(1.0, abs=1e-14)
    assert res.gap == pytest.approx(2.0, abs=1e-14)
    # phase convention makes the vector exactly (1, 1)/sqrt(2)
    np.testing.assert_allclose(res.psi0, np.full(2, 1 / math.sqrt(2)), atol=1e-14)


def test_three_site_free_chain():
    h = np.array([[0.0, 1.0, 0.0], [1.0, 0.0, 1.0], [0.0, 1.0, 0.0]])
    res = lowest_two(h)
    assert res.e0 == pytest.approx(-math.sqrt(2), abs=1e-12)
    assert res.e1 == pytest.approx(0.0, abs=1e-12)
    assert res.gap == pytest.approx(math.sqrt(2), abs=1e-12)


def test_degenerate_ground_state_refused():
    with pytest.raises(DegenerateGroundState):
        lowest_two(np.diag([3.0, 3.0]))
    with pytest.raises(DegenerateGroundState):
        lowest_two(np.zeros((4, 4)))


def test_input_validation():
    with pytest.raises(ValidationError):
        lowest_two(np.array([[1.0]]))
    with pytest.raises(NonHermitianError):
        lowest_two(np.array([[0.0, 1.0], [0.5, 0.0]]))
    with pytest.raises(ValidationError):
        HermitianMatrix(np.zeros((2, 3)))
    with pytest.raises(ValidationError):
        HermitianMatrix(np.array([[np.nan, 0], [0, 1.0]]))


def test_hermitian_matrix_exact_symmetry_and_immutability():
    rng = np.random.default_rng(0)
    hm = HermitianMatrix(random_hermitian(rng, 5) + 1e-14 * rng.normal(size=(5, 5)))
    assert np.array_equal(hm.array, hm.array.conj().T)
    with pytest.raises(ValueError):
        hm.array[0, 0] = 1.0


def test_spectral_scale_is_max_row_sum():
    h = np.array([[1.0, -2.0], [-2.0, 0.5]])
    assert spectral_scale(h) == 3.0


@pytest.mark.parametrize("n", [2, 3, 5, 8, 13, 34])
def test_tridiagonalize_reconstructs(n):
    rng = np.random.default_rng(n)
    h = random_hermitian(rng, n)
    form = tridiagonalize(h)
    assert np.all(form.sub >= 0.0)
    q = form.q_matrix()
    np.testing.assert_allclose(q.conj().T @ q, np.eye(n), atol=1e-12)
    t = np.diag(form.diag).astype(complex)
    for j in range(n - 1):
        t[j, j + 1] = t[j + 1, j] = form.sub[j]
    np.testing.assert_allclose(q @ t @ q.conj().T, h, atol=1e-11 * spectral_scale(h))


def test_tridiagonalize_fast_path_for_tridiagonal_input():
    # complex Hermitian tridiagonal input: only the phase rotation acts
    n = 7
    rng = np.random.default_rng(3)
    h = np.zeros((n, n), dtype=complex)
    h[np.arange(n), np.arange(n)] = rng.normal(size=n)
    sub = rng.normal(size=n - 1) + 1j * rng.normal(size=n - 1)
    for j in range(n - 1):
        h[j + 1, j] = sub[j]
        h[j, j + 1] = np.conj(sub[j])
    form = tridiagonalize(h)
    assert not form.reflectors.any()
    np.testing.assert_allclose(form.sub, np.abs(sub), atol=1e-14)
    q = form.q_matrix()
    t = np.diag(form.diag).astype(complex)
    for j in range(n - 1):
        t[j, j + 1] = t[j + 1, j] = form.sub[j]
    np.testing.assert_allclose(q @ t @ q.conj().T, h, atol=1e-13)


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_small_matrices_match_charpoly_oracle(n):
    rng = np.random.default_rng(100 + n)
    for _ in range(25):
        h = random_hermitian(rng, n)
        oracle = charpoly_eigenvalues(h)
        if n >= 2 and oracle[1] - oracle[0] < 1e-6:
            continue
        res = lowest_two(h)
        assert res.e0 == pytest.approx(oracle[0], abs=1e-10 * spectral_scale(h))
        assert res.e1 == pytest.approx(oracle[1], abs=1e-10 * spectral_scale(h))


@pytest.mark.parametrize("n", [12, 40])
def test_matches_bisection_oracle(n):
    rng = np.random.default_rng(n)
    h = random_hermitian(rng, n)
    res = lowest_two(h)
    oracle = hermitian_eigenvalues_bisect(h, k=2)
    np.testing.assert_allclose([res.e0, res.e1], oracle, atol=1e-11 * spectral_scale(h))


@pytest.mark.parametrize("n", [35, 120])
def test_cross_check_against_divide_and_conquer(n):
    # independent LAPACK route (syevd) as an extra consistency anchor
    rng = np.random.default_rng(n + 1)
    h = random_hermitian(rng, n)
    res = lowest_two(h)
    ref = np.linalg.eigvalsh(0.5 * (h + h.conj().T))
    scale = max(1.0, spectral_scale(h))
    np.testing.assert_allclose(res.eigenvalues, ref, atol=1e-12 * scale)


def test_bisection_oracle_self_check():
    # the oracle itself must solve an exactly known tridiagonal spectrum
    n = 9
    d = np.zeros(n)
    e = np.ones(n - 1)
    expected = 2.0 * np.cos(np.pi * np.arange(n, 0, -1) / (n + 1))
    np.testing.assert_allclose(bisect_eigenvalues(d, e), expected, atol=1e-12)


def test_residuals_certified():
    rng = np.random.default_rng(7)
    for n in (2, 6, 17, 51):
        h = random_hermitian(rng, n, scale=3.0)
        res = lowest_two(h)
        scale = spectral_scale(h)
        assert res.residual0 <= 1e-10 * max(1.0, scale)
        assert res.residual1 <= 1e-10 * max(1.0, scale)
        # recompute independently
        a = 0.5 * (np.asarray(h) + np.asarray(h).conj().T)
        assert np.linalg.norm(a @ res.psi0 - res.e0 * res.psi0) <= 1e-10 * max(1.0, scale)
        assert abs(np.linalg.norm(res.psi0) - 1.0) <= 1e-12


def test_trace_identity():
    rng = np.random.default_rng(21)
    for n in (5, 23, 64):
        h = random_hermitian(rng, n)
        res = lowest_two(h)
        assert res.eigenvalues.shape == (n,)
        assert np.all(np.diff(res.eigenvalues) >= -1e-12)
        assert abs(res.eigenvalues.sum() - np.trace(h).real) <= 1e-8 * n * spectral_scale(h)


def test_shift_invariance():
    rng = np.random.default_rng(42)
    h = random_hermitian(rng, 20)
    base = lowest_two(h)
    for c in (-3.7, 0.25, 11.0):
        shifted = lowest_two(h + c * np.eye(20))
        assert abs(shifted.gap - base.gap) < 1e-10
        assert abs(shifted.e0 - (base.e0 + c)) < 1e-9
        assert abs(np.vdot(base.psi0, shifted.psi0)) > 1 - 1e-10


def test_phase_convention():
    rng = np.random.default_rng(17)
    h = random_hermitian(rng, 9)
    res = lowest_two(h)
    for psi in (res.psi0, res.psi1):
        top = psi[int(np.argmax(np.abs(psi)))]
        assert abs(top.imag) < 1e-14
        assert top.real > 0


@settings(max_examples=20, deadline=None)
@given(st.integers(min_value=0, max_value=10_000), st.integers(min_value=2, max_value=9))
def test_property_certified_spectrum(seed, n):
    rng = np.random.default_rng(seed)
    h = random_hermitian(rng, n)
    try:
        res = lowest_two(h)
    except DegenerateGroundState:
        return
    scale = spectral_scale(h)
    assert res.e0 <= res.e1
    assert res.gap == res.e1 - res.e0
    assert res.residual0 <= 1e-10 * max(1.0, scale)
    oracle = hermitian_eigenvalues_bisect(h, k=2)
    np.testing.assert_allclose([res.e0, res.e1], oracle, atol=1e-10 * max(1.0, scale))


def test_write_spectrum(tmp_path):
    res = lowest_two(np.array([[0.0, -1.0], [-1.0, 0.0]]))
    path = tmp_path / "spec.txt"
    write_spectrum(res, path)
    lines = path.read_text().splitlines()
    assert lines[0].split() == ["0", "-1"]
    assert lines[1].split() == ["1", "1"]
