import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from helixbif import fourier
from helixbif.errors import AliasingError, SymmetryError
from helixbif.fourier import FourierProfile


def random_profile(seed, M=8, mfold=1):
    rng = np.random.default_rng(seed)
    return FourierProfile(rng.standard_normal(2 * M + 1), mfold)


seeds = st.integers(min_value=0, max_value=2**32 - 1)


def test_synthesize_zero():
    assert np.all(fourier.synthesize(FourierProfile.zeros(5), 32).values == 0)


def test_synthesize_cosine():
    p = FourierProfile.from_modes({1: 1.0, -1: 1.0}, 4)
    g = fourier.synthesize(p, 16)
    np.testing.assert_allclose(g.values, 2 * np.cos(g.theta), atol=1e-14)


def test_synthesize_matches_direct_sum():
    p = random_profile(1, M=6)
    J = 24
    theta = fourier.grid(J)
    direct = sum(p.coeff(n) * np.exp(1j * n * theta) for n in range(-6, 7))
    np.testing.assert_allclose(fourier.synthesize(p, J).values, direct, atol=1e-13)


def test_synthesize_aliasing():
    with pytest.raises(AliasingError):
        fourier.synthesize(FourierProfile.zeros(8), 16)


def test_analyze_constant_and_cosine():
    c = fourier.analyze(np.full(16, 2.5 + 0j), 4)
    assert c.coeff(0) == pytest.approx(2.5)
    assert np.all(np.delete(c.coeffs, 4) == 0)
    theta = fourier.grid(32)
    c3 = fourier.analyze(2 * np.cos(3 * theta) + 0j, 5)
    assert c3.coeff(3) == pytest.approx(1.0)
    assert c3.coeff(-3) == pytest.approx(1.0)


def test_analyze_rejects_imaginary_content():
    theta = fourier.grid(32)
    with pytest.raises(SymmetryError):
        fourier.analyze(1j * np.exp(1j * theta), 4)


@settings(max_examples=40, deadline=None)
@given(seeds, st.integers(min_value=1, max_value=20))
def test_round_trip(seed, M):
    p = random_profile(seed, M)
    for J in (2 * M + 1, 4 * M):
        back = fourier.analyze(fourier.synthesize(p, J), M)
        assert np.max(np.abs(back.coeffs - p.coeffs)) <= 1e-12 * max(1.0, np.max(np.abs(p.coeffs)))


def test_wderiv_monomials():
    assert fourier.wderiv(FourierProfile.from_modes({2: 1.0}, 3), 1).coeff(2) == 2.0
    assert fourier.wderiv(FourierProfile.from_modes({-1: 1.0}, 3), 2).coeff(-1) == 2.0


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_wderiv_identity(seed):
    # w (w f')' = w f' + w^2 f''
    p = random_profile(seed)
    lhs = fourier.wderiv(fourier.wderiv(p, 1), 1)
    rhs = fourier.wderiv(p, 1) + fourier.wderiv(p, 2)
    np.testing.assert_allclose(lhs.coeffs, rhs.coeffs, atol=1e-12)


def test_wderiv_kernels():
    p = FourierProfile(np.ones(9))
    d1 = fourier.wderiv(p, 1)
    d2 = fourier.wderiv(p, 2)
    assert np.flatnonzero(d1.coeffs == 0).tolist() == [4]
    assert np.flatnonzero(d2.coeffs == 0).tolist() == [4, 5]
    with pytest.raises(ValueError):
        fourier.wderiv(p, 3)


def test_wderiv_matches_grid_derivative():
    p = random_profile(3, M=6)
    J = 64
    theta = fourier.grid(J)
    # w d/dw = -i d/dtheta on the circle
    dtheta = sum(1j * n * p.coeff(n) * np.exp(1j * n * theta) for n in range(-6, 7))
    np.testing.assert_allclose(fourier.synthesize(fourier.wderiv(p, 1), J).values,
                               -1j * dtheta, atol=1e-12)


def test_conj_reflect():
    p = FourierProfile.from_modes({1: 1.0}, 2)
    assert fourier.conj_reflect(p).coeff(-1) == 1.0
    sym = FourierProfile.from_modes({1: 2.0, -1: 2.0, 2: -1.0, -2: -1.0}, 3)
    np.testing.assert_array_equal(fourier.conj_reflect(sym).coeffs, sym.coeffs)


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_conj_reflect_pointwise_and_involution(seed):
    p = random_profile(seed)
    J = 40
    np.testing.assert_allclose(fourier.synthesize(fourier.conj_reflect(p), J).values,
                               np.conj(fourier.synthesize(p, J).values), atol=1e-12)
    np.testing.assert_array_equal(fourier.conj_reflect(fourier.conj_reflect(p)).coeffs, p.coeffs)


def test_project_mfold_examples():
    p = random_profile(4)
    same, lost = fourier.project_mfold(p, 1)
    np.testing.assert_array_equal(same.coeffs, p.coeffs)
    assert lost == 0.0
    q, lost = fourier.project_mfold(FourierProfile.from_modes({2: 1.0, 3: 1.0}, 4), 3)
    assert q.coeff(3) == 1.0 and q.coeff(2) == 0.0
    assert lost == 1.0
    assert q.mfold == 3


@settings(max_examples=30, deadline=None)
@given(seeds, st.integers(min_value=1, max_value=6))
def test_project_mfold_properties(seed, m):
    p = random_profile(seed, M=12)
    q, _ = fourier.project_mfold(p, m)
    qq, lost = fourier.project_mfold(q, m)
    np.testing.assert_array_equal(qq.coeffs, q.coeffs)
    assert lost == 0.0
    assert q.norm() <= p.norm()
    theta = np.linspace(0, 2 * np.pi, 17)
    np.testing.assert_allclose(q(theta + 2 * np.pi / m), q(theta), atol=1e-12)
    assert fourier.off_fold_max(q, m) == 0.0


def test_profile_algebra_and_validation():
    p = random_profile(5, M=3)
    q = random_profile(6, M=5)
    with pytest.raises(ValueError):
        p + q
    s = p.resized(5) + q
    assert s.coeff(3) == pytest.approx(p.coeff(3) + q.coeff(3))
    assert (p - p).norm() == 0.0
    assert (2 * p).dot(p) == pytest.approx(2 * p.norm() ** 2)
    assert p.resized(6).resized(3).coeffs.tolist() == p.coeffs.tolist()
    with pytest.raises(ValueError):
        FourierProfile(np.zeros(4))
    with pytest.raises(ValueError):
        FourierProfile.from_modes({5: 1.0}, 3)
