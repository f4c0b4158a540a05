import numpy as np
import pytest

from helixbif import evolve, fourier
from helixbif.checks import hyperbolic_point
from helixbif.errors import BlowUpError, DomainError
from helixbif.fourier import FourierProfile
from helixbif.operator import Geometry, ProblemParams, omega_trivial
from helixbif.reconstruct import profile_function

EUC = Geometry.EUCLIDEAN
HYP = Geometry.HYPERBOLIC


def helix(geometry, a, R, M=8):
    return ProblemParams(geometry, a, R, M=M), FourierProfile.zeros(M)


def test_rhs_zero():
    assert np.all(evolve.rhs(np.zeros(32, complex), EUC).values == 0)


@pytest.mark.parametrize("R", [0.3, 1.0, 2.5])
def test_rhs_rotating_helix(R):
    s = fourier.grid(32)
    z = R * np.exp(1j * s)
    out = evolve.rhs(z, EUC).values
    np.testing.assert_allclose(out, 1j * omega_trivial(EUC, 0.0, R) * z, atol=1e-13)


def test_rhs_small_amplitude_is_linear():
    s = fourier.grid(64)
    h = np.exp(2j * s) + 0.5 * np.exp(-3j * s)
    hss = -4 * np.exp(2j * s) - 4.5 * np.exp(-3j * s)
    eps = 1e-6
    for g in (EUC, HYP):
        out = evolve.rhs(eps * h, g).values
        assert np.max(np.abs(out - eps * 1j * hss)) <= 10 * eps ** 2 * 20


def test_z0_coefficients_match_profile():
    pt = hyperbolic_point()
    c = evolve.z0_coefficients(pt)
    J = 4 * pt.f.M + 8
    s = fourier.grid(J)
    np.testing.assert_allclose(fourier.synthesize_complex(c, J), profile_function(pt.params, pt.f)(s),
                               atol=1e-14)


def test_circle_is_stationary():
    sol = helix(EUC, 0.0, 1.0)
    assert evolve.steadiness_error(sol, 0.0, 0.0, 0.1, 1e-4, EUC) <= 1e-9


def test_helix_steadiness():
    sol = helix(EUC, 0.3, 0.5)
    assert evolve.steadiness_error(sol, sol[0].omega, 0.3, 0.1, 1e-4, EUC) <= 1e-8


def test_time_order_four():
    sol = helix(EUC, 0.3, 0.5, M=2)
    W = sol[0].omega
    errs = [evolve.steadiness_error(sol, W, 0.3, 1.0, dt, EUC, K=4) for dt in (0.1, 0.05, 0.025)]
    for e1, e2 in zip(errs, errs[1:]):
        assert 13.0 < e1 / e2 < 19.0


def test_spatial_resolution_insensitive():
    pt = hyperbolic_point()
    c0 = evolve.z0_coefficients(pt)
    L = (c0.size - 1) // 2
    a = evolve.steadiness_error(pt, pt.params.omega, 0.0, 0.01, 1e-4, HYP, K=L)
    b = evolve.steadiness_error(pt, pt.params.omega, 0.0, 0.01, 1e-4, HYP, K=2 * L)
    assert abs(a - b) < 1e-10


def test_modulus_conserved_for_helix():
    sol = helix(HYP, 0.2, 0.6)
    c0 = evolve.z0_coefficients(sol)
    for state in evolve.evolve(c0, HYP, 0.05, 1e-3, checkpoints=5):
        assert np.max(np.abs(np.abs(state.z.values) - 0.6)) <= 1e-12


def test_branch_point_steadiness():
    pt = hyperbolic_point()
    assert evolve.steadiness_error(pt, pt.params.omega, 0.0, 0.1, 1e-4, HYP) <= 1e-6


def test_unresolved_start_raises():
    c0 = np.zeros(9, complex)
    c0[0] = c0[-1] = 1e-3
    c0[5] = 0.5
    with pytest.raises(BlowUpError) as info:
        list(evolve.evolve(c0, EUC, 0.01, 1e-3))
    assert info.value.time == 0.0


def test_unstable_step_is_caught():
    # an explicit step far above the stability limit trips the resolution guard
    sol = helix(EUC, 0.0, 0.5, M=4)
    c0 = evolve.z0_coefficients(sol)
    c0 = c0 + 1e-3 * np.random.default_rng(0).standard_normal(c0.size)
    with pytest.raises(BlowUpError) as info:
        evolve.steadiness_error(c0, 0.0, 0.0, 50.0, 0.5, EUC, K=16)
    assert 0.0 < info.value.time <= 50.0


def test_validation():
    with pytest.raises(DomainError):
        list(evolve.evolve(np.zeros(5, complex), EUC, 0.0, 1e-3))
    with pytest.raises(DomainError):
        list(evolve.evolve(np.zeros(9, complex), EUC, 0.1, 1e-3, K=2))
