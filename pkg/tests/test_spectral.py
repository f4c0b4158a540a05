import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import brentq

from helixbif import spectral
from helixbif.errors import DivergenceError, DomainError
from helixbif.fourier import FourierProfile
from helixbif.operator import Geometry, ProblemParams, apply_linearized

EUC = Geometry.EUCLIDEAN
HYP = Geometry.HYPERBOLIC


def det_roots(n, geometry, a, upper=20.0, samples=4000):
    """All sign changes of det(linear_block) in R, by scan plus Brent."""
    if geometry is HYP:
        upper = 1.0 - 1e-9
    grid = np.linspace(1e-6, upper, samples)
    vals = [spectral.linear_block(n, geometry, a, r).det for r in grid]
    roots = []
    for k in range(samples - 1):
        if vals[k] == 0.0 or vals[k] * vals[k + 1] < 0.0:
            f = lambda r: spectral.linear_block(n, geometry, a, r).det
            roots.append(brentq(f, grid[k], grid[k + 1], xtol=1e-15, rtol=1e-15))
    return roots


def test_circle_block():
    e = spectral.linear_block(1, EUC, 0.0, 1.0).entries
    np.testing.assert_allclose(e, [[0.0, 0.0], [0.0, 1.0]], atol=1e-15)


@pytest.mark.parametrize("N", [3, 4, 7])
def test_hyperbolic_block_entries(N):
    R = spectral.eigenpair(N, HYP, 0.0).R
    r2 = R * R
    d = (1.0 - r2) ** 2
    e = spectral.linear_block(N, HYP, 0.0, R).entries
    assert e[0, 0] == pytest.approx(4 * (1 + r2) ** 2 / d, rel=1e-13)
    assert e[0, 1] == pytest.approx(4 * (1 + r2) * math.sqrt(1 + r2 * r2 + r2) / d, rel=1e-13)
    assert e[1, 1] == pytest.approx(4 * (1 + r2 * r2 + r2) / d, rel=1e-13)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 12), st.sampled_from([EUC, HYP]), st.floats(0.0, 4.0),
       st.floats(0.05, 0.95), st.floats(-2.0, 2.0), st.floats(-2.0, 2.0))
def test_block_reproduces_linearization(n, geometry, a, R, up, down):
    M = 16
    p = ProblemParams(geometry, a, R, M=M)
    lin = apply_linearized(p, FourierProfile.from_modes({n: up, -n: down}, M))
    b, c = spectral.linear_block(n, geometry, a, R).apply(up + down, up - down)
    assert lin.coeff(n) == pytest.approx(0.5 * (b + c), abs=1e-12)
    assert lin.coeff(-n) == pytest.approx(0.5 * (b - c), abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 10), st.sampled_from([EUC, HYP]), st.floats(0.0, 4.0), st.floats(0.05, 0.95))
def test_det_identity(n, geometry, a, R):
    # det = 0  <=>  n^2 = c^2 -/+ 4R^2/(1 +/- R^2)^2, checked as the identity det = n^2 (p + n^2 - c^2)
    s = geometry.sign
    c = 2 * (1 - s * R * R) / (1 + s * R * R) - a
    p = -s * 4 * R * R / (1 + s * R * R) ** 2
    det = spectral.linear_block(n, geometry, a, R).det
    assert det == pytest.approx(n * n * (n * n - (c * c - p)), rel=1e-12, abs=1e-12)


def test_eigen_radii_paper_cases():
    euc = {e.branch: e for e in spectral.eigen_radii(1, EUC, 0.0)}
    assert any(e.admissible and e.R == pytest.approx(1.0, abs=1e-15) for e in euc.values())
    hyp = spectral.eigen_radii(1, HYP, 0.0)
    assert not any(e.admissible for e in hyp)
    assert any(e.R2 == pytest.approx(-1.0) for e in hyp)
    for geometry in (EUC, HYP):
        assert not any(e.admissible for e in spectral.eigen_radii(2, geometry, 0.0))


def test_hyperbolic_r3_closed_value():
    R = spectral.eigenpair(3, HYP, 0.0, "minus").R
    assert R == pytest.approx(math.sqrt((11 - 4 * math.sqrt(6)) / 5), abs=1e-15)
    assert R == pytest.approx(0.4903144, abs=5e-8)
    assert det_roots(3, HYP, 0.0) == pytest.approx([R], abs=1e-12)


def test_euclidean_plus_branch_half():
    R = spectral.eigenpair(1, EUC, 0.5, "plus").R
    assert R == pytest.approx(math.sqrt(1 / 3), abs=1e-15)
    assert min(abs(r - R) for r in det_roots(1, EUC, 0.5)) < 1e-12


@pytest.mark.parametrize("geometry,a", [(EUC, 0.0), (EUC, 0.5), (EUC, 1.0), (EUC, 3.0),
                                        (HYP, 0.0), (HYP, 0.5), (HYP, 1.0), (HYP, 4.0)])
def test_eigen_radii_match_determinant_scan(geometry, a):
    for n in range(1, 9):
        found = sorted(e.R for e in spectral.eigen_radii(n, geometry, a) if e.admissible)
        roots = det_roots(n, geometry, a)
        for R in found:
            # double roots (det touching zero) have no sign change to bracket
            if roots:
                assert min(abs(r - R) for r in roots) < 1e-9 * max(1.0, R) or \
                    spectral.linear_block(n, geometry, a, R).relative_det <= 1e-14
            assert spectral.linear_block(n, geometry, a, R).relative_det <= 1e-10


def test_theorem_form_matches_lemma_form():
    for m in range(1, 8):
        for a in (0.3, 1.0, 2.5, 4.0):
            lemma = spectral.radius_squared(m, EUC, a, "minus")
            if not math.isfinite(lemma):
                continue
            assert spectral.theorem_form_radius_squared(m, a) == pytest.approx(lemma, rel=1e-13)


def test_admissible_modes_examples():
    assert spectral.admissible_modes(EUC, 0.0, "minus", 10) == [1]
    assert spectral.admissible_modes(HYP, 0.0, "minus", 8) == [3, 4, 5, 6, 7, 8]
    assert spectral.admissible_modes(EUC, 0.5, "plus", 10) == [1]
    assert spectral.admissible_modes(EUC, 1.0, "plus", 10) == []


def test_admissible_modes_euclidean_a3_lower_bound():
    # n = 2 sits below sqrt(a^2 - 2) yet has a positive root; n = 5 = a + 2 degenerates
    modes = spectral.admissible_modes(EUC, 3.0, "minus", 10)
    assert modes == [2, 3, 4]
    assert det_roots(2, EUC, 3.0)
    assert not spectral.eigenpair(5, EUC, 3.0, "minus").admissible


@pytest.mark.parametrize("geometry", [EUC, HYP])
@pytest.mark.parametrize("branch", ["plus", "minus"])
def test_admissible_modes_consistent(geometry, branch):
    for a in (0.0, 0.25, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 7.0):
        spectral.admissible_modes(geometry, a, branch, 25)


def test_degenerate_mode_limit():
    # n = a + 2: one branch has a finite limit, the other diverges
    a, n = 1.0, 3
    lim = spectral.radius_squared(n, EUC, a, "plus")
    assert lim == pytest.approx(-2 * a / (2 * a + 3))
    eps = 1e-7
    near = [spectral.radius_squared(n, EUC, a + d, "plus") for d in (eps, -eps)]
    assert near == pytest.approx([lim, lim], abs=1e-5)
    assert math.isinf(spectral.radius_squared(n, EUC, a, "minus"))


def test_disc_radii_increase_to_one():
    radii = [spectral.eigenpair(n, HYP, 0.0).R for n in range(3, 51)]
    assert np.all(np.diff(radii) > 0)
    assert radii[-1] < 1.0
    assert 1.0 - radii[-1] < 0.05


@pytest.mark.parametrize("geometry,a,n", [(EUC, 0.0, 1), (HYP, 0.0, 3), (HYP, 0.0, 6), (EUC, 1.0, 2),
                                          (EUC, 3.0, 4), (HYP, 1.0, 2)])
def test_rank_one_and_simple(geometry, a, n):
    e = spectral.eigenpair(n, geometry, a)
    assert e.admissible
    sv = np.linalg.svd(e.block().entries, compute_uv=False)
    assert sv[1] <= 1e-10 * sv[0]
    assert sv[0] > 0.5
    assert spectral.is_simple(e, 64, n)


def test_kernel_vector_cases():
    beta, h = spectral.kernel_vector(1, EUC, 0.0, 1.0)
    assert beta == pytest.approx(1.0)
    assert h.coeff(1) == pytest.approx(1.0) and h.coeff(-1) == 1.0
    R = spectral.eigenpair(3, HYP, 0.0).R
    beta3 = spectral.kernel_beta(3, HYP, 0.0, R)
    r2 = R * R
    alpha = (3 * (1 - r2) - 2 * (1 + r2)) / (3 * (1 - r2) + 2 * (1 + r2))
    assert beta3 == pytest.approx(alpha, abs=1e-15)
    assert beta3 == pytest.approx(-0.042441, abs=1e-5)


def admissible_pairs():
    for geometry in (EUC, HYP):
        for a in (0.0, 0.5, 1.0, 3.0):
            for n in range(1, 11):
                for e in spectral.eigen_radii(n, geometry, a):
                    if e.admissible:
                        yield e


def test_kernel_annihilated_and_range_defects():
    rng = np.random.default_rng(3)
    for e in admissible_pairs():
        _, h = spectral.kernel_vector(e.n, e.geometry, e.a, e.R, 32)
        p = ProblemParams(e.geometry, e.a, e.R, M=32)
        assert apply_linearized(p, h).norm() <= 1e-10 * h.norm()
        assert abs(spectral.range_defect(h, e.n, e.geometry, e.a, e.R)) > 1e-6
        for _ in range(5):
            v = FourierProfile(rng.standard_normal(65))
            img = apply_linearized(p, v)
            assert abs(spectral.range_defect(img, e.n, e.geometry, e.a, e.R)) <= 1e-10 * img.norm()
        assert spectral.range_defect(FourierProfile.zeros(32), e.n, e.geometry, e.a, e.R) == 0.0


def test_circle_range_condition():
    _, h = spectral.kernel_vector(1, EUC, 0.0, 1.0, 4)
    assert spectral.range_defect(h, 1, EUC, 0.0, 1.0) == pytest.approx(2.0)
    d = FourierProfile.from_modes({1: 0.3, -1: -0.3, 2: 1.0}, 4)
    assert spectral.range_defect(d, 1, EUC, 0.0, 1.0) == pytest.approx(0.0, abs=1e-16)


def test_transversality_closed_form_cases():
    t = spectral.transversality_ok(1, EUC, 0.0, 1.0)
    assert t.lhs == pytest.approx(1.0, abs=1e-15)
    assert t.rhs == pytest.approx(-1.0, abs=1e-15)
    assert t.satisfied and not t.inconclusive
    for N in range(3, 21):
        R = spectral.eigenpair(N, HYP, 0.0).R
        t = spectral.transversality_ok(N, HYP, 0.0, R)
        assert t.satisfied and t.lhs >= 0.0


def test_mixed_derivative_finite_difference():
    for e in admissible_pairs():
        if e.n > 6:
            continue
        M = 16
        _, h = spectral.kernel_vector(e.n, e.geometry, e.a, e.R, M)
        eps = 1e-6 * e.R
        up = apply_linearized(ProblemParams(e.geometry, e.a, e.R + eps, M=M), h)
        down = apply_linearized(ProblemParams(e.geometry, e.a, e.R - eps, M=M), h)
        fd = (up - down) * (0.5 / eps)
        g = spectral.dR_linearized_on_kernel(e.n, e.geometry, e.a, e.R, M)
        assert (fd - g).norm() <= 1e-6 * max(g.norm(), 1.0)


def test_mixed_derivative_at_circle():
    g = spectral.dR_linearized_on_kernel(1, EUC, 0.0, 1.0, 2)
    assert g.as_dict() == pytest.approx({1: -2.0, -1: 2.0})
    # -2w + 2 conj(w) has d_1 + d_-1 = 0: it lies in the range
    ok, defect = spectral.transversality_operator(1, EUC, 0.0, 1.0)
    assert not ok and abs(defect) < 1e-15


def test_operator_and_exact_transversality_agree():
    for e in admissible_pairs():
        op, _ = spectral.transversality_operator(e.n, e.geometry, e.a, e.R)
        exact, _ = spectral.transversality_exact(e.n, e.geometry, e.a, e.R)
        assert op == exact


def test_disc_m3_transversal_at_operator_level():
    R = spectral.eigenpair(3, HYP, 0.0).R
    ok, defect = spectral.transversality_operator(3, HYP, 0.0, R)
    assert ok and abs(defect) > 1e-3


def test_limit_radius():
    assert spectral.limit_radius(0.0) == 1.0
    assert spectral.limit_radius(1.0) == pytest.approx(math.sqrt(3), abs=1e-15)
    with pytest.raises(DivergenceError):
        spectral.limit_radius(2.0)
    with pytest.raises(DomainError):
        spectral.limit_radius(-0.1)


def test_limit_radius_is_the_large_mode_limit():
    target = spectral.limit_radius(1.5)
    gaps = {m: abs(spectral.eigenpair(m, EUC, m - 1.5).R / target - 1.0) for m in (100, 200, 400, 800)}
    # the gap decays like 1/m
    assert gaps[400] / gaps[800] == pytest.approx(2.0, rel=0.02)
    assert gaps[400] < 1e-3
    assert gaps[200] < 1.3e-3
