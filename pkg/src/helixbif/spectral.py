"""Closed-form spectral theory of the linearization at the helix.

On the pair ``(b_n, c_n) = (a_n + a_{-n}, a_n - a_{-n})`` of a perturbation
``h = sum a_n w^n`` the linearized operator acts mode by mode through the
symmetric block

    [[p + n^2, c n],
     [c n,     n^2]],   p = -/+ 4R^2/(1 +/- R^2)^2,
                        c = 2(1 -/+ R^2)/(1 +/- R^2) - a.

Eigenvalues (radii where a block is singular), kernel and cokernel
directions and the transversality test all follow from this block.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import AdmissibilityMismatch, DegenerateKernelError, DivergenceError, DomainError
from .fourier import FourierProfile
from .operator import Geometry

DET_RTOL = 1e-10
TRANSVERSALITY_FLOOR = 1e-10
POSITIVITY_FLOOR = 1e-12
BRANCHES = ("plus", "minus")


def _terms(geometry: Geometry, a: float, R: float):
    s = Geometry.parse(geometry).sign
    sp = 1.0 + s * R * R
    sm = 1.0 - s * R * R
    p = -s * 4.0 * R * R / sp ** 2
    c = 2.0 * sm / sp - a
    return s, sp, sm, p, c


def coupling(geometry: Geometry, a: float, R: float) -> float:
    """Off-diagonal factor ``2(1 -/+ R^2)/(1 +/- R^2) - a``."""
    return _terms(geometry, a, R)[4]


@dataclass(frozen=True)
class ModeBlock:
    n: int
    entries: np.ndarray

    @property
    def det(self) -> float:
        e = self.entries
        return float(e[0, 0] * e[1, 1] - e[0, 1] * e[1, 0])

    @property
    def relative_det(self) -> float:
        e = self.entries
        scale = abs(e[0, 0] * e[1, 1]) + abs(e[0, 1] * e[1, 0])
        return abs(self.det) / scale if scale else abs(self.det)

    def apply(self, b: float, c: float) -> tuple[float, float]:
        out = self.entries @ np.array([b, c])
        return float(out[0]), float(out[1])


def linear_block(n: int, geometry: Geometry, a: float, R: float) -> ModeBlock:
    if n < 1:
        raise DomainError(f"mode must be >= 1, got {n}")
    _, _, _, p, c = _terms(geometry, a, R)
    e = np.array([[p + n * n, c * n], [c * n, float(n * n)]])
    return ModeBlock(n, e)


def _det(n, geometry, a, R):
    _, _, _, p, c = _terms(geometry, a, R)
    return n * n * (p + n * n - c * c)


def _ddet(n, geometry, a, R):
    s, sp, sm, _, c = _terms(geometry, a, R)
    dp = -s * 8.0 * R * sm / sp ** 3
    dc = -s * 8.0 * R / sp ** 2
    return n * n * (dp - 2.0 * c * dc)


@dataclass(frozen=True)
class EigenRadius:
    geometry: Geometry
    branch: str
    n: int
    a: float
    R: float
    admissible: bool
    R2: float = math.nan

    def block(self) -> ModeBlock:
        return linear_block(self.n, self.geometry, self.a, self.R)


def _is_degenerate(n: int, a: float) -> bool:
    # n^2 = 4 + 4a + a^2, compared exactly on the binary value of a
    fa = Fraction(a)
    return Fraction(n * n) == (fa + 2) ** 2


def radius_squared(n: int, geometry: Geometry, a: float, branch: str) -> float:
    """Closed-form ``R^2`` of the given sign branch.

    ``R^2 = [-/+ (n^2+2-a^2) +/- 2 sqrt(3n^2-3+a^2)] / (n^2-4-4a-a^2)``.
    On the degenerate mode ``n = a + 2`` the branch whose numerator also
    vanishes has the finite limit ``-/+ 2a/(2a+3)``; the other diverges.
    """
    s = Geometry.parse(geometry).sign
    if branch not in BRANCHES:
        raise ValueError(f"branch must be 'plus' or 'minus', got {branch!r}")
    c = 1 if branch == "plus" else -1
    if _is_degenerate(n, a):
        if c == s:
            return -s * 2.0 * a / (2.0 * a + 3.0)
        return math.inf
    root = math.sqrt(3.0 * n * n - 3.0 + a * a)
    return (-s * (n * n + 2.0 - a * a) + c * 2.0 * root) / (n * n - 4.0 - 4.0 * a - a * a)


def theorem_form_radius_squared(m: int, a: float) -> float:
    """Euclidean minus radius written with numerator and denominator negated."""
    return ((m * m + 2.0 - a * a) + 2.0 * math.sqrt(3.0 * m * m - 3.0 + a * a)) / (
        4.0 + 4.0 * a + a * a - m * m)


def _polish(n, geometry, a, R):
    d0 = _det(n, geometry, a, R)
    dd = _ddet(n, geometry, a, R)
    if dd == 0.0 or d0 == 0.0:
        return R
    R1 = R - d0 / dd
    if R1 > 0 and abs(_det(n, geometry, a, R1)) < abs(d0):
        return R1
    return R


def eigen_radii(n: int, geometry: Geometry, a: float) -> list[EigenRadius]:
    """Both sign branches at mode n, flagged admissible or not."""
    geometry = Geometry.parse(geometry)
    if n < 1:
        raise DomainError(f"mode must be >= 1, got {n}")
    out = []
    for branch in BRANCHES:
        r2 = radius_squared(n, geometry, a, branch)
        ok = math.isfinite(r2) and r2 > POSITIVITY_FLOOR
        R = math.sqrt(r2) if ok else math.nan
        if ok:
            R = _polish(n, geometry, a, R)
            if geometry is Geometry.HYPERBOLIC and R >= 1.0:
                ok = False
        out.append(EigenRadius(geometry, branch, n, a, R, ok, r2))
    return out


def eigenpair(n: int, geometry: Geometry, a: float, branch: str = "minus") -> EigenRadius:
    for e in eigen_radii(n, geometry, a):
        if e.branch == branch:
            return e
    raise ValueError(branch)


def _closed_form_positive(n: int, geometry: Geometry, a: float, branch: str) -> bool:
    """Sign analysis of the closed form: is ``R^2 > 0``?  Exact comparisons."""
    fa = Fraction(a)
    n2 = Fraction(n * n)
    if geometry is Geometry.EUCLIDEAN:
        if branch == "plus":
            return n == 1 and fa < 1
        if n2 >= fa * fa - 2:
            return n2 < (fa + 2) ** 2
        return (fa - 2) ** 2 < n2 < (fa + 2) ** 2
    if branch == "minus":
        return n > 2 - fa
    return n < fa - 2 or n > fa + 2


def admissible_modes(geometry: Geometry, a: float, branch: str, n_max: int) -> list[int]:
    """Modes ``1..n_max`` carrying an admissible eigenvalue on a branch.

    The closed-form positivity set is checked against :func:`eigen_radii`
    mode by mode; any disagreement raises :class:`AdmissibilityMismatch`.
    In the disc the additional requirement ``R < 1`` is applied afterwards.
    """
    geometry = Geometry.parse(geometry)
    if n_max < 1:
        raise DomainError("n_max must be >= 1")
    modes = []
    for n in range(1, n_max + 1):
        e = eigenpair(n, geometry, a, branch)
        swept = math.isfinite(e.R2) and e.R2 > POSITIVITY_FLOOR
        closed = _closed_form_positive(n, geometry, a, branch)
        if swept != closed:
            raise AdmissibilityMismatch(
                f"{geometry.value} {branch} a={a} n={n}: closed form says "
                f"{'positive' if closed else 'non-positive'}, R^2 = {e.R2!r}")
        if e.admissible:
            modes.append(n)
    return modes


def kernel_beta(N: int, geometry: Geometry, a: float, R: float) -> float:
    """Ratio ``a_N / a_{-N}`` of the kernel direction."""
    c = coupling(geometry, a, R)
    den = N + c
    if abs(den) < 1e-14 * max(1.0, N):
        raise DegenerateKernelError(f"kernel ratio degenerates at N={N}, R={R}")
    return (N - c) / den


def kernel_vector(N: int, geometry: Geometry, a: float, R: float, M: int | None = None,
                  m: int = 1) -> tuple[float, FourierProfile]:
    """Kernel direction ``beta w^N + conj(w)^N`` of the block at mode N."""
    M = max(N, 64) if M is None else M
    beta = kernel_beta(N, geometry, a, R)
    return beta, FourierProfile.from_modes({N: beta, -N: 1.0}, M, m)


def range_defect(d: FourierProfile, N: int, geometry: Geometry, a: float, R: float) -> float:
    """Compatibility residual of ``d`` at mode N; zero iff ``d`` lies in the range.

    Returns ``d_N + d_{-N} (N + c)/(N - c)``.  The block is symmetric, so the
    range is orthogonal to the kernel ``(b, c) = (N, -c)``, which gives
    ``(N - c) d_N + (N + c) d_{-N} = 0``.
    """
    c = coupling(geometry, a, R)
    den = N - c
    if abs(den) < 1e-14 * max(1.0, N):
        raise DegenerateKernelError(f"range condition degenerates at N={N}, R={R}")
    return d.coeff(N) + d.coeff(-N) * (N + c) / den


@dataclass(frozen=True)
class Transversality:
    lhs: float
    rhs: float
    margin: float
    satisfied: bool
    inconclusive: bool


def transversality_ok(N: int, geometry: Geometry, a: float, R: float) -> Transversality:
    """Closed-form transversality inequality ``beta^2 != rhs``.

    ``lhs = (((N+a)(1 +/- R^2) - 2(1 -/+ R^2)) / ((N-a)(1 +/- R^2) + 2(1 -/+ R^2)))^2``
    ``rhs = (1 -/+ R^3 - 2N(1 +/- R^2)) / (1 -/+ R^3 + 2N(1 +/- R^2))``.
    A margin below 1e-10 is reported as inconclusive and not satisfied.
    """
    s, sp, sm, _, _ = _terms(geometry, a, R)
    lhs = (((N + a) * sp - 2.0 * sm) / ((N - a) * sp + 2.0 * sm)) ** 2
    cube = 1.0 - s * R ** 3
    rhs = (cube - 2.0 * N * sp) / (cube + 2.0 * N * sp)
    margin = abs(lhs - rhs)
    inconclusive = margin < TRANSVERSALITY_FLOOR
    return Transversality(lhs, rhs, margin, not inconclusive, inconclusive)


def dR_linearized_on_kernel(N: int, geometry: Geometry, a: float, R: float,
                            M: int | None = None, m: int = 1) -> FourierProfile:
    """R-derivative of the linearization applied to the kernel vector.

    The block derivative is ``[[p', c' N], [c' N, 0]]`` with
    ``p' = -/+ 8R(1 -/+ R^2)/(1 +/- R^2)^3`` and ``c' = -/+ 8R/(1 +/- R^2)^2``,
    applied to ``(b, c) = (1 + beta, beta - 1)``.
    """
    s, sp, sm, _, _ = _terms(geometry, a, R)
    beta, _ = kernel_vector(N, geometry, a, R, M, m)
    dp = -s * 8.0 * R * sm / sp ** 3
    dc = -s * 8.0 * R / sp ** 2
    cos_part = dp * (1.0 + beta) + dc * N * (beta - 1.0)
    sin_part = dc * N * (1.0 + beta)
    M = max(N, 64) if M is None else M
    return FourierProfile.from_modes(
        {N: 0.5 * (cos_part + sin_part), -N: 0.5 * (cos_part - sin_part)}, M, m)


def transversality_operator(N: int, geometry: Geometry, a: float, R: float) -> tuple[bool, float]:
    """Operator-level test: is the mixed derivative on the kernel outside the range?

    Returns ``(satisfied, defect)``.
    """
    g = dR_linearized_on_kernel(N, geometry, a, R)
    defect = range_defect(g, N, geometry, a, R)
    return abs(defect) > TRANSVERSALITY_FLOOR * max(1.0, g.norm()), defect


def transversality_exact(N: int, geometry: Geometry, a: float, R: float) -> tuple[bool, float]:
    """Closed form of the operator-level test.

    Multiplying out the range condition for the mixed derivative gives
    ``(1 + beta)[(1 -/+ R^2)(1 + beta) + 2N(1 +/- R^2)(beta - 1)] != 0``.
    Returns ``(satisfied, value)`` with ``value`` the bracketed product.
    """
    _, sp, sm, _, _ = _terms(geometry, a, R)
    beta = kernel_beta(N, geometry, a, R)
    value = (1.0 + beta) * (sm * (1.0 + beta) + 2.0 * N * sp * (beta - 1.0))
    return abs(value) > TRANSVERSALITY_FLOOR, value


def is_simple(pair: EigenRadius, M: int, m: int = 1) -> bool:
    """No other mode in ``m Z`` up to M has a singular block at the same radius."""
    for n in range(m, M + 1, m):
        if n == pair.n:
            continue
        if linear_block(n, pair.geometry, pair.a, pair.R).relative_det < 1e-8:
            return False
    return True


def limit_radius(theta: float) -> float:
    """Large-m limit of the Euclidean minus radius along ``m = a + theta``."""
    if theta < 0:
        raise DomainError(f"theta must be >= 0, got {theta}")
    if theta >= 2:
        raise DivergenceError(f"limit radius diverges for theta >= 2 (got {theta})")
    return math.sqrt(1.0 + 2.0 * theta / (2.0 - theta))
