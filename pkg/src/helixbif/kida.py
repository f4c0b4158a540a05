"""Comparison with Kida's steady filaments.

Kida's family moves by rotation ``Omega``, vertical translation ``V`` and
slip ``a``.  In cylindrical form ``r(s)^2 = A - (2/Omega) T3`` and the
horizontal tangent must satisfy

    |T_h|^2 = rho [V/2 + c/(Omega rho)]^2 - g(rho)/(4 rho),
    rho = A - (2/Omega) T3,   c = a - A V Omega / 2,

with Kida's cubic ``g``.  A profile whose ``|z0|`` is not constant gives a
non-constant ``rho``, so the relation can only hold along the whole curve
if the cubic in ``rho`` obtained from it vanishes identically.

The cubic's variable is called ``rho`` here to keep it apart from the
kernel ratio ``beta`` of the spectral module.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import least_squares

from .errors import DomainError, SingularityError
from .operator import Geometry

POLE_FLOOR = 1e-12


@dataclass(frozen=True)
class KidaParams:
    A: float
    V: float
    Omega: float
    a: float

    def __post_init__(self):
        if self.Omega == 0.0:
            raise DomainError("Kida relations divide by Omega; Omega must be nonzero")


def kida_cubic_g(A: float, V: float, a: float) -> tuple[float, float, float, float]:
    """Coefficients of ``g(R) = R^3 + (V^2-2A) R^2 + (A^2-4-2AV^2+4Va) R + (2a-AV)^2``."""
    return (1.0, V * V - 2.0 * A, A * A - 4.0 - 2.0 * A * V * V + 4.0 * V * a, (2.0 * a - A * V) ** 2)


def beta_cubic(A: float, V: float, Omega: float, a: float) -> tuple[float, float, float, float]:
    """Cubic in ``rho`` whose roots are the values where the relation holds.

    Obtained by substituting ``|T_h|^2 = 1 - T3^2`` and
    ``T3 = Omega (A - rho) / 2`` into the compatibility relation and
    multiplying by ``rho``.  Returned highest degree first.  Each
    coefficient carries a factor ``Omega - 1``: at unit rotation rate the
    relation reduces to ``|T| = 1`` and the cubic is identically zero.
    """
    if Omega == 0.0:
        raise DomainError("Omega must be nonzero")
    W = Omega
    c = a - 0.5 * A * V * W
    return (
        0.25 * (W * W - 1.0),
        0.5 * A * (1.0 - W * W),
        V * c / W - 0.25 * (A * A - 4.0 - 2.0 * A * V * V + 4.0 * V * a) - 1.0 + 0.25 * W * W * A * A,
        c * c / (W * W) - 0.25 * (2.0 * a - A * V) ** 2,
    )


def is_zero_polynomial(coeffs, atol: float = 1e-12) -> bool:
    return bool(np.max(np.abs(coeffs)) <= atol)


def modulus_variation(z0) -> float:
    """``max |z0| - min |z0|`` over the samples."""
    r = np.abs(np.asarray(z0))
    return float(r.max() - r.min())


def compatibility_defect_nodes(T, params: KidaParams) -> np.ndarray:
    """Signed defect of the relation at every node of a tangent array."""
    T = np.asarray(T, dtype=float)
    A, V, W, a = params.A, params.V, params.Omega, params.a
    rho = A - (2.0 / W) * T[..., 2]
    if np.min(np.abs(rho)) < POLE_FLOOR:
        raise SingularityError("A - (2/Omega) T3 vanishes at a node")
    g = np.polyval(kida_cubic_g(A, V, a), rho)
    c = a - 0.5 * A * V * W
    rhs = rho * (0.5 * V + c / (W * rho)) ** 2 - 0.25 * g / rho
    return T[..., 0] ** 2 + T[..., 1] ** 2 - rhs


def kida_compatibility_defect(sample, params: KidaParams) -> float:
    """Max absolute defect over the nodes of a Euclidean curve sample."""
    geometry = getattr(sample, "geometry", Geometry.EUCLIDEAN)
    if Geometry.parse(geometry) is not Geometry.EUCLIDEAN:
        raise DomainError("the Kida relation is stated for the Euclidean case only")
    T = sample.T0 if hasattr(sample, "T0") else sample
    return float(np.max(np.abs(compatibility_defect_nodes(T, params))))


def fit_helix_parameters(sample, Omega: float, a: float, guess=(1.0, 0.0),
                         free_slip: bool = False) -> tuple[KidaParams, float]:
    """Least-squares fit of ``(A, V)`` at fixed ``(Omega, a)``.

    A helix is invariant under a screw motion, so its slip is not unique.
    With ``a = 0`` and ``T3 != 0`` no ``(A, V)`` fits; ``free_slip=True``
    also fits ``a``, starting from the given value.
    """
    T = sample.T0 if hasattr(sample, "T0") else np.asarray(sample)
    x0 = list(guess) + ([a if a else 0.5] if free_slip else [])

    def unpack(x):
        return KidaParams(float(x[0]), float(x[1]), Omega, float(x[2]) if free_slip else a)

    def residual(x):
        return compatibility_defect_nodes(T, unpack(x))

    sol = least_squares(residual, np.asarray(x0, dtype=float), xtol=1e-15, ftol=1e-15, gtol=1e-15)
    params = unpack(sol.x)
    return params, kida_compatibility_defect(T, params)


@dataclass
class SeparationMargin:
    margin: float
    A: float
    V: float
    dA: float
    dV: float
    poles_skipped: int


def separation_margin(sample, Omega: float, a: float, center: tuple[float, float],
                      half_width: tuple[float, float] = (1.0, 1.0), n: int = 201) -> SeparationMargin:
    """Minimum over an ``n x n`` (A, V) grid of the compatibility defect."""
    T = sample.T0 if hasattr(sample, "T0") else np.asarray(sample)
    As = center[0] + half_width[0] * np.linspace(-1.0, 1.0, n)
    Vs = center[1] + half_width[1] * np.linspace(-1.0, 1.0, n)
    best = (np.inf, np.nan, np.nan)
    skipped = 0
    for A in As:
        for V in Vs:
            try:
                d = kida_compatibility_defect(T, KidaParams(A, V, Omega, a))
            except SingularityError:
                skipped += 1
                continue
            if d < best[0]:
                best = (d, A, V)
    step = (2.0 * half_width[0] / (n - 1), 2.0 * half_width[1] / (n - 1))
    return SeparationMargin(float(best[0]), float(best[1]), float(best[2]), step[0], step[1], skipped)
