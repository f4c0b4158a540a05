"""The rotating-slipping functional and its linearization at the helix.

With ``g(w) = w (R + f(w))`` and ``Omega = Omega_R + lambda`` the profile
equation reads ``G(R, lambda, f)(w) = 0`` on the unit circle, where

    G = Omega (R + f) + (1 - a)(R + f) + (3 - a) w f' + w^2 f''
        -/+ 2 (R + conj f)(R + f + w f')^2 / (1 +/- |R + f|^2).

Upper signs are the Euclidean (sphere) case, lower signs the hyperbolic
(disc) case.  ``Geometry.sign`` is +1 / -1 and resolves every +/-.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace

import numpy as np

from . import fourier
from .errors import DomainError, SingularityError
from .fourier import FourierProfile

DENOMINATOR_FLOOR = 1e-8


class Geometry(enum.Enum):
    EUCLIDEAN = "euclidean"
    HYPERBOLIC = "hyperbolic"

    @property
    def sign(self) -> int:
        return 1 if self is Geometry.EUCLIDEAN else -1

    @classmethod
    def parse(cls, value) -> "Geometry":
        if isinstance(value, Geometry):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise DomainError(f"unknown geometry {value!r}") from None


def check_radius(geometry: Geometry, R: float) -> None:
    if not (R > 0.0 and np.isfinite(R)):
        raise DomainError(f"radius must be positive, got {R}")
    if geometry is Geometry.HYPERBOLIC and R >= 1.0:
        raise DomainError(f"hyperbolic radius must lie in (0, 1), got {R}")


def omega_trivial(geometry: Geometry, a: float, R: float) -> float:
    """Rotation rate of the helix ``g(w) = R w``: a + (-1 +/- R^2)/(1 +/- R^2)."""
    geometry = Geometry.parse(geometry)
    check_radius(geometry, R)
    s = geometry.sign
    return a + (-1.0 + s * R * R) / (1.0 + s * R * R)


@dataclass(frozen=True)
class ProblemParams:
    geometry: Geometry
    a: float
    R: float
    lam: float = 0.0
    m: int = 1
    M: int = fourier.DEFAULT_M

    def __post_init__(self):
        object.__setattr__(self, "geometry", Geometry.parse(self.geometry))
        check_radius(self.geometry, self.R)
        if self.m < 1:
            raise DomainError(f"fold m must be >= 1, got {self.m}")
        if self.M < self.m:
            raise DomainError(f"truncation M={self.M} below fold m={self.m}")

    @property
    def omega_R(self) -> float:
        return omega_trivial(self.geometry, self.a, self.R)

    @property
    def omega(self) -> float:
        return self.omega_R + self.lam

    def with_(self, **changes) -> "ProblemParams":
        return replace(self, **changes)


def G_on_grid(params: ProblemParams, f: FourierProfile, J: int | None = None) -> np.ndarray:
    """Pointwise values of G on a J-point grid (default 4M).

    No truncation is applied, so this doubles as an independent residual
    check of a Galerkin solution.
    """
    J = 4 * f.M if J is None else J
    s = params.geometry.sign
    R, a = params.R, params.a
    F = fourier.synthesize(f, J).values
    wF1 = fourier.synthesize(fourier.wderiv(f, 1), J).values
    wF2 = fourier.synthesize(fourier.wderiv(f, 2), J).values
    rho = R + F
    den = 1.0 + s * np.abs(rho) ** 2
    if np.min(den) < DENOMINATOR_FLOOR:
        raise SingularityError(
            f"denominator 1 +/- |R+f|^2 reaches {np.min(den):.3e}; profile leaves the disc")
    nonlinear = 2.0 * np.conj(rho) * (rho + wF1) ** 2 / den
    return (params.omega + 1.0 - a) * rho + (3.0 - a) * wF1 + wF2 - s * nonlinear


def eval_G(params: ProblemParams, f: FourierProfile, project: bool = True) -> FourierProfile:
    """Series of G(R, lambda, f), mode 0 included, truncated to ``f.M``.

    The nonlinearity is formed on the 4M grid and transformed back.  With
    ``project=True`` the result is projected onto ``params.m``-fold modes
    (the discarded part is roundoff for m-fold input).
    """
    if f.coeff(0) != 0.0:
        raise DomainError("perturbation must have zero mean mode")
    vals = G_on_grid(params, f)
    scale = params.R + np.max(np.abs(f.coeffs)) + abs(params.omega) + 1.0
    out = fourier.analyze(vals, f.M, atol=1e-10 * scale)
    if project:
        out, _ = fourier.project_mfold(out, params.m)
    return out


def dG_dlambda(params: ProblemParams, f: FourierProfile) -> FourierProfile:
    """Derivative in lambda: the series of ``R + f``."""
    return f + FourierProfile.from_modes({0: params.R}, f.M, f.mfold)


def linear_coefficients(geometry: Geometry, a: float, R: float) -> tuple[float, float]:
    """(p, q): ``L h = p Re[h] + q w h' + w^2 h''`` at the helix of radius R."""
    s = Geometry.parse(geometry).sign
    den = 1.0 + s * R * R
    p = -s * 4.0 * R * R / den ** 2
    q = (3.0 - s * R * R) / den - a
    return p, q


def apply_linearized(params: ProblemParams, h: FourierProfile) -> FourierProfile:
    """Derivative of G in f at ``f = 0``.

    A nonzero ``params.lam`` contributes the extra ``lam * h``; at lambda = 0
    this is the linearization about the helix.
    """
    p, q = linear_coefficients(params.geometry, params.a, params.R)
    re_h = 0.5 * (h + fourier.conj_reflect(h))
    out = p * re_h + q * fourier.wderiv(h, 1) + fourier.wderiv(h, 2)
    if params.lam:
        out = out + params.lam * h
    return out
