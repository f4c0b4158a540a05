"""From a profile to the tangent field and the filament.

The stereographic variable ``z(t, s) = exp(i Omega t) z0(s - a t)`` with
``z0(s) = g(exp(i s))`` gives the tangent

    T = (2 Re z, 2 Im z, 1 -/+ |z|^2) / (1 +/- |z|^2)

on the unit sphere (Euclidean) or the upper sheet of the hyperboloid
``T1^2 + T2^2 - T3^2 = -1`` (hyperbolic).  The filament is

    X(t, s) = Rot(Omega t) int_0^s T0(u - a t) du
              + int_0^t Rot(Omega tau) (T0 ^ T0_s)(-a tau) dtau.

The s-integral is done spectrally.  The t-integral uses composite
Gauss-Legendre quadrature with panel doubling, or a closed form when
``a = 0``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import AccuracyError, DomainError, SingularityError
from .fourier import FourierProfile
from .operator import Geometry, ProblemParams

QUAD_RTOL = 1e-12
MAX_PANELS = 2 ** 14
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(8)


@dataclass
class CurveSample:
    """Filament and tangent at time ``t`` on a uniform arclength grid.

    ``z0`` and ``T0`` hold ``z(t, s)`` and ``T(t, s)``; at ``t = 0`` these
    are the initial profile and tangent.  ``X`` is the linear part
    ``drift * s`` plus a periodic remainder, which is what spectral
    differentiation in :func:`binormal_residual` relies on.
    """

    s: np.ndarray
    z0: np.ndarray
    T0: np.ndarray
    X: np.ndarray
    t: float
    geometry: Geometry
    drift: np.ndarray
    span: float


def _sign(geometry) -> int:
    return Geometry.parse(geometry).sign


def tangent_from_z(z, geometry) -> np.ndarray:
    """Tangent vectors, shape ``z.shape + (3,)``."""
    s = _sign(geometry)
    z = np.asarray(z, dtype=complex)
    r2 = np.abs(z) ** 2
    if s < 0 and np.any(r2 >= 1.0):
        raise DomainError("hyperbolic profile must stay inside the unit disc")
    den = 1.0 + s * r2
    return np.stack((2.0 * z.real / den, 2.0 * z.imag / den, (1.0 - s * r2) / den), axis=-1)


def stereo_project(T, geometry):
    """Inverse of :func:`tangent_from_z`: ``(T1 + i T2) / (1 + T3)``."""
    T = np.asarray(T, dtype=float)
    s = _sign(geometry)
    t3 = T[..., 2]
    if s > 0 and np.any(np.abs(1.0 + t3) < 1e-14):
        raise SingularityError("south pole has no stereographic image")
    if s < 0 and np.any(t3 <= 0.0):
        raise SingularityError("hyperbolic projection needs T3 > 0")
    return (T[..., 0] + 1j * T[..., 1]) / (1.0 + t3)


def rotate_frame(v, angle) -> np.ndarray:
    """Rotate the horizontal pair of ``v`` by ``angle``; keep the third slot."""
    v = np.asarray(v, dtype=float)
    h = (v[..., 0] + 1j * v[..., 1]) * np.exp(1j * np.asarray(angle))
    return np.stack((h.real, h.imag, np.broadcast_to(v[..., 2], h.shape)), axis=-1)


def wedge(u, v, geometry) -> np.ndarray:
    """Cross product; the hyperbolic version flips the third component."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    c = np.cross(u, v)
    c[..., 2] *= _sign(geometry)
    return c


def form(u, v, geometry) -> np.ndarray:
    """``u1 v1 + u2 v2 +/- u3 v3``."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    return u[..., 0] * v[..., 0] + u[..., 1] * v[..., 1] + _sign(geometry) * u[..., 2] * v[..., 2]


def profile_function(params: ProblemParams, f: FourierProfile) -> Callable:
    """``u -> z0(u) = exp(i u) (R + f(exp(i u)))``."""
    R = params.R

    def z0(u):
        u = np.asarray(u, dtype=float)
        return np.exp(1j * u) * (R + f(u))

    return z0


class _TangentSeries:
    """Fourier series of ``T0(u)`` with enough modes for double precision."""

    def __init__(self, z0: Callable, geometry, J0: int = 256):
        J = J0
        while True:
            u = 2.0 * np.pi * np.arange(J) / J
            T = tangent_from_z(z0(u), geometry)
            c = np.fft.rfft(T, axis=0) / J
            kmax = c.shape[0] - 1
            scale = np.max(np.abs(c))
            tail = np.max(np.abs(c[kmax // 2:]))
            if tail <= 1e-15 * max(scale, 1.0):
                break
            J *= 2
            if J > 2 ** 16:
                raise AccuracyError("tangent spectrum does not decay; profile too rough")
        self.k = np.arange(kmax // 2 + 1)
        self.c = c[:kmax // 2 + 1]
        self.c[1:] *= 2.0  # real series: T = Re sum_{k>=0} c_k e^{iku}
        self.mean = self.c[0].real

    def _eval(self, coeffs, u):
        u = np.atleast_1d(np.asarray(u, dtype=float))
        e = np.exp(1j * np.multiply.outer(u, self.k))
        return (e @ coeffs).real

    def value(self, u):
        return self._eval(self.c, u)

    def derivative(self, u):
        return self._eval(1j * self.k[:, None] * self.c, u)

    def periodic_antiderivative(self, u):
        """Antiderivative of ``T0 - mean``, up to a constant."""
        ck = np.zeros_like(self.c)
        ck[1:] = self.c[1:] / (1j * self.k[1:, None])
        return self._eval(ck, u)


def _gauss_integral(fun: Callable, t: float, rtol: float = QUAD_RTOL) -> np.ndarray:
    """Composite 8-point Gauss-Legendre on [0, t] with doubling."""
    if t == 0.0:
        return np.zeros(3)
    previous = None
    panels = 1
    while panels <= MAX_PANELS:
        edges = np.linspace(0.0, t, panels + 1)
        half = 0.5 * np.diff(edges)
        mid = 0.5 * (edges[1:] + edges[:-1])
        tau = (mid[:, None] + half[:, None] * _GL_NODES[None, :]).ravel()
        w = (half[:, None] * _GL_WEIGHTS[None, :]).ravel()
        total = w @ fun(tau)
        if previous is not None:
            change = np.max(np.abs(total - previous))
            if change <= rtol * max(np.max(np.abs(total)), abs(t) * 1e-3, 1e-300):
                return total
        previous = total
        panels *= 2
    raise AccuracyError(f"time quadrature did not settle with {MAX_PANELS} panels")


def _vertical_drift(series: _TangentSeries, omega: float, a: float, t: float,
                    geometry, method: str) -> np.ndarray:
    """``int_0^t Rot(Omega tau) (T0 ^ T0_s)(-a tau) dtau``."""

    def V(u):
        return wedge(series.value(u), series.derivative(u), geometry)

    use_closed = method == "closed" or (method == "auto" and a == 0.0)
    if use_closed and a == 0.0 and omega != 0.0:
        v = V(0.0)[0]
        h = (v[0] + 1j * v[1]) * np.expm1(1j * omega * t) / (1j * omega)
        return np.array([h.real, h.imag, v[2] * t])
    return _gauss_integral(lambda tau: rotate_frame(V(-a * tau), omega * tau), t)


def curve_from_z(z0: Callable, omega: float, a: float, geometry, t: float = 0.0,
                 J: int = 256, periods: int = 1, method: str = "auto") -> CurveSample:
    """Filament of ``z(t, s) = exp(i Omega t) z0(s - a t)``.

    Parameters
    ----------
    z0 : callable
        2*pi-periodic profile up to a rotation, evaluated at arbitrary ``u``.
    J : int
        Nodes per 2*pi of arclength.
    periods : int
        Number of 2*pi arclength windows to render.
    method : {"auto", "quadrature", "closed"}
        How the time integral is taken.  ``closed`` needs ``a = 0`` and
        falls back to quadrature when ``Omega = 0``.
    """
    if method not in ("auto", "quadrature", "closed"):
        raise DomainError(f"unknown method {method!r}")
    if periods < 1 or J < 8:
        raise DomainError("need periods >= 1 and at least 8 nodes")
    geometry = Geometry.parse(geometry)
    n = J * periods
    span = 2.0 * np.pi * periods
    s = span * np.arange(n) / n
    series = _TangentSeries(z0, geometry, max(J, 256))
    shift = -a * t
    P = series.periodic_antiderivative(s + shift) - series.periodic_antiderivative(shift)
    drift0 = series.mean
    body = rotate_frame(P, omega * t)
    drift = rotate_frame(drift0, omega * t)
    X = body + np.outer(s, drift) + _vertical_drift(series, omega, a, t, geometry, method)
    z = np.exp(1j * omega * t) * z0(s + shift)
    return CurveSample(s, z, tangent_from_z(z, geometry), X, float(t), geometry, drift, span)


def _solution(solution):
    if isinstance(solution, tuple):
        return solution
    return solution.params, solution.f


def curve_from_tangent(solution, t: float = 0.0, J: int = 256, periods: int = 1,
                       method: str = "auto") -> CurveSample:
    """Filament for a branch point or a ``(params, f)`` pair at time ``t``."""
    params, f = _solution(solution)
    return curve_from_z(profile_function(params, f), params.omega, params.a, params.geometry,
                        t, J, periods, method)


def spectral_derivatives(sample: CurveSample) -> tuple[np.ndarray, np.ndarray]:
    """``X_s`` and ``X_ss`` on the sample grid."""
    n = sample.s.size
    periodic = sample.X - np.outer(sample.s, sample.drift)
    k = np.fft.fftfreq(n, d=sample.span / n) * 2.0 * np.pi
    if n % 2 == 0:
        k[n // 2] = 0.0
    c = np.fft.fft(periodic, axis=0)
    Xs = np.fft.ifft(1j * k[:, None] * c, axis=0).real + sample.drift
    Xss = np.fft.ifft(-(k ** 2)[:, None] * c, axis=0).real
    return Xs, Xss


def binormal_residual(before: CurveSample, now: CurveSample, after: CurveSample) -> float:
    """Max norm of ``X_t - X_s ^ X_ss`` with a central difference in time."""
    delta = 0.5 * (after.t - before.t)
    if delta <= 0.0:
        raise DomainError("time slices must satisfy before.t < after.t")
    Xt = (after.X - before.X) / (2.0 * delta)
    Xs, Xss = spectral_derivatives(now)
    return float(np.max(np.abs(Xt - wedge(Xs, Xss, now.geometry))))


def default_delta(omega: float, a: float) -> float:
    return 1e-3 / max(abs(omega), abs(a), 1.0)


def binormal_check(solution, t: float = 0.0, delta: float | None = None, J: int = 256) -> float:
    """Residual of the filament equation at time ``t`` for a solution."""
    params, f = _solution(solution)
    delta = default_delta(params.omega, params.a) if delta is None else delta
    slices = [curve_from_tangent((params, f), tt, J) for tt in (t - delta, t, t + delta)]
    return binormal_residual(*slices)
