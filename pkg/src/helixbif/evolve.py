"""Pseudo-spectral time stepping of the stereographic Schrodinger map.

    z_t = i z_ss -/+ 2 i conj(z) z_s^2 / (1 +/- |z|^2)

The state is a full complex Fourier series truncated to ``|n| <= K``; the
nonlinearity is formed on a 4K-point grid.  Integration is classical RK4.
A rotating-slipping profile should come back as
``exp(i Omega t) z0(s - a t)``; :func:`steadiness_error` measures how far
it strays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import fourier
from .errors import AccuracyError, BlowUpError, DomainError, SingularityError
from .fourier import GridValues
from .operator import DENOMINATOR_FLOOR, Geometry

RESOLUTION_GUARD = 1e-8
MAX_HALVINGS = 4


@dataclass
class EvolutionState:
    z: GridValues
    t: float
    M: int
    dt: float


def _wavenumbers(J: int) -> np.ndarray:
    k = np.fft.fftfreq(J, d=1.0 / J)
    if J % 2 == 0:
        k[J // 2] = 0.0
    return k


def rhs(z, geometry, M: int | None = None) -> GridValues:
    """Right-hand side on the grid of ``z``.

    With ``M`` given the result is projected onto modes ``|n| <= M``.
    """
    values = z.values if isinstance(z, GridValues) else np.asarray(z, dtype=complex)
    s = Geometry.parse(geometry).sign
    J = values.size
    k = _wavenumbers(J)
    c = np.fft.fft(values)
    zs = np.fft.ifft(1j * k * c)
    zss = np.fft.ifft(-k * k * c)
    den = 1.0 + s * np.abs(values) ** 2
    if np.min(den) < DENOMINATOR_FLOOR:
        raise SingularityError(f"denominator reaches {np.min(den):.3e}")
    out = 1j * zss - s * 2j * np.conj(values) * zs ** 2 / den
    if M is not None:
        out = _project(out, M)
    return GridValues(out)


def _project(values: np.ndarray, M: int) -> np.ndarray:
    J = values.size
    c = np.fft.fft(values)
    c[np.abs(np.fft.fftfreq(J, d=1.0 / J)) > M] = 0.0
    return np.fft.ifft(c)


def z0_coefficients(solution) -> np.ndarray:
    """Dense complex coefficients (modes ``-M-1..M+1``) of ``z0(s) = e^{is}(R + f)``."""
    params, f = solution if isinstance(solution, tuple) else (solution.params, solution.f)
    M = f.M
    out = np.zeros(2 * (M + 1) + 1, dtype=complex)
    # mode n of f moves to n + 1; the constant R lands on mode 1
    out[2:2 * M + 3] = f.coeffs
    out[M + 2] += params.R
    return out


def _guard(values: np.ndarray, geometry, K: int, t: float) -> None:
    if Geometry.parse(geometry).sign < 0 and np.max(np.abs(values)) >= 1.0:
        raise BlowUpError(f"profile left the unit disc at t={t:.6g}", time=t)
    c = fourier.analyze_complex(values, K)
    scale = np.max(np.abs(c))
    if max(abs(c[0]), abs(c[-1])) > RESOLUTION_GUARD * max(scale, 1e-300):
        raise BlowUpError(f"spectrum reached the truncation mode {K} at t={t:.6g}", time=t)


def _rk4(values, dt, geometry, K):
    k1 = rhs(values, geometry, K).values
    k2 = rhs(values + 0.5 * dt * k1, geometry, K).values
    k3 = rhs(values + 0.5 * dt * k2, geometry, K).values
    k4 = rhs(values + dt * k3, geometry, K).values
    return values + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def evolve(z0, geometry, t_final: float, dt: float, K: int | None = None,
           checkpoints: int = 10):
    """Yield ``EvolutionState`` at ``checkpoints`` equally spaced times.

    ``z0`` is a dense complex coefficient array for modes ``-L..L``.
    """
    if t_final <= 0.0 or dt <= 0.0:
        raise DomainError("t_final and dt must be positive")
    c0 = np.asarray(z0, dtype=complex)
    L = (c0.size - 1) // 2
    K = L if K is None else K
    if K < L:
        raise DomainError(f"truncation {K} below profile modes {L}")
    J = 4 * K
    dense = np.zeros(2 * K + 1, dtype=complex)
    dense[K - L:K + L + 1] = c0
    values = fourier.synthesize_complex(dense, J)
    steps = max(1, int(round(t_final / dt)))
    checkpoints = min(checkpoints, steps)
    marks = set(np.linspace(0, steps, checkpoints + 1).round().astype(int)[1:])
    h = t_final / steps
    t = 0.0
    _guard(values, geometry, K, t)
    for n in range(1, steps + 1):
        new = _advance(values, h, geometry, K, t)
        values = new
        t = n * h
        if n in marks:
            _guard(values, geometry, K, t)
            yield EvolutionState(GridValues(values), t, K, h)


def _advance(values, h, geometry, K, t):
    """One step of size h, split into halves if the step goes non-finite."""
    for level in range(MAX_HALVINGS + 1):
        pieces = 2 ** level
        trial = values
        try:
            for _ in range(pieces):
                trial = _rk4(trial, h / pieces, geometry, K)
        except SingularityError:
            trial = None
        if trial is not None and np.all(np.isfinite(trial)):
            return trial
    raise AccuracyError(f"step halving exhausted at t={t:.6g}")


def exact_rotating(z0: np.ndarray, omega: float, a: float, t: float) -> np.ndarray:
    """Coefficients of ``exp(i Omega t) z0(s - a t)``."""
    L = (z0.size - 1) // 2
    n = np.arange(-L, L + 1)
    return np.exp(1j * omega * t) * np.exp(-1j * n * a * t) * z0


def steadiness_error(z0, omega: float, a: float, t_final: float, dt: float, geometry,
                     K: int | None = None, checkpoints: int = 10) -> float:
    """Largest relative l2 distance to pure rotation plus slip over the checkpoints."""
    c0 = z0_coefficients(z0) if not isinstance(z0, np.ndarray) else z0
    L = (c0.size - 1) // 2
    worst = 0.0
    for state in evolve(c0, geometry, t_final, dt, K, checkpoints):
        c = fourier.analyze_complex(state.z.values, state.M)
        ref = np.zeros_like(c)
        ref[state.M - L:state.M + L + 1] = exact_rotating(c0, omega, a, state.t)
        worst = max(worst, float(np.linalg.norm(c - ref) / np.linalg.norm(ref)))
    return worst
