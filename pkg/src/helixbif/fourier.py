"""Real-coefficient truncated Laurent series on the unit circle.

A profile ``f(w) = sum_{n=-M}^{M} f_n w^n`` with every ``f_n`` real, which is
the same as ``f(conj(w)) = conj(f(w))``.  Coefficients are stored densely,
``coeffs[n + M] = f_n``.  Grid transforms use equispaced nodes
``theta_j = 2*pi*j/J`` and numpy's FFT.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AliasingError, SymmetryError

DEFAULT_M = 64
SYMMETRY_RTOL = 1e-10


@dataclass(frozen=True, eq=False)
class FourierProfile:
    """Truncated real Laurent series with an optional m-fold restriction.

    Parameters
    ----------
    coeffs : array_like, shape (2M+1,)
        Real coefficients ordered from mode ``-M`` to ``M``.
    mfold : int
        Declared fold.  Modes not divisible by ``mfold`` are expected to be
        zero; :func:`project_mfold` enforces it.
    """

    coeffs: np.ndarray
    mfold: int = 1

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float)
        if c.ndim != 1 or c.size % 2 == 0:
            raise ValueError("coefficient array must have odd length 2M+1")
        if self.mfold < 1:
            raise ValueError(f"mfold must be >= 1, got {self.mfold}")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def zeros(cls, M: int, mfold: int = 1) -> "FourierProfile":
        return cls(np.zeros(2 * M + 1), mfold)

    @classmethod
    def from_modes(cls, modes: dict, M: int, mfold: int = 1) -> "FourierProfile":
        c = np.zeros(2 * M + 1)
        for n, v in modes.items():
            if abs(n) > M:
                raise ValueError(f"mode {n} outside truncation {M}")
            c[n + M] = v
        return cls(c, mfold)

    @property
    def M(self) -> int:
        return (self.coeffs.size - 1) // 2

    @property
    def modes(self) -> np.ndarray:
        return np.arange(-self.M, self.M + 1)

    def coeff(self, n: int) -> float:
        if abs(n) > self.M:
            return 0.0
        return float(self.coeffs[n + self.M])

    def as_dict(self) -> dict:
        return {int(n): float(v) for n, v in zip(self.modes, self.coeffs) if v != 0.0}

    def resized(self, M: int) -> "FourierProfile":
        """Zero-pad or truncate to a new truncation order."""
        out = np.zeros(2 * M + 1)
        k = min(M, self.M)
        out[M - k:M + k + 1] = self.coeffs[self.M - k:self.M + k + 1]
        return FourierProfile(out, self.mfold)

    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    def dot(self, other: "FourierProfile") -> float:
        return float(np.dot(self.coeffs, _match(self, other).coeffs))

    def __call__(self, theta):
        """Evaluate at ``w = exp(i*theta)`` for arbitrary (array) theta."""
        theta = np.asarray(theta, dtype=float)
        return np.exp(1j * np.multiply.outer(theta, self.modes)) @ self.coeffs

    def __add__(self, other):
        other = _match(self, other)
        return FourierProfile(self.coeffs + other.coeffs, math.gcd(self.mfold, other.mfold))

    def __sub__(self, other):
        other = _match(self, other)
        return FourierProfile(self.coeffs - other.coeffs, math.gcd(self.mfold, other.mfold))

    def __mul__(self, scalar):
        return FourierProfile(float(scalar) * self.coeffs, self.mfold)

    __rmul__ = __mul__

    def __neg__(self):
        return FourierProfile(-self.coeffs, self.mfold)


def _match(p, q):
    if not isinstance(q, FourierProfile):
        return NotImplemented
    if q.M != p.M:
        raise ValueError(f"truncation mismatch: {p.M} vs {q.M}")
    return q


@dataclass(frozen=True, eq=False)
class GridValues:
    """Complex samples on the equispaced grid ``theta_j = 2*pi*j/J``."""

    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=complex))

    @property
    def gridsize(self) -> int:
        return self.values.size

    @property
    def theta(self) -> np.ndarray:
        return grid(self.gridsize)


def grid(J: int) -> np.ndarray:
    return 2.0 * np.pi * np.arange(J) / J


def synthesize(p: FourierProfile, J: int | None = None) -> GridValues:
    """Sample ``sum_n f_n exp(i n theta_j)`` on a J-point grid (default 4M)."""
    J = 4 * p.M if J is None else J
    return GridValues(synthesize_complex(p.coeffs, J))


def synthesize_complex(coeffs: np.ndarray, J: int) -> np.ndarray:
    """Grid values of a (possibly complex) dense coefficient array."""
    M = (len(coeffs) - 1) // 2
    if J < 2 * M + 1:
        raise AliasingError(f"grid of {J} points cannot carry modes up to {M}")
    full = np.zeros(J, dtype=complex)
    full[np.arange(-M, M + 1) % J] = coeffs
    return J * np.fft.ifft(full)


def analyze_complex(values: np.ndarray, M: int) -> np.ndarray:
    """Dense complex coefficients ``-M..M`` of grid samples."""
    values = np.asarray(values)
    J = values.size
    if J < 2 * M + 1:
        raise AliasingError(f"grid of {J} points cannot resolve modes up to {M}")
    full = np.fft.fft(values) / J
    return full[np.arange(-M, M + 1) % J]


def analyze(g: GridValues | np.ndarray, M: int, rtol: float = SYMMETRY_RTOL,
            atol: float = 0.0) -> FourierProfile:
    """Recover real coefficients ``-M..M`` from grid samples.

    Raises
    ------
    SymmetryError
        If an imaginary part exceeds ``max(rtol * max|f_n|, atol)``.
    """
    values = g.values if isinstance(g, GridValues) else g
    c = analyze_complex(values, M)
    scale = np.max(np.abs(c)) if c.size else 0.0
    worst = np.max(np.abs(c.imag)) if c.size else 0.0
    if worst > max(rtol * scale, atol):
        raise SymmetryError(
            f"imaginary coefficient content {worst:.3e} exceeds tolerance "
            f"(largest coefficient {scale:.3e})")
    return FourierProfile(c.real.copy())


def wderiv(p: FourierProfile, order: int = 1) -> FourierProfile:
    """Series of ``w f'(w)`` (order 1) or ``w^2 f''(w)`` (order 2)."""
    n = p.modes.astype(float)
    if order == 1:
        factor = n
    elif order == 2:
        factor = n * (n - 1.0)
    else:
        raise ValueError("order must be 1 or 2")
    return FourierProfile(factor * p.coeffs, p.mfold)


def conj_reflect(p: FourierProfile) -> FourierProfile:
    """Series of ``conj(f(w))`` on ``|w| = 1``: mode n moves to -n."""
    return FourierProfile(p.coeffs[::-1].copy(), p.mfold)


def project_mfold(p: FourierProfile, m: int) -> tuple[FourierProfile, float]:
    """Zero every mode not divisible by ``m``.

    Returns the projected profile and the discarded energy (sum of squares of
    removed coefficients).
    """
    if m < 1:
        raise ValueError(f"fold must be >= 1, got {m}")
    keep = p.modes % m == 0
    out = np.where(keep, p.coeffs, 0.0)
    discarded = float(np.sum(p.coeffs[~keep] ** 2))
    return FourierProfile(out, m * p.mfold // math.gcd(m, p.mfold)), discarded


def off_fold_max(p: FourierProfile, m: int) -> float:
    """Largest coefficient magnitude on modes outside ``m Z``."""
    off = p.modes % m != 0
    return float(np.max(np.abs(p.coeffs[off]))) if off.any() else 0.0
