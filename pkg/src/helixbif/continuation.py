"""Amplitude-parametrized Newton continuation of bifurcating branches.

Near an eigenpair ``(N, R*)`` with kernel direction ``h*`` the nontrivial
solutions are ``f = eta h* + O(eta^2)``.  Each branch point solves the
square bordered system

    G(R, lambda, f)_n = 0            for n in mZ, |n| <= M
    <f, h*> - eta <h*, h*> = 0

in the unknowns ``(lambda, R, f_n)``, n in mZ, 0 < |n| <= M.  The
Jacobian is assembled by forward differences.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from . import fourier, spectral
from .errors import AccuracyError, DivergenceError, DomainError
from .fourier import FourierProfile
from .operator import G_on_grid, ProblemParams, eval_G

log = logging.getLogger(__name__)

DEFAULT_TOL = 1e-11
DEFAULT_MAX_ITERS = 25
SLOW_ITERS = 8
COND_WARN = 1e12


@dataclass
class BranchPoint:
    eta: float
    params: ProblemParams
    f: FourierProfile
    residual_inf: float
    newton_iters: int
    kernel_angle: float
    condition: float = math.nan
    warnings: list = field(default_factory=list)

    @property
    def R(self) -> float:
        return self.params.R

    @property
    def lam(self) -> float:
        return self.params.lam


@dataclass
class Branch:
    eigenpair: spectral.EigenRadius
    points: list
    direction: int = 1
    m: int = 1
    M: int = fourier.DEFAULT_M

    @property
    def etas(self) -> np.ndarray:
        return np.array([p.eta for p in self.points])

    @property
    def radii(self) -> np.ndarray:
        return np.array([p.R for p in self.points])

    @property
    def lambdas(self) -> np.ndarray:
        return np.array([p.lam for p in self.points])


class _System:
    """Coordinates and residual of the bordered system for one eigenpair."""

    def __init__(self, pair: spectral.EigenRadius, m: int, M: int):
        self.pair = pair
        self.m = m
        self.M = M
        _, self.hstar = spectral.kernel_vector(pair.n, pair.geometry, pair.a, pair.R, M, m)
        modes = np.arange(-M, M + 1)
        self.eq_modes = modes[modes % m == 0]
        self.f_modes = self.eq_modes[self.eq_modes != 0]
        self.hh = self.hstar.dot(self.hstar)

    def pack(self, params: ProblemParams, f: FourierProfile) -> np.ndarray:
        return np.concatenate(([params.lam, params.R], f.coeffs[self.f_modes + self.M]))

    def unpack(self, x: np.ndarray) -> tuple[ProblemParams, FourierProfile]:
        c = np.zeros(2 * self.M + 1)
        c[self.f_modes + self.M] = x[2:]
        params = ProblemParams(self.pair.geometry, self.pair.a, float(x[1]), float(x[0]),
                               self.m, self.M)
        return params, FourierProfile(c, self.m)

    def residual(self, x: np.ndarray, eta: float) -> np.ndarray:
        params, f = self.unpack(x)
        g = eval_G(params, f)
        border = f.dot(self.hstar) - eta * self.hh
        return np.concatenate((g.coeffs[self.eq_modes + self.M], [border]))

    def jacobian(self, x: np.ndarray, eta: float, r0: np.ndarray) -> np.ndarray:
        J = np.empty((r0.size, x.size))
        for k in range(x.size):
            step = 1e-7 * (1.0 + abs(x[k]))
            xk = x.copy()
            xk[k] += step
            J[:, k] = (self.residual(xk, eta) - r0) / step
        return J


def _grid_residual(params: ProblemParams, f: FourierProfile, J: int | None = None) -> float:
    return float(np.max(np.abs(G_on_grid(params, f, J))))


def _check_transversal(pair: spectral.EigenRadius) -> None:
    if not pair.admissible:
        raise DomainError(f"eigenpair n={pair.n} ({pair.branch}) is not admissible")
    t = spectral.transversality_ok(pair.n, pair.geometry, pair.a, pair.R)
    if not t.satisfied:
        raise DomainError(
            f"transversality inconclusive at n={pair.n}, R={pair.R} (margin {t.margin:.2e})")


def initial_guess(pair: spectral.EigenRadius, eta: float, m: int | None = None,
                  M: int = fourier.DEFAULT_M) -> tuple[ProblemParams, FourierProfile]:
    """First-order guess ``f = eta h*``, ``R = R*``, ``lambda = 0``."""
    _check_transversal(pair)
    m = pair.n if m is None else m
    _, h = spectral.kernel_vector(pair.n, pair.geometry, pair.a, pair.R, M, m)
    return ProblemParams(pair.geometry, pair.a, pair.R, 0.0, m, M), eta * h


def kernel_angle(f: FourierProfile, hstar: FourierProfile) -> float:
    nf = f.norm()
    if nf == 0.0:
        return 0.0
    cosang = f.dot(hstar) / (nf * hstar.norm())
    return float(math.acos(min(1.0, max(-1.0, cosang))))


def newton_correct(guess: tuple[ProblemParams, FourierProfile], pair: spectral.EigenRadius,
                   eta: float, tol: float = DEFAULT_TOL,
                   max_iters: int = DEFAULT_MAX_ITERS) -> BranchPoint:
    """Converge one branch point at amplitude ``eta`` from ``guess``.

    Raises
    ------
    DivergenceError
        No convergence within ``max_iters``; the last residual is attached.
    """
    if eta == 0.0:
        raise DomainError("eta = 0 is the trivial line; pick a nonzero amplitude")
    params, f = guess
    system = _System(pair, params.m, params.M)
    x = system.pack(params, f)
    cond = math.nan
    res = math.inf
    for it in range(max_iters + 1):
        try:
            params, f = system.unpack(x)
            r = system.residual(x, eta)
            res = max(_grid_residual(params, f), abs(r[-1]))
        except DomainError as exc:
            raise DivergenceError(f"Newton left the admissible set: {exc}", res) from exc
        if not np.isfinite(res):
            break
        log.debug("eta=%g iter=%d residual=%.3e", eta, it, res)
        if res <= tol:
            point = BranchPoint(eta, params, f, res, it, kernel_angle(f, system.hstar), cond)
            if cond > COND_WARN:
                point.warnings.append(f"Jacobian condition number {cond:.2e}")
            return point
        if np.max(np.abs(r)) < 0.1 * tol:
            # Galerkin system solved; what remains lives beyond the truncation
            raise AccuracyError(
                f"truncated system solved but pointwise residual is {res:.3e} at eta={eta}; "
                f"increase M (currently {params.M})", res)
        if it == max_iters:
            break
        jac = system.jacobian(x, eta, r)
        cond = float(np.linalg.cond(jac))
        try:
            x = x - np.linalg.solve(jac, r)
        except np.linalg.LinAlgError as exc:
            raise DivergenceError(f"singular Jacobian at eta={eta}", res) from exc
    raise DivergenceError(
        f"Newton did not converge at eta={eta} within {max_iters} iterations "
        f"(last residual {res:.3e})", res)


def trace_branch(pair: spectral.EigenRadius, eta_max: float, steps: int,
                 tol: float = DEFAULT_TOL, m: int | None = None, M: int = fourier.DEFAULT_M,
                 direction: int = 1, max_iters: int = DEFAULT_MAX_ITERS) -> Branch:
    """March ``eta`` over ``steps`` uniform increments up to ``eta_max``.

    Each solve is warm-started by linear extrapolation of the previous two
    points.  A solve that fails or needs more than 8 iterations is retried
    once through the midpoint amplitude.  A failure after that raises
    :class:`DivergenceError` whose ``branch`` attribute holds the converged
    prefix.
    """
    if steps < 1:
        raise DomainError("steps must be >= 1")
    if direction not in (1, -1):
        raise DomainError("direction must be +1 or -1")
    m = pair.n if m is None else m
    branch = Branch(pair, [], direction, m, M)
    d_eta = direction * abs(eta_max) / steps
    system = _System(pair, m, M)
    history = []

    def predict(eta):
        if not history:
            return initial_guess(pair, eta, m, M)
        if len(history) == 1:
            e0, x0 = history[-1]
            return system.unpack(_scale_first(x0, e0, eta))
        (e0, x0), (e1, x1) = history[-2], history[-1]
        return system.unpack(x1 + (x1 - x0) * (eta - e1) / (e1 - e0))

    def solve(eta):
        point = newton_correct(predict(eta), pair, eta, tol, max_iters)
        history.append((eta, system.pack(point.params, point.f)))
        return point

    for k in range(1, steps + 1):
        eta = k * d_eta
        try:
            point = solve(eta)
            if point.newton_iters <= SLOW_ITERS:
                branch.points.append(point)
                continue
            history.pop()
        except DivergenceError:
            pass
        log.info("halving step before eta=%g", eta)
        try:
            solve(eta - 0.5 * d_eta)
            point = solve(eta)
        except DivergenceError as exc:
            exc.branch = branch
            raise
        branch.points.append(point)
    return branch


def _scale_first(x0, e0, eta):
    # one previous point: keep (lambda, R), scale f linearly with eta
    x = x0.copy()
    x[2:] *= eta / e0
    return x


def trace_both(pair: spectral.EigenRadius, eta_max: float, steps: int, **kw) -> tuple[Branch, Branch]:
    return (trace_branch(pair, eta_max, steps, direction=1, **kw),
            trace_branch(pair, eta_max, steps, direction=-1, **kw))


def extrapolate_to_zero(branch: Branch, degree: int = 4) -> tuple[float, float]:
    """Polynomial extrapolation of ``(lambda(eta), R(eta))`` to ``eta = 0``."""
    eta = branch.etas
    deg = min(degree, eta.size - 1)
    lam0 = np.polyval(np.polyfit(eta, branch.lambdas, deg), 0.0)
    R0 = np.polyval(np.polyfit(eta, branch.radii, deg), 0.0)
    return float(lam0), float(R0)


def independent_residual(point: BranchPoint) -> float:
    """Residual re-evaluated pointwise on a grid twice the solver's."""
    f2 = point.f.resized(2 * point.f.M)
    return _grid_residual(point.params, f2, 8 * point.f.M)


def tangency_defect(point: BranchPoint, hstar: FourierProfile) -> float:
    return (point.f - point.eta * hstar).norm()
