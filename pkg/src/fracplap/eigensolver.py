"""First eigenpair for general p, full spectrum and counting function for p=2.

For general p the first eigenvalue is the minimum of the Rayleigh quotient,
computed by projected gradient descent on the L^p sphere: take a step along
the constrained residual grad J - lambda * grad I, renormalize, and backtrack
until the energy decreases.  Descent eventually stalls at the floating-point
resolution of J; an optional fixed-step polish phase then contracts the
residual further.  The Rayleigh value converges quadratically in the
eigenvector error, so it is typically far more accurate than the residual.

For p = 2 the problem is the symmetric pencil K u = lambda * h^N u with
u^T K u equal to the quadratic energy, solved densely.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .energy import (
    DiscreteFunction,
    NonlocalEnergy,
    _gradient_values,
    _lp_values,
    _phi,
    _seminorm_values,
)
from .errors import InvalidParams, WindowTooSmall, WrongExponent

_STALL_RUN = 5         # consecutive stalled iterations required to stop
_POLISH_PATIENCE = 60  # polish iterations without residual progress before halving the step


@dataclass(frozen=True)
class SolverConfig:
    max_iters: int = 20000
    tol: float = 1e-8          # relative Rayleigh stall / residual tolerance
    step0: float = 0.0         # 0 = automatic (reciprocal of the initial Rayleigh value)
    backtrack: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if self.max_iters < 1:
            raise InvalidParams("max_iters must be at least 1")
        if not self.tol > 0:
            raise InvalidParams("tol must be positive")
        if not 0.0 < self.backtrack < 1.0:
            raise InvalidParams("backtrack factor must lie in (0, 1)")


@dataclass(frozen=True, eq=False)
class EigenResult:
    lambda1: float
    eigenfunction: DiscreteFunction
    converged: bool
    status: str                # "converged" | "float_limited" | "max_iters"
    iterations: int
    residual: float
    history: np.ndarray        # rows (iter, rayleigh, residual, step)


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Eigenvalues sorted ascending; eigenvectors normalized to unit mass."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray | None
    grid: object
    params: object


def default_initial(energy: NonlocalEnergy) -> np.ndarray:
    """Strictly positive bump: distance to the boundary raised to the power s."""
    grid = energy.grid
    d = grid.domain.boundary_distance(grid.nodes)
    u = np.maximum(d, 1e-12 * grid.h) ** grid.params.s
    return u / _lp_values(grid, u) ** (1.0 / grid.params.p)


def random_positive_init(energy: NonlocalEnergy, rng: np.random.Generator) -> np.ndarray:
    """Random strictly positive start for restart studies."""
    grid = energy.grid
    u = np.abs(rng.standard_normal(grid.num_nodes)) + 0.1
    return u / _lp_values(grid, u) ** (1.0 / grid.params.p)


def first_eigenpair(
    energy: NonlocalEnergy,
    cfg: SolverConfig = SolverConfig(),
    init: np.ndarray | None = None,
) -> EigenResult:
    """Minimize the Rayleigh quotient over the L^p sphere.

    Returns the best iterate with converged=False when the residual target
    tol * lambda1 cannot be met within max_iters (or sits below the
    floating-point resolution of the energy landscape).
    """
    grid = energy.grid
    p = grid.params.p
    if grid.num_nodes < 1:
        raise InvalidParams("grid has no nodes")

    u = default_initial(energy) if init is None else np.asarray(init, dtype=float)
    u = u / _lp_values(grid, u) ** (1.0 / p)
    lam = _seminorm_values(energy, u)
    alpha = cfg.step0 if cfg.step0 > 0 else 1.0 / lam
    alpha_cap = 100.0 / lam

    history = []
    stall = 0
    it = 0
    status = "max_iters"
    res = math.inf

    def residual_vec(v, lam_v):
        return _gradient_values(energy, v) - lam_v * p * grid.measure_weight * _phi(v, p)

    # descent phase: monotone in J, Armijo-style backtracking
    while it < cfg.max_iters:
        r = residual_vec(u, lam)
        res = float(np.abs(r).max())
        history.append((it, lam, res, alpha))
        if res <= cfg.tol * lam and stall >= _STALL_RUN:
            status = "converged"
            break
        step = alpha
        accepted = False
        while step > 1e-20 * alpha_cap:
            v = u - step * r
            mass = _lp_values(grid, v)
            if mass > 0.0:
                v = v / mass ** (1.0 / p)
                lam_v = _seminorm_values(energy, v)
                if lam_v < lam:
                    accepted = True
                    break
            step *= cfg.backtrack
        if not accepted:
            status = "float_limited"
            break
        stall = stall + 1 if abs(lam - lam_v) <= cfg.tol * lam else 0
        u, lam = v, lam_v
        alpha = min(step / cfg.backtrack, alpha_cap)
        it += 1

    # polish phase: fixed-step fixed-point iteration tracking the best residual
    if status != "converged" and it < cfg.max_iters:
        best_res, best_u, best_lam = res, u.copy(), lam
        cur = u.copy()
        step = min(alpha, 0.25 / lam)
        worse = 0
        while it < cfg.max_iters:
            it += 1
            lam_c = _seminorm_values(energy, cur)
            r = residual_vec(cur, lam_c)
            res_c = float(np.abs(r).max())
            history.append((it, lam_c, res_c, step))
            if res_c < best_res:
                best_res, best_u, best_lam = res_c, cur.copy(), lam_c
                worse = 0
            else:
                worse += 1
            if best_res <= cfg.tol * best_lam:
                status = "converged"
                break
            if worse > _POLISH_PATIENCE:
                step *= 0.5
                worse = 0
                cur = best_u.copy()
                if step < 1e-8 / best_lam:
                    break
                continue
            cur = cur - step * r
            cur = cur / _lp_values(grid, cur) ** (1.0 / p)
        u, lam, res = best_u, best_lam, best_res
        if status not in ("converged",):
            status = "float_limited" if it < cfg.max_iters else "max_iters"

    if u.sum() < 0:
        u = -u
    fn = DiscreteFunction(u, grid)
    return EigenResult(
        lambda1=lam,
        eigenfunction=fn,
        converged=(status == "converged"),
        status=status,
        iterations=it,
        residual=res,
        history=np.array(history, dtype=float),
    )


def stiffness_matrix(energy: NonlocalEnergy) -> np.ndarray:
    """Symmetric matrix with u^T K u exactly equal to the quadratic energy."""
    if energy.params.p != 2.0:
        raise WrongExponent(f"stiffness matrix needs p = 2, got p={energy.params.p}")
    w = energy.weights
    hN = energy.grid.measure_weight
    k = -2.0 * w
    k[np.diag_indices(len(k))] = 2.0 * w.sum(axis=1) + 2.0 * hN * energy.kappa.kappa
    return k


def _sign_normalize(vec: np.ndarray) -> np.ndarray:
    s = vec.sum()
    if s < 0 or (s == 0 and vec[np.abs(vec).argmax()] < 0):
        return -vec
    return vec


def linear_spectrum(energy: NonlocalEnergy) -> Spectrum:
    """All eigenvalues of the symmetric pencil K u = lambda h^N u (p = 2),
    ascending, with mass-orthonormal eigenvectors."""
    if energy.params.p != 2.0:
        raise WrongExponent(f"linear spectrum needs p = 2, got p={energy.params.p}")
    k = stiffness_matrix(energy)
    m = energy.grid.num_nodes
    b = energy.grid.measure_weight * np.eye(m)
    vals, vecs = scipy.linalg.eigh(k, b)
    for j in range(m):
        vecs[:, j] = _sign_normalize(vecs[:, j])
    return Spectrum(
        eigenvalues=vals, eigenvectors=vecs, grid=energy.grid, params=energy.params
    )


def counting_function(spectrum: Spectrum, lam: float) -> int:
    """Number of eigenvalues strictly below lam."""
    return int(np.searchsorted(spectrum.eigenvalues, lam, side="left"))


@dataclass(frozen=True)
class SlopeFit:
    slope: float
    intercept: float
    r2: float
    upper_tail_flag: bool      # window reaches into the top 20% of the spectrum
    window: tuple[float, float]
    points: int = field(default=0)


def percentile_window(spectrum: Spectrum, lo_pct: float, hi_pct: float) -> tuple[float, float]:
    """Window endpoints placed at the given percent positions along the
    spectrum's range on a log scale (the natural axis of the slope fit)."""
    vals = spectrum.eigenvalues
    lam_min, lam_max = float(vals[0]), float(vals[-1])
    ratio = lam_max / lam_min
    return lam_min * ratio ** (lo_pct / 100.0), lam_min * ratio ** (hi_pct / 100.0)


def weyl_slope(spectrum: Spectrum, window: tuple[float, float]) -> SlopeFit:
    """Least-squares slope of log N(lambda) against log lambda.

    The counting function is sampled at its jump points inside the window,
    taking the value just after each jump, so an exact power law
    lambda_k = c * k^a fits with slope exactly 1/a.
    """
    lam_lo, lam_hi = window
    vals = spectrum.eigenvalues
    m = len(vals)
    mask = (vals >= lam_lo) & (vals <= lam_hi)
    if mask.sum() < 10:
        raise WindowTooSmall(
            f"window [{lam_lo:g}, {lam_hi:g}] contains {int(mask.sum())} eigenvalues, need 10"
        )
    jumps, counts = np.unique(vals[mask], return_counts=True)
    n_at = np.searchsorted(vals, jumps, side="right").astype(float)
    x = np.log(jumps)
    y = np.log(n_at)
    a = np.vstack([x, np.ones_like(x)]).T
    coef, *_ = np.linalg.lstsq(a, y, rcond=None)
    fitted = a @ coef
    ss_res = float(((y - fitted) ** 2).sum())
    ss_tot = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    tail_start = vals[int(0.8 * (m - 1))]
    return SlopeFit(
        slope=float(coef[0]),
        intercept=float(coef[1]),
        r2=r2,
        upper_tail_flag=bool(lam_hi >= tail_start),
        window=(float(lam_lo), float(lam_hi)),
        points=int(len(jumps)),
    )
