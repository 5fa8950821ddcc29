"""Two-sided counting-function bounds: packing arithmetic and explicit constants.

The lower bound

    N(lambda) >= C1 |Omega|^(sp/(Np-N+sp)) lambda^(N/(Np-N+sp))

holds above a calibration-dependent threshold; the upper bound

    N(lambda) <= C2 |Omega|^(sp/(sp-N)) lambda^(N/(sp-N))

requires sp > N.  The integers r (genus of the unit-cube sublevel) and q
(co-genus) are not computable here; they enter the constants linearly and are
supplied by the caller, defaulting to r = q = 1 ("uncalibrated").
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .domain_mesh import Ball, Box, CubeUnion, DomainSpec, FracParams, Interval
from .errors import InvalidParams, OrderViolation, SizeOrder, SubcriticalExponent


@dataclass(frozen=True)
class CubeCalibration:
    """Level lambda0 with nonempty unit-cube sublevel, its genus r and co-genus q."""

    lambda0: float
    r: int = 1
    q: int = 1
    calibrated: bool = False    # False marks the r = q = 1 template

    def __post_init__(self):
        if not self.lambda0 > 0:
            raise InvalidParams("lambda0 must be positive")
        if self.r < 1:
            raise InvalidParams("r must be a positive integer")
        if self.q < self.r:
            raise InvalidParams("q must be at least r")


def homothety_factor(lambda0: float, lambda_prime: float, params: FracParams) -> float:
    """(lambda0 / lambda')^(1/sp), the cube side at which the rescaled unit-cube
    sublevel sits at level lambda'."""
    if not lambda_prime > lambda0:
        raise OrderViolation(
            f"need lambda' > lambda0, got {lambda_prime} <= {lambda0}"
        )
    return (lambda0 / lambda_prime) ** (1.0 / params.sp)


def packing_count(a: float, a_prime: float, dim: int) -> int:
    """floor(a/a')^N congruent cubes of side a' packed into a cube of side a."""
    if not 0 < a_prime <= a:
        raise SizeOrder(f"need 0 < a' <= a, got a'={a_prime}, a={a}")
    return int(math.floor(a / a_prime)) ** dim


def covering_count(b: float, a_prime: float, dim: int) -> int:
    """(floor(b/a') + 1)^N cubes of side a' covering a cube of side b."""
    if not 0 < a_prime <= b:
        raise SizeOrder(f"need 0 < a' <= b, got a'={a_prime}, b={b}")
    return (int(math.floor(b / a_prime)) + 1) ** dim


def lower_exponent(params: FracParams) -> float:
    n, p, sp = params.dim, params.p, params.sp
    return n / (n * p - n + sp)


def upper_exponent(params: FracParams) -> float:
    n, sp = params.dim, params.sp
    if not sp > n:
        raise SubcriticalExponent(f"upper bound needs sp > N, got sp={sp}, N={n}")
    return n / (sp - n)


def constant_c1(cal: CubeCalibration, params: FracParams) -> float:
    n, p, sp = params.dim, params.p, params.sp
    denom = n * p - n + sp
    return 2.0 ** (-(n * n * p - n * n + n * sp + sp) / denom) * cal.r * cal.lambda0 ** (
        -n / denom
    )


def constant_c2(cal: CubeCalibration, params: FracParams) -> float:
    n, sp = params.dim, params.sp
    if not sp > n:
        raise SubcriticalExponent(f"C2 needs sp > N, got sp={sp}, N={n}")
    return 2.0 ** ((n * sp + sp + n) / (sp - n)) * cal.q * cal.lambda0 ** (-n / (sp - n))


def lower_threshold(cal: CubeCalibration, params: FracParams, packing: tuple[int, float]) -> float:
    """Validity threshold lambda0 * n^(p-1) * a^(-sp) for an inscribed packing
    of n cubes of side a."""
    n_cubes, a = packing
    return cal.lambda0 * n_cubes ** (params.p - 1.0) * a ** (-params.sp)


def upper_threshold(cal: CubeCalibration, params: FracParams, covering: tuple[int, float]) -> float:
    """Validity threshold lambda0 / (2^(N+1) * h * b^sp) for a covering by
    h cubes of side b."""
    h_cubes, b = covering
    return cal.lambda0 / (2.0 ** (params.dim + 1) * h_cubes * b**params.sp)


def lower_bound(
    cal: CubeCalibration,
    params: FracParams,
    volume: float,
    lam: float,
    packing: tuple[int, float],
) -> tuple[float, bool]:
    """Lower counting bound and whether lam clears the packing threshold."""
    n, sp = params.dim, params.sp
    denom = n * params.p - n + sp
    value = constant_c1(cal, params) * volume ** (sp / denom) * lam ** (n / denom)
    return value, lam >= lower_threshold(cal, params, packing)


def upper_bound(
    cal: CubeCalibration,
    params: FracParams,
    volume: float,
    lam: float,
    covering: tuple[int, float],
) -> tuple[float, bool]:
    """Upper counting bound (sp > N) and whether lam clears the covering threshold."""
    n, sp = params.dim, params.sp
    value = constant_c2(cal, params) * volume ** (sp / (sp - n)) * lam ** (n / (sp - n))
    return value, lam >= upper_threshold(cal, params, covering)


def inscribed_packing(domain: DomainSpec, granularity: int = 8) -> tuple[int, float, float]:
    """Union of congruent cubes with disjoint interiors inside the domain.

    Returns (count, side, achieved volume ratio).  Exact for intervals, boxes
    and cube unions; greedy lattice placement for balls, where the achieved
    ratio is reported for the caller to judge.
    """
    if granularity < 1:
        raise InvalidParams("granularity must be at least 1")
    if isinstance(domain, Interval):
        a = (domain.b - domain.a) / granularity
        return granularity, a, 1.0
    if isinstance(domain, Box):
        lo, hi = domain.bounding_box()
        ext = hi - lo
        a = float(ext.min()) / granularity
        counts = [int(math.floor(e / a + 1e-12)) for e in ext]
        n_cubes = int(np.prod(counts))
        return n_cubes, a, n_cubes * a**domain.dim / domain.volume()
    if isinstance(domain, CubeUnion):
        return len(domain.corners), domain.side, 1.0
    if isinstance(domain, Ball):
        a = 2.0 * domain.radius / granularity
        c = np.array(domain.center)
        lo = c - domain.radius
        rng = np.arange(granularity)
        mesh = np.meshgrid(*([rng] * domain.dim), indexing="ij")
        corner = lo[None, :] + np.stack([m.ravel() for m in mesh], -1) * a
        far = np.maximum(np.abs(corner - c), np.abs(corner + a - c))
        inside = (far**2).sum(axis=1) <= domain.radius**2
        n_cubes = int(inside.sum())
        return n_cubes, a, n_cubes * a**domain.dim / domain.volume()
    raise InvalidParams(f"unsupported domain type {type(domain).__name__}")


def circumscribed_covering(domain: DomainSpec, granularity: int = 8) -> tuple[int, float, float]:
    """Union of congruent cubes with disjoint interiors containing the domain.

    Returns (count, side, achieved volume ratio >= 1).
    """
    if granularity < 1:
        raise InvalidParams("granularity must be at least 1")
    if isinstance(domain, Interval):
        b = (domain.b - domain.a) / granularity
        return granularity, b, 1.0
    if isinstance(domain, Box):
        lo, hi = domain.bounding_box()
        ext = hi - lo
        b = float(ext.min()) / granularity
        counts = [int(math.ceil(e / b - 1e-12)) for e in ext]
        h_cubes = int(np.prod(counts))
        return h_cubes, b, h_cubes * b**domain.dim / domain.volume()
    if isinstance(domain, CubeUnion):
        return len(domain.corners), domain.side, 1.0
    if isinstance(domain, Ball):
        b = 2.0 * domain.radius / granularity
        c = np.array(domain.center)
        lo = c - domain.radius
        rng = np.arange(granularity)
        mesh = np.meshgrid(*([rng] * domain.dim), indexing="ij")
        corner = lo[None, :] + np.stack([m.ravel() for m in mesh], -1) * b
        nearest = np.clip(c, corner, corner + b)
        touches = ((nearest - c) ** 2).sum(axis=1) < domain.radius**2
        h_cubes = int(touches.sum())
        return h_cubes, b, h_cubes * b**domain.dim / domain.volume()
    raise InvalidParams(f"unsupported domain type {type(domain).__name__}")


@dataclass(frozen=True, eq=False)
class BoundReport:
    c1: float
    c2: float | None
    lower_exp: float
    upper_exp: float | None
    lower_thresh: float
    upper_thresh: float | None
    lambdas: np.ndarray
    lower: np.ndarray
    lower_valid: np.ndarray
    upper: np.ndarray | None
    upper_valid: np.ndarray | None
    measured: np.ndarray | None
    calibrated: bool
    packing: tuple[int, float]
    covering: tuple[int, float] | None


def bound_report(
    cal: CubeCalibration,
    params: FracParams,
    domain: DomainSpec,
    lambdas: np.ndarray,
    granularity: int = 8,
    spectrum=None,
    want_upper: bool | None = None,
) -> BoundReport:
    """Evaluate both bound curves on the given levels; merge measured counts
    when a spectrum is supplied.  The upper bound is included when sp > N
    (or forced/suppressed by want_upper)."""
    lambdas = np.asarray(lambdas, dtype=float)
    volume = domain.volume()
    n_cubes, a, _ = inscribed_packing(domain, granularity)
    packing = (n_cubes, a)
    lo_vals = np.empty(len(lambdas))
    lo_valid = np.empty(len(lambdas), dtype=bool)
    for i, lam in enumerate(lambdas):
        lo_vals[i], lo_valid[i] = lower_bound(cal, params, volume, lam, packing)

    sp_ok = params.sp > params.dim
    if want_upper is None:
        want_upper = sp_ok
    if want_upper and not sp_ok:
        raise SubcriticalExponent(
            f"upper bound requested with sp={params.sp} <= N={params.dim}"
        )
    covering = up_vals = up_valid = None
    c2 = up_exp = up_thresh = None
    if want_upper:
        h_cubes, b, _ = circumscribed_covering(domain, granularity)
        covering = (h_cubes, b)
        c2 = constant_c2(cal, params)
        up_exp = upper_exponent(params)
        up_thresh = upper_threshold(cal, params, covering)
        up_vals = np.empty(len(lambdas))
        up_valid = np.empty(len(lambdas), dtype=bool)
        for i, lam in enumerate(lambdas):
            up_vals[i], up_valid[i] = upper_bound(cal, params, volume, lam, covering)

    measured = None
    if spectrum is not None:
        vals = np.asarray(
            spectrum.eigenvalues if hasattr(spectrum, "eigenvalues") else spectrum,
            dtype=float,
        )
        measured = np.searchsorted(vals, lambdas, side="left").astype(float)

    return BoundReport(
        c1=constant_c1(cal, params),
        c2=c2,
        lower_exp=lower_exponent(params),
        upper_exp=up_exp,
        lower_thresh=lower_threshold(cal, params, packing),
        upper_thresh=up_thresh,
        lambdas=lambdas,
        lower=lo_vals,
        lower_valid=lo_valid,
        upper=up_vals,
        upper_valid=up_valid,
        measured=measured,
        calibrated=cal.calibrated,
        packing=packing,
        covering=covering,
    )


def eigenvalue_growth_brackets(
    cal: CubeCalibration, params: FracParams, volume: float, k: int
) -> tuple[float, float]:
    """Bracket [lo, hi] for the k-th eigenvalue obtained by inverting the two
    counting bounds: lo from the upper curve, hi from the lower curve."""
    n, sp = params.dim, params.sp
    denom = n * params.p - n + sp
    hi = (k / constant_c1(cal, params)) ** (denom / n) * volume ** (-sp / n)
    lo = (k / constant_c2(cal, params)) ** ((sp - n) / n) * volume ** (-sp / n)
    return lo, hi
