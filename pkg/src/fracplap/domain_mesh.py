"""Domains, uniform grids and the complement potential.

A discrete function is one value per interior lattice node and is implicitly
zero on the rest of R^N, so the nonlocal Dirichlet condition is built into the
discretization.  The interaction of a node with the exterior is condensed into
a per-node potential

    kappa_i ~ integral over R^N \\ Omega of |x_i - y|^(-N-s*p) dy,

evaluated by midpoint quadrature on the grid's own lattice up to a truncation
radius, plus the exact radial tail beyond it.

All inside/outside classifications are carried out in lattice units (node
indices are integers, quadrature cell centers are half-integers), so two grids
that differ only by a homothety classify identically and the assembled
energies scale by exact monomials up to floating-point rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import EmptyGrid, InvalidDomain, InvalidParams, NonpositiveScale

# Relative slack, in lattice units, for boundary classification.  Large enough
# to absorb float rounding between homothetic grids, small enough never to
# reclassify a genuinely interior point.
SNAP = 1e-9


def _snap(scale: float) -> float:
    return SNAP * max(1.0, abs(scale))


@dataclass(frozen=True)
class FracParams:
    """Fractional order s, integrability exponent p and spatial dimension."""

    s: float
    p: float
    dim: int = 1

    def __post_init__(self):
        if not (0.0 < self.s < 1.0):
            raise InvalidParams(f"need 0 < s < 1, got s={self.s}")
        if not self.p > 1.0:
            raise InvalidParams(f"need p > 1, got p={self.p}")
        if self.dim not in (1, 2):
            raise InvalidParams(f"dim must be 1 or 2, got {self.dim}")
        object.__setattr__(self, "_sp", self.s * self.p)

    @property
    def sp(self) -> float:
        """The product s*p (computed once), the order of the kernel exponent."""
        return self._sp


class DomainSpec:
    """Base class for the supported domain shapes."""

    dim: int

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError

    def volume(self) -> float:
        raise NotImplementedError

    def diameter(self) -> float:
        raise NotImplementedError

    def inside_units(self, pts: np.ndarray, lo: np.ndarray, h: float) -> np.ndarray:
        """Strict-interior mask for points given in lattice units relative to lo."""
        raise NotImplementedError

    def dilate(self, tau: float) -> "DomainSpec":
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError

    def boundary_distance(self, x: np.ndarray) -> np.ndarray:
        """Distance from points (K, dim) to the domain boundary, 0 outside."""
        raise NotImplementedError


@dataclass(frozen=True)
class Interval(DomainSpec):
    a: float
    b: float

    def __post_init__(self):
        if not self.b > self.a:
            raise InvalidDomain(f"interval needs a < b, got ({self.a}, {self.b})")

    dim = 1

    def bounding_box(self):
        return np.array([self.a]), np.array([self.b])

    def volume(self):
        return self.b - self.a

    def diameter(self):
        return self.b - self.a

    def inside_units(self, pts, lo, h):
        t = pts[:, 0]
        hi_u = (self.b - lo[0]) / h
        lo_u = (self.a - lo[0]) / h
        eps = _snap(hi_u)
        return (t > lo_u + eps) & (t < hi_u - eps)

    def dilate(self, tau):
        return Interval(self.a * tau, self.b * tau)

    def to_dict(self):
        return {"kind": "interval", "a": self.a, "b": self.b}

    def boundary_distance(self, x):
        d = np.minimum(x[:, 0] - self.a, self.b - x[:, 0])
        return np.maximum(d, 0.0)


@dataclass(frozen=True)
class Box(DomainSpec):
    lo: tuple[float, ...]
    hi: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "lo", tuple(float(v) for v in self.lo))
        object.__setattr__(self, "hi", tuple(float(v) for v in self.hi))
        if len(self.lo) != len(self.hi) or len(self.lo) not in (1, 2):
            raise InvalidDomain("box needs matching lo/hi of length 1 or 2")
        if any(b <= a for a, b in zip(self.lo, self.hi)):
            raise InvalidDomain(f"box needs lo < hi per axis, got {self.lo}, {self.hi}")

    @property
    def dim(self):
        return len(self.lo)

    def bounding_box(self):
        return np.array(self.lo), np.array(self.hi)

    def volume(self):
        return float(np.prod(np.array(self.hi) - np.array(self.lo)))

    def diameter(self):
        return float(np.linalg.norm(np.array(self.hi) - np.array(self.lo)))

    def inside_units(self, pts, lo, h):
        mask = np.ones(len(pts), dtype=bool)
        for d in range(self.dim):
            lo_u = (self.lo[d] - lo[d]) / h
            hi_u = (self.hi[d] - lo[d]) / h
            eps = _snap(hi_u)
            mask &= (pts[:, d] > lo_u + eps) & (pts[:, d] < hi_u - eps)
        return mask

    def dilate(self, tau):
        return Box(tuple(v * tau for v in self.lo), tuple(v * tau for v in self.hi))

    def to_dict(self):
        return {"kind": "box", "lo": list(self.lo), "hi": list(self.hi)}

    def boundary_distance(self, x):
        d = np.full(len(x), np.inf)
        for k in range(self.dim):
            d = np.minimum(d, np.minimum(x[:, k] - self.lo[k], self.hi[k] - x[:, k]))
        return np.maximum(d, 0.0)


@dataclass(frozen=True)
class Ball(DomainSpec):
    center: tuple[float, ...]
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(v) for v in self.center))
        if len(self.center) not in (1, 2):
            raise InvalidDomain("ball center must have 1 or 2 coordinates")
        if not self.radius > 0:
            raise InvalidDomain(f"ball needs radius > 0, got {self.radius}")

    @property
    def dim(self):
        return len(self.center)

    def bounding_box(self):
        c = np.array(self.center)
        return c - self.radius, c + self.radius

    def volume(self):
        if self.dim == 1:
            return 2.0 * self.radius
        return math.pi * self.radius**2

    def diameter(self):
        return 2.0 * self.radius

    def inside_units(self, pts, lo, h):
        c_u = (np.array(self.center) - lo) / h
        r_u = self.radius / h
        d2 = ((pts - c_u) ** 2).sum(axis=1)
        return d2 < r_u**2 - _snap(r_u**2)

    def dilate(self, tau):
        return Ball(tuple(v * tau for v in self.center), self.radius * tau)

    def to_dict(self):
        return {"kind": "ball", "center": list(self.center), "radius": self.radius}

    def boundary_distance(self, x):
        d = self.radius - np.linalg.norm(x - np.array(self.center), axis=1)
        return np.maximum(d, 0.0)


@dataclass(frozen=True)
class CubeUnion(DomainSpec):
    """Union of congruent axis-aligned cubes with pairwise-disjoint interiors."""

    side: float
    corners: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        object.__setattr__(
            self, "corners", tuple(tuple(float(v) for v in c) for c in self.corners)
        )
        if not self.side > 0:
            raise InvalidDomain(f"cube side must be positive, got {self.side}")
        if not self.corners:
            raise InvalidDomain("cube_union needs at least one cube")
        dims = {len(c) for c in self.corners}
        if len(dims) != 1 or dims.pop() not in (1, 2):
            raise InvalidDomain("cube corners must all have 1 or 2 coordinates")
        tol = 1e-12 * self.side
        for i, ci in enumerate(self.corners):
            for cj in self.corners[i + 1 :]:
                overlap = all(abs(a - b) < self.side - tol for a, b in zip(ci, cj))
                if overlap:
                    raise InvalidDomain("cube interiors overlap")

    @property
    def dim(self):
        return len(self.corners[0])

    def bounding_box(self):
        c = np.array(self.corners)
        return c.min(axis=0), c.max(axis=0) + self.side

    def volume(self):
        return len(self.corners) * self.side ** self.dim

    def diameter(self):
        pts = []
        for c in self.corners:
            c = np.array(c)
            for bits in range(2**self.dim):
                off = np.array([(bits >> d) & 1 for d in range(self.dim)], dtype=float)
                pts.append(c + off * self.side)
        pts = np.array(pts)
        d2 = ((pts[:, None, :] - pts[None, :, :]) ** 2).sum(-1)
        return float(np.sqrt(d2.max()))

    def inside_units(self, pts, lo, h):
        mask = np.zeros(len(pts), dtype=bool)
        side_u = self.side / h
        for c in self.corners:
            m = np.ones(len(pts), dtype=bool)
            for d in range(self.dim):
                lo_u = (c[d] - lo[d]) / h
                hi_u = lo_u + side_u
                eps = _snap(hi_u)
                m &= (pts[:, d] > lo_u + eps) & (pts[:, d] < hi_u - eps)
            mask |= m
        return mask

    def dilate(self, tau):
        return CubeUnion(
            self.side * tau, tuple(tuple(v * tau for v in c) for c in self.corners)
        )

    def to_dict(self):
        return {
            "kind": "cube_union",
            "side": self.side,
            "corners": [list(c) for c in self.corners],
        }

    def boundary_distance(self, x):
        d = np.zeros(len(x))
        for c in self.corners:
            dc = np.full(len(x), np.inf)
            for k in range(self.dim):
                dc = np.minimum(dc, np.minimum(x[:, k] - c[k], c[k] + self.side - x[:, k]))
            d = np.maximum(d, dc)
        return np.maximum(d, 0.0)


def domain_from_dict(spec: dict) -> DomainSpec:
    kind = spec.get("kind")
    if kind == "interval":
        return Interval(float(spec["a"]), float(spec["b"]))
    if kind == "box":
        return Box(tuple(spec["lo"]), tuple(spec["hi"]))
    if kind == "ball":
        return Ball(tuple(spec["center"]), float(spec["radius"]))
    if kind == "cube_union":
        return CubeUnion(float(spec["side"]), tuple(tuple(c) for c in spec["corners"]))
    raise InvalidDomain(f"unknown domain kind: {kind!r}")


def dilate(domain: DomainSpec, tau: float) -> DomainSpec:
    """Return tau * Omega.  Grids built on the image at the same resolution
    have spacing tau*h and nodes tau*x_i."""
    if not tau > 0:
        raise NonpositiveScale(f"scale must be positive, got {tau}")
    return domain.dilate(tau)


@dataclass(frozen=True, eq=False)
class Grid:
    """Uniform vertex-centered lattice restricted to the strict interior.

    Nodes are ordered lexicographically by lattice index, so two builds of the
    same (domain, params, n) are bit-for-bit identical.  Each node carries the
    cell measure h^dim.
    """

    domain: DomainSpec
    params: FracParams
    n: int
    h: float
    origin: np.ndarray          # lower corner of the bounding box
    idx: np.ndarray             # (M, dim) integer lattice indices
    nodes: np.ndarray           # (M, dim) coordinates, origin + idx*h
    node_index: dict = field(repr=False)

    @property
    def num_nodes(self) -> int:
        return len(self.nodes)

    @property
    def measure_weight(self) -> float:
        return self.h ** self.params.dim


def build_grid(domain: DomainSpec, params: FracParams, n: int) -> Grid:
    """Lattice of spacing h = (longest bounding-box extent)/n, keeping the
    lattice points strictly inside the domain."""
    if n < 2:
        raise InvalidParams(f"resolution must be at least 2, got {n}")
    if params.dim != domain.dim:
        raise InvalidParams(
            f"params.dim={params.dim} does not match domain dim={domain.dim}"
        )
    lo, hi = domain.bounding_box()
    extent = hi - lo
    h = float(extent.max()) / n
    # candidate lattice points covering the bounding box
    axes = []
    for d in range(domain.dim):
        kmax = int(math.floor(extent[d] / h + _snap(extent[d] / h))) + 1
        axes.append(np.arange(0, kmax + 1))
    mesh = np.meshgrid(*axes, indexing="ij")
    cand = np.stack([m.ravel() for m in mesh], axis=-1)
    mask = domain.inside_units(cand.astype(float), lo, h)
    idx = cand[mask]
    if len(idx) == 0:
        raise EmptyGrid(
            f"no lattice point falls strictly inside the domain at n={n}"
        )
    nodes = lo[None, :] + idx * h
    node_index = {tuple(int(v) for v in row): i for i, row in enumerate(idx)}
    return Grid(
        domain=domain,
        params=params,
        n=n,
        h=h,
        origin=lo,
        idx=idx,
        nodes=nodes,
        node_index=node_index,
    )


@dataclass(frozen=True, eq=False)
class ComplementPotential:
    """Per-node integral of the kernel over the domain complement.

    kappa has units length^(-s*p); truncation_radius is the radius beyond
    which the tail is added analytically; tail_constant is the exact value of
    the integral of |z|^(-N-sp) over |z| > truncation_radius.
    """

    kappa: np.ndarray
    truncation_radius: float
    tail_constant: float
    r_units: int


def _tail_coefficient(dim: int) -> float:
    # integral over |z| > R of |z|^(-N-sp) dz = coeff/sp * R^(-sp)
    return 2.0 if dim == 1 else 2.0 * math.pi


def complement_potential(grid: Grid, radius_factor: float = 10.0) -> ComplementPotential:
    """Midpoint quadrature of the kernel over (padded box \\ Omega) on the
    grid's own lattice, truncated at radius_factor * diam(Omega) from each
    node, plus the exact radial tail.

    The quadrature is evaluated entirely in lattice units: cell centers sit at
    half-integer offsets, so squared distances are exact floats and the result
    scales as h^(-sp) under homothety with no reclassification.
    """
    domain, params, h = grid.domain, grid.params, grid.h
    dim, sp = params.dim, params.sp
    diam_u = domain.diameter() / h
    q = radius_factor * diam_u
    r_units = int(round(q)) if abs(q - round(q)) < _snap(q) else int(math.ceil(q))
    pad = r_units + 1
    lo, hi = domain.bounding_box()
    extent = hi - lo

    axes = []
    for d in range(dim):
        c_d = extent[d] / h
        ncell = int(math.ceil(c_d - _snap(c_d)))
        axes.append(np.arange(-pad, ncell + pad) + 0.5)
    mesh = np.meshgrid(*axes, indexing="ij")
    centers = np.stack([m.ravel() for m in mesh], axis=-1)
    exterior = centers[~domain.inside_units(centers, lo, h)]

    r2 = float(r_units) ** 2
    expo = -(dim + sp) / 2.0
    kap_units = np.empty(grid.num_nodes)
    for i in range(grid.num_nodes):
        d2 = ((exterior - grid.idx[i]) ** 2).sum(axis=1)
        near = d2[d2 <= r2]
        kap_units[i] = (near**expo).sum()
    tail_units = _tail_coefficient(dim) / sp * float(r_units) ** (-sp)
    kappa = (kap_units + tail_units) * h ** (-sp)
    radius = r_units * h
    return ComplementPotential(
        kappa=kappa,
        truncation_radius=radius,
        tail_constant=_tail_coefficient(dim) / sp * radius ** (-sp),
        r_units=r_units,
    )
