"""Discrete nonlocal energy: seminorm, L^p norm, Rayleigh quotient, gradient.

The energy of a nodal vector u (zero-extended outside the domain) is

    J(u) = sum_{i != j} w_ij |u_i - u_j|^p  +  2 sum_i h^N kappa_i |u_i|^p,

with collocation weights w_ij = h^{2N} / |x_i - x_j|^{N+sp} over ordered
pairs; the singular diagonal cell pair is dropped and the interaction with
the complement is carried by kappa.  The factor 2 on the kappa term accounts
for both orderings of an (interior, exterior) pair.  Every term is a monomial
in h, so J scales by exactly tau^{N-sp} under homothety at matched resolution.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .domain_mesh import ComplementPotential, Grid, complement_potential
from .errors import GridMismatch, ZeroFunction


@dataclass(frozen=True, eq=False)
class DiscreteFunction:
    """Nodal values on a grid's interior nodes, implicitly zero elsewhere."""

    values: np.ndarray
    grid: Grid

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", v)
        if v.shape != (self.grid.num_nodes,):
            raise GridMismatch(
                f"expected {self.grid.num_nodes} values, got shape {v.shape}"
            )
        if not np.isfinite(v).all():
            raise GridMismatch("nodal values must be finite")


@dataclass(frozen=True, eq=False)
class NonlocalEnergy:
    """Assembled pairwise weights and complement potential for one grid."""

    grid: Grid
    weights: np.ndarray           # (M, M) symmetric, zero diagonal
    kappa: ComplementPotential

    @property
    def params(self):
        return self.grid.params


def assemble(grid: Grid) -> NonlocalEnergy:
    """Fill the dense weight table and the complement potential.

    Pair distances are taken from integer lattice offsets, so the table is
    exactly symmetric and scales monomially under homothety.
    """
    params = grid.params
    dim, sp = params.dim, params.sp
    d2 = ((grid.idx[:, None, :] - grid.idx[None, :, :]) ** 2).sum(axis=-1).astype(float)
    np.fill_diagonal(d2, 1.0)
    w = grid.h ** (dim - sp) * d2 ** (-(dim + sp) / 2.0)
    np.fill_diagonal(w, 0.0)
    return NonlocalEnergy(grid=grid, weights=w, kappa=complement_potential(grid))


def _check_grid(energy: NonlocalEnergy, u: DiscreteFunction):
    if u.grid is not energy.grid:
        raise GridMismatch("function does not live on this energy's grid")


def _seminorm_values(energy: NonlocalEnergy, v: np.ndarray) -> float:
    p = energy.params.p
    hN = energy.grid.measure_weight
    diff = np.abs(v[:, None] - v[None, :])
    pair = float((energy.weights * diff**p).sum())
    comp = 2.0 * hN * float((energy.kappa.kappa * np.abs(v) ** p).sum())
    return pair + comp


def _lp_values(grid: Grid, v: np.ndarray) -> float:
    return grid.measure_weight * float((np.abs(v) ** grid.params.p).sum())


def _phi(t: np.ndarray, p: float) -> np.ndarray:
    """|t|^(p-2) * t, extended by 0 at t = 0 for p < 2."""
    if p == 2.0:
        return t
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.abs(t) ** (p - 2.0) * t
    if p < 2.0:
        out = np.where(t == 0.0, 0.0, out)
    return out


def _gradient_values(energy: NonlocalEnergy, v: np.ndarray) -> np.ndarray:
    p = energy.params.p
    hN = energy.grid.measure_weight
    d = v[:, None] - v[None, :]
    g = 2.0 * p * (energy.weights * _phi(d, p)).sum(axis=1)
    g += 2.0 * p * hN * energy.kappa.kappa * _phi(v, p)
    return g


def seminorm_p(energy: NonlocalEnergy, u: DiscreteFunction) -> float:
    """p-th power of the nonlocal seminorm; zero iff u is identically zero."""
    _check_grid(energy, u)
    return _seminorm_values(energy, u.values)


def lp_norm_p(u: DiscreteFunction) -> float:
    """h^N * sum_i |u_i|^p."""
    return _lp_values(u.grid, u.values)


def rayleigh(energy: NonlocalEnergy, u: DiscreteFunction) -> float:
    """seminorm_p / lp_norm_p, invariant under u -> c*u."""
    _check_grid(energy, u)
    denom = _lp_values(u.grid, u.values)
    if denom == 0.0:
        raise ZeroFunction("Rayleigh quotient of the zero function")
    return _seminorm_values(energy, u.values) / denom


def gradient(energy: NonlocalEnergy, u: DiscreteFunction) -> DiscreteFunction:
    """Gradient of the energy: satisfies <grad(u), u> = p * seminorm_p(u)."""
    _check_grid(energy, u)
    return DiscreteFunction(_gradient_values(energy, u.values), energy.grid)


def energy_report(energy: NonlocalEnergy, u: DiscreteFunction) -> dict:
    """Single record with the energy J, mass I and their quotient."""
    j = seminorm_p(energy, u)
    i = lp_norm_p(u)
    rq = j / i if i > 0 else None
    return {"J": j, "I": i, "rayleigh": rq}
