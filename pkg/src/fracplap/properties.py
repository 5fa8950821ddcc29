"""Executable checks of the qualitative spectral properties.

Each check runs a self-contained experiment and returns a PropertyReport with
the measured quantities, the tolerance used and a pass/fail verdict, so a
report is reproducible from its recorded inputs and seed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .domain_mesh import Ball, DomainSpec, FracParams, build_grid, dilate
from .energy import (
    DiscreteFunction,
    NonlocalEnergy,
    assemble,
    lp_norm_p,
    seminorm_p,
)
from .eigensolver import (
    SolverConfig,
    first_eigenpair,
    linear_spectrum,
    random_positive_init,
)
from .errors import NotABall, NotNested, WrongExponent

TIGHT = SolverConfig(max_iters=60000, tol=1e-13)


@dataclass
class PropertyReport:
    property_id: str
    inputs: dict
    measured: dict
    tolerance: float
    verdict: str                 # "pass" | "fail" | "inconclusive"
    seed: int | None = None
    notes: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def to_json_dict(self) -> dict:
        return {
            "property": self.property_id,
            "inputs": self.inputs,
            "measured": self.measured,
            "tolerance": self.tolerance,
            "verdict": self.verdict,
            "seed": self.seed,
            "notes": self.notes,
        }


def check_scaling(
    domain: DomainSpec,
    params: FracParams,
    tau: float,
    resolution: int,
    trials: int = 20,
    seed: int = 0,
    solver_cfg: SolverConfig = TIGHT,
    rtol: float = 1e-10,
) -> PropertyReport:
    """Homothety identities: under Omega -> tau*Omega at matched resolution,
    the energy of transported nodal values scales by tau^(N-sp), the mass by
    tau^N, and the first eigenvalue by tau^(-sp)."""
    dim, sp = params.dim, params.sp
    grid_a = build_grid(domain, params, resolution)
    grid_b = build_grid(dilate(domain, tau), params, resolution)
    e_a, e_b = assemble(grid_a), assemble(grid_b)
    rng = np.random.default_rng(seed)

    worst_j = worst_i = 0.0
    for _ in range(trials):
        vals = rng.standard_normal(grid_a.num_nodes)
        ua = DiscreteFunction(vals, grid_a)
        ub = DiscreteFunction(vals.copy(), grid_b)
        rj = seminorm_p(e_b, ub) / seminorm_p(e_a, ua)
        ri = lp_norm_p(ub) / lp_norm_p(ua)
        worst_j = max(worst_j, abs(rj / tau ** (dim - sp) - 1.0))
        worst_i = max(worst_i, abs(ri / tau**dim - 1.0))

    lam_a = first_eigenpair(e_a, solver_cfg).lambda1
    lam_b = first_eigenpair(e_b, solver_cfg).lambda1
    err_lam = abs((lam_b / lam_a) / tau ** (-sp) - 1.0)

    ok = worst_j <= rtol and worst_i <= rtol and err_lam <= rtol
    return PropertyReport(
        property_id="scaling",
        inputs={"domain": domain.to_dict(), "s": params.s, "p": params.p,
                "tau": tau, "n": resolution, "trials": trials},
        measured={"seminorm_ratio_err": worst_j, "mass_ratio_err": worst_i,
                  "lambda1_ratio_err": err_lam, "lambda1": lam_a},
        tolerance=rtol,
        verdict="pass" if ok else "fail",
        seed=seed,
    )


def _lattice_compatible(outer_grid, inner: DomainSpec, params: FracParams):
    """Grid the inner domain at the outer spacing; require nested node sets."""
    h = outer_grid.h
    lo_i, hi_i = inner.bounding_box()
    ext = float((hi_i - lo_i).max())
    n_f = ext / h
    n_inner = int(round(n_f))
    if n_inner < 2 or abs(n_f - n_inner) > 1e-9 * max(1.0, n_f):
        raise NotNested(f"inner extent is not a lattice multiple of h={h:g}")
    grid = build_grid(inner, params, n_inner)
    if abs(grid.h - h) > 1e-12 * h:
        raise NotNested("inner grid spacing does not match the outer spacing")
    outer_set = {tuple(np.round(c / h * 2).astype(int)) for c in outer_grid.nodes}
    for c in grid.nodes:
        if tuple(np.round(c / h * 2).astype(int)) not in outer_set:
            raise NotNested("inner nodes are not a subset of the outer nodes")
    return grid


def check_domain_monotonicity(
    inner: DomainSpec,
    outer: DomainSpec,
    params: FracParams,
    resolution: int,
    intermediates: tuple[DomainSpec, ...] = (),
    solver_cfg: SolverConfig = TIGHT,
) -> PropertyReport:
    """Discrete first eigenvalues are nonincreasing along a nested chain of
    domains gridded at one common spacing; exact at the discrete level since
    inner feasible vectors embed in the outer problem by zero extension."""
    chain = [inner, *intermediates, outer]
    outer_grid = build_grid(outer, params, resolution)
    lams = []
    for dom in chain[:-1]:
        g = _lattice_compatible(outer_grid, dom, params)
        lams.append(first_eigenpair(assemble(g), solver_cfg).lambda1)
    lams.append(first_eigenpair(assemble(outer_grid), solver_cfg).lambda1)

    slack = 1e-9
    ok = all(lams[i] >= lams[i + 1] * (1.0 - slack) for i in range(len(lams) - 1))
    return PropertyReport(
        property_id="domain_monotonicity",
        inputs={"chain": [d.to_dict() for d in chain], "s": params.s,
                "p": params.p, "n": resolution},
        measured={"lambda1_chain": lams},
        tolerance=slack,
        verdict="pass" if ok else "fail",
    )


def check_sign_change(energy: NonlocalEnergy) -> PropertyReport:
    """p=2: the first eigenvector is signed-definite, every eigenvector above
    the first eigenvalue attains both signs."""
    if energy.params.p != 2.0:
        raise WrongExponent("sign-change check needs p = 2")
    spec = linear_spectrum(energy)
    vals, vecs = spec.eigenvalues, spec.eigenvectors
    v1 = vecs[:, 0]
    tol1 = 1e-8 * np.abs(v1).max()
    first_ok = bool((v1 >= -tol1).all())
    lam1 = vals[0]
    higher_ok = True
    n_higher = 0
    for k in range(1, len(vals)):
        if vals[k] <= lam1 * (1.0 + 1e-12):
            continue
        n_higher += 1
        v = vecs[:, k]
        if not (v.min() < 0.0 < v.max()):
            higher_ok = False
    ok = first_ok and higher_ok
    return PropertyReport(
        property_id="sign_change",
        inputs={"s": energy.params.s, "p": energy.params.p,
                "nodes": energy.grid.num_nodes},
        measured={"first_min": float(v1.min()), "higher_checked": n_higher,
                  "first_nonnegative": first_ok, "higher_sign_changing": higher_ok},
        tolerance=1e-8,
        verdict="pass" if ok else "fail",
    )


_RAY_DIRECTIONS = {
    1: [(1,), (-1,)],
    2: [(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (1, -1), (-1, 1), (-1, -1)],
}


def check_symmetry(
    domain: DomainSpec,
    params: FracParams,
    resolution: int,
    solver_cfg: SolverConfig = TIGHT,
    orbit_rtol: float = 1e-6,
) -> PropertyReport:
    """First eigenfunction on a ball: equal values across lattice-symmetry
    orbits of the center and nonincreasing along each lattice ray outward.

    Orbits are equivalence classes under the lattice reflection/permutation
    group (same sorted absolute index offset from the center): the staircase
    boundary preserves exactly these symmetries, while accidental equal
    distances across different orbits carry an O(h) anisotropy error.  The
    orbit tolerance must stay above the solver tolerance.
    """
    if not isinstance(domain, Ball):
        raise NotABall(f"symmetry check needs a ball, got {type(domain).__name__}")
    grid = build_grid(domain, params, resolution)
    center_units = (np.array(domain.center) - grid.origin) / grid.h
    center_idx = np.round(center_units).astype(int)
    if np.abs(center_units - center_idx).max() > 1e-9 * max(1.0, resolution):
        raise NotABall(
            "ball center is not a lattice node; use a resolution that places it on the lattice"
        )
    result = first_eigenpair(assemble(grid), solver_cfg)
    u = result.eigenfunction.values
    mx = np.abs(u).max()

    offsets = grid.idx - center_idx
    orbits: dict[tuple, list[int]] = {}
    for i, off in enumerate(offsets):
        orbits.setdefault(tuple(sorted(int(abs(v)) for v in off)), []).append(i)
    orbit_spread = max(
        (float(np.ptp(u[ii])) for ii in orbits.values() if len(ii) > 1), default=0.0
    )

    ray_violation = 0.0
    ctr_key = tuple(int(v) for v in center_idx)
    for direction in _RAY_DIRECTIONS[params.dim]:
        prev = u[grid.node_index[ctr_key]]
        k = 1
        while True:
            key = tuple(int(center_idx[d] + k * direction[d]) for d in range(params.dim))
            if key not in grid.node_index:
                break
            cur = u[grid.node_index[key]]
            ray_violation = max(ray_violation, float(cur - prev))
            prev = cur
            k += 1

    tol_abs = orbit_rtol * mx
    ok = orbit_spread <= tol_abs and ray_violation <= 1e-9 * mx
    return PropertyReport(
        property_id="symmetry",
        inputs={"domain": domain.to_dict(), "s": params.s, "p": params.p,
                "n": resolution},
        measured={"orbit_spread": orbit_spread, "max_ray_increase": ray_violation,
                  "max_abs": float(mx), "lambda1": result.lambda1},
        tolerance=orbit_rtol,
        verdict="pass" if ok else "fail",
    )


def check_simplicity_gap(
    energy: NonlocalEnergy,
    gap_tol: float = 1e-3,
    restarts: int = 10,
    seed: int = 0,
    solver_cfg: SolverConfig = TIGHT,
) -> PropertyReport:
    """p=2 spectral gap above the first eigenvalue, plus restart consistency
    of the nonlinear solver from random positive starts."""
    if energy.params.p != 2.0:
        raise WrongExponent("simplicity-gap check needs p = 2")
    spec = linear_spectrum(energy)
    lam1, lam2 = float(spec.eigenvalues[0]), float(spec.eigenvalues[1])
    gap_ok = (lam2 - lam1) > gap_tol * lam1

    rng = np.random.default_rng(seed)
    lams = [
        first_eigenpair(energy, solver_cfg, init=random_positive_init(energy, rng)).lambda1
        for _ in range(restarts)
    ]
    spread = (max(lams) - min(lams)) / lam1
    restart_ok = spread <= 1e-6

    return PropertyReport(
        property_id="simplicity_gap",
        inputs={"s": energy.params.s, "p": energy.params.p,
                "nodes": energy.grid.num_nodes, "restarts": restarts},
        measured={"lambda1": lam1, "lambda2": lam2,
                  "relative_gap": (lam2 - lam1) / lam1, "restart_spread": spread},
        tolerance=gap_tol,
        verdict="pass" if gap_ok and restart_ok else "fail",
        seed=seed,
    )


def check_poincare(
    energy: NonlocalEnergy,
    lambda1: float,
    trials: int = 1000,
    seed: int = 0,
) -> PropertyReport:
    """lambda1 * mass <= energy for random nodal vectors (sharp at the first
    eigenfunction)."""
    rng = np.random.default_rng(seed)
    grid = energy.grid
    slack = 1e-9
    worst = -np.inf
    for _ in range(trials):
        u = DiscreteFunction(rng.standard_normal(grid.num_nodes), grid)
        j = seminorm_p(energy, u)
        i = lp_norm_p(u)
        worst = max(worst, i * lambda1 - j * (1.0 + slack))
    ok = worst <= 0.0
    return PropertyReport(
        property_id="poincare",
        inputs={"s": energy.params.s, "p": energy.params.p,
                "nodes": grid.num_nodes, "trials": trials, "lambda1": lambda1},
        measured={"worst_violation": float(worst)},
        tolerance=slack,
        verdict="pass" if ok else "fail",
        seed=seed,
    )
