"""Quadrature-generated transforms of the generalized analytic equations.

A set of N fixed seed solutions (f_j, f_j+) together with the matrix of
their pair potentials generates a transform taking the coefficient u
and any solution pair (psi, psi+) to a new coefficient and new
solutions of the transformed equations.  The N = 1 case is called
simple; two simple transforms compose into the rank-2 transform, and a
simple transform is inverted by another simple transform built from
rescaled seeds.

All potentials are passed in explicitly so integration constants stay
under caller control; nothing is re-integrated behind the caller's
back.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import ShapeError, SingularOmegaError, ZeroPotentialError
from .grid import Field, residual
from .potential import Potential

#: relative floor (times the potential scale) below which a potential
#: or seed-matrix determinant counts as vanishing
DET_TOL_FACTOR = 1e-8


@dataclass(frozen=True)
class TransformResult:
    """Transformed coefficient plus the solution maps.

    ``map_psi(psi, omegas)`` expects the potentials pairing psi with
    each conjugate seed (one per seed, in seed order); likewise
    ``map_psi_plus(psi_plus, omegas)`` expects the potentials pairing
    each direct seed with psi_plus.
    """

    u_tilde: Field
    map_psi: Callable
    map_psi_plus: Callable
    n_seeds: int
    det_min: float


@dataclass(frozen=True)
class SeedSet:
    """N seed pairs with their potential matrix.

    ``omega[j][k]`` must hold the potential pairing the k-th direct
    seed with the j-th conjugate seed.
    """

    u: Field
    seeds: Sequence[tuple[Field, Field]]
    omega: Sequence[Sequence[Potential]]

    @classmethod
    def build(cls, u: Field, seeds, omega, residual_tol: float = 1e-6,
              det_tol: float | None = None) -> "SeedSet":
        """Validate residuals and invertibility before constructing."""
        for j, (f, fp) in enumerate(seeds):
            r_direct = residual(u, f, "direct")
            r_conj = residual(u, fp, "conjugate")
            if max(r_direct, r_conj) > residual_tol:
                raise ValueError(
                    f"seed {j} violates the equations: direct {r_direct:.3e}, "
                    f"conjugate {r_conj:.3e} (tol {residual_tol:.1e})")
        ss = cls(u, tuple(seeds), tuple(tuple(row) for row in omega))
        _det_nodes(ss.omega_array(), u.grid, det_tol)  # raises if singular
        return ss

    def __post_init__(self):
        n = len(self.seeds)
        if len(self.omega) != n or any(len(row) != n for row in self.omega):
            raise ShapeError("omega matrix must be N x N")

    def omega_array(self) -> np.ndarray:
        """Potential matrix as an (nx, ny, N, N) array."""
        rows = [[p.values for p in row] for row in self.omega]
        return np.transpose(np.array(rows), (2, 3, 0, 1))


def _det_nodes(om: np.ndarray, grid, det_tol: float | None) -> np.ndarray:
    n = om.shape[-1]
    if n == 1:
        det = om[..., 0, 0]
    elif n == 2:
        det = om[..., 0, 0] * om[..., 1, 1] - om[..., 0, 1] * om[..., 1, 0]
    else:
        det = np.linalg.det(om)
    scale = float(np.max(np.abs(om)))
    tol = DET_TOL_FACTOR * scale ** n if det_tol is None else det_tol
    bad = (np.abs(det) <= tol) & grid.mask
    if bad.any():
        idx = np.unravel_index(np.argmin(np.abs(np.where(grid.mask, det, np.inf))),
                               det.shape)
        raise SingularOmegaError(
            f"potential matrix is singular at {int(bad.sum())} node(s); "
            f"|det| = {abs(det[idx]):.3e} at node {tuple(int(v) for v in idx)} "
            f"(tol {tol:.1e})")
    return det


def _solve_nodes(om: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Solve om @ x = rhs per node; closed forms for N <= 2, LU beyond."""
    n = om.shape[-1]
    if n == 1:
        return rhs / om[..., 0, 0, None]
    if n == 2:
        det = om[..., 0, 0] * om[..., 1, 1] - om[..., 0, 1] * om[..., 1, 0]
        x0 = (om[..., 1, 1] * rhs[..., 0] - om[..., 0, 1] * rhs[..., 1]) / det
        x1 = (om[..., 0, 0] * rhs[..., 1] - om[..., 1, 0] * rhs[..., 0]) / det
        return np.stack([x0, x1], axis=-1)
    return np.linalg.solve(om, rhs[..., None])[..., 0]


def _check_nonvanishing(pot: Potential, det_tol: float | None) -> None:
    scale = pot.max_abs()
    tol = DET_TOL_FACTOR * scale if det_tol is None else det_tol
    low = pot.min_abs()
    if low <= tol:
        raise ZeroPotentialError(
            f"seed potential reaches |w| = {low:.3e} (tol {tol:.1e})")


def _as_potential_list(omegas) -> list[Potential]:
    if isinstance(omegas, Potential):
        return [omegas]
    return list(omegas)


def moutard_simple(u: Field, f1: Field, f1_plus: Field, omega_ff: Potential,
                   det_tol: float | None = None) -> TransformResult:
    """Simple (N = 1) transform generated by one seed pair.

    The transformed coefficient is u + f1*conj(f1+)/w, and a solution
    psi maps to psi - f1*w_{psi,f1+}/w.
    """
    _check_nonvanishing(omega_ff, det_tol)
    u_tilde = u + f1 * f1_plus.conj() / omega_ff
    u_tilde = Field(u_tilde.grid, u_tilde.values, role="coefficient")

    def map_psi(psi: Field, omegas) -> Field:
        (om_pf,) = _as_potential_list(omegas)
        return psi - f1 * (om_pf.values / omega_ff.values)

    def map_psi_plus(psi_plus: Field, omegas) -> Field:
        (om_fp,) = _as_potential_list(omegas)
        return psi_plus - f1_plus * (om_fp.values / omega_ff.values)

    return TransformResult(u_tilde, map_psi, map_psi_plus, 1,
                           det_min=omega_ff.min_abs())


def moutard_rank_n(seedset: SeedSet, det_tol: float | None = None) -> TransformResult:
    """Rank-N transform from a validated seed set."""
    grid = seedset.u.grid
    om = seedset.omega_array()
    det = _det_nodes(om, grid, det_tol)
    f_stack = np.stack([f.values for f, _ in seedset.seeds], axis=-1)
    fp_stack = np.stack([fp.values for _, fp in seedset.seeds], axis=-1)

    sol = _solve_nodes(om, np.conj(fp_stack))
    u_tilde = Field(grid, seedset.u.values + np.sum(f_stack * sol, axis=-1),
                    role="coefficient")
    om_t = np.swapaxes(om, -1, -2)

    def map_psi(psi: Field, omegas) -> Field:
        pots = _as_potential_list(omegas)
        rhs = np.stack([p.values for p in pots], axis=-1)
        x = _solve_nodes(om, rhs)
        return Field(grid, psi.values - np.sum(f_stack * x, axis=-1))

    def map_psi_plus(psi_plus: Field, omegas) -> Field:
        pots = _as_potential_list(omegas)
        rhs = np.stack([p.values for p in pots], axis=-1)
        x = _solve_nodes(om_t, rhs)
        return Field(grid, psi_plus.values - np.sum(fp_stack * x, axis=-1))

    det_min = float(np.min(np.abs(det[grid.mask])))
    return TransformResult(u_tilde, map_psi, map_psi_plus, len(seedset.seeds),
                           det_min=det_min)


def transformed_potential(omega_pp: Potential, omega_pf: Potential,
                          omega_fp: Potential, omega_ff: Potential,
                          constant: complex = 0.0,
                          det_tol: float | None = None) -> Potential:
    """Potential of the transformed pair, no re-integration needed.

    Given the four potentials pairing (psi, psi+) and the seed pair,
    the transformed pair's potential is
    (w_pp * w_ff - w_pf * w_fp) / w_ff + constant.
    """
    _check_nonvanishing(omega_ff, det_tol)
    constant = complex(constant)
    vals = (omega_pp.values * omega_ff.values
            - omega_pf.values * omega_fp.values) / omega_ff.values + constant
    bp = omega_pp.basepoint
    return Potential(omega_pp.grid, vals, complex(vals[bp]), bp)


def compose_simple(u: Field, f1: Field, f1_plus: Field, f2: Field,
                   f2_plus: Field, om_f1_f1p: Potential, om_f2_f1p: Potential,
                   om_f1_f2p: Potential, om_f2_f2p: Potential,
                   second_stage_constant: complex = 0.0,
                   det_tol: float | None = None) -> TransformResult:
    """Composition of the two simple transforms generated by the seeds.

    The first stage uses (f1, f1+); the second stage uses the images of
    (f2, f2+) under the first stage, with all second-stage potentials
    derived by the transformed-potential formula (constants default to
    zero).  Node-wise this equals the rank-2 transform on the same
    seeds.  The returned maps take the same potential lists as the
    rank-2 maps.
    """
    m1 = moutard_simple(u, f1, f1_plus, om_f1_f1p, det_tol)
    f2_t = m1.map_psi(f2, om_f2_f1p)
    f2p_t = m1.map_psi_plus(f2_plus, om_f1_f2p)
    om_22_t = transformed_potential(om_f2_f2p, om_f2_f1p, om_f1_f2p, om_f1_f1p,
                                    second_stage_constant, det_tol)
    m2 = moutard_simple(m1.u_tilde, f2_t, f2p_t, om_22_t, det_tol)

    def map_psi(psi: Field, omegas) -> Field:
        om_p_f1p, om_p_f2p = _as_potential_list(omegas)
        psi_t = m1.map_psi(psi, om_p_f1p)
        om_t = transformed_potential(om_p_f2p, om_p_f1p, om_f1_f2p, om_f1_f1p,
                                     second_stage_constant, det_tol)
        return m2.map_psi(psi_t, om_t)

    def map_psi_plus(psi_plus: Field, omegas) -> Field:
        om_f1_pp, om_f2_pp = _as_potential_list(omegas)
        psi_p_t = m1.map_psi_plus(psi_plus, om_f1_pp)
        om_t = transformed_potential(om_f2_pp, om_f2_f1p, om_f1_pp, om_f1_f1p,
                                     second_stage_constant, det_tol)
        return m2.map_psi_plus(psi_p_t, om_t)

    return TransformResult(m2.u_tilde, map_psi, map_psi_plus, 2,
                           det_min=min(m1.det_min, m2.det_min))


def invert_simple(m1: TransformResult, f1: Field, f1_plus: Field,
                  omega_ff: Potential, det_tol: float | None = None) -> TransformResult:
    """Simple transform undoing the one generated by (f1, f1+).

    The inverting seeds are -i*f1/w and -i*f1+/w with pair potential
    1/w, and the potentials pairing a transformed solution with them
    are -i/w times the original ones; with these choices the
    composition returns u, psi and psi+ identically.  The returned maps
    take transformed solutions together with the *original* potentials
    (the ones that fed the forward map).
    """
    _check_nonvanishing(omega_ff, det_tol)
    grid = f1.grid
    w = omega_ff.values
    f_hat = Field(grid, -1j * f1.values / w)
    f_hat_plus = Field(grid, -1j * f1_plus.values / w)
    om_hat = Potential.from_values(grid, 1.0 / w, omega_ff.basepoint)
    m2 = moutard_simple(m1.u_tilde, f_hat, f_hat_plus, om_hat, det_tol)

    def map_psi(psi_tilde: Field, omegas) -> Field:
        (om_pf,) = _as_potential_list(omegas)
        om_scaled = Potential.from_values(grid, -1j * om_pf.values / w,
                                          om_pf.basepoint)
        return m2.map_psi(psi_tilde, om_scaled)

    def map_psi_plus(psi_plus_tilde: Field, omegas) -> Field:
        (om_fp,) = _as_potential_list(omegas)
        om_scaled = Potential.from_values(grid, -1j * om_fp.values / w,
                                          om_fp.basepoint)
        return m2.map_psi_plus(psi_plus_tilde, om_scaled)

    return TransformResult(m2.u_tilde, map_psi, map_psi_plus, 1,
                           det_min=om_hat.min_abs())


def seed_annihilation_max(result: TransformResult, seedset: SeedSet) -> float:
    """Max modulus of a mapped seed; zero for a correct transform."""
    worst = 0.0
    n = len(seedset.seeds)
    for j, (f, _) in enumerate(seedset.seeds):
        column = [seedset.omega[r][j] for r in range(n)]
        worst = max(worst, result.map_psi(f, column).max_abs())
    return worst
