"""Chain statics: total potential energy, analytic derivatives, equilibria.

The total energy of an ordered chain is the per-ion trap energy plus the
pairwise Coulomb repulsion,

    U = sum_i q V_t(r_i, m_i) + (1/2) sum_{i != j} q_i q_j / (4 pi eps0 r_ij).

Equilibria are found by Newton's method with the analytic gradient and
Hessian and a backtracking line search; ion order (increasing axial
coordinate) is preserved during iteration and a crossing step is an error,
since ion order is physically meaningful for mixed-species chains.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import coulomb
from .constants import COULOMB, EPSILON_0
from .potentials import AxialPotential, TrapModel3D
from .species import IonSpecies

COINCIDENCE_LIMIT = 1e-12  # m
MAX_NEWTON_ITER = 200
GRAD_TOL_FACTOR = 1e-10    # of the characteristic force scale 2 q kappa2 l


class EquilibriumError(RuntimeError):
    """Base class for equilibrium-solver failures."""


class ConvergenceError(EquilibriumError):
    pass


class IonCrossingError(EquilibriumError):
    pass


class UnconfinedPotentialError(EquilibriumError):
    pass


def characteristic_length(species: IonSpecies, kappa2: float) -> float:
    """Coulomb length scale l = (q / 8 pi eps0 kappa2)^(1/3).

    Two ions in the harmonic well sit 2^(1/3) l apart; the formula is
    mass-independent.
    """
    if kappa2 <= 0:
        raise ValueError("kappa2 must be positive")
    return (species.charge_si / (8 * math.pi * EPSILON_0 * kappa2)) ** (1.0 / 3.0)


def _as_positions(positions) -> tuple[np.ndarray, bool]:
    pos = np.asarray(positions, dtype=float)
    if pos.ndim == 1:
        return pos, False
    if pos.ndim == 2 and pos.shape[1] == 3:
        return pos, True
    raise ValueError("positions must have shape (N,) or (N, 3)")


def _axial_of(pos: np.ndarray, is3d: bool) -> np.ndarray:
    return pos[:, 2] if is3d else pos


def _check_separations(pos: np.ndarray, is3d: bool):
    n = len(pos)
    p = pos if is3d else pos[:, None]
    for i in range(n):
        for j in range(i + 1, n):
            if np.linalg.norm(p[i] - p[j]) < COINCIDENCE_LIMIT:
                raise ValueError(f"ions {i} and {j} are coincident")


def _trap_terms(potential):
    """Split a potential into (axial polynomial, 3D trap or None)."""
    if isinstance(potential, TrapModel3D):
        return potential.axial, potential
    return potential, None


def total_energy(positions, species, potential) -> float:
    """Total potential energy (J) of a candidate configuration.

    Positions are (N,) axial for an AxialPotential and (N, 3) for a
    TrapModel3D.
    """
    pos, is3d = _as_positions(positions)
    _check_separations(pos, is3d)
    axial, trap3d = _trap_terms(potential)
    if trap3d is not None and not is3d:
        raise ValueError("TrapModel3D requires (N, 3) positions")
    u = 0.0
    for sp, r in zip(species, pos):
        z = r[2] if is3d else r
        u += axial.energy(sp, z)
        if trap3d is not None:
            kx, ky = trap3d.radial_for(sp)
            u += sp.charge_si * (kx * r[0] ** 2 + ky * r[1] ** 2)
            if trap3d.has_tensors:
                v = np.array([r[0], r[1], r[2] - axial.expansion_origin])
                u += sp.charge_si * (
                    np.einsum("abc,a,b,c->", trap3d.trap_cubic, v, v, v)
                    + np.einsum("abcd,a,b,c,d->", trap3d.trap_quartic, v, v, v, v))
    p = pos if is3d else pos[:, None]
    for i in range(len(pos)):
        for j in range(i + 1, len(pos)):
            d = np.linalg.norm(p[i] - p[j])
            u += COULOMB * species[i].charge_si * species[j].charge_si / d
    return u


def energy_gradient(positions, species, potential) -> np.ndarray:
    """Analytic gradient dU/dz_k (J/m), flattened over coordinates."""
    pos, is3d = _as_positions(positions)
    _check_separations(pos, is3d)
    axial, trap3d = _trap_terms(potential)
    if trap3d is not None and not is3d:
        raise ValueError("TrapModel3D requires (N, 3) positions")
    n = len(pos)
    if is3d:
        g = np.zeros((n, 3))
        for i, sp in enumerate(species):
            g[i, 2] = axial.energy_derivative(sp, pos[i, 2], 1)
            kx, ky = trap3d.radial_for(sp) if trap3d is not None else (0.0, 0.0)
            g[i, 0] += 2 * sp.charge_si * kx * pos[i, 0]
            g[i, 1] += 2 * sp.charge_si * ky * pos[i, 1]
            if trap3d is not None and trap3d.has_tensors:
                v = np.array([pos[i, 0], pos[i, 1],
                              pos[i, 2] - axial.expansion_origin])
                g[i] += sp.charge_si * (
                    3 * np.einsum("abc,b,c->a", trap3d.trap_cubic, v, v)
                    + 4 * np.einsum("abcd,b,c,d->a", trap3d.trap_quartic, v, v, v))
        for i in range(n):
            for j in range(n):
                if j == i:
                    continue
                r = pos[i] - pos[j]
                cc = COULOMB * species[i].charge_si * species[j].charge_si
                g[i] += -cc * r / np.linalg.norm(r) ** 3
        return g.ravel()
    g = np.array([axial.energy_derivative(sp, z, 1)
                  for sp, z in zip(species, pos)])
    for i in range(n):
        for j in range(n):
            if j == i:
                continue
            d = pos[i] - pos[j]
            cc = COULOMB * species[i].charge_si * species[j].charge_si
            g[i] += -cc * math.copysign(1.0, d) / d**2
    return g


def energy_hessian(positions, species, potential) -> np.ndarray:
    """Analytic Hessian d2U/dz_k dz_l (J/m^2) over flattened coordinates."""
    pos, is3d = _as_positions(positions)
    _check_separations(pos, is3d)
    axial, trap3d = _trap_terms(potential)
    if trap3d is not None and not is3d:
        raise ValueError("TrapModel3D requires (N, 3) positions")
    n = len(pos)
    if is3d:
        h = np.zeros((3 * n, 3 * n))
        for i, sp in enumerate(species):
            h[3 * i + 2, 3 * i + 2] += axial.energy_derivative(sp, pos[i, 2], 2)
            kx, ky = trap3d.radial_for(sp) if trap3d is not None else (0.0, 0.0)
            h[3 * i, 3 * i] += 2 * sp.charge_si * kx
            h[3 * i + 1, 3 * i + 1] += 2 * sp.charge_si * ky
            if trap3d is not None and trap3d.has_tensors:
                v = np.array([pos[i, 0], pos[i, 1],
                              pos[i, 2] - axial.expansion_origin])
                blk = sp.charge_si * (
                    6 * np.einsum("abc,c->ab", trap3d.trap_cubic, v)
                    + 12 * np.einsum("abcd,c,d->ab", trap3d.trap_quartic, v, v))
                h[3 * i:3 * i + 3, 3 * i:3 * i + 3] += blk
        for i in range(n):
            for j in range(n):
                if j == i:
                    continue
                cc = COULOMB * species[i].charge_si * species[j].charge_si
                blk = cc * coulomb.inv_r_d2(pos[i] - pos[j])
                h[3 * i:3 * i + 3, 3 * i:3 * i + 3] += blk
                h[3 * i:3 * i + 3, 3 * j:3 * j + 3] -= blk
        return h
    h = np.zeros((n, n))
    for i, sp in enumerate(species):
        h[i, i] = axial.energy_derivative(sp, pos[i], 2)
    for i in range(n):
        for j in range(n):
            if j == i:
                continue
            u = abs(pos[i] - pos[j])
            cc = COULOMB * species[i].charge_si * species[j].charge_si
            d2 = cc * 2.0 / u**3
            h[i, i] += d2
            h[i, j] -= d2
    return h


@dataclass(frozen=True, eq=False)
class ChainConfiguration:
    """An ordered chain with solved equilibrium positions."""

    species: tuple[IonSpecies, ...]
    positions: np.ndarray            # (N,) axial or (N, 3)
    potential: AxialPotential | TrapModel3D
    residual_gradient: float         # J/m, max component at the solution

    @property
    def n_ions(self) -> int:
        return len(self.species)

    @property
    def is_3d(self) -> bool:
        return self.positions.ndim == 2

    @property
    def axial_positions(self) -> np.ndarray:
        return self.positions[:, 2] if self.is_3d else self.positions

    @property
    def masses(self) -> np.ndarray:
        return np.array([s.mass for s in self.species])

    @property
    def coordinate_masses(self) -> np.ndarray:
        """Mass of the ion owning each flattened coordinate."""
        m = self.masses
        return np.repeat(m, 3) if self.is_3d else m


@lru_cache(maxsize=64)
def _harmonic_chain_scaled(n: int) -> tuple[float, ...]:
    """Equal-mass harmonic chain equilibrium in units of l.

    Dimensionless energy: sum xi^2 + sum_{i<j} 2/|xi_i - xi_j|.
    """
    if n == 1:
        return (0.0,)

    def grad_hess(xi):
        g = 2 * xi.copy()
        h = np.zeros((n, n))
        np.fill_diagonal(h, 2.0)
        for i in range(n):
            for j in range(n):
                if j == i:
                    continue
                d = xi[i] - xi[j]
                g[i] += -2 * math.copysign(1.0, d) / d**2
                h[i, i] += 4 / abs(d) ** 3
                h[i, j] -= 4 / abs(d) ** 3
        return g, h

    # The scaled energy is strictly convex on the ordered cone, so damped
    # Newton converges from any ordered start.
    xi = np.linspace(-0.8, 0.8, n) * n**0.56
    for _ in range(200):
        g, h = grad_hess(xi)
        if np.max(np.abs(g)) < 1e-13:
            break
        step = np.linalg.solve(h, -g)
        t = 1.0
        while t > 1e-14 and not np.all(np.diff(xi + t * step) > 0):
            t *= 0.5
        xi = xi + t * step
    return tuple(xi)


def _initial_guess(species, axial: AxialPotential) -> np.ndarray:
    l = characteristic_length(species[0], axial.kappa2)
    xi = np.array(_harmonic_chain_scaled(len(species)))
    return axial.expansion_origin + l * xi


def solve_equilibrium(species, potential, initial_guess=None) -> ChainConfiguration:
    """Find the equilibrium configuration of an ordered chain.

    Newton iteration with analytic Hessian and a backtracking (Armijo) line
    search, started from the equal-mass harmonic chain at the characteristic
    length scale.  Raises ConvergenceError, IonCrossingError, or
    UnconfinedPotentialError.
    """
    species = tuple(species)
    axial, trap3d = _trap_terms(potential)
    want3d = trap3d is not None
    if initial_guess is None:
        guess = _initial_guess(species, axial)
    else:
        guess, g3d = _as_positions(np.array(initial_guess, dtype=float))
        if g3d and not want3d:
            raise ValueError("3D guess supplied for a 1D axial potential")
    if want3d and guess.ndim == 1:
        guess = np.column_stack([np.zeros(len(guess)), np.zeros(len(guess)), guess])

    n = len(species)
    shape = guess.shape
    x = guess.ravel().copy()
    l = characteristic_length(species[0], axial.kappa2)
    force_scale = 2 * species[0].charge_si * axial.kappa2 * l
    tol = GRAD_TOL_FACTOR * force_scale

    def ordered(vec):
        z = _axial_of(vec.reshape(shape), want3d)
        return bool(np.all(np.diff(z) > 0)) if n > 1 else True

    if not ordered(x):
        raise ValueError("initial guess must have strictly increasing axial order")

    def value(vec):
        return total_energy(vec.reshape(shape), species, potential)

    u0 = value(x)
    converged = False
    for _ in range(MAX_NEWTON_ITER):
        g = energy_gradient(x.reshape(shape), species, potential)
        if np.max(np.abs(g)) < tol:
            converged = True
            break
        h = energy_hessian(x.reshape(shape), species, potential)
        step = None
        reg = 0.0
        for _ in range(12):
            try:
                cand = np.linalg.solve(h + reg * np.eye(len(x)), -g)
            except np.linalg.LinAlgError:
                cand = None
            if cand is not None and g @ cand < 0:
                step = cand
                break
            if reg == 0.0:
                # shift past the most negative curvature (Levenberg style)
                eig_min = float(np.linalg.eigvalsh(h)[0])
                reg = max(-1.1 * eig_min, 1e-12 * np.abs(h).max(), 1e-300)
            else:
                reg *= 10
        if step is None:
            raise ConvergenceError("could not produce a descent direction")
        t = 1.0
        accepted = False
        crossing_only = True
        pred = g @ step
        # near the floating-point floor of the energy the Armijo test is
        # pure noise; fall back to requiring a gradient-norm decrease
        grad_test = abs(pred) < 1e-12 * max(abs(u0), 1e-300)
        while t > 1e-14:
            trial = x + t * step
            if ordered(trial):
                crossing_only = False
                if grad_test:
                    g_trial = energy_gradient(trial.reshape(shape), species,
                                              potential)
                    ok = np.max(np.abs(g_trial)) < np.max(np.abs(g))
                else:
                    ok = value(trial) <= u0 + 1e-4 * t * pred
                if ok:
                    x, u0, accepted = trial, value(trial), True
                    break
            t *= 0.5
        if not accepted:
            if crossing_only:
                raise IonCrossingError("ion ordering would be violated during iteration")
            raise ConvergenceError("line search failed to reduce the energy")
    if not converged:
        g = energy_gradient(x.reshape(shape), species, potential)
        if np.max(np.abs(g)) >= tol:
            raise ConvergenceError(
                f"no convergence in {MAX_NEWTON_ITER} Newton steps "
                f"(max |grad| = {np.max(np.abs(g)):.3e} J/m)")
    # polish with full Newton steps: quadratic convergence drives the
    # residual to the floating-point floor, making the solution
    # guess-independent far below the convergence tolerance
    g = energy_gradient(x.reshape(shape), species, potential)
    for _ in range(3):
        if not np.max(np.abs(g)):
            break
        h = energy_hessian(x.reshape(shape), species, potential)
        try:
            trial = x + np.linalg.solve(h, -g)
        except np.linalg.LinAlgError:
            break
        if not ordered(trial):
            break
        g_trial = energy_gradient(trial.reshape(shape), species, potential)
        if np.max(np.abs(g_trial)) >= np.max(np.abs(g)):
            break
        x, g = trial, g_trial
    h = energy_hessian(x.reshape(shape), species, potential)
    if np.linalg.eigvalsh(h)[0] <= 0:
        raise UnconfinedPotentialError("Hessian is not positive definite at the solution")
    g = energy_gradient(x.reshape(shape), species, potential)
    return ChainConfiguration(species=species, positions=x.reshape(shape),
                              potential=potential,
                              residual_gradient=float(np.max(np.abs(g))))


def chain_length(cfg: ChainConfiguration) -> float:
    """Outermost ion separation (m); requires at least two ions."""
    if cfg.n_ions < 2:
        raise ValueError("chain length requires N >= 2")
    z = cfg.axial_positions
    return float(z[-1] - z[0])


@dataclass(frozen=True)
class CharacteristicScales:
    """Coulomb length scale l and chain length L of a configuration."""

    l: float
    L: float  # 0 for a single ion


def characteristic_scales(cfg: ChainConfiguration) -> CharacteristicScales:
    axial = cfg.potential.axial if hasattr(cfg.potential, "axial") \
        else cfg.potential
    l = characteristic_length(cfg.species[0], axial.kappa2)
    return CharacteristicScales(l=l,
                                L=chain_length(cfg) if cfg.n_ions > 1 else 0.0)
