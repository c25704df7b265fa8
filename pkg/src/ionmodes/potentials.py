"""Trap potential models.

The axial potential is a polynomial about an expansion origin,

    V(z) = sum_n kappa_n (z - z0)^n  -  E z,

with an optional per-species pseudopotential gradient term.  Anharmonic
coefficients can equivalently be expressed through the lengths
lambda_n = (kappa_n / kappa_2)^(1/(2-n)) at which the n-th order term
rivals the harmonic one.

The 3D model adds two radial curvatures (optionally pseudopotential-derived,
i.e. scaling as m_ref/m_i) and optional symmetric cubic/quartic trap tensors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .constants import ELEMENTARY_CHARGE
from .species import IonSpecies


@dataclass(frozen=True)
class AxialPotential:
    """Polynomial axial trap potential (coefficients in V m^-n).

    ``pseudo_gradient`` is an axial pseudopotential gradient in eV/m felt by
    a singly charged ion of the reference species; per ion it scales as
    m_ref/m_i (pseudopotential strength is inversely proportional to mass).
    """

    kappa: dict[int, float]
    uniform_field: float = 0.0          # V/m
    pseudo_gradient: float = 0.0        # eV/m for the reference species
    pseudo_reference: IonSpecies | None = None
    expansion_origin: float = 0.0       # m

    def __post_init__(self):
        ks = dict(sorted(self.kappa.items()))
        for n in ks:
            if n < 2:
                raise ValueError(f"polynomial orders start at n=2, got {n}")
        if ks.get(2, 0.0) <= 0:
            raise ValueError("kappa_2 must be positive (confining harmonic term)")
        if self.pseudo_gradient != 0.0 and self.pseudo_reference is None:
            raise ValueError("pseudo_gradient requires a reference species")
        object.__setattr__(self, "kappa", ks)

    @property
    def kappa2(self) -> float:
        return self.kappa[2]

    def lambdas(self) -> dict[int, float]:
        """Anharmonicity lengths lambda_n = (kappa_n/kappa_2)^(1/(2-n))."""
        out = {}
        for n, kn in self.kappa.items():
            if n == 2 or kn == 0.0:
                continue
            ratio = kn / self.kappa2
            # real length for odd orders; even orders require kappa_n > 0
            out[n] = math.copysign(abs(ratio) ** (1.0 / (2 - n)), ratio)
        return out

    def gradient_slope(self, species: IonSpecies) -> float:
        """Pseudopotential energy slope dU/dz in J/m for one ion."""
        if self.pseudo_gradient == 0.0:
            return 0.0
        scale = self.pseudo_reference.mass / species.mass
        return species.charge_si * self.pseudo_gradient * scale

    def energy(self, species: IonSpecies, z: float) -> float:
        """Potential energy qV(z) of one ion, in J."""
        u = z - self.expansion_origin
        v = sum(kn * u**n for n, kn in self.kappa.items())
        return species.charge_si * (v - self.uniform_field * z) \
            + self.gradient_slope(species) * z

    def energy_derivative(self, species: IonSpecies, z, order: int = 1):
        """d^k(qV)/dz^k for k >= 1; z may be an array."""
        u = np.asarray(z, dtype=float) - self.expansion_origin
        acc = np.zeros_like(u)
        for n, kn in self.kappa.items():
            if n >= order:
                coeff = kn * math.prod(range(n - order + 1, n + 1))
                acc = acc + coeff * u ** (n - order)
        acc = acc * species.charge_si
        if order == 1:
            acc = acc - species.charge_si * self.uniform_field \
                + self.gradient_slope(species)
        return acc if acc.shape else float(acc)


def axial_from_lambdas(kappa2: float, lambdas: dict[int, float],
                       **kwargs) -> AxialPotential:
    """Build an axial potential from kappa_2 and anharmonicity lengths.

    kappa_n = kappa_2 * lambda_n^(2-n); round-trips through
    ``AxialPotential.lambdas`` to relative 1e-12.
    """
    if kappa2 <= 0:
        raise ValueError("kappa2 must be positive")
    kappa = {2: kappa2}
    for n, lam in lambdas.items():
        n = int(n)
        if n < 3:
            raise ValueError(f"lambda_n defined for n >= 3, got {n}")
        if lam == 0.0:
            raise ValueError(f"lambda_{n} must be nonzero")
        kappa[n] = kappa2 * math.copysign(abs(lam) ** (2 - n), lam)
    return AxialPotential(kappa=kappa, **kwargs)


def evaluate_axial(pot: AxialPotential, species: IonSpecies, z: float) -> float:
    """Potential energy of one ion at axial position z, in J."""
    return pot.energy(species, z)


def _symmetrize(arr: np.ndarray) -> np.ndarray:
    """Average an array over all permutations of its axes."""
    from itertools import permutations

    perms = list(permutations(range(arr.ndim)))
    return sum(np.transpose(arr, p) for p in perms) / len(perms)


@dataclass(frozen=True, eq=False)
class TrapModel3D:
    """Axial polynomial plus harmonic radial confinement and trap tensors.

    ``radial_curvatures`` are (kappa_x, kappa_y) in V/m^2 for the reference
    species; with ``radial_mass_scaling`` they scale as m_ref/m_i per ion
    (pseudopotential confinement).  ``trap_cubic``/``trap_quartic`` are
    symmetric rank-3/4 coefficient arrays in V m^-3 / V m^-4 acting on
    coordinates (x, y, z - z0); they are static terms and do not mass-scale.
    """

    axial: AxialPotential
    radial_curvatures: tuple[float, float]
    reference: IonSpecies
    trap_cubic: np.ndarray = field(default=None)
    trap_quartic: np.ndarray = field(default=None)
    radial_mass_scaling: bool = True

    def __post_init__(self):
        kx, ky = self.radial_curvatures
        if kx <= 0 or ky <= 0:
            raise ValueError("radial curvatures must be positive")
        cubic = np.zeros((3, 3, 3)) if self.trap_cubic is None \
            else np.asarray(self.trap_cubic, dtype=float)
        quartic = np.zeros((3, 3, 3, 3)) if self.trap_quartic is None \
            else np.asarray(self.trap_quartic, dtype=float)
        if cubic.shape != (3, 3, 3) or quartic.shape != (3, 3, 3, 3):
            raise ValueError("trap tensors must have shapes (3,3,3) and (3,3,3,3)")
        for t in (cubic, quartic):
            if not np.allclose(t, _symmetrize(t), rtol=1e-10, atol=0.0):
                raise ValueError("trap tensors must be symmetric under index permutation")
        object.__setattr__(self, "trap_cubic", cubic)
        object.__setattr__(self, "trap_quartic", quartic)

    def radial_for(self, species: IonSpecies) -> tuple[float, float]:
        kx, ky = self.radial_curvatures
        if self.radial_mass_scaling:
            s = self.reference.mass / species.mass
            kx, ky = kx * s, ky * s
        return kx, ky

    @property
    def has_tensors(self) -> bool:
        return bool(np.any(self.trap_cubic) or np.any(self.trap_quartic))


def trap3d_from_frequencies(ref: IonSpecies, f_radial: tuple[float, float],
                            axial: AxialPotential,
                            trap_cubic=None, trap_quartic=None,
                            radial_mass_scaling: bool = True) -> TrapModel3D:
    """3D trap whose single-ion radial frequencies (Hz) match ``f_radial``.

    kappa = m_ref (2 pi f)^2 / (2 q_ref), so the single-ion mode frequencies
    of the returned model reproduce the inputs for the reference species.
    """
    fx, fy = f_radial
    if fx <= 0 or fy <= 0:
        raise ValueError("radial frequencies must be positive")
    kx = ref.mass * (2 * math.pi * fx) ** 2 / (2 * ref.charge_si)
    ky = ref.mass * (2 * math.pi * fy) ** 2 / (2 * ref.charge_si)
    return TrapModel3D(axial=axial, radial_curvatures=(kx, ky), reference=ref,
                       trap_cubic=trap_cubic, trap_quartic=trap_quartic,
                       radial_mass_scaling=radial_mass_scaling)


def harmonic_axial(kappa2: float, **kwargs) -> AxialPotential:
    """Purely harmonic axial potential."""
    return AxialPotential(kappa={2: kappa2}, **kwargs)


def axial_for_frequency(species: IonSpecies, f_hz: float) -> AxialPotential:
    """Harmonic axial potential giving a single ion the frequency f_hz."""
    if f_hz <= 0:
        raise ValueError("frequency must be positive")
    k2 = species.mass * (2 * math.pi * f_hz) ** 2 / (2 * species.charge_si)
    return harmonic_axial(k2)
