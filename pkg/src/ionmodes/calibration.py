"""Ion-order shifts, anharmonicity nulling, gradient inference, sensitivity.

Odd-order axial anharmonicity shifts a mixed-species pair's mode frequencies
differently for the two ion orders, while even orders do not; the order
shift is therefore a clean handle for nulling odd terms with a trap
parameter.  A residual out-of-phase order shift at the in-phase null reveals
an axial pseudopotential gradient, whose strength scales inversely with ion
mass.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .modes import ModeSpectrum, mode_spectrum
from .potentials import AxialPotential
from .species import IonSpecies
from .statics import solve_equilibrium

IN_PHASE = "in_phase"
OUT_OF_PHASE = "out_of_phase"
NULL_TOLERANCE_HZ = 1.0
MAX_ROOT_ITER = 60


class BracketError(RuntimeError):
    """Root bracket does not enclose a sign change."""


@dataclass(frozen=True)
class PotentialFamily:
    """One-parameter family of axial potentials, affine in the parameter.

    kappa_actions[n] is d kappa_n / dp and field_action is dE/dp; p = 0
    reproduces the base potential.
    """

    base: AxialPotential
    kappa_actions: dict[int, float] = field(default_factory=dict)
    field_action: float = 0.0

    def at(self, p: float) -> AxialPotential:
        kappa = dict(self.base.kappa)
        for n, slope in self.kappa_actions.items():
            kappa[n] = kappa.get(n, 0.0) + slope * p
        return dataclasses.replace(self.base, kappa=kappa,
                                   uniform_field=self.base.uniform_field
                                   + self.field_action * p)


@dataclass(frozen=True)
class OrderShiftReport:
    """Mode frequency for both orders of a two-species pair."""

    mode_label: str
    f_ab: float   # Hz, speciesA at lower z
    f_ba: float   # Hz, order reversed
    delta: float  # Hz, f_ab - f_ba


def _labelled_frequency(spectrum: ModeSpectrum, mode_label: str) -> float:
    """Frequency of the two-ion mode with the requested phase relation."""
    if spectrum.n_modes != 2:
        raise ValueError("in/out-of-phase labelling applies to two-ion spectra")
    for k in range(2):
        v = spectrum.eigenvectors[:, k]
        in_phase = v[0] * v[1] > 0
        if (mode_label == IN_PHASE) == in_phase:
            return float(spectrum.frequencies[k])
    raise ValueError(f"no mode with label {mode_label!r}")


def order_shift(pot: AxialPotential, species_a: IonSpecies,
                species_b: IonSpecies, mode_label: str = IN_PHASE) -> OrderShiftReport:
    """Frequency difference of one mode between the AB and BA ion orders.

    The label is resolved by the eigenvector sign product, not by frequency
    order, so it survives mass-ratio changes.
    """
    if mode_label not in (IN_PHASE, OUT_OF_PHASE):
        raise ValueError(f"unknown mode label {mode_label!r}")
    f = {}
    for tag, order in (("ab", (species_a, species_b)),
                       ("ba", (species_b, species_a))):
        cfg = solve_equilibrium(order, pot)
        f[tag] = _labelled_frequency(mode_spectrum(cfg), mode_label)
    return OrderShiftReport(mode_label=mode_label, f_ab=f["ab"], f_ba=f["ba"],
                            delta=f["ab"] - f["ba"])


def null_parameter(family: PotentialFamily, species_a: IonSpecies,
                   species_b: IonSpecies, mode_label: str,
                   bracket: tuple[float, float],
                   tol_hz: float = NULL_TOLERANCE_HZ) -> float:
    """Parameter value nulling the order shift of the labelled mode.

    Bracketed root finding (Brent); requires a sign change over the bracket
    and verifies |delta(p*)| < tol_hz.
    """
    p_lo, p_hi = bracket

    def delta(p):
        return order_shift(family.at(p), species_a, species_b, mode_label).delta

    d_lo, d_hi = delta(p_lo), delta(p_hi)
    if max(abs(d_lo), abs(d_hi)) < tol_hz:
        raise BracketError(
            "no sign change: order shift is already null across the bracket")
    if not (np.isfinite(d_lo) and np.isfinite(d_hi)) or d_lo * d_hi > 0:
        raise BracketError(
            f"order shift does not change sign over the bracket: "
            f"delta({p_lo}) = {d_lo:.3g} Hz, delta({p_hi}) = {d_hi:.3g} Hz")
    p_star = brentq(delta, p_lo, p_hi, maxiter=MAX_ROOT_ITER,
                    xtol=1e-14 * max(abs(p_lo), abs(p_hi), 1.0))
    residual = delta(p_star)
    if abs(residual) >= tol_hz:
        raise BracketError(
            f"root residual {residual:.3g} Hz exceeds {tol_hz} Hz")
    return float(p_star)


def infer_pseudo_gradient(family: PotentialFamily, species_a: IonSpecies,
                          species_b: IonSpecies, measured_out_shift: float,
                          gradient_bracket: tuple[float, float],
                          param_bracket: tuple[float, float]) -> float:
    """Pseudopotential gradient (eV/m) explaining a residual order shift.

    Forward model: with trial gradient g, the family parameter is tuned to
    null the in-phase order shift (as in the experiment), and the remaining
    out-of-phase shift is compared with the measurement.  Root-finds g; a
    round trip through the forward model recovers the generating gradient.
    """
    if family.base.pseudo_reference is None:
        raise ValueError("family base must carry a pseudo_reference species")

    def residual(g):
        fam = dataclasses.replace(family,
                                  base=dataclasses.replace(family.base,
                                                           pseudo_gradient=g))
        p_star = null_parameter(fam, species_a, species_b, IN_PHASE, param_bracket)
        out = order_shift(fam.at(p_star), species_a, species_b, OUT_OF_PHASE)
        return out.delta - measured_out_shift

    g_lo, g_hi = gradient_bracket
    r_lo, r_hi = residual(g_lo), residual(g_hi)
    if r_lo * r_hi > 0:
        raise BracketError(
            f"no gradient root in bracket: residual({g_lo}) = {r_lo:.3g} Hz, "
            f"residual({g_hi}) = {r_hi:.3g} Hz")
    return float(brentq(residual, g_lo, g_hi, maxiter=MAX_ROOT_ITER,
                        xtol=1e-10 * max(abs(g_lo), abs(g_hi), 1e-3)))


def _mode_pick(spectrum: ModeSpectrum, mode) -> int:
    """Resolve 'com' (lowest, all-in-phase) or a descending index."""
    if mode == "com":
        k = spectrum.n_modes - 1  # lowest frequency
        return k
    k = int(mode)
    if not 0 <= k < spectrum.n_modes:
        raise IndexError(f"mode index {k} out of range")
    return k


def field_sensitivity(pot: AxialPotential, species, field: float,
                      mode="com") -> float:
    """Fractional squared-frequency (curvature) shift caused by a field.

    Re-solves the equilibrium with the uniform field added and returns
    (f(E)^2 - f(0)^2) / f(0)^2 for the selected mode: the relative change of
    the local curvature the displaced chain samples.  To first order in E
    this equals 3 E / (2 kappa2 lambda3) for a single ion in a cubic trap,
    and it vanishes for a purely harmonic potential.
    """
    species = tuple(species)
    f0 = _solved_frequency(pot, species, mode)
    shifted = dataclasses.replace(pot, uniform_field=pot.uniform_field + field)
    fe = _solved_frequency(shifted, species, mode)
    return float((fe**2 - f0**2) / f0**2)


def _solved_frequency(pot, species, mode):
    cfg = solve_equilibrium(species, pot)
    spec = mode_spectrum(cfg)
    return spec.frequencies[_mode_pick(spec, mode)]


@dataclass(frozen=True)
class ComScanResult:
    """Centre-of-mass frequency versus ion number, with a linear fit."""

    counts: tuple[int, ...]
    frequencies: tuple[float, ...]  # Hz
    slope: float                    # Hz per ion
    intercept: float                # Hz
    r_squared: float

    @property
    def residuals(self) -> np.ndarray:
        n = np.array(self.counts, dtype=float)
        return np.array(self.frequencies) - (self.slope * n + self.intercept)


def com_frequency_scan(pot: AxialPotential, species: IonSpecies,
                       counts) -> ComScanResult:
    """Lowest (in-phase) axial mode frequency for chains of N equal ions."""
    counts = [int(n) for n in counts]
    if any(n < 1 for n in counts):
        raise ValueError("ion counts must be positive")
    freqs = []
    for n in counts:
        cfg = solve_equilibrium((species,) * n, pot)
        spec = mode_spectrum(cfg)
        freqs.append(float(spec.frequencies[-1]))
    n_arr = np.array(counts, dtype=float)
    f_arr = np.array(freqs)
    if len(counts) >= 2:
        slope, intercept = np.polyfit(n_arr, f_arr, 1)
        pred = slope * n_arr + intercept
        ss_res = float(np.sum((f_arr - pred) ** 2))
        ss_tot = float(np.sum((f_arr - f_arr.mean()) ** 2))
        r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    else:
        slope, intercept, r2 = 0.0, float(f_arr[0]), 1.0
    return ComScanResult(counts=tuple(counts), frequencies=tuple(freqs),
                         slope=float(slope), intercept=float(intercept),
                         r_squared=float(r2))
