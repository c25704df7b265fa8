"""Normal modes of a chain at equilibrium.

The mass-weighted Hessian H'_ij = (1/sqrt(m_i m_j)) d2U/dz_i dz_j has
eigenvalues omega_alpha^2 and orthonormal eigenvectors e'_i^alpha.  Modes are
indexed in descending frequency (index 0 = highest) to match the ordering
used for the cross-coupling matrices.  Within each eigenvector the component
of the lowest-index coordinate is made non-negative.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh, expm
from scipy.special import eval_laguerre

from .constants import HBAR
from .statics import ChainConfiguration, energy_gradient, energy_hessian

EQUILIBRIUM_SLACK = 1e3  # tolerated residual, in units of the solver residual


class NotAtEquilibriumError(ValueError):
    pass


def _require_equilibrium(cfg: ChainConfiguration):
    g = energy_gradient(cfg.positions, cfg.species, cfg.potential)
    bound = max(cfg.residual_gradient * EQUILIBRIUM_SLACK, 1e-30)
    if np.max(np.abs(g)) > bound:
        raise NotAtEquilibriumError(
            "configuration is not at equilibrium "
            f"(max |grad| = {np.max(np.abs(g)):.3e} J/m)")


def hessian(cfg: ChainConfiguration) -> np.ndarray:
    """Mass-weighted Hessian (s^-2) at the solved equilibrium."""
    _require_equilibrium(cfg)
    h = energy_hessian(cfg.positions, cfg.species, cfg.potential)
    m = cfg.coordinate_masses
    return h / np.sqrt(np.outer(m, m))


def _fix_signs(vecs: np.ndarray) -> np.ndarray:
    out = vecs.copy()
    for k in range(out.shape[1]):
        for comp in out[:, k]:
            if abs(comp) >= 1e-12:
                if comp < 0:
                    out[:, k] = -out[:, k]
                break
    return out


@dataclass(frozen=True, eq=False)
class ModeSpectrum:
    """Normal-mode frequencies, eigenvectors, and ground-state lengths.

    ``eigenvectors[:, k]`` is the mass-weighted eigenvector of mode ``k``;
    frequencies are sorted descending.  ``sigma_prime[k]`` is
    sqrt(hbar / 2 omega_k) and ``sigma_ion[i, k]`` the signed ground-state
    extent e'_{ik} sigma'_k / sqrt(m_i) of coordinate ``i`` in mode ``k``.
    """

    frequencies: np.ndarray       # Hz, descending
    eigenvectors: np.ndarray      # (D, D), columns are modes
    sigma_prime: np.ndarray       # kg^(1/2) m, per mode
    sigma_ion: np.ndarray         # m, (D, D)
    config: ChainConfiguration

    @property
    def n_modes(self) -> int:
        return len(self.frequencies)

    @property
    def angular(self) -> np.ndarray:
        return 2 * np.pi * self.frequencies

    def ascending(self) -> np.ndarray:
        """Frequencies in ascending order (COM-like mode first)."""
        return self.frequencies[::-1]


def mode_spectrum(cfg: ChainConfiguration) -> ModeSpectrum:
    """Diagonalize the mass-weighted Hessian into a ModeSpectrum."""
    hw = hessian(cfg)
    w2, vecs = eigh(hw)
    if w2[0] <= 0:
        bad = [int(k) for k in np.flatnonzero(w2 <= 0)]
        raise ValueError(f"non-positive mode eigenvalue(s) at index {bad}: "
                         "potential does not confine")
    order = np.argsort(w2)[::-1]
    w2 = w2[order]
    vecs = _fix_signs(vecs[:, order])
    omega = np.sqrt(w2)
    sigma_prime = np.sqrt(HBAR / (2 * omega))
    m = cfg.coordinate_masses
    sigma_ion = vecs * sigma_prime[None, :] / np.sqrt(m)[:, None]
    return ModeSpectrum(frequencies=omega / (2 * np.pi), eigenvectors=vecs,
                        sigma_prime=sigma_prime, sigma_ion=sigma_ion, config=cfg)


def ground_state_size(spectrum: ModeSpectrum, ion: int, mode: int) -> float:
    """Signed ground-state rms extent of one coordinate in one mode (m)."""
    d = spectrum.n_modes
    if not (0 <= ion < d and 0 <= mode < d):
        raise IndexError(f"ion/mode index out of range for {d} coordinates")
    return float(spectrum.sigma_ion[ion, mode])


def lamb_dicke(spectrum: ModeSpectrum, delta_k: float, ion: int, mode: int) -> float:
    """Lamb-Dicke parameter eta = delta_k * |sigma_i| for an ion-mode pair."""
    if delta_k <= 0:
        raise ValueError("delta_k must be positive")
    return delta_k * abs(ground_state_size(spectrum, ion, mode))


def amplitude_ratio(spectrum: ModeSpectrum, mode: int, ion_a: int, ion_b: int) -> float:
    """|e'_{a,mode} / e'_{b,mode}| of mass-weighted eigenvector components."""
    d = spectrum.n_modes
    if not (0 <= mode < d and 0 <= ion_a < d and 0 <= ion_b < d):
        raise IndexError("index out of range")
    denom = spectrum.eigenvectors[ion_b, mode]
    if abs(denom) < 1e-9:
        raise ZeroDivisionError(
            f"eigenvector component of ion {ion_b} in mode {mode} is (near-)zero")
    return abs(spectrum.eigenvectors[ion_a, mode] / denom)


def carrier_matrix_element(eta: float, n: int) -> float:
    """Carrier Rabi-rate factor <n|exp(i eta (a + a^dag))|n>.

    Equals exp(-eta^2/2) L_n(eta^2); the flopping rate of a carrier
    transition on an ion in Fock state n is reduced by this factor.
    """
    if eta < 0:
        raise ValueError("eta must be non-negative")
    if n < 0 or int(n) != n:
        raise ValueError("n must be a non-negative integer")
    x = eta * eta
    return float(np.exp(-x / 2) * eval_laguerre(int(n), x))


def carrier_matrix_element_numeric(eta: float, n: int, cutoff: int | None = None) -> float:
    """Same matrix element from the truncated-Fock-space matrix exponential."""
    if cutoff is None:
        cutoff = max(4 * (n + 4), 40)
    a = np.diag(np.sqrt(np.arange(1, cutoff)), 1)
    u = expm(1j * eta * (a + a.T))
    return float(np.real(u[n, n]))
