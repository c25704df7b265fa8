import itertools
import math

import numpy as np
import pytest

from ionmodes import ChainConfiguration, ResonanceError, axial_for_frequency, \
    axial_from_lambdas, chi_from_configuration, chi_matrix, derivative_tensors, \
    detect_resonances, frequency_shift, harmonic_axial, mode_spectrum, \
    mode_tensors, solve_equilibrium, trap3d_from_frequencies
from ionmodes.anharmonic import DerivativeTensors, ModeTensors, occupation_vector
from ionmodes.constants import COULOMB, HBAR, PLANCK
from ionmodes.modes import ModeSpectrum

from conftest import KAPPA2, make_cfg, rel_err


def fake_spectrum(freqs_hz):
    """Spectrum stub for formula-level tests (synthetic G tensors)."""
    freqs = np.asarray(freqs_hz, dtype=float)
    d = len(freqs)
    omega = 2 * np.pi * freqs
    return ModeSpectrum(frequencies=freqs, eigenvectors=np.eye(d),
                        sigma_prime=np.sqrt(HBAR / (2 * omega)),
                        sigma_ion=np.zeros((d, d)), config=None)


def symmetric_tensor(rng, shape, scale):
    t = rng.standard_normal(shape)
    perms = list(itertools.permutations(range(len(shape))))
    return sum(np.transpose(t, p) for p in perms) / len(perms) * scale


@pytest.fixture
def mgh_trap(mgh):
    axial = axial_for_frequency(mgh, 1.8e6)
    return trap3d_from_frequencies(mgh, (7e6, 5e6), axial)


@pytest.fixture
def mgh_pair_chi(mgh, mgh_trap):
    cfg = solve_equilibrium([mgh, mgh], mgh_trap)
    with pytest.warns(RuntimeWarning):
        return chi_from_configuration(cfg)


class TestDerivativeTensors:
    def test_single_ion_harmonic_zero(self, be, pot_harmonic):
        cfg = solve_equilibrium([be], pot_harmonic)
        t = derivative_tensors(cfg)
        assert not t.A3.any()
        assert not t.A4.any()

    def test_single_ion_cubic_entry(self, be):
        pot = axial_from_lambdas(KAPPA2, {3: -230e-6})
        cfg = solve_equilibrium([be], pot)
        t = derivative_tensors(cfg)
        # raw third derivative 6 q kappa3, normalized by 3! and mass-weighted
        z0 = cfg.positions[0]
        kappa_local = pot.kappa[3]
        expected = be.charge_si * kappa_local / be.mass**1.5
        assert t.A3[0, 0, 0] == pytest.approx(expected, rel=1e-10)
        assert np.count_nonzero(t.A3) == 1

    def test_two_ion_coulomb_third_derivative(self, be, pot_harmonic):
        cfg = solve_equilibrium([be, be], pot_harmonic)
        d = cfg.positions[1] - cfg.positions[0]
        t = derivative_tensors(cfg)
        # pure third derivative with respect to the higher-z ion coordinate
        raw = t.A3[1, 1, 1] * 6 * be.mass**1.5
        assert raw == pytest.approx(-6 * COULOMB * be.charge_si**2 / d**4,
                                    rel=1e-10)

    def test_permutation_symmetry(self, be, mg, pot_anharmonic):
        cfg = solve_equilibrium([be, mg, be], pot_anharmonic)
        t = derivative_tensors(cfg)
        for p in itertools.permutations(range(3)):
            assert np.allclose(t.A3, np.transpose(t.A3, p), rtol=1e-10, atol=0)
        for p in itertools.permutations(range(4)):
            assert np.allclose(t.A4, np.transpose(t.A4, p), rtol=1e-10, atol=0)

    def test_axial_tensors_match_finite_differences(self, be, mg,
                                                    pot_anharmonic):
        from ionmodes import energy_hessian

        species = (be, mg)
        z = np.array([-2.3e-6, 2.0e-6])
        cfg = make_cfg(species, pot_anharmonic, z)
        t = derivative_tensors(cfg)
        sq = np.sqrt(np.array([be.mass, mg.mass]))
        raw3 = t.A3 * 6 * np.einsum("i,j,k->ijk", sq, sq, sq)
        raw4 = t.A4 * 24 * np.einsum("i,j,k,l->ijkl", sq, sq, sq, sq)
        h = 1e-3 * (z[1] - z[0])
        for k in range(2):
            def hess_at(zk, k=k):
                zz = z.copy()
                zz[k] = zk
                return energy_hessian(zz, species, pot_anharmonic)

            fd3 = ((4 * (hess_at(z[k] + h / 2) - hess_at(z[k] - h / 2)) / h
                    - (hess_at(z[k] + h) - hess_at(z[k] - h)) / (2 * h)) / 3)
            assert np.max(rel_err(fd3, raw3[:, :, k],
                                  floor=1e-9 * np.max(np.abs(raw3)))) < 1e-5

            def third_at(zk, k=k):
                zz = z.copy()
                zz[k] = zk
                tt = derivative_tensors(make_cfg(species, pot_anharmonic, zz))
                return tt.A3 * 6 * np.einsum("i,j,k->ijk", sq, sq, sq)

            fd4 = ((4 * (third_at(z[k] + h / 2) - third_at(z[k] - h / 2)) / h
                    - (third_at(z[k] + h) - third_at(z[k] - h)) / (2 * h)) / 3)
            assert np.max(rel_err(fd4, raw4[:, :, :, k],
                                  floor=1e-9 * np.max(np.abs(raw4)))) < 1e-5

    def test_3d_tensors_match_finite_differences(self, mgh, mgh_trap):
        rng = np.random.default_rng(3)
        cubic = symmetric_tensor(rng, (3, 3, 3), 5e12)
        quartic = symmetric_tensor(rng, (3, 3, 3, 3), 1e17)
        trap = trap3d_from_frequencies(mgh, (7e6, 5e6),
                                       axial_for_frequency(mgh, 1.8e6),
                                       trap_cubic=cubic, trap_quartic=quartic)
        from ionmodes import energy_hessian

        species = (mgh, mgh)
        pos = np.array([[0.05e-6, -0.04e-6, -2.1e-6],
                        [-0.03e-6, 0.06e-6, 2.2e-6]])
        cfg = make_cfg(species, trap, pos)
        t = derivative_tensors(cfg)
        sq = np.sqrt(cfg.coordinate_masses)
        raw3 = t.A3 * 6 * np.einsum("i,j,k->ijk", sq, sq, sq)
        h = 1e-9
        flat = pos.ravel()
        for k in (0, 2, 4, 5):  # sample of coordinates
            def hess_at(vk, k=k):
                vv = flat.copy()
                vv[k] = vk
                return energy_hessian(vv.reshape(2, 3), species, trap)

            fd3 = ((4 * (hess_at(flat[k] + h / 2) - hess_at(flat[k] - h / 2)) / h
                    - (hess_at(flat[k] + h) - hess_at(flat[k] - h)) / (2 * h)) / 3)
            assert np.max(rel_err(fd3, raw3[:, :, k],
                                  floor=1e-7 * np.max(np.abs(raw3)))) < 1e-5


class TestModeTensors:
    def test_zero_input(self, be, pot_harmonic):
        cfg = solve_equilibrium([be], pot_harmonic)
        spec = mode_spectrum(cfg)
        t = derivative_tensors(cfg)
        g = mode_tensors(t, spec)
        assert not g.G3.any() and not g.G4.any()

    def test_single_mode_scaling(self, be):
        pot = axial_from_lambdas(KAPPA2, {3: -230e-6})
        cfg = solve_equilibrium([be], pot)
        spec = mode_spectrum(cfg)
        t = derivative_tensors(cfg)
        g = mode_tensors(t, spec)
        assert g.G3[0, 0, 0] == pytest.approx(
            spec.sigma_prime[0] ** 3 * t.A3[0, 0, 0], rel=1e-12)

    def test_com_cubic_coupling_vanishes(self, be, pot_harmonic):
        # internal Coulomb forces cannot couple to rigid translation
        cfg = solve_equilibrium([be, be], pot_harmonic)
        spec = mode_spectrum(cfg)
        g = mode_tensors(derivative_tensors(cfg), spec)
        com = 1  # lower frequency of the two axial modes
        assert abs(g.G3[com, com, com]) < 1e-12 * np.max(np.abs(g.G3))

    def test_dimension_mismatch(self, be, mgh, pot_harmonic, mgh_trap):
        cfg1 = solve_equilibrium([be], pot_harmonic)
        cfg2 = solve_equilibrium([mgh], mgh_trap)
        with pytest.raises(ValueError):
            mode_tensors(derivative_tensors(cfg1), mode_spectrum(cfg2))

    def test_permutation_symmetry(self, mgh, mgh_trap):
        cfg = solve_equilibrium([mgh, mgh], mgh_trap)
        g = mode_tensors(derivative_tensors(cfg), mode_spectrum(cfg))
        for p in itertools.permutations(range(3)):
            assert np.allclose(g.G3, np.transpose(g.G3, p), rtol=1e-10,
                               atol=1e-10 * np.max(np.abs(g.G3)))


class TestFrequencyShift:
    def test_zero_couplings(self):
        spec = fake_spectrum([5e6, 1.9e6])
        g = ModeTensors(G3=np.zeros((2, 2, 2)), G4=np.zeros((2, 2, 2, 2)))
        assert frequency_shift(g, spec, [0, 0], 0) == 0.0

    def test_single_mode_quartic(self):
        spec = fake_spectrum([1.9e6])
        g4 = 1e-3 * HBAR * spec.angular[0]
        g = ModeTensors(G3=np.zeros((1, 1, 1)), G4=np.full((1, 1, 1, 1), g4))
        for n in (0, 1, 5):
            assert frequency_shift(g, spec, [n], 0) == pytest.approx(
                12 * (n + 1) * g4 / PLANCK, rel=1e-14)

    def test_single_mode_cubic_ground(self):
        spec = fake_spectrum([1.9e6])
        g3 = 1e-3 * HBAR * spec.angular[0]
        g = ModeTensors(G3=np.full((1, 1, 1), g3), G4=np.zeros((1, 1, 1, 1)))
        expected = -60 / PLANCK * g3**2 / (HBAR * spec.angular[0])
        assert frequency_shift(g, spec, [0], 0) == pytest.approx(expected,
                                                                 rel=1e-14)

    def test_linearity_in_occupations(self):
        rng = np.random.default_rng(17)
        spec = fake_spectrum([7.3e6, 4.7e6, 1.9e6])
        scale = 1e-4 * HBAR * np.mean(spec.angular)
        g = ModeTensors(G3=symmetric_tensor(rng, (3, 3, 3), scale),
                        G4=symmetric_tensor(rng, (3, 3, 3, 3), scale * 1e-3))
        chi = chi_matrix(g, spec)
        for _ in range(5):
            occ = rng.integers(0, 7, size=3)
            for z in range(3):
                base = frequency_shift(g, spec, np.zeros(3, int), z)
                full = frequency_shift(g, spec, occ, z)
                assert full - base == pytest.approx(float(chi.chi[z] @ occ),
                                                    rel=1e-10, abs=1e-12)

    def test_invalid_occupations(self):
        spec = fake_spectrum([5e6, 1.9e6])
        g = ModeTensors(G3=np.zeros((2, 2, 2)), G4=np.zeros((2, 2, 2, 2)))
        with pytest.raises(ValueError):
            frequency_shift(g, spec, [0], 0)
        with pytest.raises(ValueError):
            frequency_shift(g, spec, [-1, 0], 0)
        with pytest.raises(IndexError):
            frequency_shift(g, spec, [0, 0], 5)


class TestDetectResonances:
    def test_two_to_one_flagged(self):
        spec = fake_spectrum([4.0e6, 2.0e6])
        flags = detect_resonances(spec)
        assert any(f.kind == "2:1" and f.value == 0.0 for f in flags)

    def test_single_ion_surface_frequencies_clean(self):
        assert detect_resonances(fake_spectrum([7e6, 5e6, 1.8e6])) == []

    def test_sum_resonance_flagged(self):
        spec = fake_spectrum([5.0e6, 3.0e6, 2.0e6])
        flags = detect_resonances(spec)
        assert any(f.kind == "sum" for f in flags)

    def test_guard_raises_on_hard_resonance(self):
        spec = fake_spectrum([4.0e6, 2.0e6])
        g = ModeTensors(G3=np.zeros((2, 2, 2)), G4=np.zeros((2, 2, 2, 2)))
        with pytest.raises(ResonanceError):
            frequency_shift(g, spec, [0, 0], 0)
        with pytest.raises(ResonanceError):
            chi_matrix(g, spec)

    def test_warning_band(self):
        spec = fake_spectrum([4.01e6, 2.0e6])  # |4w_a^2-w_Z^2| ~ 0.005 max^2
        g = ModeTensors(G3=np.zeros((2, 2, 2)), G4=np.zeros((2, 2, 2, 2)))
        with pytest.warns(RuntimeWarning, match="near-resonant"):
            chi = chi_matrix(g, spec)
        assert chi.near_resonances


class TestChiMatrix:
    def test_single_ion_harmonic_zero(self, mgh, mgh_trap):
        cfg = solve_equilibrium([mgh], mgh_trap)
        chi = chi_from_configuration(cfg)
        assert np.max(np.abs(chi.chi)) < 1e-10

    def test_coulomb_only_reference_values(self, mgh_pair_chi):
        chi = mgh_pair_chi
        assert chi.mode_frequencies / 1e6 == pytest.approx(
            [7.0, 6.7646, 5.0, 4.6648, 3.1177, 1.8], abs=2e-4)
        assert chi.chi[4, 4] == pytest.approx(6.781, abs=0.01)
        assert chi.chi[3, 4] == pytest.approx(-15.305, abs=0.01)
        assert chi.chi[1, 4] == pytest.approx(-9.901, abs=0.01)
        assert chi.chi[3, 3] == pytest.approx(2.557, abs=0.01)
        assert chi.chi[1, 1] == pytest.approx(1.141, abs=0.01)
        assert chi.provenance == {"coulomb": True, "trap_cubic": False,
                                  "trap_quartic": False}

    def test_com_row_and_column_vanish(self, mgh_pair_chi):
        # the axial centre of mass is immune to Coulomb-only anharmonicity
        assert np.max(np.abs(mgh_pair_chi.chi[5, :])) < 0.1
        assert np.max(np.abs(mgh_pair_chi.chi[:, 5])) < 0.1

    def test_uniform_field_leaves_chi_invariant(self, mgh):
        axial = axial_for_frequency(mgh, 1.8e6)
        trap0 = trap3d_from_frequencies(mgh, (7e6, 5e6), axial)
        import dataclasses

        axial_f = dataclasses.replace(axial, uniform_field=5.0)
        trap_f = trap3d_from_frequencies(mgh, (7e6, 5e6), axial_f)
        with pytest.warns(RuntimeWarning):
            chi0 = chi_from_configuration(solve_equilibrium([mgh, mgh], trap0))
        with pytest.warns(RuntimeWarning):
            chi_f = chi_from_configuration(solve_equilibrium([mgh, mgh], trap_f))
        scale = np.max(np.abs(chi0.chi))
        assert np.max(np.abs(chi0.chi - chi_f.chi)) < 1e-6 * scale

    def test_calibrated_trap_tensor_round_trip(self, mgh):
        """Trap tensors calibrated to the single-ion reference couplings.

        For one ion the per-quantum couplings depend linearly on the quartic
        tensor (24 G4_aaZZ off-diagonal, 12 G4_ZZZZ diagonal), so calibration
        is a closed-form solve; recomputing chi from the calibrated trap must
        reproduce the reference matrix through the full tensor pipeline.
        """
        target = np.array([[-2.9, -2.7, 0.04],
                           [-2.7, -0.9, 0.2],
                           [0.04, 0.2, -0.1]])
        axial = axial_for_frequency(mgh, 1.8e6)
        base = trap3d_from_frequencies(mgh, (7e6, 5e6), axial)
        spec = mode_spectrum(solve_equilibrium([mgh], base))
        sig = spec.sigma_prime  # descending: x, y, z
        quartic = np.zeros((3, 3, 3, 3))
        for z in range(3):
            for a in range(3):
                mult = 12.0 if a == z else 24.0
                value = target[z, a] * PLANCK * mgh.mass**2 / (
                    mult * sig[a] ** 2 * sig[z] ** 2 * mgh.charge_si)
                for p in set(itertools.permutations((a, a, z, z))):
                    quartic[p] = value
        trap = trap3d_from_frequencies(mgh, (7e6, 5e6), axial,
                                       trap_quartic=quartic)
        chi = chi_from_configuration(solve_equilibrium([mgh], trap))
        assert np.max(np.abs(chi.chi - target)) < 0.01
        assert chi.provenance["trap_quartic"]
        # recomputation from the same trap is deterministic
        chi_again = chi_from_configuration(solve_equilibrium([mgh], trap))
        assert np.array_equal(chi_again.chi, chi.chi)


class TestOccupationVector:
    def test_validation(self):
        occ = occupation_vector([0, 1, 2], 3)
        assert occ.dtype == int
        with pytest.raises(ValueError):
            occupation_vector([0, 1], 3)
        with pytest.raises(ValueError):
            occupation_vector([0, -1, 0], 3)
