import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ionmodes import ChainConfiguration, NotAtEquilibriumError, \
    amplitude_ratio, axial_from_lambdas, carrier_matrix_element, \
    characteristic_length, ground_state_size, harmonic_axial, hessian, \
    lamb_dicke, mode_spectrum, solve_equilibrium
from ionmodes.constants import EPSILON_0, HBAR
from ionmodes.modes import carrier_matrix_element_numeric

from conftest import KAPPA2, LAMBDA3

DELTA_K = 2 * math.pi * math.sqrt(2) / 313e-9  # counter-propagating Raman pair


@pytest.fixture
def bmmb_harmonic(be, mg, pot_harmonic):
    cfg = solve_equilibrium([be, mg, mg, be], pot_harmonic)
    return mode_spectrum(cfg)


@pytest.fixture
def bmmb_cubic(be, mg, pot_cubic):
    cfg = solve_equilibrium([be, mg, mg, be], pot_cubic)
    return mode_spectrum(cfg)


class TestHessian:
    def test_single_ion(self, be, pot_harmonic):
        cfg = solve_equilibrium([be], pot_harmonic)
        h = hessian(cfg)
        assert h.shape == (1, 1)
        assert h[0, 0] == pytest.approx(2 * be.charge_si * KAPPA2 / be.mass,
                                        rel=1e-12)

    def test_two_equal_ions_eigenvalues(self, be, pot_harmonic):
        cfg = solve_equilibrium([be, be], pot_harmonic)
        w2 = np.linalg.eigvalsh(hessian(cfg))
        unit = 2 * be.charge_si * KAPPA2 / be.mass
        assert w2 == pytest.approx([unit, 3 * unit], rel=1e-10)

    def test_coulomb_off_diagonal(self, be, mg, pot_harmonic):
        cfg = solve_equilibrium([be, mg], pot_harmonic)
        d = cfg.positions[1] - cfg.positions[0]
        h = hessian(cfg)
        expected = -be.charge_si**2 / (
            2 * math.pi * EPSILON_0 * d**3 * math.sqrt(be.mass * mg.mass))
        assert h[0, 1] == pytest.approx(expected, rel=1e-12)

    def test_rejects_non_equilibrium(self, be, pot_harmonic):
        cfg = solve_equilibrium([be, be], pot_harmonic)
        off = ChainConfiguration(species=cfg.species,
                                 positions=cfg.positions * 1.05,
                                 potential=cfg.potential,
                                 residual_gradient=cfg.residual_gradient)
        with pytest.raises(NotAtEquilibriumError):
            hessian(off)


class TestModeSpectrum:
    def test_single_ion_frequency(self, be, pot_harmonic):
        cfg = solve_equilibrium([be], pot_harmonic)
        spec = mode_spectrum(cfg)
        expected = math.sqrt(2 * be.charge_si * KAPPA2 / be.mass) / (2 * math.pi)
        assert spec.frequencies[0] == pytest.approx(expected, rel=1e-12)
        assert expected == pytest.approx(2.655e6, rel=1e-3)

    def test_stretch_to_com_ratio(self, be, pot_harmonic):
        cfg = solve_equilibrium([be, be], pot_harmonic)
        spec = mode_spectrum(cfg)
        assert spec.frequencies[0] / spec.frequencies[1] == pytest.approx(
            math.sqrt(3), rel=1e-12)
        assert spec.eigenvectors[:, 1] == pytest.approx(
            np.array([1, 1]) / math.sqrt(2), rel=1e-12)

    def test_orthonormality(self, bmmb_cubic):
        e = bmmb_cubic.eigenvectors
        assert np.max(np.abs(e.T @ e - np.eye(4))) < 1e-10

    def test_reconstruction(self, bmmb_cubic):
        e = bmmb_cubic.eigenvectors
        w2 = (2 * math.pi * bmmb_cubic.frequencies) ** 2
        h = hessian(bmmb_cubic.config)
        assert np.max(np.abs(e @ np.diag(w2) @ e.T - h)) < 1e-10 * np.max(np.abs(h))

    def test_eigenvalue_sum_matches_trace(self, bmmb_cubic):
        w2 = (2 * math.pi * bmmb_cubic.frequencies) ** 2
        tr = np.trace(hessian(bmmb_cubic.config))
        assert np.sum(w2) == pytest.approx(tr, rel=1e-10)

    def test_com_frequency_independent_of_ion_number(self, be, pot_harmonic):
        single = mode_spectrum(solve_equilibrium([be], pot_harmonic)).frequencies[0]
        for n in range(1, 9):
            spec = mode_spectrum(solve_equilibrium([be] * n, pot_harmonic))
            assert spec.frequencies[-1] == pytest.approx(single, rel=1e-10)

    def test_unequal_pair_closed_form(self, be, mg, pot_harmonic):
        spec = mode_spectrum(solve_equilibrium([be, mg], pot_harmonic))
        mu = be.mass / mg.mass
        s = math.sqrt(mu**2 - mu + 1)
        w1 = math.sqrt(2 * be.charge_si * KAPPA2 / be.mass)
        expected = sorted([w1 * math.sqrt(1 + mu + s), w1 * math.sqrt(1 + mu - s)],
                          reverse=True)
        assert 2 * math.pi * spec.frequencies == pytest.approx(expected, rel=1e-10)

    def test_bmmb_harmonic_eigenvectors(self, bmmb_harmonic):
        asc = bmmb_harmonic.eigenvectors[:, ::-1]  # ascending frequency
        assert asc[:, 2] == pytest.approx([0.629, -0.322, -0.322, 0.629],
                                          abs=0.01)
        assert asc[:, 3] == pytest.approx([0.532, -0.465, 0.465, -0.532],
                                          abs=0.01)

    def test_bmmb_cubic_eigenvectors(self, bmmb_cubic):
        asc = bmmb_cubic.eigenvectors[:, ::-1]
        assert asc[:, 2] == pytest.approx([0.474, -0.167, -0.452, 0.736],
                                          abs=0.01)
        assert asc[:, 3] == pytest.approx([0.686, -0.531, 0.359, -0.342],
                                          abs=0.01)

    def test_perturbation_order_scaling(self, be, pot_harmonic):
        """Eigenvector shifts are first order in l/lambda3, frequencies second."""
        l = characteristic_length(be, KAPPA2)
        spec0 = mode_spectrum(solve_equilibrium([be, be], pot_harmonic))
        xs = np.array([0.002, 0.004, 0.008, 0.016, 0.032])
        dvec, dfreq = [], []
        for x in xs:
            pot = axial_from_lambdas(KAPPA2, {3: l / x})
            spec = mode_spectrum(solve_equilibrium([be, be], pot))
            dvec.append(np.max(np.abs(spec.eigenvectors - spec0.eigenvectors)))
            dfreq.append(np.max(np.abs(spec.frequencies / spec0.frequencies - 1)))
        p_vec = np.polyfit(np.log(xs), np.log(dvec), 1)[0]
        p_freq = np.polyfit(np.log(xs), np.log(dfreq), 1)[0]
        assert p_vec == pytest.approx(1.0, abs=0.15)
        assert p_freq == pytest.approx(2.0, abs=0.15)


class TestGroundStateSize:
    def test_single_ion_at_one_megahertz(self, be):
        from ionmodes import axial_for_frequency

        cfg = solve_equilibrium([be], axial_for_frequency(be, 1e6))
        spec = mode_spectrum(cfg)
        sigma = ground_state_size(spec, 0, 0)
        assert sigma == pytest.approx(
            math.sqrt(HBAR / (2 * be.mass * 2 * math.pi * 1e6)), rel=1e-12)
        assert sigma == pytest.approx(23.7e-9, rel=2e-3)

    def test_com_mode_two_ions(self, be, pot_harmonic):
        single = mode_spectrum(solve_equilibrium([be], pot_harmonic))
        pair = mode_spectrum(solve_equilibrium([be, be], pot_harmonic))
        assert ground_state_size(pair, 0, 1) == pytest.approx(
            ground_state_size(single, 0, 0) / math.sqrt(2), rel=1e-10)

    def test_zero_component_gives_zero(self, be, pot_harmonic):
        spec = mode_spectrum(solve_equilibrium([be] * 3, pot_harmonic))
        # middle ion does not move in the three-ion stretch mode
        stretch = 1  # second-highest of three axial modes
        assert abs(spec.eigenvectors[1, stretch]) < 1e-12
        assert abs(ground_state_size(spec, 1, stretch)) < 1e-21

    def test_index_errors(self, be, pot_harmonic):
        spec = mode_spectrum(solve_equilibrium([be], pot_harmonic))
        with pytest.raises(IndexError):
            ground_state_size(spec, 1, 0)


class TestLambDicke:
    def test_mixed_pair_in_phase(self, be, mg, pot_harmonic):
        spec = mode_spectrum(solve_equilibrium([be, mg], pot_harmonic))
        eta = lamb_dicke(spec, DELTA_K, ion=0, mode=1)  # in-phase = lower
        assert eta == pytest.approx(0.18, abs=0.01)

    def test_linear_in_delta_k(self, be, pot_harmonic):
        spec = mode_spectrum(solve_equilibrium([be], pot_harmonic))
        assert lamb_dicke(spec, 2 * DELTA_K, 0, 0) == pytest.approx(
            2 * lamb_dicke(spec, DELTA_K, 0, 0), rel=1e-14)

    def test_matches_ground_state_size(self, be, pot_harmonic):
        spec = mode_spectrum(solve_equilibrium([be], pot_harmonic))
        assert lamb_dicke(spec, DELTA_K, 0, 0) == pytest.approx(
            DELTA_K * abs(ground_state_size(spec, 0, 0)), rel=1e-14)

    def test_nonpositive_delta_k_rejected(self, be, pot_harmonic):
        spec = mode_spectrum(solve_equilibrium([be], pot_harmonic))
        with pytest.raises(ValueError):
            lamb_dicke(spec, 0.0, 0, 0)


class TestAmplitudeRatio:
    def test_bmmb_harmonic_symmetric(self, bmmb_harmonic):
        asc_mode4 = 0  # highest frequency
        assert amplitude_ratio(bmmb_harmonic, asc_mode4, 0, 3) == pytest.approx(
            1.0, rel=1e-10)

    def test_equal_mass_com_any_pair(self, be, pot_harmonic):
        spec = mode_spectrum(solve_equilibrium([be] * 4, pot_harmonic))
        for a in range(4):
            for b in range(4):
                assert amplitude_ratio(spec, 3, a, b) == pytest.approx(1.0,
                                                                       rel=1e-9)

    def test_bmmb_cubic_ratios(self, bmmb_cubic):
        mode3, mode4 = 1, 0  # descending indices of the two highest modes
        r3 = amplitude_ratio(bmmb_cubic, mode3, 0, 3)
        r4 = amplitude_ratio(bmmb_cubic, mode4, 3, 0)
        assert r3 == pytest.approx(0.644, abs=0.01)
        assert r4 == pytest.approx(0.499, abs=0.01)

    def test_near_zero_denominator(self, be, pot_harmonic):
        spec = mode_spectrum(solve_equilibrium([be] * 3, pot_harmonic))
        with pytest.raises(ZeroDivisionError):
            amplitude_ratio(spec, 1, 0, 1)  # middle ion is a stretch node


class TestCarrierMatrixElement:
    def test_ground_state(self):
        eta = 0.3
        assert carrier_matrix_element(eta, 0) == pytest.approx(
            math.exp(-eta**2 / 2), rel=1e-14)

    def test_zero_eta(self):
        for n in (0, 3, 17):
            assert carrier_matrix_element(0.0, n) == 1.0

    def test_half_rate_near_n17(self):
        assert carrier_matrix_element(0.18, 17) == pytest.approx(0.5, abs=0.1)

    @given(eta=st.floats(0.0, 0.6), n=st.integers(0, 25))
    @settings(max_examples=40, deadline=None)
    def test_matches_fock_space_exponential(self, eta, n):
        exact = carrier_matrix_element(eta, n)
        numeric = carrier_matrix_element_numeric(eta, n)
        assert numeric == pytest.approx(exact, abs=1e-8)

    def test_invalid_arguments(self):
        with pytest.raises(ValueError):
            carrier_matrix_element(-0.1, 0)
        with pytest.raises(ValueError):
            carrier_matrix_element(0.1, -1)
