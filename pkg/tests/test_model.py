"""Parameter derivation and Hamiltonian construction."""

import math
from dataclasses import replace

import numpy as np
import pytest

from spinmagphon.linalg import SpaceLayout, hermitian_eigenvalues
from spinmagphon.model import (
    Detunings,
    ParameterError,
    blue_detuning,
    build_hamiltonian_lab,
    build_hamiltonian_squeezed,
    cantilever_params,
    collapse_operators,
    derive_params,
    excitation_number,
    levitated_yig_params,
    occupation_operators,
    red_detuning,
    squeeze_unitary,
    to_lambda_units,
    trapped_diamond_params,
)

TWO_PI = 2.0 * math.pi


@pytest.fixture(scope="module")
def reference_point():
    return derive_params(trapped_diamond_params(r_requested=4.5))


class TestDeriveParams:
    def test_reference_coupling_chain(self, reference_point):
        dp = reference_point
        # quoted operating-point values, tolerances from the acceptance gate
        assert dp.lambda_eff / TWO_PI == pytest.approx(1.7e6, rel=0.30)
        assert dp.g0 / dp.lam == pytest.approx(30.0, rel=0.10)
        assert dp.gamma_th / TWO_PI == pytest.approx(2.0, rel=0.10)
        assert 10.5e3 < dp.Gamma_m / TWO_PI < 42e3          # within factor 2 of 21 kHz
        assert 1e5 / 3 < dp.C < 3e5                          # within factor 3 of 1e5

    def test_exact_relations(self, reference_point):
        dp = reference_point
        assert dp.lambda_eff == dp.lam * math.exp(dp.r)
        assert dp.Delta_m == dp.delta_m / math.cosh(2 * dp.r)
        assert dp.Gamma_m == math.exp(2 * dp.r) * dp.gamma_th
        assert dp.C == dp.lambda_eff**3 / (dp.Gamma_m * dp.gamma_K * dp.gamma_s)
        assert math.tanh(2 * dp.r) == pytest.approx(dp.Omega_p / dp.delta_m, abs=1e-12)

    def test_coupling_ratio_identity(self, reference_point):
        dp = reference_point
        phys = trapped_diamond_params(r_requested=4.5)
        expected = 3 * math.exp(dp.r) * dp.z_zpf / (phys.d + phys.R + phys.R_s)
        assert dp.lambda_eff / dp.g0 == pytest.approx(expected, rel=1e-13)

    def test_no_squeezing_limit(self):
        dp = derive_params(trapped_diamond_params(r_requested=0.0))
        assert dp.lambda_eff == dp.lam
        assert dp.Gamma_m == dp.gamma_th
        assert dp.Delta_m == dp.delta_m
        assert dp.Omega_p == 0.0

    def test_voltage_route_matches_requested_r(self):
        """Solve the drive amplitude for a target squeezing, feed it back as U_T."""
        target = derive_params(trapped_diamond_params(r_requested=1.25))
        phys = trapped_diamond_params(r_requested=1.25)
        hbar = 1.0545718e-34
        q = 1e-15
        U_T = target.Omega_p * hbar * phys.d_T**2 / (2 * q * target.z_zpf**2)
        dp = derive_params(trapped_diamond_params(r_requested=None, U_T=U_T, q=q))
        assert dp.r == pytest.approx(1.25, rel=1e-12)
        assert dp.Omega_p == pytest.approx(target.Omega_p, rel=1e-12)

    def test_voltage_route_rejects_overdrive(self):
        phys = trapped_diamond_params(r_requested=1.0)
        hbar = 1.0545718e-34
        dp = derive_params(phys)
        q = 1e-15
        U_T = 1.5 * phys.delta_m * hbar * phys.d_T**2 / (2 * q * dp.z_zpf**2)
        with pytest.raises(ParameterError):
            derive_params(trapped_diamond_params(r_requested=None, U_T=U_T, q=q))

    def test_rejects_bad_inputs(self):
        with pytest.raises(ParameterError):
            derive_params(trapped_diamond_params(r_requested=4.5, R=-1e-9))
        with pytest.raises(ParameterError):
            derive_params(trapped_diamond_params(r_requested=7.0))
        with pytest.raises(ParameterError):
            derive_params(trapped_diamond_params(r_requested=None))  # neither route

    def test_scaling_with_radius(self):
        """Asymptotically the coupling falls off as radius^(-5/2); at the
        working radii (tens of nm) the distance offset softens the slope but
        the decrease stays strictly monotonic."""
        def lam_eff(R_m):
            return derive_params(trapped_diamond_params(r_requested=3.0, R=R_m)).lambda_eff

        asymptotic = [lam_eff(R) for R in (0.5e-6, 1.0e-6, 2.0e-6)]
        slope = math.log(asymptotic[2] / asymptotic[0]) / math.log(4.0)
        assert -2.6 < slope < -2.3

        working = [lam_eff(R) for R in (50e-9, 100e-9, 200e-9)]
        assert working[0] > working[1] > working[2]

    def test_lambda_unit_conversion(self, reference_point):
        dpl = to_lambda_units(reference_point)
        assert dpl.lam == 1.0
        assert dpl.g0 == pytest.approx(reference_point.g0 / reference_point.lam, rel=1e-15)
        assert dpl.lambda_eff == pytest.approx(math.exp(4.5), rel=1e-13)
        assert dpl.r == reference_point.r
        assert dpl.z_zpf == reference_point.z_zpf

    def test_platform_presets(self):
        cant = derive_params(cantilever_params())
        assert cant.M == 1e-16
        levi = derive_params(levitated_yig_params())
        diam = derive_params(trapped_diamond_params())
        assert levi.M > diam.M  # magnet sphere is far heavier than the nanodiamond
        assert levi.V == diam.V


@pytest.fixture(scope="module")
def small_layout():
    return SpaceLayout((2, 3, 3))


@pytest.fixture(scope="module")
def dpl():
    return to_lambda_units(derive_params(trapped_diamond_params(r_requested=2.0)))


class TestHamiltonians:
    def test_diagonal_when_uncoupled(self, small_layout):
        dp = to_lambda_units(derive_params(trapped_diamond_params(r_requested=0.0)))
        dp = replace(dp, lam=0.0, g0=0.0, Omega_p=0.0, lambda_eff=0.0)
        det = Detunings(delta_K=1.3, delta_mech=0.7, delta_NV=0.4)
        H = build_hamiltonian_lab(dp, det, small_layout)
        assert np.count_nonzero(H - np.diag(np.diagonal(H))) == 0
        for m in range(3):
            for k in range(3):
                idx = small_layout.index(1, m, k)
                expected = 1.3 * k + 0.7 * m + 0.2
                assert H[idx, idx].real == pytest.approx(expected, abs=1e-14)

    def test_tripartite_matrix_element(self, dpl, small_layout):
        det = red_detuning(dpl.Delta_m)
        H_lab = build_hamiltonian_lab(dpl, Detunings(det.delta_K, dpl.delta_m, 0.0), small_layout)
        H_sq = build_hamiltonian_squeezed(dpl, det, small_layout)
        bra = small_layout.index(0, 1, 1)   # |g,1,1>
        ket = small_layout.index(1, 0, 0)   # |e,0,0>
        assert H_lab[bra, ket] == pytest.approx(dpl.lam, abs=1e-14)
        assert H_sq[bra, ket] == pytest.approx(dpl.lambda_eff, rel=1e-14)
        assert H_sq[bra, ket] == pytest.approx(dpl.lam * math.exp(dpl.r), rel=1e-14)

    def test_exchange_matrix_element(self, dpl, small_layout):
        H = build_hamiltonian_squeezed(dpl, red_detuning(dpl.Delta_m), small_layout)
        bra = small_layout.index(0, 0, 1)   # |g,0,1>
        ket = small_layout.index(1, 0, 0)   # |e,0,0>
        assert H[bra, ket] == pytest.approx(dpl.g0, rel=1e-14)

    def test_zero_squeezing_frames_agree(self, small_layout):
        dp = to_lambda_units(derive_params(trapped_diamond_params(r_requested=0.0)))
        det = Detunings(delta_K=-2.0, delta_mech=dp.delta_m, delta_NV=0.5)
        H_lab = build_hamiltonian_lab(dp, det, small_layout)
        H_sq = build_hamiltonian_squeezed(dp, det, small_layout)
        assert np.abs(H_lab - H_sq).max() < 1e-14 * np.abs(H_lab).max()

    def test_exchange_doublet_splitting(self, dpl, small_layout):
        """With the tripartite term off and both lines resonant, the
        single-excitation doublet splits by twice the exchange coupling."""
        dp = replace(dpl, lambda_eff=0.0)
        det = Detunings(delta_K=0.0, delta_mech=5.0, delta_NV=0.0)
        H = build_hamiltonian_squeezed(dp, det, small_layout)
        i, j = small_layout.index(1, 0, 0), small_layout.index(0, 0, 1)
        block = H[np.ix_([i, j], [i, j])]
        w = hermitian_eigenvalues(block)
        assert w[1] - w[0] == pytest.approx(2 * dp.g0, rel=1e-12)

    def test_hermitian_and_conserving(self, dpl):
        lay = SpaceLayout((2, 5, 3))
        for builder, det in (
            (build_hamiltonian_lab, Detunings(-1.0, dpl.delta_m, 0.0)),
            (build_hamiltonian_squeezed, red_detuning(3.0)),
        ):
            H = builder(dpl, det, lay)
            assert np.abs(H - H.conj().T).max() < 1e-12 * np.abs(H).max()
            N = excitation_number(lay)
            assert np.abs(H @ N - N @ H).max() < 1e-12 * np.abs(H).max()

    def test_red_blue_resonance_energies(self, dpl, small_layout):
        dp = replace(dpl, lam=0.0, g0=0.0, lambda_eff=0.0, Omega_p=0.0)
        red = red_detuning(2.5, delta_NV=0.8)
        H = build_hamiltonian_squeezed(dp, red, small_layout)
        assert H[small_layout.index(1, 0, 0), small_layout.index(1, 0, 0)] == pytest.approx(
            H[small_layout.index(0, 1, 1), small_layout.index(0, 1, 1)], abs=1e-12
        )
        blue = blue_detuning(2.5, delta_NV=0.8)
        H = build_hamiltonian_squeezed(dp, blue, small_layout)
        assert H[small_layout.index(1, 1, 0), small_layout.index(1, 1, 0)] == pytest.approx(
            H[small_layout.index(0, 0, 1), small_layout.index(0, 0, 1)], abs=1e-12
        )


class TestSqueezeUnitary:
    def test_identity_at_zero(self):
        lay = SpaceLayout((2, 8, 2))
        assert np.abs(squeeze_unitary(0.0, lay) - np.eye(lay.dim)).max() < 1e-14

    def test_inverse_pair(self):
        lay = SpaceLayout((2, 48, 2))
        for r in (0.5, 1.0, 1.5):
            U = squeeze_unitary(r, lay) @ squeeze_unitary(-r, lay)
            assert np.abs(U - np.eye(lay.dim)).max() < 1e-8

    def test_squeezed_vacuum_occupancy(self):
        lay = SpaceLayout((2, 48, 2))
        n_b = np.diag(np.tile(np.repeat(np.arange(48), 2), 2)).astype(complex)
        vac = lay.basis_state(0, 0, 0)
        for r in (0.5, 1.0, 1.5):
            U = squeeze_unitary(r, lay)
            psi = U @ vac
            occ = float((psi.conj() @ (n_b @ psi)).real)
            assert occ == pytest.approx(math.sinh(r) ** 2, rel=0.02)


class TestFrameEquivalence:
    @pytest.mark.parametrize("r,n_b,block", [(0.25, 96, 24), (0.5, 96, 24)])
    def test_low_block_match(self, r, n_b, block):
        """Transforming the lab frame by the squeeze unitary reproduces the
        squeezed-frame generator on phonon levels whose squeezing image stays
        inside the cutoff (block * e^{2r} < N_b)."""
        delta_m = 40.0
        dpl = to_lambda_units(derive_params(trapped_diamond_params(r_requested=r)))
        dpl = replace(
            dpl,
            delta_m=delta_m,
            Omega_p=delta_m * math.tanh(2 * r),
            Delta_m=delta_m / math.cosh(2 * r),
            lambda_eff=math.exp(r),
        )
        lay = SpaceLayout((2, n_b, 3))
        H_lab = build_hamiltonian_lab(dpl, Detunings(-dpl.Delta_m, dpl.delta_m, 0.0), lay)
        H_sq = build_hamiltonian_squeezed(dpl, red_detuning(dpl.Delta_m), lay)
        U = squeeze_unitary(r, lay)
        const = dpl.delta_m * math.sinh(r) ** 2 - 0.5 * dpl.Omega_p * math.sinh(2 * r)
        mask = np.zeros((2, n_b, 3), dtype=bool)
        mask[:, : block + 1, :] = True
        m = mask.reshape(-1)
        diff = (U @ H_lab @ U.conj().T - H_sq - const * np.eye(lay.dim))[np.ix_(m, m)]
        rel = np.linalg.norm(diff) / np.linalg.norm(H_sq[np.ix_(m, m)])
        assert rel < 1e-4


class TestCollapseOperators:
    def test_all_rates_zero_is_empty(self, small_layout):
        dp = to_lambda_units(derive_params(trapped_diamond_params(r_requested=1.0)))
        dp = replace(dp, gamma_K=0.0, gamma_s=0.0, Gamma_m=0.0, gamma_th=0.0)
        assert collapse_operators(dp, "squeezed", small_layout) == []

    def test_caption_rate_sets(self, small_layout):
        from spinmagphon.linalg import annihilation, embed
        dp = to_lambda_units(derive_params(trapped_diamond_params(r_requested=3.0)))
        for gamma_K in (5.0, 50.0):
            dp_run = replace(dp, gamma_K=gamma_K, gamma_s=0.05, Gamma_m=1.1)
            ops = collapse_operators(dp_run, "squeezed", small_layout)
            assert len(ops) == 3
            a = embed(annihilation(3), 2, small_layout)
            b = embed(annihilation(3), 1, small_layout)
            sz = embed(np.diag([-1.0, 1.0]).astype(complex), 0, small_layout)
            assert np.abs(ops[0] - math.sqrt(gamma_K) * a).max() < 1e-14
            assert np.abs(ops[1] - math.sqrt(0.05 / 2) * sz).max() < 1e-14
            assert np.abs(ops[2] - math.sqrt(1.1) * b).max() < 1e-14

    def test_lab_frame_uses_thermal_rate(self, small_layout):
        dp = derive_params(trapped_diamond_params(r_requested=2.0))
        lab_ops = collapse_operators(dp, "lab", small_layout)
        sq_ops = collapse_operators(dp, "squeezed", small_layout)
        ratio = np.abs(sq_ops[-1]).max() / np.abs(lab_ops[-1]).max()
        assert ratio == pytest.approx(math.exp(dp.r), rel=1e-12)

    def test_rejects_bad_frame(self, small_layout):
        dp = derive_params(trapped_diamond_params(r_requested=1.0))
        with pytest.raises(ParameterError):
            collapse_operators(dp, "interaction", small_layout)


class TestOccupationOperators:
    def test_projectors_on_basis_states(self):
        lay = SpaceLayout((2, 4, 3))
        n_spin, n_b, n_a = occupation_operators(lay)
        psi = lay.basis_state(1, 2, 1)
        assert (psi.conj() @ n_spin @ psi).real == pytest.approx(1.0)
        assert (psi.conj() @ n_b @ psi).real == pytest.approx(2.0)
        assert (psi.conj() @ n_a @ psi).real == pytest.approx(1.0)
