import numpy as np
import pytest
import scipy.linalg
import scipy.stats
from hypothesis import given, settings, strategies as st

from sykqrc import chaoskit, ensembles, hilbert
from sykqrc.ensembles import ModelSpec
from sykqrc.hilbert import FockSpace


class TestModelSpec:
    def test_rejects_bad_inputs(self):
        with pytest.raises(ValueError):
            ModelSpec(N=1)
        with pytest.raises(ValueError):
            ModelSpec(N=4, J4=-1.0)
        with pytest.raises(ValueError):
            ModelSpec(N=4, J4=0.0, kappa2=0.0)


class TestSampling:
    @pytest.mark.parametrize("N", [3, 4, 6])
    def test_coupling_symmetries(self, N, rng):
        cs = ensembles.sample_couplings(ModelSpec(N=N, J4=1.3, kappa2=0.7), rng)
        J, kappa = cs.J, cs.kappa
        np.testing.assert_allclose(kappa, kappa.conj().T, atol=0)
        np.testing.assert_allclose(J, -np.swapaxes(J, 0, 1), atol=0)
        np.testing.assert_allclose(J, -np.swapaxes(J, 2, 3), atol=0)
        np.testing.assert_allclose(
            J, np.transpose(J, (2, 3, 0, 1)).conj(), atol=0)

    def test_syk2_only_leaves_j_zero(self, rng):
        cs = ensembles.sample_couplings(ModelSpec(N=4, J4=0.0, kappa2=1.0), rng)
        assert np.all(cs.J == 0)
        assert np.any(cs.kappa != 0)

    def test_diagonal_entries_real(self, rng):
        cs = ensembles.sample_couplings(ModelSpec(N=5, J4=1.0, kappa2=1.0), rng)
        np.testing.assert_allclose(np.diag(cs.kappa).imag, 0, atol=0)
        for (i, j) in ensembles.site_pairs(5):
            assert cs.J[i, j, i, j].imag == 0

    def test_second_moments(self):
        # pool the independent canonical entries over many draws; with
        # ~2e4 samples per slot type the relative error on a variance
        # estimate is about sqrt(2/n) ~ 1%
        N, draws = 4, 600
        spec = ModelSpec(N=N, J4=1.5, kappa2=0.8)
        rng = np.random.default_rng(99)
        j_off, j_diag, k_off, k_diag = [], [], [], []
        for _ in range(draws):
            cs = ensembles.sample_couplings(spec, rng)
            for (i, j), (k, l) in ensembles.canonical_j_slots(N):
                (j_diag if (i, j) == (k, l) else j_off).append(cs.J[i, j, k, l])
            for i, j in ensembles.site_pairs(N):
                k_off.append(cs.kappa[i, j])
            k_diag.extend(np.diag(cs.kappa))
        var_j = spec.J4 ** 2 / N ** 3
        var_k = spec.kappa2 ** 2 / (2 * N)
        for pool, var in [(j_off, var_j), (j_diag, var_j),
                          (k_off, var_k), (k_diag, var_k)]:
            pool = np.asarray(pool)
            assert abs(pool.mean()) <= 4 * np.sqrt(var / len(pool))
            assert np.mean(np.abs(pool) ** 2) == pytest.approx(var, rel=0.06)
        # complex entries split variance evenly between components
        j_off = np.asarray(j_off)
        assert np.var(j_off.real) == pytest.approx(var_j / 2, rel=0.08)
        assert np.var(j_off.imag) == pytest.approx(var_j / 2, rel=0.08)

    def test_reproducible_from_seeded_rng(self):
        spec = ModelSpec(N=4, J4=1.0, kappa2=0.5)
        a = ensembles.sample_couplings(spec, np.random.default_rng(5))
        b = ensembles.sample_couplings(spec, np.random.default_rng(5))
        np.testing.assert_array_equal(a.J, b.J)
        np.testing.assert_array_equal(a.kappa, b.kappa)


class TestAssembly:
    @pytest.mark.parametrize("N", [2, 3, 4])
    def test_hermitian_and_number_conserving(self, N, rng):
        space = FockSpace(N)
        cs = ensembles.sample_couplings(ModelSpec(N=N, J4=1.0, kappa2=0.3), rng)
        H, _ = ensembles.assemble_hamiltonian(cs, ModelSpec(N=N, J4=1.0, kappa2=0.3), space)
        np.testing.assert_allclose(H, H.conj().T, atol=1e-13)
        Nop = hilbert.total_number_operator(space)
        np.testing.assert_allclose(H @ Nop - Nop @ H, 0, atol=1e-12)

    def test_matches_quadruple_sum_oracle(self, rng):
        # literal sum over all N^4 + N^2 terms using dense JW operators
        N = 3
        space = FockSpace(N)
        spec = ModelSpec(N=N, J4=1.0, kappa2=0.6)
        cs = ensembles.sample_couplings(spec, rng)
        c = hilbert.annihilation_operators(N)
        oracle = np.zeros((space.dim, space.dim), dtype=complex)
        for i in range(N):
            for j in range(N):
                oracle += cs.kappa[i, j] * c[i].conj().T @ c[j]
                for k in range(N):
                    for l in range(N):
                        oracle += cs.J[i, j, k, l] * (
                            c[i].conj().T @ c[j].conj().T @ c[k] @ c[l])
        H, _ = ensembles.assemble_hamiltonian(cs, spec, space)
        np.testing.assert_allclose(H, oracle, atol=1e-12)

    def test_phs_correction_oracle(self, rng):
        N = 3
        cs = ensembles.sample_couplings(ModelSpec(N=N, J4=1.0), rng)
        oracle = np.zeros((N, N), dtype=complex)
        for i in range(N):
            for j in range(N):
                for k in range(N):
                    for l in range(N):
                        v = 0.5 * cs.J[i, j, k, l]
                        if i == k:
                            oracle[j, l] += v
                        if i == l:
                            oracle[j, k] -= v
                        if j == k:
                            oracle[i, l] -= v
                        if j == l:
                            oracle[i, k] += v
        np.testing.assert_allclose(ensembles.phs_correction_matrix(cs.J),
                                   oracle, atol=1e-13)

    def test_phs_correction_hermitian(self, rng):
        cs = ensembles.sample_couplings(ModelSpec(N=5, J4=1.0), rng)
        M = ensembles.phs_correction_matrix(cs.J)
        np.testing.assert_allclose(M, M.conj().T, atol=1e-13)

    def test_normalize_gives_unit_spectral_norm(self, rng):
        spec = ModelSpec(N=4, J4=1.0, kappa2=0.2, normalize=True)
        cs = ensembles.sample_couplings(spec, rng)
        H, norm = ensembles.assemble_hamiltonian(cs, spec, FockSpace(4))
        assert norm > 0
        assert np.abs(scipy.linalg.eigvalsh(H)).max() == pytest.approx(1.0)

    @pytest.mark.parametrize("N_p", [0, 1, 2, 3, 4])
    def test_sector_assembly_matches_projection(self, N_p, rng):
        N = 4
        space = FockSpace(N)
        spec = ModelSpec(N=N, J4=1.0, kappa2=0.4, phs_correction=True)
        cs = ensembles.sample_couplings(spec, rng)
        H, _ = ensembles.assemble_hamiltonian(cs, spec, space)
        sec = hilbert.sector_basis(space, N_p)
        direct = ensembles.assemble_sector_hamiltonian(cs, spec, sec)
        np.testing.assert_allclose(direct, hilbert.sector_project(H, sec),
                                   atol=1e-12)

    def test_mismatched_mode_counts(self, rng):
        cs = ensembles.sample_couplings(ModelSpec(N=3, J4=1.0), rng)
        with pytest.raises(ValueError):
            ensembles.assemble_hamiltonian(cs, ModelSpec(N=3, J4=1.0), FockSpace(4))


class TestSpectralStatistics:
    """Slowish ensemble-level checks of the symmetry classes."""

    def _mean_r(self, spec, realizations, seed, N_p=None):
        rng = np.random.default_rng(seed)
        N_p = spec.N // 2 if N_p is None else N_p
        sec = hilbert.sector_basis(FockSpace(spec.N), N_p)
        pooled = []
        for _ in range(realizations):
            cs = ensembles.sample_couplings(spec, rng)
            H = ensembles.assemble_sector_hamiltonian(cs, spec, sec)
            ev = np.sort(scipy.linalg.eigvalsh(H))
            pooled.append(chaoskit.spacing_ratios(ev).ratios)
        return float(np.concatenate(pooled).mean())

    def test_syk4_half_filling_is_gue(self):
        r = self._mean_r(ModelSpec(N=8, J4=1.0), 300, seed=11)
        assert abs(r - chaoskit.MEAN_R['gue']) < 0.012

    def test_syk4_phs_corrected_is_goe(self):
        spec = ModelSpec(N=8, J4=1.0, phs_correction=True)
        r = self._mean_r(spec, 300, seed=12)
        assert abs(r - chaoskit.MEAN_R['goe']) < 0.012

    def test_syk2_is_poisson(self):
        spec = ModelSpec(N=8, J4=0.0, kappa2=1.0)
        r = self._mean_r(spec, 300, seed=13)
        assert abs(r - chaoskit.MEAN_R['poisson']) < 0.015


class TestHaar:
    def test_unitary(self, rng):
        U = ensembles.sample_haar_unitary(32, rng)
        np.testing.assert_allclose(U @ U.conj().T, np.eye(32), atol=1e-12)

    def test_eigenphase_uniformity(self):
        # Haar eigenphases are close to uniform on the circle; a KS test
        # on pooled phases catches the phase-fix bug in plain QR sampling
        rng = np.random.default_rng(7)
        phases = np.concatenate([
            np.angle(scipy.linalg.eigvals(ensembles.sample_haar_unitary(24, rng)))
            for _ in range(150)])
        u = (phases + np.pi) / (2 * np.pi)
        assert scipy.stats.kstest(u, 'uniform').pvalue > 1e-3

    def test_first_moment_vanishes(self):
        rng = np.random.default_rng(8)
        acc = np.zeros((6, 6), dtype=complex)
        n = 3000
        for _ in range(n):
            acc += ensembles.sample_haar_unitary(6, rng)
        assert np.abs(acc / n).max() < 5 / np.sqrt(n)

    def test_invalid_dim(self, rng):
        with pytest.raises(ValueError):
            ensembles.sample_haar_unitary(0, rng)


class TestRandomDensity:
    def test_full_space_state(self, rng):
        rho = ensembles.sample_random_density(FockSpace(3), rng)
        assert rho.shape == (8, 8)
        assert np.trace(rho).real == pytest.approx(1.0)
        assert np.min(scipy.linalg.eigvalsh(rho)) >= -1e-12

    def test_sector_state_supported_in_sector(self, rng):
        sec = hilbert.sector_basis(FockSpace(4), 2)
        rho = ensembles.sample_random_density(sec, rng)
        assert rho.shape == (16, 16)
        assert np.trace(rho).real == pytest.approx(1.0)
        mask = np.zeros(16, dtype=bool)
        mask[sec.indices] = True
        assert np.all(rho[~mask, :] == 0)
        assert np.all(rho[:, ~mask] == 0)
        blk = hilbert.sector_project(rho, sec)
        assert np.min(scipy.linalg.eigvalsh(blk)) >= -1e-12


class TestDumpLoad:
    @given(st.integers(0, 2 ** 32 - 1))
    @settings(max_examples=10, deadline=None)
    def test_roundtrip_exact(self, seed):
        import tempfile, os
        spec = ModelSpec(N=4, J4=1.1, kappa2=0.4)
        cs = ensembles.sample_couplings(spec, np.random.default_rng(seed))
        with tempfile.TemporaryDirectory() as d:
            path = os.path.join(d, 'c.csv')
            ensembles.dump_couplings(cs, path)
            back = ensembles.load_couplings(path)
        np.testing.assert_array_equal(back.J, cs.J)
        np.testing.assert_array_equal(back.kappa, cs.kappa)
        assert back.N == cs.N
        assert back.J4 == cs.J4 and back.kappa2 == cs.kappa2
