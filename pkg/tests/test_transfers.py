import numpy as np
import pytest
import scipy.linalg as sla

import twolevel as tl
from twolevel.errors import (
    BadCoarseDim,
    NotRealPencil,
    PairSplitWarning,
    SingularBasisChange,
)

from conftest import eig_multiset_distance, real_pencil_with_spectrum


def principal_angles(X, Y):
    """Largest principal angle between the column spans of X and Y,
    computed through its sine for accuracy near zero."""
    qx, _ = np.linalg.qr(X)
    qy, _ = np.linalg.qr(Y)
    resid = qy - qx @ (qx.conj().T @ qy)
    s = np.linalg.svd(resid, compute_uv=False)
    return float(np.arcsin(np.clip(s.max(), 0.0, 1.0)))


class TestOptimalComplexTransfers:
    def test_full_coarse_space_gives_identity_projection(self, seed42):
        pencil, ged, _ = seed42
        tp = tl.optimal_complex_transfers(ged, pencil.n)
        Pi = tl.coarse_projection(pencil, tp)
        assert np.abs(Pi - np.eye(pencil.n)).max() <= 1e-9

    def test_identity_pencil_bound_zero(self):
        p = tl.make_pencil(np.eye(3), np.eye(3))
        ged = tl.factor_pencil(p)
        tp = tl.optimal_complex_transfers(ged, 1)
        assert tp.n_c == 1
        assert tl.predicted_bound(ged, 1, 1, 1) == 0.0

    def test_seed42_norm_matches_third_deviation(self, seed42):
        pencil, ged, smoother = seed42
        tp = tl.optimal_complex_transfers(ged, 2)
        tlop = tl.make_two_level(pencil, smoother, tp, nu1=1, nu2=1)
        E = tl.error_propagator(tlop)
        norm = tl.n_norm_of(E, tl.NormSpec.identity(6), ged)
        assert abs(norm - abs(1 - ged.lambdas[2]) ** 2) <= 1e-8

    def test_bad_coarse_dim(self, seed42):
        _, ged, _ = seed42
        with pytest.raises(BadCoarseDim):
            tl.optimal_complex_transfers(ged, 0)
        with pytest.raises(BadCoarseDim):
            tl.optimal_complex_transfers(ged, 7)


class TestOptimalRealTransfers:
    def test_all_real_spectrum_copies_eigenvectors(self):
        p = real_pencil_with_spectrum([4.0, 2.0, 0.5, 0.9], seed=1)
        ged = tl.factor_pencil(p)
        tp, eff = tl.optimal_real_transfers(ged, 2)
        assert eff == 2
        assert tp.field is tl.Field.REAL
        assert principal_angles(tp.P, ged.V_r[:, :2]) <= 1e-8
        assert principal_angles(tp.R, ged.V_l[:, :2]) <= 1e-8

    def test_two_by_two_conjugate_pair_spans_eigenspace(self):
        p = real_pencil_with_spectrum([2.0 + 1.0j], seed=2)
        ged = tl.factor_pencil(p)
        tp, eff = tl.optimal_real_transfers(ged, 2)
        assert eff == 2
        assert np.isrealobj(tp.P) and np.isrealobj(tp.R)
        stacked = np.hstack([tp.P, ged.V_r.real, ged.V_r.imag])
        assert np.linalg.matrix_rank(stacked) == 2

    def test_pair_split_grows_coarse_dim_with_warning(self):
        # Ordered spectrum: 4.0, then the conjugate pair, then the rest;
        # requesting n_c = 2 bisects the pair.
        p = real_pencil_with_spectrum([4.0, 2.0 + 1.0j, 0.5, 0.9], seed=3)
        ged = tl.factor_pencil(p)
        with pytest.warns(PairSplitWarning):
            tp, eff = tl.optimal_real_transfers(ged, 2)
        assert eff == 3
        assert tp.n_c == 3

    def test_range_matches_leading_eigenvectors(self):
        p = real_pencil_with_spectrum([4.0, 2.0 + 1.0j, 0.5, 0.9], seed=4)
        ged = tl.factor_pencil(p)
        for n_c in (1, 3, 4, 5):
            tp, eff = tl.optimal_real_transfers(ged, n_c)
            assert eff == n_c
            assert principal_angles(tp.P, ged.V_r[:, :n_c]) <= 1e-8

    def test_complex_pencil_rejected(self):
        A = np.array([[1.0 + 1j, 0], [0, 2.0]])
        p = tl.make_pencil(A, np.eye(2))
        ged = tl.factor_pencil(p)
        with pytest.raises(NotRealPencil):
            tl.optimal_real_transfers(ged, 1)

    def test_eigenvalue_multiset_matches_complex_construction(self, seed42):
        pencil, ged, smoother = seed42
        for n_c in range(1, 6):
            tp_c = tl.optimal_complex_transfers(ged, n_c)
            tp_r, eff = tl.optimal_real_transfers(ged, n_c)
            if eff != n_c:
                tp_c = tl.optimal_complex_transfers(ged, eff)
            ev_c = np.linalg.eigvals(
                tl.error_propagator(tl.make_two_level(pencil, smoother, tp_c))
            )
            ev_r = np.linalg.eigvals(
                tl.error_propagator(tl.make_two_level(pencil, smoother, tp_r))
            )
            assert eig_multiset_distance(ev_c, ev_r) <= 1e-8


class TestBasisChange:
    def test_identity_change_is_noop(self, seed42):
        _, ged, _ = seed42
        tp = tl.optimal_complex_transfers(ged, 3)
        bc = tl.BasisChange(B_P=np.eye(3), B_R=np.eye(3))
        out = tl.apply_basis_change(tp, bc)
        assert np.array_equal(out.P, tp.P)
        assert np.array_equal(out.R, tp.R)

    def test_random_change_preserves_projection(self, seed42):
        pencil, ged, _ = seed42
        tp = tl.optimal_complex_transfers(ged, 3)
        Pi = tl.coarse_projection(pencil, tp)
        rng = np.random.default_rng(7)
        bc = tl.BasisChange(
            B_P=rng.standard_normal((3, 3)), B_R=rng.standard_normal((3, 3))
        )
        Pi_b = tl.coarse_projection(pencil, tl.apply_basis_change(tp, bc))
        assert np.abs(Pi_b - Pi).max() <= 1e-10

    def test_diagonal_scaling(self, seed42):
        pencil, ged, _ = seed42
        tp = tl.optimal_complex_transfers(ged, 2)
        bc = tl.BasisChange(B_P=2.0 * np.eye(2), B_R=np.eye(2))
        out = tl.apply_basis_change(tp, bc)
        assert np.allclose(out.P, 2.0 * tp.P)
        Pi = tl.coarse_projection(pencil, tp)
        Pi_b = tl.coarse_projection(pencil, out)
        assert np.abs(Pi_b - Pi).max() <= 1e-10

    def test_singular_change_rejected(self):
        with pytest.raises(SingularBasisChange):
            tl.BasisChange(B_P=np.zeros((2, 2)), B_R=np.eye(2))


class TestNormMatrix:
    def test_identity_basis_identity_norm(self):
        p = tl.make_pencil(np.diag([2.0, 3.0]), np.eye(2))
        ged = tl.factor_pencil(p)
        # V_r columns are unit vectors, so N = D^*D = I for d = ones.
        N = tl.n_norm_matrix(tl.NormSpec.identity(2), ged)
        assert np.abs(N - np.eye(2)).max() <= 1e-12

    def test_hpd_pair_recovers_a_norm(self, hpd_pair):
        pencil, ged = hpd_pair
        d = np.sqrt(ged.lambdas)
        N = tl.n_norm_matrix(tl.NormSpec(d=d, real_mode=False), ged)
        A = np.asarray(pencil.A)
        assert np.abs(N - A).max() <= 1e-8 * np.abs(A).max()

    def test_hpd_pair_recovers_m_norm(self, hpd_pair):
        pencil, ged = hpd_pair
        N = tl.n_norm_matrix(tl.NormSpec.identity(pencil.n), ged)
        M = np.asarray(pencil.M)
        assert np.abs(N - M).max() <= 1e-8 * np.abs(M).max()

    def test_norm_matrix_is_hpd(self, seed42):
        _, ged, _ = seed42
        rng = np.random.default_rng(11)
        d = rng.standard_normal(6) + 1j * rng.standard_normal(6)
        N = tl.n_norm_matrix(tl.NormSpec(d=d, real_mode=False), ged)
        assert np.abs(N - N.conj().T).max() <= 1e-12 * np.abs(N).max()
        assert np.linalg.eigvalsh(N).min() > 0


class TestPiOrthogonality:
    def test_identity_projection_zero_defect(self):
        N = np.diag([1.0, 2.0, 3.0])
        assert tl.check_pi_orthogonal(np.eye(3), N) == 0.0

    def test_optimal_projection_orthogonal_in_n_norm(self, seed42):
        pencil, ged, _ = seed42
        tp = tl.optimal_complex_transfers(ged, 2)
        Pi = tl.coarse_projection(pencil, tp)
        rng = np.random.default_rng(5)
        for _ in range(10):
            d = rng.standard_normal(6) + 1j * rng.standard_normal(6)
            N = tl.n_norm_matrix(tl.NormSpec(d=d, real_mode=False), ged)
            assert tl.check_pi_orthogonal(Pi, N) <= 1e-9 * np.abs(N).max()

    def test_block_diagonal_norms_also_orthogonal(self, seed42):
        # Reverse direction: any CF-block-diagonal quadratic form yields
        # an inner product in which the optimal projection is self-adjoint.
        pencil, ged, _ = seed42
        n_c = 2
        tp = tl.optimal_complex_transfers(ged, n_c)
        Pi = tl.coarse_projection(pencil, tp)
        rng = np.random.default_rng(6)
        for _ in range(5):
            Bc = rng.standard_normal((n_c, n_c)) + 1j * rng.standard_normal((n_c, n_c))
            Bf = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
            N = tl.cf_block_norm_matrix(
                Bc.conj().T @ Bc + n_c * np.eye(n_c),
                Bf.conj().T @ Bf + 4 * np.eye(4),
                ged,
            )
            assert tl.check_pi_orthogonal(Pi, N) <= 1e-9 * np.abs(N).max()

    def test_wrong_norm_is_not_orthogonal(self, seed42):
        # Negative control: the Euclidean inner product does not make the
        # optimal projection self-adjoint on a genuinely nonsymmetric pencil.
        pencil, ged, _ = seed42
        tp = tl.optimal_complex_transfers(ged, 2)
        Pi = tl.coarse_projection(pencil, tp)
        assert tl.check_pi_orthogonal(Pi, np.eye(6)) > 1e-6

    def test_vr_gram_matrix_is_cf_block_diagonal(self, seed42):
        _, ged, _ = seed42
        n_c = 2
        N = tl.n_norm_matrix(tl.NormSpec.identity(6), ged)
        G = ged.V_r.conj().T @ N @ ged.V_r
        assert np.abs(G[:n_c, n_c:]).max() <= 1e-10 * np.abs(G).max()
        assert np.abs(G[n_c:, :n_c]).max() <= 1e-10 * np.abs(G).max()
