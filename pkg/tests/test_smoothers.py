import numpy as np
import pytest

import twolevel as tl
from twolevel.errors import (
    InconsistentBlockColoring,
    SingularBlock,
    ZeroDiagonal,
)
from twolevel.smoothers import BLACK, RED, block_cf_split


class TestJacobi:
    def test_diagonal_matrix_exact(self):
        A = np.diag([2.0, 3.0])
        sm = tl.jacobi(A)
        assert np.allclose(sm.M, A)
        assert np.abs(np.eye(2) - sm.solve(A)).max() <= 1e-14

    def test_extracts_diagonal(self):
        A = np.array([[2.0, 1.0], [1.0, 2.0]])
        assert np.allclose(tl.jacobi(A).M, np.diag([2.0, 2.0]))

    def test_laplacian_spectrum_oracle(self):
        # Eigenvalues of D^{-1}A for tridiag(-1,2,-1), n=4: (2-2cos(k*pi/5))/2.
        A = tl.laplacian_1d(4)
        sm = tl.jacobi(A)
        got = np.sort(np.linalg.eigvals(sm.solve(A)).real)
        want = np.sort([(2 - 2 * np.cos(k * np.pi / 5)) / 2 for k in range(1, 5)])
        assert np.abs(got - want).max() <= 1e-10

    def test_zero_diagonal_rejected(self):
        with pytest.raises(ZeroDiagonal):
            tl.jacobi(np.array([[0.0, 1.0], [1.0, 2.0]]))


class TestBlockJacobi:
    def test_singleton_blocks_reduce_to_jacobi(self, seed42):
        pencil, _, _ = seed42
        A = np.asarray(pencil.A)
        pt = tl.block_jacobi(A, tl.BlockPartition.singletons(6))
        assert np.allclose(pt.M, tl.jacobi(A).M)

    def test_single_block_is_exact(self, seed42):
        pencil, _, _ = seed42
        A = np.asarray(pencil.A)
        sm = tl.block_jacobi(A, tl.BlockPartition(blocks=(list(range(6)),)))
        assert np.abs(np.eye(6) - sm.solve(A)).max() <= 1e-10

    def test_two_block_split_matches_dense_oracle(self):
        rng = np.random.default_rng(42)
        A = rng.standard_normal((4, 4)) + 4 * np.eye(4)
        part = tl.BlockPartition(blocks=([0, 1], [2, 3]))
        sm = tl.block_jacobi(A, part)
        M = np.zeros((4, 4))
        M[:2, :2] = A[:2, :2]
        M[2:, 2:] = A[2:, 2:]
        got = np.linalg.eigvals(sm.solve(A))
        want = np.linalg.eigvals(np.linalg.solve(M, A))
        assert np.abs(np.sort_complex(got) - np.sort_complex(want)).max() <= 1e-10

    def test_singular_block_rejected(self):
        A = np.array([[1.0, 1.0], [1.0, 1.0]])
        with pytest.raises(SingularBlock):
            tl.block_jacobi(A, tl.BlockPartition(blocks=([0, 1],)))

    def test_invalid_partition_rejected(self):
        with pytest.raises(tl.DimensionMismatch):
            tl.BlockPartition(blocks=([0, 1], [1, 2]))


class TestCFSplit:
    def test_diagonal_all_black(self):
        split = tl.rs_cf_split(np.diag([1.0, 2.0, 3.0]))
        assert np.all(split.labels == BLACK)

    def test_1d_laplacian_alternating(self):
        # Five-point chain: C-points (Black) at 1-based {1, 3, 5}.
        split = tl.rs_cf_split(tl.laplacian_1d(5))
        assert list(split.labels) == [BLACK, RED, BLACK, RED, BLACK]
        assert list(split.black()) == [0, 2, 4]
        assert list(split.red()) == [1, 3]

    def test_every_f_point_touches_a_c_point(self):
        grid = tl.GridSpec(nx=4, ny=4)
        A = tl.hpd_laplacian(
            tl.ProblemSpec(kind=tl.ProblemKind.LAPLACIAN, grid=grid, dt=0.0)
        )
        split = tl.rs_cf_split(A)
        S = tl.strength_matrix(A)
        strong = S | S.T
        black = set(split.black())
        assert black
        for f in split.red():
            assert any(j in black for j in np.nonzero(strong[f])[0])

    def test_deterministic(self):
        rng = np.random.default_rng(8)
        A = rng.standard_normal((12, 12)) + 12 * np.eye(12)
        a = tl.rs_cf_split(A)
        b = tl.rs_cf_split(A)
        assert np.array_equal(a.labels, b.labels)


class TestRedBlackJacobi:
    def test_single_color_reduces_to_jacobi(self):
        A = np.diag([1.0, 2.0, 3.0])
        split = tl.rs_cf_split(A)  # all Black
        sm = tl.red_black_jacobi(A, split)
        assert np.allclose(sm.M, tl.jacobi(A).M)

    def test_two_by_two_hand_computation(self):
        A = np.array([[2.0, 1.0], [1.0, 2.0]])
        split = tl.CFSplit(labels=np.array([RED, BLACK]), theta=0.25)
        sm = tl.red_black_jacobi(A, split)
        assert np.allclose(sm.M, np.array([[2.0, 0.0], [1.0, 2.0]]))

    def test_f_rows_relaxed_exactly(self):
        # After one sweep the error propagator I - M^{-1}A has zero columns
        # at Red points, so error supported on F-points is annihilated.
        A = tl.laplacian_1d(5)
        split = tl.rs_cf_split(A)
        sm = tl.red_black_jacobi(A, split)
        E = np.eye(5) - sm.solve(A)
        assert np.abs(E[:, split.red()]).max() <= 1e-12

    def test_permuted_structure_block_lower_triangular(self):
        problems = []
        problems.append((np.array([[2.0, 1.0], [1.0, 2.0]]), None))
        problems.append((tl.laplacian_1d(5), None))
        grid = tl.GridSpec(nx=4, ny=4)
        problems.append(
            (
                tl.hpd_laplacian(
                    tl.ProblemSpec(kind=tl.ProblemKind.LAPLACIAN, grid=grid, dt=0.0)
                ),
                None,
            )
        )
        adv = tl.advection_reaction_matrix(
            tl.ProblemSpec(
                kind=tl.ProblemKind.ADVECTION_REACTION,
                grid=tl.GridSpec.advection_refinement(1),
                dt=0.0,
            )
        )
        problems.append((adv, None))
        wave = tl.mixed_wave_matrix(
            tl.ProblemSpec(
                kind=tl.ProblemKind.MIXED_WAVE,
                grid=tl.GridSpec.wave_refinement(0),
                dt=0.5,
            )
        )
        nu = wave.shape[0] // 3
        wpart = tl.BlockPartition(
            blocks=tuple([k, nu + k, 2 * nu + k] for k in range(nu))
        )
        problems.append((wave, wpart))

        for A, part in problems:
            n = A.shape[0]
            if part is None:
                split = tl.rs_cf_split(A)
                sm = tl.red_black_jacobi(A, split)
                part_eff = tl.BlockPartition.singletons(n)
            else:
                split = block_cf_split(A, part)
                sm = tl.red_black_jacobi(A, split, part)
                part_eff = part
            perm = np.concatenate([split.red(), split.black()])
            Mp = sm.M[np.ix_(perm, perm)]
            Ap = A[np.ix_(perm, perm)]
            nr = len(split.red())
            # strictly upper part (red -> black coupling) is zero
            assert np.abs(Mp[:nr, nr:]).max(initial=0.0) == 0.0
            # lower-left equals A's black-red coupling
            assert np.array_equal(Mp[nr:, :nr], Ap[nr:, :nr])
            # (block-)diagonal equals that of A
            D = np.zeros_like(A)
            for b in part_eff.blocks:
                D[np.ix_(b, b)] = A[np.ix_(b, b)]
            Dp = D[np.ix_(perm, perm)]
            assert np.array_equal(Mp[:nr, :nr], Dp[:nr, :nr])
            assert np.array_equal(Mp[nr:, nr:], Dp[nr:, nr:])

    def test_block_and_point_agree_for_singleton_blocks(self):
        A = tl.laplacian_1d(6)
        split = tl.rs_cf_split(A)
        point = tl.red_black_jacobi(A, split)
        blocked = tl.red_black_jacobi(A, split, tl.BlockPartition.singletons(6))
        assert np.array_equal(point.M, blocked.M)

    def test_inconsistent_block_coloring_rejected(self):
        A = np.array([[2.0, 1.0], [1.0, 2.0]])
        split = tl.CFSplit(labels=np.array([RED, BLACK]), theta=0.25)
        with pytest.raises(InconsistentBlockColoring):
            tl.red_black_jacobi(A, split, tl.BlockPartition(blocks=([0, 1],)))
