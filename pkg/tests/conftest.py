import numpy as np
import pytest
import scipy.linalg as sla

import twolevel as tl


def real_pencil_with_spectrum(lams, seed=0, m_identity=True):
    """Real pencil whose spectrum is exactly the given list.

    Real entries contribute 1x1 blocks; complex entries (given with
    positive imaginary part) contribute 2x2 rotation-like blocks carrying
    the conjugate pair.  The block-diagonal core is conjugated by a fixed
    well-conditioned real similarity so that eigenvectors are nontrivial.
    """
    blocks = []
    for lam in lams:
        lam = complex(lam)
        if lam.imag != 0:
            blocks.append(
                np.array([[lam.real, lam.imag], [-lam.imag, lam.real]])
            )
        else:
            blocks.append(np.array([[lam.real]]))
    D = sla.block_diag(*blocks)
    n = D.shape[0]
    rng = np.random.default_rng(seed)
    S = rng.standard_normal((n, n)) + n * np.eye(n)
    A = S @ D @ np.linalg.inv(S)
    M = np.eye(n)
    if not m_identity:
        M = np.eye(n) + 0.05 * rng.standard_normal((n, n))
    return tl.make_pencil(A, M)


def eig_multiset_distance(a, b):
    """Max distance under the optimal matching of two eigenvalue multisets."""
    from scipy.optimize import linear_sum_assignment

    a = np.asarray(a)
    b = np.asarray(b)
    cost = np.abs(a[:, None] - b[None, :])
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].max())


@pytest.fixture(scope="session")
def seed42():
    """The 6x6 random real pencil used across examples."""
    pencil = tl.random_dense_pencil(6, 42)
    ged = tl.factor_pencil(pencil)
    smoother = tl.make_smoother(np.asarray(pencil.M), "pencil-M")
    return pencil, ged, smoother


@pytest.fixture(scope="session")
def hpd_pair():
    """1D Laplacian with its Jacobi diagonal: an SPD pencil."""
    A = tl.laplacian_1d(8)
    M = np.diag(np.diag(A)).astype(float)
    pencil = tl.make_pencil(A, M)
    return pencil, tl.factor_pencil(pencil)
