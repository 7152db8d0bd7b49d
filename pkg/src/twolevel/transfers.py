"""Optimal transfer operators and the induced norm machinery.

The optimal interpolation spans the first n_c right eigenvectors of the
deviation-ordered decomposition; the optimal restriction spans the first
n_c left eigenvectors.  For real pencils an equivalent real-valued basis
is emitted column by column: real eigenvectors are copied, and each
conjugate pair (v, conj v) is replaced by Re(v)+Im(v) and Re(v)-Im(v).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .errors import (
    BadCoarseDim,
    CholeskyFailure,
    DimensionMismatch,
    NotRealPencil,
    PairSplitWarning,
    ResidualImaginary,
    SingularBasisChange,
)
from .pencil import Field, GeneralizedEigenDecomposition, _tol_imag

IMAG_TRUNCATE_TOL = 1e-10


@dataclass(frozen=True)
class TransferPair:
    """Interpolation P and restriction R (applied as R^*)."""

    P: np.ndarray
    R: np.ndarray
    n_c: int
    field: Field

    @property
    def n(self) -> int:
        return self.P.shape[0]


@dataclass(frozen=True)
class NormSpec:
    """Diagonal d of the CF-split matrix defining N = (D V_r^{-1})^* (D V_r^{-1})."""

    d: np.ndarray
    real_mode: bool = False

    def __post_init__(self):
        d = np.asarray(self.d)
        if np.any(d == 0):
            raise DimensionMismatch("norm diagonal must have nonzero entries")
        if self.real_mode and (np.any(d.imag != 0) or np.any(d.real <= 0)):
            raise DimensionMismatch("real_mode requires positive real diagonal")
        object.__setattr__(self, "d", d.astype(complex))

    @classmethod
    def identity(cls, n: int) -> "NormSpec":
        return cls(d=np.ones(n), real_mode=True)

    def validate_pairs(self, lambdas: np.ndarray) -> None:
        """real_mode requires d_{i+1} = d_i across each conjugate pair."""
        if not self.real_mode:
            return
        for i in range(len(lambdas) - 1):
            li = lambdas[i]
            if li.imag > _tol_imag(li) and lambdas[i + 1] == np.conj(li):
                if self.d[i + 1] != self.d[i]:
                    raise DimensionMismatch(
                        "real_mode diagonal must be constant on conjugate pairs"
                    )


@dataclass(frozen=True)
class BasisChange:
    B_P: np.ndarray
    B_R: np.ndarray

    def __post_init__(self):
        for name, B in (("B_P", self.B_P), ("B_R", self.B_R)):
            try:
                with warnings.catch_warnings():
                    warnings.simplefilter("ignore", sla.LinAlgWarning)
                    lu, _ = sla.lu_factor(np.asarray(B))
            except sla.LinAlgError as exc:  # pragma: no cover
                raise SingularBasisChange(name) from exc
            if np.abs(np.diag(lu)).min() <= 1e-13 * max(1.0, np.abs(B).max()):
                raise SingularBasisChange(f"{name} is singular")


def _check_nc(n_c: int, n: int) -> None:
    if not 1 <= n_c <= n:
        raise BadCoarseDim(f"n_c={n_c} outside [1, {n}]")


def optimal_complex_transfers(
    ged: GeneralizedEigenDecomposition, n_c: int
) -> TransferPair:
    """P = first n_c right eigenvector columns, R = first n_c left columns."""
    _check_nc(n_c, ged.n)
    return TransferPair(
        P=ged.V_r[:, :n_c].copy(),
        R=ged.V_l[:, :n_c].copy(),
        n_c=n_c,
        field=Field.COMPLEX,
    )


def _pair_starts(lambdas: np.ndarray) -> np.ndarray:
    """Boolean mask: column i starts a conjugate pair (i, i+1)."""
    n = len(lambdas)
    starts = np.zeros(n, dtype=bool)
    i = 0
    while i < n:
        li = lambdas[i]
        if li.imag > _tol_imag(li) and i + 1 < n and lambdas[i + 1] == np.conj(li):
            starts[i] = True
            i += 2
        else:
            i += 1
    return starts


def _to_real(col: np.ndarray, what: str) -> np.ndarray:
    resid = np.abs(col.imag).max(initial=0.0)
    if resid > IMAG_TRUNCATE_TOL * max(1.0, np.abs(col).max()):
        raise ResidualImaginary(
            f"{what}: imaginary residue {resid:.3e} above truncation threshold"
        )
    return col.real.copy()


def optimal_real_transfers(
    ged: GeneralizedEigenDecomposition, n_c: int
) -> tuple[TransferPair, int]:
    """Real-valued optimal transfers for a real pencil.

    Returns (pair, effective_n_c); effective_n_c = n_c + 1 when the
    requested coarse dimension would bisect a conjugate pair, in which
    case a PairSplitWarning is emitted.
    """
    _check_nc(n_c, ged.n)
    lam = ged.lambdas
    if not np.allclose(np.sort_complex(lam), np.sort_complex(np.conj(lam))):
        raise NotRealPencil("spectrum is not closed under conjugation")

    starts = _pair_starts(lam)
    effective = n_c
    if n_c < ged.n and starts[n_c - 1]:
        effective = n_c + 1
        warnings.warn(
            f"n_c={n_c} splits a conjugate pair; growing to {effective}",
            PairSplitWarning,
        )

    cols_P, cols_R = [], []
    i = 0
    while i < effective:
        if starts[i]:
            for V, out in ((ged.V_r, cols_P), (ged.V_l, cols_R)):
                v = V[:, i]
                out.append(v.real + v.imag)
                out.append(v.real - v.imag)
            i += 2
        else:
            cols_P.append(_to_real(ged.V_r[:, i], f"right eigenvector {i}"))
            cols_R.append(_to_real(ged.V_l[:, i], f"left eigenvector {i}"))
            i += 1
    P = np.column_stack(cols_P)
    R = np.column_stack(cols_R)
    return TransferPair(P=P, R=R, n_c=effective, field=Field.REAL), effective


def apply_basis_change(tp: TransferPair, bc: BasisChange) -> TransferPair:
    if bc.B_P.shape != (tp.n_c, tp.n_c) or bc.B_R.shape != (tp.n_c, tp.n_c):
        raise DimensionMismatch("basis change size must equal n_c")
    P = tp.P @ bc.B_P
    R = tp.R @ bc.B_R
    fld = tp.field
    if fld is Field.REAL and (np.iscomplexobj(P) or np.iscomplexobj(R)):
        fld = Field.COMPLEX
    return TransferPair(P=P, R=R, n_c=tp.n_c, field=fld)


def n_norm_matrix(
    spec: NormSpec, ged: GeneralizedEigenDecomposition
) -> np.ndarray:
    """N = (D V_r^{-1})^* (D V_r^{-1}), symmetrized, checked positive definite."""
    if spec.d.shape[0] != ged.n:
        raise DimensionMismatch("norm diagonal size must equal n")
    C = spec.d[:, None] * sla.inv(ged.V_r)
    N = C.conj().T @ C
    N = 0.5 * (N + N.conj().T)
    try:
        sla.cholesky(N, lower=True)
    except sla.LinAlgError as exc:
        raise CholeskyFailure("norm matrix numerically indefinite") from exc
    return N


def cf_block_norm_matrix(
    block_cc: np.ndarray,
    block_ff: np.ndarray,
    ged: GeneralizedEigenDecomposition,
) -> np.ndarray:
    """N = V_r^{-*} diag(B_cc, B_ff) V_r^{-1} for HPD CF blocks."""
    n_c = block_cc.shape[0]
    if n_c + block_ff.shape[0] != ged.n:
        raise DimensionMismatch("CF blocks must cover the full dimension")
    B = sla.block_diag(block_cc, block_ff)
    Vr_inv = sla.inv(ged.V_r)
    N = Vr_inv.conj().T @ B @ Vr_inv
    N = 0.5 * (N + N.conj().T)
    try:
        sla.cholesky(N, lower=True)
    except sla.LinAlgError as exc:
        raise CholeskyFailure("norm matrix numerically indefinite") from exc
    return N


def check_pi_orthogonal(Pi: np.ndarray, N: np.ndarray) -> float:
    """Self-adjointness defect ||N Pi - Pi^* N||_max in the N inner product."""
    if Pi.shape != N.shape:
        raise DimensionMismatch("Pi and N must have identical shape")
    D = N @ Pi - Pi.conj().T @ N
    return float(np.abs(D).max())
