"""Matrix pencils (A, M) and their generalized eigendecomposition.

The decomposition pairs right eigenvectors V_r with left eigenvectors
V_l := M^{-*} V_r^{-*}, which enforces V_l^* M V_r = I and
V_l^* A V_r = diag(lambdas) by construction.  Eigenvalues are ordered by
descending deviation |1 - lambda|, the quantity that controls two-level
convergence, with conjugate pairs kept adjacent (+Im member first).
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field as dc_field

import numpy as np
import scipy.linalg as sla

from .errors import DimensionMismatch, IllConditionedEigenbasis, SingularM

COND_WARN_THRESHOLD = 1e12
PIVOT_FLOOR = 1e-13  # relative to max |M| entry


class Field(enum.Enum):
    REAL = "real"
    COMPLEX = "complex"


@dataclass(frozen=True)
class Pencil:
    """The pair (A, M), with M invertible."""

    A: np.ndarray
    M: np.ndarray
    n: int
    field: Field

    @property
    def is_real(self) -> bool:
        return self.field is Field.REAL


def make_pencil(A, M, pivot_floor: float = PIVOT_FLOOR) -> Pencil:
    """Validate (A, M) and build a Pencil, inferring the scalar field."""
    A = np.asarray(A)
    M = np.asarray(M)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionMismatch(f"A must be square, got shape {A.shape}")
    if M.shape != A.shape:
        raise DimensionMismatch(f"A is {A.shape} but M is {M.shape}")
    n = A.shape[0]
    if n < 1:
        raise DimensionMismatch("empty pencil")

    if np.iscomplexobj(A) or np.iscomplexobj(M):
        if np.any(A.imag != 0) or np.any(M.imag != 0):
            fld = Field.COMPLEX
            A = A.astype(complex)
            M = M.astype(complex)
        else:
            fld = Field.REAL
            A = A.real.astype(float)
            M = M.real.astype(float)
    else:
        fld = Field.REAL
        A = A.astype(float)
        M = M.astype(float)

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", sla.LinAlgWarning)
        lu, _ = sla.lu_factor(M)
    floor = pivot_floor * max(1.0, np.abs(M).max())
    if np.abs(np.diag(lu)).min() <= floor:
        raise SingularM("LU of M has a pivot below the configured floor")
    return Pencil(A=A, M=M, n=n, field=fld)


@dataclass(frozen=True)
class GeneralizedEigenDecomposition:
    """Ordered left/right generalized eigenvectors and eigenvalues of (A, M)."""

    V_r: np.ndarray
    V_l: np.ndarray
    lambdas: np.ndarray
    ordering: np.ndarray
    cond_Vr: float
    ill_conditioned: bool = dc_field(default=False)

    @property
    def n(self) -> int:
        return self.lambdas.shape[0]

    def deviations(self) -> np.ndarray:
        return np.abs(1.0 - self.lambdas)


def deviation_order(lambdas) -> np.ndarray:
    """Permutation sorting eigenvalues by |1 - lambda| descending.

    Ties break by Re ascending, then Im descending, so exact conjugate
    pairs land adjacent with the +Im member first.  Stable, hence the
    identity on all-equal input.
    """
    lam = np.asarray(lambdas, dtype=complex)
    dev = np.abs(1.0 - lam)
    # lexsort: last key is primary
    return np.lexsort((-lam.imag, lam.real, -dev))


def _tol_imag(lam: complex) -> float:
    return 1e-12 * max(1.0, abs(lam))


def _normalize_phase(V: np.ndarray) -> np.ndarray:
    """Rescale each column so its largest-magnitude entry is real positive."""
    V = V.copy()
    for j in range(V.shape[1]):
        k = int(np.argmax(np.abs(V[:, j])))
        pivot = V[k, j]
        if pivot != 0:
            V[:, j] *= abs(pivot) / pivot
    return V


def _pair_conjugates(lam: np.ndarray, V: np.ndarray):
    """Force exact conjugate pairing of a real pencil's spectrum.

    Eigenvalues within round-off of the real axis are truncated to real
    (and their eigenvectors to real columns).  Each remaining +Im
    eigenvalue is matched to its nearest -Im partner; the pair is averaged
    to literal conjugacy.
    """
    lam = lam.copy()
    V = V.copy()
    n = lam.shape[0]
    is_real = np.array([abs(l.imag) <= _tol_imag(l) for l in lam])
    for j in np.where(is_real)[0]:
        lam[j] = lam[j].real
        if np.abs(V[:, j].imag).max() <= 1e-8 * np.abs(V[:, j]).max():
            V[:, j] = V[:, j].real

    plus = [j for j in range(n) if not is_real[j] and lam[j].imag > 0]
    minus = [j for j in range(n) if not is_real[j] and lam[j].imag < 0]
    used = set()
    for i in plus:
        best, best_d = None, np.inf
        for j in minus:
            if j in used:
                continue
            d = abs(lam[j] - np.conj(lam[i]))
            if d < best_d:
                best, best_d = j, d
        if best is None:
            continue
        used.add(best)
        lam[best] = np.conj(lam[i])
        v = 0.5 * (V[:, i] + np.conj(V[:, best]))
        V[:, i] = v
        V[:, best] = np.conj(v)
    return lam, V


def _readjacency(lam: np.ndarray, V: np.ndarray, perm: np.ndarray):
    """After ordering, make sure each +Im eigenvalue is followed by its
    exact conjugate (equal-deviation multiplicities can interleave pairs)."""
    order = list(perm)
    i = 0
    while i < len(order) - 1:
        l = lam[order[i]]
        if l.imag > _tol_imag(l):
            want = np.conj(l)
            if lam[order[i + 1]] != want:
                for j in range(i + 2, len(order)):
                    if lam[order[j]] == want:
                        order.insert(i + 1, order.pop(j))
                        break
            i += 2
        else:
            i += 1
    return np.array(order)


def _m_normalize(lam: np.ndarray, V: np.ndarray, M: np.ndarray) -> np.ndarray:
    """Rescale columns by the real factor 1/sqrt(|v^* M v|) so that for a
    Hermitian positive definite M the basis is M-orthonormal (and V_l = V_r
    for HPD pairs).  Conjugate pairs share one factor, preserving exact
    conjugacy; near-isotropic columns (|v^* M v| ~ 0) are left untouched."""
    V = V.copy()
    m_scale = max(1.0, float(np.abs(M).max()))
    i = 0
    n = V.shape[1]
    while i < n:
        v = V[:, i]
        paired = (
            i + 1 < n
            and lam[i].imag > _tol_imag(lam[i])
            and lam[i + 1] == np.conj(lam[i])
        )
        q = abs(complex(v.conj() @ (M @ v)))
        if paired:
            w = V[:, i + 1]
            q = 0.5 * (q + abs(complex(w.conj() @ (M @ w))))
        if q > 1e-12 * m_scale:
            s = 1.0 / math.sqrt(q)
            V[:, i] *= s
            if paired:
                V[:, i + 1] *= s
        i += 2 if paired else 1
    return V


def factor_pencil(pencil: Pencil) -> GeneralizedEigenDecomposition:
    """Generalized eigendecomposition of (A, M) with deviation ordering.

    Forms W = M^{-1}A via LU solves, eigendecomposes W, then derives
    V_l = M^{-*} V_r^{-*} so that the pairing V_l^* M V_r = I and
    V_l^* A V_r = diag(lambdas) holds exactly up to round-off.
    """
    lu_piv = sla.lu_factor(pencil.M)
    floor = PIVOT_FLOOR * max(1.0, np.abs(pencil.M).max())
    if np.abs(np.diag(lu_piv[0])).min() <= floor:
        raise SingularM("LU of M has a pivot below the configured floor")
    W = sla.lu_solve(lu_piv, pencil.A)

    lam, V_r = sla.eig(W)
    V_r = _normalize_phase(V_r)
    if pencil.is_real:
        lam, V_r = _pair_conjugates(lam, V_r)

    perm = deviation_order(lam)
    if pencil.is_real:
        perm = _readjacency(lam, V_r, perm)
    lam = lam[perm]
    V_r = V_r[:, perm]
    V_r = _m_normalize(lam, V_r, pencil.M)

    Vr_inv = sla.inv(V_r)
    V_l = sla.solve(pencil.M.conj().T, Vr_inv.conj().T)
    cond = float(np.linalg.cond(V_r))
    ill = cond > COND_WARN_THRESHOLD
    if ill:
        warnings.warn(
            f"eigenbasis condition estimate {cond:.3e} exceeds 1e12",
            IllConditionedEigenbasis,
        )
    return GeneralizedEigenDecomposition(
        V_r=V_r, V_l=V_l, lambdas=lam, ordering=perm, cond_Vr=cond,
        ill_conditioned=ill,
    )


@dataclass(frozen=True)
class BiorthogonalityReport:
    off_diag_A: float
    off_diag_M: float
    diag_A_deviation: float
    diag_M_deviation: float


def verify_biorthogonality(
    ged: GeneralizedEigenDecomposition, pencil: Pencil
) -> BiorthogonalityReport:
    """Max off-diagonal defects of V_l^* A V_r and V_l^* M V_r, plus the
    deviation of their diagonals from (lambdas, ones)."""
    if ged.n != pencil.n:
        raise DimensionMismatch("decomposition does not match pencil size")
    Da = ged.V_l.conj().T @ pencil.A @ ged.V_r
    Dm = ged.V_l.conj().T @ pencil.M @ ged.V_r
    off = ~np.eye(pencil.n, dtype=bool)
    return BiorthogonalityReport(
        off_diag_A=float(np.abs(Da[off]).max(initial=0.0)),
        off_diag_M=float(np.abs(Dm[off]).max(initial=0.0)),
        diag_A_deviation=float(np.abs(np.diag(Da) - ged.lambdas).max()),
        diag_M_deviation=float(np.abs(np.diag(Dm) - 1.0).max()),
    )
