"""Jacobi-family smoothers and the strength-based red-black splitting.

Red points play the role of F-points and black points the role of
C-points.  The red-black preconditioner relaxes red points first, then
black points using the updated red values, which in red-then-black
ordering is the block lower-triangular matrix [[D_rr, 0], [A_br, D_bb]].
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .errors import (
    DimensionMismatch,
    InconsistentBlockColoring,
    SingularBlock,
    SingularM,
    ZeroDiagonal,
)

RED = 0    # F-points
BLACK = 1  # C-points


@dataclass(frozen=True)
class Smoother:
    """A fine-space preconditioner M together with its LU factorization."""

    M: np.ndarray
    lu: tuple
    label: str

    def solve(self, r: np.ndarray) -> np.ndarray:
        """Apply M^{-1} to a vector or to matrix columns."""
        if np.iscomplexobj(r) and not np.iscomplexobj(self.M):
            return sla.lu_solve(self.lu, r.real) + 1j * sla.lu_solve(self.lu, r.imag)
        return sla.lu_solve(self.lu, r)


def make_smoother(M: np.ndarray, label: str) -> Smoother:
    try:
        lu = sla.lu_factor(M)
    except sla.LinAlgError as exc:
        raise SingularM(label) from exc
    if np.abs(np.diag(lu[0])).min() <= 1e-13 * max(1.0, np.abs(M).max()):
        raise SingularM(f"{label}: pivot below floor")
    sm = Smoother(M=M, lu=lu, label=label)
    # round-trip probe; the factorization must reproduce M^{-1} accurately
    rng = np.random.default_rng(0)
    x = rng.standard_normal(M.shape[0])
    if np.iscomplexobj(M):
        x = x + 0j
    defect = np.linalg.norm(M @ sm.solve(x.copy()) - x) / np.linalg.norm(x)
    if defect > 1e-12 * max(1.0, np.linalg.cond(M)):
        raise SingularM(f"{label}: factorization round-trip defect {defect:.3e}")
    return sm


@dataclass(frozen=True)
class CFSplit:
    """Length-n labels over {RED, BLACK} with the strength threshold used."""

    labels: np.ndarray
    theta: float

    def red(self) -> np.ndarray:
        return np.where(self.labels == RED)[0]

    def black(self) -> np.ndarray:
        return np.where(self.labels == BLACK)[0]


@dataclass(frozen=True)
class BlockPartition:
    """Disjoint index blocks covering {0..n-1}."""

    blocks: tuple

    def __post_init__(self):
        seen = set()
        for b in self.blocks:
            if len(b) == 0:
                raise DimensionMismatch("empty block")
            for i in b:
                if i in seen:
                    raise DimensionMismatch(f"index {i} in two blocks")
                seen.add(int(i))
        object.__setattr__(
            self, "blocks", tuple(np.asarray(b, dtype=int) for b in self.blocks)
        )

    @classmethod
    def singletons(cls, n: int) -> "BlockPartition":
        return cls(blocks=tuple(np.array([i]) for i in range(n)))

    def n(self) -> int:
        return sum(len(b) for b in self.blocks)


def jacobi(A: np.ndarray) -> Smoother:
    """M = diag(A)."""
    d = np.diag(A)
    if np.any(d == 0):
        raise ZeroDiagonal("A has a zero diagonal entry")
    return make_smoother(np.diag(d).astype(A.dtype), "jacobi")


def block_jacobi(A: np.ndarray, part: BlockPartition) -> Smoother:
    """M = block-diagonal extraction of A on the partition."""
    if part.n() != A.shape[0]:
        raise DimensionMismatch("partition does not cover A")
    M = np.zeros_like(A)
    for b in part.blocks:
        blk = A[np.ix_(b, b)]
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", sla.LinAlgWarning)
                lu, _ = sla.lu_factor(blk)
        except sla.LinAlgError as exc:
            raise SingularBlock(str(list(b))) from exc
        if np.abs(np.diag(lu)).min() <= 1e-13 * max(1.0, np.abs(blk).max()):
            raise SingularBlock(str(list(b)))
        M[np.ix_(b, b)] = blk
    return make_smoother(M, "block_jacobi")


def strength_matrix(A: np.ndarray, theta: float = 0.25) -> np.ndarray:
    """Classical strength-of-connection mask: S[i, j] iff i strongly
    depends on j.

    Rows use -a_ij >= theta * max_k(-a_ik); rows whose off-diagonals are
    all nonnegative fall back to |a_ij| >= theta * max|a_ik|.
    """
    n = A.shape[0]
    S = np.zeros((n, n), dtype=bool)
    for i in range(n):
        row = A[i].copy()
        row[i] = 0.0
        neg = -row.real
        m = neg.max(initial=0.0)
        if m > 0:
            S[i] = neg >= theta * m
            S[i] &= neg > 0
        else:
            mag = np.abs(row)
            m = mag.max(initial=0.0)
            if m > 0:
                S[i] = mag >= theta * m
                S[i] &= mag > 0
        S[i, i] = False
    return S


def rs_cf_split(A: np.ndarray, theta: float = 0.25) -> CFSplit:
    """Strength-based first-pass red-black splitting.

    Greedy over descending influence count (ties to the lowest index):
    the picked point becomes red (F) and its unassigned strong neighbors
    become black (C), so every red point with a strong connection ends up
    strongly connected to at least one black point.  Isolated points are
    black; a diagonal matrix is therefore all black.
    """
    n = A.shape[0]
    S = strength_matrix(A, theta)
    influence = S.sum(axis=0)  # how many points depend on each column
    sym = S | S.T
    labels = np.full(n, -1, dtype=int)
    while True:
        unassigned = np.where(labels < 0)[0]
        if unassigned.size == 0:
            break
        k = unassigned[int(np.argmax(influence[unassigned]))]
        if not sym[k].any():
            labels[unassigned] = BLACK
            break
        labels[k] = RED
        for j in np.where(sym[k])[0]:
            if labels[j] < 0:
                labels[j] = BLACK
    return CFSplit(labels=labels, theta=theta)


def block_cf_split(
    A: np.ndarray, part: BlockPartition, theta: float = 0.25
) -> CFSplit:
    """Red-black split constant on blocks: run the strength-based greedy
    on the block-condensed matrix and expand labels back to points."""
    nb = len(part.blocks)
    C = np.zeros((nb, nb))
    for a, ba in enumerate(part.blocks):
        for b, bb in enumerate(part.blocks):
            C[a, b] = A[np.ix_(ba, bb)].sum().real
    block_split = rs_cf_split(C, theta)
    labels = np.empty(part.n(), dtype=int)
    for a, ba in enumerate(part.blocks):
        labels[ba] = block_split.labels[a]
    return CFSplit(labels=labels, theta=theta)


def red_black_jacobi(
    A: np.ndarray, split: CFSplit, part: BlockPartition | None = None
) -> Smoother:
    """M equals A's (block) diagonal on both colors plus the black-red
    coupling A_br, i.e. block lower triangular in red-then-black ordering."""
    n = A.shape[0]
    if split.labels.shape[0] != n:
        raise DimensionMismatch("split does not cover A")
    if part is None:
        part = BlockPartition.singletons(n)
    if part.n() != n:
        raise DimensionMismatch("partition does not cover A")
    for b in part.blocks:
        if np.unique(split.labels[b]).size > 1:
            raise InconsistentBlockColoring(str(list(b)))

    M = np.zeros_like(A)
    for b in part.blocks:
        M[np.ix_(b, b)] = A[np.ix_(b, b)]
    red = split.red()
    black = split.black()
    if red.size and black.size:
        M[np.ix_(black, red)] = A[np.ix_(black, red)]
    label = "rb_jacobi" if max(len(b) for b in part.blocks) == 1 else "block_rb_jacobi"
    return make_smoother(M, label)
