"""Two-level operator assembly, norm evaluation and iteration runs.

The error propagator E = (I - M^{-1}A)^{nu2} (I - Pi) (I - M^{-1}A)^{nu1}
is assembled densely for verification; the iteration path applies the
same operators matrix-free through the stored LU factorizations.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field as dc_field

import numpy as np
import scipy.linalg as sla

from .errors import (
    BadCoarseDim,
    DimensionMismatch,
    DivergenceOverflow,
    SingularCoarseOperator,
)
from .pencil import GeneralizedEigenDecomposition, Pencil
from .smoothers import Smoother
from .transfers import NormSpec, TransferPair

OVERFLOW_GUARD = 1e100


@dataclass(frozen=True)
class TwoLevelOperator:
    pencil: Pencil
    smoother: Smoother
    transfers: TransferPair
    nu1: int
    nu2: int
    coarse_lu: tuple

    @property
    def n(self) -> int:
        return self.pencil.n


def _coarse_lu(A: np.ndarray, tp: TransferPair) -> tuple:
    Ac = tp.R.conj().T @ A @ tp.P
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", sla.LinAlgWarning)
            lu = sla.lu_factor(Ac)
    except sla.LinAlgError as exc:
        raise SingularCoarseOperator("R^* A P is singular") from exc
    if np.abs(np.diag(lu[0])).min() <= 1e-13 * max(1.0, np.abs(Ac).max()):
        raise SingularCoarseOperator("R^* A P pivot below floor")
    return lu


def make_two_level(
    pencil: Pencil, smoother: Smoother, transfers: TransferPair,
    nu1: int = 1, nu2: int = 1,
) -> TwoLevelOperator:
    if transfers.P.shape[0] != pencil.n:
        raise DimensionMismatch("transfer row dimension must equal n")
    if nu1 < 0 or nu2 < 0:
        raise BadCoarseDim("nu1, nu2 must be nonnegative")
    return TwoLevelOperator(
        pencil=pencil, smoother=smoother, transfers=transfers,
        nu1=nu1, nu2=nu2, coarse_lu=_coarse_lu(pencil.A, transfers),
    )


def coarse_projection(pencil: Pencil, tp: TransferPair) -> np.ndarray:
    """Pi = P (R^* A P)^{-1} R^* A, with an idempotency postcondition."""
    lu = _coarse_lu(pencil.A, tp)
    RA = tp.R.conj().T @ pencil.A
    Pi = tp.P @ sla.lu_solve(lu, RA)
    scale = max(1.0, np.abs(Pi).max())
    if np.abs(Pi @ Pi - Pi).max() > 1e-9 * scale:
        raise SingularCoarseOperator("projection failed the idempotency check")
    return Pi


def error_propagator(tl: TwoLevelOperator) -> np.ndarray:
    """Dense E_TG; M is applied via LU solves, never inverted explicitly."""
    A = tl.pencil.A
    n = tl.pencil.n
    S = np.eye(n, dtype=complex if np.iscomplexobj(A) else float)
    S -= tl.smoother.solve(A)
    Pi = coarse_projection(tl.pencil, tl.transfers)
    E = np.linalg.matrix_power(S, tl.nu2) @ (np.eye(n) - Pi)
    E = E @ np.linalg.matrix_power(S, tl.nu1)
    return E


def n_norm_of(
    E: np.ndarray, spec: NormSpec, ged: GeneralizedEigenDecomposition
) -> float:
    """Largest singular value of (D V_r^{-1}) E (D V_r^{-1})^{-1}."""
    if E.shape[0] != ged.n or spec.d.shape[0] != ged.n:
        raise DimensionMismatch("norm evaluation dimension mismatch")
    C = spec.d[:, None] * sla.inv(ged.V_r)
    C_inv = ged.V_r * (1.0 / spec.d)[None, :]
    return float(np.linalg.norm(C @ E @ C_inv, 2))


def spectral_radius(E: np.ndarray) -> float:
    return float(np.abs(sla.eigvals(E)).max())


def predicted_bound(
    ged: GeneralizedEigenDecomposition, n_c: int, nu1: int, nu2: int
) -> float:
    """|1 - lambda_{n_c+1}|^{nu1+nu2}; zero when n_c = n."""
    if not 1 <= n_c <= ged.n:
        raise BadCoarseDim(f"n_c={n_c} outside [1, {ged.n}]")
    if n_c == ged.n:
        return 0.0
    return float(abs(1.0 - ged.lambdas[n_c]) ** (nu1 + nu2))


def power_norm_check(
    E: np.ndarray, spec: NormSpec, ged: GeneralizedEigenDecomposition, k: int
) -> float:
    """||E^k||_N^{1/k}."""
    if k < 1:
        raise BadCoarseDim("k must be >= 1")
    return n_norm_of(np.linalg.matrix_power(E, k), spec, ged) ** (1.0 / k)


def random_competitor_pair(
    pencil: Pencil, n_c: int, rng: np.random.Generator, max_tries: int = 50
) -> TransferPair:
    """Standard-normal competitor (P, R), redrawn until R^* A P is invertible."""
    from .pencil import Field

    for _ in range(max_tries):
        P = rng.standard_normal((pencil.n, n_c))
        R = rng.standard_normal((pencil.n, n_c))
        if not pencil.is_real:
            P = P + 1j * rng.standard_normal((pencil.n, n_c))
            R = R + 1j * rng.standard_normal((pencil.n, n_c))
        tp = TransferPair(
            P=P, R=R, n_c=n_c,
            field=Field.REAL if pencil.is_real else Field.COMPLEX,
        )
        try:
            _coarse_lu(pencil.A, tp)
        except SingularCoarseOperator:
            continue
        return tp
    raise SingularCoarseOperator("could not draw an invertible competitor")


@dataclass
class ConvergenceRecord:
    """Per-start residual/error histories and geometric convergence factors."""

    residual_histories: dict
    error_histories: dict
    k_max: dict
    measured_residual_factor: float
    measured_error_factor: float | None
    predicted: float
    n_norm: float
    rho: float
    warnings: list = dc_field(default_factory=list)


def _two_level_sweep(tl: TwoLevelOperator, x: np.ndarray, b: np.ndarray):
    A = tl.pencil.A
    for _ in range(tl.nu1):
        x = x + tl.smoother.solve(b - A @ x)
    r = b - A @ x
    x = x + tl.transfers.P @ sla.lu_solve(tl.coarse_lu, tl.transfers.R.conj().T @ r)
    for _ in range(tl.nu2):
        x = x + tl.smoother.solve(b - A @ x)
    return x


def run_iterations(
    tl: TwoLevelOperator,
    b: np.ndarray,
    seeds,
    k_cap: int = 20,
    rtol: float = 1e-10,
    x_true: np.ndarray | None = None,
    spec: NormSpec | None = None,
    ged: GeneralizedEigenDecomposition | None = None,
) -> ConvergenceRecord:
    """Two-level V(nu1, nu2) runs from seeded random starts.

    Each start iterates until min(k_cap, first k with ||r_k||/||r_0|| <=
    rtol).  The worst-case geometric factors (||r_k||/||r_0||)^{1/k} and,
    when x_true is supplied, (||e_k||/||e_0||)^{1/k} are recorded along
    with the predicted bound, N-norm and spectral radius of E_TG.
    """
    if k_cap < 1 or rtol <= 0:
        raise BadCoarseDim("k_cap >= 1 and rtol > 0 required")
    A = tl.pencil.A
    n = tl.pencil.n
    res_hist, err_hist, kmaxes = {}, {}, {}
    warns = []
    res_factors, err_factors = [], []
    for seed in seeds:
        rng = np.random.default_rng(seed)
        x = rng.standard_normal(n)
        if np.iscomplexobj(A):
            x = x + 1j * rng.standard_normal(n)
        r0 = float(np.linalg.norm(b - A @ x))
        e0 = float(np.linalg.norm(x_true - x)) if x_true is not None else None
        rh = [r0]
        eh = [e0] if e0 is not None else []
        k = 0
        diverged = False
        while k < k_cap:
            x = _two_level_sweep(tl, x, b)
            k += 1
            rk = float(np.linalg.norm(b - A @ x))
            rh.append(rk)
            if x_true is not None:
                eh.append(float(np.linalg.norm(x_true - x)))
            if rk > OVERFLOW_GUARD:
                msg = f"seed {seed}: residual overflow at iteration {k}"
                warnings.warn(msg, DivergenceOverflow)
                warns.append(msg)
                diverged = True
                break
            if r0 > 0 and rk / r0 <= rtol:
                break
        res_hist[seed] = rh
        err_hist[seed] = eh
        kmaxes[seed] = k
        if r0 > 0 and k > 0 and not diverged:
            res_factors.append((rh[k] / r0) ** (1.0 / k))
            if x_true is not None and e0 and e0 > 0:
                err_factors.append((eh[k] / e0) ** (1.0 / k))
        elif diverged:
            res_factors.append(np.inf)

    E = error_propagator(tl)
    ged_spec_known = spec is not None and ged is not None
    return ConvergenceRecord(
        residual_histories=res_hist,
        error_histories=err_hist,
        k_max=kmaxes,
        measured_residual_factor=float(max(res_factors)) if res_factors else 0.0,
        measured_error_factor=float(max(err_factors)) if err_factors else None,
        predicted=(
            predicted_bound(ged, tl.transfers.n_c, tl.nu1, tl.nu2)
            if ged is not None else float("nan")
        ),
        n_norm=n_norm_of(E, spec, ged) if ged_spec_known else float("nan"),
        rho=spectral_radius(E),
        warnings=warns,
    )
