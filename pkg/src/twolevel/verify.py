"""Self-checking verification suite for a pencil and a transfer pair.

Runs a fixed list of named checks (rank, biorthogonality, ordering,
bound tightness, power-norm identity, N-orthogonality of the coarse
projection, optimality against random competitors, basis invariance,
real/complex equivalence) and reports a defect and tolerance for each.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .cycle import (
    coarse_projection,
    error_propagator,
    make_two_level,
    n_norm_of,
    power_norm_check,
    predicted_bound,
    random_competitor_pair,
    spectral_radius,
)
from .errors import NotRealPencil, SingularCoarseOperator, TwoLevelError
from .pencil import (
    GeneralizedEigenDecomposition,
    Pencil,
    verify_biorthogonality,
)
from .smoothers import Smoother
from .transfers import (
    BasisChange,
    NormSpec,
    TransferPair,
    apply_basis_change,
    check_pi_orthogonal,
    n_norm_matrix,
    optimal_complex_transfers,
    optimal_real_transfers,
)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    defect: float
    tol: float


def _result(name: str, defect: float, tol: float) -> CheckResult:
    defect = float(defect)
    return CheckResult(name=name, passed=bool(defect <= tol), defect=defect, tol=tol)


def run_verification(
    pencil: Pencil,
    ged: GeneralizedEigenDecomposition,
    transfers: TransferPair,
    smoother: Smoother,
    nu1: int = 1,
    nu2: int = 1,
    spec: NormSpec | None = None,
    rng: np.random.Generator | None = None,
    n_competitors: int = 20,
) -> list[CheckResult]:
    """Run every check against the supplied transfers.

    The defect/tolerance pairs are chosen so that the optimal transfer
    pair passes all checks on a diagonalizable pencil, while corrupted
    transfers (e.g. a zeroed column) fail at least the rank check.
    """
    if spec is None:
        spec = NormSpec.identity(pencil.n)
    if rng is None:
        rng = np.random.default_rng(2024)
    n, n_c = pencil.n, transfers.n_c
    results: list[CheckResult] = []

    rank_P = int(np.linalg.matrix_rank(transfers.P))
    rank_R = int(np.linalg.matrix_rank(transfers.R))
    results.append(_result("transfer_rank", n_c - min(rank_P, rank_R), 0.0))

    rep = verify_biorthogonality(ged, pencil)
    scale = max(1.0, float(np.abs(pencil.A).max()))
    results.append(
        _result(
            "biorthogonality",
            max(rep.off_diag_A, rep.off_diag_M, rep.diag_A_deviation, rep.diag_M_deviation),
            1e-10 * scale,
        )
    )

    dev = ged.deviations()
    results.append(
        _result("deviation_ordering", float(np.max(np.diff(dev), initial=0.0)), 1e-12)
    )

    bound = predicted_bound(ged, n_c, nu1, nu2)
    try:
        tl = make_two_level(pencil, smoother, transfers, nu1=nu1, nu2=nu2)
        E = error_propagator(tl)
        norm = n_norm_of(E, spec, ged)
        rho = spectral_radius(E)
        results.append(
            _result("bound_tightness", abs(norm - bound), 1e-7 * max(1.0, bound))
        )
        results.append(_result("radius_below_norm", rho - norm, 1e-9 * max(1.0, norm)))
        pw = max(abs(power_norm_check(E, spec, ged, k) - norm) for k in (2, 3, 5))
        results.append(_result("power_norm_identity", pw, 1e-6 * max(1.0, norm)))

        Pi = coarse_projection(pencil, transfers)
        N = n_norm_matrix(spec, ged)
        results.append(
            _result(
                "projection_n_orthogonality",
                check_pi_orthogonal(Pi, N),
                1e-9 * max(1.0, float(np.abs(N).max())),
            )
        )

        worst = 0.0
        for _ in range(n_competitors):
            comp = random_competitor_pair(pencil, n_c, rng)
            try:
                tl_c = make_two_level(pencil, smoother, comp, nu1=nu1, nu2=nu2)
            except SingularCoarseOperator:
                continue
            norm_c = n_norm_of(error_propagator(tl_c), spec, ged)
            worst = max(worst, norm - norm_c)
        results.append(_result("optimality", worst, 1e-10 * max(1.0, norm)))

        pi_scale = max(1.0, float(np.abs(Pi).max()))
        drift = 0.0
        for _ in range(3):
            B_P = rng.standard_normal((n_c, n_c))
            B_R = rng.standard_normal((n_c, n_c))
            if not pencil.is_real:
                B_P = B_P + 1j * rng.standard_normal((n_c, n_c))
                B_R = B_R + 1j * rng.standard_normal((n_c, n_c))
            changed = apply_basis_change(transfers, BasisChange(B_P=B_P, B_R=B_R))
            Pi_b = coarse_projection(pencil, changed)
            drift = max(drift, float(np.abs(Pi_b - Pi).max()))
        results.append(_result("basis_invariance", drift, 1e-8 * pi_scale))
    except (SingularCoarseOperator, np.linalg.LinAlgError):
        for name in (
            "bound_tightness",
            "radius_below_norm",
            "power_norm_identity",
            "projection_n_orthogonality",
            "optimality",
            "basis_invariance",
        ):
            results.append(
                CheckResult(name=name, passed=False, defect=float("inf"), tol=0.0)
            )

    if pencil.is_real:
        try:
            tp_c = optimal_complex_transfers(ged, n_c)
            tp_r, eff = optimal_real_transfers(ged, n_c)
            tl_c = make_two_level(pencil, smoother, tp_c, nu1=nu1, nu2=nu2)
            tl_r = make_two_level(pencil, smoother, tp_r, nu1=nu1, nu2=nu2)
            ev_c = np.linalg.eigvals(error_propagator(tl_c))
            ev_r = np.linalg.eigvals(error_propagator(tl_r))
            if eff == n_c:
                cost = np.abs(ev_c[:, None] - ev_r[None, :])
                rows, cols = linear_sum_assignment(cost)
                results.append(
                    _result(
                        "real_complex_equivalence",
                        float(cost[rows, cols].max()),
                        1e-7 * max(1.0, float(np.abs(ev_c).max())),
                    )
                )
        except (NotRealPencil, TwoLevelError):
            pass

    return results
