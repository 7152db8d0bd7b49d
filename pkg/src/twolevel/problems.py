"""Desk-scale test matrices: upwind advection-reaction, a single-step
mixed wave system, the 5-point Laplacian, and random/engineered pencils.

The advection and wave builders are finite-difference stand-ins for the
finite-element problems they mimic: first-order upwinding plus a small
isotropic artificial-diffusion term (the FD analogue of streamline /
interior-penalty stabilization, without which the operator is triangular
and the preconditioned system defective), and a collocated central-
difference midpoint step for the wave system.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field as dc_field

import numpy as np

from .errors import ConfigError
from .pencil import Pencil, make_pencil


class ProblemKind(enum.Enum):
    ADVECTION_REACTION = "advection"
    MIXED_WAVE = "wave"
    LAPLACIAN = "laplacian"
    EXTERNAL = "external"


@dataclass(frozen=True)
class GridSpec:
    nx: int
    ny: int

    def __post_init__(self):
        if self.nx < 2 or self.ny < 2:
            raise ConfigError("grid must have nx, ny >= 2")

    @classmethod
    def advection_refinement(cls, r: int) -> "GridSpec":
        return cls(nx=2 * 2**r, ny=2 * 2**r)

    @classmethod
    def wave_refinement(cls, r: int) -> "GridSpec":
        return cls(nx=3 * 2**r, ny=3 * 2**r)


@dataclass(frozen=True)
class ProblemSpec:
    kind: ProblemKind
    grid: GridSpec | None = None
    dt: float | None = None
    alpha0: float = 0.1
    alpha1: float = 0.9
    interval: tuple = (0.25, 0.75)
    advection_scale: float = 1.0
    stabilization: float = 0.25
    penalty: float = 1.0
    c_override: float | None = None
    grad_from_div_transpose: bool = False

    def __post_init__(self):
        if self.kind is ProblemKind.MIXED_WAVE:
            if self.dt is None or self.dt < 0:
                raise ConfigError("wave problem needs dt >= 0")
        if self.kind is not ProblemKind.EXTERNAL and self.grid is None:
            raise ConfigError(f"{self.kind.value} problem needs a grid")


def _chi(t: float, interval) -> float:
    lo, hi = interval
    return 1.0 if lo <= t <= hi else 0.0


def advection_reaction_matrix(spec: ProblemSpec) -> np.ndarray:
    """First-order upwind discretization of b.grad(u) + c0 u on the unit
    square with b = (cos^2(pi y), cos^2(pi x)).

    Unknowns sit at nodes (i h, j h), i, j = 1..nx with h = 1/nx; the
    inflow lines x = 0 and y = 0 are Dirichlet and eliminated into the
    operator.  A small isotropic diffusion eps = stabilization * h is
    added for diagonalizability; set stabilization = 0 for the raw
    triangular upwind operator.
    """
    if spec.kind is not ProblemKind.ADVECTION_REACTION:
        raise ConfigError("spec.kind must be advection")
    nx, ny = spec.grid.nx, spec.grid.ny
    h = 1.0 / nx
    hy = 1.0 / ny
    n = nx * ny
    A = np.zeros((n, n))
    eps = spec.stabilization * h

    def idx(i, j):
        return (j - 1) * nx + (i - 1)

    for j in range(1, ny + 1):
        for i in range(1, nx + 1):
            x, y = i * h, j * hy
            b1 = spec.advection_scale * np.cos(np.pi * y) ** 2
            b2 = spec.advection_scale * np.cos(np.pi * x) ** 2
            c0 = spec.alpha0 + spec.alpha1 * _chi(x, spec.interval) * _chi(
                y, spec.interval
            )
            k = idx(i, j)
            A[k, k] = b1 / h + b2 / hy + c0 + 2 * eps / h**2 + 2 * eps / hy**2
            stencil = (
                (i - 1, j, -b1 / h - eps / h**2),
                (i + 1, j, -eps / h**2),
                (i, j - 1, -b2 / hy - eps / hy**2),
                (i, j + 1, -eps / hy**2),
            )
            for ii, jj, coef in stencil:
                if 1 <= ii <= nx and 1 <= jj <= ny:
                    A[k, idx(ii, jj)] = coef
                # otherwise: inflow node eliminated (Dirichlet) or
                # one-sided at the outflow boundary
    return A


def mixed_wave_matrix(spec: ProblemSpec) -> np.ndarray:
    """One-step midpoint system matrix for the mixed wave unknowns
    (u^{n+1}, p^{n+1}) with weak boundary penalty on the u rows.

    Block layout [u; p_x; p_y], 3 nx ny unknowns, central differences
    with one-sided stencils at the boundary.
    """
    if spec.kind is not ProblemKind.MIXED_WAVE:
        raise ConfigError("spec.kind must be wave")
    nx, ny = spec.grid.nx, spec.grid.ny
    hx = 1.0 / (nx - 1)
    hy = 1.0 / (ny - 1)
    nu = nx * ny
    dt = spec.dt

    def idx(i, j):
        return j * nx + i

    Dx = np.zeros((nu, nu))
    Dy = np.zeros((nu, nu))
    boundary = []
    cvals = np.empty(nu)
    for j in range(ny):
        for i in range(nx):
            k = idx(i, j)
            x, y = i * hx, j * hy
            if spec.c_override is not None:
                cvals[k] = spec.c_override
            else:
                cvals[k] = spec.alpha0 + spec.alpha1 * _chi(x, (0.2, 0.8)) * _chi(
                    y, (0.2, 0.8)
                )
            if i in (0, nx - 1) or j in (0, ny - 1):
                boundary.append(k)
            if 0 < i < nx - 1:
                Dx[k, idx(i + 1, j)] = 1 / (2 * hx)
                Dx[k, idx(i - 1, j)] = -1 / (2 * hx)
            elif i == 0:
                Dx[k, idx(1, j)] = 1 / hx
                Dx[k, k] = -1 / hx
            else:
                Dx[k, k] = 1 / hx
                Dx[k, idx(nx - 2, j)] = -1 / hx
            if 0 < j < ny - 1:
                Dy[k, idx(i, j + 1)] = 1 / (2 * hy)
                Dy[k, idx(i, j - 1)] = -1 / (2 * hy)
            elif j == 0:
                Dy[k, idx(i, 1)] = 1 / hy
                Dy[k, k] = -1 / hy
            else:
                Dy[k, k] = 1 / hy
                Dy[k, idx(i, ny - 2)] = -1 / hy

    A = np.eye(3 * nu)
    A[:nu, nu:2 * nu] = (dt / 2) * cvals[:, None] * Dx
    A[:nu, 2 * nu:] = (dt / 2) * cvals[:, None] * Dy
    if spec.grad_from_div_transpose:
        A[nu:2 * nu, :nu] = -(dt / 2) * Dx.T
        A[2 * nu:, :nu] = -(dt / 2) * Dy.T
    else:
        A[nu:2 * nu, :nu] = (dt / 2) * Dx
        A[2 * nu:, :nu] = (dt / 2) * Dy
    for k in boundary:
        A[k, k] += dt * spec.penalty
    return A


def hpd_laplacian(spec: ProblemSpec) -> np.ndarray:
    """Unscaled 5-point Laplacian on an nx x ny interior grid (SPD)."""
    if spec.kind is not ProblemKind.LAPLACIAN:
        raise ConfigError("spec.kind must be laplacian")
    nx, ny = spec.grid.nx, spec.grid.ny
    n = nx * ny
    A = np.zeros((n, n))

    def idx(i, j):
        return j * nx + i

    for j in range(ny):
        for i in range(nx):
            k = idx(i, j)
            A[k, k] = 4.0
            for ii, jj in ((i - 1, j), (i + 1, j), (i, j - 1), (i, j + 1)):
                if 0 <= ii < nx and 0 <= jj < ny:
                    A[k, idx(ii, jj)] = -1.0
    return A


def laplacian_1d(n: int) -> np.ndarray:
    """tridiag(-1, 2, -1)."""
    return (
        2.0 * np.eye(n)
        - np.eye(n, k=1)
        - np.eye(n, k=-1)
    )


def random_dense_pencil(n: int, seed: int, m_shift: float = 0.0) -> Pencil:
    """Random real pencil with standard-normal A and a well-conditioned M.

    Random matrices are diagonalizable almost surely; M = shift*I + 0.1*G
    keeps the smoother invertible and mildly nonsymmetric.
    """
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((n, n))
    shift = m_shift if m_shift > 0 else float(np.sqrt(n))
    M = shift * np.eye(n) + 0.1 * rng.standard_normal((n, n))
    return make_pencil(A, M)


def diagonal_pencil(lambdas) -> Pencil:
    """A = diag(lambdas), M = I: a pencil with a prescribed spectrum."""
    lam = np.asarray(lambdas)
    return make_pencil(np.diag(lam), np.eye(len(lam)))
