"""Command-line harness.

Subcommands:

* ``spectrum`` — factor the pencil and emit the deviation-ordered
  eigenvalues as CSV.
* ``verify``   — run the named verification checks and emit JSON;
  exits 1 when any check fails.
* ``sweep``    — emit one CSV row per coarse dimension with the
  predicted bound and measured convergence factors.
* ``run``      — a single two-level solve from seeded random starts,
  emitted as JSON.

Exit codes: 0 success, 1 verification failure, 2 configuration error,
3 numerical failure.  The ``SPECTL_LOG`` environment variable sets the
logging level.  Output files are written with LF line endings and
``repr`` floats so identical configurations produce identical bytes.
"""

from __future__ import annotations

import argparse
import io
import json
import logging
import os
import sys
import warnings as _warnings

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from dataclasses import dataclass, fields

import numpy as np

from .cycle import (
    error_propagator,
    make_two_level,
    n_norm_of,
    predicted_bound,
    run_iterations,
    spectral_radius,
)
from .errors import ConfigError, PairSplitWarning, TwoLevelError
from .mmio import load_matrix_market
from .pencil import Pencil, factor_pencil, make_pencil
from .problems import (
    GridSpec,
    ProblemKind,
    ProblemSpec,
    advection_reaction_matrix,
    hpd_laplacian,
    mixed_wave_matrix,
    random_dense_pencil,
)
from .smoothers import (
    BlockPartition,
    Smoother,
    block_cf_split,
    block_jacobi,
    jacobi,
    make_smoother,
    red_black_jacobi,
    rs_cf_split,
)
from .transfers import (
    NormSpec,
    optimal_complex_transfers,
    optimal_real_transfers,
)
from .verify import run_verification

log = logging.getLogger("twolevel")

_SMOOTHERS = ("jacobi", "block_jacobi", "rb_jacobi", "block_rb_jacobi")


@dataclass
class Settings:
    problem: str = "laplacian:nx=8,ny=8"
    smoother: str = "jacobi"
    nc: tuple[int, ...] = ()
    nc_frac: tuple[float, ...] = ()
    nu1: int = 1
    nu2: int = 1
    real: bool = False
    seeds: tuple[int, ...] = tuple(range(10))
    out: str | None = None
    mtx_a: str | None = None
    mtx_m: str | None = None
    theta: float = 0.25
    block_size: int = 2
    k_cap: int = 20
    rtol: float = 1e-10
    competitors: int = 20
    xtrue_seed: int = 12345


def _parse_int_list(text) -> tuple[int, ...]:
    if isinstance(text, (list, tuple)):
        return tuple(int(v) for v in text)
    return tuple(int(t) for t in str(text).split(",") if t.strip())


def _parse_float_list(text) -> tuple[float, ...]:
    if isinstance(text, (list, tuple)):
        return tuple(float(v) for v in text)
    return tuple(float(t) for t in str(text).split(",") if t.strip())


def _load_config(path: str) -> dict:
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"bad TOML in {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config root must be a table")
    return data


def resolve_settings(args: argparse.Namespace) -> Settings:
    """Layer hard defaults, then the TOML config, then explicit flags."""
    s = Settings()
    known = {f.name for f in fields(Settings)}
    if getattr(args, "config", None):
        for key, value in _load_config(args.config).items():
            key = key.replace("-", "_")
            if key not in known:
                raise ConfigError(f"unknown config key: {key}")
            setattr(s, key, value)
    for f in fields(Settings):
        value = getattr(args, f.name, None)
        if value is not None:
            setattr(s, f.name, value)
    s.nc = _parse_int_list(s.nc) if s.nc else ()
    s.nc_frac = _parse_float_list(s.nc_frac) if s.nc_frac else ()
    s.seeds = _parse_int_list(s.seeds)
    s.real = bool(s.real)
    for name in ("nu1", "nu2", "block_size", "k_cap", "competitors", "xtrue_seed"):
        setattr(s, name, int(getattr(s, name)))
    s.theta = float(s.theta)
    s.rtol = float(s.rtol)
    if s.nu1 < 0 or s.nu2 < 0:
        raise ConfigError("nu1 and nu2 must be nonnegative")
    if s.smoother not in _SMOOTHERS:
        raise ConfigError(
            f"unknown smoother {s.smoother!r}; choose from {', '.join(_SMOOTHERS)}"
        )
    if not s.seeds:
        raise ConfigError("at least one seed is required")
    return s


def _parse_problem(text: str) -> tuple[str, dict]:
    name, _, rest = text.partition(":")
    params: dict = {}
    for item in rest.split(","):
        if not item.strip():
            continue
        key, eq, value = item.partition("=")
        if not eq:
            raise ConfigError(f"bad problem parameter {item!r} in {text!r}")
        params[key.strip()] = value.strip()
    return name.strip(), params


def _grid_from(params: dict, kind: str) -> GridSpec:
    if "r" in params:
        r = int(params["r"])
        if kind == "advection":
            return GridSpec.advection_refinement(r)
        if kind == "wave":
            return GridSpec.wave_refinement(r)
        return GridSpec(nx=2 * 2**r, ny=2 * 2**r)
    nx = int(params.get("nx", 8))
    ny = int(params.get("ny", params.get("nx", 8)))
    return GridSpec(nx=nx, ny=ny)


def build_problem(s: Settings) -> tuple[np.ndarray, ProblemKind, GridSpec | None]:
    """Return (A, kind, grid); raises ConfigError on unknown names."""
    if s.mtx_a:
        A = load_matrix_market(s.mtx_a)
        return A, ProblemKind.EXTERNAL, None
    name, params = _parse_problem(s.problem)
    try:
        if name == "advection":
            grid = _grid_from(params, "advection")
            spec = ProblemSpec(
                kind=ProblemKind.ADVECTION_REACTION,
                grid=grid,
                dt=0.0,
                stabilization=float(params.get("stab", 0.25)),
            )
            return advection_reaction_matrix(spec), spec.kind, grid
        if name == "wave":
            grid = _grid_from(params, "wave")
            spec = ProblemSpec(
                kind=ProblemKind.MIXED_WAVE,
                grid=grid,
                dt=float(params.get("dt", 1.0)),
                penalty=float(params.get("penalty", 1.0)),
            )
            return mixed_wave_matrix(spec), spec.kind, grid
        if name == "laplacian":
            grid = _grid_from(params, "laplacian")
            spec = ProblemSpec(kind=ProblemKind.LAPLACIAN, grid=grid, dt=0.0)
            return hpd_laplacian(spec), spec.kind, grid
        if name == "random":
            n = int(params.get("n", 6))
            seed = int(params.get("seed", 0))
            pencil = random_dense_pencil(n, seed)
            return np.asarray(pencil.A), ProblemKind.EXTERNAL, None
        if name == "external":
            raise ConfigError("problem 'external' requires --mtx-a")
    except (ValueError, KeyError) as exc:
        raise ConfigError(f"bad problem spec {s.problem!r}: {exc}") from exc
    raise ConfigError(f"unknown problem {name!r}")


def _partition(A: np.ndarray, kind: ProblemKind, s: Settings) -> BlockPartition:
    n = A.shape[0]
    if kind is ProblemKind.MIXED_WAVE:
        nu = n // 3
        return BlockPartition(
            blocks=tuple([k, nu + k, 2 * nu + k] for k in range(nu))
        )
    size = max(1, s.block_size)
    return BlockPartition(
        blocks=tuple(list(range(i, min(i + size, n))) for i in range(0, n, size))
    )


def build_smoother(A: np.ndarray, kind: ProblemKind, s: Settings) -> Smoother:
    if s.mtx_m:
        return make_smoother(load_matrix_market(s.mtx_m), "external")
    if s.smoother == "jacobi":
        return jacobi(A)
    if s.smoother == "block_jacobi":
        return block_jacobi(A, _partition(A, kind, s))
    if s.smoother == "rb_jacobi":
        return red_black_jacobi(A, rs_cf_split(A, s.theta))
    part = _partition(A, kind, s)
    return red_black_jacobi(A, block_cf_split(A, part, s.theta), part)


def build_state(s: Settings):
    A, kind, _ = build_problem(s)
    smoother = build_smoother(A, kind, s)
    pencil = make_pencil(A, smoother.M)
    ged = factor_pencil(pencil)
    return pencil, ged, smoother


def _nc_values(s: Settings, n: int) -> tuple[int, ...]:
    values = list(s.nc)
    values += [max(1, min(n, round(frac * n))) for frac in s.nc_frac]
    if not values:
        values = [max(1, n // 4)]
    for v in values:
        if not 1 <= v <= n:
            raise ConfigError(f"n_c={v} outside [1, {n}]")
    return tuple(sorted(dict.fromkeys(values)))


def _build_transfers(ged, n_c: int, use_real: bool):
    """Return (transfers, effective_n_c, warnings)."""
    notes: list[str] = []
    if use_real:
        with _warnings.catch_warnings(record=True) as caught:
            _warnings.simplefilter("always")
            tp, eff = optimal_real_transfers(ged, n_c)
        for w in caught:
            if issubclass(w.category, PairSplitWarning):
                notes.append(f"pair_split effective_n_c={eff}")
        return tp, eff, notes
    return optimal_complex_transfers(ged, n_c), n_c, notes


def _fmt(x: float) -> str:
    return repr(float(x))


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_spectrum(s: Settings) -> int:
    _pencil, ged, _sm = build_state(s)
    buf = io.StringIO()
    buf.write("index,lambda_re,lambda_im,deviation,cond_Vr\n")
    dev = ged.deviations()
    for i, lam in enumerate(ged.lambdas):
        buf.write(
            f"{i},{_fmt(lam.real)},{_fmt(lam.imag)},{_fmt(dev[i])},{_fmt(ged.cond_Vr)}\n"
        )
    _emit(buf.getvalue(), s.out)
    return 0


def cmd_verify(s: Settings) -> int:
    pencil, ged, smoother = build_state(s)
    n_c = _nc_values(s, pencil.n)[0]
    tp, eff, notes = _build_transfers(ged, n_c, s.real and pencil.is_real)
    results = run_verification(
        pencil,
        ged,
        tp,
        smoother,
        nu1=s.nu1,
        nu2=s.nu2,
        rng=np.random.default_rng(s.seeds[0]),
        n_competitors=s.competitors,
    )
    payload = {
        "n": pencil.n,
        "n_c": eff,
        "warnings": notes,
        "checks": [
            {"name": r.name, "passed": r.passed, "defect": r.defect, "tol": r.tol}
            for r in results
        ],
        "all_passed": all(r.passed for r in results),
    }
    _emit(json.dumps(payload, indent=2, sort_keys=True) + "\n", s.out)
    return 0 if payload["all_passed"] else 1


SWEEP_HEADER = (
    "n_c,n_c/n,predicted_bound,norm_value,spectral_radius,"
    "measured_residual_factor,measured_error_factor,warnings"
)


def cmd_sweep(s: Settings) -> int:
    pencil, ged, smoother = build_state(s)
    n = pencil.n
    spec = NormSpec.identity(n)
    rng = np.random.default_rng(s.xtrue_seed)
    x_true = rng.standard_normal(n)
    if not pencil.is_real:
        x_true = x_true + 1j * rng.standard_normal(n)
    b = pencil.A @ x_true
    buf = io.StringIO()
    buf.write(SWEEP_HEADER + "\n")
    for n_c in _nc_values(s, n):
        notes: list[str] = []
        try:
            tp, eff, notes = _build_transfers(ged, n_c, s.real and pencil.is_real)
            tl = make_two_level(pencil, smoother, tp, nu1=s.nu1, nu2=s.nu2)
            rec = run_iterations(
                tl,
                b,
                s.seeds,
                k_cap=s.k_cap,
                rtol=s.rtol,
                x_true=x_true,
                spec=spec,
                ged=ged,
            )
            bound = predicted_bound(ged, eff, s.nu1, s.nu2)
            notes += rec.warnings
            values = [
                bound,
                rec.n_norm,
                rec.rho,
                rec.measured_residual_factor,
                rec.measured_error_factor,
            ]
        except TwoLevelError as exc:
            # record the failed row and keep sweeping
            log.warning("n_c=%d failed: %s", n_c, exc)
            notes.append(f"row_failed:{type(exc).__name__}")
            bound = predicted_bound(ged, n_c, s.nu1, s.nu2)
            values = [bound, float("nan"), float("nan"), float("nan"), None]
        if ged.ill_conditioned:
            notes.append("ill_conditioned_eigenbasis")
        warn_col = ";".join(note.replace(",", ";") for note in notes)
        buf.write(
            ",".join(
                [str(n_c), _fmt(n_c / n)]
                + [_fmt(v) if v is not None else "" for v in values]
                + [warn_col]
            )
            + "\n"
        )
    _emit(buf.getvalue(), s.out)
    return 0


def cmd_run(s: Settings) -> int:
    pencil, ged, smoother = build_state(s)
    n = pencil.n
    n_c = _nc_values(s, n)[0]
    spec = NormSpec.identity(n)
    tp, eff, notes = _build_transfers(ged, n_c, s.real and pencil.is_real)
    tl = make_two_level(pencil, smoother, tp, nu1=s.nu1, nu2=s.nu2)
    rng = np.random.default_rng(s.xtrue_seed)
    x_true = rng.standard_normal(n)
    if not pencil.is_real:
        x_true = x_true + 1j * rng.standard_normal(n)
    b = pencil.A @ x_true
    rec = run_iterations(
        tl, b, s.seeds, k_cap=s.k_cap, rtol=s.rtol, x_true=x_true, spec=spec, ged=ged
    )
    payload = {
        "n": n,
        "n_c": eff,
        "nu1": s.nu1,
        "nu2": s.nu2,
        "predicted_bound": rec.predicted,
        "norm_value": rec.n_norm,
        "spectral_radius": rec.rho,
        "measured_residual_factor": rec.measured_residual_factor,
        "measured_error_factor": rec.measured_error_factor,
        "k_max": {str(k): v for k, v in rec.k_max.items()},
        "residual_histories": {
            str(k): v for k, v in rec.residual_histories.items()
        },
        "error_histories": {str(k): v for k, v in rec.error_histories.items()},
        "warnings": notes + rec.warnings,
    }
    _emit(json.dumps(payload, indent=2, sort_keys=True) + "\n", s.out)
    return 0


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="TOML config file; flags override its keys")
    p.add_argument("--problem", help="problem spec, e.g. advection:r=1 or wave:r=1,dt=0.1")
    p.add_argument("--smoother", help="one of: " + ", ".join(_SMOOTHERS))
    p.add_argument("--nc", help="comma-separated coarse dimensions")
    p.add_argument("--nc-frac", dest="nc_frac", help="comma-separated coarse fractions of n")
    p.add_argument("--nu1", type=int, help="pre-smoothing steps")
    p.add_argument("--nu2", type=int, help="post-smoothing steps")
    p.add_argument("--real", action="store_const", const=True, default=None,
                   help="use real-valued transfers for real pencils")
    p.add_argument("--seeds", help="comma-separated seeds for random starts")
    p.add_argument("--out", help="output file (default stdout)")
    p.add_argument("--mtx-a", dest="mtx_a", help="Matrix Market file for A")
    p.add_argument("--mtx-m", dest="mtx_m", help="Matrix Market file for M")
    p.add_argument("--theta", type=float, help="strength-of-connection threshold")
    p.add_argument("--block-size", dest="block_size", type=int,
                   help="block size for block smoothers")
    p.add_argument("--k-cap", dest="k_cap", type=int, help="iteration cap per start")
    p.add_argument("--rtol", type=float, help="relative residual stopping tolerance")
    p.add_argument("--competitors", type=int, help="random competitor pairs in verify")
    p.add_argument("--xtrue-seed", dest="xtrue_seed", type=int,
                   help="seed for the manufactured solution")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spectl",
        description="Spectrally optimal two-level methods for matrix pencils.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, doc in (
        ("spectrum", "emit the deviation-ordered generalized eigenvalues as CSV"),
        ("verify", "run the verification checks and emit JSON"),
        ("sweep", "emit a CSV row per coarse dimension"),
        ("run", "run a two-level solve and emit JSON"),
    ):
        p = sub.add_parser(name, help=doc)
        _add_common(p)
    return parser


_COMMANDS = {
    "spectrum": cmd_spectrum,
    "verify": cmd_verify,
    "sweep": cmd_sweep,
    "run": cmd_run,
}


def main(argv=None) -> int:
    level = os.environ.get("SPECTL_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING))
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        settings = resolve_settings(args)
        return _COMMANDS[args.command](settings)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except (TwoLevelError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
