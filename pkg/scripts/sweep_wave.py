#!/usr/bin/env python3
"""Bound sweeps for the mixed wave problem across time-step sizes.

Shows how the two-level problem gets harder as the time step grows:

    python3 scripts/sweep_wave.py --outdir results --refinement 1
"""

import argparse
import pathlib

from twolevel.cli import main as cli_main

FRACS = ",".join(str(round(0.1 * k, 1)) for k in range(1, 10))
DTS = ("1.0", "1e-1", "1e-2", "1e-3")


def run(outdir: pathlib.Path, r: int) -> None:
    outdir.mkdir(parents=True, exist_ok=True)
    for dt in DTS:
        out = outdir / f"wave_r{r}_dt{dt}.csv"
        rc = cli_main(
            [
                "sweep",
                "--problem", f"wave:r={r},dt={dt}",
                "--smoother", "jacobi",
                "--nc-frac", FRACS,
                "--nu1", "1", "--nu2", "1",
                "--out", str(out),
            ]
        )
        print(f"{out} (exit {rc})")


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--outdir", default="results", type=pathlib.Path)
    parser.add_argument("--refinement", default=1, type=int)
    args = parser.parse_args()
    run(args.outdir, args.refinement)
