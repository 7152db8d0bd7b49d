#!/usr/bin/env python3
"""Bound and measured-factor sweeps for the advection-reaction problem.

Emits one CSV per (refinement, smoother) combination, comparing standard
Jacobi against red-black Jacobi across a grid of coarse fractions:

    python3 scripts/sweep_advection.py --outdir results
"""

import argparse
import pathlib

from twolevel.cli import main as cli_main

FRACS = ",".join(str(round(0.1 * k, 1)) for k in range(1, 10))


def run(outdir: pathlib.Path) -> None:
    outdir.mkdir(parents=True, exist_ok=True)
    for r in (1, 2):
        for smoother in ("jacobi", "rb_jacobi"):
            out = outdir / f"advection_r{r}_{smoother}.csv"
            rc = cli_main(
                [
                    "sweep",
                    "--problem", f"advection:r={r}",
                    "--smoother", smoother,
                    "--nc-frac", FRACS,
                    "--nu1", "1", "--nu2", "1",
                    "--out", str(out),
                ]
            )
            print(f"{out} (exit {rc})")


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--outdir", default="results", type=pathlib.Path)
    run(parser.parse_args().outdir)
