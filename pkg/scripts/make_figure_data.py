#!/usr/bin/env python3
"""Write the figure datasets (fidelity maps and the amplification sweep)
as CSV files under out/ using the command-line interface.

Usage: python scripts/make_figure_data.py [--outdir out]
"""

import argparse
import sys
from pathlib import Path

from click.testing import CliRunner

from cvcat.cli import main as cvcat_main


def run(args):
    result = CliRunner().invoke(cvcat_main, args, catch_exceptions=False)
    if result.exit_code != 0:
        raise SystemExit(result.exit_code)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--outdir", default="out")
    args = parser.parse_args(argv)
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)

    run(["fidelity-map", "--resource", "ideal", "--grid", "33x65",
         "--out", str(outdir / "map_ideal.csv")])
    run(["fidelity-map", "--resource", "approx", "--n", "2", "--grid", "33x65",
         "--out", str(outdir / "map_ladder.csv")])
    run(["amplify", "--kind", "ideal", "--alpha-range", "0,2.5,51",
         "--out", str(outdir / "amplification_sweep.csv")])
    run(["truncation", "--alpha-range", "0,2.5,51",
         "--out", str(outdir / "truncation.csv")])
    for name in ("map_ideal.csv", "map_ladder.csv", "amplification_sweep.csv",
                 "truncation.csv"):
        print(f"wrote {outdir / name}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
