"""Coexistence on the Fig. 5 pattern scale {1} u [2, 3] repeated with period 3."""

import argparse
from pathlib import Path

from tslv import cli


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--outdir", default="out/fig5")
    args = ap.parse_args()
    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    scenario = Path(__file__).resolve().parents[1] / "scenarios" / "fig5.json"
    code = cli.main(["simulate", str(scenario), "--out", str(out / "trajectories.csv"),
                     "--report", str(out / "report.json")])
    print((out / "report.json").read_text(), end="")
    return code


if __name__ == "__main__":
    raise SystemExit(main())
