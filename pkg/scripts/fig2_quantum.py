"""Fig. 2 scenario on 2^N: three starts, steps into Omega2, and the limit.

Writes the trajectory and root-curve CSVs next to --outdir for plotting.
"""

import argparse
from pathlib import Path

from tslv import cli


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--outdir", default="out/fig2")
    args = ap.parse_args()
    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    scenario = Path(__file__).resolve().parents[1] / "scenarios" / "fig2.json"
    code = cli.main(["simulate", str(scenario), "--out", str(out / "trajectories.csv"),
                     "--report", str(out / "report.json")])
    cli.main(["phaseplane", "--params", "fig2", "--timescale", "quantum", "--t", "1,2,4,8",
              "--x-range", "0,2", "--n-samples", "201", "--out", str(out / "phaseplane.csv")])
    print((out / "report.json").read_text(), end="")
    return code


if __name__ == "__main__":
    raise SystemExit(main())
