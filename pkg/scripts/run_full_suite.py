"""Run the shipped verification suite, optionally once per mutation as well.

With --mutations every deliberate defect must make the suite fail.  Checks
run in suite order and stop at the first failure, since a broken model can
send convergence checks to their full step budgets.  The script exits
nonzero if the clean run fails or a mutation goes unnoticed.
"""

import argparse
import json
import sys
import time

from tslv import cli, verifier
from tslv.mutations import MUTATIONS, mutated


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--mutations", action="store_true")
    ap.add_argument("--out", default="full_suite.json")
    args = ap.parse_args()
    config = cli.load_suite_arg("full")

    start = time.perf_counter()
    reports = verifier.run_suite(config, workers=args.workers)
    print(verifier.reports_to_table(reports))
    print(f"clean run: {time.perf_counter() - start:.1f} s", flush=True)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(verifier.reports_to_json(reports) + "\n")
    ok = all(r.passed for r in reports)

    if args.mutations:
        for name, (_, desc) in MUTATIONS.items():
            caught = None
            with mutated(name):
                for spec in config["checks"]:
                    (r,) = verifier.run_suite({"seed": config.get("seed", 0), "checks": [spec]})
                    if not r.passed:
                        caught = r.check_id
                        break
            print(f"{name:22s} caught by {caught or 'NOTHING'}  ({desc})", flush=True)
            ok &= caught is not None
    print(json.dumps({"passed": ok}))
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
