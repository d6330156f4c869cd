"""Run every CLI scenario into out/<scenario>/ and print one summary line each.

Exit status is the largest scenario exit code.  Set STARWEYL_THREADS to
parallelise within scenarios.
"""

import sys
import time
from pathlib import Path

from starweyl.cli import load_config, run_scenario, thread_count
from starweyl.scenarios import SCENARIOS


def main(argv):
    out = Path(argv[1]) if len(argv) > 1 else Path("out")
    cfg = load_config(argv[2]) if len(argv) > 2 else {}
    worst = 0
    for name in SCENARIOS:
        t0 = time.perf_counter()
        code, report = run_scenario(name, cfg, out / name, thread_count())
        failed = [c["name"] for c in report["checks"] if c["asserted"] and not c["pass"]]
        print("%-22s exit %d  %6.1f s  %s" % (name, code, time.perf_counter() - t0,
                                              "failed: " + "; ".join(failed) if failed else "ok"))
        worst = max(worst, code)
    return worst


if __name__ == "__main__":
    sys.exit(main(sys.argv))
