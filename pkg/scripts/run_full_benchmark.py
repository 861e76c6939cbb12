#!/usr/bin/env python3
"""Run the full acceptance benchmark and leave its CSV artifacts behind.

Equivalent to `rwm-meanfield full-benchmark`; kept as a script so the
whole experiment is one `python scripts/run_full_benchmark.py` away.
"""

import sys

from rwm_meanfield.cli import main

if __name__ == "__main__":
    args = sys.argv[1:] or ["--outdir", "benchmark_out"]
    raise SystemExit(main(["full-benchmark", *args]))
