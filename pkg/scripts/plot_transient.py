#!/usr/bin/env python3
"""Plot the Gaussian transient benchmark from full-benchmark artifacts.

Usage: python scripts/plot_transient.py [benchmark_out] [figure.png]

Left panel: the ODE moment curve m(t) against the particle-ensemble a(t)
and the replica-averaged chain curves for each n.  Right panel: empirical
vs predicted acceptance rate over time.
"""

import os
import sys

import numpy as np

from rwm_meanfield.csv_io import read_csv


def load(outdir):
    _, _, ode = read_csv(os.path.join(outdir, "ode.csv"))
    _, _, lim = read_csv(os.path.join(outdir, "limit.csv"))
    reports = {}
    for name in sorted(os.listdir(outdir)):
        if name.startswith("report_n") and name.endswith(".csv"):
            n = int(name[len("report_n"):-len(".csv")])
            _, cols, rows = read_csv(os.path.join(outdir, name))
            reports[n] = (cols, rows)
    return ode, lim, reports


def main():
    outdir = sys.argv[1] if len(sys.argv) > 1 else "benchmark_out"
    outfile = sys.argv[2] if len(sys.argv) > 2 else "transient.png"
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    ode, lim, reports = load(outdir)
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(11, 4.2))

    ax1.plot([r[0] for r in ode], [r[1] for r in ode], "k-", lw=2, label="moment ODE m(t)")
    ax1.plot([r[0] for r in lim], [r[1] for r in lim], "c--", lw=1.5,
             label="particle ensemble a(t)")
    for n, (cols, rows) in sorted(reports.items()):
        it, ia = cols.index("t"), cols.index("a_chain")
        ax1.plot([r[it] for r in rows], [r[ia] for r in rows], "o:", ms=4, label=f"chain n={n}")
    ax1.set_xlabel("t")
    ax1.set_ylabel("second moment")
    ax1.set_title("transient second moment: chain vs limit")
    ax1.legend()
    ax1.grid(alpha=0.3)

    for n, (cols, rows) in sorted(reports.items()):
        it, ie = cols.index("t"), cols.index("acc_emp")
        ax2.plot([r[it] for r in rows], [r[ie] for r in rows], "o:", ms=4, label=f"empirical n={n}")
    cols, rows = reports[max(reports)]
    it, ip = cols.index("t"), cols.index("acc_pred")
    ax2.plot([r[it] for r in rows], [r[ip] for r in rows], "k-", lw=2, label="limit acc(a(t), b(t))")
    ax2.axhline(0.234, color="gray", ls="--", lw=1, label="0.234")
    ax2.set_xlabel("t")
    ax2.set_ylabel("acceptance rate")
    ax2.set_title("acceptance rate vs mean-field prediction")
    ax2.legend()
    ax2.grid(alpha=0.3)

    fig.tight_layout()
    fig.savefig(outfile, dpi=130)
    print(f"wrote {outfile}")


if __name__ == "__main__":
    main()
