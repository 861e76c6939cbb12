"""CSV artifacts with '#'-prefixed manifest headers.

Every emitted CSV starts with its run manifest (subcommand, resolved
parameters, seed, tool version) as `# key=value` lines, so a file is
self-describing and re-runnable.  Only deterministic fields go into the
header: rerunning the same manifest must reproduce the file byte for
byte, so wall-clock and worker-count details are reported on stdout
instead.  Floats are written with shortest round-trip repr.
"""

from __future__ import annotations

import os

__all__ = ["format_cell", "write_csv", "read_csv"]


def format_cell(value) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(path: str, columns: list[str], rows, manifest: dict | None = None) -> None:
    parent = os.path.dirname(os.path.abspath(path))
    os.makedirs(parent, exist_ok=True)
    manifest = dict(manifest or {})
    # record the artifact's own name (basename keeps bytes independent of
    # where the output directory happens to live)
    manifest.setdefault("file", os.path.basename(path))
    with open(path, "w", newline="\n") as fh:
        for key, value in manifest.items():
            fh.write(f"# {key}={format_cell(value)}\n")
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(format_cell(v) for v in row) + "\n")


def _parse_cell(tok: str):
    try:
        return float(tok)
    except ValueError:
        return tok


def read_csv(path: str):
    """Returns (manifest, columns, rows); numeric cells come back as floats."""
    manifest: dict[str, str] = {}
    columns: list[str] = []
    rows: list[list] = []
    with open(path) as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            if line.startswith("#"):
                body = line.lstrip("# ")
                key, _, value = body.partition("=")
                manifest[key] = value
            elif not columns:
                columns = line.split(",")
            else:
                rows.append([_parse_cell(tok) for tok in line.split(",")])
    return manifest, columns, rows
