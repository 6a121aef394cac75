"""CSV snapshots of solver output: one file per collocation node plus a manifest."""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np


def write_snapshot(path, x, conserved, names):
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(["x", *names])
        for row in zip(x, *conserved):
            out.writerow([repr(float(v)) for v in row])


def write_snapshots(directory, x, nodes, fields, names, prefix="node"):
    """Write ``fields[n]`` (components, cells) for every node; returns the manifest path."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    manifest = directory / "manifest.csv"
    with open(manifest, "w", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(["node", "xi", "file"])
        for n, (xi, U) in enumerate(zip(nodes, fields)):
            name = f"{prefix}_{n:03d}.csv"
            write_snapshot(directory / name, x, U, names)
            out.writerow([n, repr(float(xi)), name])
    return manifest


def read_snapshot(path):
    """Returns (x, conserved components) arrays."""
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return data[:, 0], data[:, 1:].T
