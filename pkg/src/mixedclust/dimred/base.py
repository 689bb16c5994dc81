"""Embedding container shared by the reduction methods."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


@dataclass(frozen=True)
class Embedding:
    """n x m projection plus method provenance.

    ``explained_inertia`` is present exactly when the method is factorial
    (FAMD); stochastic neighbor methods carry None.
    """

    coords: np.ndarray
    method: str
    params: dict = field(default_factory=dict)
    explained_inertia: float | None = None

    def __post_init__(self):
        c = np.asarray(self.coords, dtype=float)
        object.__setattr__(self, "coords", c)
        if c.ndim != 2:
            raise ValueError("coords must be a 2-D array")
        if not np.isfinite(c).all():
            raise ValueError("embedding coordinates must be finite")
        if (self.method == "famd") != (self.explained_inertia is not None):
            raise ValueError("explained_inertia present iff method is famd")

    @property
    def n(self) -> int:
        return self.coords.shape[0]

    @property
    def m(self) -> int:
        return self.coords.shape[1]

    def save_csv(self, path) -> None:
        """Header dim_0..dim_{m-1}; params echoed as #-comment lines."""
        with Path(path).open("w", newline="", encoding="utf-8") as fh:
            fh.write(f"# method={self.method}\n")
            for key in sorted(self.params):
                val = self.params[key]
                if isinstance(val, (tuple, list, np.ndarray)):
                    continue
                fh.write(f"# {key}={val}\n")
            if self.explained_inertia is not None:
                fh.write(f"# explained_inertia={self.explained_inertia!r}\n")
            writer = csv.writer(fh)
            writer.writerow([f"dim_{j}" for j in range(self.m)])
            for row in self.coords:
                writer.writerow([repr(float(x)) for x in row])


def load_embedding_csv(path) -> Embedding:
    method = "loaded"
    rows = []
    with Path(path).open(newline="", encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if line.startswith("#"):
                if line.startswith("# method="):
                    method = line.split("=", 1)[1]
                continue
            if line.startswith("dim_"):
                continue
            if line:
                rows.append([float(x) for x in line.split(",")])
    return Embedding(coords=np.array(rows), method="loaded", params={"source": str(path), "original_method": method})
