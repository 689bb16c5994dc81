"""Cluster assignment and hierarchy containers shared by all clusterers."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

OUTLIER = -1


@dataclass(frozen=True)
class Partition:
    """Per-row labels; non-outlier labels always form the compact set {0..k-1}.

    ``algorithm`` records the producing algorithm tag plus hyperparameters so
    benchmark rows stay self-describing.
    """

    labels: np.ndarray
    algorithm: str = ""

    def __post_init__(self):
        lab = np.asarray(self.labels, dtype=int)
        object.__setattr__(self, "labels", lab)
        pos = lab[lab != OUTLIER]
        if (lab < OUTLIER).any():
            raise ValueError("labels must be >= 0 or OUTLIER")
        if pos.size:
            uniq = np.unique(pos)
            if not np.array_equal(uniq, np.arange(len(uniq))):
                raise ValueError("non-outlier labels must form a compact 0..k-1 range")

    @property
    def n_rows(self) -> int:
        return len(self.labels)

    @property
    def k(self) -> int:
        pos = self.labels[self.labels != OUTLIER]
        return int(pos.max()) + 1 if pos.size else 0

    @property
    def outlier_fraction(self) -> float:
        return float((self.labels == OUTLIER).mean())

    def members(self, cluster: int) -> np.ndarray:
        return np.flatnonzero(self.labels == cluster)

    def save_csv(self, path) -> None:
        with Path(path).open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["row_index", "label"])
            for i, lab in enumerate(self.labels):
                writer.writerow([i, int(lab)])

    @classmethod
    def load_csv(cls, path, algorithm="loaded") -> "Partition":
        with Path(path).open(newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            next(reader)
            pairs = [(int(r[0]), int(r[1])) for r in reader]
        labels = np.full(len(pairs), OUTLIER, dtype=int)
        for i, lab in pairs:
            labels[i] = lab
        return cls(labels=labels, algorithm=algorithm)


def compact_labels(raw, algorithm: str = "") -> Partition:
    """Relabel arbitrary non-negative ids (OUTLIER preserved) to 0..k-1 by
    order of first appearance."""
    raw = np.asarray(raw, dtype=int)
    out = np.full(len(raw), OUTLIER, dtype=int)
    seen = {}
    for i, lab in enumerate(raw):
        if lab == OUTLIER:
            continue
        if lab not in seen:
            seen[lab] = len(seen)
        out[i] = seen[lab]
    return Partition(labels=out, algorithm=algorithm)


@dataclass
class HierarchyNode:
    """One nested point-set. ``scale`` is the merge height for dendrograms and
    the closure rank for quasi-hierarchies; ``meta`` carries structure-specific
    extras (overlap fractions, seed ids, ...)."""

    id: int
    members: frozenset
    scale: float
    children: tuple = ()
    parent: int | None = None
    meta: dict = field(default_factory=dict)


@dataclass
class Hierarchy:
    """Tree or DAG of nested point-sets with a single root node."""

    nodes: dict
    root: int

    def node(self, node_id: int) -> HierarchyNode:
        return self.nodes[node_id]

    def leaves(self):
        return [n for n in self.nodes.values() if not n.children]

    def to_json(self) -> str:
        payload = []
        for n in sorted(self.nodes.values(), key=lambda x: x.id):
            payload.append(
                {
                    "id": n.id,
                    "parent": n.parent,
                    "children": sorted(n.children),
                    "scale": n.scale,
                    "members": sorted(n.members),
                    "meta": {k: v for k, v in sorted(n.meta.items())},
                }
            )
        return json.dumps({"root": self.root, "nodes": payload}, indent=1)

    def to_text(self) -> str:
        lines = []

        def walk(node_id, depth):
            n = self.nodes[node_id]
            lines.append(
                "  " * depth + f"[{n.id}] scale={n.scale:g} size={len(n.members)}"
            )
            for c in sorted(n.children):
                walk(c, depth + 1)

        walk(self.root, 0)
        return "\n".join(lines)
