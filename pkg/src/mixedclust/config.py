"""INI-backed pipeline configuration for the CLI.

Sections: [generate], [reduce], [cluster], [pretopo], [evaluate]. Command-line
flags override file values; unknown sections or keys fail loudly by name so
benchmark manifests stay diff-able and typo-safe.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field, replace
from pathlib import Path

from .dataset import GeneratorConfig
from .pretopo import PretopoConfig

REDUCE_METHODS = ("famd", "laplacian", "umap", "pacmap")
CLUSTER_ALGORITHMS = ("kprototypes", "kamila", "phillip_ottaway", "hdbscan", "denseclus", "pretopomd")

_REDUCE_KEYS = {"method": str, "m": int, "k_nn": int, "epochs": int, "t": float, "iters": int}
_CLUSTER_KEYS = {
    "algorithm": str,
    "algorithms": str,
    "k": str,
    "k_max": int,
    "gamma": float,
    "omega": int,
    "core_k": int,
    "runs": int,
}
_EVALUATE_KEYS = {"enabled": str}

_TRUE = ("1", "true", "yes", "on")


def _parse_bool(value: str, where: str) -> bool:
    v = str(value).strip().lower()
    if v in _TRUE:
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"config: {where} must be a boolean, got {value!r}")


@dataclass(frozen=True)
class PipelineConfig:
    """Merged file + flag settings driving every subcommand."""

    generate: GeneratorConfig = field(default_factory=GeneratorConfig)
    reduce: dict = field(default_factory=dict)
    cluster: dict = field(default_factory=dict)
    pretopo: PretopoConfig = field(default_factory=PretopoConfig)
    evaluate: bool = True
    seed: int | None = None
    output_dir: Path = Path(".")
    parallel: bool = False

    @classmethod
    def load(cls, path=None) -> "PipelineConfig":
        if path is None:
            return cls()
        parser = configparser.ConfigParser()
        read = parser.read(Path(path))
        if not read:
            raise ValueError(f"config: cannot read file {path}")

        known = {"generate", "reduce", "cluster", "pretopo", "evaluate"}
        unknown = set(parser.sections()) - known
        if unknown:
            raise ValueError(f"config: unknown section [{sorted(unknown)[0]}]")

        kwargs = {}
        if parser.has_section("generate"):
            section = parser["generate"]
            valid = {key for key, _, _ in GeneratorConfig.INI_KEYS}
            for key in section:
                if key not in valid:
                    raise ValueError(f"config: unknown key {key!r} in [generate]")
            try:
                kwargs["generate"] = GeneratorConfig.from_ini_section(section)
            except ValueError as exc:
                raise ValueError(f"config: [generate] {exc}") from exc

        for name, spec, target in (("reduce", _REDUCE_KEYS, "reduce"), ("cluster", _CLUSTER_KEYS, "cluster")):
            if parser.has_section(name):
                section = parser[name]
                out = {}
                for key, value in section.items():
                    if key not in spec:
                        raise ValueError(f"config: unknown key {key!r} in [{name}]")
                    try:
                        out[key] = spec[key](value)
                    except ValueError as exc:
                        raise ValueError(f"config: [{name}] {key} = {value!r} is not a {spec[key].__name__}") from exc
                kwargs[target] = out

        if parser.has_section("pretopo"):
            section = parser["pretopo"]
            valid = {key for key, _, _ in PretopoConfig.INI_KEYS}
            for key in section:
                if key not in valid:
                    raise ValueError(f"config: unknown key {key!r} in [pretopo]")
            try:
                kwargs["pretopo"] = PretopoConfig.from_ini_section(section)
            except ValueError as exc:
                raise ValueError(f"config: [pretopo] {exc}") from exc

        if parser.has_section("evaluate"):
            section = parser["evaluate"]
            for key in section:
                if key not in _EVALUATE_KEYS:
                    raise ValueError(f"config: unknown key {key!r} in [evaluate]")
            if "enabled" in section:
                kwargs["evaluate"] = _parse_bool(section["enabled"], "[evaluate] enabled")

        cfg = cls(**kwargs)
        cfg.validate()
        return cfg

    def validate(self) -> None:
        g = self.generate
        if g.n_samples < 1:
            raise ValueError(f"config: [generate] samples must be >= 1, got {g.n_samples}")
        if g.k_clusters < 1:
            raise ValueError(f"config: [generate] clusters must be >= 1, got {g.k_clusters}")
        if g.k_clusters > g.n_samples:
            raise ValueError("config: [generate] clusters must be <= samples")
        if g.n_numeric < 0 or g.n_categorical < 0 or g.n_numeric + g.n_categorical < 1:
            raise ValueError("config: [generate] needs numeric + categorical >= 1 columns")
        if g.n_categorical and g.cat_levels < 2:
            raise ValueError(f"config: [generate] levels must be >= 2, got {g.cat_levels}")
        if g.cluster_std <= 0:
            raise ValueError(f"config: [generate] std must be > 0, got {g.cluster_std}")
        method = self.reduce.get("method")
        if method is not None and method not in REDUCE_METHODS:
            raise ValueError(f"config: [reduce] method must be one of {REDUCE_METHODS}, got {method!r}")
        algo = self.cluster.get("algorithm")
        if algo is not None and algo not in CLUSTER_ALGORITHMS:
            raise ValueError(f"config: [cluster] algorithm must be one of {CLUSTER_ALGORITHMS}, got {algo!r}")
        for name in self.bench_algorithms():
            if name not in CLUSTER_ALGORITHMS:
                raise ValueError(f"config: [cluster] algorithms entry {name!r} is not implemented")
        k = self.cluster.get("k")
        if k is not None and k != "elbow":
            try:
                int(k)
            except ValueError:
                raise ValueError(f"config: [cluster] k must be an integer or 'elbow', got {k!r}") from None

    def bench_algorithms(self) -> list:
        raw = self.cluster.get("algorithms")
        if raw is None:
            return list(CLUSTER_ALGORITHMS)
        return [tok.strip() for tok in str(raw).split(",") if tok.strip()]

    def with_overrides(self, **overrides) -> "PipelineConfig":
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})
