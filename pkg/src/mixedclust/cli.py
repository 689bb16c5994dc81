"""Pipeline driver: generate / tendency / reduce / cluster / bench.

Every subcommand reads an optional INI config (flags win), writes CSV tables
plus rendered figures into --output-dir, and logs to stderr. Exit code 0
means the requested stage completed; malformed configuration exits 2 with a
message naming the offending field.
"""

from __future__ import annotations

import csv
import json
import logging
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from pathlib import Path

import click
import numpy as np

from .baselines import elbow_k, kamila, kprototypes, phillip_ottaway
from .config import CLUSTER_ALGORITHMS, REDUCE_METHODS, PipelineConfig
from .dataset import MixedDataset, generate, load_csv, save_csv, standardize
from .density import denseclus, hdbscan
from .dimred import famd, laplacian_eigenmaps, pacmap, umap
from .distance import embedding_distances, pairwise
from .figures import save_bench_png, save_embedding_scatter, save_hopkins_png, save_ivat_png
from .labels import OUTLIER
from .pretopo import pretopomd
from .validation import ValidationReport, hopkins, ivat, report

log = logging.getLogger("mixedclust")


@click.group()
@click.option("--config", "config_path", type=click.Path(dir_okay=False), default=None, help="INI config file.")
@click.option("--seed", type=int, default=None, help="Override every seeded stage.")
@click.option("--output-dir", type=click.Path(file_okay=False), default=None, help="Where outputs land.")
@click.option("--parallel", is_flag=True, default=False, help="Run bench algorithms concurrently.")
@click.option("--no-figures", is_flag=True, default=False, help="Skip PNG rendering.")
@click.pass_context
def main(ctx, config_path, seed, output_dir, parallel, no_figures):
    """Mixed-data clustering toolkit: synthetic data, embeddings, clusterers,
    tendency diagnostics, and benchmark tables."""
    logging.basicConfig(stream=sys.stderr, level=logging.INFO, format="%(levelname)s %(message)s")
    try:
        cfg = PipelineConfig.load(config_path)
        cfg = cfg.with_overrides(seed=seed, output_dir=Path(output_dir) if output_dir else None)
        if parallel:
            cfg = replace(cfg, parallel=True)
        cfg.validate()
    except ValueError as exc:
        raise click.UsageError(str(exc)) from exc
    ctx.obj = {"cfg": cfg, "figures": not no_figures}


def _outdir(cfg: PipelineConfig) -> Path:
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _effective_seed(cfg: PipelineConfig, fallback: int = 0) -> int:
    return cfg.seed if cfg.seed is not None else fallback


def _load_complete(path) -> MixedDataset:
    d = load_csv(path)
    if d.has_missing:
        complete = d.complete_cases()
        log.info("dropped %d incomplete rows (%d remain)", d.n_rows - complete.n_rows, complete.n_rows)
        d = complete
    return d


def _write_rows(path: Path, header, rows) -> None:
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


@main.command("generate")
@click.option("--samples", type=int, default=None)
@click.option("--clusters", type=int, default=None)
@click.option("--numeric", type=int, default=None)
@click.option("--categorical", type=int, default=None)
@click.option("--levels", type=int, default=None)
@click.option("--std", type=float, default=None)
@click.pass_context
def cmd_generate(ctx, samples, clusters, numeric, categorical, levels, std):
    """Write a synthetic labeled dataset: data.csv + truth.csv."""
    cfg: PipelineConfig = ctx.obj["cfg"]
    overrides = {
        "n_samples": samples, "k_clusters": clusters, "n_numeric": numeric,
        "n_categorical": categorical, "cat_levels": levels, "cluster_std": std,
    }
    gen = replace(cfg.generate, **{k: v for k, v in overrides.items() if v is not None})
    if cfg.seed is not None:
        gen = replace(gen, rng_seed=cfg.seed)
    try:
        replace(cfg, generate=gen).validate()
    except ValueError as exc:
        raise click.UsageError(str(exc)) from exc

    labeled = generate(gen)
    out = _outdir(cfg)
    save_csv(labeled.data, out / "data.csv")
    _write_rows(out / "truth.csv", ["row_index", "label"], [(i, int(t)) for i, t in enumerate(labeled.truth)])
    click.echo(
        f"generated {gen.n_samples} rows ({gen.n_numeric} numeric + {gen.n_categorical} categorical), "
        f"k={gen.k_clusters}, std={gen.cluster_std:g}, seed={gen.rng_seed} -> {out / 'data.csv'}"
    )


def _reduce_embedding(d: MixedDataset, method: str, m: int, seed: int, params: dict):
    if method == "famd":
        return famd(d, m)
    if method == "laplacian":
        return laplacian_eigenmaps(d, m, t=params.get("t", 1.0))
    if method == "umap":
        return umap(d, m=m, k=params.get("k_nn", 15), epochs=params.get("epochs", 200), seed=seed)
    if method == "pacmap":
        return pacmap(d, m=m, iters=params.get("iters", 450), seed=seed)
    raise ValueError(f"unknown reduction method {method!r}")


@main.command("tendency")
@click.argument("input_csv", type=click.Path(exists=True, dir_okay=False))
@click.option("--methods", default=",".join(REDUCE_METHODS), show_default=True)
@click.option("--m", type=int, default=2, show_default=True, help="Embedding dimension.")
@click.option("--runs", type=int, default=5, show_default=True, help="Hopkins repetitions.")
@click.pass_context
def cmd_tendency(ctx, input_csv, methods, m, runs):
    """Hopkins statistic + iVAT matrix per dimensionality-reduction method."""
    cfg: PipelineConfig = ctx.obj["cfg"]
    seed = _effective_seed(cfg)
    out = _outdir(cfg)
    d = _load_complete(input_csv)

    rows = []
    hopkins_means = {}
    for method in [tok.strip() for tok in methods.split(",") if tok.strip()]:
        try:
            emb = _reduce_embedding(d, method, m, seed, cfg.reduce)
            h_values = [hopkins(emb, seed=seed + r) for r in range(runs)]
            h_mean = float(np.mean(h_values))
            perm, prime = ivat(embedding_distances(emb.coords))
            with (out / f"ivat_{method}.csv").open("w", newline="", encoding="utf-8") as fh:
                writer = csv.writer(fh)
                writer.writerows([[repr(v) for v in row] for row in prime])
            _write_rows(out / f"ivat_order_{method}.csv", ["row_index"], [(int(i),) for i in perm])
            if ctx.obj["figures"]:
                save_ivat_png(prime, out / f"ivat_{method}.png", title=f"iVAT ({method})")
            hopkins_means[method] = h_mean
            rows.append([method, "ok", repr(h_mean), runs, ""])
            click.echo(f"{method}: hopkins={h_mean:.4f} (mean of {runs} runs), ivat -> ivat_{method}.csv")
        except Exception as exc:
            log.error("tendency failed for %s: %s", method, exc)
            rows.append([method, "error", "", runs, str(exc)])
    _write_rows(out / "tendency.csv", ["method", "status", "hopkins", "runs", "error"], rows)
    if ctx.obj["figures"] and hopkins_means:
        save_hopkins_png(hopkins_means, out / "hopkins.png")
    click.echo(f"tendency table -> {out / 'tendency.csv'}")


@main.command("reduce")
@click.argument("input_csv", type=click.Path(exists=True, dir_okay=False))
@click.option("--method", type=click.Choice(REDUCE_METHODS), default=None)
@click.option("--m", type=int, default=None, help="Embedding dimension.")
@click.pass_context
def cmd_reduce(ctx, input_csv, method, m):
    """Embed a dataset and write embedding_<method>.csv (+ scatter figure)."""
    cfg: PipelineConfig = ctx.obj["cfg"]
    method = method or cfg.reduce.get("method", "famd")
    m = m if m is not None else cfg.reduce.get("m", 2)
    seed = _effective_seed(cfg)
    out = _outdir(cfg)
    d = _load_complete(input_csv)

    emb = _reduce_embedding(d, method, m, seed, cfg.reduce)
    emb.save_csv(out / f"embedding_{method}.csv")
    if ctx.obj["figures"]:
        save_embedding_scatter(emb.coords, out / f"embedding_{method}.png", title=f"{method} embedding")
    note = f", explained inertia {emb.explained_inertia:.1%}" if emb.explained_inertia is not None else ""
    click.echo(f"{method} embedding of {d.n_rows} rows into {m} dims{note} -> {out / f'embedding_{method}.csv'}")


def _resolve_k(d: MixedDataset, k_setting, k_max: int) -> int:
    if k_setting == "elbow":
        k = elbow_k(d, k_max)
        log.info("elbow selected k=%d (k_max=%d)", k, k_max)
        return k
    return int(k_setting)


def _run_algorithm(name: str, d: MixedDataset, cfg: PipelineConfig, k: int | None, seed: int):
    """Returns (partition, extras) where extras may hold hierarchy/tree/embedding."""
    cl = cfg.cluster
    if name == "kprototypes":
        return kprototypes(d, k, gamma=cl.get("gamma"), seed=seed), {}
    if name == "kamila":
        return kamila(d, k, runs=cl.get("runs", 5), seed=seed), {}
    if name == "phillip_ottaway":
        part, hier = phillip_ottaway(d, k)
        return part, {"hierarchy": hier}
    if name == "hdbscan":
        D = pairwise(d, metric="huang", gamma=cl.get("gamma"))
        part, tree = hdbscan(D, omega=cl.get("omega", 15), core_k=cl.get("core_k"))
        return part, {"tree": tree}
    if name == "denseclus":
        result = denseclus(
            d, omega=cl.get("omega"), k_nn=cfg.reduce.get("k_nn", 15),
            epochs=cfg.reduce.get("epochs", 200), seed=seed,
        )
        return result.partition, {"tree": result.tree, "embedding": result.embedding}
    if name == "pretopomd":
        part, hier = pretopomd(d, cfg.pretopo)
        return part, {"hierarchy": hier}
    raise ValueError(f"unknown algorithm {name!r}")


@main.command("cluster")
@click.argument("input_csv", type=click.Path(exists=True, dir_okay=False))
@click.option("--algorithm", type=click.Choice(CLUSTER_ALGORITHMS), default=None)
@click.option("--k", "k_option", default=None, help="Cluster count or 'elbow'.")
@click.option("--evaluate/--no-evaluate", "evaluate_flag", default=None)
@click.pass_context
def cmd_cluster(ctx, input_csv, algorithm, k_option, evaluate_flag):
    """Cluster a dataset; write labels.csv plus evaluation and structure files."""
    cfg: PipelineConfig = ctx.obj["cfg"]
    algorithm = algorithm or cfg.cluster.get("algorithm")
    if algorithm is None:
        raise click.UsageError("cluster: no algorithm given (flag --algorithm or [cluster] algorithm)")
    k_setting = k_option if k_option is not None else cfg.cluster.get("k", "elbow")
    if k_setting != "elbow":
        try:
            int(k_setting)
        except ValueError:
            raise click.UsageError(f"cluster: k must be an integer or 'elbow', got {k_setting!r}") from None
    evaluate = evaluate_flag if evaluate_flag is not None else cfg.evaluate
    seed = _effective_seed(cfg)
    out = _outdir(cfg)

    d = _load_complete(input_csv)
    if d.n_numeric:
        d = standardize(d)
    needs_k = algorithm in ("kprototypes", "kamila", "phillip_ottaway")
    k = _resolve_k(d, k_setting, cfg.cluster.get("k_max", 6)) if needs_k else None

    part, extras = _run_algorithm(algorithm, d, cfg, k, seed)
    part.save_csv(out / "labels.csv")
    click.echo(f"{algorithm}: k={part.k}, outliers={part.outlier_fraction:.1%} -> {out / 'labels.csv'}")

    if "hierarchy" in extras:
        (out / "hierarchy.json").write_text(extras["hierarchy"].to_json(), encoding="utf-8")
        (out / "hierarchy.txt").write_text(extras["hierarchy"].to_text() + "\n", encoding="utf-8")
    if "tree" in extras:
        (out / "condensed_tree.json").write_text(extras["tree"].to_json(), encoding="utf-8")

    if evaluate:
        rep = report(d, part)
        _write_rows(out / "report.csv", ValidationReport.CSV_HEADER, [rep.to_csv_row()])
        if rep.degenerate:
            click.echo(f"evaluation: degenerate ({rep.reason}); sentinel row written")
        else:
            click.echo(
                f"evaluation: CH={rep.calinski_harabasz:.2f} silFAMD={rep.silhouette_embedded:.3f} "
                f"silGower={rep.silhouette_gower:.3f} DB={rep.davies_bouldin:.3f}"
            )

    if ctx.obj["figures"]:
        emb = extras.get("embedding")
        coords = emb.coords if emb is not None else famd(d, min(2, d.n_numeric + d.n_categorical)).coords
        save_embedding_scatter(coords, out / "clusters.png", labels=part.labels, title=f"{algorithm} clusters")


@main.command("bench")
@click.argument("input_csv", type=click.Path(exists=True, dir_okay=False))
@click.option("--algorithms", default=None, help="Comma list; defaults to the full suite.")
@click.option("--k", "k_option", default=None, help="Cluster count or 'elbow' for k-taking algorithms.")
@click.pass_context
def cmd_bench(ctx, input_csv, algorithms, k_option):
    """Run the algorithm suite and emit one benchmark row per algorithm."""
    cfg: PipelineConfig = ctx.obj["cfg"]
    if algorithms is not None:
        cfg = replace(cfg, cluster={**cfg.cluster, "algorithms": algorithms})
    try:
        cfg.validate()
    except ValueError as exc:
        raise click.UsageError(str(exc)) from exc
    names = cfg.bench_algorithms()
    k_setting = k_option if k_option is not None else cfg.cluster.get("k", "elbow")
    seed = _effective_seed(cfg)
    out = _outdir(cfg)

    d = _load_complete(input_csv)
    if d.n_numeric:
        d = standardize(d)
    needs_k = any(n in ("kprototypes", "kamila", "phillip_ottaway") for n in names)
    k = _resolve_k(d, k_setting, cfg.cluster.get("k_max", 6)) if needs_k else None

    def run_one(i_name):
        i, name = i_name
        algo_k = k if name in ("kprototypes", "kamila", "phillip_ottaway") else None
        t0 = time.perf_counter()
        try:
            part, _ = _run_algorithm(name, d, cfg, algo_k, seed + i)
            wall = time.perf_counter() - t0
        except Exception as exc:
            wall = time.perf_counter() - t0
            log.error("bench: %s failed: %s", name, exc)
            return {
                "algorithm": name, "status": "error", "CH": "", "sil_famd": "", "sil_gower": "",
                "DB": "", "outliers": "", "k": "", "wall_time": repr(wall), "error": str(exc),
            }
        rep = report(d, part, algorithm=name)
        return {
            "algorithm": name, "status": "ok", "CH": repr(rep.calinski_harabasz),
            "sil_famd": repr(rep.silhouette_embedded), "sil_gower": repr(rep.silhouette_gower),
            "DB": repr(rep.davies_bouldin), "outliers": repr(rep.outlier_fraction),
            "k": rep.k, "wall_time": repr(wall), "error": rep.reason,
        }

    tasks = list(enumerate(names))
    if cfg.parallel and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=len(tasks)) as pool:
            rows = list(pool.map(run_one, tasks))
    else:
        rows = [run_one(t) for t in tasks]

    header = ["algorithm", "status", "CH", "sil_famd", "sil_gower", "DB", "outliers", "k", "wall_time", "error"]
    _write_rows(out / "bench.csv", header, [[r[h] for h in header] for r in rows])
    if ctx.obj["figures"]:
        save_bench_png(rows, out / "bench.png")
    for r in rows:
        if r["status"] == "ok":
            click.echo(f"{r['algorithm']}: k={r['k']} CH={r['CH']} silGower={r['sil_gower']} DB={r['DB']}")
        else:
            click.echo(f"{r['algorithm']}: ERROR {r['error']}")
    click.echo(f"benchmark table -> {out / 'bench.csv'}")


if __name__ == "__main__":
    main()
