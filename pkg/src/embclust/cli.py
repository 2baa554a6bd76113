"""Command line front end.

Subcommands cover the pipeline stages: synth, dist, cluster, refine,
select, loss, ema, epoch, eval. Exit codes: 0 on success, 2 on
malformed or missing input, 3 when selection keeps no instance.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import fileio
from .dbscan import dbscan
from .distances import EUCLIDEAN, JACCARD, jaccard_distance, k_reciprocal_neighbors, pairwise_euclidean
from .embeddings import EmbeddingSet, validate_and_normalize
from .epoch import EpochConfig, run_epoch, write_report
from .errors import EmptySelectionError, MalformedFileError
from .memory import MemoryBank, contrastive_loss
from .metrics import nmi, purity
from .refine import refine_clusters
from .selection import ema_update, select_reliable
from .synth import SynthConfig, generate_synthetic

_CONFIG_TYPES = {
    "eps": float,
    "min_pts": int,
    "alpha": float,
    "beta": float,
    "sigma": float,
    "momentum": float,
    "tau": float,
    "k1": int,
    "distance": str,
    "seed": int,
}


def _epoch_config(args) -> EpochConfig:
    """Merge defaults, config file entries, and explicit flags."""
    values = {}
    if getattr(args, "config", None):
        raw = fileio.read_config(args.config)
        for key, text in raw.items():
            if key not in _CONFIG_TYPES:
                raise MalformedFileError(f"{args.config}: unknown config key {key!r}")
            try:
                values[key] = _CONFIG_TYPES[key](text)
            except ValueError:
                raise MalformedFileError(f"{args.config}: bad value for {key}: {text!r}")
    for key in _CONFIG_TYPES:
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = flag
    return EpochConfig(**values)


def _emit(args, doc: dict):
    text = fileio.dumps_json(doc)
    if getattr(args, "out", None):
        Path(args.out).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)


def _load_truth(path) -> np.ndarray:
    """Ground-truth ids from a clustering JSON, a JSON list, or an embedding file."""
    p = Path(path)
    if p.suffix.lower() == ".json":
        doc = fileio._load_json(p)
        if isinstance(doc, dict) and "labels" in doc:
            return np.asarray(doc["labels"], dtype=np.int64)
        if isinstance(doc, list):
            return np.asarray(doc, dtype=np.int64)
        raise MalformedFileError(f"{path}: expected a label list or clustering document")
    _, labels = fileio.read_embeddings(p)
    if labels is None:
        raise MalformedFileError(f"{path}: no ground-truth labels present")
    return labels


def _cmd_synth(args) -> int:
    cfg = SynthConfig(
        identities=args.identities,
        per_id=args.per_id,
        dim=args.dim,
        noise_scale=args.noise_scale,
        confusable_pairs=args.confusable_pairs,
        view_drift=args.view_drift,
        seed=args.seed if args.seed is not None else 0,
    )
    main_view, mean_view, truth = generate_synthetic(cfg)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    fileio.write_embeddings(out / "main.emb", main_view, labels=truth)
    fileio.write_embeddings(out / "mean.emb", mean_view, labels=truth)
    print(f"wrote {out / 'main.emb'} and {out / 'mean.emb'} (n={cfg.n}, dim={cfg.dim})")
    return 0


def _cmd_dist(args) -> int:
    cfg = _epoch_config(args)
    embeddings, _ = fileio.read_embeddings(args.input)
    euclid = pairwise_euclidean(embeddings)
    kind = args.dist or cfg.distance
    dist = euclid if kind == EUCLIDEAN else jaccard_distance(k_reciprocal_neighbors(euclid, cfg.k1))
    fileio.write_distances(args.out, dist)
    return 0


def _cmd_cluster(args) -> int:
    cfg = _epoch_config(args)
    dist = fileio.read_distances(args.input)
    clustering = dbscan(dist, cfg.eps, cfg.min_pts)
    _emit(args, fileio.clustering_to_dict(clustering))
    return 0


def _cmd_refine(args) -> int:
    cfg = _epoch_config(args)
    embeddings, _ = fileio.read_embeddings(args.input)
    euclid = pairwise_euclidean(embeddings)
    kind = args.dist or cfg.distance
    dist = euclid if kind == EUCLIDEAN else jaccard_distance(k_reciprocal_neighbors(euclid, cfg.k1))
    result = refine_clusters(dist, cfg.eps, cfg.alpha, cfg.min_pts)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    fileio.write_clustering(out / "clustering.json", result.clustering)
    fileio.write_silhouette(out / "silhouette.json", result.report, result.decomposed)
    return 0


def _cmd_select(args) -> int:
    cfg = _epoch_config(args)
    main = fileio.read_clustering(args.main)
    mean = fileio.read_clustering(args.mean)
    mask = select_reliable(main, mean, cfg.beta)
    _emit(args, fileio.mask_to_dict(mask))
    return 0


def _cmd_loss(args) -> int:
    cfg = _epoch_config(args)
    prototypes, _ = fileio.read_embeddings(args.bank, unit_norm=False)
    if isinstance(prototypes, EmbeddingSet):
        prototypes = prototypes.data
    bank = MemoryBank(prototypes=prototypes, momentum=cfg.momentum, tau=cfg.tau)
    features, _ = fileio.read_embeddings(args.features)
    try:
        pos = [int(p) for p in args.pos.split(",")]
    except ValueError:
        raise MalformedFileError(f"--pos must be comma-separated integers, got {args.pos!r}")
    if len(pos) == 1:
        pos = pos * features.n
    if len(pos) != features.n:
        raise ValueError(f"got {len(pos)} positive indices for {features.n} instances")
    losses = [contrastive_loss(features.data[i], bank, pos[i]) for i in range(features.n)]
    _emit(args, {"loss": losses, "mean_loss": float(np.mean(losses))})
    return 0


def _cmd_ema(args) -> int:
    cfg = _epoch_config(args)
    avg, avg_labels = fileio.read_embeddings(args.avg)
    cur, cur_labels = fileio.read_embeddings(args.current)
    blended = ema_update(avg.data, cur.data, cfg.sigma)
    # rows leave the sphere after blending; renormalize to stay an embedding file
    result = validate_and_normalize(blended)
    labels = avg_labels if avg_labels is not None else cur_labels
    fileio.write_embeddings(args.out, result, labels=labels)
    return 0


def _cmd_epoch(args) -> int:
    cfg = _epoch_config(args)
    main_view, main_labels = fileio.read_embeddings(args.main)
    mean_view, _ = fileio.read_embeddings(args.mean)
    truth = main_labels
    clustering, mask, bank, report = run_epoch(
        main_view, mean_view, cfg, truth=truth, renorm=not args.no_renorm
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    fileio.write_clustering(out / "clustering.json", clustering)
    fileio.write_mask(out / "mask.json", mask)
    fileio.write_embeddings(out / "bank.emb", bank.prototypes)
    write_report(out / "report.json", report, cfg)
    return 0


def _cmd_eval(args) -> int:
    pred = fileio.read_clustering(args.pred)
    truth = _load_truth(args.truth)
    if truth.size != pred.n:
        raise ValueError(f"truth length {truth.size} does not match n={pred.n}")
    _emit(args, {"nmi": nmi(pred.labels, truth), "purity": purity(pred.labels, truth)})
    return 0


def _build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--config", help="flat key=value config file")
    shared.add_argument("--seed", type=int, default=None, help="random seed")

    parser = argparse.ArgumentParser(prog="embclust", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", parents=[shared], help="generate a two-view benchmark")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--identities", type=int, default=SynthConfig.identities)
    p.add_argument("--per-id", dest="per_id", type=int, default=SynthConfig.per_id)
    p.add_argument("--dim", type=int, default=SynthConfig.dim)
    p.add_argument("--noise-scale", dest="noise_scale", type=float, default=SynthConfig.noise_scale)
    p.add_argument("--confusable-pairs", dest="confusable_pairs", type=int, default=SynthConfig.confusable_pairs)
    p.add_argument("--view-drift", dest="view_drift", type=float, default=SynthConfig.view_drift)
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("dist", parents=[shared], help="pairwise distance matrix")
    p.add_argument("input", help="EMB1 or CSV embeddings")
    p.add_argument("--out", required=True, help="output .npz path")
    p.add_argument("--dist", choices=[EUCLIDEAN, JACCARD], default=None)
    p.add_argument("--k1", type=int, default=None)
    p.set_defaults(func=_cmd_dist)

    p = sub.add_parser("cluster", parents=[shared], help="density clustering of a distance matrix")
    p.add_argument("input", help="distance .npz")
    p.add_argument("--out", default=None, help="clustering JSON (stdout if omitted)")
    p.add_argument("--eps", type=float, default=None)
    p.add_argument("--min-pts", dest="min_pts", type=int, default=None)
    p.set_defaults(func=_cmd_cluster)

    p = sub.add_parser("refine", parents=[shared], help="cluster and decompose unreliable clusters")
    p.add_argument("input", help="EMB1 or CSV embeddings")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--eps", type=float, default=None)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--min-pts", dest="min_pts", type=int, default=None)
    p.add_argument("--dist", choices=[EUCLIDEAN, JACCARD], default=None)
    p.add_argument("--k1", type=int, default=None)
    p.set_defaults(func=_cmd_refine)

    p = sub.add_parser("select", parents=[shared], help="cross-view reliable-instance mask")
    p.add_argument("main", help="main-view clustering JSON")
    p.add_argument("mean", help="mean-view clustering JSON")
    p.add_argument("--out", default=None, help="mask JSON (stdout if omitted)")
    p.add_argument("--beta", type=float, default=None)
    p.set_defaults(func=_cmd_select)

    p = sub.add_parser("loss", parents=[shared], help="contrastive loss of features against a bank")
    p.add_argument("--bank", required=True, help="prototype EMB1 file")
    p.add_argument("--features", required=True, help="EMB1 or CSV embeddings")
    p.add_argument("--pos", required=True, help="comma-separated positive indices (one or per instance)")
    p.add_argument("--tau", type=float, default=None)
    p.add_argument("--out", default=None, help="loss JSON (stdout if omitted)")
    p.set_defaults(func=_cmd_loss)

    p = sub.add_parser("ema", parents=[shared], help="moving average of two embedding files")
    p.add_argument("avg", help="running average EMB1/CSV")
    p.add_argument("current", help="current EMB1/CSV")
    p.add_argument("--out", required=True, help="output EMB1 path")
    p.add_argument("--sigma", type=float, default=None)
    p.set_defaults(func=_cmd_ema)

    p = sub.add_parser("epoch", parents=[shared], help="one full pipeline epoch")
    p.add_argument("main", help="main-view EMB1/CSV")
    p.add_argument("mean", help="mean-view EMB1/CSV")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--eps", type=float, default=None)
    p.add_argument("--min-pts", dest="min_pts", type=int, default=None)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--sigma", type=float, default=None)
    p.add_argument("--momentum", type=float, default=None)
    p.add_argument("--tau", type=float, default=None)
    p.add_argument("--k1", type=int, default=None)
    p.add_argument("--distance", choices=[EUCLIDEAN, JACCARD], default=None)
    p.add_argument("--no-renorm", action="store_true", help="skip prototype renormalization (ablation)")
    p.set_defaults(func=_cmd_epoch)

    p = sub.add_parser("eval", parents=[shared], help="NMI and purity of a clustering against truth")
    p.add_argument("--pred", required=True, help="clustering JSON")
    p.add_argument("--truth", required=True, help="labels source: clustering/list JSON or labeled embeddings")
    p.add_argument("--out", default=None, help="metrics JSON (stdout if omitted)")
    p.set_defaults(func=_cmd_eval)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except EmptySelectionError as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    except (MalformedFileError, ValueError, OSError, IndexError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
