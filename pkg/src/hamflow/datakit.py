"""Dataset assembly: generation, verification and prediction scoring.

A dataset directory holds:

    meta.json        generation parameters, counts, tool version
    manifest.jsonl   one record per (function, cloud) pair
    vocab.json       the token vocabulary used for token_indices
    tensors/         SYMF binary rasters, one per record
    pngs/            optional grayscale previews (three per record)

Everything is a pure function of (spec, master_seed, options), so shards
generated independently merge into the unsharded dataset.
"""

from __future__ import annotations

import json
import math
import os
import time
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .cloud import N_CLOUDS, cloud_suite, splitmix64_next
from .corpus import BasisSpec, cardinality, function_at
from .expr import NotAHamFunction, ParseError, parse_ham, print_expr
from .field import FieldExpr, eval_field, hamiltonian_field
from .raster import (Raster, RenderConfig, _heatmap_channel,
                     _quiver_channel, _streamline_channel, tensor_bytes,
                     export_png, load_tensor, TensorFormatError)
from .tokens import (TokenVocab, build_vocab, distance_euclid,
                     token_sequence, vectorize)

__all__ = ["GenerateOptions", "generate", "verify", "score_predictions",
           "DatasetError", "load_meta", "iter_records"]

DEFAULT_CAP = 10_000_000
SPLIT_MODULUS = 4  # one residue class out of four is the test split


class DatasetError(ValueError):
    pass


@dataclass(frozen=True)
class GenerateOptions:
    limit: int | None = None
    shard: tuple[int, int] = (0, 1)
    resolution: int = 128
    split_fraction: float = 0.75
    png: bool = False
    workers: int = 1
    cap: int = DEFAULT_CAP
    stream_seeds: int = 7
    rk4_step: float = 0.2
    max_steps: int = 300

    def render_config(self) -> RenderConfig:
        return RenderConfig(resolution=self.resolution,
                            stream_seeds=self.stream_seeds,
                            rk4_step=self.rk4_step,
                            max_steps=self.max_steps)


def split_of(master_seed: int, sample_id: int) -> str:
    _, z = splitmix64_next(master_seed ^ sample_id)
    return "train" if z % SPLIT_MODULUS != 0 else "test"


def _shard_range(n: int, k: int, m: int) -> tuple[int, int]:
    if not (m >= 1 and 0 <= k < m):
        raise ValueError(f"invalid shard {k}/{m}")
    return k * n // m, (k + 1) * n // m


def _assemble(sample, ch_stream, ch_heat, resolution) -> Raster:
    ch = np.stack([_quiver_channel(sample, resolution), ch_stream, ch_heat])
    return Raster(np.clip(ch, 0.0, 1.0).astype(np.float32))


def _records_for_index(idx, spec, vocab, suite, cfg, master_seed, out_dir, png):
    """Render one corpus function over every cloud; returns record dicts."""
    f = function_at(idx, spec)
    X = hamiltonian_field(f.to_expr())
    fx, fy = X.compiled()
    # streamline/heatmap channels depend only on the field, not the cloud
    ch_stream = _streamline_channel(fx, fy, cfg)
    ch_heat = _heatmap_channel(fx, fy, cfg)
    tok = token_sequence(f, vocab)
    ham_str = str(f)
    dx_str = print_expr(X.dx)
    dy_str = print_expr(X.dy)
    records = []
    for cloud in suite:
        sample = eval_field(X, cloud)
        raster = _assemble(sample, ch_stream, ch_heat, cfg.resolution)
        sample_id = idx * len(suite) + cloud.id
        tensor_rel = os.path.join("tensors", f"{sample_id}.symf")
        with open(os.path.join(out_dir, tensor_rel), "wb") as fh:
            fh.write(tensor_bytes(raster))
        png_rel: list[str] = []
        if png:
            stem = os.path.join(out_dir, "pngs", str(sample_id))
            written = export_png(raster, stem)
            png_rel = [os.path.relpath(p, out_dir) for p in written]
        records.append({
            "sample_id": sample_id,
            "corpus_index": idx,
            "hamiltonian": ham_str,
            "field_dx": dx_str,
            "field_dy": dy_str,
            "cloud_id": cloud.id,
            "token_indices": tok,
            "tensor_path": tensor_rel,
            "png_paths": png_rel,
            "split": split_of(master_seed, sample_id),
        })
    return records


# worker-process state for parallel generation
_worker_ctx: dict = {}


def _worker_init(spec_desc, master_seed, opts: GenerateOptions, out_dir):
    spec = spec_from_descriptor(spec_desc)
    _worker_ctx.update(
        spec=spec,
        vocab=build_vocab(spec),
        suite=cloud_suite(master_seed),
        cfg=opts.render_config(),
        master_seed=master_seed,
        out_dir=out_dir,
        png=opts.png,
    )


def _worker_task(idx):
    c = _worker_ctx
    return _records_for_index(idx, c["spec"], c["vocab"], c["suite"],
                              c["cfg"], c["master_seed"], c["out_dir"], c["png"])


def spec_from_descriptor(d: dict) -> BasisSpec:
    from fractions import Fraction
    return BasisSpec(d["max_degree"], d["trig"],
                     tuple(Fraction(v) for v in d["delta"]))


def generate(spec: BasisSpec, master_seed: int, out_dir,
             options: GenerateOptions = GenerateOptions()) -> dict:
    """Generate a dataset (or one shard of it); returns the meta dict."""
    total = cardinality(spec)
    if options.limit is not None:
        n_fn = min(options.limit, total)
    elif total > options.cap:
        raise DatasetError(
            f"corpus has {total} members, above the cap of {options.cap}; "
            "pass an explicit limit")
    else:
        n_fn = total
    lo, hi = _shard_range(n_fn, *options.shard)

    os.makedirs(os.path.join(out_dir, "tensors"), exist_ok=True)
    if options.png:
        os.makedirs(os.path.join(out_dir, "pngs"), exist_ok=True)

    vocab = build_vocab(spec)
    vocab.save(os.path.join(out_dir, "vocab.json"))
    cfg = options.render_config()
    spec_desc = spec.describe()

    manifest_path = os.path.join(out_dir, "manifest.jsonl")
    n_records = 0
    with open(manifest_path, "a", encoding="utf-8") as mf:
        if options.workers > 1:
            import multiprocessing as mp
            with mp.Pool(options.workers, initializer=_worker_init,
                         initargs=(spec_desc, master_seed, options, out_dir)) as pool:
                for records in pool.imap(_worker_task, range(lo, hi), chunksize=1):
                    for rec in records:
                        mf.write(json.dumps(rec) + "\n")
                    n_records += len(records)
        else:
            suite = cloud_suite(master_seed)
            for idx in range(lo, hi):
                records = _records_for_index(idx, spec, vocab, suite, cfg,
                                             master_seed, out_dir, options.png)
                for rec in records:
                    mf.write(json.dumps(rec) + "\n")
                n_records += len(records)

    meta = {
        "format_version": 1,
        "tool_version": __version__,
        "spec": spec_desc,
        "master_seed": master_seed,
        "render": cfg.to_dict(),
        "vocabulary": "vocab.json",
        "options": {
            "limit": options.limit,
            "shard": list(options.shard),
            "png": options.png,
            "split_fraction": options.split_fraction,
        },
        "counts": {
            "functions_total": n_fn,
            "functions_in_shard": hi - lo,
            "clouds": N_CLOUDS,
            "records": n_records,
        },
        "created": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
    }
    with open(os.path.join(out_dir, "meta.json"), "w", encoding="utf-8") as f:
        json.dump(meta, f, indent=1)
    return meta


def load_meta(dataset_dir) -> dict:
    path = os.path.join(dataset_dir, "meta.json")
    if not os.path.exists(path):
        raise DatasetError(f"{dataset_dir}: no meta.json (not a dataset?)")
    with open(path, encoding="utf-8") as f:
        return json.load(f)


def iter_records(dataset_dir):
    with open(os.path.join(dataset_dir, "manifest.jsonl"), encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if line:
                yield json.loads(line)


@dataclass
class VerifyReport:
    n_records: int = 0
    n_checked: int = 0
    errors: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors

    def fail(self, sample_id, message):
        self.errors.append({"sample_id": sample_id, "message": message})


def verify(dataset_dir, fraction: float = 0.05) -> VerifyReport:
    """Re-derive a deterministic subset of records from scratch and compare.

    Checks manifest counts against the cardinality formula, token indices
    against re-tokenization and tensor bytes against a fresh render.
    """
    report = VerifyReport()
    meta = load_meta(dataset_dir)
    spec = spec_from_descriptor(meta["spec"])
    master_seed = meta["master_seed"]
    cfg = RenderConfig(**meta["render"])
    vocab = TokenVocab.load(os.path.join(dataset_dir, meta["vocabulary"]))
    suite = cloud_suite(master_seed)

    records = list(iter_records(dataset_dir))
    report.n_records = len(records)

    counts = meta["counts"]
    expected = counts["functions_in_shard"] * counts["clouds"]
    if len(records) != expected:
        report.fail(None, f"record count {len(records)} != expected {expected}")
    total = cardinality(spec)
    limit = meta["options"]["limit"]
    n_fn_expected = min(limit, total) if limit is not None else total
    if counts["functions_total"] != n_fn_expected:
        report.fail(None, f"functions_total {counts['functions_total']} "
                          f"!= min(limit, cardinality) = {n_fn_expected}")

    if not records:
        return report

    stride = max(1, int(round(1.0 / fraction))) if fraction < 1 else 1
    cache: dict[int, tuple] = {}
    for rec in records[::stride]:
        sid = rec["sample_id"]
        idx = rec["corpus_index"]
        if idx not in cache:
            f = function_at(idx, spec)
            X = hamiltonian_field(f.to_expr())
            fx, fy = X.compiled()
            cache.clear()  # records are grouped by index; keep one entry
            cache[idx] = (f, X, _streamline_channel(fx, fy, cfg),
                          _heatmap_channel(fx, fy, cfg))
        f, X, ch_s, ch_h = cache[idx]
        if rec["hamiltonian"] != str(f):
            report.fail(sid, f"hamiltonian mismatch: {rec['hamiltonian']!r}")
            continue
        if rec["token_indices"] != token_sequence(f, vocab):
            report.fail(sid, "token_indices mismatch")
        if rec["split"] != split_of(master_seed, sid):
            report.fail(sid, "split assignment mismatch")
        cloud = suite[rec["cloud_id"]]
        sample = eval_field(X, cloud)
        raster = _assemble(sample, ch_s, ch_h, cfg.resolution)
        tpath = os.path.join(dataset_dir, rec["tensor_path"])
        try:
            with open(tpath, "rb") as fh:
                on_disk = fh.read()
        except OSError as exc:
            report.fail(sid, f"tensor unreadable: {exc}")
            continue
        if on_disk != tensor_bytes(raster):
            report.fail(sid, "tensor bytes differ from re-render")
        report.n_checked += 1
    return report


def score_predictions(dataset_dir, predictions_path) -> dict:
    """Score a JSON Lines predictions file against dataset ground truth.

    Unparsable predictions (or predictions with out-of-vocabulary tokens)
    are scored at the maximal distance sqrt(N) and counted separately.
    """
    meta = load_meta(dataset_dir)
    vocab = TokenVocab.load(os.path.join(dataset_dir, meta["vocabulary"]))
    truth = {rec["sample_id"]: rec["hamiltonian"]
             for rec in iter_records(dataset_dir)}

    with open(predictions_path, encoding="utf-8") as f:
        lines = [ln for ln in (l.strip() for l in f) if ln]
    if not lines:
        raise DatasetError(f"{predictions_path}: empty predictions file")

    max_dist = math.sqrt(vocab.size)
    n = exact = unparsable = 0
    dist_sum = 0.0
    tp = fp = fn = 0
    for ln in lines:
        entry = json.loads(ln)
        sid = entry["sample_id"]
        if sid not in truth:
            raise DatasetError(f"unknown sample_id {sid}")
        truth_vec = vectorize(parse_ham(truth[sid]), vocab)
        n += 1
        try:
            pred_vec = vectorize(parse_ham(entry["predicted"]), vocab)
        except (ParseError, NotAHamFunction, KeyError):
            unparsable += 1
            dist_sum += max_dist
            fn += sum(truth_vec)
            continue
        d = distance_euclid(truth_vec, pred_vec)
        dist_sum += d
        if d == 0.0:
            exact += 1
        tp += sum(1 for t, p in zip(truth_vec, pred_vec) if t == 1 and p == 1)
        fp += sum(1 for t, p in zip(truth_vec, pred_vec) if t == 0 and p == 1)
        fn += sum(1 for t, p in zip(truth_vec, pred_vec) if t == 1 and p == 0)

    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = (2 * precision * recall / (precision + recall)
          if precision + recall else 0.0)
    return {
        "n_scored": n,
        "n_unparsable": unparsable,
        "exact_match_rate": exact / n,
        "mean_distance": dist_sum / n,
        "token_precision": precision,
        "token_recall": recall,
        "token_f1": f1,
    }
