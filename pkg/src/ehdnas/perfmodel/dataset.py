"""Latency dataset generation and JSONL (de)serialization.

File layout: one header object, then one record per line.
header: {"format": "ehdnas-latds-v1", "K": .., "L": .., "paradigm": .., "budget": ..}
record: {"ops": [..], "latency_ms": ..}
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ..archspace import DiscreteArch, SearchSpaceSpec, ops_matrix, sample_uniform
from ..errors import EmptyDataset, InvalidConfig, ParseError, ValidationError, VersionMismatch
from .budgets import HardwareBudget
from .generic import gp_latency_batch
from .pipeline import pp_latency_batch

DATASET_FORMAT = "ehdnas-latds-v1"
PARADIGMS = ("GP", "PP")


def worker_count() -> int:
    """Benchmark fan-out width; EHDNAS_THREADS caps it."""
    limit = os.cpu_count() or 1
    raw = os.environ.get("EHDNAS_THREADS")
    if raw:
        try:
            limit = min(limit, max(1, int(raw)))
        except ValueError:
            raise InvalidConfig(f"EHDNAS_THREADS must be an integer, got {raw!r}")
    return limit


@dataclass
class LatencyDataset:
    records: list[tuple[DiscreteArch, float]]
    split: str            # train | val | test
    source: str           # generated | ingested
    num_candidates: int
    num_layers: int
    paradigm: str         # GP | PP | ingested
    budget_name: str

    def __len__(self) -> int:
        return len(self.records)


def save_dataset(ds: LatencyDataset, path: str) -> None:
    header = {"format": DATASET_FORMAT, "K": ds.num_candidates, "L": ds.num_layers,
              "paradigm": ds.paradigm, "budget": ds.budget_name}
    with open(path, "w") as fh:
        fh.write(json.dumps(header, separators=(",", ":")) + "\n")
        for arch, latency in ds.records:
            rec = {"ops": list(arch.ops), "latency_ms": latency}
            fh.write(json.dumps(rec, separators=(",", ":")) + "\n")


def ingest_dataset(path: str, split: str = "test") -> LatencyDataset:
    """Parse and validate a latency dataset file; infers K and L from the
    header, so externally produced tables load the same way as generated ones."""
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise EmptyDataset(f"{path}: empty file")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}:1: bad header ({exc})") from exc
    if not isinstance(header, dict) or header.get("format") != DATASET_FORMAT:
        raise VersionMismatch(f"{path}: expected format {DATASET_FORMAT!r}, "
                              f"got {header.get('format') if isinstance(header, dict) else header!r}")
    try:
        k, num_layers = int(header["K"]), int(header["L"])
        paradigm = str(header["paradigm"])
        budget_name = str(header["budget"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"{path}:1: malformed header ({exc})") from exc
    if k < 1 or num_layers < 1:
        raise ValidationError(f"{path}:1: K and L must be positive")
    if paradigm not in PARADIGMS + ("ingested",):
        raise ValidationError(f"{path}:1: unknown paradigm {paradigm!r}")
    records = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}:{lineno}: {exc}") from exc
        try:
            ops = tuple(int(o) for o in rec["ops"])
            latency = float(rec["latency_ms"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"{path}:{lineno}: malformed record ({exc})") from exc
        if len(ops) != num_layers:
            raise ValidationError(f"{path}:{lineno}: expected {num_layers} ops, got {len(ops)}")
        if any(not 0 <= o < k for o in ops):
            raise ValidationError(f"{path}:{lineno}: op index outside [0, {k})")
        if not latency > 0 or not np.isfinite(latency):
            raise ValidationError(f"{path}:{lineno}: latency must be positive and finite")
        records.append((DiscreteArch(ops), latency))
    if not records:
        raise EmptyDataset(f"{path}: no records")
    return LatencyDataset(records, split=split, source="ingested",
                          num_candidates=k, num_layers=num_layers,
                          paradigm=paradigm, budget_name=budget_name)


@dataclass
class GenResult:
    train: LatencyDataset
    val: LatencyDataset
    test: LatencyDataset
    rejected: int


def _pp_totals_threaded(ops: np.ndarray, space, budget):
    workers = worker_count()
    n = ops.shape[0]
    if workers <= 1 or n < 2048:
        return pp_latency_batch(ops, space, budget)
    chunk = -(-n // (workers * 4))
    spans = [(i, min(i + chunk, n)) for i in range(0, n, chunk)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(lambda s: pp_latency_batch(ops[s[0]:s[1]], space, budget), spans))
    totals = np.concatenate([p[0] for p in parts])
    feasible = np.concatenate([p[1] for p in parts])
    return totals, feasible


def gen_dataset(space: SearchSpaceSpec, budget: HardwareBudget, paradigm: str,
                n_train: int, n_val: int, n_test: int, seed: int,
                out_dir: str | None = None) -> GenResult:
    """Sample architectures uniformly, benchmark them, split train/val/test.

    PP-infeasible samples are dropped (counted in `rejected`); the splits
    keep sampling order, so a fixed seed reproduces files byte for byte.
    """
    if paradigm not in PARADIGMS:
        raise InvalidConfig(f"paradigm must be one of {PARADIGMS}, got {paradigm!r}")
    if min(n_train, n_val, n_test) < 0:
        raise InvalidConfig("split sizes must be non-negative")
    n = n_train + n_val + n_test
    archs = sample_uniform(space, n, seed)
    ops = ops_matrix(archs) if n else np.zeros((0, space.num_layers), dtype=np.int32)
    if paradigm == "GP":
        totals, _, _ = gp_latency_batch(ops, space, budget)
        kept = list(zip(archs, (float(t) for t in totals)))
        rejected = 0
    else:
        totals, feasible = _pp_totals_threaded(ops, space, budget)
        kept = [(a, float(t)) for a, t, ok in zip(archs, totals, feasible) if ok]
        rejected = n - len(kept)
        if n and not kept:
            raise EmptyDataset(f"every sampled architecture is infeasible on {budget.name}")

    def make(split, recs):
        return LatencyDataset(recs, split=split, source="generated",
                              num_candidates=space.num_candidates,
                              num_layers=space.num_layers, paradigm=paradigm,
                              budget_name=budget.name)

    result = GenResult(
        train=make("train", kept[:n_train]),
        val=make("val", kept[n_train:n_train + n_val]),
        test=make("test", kept[n_train + n_val:n_train + n_val + n_test]),
        rejected=rejected,
    )
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        for split_name in ("train", "val", "test"):
            save_dataset(getattr(result, split_name), os.path.join(out_dir, f"{split_name}.jsonl"))
    return result
