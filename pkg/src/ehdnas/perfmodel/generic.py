"""Generic paradigm: one shared (Tm, Tn) compute tile serves the whole
network.  A design-space exploration over power-of-two tiles picks the
tile minimizing end-to-end latency; weights stay on-chip only when the
whole network fits.  Always feasible.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import ceil

import numpy as np

from ..archspace import BYTES_PER_WEIGHT, DiscreteArch, SearchSpaceSpec
from ..errors import InvalidArch, MismatchedSpace
from . import kernels
from .budgets import HardwareBudget
from .roofline import (
    LatencyReport,
    LayerWorkload,
    block_workload,
    dense_sub_ops,
    head_workload,
    layer_latency,
    stem_workload,
    validate_arch,
)

MAX_TILE = 1024
_POW2 = tuple(1 << i for i in range(11))  # 1 .. 1024


def tile_configs(dsp_count: int) -> list[tuple[int, int]]:
    """Candidate (Tm, Tn) tiles: powers of two with Tm*Tn <= dsp_count,
    enumerated in ascending (Tm, Tn) order (ties in the DSE resolve to the
    earliest tile)."""
    return [(tm, tn) for tm in _POW2 for tn in _POW2 if tm * tn <= dsp_count]


def _tile_cycles(sub_ops: list[tuple[int, int]], tm: int, tn: int) -> int:
    return sum(ceil(o / tm) * ceil(i / tn) for o, i in sub_ops)


def _tile_latency(workload: LayerWorkload, sub_ops, tm, tn, budget, resident):
    cycles = _tile_cycles(sub_ops, tm, tn)
    alloc = Fraction(workload.macs, cycles) if cycles else 0
    return layer_latency(workload, alloc, budget, resident)


@dataclass(frozen=True)
class TileTables:
    """Per-(space, budget) latency tables indexed by [tile, block, resident]."""

    configs: tuple[tuple[int, int], ...]
    layer_ms: np.ndarray   # (ncfg, K, 2) float64
    layer_bound: np.ndarray  # (ncfg, K, 2) uint8, 0 = compute, 1 = memory
    stem_ms: np.ndarray    # (ncfg, 2)
    stem_bound: np.ndarray
    head_ms: np.ndarray
    head_bound: np.ndarray
    io_ms: float
    block_weight_bits: np.ndarray  # (K,) int64
    base_weight_bits: int          # stem + head


@lru_cache(maxsize=32)
def _tables(space: SearchSpaceSpec, budget: HardwareBudget) -> TileTables:
    cfgs = tile_configs(budget.dsp_count)
    ncfg, k = len(cfgs), space.num_candidates
    layer_ms = np.empty((ncfg, k, 2))
    layer_bound = np.empty((ncfg, k, 2), dtype=np.uint8)
    stem_ms = np.empty((ncfg, 2))
    stem_bound = np.empty((ncfg, 2), dtype=np.uint8)
    head_ms = np.empty((ncfg, 2))
    head_bound = np.empty((ncfg, 2), dtype=np.uint8)

    stem_w, head_w = stem_workload(space), head_workload(space)
    stem_ops = [(stem_w.out_features, stem_w.in_features)]
    head_ops = [(head_w.out_features, head_w.in_features)]
    for ci, (tm, tn) in enumerate(cfgs):
        for res in (0, 1):
            for ki, block in enumerate(space.catalog):
                w = block_workload(block, space)
                ms, bound = _tile_latency(w, dense_sub_ops(block, space), tm, tn,
                                          budget, bool(res))
                layer_ms[ci, ki, res] = ms
                layer_bound[ci, ki, res] = 0 if bound == "compute" else 1
            stem_ms[ci, res], b = _tile_latency(stem_w, stem_ops, tm, tn, budget, bool(res))
            stem_bound[ci, res] = 0 if b == "compute" else 1
            head_ms[ci, res], b = _tile_latency(head_w, head_ops, tm, tn, budget, bool(res))
            head_bound[ci, res] = 0 if b == "compute" else 1

    io_bytes = (space.input_dim + space.num_classes) * BYTES_PER_WEIGHT
    io_ms = io_bytes / budget.dram_bytes_per_sec * 1e3
    block_bits = np.array([b.weight_bytes * 8 for b in space.catalog], dtype=np.int64)
    base_bits = (stem_w.weight_bytes + head_w.weight_bytes) * 8
    for arr in (layer_ms, layer_bound, stem_ms, stem_bound, head_ms, head_bound):
        arr.setflags(write=False)
    return TileTables(tuple(cfgs), layer_ms, layer_bound, stem_ms, stem_bound,
                      head_ms, head_bound, io_ms, block_bits, base_bits)


def gp_latency_batch(ops: np.ndarray, space: SearchSpaceSpec,
                     budget: HardwareBudget) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized generic-paradigm totals for an (n, L) op-index matrix.

    Returns (total_ms, chosen config index, weights-resident flag) arrays.
    """
    ops = np.ascontiguousarray(ops, dtype=np.int32)
    if ops.ndim != 2 or ops.shape[1] != space.num_layers:
        raise InvalidArch("ops matrix must be (n, L)")
    if ops.size and (ops.min() < 0 or ops.max() >= space.num_candidates):
        raise InvalidArch("op index outside catalog")
    t = _tables(space, budget)
    wbits = t.base_weight_bits + t.block_weight_bits[ops].sum(axis=1)
    res_idx = np.ascontiguousarray((wbits <= budget.on_chip_bits), dtype=np.uint8)
    totals, cfg_idx = kernels.gp_eval(ops, res_idx, t.layer_ms, t.stem_ms,
                                      t.head_ms, t.io_ms)
    return totals, cfg_idx, res_idx


def benchmark_generic(arch: DiscreteArch, space: SearchSpaceSpec,
                      budget: HardwareBudget) -> LatencyReport:
    """Latency report for one architecture under the shared-tile paradigm."""
    validate_arch(arch, space)
    ops = np.array([arch.ops], dtype=np.int32)
    totals, cfg_idx, res_idx = gp_latency_batch(ops, space, budget)
    t = _tables(space, budget)
    ci, res = int(cfg_idx[0]), int(res_idx[0])
    tm, tn = t.configs[ci]
    names = ("compute", "memory")
    per_layer = [float(t.stem_ms[ci, res])]
    bounds = [names[t.stem_bound[ci, res]]]
    for op in arch.ops:
        per_layer.append(float(t.layer_ms[ci, op, res]))
        bounds.append(names[t.layer_bound[ci, op, res]])
    per_layer.append(float(t.head_ms[ci, res]))
    bounds.append(names[t.head_bound[ci, res]])
    return LatencyReport(
        total_ms=float(totals[0]),
        per_layer_ms=per_layer,
        bound=bounds,
        initiation_interval_ms=None,
        feasible=True,
        chosen_config={"tile_rows": tm, "tile_cols": tn,
                       "weights_resident": bool(res), "io_ms": t.io_ms},
    )


@dataclass
class Lut:
    """Per-(block, layer) standalone latencies; linear estimator over mixes."""

    entries_ms: np.ndarray  # (K, L) float64
    budget_name: str
    paradigm: str = "generic"

    def __post_init__(self):
        if self.paradigm != "generic":
            raise InvalidArch("lookup tables are defined for the generic paradigm only")
        self.entries_ms = np.asarray(self.entries_ms, dtype=np.float64)
        if self.entries_ms.ndim != 2:
            raise InvalidArch("lut entries must be (K, L)")


def build_lut(space: SearchSpaceSpec, budget: HardwareBudget) -> Lut:
    """Benchmark every block standalone (own best tile, own overhead,
    resident weights) and replicate across layers."""
    t = _tables(space, budget)
    per_block = t.layer_ms[:, :, 1].min(axis=0)  # (K,)
    entries = np.tile(per_block[:, None], (1, space.num_layers))
    return Lut(entries_ms=entries, budget_name=budget.name)


def lut_latency(lut: Lut, m: np.ndarray) -> float:
    """Linear estimate: sum over layers of mix-weighted block entries."""
    m = np.asarray(m, dtype=np.float64)
    if m.shape != lut.entries_ms.shape:
        raise MismatchedSpace(
            f"mixing matrix {m.shape} does not match lut {lut.entries_ms.shape}")
    return float(np.sum(lut.entries_ms * m))
