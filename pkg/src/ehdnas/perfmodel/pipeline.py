"""Pipeline paradigm: one dedicated stage per layer, all weights pinned
on-chip plus double-buffered stage interfaces.  Feasibility is a capacity
check; DSPs are split across stages proportionally to their MACs.
"""

from __future__ import annotations

import math

import numpy as np

from ..archspace import BYTES_PER_WEIGHT, DiscreteArch, SearchSpaceSpec
from ..errors import InfeasibleAllocation, InvalidConfig
from .budgets import HardwareBudget
from .roofline import (
    LatencyReport,
    block_workload,
    head_workload,
    layer_latency,
    network_weight_bits,
    stem_workload,
    validate_arch,
    workload_of,
)


def pipeline_buffer_bits(space: SearchSpaceSpec) -> int:
    """Double-buffered activation interface, 2 x H values per stage."""
    per_stage_bytes = 2 * space.hidden_width * BYTES_PER_WEIGHT
    return (space.num_layers + 2) * per_stage_bytes * 8


def pipeline_required_bits(arch: DiscreteArch, space: SearchSpaceSpec) -> int:
    return network_weight_bits(arch, space) + pipeline_buffer_bits(space)


def dse_pipeline_alloc(stage_macs, dsp_count: int) -> list[int]:
    """Split dsp_count DSPs over stages proportionally to MACs.

    Zero-MAC stages get nothing; every other stage gets at least one DSP
    plus a floor-proportional share, and leftovers go one at a time to
    the stage with the most compute cycles (ties to the lowest index).
    """
    macs = [int(m) for m in stage_macs]
    if any(m < 0 for m in macs):
        raise InvalidConfig("stage MACs must be non-negative")
    if dsp_count < 1:
        raise InvalidConfig("dsp_count must be positive")
    nonzero = [i for i, m in enumerate(macs) if m > 0]
    alloc = [0] * len(macs)
    if not nonzero:
        return alloc
    if dsp_count < len(nonzero):
        raise InfeasibleAllocation(
            f"{len(nonzero)} active stages need at least that many DSPs, have {dsp_count}")
    total = sum(macs)
    extra = dsp_count - len(nonzero)
    for i in nonzero:
        alloc[i] = 1 + (extra * macs[i]) // total
    rem = dsp_count - sum(alloc)
    while rem > 0:
        pick = max(nonzero, key=lambda i: (math.ceil(macs[i] / alloc[i]), -i))
        alloc[pick] += 1
        rem -= 1
    return alloc


def _stage_latencies(arch: DiscreteArch, space: SearchSpaceSpec,
                     budget: HardwareBudget):
    workloads = workload_of(arch, space)
    alloc = dse_pipeline_alloc([w.macs for w in workloads], budget.dsp_count)
    layers = [layer_latency(w, a, budget, weights_resident=True)
              for w, a in zip(workloads, alloc)]
    return alloc, [ms for ms, _ in layers], [b for _, b in layers]


def benchmark_pipeline(arch: DiscreteArch, space: SearchSpaceSpec,
                       budget: HardwareBudget) -> LatencyReport:
    """Latency report under the per-stage paradigm; infeasible when weights
    plus stage buffers exceed on-chip capacity."""
    validate_arch(arch, space)
    required = pipeline_required_bits(arch, space)
    if required > budget.on_chip_bits:
        return LatencyReport(
            total_ms=None, per_layer_ms=[], bound=[],
            initiation_interval_ms=None, feasible=False,
            chosen_config={"reason": "weights plus stage buffers exceed on-chip capacity",
                           "required_bits": required,
                           "on_chip_bits": budget.on_chip_bits})
    alloc, per_layer, bounds = _stage_latencies(arch, space, budget)
    total = 0.0
    for ms in per_layer:
        total += ms
    return LatencyReport(
        total_ms=total,
        per_layer_ms=per_layer,
        bound=bounds,
        initiation_interval_ms=max(per_layer),
        feasible=True,
        chosen_config={"dsp_alloc": alloc, "weights_resident": True,
                       "required_bits": required})


def pp_latency_batch(ops: np.ndarray, space: SearchSpaceSpec,
                     budget: HardwareBudget) -> tuple[np.ndarray, np.ndarray]:
    """Totals and feasibility flags for an (n, L) op matrix; infeasible rows
    carry NaN.  Pure per-row computation, safe to chunk across workers."""
    ops = np.asarray(ops, dtype=np.int32)
    n = ops.shape[0]
    stem_w, head_w = stem_workload(space), head_workload(space)
    block_ws = [block_workload(b, space) for b in space.catalog]
    block_bits = [b.weight_bytes * 8 for b in space.catalog]
    base_bits = (stem_w.weight_bytes + head_w.weight_bytes) * 8 + pipeline_buffer_bits(space)
    totals = np.full(n, np.nan)
    feasible = np.zeros(n, dtype=bool)
    cache: dict[tuple, float] = {}
    for i in range(n):
        row = tuple(int(o) for o in ops[i])
        bits = base_bits + sum(block_bits[o] for o in row)
        if bits > budget.on_chip_bits:
            continue
        feasible[i] = True
        hit = cache.get(row)
        if hit is not None:
            totals[i] = hit
            continue
        workloads = [stem_w] + [block_ws[o] for o in row] + [head_w]
        alloc = dse_pipeline_alloc([w.macs for w in workloads], budget.dsp_count)
        total = 0.0
        for w, a in zip(workloads, alloc):
            ms, _ = layer_latency(w, a, budget, weights_resident=True)
            total += ms
        cache[row] = total
        totals[i] = total
    return totals, feasible
