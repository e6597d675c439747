"""Roofline layer timing: one MAC per DSP per cycle, streamed bytes over
DRAM bandwidth, fixed per-layer overhead; latency is the bound plus overhead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from ..archspace import (
    KIND_FULL_DENSE,
    KIND_LOW_RANK,
    BYTES_PER_WEIGHT,
    CandidateBlock,
    DiscreteArch,
    SearchSpaceSpec,
)
from ..errors import InvalidArch, InvalidConfig
from .budgets import HardwareBudget

LAYER_OVERHEAD_CYCLES = 64  # control/setup cost charged to every layer

BOUND_COMPUTE = "compute"
BOUND_MEMORY = "memory"

Alloc = Union[int, Fraction]


@dataclass(frozen=True)
class LayerWorkload:
    """Static per-sample cost counts of one network layer."""

    macs: int
    weight_bytes: int
    in_bytes: int
    out_bytes: int
    out_features: int
    in_features: int

    def __post_init__(self):
        if min(self.macs, self.weight_bytes, self.in_bytes, self.out_bytes) < 0:
            raise InvalidConfig("workload byte/MAC counts must be non-negative")
        if self.macs == 0 and self.weight_bytes != 0:
            raise InvalidConfig("zero-MAC workload cannot carry weights")
        if min(self.out_features, self.in_features) < 1:
            raise InvalidConfig("workload feature dims must be positive")


def stem_workload(space: SearchSpaceSpec) -> LayerWorkload:
    d, h = space.input_dim, space.hidden_width
    return LayerWorkload(macs=d * h, weight_bytes=d * h * BYTES_PER_WEIGHT,
                         in_bytes=d * BYTES_PER_WEIGHT, out_bytes=h * BYTES_PER_WEIGHT,
                         out_features=h, in_features=d)


def head_workload(space: SearchSpaceSpec) -> LayerWorkload:
    h, c = space.hidden_width, space.num_classes
    return LayerWorkload(macs=h * c, weight_bytes=h * c * BYTES_PER_WEIGHT,
                         in_bytes=h * BYTES_PER_WEIGHT, out_bytes=c * BYTES_PER_WEIGHT,
                         out_features=c, in_features=h)


def block_workload(block: CandidateBlock, space: SearchSpaceSpec) -> LayerWorkload:
    h = space.hidden_width
    half = block.activation_bytes // 2  # identity/zero stream nothing
    return LayerWorkload(macs=block.macs_per_sample, weight_bytes=block.weight_bytes,
                         in_bytes=half, out_bytes=block.activation_bytes - half,
                         out_features=h, in_features=h)


def workload_of(arch: DiscreteArch, space: SearchSpaceSpec) -> list[LayerWorkload]:
    """Stem workload, one per mixed layer, then head workload (L + 2 entries)."""
    arch.validate_for(space)
    mixed = [block_workload(space.catalog[op], space) for op in arch.ops]
    return [stem_workload(space)] + mixed + [head_workload(space)]


def dense_sub_ops(block: CandidateBlock, space: SearchSpaceSpec) -> list[tuple[int, int]]:
    """(out_features, in_features) of each dense sub-operation in a block."""
    h = space.hidden_width
    if block.kind == KIND_FULL_DENSE:
        return [(h, h)]
    if block.kind == KIND_LOW_RANK:
        return [(block.rank, h), (h, block.rank)]
    return []


def layer_latency(workload: LayerWorkload, dsp_alloc: Alloc,
                  budget: HardwareBudget, weights_resident: bool) -> tuple[float, str]:
    """Latency of one layer in ms and which roofline term bound it.

    compute = ceil(macs / dsp_alloc) cycles at one MAC per DSP per cycle;
    memory = streamed bytes over DRAM bandwidth (weights stream only when
    not resident); latency = max(compute, memory) + fixed overhead.
    Ties report compute.  dsp_alloc may be a Fraction so that effective
    allocations from tiling stay exact under ceil.
    """
    if workload.macs > 0:
        if dsp_alloc <= 0:
            raise InvalidConfig("dsp_alloc must be positive for a layer with MACs")
        compute_s = math.ceil(Fraction(workload.macs) / dsp_alloc) / budget.clock_hz
    else:
        compute_s = 0.0
    streamed = workload.in_bytes + workload.out_bytes
    if not weights_resident:
        streamed += workload.weight_bytes
    memory_s = streamed / budget.dram_bytes_per_sec
    bound = BOUND_COMPUTE if compute_s >= memory_s else BOUND_MEMORY
    latency_s = max(compute_s, memory_s) + LAYER_OVERHEAD_CYCLES / budget.clock_hz
    return latency_s * 1e3, bound


@dataclass
class LatencyReport:
    """Benchmark outcome for one architecture on one budget."""

    total_ms: float | None
    per_layer_ms: list[float]
    bound: list[str]
    initiation_interval_ms: float | None
    feasible: bool
    chosen_config: dict

    def to_json(self) -> dict:
        return {
            "total_ms": self.total_ms,
            "per_layer_ms": self.per_layer_ms,
            "bound": self.bound,
            "initiation_interval_ms": self.initiation_interval_ms,
            "feasible": self.feasible,
            "chosen_config": self.chosen_config,
        }


def network_weight_bits(arch: DiscreteArch, space: SearchSpaceSpec) -> int:
    """Total weight bits of stem, chosen blocks and head."""
    arch.validate_for(space)
    total_bytes = stem_workload(space).weight_bytes + head_workload(space).weight_bytes
    total_bytes += sum(space.catalog[op].weight_bytes for op in arch.ops)
    return total_bytes * 8


def validate_arch(arch: DiscreteArch, space: SearchSpaceSpec) -> None:
    if not isinstance(arch, DiscreteArch):
        raise InvalidArch(f"expected DiscreteArch, got {type(arch).__name__}")
    arch.validate_for(space)
