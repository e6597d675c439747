"""Analytical accelerator latency model: roofline layers, shared-tile and
per-stage paradigms, lookup-table baseline, dataset generation."""

from .budgets import BUILTIN, LARGE, MEDIUM, SMALL, HardwareBudget, load_budget, resolve_budget, save_budget
from .dataset import DATASET_FORMAT, GenResult, LatencyDataset, gen_dataset, ingest_dataset, save_dataset, worker_count
from .generic import Lut, benchmark_generic, build_lut, gp_latency_batch, lut_latency, tile_configs
from .kernels import BACKEND as KERNEL_BACKEND
from .pipeline import (
    benchmark_pipeline,
    dse_pipeline_alloc,
    pipeline_buffer_bits,
    pipeline_required_bits,
    pp_latency_batch,
)
from .roofline import (
    LAYER_OVERHEAD_CYCLES,
    LatencyReport,
    LayerWorkload,
    block_workload,
    head_workload,
    layer_latency,
    network_weight_bits,
    stem_workload,
    workload_of,
)

__all__ = [
    "BUILTIN", "SMALL", "MEDIUM", "LARGE", "HardwareBudget",
    "load_budget", "save_budget", "resolve_budget",
    "DATASET_FORMAT", "GenResult", "LatencyDataset", "gen_dataset",
    "ingest_dataset", "save_dataset", "worker_count",
    "Lut", "benchmark_generic", "build_lut", "gp_latency_batch",
    "lut_latency", "tile_configs", "KERNEL_BACKEND",
    "benchmark_pipeline", "dse_pipeline_alloc", "pipeline_buffer_bits",
    "pipeline_required_bits", "pp_latency_batch",
    "LAYER_OVERHEAD_CYCLES", "LatencyReport", "LayerWorkload",
    "block_workload", "head_workload", "layer_latency",
    "network_weight_bits", "stem_workload", "workload_of",
]
