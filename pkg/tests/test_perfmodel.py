import math
from fractions import Fraction

import numpy as np
import pytest

from ehdnas import archspace as asp
from ehdnas import perfmodel as pm
from ehdnas.errors import InfeasibleAllocation, InvalidConfig, MismatchedSpace
from ehdnas.perfmodel.budgets import HardwareBudget

SPACE = asp.default_space()
ALL_DENSE = asp.DiscreteArch((0,) * 6)
ALL_IDENTITY = asp.DiscreteArch((3,) * 6)

# paper-family constants at full scale, used for layer-level unit checks
FULL_SCALE = HardwareBudget("fullscale", 4800, 141 * 2 ** 20, 12_800_000_000, 200_000_000)


# ---------------------------------------------------------------- roofline

def test_layer_latency_compute_bound_hand_value():
    w = pm.LayerWorkload(macs=200_000, weight_bytes=400_000, in_bytes=0, out_bytes=0,
                         out_features=500, in_features=400)
    ms, bound = pm.layer_latency(w, 1000, FULL_SCALE, weights_resident=True)
    # 200 cycles at 200 MHz plus 64-cycle overhead = 1.32 us
    assert ms == pytest.approx(0.00132, rel=1e-12)
    assert bound == "compute"


def test_layer_latency_memory_bound_hand_value():
    w = pm.LayerWorkload(macs=1, weight_bytes=2_097_152, in_bytes=0, out_bytes=0,
                         out_features=1, in_features=1)
    ms, bound = pm.layer_latency(w, 1, FULL_SCALE, weights_resident=False)
    # 2 MiB over 12.8 GB/s = 163.84 us, overhead adds 0.32 us
    assert ms == pytest.approx(0.16416, rel=1e-12)
    assert bound == "memory"


def test_layer_latency_pure_overhead():
    w = pm.LayerWorkload(macs=0, weight_bytes=0, in_bytes=0, out_bytes=0,
                         out_features=8, in_features=8)
    ms, bound = pm.layer_latency(w, 0, FULL_SCALE, weights_resident=True)
    assert ms == pytest.approx(64 / 200e6 * 1e3, rel=1e-12)
    assert bound == "compute"  # tie at zero goes to compute


def test_layer_latency_rejects_zero_alloc():
    w = pm.LayerWorkload(macs=10, weight_bytes=20, in_bytes=0, out_bytes=0,
                         out_features=2, in_features=5)
    with pytest.raises(InvalidConfig):
        pm.layer_latency(w, 0, FULL_SCALE, weights_resident=True)


def test_layer_latency_fractional_alloc_exact_ceil():
    # effective alloc macs/cycles must reproduce the cycle count exactly
    w = pm.LayerWorkload(macs=256, weight_bytes=512, in_bytes=64, out_bytes=64,
                         out_features=32, in_features=32)
    ms, _ = pm.layer_latency(w, Fraction(256, 12), pm.LARGE, weights_resident=True)
    assert ms == pytest.approx((12 / 2e5 + 64 / 2e5) * 1e3, rel=1e-12)


def test_workload_of_counts():
    workloads = pm.workload_of(ALL_IDENTITY, SPACE)
    assert len(workloads) == 8
    stem, head = workloads[0], workloads[-1]
    assert stem.macs == 512 and stem.weight_bytes == 1024
    assert head.macs == 128 and head.weight_bytes == 256
    for mid in workloads[1:-1]:
        assert mid.macs == 0 and mid.weight_bytes == 0
        assert mid.in_bytes == 0 and mid.out_bytes == 0
    dense_mid = pm.workload_of(ALL_DENSE, SPACE)[1]
    assert dense_mid.macs == 1024 and dense_mid.weight_bytes == 2048
    assert dense_mid.in_bytes == 64 and dense_mid.out_bytes == 64


def test_network_weight_bits():
    assert pm.network_weight_bits(ALL_IDENTITY, SPACE) == (1024 + 256) * 8
    assert pm.network_weight_bits(ALL_DENSE, SPACE) == (1024 + 256 + 6 * 2048) * 8


# ------------------------------------------------------- generic paradigm

def _ceil(a, b):
    return -(-a // b)


def naive_generic(arch, space, budget):
    """Independent latency oracle: direct enumeration, no shared tables."""
    workloads = pm.workload_of(arch, space)
    dims = [[(w.out_features, w.in_features)] for w in workloads]
    for idx, op in enumerate(arch.ops, start=1):
        block = space.catalog[op]
        if block.kind == "low-rank":
            h = space.hidden_width
            dims[idx] = [(block.rank, h), (h, block.rank)]
        elif block.kind in ("identity", "zero"):
            dims[idx] = []
    resident = pm.network_weight_bits(arch, space) <= budget.on_chip_bits
    io_s = (space.input_dim + space.num_classes) * 2 / budget.dram_bytes_per_sec
    best = None
    for tm, tn in pm.tile_configs(budget.dsp_count):
        total = 0.0
        for w, sub in zip(workloads, dims):
            cycles = sum(_ceil(o, tm) * _ceil(i, tn) for o, i in sub)
            compute = cycles / budget.clock_hz
            streamed = w.in_bytes + w.out_bytes + (0 if resident else w.weight_bytes)
            memory = streamed / budget.dram_bytes_per_sec
            total += (max(compute, memory) + 64 / budget.clock_hz) * 1e3
        total += io_s * 1e3
        if best is None or total < best[0]:
            best = (total, (tm, tn))
    return best


@pytest.mark.parametrize("budget", [pm.SMALL, pm.MEDIUM, pm.LARGE])
def test_benchmark_generic_matches_naive_oracle(budget):
    for arch in asp.sample_uniform(SPACE, 12, seed=5):
        report = pm.benchmark_generic(arch, SPACE, budget)
        expected_total, expected_cfg = naive_generic(arch, SPACE, budget)
        assert report.feasible
        assert report.total_ms == pytest.approx(expected_total, rel=1e-12)
        chosen = (report.chosen_config["tile_rows"], report.chosen_config["tile_cols"])
        assert chosen == expected_cfg


def test_benchmark_generic_identity_is_overhead_only():
    report = pm.benchmark_generic(ALL_IDENTITY, SPACE, pm.LARGE)
    overhead_ms = 64 / pm.LARGE.clock_hz * 1e3
    for mid in report.per_layer_ms[1:-1]:
        assert mid == pytest.approx(overhead_ms, rel=1e-12)
    total = sum(report.per_layer_ms) + report.chosen_config["io_ms"]
    assert report.total_ms == pytest.approx(total, rel=1e-12)
    assert report.total_ms == pytest.approx(2.663125, rel=1e-12)


def test_benchmark_generic_dense_hand_value():
    report = pm.benchmark_generic(ALL_DENSE, SPACE, pm.LARGE)
    assert report.total_ms == pytest.approx(3.623125, rel=1e-12)
    assert report.chosen_config["weights_resident"] is True
    assert len(report.per_layer_ms) == 8
    assert report.initiation_interval_ms is None


def test_generic_dse_prefers_dividing_tile():
    # stem 8x4 fits a (8, 4) tile exactly; (4, 8) wastes half its columns
    space = asp.SearchSpaceSpec(
        num_layers=2, catalog=(asp.full_dense_block(0, 8),),
        hidden_width=8, input_dim=4, num_classes=8)
    budget = HardwareBudget("tiles", 32, 10 ** 9, 12_800_000, 200_000)
    arch = asp.DiscreteArch((0, 0))
    report = pm.benchmark_generic(arch, space, budget)
    chosen = (report.chosen_config["tile_rows"], report.chosen_config["tile_cols"])
    assert chosen == (8, 4)
    expected_total, expected_cfg = naive_generic(arch, space, budget)
    assert expected_cfg == (8, 4)
    assert report.total_ms == pytest.approx(expected_total, rel=1e-12)


def test_generic_monotone_in_block_cost():
    # catalog cost order: identity/zero < low-rank-4 < low-rank-8 < dense
    order = [3, 1, 2, 0]
    rng = np.random.Generator(np.random.PCG64(9))
    for _ in range(10):
        ops = list(rng.integers(0, 5, size=6))
        layer = int(rng.integers(0, 6))
        base = pm.benchmark_generic(asp.DiscreteArch(tuple(ops)), SPACE, pm.SMALL).total_ms
        for pos in range(len(order) - 1):
            if ops[layer] == order[pos]:
                ops[layer] = order[pos + 1]
                higher = pm.benchmark_generic(asp.DiscreteArch(tuple(ops)), SPACE, pm.SMALL).total_ms
                assert higher >= base
                break


def test_generic_monotone_in_dsp_count():
    lean = HardwareBudget("lean", 8, pm.LARGE.on_chip_bits, 12_800_000, 200_000)
    rich = HardwareBudget("rich", 128, pm.LARGE.on_chip_bits, 12_800_000, 200_000)
    for arch in asp.sample_uniform(SPACE, 8, seed=13):
        slow = pm.benchmark_generic(arch, SPACE, lean).total_ms
        fast = pm.benchmark_generic(arch, SPACE, rich).total_ms
        assert fast <= slow


def test_builtin_budget_latency_ordering():
    for arch in asp.sample_uniform(SPACE, 6, seed=17):
        small = pm.benchmark_generic(arch, SPACE, pm.SMALL).total_ms
        medium = pm.benchmark_generic(arch, SPACE, pm.MEDIUM).total_ms
        large = pm.benchmark_generic(arch, SPACE, pm.LARGE).total_ms
        assert large <= medium <= small


def test_build_lut_entries():
    lut = pm.build_lut(SPACE, pm.LARGE)
    assert lut.entries_ms.shape == (5, 6)
    assert np.all(lut.entries_ms >= 0)
    dense, lr4, lr8, ident, zero = lut.entries_ms[:, 0]
    assert dense == pytest.approx(0.48, rel=1e-12)
    assert lr4 == pytest.approx(0.38, rel=1e-12)
    assert lr8 == pytest.approx(0.40, rel=1e-12)
    assert ident == pytest.approx(0.32, rel=1e-12)
    assert zero == pytest.approx(0.32, rel=1e-12)
    assert dense > lr4


def test_lut_latency_linear():
    lut = pm.build_lut(SPACE, pm.LARGE)
    rng = np.random.Generator(np.random.PCG64(3))
    a = asp.relax(rng.normal(size=(5, 6)))
    b = asp.relax(rng.normal(size=(5, 6)))
    va, vb = pm.lut_latency(lut, a), pm.lut_latency(lut, b)
    assert pm.lut_latency(lut, 0.25 * a + 0.75 * b) == pytest.approx(0.25 * va + 0.75 * vb, rel=1e-12)
    with pytest.raises(MismatchedSpace):
        pm.lut_latency(lut, np.ones((4, 6)) / 4)


def test_lut_underestimates_network_total():
    # the shared-tile benchmark carries stem, head and io that the per-block
    # table cannot see; the gap must exceed the 5% witness threshold
    lut = pm.build_lut(SPACE, pm.LARGE)
    for arch in [ALL_DENSE, ALL_IDENTITY]:
        total = pm.benchmark_generic(arch, SPACE, pm.LARGE).total_ms
        approx = pm.lut_latency(lut, asp.one_hot(arch, SPACE))
        assert abs(approx - total) / total > 0.05


# ------------------------------------------------------ pipeline paradigm

def test_dse_pipeline_alloc_hand_values():
    assert pm.dse_pipeline_alloc([100, 300], 400) == [100, 300]
    assert pm.dse_pipeline_alloc([0, 500], 8) == [0, 8]
    with pytest.raises(InfeasibleAllocation):
        pm.dse_pipeline_alloc([1, 1], 1)


def test_dse_pipeline_alloc_invariants():
    rng = np.random.Generator(np.random.PCG64(21))
    for _ in range(50):
        macs = [int(m) for m in rng.integers(0, 2000, size=8)]
        dsp = int(rng.integers(max(1, sum(1 for m in macs if m)), 64))
        if dsp < sum(1 for m in macs if m):
            continue
        alloc = pm.dse_pipeline_alloc(macs, dsp)
        assert sum(alloc) <= dsp
        for m, a in zip(macs, alloc):
            assert (a == 0) == (m == 0)
            if m:
                assert a >= 1


def test_pipeline_stage_latency_hand_value():
    # a 100-MAC stage on 100 DSPs runs in one cycle plus overhead
    w = pm.LayerWorkload(macs=100, weight_bytes=200, in_bytes=0, out_bytes=0,
                         out_features=10, in_features=10)
    ms, bound = pm.layer_latency(w, 100, FULL_SCALE, weights_resident=True)
    assert ms == pytest.approx(65 / 200e6 * 1e3, rel=1e-12)
    assert bound == "compute"


def test_benchmark_pipeline_identity_hand_value():
    report = pm.benchmark_pipeline(ALL_IDENTITY, SPACE, pm.LARGE)
    assert report.feasible
    # stem 14 cycles on 38 DSPs, head 13 cycles on 10 DSPs, identity stages overhead-only
    assert report.chosen_config["dsp_alloc"] == [38, 0, 0, 0, 0, 0, 0, 10]
    assert report.total_ms == pytest.approx(2.695, rel=1e-12)
    assert report.initiation_interval_ms == pytest.approx(0.39, rel=1e-12)
    assert report.total_ms == pytest.approx(sum(report.per_layer_ms), rel=1e-12)


def test_benchmark_pipeline_feasibility_small_budget():
    dense = pm.benchmark_pipeline(ALL_DENSE, SPACE, pm.SMALL)
    assert not dense.feasible
    assert dense.total_ms is None
    assert dense.chosen_config["required_bits"] > pm.SMALL.on_chip_bits
    ident = pm.benchmark_pipeline(ALL_IDENTITY, SPACE, pm.SMALL)
    assert ident.feasible and ident.total_ms > 0


def test_pipeline_feasibility_monotone_in_capacity():
    archs = asp.sample_uniform(SPACE, 30, seed=2)
    tight = HardwareBudget("tight", 48, 60_000, 12_800_000, 200_000)
    roomy = HardwareBudget("roomy", 48, 120_000, 12_800_000, 200_000)
    for arch in archs:
        if pm.benchmark_pipeline(arch, SPACE, tight).feasible:
            assert pm.benchmark_pipeline(arch, SPACE, roomy).feasible


def test_pp_latency_batch_matches_reports():
    archs = asp.sample_uniform(SPACE, 40, seed=8)
    totals, feasible = pm.pp_latency_batch(asp.ops_matrix(archs), SPACE, pm.MEDIUM)
    for arch, total, ok in zip(archs, totals, feasible):
        report = pm.benchmark_pipeline(arch, SPACE, pm.MEDIUM)
        assert report.feasible == bool(ok)
        if ok:
            assert total == report.total_ms


# ----------------------------------------------------------------- budget

def test_budget_presets():
    assert pm.SMALL.dsp_count == 14 and pm.SMALL.on_chip_bits == 46 * 1024
    assert pm.MEDIUM.dsp_count == 24 and pm.MEDIUM.on_chip_bits == 70 * 1024
    assert pm.LARGE.dsp_count == 48 and pm.LARGE.on_chip_bits == 141 * 1024
    for b in pm.BUILTIN.values():
        assert b.dram_bytes_per_sec == 12_800_000
        assert b.clock_hz == 200_000


def test_budget_file_roundtrip(tmp_path):
    path = tmp_path / "b.json"
    for budget in (pm.SMALL, pm.MEDIUM, pm.LARGE, FULL_SCALE):
        pm.save_budget(budget, str(path))
        assert pm.load_budget(str(path)) == budget
    assert pm.resolve_budget("large") == pm.LARGE
    assert pm.resolve_budget(str(path)) == FULL_SCALE


def test_budget_file_errors(tmp_path):
    from ehdnas.errors import ParseError, ValidationError
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ParseError):
        pm.load_budget(str(bad))
    bad.write_text('{"name": "x", "dsp_count": 4}')
    with pytest.raises(ParseError):
        pm.load_budget(str(bad))
    bad.write_text('{"name": "x", "dsp_count": 0, "on_chip_mbits": 1, '
                   '"dram_gbytes_per_sec": 1, "clock_mhz": 1}')
    with pytest.raises(ValidationError):
        pm.load_budget(str(bad))
    with pytest.raises(InvalidConfig):
        HardwareBudget("x", 1, 1, 1, 0)


# ----------------------------------------------------------------- kernels

def test_kernel_backends_agree():
    pytest.importorskip("ehdnas.perfmodel._kernels_cy")
    from ehdnas.perfmodel import _kernels_cy, _kernels_py
    from ehdnas.perfmodel.generic import _tables
    t = _tables(SPACE, pm.LARGE)
    archs = asp.sample_uniform(SPACE, 500, seed=31)
    ops = np.ascontiguousarray(asp.ops_matrix(archs))
    wbits = t.base_weight_bits + t.block_weight_bits[ops].sum(axis=1)
    res = np.ascontiguousarray(wbits <= pm.LARGE.on_chip_bits, dtype=np.uint8)
    args = (ops, res, t.layer_ms, t.stem_ms, t.head_ms, t.io_ms)
    tot_py, cfg_py = _kernels_py.gp_eval(*args)
    tot_cy, cfg_cy = _kernels_cy.gp_eval(*args)
    assert np.array_equal(tot_py, tot_cy)  # bit-exact parity
    assert np.array_equal(cfg_py, cfg_cy)
