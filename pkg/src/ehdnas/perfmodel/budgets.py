"""Hardware budgets: DSP count, on-chip memory, DRAM bandwidth, clock.

Built-in presets keep the 1400:2400:4800 DSP and 46:70:141 on-chip
proportions of the modeled FPGA family, rescaled so the bundled
desk-scale search space actually exercises tiling limits, on-chip
capacity and millisecond-scale latencies (DSPs /100, capacity in Kb
instead of Mb, clock and bandwidth /1000).
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from ..errors import InvalidConfig, ParseError, ValidationError

MBIT = 2 ** 20  # on-chip capacity unit used by budget files


@dataclass(frozen=True)
class HardwareBudget:
    name: str
    dsp_count: int
    on_chip_bits: int
    dram_bytes_per_sec: int
    clock_hz: int

    def __post_init__(self):
        for field in ("dsp_count", "on_chip_bits", "dram_bytes_per_sec", "clock_hz"):
            if getattr(self, field) <= 0:
                raise InvalidConfig(f"budget {field} must be positive")


SMALL = HardwareBudget("small", 14, 46 * 1024, 12_800_000, 200_000)
MEDIUM = HardwareBudget("medium", 24, 70 * 1024, 12_800_000, 200_000)
LARGE = HardwareBudget("large", 48, 141 * 1024, 12_800_000, 200_000)

BUILTIN = {"small": SMALL, "medium": MEDIUM, "large": LARGE}


def save_budget(budget: HardwareBudget, path: str) -> None:
    doc = {
        "name": budget.name,
        "dsp_count": budget.dsp_count,
        "on_chip_mbits": budget.on_chip_bits / MBIT,
        "dram_gbytes_per_sec": budget.dram_bytes_per_sec / 1e9,
        "clock_mhz": budget.clock_hz / 1e6,
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def load_budget(path: str) -> HardwareBudget:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise ParseError(f"{path}: budget file must hold a JSON object")
    try:
        name = str(doc["name"])
        dsp = int(doc["dsp_count"])
        # unit fields are rounded to integer base units so files round-trip
        bits = round(float(doc["on_chip_mbits"]) * MBIT)
        bw = round(float(doc["dram_gbytes_per_sec"]) * 1e9)
        clock = round(float(doc["clock_mhz"]) * 1e6)
    except KeyError as exc:
        raise ParseError(f"{path}: missing budget key {exc}") from exc
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{path}: malformed budget value ({exc})") from exc
    try:
        return HardwareBudget(name, dsp, bits, bw, clock)
    except InvalidConfig as exc:
        raise ValidationError(f"{path}: {exc}") from exc


def resolve_budget(name_or_path: str) -> HardwareBudget:
    """Map a preset name or a JSON file path to a budget."""
    if name_or_path in BUILTIN:
        return BUILTIN[name_or_path]
    return load_budget(name_or_path)
