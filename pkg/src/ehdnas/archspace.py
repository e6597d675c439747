"""Layered search space: a fixed candidate-block catalog applied to L slots.

An architecture is one catalog index per mixed layer.  The relaxed form
is a K x L column-stochastic matrix of mixing weights; each column is a
softmax over candidates for that layer.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import InvalidArch, NumericalError

BYTES_PER_WEIGHT = 2  # 16-bit weights throughout

KIND_FULL_DENSE = "full-dense"
KIND_LOW_RANK = "low-rank"
KIND_IDENTITY = "identity"
KIND_ZERO = "zero"


@dataclass(frozen=True)
class CandidateBlock:
    """One entry of the layer catalog with its static cost counts.

    activation_bytes counts DRAM-streamed activation traffic (input plus
    output) for one sample; identity and zero blocks move no data.
    """

    id: int
    kind: str
    rank: Optional[int]
    macs_per_sample: int
    weight_bytes: int
    activation_bytes: int

    def __post_init__(self):
        if self.kind not in (KIND_FULL_DENSE, KIND_LOW_RANK, KIND_IDENTITY, KIND_ZERO):
            raise InvalidArch(f"unknown block kind {self.kind!r}")
        if self.kind == KIND_LOW_RANK and (self.rank is None or self.rank < 1):
            raise InvalidArch("low-rank block needs a positive rank")
        if self.kind != KIND_LOW_RANK and self.rank is not None:
            raise InvalidArch(f"{self.kind} block must not carry a rank")
        if min(self.macs_per_sample, self.weight_bytes, self.activation_bytes) < 0:
            raise InvalidArch("block cost counts must be non-negative")
        free = self.kind in (KIND_IDENTITY, KIND_ZERO)
        if free != (self.macs_per_sample == 0) or free != (self.weight_bytes == 0):
            raise InvalidArch("macs and weight bytes must be zero exactly for identity/zero blocks")

    @property
    def label(self) -> str:
        if self.kind == KIND_LOW_RANK:
            return f"low-rank-{self.rank}"
        return self.kind


def full_dense_block(block_id: int, hidden_width: int) -> CandidateBlock:
    h = hidden_width
    return CandidateBlock(block_id, KIND_FULL_DENSE, None, h * h,
                          h * h * BYTES_PER_WEIGHT, 2 * h * BYTES_PER_WEIGHT)


def low_rank_block(block_id: int, hidden_width: int, rank: int) -> CandidateBlock:
    h = hidden_width
    macs = 2 * h * rank
    return CandidateBlock(block_id, KIND_LOW_RANK, rank, macs,
                          macs * BYTES_PER_WEIGHT, 2 * h * BYTES_PER_WEIGHT)


def identity_block(block_id: int) -> CandidateBlock:
    return CandidateBlock(block_id, KIND_IDENTITY, None, 0, 0, 0)


def zero_block(block_id: int) -> CandidateBlock:
    return CandidateBlock(block_id, KIND_ZERO, None, 0, 0, 0)


@dataclass(frozen=True)
class SearchSpaceSpec:
    """Catalog plus layer count and tensor dimensions of the host network."""

    num_layers: int
    catalog: tuple[CandidateBlock, ...]
    hidden_width: int
    input_dim: int
    num_classes: int

    def __post_init__(self):
        if self.num_layers < 1:
            raise InvalidArch("num_layers must be >= 1")
        if len(self.catalog) < 1:
            raise InvalidArch("catalog must not be empty")
        for i, block in enumerate(self.catalog):
            if block.id != i:
                raise InvalidArch("catalog ids must equal their positions")
        if min(self.hidden_width, self.input_dim, self.num_classes) < 1:
            raise InvalidArch("network dimensions must be positive")

    @property
    def num_candidates(self) -> int:
        return len(self.catalog)

    def cardinality(self) -> int:
        return self.num_candidates ** self.num_layers


def default_space() -> SearchSpaceSpec:
    """Bundled desk-scale space: 6 layers x 5 candidates, 15625 architectures."""
    h = 32
    catalog = (
        full_dense_block(0, h),
        low_rank_block(1, h, 4),
        low_rank_block(2, h, 8),
        identity_block(3),
        zero_block(4),
    )
    return SearchSpaceSpec(num_layers=6, catalog=catalog, hidden_width=h,
                           input_dim=16, num_classes=4)


@dataclass(frozen=True)
class DiscreteArch:
    """One catalog index per layer; textual form is comma-separated indices."""

    ops: tuple[int, ...]

    def to_text(self) -> str:
        return ",".join(str(i) for i in self.ops)

    @classmethod
    def from_text(cls, text: str) -> "DiscreteArch":
        try:
            ops = tuple(int(part) for part in text.split(","))
        except ValueError as exc:
            raise InvalidArch(f"unparsable architecture text {text!r}") from exc
        return cls(ops)

    def validate_for(self, space: SearchSpaceSpec) -> None:
        if len(self.ops) != space.num_layers:
            raise InvalidArch(
                f"architecture has {len(self.ops)} layers, space has {space.num_layers}")
        for op in self.ops:
            if not 0 <= op < space.num_candidates:
                raise InvalidArch(f"op index {op} outside catalog of {space.num_candidates}")


def one_hot(arch: DiscreteArch, space: SearchSpaceSpec) -> np.ndarray:
    """K x L matrix with a single 1.0 per column at the chosen op."""
    arch.validate_for(space)
    m = np.zeros((space.num_candidates, space.num_layers), dtype=np.float64)
    m[list(arch.ops), range(space.num_layers)] = 1.0
    return m


def relax(logits: np.ndarray) -> np.ndarray:
    """Column-wise softmax of a K x L logit matrix (max-shifted for stability)."""
    logits = np.asarray(logits, dtype=np.float64)
    if logits.ndim != 2:
        raise InvalidArch("logits must be a K x L matrix")
    if not np.all(np.isfinite(logits)):
        raise NumericalError("non-finite logits")
    shifted = logits - logits.max(axis=0, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=0, keepdims=True)


def discretize(m: np.ndarray) -> DiscreteArch:
    """Per-column argmax; ties resolve to the lowest catalog index."""
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2:
        raise InvalidArch("mixing matrix must be K x L")
    return DiscreteArch(tuple(int(i) for i in np.argmax(m, axis=0)))


def validate(m: np.ndarray) -> Optional[str]:
    """Return None for a valid mixing matrix, else the first violation."""
    m = np.asarray(m)
    if m.ndim != 2:
        return f"shape: expected K x L matrix, got ndim={m.ndim}"
    if not np.all(np.isfinite(m)):
        return "range: non-finite entry"
    if m.min() < 0.0 or m.max() > 1.0:
        return f"range: entry outside [0, 1] (min={m.min()}, max={m.max()})"
    sums = m.sum(axis=0)
    bad = np.where(np.abs(sums - 1.0) > 1e-9)[0]
    if bad.size:
        return f"column sum: column {bad[0]} sums to {sums[bad[0]]}"
    return None


def sample_uniform(space: SearchSpaceSpec, n: int, seed: int) -> list[DiscreteArch]:
    """n independent uniform draws over the catalog per layer; seed-determined."""
    if n < 0:
        raise InvalidArch("sample count must be non-negative")
    rng = np.random.Generator(np.random.PCG64(seed))
    draws = rng.integers(0, space.num_candidates, size=(n, space.num_layers))
    return [DiscreteArch(tuple(int(i) for i in row)) for row in draws]


def ops_matrix(archs: list[DiscreteArch]) -> np.ndarray:
    """Stack architectures into an (n, L) int32 index matrix."""
    return np.asarray([a.ops for a in archs], dtype=np.int32)
