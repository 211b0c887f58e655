"""Multi-round syndrome generation and empirical moment estimation.

Each round draws a fresh error from the noise model and records, per measured
generator, whether the outcome flipped relative to the previous round; for
i.i.d. rounds this is generated directly from the fresh error (Pauli-frame
tracking). Data-syndrome codes group rounds into disjoint consecutive pairs:
one dataset row per pair, carrying the second round's data error together
with the XOR of the two measurement-error draws.

Sampling is chunked with one counter-based stream per (seed, chunk), so a
dataset depends only on (code, model, rounds, seed), not on thread count.
"""

from __future__ import annotations

import json
import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .codes import CodeGroups
from .errors import AmbientMismatchError
from .noise import MomentTable, NoiseModel
from .pauli import GroupElement, combination_in_span, element_to_string

CHUNK_ROWS = 1 << 14
MAGIC = b"SYND1"
_HEADER = struct.Struct("<IIQQ")  # n_pauli, n_generators, n_rows, seed


@dataclass(frozen=True)
class SyndromeDataset:
    """Packed relative-syndrome outcomes: rows x generators, bit 1 = outcome -1.

    Rows are packed little-endian into 64-bit words. ``meta`` records the code
    and noise identifiers, the seed and the pairing mode.
    """

    n_generators: int
    rows: int
    words: np.ndarray  # shape (rows, ceil(m/64)), dtype uint64
    seed: int
    meta: dict = field(default_factory=dict)

    def bits(self) -> np.ndarray:
        """Unpacked (rows, n_generators) uint8 matrix."""
        if self.rows == 0:
            return np.zeros((0, self.n_generators), dtype=np.uint8)
        as_bytes = self.words.view(np.uint8).reshape(self.rows, -1)
        unpacked = np.unpackbits(as_bytes, axis=1, bitorder="little")
        return unpacked[:, : self.n_generators]

    @staticmethod
    def from_bits(bits: np.ndarray, seed: int = 0, meta: Optional[dict] = None) -> "SyndromeDataset":
        bits = np.ascontiguousarray(np.asarray(bits, dtype=np.uint8) & 1)
        rows, m = bits.shape
        nwords = max(1, (m + 63) // 64)
        padded = np.zeros((rows, nwords * 64), dtype=np.uint8)
        padded[:, :m] = bits
        packed = np.packbits(padded, axis=1, bitorder="little")
        words = packed.view(np.uint64).reshape(rows, nwords)
        return SyndromeDataset(
            n_generators=m, rows=rows, words=words, seed=seed, meta=dict(meta or {})
        )


def _parity_u64(values: np.ndarray) -> np.ndarray:
    """Parity of each uint64 via xor-folding."""
    v = values.copy()
    for shift in (32, 16, 8, 4, 2, 1):
        v ^= v >> np.uint64(shift)
    return (v & np.uint64(1)).astype(np.uint8)


class _ChannelSampler:
    def __init__(self, ch):
        keys = sorted(ch.probs, key=lambda e: e.sort_key())
        self.x = np.array([k.x for k in keys], dtype=np.uint64)
        self.z = np.array([k.z for k in keys], dtype=np.uint64)
        self.b = np.array([k.bits for k in keys], dtype=np.uint64)
        p = np.array([ch.probs[k] for k in keys], dtype=np.float64)
        self.p = p / p.sum()

    def draw(self, rng: np.random.Generator, count: int):
        idx = rng.choice(len(self.p), size=count, p=self.p)
        return self.x[idx], self.z[idx], self.b[idx]


def _sample_errors_chunk(
    samplers: Sequence[_ChannelSampler], rng: np.random.Generator, count: int
):
    xs = np.zeros(count, dtype=np.uint64)
    zs = np.zeros(count, dtype=np.uint64)
    bs = np.zeros(count, dtype=np.uint64)
    for s in samplers:
        x, z, b = s.draw(rng, count)
        xs ^= x
        zs ^= z
        bs ^= b
    return xs, zs, bs


def _syndrome_bits(
    generators: Sequence[GroupElement], xs: np.ndarray, zs: np.ndarray, bs: np.ndarray
) -> np.ndarray:
    cols = []
    for g in generators:
        acc = (
            (xs & np.uint64(g.z)) ^ (zs & np.uint64(g.x)) ^ (bs & np.uint64(g.bits))
        )
        cols.append(_parity_u64(acc))
    return np.stack(cols, axis=1) if cols else np.zeros((len(xs), 0), dtype=np.uint8)


def run_rounds(
    code: CodeGroups,
    model: NoiseModel,
    rounds: int,
    seed: int,
    threads: int = 1,
) -> SyndromeDataset:
    """Simulate ``rounds`` measurement rounds of relative syndromes.

    For data-syndrome codes rounds are consumed in disjoint consecutive pairs
    (one dataset row per pair), so an odd trailing round is discarded.
    """
    if code.ambient != model.ambient:
        raise AmbientMismatchError("code and noise model ambients differ")
    if code.n_pauli > 63 or code.n_bits > 63:
        raise ValueError("simulation supports at most 63 Pauli and 63 bit sites")
    paired = code.kind == "data-syndrome"
    n_rows = rounds // 2 if paired else rounds
    samplers = [_ChannelSampler(ch) for ch in model.channels]
    gens = code.meas_generators
    bit_block_mask = np.uint64((1 << code.n_bits) - 1)

    def make_chunk(chunk_index: int) -> np.ndarray:
        start = chunk_index * CHUNK_ROWS
        count = min(CHUNK_ROWS, n_rows - start)
        rng = np.random.Generator(np.random.Philox(key=[seed, chunk_index]))
        xs, zs, bs = _sample_errors_chunk(samplers, rng, count)
        if paired:
            _, _, bs_prev = _sample_errors_chunk(samplers, rng, count)
            bs = (bs ^ bs_prev) & bit_block_mask
        return _syndrome_bits(gens, xs, zs, bs)

    n_chunks = (n_rows + CHUNK_ROWS - 1) // CHUNK_ROWS
    if threads > 1 and n_chunks > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            blocks = list(pool.map(make_chunk, range(n_chunks)))
    else:
        blocks = [make_chunk(i) for i in range(n_chunks)]
    bits = (
        np.concatenate(blocks, axis=0)
        if blocks
        else np.zeros((0, len(gens)), dtype=np.uint8)
    )
    meta = {
        "code": code.name or code.kind,
        "kind": code.kind,
        "seed": seed,
        "rounds_simulated": rounds,
        "pairing": "paired" if paired else "single",
    }
    return SyndromeDataset.from_bits(bits, seed=seed, meta=meta)


def empirical_moments(
    dataset: SyndromeDataset,
    code: CodeGroups,
    elements: Sequence[GroupElement],
) -> MomentTable:
    """Sample means of measurement products.

    An element expressible as a product of measured generators is estimated by
    the per-row XOR of the corresponding outcome bits; the standard error is
    the sample standard deviation over rows divided by sqrt(rows).
    """
    if len(code.meas_generators) != dataset.n_generators:
        raise ValueError(
            f"dataset has {dataset.n_generators} generator columns, code measures "
            f"{len(code.meas_generators)}"
        )
    combos = []
    for s in elements:
        c = combination_in_span(list(code.meas_generators), s)
        if c is None:
            raise ValueError(
                f"element {element_to_string(s)} is not a product of the measured "
                "generators"
            )
        combos.append(c)
    bits = dataset.bits()
    n = dataset.rows
    if n == 0:
        raise ValueError("empty dataset")
    combo_mat = np.array(combos, dtype=np.uint8).T  # (m, k)
    parities = (bits.astype(np.int32) @ combo_mat.astype(np.int32)) & 1  # (n, k)
    means = 1.0 - 2.0 * parities.mean(axis=0)
    entries = {}
    stderr = {}
    for j, s in enumerate(elements):
        m_hat = float(means[j])
        entries[s] = m_hat
        if n > 1:
            var = (1.0 - m_hat * m_hat) * n / (n - 1)
            stderr[s] = float(np.sqrt(max(var, 0.0) / n))
        else:
            stderr[s] = 0.0
    return MomentTable(entries=entries, tag="empirical", stderr=stderr)


# --------------------------------------------------------------------------
# Dataset files: binary header (magic, n, m, rows, seed) + packed rows,
# little-endian within 64-bit words; JSON sidecar for metadata.


def save_dataset(path, dataset: SyndromeDataset, n_pauli: int) -> None:
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(
            _HEADER.pack(n_pauli, dataset.n_generators, dataset.rows, dataset.seed)
        )
        fh.write(dataset.words.astype("<u8").tobytes())


def load_dataset(path, meta: Optional[dict] = None) -> SyndromeDataset:
    with open(path, "rb") as fh:
        magic = fh.read(len(MAGIC))
        if magic != MAGIC:
            raise ValueError(f"not a syndrome dataset file: bad magic {magic!r}")
        n_pauli, m, rows, seed = _HEADER.unpack(fh.read(_HEADER.size))
        nwords = max(1, (m + 63) // 64)
        data = np.frombuffer(fh.read(rows * nwords * 8), dtype="<u8")
        if data.size != rows * nwords:
            raise ValueError("truncated syndrome dataset file")
    words = data.reshape(rows, nwords).astype(np.uint64)
    return SyndromeDataset(
        n_generators=m, rows=rows, words=words, seed=seed, meta=dict(meta or {})
    )


def save_sidecar(path, dataset: SyndromeDataset) -> None:
    with open(path, "w") as fh:
        json.dump(dataset.meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def dataset_to_csv(path, dataset: SyndromeDataset) -> None:
    """One row per round, 0/1 fields, for external tools."""
    bits = dataset.bits()
    with open(path, "w") as fh:
        fh.write(",".join(f"g{j}" for j in range(dataset.n_generators)) + "\n")
        for row in bits:
            fh.write(",".join(str(int(b)) for b in row) + "\n")
