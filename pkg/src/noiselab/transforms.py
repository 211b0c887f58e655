"""Group Fourier analysis and Möbius inversion over the product group.

The transform pairs a function on the group with its sign-weighted sums
(unnormalized forward transform, 1/|A| on the inverse); convolution maps to
pointwise products. Canonical moments factor a moment table into per-support
correlation factors through Möbius inversion on the substring order.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import CapExceededError, NonPositiveMomentError
from .noise import GammaPrime, MomentTable
from .pauli import (
    GroupElement,
    bicharacter,
    element_to_string,
    is_substring,
    parse_element,
    substrings,
    weight,
)

DENSE_CAP_BITS = 24  # transforms iterate 4^n * 2^m <= 2^24 entries
EXACT_MOMENT_FLOOR = 1e-12


@dataclass(frozen=True)
class DistributionTable:
    """Real-valued table over a full product group; missing keys read as 0."""

    entries: dict[GroupElement, float]
    n_pauli: int
    n_bits: int

    @property
    def ambient(self) -> tuple[int, int]:
        return (self.n_pauli, self.n_bits)

    def __getitem__(self, a: GroupElement) -> float:
        return self.entries.get(a, 0.0)

    def total(self) -> float:
        return math.fsum(self.entries.values())

    def validate_probability(self, tol: float = 1e-12) -> "DistributionTable":
        for a, p in self.entries.items():
            if p < -tol:
                raise ValueError(f"negative probability {p} at {a}")
        t = self.total()
        if abs(t - 1.0) > tol:
            raise ValueError(f"probabilities sum to {t}, not 1")
        return self


def _group_size_bits(ambient: tuple[int, int]) -> int:
    return 2 * ambient[0] + ambient[1]


def _check_cap(ambient: tuple[int, int]) -> None:
    if _group_size_bits(ambient) > DENSE_CAP_BITS:
        raise CapExceededError(
            f"dense transform over 2^{_group_size_bits(ambient)} elements exceeds cap"
        )


def group_elements(ambient: tuple[int, int]):
    """The full product group, in dense-index order."""
    n, m = ambient
    _check_cap(ambient)
    for idx in range(1 << _group_size_bits(ambient)):
        yield _element_of_index(idx, n, m)


def _element_of_index(idx: int, n: int, m: int) -> GroupElement:
    # per-site 2-bit codes (x at even offsets, z at odd), bit block on top
    x = z = 0
    for i in range(n):
        x |= ((idx >> (2 * i)) & 1) << i
        z |= ((idx >> (2 * i + 1)) & 1) << i
    bits = idx >> (2 * n)
    return GroupElement(n, m, x, z, bits)


def _index_of_element(a: GroupElement) -> int:
    idx = 0
    for i in range(a.n_pauli):
        idx |= ((a.x >> i) & 1) << (2 * i)
        idx |= ((a.z >> i) & 1) << (2 * i + 1)
    idx |= a.bits << (2 * a.n_pauli)
    return idx


def fourier(f: DistributionTable) -> MomentTable:
    """Unnormalized transform: sum of ``<a, b> f(b)`` over the full group."""
    _check_cap(f.ambient)
    entries = {}
    items = list(f.entries.items())
    for a in group_elements(f.ambient):
        entries[a] = math.fsum(bicharacter(a, b) * v for b, v in items if v != 0.0)
    return MomentTable(entries=entries, tag="exact")


def inverse_fourier(table: MomentTable | DistributionTable, ambient: tuple[int, int]) -> DistributionTable:
    """Inverse transform with the 1/|A| normalization."""
    _check_cap(ambient)
    size = 1 << _group_size_bits(ambient)
    items = [(a, v) for a, v in table.entries.items() if v != 0.0]
    entries = {}
    for e in group_elements(ambient):
        entries[e] = math.fsum(bicharacter(a, e) * v for a, v in items) / size
    return DistributionTable(entries=entries, n_pauli=ambient[0], n_bits=ambient[1])


def _butterfly(values: np.ndarray, swap_pauli_args: bool, n: int, m: int) -> np.ndarray:
    """Walsh-Hadamard butterflies over all 2n+m index bits; the Pauli-site
    kernel is the bit-swapped Hadamard pair, handled by permuting each site's
    (x, z) index bits on the way in."""
    dim = 2 * n + m
    out = values.astype(float).copy()
    if swap_pauli_args and n:
        idx = np.arange(1 << dim)
        perm = np.zeros_like(idx)
        for i in range(n):
            perm |= ((idx >> (2 * i)) & 1) << (2 * i + 1)
            perm |= ((idx >> (2 * i + 1)) & 1) << (2 * i)
        perm |= (idx >> (2 * n) << (2 * n))
        out = out[perm]
    for bit in range(dim):
        out = out.reshape(-1, 2, 1 << bit)
        a = out[:, 0, :].copy()
        b = out[:, 1, :].copy()
        out[:, 0, :] = a + b
        out[:, 1, :] = a - b
        out = out.reshape(-1)
    return out


def fourier_fast(f: DistributionTable) -> MomentTable:
    """Butterfly evaluation of :func:`fourier`; same result, O(|A| log |A|)."""
    _check_cap(f.ambient)
    n, m = f.ambient
    size = 1 << _group_size_bits(f.ambient)
    dense = np.zeros(size)
    for b, v in f.entries.items():
        dense[_index_of_element(b)] = v
    transformed = _butterfly(dense, True, n, m)
    entries = {}
    for a in group_elements(f.ambient):
        entries[a] = float(transformed[_index_of_element(a)])
    return MomentTable(entries=entries, tag="exact")


def convolve(f: DistributionTable, g: DistributionTable) -> DistributionTable:
    """(f * g)(a) = sum_b f(b) g(ab); transforms to a pointwise product."""
    if f.ambient != g.ambient:
        raise ValueError("convolution operands have different ambients")
    _check_cap(f.ambient)
    entries: dict[GroupElement, float] = {}
    for b, fv in f.entries.items():
        if fv == 0.0:
            continue
        for c, gv in g.entries.items():
            if gv == 0.0:
                continue
            a = b * c
            entries[a] = entries.get(a, 0.0) + fv * gv
    return DistributionTable(entries=entries, n_pauli=f.n_pauli, n_bits=f.n_bits)


def mobius(b: GroupElement, a: GroupElement) -> int:
    """(-1)^(|a| - |b|) when b is a substring of a, else 0."""
    if not is_substring(b, a):
        return 0
    return -1 if (weight(a) - weight(b)) & 1 else 1


@dataclass(frozen=True)
class CanonicalMomentVector:
    """Per-column correlation factors; elements outside the column set are
    implicitly 1."""

    values: dict[GroupElement, float]
    columns: GammaPrime

    def __getitem__(self, a: GroupElement) -> float:
        return self.values[a]


def canonical_from_moments(table: MomentTable, columns: GammaPrime) -> CanonicalMomentVector:
    """Möbius inversion of the moment table on the substring order.

    Requires a positive moment for every substring of every column element;
    a nonpositive moment signals noise outside the correctable regime.
    """
    values = {}
    for a in columns.elements:
        acc = 0.0
        for b in substrings(a):
            try:
                eb = table[b]
            except KeyError:
                raise KeyError(
                    f"moment table is missing substring {b} of {a}"
                ) from None
            if eb < EXACT_MOMENT_FLOOR:
                raise NonPositiveMomentError(
                    f"moment of {b} is {eb}; canonical moments need positive moments"
                )
            acc += mobius(b, a) * math.log(eb)
        values[a] = math.exp(acc)
    return CanonicalMomentVector(values=values, columns=columns)


def moments_from_canonical(canonical: CanonicalMomentVector, a: GroupElement) -> float:
    """Product of the canonical factors of all substrings of ``a``."""
    out = 1.0
    for b in substrings(a):
        if b in canonical.values:
            out *= canonical.values[b]
    return out


def write_moments_csv(path, table: MomentTable) -> None:
    """CSV with columns (element, value, stderr); stderr blank when exact."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["element", "value", "stderr"])
        for a in sorted(table.entries, key=lambda e: e.sort_key()):
            err = "" if table.stderr is None else repr(table.stderr.get(a, 0.0))
            writer.writerow([element_to_string(a), repr(table.entries[a]), err])


def read_moments_csv(path, ambient: Optional[tuple[int, int]] = None) -> MomentTable:
    entries = {}
    stderr = {}
    has_err = False
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header[:2] != ["element", "value"]:
            raise ValueError(f"unexpected moment CSV header {header}")
        for row in reader:
            a = parse_element(row[0], ambient=ambient)
            entries[a] = float(row[1])
            if len(row) > 2 and row[2] != "":
                stderr[a] = float(row[2])
                has_err = True
    return MomentTable(
        entries=entries,
        tag="empirical" if has_err else "exact",
        stderr=stderr if has_err else None,
    )
