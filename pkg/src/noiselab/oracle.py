"""Brute-force ground truth, implemented independently of the main pipeline.

Everything here works on explicit dense tables: the full error distribution
is built by repeated sparse convolution of the local channels, moments come
from direct sign-weighted sums, and logical-channel values from literal coset
averages. Agreement with the factorized fast paths is evidence, so this
module deliberately shares no moment code with them. Caps are hard errors.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .errors import CapExceededError
from .noise import NoiseModel
from .pauli import GroupElement, SubgroupBasis, bicharacter, enumerate_group, identity
from .transforms import DistributionTable

ORACLE_CAP_BITS = 20  # dense tables up to 2^20 entries
COSET_CAP = 20  # gauge rank cap for coset averaging


def full_distribution(model: NoiseModel) -> DistributionTable:
    """Dense error distribution: explicit convolution of all local channels."""
    bits = 2 * model.n_pauli + model.n_bits
    if bits > ORACLE_CAP_BITS:
        raise CapExceededError(
            f"oracle distribution over 2^{bits} elements exceeds 2^{ORACLE_CAP_BITS}"
        )
    table = {identity(model.n_pauli, model.n_bits): 1.0}
    for ch in model.channels:
        nxt: dict[GroupElement, float] = {}
        for e, p in table.items():
            if p == 0.0:
                continue
            for k, q in ch.probs.items():
                if q == 0.0:
                    continue
                a = e * k
                nxt[a] = nxt.get(a, 0.0) + p * q
        table = nxt
    return DistributionTable(entries=table, n_pauli=model.n_pauli, n_bits=model.n_bits)


def brute_fourier(dist: DistributionTable, a: GroupElement) -> float:
    """Moment of ``a``: direct sum of ``<a, e> P(e)`` over the dense table."""
    return math.fsum(
        bicharacter(a, e) * p for e, p in dist.entries.items() if p != 0.0
    )


def brute_fourier_many(
    dist: DistributionTable, targets: Sequence[GroupElement]
) -> list[float]:
    """Same sums as :func:`brute_fourier` for many targets, batched."""
    if dist.n_pauli > 63 or dist.n_bits > 63:
        return [brute_fourier(dist, a) for a in targets]
    items = [(e, p) for e, p in dist.entries.items() if p != 0.0]
    xs = np.array([e.x for e, _ in items], dtype=np.uint64)
    zs = np.array([e.z for e, _ in items], dtype=np.uint64)
    bs = np.array([e.bits for e, _ in items], dtype=np.uint64)
    ps = np.array([p for _, p in items], dtype=np.float64)
    out = []
    for a in targets:
        acc = (xs & np.uint64(a.z)) ^ (zs & np.uint64(a.x)) ^ (bs & np.uint64(a.bits))
        for shift in (32, 16, 8, 4, 2, 1):
            acc ^= acc >> np.uint64(shift)
        signs = 1.0 - 2.0 * (acc & np.uint64(1)).astype(np.float64)
        out.append(float(signs @ ps))
    return out


def coset_logical_channel(
    dist: DistributionTable, gauge: SubgroupBasis, e: GroupElement
) -> float:
    """Logical-channel value at ``e``: average of P over the gauge coset of e."""
    if gauge.rank > COSET_CAP:
        raise CapExceededError(
            f"gauge rank {gauge.rank} exceeds coset-average cap {COSET_CAP}"
        )
    total = math.fsum(dist[e * s] for s in enumerate_group(gauge, cap=COSET_CAP))
    return total / (1 << gauge.rank)
