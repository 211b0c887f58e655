"""Factorized phenomenological Pauli noise: overlapping local channels, their
moments, correctability checks and error sampling.

A :class:`NoiseModel` is a list of independent :class:`LocalChannel` objects;
the total channel is their convolution, so the moment of any element equals
the product of the local moments of its restrictions to the channel supports.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .errors import AmbientMismatchError, CapExceededError
from .pauli import (
    GroupElement,
    Region,
    bicharacter,
    identity,
    support,
)

PROB_TOL = 1e-12
GAMMA_PRIME_CAP = 200_000


@dataclass(frozen=True)
class MomentTable:
    """Map from group elements to moment values, exact or estimated."""

    entries: dict[GroupElement, float]
    tag: str = "exact"  # "exact" | "empirical"
    stderr: Optional[dict[GroupElement, float]] = None

    def __getitem__(self, a: GroupElement) -> float:
        return self.entries[a]

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def stderr_of(self, a: GroupElement) -> float:
        return 0.0 if self.stderr is None else self.stderr.get(a, 0.0)


@dataclass(frozen=True)
class LocalChannel:
    """Independent Pauli channel on a fixed support.

    ``probs`` keys are full-ambient elements supported inside ``sites``;
    probabilities are nonnegative and sum to one.
    """

    sites: tuple[int, ...]  # ascending flat site indices
    probs: dict[GroupElement, float]
    n_pauli: int
    n_bits: int

    @property
    def support(self) -> Region:
        return frozenset(self.sites)

    @property
    def ambient(self) -> tuple[int, int]:
        return (self.n_pauli, self.n_bits)

    def identity_probability(self) -> float:
        return self.probs.get(identity(self.n_pauli, self.n_bits), 0.0)

    def __post_init__(self):
        total = 0.0
        reg = self.support
        for key, p in self.probs.items():
            if key.ambient != self.ambient:
                raise AmbientMismatchError("channel key ambient mismatch")
            if not support(key) <= reg:
                raise ValueError(
                    f"channel key {key} is not supported inside {sorted(reg)}"
                )
            if p < 0:
                raise ValueError(f"negative probability {p} for {key}")
            total += p
        if abs(total - 1.0) > PROB_TOL:
            raise ValueError(f"channel probabilities sum to {total}, not 1")


def local_channel(
    sites: Sequence[int], probs: Mapping[str, float], ambient: tuple[int, int]
) -> LocalChannel:
    """Build a channel from local key strings written on the support sites in
    ascending order: Pauli letters for qubit sites, 0/1 for bit sites."""
    n_pauli, n_bits = ambient
    sites = tuple(sorted(sites))
    for s in sites:
        if not 0 <= s < n_pauli + n_bits:
            raise ValueError(f"support site {s} outside ambient {ambient}")
    if len(set(sites)) != len(sites):
        raise ValueError("duplicate site in channel support")
    table: dict[GroupElement, float] = {}
    for key, p in probs.items():
        if len(key) != len(sites):
            raise ValueError(
                f"key {key!r} has {len(key)} characters for {len(sites)} sites"
            )
        x = z = bits = 0
        for ch, site in zip(key, sites):
            if site < n_pauli:
                if ch == "I":
                    continue
                if ch == "X":
                    x |= 1 << site
                elif ch == "Z":
                    z |= 1 << site
                elif ch == "Y":
                    x |= 1 << site
                    z |= 1 << site
                else:
                    raise ValueError(f"invalid Pauli character {ch!r} in key {key!r}")
            else:
                if ch == "1":
                    bits |= 1 << (site - n_pauli)
                elif ch != "0":
                    raise ValueError(f"invalid bit character {ch!r} in key {key!r}")
        elem = GroupElement(n_pauli, n_bits, x, z, bits)
        table[elem] = table.get(elem, 0.0) + float(p)
    return LocalChannel(sites=sites, probs=table, n_pauli=n_pauli, n_bits=n_bits)


@dataclass(frozen=True)
class NoiseModel:
    """Convolution of independent local channels (supports may overlap)."""

    channels: tuple[LocalChannel, ...]
    n_pauli: int
    n_bits: int

    @property
    def ambient(self) -> tuple[int, int]:
        return (self.n_pauli, self.n_bits)

    @property
    def supports(self) -> tuple[Region, ...]:
        return tuple(ch.support for ch in self.channels)

    def __post_init__(self):
        for ch in self.channels:
            if ch.ambient != self.ambient:
                raise AmbientMismatchError("channel ambient disagrees with model")


def noise_model(channels: Iterable[LocalChannel], ambient: tuple[int, int]) -> NoiseModel:
    return NoiseModel(channels=tuple(channels), n_pauli=ambient[0], n_bits=ambient[1])


def _local_group_elements(ch: LocalChannel):
    """All elements of the full local group on the channel support."""
    pauli_sites = [s for s in ch.sites if s < ch.n_pauli]
    bit_sites = [s - ch.n_pauli for s in ch.sites if s >= ch.n_pauli]
    np_, nb = ch.n_pauli, ch.n_bits
    count = 4 ** len(pauli_sites) * 2 ** len(bit_sites)
    for code in range(count):
        c = code
        x = z = bits = 0
        for s in pauli_sites:
            digit = c & 3
            c >>= 2
            x |= (digit & 1) << s
            z |= ((digit >> 1) & 1) << s
        for s in bit_sites:
            bits |= (c & 1) << s
            c >>= 1
        yield GroupElement(np_, nb, x, z, bits)


def local_moments(ch: LocalChannel) -> MomentTable:
    """Walsh-Hadamard transform of the channel over its local group."""
    entries = {}
    for a in _local_group_elements(ch):
        entries[a] = math.fsum(
            bicharacter(a, e) * p for e, p in ch.probs.items()
        )
    return MomentTable(entries=entries, tag="exact")


class _MomentCache:
    """Per-channel moment lookup keyed by the restriction masks."""

    def __init__(self, ch: LocalChannel):
        self.pauli_mask = 0
        self.bit_mask = 0
        for s in ch.sites:
            if s < ch.n_pauli:
                self.pauli_mask |= 1 << s
            else:
                self.bit_mask |= 1 << (s - ch.n_pauli)
        self.table = {
            (a.x, a.z, a.bits): v for a, v in local_moments(ch).entries.items()
        }

    def moment(self, x: int, z: int, bits: int) -> float:
        key = (x & self.pauli_mask, z & self.pauli_mask, bits & self.bit_mask)
        return self.table[key]


def _caches_for(model: NoiseModel) -> list[_MomentCache]:
    caches = getattr(model, "_moment_caches", None)
    if caches is None:
        caches = [_MomentCache(ch) for ch in model.channels]
        object.__setattr__(model, "_moment_caches", caches)
    return caches


def exact_moment(model: NoiseModel, a: GroupElement) -> float:
    """Moment of ``a`` under the convolved channel, without enumerating the
    full group: product over channels of the local moment of ``a``'s
    restriction to each support."""
    if a.ambient != model.ambient:
        raise AmbientMismatchError("element ambient disagrees with model")
    out = 1.0
    for cache in _caches_for(model):
        out *= cache.moment(a.x, a.z, a.bits)
    return out


@dataclass(frozen=True)
class GammaPrime:
    """Deduplicated non-identity elements supported inside some channel
    support, in (weight, string) order; the design-matrix column set."""

    elements: tuple[GroupElement, ...]
    index: dict[GroupElement, int]

    def __len__(self) -> int:
        return len(self.elements)

    @classmethod
    def from_elements(cls, elements: Iterable[GroupElement]) -> "GammaPrime":
        """Explicit column set; deduplicated and put in canonical order."""
        ordered = tuple(
            sorted({e for e in elements if not e.is_identity}, key=lambda e: e.sort_key())
        )
        return cls(elements=ordered, index={a: i for i, a in enumerate(ordered)})


def gamma_prime(model: NoiseModel, cap: int = GAMMA_PRIME_CAP) -> GammaPrime:
    seen = set()
    for ch in model.channels:
        for a in _local_group_elements(ch):
            if not a.is_identity:
                seen.add(a)
                if len(seen) > cap:
                    raise CapExceededError(
                        f"gamma-prime column count exceeds cap {cap}"
                    )
    ordered = tuple(sorted(seen, key=lambda e: e.sort_key()))
    return GammaPrime(elements=ordered, index={a: i for i, a in enumerate(ordered)})


@dataclass(frozen=True)
class CorrectabilityResult:
    ok: bool
    witness: Optional[object] = None  # failing (support, support) pair or channel
    evidence: str = "pairwise-region"  # or "moment-positivity"
    notes: tuple[str, ...] = ()

    def __bool__(self) -> bool:
        return self.ok


def is_correctable_noise(model: NoiseModel, code) -> CorrectabilityResult:
    """Sufficient check that the noise is correctable for ``code``.

    Condition (i): every pairwise union of supports is a correctable region.
    Condition (ii): every channel keeps its identity probability above 1/2,
    which forces all moments positive. If (ii) fails channel-by-channel the
    checker falls back to verifying positivity of the exact moments over the
    gamma-prime set and the measured group (weaker evidence, flagged).

    Regions are judged on the reduced problem, i.e. relative to the error
    alphabet the channels can actually produce; for full Pauli channels this
    coincides with the plain region check.
    """
    from .reduction import reduce_problem

    notes = []
    rp = reduce_problem(code, model)
    from .codes import is_correctable_region

    sups = list(model.supports)
    for i in range(len(sups)):
        for j in range(i, len(sups)):
            union = sups[i] | sups[j]
            reduced_region = rp.map_region(union)
            if not is_correctable_region(rp.code, reduced_region):
                return CorrectabilityResult(
                    ok=False,
                    witness=(tuple(sorted(sups[i])), tuple(sorted(sups[j]))),
                    notes=("support union is not a correctable region",),
                )
    if not rp.identity:
        notes.append("regions judged on the reduced error alphabet")

    weak = []
    for ch in model.channels:
        if ch.identity_probability() <= 0.5:
            weak.append(ch)
    if not weak:
        return CorrectabilityResult(ok=True, notes=tuple(notes))

    # weaker evidence mode: sample moment positivity directly
    from .pauli import enumerate_group

    gp = gamma_prime(model)
    probes = list(gp.elements)
    if code.meas.rank <= 12:
        probes.extend(e for e in enumerate_group(code.meas))
    else:
        probes.extend(code.meas.rows)
    for a in probes:
        if exact_moment(model, a) <= 0:
            return CorrectabilityResult(
                ok=False,
                witness=weak[0],
                notes=(
                    f"channel on sites {weak[0].sites} has identity probability "
                    f"{weak[0].identity_probability():.4f} <= 1/2 and moment of "
                    f"{a} is not positive",
                ),
            )
    notes.append(
        "identity probability <= 1/2 on some channel; accepted on sampled "
        "moment positivity only"
    )
    return CorrectabilityResult(ok=True, evidence="moment-positivity", notes=tuple(notes))


def sample_error(model: NoiseModel, rng: np.random.Generator) -> GroupElement:
    """One draw from the convolved channel: independent draw per channel."""
    x = z = bits = 0
    for ch in model.channels:
        keys = list(ch.probs.keys())
        probs = np.array([ch.probs[k] for k in keys])
        idx = rng.choice(len(keys), p=probs / probs.sum())
        e = keys[idx]
        x ^= e.x
        z ^= e.z
        bits ^= e.bits
    return GroupElement(model.n_pauli, model.n_bits, x, z, bits)
