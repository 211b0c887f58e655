"""Restriction of an estimation problem to the error alphabet the noise can
actually produce.

A channel whose keys only ever use, say, ``I`` and ``X`` on a site cannot
produce ``Y`` or ``Z`` there; the site then carries a single unknown bit
rather than a full Pauli factor. This module rewrites a (code, noise) pair
over the product of the per-site alphabets generated by the channel keys:

* sites seeing the full Pauli alphabet stay Pauli sites,
* sites seeing a two-element alphabet ``{I, V}`` become bit sites,
* sites seeing no error at all are dropped.

Two maps connect the pictures. Errors embed literally (``V`` becomes the set
bit). Measured or logical operators map through the character they induce on
the restricted alphabet: on a ``{I, V}`` site an operator contributes the bit
"anticommutes with V". Both maps are group homomorphisms, syndrome outcomes
are preserved, and gauge equivalence of errors is generated by the gauge
elements that lie inside the restricted alphabet. For full Pauli channels the
rewrite is the identity.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

from .codes import CodeGroups
from .errors import AmbientMismatchError
from .noise import LocalChannel, NoiseModel
from .pauli import (
    GroupElement,
    Region,
    SubgroupBasis,
    _kernel_subgroup,
    annihilator,
    span,
)

FULL, HALF, TRIVIAL, BIT_ON, BIT_OFF = "full", "half", "trivial", "bit-on", "bit-off"


@dataclass(frozen=True)
class _SiteAlphabet:
    kind: str  # FULL / HALF / TRIVIAL for Pauli sites; BIT_ON / BIT_OFF for bits
    vx: int = 0  # generator of a HALF alphabet, as (x, z) bits
    vz: int = 0


def _site_alphabets(model: NoiseModel) -> list[_SiteAlphabet]:
    np_, nb = model.ambient
    seen: list[set[tuple[int, int]]] = [set() for _ in range(np_)]
    bit_seen = [False] * nb
    for ch in model.channels:
        for key, p in ch.probs.items():
            if p <= 0:
                continue
            for i in range(np_):
                val = ((key.x >> i) & 1, (key.z >> i) & 1)
                if val != (0, 0):
                    seen[i].add(val)
            for j in range(nb):
                if (key.bits >> j) & 1:
                    bit_seen[j] = True
    out = []
    for i in range(np_):
        vals = seen[i]
        if not vals:
            out.append(_SiteAlphabet(TRIVIAL))
        elif len(vals) == 1:
            (vx, vz) = next(iter(vals))
            out.append(_SiteAlphabet(HALF, vx, vz))
        else:
            out.append(_SiteAlphabet(FULL))  # two distinct Paulis generate all
    for j in range(nb):
        out.append(_SiteAlphabet(BIT_ON if bit_seen[j] else BIT_OFF))
    return out


@dataclass(frozen=True)
class ReducedProblem:
    """A (code, noise) pair rewritten over the producible error alphabet."""

    code: CodeGroups  # groups over the reduced ambient
    model: NoiseModel
    logical_image: SubgroupBasis  # image of the original logical group
    identity: bool  # True when the rewrite changed nothing
    alphabets: tuple[_SiteAlphabet, ...]
    pauli_site_of: tuple[Optional[int], ...]  # original flat site -> reduced index
    bit_site_of: tuple[Optional[int], ...]
    n_pauli: int
    n_bits: int
    original_ambient: tuple[int, int]

    @property
    def ambient(self) -> tuple[int, int]:
        return (self.n_pauli, self.n_bits)

    def character_image(self, a: GroupElement) -> GroupElement:
        """Map a measured/logical operator to the reduced element inducing the
        same outcomes on every producible error."""
        if a.ambient != self.original_ambient:
            raise AmbientMismatchError("element belongs to a different ambient")
        x = z = bits = 0
        for i, alpha in enumerate(self.alphabets):
            if alpha.kind == FULL:
                r = self.pauli_site_of[i]
                x |= ((a.x >> i) & 1) << r
                z |= ((a.z >> i) & 1) << r
            elif alpha.kind == HALF:
                ax, az = (a.x >> i) & 1, (a.z >> i) & 1
                if (ax & alpha.vz) ^ (az & alpha.vx):
                    bits |= 1 << self.bit_site_of[i]
            elif alpha.kind == BIT_ON:
                j = i - self.original_ambient[0]
                if (a.bits >> j) & 1:
                    bits |= 1 << self.bit_site_of[i]
        return GroupElement(self.n_pauli, self.n_bits, x, z, bits)

    def embed_error(self, e: GroupElement) -> GroupElement:
        """Map a producible error to its literal reduced representation."""
        if e.ambient != self.original_ambient:
            raise AmbientMismatchError("element belongs to a different ambient")
        x = z = bits = 0
        for i, alpha in enumerate(self.alphabets):
            if alpha.kind == FULL:
                r = self.pauli_site_of[i]
                x |= ((e.x >> i) & 1) << r
                z |= ((e.z >> i) & 1) << r
                continue
            if i < self.original_ambient[0]:
                val = ((e.x >> i) & 1, (e.z >> i) & 1)
                if val == (0, 0):
                    continue
                if alpha.kind == HALF and val == (alpha.vx, alpha.vz):
                    bits |= 1 << self.bit_site_of[i]
                else:
                    raise ValueError(
                        f"site {i} of {e} is outside the producible alphabet"
                    )
            else:
                j = i - self.original_ambient[0]
                if (e.bits >> j) & 1:
                    if alpha.kind != BIT_ON:
                        raise ValueError(
                            f"bit site {i} of {e} is outside the producible alphabet"
                        )
                    bits |= 1 << self.bit_site_of[i]
        return GroupElement(self.n_pauli, self.n_bits, x, z, bits)

    def map_region(self, region: Iterable[int]) -> Region:
        out = set()
        for s in region:
            alpha = self.alphabets[s]
            if alpha.kind == FULL:
                out.add(self.pauli_site_of[s])
            elif alpha.kind in (HALF, BIT_ON):
                out.add(self.n_pauli + self.bit_site_of[s])
        return frozenset(out)


def _gauge_inside_alphabet(
    code: CodeGroups, alphabets: list[_SiteAlphabet]
) -> SubgroupBasis:
    """Basis of the gauge elements every site of which stays in the alphabet."""
    np_ = code.n_pauli

    def extract(v: int) -> int:
        out = 0
        pos = 0
        for i, alpha in enumerate(alphabets):
            if i < np_:
                xb = (v >> i) & 1
                zb = (v >> (np_ + i)) & 1
                if alpha.kind == TRIVIAL:
                    out |= xb << pos
                    out |= zb << (pos + 1)
                    pos += 2
                elif alpha.kind == HALF:
                    out |= ((xb & alpha.vz) ^ (zb & alpha.vx)) << pos
                    pos += 1
            else:
                bb = (v >> (2 * np_ + (i - np_))) & 1
                if alpha.kind == BIT_OFF:
                    out |= bb << pos
                    pos += 1
        return out

    return _kernel_subgroup(code.gauge, extract)


def reduce_problem(code: CodeGroups, model: NoiseModel) -> ReducedProblem:
    if code.ambient != model.ambient:
        raise AmbientMismatchError(
            f"code ambient {code.ambient} disagrees with noise ambient {model.ambient}"
        )
    alphabets = _site_alphabets(model)
    identity_rewrite = all(
        a.kind == (FULL if i < code.n_pauli else BIT_ON)
        for i, a in enumerate(alphabets)
    )

    pauli_site_of: list[Optional[int]] = []
    bit_site_of: list[Optional[int]] = []
    n_red_pauli = 0
    n_red_bits = 0
    for alpha in alphabets:
        if alpha.kind == FULL:
            pauli_site_of.append(n_red_pauli)
            bit_site_of.append(None)
            n_red_pauli += 1
        elif alpha.kind in (HALF, BIT_ON):
            pauli_site_of.append(None)
            bit_site_of.append(n_red_bits)
            n_red_bits += 1
        else:
            pauli_site_of.append(None)
            bit_site_of.append(None)

    rp_partial = ReducedProblem(
        code=code,
        model=model,
        logical_image=code.logical,
        identity=identity_rewrite,
        alphabets=tuple(alphabets),
        pauli_site_of=tuple(pauli_site_of),
        bit_site_of=tuple(bit_site_of),
        n_pauli=n_red_pauli,
        n_bits=n_red_bits,
        original_ambient=code.ambient,
    )
    if identity_rewrite:
        return rp_partial

    ambient = (n_red_pauli, n_red_bits)
    meas_gens = tuple(rp_partial.character_image(g) for g in code.meas_generators)
    meas = span(list(meas_gens), ambient=ambient)
    gauge_inside = _gauge_inside_alphabet(code, alphabets)
    gauge = span(
        [rp_partial.embed_error(g) for g in gauge_inside.rows], ambient=ambient
    )
    reduced_code = CodeGroups(
        kind=code.kind,
        meas=meas,
        gauge=gauge,
        logical=annihilator(gauge),
        undetectable=annihilator(meas),
        meas_generators=meas_gens,
        distance=None,
        name=(code.name + "-reduced") if code.name else "reduced",
    )
    logical_image = span(
        [rp_partial.character_image(l) for l in code.logical.rows], ambient=ambient
    )

    channels = []
    for ch in model.channels:
        sites = tuple(
            sorted(
                (rp_partial.pauli_site_of[s] if alphabets[s].kind == FULL
                 else n_red_pauli + rp_partial.bit_site_of[s])
                for s in ch.sites
                if alphabets[s].kind in (FULL, HALF, BIT_ON)
            )
        )
        probs: dict[GroupElement, float] = {}
        for key, p in ch.probs.items():
            if p <= 0 and not key.is_identity:
                continue  # zero-mass keys may sit outside the alphabet
            red = rp_partial.embed_error(key)
            probs[red] = probs.get(red, 0.0) + p
        channels.append(
            LocalChannel(sites=sites, probs=probs, n_pauli=n_red_pauli, n_bits=n_red_bits)
        )
    reduced_model = NoiseModel(
        channels=tuple(channels), n_pauli=n_red_pauli, n_bits=n_red_bits
    )

    return ReducedProblem(
        code=reduced_code,
        model=reduced_model,
        logical_image=logical_image,
        identity=False,
        alphabets=tuple(alphabets),
        pauli_site_of=tuple(pauli_site_of),
        bit_site_of=tuple(bit_site_of),
        n_pauli=n_red_pauli,
        n_bits=n_red_bits,
        original_ambient=code.ambient,
    )
