"""Code models: the four groups describing what a code measures and what it
considers logically trivial, for stabilizer, subsystem and data-syndrome codes.

Every code is summarized by a :class:`CodeGroups` record holding

* ``meas`` - the group generated by the measured operators,
* ``gauge`` - the group defining logical equivalence of errors,
* ``logical`` - annihilator of ``gauge`` (operators preserving the codespace),
* ``undetectable`` - annihilator of ``meas`` (errors with trivial syndrome),

which always satisfy the dual inclusions ``gauge <= undetectable`` and
``meas <= logical``.

Sign conventions are the caller's responsibility: the effective (phase-free)
group cannot express whether a product of generators equals -identity, so
generator sets that are dependent over F2 are rejected outright.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .errors import CapExceededError
from .pauli import (
    ENUMERATION_CAP,
    GroupElement,
    SubgroupBasis,
    annihilator,
    bicharacter,
    enumerate_group,
    identity,
    in_span,
    intersect,
    parse_element,
    restrict_to_region,
    span,
    weight,
)


@dataclass(frozen=True)
class CodeGroups:
    """The four groups of a code plus the ordered list of measured generators."""

    kind: str  # "stabilizer" | "subsystem" | "data-syndrome"
    meas: SubgroupBasis
    gauge: SubgroupBasis
    logical: SubgroupBasis
    undetectable: SubgroupBasis
    meas_generators: tuple[GroupElement, ...]
    distance: Optional[int] = None
    name: str = ""

    @property
    def n_pauli(self) -> int:
        return self.meas.n_pauli

    @property
    def n_bits(self) -> int:
        return self.meas.n_bits

    @property
    def ambient(self) -> tuple[int, int]:
        return self.meas.ambient

    def __post_init__(self):
        for g in self.gauge.rows:
            for m in self.meas.rows:
                if bicharacter(g, m) != 1:
                    raise ValueError(
                        "dual inclusion violated: gauge element "
                        f"{g} is detected by {m}"
                    )


def build_stabilizer_code(
    generators: Sequence[GroupElement], name: str = "", distance: Optional[int] = None
) -> CodeGroups:
    """Stabilizer code from pairwise-commuting independent generators."""
    gens = list(generators)
    if not gens:
        raise ValueError("a stabilizer code needs at least one generator")
    for i, a in enumerate(gens):
        for b in gens[i + 1 :]:
            if bicharacter(a, b) != 1:
                raise ValueError(f"generators {a} and {b} do not commute")
    grp = span(gens)
    if grp.rank < len(gens):
        raise ValueError(
            "generators are dependent over F2; cannot rule out -identity "
            "in the phase-free group"
        )
    logical = annihilator(grp)
    return CodeGroups(
        kind="stabilizer",
        meas=grp,
        gauge=grp,
        logical=logical,
        undetectable=logical,
        meas_generators=tuple(gens),
        distance=distance,
        name=name,
    )


def build_subsystem_code(
    gauge_generators: Sequence[GroupElement], name: str = "", distance: Optional[int] = None
) -> CodeGroups:
    """Subsystem code from (possibly non-commuting) gauge generators.

    The measured group is the center of the gauge group; ``logical`` holds the
    bare logical operators and ``undetectable`` the dressed ones.
    """
    gauge = span(list(gauge_generators))
    bare = annihilator(gauge)
    meas = intersect(bare, gauge)
    return CodeGroups(
        kind="subsystem",
        meas=meas,
        gauge=gauge,
        logical=bare,
        undetectable=annihilator(meas),
        meas_generators=tuple(meas.rows),
        distance=distance,
        name=name,
    )


@dataclass(frozen=True)
class DataSyndromeSpec:
    """Redundant-measurement plan: slot ``i`` measures the product of
    ``base_generators[j]`` for ``j`` in ``selection[i]``."""

    base_generators: tuple[GroupElement, ...]
    selection: tuple[tuple[int, ...], ...]

    @property
    def m(self) -> int:
        return len(self.selection)


def build_data_syndrome_code(
    spec: DataSyndromeSpec, name: str = "", distance: Optional[int] = None
) -> CodeGroups:
    """Extend a stabilizer code with per-measurement error bits.

    Measurement slot ``i`` contributes the generator ``(s_i, e_i)`` where
    ``s_i`` is the selected stabilizer product and ``e_i`` the i-th standard
    bit vector, so the bit block of the generator list is the identity.
    Logical equivalence is still defined by the embedded stabilizer group.
    """
    base = list(spec.base_generators)
    if not base:
        raise ValueError("data-syndrome spec needs base generators")
    n = base[0].n_pauli
    for g in base:
        if g.n_bits != 0:
            raise ValueError("base generators must be plain Pauli elements")
    for i, a in enumerate(base):
        for b in base[i + 1 :]:
            if bicharacter(a, b) != 1:
                raise ValueError(f"base generators {a} and {b} do not commute")
    m = spec.m
    extended = []
    for i, picks in enumerate(spec.selection):
        prod = identity(n)
        for j in picks:
            prod = prod * base[j]
        extended.append(GroupElement(n, m, prod.x, prod.z, 1 << i))
    meas = span(extended)
    gauge = span(
        [GroupElement(n, m, g.x, g.z, 0) for g in base], ambient=(n, m)
    )
    return CodeGroups(
        kind="data-syndrome",
        meas=meas,
        gauge=gauge,
        logical=annihilator(gauge),
        undetectable=annihilator(meas),
        meas_generators=tuple(extended),
        distance=distance,
        name=name,
    )


def is_correctable_region(code: CodeGroups, region: Iterable[int]) -> bool:
    """True iff every undetectable error inside ``region`` is logically trivial.

    Decided by exact F2 rank comparison: the gauge elements inside the region
    are always among the undetectable ones, so equal ranks mean equal sets.
    """
    region = frozenset(region)
    r_und = restrict_to_region(code.undetectable, region).rank
    r_gau = restrict_to_region(code.gauge, region).rank
    return r_und == r_gau


def distance(code: CodeGroups, cap: int = ENUMERATION_CAP) -> int:
    """Minimum weight of an undetectable, logically nontrivial element."""
    if code.undetectable.rank > cap:
        raise CapExceededError(
            f"undetectable group rank {code.undetectable.rank} exceeds cap {cap}"
        )
    best = None
    for e in enumerate_group(code.undetectable, cap=cap):
        if e.is_identity or in_span(code.gauge, e):
            continue
        w = weight(e)
        if best is None or w < best:
            best = w
    if best is None:
        raise ValueError("code has no nontrivial undetectable element")
    return best


def coset_transversal(
    big: SubgroupBasis, sub: SubgroupBasis, cap: int = ENUMERATION_CAP
) -> list[GroupElement]:
    """Minimum-weight representative per coset of ``sub`` in ``big``.

    Ties break lexicographically on the element string, so the transversal is
    stable across runs. The identity coset is listed first.
    """
    if big.rank > cap:
        raise CapExceededError(f"group rank {big.rank} exceeds enumeration cap {cap}")
    best: dict[tuple, GroupElement] = {}
    sub_rows = {  # pivot -> vector, for canonical coset labels
        _pivot(r): _vec(r) for r in sub.rows
    }
    for e in enumerate_group(big, cap=cap):
        v = _vec(e)
        for p, r in sub_rows.items():
            if (v >> p) & 1:
                v ^= r
        key = v
        cur = best.get(key)
        if cur is None or e.sort_key() < cur.sort_key():
            best[key] = e
    reps = sorted(best.values(), key=lambda e: (not e.is_identity, e.sort_key()))
    return reps


def _vec(a: GroupElement) -> int:
    return a.x | (a.z << a.n_pauli) | (a.bits << (2 * a.n_pauli))


def _pivot(a: GroupElement) -> int:
    v = _vec(a)
    return (v & -v).bit_length() - 1


# --------------------------------------------------------------------------
# Builtin code zoo.


def _rep_generators(n: int) -> list[GroupElement]:
    gens = []
    for i in range(n - 1):
        s = ["I"] * n
        s[i] = s[i + 1] = "Z"
        gens.append(parse_element("".join(s)))
    return gens


_FIVE_QUBIT = ["XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"]

_FOUR_QUBIT = ["XXXX", "ZZZZ", "XXII"]

_STEANE = [
    "IIIXXXX",
    "IXXIIXX",
    "XIXIXIX",
    "IIIZZZZ",
    "IZZIIZZ",
    "ZIZIZIZ",
]

_SHOR = [
    "ZZIIIIIII",
    "IZZIIIIII",
    "IIIZZIIII",
    "IIIIZZIII",
    "IIIIIIZZI",
    "IIIIIIIZZ",
    "XXXXXXIII",
    "IIIXXXXXX",
]


def _bacon_shor_gauge(d: int) -> list[GroupElement]:
    """d x d grid, qubit (r, c) at index r*d + c; XX on row-adjacent pairs,
    ZZ on column-adjacent pairs."""
    gens = []
    n = d * d
    for r in range(d):
        for c in range(d - 1):
            s = ["I"] * n
            s[r * d + c] = s[r * d + c + 1] = "X"
            gens.append(parse_element("".join(s)))
    for c in range(d):
        for r in range(d - 1):
            s = ["I"] * n
            s[r * d + c] = s[(r + 1) * d + c] = "Z"
            gens.append(parse_element("".join(s)))
    return gens


def toric_edge_index(d: int, kind: str, x: int, y: int) -> int:
    """Qubits live on torus edges: horizontal edges first, row-major, then
    vertical edges row-major; ``(x, y)`` wraps modulo ``d``."""
    x %= d
    y %= d
    base = 0 if kind == "h" else d * d
    return base + y * d + x


def _toric_generators(d: int) -> list[GroupElement]:
    n = 2 * d * d
    gens = []
    for y in range(d):
        for x in range(d):
            if x == d - 1 and y == d - 1:
                continue  # product of all stars is identity
            s = ["I"] * n
            for idx in (
                toric_edge_index(d, "h", x, y),
                toric_edge_index(d, "h", x - 1, y),
                toric_edge_index(d, "v", x, y),
                toric_edge_index(d, "v", x, y - 1),
            ):
                s[idx] = "X"
            gens.append(parse_element("".join(s)))
    for y in range(d):
        for x in range(d):
            if x == d - 1 and y == d - 1:
                continue  # product of all plaquettes is identity
            s = ["I"] * n
            for idx in (
                toric_edge_index(d, "h", x, y),
                toric_edge_index(d, "h", x, y + 1),
                toric_edge_index(d, "v", x, y),
                toric_edge_index(d, "v", x + 1, y),
            ):
                s[idx] = "Z"
            gens.append(parse_element("".join(s)))
    return gens


def toric_vertical_z_loop(d: int, column: int = 0) -> GroupElement:
    """A minimum-weight logical: Z on the vertical edges of one column."""
    n = 2 * d * d
    s = ["I"] * n
    for y in range(d):
        s[toric_edge_index(d, "v", column, y)] = "Z"
    return parse_element("".join(s))


def builtin_code(name: str, **params) -> CodeGroups:
    """Construct a code from the builtin zoo.

    Known names: ``repetition`` (n), ``four-qubit``, ``five-qubit``,
    ``steane``, ``shor``, ``bacon-shor`` (d), ``toric`` (d).
    """
    key = name.lower().replace("_", "-")
    if key == "repetition":
        n = int(params.get("n", params.get("d", 3)))
        if n < 2:
            raise ValueError("repetition code needs n >= 2")
        return build_stabilizer_code(
            _rep_generators(n), name=f"repetition-{n}", distance=1
        )
    if key in ("four-qubit", "412"):
        return build_stabilizer_code(
            [parse_element(s) for s in _FOUR_QUBIT], name="four-qubit", distance=2
        )
    if key in ("five-qubit", "513"):
        return build_stabilizer_code(
            [parse_element(s) for s in _FIVE_QUBIT], name="five-qubit", distance=3
        )
    if key == "steane":
        return build_stabilizer_code(
            [parse_element(s) for s in _STEANE], name="steane", distance=3
        )
    if key == "shor":
        return build_stabilizer_code(
            [parse_element(s) for s in _SHOR], name="shor", distance=3
        )
    if key == "bacon-shor":
        d = int(params.get("d", params.get("n", 3)))
        if d < 2:
            raise ValueError("bacon-shor needs d >= 2")
        return build_subsystem_code(
            _bacon_shor_gauge(d), name=f"bacon-shor-{d}", distance=d
        )
    if key == "toric":
        d = int(params.get("d", 3))
        if d < 2:
            raise ValueError("toric code needs d >= 2")
        return build_stabilizer_code(
            _toric_generators(d), name=f"toric-{d}", distance=d
        )
    raise ValueError(f"unknown builtin code {name!r}")
