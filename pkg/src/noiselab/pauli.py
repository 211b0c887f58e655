"""Exact arithmetic in the effective (phase-free) Pauli group, optionally
extended by classical bits, plus subgroup linear algebra over F2.

Elements live in a product group with ``n_pauli`` single-qubit Pauli factors
followed by ``n_bits`` bit factors, addressed by one flat site index space
(Pauli sites first). Phases are never tracked: every element is self-inverse
and the group is abelian. Commutation in the underlying qubit algebra is
recovered through :func:`bicharacter`.

Subgroups are represented by a canonical reduced row-echelon basis over F2
(column order: X block, Z block, bit block), so two ``SubgroupBasis`` objects
describe the same subgroup iff their rows are equal.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Sequence

from .errors import AmbientMismatchError, CapExceededError

Region = frozenset  # set of flat site indices

_PAULI_CHARS = {"I": (0, 0), "X": (1, 0), "Z": (0, 1), "Y": (1, 1)}
_CHAR_OF = {(0, 0): "I", (1, 0): "X", (0, 1): "Z", (1, 1): "Y"}

ENUMERATION_CAP = 24  # max subgroup rank for explicit enumeration


@dataclass(frozen=True)
class GroupElement:
    """One element: X/Z masks over Pauli sites plus a flip mask over bit sites.

    Bit ``i`` of each mask corresponds to site ``i`` (LSB = site 0). Site ``i``
    is the identity iff both ``x`` and ``z`` bits are clear; both set means Y.
    """

    n_pauli: int
    n_bits: int
    x: int
    z: int
    bits: int

    @property
    def ambient(self) -> tuple[int, int]:
        return (self.n_pauli, self.n_bits)

    @property
    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0 and self.bits == 0

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        _check_same_ambient(self, other)
        return GroupElement(
            self.n_pauli,
            self.n_bits,
            self.x ^ other.x,
            self.z ^ other.z,
            self.bits ^ other.bits,
        )

    def __str__(self) -> str:
        return element_to_string(self)

    def sort_key(self) -> tuple[int, str]:
        """Deterministic order used for reports and design-matrix columns."""
        return (weight(self), element_to_string(self))


def identity(n_pauli: int, n_bits: int = 0) -> GroupElement:
    return GroupElement(n_pauli, n_bits, 0, 0, 0)


def _check_same_ambient(a: GroupElement, b: GroupElement) -> None:
    if a.ambient != b.ambient:
        raise AmbientMismatchError(f"ambient mismatch: {a.ambient} vs {b.ambient}")


def parse_element(text: str, ambient: Optional[tuple[int, int]] = None) -> GroupElement:
    """Parse a dense string like ``"XIZZY"`` or ``"XI|01"`` into an element.

    The optional ``ambient`` is validated against the parsed lengths.
    """
    pauli_part, _, bit_part = text.partition("|")
    x = z = bits = 0
    for i, ch in enumerate(pauli_part):
        try:
            xb, zb = _PAULI_CHARS[ch]
        except KeyError:
            raise ValueError(f"invalid Pauli character {ch!r} in {text!r}") from None
        x |= xb << i
        z |= zb << i
    for j, ch in enumerate(bit_part):
        if ch == "1":
            bits |= 1 << j
        elif ch != "0":
            raise ValueError(f"invalid bit character {ch!r} in {text!r}")
    elem = GroupElement(len(pauli_part), len(bit_part), x, z, bits)
    if ambient is not None and elem.ambient != tuple(ambient):
        raise ValueError(
            f"element {text!r} has ambient {elem.ambient}, expected {tuple(ambient)}"
        )
    return elem


def element_to_string(a: GroupElement) -> str:
    chars = [
        _CHAR_OF[((a.x >> i) & 1, (a.z >> i) & 1)] for i in range(a.n_pauli)
    ]
    s = "".join(chars)
    if a.n_bits:
        s += "|" + "".join(str((a.bits >> j) & 1) for j in range(a.n_bits))
    return s


def multiply(a: GroupElement, b: GroupElement) -> GroupElement:
    return a * b


def bicharacter(a: GroupElement, e: GroupElement) -> int:
    """Sign (+1/-1) encoding commutation of the underlying Pauli operators.

    Equals ``(-1)**(x_a.z_e + z_a.x_e + bits_a.bits_e mod 2)``; symmetric and
    multiplicative in each argument.
    """
    _check_same_ambient(a, e)
    acc = (a.x & e.z) ^ (a.z & e.x) ^ (a.bits & e.bits)
    return -1 if acc.bit_count() & 1 else 1


def weight(a: GroupElement) -> int:
    return (a.x | a.z).bit_count() + a.bits.bit_count()


def support(a: GroupElement) -> Region:
    """Indices of non-identity sites (bit sites offset by ``n_pauli``)."""
    m = a.x | a.z
    sites = [i for i in range(a.n_pauli) if (m >> i) & 1]
    sites += [a.n_pauli + j for j in range(a.n_bits) if (a.bits >> j) & 1]
    return frozenset(sites)


def is_substring(b: GroupElement, a: GroupElement) -> bool:
    """True iff every non-identity site of ``b`` matches ``a`` exactly."""
    _check_same_ambient(b, a)
    m = b.x | b.z
    return (a.x & m) == b.x and (a.z & m) == b.z and (a.bits & b.bits) == b.bits


def restrict(a: GroupElement, region: Iterable[int]) -> GroupElement:
    """Copy of ``a`` with identity on every site outside ``region``."""
    pm = 0
    bm = 0
    for s in region:
        if s < a.n_pauli:
            pm |= 1 << s
        else:
            bm |= 1 << (s - a.n_pauli)
    return GroupElement(a.n_pauli, a.n_bits, a.x & pm, a.z & pm, a.bits & bm)


def substrings(a: GroupElement) -> Iterator[GroupElement]:
    """All elements b with ``is_substring(b, a)``, identity first."""
    sites = sorted(support(a))
    if len(sites) > ENUMERATION_CAP:
        raise CapExceededError(f"element weight {len(sites)} exceeds substring cap")
    for mask in range(1 << len(sites)):
        chosen = [s for k, s in enumerate(sites) if (mask >> k) & 1]
        yield restrict(a, chosen)


def complement(region: Iterable[int], ambient: tuple[int, int]) -> Region:
    n = ambient[0] + ambient[1]
    return frozenset(range(n)) - frozenset(region)


# --------------------------------------------------------------------------
# F2 vector encoding and row reduction.
#
# An element maps to one integer with bit layout [x | z << n_pauli |
# bits << 2*n_pauli]; pivoting from the lowest bit realizes the fixed
# X-block / Z-block / bit-block column order.


def _to_vector(a: GroupElement) -> int:
    return a.x | (a.z << a.n_pauli) | (a.bits << (2 * a.n_pauli))


def _from_vector(v: int, n_pauli: int, n_bits: int) -> GroupElement:
    pm = (1 << n_pauli) - 1
    bm = (1 << n_bits) - 1
    return GroupElement(n_pauli, n_bits, v & pm, (v >> n_pauli) & pm, (v >> (2 * n_pauli)) & bm)


def _rref(vectors: Iterable[int]) -> dict[int, int]:
    """Reduced row echelon form; returns {pivot_bit: row} with unique rows."""
    rows: dict[int, int] = {}
    for v in vectors:
        for p, r in rows.items():
            if (v >> p) & 1:
                v ^= r
        if not v:
            continue
        p = (v & -v).bit_length() - 1
        for q in list(rows):
            if (rows[q] >> p) & 1:
                rows[q] ^= v
        rows[p] = v
    return rows


def _reduce_vector(v: int, rows: dict[int, int]) -> int:
    for p, r in rows.items():
        if (v >> p) & 1:
            v ^= r
    return v


def _nullspace(rows: Sequence[int], dim: int) -> list[int]:
    """Basis of {v in F2^dim : every row dotted with v is 0}."""
    rr = _rref(rows)
    basis = []
    pivots = set(rr)
    for f in range(dim):
        if f in pivots:
            continue
        n = 1 << f
        for p, r in rr.items():
            if (r >> f) & 1:
                n |= 1 << p
        basis.append(n)
    return basis


@dataclass(frozen=True)
class SubgroupBasis:
    """Canonical F2 basis of a subgroup; rows are independent generators."""

    n_pauli: int
    n_bits: int
    rows: tuple[GroupElement, ...]

    @property
    def ambient(self) -> tuple[int, int]:
        return (self.n_pauli, self.n_bits)

    @property
    def rank(self) -> int:
        return len(self.rows)

    def __contains__(self, a: GroupElement) -> bool:
        return in_span(self, a)


def _basis_from_vectors(vectors: Iterable[int], ambient: tuple[int, int]) -> SubgroupBasis:
    rr = _rref(vectors)
    np_, nb = ambient
    rows = tuple(_from_vector(rr[p], np_, nb) for p in sorted(rr))
    return SubgroupBasis(np_, nb, rows)


def span(
    generators: Sequence[GroupElement], ambient: Optional[tuple[int, int]] = None
) -> SubgroupBasis:
    """Canonical independent basis spanning the same subgroup."""
    if generators:
        amb = generators[0].ambient
        for g in generators[1:]:
            if g.ambient != amb:
                raise AmbientMismatchError("generators have mixed ambients")
        if ambient is not None and tuple(ambient) != amb:
            raise AmbientMismatchError("generator ambient disagrees with requested ambient")
    elif ambient is None:
        raise ValueError("span of an empty set needs an explicit ambient")
    else:
        amb = tuple(ambient)
    return _basis_from_vectors((_to_vector(g) for g in generators), amb)


def in_span(basis: SubgroupBasis, a: GroupElement) -> bool:
    _check_same_ambient(a, identity(*basis.ambient))
    rr = {(_to_vector(r) & -_to_vector(r)).bit_length() - 1: _to_vector(r) for r in basis.rows}
    return _reduce_vector(_to_vector(a), rr) == 0


def combination_in_span(
    rows: Sequence[GroupElement], a: GroupElement, ambient: Optional[tuple[int, int]] = None
) -> Optional[tuple[int, ...]]:
    """Coefficients c with ``prod(rows[i]^c[i]) == a``, or None.

    ``rows`` need not be independent; a valid combination is returned whenever
    one exists (deterministic choice).
    """
    aug: dict[int, tuple[int, int]] = {}  # pivot -> (vector, combo bits)
    for i, r in enumerate(rows):
        v, c = _to_vector(r), 1 << i
        for p, (pv, pc) in aug.items():
            if (v >> p) & 1:
                v, c = v ^ pv, c ^ pc
        if not v:
            continue
        p = (v & -v).bit_length() - 1
        for q, (qv, qc) in list(aug.items()):
            if (qv >> p) & 1:
                aug[q] = (qv ^ v, qc ^ c)
        aug[p] = (v, c)
    v, c = _to_vector(a), 0
    for p, (pv, pc) in aug.items():
        if (v >> p) & 1:
            v, c = v ^ pv, c ^ pc
    if v:
        return None
    return tuple((c >> i) & 1 for i in range(len(rows)))


def _lambda_map(v: int, n_pauli: int) -> int:
    """Swap the X and Z blocks (the bicharacter's symplectic form)."""
    pm = (1 << n_pauli) - 1
    x = v & pm
    z = (v >> n_pauli) & pm
    rest = v >> (2 * n_pauli)
    return z | (x << n_pauli) | (rest << (2 * n_pauli))


def annihilator(basis: SubgroupBasis) -> SubgroupBasis:
    """All elements pairing to +1 with every row of ``basis``.

    Ranks satisfy ``rank(B) + rank(annihilator(B)) == 2*n_pauli + n_bits``.
    """
    dim = 2 * basis.n_pauli + basis.n_bits
    rows = [_lambda_map(_to_vector(r), basis.n_pauli) for r in basis.rows]
    return _basis_from_vectors(_nullspace(rows, dim), basis.ambient)


def intersect(b: SubgroupBasis, c: SubgroupBasis) -> SubgroupBasis:
    if b.ambient != c.ambient:
        raise AmbientMismatchError("subgroup ambients differ")
    joined = span(annihilator(b).rows + annihilator(c).rows, ambient=b.ambient)
    return annihilator(joined)


def _kernel_subgroup(basis: SubgroupBasis, extract) -> SubgroupBasis:
    """Subgroup of ``basis`` elements that ``extract`` (linear, int-valued)
    maps to zero."""
    k = basis.rank
    images = [extract(_to_vector(r)) for r in basis.rows]
    out_bits = max((im.bit_length() for im in images), default=0)
    eq_rows = []
    for j in range(out_bits):
        row = 0
        for i, im in enumerate(images):
            if (im >> j) & 1:
                row |= 1 << i
        eq_rows.append(row)
    members = []
    for combo in _nullspace(eq_rows, k):
        v = 0
        for i in range(k):
            if (combo >> i) & 1:
                v ^= _to_vector(basis.rows[i])
        members.append(v)
    return _basis_from_vectors(members, basis.ambient)


def restrict_to_region(basis: SubgroupBasis, region: Iterable[int]) -> SubgroupBasis:
    """Basis of the elements of ``basis`` supported inside ``region``."""
    outside = complement(region, basis.ambient)
    pm = 0
    bm = 0
    for s in outside:
        if s < basis.n_pauli:
            pm |= 1 << s
        else:
            bm |= 1 << (s - basis.n_pauli)
    mask = pm | (pm << basis.n_pauli) | (bm << (2 * basis.n_pauli))
    return _kernel_subgroup(basis, lambda v: v & mask)


def enumerate_group(basis: SubgroupBasis, cap: int = ENUMERATION_CAP) -> Iterator[GroupElement]:
    """All 2^rank elements in Gray-code order (deterministic), identity first."""
    if basis.rank > cap:
        raise CapExceededError(
            f"subgroup rank {basis.rank} exceeds enumeration cap {cap}"
        )
    for v in _enumerate_vectors(basis):
        yield _from_vector(v, basis.n_pauli, basis.n_bits)


def _enumerate_vectors(basis: SubgroupBasis) -> Iterator[int]:
    vecs = [_to_vector(r) for r in basis.rows]
    cur = 0
    yield cur
    for i in range(1, 1 << len(vecs)):
        cur ^= vecs[(i & -i).bit_length() - 1]
        yield cur


def same_subgroup(b: SubgroupBasis, c: SubgroupBasis) -> bool:
    return b.ambient == c.ambient and b.rows == c.rows
