"""Identifiability checks and the log-linear solver for logical moments.

The measured moments of a factorized noise model satisfy, after taking
logarithms, a linear system over the canonical-moment columns: the design
matrix has one row per group element with a 1 wherever a column element is a
substring of the row element. The logical channel is determined by the
syndrome statistics exactly when the design matrix over the logical group has
the same rank as the one over the measured group; the solver then evaluates
any logical row on a least-squares solution of the measured system.

All ranks and solves run on the reduced problem (see ``reduction``), which is
the identity rewrite for full Pauli channels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
import scipy.linalg
import scipy.sparse.linalg

from .codes import CodeGroups
from .errors import (
    AmbientMismatchError,
    CapExceededError,
    NonPositiveMomentError,
    NotIdentifiableError,
)
from .noise import (
    GammaPrime,
    LocalChannel,
    MomentTable,
    NoiseModel,
    exact_moment,
    gamma_prime,
    is_correctable_noise,
)
from .pauli import (
    ENUMERATION_CAP,
    GroupElement,
    SubgroupBasis,
    _enumerate_vectors,
    bicharacter,
    element_to_string,
    enumerate_group,
    in_span,
    is_substring,
)
from .reduction import ReducedProblem, reduce_problem
from .transforms import EXACT_MOMENT_FLOOR, DistributionTable

DEFAULT_ROW_CAP = 1 << 20
RANK_RTOL = 1e-9  # singular values below RANK_RTOL * sigma_max count as zero
CG_COLUMN_THRESHOLD = 2000
CG_RESIDUAL = 1e-12
ROWSPACE_RTOL = 1e-9
SAMPLE_SEED = 0xD1CE


def _raw_triples(basis: SubgroupBasis):
    """(x, z, bits) masks of every subgroup element, Gray-code order."""
    np_ = basis.n_pauli
    pm = (1 << np_) - 1
    for v in _enumerate_vectors(basis):
        yield v & pm, (v >> np_) & pm, v >> (2 * np_)


def _check_mask_width(ambient: tuple[int, int]) -> None:
    if ambient[0] > 63 or ambient[1] > 63:
        raise CapExceededError(
            "design-matrix construction supports at most 63 Pauli and 63 bit sites"
        )


def _column_masks(gp: GammaPrime, ambient: tuple[int, int]):
    mp = np.empty(len(gp), dtype=np.uint64)
    ax = np.empty(len(gp), dtype=np.uint64)
    az = np.empty(len(gp), dtype=np.uint64)
    ab = np.empty(len(gp), dtype=np.uint64)
    for j, col in enumerate(gp.elements):
        if col.ambient != ambient:
            raise AmbientMismatchError("column ambient disagrees with rows")
        mp[j] = col.x | col.z
        ax[j] = col.x
        az[j] = col.z
        ab[j] = col.bits
    return mp, ax, az, ab


def _rows_to_arrays(triples) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    xs, zs, bs = [], [], []
    for x, z, b in triples:
        xs.append(x)
        zs.append(z)
        bs.append(b)
    return (
        np.array(xs, dtype=np.uint64),
        np.array(zs, dtype=np.uint64),
        np.array(bs, dtype=np.uint64),
    )


def _design_block(
    xs: np.ndarray, zs: np.ndarray, bs: np.ndarray, masks
) -> np.ndarray:
    """0/1 block: entry [i, j] is 1 iff column j is a substring of row i."""
    mp, ax, az, ab = masks
    out = (
        ((xs[:, None] & mp[None, :]) == ax[None, :])
        & ((zs[:, None] & mp[None, :]) == az[None, :])
        & ((bs[:, None] & ab[None, :]) == ab[None, :])
    )
    return out.astype(np.float64)


@dataclass(frozen=True)
class DesignMatrix:
    """Substring indicator matrix of a row group against gamma-prime columns.

    Rows are the full group enumeration when it fits the row cap, otherwise a
    seeded uniform sample of group elements (``sampled`` set)."""

    group: SubgroupBasis
    columns: GammaPrime
    n_rows: int
    sampled: bool
    _xs: np.ndarray
    _zs: np.ndarray
    _bs: np.ndarray

    def blocks(self, chunk: Optional[int] = None):
        masks = _column_masks(self.columns, self.group.ambient)
        ncols = max(1, len(self.columns))
        if chunk is None:
            chunk = max(1024, (1 << 22) // ncols)
        for start in range(0, self.n_rows, chunk):
            sl = slice(start, min(start + chunk, self.n_rows))
            yield _design_block(self._xs[sl], self._zs[sl], self._bs[sl], masks)

    def toarray(self) -> np.ndarray:
        if self.n_rows * max(1, len(self.columns)) > (1 << 26):
            raise CapExceededError("design matrix too large to materialize")
        blocks = list(self.blocks())
        if not blocks:
            return np.zeros((0, len(self.columns)))
        return np.concatenate(blocks, axis=0)

    def row_elements(self):
        np_, nb = self.group.ambient
        for x, z, b in zip(self._xs, self._zs, self._bs):
            yield GroupElement(np_, nb, int(x), int(z), int(b))


def _sample_triples(basis: SubgroupBasis, count: int, seed: int):
    if basis.rank > 63:
        raise CapExceededError("sampled design rows support subgroup rank <= 63")
    rng = np.random.default_rng(seed)
    combos = rng.integers(0, 1 << basis.rank, size=count, dtype=np.uint64)
    np_ = basis.n_pauli
    pm = (1 << np_) - 1
    vecs = [r.x | (r.z << np_) | (r.bits << (2 * np_)) for r in basis.rows]
    for c in combos:
        v = 0
        c = int(c)
        i = 0
        while c:
            if c & 1:
                v ^= vecs[i]
            c >>= 1
            i += 1
        yield v & pm, (v >> np_) & pm, v >> (2 * np_)


def build_design_matrix(
    group: SubgroupBasis,
    gp: GammaPrime,
    row_cap: int = DEFAULT_ROW_CAP,
    seed: int = SAMPLE_SEED,
) -> DesignMatrix:
    """Design matrix over the full group enumeration, or a seeded random
    sample of ``4 * rank * n_columns`` elements when the group is too large."""
    _check_mask_width(group.ambient)
    if (1 << group.rank) <= row_cap:
        xs, zs, bs = _rows_to_arrays(_raw_triples(group))
        return DesignMatrix(group, gp, len(xs), False, xs, zs, bs)
    count = max(4 * group.rank * max(1, len(gp)), 16)
    xs, zs, bs = _rows_to_arrays(_sample_triples(group, count, seed))
    return DesignMatrix(group, gp, len(xs), True, xs, zs, bs)


def gram(design: DesignMatrix) -> np.ndarray:
    """Exact integer Gram matrix: entry [a, b] counts the rows containing
    both column elements as substrings."""
    c = len(design.columns)
    acc = np.zeros((c, c))
    for block in design.blocks():
        acc += block.T @ block
    return np.rint(acc).astype(np.int64)


def _eig_tol(size: int, rtol: float = RANK_RTOL) -> float:
    # Gram eigenvalues are squared singular values; the requested singular
    # tolerance is floored at the eigensolver's own noise level
    return max(rtol * rtol, size * np.finfo(np.float64).eps * 8)


def rank_from_gram(g: np.ndarray, rtol: float = RANK_RTOL) -> int:
    if g.size == 0:
        return 0
    vals = scipy.linalg.eigvalsh(g.astype(np.float64))
    top = vals[-1] if len(vals) else 0.0
    if top <= 0:
        return 0
    return int(np.sum(vals > top * _eig_tol(g.shape[0], rtol)))


@dataclass(frozen=True)
class IdentifiabilityReport:
    identifiable: bool
    rank_meas: int
    rank_logical: int
    gram_ratio: Optional[int]  # |logical / measured| of the groups compared
    n_columns: int
    correctable: Optional[bool]
    notes: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "identifiable": self.identifiable,
            "rank_meas": self.rank_meas,
            "rank_logical": self.rank_logical,
            "gram_ratio": self.gram_ratio,
            "n_columns": self.n_columns,
            "correctable": self.correctable,
            "notes": list(self.notes),
        }


def identifiability_check(
    code: CodeGroups,
    model: NoiseModel,
    row_cap: int = DEFAULT_ROW_CAP,
    check_correctable: bool = True,
) -> IdentifiabilityReport:
    """Compare design-matrix ranks over the measured and logical groups.

    Equal ranks mean every logical moment is a monomial in the measured ones,
    so the logical channel is determined by the syndrome statistics. With
    correctable noise equality is guaranteed; the report still carries the
    computed ranks for non-correctable models.
    """
    rp = reduce_problem(code, model)
    gp = gamma_prime(rp.model)
    notes = []
    if not rp.identity:
        notes.append("problem reduced to the producible error alphabet")

    rank_m, sampled_m = _group_rank(rp.code.meas, gp, row_cap)
    rank_l, sampled_l = _group_rank(rp.logical_image, gp, row_cap)
    if sampled_m or sampled_l:
        notes.append("row sampling in use; ranks verified on two disjoint samples")

    correctable = None
    if check_correctable:
        res = is_correctable_noise(model, code)
        correctable = res.ok
        notes.extend(res.notes)
        if res.ok and rank_m != rank_l:
            notes.append(
                "WARNING: correctable noise but unequal ranks; this contradicts "
                "the identifiability guarantee and signals a numerical problem"
            )
    return IdentifiabilityReport(
        identifiable=rank_m == rank_l,
        rank_meas=rank_m,
        rank_logical=rank_l,
        gram_ratio=1 << (rp.logical_image.rank - rp.code.meas.rank),
        n_columns=len(gp),
        correctable=correctable,
        notes=tuple(notes),
    )


def _group_rank(
    group: SubgroupBasis, gp: GammaPrime, row_cap: int
) -> tuple[int, bool]:
    d = build_design_matrix(group, gp, row_cap)
    r = rank_from_gram(gram(d))
    if not d.sampled:
        return r, False
    d2 = build_design_matrix(group, gp, row_cap, seed=SAMPLE_SEED + 1)
    r2 = rank_from_gram(gram(d2))
    if r != r2:
        raise RuntimeError(
            f"sampled design-matrix ranks disagree ({r} vs {r2}); increase the "
            "row cap or sample size"
        )
    return r, True


# --------------------------------------------------------------------------
# Log-linear solve.


@dataclass
class EstimationResult:
    moments: MomentTable
    dropped: list[tuple[GroupElement, str]]
    warnings: list[str]
    log_variances: Optional[dict[GroupElement, float]]  # var of log-moment


def _prepare_rows(
    table: MomentTable,
    rp: ReducedProblem,
    gp: GammaPrime,
    drop_sigma: float,
):
    """Map measured-table keys through the reduction and assemble the design
    rows, log-values and inverse-variance weights."""
    keys = sorted(table.entries, key=lambda e: e.sort_key())
    empirical = table.tag == "empirical"
    masks = _column_masks(gp, rp.code.ambient) if len(gp) else None
    rows = []
    logs = []
    weights = []
    dropped = []
    warnings = []
    # a zero sample stderr only means the variance is unresolved at this
    # sample size; floor it at the dataset's own error scale so one row
    # cannot swamp the weighted spectrum
    positive_errs = [table.stderr_of(s) for s in keys if table.stderr_of(s) > 0]
    err_floor = min(positive_errs) if positive_errs else 1e-9
    for s in keys:
        red = rp.character_image(s) if not rp.identity else s
        value = table.entries[s]
        err = table.stderr_of(s)
        if red.is_identity:
            continue  # structurally trivial row, carries no information
        if empirical:
            if err > 0 and abs(value) < drop_sigma * err:
                dropped.append((s, "estimate indistinguishable from zero"))
                continue
            if value <= 0:
                dropped.append((s, "nonpositive estimate"))
                continue
        else:
            if value < EXACT_MOMENT_FLOOR:
                # exact pipelines never approach zero under correctable
                # noise, so a vanishing moment is an error, not a clamp
                raise NonPositiveMomentError(
                    f"exact moment of {s} is {value}; the solver needs moments "
                    f"above {EXACT_MOMENT_FLOOR:g}"
                )
        rows.append((red.x, red.z, red.bits))
        logs.append(math.log(value))
        if empirical:
            if err == 0:
                err = err_floor
                warnings.append(f"zero stderr for {s}; floored to {err_floor:g}")
            weights.append(value * value / (err * err))
        else:
            weights.append(1.0)
    if masks is None or not rows:
        a = np.zeros((len(rows), len(gp)))
    else:
        xs, zs, bs = _rows_to_arrays(rows)
        a = _design_block(xs, zs, bs, masks)
    return a, np.array(logs), np.array(weights), dropped, warnings


class _SolvedSystem:
    """Weighted-least-squares solution with pseudo-inverse evaluation."""

    def __init__(self, a: np.ndarray, b: np.ndarray, w: np.ndarray, use_cg: bool):
        self.a = a
        self.w = w
        self.n_cols = a.shape[1]
        self.use_cg = use_cg and self.n_cols > 0
        rhs = a.T @ (w * b) if a.size else np.zeros(self.n_cols)
        if not self.use_cg:
            g = (a * w[:, None]).T @ a if a.size else np.zeros((self.n_cols,) * 2)
            vals, vecs = (
                scipy.linalg.eigh(g) if self.n_cols else (np.zeros(0), np.zeros((0, 0)))
            )
            top = vals[-1] if len(vals) else 0.0
            keep = vals > max(top, 0.0) * _eig_tol(self.n_cols)
            self.vals = vals[keep]
            self.vecs = vecs[:, keep]
            self.x = self.vecs @ ((self.vecs.T @ rhs) / self.vals) if keep.any() else np.zeros(self.n_cols)
        else:
            self.op = scipy.sparse.linalg.LinearOperator(
                (self.n_cols, self.n_cols),
                matvec=lambda v: self.a.T @ (self.w * (self.a @ v)),
            )
            self.rhs = rhs
            self.x = self._cg(rhs)

    def _cg(self, rhs: np.ndarray) -> np.ndarray:
        if not np.any(rhs):
            return np.zeros(self.n_cols)
        x, info = scipy.sparse.linalg.cg(
            self.op, rhs, rtol=CG_RESIDUAL, atol=0.0, maxiter=10 * self.n_cols
        )
        if info != 0:
            raise NotIdentifiableError(
                "conjugate-gradient solve did not converge; the system is "
                "rank-deficient for the requested quantity"
            )
        return x

    def in_rowspace(self, d: np.ndarray) -> bool:
        norm = float(d @ d)
        if norm == 0.0:
            return True
        if not self.use_cg:
            proj = self.vecs @ (self.vecs.T @ d) if self.vecs.size else np.zeros_like(d)
            resid = d - proj
            return float(resid @ resid) <= ROWSPACE_RTOL * norm
        try:
            y = self._cg(d)
        except NotIdentifiableError:
            return False
        resid = self.op @ y - d
        return float(resid @ resid) <= ROWSPACE_RTOL * norm

    def predict(self, d: np.ndarray) -> float:
        return float(d @ self.x)

    def log_variance(self, d: np.ndarray) -> float:
        if not np.any(d):
            return 0.0
        if not self.use_cg:
            if not self.vecs.size:
                return 0.0
            proj = self.vecs.T @ d
            return float(proj @ (proj / self.vals))
        return float(d @ self._cg(d))


def estimate_logical_moments(
    e_meas: MomentTable,
    code: CodeGroups,
    model: NoiseModel,
    targets: Sequence[GroupElement],
    drop_sigma: float = 4.0,
    cg_column_threshold: int = CG_COLUMN_THRESHOLD,
) -> EstimationResult:
    """Solve the measured log-moment system and evaluate logical targets.

    Targets must lie in the logical group. A target whose design row is not in
    the measured row space is not determined by the data; that raises
    ``NotIdentifiableError`` naming the element.
    """
    for t in targets:
        if not in_span(code.logical, t):
            raise ValueError(
                f"target {element_to_string(t)} is not a logical operator"
            )
    for s in e_meas.entries:
        if not in_span(code.meas, s):
            raise ValueError(
                f"moment key {element_to_string(s)} is not in the measured group"
            )
    rp = reduce_problem(code, model)
    gp = gamma_prime(rp.model)
    a, logs, weights, dropped, warnings = _prepare_rows(e_meas, rp, gp, drop_sigma)
    use_cg = len(gp) > cg_column_threshold
    system = _SolvedSystem(a, logs, weights, use_cg)

    empirical = e_meas.tag == "empirical"
    masks = _column_masks(gp, rp.code.ambient) if len(gp) else None
    entries: dict[GroupElement, float] = {}
    stderr: dict[GroupElement, float] = {}
    log_vars: dict[GroupElement, float] = {}
    for t in targets:
        red = rp.character_image(t) if not rp.identity else t
        if masks is None:
            d = np.zeros(0)
        else:
            xs, zs, bs = _rows_to_arrays([(red.x, red.z, red.bits)])
            d = _design_block(xs, zs, bs, masks)[0]
        if not system.in_rowspace(d):
            raise NotIdentifiableError(
                f"logical moment of {element_to_string(t)} is not determined "
                "by the measured moments (rank deficiency)"
            )
        value = math.exp(system.predict(d))
        entries[t] = value
        if empirical:
            lv = system.log_variance(d)
            log_vars[t] = lv
            stderr[t] = value * math.sqrt(max(lv, 0.0))
    table = MomentTable(
        entries=entries,
        tag="empirical" if empirical else "exact",
        stderr=stderr if empirical else None,
    )
    return EstimationResult(
        moments=table,
        dropped=dropped,
        warnings=warnings,
        log_variances=log_vars if empirical else None,
    )


def solve_logical_moments(
    e_meas: MomentTable,
    code: CodeGroups,
    model: NoiseModel,
    targets: Sequence[GroupElement],
    **kwargs,
) -> MomentTable:
    return estimate_logical_moments(e_meas, code, model, targets, **kwargs).moments


def exact_measured_moments(
    code: CodeGroups, model: NoiseModel, row_cap: int = DEFAULT_ROW_CAP
) -> MomentTable:
    """Exact moments of every measured-group element (ground-truth input mode)."""
    if (1 << code.meas.rank) > row_cap:
        raise CapExceededError(
            f"measured group has 2^{code.meas.rank} elements, above the row cap"
        )
    entries = {}
    for s in enumerate_group(code.meas, cap=ENUMERATION_CAP):
        entries[s] = exact_moment(model, s)
    return MomentTable(entries=entries, tag="exact")


def logical_channel_probabilities(
    e_logical: MomentTable, code: CodeGroups, queries: Sequence[GroupElement]
):
    """Logical-channel values at the query points from a full logical moment
    table: inverse transform using 0 for moments outside the logical group."""
    if code.logical.rank > ENUMERATION_CAP:
        raise CapExceededError(
            f"logical group rank {code.logical.rank} exceeds the enumeration cap"
        )
    elems = list(enumerate_group(code.logical))
    missing = [l for l in elems if l not in e_logical.entries]
    if missing:
        raise ValueError(
            f"logical moment table is missing {len(missing)} elements, e.g. "
            f"{element_to_string(missing[0])}"
        )
    size = 1 << (2 * code.n_pauli + code.n_bits)
    entries = {}
    for q in queries:
        total = math.fsum(bicharacter(l, q) * e_logical.entries[l] for l in elems)
        entries[q] = total / size
    return DistributionTable(entries=entries, n_pauli=code.n_pauli, n_bits=code.n_bits)


# --------------------------------------------------------------------------
# Data-syndrome support.


def adjusted_data_syndrome_model(model: NoiseModel) -> NoiseModel:
    """Noise model of the paired-round data: the measurement-error marginal is
    convolved on top of the single-round model, because relative syndromes
    over disjoint round pairs see the new data error together with the XOR of
    two independent measurement-error draws."""
    extra = []
    for ch in model.channels:
        marg: dict[GroupElement, float] = {}
        for key, p in ch.probs.items():
            bit_part = GroupElement(ch.n_pauli, ch.n_bits, 0, 0, key.bits)
            marg[bit_part] = marg.get(bit_part, 0.0) + p
        if any((not k.is_identity) and p > 0 for k, p in marg.items()):
            sites = tuple(s for s in ch.sites if s >= ch.n_pauli)
            extra.append(
                LocalChannel(
                    sites=sites, probs=marg, n_pauli=ch.n_pauli, n_bits=ch.n_bits
                )
            )
    return NoiseModel(
        channels=model.channels + tuple(extra),
        n_pauli=model.n_pauli,
        n_bits=model.n_bits,
    )


def ds_postprocess(e_adj: MomentTable, code: CodeGroups) -> MomentTable:
    """Recover single-round moments from paired-round (adjusted) moments.

    Paired rounds square the measurement-error marginal, so the adjusted
    moment factors as the single-round moment times the bit-marginal moment,
    and the bit-marginal at a pure-bit element is the square root of the
    adjusted value there. Targets with a trivial bit part pass through
    unchanged. The normalization constant is exactly one in the probability
    convention used throughout; tests pin this against the two-round oracle.

    Standard errors for pure-bit targets use the exact square-root delta
    rule; for mixed targets the estimate/normalizer covariance is ignored,
    which errs on the conservative side.
    """
    if code.kind != "data-syndrome":
        raise ValueError("post-processing applies to data-syndrome codes only")
    entries = {}
    stderr = {} if e_adj.stderr is not None else None
    for l, v in e_adj.entries.items():
        if l.bits == 0:
            entries[l] = v
            if stderr is not None:
                stderr[l] = e_adj.stderr_of(l)
            continue
        norm_key = GroupElement(l.n_pauli, l.n_bits, 0, 0, l.bits)
        if norm_key not in e_adj.entries:
            raise ValueError(
                f"adjusted table is missing the bit-marginal moment {norm_key}"
            )
        v0 = e_adj.entries[norm_key]
        if v0 <= 0:
            raise NonPositiveMomentError(
                f"bit-marginal moment {norm_key} is {v0}; cannot normalize"
            )
        if l.x == 0 and l.z == 0:
            value = math.sqrt(v0)
            entries[l] = value
            if stderr is not None:
                s0 = e_adj.stderr_of(l)
                stderr[l] = 0.5 * value * (s0 / v0)
        else:
            value = v / math.sqrt(v0)
            entries[l] = value
            if stderr is not None:
                sv = e_adj.stderr_of(l)
                s0 = e_adj.stderr_of(norm_key)
                rel = math.sqrt((sv / v) ** 2 + 0.25 * (s0 / v0) ** 2) if v != 0 else 0.0
                stderr[l] = abs(value) * rel
    return MomentTable(entries=entries, tag=e_adj.tag, stderr=stderr)


# --------------------------------------------------------------------------
# Counting identity behind the rank argument.


@dataclass(frozen=True)
class CleaningCounts:
    count_meas: int
    count_logical: int
    ratio: Optional[float]


def cleaning_count_check(
    code: CodeGroups, a: GroupElement, b: GroupElement, cap: int = ENUMERATION_CAP
) -> CleaningCounts:
    """Exact counts of measured/logical elements containing both ``a`` and
    ``b`` as substrings. When the union of supports is a correctable region,
    the ratio equals the logical-to-measured group-size ratio exactly."""
    if code.logical.rank > cap:
        raise CapExceededError("logical group too large to enumerate")
    cm = sum(
        1
        for s in enumerate_group(code.meas, cap=cap)
        if is_substring(a, s) and is_substring(b, s)
    )
    cl = sum(
        1
        for l in enumerate_group(code.logical, cap=cap)
        if is_substring(a, l) and is_substring(b, l)
    )
    return CleaningCounts(
        count_meas=cm,
        count_logical=cl,
        ratio=(cl / cm) if cm else None,
    )
