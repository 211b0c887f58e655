"""Scikit-learn style front end: fit on syndrome outcome rows, read off the
logical noise estimate.

The estimator wraps the identifiability check, the log-linear solver and the
data-syndrome post-processing behind the usual ``fit`` / fitted-attribute
protocol, so it composes with scikit-learn tooling (``get_params``,
``set_params`` and ``clone`` all work).
"""

from __future__ import annotations

import inspect
from typing import Sequence

import numpy as np

from ._validation import check_matching_ambient, check_syndrome_matrix
from .codes import CodeGroups, coset_transversal
from .errors import CapExceededError
from .estimation import (
    DEFAULT_ROW_CAP,
    adjusted_data_syndrome_model,
    ds_postprocess,
    estimate_logical_moments,
    exact_measured_moments,
    identifiability_check,
)
from .noise import NoiseModel
from .pauli import GroupElement, enumerate_group, parse_element
from .simulate import SyndromeDataset, empirical_moments

EMPIRICAL_ROW_CAP = 1 << 16


class ParamsMixin:
    """Minimal get_params/set_params, compatible with sklearn.clone."""

    @classmethod
    def _param_names(cls):
        sig = inspect.signature(cls.__init__)
        return [p for p in sig.parameters if p != "self"]

    def get_params(self, deep: bool = True):
        return {name: getattr(self, name) for name in self._param_names()}

    def set_params(self, **params):
        valid = set(self._param_names())
        for key, value in params.items():
            if key not in valid:
                raise ValueError(f"invalid parameter {key!r} for {type(self).__name__}")
            setattr(self, key, value)
        return self


class LogicalNoiseEstimator(ParamsMixin):
    """Estimate logical moments of a Pauli noise model from syndrome rows.

    Parameters
    ----------
    code:
        The code whose generators produced the syndrome columns.
    model:
        Factorized noise model; supplies the support structure (and, for
        ``fit_exact``, the ground-truth moments).
    targets:
        "cosets" for minimum-weight logical coset representatives, "all" for
        the full logical group, or an explicit list of elements / strings.
    drop_sigma:
        Empirical moments closer to zero than this many standard errors are
        dropped from the system (their logarithms are unstable).
    row_cap:
        Largest measured-group enumeration used for rank checks and solves.

    After fitting: ``identifiable_``, ``rank_meas_``, ``rank_logical_``,
    ``logical_moments_`` (element -> value), ``moment_stderr_``,
    ``targets_``, ``warnings_``, ``report_``.
    """

    def __init__(
        self,
        code: CodeGroups,
        model: NoiseModel,
        targets="cosets",
        drop_sigma: float = 4.0,
        row_cap: int = DEFAULT_ROW_CAP,
    ):
        self.code = code
        self.model = model
        self.targets = targets
        self.drop_sigma = drop_sigma
        self.row_cap = row_cap

    # -- fitting ------------------------------------------------------

    def fit(self, X, y=None):
        """Fit from syndrome outcome rows (0 = outcome +1, 1 = outcome -1).

        Rows must be i.i.d. samples as produced by ``simulate.run_rounds``:
        one row per round, or one row per consecutive round pair for
        data-syndrome codes.
        """
        bits = check_syndrome_matrix(X, len(self.code.meas_generators))
        dataset = SyndromeDataset.from_bits(bits)
        if (1 << self.code.meas.rank) > EMPIRICAL_ROW_CAP:
            raise CapExceededError(
                "measured group too large to estimate every product moment"
            )
        elements = list(enumerate_group(self.code.meas))
        table = empirical_moments(dataset, self.code, elements)
        return self._finish(table)

    def fit_exact(self):
        """Fit from exact model moments instead of data (validation mode)."""
        table = exact_measured_moments(
            self.code, self._solve_model(), row_cap=self.row_cap
        )
        return self._finish(table)

    def _solve_model(self) -> NoiseModel:
        if self.code.kind == "data-syndrome":
            return adjusted_data_syndrome_model(self.model)
        return self.model

    def _resolve_targets(self) -> list[GroupElement]:
        if isinstance(self.targets, str):
            if self.targets == "cosets":
                return coset_transversal(self.code.logical, self.code.meas)
            if self.targets == "all":
                return list(enumerate_group(self.code.logical))
            raise ValueError(f"unknown target specification {self.targets!r}")
        out = []
        for t in self.targets:
            out.append(parse_element(t, self.code.ambient) if isinstance(t, str) else t)
        return out

    def _finish(self, table):
        check_matching_ambient(self.code, self.model)
        solve_model = self._solve_model()
        report = identifiability_check(self.code, solve_model, row_cap=self.row_cap)
        self.report_ = report
        self.identifiable_ = report.identifiable
        self.rank_meas_ = report.rank_meas
        self.rank_logical_ = report.rank_logical
        self.targets_ = self._resolve_targets()
        result = estimate_logical_moments(
            table, self.code, solve_model, self.targets_, drop_sigma=self.drop_sigma
        )
        moments = result.moments
        if self.code.kind == "data-syndrome":
            moments = ds_postprocess(moments, self.code)
        self.logical_moments_ = dict(moments.entries)
        self.moment_stderr_ = (
            dict(moments.stderr) if moments.stderr is not None else None
        )
        self.warnings_ = list(result.warnings) + [
            f"dropped {t}: {why}" for t, why in result.dropped
        ]
        return self

    # -- readout ------------------------------------------------------

    def predict_moments(self, elements: Sequence) -> np.ndarray:
        """Fitted moments for the given logical elements (fit targets only)."""
        if not hasattr(self, "logical_moments_"):
            raise RuntimeError("estimator is not fitted")
        out = []
        for e in elements:
            key = parse_element(e, self.code.ambient) if isinstance(e, str) else e
            out.append(self.logical_moments_[key])
        return np.array(out)
