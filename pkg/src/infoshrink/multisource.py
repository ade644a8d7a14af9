"""Concatenating several source data sets and choosing among configurations.

With M sources available one can dial in information from any single source,
from the column-concatenation of all of them, or from none.  Each nonempty
configuration is scored by the minimized plug-in risk of its dialed estimator;
the empty configuration scores the risk of the target-only MLE.  The winner is
the configuration with the smallest score.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from ._linalg import spd_inverse
from .data import Dataset, SourceSummary
from .dial import DEFAULT_BRACKET, select_lambda_gaussian, select_lambda_glm
from .errors import DimensionMismatchError, ShrinkageError, TooManySourcesError, ValidationError
from .families import GAUSSIAN, get_family
from .glm import MleFit, fit_mle, summarize_source, weighted_info

MODE_SINGLES_AND_FULL = "SinglesAndFull"
MODE_ALL_SUBSETS = "AllSubsets"
ALL_SUBSETS_MAX = 10

POST_SELECTION_WARNING = (
    "Configuration selection reuses the data; reported intervals are conditional "
    "on the chosen source configuration and do not account for the selection step."
)


@dataclass(frozen=True)
class SourceConfig:
    """One candidate source configuration: a labeled subset of source indices."""

    id: str
    members: tuple
    assembled: SourceSummary | None = None

    @property
    def is_empty(self):
        return len(self.members) == 0


def _config_label(members):
    if not members:
        return "none"
    return "+".join(f"S{j + 1}" for j in members)


def concat_sources(sources) -> Dataset:
    """Column-concatenate designs and append responses of several data sets."""
    sources = list(sources)
    if not sources:
        raise ValidationError("need at least one data set to concatenate")
    p = sources[0].p
    for k, ds in enumerate(sources):
        if ds.p != p:
            raise DimensionMismatchError(
                f"data set {k} has {ds.p} coefficients, expected {p}"
            )
    if len(sources) == 1:
        return sources[0]
    design = np.hstack([ds.design for ds in sources])
    response = np.concatenate([ds.response for ds in sources])
    return Dataset(design, response)


def enumerate_configs(M, mode=MODE_SINGLES_AND_FULL):
    """List candidate source configurations for M available sources.

    SinglesAndFull yields each single source, the full concatenation, and the
    empty (target-only) configuration; AllSubsets yields every subset.  Order
    is deterministic: by subset size then index, with the empty configuration
    last.
    """
    M = int(M)
    if M < 1:
        raise ValidationError(f"need at least one source, got M={M}")
    if mode == MODE_SINGLES_AND_FULL:
        members_list = [(j,) for j in range(M)]
        if M > 1:
            members_list.append(tuple(range(M)))
    elif mode == MODE_ALL_SUBSETS:
        if M > ALL_SUBSETS_MAX:
            raise TooManySourcesError(
                f"AllSubsets enumerates 2^M configurations; M={M} exceeds the cap of {ALL_SUBSETS_MAX}"
            )
        members_list = [
            combo
            for size in range(1, M + 1)
            for combo in itertools.combinations(range(M), size)
        ]
    else:
        raise ValidationError(f"unknown enumeration mode {mode!r}")
    members_list.append(())
    return [SourceConfig(_config_label(m), m) for m in members_list]


def target_only_risk(family, target: Dataset, target_fit: MleFit):
    """Estimated risk of the plain target MLE, on the scale of the family's curve."""
    family = get_family(family)
    if family is GAUSSIAN:
        return (
            target_fit.gamma_hat
            / target_fit.n
            * float(np.trace(spd_inverse(target_fit.gram)))
        )
    V2 = weighted_info(family, target, target_fit.beta_hat)
    return family.dispersion(target_fit.gamma_hat) * float(np.trace(spd_inverse(V2)))


def score_config(family, target: Dataset, target_fit: MleFit, summary,
                 bracket=DEFAULT_BRACKET):
    """Dial and minimized estimated risk for one assembled source.

    summary=None scores the target-only configuration (dial pinned at zero).
    Returns (lambda_tilde, risk, curve) where the risk includes lambda=0 in
    the feasible set.
    """
    family = get_family(family)
    if summary is None:
        return 0.0, target_only_risk(family, target, target_fit), None
    if family is GAUSSIAN:
        lam, curve = select_lambda_gaussian(target_fit, summary, bracket)
    else:
        lam, curve = select_lambda_glm(family, target, target_fit, summary, bracket)
    return lam, min(curve.mse_at_tilde, curve.at_zero), curve


def select_source_config(family, target: Dataset, sources, mode=MODE_SINGLES_AND_FULL,
                         bracket=DEFAULT_BRACKET, target_fit=None):
    """Score every configuration and pick the one with smallest estimated risk.

    Returns (best_config, report).  The report maps "configs" to one row per
    configuration — label, members, n1, lambda_tilde, estimated risk, and any
    per-configuration error — and "warning" to a post-selection caveat.
    Configurations are scored independently; a failing one is recorded and
    skipped rather than aborting the selection.
    """
    family = get_family(family)
    sources = list(sources)
    for k, ds in enumerate(sources):
        if ds.p != target.p:
            raise DimensionMismatchError(
                f"source {k} has {ds.p} coefficients but the target has {target.p}"
            )
    configs = enumerate_configs(len(sources), mode)
    if target_fit is None:
        target_fit = fit_mle(family, target)

    rows = []
    best = None
    best_risk = np.inf
    for config in configs:
        row = {
            "label": config.id,
            "members": list(config.members),
            "n1": None,
            "lambda_tilde": None,
            "estimated_mse": None,
            "error": None,
        }
        try:
            if config.is_empty:
                summary = None
            else:
                data = concat_sources([sources[j] for j in config.members])
                summary, _ = summarize_source(family, data)
                row["n1"] = data.n
                config = SourceConfig(config.id, config.members, summary)
            lam, risk, _ = score_config(family, target, target_fit, summary, bracket)
            row["lambda_tilde"] = lam
            row["estimated_mse"] = risk
        except ShrinkageError as exc:
            row["error"] = f"{exc.code}: {exc}"
            rows.append(row)
            continue
        rows.append(row)
        if risk < best_risk:
            best, best_risk = config, risk
    if best is None:
        raise ShrinkageError("every source configuration failed to assemble or score")
    return best, {"configs": rows, "warning": POST_SELECTION_WARNING}
