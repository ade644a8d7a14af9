"""Deterministic replication harness for the built-in simulation studies.

Seven study designs are built in.  Settings I and IV are Gaussian targets with
an 11-coefficient model; II and III are logistic; the three Multi settings
draw one target and three candidate Gaussian sources.  For each design the
source data are drawn once per cell and held fixed while the target data are
redrawn per replicate, and squared error, dial values, and interval coverage
are aggregated across replicates.

Reproducibility contract: every data set is generated from a counter-based
generator (Philox) keyed by a structured seed tuple

    (master_seed, setting_tag, stream, *cell_labels[, replicate])

where stream 0 is the source draw and stream 1 the target draw.  Replicate r
always uses the tuple ending in r, so extending the replicate count leaves
earlier replicates' records unchanged, and reruns are byte-identical.  All
normal/Cauchy variates are produced by inverse-CDF transforms of open-interval
uniforms built from 53-bit integers, which keeps streams identical across
platforms.  Within one data set the draw order is: feature block (unit-major),
then any auxiliary variables, then response noise.
"""

from __future__ import annotations

import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

from .baselines import chen_owen_shi, chen_owen_shi_lambda_hat, zheng_weight_estimator
from .data import Dataset, SourceSummary
from .dial import DEFAULT_BRACKET, gaussian_mse_curve, glm_amse_curve, select_lambda
from .errors import ShrinkageError, ValidationError
from .families import BERNOULLI, GAUSSIAN, get_family
from .glm import fit_mle, summarize_source
from .inference import confidence_intervals, wald_intervals
from .multisource import concat_sources, enumerate_configs, score_config
from .shrink import solve_dial_estimate

SETTINGS = ("I", "II", "III", "IV", "MultiI", "MultiII", "MultiIII")
_SETTING_TAG = {"I": 1, "II": 2, "III": 3, "IV": 4, "MultiI": 5, "MultiII": 6, "MultiIII": 7}
_STREAM_SOURCE, _STREAM_TARGET = 0, 1
# the three Multi settings share one target stream tag: their target-only rows coincide
_MULTI_TARGET_TAG = 5

DEFAULT_MASTER_SEED = 20260825
CI_LEVEL = 0.95
MAX_FAILURE_FRACTION = 0.01

_BETA1_I = np.array([1.0, -1.8, 2.6, 1.4, -3.6, 3.5, 2.4, -3.3, 1.8, -3.4, 2.8])
_DELTA_I = np.array([0.2, 0.1, 0.2, -0.1, 0.1, -0.1, 0.2, 0.2, 0.2, -0.1, 0.1])
_DELTA_IV = np.array([0.0, 0.1, 0.0, -0.1, 0.1, -0.1, 0.0, 0.0, 0.0, -0.1, 0.1])
_BETA1_II = np.array([1.0, -1.8, -1.2, 1.6, 0.2])
_DELTA_II = np.array([0.0, 0.25, 0.0, -0.25, 0.25])
_BETA1_III = np.array([1.0, -0.5, 0.5])
_MULTI_BASE = np.array([1.0, -1.8, 2.6, 1.4])
_MULTI_SHIFTS = {
    "MultiI": ([0.25, 0, 0, 0], [0, 0.25, 0, 0], [0, 0, 1.0, 0]),
    "MultiII": ([0.25, 0, 0, 0], [0, 0.25, 0, 0], [0, 0, 0.25, 0]),
    "MultiIII": ([1.0, 0, 0, 0], [0, 1.0, 0, 0], [0, 0, 1.0, 0]),
}
_MULTI_TARGET_SHIFT = {
    "MultiI": [0, 0, 1.25, 0],
    "MultiII": [0, 0, 0, 0.25],
    "MultiIII": [0, 0, 0, 1.0],
}
_MULTI_N_SOURCE, _MULTI_N_TARGET = 100, 50

_IV_CASES = ("cauchy", "dropped_z", "x_squared")

_ESTIMATOR_MENU = {
    "I": ("ise", "mle", "pooled", "cos"),
    "II": ("ise", "mle", "pooled", "zheng"),
    "III": ("ise", "mle", "pooled"),
    "IV": ("ise", "mle", "pooled", "cos"),
}

_PAPER_SCALE = {"I": 100, "II": 10, "III": 1, "IV": 100,
                "MultiI": 100, "MultiII": 100, "MultiIII": 100}


# ---------------------------------------------------------------------------
# Random streams
# ---------------------------------------------------------------------------

def _stream(master_seed, *labels):
    entropy = (int(master_seed),) + tuple(int(v) for v in labels)
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy=entropy)))


def _uniforms(gen, size):
    # open-interval uniforms from 53-bit integers: stable inputs to inverse CDFs
    raw = gen.integers(0, 1 << 53, size=size, dtype=np.int64).astype(np.float64)
    return (raw + 0.5) * 2.0**-53


def _normals(gen, size):
    return ndtri(_uniforms(gen, size))


def _cauchys(gen, size):
    return np.tan(np.pi * (_uniforms(gen, size) - 0.5))


def _design_iid(gen, n, n_features, sd=1.0):
    z = _normals(gen, (n, n_features)) * sd
    return np.vstack([np.ones(n), z.T])


def _design_corr(gen, n, rho):
    z = _normals(gen, (n, 2))
    chol = np.linalg.cholesky(np.array([[1.0, rho], [rho, 1.0]]))
    return np.vstack([np.ones(n), (z @ chol.T).T])


def _gaussian_data(gen, design, beta):
    eta = design.T @ beta
    return Dataset(design, eta + _normals(gen, design.shape[1]))


def _bernoulli_data(gen, design, beta):
    pr = BERNOULLI.mean(design.T @ beta)
    y = (_uniforms(gen, design.shape[1]) < pr).astype(float)
    return Dataset(design, y)


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SimConfig:
    """A fully resolved simulation request; build one with validate_config."""

    setting: str
    cell: dict
    replicates: int
    master_seed: int = DEFAULT_MASTER_SEED
    lambda_bracket: tuple = DEFAULT_BRACKET
    estimators: tuple | None = None


def config_to_dict(config: SimConfig):
    """Canonical JSON-ready form of a config (used for provenance output)."""
    return {
        "setting": config.setting,
        "cell": dict(config.cell),
        "replicates": config.replicates,
        "master_seed": config.master_seed,
        "lambda_bracket": [config.lambda_bracket[0], config.lambda_bracket[1]],
        "estimators": list(config.estimators) if config.estimators is not None else None,
    }


def _require_int(obj, path, minimum=None, maximum=None):
    if isinstance(obj, bool) or not isinstance(obj, (int, np.integer)):
        raise ValidationError(f"{path}: must be an integer, got {obj!r}")
    value = int(obj)
    if minimum is not None and value < minimum:
        raise ValidationError(f"{path}: must be >= {minimum}, got {value}")
    if maximum is not None and value > maximum:
        raise ValidationError(f"{path}: must be <= {maximum}, got {value}")
    return value


def _check_cell_keys(cell, setting, allowed):
    for key in cell:
        if key not in allowed:
            raise ValidationError(f"cell.{key}: unknown parameter for setting {setting}")


def _validate_cell(setting, cell):
    if not isinstance(cell, dict):
        raise ValidationError("cell: must be an object of cell parameters")
    if setting == "I":
        _check_cell_keys(cell, setting, {"n1", "n2"})
        out = {}
        for key in ("n1", "n2"):
            if key not in cell:
                raise ValidationError(f"cell.{key}: required for setting I")
            out[key] = _require_int(cell[key], f"cell.{key}", minimum=12)
        return out
    if setting == "II":
        _check_cell_keys(cell, setting, {"delta", "scale", "n1", "n2"})
        if cell.get("delta") not in ("zero", "nonzero"):
            raise ValidationError("cell.delta: must be 'zero' or 'nonzero'")
        if cell.get("scale") not in ("small", "large"):
            raise ValidationError("cell.scale: must be 'small' or 'large'")
        return {
            "delta": cell["delta"],
            "scale": cell["scale"],
            "n1": _require_int(cell.get("n1", 500), "cell.n1", minimum=6),
            "n2": _require_int(cell.get("n2", 500), "cell.n2", minimum=6),
        }
    if setting == "III":
        _check_cell_keys(cell, setting, {"features", "shift", "n1", "n2"})
        if cell.get("features") not in ("independent", "correlated"):
            raise ValidationError("cell.features: must be 'independent' or 'correlated'")
        if "shift" not in cell:
            raise ValidationError("cell.shift: required for setting III")
        shift = float(cell["shift"])
        if not np.isfinite(shift) or shift < 0:
            raise ValidationError(f"cell.shift: must be a finite value >= 0, got {cell['shift']!r}")
        default_n2 = 500 if cell["features"] == "independent" else 100
        return {
            "features": cell["features"],
            "shift": shift,
            "n1": _require_int(cell.get("n1", 500), "cell.n1", minimum=4),
            "n2": _require_int(cell.get("n2", default_n2), "cell.n2", minimum=4),
        }
    if setting == "IV":
        _check_cell_keys(cell, setting, {"case", "n1", "n2"})
        if cell.get("case") not in _IV_CASES:
            raise ValidationError(f"cell.case: must be one of {sorted(_IV_CASES)}")
        return {
            "case": cell["case"],
            "n1": _require_int(cell.get("n1", 500), "cell.n1", minimum=12),
            "n2": _require_int(cell.get("n2", 500), "cell.n2", minimum=12),
        }
    # Multi settings: everything is fixed by the recipe
    _check_cell_keys(cell, setting, set())
    return {}


def validate_config(obj) -> SimConfig:
    """Validate a raw mapping (e.g. parsed JSON) into a SimConfig.

    Error messages carry the offending field path, e.g. "cell.n1: ...".
    """
    if isinstance(obj, SimConfig):
        obj = config_to_dict(obj)
    if not isinstance(obj, dict):
        raise ValidationError("config: must be a JSON object")
    allowed = {"setting", "cell", "replicates", "master_seed", "lambda_bracket", "estimators"}
    for key in obj:
        if key not in allowed:
            raise ValidationError(f"{key}: unknown config field")
    setting = obj.get("setting")
    if setting not in SETTINGS:
        raise ValidationError(f"setting: must be one of {list(SETTINGS)}, got {setting!r}")
    if "replicates" not in obj:
        raise ValidationError("replicates: required")
    replicates = _require_int(obj["replicates"], "replicates", minimum=1)
    master_seed = _require_int(obj.get("master_seed", DEFAULT_MASTER_SEED), "master_seed",
                               minimum=0, maximum=2**64 - 1)
    bracket = obj.get("lambda_bracket", list(DEFAULT_BRACKET))
    if (not isinstance(bracket, (list, tuple)) or len(bracket) != 2):
        raise ValidationError("lambda_bracket: must be a [lo, hi] pair")
    lo, hi = float(bracket[0]), float(bracket[1])
    if not (np.isfinite(lo) and np.isfinite(hi) and 0.0 <= lo < hi):
        raise ValidationError(f"lambda_bracket: needs 0 <= lo < hi, got {bracket!r}")
    cell = _validate_cell(setting, obj.get("cell", {}))

    estimators = obj.get("estimators")
    if estimators is not None:
        if setting not in _ESTIMATOR_MENU:
            raise ValidationError(
                f"estimators: setting {setting} evaluates its source configurations; "
                "the estimator list is not configurable"
            )
        if not isinstance(estimators, (list, tuple)) or not estimators:
            raise ValidationError("estimators: must be a nonempty list of labels")
        menu = _ESTIMATOR_MENU[setting]
        for label in estimators:
            if label not in menu:
                raise ValidationError(
                    f"estimators: {label!r} is not available in setting {setting} "
                    f"(choose from {list(menu)})"
                )
        estimators = tuple(label for label in menu if label in set(estimators))
    return SimConfig(setting, cell, replicates, master_seed, (lo, hi), estimators)


# ---------------------------------------------------------------------------
# Cell construction
# ---------------------------------------------------------------------------

class _Cell:
    """Everything fixed across replicates of one simulation cell."""

    def __init__(self, family, estimators, beta_true, coverage_idx, draw_target,
                 source_data=None, summary=None, source_fit=None, configs=None,
                 beta1_true=None):
        self.family = family
        self.estimators = estimators
        self.beta_true = beta_true
        self.coverage_idx = coverage_idx
        self.draw_target = draw_target
        self.source_data = source_data
        self.summary = summary
        self.source_fit = source_fit
        self.configs = configs  # list of (label, summary-or-None) for Multi settings
        self.beta1_true = beta1_true

    @property
    def is_multi(self):
        return self.configs is not None


def _draw_source_I(gen, n1):
    return _gaussian_data(gen, _design_iid(gen, n1, 10), _BETA1_I), _BETA1_I


def _draw_source_II(gen, n1, sd):
    return _bernoulli_data(gen, _design_iid(gen, n1, 4, sd=sd), _BETA1_II), _BETA1_II


def _draw_source_III(gen, n1, features):
    if features == "independent":
        design = _design_iid(gen, n1, 2, sd=2.0)
    else:
        design = _design_corr(gen, n1, 0.4)
    return _bernoulli_data(gen, design, _BETA1_III), _BETA1_III


def _draw_source_IV(gen, n1, case):
    design = _design_iid(gen, n1, 10)
    if case == "cauchy":
        y = design.T @ _BETA1_I + _cauchys(gen, n1)
    elif case == "dropped_z":
        confounder = _normals(gen, n1)
        y = design.T @ _BETA1_I + confounder + _normals(gen, n1)
    else:  # x_squared: the source mean is linear in the squared features
        y = (design * design).T @ _BETA1_I + _normals(gen, n1)
    return Dataset(design, y), _BETA1_I


def _draw_source_multi(gen, shift):
    beta = _MULTI_BASE + np.asarray(shift, dtype=float)
    return _gaussian_data(gen, _design_iid(gen, _MULTI_N_SOURCE, 3), beta), beta


def generate_source(config: SimConfig, rng_stream=None):
    """Draw the fixed source data for a config's cell.

    Returns (data, beta1_true); Multi settings return a list of data sets and
    the list of their true coefficient vectors.  When rng_stream (a numpy
    Generator) is given it replaces the canonical derived stream, which is
    mainly useful for exercising the recipes directly.
    """
    config = validate_config(config)
    setting, cell, master = config.setting, config.cell, config.master_seed
    tag = _SETTING_TAG[setting]
    if setting == "I":
        gen = rng_stream or _stream(master, tag, _STREAM_SOURCE, cell["n1"])
        return _draw_source_I(gen, cell["n1"])
    if setting == "II":
        sflag = 0 if cell["scale"] == "small" else 1
        gen = rng_stream or _stream(master, tag, _STREAM_SOURCE, sflag, cell["n1"])
        return _draw_source_II(gen, cell["n1"], 0.75 if cell["scale"] == "small" else 3.0)
    if setting == "III":
        vflag = 0 if cell["features"] == "independent" else 1
        gen = rng_stream or _stream(master, tag, _STREAM_SOURCE, vflag, cell["n1"])
        return _draw_source_III(gen, cell["n1"], cell["features"])
    if setting == "IV":
        cid = _IV_CASES.index(cell["case"])
        gen = rng_stream or _stream(master, tag, _STREAM_SOURCE, cid, cell["n1"])
        return _draw_source_IV(gen, cell["n1"], cell["case"])
    datasets, betas = [], []
    for j, shift in enumerate(_MULTI_SHIFTS[setting]):
        gen = rng_stream or _stream(master, tag, _STREAM_SOURCE, j)
        data, beta = _draw_source_multi(gen, shift)
        datasets.append(data)
        betas.append(beta)
    return datasets, betas


def _build_cell(config: SimConfig) -> _Cell:
    setting, cell, master = config.setting, config.cell, config.master_seed
    tag = _SETTING_TAG[setting]
    estimators = config.estimators or _ESTIMATOR_MENU.get(setting)

    if setting in ("I", "IV"):
        source_data, beta1 = generate_source(config)
        summary, source_fit = summarize_source(GAUSSIAN, source_data)
        if setting == "I":
            beta2 = source_fit.beta_hat + _DELTA_I
        else:
            beta2 = _BETA1_I + _DELTA_IV  # defined from the true coefficients
        n2 = cell["n2"]

        def draw_target(rep):
            # the stream omits the source-side cell labels (n1, misspecification
            # case), so cells differing only there see identical target draws
            gen = _stream(master, tag, _STREAM_TARGET, n2, rep)
            return _gaussian_data(gen, _design_iid(gen, n2, 10), beta2)

        return _Cell(GAUSSIAN, estimators, beta2, np.arange(11), draw_target,
                     source_data, summary, source_fit, beta1_true=beta1)

    if setting == "II":
        source_data, beta1 = generate_source(config)
        summary, source_fit = summarize_source(BERNOULLI, source_data)
        shift = _DELTA_II if cell["delta"] == "nonzero" else np.zeros(5)
        beta2 = source_fit.beta_hat + shift
        sflag = 0 if cell["scale"] == "small" else 1
        sd = 0.75 if cell["scale"] == "small" else 3.0
        n2 = cell["n2"]

        def draw_target(rep):
            # stream ignores the delta cell: both delta cells on one design
            # scale see the same draws.  Source and target features share the
            # cell's scale, so the scale moves the information in both data
            # sets at once.
            gen = _stream(master, tag, _STREAM_TARGET, sflag, n2, rep)
            return _bernoulli_data(gen, _design_iid(gen, n2, 4, sd=sd), beta2)

        return _Cell(BERNOULLI, estimators, beta2, np.arange(5), draw_target,
                     source_data, summary, source_fit, beta1_true=beta1)

    if setting == "III":
        source_data, beta1 = generate_source(config)
        summary, source_fit = summarize_source(BERNOULLI, source_data)
        beta2 = source_fit.beta_hat + np.array([0.0, cell["shift"], 0.0])
        vflag = 0 if cell["features"] == "independent" else 1
        features, n2 = cell["features"], cell["n2"]

        def draw_target(rep):
            # stream ignores the shift cell: all shift cells see the same draws
            gen = _stream(master, tag, _STREAM_TARGET, vflag, n2, rep)
            if features == "independent":
                design = _design_iid(gen, n2, 2)
            else:
                design = _design_corr(gen, n2, 0.4)
            return _bernoulli_data(gen, design, beta2)

        return _Cell(BERNOULLI, estimators, beta2, np.arange(3), draw_target,
                     source_data, summary, source_fit, beta1_true=beta1)

    # Multi settings
    datasets, betas = generate_source(config)
    beta_target = _MULTI_BASE + np.asarray(_MULTI_TARGET_SHIFT[setting], dtype=float)
    configs = []
    for cfg in enumerate_configs(len(datasets)):
        if cfg.is_empty:
            configs.append((cfg.id, None))
        else:
            data = concat_sources([datasets[j] for j in cfg.members])
            configs.append((cfg.id, summarize_source(GAUSSIAN, data)[0]))

    def draw_target(rep):
        gen = _stream(master, _MULTI_TARGET_TAG, _STREAM_TARGET, rep)
        return _gaussian_data(gen, _design_iid(gen, _MULTI_N_TARGET, 3), beta_target)

    return _Cell(GAUSSIAN, tuple(label for label, _ in configs), beta_target, None,
                 draw_target, source_data=datasets, configs=configs, beta1_true=betas)


# ---------------------------------------------------------------------------
# Replicate evaluation
# ---------------------------------------------------------------------------

def _covered(intervals, truth):
    return ((intervals.lower <= truth) & (truth <= intervals.upper)).astype(float)


def _evaluate_standard(cell: _Cell, rep, bracket):
    target = cell.draw_target(rep)
    family = cell.family
    truth = cell.beta_true
    fit2 = fit_mle(family, target)
    wald = wald_intervals(fit2, CI_LEVEL)
    records = {}
    for label in cell.estimators:
        try:
            if label == "mle":
                sq = float(np.sum((fit2.beta_hat - truth) ** 2))
                records[label] = (sq, np.nan, _covered(wald, truth), np.nan, np.nan)
            elif label == "ise":
                if family is GAUSSIAN:
                    curve = gaussian_mse_curve(fit2, cell.summary)
                else:
                    curve = glm_amse_curve(family, target, fit2, cell.summary)
                lam, info = select_lambda(curve, bracket)
                estimate = solve_dial_estimate(family, target, cell.summary, lam,
                                               target_fit=fit2)
                ci = confidence_intervals(estimate, CI_LEVEL)
                hw_ok = float(np.all(ci.se <= wald.se * (1.0 + 1e-12)))
                sq = float(np.sum((estimate.beta_tilde - truth) ** 2))
                records[label] = (sq, lam, _covered(ci, truth), hw_ok,
                                  min(info.mse_at_tilde, info.at_zero))
            elif label == "pooled":
                pooled_fit = fit_mle(family, concat_sources([target, cell.source_data]))
                pooled_ci = wald_intervals(pooled_fit, CI_LEVEL)
                sq = float(np.sum((pooled_fit.beta_hat - truth) ** 2))
                records[label] = (sq, np.nan, _covered(pooled_ci, truth), np.nan, np.nan)
            elif label == "cos":
                lam_hat = chen_owen_shi_lambda_hat(fit2, cell.summary, bracket)
                beta = chen_owen_shi(fit2, cell.summary, lam_hat)
                sq = float(np.sum((beta - truth) ** 2))
                records[label] = (sq, lam_hat, None, np.nan, np.nan)
            elif label == "zheng":
                beta = zheng_weight_estimator(fit2, cell.source_fit)
                sq = float(np.sum((beta - truth) ** 2))
                records[label] = (sq, np.nan, None, np.nan, np.nan)
            else:  # pragma: no cover - guarded by validate_config
                raise ValidationError(f"unknown estimator label {label!r}")
        except ShrinkageError as exc:
            records[label] = exc
    return records


def _evaluate_multi(cell: _Cell, rep, bracket):
    target = cell.draw_target(rep)
    truth = cell.beta_true
    fit_t = fit_mle(GAUSSIAN, target)
    records = {}
    for label, summary in cell.configs:
        try:
            lam, risk, _ = score_config(GAUSSIAN, target, fit_t, summary, bracket)
            if summary is None:
                beta = fit_t.beta_hat
            else:
                beta = solve_dial_estimate(GAUSSIAN, target, summary, lam,
                                           target_fit=fit_t).beta_tilde
            sq = float(np.sum((beta - truth) ** 2))
            records[label] = (sq, lam, None, np.nan, risk)
        except ShrinkageError as exc:
            records[label] = exc
    return records


def _run_chunk(config: SimConfig, start, stop):
    """Evaluate replicates [start, stop); returns (beta_true, per-estimator arrays)."""
    cell = _build_cell(config)
    size = stop - start
    p = len(cell.beta_true)
    arrays = {
        label: {
            "sq_error": np.full(size, np.nan),
            "lambda": np.full(size, np.nan),
            "covered": np.full((size, p), np.nan),
            "hw_ok": np.full(size, np.nan),
            "est_mse": np.full(size, np.nan),
            "failed": np.zeros(size, dtype=bool),
        }
        for label in cell.estimators
    }
    evaluate = _evaluate_multi if cell.is_multi else _evaluate_standard
    for i, rep in enumerate(range(start, stop)):
        try:
            records = evaluate(cell, rep, config.lambda_bracket)
        except ShrinkageError:
            for label in cell.estimators:
                arrays[label]["failed"][i] = True
            continue
        for label, record in records.items():
            slot = arrays[label]
            if isinstance(record, ShrinkageError):
                slot["failed"][i] = True
                continue
            sq, lam, covered, hw_ok, est_mse = record
            slot["sq_error"][i] = sq
            slot["lambda"][i] = lam
            if covered is not None:
                slot["covered"][i] = covered
            slot["hw_ok"][i] = hw_ok
            slot["est_mse"][i] = est_mse
    return cell.beta_true, arrays


# ---------------------------------------------------------------------------
# Aggregation
# ---------------------------------------------------------------------------

@dataclass
class SummaryTable:
    """Aggregated replicate metrics for one simulation cell.

    All stored values are unscaled; paper_scale records the conventional
    presentation multiplier for the setting (applied only on request).
    """

    setting: str
    cell: dict
    replicates: int
    master_seed: int
    estimators: tuple
    emse: dict
    mcse: dict
    coverage: dict
    coverage_by_coord: dict
    lambda_mean: dict
    lambda_sd: dict
    hw_violations: dict
    failures: dict
    paper_scale: int
    beta_true: np.ndarray
    raw: dict | None = None

    def rows(self, paper_scale=False):
        """Per-estimator summary rows; optionally apply the presentation scale."""
        scale = self.paper_scale if paper_scale else 1
        out = []
        for label in self.estimators:
            emse = self.emse[label]
            mcse = self.mcse[label]
            out.append({
                "estimator": label,
                "emse": emse * scale if emse is not None else None,
                "mcse": mcse * scale if mcse is not None else None,
                "coverage": self.coverage[label],
                "lambda_mean": self.lambda_mean[label],
                "lambda_sd": self.lambda_sd[label],
                "failures": self.failures[label],
                "scale": scale,
            })
        return out


def resolve_threads(threads=None):
    """Worker count: explicit argument, else ISE_THREADS, else 1."""
    if threads is None:
        env = os.environ.get("ISE_THREADS", "").strip()
        if not env:
            return 1
        try:
            threads = int(env)
        except ValueError:
            raise ValidationError(f"ISE_THREADS must be an integer, got {env!r}") from None
    threads = int(threads)
    if threads < 1:
        raise ValidationError(f"thread count must be >= 1, got {threads}")
    return threads


def _chunk_bounds(replicates, threads):
    chunks = min(threads, replicates)
    bounds = np.linspace(0, replicates, chunks + 1).astype(int)
    return [(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]


def run_setting(config, threads=None, keep_raw=False) -> SummaryTable:
    """Execute every replicate of a simulation cell and aggregate the metrics.

    Results are independent of the worker count: replicate r's data depend
    only on (master_seed, setting, cell, r), and chunk outputs are merged in
    replicate order.
    """
    config = validate_config(config)
    threads = resolve_threads(threads)
    bounds = _chunk_bounds(config.replicates, threads)
    if len(bounds) == 1:
        parts = [_run_chunk(config, *bounds[0])]
    else:
        starts = [a for a, _ in bounds]
        stops = [b for _, b in bounds]
        with ProcessPoolExecutor(max_workers=len(bounds)) as pool:
            parts = list(pool.map(_run_chunk, [config] * len(bounds), starts, stops))

    beta_true = parts[0][0]
    labels = tuple(parts[0][1].keys())
    merged = {
        label: {
            key: np.concatenate([arrays[label][key] for _, arrays in parts])
            for key in parts[0][1][label]
        }
        for label in labels
    }

    coverage_idx = cell_coverage_idx(config)
    emse, mcse, coverage, cov_coord = {}, {}, {}, {}
    lam_mean, lam_sd, hw_viol, failures = {}, {}, {}, {}
    for label in labels:
        slot = merged[label]
        failed = slot["failed"] | ~np.isfinite(slot["sq_error"])
        n_fail = int(np.sum(failed))
        failures[label] = n_fail
        if n_fail:
            message = (
                f"{label} failed in {n_fail}/{config.replicates} replicates of "
                f"setting {config.setting} cell {config.cell}"
            )
            if n_fail >= MAX_FAILURE_FRACTION * config.replicates:
                raise ShrinkageError(message)
            warnings.warn(message)
        ok = ~failed
        sq = slot["sq_error"][ok]
        emse[label] = float(np.mean(sq)) if sq.size else None
        mcse[label] = float(np.std(sq, ddof=1) / np.sqrt(sq.size)) if sq.size > 1 else None
        lam = slot["lambda"][ok]
        lam = lam[np.isfinite(lam)]
        lam_mean[label] = float(np.mean(lam)) if lam.size else None
        lam_sd[label] = float(np.std(lam, ddof=1)) if lam.size > 1 else None
        cov = slot["covered"][ok]
        cov = cov[~np.isnan(cov).any(axis=1)] if cov.size else cov
        if cov.size and coverage_idx is not None:
            per_coord = cov.mean(axis=0)
            cov_coord[label] = per_coord
            coverage[label] = float(np.median(per_coord[coverage_idx]))
        else:
            cov_coord[label] = None
            coverage[label] = None
        hw = slot["hw_ok"][ok]
        hw = hw[np.isfinite(hw)]
        hw_viol[label] = int(np.sum(hw == 0.0)) if hw.size else None

    return SummaryTable(
        setting=config.setting,
        cell=dict(config.cell),
        replicates=config.replicates,
        master_seed=config.master_seed,
        estimators=labels,
        emse=emse,
        mcse=mcse,
        coverage=coverage,
        coverage_by_coord=cov_coord,
        lambda_mean=lam_mean,
        lambda_sd=lam_sd,
        hw_violations=hw_viol,
        failures=failures,
        paper_scale=_PAPER_SCALE[config.setting],
        beta_true=beta_true,
        raw=merged if keep_raw else None,
    )


def cell_coverage_idx(config: SimConfig):
    """Coordinates entering the median-coverage summary for a config's setting."""
    if config.setting in ("I", "IV"):
        return np.arange(11)
    if config.setting == "II":
        return np.arange(5)
    if config.setting == "III":
        return np.array([1, 2])
    return None


def lambda_sweep(family, target: Dataset, source: SourceSummary, grid, target_fit=None):
    """Evaluate the dialed estimator and its estimated risk along a dial grid.

    Returns one row per grid value: {"lam", "beta", "mse", "error"}; rows
    whose solve fails carry the error message instead of results.
    """
    family = get_family(family)
    if target_fit is None:
        target_fit = fit_mle(family, target)
    if family is GAUSSIAN:
        curve = gaussian_mse_curve(target_fit, source)
    else:
        curve = glm_amse_curve(family, target, target_fit, source)
    rows = []
    for lam in grid:
        row = {"lam": float(lam), "beta": None, "mse": None, "error": None}
        try:
            estimate = solve_dial_estimate(family, target, source, lam, target_fit=target_fit)
            row["beta"] = estimate.beta_tilde
            row["mse"] = float(curve(row["lam"]))
        except ShrinkageError as exc:
            row["error"] = f"{exc.code}: {exc}"
        rows.append(row)
    return rows
