"""Monte Carlo experiment harness: validated specs, mergeable statistics,
deterministic parallel trials, scaling fits and convergence diagnostics.

Determinism contract: trial i of size n draws from the stream
(mix of master seed and n, i), so results are a pure function of the
experiment spec.  Trials may be executed by any number of workers in
any order; per-trial outputs land in trial-indexed slots and the
reduction to TrialStats uses exact rational accumulators, so the merge
is associative and commutative not just in theory but bit for bit.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.stats import norm

from . import limit, oriented, rwrs
from .laws import StableLaw
from .rng import mix64

MAX_TOTAL_STEPS = 20_000_000_000
STREAMING_THRESHOLD = 10_000_000

_SIZE_TAG = 401


class ConfigError(ValueError):
    """The experiment description is malformed; exit code 2 territory."""


class ResourceCapError(RuntimeError):
    """The experiment is well-formed but exceeds the sandbox budget; exit 3."""


# ---------------------------------------------------------------------------
# mergeable statistics


@dataclass(frozen=True)
class TrialStats:
    """Count, sum and sum of squares with exact rational accumulators.

    Floats convert to Fraction losslessly, so merging is exactly
    associative and commutative; mean and CI are materialized as floats
    only on read.
    """

    count: int = 0
    total: Fraction = Fraction(0)
    total_sq: Fraction = Fraction(0)

    @classmethod
    def from_values(cls, values) -> "TrialStats":
        total = Fraction(0)
        total_sq = Fraction(0)
        k = 0
        for v in values:
            f = Fraction(float(v))
            total += f
            total_sq += f * f
            k += 1
        return cls(count=k, total=total, total_sq=total_sq)

    @classmethod
    def from_indicator(cls, count: int, successes: int) -> "TrialStats":
        # 0/1 outcomes: the sum and the sum of squares coincide
        return cls(count=count, total=Fraction(successes),
                   total_sq=Fraction(successes))

    def merge(self, other: "TrialStats") -> "TrialStats":
        return TrialStats(count=self.count + other.count,
                          total=self.total + other.total,
                          total_sq=self.total_sq + other.total_sq)

    @property
    def mean(self) -> float:
        if self.count == 0:
            raise ValueError("no trials recorded")
        return float(self.total / self.count)

    @property
    def second_moment(self) -> float:
        if self.count == 0:
            raise ValueError("no trials recorded")
        return float(self.total_sq / self.count)

    @property
    def sample_variance(self) -> float:
        if self.count < 2:
            raise ValueError("variance needs at least two trials")
        num = self.total_sq - self.total * self.total / self.count
        return max(0.0, float(num / (self.count - 1)))

    def ci_half(self, confidence: float = 0.99) -> float | None:
        """Normal-approximation half-width; None when one trial cannot say."""
        if self.count < 2:
            return None
        z = float(norm.ppf(0.5 + confidence / 2.0))
        return z * (self.sample_variance / self.count) ** 0.5


# ---------------------------------------------------------------------------
# experiment specification

_MODEL_OUTPUTS = {
    "oriented": ("range", "first_range", "first_spread", "escape"),
    "rwrs": ("zrange", "zspread", "vn", "vbeta", "zv", "escape"),
    "limit": ("sup", "inf", "spread", "y_sup", "y_spread"),
}


@dataclass(frozen=True)
class ExperimentSpec:
    """A complete, validated description of one Monte Carlo experiment.

    sizes are walk horizons (or mesh sizes for the limit model), strictly
    increasing; trials applies per size; outputs name the statistics to
    collect; horizon optionally truncates the escape indicator.
    """

    model: str
    params: dict
    sizes: tuple
    trials: int
    outputs: tuple
    master_seed: int = 0
    horizon: int | None = None
    threads: int = 1

    def __post_init__(self):
        if self.model not in _MODEL_OUTPUTS:
            raise ConfigError(f"unknown model {self.model!r}; "
                              f"expected one of {sorted(_MODEL_OUTPUTS)}")
        sizes = tuple(int(n) for n in self.sizes)
        if not sizes or any(n < 1 for n in sizes):
            raise ConfigError("sizes must be a nonempty list of positive integers")
        if any(b <= a for a, b in zip(sizes, sizes[1:])):
            raise ConfigError("sizes must be strictly increasing")
        object.__setattr__(self, "sizes", sizes)
        if self.trials < 1:
            raise ConfigError("trials must be at least 1")
        outputs = tuple(self.outputs)
        if not outputs:
            raise ConfigError("outputs must name at least one statistic")
        allowed = _MODEL_OUTPUTS[self.model]
        for o in outputs:
            if o not in allowed:
                raise ConfigError(f"output {o!r} not available for model "
                                  f"{self.model!r}; expected subset of {allowed}")
        object.__setattr__(self, "outputs", outputs)
        if self.threads < 1:
            raise ConfigError("threads must be at least 1")
        if self.horizon is not None and self.horizon < 1:
            raise ConfigError("horizon must be positive when given")
        _build_trial_fn(self.model, dict(self.params))  # validates params
        budget = self.trials * sum(sizes)
        if budget > MAX_TOTAL_STEPS:
            raise ResourceCapError(
                f"trials * sum(sizes) = {budget} exceeds the cap of "
                f"{MAX_TOTAL_STEPS}")


def _require_params(params: dict, required: set, optional: set = frozenset()):
    keys = set(params)
    missing = required - keys
    unknown = keys - required - optional
    if missing:
        raise ConfigError(f"missing model parameters: {sorted(missing)}")
    if unknown:
        raise ConfigError(f"unknown model parameters: {sorted(unknown)}")


def parse_lattice_law(text):
    """Parse 'kind' or 'kind:arg' law descriptions used in configs."""
    from .laws import lazy_vertical, pareto_tail, rademacher, simple_symmetric, ternary
    if isinstance(text, dict):
        kind = text.get("kind")
        args = [text[k] for k in sorted(text) if k != "kind"]
    else:
        parts = str(text).split(":")
        kind, args = parts[0], [float(a) for a in parts[1:]]
    makers = {"rademacher": rademacher, "ternary": ternary,
              "lazy": lazy_vertical, "lazy_vertical": lazy_vertical,
              "simple": simple_symmetric, "simple_symmetric": simple_symmetric,
              "pareto": pareto_tail, "pareto_tail": pareto_tail}
    if kind not in makers:
        raise ConfigError(f"unknown lattice law {kind!r}")
    try:
        return makers[kind](*args)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad lattice law {text!r}: {exc}") from exc


def _stable_law_from(params, what: str) -> StableLaw:
    if not isinstance(params, dict):
        raise ConfigError(f"{what} must be an object with index/a1/a2 fields")
    _require_params(params, {"index", "a1"}, {"a2"})
    try:
        return StableLaw(float(params["index"]), float(params["a1"]),
                         float(params.get("a2", 0.0)))
    except ValueError as exc:
        raise ConfigError(f"bad {what}: {exc}") from exc


def _build_trial_fn(model: str, params: dict):
    """Validate params and return f(size, seed, outputs, horizon) -> dict."""
    if model == "oriented":
        _require_params(params, {"p"})
        p = float(params["p"])
        if not 0.0 < p < 1.0:
            raise ConfigError(f"p must lie in (0, 1), got {p}")

        def run(n, seed, outputs, horizon):
            path = oriented.simulate_annealed(p, n, seed)
            out = {}
            if "range" in outputs:
                out["range"] = oriented.range_sites(path)
            if "first_range" in outputs:
                out["first_range"] = oriented.range_first_coordinate(path)
            if "first_spread" in outputs:
                out["first_spread"] = oriented.first_coordinate_spread(path)
            if "escape" in outputs:
                t = min(horizon or n, n)
                hit = ((path.x[1:t + 1] == 0) & (path.y[1:t + 1] == 0)).any()
                out["escape"] = 0 if hit else 1
            return out

        return run

    if model == "rwrs":
        _require_params(params, {"walk", "scenery"})
        walk_law = parse_lattice_law(params["walk"])
        scenery_law = parse_lattice_law(params["scenery"])
        try:
            model_obj = rwrs.RwrsModel(walk_law, scenery_law)
        except ValueError as exc:
            raise ConfigError(f"bad walk/scenery pair: {exc}") from exc

        def run(n, seed, outputs, horizon):
            zp = rwrs.simulate_rwrs(model_obj, n, seed)
            out = {}
            if "zrange" in outputs:
                out["zrange"] = rwrs.range_z(zp)
            if "zspread" in outputs:
                out["zspread"] = rwrs.z_spread(zp)
            if "vn" in outputs:
                out["vn"] = rwrs.self_intersections(zp.local_time)
            if "vbeta" in outputs:
                out["vbeta"] = rwrs.v_beta(zp.local_time, model_obj.beta)
            if "zv" in outputs:
                out["zv"] = rwrs.z_self_intersections(zp)
            if "escape" in outputs:
                t = min(horizon or n, n)
                out["escape"] = 0 if (zp.values[1:t + 1] == 0).any() else 1
            return out

        return run

    # limit model: sizes are mesh step counts
    _require_params(params, {"walk", "scenery", "h"})
    walk_law = _stable_law_from(params["walk"], "walk law")
    scenery_law = _stable_law_from(params["scenery"], "scenery law")
    h = float(params["h"])
    if h <= 0.0:
        raise ConfigError(f"cell width h must be positive, got {h}")
    if walk_law.index <= 1.0:
        raise ConfigError("limit model needs a walk index above 1")

    def run(m, seed, outputs, horizon):
        from .rng import RngStream
        gen = RngStream(seed, 0).generator()
        need_delta = bool({"sup", "inf", "spread"} & set(outputs))
        out = {}
        if need_delta:
            delta = limit.sample_scenery_integral(walk_law, scenery_law, m, h, gen)
            f = limit.path_functionals(delta)
            if "sup" in outputs:
                out["sup"] = f.sup
            if "inf" in outputs:
                out["inf"] = f.inf
            if "spread" in outputs:
                out["spread"] = f.spread
        if {"y_sup", "y_spread"} & set(outputs):
            y = limit.sample_stable_path(walk_law, m, RngStream(seed, 1).generator())
            fy = limit.path_functionals(y)
            if "y_sup" in outputs:
                out["y_sup"] = fy.sup
            if "y_spread" in outputs:
                out["y_spread"] = fy.spread
        return out

    return run


# ---------------------------------------------------------------------------
# running experiments


def run_experiment(spec: ExperimentSpec) -> dict:
    """Execute the experiment; returns {size: {statistic: TrialStats}}.

    Trial i of size n uses the stream derived from (master_seed, n, i)
    regardless of worker count or completion order, and per-trial values
    land in trial-indexed slots before reduction, so two runs of the
    same spec agree exactly.
    """
    trial_fn = _build_trial_fn(spec.model, dict(spec.params))
    results: dict = {}
    for n in spec.sizes:
        size_seed = mix64(spec.master_seed, _SIZE_TAG, n)
        slots = {stat: np.empty(spec.trials) for stat in spec.outputs}

        def one(i: int) -> None:
            out = trial_fn(n, mix64(size_seed, i), spec.outputs, spec.horizon)
            for stat in spec.outputs:
                slots[stat][i] = out[stat]

        if spec.threads > 1:
            with ThreadPoolExecutor(max_workers=spec.threads) as pool:
                list(pool.map(one, range(spec.trials)))
        else:
            for i in range(spec.trials):
                one(i)
        results[n] = {stat: TrialStats.from_values(slots[stat])
                      for stat in spec.outputs}
    return results


def estimate_escape(model: str, params: dict, horizon: int, trials: int,
                    master_seed: int) -> TrialStats:
    """Probability of avoiding 0 through the truncation horizon.

    Truncation can only overestimate the infinite-horizon escape
    probability, so estimates at growing horizons decrease toward it.
    """
    if horizon < 1:
        raise ConfigError("horizon must be at least 1")
    if trials < 1:
        raise ConfigError("trials must be at least 1")
    if horizon * trials > MAX_TOTAL_STEPS:
        raise ResourceCapError(f"horizon * trials = {horizon * trials} exceeds "
                               f"the cap of {MAX_TOTAL_STEPS}")
    if model == "oriented":
        _require_params(params, {"p"})
        survivors = oriented.no_return_count(float(params["p"]), horizon,
                                             trials, master_seed)
    elif model == "rwrs":
        _require_params(params, {"walk", "scenery"})
        walk_law = parse_lattice_law(params["walk"])
        scenery_law = parse_lattice_law(params["scenery"])
        try:
            m = rwrs.RwrsModel(walk_law, scenery_law)
        except ValueError as exc:
            raise ConfigError(f"bad walk/scenery pair: {exc}") from exc
        survivors = rwrs.no_return_z_count(m, horizon, trials, master_seed)
    else:
        raise ConfigError(f"escape estimation is defined for walk models, "
                          f"not {model!r}")
    return TrialStats.from_indicator(trials, survivors)


# ---------------------------------------------------------------------------
# fits and diagnostics


@dataclass(frozen=True)
class ScalingFit:
    """Least-squares line through (log n, log value) with residual summary."""

    slope: float
    intercept: float
    residual_norm: float
    slope_stderr: float

    def slope_ci(self, z: float = 2.576) -> tuple[float, float]:
        return (self.slope - z * self.slope_stderr,
                self.slope + z * self.slope_stderr)


def scaling_fit(sizes, values) -> ScalingFit:
    """Fit log(value) = slope * log(size) + intercept.

    Exactly log-linear inputs are reproduced up to rounding: the
    residual norm is then numerically zero.
    """
    sizes = np.asarray(sizes, dtype=float)
    values = np.asarray(values, dtype=float)
    if sizes.size != values.size or sizes.size < 3:
        raise ValueError("need at least three (size, value) pairs")
    if (sizes <= 0).any() or (values <= 0).any():
        raise ValueError("sizes and values must be positive")
    x = np.log(sizes)
    y = np.log(values)
    dm = np.column_stack([x, np.ones_like(x)])
    coef, _, _, _ = np.linalg.lstsq(dm, y, rcond=None)
    resid = y - dm @ coef
    rss = float(resid @ resid)
    dof = x.size - 2
    sxx = float(((x - x.mean()) ** 2).sum())
    stderr = (rss / dof / sxx) ** 0.5 if dof > 0 else 0.0
    return ScalingFit(slope=float(coef[0]), intercept=float(coef[1]),
                      residual_norm=rss ** 0.5, slope_stderr=stderr)


@dataclass(frozen=True)
class ConvergenceReport:
    """Per-size means with dispersion, plus the two headline verdicts."""

    rows: tuple  # (size, mean, ci_half, std)
    dispersion_shrinks: bool
    mutually_consistent: bool


def convergence_diagnostic(samples: dict, band: float = 3.0) -> ConvergenceReport:
    """Summarize per-size sample arrays of a normalized statistic.

    dispersion_shrinks compares the largest size's standard deviation to
    the smallest's; mutually_consistent checks every pair of means
    against ``band`` times their combined standard errors.
    """
    if len(samples) < 2:
        raise ValueError("need at least two sizes to diagnose convergence")
    rows = []
    for n in sorted(samples):
        v = np.asarray(samples[n], dtype=float)
        if v.size < 2:
            raise ValueError("each size needs at least two samples")
        se = v.std(ddof=1) / v.size ** 0.5
        rows.append((int(n), float(v.mean()), float(2.576 * se),
                     float(v.std(ddof=1))))
    shrinks = rows[-1][3] < rows[0][3]
    consistent = True
    for i in range(len(rows)):
        for j in range(i + 1, len(rows)):
            gap = abs(rows[i][1] - rows[j][1])
            allowance = band * ((rows[i][2] + rows[j][2]) / 2.576)
            if gap > allowance:
                consistent = False
    return ConvergenceReport(rows=tuple(rows), dispersion_shrinks=shrinks,
                             mutually_consistent=consistent)


def expected_exponent(model: str, stat: str, params: dict) -> float | None:
    """Growth exponent predicted for log-log fits, when one is established."""
    if model == "oriented":
        return {"range": 1.0, "first_range": 0.75, "first_spread": 0.75,
                "escape": 0.0}.get(stat)
    if model == "rwrs":
        m = rwrs.RwrsModel(parse_lattice_law(params["walk"]),
                           parse_lattice_law(params["scenery"]))
        a, b = m.alpha, m.beta
        if stat in ("zrange", "zspread"):
            return rwrs.scaling_exponent(a, b) if a > 1.0 else 1.0 / b
        if stat == "vn":
            return 2.0 - 1.0 / a if a >= 1.0 else 1.0
        if stat == "escape":
            return 0.0
    return None
