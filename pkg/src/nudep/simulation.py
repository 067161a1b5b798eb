"""Seeded data generators and Monte Carlo study harness.

Every generator draws from one PCG64 stream in a documented, fixed order
(covariates first, then any auxiliary variable, then noise), so a given
(ModelSpec, seed) reproduces bitwise-identical samples across runs.
Normal variates use numpy's standard_normal.

Studies emit long-format :class:`ExperimentReport` tables (one metric per
row) that serialize to CSV or JSON lines; plotting is left to the caller.
Replications derive independent child seeds from (seed, replicate), so
aggregation is order independent and replicates can run in a process pool.
"""

from __future__ import annotations

import csv
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .coefficient import nu1d_from_arranged, nu_general, xi_from_arranged
from .errors import InvalidInputError
from .inference import NULL_VARIANCE_LIMIT, permutation_test
from .sample import Sample
from .selection import ford_select
from .util import DEFAULT_SEED, STREAM_REPLICATE, STREAM_SAMPLE, derive_seed, rng_from

REPORT_COLUMNS = ("model", "n", "lambda_or_noise", "method", "metric", "value", "mc_se", "reps")


@dataclass(frozen=True)
class ModelSpec:
    """Which model to draw from, at what size, with which knobs.

    ``lam`` is the noise level in [0, 1] of the power-study models;
    ``noise_sd`` the additive-noise scale of the scatterplot models;
    ``p`` the covariate count of the selection models.
    """

    name: str
    n: int
    p: int | None = None
    lam: float | None = None
    noise_sd: float | None = None
    seed: int = DEFAULT_SEED

    def __post_init__(self):
        if self.n < 4:
            raise InvalidInputError(f"need n >= 4, got n={self.n}")
        if self.lam is not None and not 0.0 <= self.lam <= 1.0:
            raise InvalidInputError(f"lam must lie in [0, 1], got {self.lam}")
        if self.noise_sd is not None and self.noise_sd < 0:
            raise InvalidInputError("noise_sd must be nonnegative")


# ---------------------------------------------------------------------------
# model registry
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class _ModelDef:
    params: frozenset
    sampler: Callable          # (spec, rng) -> Sample
    sample_x: Callable | None = None    # (spec, size, rng) -> (size,) draws of X
    conditional: Callable | None = None  # (spec, x_array, rng) -> one Y draw per x
    discrete_max: float | None = None


def _uniform_pm1(spec, size, rng):
    return rng.uniform(-1.0, 1.0, size)


def _uniform_01(spec, size, rng):
    return rng.uniform(0.0, 1.0, size)


def _scalar_sample(fx):
    """Sampler for y = fx(spec, x, rng) models with X ~ U[-1, 1]."""

    def sample(spec, rng):
        x = rng.uniform(-1.0, 1.0, spec.n)
        return Sample(fx(spec, x, rng), x, ("x1",))

    return sample


def _step_values(x):
    return np.select(
        [x < -0.5, x < 0.0, x < 0.5],
        [-3.0, 2.0, -4.0],
        default=-3.0,
    )


def _w_shape(x):
    return np.abs(x + 0.5) * (x < 0) + np.abs(x - 0.5) * (x >= 0)


def _noise(spec, x, rng):
    return 3.0 * spec.lam * rng.standard_normal(len(x))


_POWER_MODELS = {
    "linear": lambda spec, x, rng: 0.5 * x + _noise(spec, x, rng),
    "step": lambda spec, x, rng: _step_values(x) + 10.0 * spec.lam * rng.standard_normal(len(x)),
    "w_shaped": lambda spec, x, rng: _w_shape(x) + 0.75 * spec.lam * rng.standard_normal(len(x)),
    "sinusoid": lambda spec, x, rng: np.cos(8.0 * np.pi * x) + _noise(spec, x, rng),
    "heteroskedastic": lambda spec, x, rng: 3.0
    * ((np.abs(x) <= 0.5) * (1.0 - spec.lam) + spec.lam)
    * rng.standard_normal(len(x)),
    "het_sinusoid": lambda spec, x, rng: np.cos(
        20.0 * np.pi * (1.0 + 10.0 * spec.lam * rng.standard_normal(len(x))) * x * x
    ),
}


def _circular_sample(spec, rng):
    x = rng.uniform(-1.0, 1.0, spec.n)
    z = rng.integers(0, 2, spec.n) * 2 - 1
    y = z * np.sqrt(1.0 - x * x) + 0.9 * spec.lam * rng.standard_normal(spec.n)
    return Sample(y, x, ("x1",))


# amplitude of the scatterplot sine picked so the noiseless coefficient at
# n = 100 sits near 0.90 (between the linear and heavily oscillatory cases)
_FIG1_SINE_FREQ = 2.0


def _fig1_fx(name):
    forms = {
        "fig1_linear": lambda x: x,
        "fig1_quadratic": lambda x: x * x,
        "fig1_sine": lambda x: np.sin(_FIG1_SINE_FREQ * np.pi * x),
    }
    f = forms[name]

    def fx(spec, x, rng):
        return f(x) + spec.noise_sd * rng.standard_normal(len(x))

    return f, fx


def _selection_sampler(fy):
    def sample(spec, rng):
        x = rng.standard_normal((spec.n, spec.p))
        y = fy(spec, x, rng)
        return Sample(y, x, tuple(f"x{j + 1}" for j in range(spec.p)))

    return sample


def _build_registry() -> dict[str, _ModelDef]:
    registry: dict[str, _ModelDef] = {}

    for name, fy in _POWER_MODELS.items():
        registry[name] = _ModelDef(
            params=frozenset({"lam"}),
            sampler=_scalar_sample(fy),
            sample_x=_uniform_pm1,
            conditional=lambda spec, xs, rng, fy=fy: fy(spec, np.asarray(xs, dtype=float), rng),
        )
    registry["circular"] = _ModelDef(
        params=frozenset({"lam"}),
        sampler=_circular_sample,
        sample_x=_uniform_pm1,
        conditional=lambda spec, xs, rng: (rng.integers(0, 2, len(xs)) * 2 - 1)
        * np.sqrt(1.0 - np.asarray(xs) ** 2)
        + 0.9 * spec.lam * rng.standard_normal(len(xs)),
    )

    def independent_sample(spec, rng):
        x = rng.uniform(0.0, 1.0, spec.n)
        y = rng.uniform(0.0, 1.0, spec.n)
        return Sample(y, x, ("x1",))

    registry["independent_uniform"] = _ModelDef(
        params=frozenset(),
        sampler=independent_sample,
        sample_x=_uniform_01,
        conditional=lambda spec, xs, rng: rng.uniform(0.0, 1.0, len(xs)),
    )
    registry["null"] = registry["independent_uniform"]

    def product_sample(spec, rng):
        x = rng.uniform(0.0, 1.0, spec.n)
        z = rng.uniform(0.0, 1.0, spec.n)
        return Sample(x * z, x, ("x1",))

    registry["product_uniform"] = _ModelDef(
        params=frozenset(),
        sampler=product_sample,
        sample_x=_uniform_01,
        conditional=lambda spec, xs, rng: np.asarray(xs) * rng.uniform(0.0, 1.0, len(xs)),
    )

    def capped_sample(spec, rng):
        x = rng.uniform(0.0, 1.0, spec.n)
        z = rng.uniform(0.0, 1.0, spec.n)
        return Sample(np.minimum(x + z, 1.0), x, ("x1",))

    # discrete test model: the sum is clipped, so the support maximum 1.0
    # carries probability mass
    registry["capped_sum_uniform"] = _ModelDef(
        params=frozenset(),
        sampler=capped_sample,
        sample_x=_uniform_01,
        conditional=lambda spec, xs, rng: np.minimum(
            np.asarray(xs) + rng.uniform(0.0, 1.0, len(xs)), 1.0
        ),
        discrete_max=1.0,
    )

    for name in ("fig1_linear", "fig1_quadratic", "fig1_sine"):
        f, fx = _fig1_fx(name)
        registry[name] = _ModelDef(
            params=frozenset({"noise_sd"}),
            sampler=_scalar_sample(fx),
            sample_x=_uniform_pm1,
            conditional=lambda spec, xs, rng, f=f: f(np.asarray(xs, dtype=float))
            + spec.noise_sd * rng.standard_normal(len(xs)),
        )

    selection_forms = {
        "lm": lambda spec, x, rng: 3.0 * x[:, 0] + 2.0 * x[:, 1] - x[:, 2]
        + rng.standard_normal(spec.n),
        "nonlin1": lambda spec, x, rng: x[:, 0] * x[:, 1] + np.sin(x[:, 0] * x[:, 2]),
        "nonlin2": lambda spec, x, rng: np.abs(x[:, 0] + rng.uniform(0.0, 1.0, spec.n))
        ** np.sin(x[:, 1] - x[:, 2]),
        "osc1": lambda spec, x, rng: np.sin(x[:, 0]) / np.sqrt(np.abs(x[:, 0]))
        + x[:, 1] * x[:, 2],
        "osc2": lambda spec, x, rng: np.sin(x[:, 0]) / x[:, 1] + x[:, 1] * x[:, 2],
    }
    for name, fy in selection_forms.items():
        registry[name] = _ModelDef(
            params=frozenset({"p"}),
            sampler=_selection_sampler(fy),
        )
    return registry


_REGISTRY = _build_registry()

MODEL_NAMES = tuple(sorted(_REGISTRY))
POWER_MODEL_NAMES = ("linear", "step", "w_shaped", "sinusoid", "circular", "heteroskedastic", "het_sinusoid")
SELECTION_MODEL_NAMES = ("lm", "nonlin1", "nonlin2", "osc1", "osc2")
FIG1_MODEL_NAMES = ("fig1_linear", "fig1_quadratic", "fig1_sine")


def get_model(name: str) -> _ModelDef:
    try:
        return _REGISTRY[name]
    except KeyError:
        raise InvalidInputError(
            f"unknown model {name!r}; choose from {MODEL_NAMES}"
        ) from None


def _check_params(spec: ModelSpec, model: _ModelDef):
    given = {
        key
        for key, val in (("p", spec.p), ("lam", spec.lam), ("noise_sd", spec.noise_sd))
        if val is not None
    }
    missing = model.params - given
    extra = given - model.params
    if missing:
        raise InvalidInputError(f"model {spec.name!r} requires parameters {sorted(missing)}")
    if extra:
        raise InvalidInputError(f"model {spec.name!r} does not take parameters {sorted(extra)}")
    if "p" in model.params and spec.p < 3:
        raise InvalidInputError(f"model {spec.name!r} needs p >= 3, got {spec.p}")


def generate(spec: ModelSpec) -> Sample:
    """Reproducible sample from the named model."""
    model = get_model(spec.name)
    _check_params(spec, model)
    rng = rng_from(spec.seed, STREAM_SAMPLE)
    return model.sampler(spec, rng)


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------

@dataclass
class ExperimentReport:
    """Long-format result table: one metric per row."""

    rows: list = field(default_factory=list)

    def add(self, model, n, lambda_or_noise, method, metric, value, mc_se, reps):
        if mc_se < 0:
            raise InvalidInputError("mc_se must be nonnegative")
        if reps < 1:
            raise InvalidInputError("reps must be >= 1")
        self.rows.append(
            {
                "model": model,
                "n": int(n),
                "lambda_or_noise": lambda_or_noise,
                "method": method,
                "metric": metric,
                "value": float(value),
                "mc_se": float(mc_se),
                "reps": int(reps),
            }
        )

    def values(self, **filters) -> list:
        out = []
        for row in self.rows:
            if all(row[k] == v for k, v in filters.items()):
                out.append(row)
        return out

    def to_csv(self, path):
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(REPORT_COLUMNS)
            for row in self.rows:
                writer.writerow(
                    ["" if row[c] is None else row[c] for c in REPORT_COLUMNS]
                )

    def to_json_lines(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            for row in self.rows:
                fh.write(json.dumps({c: row[c] for c in REPORT_COLUMNS}) + "\n")


def _se_of_mean(values: np.ndarray) -> float:
    if len(values) < 2:
        return 0.0
    return float(np.std(values, ddof=1) / math.sqrt(len(values)))


# ---------------------------------------------------------------------------
# studies
# ---------------------------------------------------------------------------

def null_moment_study(n: int, reps: int, seed: int = DEFAULT_SEED, bins: int = 40) -> ExperimentReport:
    """Null sampling moments of the 1-d coefficient under independence.

    Emits the Monte Carlo mean and variance next to their theoretical
    counterparts 2/n and (pi^2/3 - 3)/n, plus a histogram table for
    external plotting.
    """
    stats = np.empty(reps)
    for rep in range(reps):
        rng = rng_from(seed, STREAM_REPLICATE, rep)
        x = rng.uniform(0.0, 1.0, n)
        y = rng.uniform(0.0, 1.0, n)
        stats[rep] = nu1d_from_arranged(y[np.argsort(x, kind="stable")])
    mean = float(stats.mean())
    var = float(stats.var(ddof=1))
    report = ExperimentReport()
    base = dict(model="independent_uniform", n=n, lambda_or_noise=None, method="nu1d", reps=reps)
    report.add(**base, metric="mean", value=mean, mc_se=_se_of_mean(stats))
    report.add(**base, metric="variance", value=var, mc_se=var * math.sqrt(2.0 / (reps - 1)) if reps > 1 else 0.0)
    report.add(**base, metric="n_times_variance", value=n * var,
               mc_se=n * var * math.sqrt(2.0 / (reps - 1)) if reps > 1 else 0.0)
    report.add(**base, metric="theoretical_mean", value=2.0 / n, mc_se=0.0)
    report.add(**base, metric="theoretical_n_times_variance", value=NULL_VARIANCE_LIMIT, mc_se=0.0)
    counts, edges = np.histogram(stats, bins=bins)
    for k, count in enumerate(counts):
        report.add(**base, metric=f"hist[{edges[k]:.6g},{edges[k + 1]:.6g})",
                   value=float(count), mc_se=0.0)
    return report


def _power_rep(payload):
    name, n, lam, B, alpha, methods, child_seed = payload
    spec = ModelSpec(name=name, n=n, lam=lam, seed=child_seed)
    sample = generate(spec)
    rejected = {}
    for method in methods:
        x = sample.x if method == "nu" else sample.x[:, 0]
        result = permutation_test(sample.y, x, method, B, seed=child_seed)
        rejected[method] = result.p_value <= alpha
    return rejected


def _run_tasks(worker, payloads, workers: int):
    if workers <= 1:
        return [worker(p) for p in payloads]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(worker, payloads))


def power_study(
    models,
    lambda_grid,
    n: int,
    reps: int,
    B: int = 1000,
    alpha: float = 0.05,
    methods=("nu", "nu1d", "xi"),
    seed: int = DEFAULT_SEED,
    workers: int = 1,
) -> ExperimentReport:
    """Permutation-test rejection frequency per (model, lambda, method)."""
    report = ExperimentReport()
    for mi, name in enumerate(models):
        uses_lam = "lam" in get_model(name).params
        grid = list(lambda_grid) if uses_lam else [None]
        for li, lam in enumerate(grid):
            payloads = [
                (name, n, lam, B, alpha, tuple(methods), derive_seed(seed, STREAM_REPLICATE, mi, li, rep))
                for rep in range(reps)
            ]
            outcomes = _run_tasks(_power_rep, payloads, workers)
            for method in methods:
                hits = np.array([out[method] for out in outcomes], dtype=float)
                rate = float(hits.mean())
                report.add(
                    model=name, n=n, lambda_or_noise=lam, method=method,
                    metric="rejection_rate", value=rate,
                    mc_se=math.sqrt(rate * (1.0 - rate) / reps),
                    reps=reps,
                )
    return report


def _selection_rep(payload):
    name, n, p, child_seed = payload
    spec = ModelSpec(name=name, n=n, p=p, seed=child_seed)
    sample = generate(spec)
    path = ford_select(sample, seed=child_seed)
    return path.chosen


def selection_study(
    models,
    n_list,
    p: int,
    reps: int,
    seed: int = DEFAULT_SEED,
    workers: int = 1,
) -> ExperimentReport:
    """Recovery of the active set {x1, x2, x3} by forward selection."""
    truth = {0, 1, 2}
    report = ExperimentReport()
    for mi, name in enumerate(models):
        for ni, n in enumerate(n_list):
            payloads = [
                (name, n, p, derive_seed(seed, STREAM_REPLICATE, mi, ni, rep))
                for rep in range(reps)
            ]
            chosen_sets = [set(c) for c in _run_tasks(_selection_rep, payloads, workers)]
            exact = np.array([c == truth for c in chosen_sets], dtype=float)
            inclusion = np.array([truth <= c for c in chosen_sets], dtype=float)
            false_counts = np.array([len(c - truth) for c in chosen_sets], dtype=float)
            for metric, values in (
                ("exact_recovery", exact),
                ("inclusion", inclusion),
                ("false_selected_mean", false_counts),
            ):
                report.add(
                    model=name, n=n, lambda_or_noise=None, method="ford",
                    metric=metric, value=float(values.mean()),
                    mc_se=_se_of_mean(values), reps=reps,
                )
    return report


def figure1_study(
    n: int = 100,
    reps: int = 100,
    noise_levels=(0.0, 0.2, 0.6),
    seed: int = DEFAULT_SEED,
) -> ExperimentReport:
    """Coefficient values on the three scatterplot models across noise levels."""
    report = ExperimentReport()
    for mi, name in enumerate(FIG1_MODEL_NAMES):
        for si, noise_sd in enumerate(noise_levels):
            values = np.empty(reps)
            for rep in range(reps):
                child = derive_seed(seed, STREAM_REPLICATE, mi, si, rep)
                sample = generate(ModelSpec(name=name, n=n, noise_sd=noise_sd, seed=child))
                values[rep] = nu_general(sample, seed=child).value
            report.add(
                model=name, n=n, lambda_or_noise=noise_sd, method="nu",
                metric="mean_value", value=float(values.mean()),
                mc_se=_se_of_mean(values), reps=reps,
            )
            report.add(
                model=name, n=n, lambda_or_noise=noise_sd, method="nu",
                metric="sd_value", value=float(values.std(ddof=1)) if reps > 1 else 0.0,
                mc_se=0.0, reps=reps,
            )
    return report


def runtime_study(
    n_list,
    methods=("nu1d",),
    reps: int = 3,
    seed: int = DEFAULT_SEED,
) -> ExperimentReport:
    """Median wall time per method per sample size on independent normals.

    A growth-rate target, not an absolute one: timings are hardware
    specific, so consumers should fit slopes rather than compare values.
    """
    evaluators = {
        "nu1d": lambda y, x: nu1d_from_arranged(y[np.argsort(x, kind="stable")]),
        "xi": lambda y, x: xi_from_arranged(y[np.argsort(x, kind="stable")]),
        "nu": lambda y, x: nu_general(Sample(y, x), seed=0).value,
    }
    report = ExperimentReport()
    for ni, n in enumerate(n_list):
        rng = rng_from(seed, STREAM_SAMPLE, ni)
        x = rng.standard_normal(n)
        y = rng.standard_normal(n)
        for method in methods:
            evaluate = evaluators[method]
            times = []
            evaluate(y, x)  # warm-up
            for _ in range(reps):
                start = time.perf_counter()
                evaluate(y, x)
                times.append(time.perf_counter() - start)
            report.add(
                model="independent_normal", n=n, lambda_or_noise=None,
                method=method, metric="median_wall_time_s",
                value=float(np.median(times)), mc_se=0.0, reps=reps,
            )
    return report
