"""Monte-Carlo generators and the scenario sweep engine.

Data are generated from the linear, instantaneous noisy mixing model

    x[t] = A s[t] + v[t],        t = 1 .. T,

with mutually independent, temporally i.i.d., zero-mean unit-variance
non-Gaussian source rows, a full-column-rank mixing matrix drawn fresh at
every trial, and additive Gaussian noise with a configurable spatial
covariance. Four benchmark scenarios are built in; each sweeps one grid
parameter and scores every requested estimator by its empirical error
probability over a configurable number of independent trials.

Reproducibility contract: every random draw flows from a 64-bit seed
derived with SplitMix64 from ``(base_seed, scenario_id, grid_index,
m_index, trial_index)`` plus a fixed per-purpose stream tag, so sweeps are
bitwise reproducible and trials are independent of execution order.

Decibel convention: a variance written in dB means ``10^(dB/10)`` in
linear units (power convention). Spread parameters (`epsilon_db`,
`delta_db`) act in the dB domain directly.
"""

from dataclasses import dataclass, field

import numpy as np

from . import estimators, numerics

__all__ = [
    "SOURCE_LAWS",
    "SourceSpec",
    "WhiteNoise",
    "PerturbedDiagonalNoise",
    "UniformDiagonalNoise",
    "TridiagonalNoise",
    "ScenarioConfig",
    "SweepRow",
    "CurveRow",
    "SweepResult",
    "splitmix64",
    "derive_seed",
    "db_to_linear",
    "linear_to_db",
    "draw_sources",
    "draw_mixing",
    "set_smallest_singular",
    "build_noise_cov",
    "synthesize",
    "build_trial",
    "run_sweep",
]

SOURCE_LAWS = ("laplace", "uniform", "rademacher", "pam4")
MIXING_LAWS = ("gaussian", "uniform01")
METHODS = ("sdc", "mdl", "sorte", "rmt")

_MASK64 = (1 << 64) - 1

# per-purpose stream tags folded onto the trial seed
_STREAM_MIXING = 1
_STREAM_SOURCES = 2
_STREAM_NOISE_COV = 3
_STREAM_NOISE = 4


def splitmix64(value):
    """One step of the SplitMix64 mixing function (Steele et al., 2014)."""
    z = (value + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def derive_seed(base_seed, *components):
    """Fold integer components onto a base seed, one SplitMix64 step each."""
    state = splitmix64(int(base_seed) & _MASK64)
    for component in components:
        state = splitmix64(state ^ (int(component) & _MASK64))
    return state


def _rng(seed):
    return np.random.Generator(np.random.PCG64(seed))


def db_to_linear(db):
    return 10.0 ** (db / 10.0)


def linear_to_db(value):
    return 10.0 * np.log10(value)


@dataclass(frozen=True)
class SourceSpec:
    """One source row: distribution law plus variance (default 1)."""

    law: str
    variance: float = 1.0

    def __post_init__(self):
        if self.law not in SOURCE_LAWS:
            raise ValueError(f"unknown source law {self.law!r}; use one of {SOURCE_LAWS}")
        if not self.variance > 0:
            raise ValueError(f"variance must be positive, got {self.variance}")


@dataclass(frozen=True)
class WhiteNoise:
    """Spatially white noise, covariance ``sigma2 * I``."""

    sigma2: float


@dataclass(frozen=True)
class PerturbedDiagonalNoise:
    """Diagonal covariance with dB-domain Gaussian perturbations.

    Entry l is ``sigma2 * 10^(delta_l / 10)`` with
    ``delta_l ~ Normal(0, epsilon_db^2)`` drawn independently per sensor.
    """

    sigma2: float
    epsilon_db: float


@dataclass(frozen=True)
class UniformDiagonalNoise:
    """Diagonal covariance, entries uniform in dB over a band of width delta_db.

    Entry l is ``sigma0_sq * 10^(u_l / 10)`` with ``u_l ~ U(0, delta_db)``.
    """

    sigma0_sq: float
    delta_db: float


@dataclass(frozen=True)
class TridiagonalNoise:
    """``sigma2`` on the diagonal, ``rho * sigma2`` on the first off-diagonals."""

    sigma2: float
    rho: float = 0.1


_UNIFORM_HALF_WIDTH = np.sqrt(3.0)
_LAPLACE_SCALE = 1.0 / np.sqrt(2.0)
_PAM4_LEVELS = np.array([-3.0, -1.0, 1.0, 3.0]) / np.sqrt(5.0)


def _draw_law(law, rng, count):
    if law == "laplace":
        # inverse CDF applied to a uniform stream; exact and rejection-free
        u = rng.random(count)
        tiny = np.finfo(np.float64).tiny
        return np.where(
            u < 0.5,
            _LAPLACE_SCALE * np.log(np.maximum(2.0 * u, tiny)),
            -_LAPLACE_SCALE * np.log(np.maximum(2.0 * (1.0 - u), tiny)),
        )
    if law == "uniform":
        return (2.0 * rng.random(count) - 1.0) * _UNIFORM_HALF_WIDTH
    if law == "rademacher":
        return rng.integers(0, 2, count).astype(np.float64) * 2.0 - 1.0
    if law == "pam4":
        return _PAM4_LEVELS[rng.integers(0, 4, count)]
    raise ValueError(f"unknown source law {law!r}")


def draw_sources(specs, count, seed):
    """Draw an ``(len(specs), count)`` matrix of i.i.d. source rows.

    Every row gets its own seed stream (derived from ``seed`` and the row
    index), so rows are independent by construction. All laws are
    parameterized for zero mean and unit variance before the per-spec
    variance scaling is applied.
    """
    if count < 1:
        raise ValueError("need at least one sample")
    rows = np.empty((len(specs), count))
    for m, spec in enumerate(specs):
        rng = _rng(derive_seed(seed, m))
        rows[m] = np.sqrt(spec.variance) * _draw_law(spec.law, rng, count)
    return rows


def draw_mixing(sensors, sources, law, seed, max_redraws=10):
    """Draw an i.i.d. full-column-rank ``(sensors, sources)`` mixing matrix.

    Redraws (from the same stream) up to ``max_redraws`` times if the
    smallest singular value is at or below 1e-10, then raises.
    """
    if not sensors > sources >= 2:
        raise ValueError(
            f"need sensors > sources >= 2, got sensors={sensors}, sources={sources}"
        )
    if law not in MIXING_LAWS:
        raise ValueError(f"unknown mixing law {law!r}; use one of {MIXING_LAWS}")
    rng = _rng(seed)
    for _ in range(max_redraws):
        if law == "gaussian":
            a = rng.standard_normal((sensors, sources))
        else:
            a = rng.random((sensors, sources))
        if numerics.svd(a).d[-1] > 1e-10:
            return a
    raise RuntimeError("mixing matrix kept coming out rank deficient")


def set_smallest_singular(a, value):
    """Replace the smallest singular value of a full-rank matrix.

    The remaining singular values and the singular subspaces are left
    untouched; the matrix is rebuilt from its SVD factors.
    """
    if not value > 0:
        raise ValueError(f"replacement singular value must be positive, got {value}")
    dec = numerics.svd(np.asarray(a, dtype=np.float64))
    if dec.d[-1] <= 1e-10:
        raise ValueError("input matrix is rank deficient")
    d = dec.d.copy()
    d[-1] = value
    return (dec.u * d) @ dec.v.T


def build_noise_cov(model, sensors, seed):
    """Realize the spatial noise covariance for one trial.

    Dispatches on the noise-model kind; the result is checked to be
    symmetric positive definite.
    """
    rng = _rng(seed)
    if isinstance(model, WhiteNoise):
        cov = model.sigma2 * np.eye(sensors)
    elif isinstance(model, PerturbedDiagonalNoise):
        delta = rng.normal(0.0, model.epsilon_db, sensors)
        cov = np.diag(model.sigma2 * db_to_linear(delta))
    elif isinstance(model, UniformDiagonalNoise):
        band = rng.random(sensors) * model.delta_db
        cov = np.diag(model.sigma0_sq * db_to_linear(band))
    elif isinstance(model, TridiagonalNoise):
        cov = model.sigma2 * (
            np.eye(sensors)
            + model.rho * np.eye(sensors, k=1)
            + model.rho * np.eye(sensors, k=-1)
        )
    else:
        raise TypeError(f"unknown noise model {model!r}")
    if numerics.sym_eig(cov).eigenvalues[-1] <= 0.0:
        raise ValueError(f"noise model {model!r} produced a non-PD covariance")
    return cov


def synthesize(a, s, r_v, seed):
    """Mix sources and add spatially colored Gaussian noise.

    Returns ``a @ s + sqrtm(r_v) @ w`` with ``w`` i.i.d. standard normal.
    A zero noise covariance is allowed (for exactness tests) and yields
    ``a @ s`` exactly.
    """
    a = np.asarray(a, dtype=np.float64)
    s = np.asarray(s, dtype=np.float64)
    r_v = np.asarray(r_v, dtype=np.float64)
    sensors, sources = a.shape
    if s.shape[0] != sources:
        raise ValueError(f"mixing expects {sources} source rows, got {s.shape[0]}")
    if r_v.shape != (sensors, sensors):
        raise ValueError(
            f"noise covariance must be {(sensors, sensors)}, got {r_v.shape}"
        )
    half = numerics.psd_sqrt(r_v)
    noise = _rng(seed).standard_normal((sensors, s.shape[1]))
    return a @ s + half @ noise


# --------------------------------------------------------------------------
# scenario configuration and the sweep engine
# --------------------------------------------------------------------------

GRID_PARAMS = {
    1: ("k",),
    2: ("epsilon_db",),
    3: ("samples", "inv_sigma0_db"),
    4: ("snr_db",),
}


@dataclass(frozen=True)
class ScenarioConfig:
    """Full description of one Monte-Carlo scenario sweep.

    ``source_counts`` usually holds a single M; scenario 3 averages over a
    range. ``source_laws`` holds either one law applied to every row or
    exactly M laws. Scenario-specific knobs keep their defaults unless the
    config file overrides them; dB-valued fields follow the module's power
    convention.
    """

    scenario_id: int
    sensors: int
    source_counts: tuple
    source_laws: tuple
    mixing: str
    trials: int
    base_seed: int
    grid_param: str
    grid_values: tuple
    methods: tuple = METHODS
    samples: int = 3000
    samples_per_k: int = 500
    sigma2_db_per_k: float = -5.0
    sigma2_db: float = -15.0
    sigma0_db: float = -15.0
    delta_db: float = 30.0
    dominant_variance_db: float = 18.0
    rho: float = 0.1
    smallest_singular_value: float = float(np.sqrt(0.1))
    rmt_alpha: float = 0.1

    def __post_init__(self):
        if self.scenario_id not in GRID_PARAMS:
            raise ValueError(f"scenario_id must be 1..4, got {self.scenario_id}")
        if self.grid_param not in GRID_PARAMS[self.scenario_id]:
            raise ValueError(
                f"scenario {self.scenario_id} sweeps one of "
                f"{GRID_PARAMS[self.scenario_id]}, got {self.grid_param!r}"
            )
        if not self.grid_values:
            raise ValueError("grid_values must be nonempty")
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        for m in self.source_counts:
            if not 1 < m < self.sensors:
                raise ValueError(
                    f"need 1 < M < sensors for every M, got M={m}, "
                    f"sensors={self.sensors}"
                )
        if len(self.source_laws) not in (1, max(self.source_counts)):
            raise ValueError(
                "source_laws must name one law or one per source row"
            )
        for law in self.source_laws:
            if law not in SOURCE_LAWS:
                raise ValueError(f"unknown source law {law!r}")
        if self.mixing not in MIXING_LAWS:
            raise ValueError(f"unknown mixing law {self.mixing!r}")
        for method in self.methods:
            if method not in METHODS:
                raise ValueError(f"unknown method {method!r}; use one of {METHODS}")
        for t in self._all_sample_counts():
            if t <= 10 * self.sensors:
                raise ValueError(
                    f"every grid point needs samples > 10 * sensors, got T={t}"
                )

    def _all_sample_counts(self):
        if self.scenario_id == 1:
            return [int(self.samples_per_k * k) for k in self.grid_values]
        if self.scenario_id == 3 and self.grid_param == "samples":
            return [int(v) for v in self.grid_values]
        return [self.samples]


def _source_specs(config, m, grid_value):
    laws = config.source_laws
    if len(laws) == 1:
        laws = laws * m
    else:
        laws = laws[:m]
    specs = [SourceSpec(law) for law in laws]
    if config.scenario_id == 3:
        # one dominant source; placed first, which is immaterial by the
        # permutation symmetry of the model
        specs[0] = SourceSpec(laws[0], variance=db_to_linear(config.dominant_variance_db))
    return specs


def _noise_model(config, grid_value):
    sid = config.scenario_id
    if sid == 1:
        return WhiteNoise(db_to_linear(config.sigma2_db_per_k * grid_value))
    if sid == 2:
        return PerturbedDiagonalNoise(db_to_linear(config.sigma2_db), grid_value)
    if sid == 3:
        if config.grid_param == "inv_sigma0_db":
            sigma0_sq = db_to_linear(-grid_value)
        else:
            sigma0_sq = db_to_linear(config.sigma0_db)
        return UniformDiagonalNoise(sigma0_sq, config.delta_db)
    return TridiagonalNoise(db_to_linear(-grid_value), config.rho)


def _sample_count(config, grid_value):
    if config.scenario_id == 1:
        return int(config.samples_per_k * grid_value)
    if config.scenario_id == 3 and config.grid_param == "samples":
        return int(grid_value)
    return config.samples


def build_trial(config, grid_value, m, trial_seed):
    """Generate one trial's mixture matrix for a scenario grid point.

    Separate seed streams feed the mixing matrix, the source rows, the
    noise covariance realization and the noise samples.
    """
    samples = _sample_count(config, grid_value)
    a = draw_mixing(config.sensors, m, config.mixing,
                    derive_seed(trial_seed, _STREAM_MIXING))
    if config.scenario_id == 4:
        a = set_smallest_singular(a, config.smallest_singular_value)
    s = draw_sources(_source_specs(config, m, grid_value), samples,
                     derive_seed(trial_seed, _STREAM_SOURCES))
    r_v = build_noise_cov(_noise_model(config, grid_value), config.sensors,
                          derive_seed(trial_seed, _STREAM_NOISE_COV))
    return synthesize(a, s, r_v, derive_seed(trial_seed, _STREAM_NOISE))


@dataclass(frozen=True)
class SweepRow:
    scenario_id: int
    grid_label: str
    grid_value: float
    method: str
    trials: int
    errors: int

    @property
    def error_rate(self):
        return self.errors / self.trials if self.trials else 0.0


@dataclass(frozen=True)
class CurveRow:
    grid_value: float
    hypothesis: int
    mean_value: float


@dataclass(frozen=True)
class SweepResult:
    scenario_id: int
    grid_label: str
    rows: list
    curves: list = field(default_factory=list)
    failures: list = field(default_factory=list)


def _sorte_applicable(config, m):
    return m <= config.sensors - 3


def run_sweep(config, methods=None, progress=None):
    """Run a full scenario sweep and aggregate error probabilities.

    For every grid point, ``config.trials`` independent trials are run per
    configured source count; an estimator scores an error whenever its
    estimate differs from the true M. SORTE only participates for
    ``M <= sensors - 3`` (it cannot report larger counts). Estimator
    exceptions are recorded as failures, count as errors, and do not abort
    the sweep. When the dependency estimator runs, its mean curve per grid
    point is collected as well.
    """
    methods = tuple(methods) if methods is not None else config.methods
    for method in methods:
        if method not in METHODS:
            raise ValueError(f"unknown method {method!r}; use one of {METHODS}")
    eigen_methods = [m for m in methods if m != "sdc"]
    rows = []
    curves = []
    failures = []
    hypotheses = list(range(2, config.sensors))
    for grid_index, grid_value in enumerate(config.grid_values):
        counts = {method: [0, 0] for method in methods}  # trials, errors
        curve_sum = np.zeros(len(hypotheses))
        curve_n = 0
        for m_index, m in enumerate(config.source_counts):
            for trial in range(config.trials):
                trial_seed = derive_seed(config.base_seed, config.scenario_id,
                                         grid_index, m_index, trial)
                x = build_trial(config, grid_value, m, trial_seed)
                spectrum = None
                if eigen_methods:
                    try:
                        spectrum = estimators.covariance_spectrum(x)
                    except Exception as exc:  # noqa: BLE001 - recorded, not fatal
                        failures.append(
                            f"grid={grid_value} M={m} trial={trial} "
                            f"spectrum: {exc}"
                        )
                for method in methods:
                    if method == "sorte" and not _sorte_applicable(config, m):
                        continue
                    counts[method][0] += 1
                    try:
                        m_hat, curve = _run_method(
                            method, x, spectrum, config.rmt_alpha
                        )
                    except Exception as exc:  # noqa: BLE001 - recorded, not fatal
                        failures.append(
                            f"grid={grid_value} M={m} trial={trial} "
                            f"{method}: {exc}"
                        )
                        counts[method][1] += 1
                        continue
                    if m_hat != m:
                        counts[method][1] += 1
                    if curve is not None:
                        curve_sum += [curve[n] for n in hypotheses]
                        curve_n += 1
        for method in methods:
            ran, errors = counts[method]
            rows.append(SweepRow(config.scenario_id, config.grid_param,
                                 float(grid_value), method, ran, errors))
        if curve_n:
            for pos, n in enumerate(hypotheses):
                curves.append(CurveRow(float(grid_value), n,
                                       curve_sum[pos] / curve_n))
        if progress is not None:
            progress(grid_index + 1, len(config.grid_values))
    return SweepResult(scenario_id=config.scenario_id,
                       grid_label=config.grid_param,
                       rows=rows, curves=curves, failures=failures)


def _run_method(method, x, spectrum, rmt_alpha):
    if method == "sdc":
        estimate = estimators.sdc_estimate(x)
        return estimate.m_hat, estimate.diagnostics["curve"]
    if spectrum is None:
        raise ValueError("covariance spectrum unavailable")
    if method == "mdl":
        return estimators.mdl_estimate(spectrum).m_hat, None
    if method == "sorte":
        return estimators.sorte_estimate(spectrum).m_hat, None
    return estimators.rmt_estimate(spectrum, alpha=rmt_alpha).m_hat, None
