"""Seeded experiment harness: scenario presets, sweeps, and theory checks.

Replication r of sweep value v (index i) under master seed S draws its own
problem seed from ``SeedSequence(S, spawn_key=(i, r))``, so results never
depend on execution order or worker count.  Decode wall times are kept out
of the results CSV (they are the one non-deterministic quantity) and go to
a ``*.timing.csv`` sidecar instead.
"""

from __future__ import annotations

import dataclasses
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .continuation import decode_l1
from .least_squares import decode_ls
from .metrics import DecodeReport, aggregate, format_real, report
from .sensing import ModelParams, generate, verify_population_identity

__all__ = [
    "SWEEPABLE",
    "DECODERS",
    "SCENARIOS",
    "ExperimentConfig",
    "RepRow",
    "AggRow",
    "ExperimentResult",
    "TheoryCheck",
    "derive_seed",
    "load_config_file",
    "run_experiment",
    "write_experiment_csv",
    "read_experiment_csv",
    "check_population_identity",
    "check_scaling_ls",
    "check_scaling_l1",
    "run_theory_checks",
    "write_theory_csv",
    "EXPERIMENT_COLUMNS",
]

SWEEPABLE = ("m", "n", "s", "nu", "sigma", "flip_prob")
DECODERS = ("ls", "l1-pdasc")

_INT_FIELDS = ("m", "n", "s")


def _steps(start, stop, step):
    count = int(round((stop - start) / step)) + 1
    return tuple(round(start + k * step, 10) for k in range(count))


# Named parameter sets {m, n, s, nu, sigma, flip_prob}; "sweep" marks the
# swept field and its grid.  "large" gates the long-running presets behind
# the CLI's --large flag.
SCENARIOS = {
    "l1-baseline": dict(
        params=dict(m=500, n=1000, s=5, nu=0.1, sigma=0.1, flip_prob=0.01),
        decoder="l1-pdasc",
    ),
    "l1-noise": dict(
        params=dict(m=500, n=1000, s=5, nu=0.3, sigma=0.3, flip_prob=0.05),
        decoder="l1-pdasc",
    ),
    "l1-heavy": dict(
        params=dict(m=500, n=1000, s=5, nu=0.1, sigma=0.5, flip_prob=0.10),
        decoder="l1-pdasc",
    ),
    "l1-mid-baseline": dict(
        params=dict(m=800, n=2000, s=10, nu=0.1, sigma=0.1, flip_prob=0.01),
        decoder="l1-pdasc",
    ),
    "l1-mid-noise": dict(
        params=dict(m=800, n=2000, s=10, nu=0.3, sigma=0.2, flip_prob=0.03),
        decoder="l1-pdasc",
    ),
    "l1-mid-heavy": dict(
        params=dict(m=800, n=2000, s=10, nu=0.5, sigma=0.3, flip_prob=0.05),
        decoder="l1-pdasc",
    ),
    "l1-large-baseline": dict(
        params=dict(m=5000, n=20000, s=50, nu=0.0, sigma=0.1, flip_prob=0.01),
        decoder="l1-pdasc",
        large=True,
    ),
    "l1-large-noise": dict(
        params=dict(m=5000, n=20000, s=50, nu=0.0, sigma=0.2, flip_prob=0.03),
        decoder="l1-pdasc",
        large=True,
    ),
    "l1-large-heavy": dict(
        params=dict(m=5000, n=20000, s=50, nu=0.0, sigma=0.3, flip_prob=0.05),
        decoder="l1-pdasc",
        large=True,
    ),
    "path-demo": dict(
        params=dict(m=400, n=1000, s=5, nu=0.5, sigma=0.01, flip_prob=0.025),
        decoder="l1-pdasc",
    ),
    "ls-noise-sweep": dict(
        params=dict(m=1000, n=10, s=10, nu=0.3, sigma=0.0, flip_prob=0.025),
        decoder="ls",
        sweep=("sigma", _steps(0.0, 0.5, 0.05)),
    ),
    "ls-flip-sweep": dict(
        params=dict(m=1000, n=10, s=10, nu=0.3, sigma=0.01, flip_prob=0.0),
        decoder="ls",
        sweep=("flip_prob", _steps(0.0, 0.10, 0.01)),
    ),
    "ls-flip-reversed": dict(
        params=dict(m=1000, n=10, s=10, nu=0.3, sigma=0.01, flip_prob=0.90),
        decoder="ls",
        sweep=("flip_prob", _steps(0.90, 1.00, 0.01)),
    ),
    "support-vs-sparsity": dict(
        params=dict(m=500, n=1000, s=1, nu=0.1, sigma=0.05, flip_prob=0.01),
        decoder="l1-pdasc",
        sweep=("s", (1, 3, 5, 7, 9, 11)),
    ),
    "support-vs-noise": dict(
        params=dict(m=500, n=1000, s=5, nu=0.3, sigma=0.0, flip_prob=0.05),
        decoder="l1-pdasc",
        sweep=("sigma", _steps(0.0, 0.6, 0.1)),
    ),
    "support-vs-flips": dict(
        params=dict(m=500, n=1000, s=5, nu=0.1, sigma=0.01, flip_prob=0.0),
        decoder="l1-pdasc",
        sweep=("flip_prob", _steps(0.0, 0.15, 0.03)),
    ),
    "support-vs-flips-reversed": dict(
        params=dict(m=500, n=1000, s=5, nu=0.1, sigma=0.01, flip_prob=0.85),
        decoder="l1-pdasc",
        sweep=("flip_prob", _steps(0.85, 1.00, 0.03)),
    ),
}


@dataclass(frozen=True)
class ExperimentConfig:
    """A named scenario: model parameters, replications, decoder, sweep."""

    scenario: str
    params: ModelParams
    replications: int = 100
    decoder: str = "l1-pdasc"
    sweep: tuple[str, tuple] | None = None
    out: str | None = None

    def __post_init__(self):
        if self.replications < 1:
            raise ValueError(f"replications must be >= 1, got {self.replications}")
        if self.decoder not in DECODERS:
            raise ValueError(f"decoder must be one of {DECODERS}, got {self.decoder!r}")
        if self.sweep is not None and self.sweep[0] not in SWEEPABLE:
            raise ValueError(
                f"sweep parameter must be one of {SWEEPABLE}, got {self.sweep[0]!r}"
            )


def derive_seed(master_seed, sweep_index, rep):
    """Problem seed of replication ``rep`` at sweep position ``sweep_index``."""
    seq = np.random.SeedSequence(master_seed, spawn_key=(sweep_index, rep))
    return int(seq.generate_state(1, np.uint64)[0])


def config_from_scenario(name, seed=0, replications=100, out=None, allow_large=False):
    """Instantiate a preset by name."""
    if name not in SCENARIOS:
        raise ValueError(f"unknown scenario {name!r}; choices: {sorted(SCENARIOS)}")
    preset = SCENARIOS[name]
    if preset.get("large") and not allow_large:
        raise ValueError(f"scenario {name!r} is large-scale; pass --large to run it")
    params = ModelParams(seed=seed, **preset["params"])
    return ExperimentConfig(
        scenario=name,
        params=params,
        replications=replications,
        decoder=preset["decoder"],
        sweep=preset.get("sweep"),
        out=out,
    )


def load_config_file(path):
    """Parse a flat key=value config file into an ExperimentConfig.

    Recognized keys: scenario, m, n, s, nu, sigma, flip, seed, reps,
    decoder, sweep, sweep_values (comma-separated), out.  Lines starting
    with '#' are comments.
    """
    raw = {}
    for line_no, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{line_no}: expected key=value, got {line!r}")
        key, value = line.split("=", 1)
        raw[key.strip()] = value.strip()

    params = ModelParams(
        m=int(raw.get("m", 100)),
        n=int(raw.get("n", 100)),
        s=int(raw.get("s", 1)),
        nu=float(raw.get("nu", 0.0)),
        sigma=float(raw.get("sigma", 0.0)),
        flip_prob=float(raw.get("flip", 0.0)),
        seed=int(raw.get("seed", 0)),
    )
    sweep = None
    if "sweep" in raw:
        name = raw["sweep"]
        if "sweep_values" not in raw:
            raise ValueError(f"{path}: sweep={name} given without sweep_values")
        caster = int if name in _INT_FIELDS else float
        values = tuple(caster(v) for v in raw["sweep_values"].split(","))
        sweep = (name, values)
    return ExperimentConfig(
        scenario=raw.get("scenario", "custom"),
        params=params,
        replications=int(raw.get("reps", 100)),
        decoder=raw.get("decoder", "l1-pdasc"),
        sweep=sweep,
        out=raw.get("out"),
    )


@dataclass(frozen=True)
class RepRow:
    """One replication's outcome (``error`` set when the decode failed)."""

    sweep_param: str
    sweep_value: float
    rep: int
    seed: int
    params: ModelParams
    report: DecodeReport | None
    ell_bar: int | None
    lambda_hat: float | None
    support_size: int | None
    error: str = ""


@dataclass(frozen=True)
class AggRow:
    """Aggregate over a sweep value's successful replications."""

    sweep_param: str
    sweep_value: float
    count: int
    mean_err_raw: float
    mean_err_descaled: float
    mean_err_optscale: float
    pre_percent: float
    mean_psnr: float
    mean_time: float


@dataclass(frozen=True)
class ExperimentResult:
    config: ExperimentConfig
    rows: list[RepRow]
    aggregates: list[AggRow]


def _with_sweep_value(params, name, value):
    if name in _INT_FIELDS:
        value = int(value)
    return dataclasses.replace(params, **{name: value})


def _decode_one(params, decoder):
    problem = generate(params)
    t0 = time.perf_counter()
    if decoder == "ls":
        estimate = decode_ls(problem)
        x_hat, ell_bar, lambda_hat = estimate.x_ls, None, None
    else:
        x_hat, selection, _ = decode_l1(problem)
        ell_bar, lambda_hat = selection.ell_bar, selection.lambda_hat
    wall = time.perf_counter() - t0
    rep = report(x_hat, problem.truth, wall)
    return rep, ell_bar, lambda_hat, int(np.count_nonzero(x_hat))


def run_experiment(config, threads=1):
    """Run all sweep values x replications; results are order-independent."""
    sweep_param, sweep_values = config.sweep if config.sweep else ("", (math.nan,))
    jobs = []
    for i, value in enumerate(sweep_values):
        params_i = (
            _with_sweep_value(config.params, sweep_param, value)
            if sweep_param
            else config.params
        )
        for r in range(config.replications):
            seed = derive_seed(config.params.seed, i, r)
            jobs.append((sweep_param, value, r, dataclasses.replace(params_i, seed=seed)))

    def run_job(job):
        sweep_param, value, r, params = job
        try:
            rep, ell_bar, lambda_hat, nnz = _decode_one(params, config.decoder)
            return RepRow(
                sweep_param=sweep_param,
                sweep_value=value,
                rep=r,
                seed=params.seed,
                params=params,
                report=rep,
                ell_bar=ell_bar,
                lambda_hat=lambda_hat,
                support_size=nnz,
            )
        except Exception as exc:  # recorded per row; the sweep continues
            return RepRow(
                sweep_param=sweep_param,
                sweep_value=value,
                rep=r,
                seed=params.seed,
                params=params,
                report=None,
                ell_bar=None,
                lambda_hat=None,
                support_size=None,
                error=f"{type(exc).__name__}: {exc}",
            )

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(run_job, jobs))
    else:
        rows = [run_job(job) for job in jobs]

    aggregates = []
    for i, value in enumerate(sweep_values):
        good = [
            r.report
            for r in rows
            if r.report is not None
            and (r.sweep_value == value or (math.isnan(value) and math.isnan(r.sweep_value)))
        ]
        if not good:
            continue
        summary = aggregate(good)
        aggregates.append(
            AggRow(
                sweep_param=sweep_param,
                sweep_value=value,
                count=len(good),
                mean_err_raw=summary.mean_err_raw,
                mean_err_descaled=summary.mean_err_descaled,
                mean_err_optscale=summary.mean_err_optscale,
                pre_percent=summary.pre_percent,
                mean_psnr=float(np.mean([g.psnr for g in good])),
                mean_time=summary.mean_time,
            )
        )
    return ExperimentResult(config=config, rows=rows, aggregates=aggregates)


EXPERIMENT_COLUMNS = (
    "kind",
    "scenario",
    "decoder",
    "sweep_param",
    "sweep_value",
    "rep",
    "seed",
    "m",
    "n",
    "s",
    "nu",
    "sigma",
    "flip_prob",
    "err_raw",
    "err_descaled",
    "err_optscale",
    "support_exact",
    "psnr",
    "pre_percent",
    "ell_bar",
    "lambda_hat",
    "support_size",
    "error",
)


def _cell(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, float):
        return format_real(value)
    return str(value)


def timing_sidecar_path(out):
    return Path(out).with_suffix(".timing.csv")


def write_experiment_csv(result, out):
    """Write the deterministic results CSV plus the timing sidecar.

    The main file carries no wall times, so repeated runs with the same
    seeds are byte-identical regardless of worker count; timings live in
    ``<out stem>.timing.csv``.
    """
    cfg = result.config
    lines = [",".join(EXPERIMENT_COLUMNS)]
    for row in result.rows:
        p = row.params
        rep = row.report
        cells = [
            "rep",
            cfg.scenario,
            cfg.decoder,
            row.sweep_param,
            _cell(float(row.sweep_value)),
            str(row.rep),
            str(row.seed),
            str(p.m),
            str(p.n),
            str(p.s),
            _cell(p.nu),
            _cell(p.sigma),
            _cell(p.flip_prob),
            _cell(rep.err_raw if rep else None),
            _cell(rep.err_descaled if rep else None),
            _cell(rep.err_optscale if rep else None),
            _cell(rep.support_exact if rep else None),
            _cell(rep.psnr if rep else None),
            "",
            _cell(row.ell_bar),
            _cell(row.lambda_hat),
            _cell(row.support_size),
            row.error,
        ]
        lines.append(",".join(cells))
    for agg in result.aggregates:
        cells = [
            "agg",
            cfg.scenario,
            cfg.decoder,
            agg.sweep_param,
            _cell(float(agg.sweep_value)),
            "",
            "",
            "",
            "",
            "",
            "",
            "",
            "",
            _cell(agg.mean_err_raw),
            _cell(agg.mean_err_descaled),
            _cell(agg.mean_err_optscale),
            "",
            _cell(agg.mean_psnr),
            _cell(agg.pre_percent),
            "",
            "",
            "",
            "",
        ]
        lines.append(",".join(cells))
    Path(out).write_text("\n".join(lines) + "\n", encoding="utf-8")

    timing_lines = ["scenario,decoder,sweep_param,sweep_value,rep,wall_time"]
    for row in result.rows:
        wall = row.report.wall_time if row.report else math.nan
        timing_lines.append(
            f"{cfg.scenario},{cfg.decoder},{row.sweep_param},"
            f"{_cell(float(row.sweep_value))},{row.rep},{format_real(wall)}"
        )
    for agg in result.aggregates:
        timing_lines.append(
            f"{cfg.scenario},{cfg.decoder},{agg.sweep_param},"
            f"{_cell(float(agg.sweep_value))},mean,{format_real(agg.mean_time)}"
        )
    timing_sidecar_path(out).write_text("\n".join(timing_lines) + "\n", encoding="utf-8")


def read_experiment_csv(path):
    """Parse a results CSV back into row dictionaries (floats exact)."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    header = lines[0].split(",")
    if tuple(header) != EXPERIMENT_COLUMNS:
        raise ValueError(f"{path}: unexpected header {header}")
    out = []
    for line in lines[1:]:
        cells = line.split(",")
        out.append(dict(zip(header, cells)))
    return out


# ---------------------------------------------------------------------------
# Theory checks


@dataclass(frozen=True)
class TheoryCheck:
    """Outcome of one empirical consistency check."""

    name: str
    passed: bool
    value: float
    lo: float
    hi: float
    details: str


def check_population_identity(mc_samples=100_000, seed=0, tol=0.05):
    """Inverse-covariance-corrected sign correlation recovers the signal."""
    params = ModelParams(
        m=10, n=5, s=5, nu=0.3, sigma=0.1, flip_prob=0.05, seed=seed
    )
    distance = verify_population_identity(params, mc_samples)
    return TheoryCheck(
        name="population-identity",
        passed=distance <= tol,
        value=distance,
        lo=0.0,
        hi=tol,
        details=f"l2 distance at {mc_samples} samples",
    )


def _mean_ls_err(m, reps, seed, block):
    errs = []
    for r in range(reps):
        params = ModelParams(
            m=m, n=10, s=10, nu=0.3, sigma=0.1, flip_prob=0.025,
            seed=derive_seed(seed, block, r),
        )
        problem = generate(params)
        est = decode_ls(problem)
        errs.append(report(est.x_ls, problem.truth).err_descaled)
    return float(np.mean(errs))


def check_scaling_ls(reps=50, seed=0, lo=0.35, hi=0.65):
    """Quadrupling m must roughly halve the least-squares error."""
    err_small = _mean_ls_err(1000, reps, seed, block=0)
    err_large = _mean_ls_err(4000, reps, seed, block=1)
    ratio = err_large / err_small
    return TheoryCheck(
        name="scaling-ls",
        passed=lo <= ratio <= hi,
        value=ratio,
        lo=lo,
        hi=hi,
        details=f"mean descaled error {err_small:.4f} (m=1000) -> {err_large:.4f} (m=4000)",
    )


def _mean_l1_err(m, reps, seed, block):
    errs = []
    for r in range(reps):
        params = ModelParams(
            m=m, n=1000, s=5, nu=0.1, sigma=0.1, flip_prob=0.01,
            seed=derive_seed(seed, block, r),
        )
        problem = generate(params)
        x_hat, _, _ = decode_l1(problem)
        errs.append(report(x_hat, problem.truth).err_optscale)
    return float(np.mean(errs))


def check_scaling_l1(reps=50, seed=0, lo=0.35, hi=0.65):
    """Quadrupling m must roughly halve the sparse decoder's error."""
    err_small = _mean_l1_err(400, reps, seed, block=0)
    err_large = _mean_l1_err(1600, reps, seed, block=1)
    ratio = err_large / err_small
    return TheoryCheck(
        name="scaling-l1",
        passed=lo <= ratio <= hi,
        value=ratio,
        lo=lo,
        hi=hi,
        details=f"mean opt-scale error {err_small:.4f} (m=400) -> {err_large:.4f} (m=1600)",
    )


_THEORY_CHECKS = {
    "population-identity": check_population_identity,
    "scaling-ls": check_scaling_ls,
    "scaling-l1": check_scaling_l1,
}


def run_theory_checks(which="all", seed=0, mc_samples=100_000, reps=50):
    """Run the named check (or all of them) and return the outcomes."""
    if which == "all":
        names = list(_THEORY_CHECKS)
    elif which in _THEORY_CHECKS:
        names = [which]
    else:
        raise ValueError(
            f"unknown check {which!r}; choices: {sorted(_THEORY_CHECKS)} or 'all'"
        )
    results = []
    for name in names:
        if name == "population-identity":
            results.append(check_population_identity(mc_samples=mc_samples, seed=seed))
        else:
            results.append(_THEORY_CHECKS[name](reps=reps, seed=seed))
    return results


def write_theory_csv(checks, out):
    lines = ["check,passed,value,lo,hi,details"]
    for c in checks:
        lines.append(
            f"{c.name},{int(c.passed)},{format_real(c.value)},"
            f"{format_real(c.lo)},{format_real(c.hi)},{c.details}"
        )
    Path(out).write_text("\n".join(lines) + "\n", encoding="utf-8")
