"""Seeded Monte-Carlo benchmark sweeps with CSV output.

A sweep runs every configured algorithm on the same freshly drawn problem
instance per trial (paired comparison) over a grid of either inverse noise
levels in dB (``noise`` / ``flops-trace`` kinds, fixed sparsity) or
sparsity values (``sparsity`` kind, fixed noise level).  Child random
streams are derived from the master seed and the (grid index, trial index)
pair via ``numpy.random.SeedSequence`` spawn keys, so results are
reproducible and trials are independent work units that may execute in
parallel; aggregation always reduces in trial-index order.

Config files are plain ``key = value`` text ('#' starts a comment); lists
are comma-separated.  The noise axis is the inverse noise level
``inv_noise_db`` = 10*log10(1/sigma_n^2).

Output CSV header (iteration is empty except for flops-trace rows):

    algorithm,sweep_kind,sweep_value,iteration,trials,ser_mean,ser_stderr,iters_mean,flops_mean
"""

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from threadpoolctl import threadpool_limits

from .algorithms import ALGORITHMS, RecoveryConfig, recover
from .exceptions import ConfigurationError
from .model import (
    Prior,
    inv_noise_db_to_sigma_sq,
    make_instance,
    quantize_final,
    ser,
)

CSV_HEADER = (
    "algorithm,sweep_kind,sweep_value,iteration,trials,"
    "ser_mean,ser_stderr,iters_mean,flops_mean"
)
RAW_HEADER = "algorithm,sweep_kind,sweep_value,trial,iteration,ser,iterations,flops"

SWEEP_KINDS = ("noise", "sparsity", "flops-trace")


@dataclass(frozen=True)
class SweepConfig:
    """Description of one benchmark experiment."""

    sweep: str
    L: int
    K: int
    grid: tuple
    algorithms: tuple
    trials: int
    master_seed: int
    out: str
    alphabet: str = "ternary"
    s: int = None
    inv_noise_db: float = None
    workers: int = 1
    max_iterations: int = 20
    convergence_tol: float = 1e-8
    variance_mode: str = "AU"
    alpha_safety: float = None  # None: regime-dependent default
    raw_out: str = None

    def __post_init__(self):
        if self.sweep not in SWEEP_KINDS:
            raise ConfigurationError(f"sweep must be one of {SWEEP_KINDS}")
        if not 1 <= self.K < self.L:
            raise ConfigurationError(f"need 1 <= K < L, got K={self.K}, L={self.L}")
        if len(self.grid) == 0:
            raise ConfigurationError("sweep grid must be non-empty")
        if self.trials < 1:
            raise ConfigurationError("trials must be >= 1")
        if self.workers < 1:
            raise ConfigurationError("workers must be >= 1")
        if not self.algorithms:
            raise ConfigurationError("no algorithms selected")
        unknown = [a for a in self.algorithms if a not in ALGORITHMS]
        if unknown:
            raise ConfigurationError(f"unknown algorithms: {unknown}")
        if self.alphabet != "ternary":
            raise ConfigurationError("only the ternary alphabet is supported")
        if self.sweep in ("noise", "flops-trace"):
            if self.s is None:
                raise ConfigurationError(f"{self.sweep} sweep requires fixed s")
        else:
            if self.inv_noise_db is None:
                raise ConfigurationError("sparsity sweep requires fixed inv_noise_db")
            for v in self.grid:
                if int(v) != v:
                    raise ConfigurationError("sparsity grid values must be integers")


@dataclass(frozen=True)
class ResultRow:
    """One aggregated CSV record."""

    algorithm: str
    sweep_kind: str
    sweep_value: float
    iteration: int  # None for non-trace kinds
    trials: int
    ser_mean: float
    ser_stderr: float
    iters_mean: float
    flops_mean: float


def trial_instance(config, grid_value, grid_index, trial_index):
    """Draw the problem instance of one (grid point, trial) cell.

    The child stream is SeedSequence(master_seed, spawn_key=(grid_index,
    trial_index)), so the instance is independent of which algorithms run
    on it.
    """
    if config.sweep == "sparsity":
        s = int(grid_value)
        db = config.inv_noise_db
    else:
        s = config.s
        db = float(grid_value)
    seq = np.random.SeedSequence(
        config.master_seed, spawn_key=(int(grid_index), int(trial_index))
    )
    rng = np.random.default_rng(seq)
    prior = Prior.ternary(config.L, s)
    sigma_n_sq = inv_noise_db_to_sigma_sq(db)
    return make_instance(config.K, config.L, prior, sigma_n_sq, rng)


def _run_trial(args):
    config, grid_value, grid_index, trial_index = args
    instance = trial_instance(config, grid_value, grid_index, trial_index)
    want_trace = config.sweep == "flops-trace"
    out = {}
    for name in config.algorithms:
        rc = RecoveryConfig(
            algorithm=name,
            max_iterations=config.max_iterations,
            convergence_tol=config.convergence_tol,
            variance_mode=config.variance_mode,
            alpha_safety=config.alpha_safety,
        )
        result = recover(instance, rc)
        entry = {
            "ser": ser(result.x_hat_quantized, instance.x_true),
            "iters": result.iterations_run,
            "flops": result.trace.flops[-1],
        }
        if want_trace:
            entry["trace_ser"] = [
                ser(quantize_final(x, instance.prior), instance.x_true)
                for x in result.trace.x_hat
            ]
            entry["trace_flops"] = list(result.trace.flops)
        out[name] = entry
    return out


def _limit_blas_threads():
    # the per-trial matrices are small; one BLAS thread per worker avoids
    # heavy oversubscription losses
    threadpool_limits(1)


def _map_trials(config, grid_value, grid_index):
    payloads = [
        (config, grid_value, grid_index, t) for t in range(config.trials)
    ]
    if config.workers == 1:
        with threadpool_limits(1):
            return [_run_trial(p) for p in payloads]
    with ProcessPoolExecutor(
        max_workers=config.workers, initializer=_limit_blas_threads
    ) as pool:
        # map() preserves submission order: reduction stays in trial order
        return list(pool.map(_run_trial, payloads, chunksize=8))


def _stderr(values):
    if len(values) < 2:
        return 0.0
    return float(np.std(values, ddof=1) / np.sqrt(len(values)))


def run_sweep(config):
    """Execute the sweep, write the CSV (and optional raw CSV), and return
    the aggregated rows."""
    rows = []
    raw_rows = []
    for grid_index, grid_value in enumerate(config.grid):
        trials = _map_trials(config, grid_value, grid_index)
        for name in config.algorithms:
            sers = np.array([t[name]["ser"] for t in trials])
            iters = np.array([t[name]["iters"] for t in trials], dtype=np.float64)
            flops = np.array([t[name]["flops"] for t in trials], dtype=np.float64)
            if config.sweep == "flops-trace":
                rows.extend(
                    _trace_rows(config, name, grid_value, trials, iters)
                )
            else:
                rows.append(
                    ResultRow(
                        algorithm=name,
                        sweep_kind=config.sweep,
                        sweep_value=grid_value,
                        iteration=None,
                        trials=config.trials,
                        ser_mean=float(np.mean(sers)),
                        ser_stderr=_stderr(sers),
                        iters_mean=float(np.mean(iters)),
                        flops_mean=float(np.mean(flops)),
                    )
                )
            if config.raw_out:
                for trial_index, t in enumerate(trials):
                    raw_rows.append(
                        (name, config.sweep, grid_value, trial_index, None,
                         t[name]["ser"], t[name]["iters"], t[name]["flops"])
                    )
                    if config.sweep == "flops-trace":
                        e = t[name]
                        for it in range(1, config.max_iterations + 1):
                            idx = min(it, len(e["trace_ser"])) - 1
                            raw_rows.append(
                                (name, config.sweep, grid_value, trial_index, it,
                                 e["trace_ser"][idx], e["iters"], e["trace_flops"][idx])
                            )
    _write_csv(config.out, rows)
    if config.raw_out:
        _write_raw(config.raw_out, raw_rows)
    return rows


def flops_trace(config):
    """Run a flops-trace sweep (per-iteration SER over cumulative FLOPs)."""
    if config.sweep != "flops-trace":
        raise ConfigurationError("flops_trace requires sweep = flops-trace")
    return run_sweep(config)


def _trace_rows(config, name, grid_value, trials, iters):
    """One row per iteration index, carrying converged trials forward."""
    rows = []
    for it in range(1, config.max_iterations + 1):
        sers_t = []
        flops_t = []
        for t in trials:
            e = t[name]
            idx = min(it, len(e["trace_ser"])) - 1
            sers_t.append(e["trace_ser"][idx])
            flops_t.append(e["trace_flops"][idx])
        sers_t = np.array(sers_t)
        rows.append(
            ResultRow(
                algorithm=name,
                sweep_kind=config.sweep,
                sweep_value=grid_value,
                iteration=it,
                trials=config.trials,
                ser_mean=float(np.mean(sers_t)),
                ser_stderr=_stderr(sers_t),
                iters_mean=float(np.mean(iters)),
                flops_mean=float(np.mean(np.array(flops_t, dtype=np.float64))),
            )
        )
    return rows


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def _write_csv(path, rows):
    lines = [CSV_HEADER]
    for r in rows:
        lines.append(
            ",".join(
                [
                    r.algorithm,
                    r.sweep_kind,
                    _fmt(r.sweep_value),
                    _fmt(r.iteration),
                    str(r.trials),
                    _fmt(r.ser_mean),
                    _fmt(r.ser_stderr),
                    _fmt(r.iters_mean),
                    _fmt(r.flops_mean),
                ]
            )
        )
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def _write_raw(path, raw_rows):
    lines = [RAW_HEADER]
    for name, kind, gv, trial, it, s_, iters, flops in raw_rows:
        lines.append(
            ",".join(
                [name, kind, _fmt(gv), str(trial), _fmt(it), _fmt(s_),
                 str(int(iters)), str(int(flops))]
            )
        )
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


# --- config file parsing -------------------------------------------------

_INT_KEYS = {"L", "K", "s", "trials", "seed", "workers", "max_iterations"}
_FLOAT_KEYS = {"inv_noise_db", "convergence_tol", "alpha_safety"}
_LIST_KEYS = {"grid", "algorithms"}


def parse_config(path, overrides=None):
    """Parse a ``key = value`` config file into a :class:`SweepConfig`.

    ``overrides`` (a dict) replaces values after parsing; used by the CLI
    flags.  Any syntax or consistency problem raises
    :class:`ConfigurationError`.
    """
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as err:
        raise ConfigurationError(f"cannot read config file: {err}") from err
    raw = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        raw[key] = value
    if overrides:
        for key, value in overrides.items():
            if value is not None:
                raw[key] = value
    return _build_config(raw)


def _build_config(raw):
    known = {
        "sweep", "L", "K", "alphabet", "grid", "s", "inv_noise_db",
        "algorithms", "trials", "seed", "out", "workers", "max_iterations",
        "convergence_tol", "variance_mode", "alpha_safety", "raw_out",
    }
    unknown = set(raw) - known
    if unknown:
        raise ConfigurationError(f"unknown config keys: {sorted(unknown)}")
    for key in ("sweep", "L", "K", "grid", "algorithms", "trials", "out"):
        if key not in raw:
            raise ConfigurationError(f"missing required config key: {key}")
    values = {}
    try:
        for key, text in raw.items():
            if key in _LIST_KEYS:
                items = [item.strip() for item in str(text).split(",") if item.strip()]
                if key == "grid":
                    values[key] = tuple(float(item) for item in items)
                else:
                    values[key] = tuple(items)
            elif key in _INT_KEYS:
                values[key] = int(text)
            elif key in _FLOAT_KEYS:
                values[key] = float(text)
            else:
                values[key] = str(text)
    except ValueError as err:
        raise ConfigurationError(f"bad config value: {err}") from err
    values["master_seed"] = values.pop("seed", 0)
    return SweepConfig(**values)


def main(argv=None):
    """CLI entry point; returns the process exit code."""
    parser = argparse.ArgumentParser(
        prog="bench",
        description="Monte-Carlo sparse-recovery benchmark (SER and FLOPs).",
    )
    parser.add_argument("--config", help="path to a key = value sweep config")
    parser.add_argument("--algorithms", help="comma-separated algorithm subset")
    parser.add_argument("--trials", type=int, help="override trial count")
    parser.add_argument("--seed", type=int, help="override master seed")
    parser.add_argument("--out", help="override output CSV path")
    parser.add_argument(
        "--list-algorithms", action="store_true", help="print algorithm names"
    )
    args = parser.parse_args(argv)

    if args.list_algorithms:
        for name in ALGORITHMS:
            print(name)
        return 0
    if not args.config:
        print("error: --config is required", file=sys.stderr)
        return 2
    try:
        config = parse_config(
            args.config,
            overrides={
                "algorithms": args.algorithms,
                "trials": args.trials,
                "seed": args.seed,
                "out": args.out,
            },
        )
    except ConfigurationError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2
    try:
        rows = run_sweep(config)
    except ConfigurationError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2
    except OSError as err:
        print(f"i/o error: {err}", file=sys.stderr)
        return 3
    print(f"wrote {len(rows)} rows to {config.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
