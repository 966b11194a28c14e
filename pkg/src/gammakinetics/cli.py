"""Experiment harness and command-line interface.

Subcommands:

* ``exchange``: wealth-exchange run, gamma fit, inequality report;
* ``gas``: N-dimensional collision run on kinetic energies;
* ``fit``: fit and report on samples read from a file;
* ``entropy``: variational stationarity margins for the gamma law;
* ``sweep``: exchange runs over a list of saving propensities.

Configuration comes from defaults, then an optional flat key = value
config file (``--config``), then command-line flags; flags mirror config
keys one to one. The default output directory can be set with the
``GAMMAKINETICS_OUTDIR`` environment variable. Reports are JSON (or a
flat CSV projection with ``--format csv``); plot data is always CSV with
nine-significant-digit decimal values. Wall-clock duration is printed to
stdout but kept out of the output files, so identical configurations
produce byte-identical files.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

import numpy as np

from . import rng
from .errors import ConfigurationError, DomainError, GammaKineticsError
from .exchange import (
    ExchangeParams,
    WealthEnsemble,
    effective_dimension,
    effective_temperature,
    sample_equilibrium,
)
from .gas import GasState, sample_equilibrium_energies
from .entropy import stationarity_check
from .stats import (
    BinSpec,
    GammaParams,
    Histogram,
    gamma_pdf,
    fit_gamma_moments,
    histogram,
    inequality_report,
)

ENV_OUT_DIR = "GAMMAKINETICS_OUTDIR"

MODES = ("exchange", "gas", "fit", "entropy", "sweep")

_MAX_WORKERS = 8


@dataclass(frozen=True)
class ExperimentConfig:
    """Resolved settings of one harness invocation.

    Every field mirrors a config-file key and a CLI flag of the same
    name. ``agents`` counts exchange agents or gas particles;
    ``iterations`` counts trades or collisions.
    """

    mode: str
    saving: float = 0.0
    savings: tuple[float, ...] = (0.0, 0.2, 0.5, 0.8)
    dimension: int = 3
    agents: int = 1000
    iterations: int = 1_000_000
    seed: int = 1
    replicates: int = 1
    bins: int = 50
    out: str = ""
    format: str = "json"
    beta: float = 1.0
    trials: int = 100
    amplitude: float = 0.01
    speed: float = 1.0
    input: str = ""

    def validate(self) -> None:
        """Check every field against the owning module's preconditions."""
        if self.mode not in MODES:
            raise ConfigurationError(f"unknown mode {self.mode!r}")
        if self.format not in ("json", "csv"):
            raise ConfigurationError("format must be 'json' or 'csv'")
        if self.replicates < 1:
            raise ConfigurationError("replicates must be >= 1")
        if self.bins < 2:
            raise ConfigurationError("bins must be >= 2")
        if self.seed < 0:
            raise ConfigurationError("seed must be >= 0")
        if self.mode in ("exchange", "sweep", "gas"):
            if self.agents < 2:
                raise ConfigurationError("agents must be >= 2")
            if (self.iterations - self.iterations // 2) < self.agents:
                raise ConfigurationError(
                    "iterations too few: the second half must cover one snapshot interval"
                )
        if self.mode == "exchange":
            ExchangeParams(self.saving, self.iterations, self.seed)
        if self.mode == "sweep":
            if not self.savings:
                raise ConfigurationError("sweep needs at least one saving value")
            for s in self.savings:
                ExchangeParams(s, self.iterations, self.seed)
        if self.mode == "gas":
            if self.dimension < 1:
                raise ConfigurationError("dimension must be >= 1")
            if self.speed <= 0.0:
                raise ConfigurationError("speed must be > 0")
        if self.mode == "entropy":
            if self.dimension < 1:
                raise ConfigurationError("dimension must be >= 1")
            if self.beta <= 0.0:
                raise ConfigurationError("beta must be > 0")
            if self.trials < 10:
                raise ConfigurationError("trials must be >= 10")
            if not 0.0 < self.amplitude <= 1e-2:
                raise ConfigurationError("amplitude must lie in (0, 1e-2]")
        if self.mode == "fit" and not self.input:
            raise ConfigurationError("fit mode needs an input file")

    def echo(self) -> dict:
        d = asdict(self)
        d["savings"] = list(self.savings)
        return d


@dataclass
class RunReport:
    """Everything a finished experiment reports.

    ``duration_seconds`` is measured wall-clock time; it is kept on the
    object and printed, but excluded from serialized files so reruns are
    byte-identical.
    """

    mode: str
    config: dict
    rng_provenance: dict
    files: dict
    samples: dict | None = None
    fit: dict | None = None
    predicted: dict | None = None
    temperature: dict | None = None
    inequality: dict | None = None
    entropy: dict | None = None
    sweep: list | None = None
    duration_seconds: float | None = None

    def to_file_dict(self) -> dict:
        out = {
            "mode": self.mode,
            "config": self.config,
            "rng": self.rng_provenance,
            "files": self.files,
        }
        for key in ("samples", "fit", "predicted", "temperature", "inequality", "entropy", "sweep"):
            value = getattr(self, key)
            if value is not None:
                out[key] = value
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_file_dict(), indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "RunReport":
        d = json.loads(text)
        return cls(
            mode=d["mode"],
            config=d["config"],
            rng_provenance=d["rng"],
            files=d["files"],
            samples=d.get("samples"),
            fit=d.get("fit"),
            predicted=d.get("predicted"),
            temperature=d.get("temperature"),
            inequality=d.get("inequality"),
            entropy=d.get("entropy"),
            sweep=d.get("sweep"),
        )


# ---------------------------------------------------------------------------
# serialization helpers


def _format_value(v: float) -> str:
    """Decimal notation with nine significant digits."""
    if v == int(v) and abs(v) < 1e15:
        pass  # positional formatting below handles integral values cleanly
    return np.format_float_positional(
        float(v), precision=9, unique=False, fractional=False, trim="-"
    )


def _plot_data_text(hist: Histogram, curves: dict[str, np.ndarray]) -> str:
    centers = hist.centers
    columns = [centers, hist.densities]
    names = ["x", "empirical_density"]
    for name, values in curves.items():
        arr = np.asarray(values, dtype=np.float64)
        if arr.shape != centers.shape:
            raise DomainError(
                f"curve {name!r} must be sampled at the {centers.size} bin centers"
            )
        columns.append(arr)
        names.append(name)
    lines = [",".join(names)]
    for row in zip(*columns):
        lines.append(",".join(_format_value(v) for v in row))
    return "\n".join(lines) + "\n"


def emit_plot_data(hist: Histogram, curves: dict[str, np.ndarray], path: str | Path) -> None:
    """Write columnar plot data: x, empirical density, one column per curve.

    One row per histogram bin, a header row naming the columns, values in
    decimal notation with nine significant digits.
    """
    text = _plot_data_text(hist, curves)
    _write_files([(Path(path), text)])


def _flatten(prefix: str, value, rows: list[tuple[str, str]]) -> None:
    if isinstance(value, dict):
        for k, v in value.items():
            _flatten(f"{prefix}.{k}" if prefix else str(k), v, rows)
    elif isinstance(value, (list, tuple)):
        for i, v in enumerate(value):
            _flatten(f"{prefix}.{i}", v, rows)
    elif isinstance(value, bool):
        rows.append((prefix, "true" if value else "false"))
    elif isinstance(value, float):
        rows.append((prefix, repr(value)))
    elif value is None:
        rows.append((prefix, ""))
    else:
        rows.append((prefix, str(value)))


def report_to_csv(report: RunReport) -> str:
    """Flat key,value projection of the report (full float fidelity)."""
    rows: list[tuple[str, str]] = []
    _flatten("", report.to_file_dict(), rows)
    return "\n".join(f"{k},{v}" for k, v in rows) + "\n"


def _write_files(pairs: list[tuple[Path, str]]) -> None:
    """Write every file through a temporary name; leave nothing partial."""
    done: list[Path] = []
    tmps: list[Path] = []
    try:
        for path, text in pairs:
            path.parent.mkdir(parents=True, exist_ok=True)
            tmp = path.with_name(path.name + ".tmp")
            tmp.write_text(text)
            tmps.append(tmp)
        for (path, _), tmp in zip(pairs, tmps):
            os.replace(tmp, path)
            done.append(path)
    except BaseException:
        for tmp in tmps:
            tmp.unlink(missing_ok=True)
        for path in done:
            path.unlink(missing_ok=True)
        raise


def _float_list(arr) -> list[float]:
    return [float(v) for v in np.asarray(arr).ravel()]


def _decimate_lorenz(curve: np.ndarray, points: int = 101) -> list[list[float]]:
    idx = np.unique(np.round(np.linspace(0, curve.shape[0] - 1, points)).astype(int))
    return [[float(curve[i, 0]), float(curve[i, 1])] for i in idx]


# ---------------------------------------------------------------------------
# experiment drivers


def _pooled_exchange(config: ExperimentConfig, saving: float, stream_base: int):
    ensemble = WealthEnsemble.equal(config.agents)
    runs = []

    def one(r: int):
        params = ExchangeParams(saving, config.iterations, config.seed, stream=stream_base + r)
        return sample_equilibrium(ensemble, params)

    with ThreadPoolExecutor(max_workers=min(config.replicates, _MAX_WORKERS)) as pool:
        runs = list(pool.map(one, range(config.replicates)))
    pooled = np.concatenate([r.values for r in runs])
    return runs, pooled


def _analysis_sections(pooled: np.ndarray, per_rep: list[GammaParams], bins: int,
                       predicted_shape: float | None):
    fitted = fit_gamma_moments(pooled)
    report = inequality_report(pooled)
    mean = float(pooled.mean())
    hist = histogram(pooled, BinSpec(count=bins))
    curves = {"fitted_density": gamma_pdf(hist.centers, fitted)}
    fit_section = {
        "shape": fitted.shape,
        "rate": fitted.rate,
        "per_replicate": [{"shape": p.shape, "rate": p.rate} for p in per_rep],
    }
    predicted_section = None
    temperature_section = None
    if predicted_shape is not None:
        dimension = 2.0 * predicted_shape
        predicted = GammaParams(shape=predicted_shape, rate=predicted_shape / mean)
        curves["predicted_density"] = gamma_pdf(hist.centers, predicted)
        predicted_section = {
            "shape": predicted_shape,
            "dimension": dimension,
            "rate": predicted.rate,
        }
        if dimension >= 2.0:  # the temperature relation is defined for N >= 2
            temperature_section = {
                "fitted": 1.0 / fitted.rate,
                "predicted": effective_temperature(mean, dimension),
            }
            temperature_section["ratio"] = (
                temperature_section["fitted"] / temperature_section["predicted"]
            )
    inequality_section = {
        "gini": report.gini,
        "ks_statistic": report.ks_statistic,
        "lorenz": _decimate_lorenz(report.lorenz),
    }
    samples_section = {"count": int(pooled.size), "mean": mean}
    return fit_section, predicted_section, temperature_section, inequality_section, samples_section, hist, curves


def _run_exchange_mode(config: ExperimentConfig):
    runs, pooled = _pooled_exchange(config, config.saving, 0)
    per_rep = [fit_gamma_moments(r.values) for r in runs]
    fit_s, pred_s, temp_s, ineq_s, samp_s, hist, curves = _analysis_sections(
        pooled, per_rep, config.bins, effective_dimension(config.saving)
    )
    samp_s["snapshots"] = sum(r.snapshots for r in runs)
    samp_s["replicates"] = config.replicates
    files = {"plot": "exchange_hist.csv", "report": f"report.{config.format}"}
    report = RunReport(
        mode="exchange",
        config=config.echo(),
        rng_provenance={
            "algorithm": rng.ALGORITHM,
            "seed": config.seed,
            "streams": list(range(config.replicates)),
        },
        files=files,
        samples=samp_s,
        fit=fit_s,
        predicted=pred_s,
        temperature=temp_s,
        inequality=ineq_s,
    )
    plots = [(files["plot"], _plot_data_text(hist, curves))]
    return report, plots


def _run_gas_mode(config: ExperimentConfig):
    def one(r: int):
        state = GasState.isotropic(
            config.agents, config.dimension, config.speed,
            seed=config.seed, stream=2 * r + 1,
        )
        return sample_equilibrium_energies(state, config.iterations, config.seed, stream=2 * r)

    with ThreadPoolExecutor(max_workers=min(config.replicates, _MAX_WORKERS)) as pool:
        runs = list(pool.map(one, range(config.replicates)))
    pooled = np.concatenate([r.values for r in runs])
    per_rep = [fit_gamma_moments(r.values) for r in runs]
    fit_s, pred_s, temp_s, ineq_s, samp_s, hist, curves = _analysis_sections(
        pooled, per_rep, config.bins, config.dimension / 2.0
    )
    samp_s["snapshots"] = sum(r.snapshots for r in runs)
    samp_s["replicates"] = config.replicates
    files = {"plot": "gas_hist.csv", "report": f"report.{config.format}"}
    report = RunReport(
        mode="gas",
        config=config.echo(),
        rng_provenance={
            "algorithm": rng.ALGORITHM,
            "seed": config.seed,
            "streams": [2 * r for r in range(config.replicates)],
            "init_streams": [2 * r + 1 for r in range(config.replicates)],
        },
        files=files,
        samples=samp_s,
        fit=fit_s,
        predicted=pred_s,
        temperature=temp_s,
        inequality=ineq_s,
    )
    plots = [(files["plot"], _plot_data_text(hist, curves))]
    return report, plots


def _run_fit_mode(config: ExperimentConfig):
    path = Path(config.input)
    if not path.is_file():
        raise ConfigurationError(f"input file not found: {path}")
    try:
        samples = np.loadtxt(path, ndmin=1).ravel()
    except Exception as exc:
        raise ConfigurationError(f"could not parse input file: {exc}") from None
    fit_s, pred_s, temp_s, ineq_s, samp_s, hist, curves = _analysis_sections(
        samples, [], config.bins, None
    )
    fit_s.pop("per_replicate")
    files = {"plot": "fit_hist.csv", "report": f"report.{config.format}"}
    report = RunReport(
        mode="fit",
        config=config.echo(),
        rng_provenance={"algorithm": "none (no sampling)"},
        files=files,
        samples=samp_s,
        fit=fit_s,
        inequality=ineq_s,
    )
    plots = [(files["plot"], _plot_data_text(hist, curves))]
    return report, plots


def _run_entropy_mode(config: ExperimentConfig):
    result = stationarity_check(
        config.dimension,
        rate=config.beta,
        trials=config.trials,
        amplitude=config.amplitude,
        seed=config.seed,
    )
    files = {"margins": "entropy_margins.csv", "report": f"report.{config.format}"}
    margin_rows = ["trial,margin"]
    for i, m in enumerate(result.margins):
        margin_rows.append(f"{i},{_format_value(m)}")
    report = RunReport(
        mode="entropy",
        config=config.echo(),
        rng_provenance={
            "algorithm": "numpy PCG64 (perturbation shapes)",
            "seed": config.seed,
        },
        files=files,
        entropy={
            "dimension": result.dimension,
            "beta": result.rate,
            "amplitude": result.amplitude,
            "trials": result.trials,
            "resampled": result.resampled,
            "min_margin": result.min_margin,
            "mean_margin": result.mean_margin,
        },
    )
    plots = [(files["margins"], "\n".join(margin_rows) + "\n")]
    return report, plots


def _run_sweep_mode(config: ExperimentConfig):
    entries = []
    plots = []
    gini_series = []
    for k, saving in enumerate(config.savings):
        runs, pooled = _pooled_exchange(config, saving, k * config.replicates)
        per_rep = [fit_gamma_moments(r.values) for r in runs]
        fit_s, pred_s, temp_s, ineq_s, samp_s, hist, curves = _analysis_sections(
            pooled, per_rep, config.bins, effective_dimension(saving)
        )
        name = f"sweep_hist_saving_{saving:g}.csv"
        plots.append((name, _plot_data_text(hist, curves)))
        gini_series.append(ineq_s["gini"])
        entries.append({
            "saving": saving,
            "plot": name,
            "fit": fit_s,
            "predicted": pred_s,
            "temperature": temp_s,
            "gini": ineq_s["gini"],
            "ks_statistic": ineq_s["ks_statistic"],
        })
    files = {"report": f"report.{config.format}"}
    files.update({f"plot_{i}": entries[i]["plot"] for i in range(len(entries))})
    report = RunReport(
        mode="sweep",
        config=config.echo(),
        rng_provenance={
            "algorithm": rng.ALGORITHM,
            "seed": config.seed,
            "streams": list(range(len(config.savings) * config.replicates)),
        },
        files=files,
        sweep=entries,
        inequality={"gini_by_saving": gini_series},
    )
    return report, plots


_MODE_RUNNERS = {
    "exchange": _run_exchange_mode,
    "gas": _run_gas_mode,
    "fit": _run_fit_mode,
    "entropy": _run_entropy_mode,
    "sweep": _run_sweep_mode,
}


def run_experiment(config: ExperimentConfig) -> RunReport:
    """Validate, run, and write the report and plot files.

    Raises (and writes nothing) if the configuration violates any
    precondition of the owning module.
    """
    config.validate()
    started = time.perf_counter()
    report, plots = _MODE_RUNNERS[config.mode](config)
    out_dir = Path(config.out) if config.out else Path.cwd()
    if config.format == "json":
        report_text = report.to_json()
    else:
        report_text = report_to_csv(report)
    pairs = [(out_dir / name, text) for name, text in plots]
    pairs.append((out_dir / report.files["report"], report_text))
    _write_files(pairs)
    report.duration_seconds = time.perf_counter() - started
    return report


# ---------------------------------------------------------------------------
# configuration sources


_INT_KEYS = {"dimension", "agents", "iterations", "seed", "replicates", "bins", "trials"}
_FLOAT_KEYS = {"saving", "beta", "amplitude", "speed"}
_STR_KEYS = {"mode", "out", "format", "input"}


def _parse_savings(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(part) for part in text.split(",") if part.strip() != "")
    except ValueError:
        raise ConfigurationError(f"could not parse saving list {text!r}") from None


def parse_config_file(path: str | Path) -> dict:
    """Read a flat ``key = value`` file; '#' starts a comment."""
    result: dict = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if key in _INT_KEYS:
            try:
                result[key] = int(value)
            except ValueError:
                raise ConfigurationError(f"{path}:{lineno}: {key} must be an integer") from None
        elif key in _FLOAT_KEYS:
            try:
                result[key] = float(value)
            except ValueError:
                raise ConfigurationError(f"{path}:{lineno}: {key} must be a number") from None
        elif key == "savings":
            result[key] = _parse_savings(value)
        elif key in _STR_KEYS:
            result[key] = value
        else:
            raise ConfigurationError(f"{path}:{lineno}: unknown key {key!r}")
    return result


def build_config(mode: str, file_values: dict, overrides: dict) -> ExperimentConfig:
    """Layer defaults, config-file values, and CLI overrides."""
    values: dict = dict(file_values)
    values.update({k: v for k, v in overrides.items() if v is not None})
    values["mode"] = mode
    if "out" not in values or not values["out"]:
        values["out"] = os.environ.get(ENV_OUT_DIR, "")
    known = {f.name for f in fields(ExperimentConfig)}
    unknown = set(values) - known
    if unknown:
        raise ConfigurationError(f"unknown configuration keys: {sorted(unknown)}")
    return ExperimentConfig(**values)


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="flat key = value configuration file")
    sub.add_argument("--seed", type=int, help="RNG seed")
    sub.add_argument("--out", help="output directory (default: $GAMMAKINETICS_OUTDIR or cwd)")
    sub.add_argument("--format", choices=("json", "csv"), help="report format")
    sub.add_argument("--replicates", type=int, help="independent replicate runs")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gammakinetics",
        description="Kinetic exchange and gas Monte Carlo with gamma-equilibrium analysis",
    )
    subs = parser.add_subparsers(dest="mode", required=True)

    p = subs.add_parser("exchange", help="wealth-exchange equilibrium run")
    p.add_argument("--saving", type=float, help="saving propensity in [0, 1)")
    p.add_argument("--agents", type=int, help="number of agents")
    p.add_argument("--iterations", type=int, help="number of trades")
    p.add_argument("--bins", type=int, help="histogram bins")
    _add_common(p)

    p = subs.add_parser("gas", help="N-dimensional elastic gas run")
    p.add_argument("--dimension", type=int, help="space dimension N")
    p.add_argument("--agents", type=int, help="number of particles")
    p.add_argument("--iterations", type=int, help="number of collisions")
    p.add_argument("--speed", type=float, help="initial common speed")
    p.add_argument("--bins", type=int, help="histogram bins")
    _add_common(p)

    p = subs.add_parser("fit", help="fit samples read from a file")
    p.add_argument("--input", help="file of numbers, whitespace separated")
    p.add_argument("--bins", type=int, help="histogram bins")
    _add_common(p)

    p = subs.add_parser("entropy", help="variational stationarity margins")
    p.add_argument("--dimension", type=int, help="effective dimension N")
    p.add_argument("--beta", type=float, help="inverse temperature")
    p.add_argument("--trials", type=int, help="number of perturbations")
    p.add_argument("--amplitude", type=float, help="relative perturbation size")
    _add_common(p)

    p = subs.add_parser("sweep", help="exchange runs over several saving values")
    p.add_argument("--savings", help="comma-separated saving propensities")
    p.add_argument("--agents", type=int, help="number of agents")
    p.add_argument("--iterations", type=int, help="number of trades per value")
    p.add_argument("--bins", type=int, help="histogram bins")
    _add_common(p)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    overrides = {k: v for k, v in vars(args).items() if k not in ("mode", "config")}
    if "savings" in overrides and overrides["savings"] is not None:
        overrides["savings"] = _parse_savings(overrides["savings"])
    try:
        file_values = parse_config_file(args.config) if args.config else {}
        file_values.pop("mode", None)  # the subcommand decides the mode
        config = build_config(args.mode, file_values, overrides)
        report = run_experiment(config)
    except GammaKineticsError as exc:
        payload = {"error": {"type": type(exc).__name__, "message": str(exc)}}
        print(json.dumps(payload), file=sys.stderr)
        return 2
    out_dir = Path(config.out) if config.out else Path.cwd()
    print(
        f"{config.mode}: wrote {out_dir / report.files['report']} "
        f"in {report.duration_seconds:.2f} s"
    )
    return 0


if __name__ == "__main__":
    sys.exit(main())
