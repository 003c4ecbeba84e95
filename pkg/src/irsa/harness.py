"""Monte Carlo campaigns over a load grid, with predictions and floors
attached per point."""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Mapping, Sequence

import numpy as np
import yaml

from . import __version__
from .degree import DegreeDistribution, make_distribution, resolve_distribution
from .errors import ConfigError, UnknownDistribution
from .fastsim import FrameStats, simulate_frames
from .floor import floor_estimate
from .frame import activity_for_load
from .scaling import ScalingParams, builtin_params, fep_predict, params_from_de, plp_predict

Z95 = 1.959963984540054
FIRST_ROUND = 1024


@dataclass(frozen=True)
class ExperimentConfig:
    dist: DegreeDistribution
    m: int
    load_grid: tuple[float, ...]
    activity: str = "poisson"
    max_frames: int = 1_000_000
    target_errors: int = 200
    seed: int = 0
    workers: int = 1
    emit_floor: bool = False
    emit_prediction: bool = False
    dist_name: str | None = None
    alpha0: float | None = None
    beta0: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "load_grid", tuple(float(g) for g in self.load_grid))
        validate_config(self)

    @property
    def activity_kind(self) -> str:
        return self.activity.split(":", 1)[0]

    @property
    def population(self) -> int | None:
        kind, _, arg = self.activity.partition(":")
        return int(arg) if kind == "binomial" and arg else None

    def at(self, g: float):
        return activity_for_load(self.activity_kind, g, self.m, self.population)

    def to_dict(self) -> dict[str, Any]:
        out = {f: getattr(self, f) for f in self.__dataclass_fields__ if f != "dist"}
        out["dist"] = self.dist_name or self.dist.to_spec()
        out["load_grid"] = list(self.load_grid)
        return out


def validate_config(cfg: ExperimentConfig) -> None:
    if cfg.m < 1:
        raise ConfigError("m must be >= 1")
    if not cfg.load_grid:
        raise ConfigError("load_grid is empty")
    grid = np.asarray(cfg.load_grid)
    if np.any(grid <= 0) or np.any(np.diff(grid) <= 0):
        raise ConfigError("load_grid must be strictly positive and strictly increasing")
    if cfg.max_frames < 1:
        raise ConfigError("max_frames must be >= 1")
    if cfg.target_errors < 0:
        raise ConfigError("target_errors must be >= 0")
    if cfg.workers < 1:
        raise ConfigError("workers must be >= 1")
    if not 0 <= cfg.seed < 2**64:
        raise ConfigError("seed must be a 64-bit unsigned integer")
    kind, _, arg = cfg.activity.partition(":")
    if kind not in ("poisson", "binomial", "fixed"):
        raise ConfigError(f"unknown activity model {cfg.activity!r}")
    if kind == "binomial" and not arg.isdigit():
        raise ConfigError("binomial activity needs a population, e.g. 'binomial:10000'")
    if cfg.dist.max_degree > cfg.m:
        raise ConfigError(f"max degree {cfg.dist.max_degree} exceeds m={cfg.m}")
    if cfg.emit_prediction:
        scaling_params(cfg)


def scaling_params(cfg: ExperimentConfig) -> ScalingParams:
    if cfg.alpha0 is not None and cfg.beta0 is not None:
        return params_from_de(cfg.dist, cfg.alpha0, cfg.beta0)
    if cfg.dist_name is not None:
        return builtin_params(cfg.dist_name)
    raise ConfigError(
        "predictions for a non-tabulated distribution need alpha0 and beta0"
    )


def load_config(path: str | Path, **overrides) -> ExperimentConfig:
    """Read a YAML (or JSON) document with ExperimentConfig field names."""
    try:
        raw = yaml.safe_load(Path(path).read_text())
    except (OSError, yaml.YAMLError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(raw, Mapping):
        raise ConfigError("config must be a key-value mapping")
    raw = {**raw, **{k: v for k, v in overrides.items() if v is not None}}
    return config_from_mapping(raw)


def config_from_mapping(raw: Mapping[str, Any]) -> ExperimentConfig:
    raw = dict(raw)
    known = set(ExperimentConfig.__dataclass_fields__)
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"unknown config fields: {', '.join(sorted(unknown))}")
    if "dist" not in raw or "m" not in raw or "load_grid" not in raw:
        raise ConfigError("config needs dist, m and load_grid")
    try:
        dist = raw.pop("dist")
        if isinstance(dist, Mapping):
            raw["dist"], raw["dist_name"] = make_distribution({int(k): v for k, v in dist.items()}), None
        else:
            raw["dist"], raw["dist_name"] = resolve_distribution(str(dist))
        grid = raw["load_grid"]
        if isinstance(grid, Mapping):
            grid = load_range(grid["start"], grid["stop"], grid["step"])
        raw["load_grid"] = tuple(grid)
        return ExperimentConfig(**raw)
    except ConfigError:
        raise
    except (ValueError, TypeError, KeyError) as exc:
        raise ConfigError(str(exc)) from exc


def load_range(start: float, stop: float, step: float) -> tuple[float, ...]:
    """Inclusive arithmetic grid, rounded to kill float drift."""
    if step <= 0:
        raise ConfigError("g step must be positive")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return tuple(round(start + i * step, 10) for i in range(max(n, 0)))


def seed_stream(master_seed: int, point_index: int, worker_index: int) -> int:
    """64-bit seed for one (load point, worker) stream, hashed from the triple."""
    seq = np.random.SeedSequence(entropy=master_seed, spawn_key=(point_index, worker_index))
    return int(seq.generate_state(1, dtype=np.uint64)[0])


@dataclass(frozen=True)
class PointResult:
    g: float
    frames_run: int
    frame_errors: int
    packets_sent: int
    packets_lost: int
    fer: float
    fer_ci: float
    plr: float
    plr_ci: float
    fep_pred: float | None = None
    plp_pred: float | None = None
    fep_floor: float | None = None
    plp_floor: float | None = None


def binomial_ci(successes: int, trials: int) -> float:
    """95% normal-approximation half-width for a binomial proportion."""
    if trials == 0:
        return float("nan")
    p = successes / trials
    return Z95 * math.sqrt(p * (1 - p) / trials)


def ratio_ci(stats: FrameStats) -> float:
    """95% half-width of lost/sent, delta method over per-frame counts."""
    n = stats.frames
    if n < 2 or stats.packets_sent == 0:
        return float("nan")
    ratio = stats.packets_lost / stats.packets_sent
    mean_sent = stats.packets_sent / n
    # sum over frames of (lost_i - ratio * sent_i)^2
    ss = stats.lost_sq - 2 * ratio * stats.lost_sent + ratio**2 * stats.sent_sq
    var = max(ss, 0.0) / (n - 1)
    return Z95 * math.sqrt(var / n) / mean_sent


def point_from_stats(g: float, stats: FrameStats) -> PointResult:
    sent = stats.packets_sent
    return PointResult(
        g=g,
        frames_run=stats.frames,
        frame_errors=stats.frame_errors,
        packets_sent=sent,
        packets_lost=stats.packets_lost,
        fer=stats.frame_errors / stats.frames,
        fer_ci=binomial_ci(stats.frame_errors, stats.frames),
        plr=stats.packets_lost / sent if sent else 0.0,
        plr_ci=ratio_ci(stats),
    )


def simulate_point(cfg: ExperimentConfig, g: float, point_index: int = 0) -> FrameStats:
    activity = cfg.at(g)
    target = cfg.target_errors if cfg.target_errors > 0 else None
    rngs = [np.random.default_rng(seed_stream(cfg.seed, point_index, w)) for w in range(cfg.workers)]
    if cfg.workers == 1:
        return simulate_frames(cfg.m, cfg.dist, activity, rngs[0], cfg.max_frames, target)

    # synchronous rounds keep the result independent of thread scheduling
    total = FrameStats()
    per_worker = FIRST_ROUND
    with ThreadPoolExecutor(cfg.workers) as pool:
        while total.frames < cfg.max_frames:
            left = cfg.max_frames - total.frames
            shares = [left // cfg.workers + (w < left % cfg.workers) for w in range(cfg.workers)]
            shares = [min(s, per_worker) for s in shares]
            need = None if target is None else target - total.frame_errors
            jobs = [
                pool.submit(simulate_frames, cfg.m, cfg.dist, activity, rng, n, need)
                for rng, n in zip(rngs, shares)
                if n > 0
            ]
            for job in jobs:
                total = total + job.result()
            if target is not None and total.frame_errors >= target:
                break
            per_worker *= 2
    return total


def run_point(cfg: ExperimentConfig, g: float, point_index: int = 0) -> PointResult:
    """Simulate one load point and attach the enabled analytic columns."""
    row = point_from_stats(g, simulate_point(cfg, g, point_index))
    extra: dict[str, float] = {}
    if cfg.emit_prediction:
        params = scaling_params(cfg)
        extra["fep_pred"] = fep_predict(cfg.m, g, params)
        extra["plp_pred"] = plp_predict(cfg.m, g, params)
    if cfg.emit_floor:
        fl = floor_estimate(cfg.dist, cfg.m, g)
        extra["fep_floor"] = fl.fep_floor
        extra["plp_floor"] = fl.plp_floor
    return PointResult(**{**asdict(row), **extra})


@dataclass
class SweepResult:
    config: ExperimentConfig
    rows: list[PointResult] = field(default_factory=list)

    def columns(self) -> list[str]:
        cols = ["g", "frames_run", "frame_errors", "packets_sent", "packets_lost",
                "fer", "fer_ci", "plr", "plr_ci"]
        if self.config.emit_prediction:
            cols += ["fep_pred", "plp_pred"]
        if self.config.emit_floor:
            cols += ["fep_floor", "plp_floor"]
        return cols

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        cols = self.columns()
        writer.writerow(cols)
        for row in self.rows:
            writer.writerow([_fmt(getattr(row, c)) for c in cols])
        return buf.getvalue()

    def metadata(self) -> dict[str, Any]:
        return {"version": __version__, "config": self.config.to_dict(), "columns": self.columns()}


def _fmt(value) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.6g}"


def run_sweep(cfg: ExperimentConfig, progress=None) -> SweepResult:
    result = SweepResult(cfg)
    for i, g in enumerate(cfg.load_grid):
        row = run_point(cfg, g, point_index=i)
        result.rows.append(row)
        if progress is not None:
            progress(row)
    return result


def write_outputs(result: SweepResult, out: str | Path) -> Path:
    """Write the CSV and its ``.meta.json`` sidecar; returns the sidecar path."""
    out = Path(out)
    out.write_text(result.to_csv())
    meta = out.with_suffix(".meta.json")
    meta.write_text(json.dumps(result.metadata(), indent=2) + "\n")
    return meta


def read_csv(path: str | Path) -> list[dict[str, float]]:
    with open(path, newline="") as fh:
        return [{k: float(v) for k, v in row.items()} for row in csv.DictReader(fh)]


def prediction_params_for(dist_text: str, alpha0: float | None, beta0: float | None):
    """ScalingParams for a CLI distribution argument."""
    dist, name = resolve_distribution(dist_text)
    if alpha0 is not None and beta0 is not None:
        return dist, params_from_de(dist, alpha0, beta0)
    if name is None:
        raise UnknownDistribution(
            f"{dist_text!r} has no tabulated scaling parameters; pass --alpha0 and --beta0"
        )
    return dist, builtin_params(name)


__all__ = [
    "ExperimentConfig", "PointResult", "SweepResult", "load_config", "config_from_mapping",
    "run_point", "run_sweep", "seed_stream", "write_outputs", "read_csv", "load_range",
]
