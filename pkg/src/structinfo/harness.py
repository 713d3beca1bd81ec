"""Experiment configuration, multi-seed runs and result aggregation."""
from __future__ import annotations

import csv
import json
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

import numpy as np

from .agent import METHODS, ConfigError, EpisodeLog, TrainConfig, train
from .env import EnvError, Mdp, make_env

log = logging.getLogger(__name__)

# (state, action) pairs whose visits are tracked on the six-state fixture
REDUNDANT_PAIRS = ((2, 3), (5, 3))


@dataclass(frozen=True)
class ExperimentConfig:
    env: str = "fourrooms9"
    methods: tuple = ("none", "shannon-entropy", "si2e")
    beta: float = 0.005
    k: int = 5
    gamma: float = 0.99
    lr_pi: float = 0.1
    lr_v: float = 0.1
    t_up: int = 16
    batch_size: int = 64
    buffer_capacity: int = 10_000
    total_steps: int = 30_000
    seeds: tuple = tuple(range(10))
    out: str = "results"
    eta: float = 1.0
    centroid: str = "mean"
    value_source: str = "prob"
    diagnostics: bool = False
    workers: int = 1
    plot: str = "png"
    success_window: int = 20
    success_threshold: float = 0.9
    final_window: int = 100

    def __post_init__(self):
        if not self.seeds:
            raise ConfigError("seed list is empty")
        if not self.methods:
            raise ConfigError("no methods given")
        for m in self.methods:
            if m not in METHODS:
                raise ConfigError(f"unknown method {m!r}; choose from {METHODS}")
        if self.plot not in ("png", "svg", "none"):
            raise ConfigError("plot must be png, svg or none")
        if self.workers < 1 or self.success_window < 1 or self.final_window < 1:
            raise ConfigError("workers and windows must be positive")
        if not 0 < self.success_threshold <= 1:
            raise ConfigError("success_threshold must lie in (0, 1]")
        # validates the shared training fields early
        self.train_config(self.methods[0], self.seeds[0])

    def train_config(self, method: str, seed: int) -> TrainConfig:
        keys = {f.name for f in fields(TrainConfig)} - {"method", "seed"}
        return TrainConfig(method=method, seed=seed, **{k: getattr(self, k) for k in keys})


def parse_seeds(text: str) -> tuple:
    """``0..9`` (inclusive range), ``1,4,7`` or a mix such as ``0..2,10``."""
    out = []
    for part in str(text).replace(" ", "").split(","):
        if not part:
            continue
        if ".." in part:
            lo, hi = part.split("..", 1)
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    return tuple(out)


def _coerce(name: str, raw: str):
    kind = {f.name: f.type for f in fields(ExperimentConfig)}.get(name)
    if kind is None:
        raise ConfigError(f"unknown config key {name!r}")
    raw = raw.strip()
    try:
        if name == "seeds":
            return parse_seeds(raw)
        if name == "methods":
            return tuple(m.strip() for m in raw.split(",") if m.strip())
        if kind == "bool":
            if raw.lower() not in ("true", "false", "1", "0", "yes", "no"):
                raise ValueError(raw)
            return raw.lower() in ("true", "1", "yes")
        if kind == "int":
            return int(raw)
        if kind == "float":
            return float(raw)
    except ValueError as exc:
        raise ConfigError(f"bad value for {name}: {raw!r}") from exc
    return raw


def parse_config_text(text: str) -> dict:
    """``key = value`` lines; ``#`` starts a comment. ``method`` is an alias of ``methods``."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, val = (s.strip() for s in line.split("=", 1))
        key = "methods" if key == "method" else key
        values[key] = _coerce(key, val)
    return values


def load_config(path: str | Path | None = None, **overrides) -> ExperimentConfig:
    values = {}
    if path is not None:
        p = Path(path)
        if not p.is_file():
            raise ConfigError(f"config file not found: {path}")
        values.update(parse_config_text(p.read_text()))
    for key, val in overrides.items():
        if val is None:
            continue
        key = "methods" if key == "method" else key
        values[key] = _coerce(key, val) if isinstance(val, str) else val
    return ExperimentConfig(**values)


# -- statistics -------------------------------------------------------------

def episodes_to_threshold(successes, window: int, threshold: float) -> float:
    """Index of the first episode whose trailing ``window`` success rate reaches ``threshold``.

    ``inf`` when never reached.
    """
    s = np.asarray(successes, dtype=float)
    if s.size < window:
        return math.inf
    rolling = np.convolve(s, np.ones(window), "valid") / window
    hit = np.flatnonzero(rolling >= threshold - 1e-12)
    return float(hit[0] + window - 1) if hit.size else math.inf


def quantile(values, q: float) -> float:
    """Linear-interpolated quantile that treats ``inf`` as a value."""
    v = np.sort(np.asarray(values, dtype=float))
    pos = q * (v.size - 1)
    lo, hi = int(math.floor(pos)), int(math.ceil(pos))
    if v[lo] == v[hi]:
        return float(v[lo])
    if math.isinf(v[hi]):
        return math.inf if pos > lo else float(v[lo])
    return float(v[lo] + (pos - lo) * (v[hi] - v[lo]))


def _finite_or_none(x: float):
    return None if not math.isfinite(x) else x


def summarize_method(logs: dict, cfg: ExperimentConfig, env: Mdp | None = None) -> dict:
    seeds = sorted(logs)
    ept = [episodes_to_threshold(logs[s]["success"], cfg.success_window, cfg.success_threshold) for s in seeds]
    final = [float(np.mean(logs[s]["success"][-cfg.final_window:])) for s in seeds]
    out = {
        "seeds": seeds,
        "episodes_to_threshold": [_finite_or_none(x) for x in ept],
        "episodes_to_threshold_median": _finite_or_none(quantile(ept, 0.5)),
        "episodes_to_threshold_iqr": [_finite_or_none(quantile(ept, 0.25)), _finite_or_none(quantile(ept, 0.75))],
        "final_success_rate": final,
        "final_success_rate_median": quantile(final, 0.5),
    }
    if all("redundant_freq" in logs[s] for s in seeds):
        freq = [logs[s]["redundant_freq"] for s in seeds]
        out["redundant_freq"] = freq
        out["redundant_freq_median"] = quantile(freq, 0.5)
    return out


def read_episode_csv(path: str | Path) -> dict:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return {
        "return": [float(r["return"]) for r in rows],
        "success": [int(r["success"]) for r in rows],
        "steps": [int(r["steps"]) for r in rows],
        "intrinsic_mean": [float(r["intrinsic_mean"]) for r in rows],
    }


# -- running ----------------------------------------------------------------

def _run_one(args) -> tuple[str, int, str, float | None]:
    cfg, method, seed = args
    env = make_env(cfg.env)
    episode_log: EpisodeLog = train(env, cfg.train_config(method, seed), record_traces=cfg.env == "figure1")
    freq = episode_log.visit_frequency(env, REDUNDANT_PAIRS, cfg.final_window) if cfg.env == "figure1" else None
    return method, seed, episode_log.to_csv(), freq


def run(cfg: ExperimentConfig) -> dict:
    """Train every (method, seed), write CSVs, a JSON summary and an optional curve plot."""
    make_env(cfg.env)  # fail fast on a bad map
    out = Path(cfg.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        probe = out / ".write-test"
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        raise ConfigError(f"output directory not writable: {out} ({exc})") from exc

    jobs = [(cfg, m, s) for m in cfg.methods for s in cfg.seeds]
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=min(cfg.workers, len(jobs))) as pool:
            results = list(pool.map(_run_one, jobs))
    else:
        results = [_run_one(j) for j in jobs]

    per_method: dict = {m: {} for m in cfg.methods}
    for method, seed, text, freq in results:
        mdir = out / method
        mdir.mkdir(exist_ok=True)
        path = mdir / f"seed_{seed}.csv"
        path.write_text(text)
        data = read_episode_csv(path)
        if freq is not None:
            data["redundant_freq"] = freq
        per_method[method][seed] = data
        log.info("%s seed %d: %d episodes", method, seed, len(data["success"]))

    summary = {
        "env": cfg.env,
        "config": {k: list(v) if isinstance(v, tuple) else v for k, v in asdict(cfg).items()},
        "methods": {m: summarize_method(per_method[m], cfg) for m in cfg.methods},
    }
    (out / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    if cfg.plot != "none":
        plot_curves(per_method, cfg, out / f"curve.{cfg.plot}")
    return summary


def plot_curves(per_method: dict, cfg: ExperimentConfig, path: Path) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 4))
    for method, logs in per_method.items():
        curves = []
        for data in logs.values():
            s = np.asarray(data["success"], dtype=float)
            if s.size >= cfg.success_window:
                curves.append(np.convolve(s, np.ones(cfg.success_window), "valid") / cfg.success_window)
        if not curves:
            continue
        n = min(len(c) for c in curves)
        ax.plot(np.arange(n) + cfg.success_window - 1, np.median([c[:n] for c in curves], axis=0), label=method)
    ax.set_xlabel("episode")
    ax.set_ylabel(f"success rate (trailing {cfg.success_window})")
    ax.set_title(cfg.env)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, metadata={"Date": None} if path.suffix == ".svg" else None)
    plt.close(fig)


def override(cfg: ExperimentConfig, **changes) -> ExperimentConfig:
    return replace(cfg, **changes)


__all__ = ["ExperimentConfig", "load_config", "run", "parse_seeds", "episodes_to_threshold",
           "summarize_method", "read_episode_csv", "quantile", "EnvError", "ConfigError"]


if os.environ.get("STRUCTINFO_DEBUG"):
    logging.basicConfig(level=logging.DEBUG)
