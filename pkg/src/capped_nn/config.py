"""Experiment configuration files and named presets.

A config is a flat INI file::

    [experiment]
    preset = thm4-1nn-fails
    seed = 7
    trials = 20
    learners = 1nn, 2c1nn
    checkpoints = 5000, 10000, 20000

    [process]
    generator = 1nn_adversarial
    preset = desk
    horizon = 20000

    [target]
    name = indicator_dyadics

Optional sections: ``[partition]`` (for ``smv``) and ``[crf]`` with
``intervals = [0/2^0,1/2^1)`` (for ``crf``).
"""
from __future__ import annotations

import configparser
import io
from dataclasses import dataclass, field, replace

from . import dyadic as dy
from .harness import Interval, default_checkpoints
from .learners import LearnerConfig
from .processes import ScheduleParams
from .learners import KnnSchedule

__all__ = ["ExperimentConfig", "PRESETS", "preset", "parse_intervals", "ConfigError"]


class ConfigError(ValueError):
    pass


def _ckpts(horizon: int, extra=()) -> list[int]:
    return sorted(set(default_checkpoints(horizon)) | {T for T in extra if T <= horizon})


@dataclass
class ExperimentConfig:
    preset: str = "custom"
    process: dict = field(default_factory=lambda: {"generator": "1nn_adversarial",
                                                   "preset": "desk", "horizon": 20000})
    target: dict = field(default_factory=lambda: {"name": "indicator_dyadics"})
    learners: list = field(default_factory=lambda: ["2c1nn"])
    checkpoints: list | None = None
    trials: int = 1
    seed: int = 0
    workers: int = 1
    partition: dict | None = None
    intervals: str | None = None
    out_dir: str = "out"

    @property
    def horizon(self) -> int:
        return int(self.process["horizon"])

    def resolved_checkpoints(self) -> list[int]:
        if self.checkpoints:
            return sorted({T for T in self.checkpoints if T <= self.horizon} | {self.horizon})
        return default_checkpoints(self.horizon)

    def learner_configs(self) -> list[LearnerConfig]:
        return [LearnerConfig.parse(s) for s in self.learners]

    def with_overrides(self, *, seed=None, horizon=None, trials=None, learners=None,
                       k=None, out_dir=None, workers=None) -> "ExperimentConfig":
        cfg = replace(self, process=dict(self.process), learners=list(self.learners))
        if seed is not None:
            cfg.seed = seed
        if horizon is not None:
            cfg.process["horizon"] = horizon
        if trials is not None:
            cfg.trials = trials
        if learners:
            cfg.learners = list(learners)
        if k is not None:
            cfg.learners = [f"{k}c1nn" if LearnerConfig.parse(s).rule == "kc1nn" else s
                            for s in cfg.learners]
        if out_dir is not None:
            cfg.out_dir = out_dir
        if workers is not None:
            cfg.workers = workers
        return cfg

    def validate(self) -> None:
        """Raise ConfigError (or PrecisionError) before anything runs."""
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        try:
            self.learner_configs()
            gen = self.process.get("generator")
            if gen in ("1nn_adversarial", "knn_adversarial"):
                proc = gen.split("_")[0]
                kw = {k: self.process[k] for k in ("epsilon", "delta", "guard", "u_guard")
                      if k in self.process}
                params = ScheduleParams.for_preset(proc, self.process.get("preset", "desk"),
                                                   self.horizon, **kw)
                sched = self.process.get("knn_schedule", "floor_log2")
                params.validate(KnnSchedule(sched) if proc == "knn" and sched else None)
            if self.intervals:
                parse_intervals(self.intervals)
        except dy.PrecisionError:
            raise
        except (ValueError, KeyError) as exc:
            raise ConfigError(str(exc)) from exc

    def to_dict(self) -> dict:
        return {
            "preset": self.preset,
            "process": dict(self.process),
            "target": dict(self.target),
            "learners": list(self.learners),
            "checkpoints": self.resolved_checkpoints(),
            "trials": self.trials,
            "seed": self.seed,
            "partition": self.partition,
            "intervals": self.intervals,
        }

    # -- file format ---------------------------------------------------------
    def to_ini(self) -> str:
        cp = configparser.ConfigParser(interpolation=None)
        cp["experiment"] = {
            "preset": self.preset,
            "seed": str(self.seed),
            "trials": str(self.trials),
            "workers": str(self.workers),
            "learners": ", ".join(self.learners),
            "out_dir": self.out_dir,
        }
        if self.checkpoints:
            cp["experiment"]["checkpoints"] = ", ".join(map(str, self.checkpoints))
        cp["process"] = {k: str(v) for k, v in self.process.items()}
        cp["target"] = {k: str(v) for k, v in self.target.items()}
        if self.partition:
            cp["partition"] = {k: str(v) for k, v in self.partition.items()}
        if self.intervals:
            cp["crf"] = {"intervals": self.intervals}
        buf = io.StringIO()
        cp.write(buf)
        return buf.getvalue()

    @classmethod
    def from_ini(cls, text: str) -> "ExperimentConfig":
        cp = configparser.ConfigParser(interpolation=None)
        try:
            cp.read_string(text)
        except configparser.Error as exc:
            raise ConfigError(str(exc)) from exc
        base = cls()
        ex = cp["experiment"] if cp.has_section("experiment") else {}
        if "preset" in ex and ex["preset"] in PRESETS:
            base = preset(ex["preset"])
        try:
            if cp.has_section("process"):
                base.process = {k: _coerce(v) for k, v in cp["process"].items()}
            if cp.has_section("target"):
                base.target = {k: _coerce(v) for k, v in cp["target"].items()}
            if cp.has_section("partition"):
                base.partition = {k: _coerce(v) for k, v in cp["partition"].items()}
            if cp.has_section("crf"):
                base.intervals = cp["crf"].get("intervals")
            if "preset" in ex:
                base.preset = ex["preset"]
            if "seed" in ex:
                base.seed = int(ex["seed"], 0)
            if "trials" in ex:
                base.trials = int(ex["trials"])
            if "workers" in ex:
                base.workers = int(ex["workers"])
            if "learners" in ex:
                base.learners = [s.strip() for s in ex["learners"].split(",") if s.strip()]
            if "checkpoints" in ex:
                base.checkpoints = [int(s) for s in ex["checkpoints"].split(",") if s.strip()]
            if "out_dir" in ex:
                base.out_dir = ex["out_dir"]
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        return base


def _coerce(v: str):
    if v == "None":
        return None
    if v in ("True", "False"):
        return v == "True"
    try:
        return int(v)
    except ValueError:
        pass
    try:
        return float(v)
    except ValueError:
        return v


def parse_intervals(text: str) -> list[Interval]:
    """Parse ``"[0/2^0,1/2^1) (3/2^2,1/2^0]"`` into intervals."""
    out = []
    for tok in text.replace(";", " ").split():
        if len(tok) < 5 or tok[0] not in "[(" or tok[-1] not in "])" or "," not in tok:
            raise ConfigError(f"malformed interval {tok!r}")
        lo, hi = tok[1:-1].split(",")
        try:
            iv = Interval(dy.parse(lo), dy.parse(hi), tok[0] == "[", tok[-1] == "]")
        except dy.DyadicError as exc:
            raise ConfigError(str(exc)) from exc
        if iv.hi < iv.lo:
            raise ConfigError(f"interval {tok!r} has lo > hi")
        out.append(iv)
    if not out:
        raise ConfigError("no intervals given")
    return out


_ADV1 = {"generator": "1nn_adversarial", "preset": "desk", "horizon": 20000}
_ADVK = {"generator": "knn_adversarial", "preset": "desk", "horizon": 20000,
         "knn_schedule": "floor_log2"}
_DYAD = {"name": "indicator_dyadics"}
_ACCEPT = (5000, 10000, 20000)

PRESETS = {
    "thm4-1nn-fails": dict(process=_ADV1, target=_DYAD, learners=["1nn"], trials=20,
                           checkpoints=_ckpts(20000, _ACCEPT)),
    "thm4-2c1nn-succeeds": dict(process=_ADV1, target=_DYAD, learners=["2c1nn", "1nn"],
                                trials=20, checkpoints=_ckpts(20000, _ACCEPT)),
    "thm3-knn-fails": dict(process=_ADVK, target=_DYAD, learners=["knn:floor_log2", "2c1nn"],
                           trials=10, checkpoints=_ckpts(20000, _ACCEPT)),
    "crf-check": dict(process=_ADV1, target=_DYAD, learners=["2c1nn"], trials=20,
                      checkpoints=_ckpts(20000, _ACCEPT), intervals="[0/2^0,1/2^1)"),
    "smv-grid": dict(process=_ADV1, target=_DYAD, learners=["2c1nn"], trials=1,
                     checkpoints=_ckpts(20000, _ACCEPT),
                     partition={"name": "grid", "eta": "1/2^10"}),
}


def preset(name: str) -> ExperimentConfig:
    try:
        p = PRESETS[name]
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
    return ExperimentConfig(preset=name, process=dict(p["process"]), target=dict(p["target"]),
                            learners=list(p["learners"]), checkpoints=list(p["checkpoints"]),
                            trials=p["trials"], partition=p.get("partition"),
                            intervals=p.get("intervals"))
