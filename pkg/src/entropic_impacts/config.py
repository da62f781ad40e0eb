"""Pipeline configuration: a TOML file with every default pre-populated.

Relative paths resolve against the directory holding the config file. The
config hash is the SHA-256 of the canonical TOML serialization, truncated to
16 hex digits, and is stamped into every artifact.
"""

from __future__ import annotations

import copy
import datetime as dt
import hashlib
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import tomli
import tomli_w

from .changepoint import ChangepointConfig
from .core import ZONAL_REGIONS, zonal_adjacency
from .entropy import EntropyParams
from .exceptions import ConfigError, InvalidParameterError
from .pathway import SURFACE_COOLING_DEPS, PathwayConstraints
from .synth import DEFAULT_BACKGROUNDS, DEFAULT_IMPACTS, DEFAULT_REGIONS, Background, ImpactSpec, SynthConfig

__all__ = ["DEFAULTS", "PipelineConfig", "load_config", "dump_config"]

DEFAULTS: dict[str, Any] = {
    "paths": {
        "inputs": ["synth_data.csv"],
        "mask": "",
        "store": "store",
        "output": "output",
        "report": "report",
        "truth": "synth_truth.json",
    },
    "entropy": {"n": 30, "p": 9, "m": 2, "r1": 0.2, "r2": 2.0},
    "changepoint": {"alpha": 0.05, "min_segment": 5, "max_changepoints": 20},
    "impact": {"ci_level": 0.99},
    "pathway": {
        "epsilon": 1.0,
        "slack_days": 0,
        "variable_deps": sorted([list(d) for d in SURFACE_COOLING_DEPS]),
        "regions": list(ZONAL_REGIONS),
        "source_variable": "AEROD_v",
        "source_region": "Tropical",
        "final": {"variable": "TREFHT", "region": "Temperate North", "date": "1992-07-01"},
    },
    "synth": {
        "seed": 0,
        "ensemble_size": 9,
        "days": 1461,
        "start_date": "1991-06-01",
        "magnitude_scale": 1.0,
        "variables": ["AEROD_v", "FSDSC", "TREFHT"],
        "regions": list(DEFAULT_REGIONS),
        "backgrounds": {
            v: {"mean": b.mean, "seasonal_amplitude": b.seasonal_amplitude, "ar_coef": b.ar_coef, "sigma": b.sigma}
            for v, b in DEFAULT_BACKGROUNDS.items()
        },
        "impacts": [
            {"variable": s.variable, "region": s.region, "start_day": s.start_day, "end_day": s.end_day,
             "amplitude": s.amplitude, "ramp_days": s.ramp_days}
            for s in DEFAULT_IMPACTS
        ],
    },
}


def _merge(base: dict, override: dict, where: str = "") -> dict:
    out = copy.deepcopy(base)
    for key, value in override.items():
        if key not in base:
            raise ConfigError(f"unknown config key {where}{key!r}")
        if isinstance(base[key], dict) and key not in ("backgrounds",):
            if not isinstance(value, dict):
                raise ConfigError(f"config key {where}{key} must be a table")
            out[key] = _merge(base[key], value, f"{where}{key}.")
        else:
            out[key] = value
    return out


def _date(text, key: str) -> dt.date:
    if isinstance(text, dt.date):
        return text
    try:
        return dt.date.fromisoformat(str(text))
    except ValueError:
        raise ConfigError(f"{key} must be an ISO-8601 date, got {text!r}") from None


@dataclass(frozen=True)
class PipelineConfig:
    """Validated pipeline configuration plus the directory relative paths resolve against."""

    data: dict
    base_dir: Path

    @classmethod
    def from_dict(cls, data: dict | None = None, base_dir: str | Path = ".") -> "PipelineConfig":
        data = _merge(DEFAULTS, data or {})
        data["pathway"]["final"]["date"] = _date(data["pathway"]["final"]["date"], "pathway.final.date").isoformat()
        data["synth"]["start_date"] = _date(data["synth"]["start_date"], "synth.start_date").isoformat()
        cfg = cls(data, Path(base_dir))
        try:
            cfg.entropy, cfg.changepoint, cfg.constraints, cfg.synth  # re-validate every section
        except InvalidParameterError as exc:
            raise ConfigError(str(exc)) from None
        except (TypeError, KeyError) as exc:
            raise ConfigError(f"malformed config value: {exc}") from None
        if not 0 < data["impact"]["ci_level"] < 1:
            raise ConfigError(f"impact.ci_level must be in (0, 1), got {data['impact']['ci_level']}")
        return cfg

    @property
    def entropy(self) -> EntropyParams:
        return EntropyParams(**self.data["entropy"])

    @property
    def changepoint(self) -> ChangepointConfig:
        return ChangepointConfig(**self.data["changepoint"])

    @property
    def ci_level(self) -> float:
        return float(self.data["impact"]["ci_level"])

    @property
    def constraints(self) -> PathwayConstraints:
        pw = self.data["pathway"]
        deps = [tuple(d) for d in pw["variable_deps"]]
        if any(len(d) != 2 for d in deps):
            raise ConfigError("pathway.variable_deps entries must be [from, to] pairs")
        regions = tuple(pw["regions"])
        return PathwayConstraints(frozenset(deps), zonal_adjacency(regions), float(pw["epsilon"]),
                                  int(pw["slack_days"]), regions)

    @property
    def source(self) -> tuple[str, str]:
        pw = self.data["pathway"]
        return pw["source_variable"], pw["source_region"]

    @property
    def final(self) -> tuple[str, str, dt.date]:
        f = self.data["pathway"]["final"]
        return f["variable"], f["region"], dt.date.fromisoformat(f["date"])

    @property
    def synth(self) -> SynthConfig:
        s = self.data["synth"]
        backgrounds = {v: Background(**b) for v, b in s["backgrounds"].items()}
        impacts = tuple(ImpactSpec(**d) for d in s["impacts"])
        return SynthConfig(int(s["seed"]), int(s["ensemble_size"]), int(s["days"]),
                           dt.date.fromisoformat(s["start_date"]), tuple(s["variables"]), tuple(s["regions"]),
                           backgrounds, {}, impacts, float(s["magnitude_scale"]))

    def path(self, key: str) -> Path:
        return self.base_dir / self.data["paths"][key]

    @property
    def inputs(self) -> list[Path]:
        return [self.base_dir / p for p in self.data["paths"]["inputs"]]

    def dumps(self) -> str:
        return tomli_w.dumps(self.data)

    @property
    def hash(self) -> str:
        return hashlib.sha256(self.dumps().encode()).hexdigest()[:16]


def load_config(path: str | Path | None) -> PipelineConfig:
    """Load a TOML config; ``None`` gives the defaults rooted at the working directory."""
    if path is None:
        return PipelineConfig.from_dict({}, Path.cwd())
    path = Path(path)
    try:
        data = tomli.loads(path.read_text())
    except FileNotFoundError:
        raise ConfigError(f"config file {path} not found") from None
    except tomli.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    return PipelineConfig.from_dict(data, path.parent)


def dump_config(cfg: PipelineConfig, path: str | Path) -> None:
    Path(path).write_text(cfg.dumps())
