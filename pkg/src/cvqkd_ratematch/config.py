"""Scenario configuration: YAML ingestion, validation, round-trip dumping.

A scenario file holds the link environment, the code, the headroom factor,
and optional sweep / simulation / baseline sections.  xi_art never appears in
a config: it is always computed by the rate-matching engine.  link.v_mod and
link.t_ch are optional as a pair; when absent the operating point comes from
the optimizer, when present the point is taken as given (manual mode).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import yaml

from .ratematch import BUILTIN_CODES, BaselinePoint, CodeSpec, StrategyKind

DEFAULT_CODE = BUILTIN_CODES["met-ldpc-0.1"]
DEFAULT_STRATEGIES = ("unmatched", "ideal_rate", "artificial_noise")

_STRATEGY_NAMES = tuple(kind.value for kind in StrategyKind)


class ConfigError(ValueError):
    """Scenario configuration is malformed or out of range."""


def _require_keys(section: str, data: dict, allowed: set[str], required: set[str]) -> None:
    if not isinstance(data, dict):
        raise ConfigError(f"section '{section}' must be a mapping")
    unknown = set(data) - allowed
    if unknown:
        raise ConfigError(f"unknown keys in '{section}': {sorted(unknown)}")
    missing = required - set(data)
    if missing:
        raise ConfigError(f"missing keys in '{section}': {sorted(missing)}")


def _number(section: str, data: dict, key: str, default=None):
    value = data.get(key, default)
    if value is None:
        return None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"'{section}.{key}' must be a number, got {value!r}")
    return float(value)


def _integer(section: str, data: dict, key: str, default=None):
    value = data.get(key, default)
    if value is None:
        return None
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"'{section}.{key}' must be an integer, got {value!r}")
    return int(value)


@dataclass(frozen=True)
class SweepSpec:
    """Transmittance grid; bounds default to [nominal t_ch, 1] at run time."""

    t_ch_min: float | None = None
    t_ch_max: float | None = None
    n_points: int = 41
    spacing: str = "linear"

    def __post_init__(self):
        for name in ("t_ch_min", "t_ch_max"):
            value = getattr(self, name)
            if value is not None and not 0.0 < value <= 1.0:
                raise ConfigError(f"sweep.{name} must lie in (0, 1], got {value}")
        if self.t_ch_min is not None and self.t_ch_max is not None:
            if self.t_ch_min > self.t_ch_max:
                raise ConfigError("sweep.t_ch_min must be <= sweep.t_ch_max")
        if self.n_points < 1:
            raise ConfigError(f"sweep.n_points must be >= 1, got {self.n_points}")
        if self.spacing not in ("linear", "log"):
            raise ConfigError(f"sweep.spacing must be 'linear' or 'log', got {self.spacing!r}")


@dataclass(frozen=True)
class SimSpec:
    n_symbols: int = 100_000
    seed: int = 1

    def __post_init__(self):
        if self.n_symbols < 1:
            raise ConfigError(f"sim.n_symbols must be >= 1, got {self.n_symbols}")


@dataclass(frozen=True)
class ScenarioConfig:
    xi_ch: float
    t_rec: float
    xi_rec: float
    v_mod: float | None = None
    t_ch: float | None = None
    code: CodeSpec = DEFAULT_CODE
    headroom_factor: float = 1.15
    sweep: SweepSpec | None = None
    strategies: tuple[str, ...] = DEFAULT_STRATEGIES
    baseline_points: tuple[BaselinePoint, ...] = ()
    sim: SimSpec | None = None

    def __post_init__(self):
        if self.xi_ch < 0 or self.xi_rec < 0:
            raise ConfigError("link noise terms must be >= 0")
        if not 0.0 < self.t_rec <= 1.0:
            raise ConfigError(f"link.t_rec must lie in (0, 1], got {self.t_rec}")
        if (self.v_mod is None) != (self.t_ch is None):
            raise ConfigError("link.v_mod and link.t_ch must be given together or not at all")
        if self.v_mod is not None and self.v_mod < 0:
            raise ConfigError(f"link.v_mod must be >= 0, got {self.v_mod}")
        if self.t_ch is not None and not 0.0 < self.t_ch <= 1.0:
            raise ConfigError(f"link.t_ch must lie in (0, 1], got {self.t_ch}")
        if self.headroom_factor < 1.0:
            raise ConfigError(f"headroom_factor must be >= 1, got {self.headroom_factor}")
        for name in self.strategies:
            if name not in _STRATEGY_NAMES:
                raise ConfigError(f"unknown strategy {name!r}; valid: {list(_STRATEGY_NAMES)}")
        if len(set(self.strategies)) != len(self.strategies):
            raise ConfigError("duplicate strategy names")
        if "external_baseline" in self.strategies and not self.baseline_points:
            raise ConfigError("strategy external_baseline needs baseline_points")

    @property
    def manual_point(self) -> bool:
        return self.v_mod is not None


def from_dict(data: Any) -> ScenarioConfig:
    if not isinstance(data, dict):
        raise ConfigError("scenario config must be a mapping")
    _require_keys(
        "scenario",
        data,
        allowed={"link", "code", "headroom_factor", "sweep", "strategies", "baseline_points", "sim"},
        required={"link"},
    )

    link = data["link"]
    _require_keys(
        "link", link,
        allowed={"v_mod", "t_ch", "xi_ch", "t_rec", "xi_rec"},
        required={"xi_ch", "t_rec", "xi_rec"},
    )

    code = DEFAULT_CODE
    if "code" in data:
        section = data["code"]
        _require_keys("code", section, allowed={"rate", "beta", "label"}, required={"rate", "beta"})
        label = section.get("label", "custom")
        if not isinstance(label, str):
            raise ConfigError(f"'code.label' must be a string, got {label!r}")
        try:
            code = CodeSpec(
                rate=_number("code", section, "rate"),
                beta=_number("code", section, "beta"),
                label=label,
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    sweep = None
    if "sweep" in data:
        section = data["sweep"]
        _require_keys("sweep", section,
                      allowed={"t_ch_min", "t_ch_max", "n_points", "spacing"}, required=set())
        spacing = section.get("spacing", "linear")
        if not isinstance(spacing, str):
            raise ConfigError(f"'sweep.spacing' must be a string, got {spacing!r}")
        sweep = SweepSpec(
            t_ch_min=_number("sweep", section, "t_ch_min"),
            t_ch_max=_number("sweep", section, "t_ch_max"),
            n_points=_integer("sweep", section, "n_points", 41),
            spacing=spacing,
        )

    sim = None
    if "sim" in data:
        section = data["sim"]
        _require_keys("sim", section, allowed={"n_symbols", "seed"}, required=set())
        sim = SimSpec(
            n_symbols=_integer("sim", section, "n_symbols", 100_000),
            seed=_integer("sim", section, "seed", 1),
        )

    strategies = data.get("strategies", list(DEFAULT_STRATEGIES))
    if not isinstance(strategies, list) or not all(isinstance(s, str) for s in strategies):
        raise ConfigError("'strategies' must be a list of strategy names")

    points = []
    raw_points = data.get("baseline_points", [])
    if not isinstance(raw_points, list):
        raise ConfigError("'baseline_points' must be a list of mappings")
    for i, entry in enumerate(raw_points):
        section = f"baseline_points[{i}]"
        _require_keys(section, entry,
                      allowed={"t_total", "snr", "beta_eff"},
                      required={"t_total", "snr", "beta_eff"})
        try:
            points.append(BaselinePoint(
                t_total=_number(section, entry, "t_total"),
                snr=_number(section, entry, "snr"),
                beta_eff=_number(section, entry, "beta_eff"),
            ))
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    return ScenarioConfig(
        xi_ch=_number("link", link, "xi_ch"),
        t_rec=_number("link", link, "t_rec"),
        xi_rec=_number("link", link, "xi_rec"),
        v_mod=_number("link", link, "v_mod"),
        t_ch=_number("link", link, "t_ch"),
        code=code,
        headroom_factor=_number("scenario", data, "headroom_factor", 1.15),
        sweep=sweep,
        strategies=tuple(strategies),
        baseline_points=tuple(points),
        sim=sim,
    )


def to_dict(cfg: ScenarioConfig) -> dict:
    """Fully explicit form; from_dict(to_dict(cfg)) == cfg."""
    link: dict[str, Any] = {"xi_ch": cfg.xi_ch, "t_rec": cfg.t_rec, "xi_rec": cfg.xi_rec}
    if cfg.v_mod is not None:
        link["v_mod"] = cfg.v_mod
        link["t_ch"] = cfg.t_ch
    out: dict[str, Any] = {
        "link": link,
        "code": {"rate": cfg.code.rate, "beta": cfg.code.beta, "label": cfg.code.label},
        "headroom_factor": cfg.headroom_factor,
        "strategies": list(cfg.strategies),
    }
    if cfg.sweep is not None:
        sweep: dict[str, Any] = {"n_points": cfg.sweep.n_points, "spacing": cfg.sweep.spacing}
        if cfg.sweep.t_ch_min is not None:
            sweep["t_ch_min"] = cfg.sweep.t_ch_min
        if cfg.sweep.t_ch_max is not None:
            sweep["t_ch_max"] = cfg.sweep.t_ch_max
        out["sweep"] = sweep
    if cfg.baseline_points:
        out["baseline_points"] = [
            {"t_total": pt.t_total, "snr": pt.snr, "beta_eff": pt.beta_eff}
            for pt in cfg.baseline_points
        ]
    if cfg.sim is not None:
        out["sim"] = {"n_symbols": cfg.sim.n_symbols, "seed": cfg.sim.seed}
    return out


def load_scenario(path: str) -> ScenarioConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse config {path}: {exc}") from exc
    return from_dict(data)


def dump_scenario(cfg: ScenarioConfig) -> str:
    return yaml.safe_dump(to_dict(cfg), sort_keys=False)
