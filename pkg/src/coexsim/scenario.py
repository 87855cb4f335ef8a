"""Scenario configuration: defaults, JSON ingestion, validation, sweeps.

A scenario pins one coexistence scheme with its population sizes and
radio/MAC parameter overrides. Config files are flat JSON with optional
nested override blocks; every validation error names the offending
field path so sweep scripts fail loudly and early.
"""

from __future__ import annotations

import dataclasses
import json
import warnings
from dataclasses import dataclass, field, replace
from pathlib import Path

from .dcf import ACCESS_MODES, MacTiming
from .hap import DEFAULT_BEACON_US, DEFAULT_INTERVAL_US
from .lbt import LbtParams
from .radio import ChannelParams

SCHEMES = ("wifi-only", "lbt", "hap-sa", "hap-uca")


class ConfigError(ValueError):
    """Validation failure carrying the JSON field path."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


@dataclass(frozen=True)
class ScenarioConfig:
    scheme: str = "wifi-only"
    n_wifi: int = 30
    m_lte: int = 0
    duration_s: float = 10.0
    seeds: tuple[int, ...] = (1,)
    radius_m: float = 100.0
    access_mode: str = "basic"
    timing: MacTiming = field(default_factory=MacTiming)
    channel: ChannelParams = field(default_factory=ChannelParams)
    lbt: LbtParams = field(default_factory=LbtParams)
    interval_us: int = DEFAULT_INTERVAL_US
    beacon_us: int = DEFAULT_BEACON_US

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ConfigError("scheme", f"must be one of {SCHEMES}, "
                                        f"got {self.scheme!r}")
        if self.n_wifi < 0:
            raise ConfigError("n_wifi", "must be >= 0")
        if self.m_lte < 0:
            raise ConfigError("m_lte", "must be >= 0")
        if self.scheme == "wifi-only" and self.m_lte > 0:
            warnings.warn("wifi-only scheme ignores the configured "
                          f"{self.m_lte} LTE users", stacklevel=2)
            object.__setattr__(self, "m_lte", 0)
        if self.n_wifi + self.m_lte < 1:
            raise ConfigError("n_wifi", "need at least one user in total")
        if not self.duration_s > 0:
            raise ConfigError("duration_s", "must be positive")
        if not self.seeds:
            raise ConfigError("seeds", "must be non-empty")
        if any(not isinstance(s, int) or isinstance(s, bool) or s < 0
               for s in self.seeds):
            raise ConfigError("seeds", "must all be non-negative integers")
        if not self.radius_m > 0:
            raise ConfigError("radius_m", "must be positive")
        if self.access_mode not in ACCESS_MODES:
            raise ConfigError("access_mode",
                              f"must be one of {ACCESS_MODES}")
        if self.scheme in ("hap-sa", "hap-uca"):
            if not 0 < self.beacon_us < self.interval_us:
                raise ConfigError("beacon_us",
                                  "must lie inside the interval")
            if self.duration_us % self.interval_us:
                raise ConfigError(
                    "duration_s",
                    "must be a whole number of repetition intervals "
                    f"({self.interval_us} µs each) for beacon schemes")

    @property
    def duration_us(self) -> int:
        return round(self.duration_s * 1_000_000)

    @property
    def sa_mode(self) -> str:
        return "uca" if self.scheme == "hap-uca" else "standalone"


_NESTED = {
    "timing": MacTiming,
    "channel": ChannelParams,
    "lbt": LbtParams,
}
_SCALARS = {
    "scheme": str, "n_wifi": int, "m_lte": int, "duration_s": (int, float),
    "radius_m": (int, float), "access_mode": str,
    "interval_us": int, "beacon_us": int,
}


def _build_nested(cls, payload: dict, path: str):
    legal = {f.name: f for f in dataclasses.fields(cls)}
    kwargs = {}
    for key, value in payload.items():
        if key not in legal:
            raise ConfigError(f"{path}.{key}", "unknown field")
        if isinstance(value, bool):
            raise ConfigError(f"{path}.{key}", "boolean is not a number")
        kwargs[key] = value
    try:
        return cls(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(path, str(exc)) from exc


def config_from_dict(payload: dict) -> ScenarioConfig:
    if not isinstance(payload, dict):
        raise ConfigError("$", "top level must be a JSON object")
    kwargs = {}
    for key, value in payload.items():
        if key in _NESTED:
            if not isinstance(value, dict):
                raise ConfigError(key, "must be an object of overrides")
            kwargs[key] = _build_nested(_NESTED[key], value, key)
        elif key == "seeds":
            if not isinstance(value, list):
                raise ConfigError("seeds", "must be a list")
            kwargs[key] = tuple(value)
        elif key in _SCALARS:
            want = _SCALARS[key]
            if isinstance(value, bool) or not isinstance(value, want):
                raise ConfigError(key, f"expected {want}, got {value!r}")
            kwargs[key] = value
        else:
            raise ConfigError(key, "unknown field")
    with warnings.catch_warnings():
        warnings.simplefilter("always")
        return ScenarioConfig(**kwargs)


def load_config(path: str | Path) -> ScenarioConfig:
    text = Path(path).read_text()
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("$", f"not valid JSON: {exc}") from exc
    return config_from_dict(payload)


def expand_sweep(base: ScenarioConfig, axis: str, values: list[int],
                 schemes: list[str] | None = None) -> list[ScenarioConfig]:
    """Cross product of sweep values and schemes over one base config."""
    if axis not in ("n_wifi", "m_lte"):
        raise ConfigError("axis", "must be n_wifi or m_lte")
    if not values:
        raise ConfigError("values", "must be non-empty")
    out = []
    for scheme in (schemes or [base.scheme]):
        for value in values:
            if not isinstance(value, int) or value < 0:
                raise ConfigError("values", f"bad sweep value {value!r}")
            out.append(replace(base, scheme=scheme, **{axis: value}))
    return out
