"""Run settings: settings.yaml defaults, INTENT_* environment, explicit overrides."""

import os
from dataclasses import dataclass, fields, replace
from pathlib import Path

import yaml
from dotenv import load_dotenv

load_dotenv()

ROOT = Path(__file__).resolve().parent.parent
_SETTINGS_FILE = Path(__file__).resolve().parent / "settings.yaml"
ENV_PREFIX = "INTENT_"


@dataclass(frozen=True)
class Settings:
    horizon: int = 40
    max_models: int = 0            # 0 = unlimited
    parallelism: int = 1
    max_abductions: int = 2
    log_level: str = "WARNING"
    domain: str = "kb/restaurant.domain"
    frame_rules: str = "narrative/osr.rules"
    strict_frames: bool = False

    @property
    def domain_path(self) -> Path:
        return resolve_path(self.domain)

    @property
    def frame_rules_path(self) -> Path:
        return resolve_path(self.frame_rules)


def resolve_path(path: str | Path) -> Path:
    """Resolve a configured path; relative paths are taken from the repo root."""
    p = Path(path)
    return p if p.is_absolute() else ROOT / p


def _load_raw() -> dict:
    if not _SETTINGS_FILE.exists():
        return {}
    with open(_SETTINGS_FILE) as f:
        return yaml.safe_load(f) or {}


def _coerce(name: str, kind: type, value):
    if kind is bool:
        if isinstance(value, bool):
            return value
        text = str(value).strip().lower()
        if text in ("1", "true", "yes", "on"):
            return True
        if text in ("0", "false", "no", "off", ""):
            return False
        raise ValueError(f"Invalid boolean for {name}: {value!r}")
    if kind is int:
        try:
            return int(value)
        except (TypeError, ValueError):
            raise ValueError(f"Invalid integer for {name}: {value!r}") from None
    return str(value)


def _validate(settings: Settings) -> Settings:
    if settings.horizon < 1:
        raise ValueError(f"horizon must be at least 1, got {settings.horizon}")
    for name in ("max_models", "max_abductions"):
        if getattr(settings, name) < 0:
            raise ValueError(f"{name} must not be negative")
    if settings.parallelism < 1:
        raise ValueError("parallelism must be at least 1")
    return settings


def get_settings(**overrides) -> Settings:
    """Build settings from settings.yaml, then INTENT_* env vars, then overrides.

    Overrides whose value is None are ignored so CLI flags can be passed through
    unconditionally.
    """
    types = {f.name: f.type for f in fields(Settings)}
    values: dict = {}

    for key, value in _load_raw().items():
        if key not in types:
            raise ValueError(f"Unknown setting in settings.yaml: {key}")
        values[key] = _coerce(key, types[key], value)

    for key, kind in types.items():
        env = os.getenv(ENV_PREFIX + key.upper())
        if env is not None:
            values[key] = _coerce(ENV_PREFIX + key.upper(), kind, env)

    for key, value in overrides.items():
        if key not in types:
            raise ValueError(f"Unknown setting: {key}")
        if value is not None:
            values[key] = _coerce(key, types[key], value)

    return _validate(replace(Settings(), **values))
