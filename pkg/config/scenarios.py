"""Bundled scenario loading from scenarios.yaml."""

from pathlib import Path

import yaml

from config.settings import resolve_path

_SCENARIOS_FILE = Path(__file__).resolve().parent / "scenarios.yaml"


def _load_raw() -> list:
    """Load raw scenario definitions from scenarios.yaml."""
    if not _SCENARIOS_FILE.exists():
        return []
    with open(_SCENARIOS_FILE) as f:
        return yaml.safe_load(f) or []


class Scenario:
    """A bundled story and the models it is expected to have."""

    def __init__(self, data: dict):
        self.name = data["name"]
        self.slug = data["slug"]
        self.is_default = data.get("default", False)
        self.story = data["story"]
        self.golden = data.get("golden")
        self.expected_models: int | None = data.get("expected_models")
        self.description = " ".join((data.get("description") or "").split())

    @property
    def story_path(self) -> Path:
        return resolve_path(self.story)

    @property
    def golden_path(self) -> Path | None:
        return resolve_path(self.golden) if self.golden else None

    def summary(self) -> dict:
        """Scenario summary for the API response."""
        return {
            "name": self.name,
            "slug": self.slug,
            "is_default": self.is_default,
            "story": self.story,
            "golden": self.golden,
            "expected_models": self.expected_models,
            "description": self.description,
        }


def get_scenarios() -> list[Scenario]:
    return [Scenario(s) for s in _load_raw()]


def get_default_scenario() -> Scenario | None:
    scenarios = get_scenarios()
    for s in scenarios:
        if s.is_default:
            return s
    return scenarios[0] if scenarios else None


def get_scenario_by_slug(slug: str) -> Scenario | None:
    for s in get_scenarios():
        if s.slug == slug:
            return s
    return None
