"""Run settings, bundled scenarios and shared constants."""

from .constants import (
    ActionKind,
    FluentKind,
    Layer,
    QuestionKind,
    Verdict,
    EXIT_OK,
    EXIT_PARSE,
    EXIT_NO_MODEL,
    EXIT_GOLDEN,
)
from .settings import Settings, get_settings, resolve_path
from .scenarios import (
    Scenario,
    get_scenarios,
    get_default_scenario,
    get_scenario_by_slug,
)
