"""Bundled scenario endpoints."""

from fastapi import APIRouter, HTTPException

from config import EXIT_PARSE, get_scenario_by_slug, get_scenarios
from config.scenarios import Scenario
from narrative.report import to_dict
from narrative.runner import RunOptions, run

router = APIRouter(prefix="/api")


def resolve_scenario(slug: str) -> Scenario:
    scenario = get_scenario_by_slug(slug)
    if not scenario:
        raise HTTPException(status_code=404, detail=f"Unknown scenario: {slug}")
    return scenario


@router.get("/scenarios")
def list_scenarios():
    """List all bundled scenarios."""
    return [s.summary() for s in get_scenarios()]


@router.get("/scenarios/{slug}")
def scenario_detail(slug: str):
    """Scenario metadata plus the narrative text."""
    scenario = resolve_scenario(slug)
    return {**scenario.summary(), "narrative": scenario.story_path.read_text()}


@router.get("/scenarios/{slug}/models")
def scenario_models(slug: str, horizon: int | None = None, max_models: int | None = None):
    """Interpret a bundled scenario and return the JSON report."""
    scenario = resolve_scenario(slug)
    result = run(scenario.story_path, RunOptions(horizon=horizon, max_models=max_models))
    if result.exit_code == EXIT_PARSE or result.report is None:
        raise HTTPException(status_code=400, detail=result.error or "invalid scenario")
    return to_dict(result.report)
