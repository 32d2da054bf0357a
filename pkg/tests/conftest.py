"""Shared fixtures: the grounded restaurant domain and interpreted scenarios."""

import pytest

from config import get_scenario_by_slug
from kb.restaurant import build_domain
from narrative.parser import load_narrative, to_history
from narrative.runner import RunOptions, run

EXAMPLE_INSTANCES = {
    "nicole": "customer",
    "veg_r": "restaurant",
    "lentil_soup": "food",
    "waitress": "waiter",
    "cook1": "cook",
}


@pytest.fixture(scope="session")
def domain():
    return build_domain(EXAMPLE_INSTANCES)


@pytest.fixture(scope="session")
def two_food_domain():
    return build_domain({**EXAMPLE_INSTANCES, "miso_soup": "food"})


@pytest.fixture(scope="session")
def scenario_run():
    """Interpret a bundled scenario once per session, checked against its golden trace."""
    cache = {}

    def get(slug: str):
        if slug not in cache:
            scenario = get_scenario_by_slug(slug)
            golden = str(scenario.golden_path) if scenario.golden_path else None
            cache[slug] = run(scenario.story_path, RunOptions(golden=golden))
        return cache[slug]

    return get


@pytest.fixture(scope="session")
def scenario_history():
    """(domain, history) of a bundled scenario, for calling the reader directly."""

    def get(slug: str):
        nf = load_narrative(get_scenario_by_slug(slug).story_path)
        history, _ = to_history(nf)
        return build_domain(history.instances), history

    return get
