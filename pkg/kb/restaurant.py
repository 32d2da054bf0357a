"""The bundled restaurant knowledge base and the queries the reader asks of it.

``build_domain`` loads ``restaurant.domain`` (or any file in the same format)
and grounds it over the narrative's instances. The remaining functions read
the domain's default-selection, activity and futility knowledge.
"""

import logging
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Sequence

from config.constants import GOAL_ACTIONS
from kb.domain import Activity, Domain, Literal, State
from kb.grounding import ground_domain
from kb.parser import SchematicDomain, load_domain
from kb.terms import Term

logger = logging.getLogger(__name__)

RESTAURANT_DOMAIN = Path(__file__).resolve().parent / "restaurant.domain"


@lru_cache(maxsize=8)
def _schema(path: Path, mtime: float) -> SchematicDomain:
    return load_domain(path)


@lru_cache(maxsize=32)
def _grounded(path: Path, mtime: float, extra: tuple[tuple[str, str], ...]) -> Domain:
    return ground_domain(_schema(path, mtime), dict(extra))


def build_domain(extra_instances: dict[str, str] | None = None,
                 path: str | Path | None = None) -> Domain:
    """Ground the domain file at ``path`` (default: the restaurant KB).

    Results are cached per file version and instance set.

    Raises:
        DomainError: on parse or grounding errors, including an extra instance
            whose name the domain already declares.
    """
    path = Path(path) if path else RESTAURANT_DOMAIN
    mtime = path.stat().st_mtime if path.exists() else 0.0
    extra = tuple(sorted((extra_instances or {}).items()))
    return _grounded(path.resolve(), mtime, extra)


def select_action(agent: Term, goal: Term) -> Term:
    return Term(GOAL_ACTIONS[0], (agent, goal))


def default_selections(domain: Domain, trajectory: Sequence[State]) -> list[Term]:
    """Goal selections the domain's defaults trigger at the last step of ``trajectory``.

    A rule without a trigger fires at step 0; a rule with one fires at the step
    where the trigger fluent holds and did not hold the step before.
    """
    step = len(trajectory) - 1
    if step < 0:
        return []
    now = trajectory[step]
    before = trajectory[step - 1] if step > 0 else None
    fired = set()
    for rule in domain.selection_rules:
        if rule.trigger is None:
            if step == 0:
                fired.add(select_action(rule.agent, rule.goal))
        elif before is not None and rule.trigger in now and rule.trigger not in before:
            fired.add(select_action(rule.agent, rule.goal))
    return sorted(fired)


def candidate_activities(domain: Domain, agent: Term, goal: Term) -> list[Activity]:
    """Activities ``agent`` may start for ``goal``, ordered by id."""
    return [a for a in domain.activities_of.get(agent, ()) if a.goal == goal]


def futile(domain: Domain, activity: Term, observations: Iterable[Literal]) -> bool:
    """True when an observation made at this step matches a futility rule for ``activity``."""
    triggers = domain.futility.get(activity)
    if not triggers:
        return False
    observed = set(observations)
    return any(t in observed for t in triggers)


def futile_goal(domain: Domain, agent: Term, goal: Term, observations: Iterable[Literal]) -> bool:
    """A goal is futile when every activity that could achieve it is futile."""
    observed = list(observations)
    candidates = candidate_activities(domain, agent, goal)
    return bool(candidates) and all(futile(domain, a.id, observed) for a in candidates)


def load_schema(path: str | Path | None = None) -> SchematicDomain:
    """The parsed (ungrounded) domain at ``path``, cached per file version."""
    path = Path(path) if path else RESTAURANT_DOMAIN
    mtime = path.stat().st_mtime if path.exists() else 0.0
    return _schema(path.resolve(), mtime)


def action_sorts(path: str | Path | None = None) -> dict[str, tuple[str, ...]]:
    """Action name -> argument sorts, as declared in the domain file."""
    return {name: decl.sorts for name, decl in load_schema(path).action_decls.items()}


def sort_parents(path: str | Path | None = None) -> dict[str, str | None]:
    """Sort -> parent sort (None for a root), as declared in the domain file."""
    return dict(load_schema(path).sorts)
