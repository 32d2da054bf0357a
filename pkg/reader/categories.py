"""What each agent is expected to do next, read off its mental state.

A top-level activity whose goal is no longer active must be stopped; an
activity in progress continues with its next action unless it became futile;
an active goal with no activity in progress is replanned (or waited on when
every way to reach it is futile).
"""

from enum import IntEnum
from typing import Iterable

from intentions.mental import derived_mental, mental, mental_impossible, next_action
from kb.domain import Domain, Literal, State
from kb.restaurant import futile, futile_goal
from kb.terms import Term
from kb.transition import is_impossible


class Category(IntEnum):
    GOAL_INACTIVE = 2
    IN_PROGRESS = 3
    UNPLANNED_GOAL = 4


def categorize(domain: Domain, state: State, agent: Term) -> list[tuple[Category, Term]]:
    """(category, activity or goal) pairs for ``agent``'s top-level mental state."""
    view = derived_mental(domain, state)
    result = []
    planned_goals = set()
    for m in view.top_level(agent):
        if (agent, m) in view.in_progress:
            result.append((Category.IN_PROGRESS, m))
            planned_goals.add(domain.activities[m].goal)
        else:
            result.append((Category.GOAL_INACTIVE, m))
    for goal in view.top_goals(agent):
        if goal not in planned_goals:
            result.append((Category.UNPLANNED_GOAL, goal))
    return sorted(result)


def agent_intentions(domain: Domain, state: State, agent: Term,
                     observations: Iterable[Literal] = (),
                     context: Iterable[Term] = ()) -> list[Term]:
    """Actions ``agent`` intends at this step.

    ``observations`` are the story observations read at this step (they
    decide futility); ``context`` holds occurrences already fixed for the
    step, such as pending activity starts.
    """
    observed = list(observations)
    fixed = list(context)
    intended = []
    for category, subject in categorize(domain, state, agent):
        match category:
            case Category.GOAL_INACTIVE:
                intended.append(mental("stop", agent, subject))
            case Category.IN_PROGRESS:
                if futile(domain, subject, observed):
                    intended.append(mental("stop", agent, subject))
                    continue
                action = next_action(domain, state, agent, subject)
                if action is None:
                    continue
                if domain.is_mental(action):
                    if not mental_impossible(domain, state, action, fixed):
                        intended.append(action)
                elif not is_impossible(domain, state, action):
                    intended.append(action)
            case Category.UNPLANNED_GOAL:
                if futile_goal(domain, agent, subject, observed):
                    intended.append(mental("wait", agent))
                    continue
                replan = mental("replan", agent, subject)
                if not mental_impossible(domain, state, replan, fixed + [replan]):
                    intended.append(replan)
    return intended


def intended_occurrences(domain: Domain, state: State,
                         observations: Iterable[Literal] = (),
                         context: Iterable[Term] = ()) -> dict[Term, list[Term]]:
    """Per-agent intended actions.

    A physical action with several agent actors is kept only when each of
    them intends it.
    """
    observed = list(observations)
    fixed = list(context)
    per_agent = {agent: agent_intentions(domain, state, agent, observed, fixed)
                 for agent in sorted(domain.agents)}
    result = {}
    for agent, actions in per_agent.items():
        kept = []
        for action in actions:
            if domain.is_physical(action):
                partners = domain.agent_actors(action)
                if any(action not in per_agent.get(p, ()) for p in partners):
                    continue
            kept.append(action)
        result[agent] = kept
    return result


def justified(domain: Domain, state: State, agent: Term, action: Term) -> bool:
    """A physical action by ``agent`` is justified when it is the next action
    of one of the agent's activities in progress."""
    view = derived_mental(domain, state)
    return any(next_action(domain, state, agent, m) == action
               for m in view.top_level(agent) if (agent, m) in view.in_progress)
