"""Theory of intentions: mental fluents, mental actions and the next intended action.

Each agent's mental state lives inside ``State``: ``status`` records how far
every started activity has progressed, and the boolean fluents
``active_goal(ag, g)`` and ``replanned(ag, g)`` sit in ``holds`` next to the
physical fluents. Everything else (active, minor, descendant, in progress) is
derived on demand by ``derived_mental``.
"""

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable

from config.constants import ACTIVE_GOAL, REPLANNED
from kb.domain import Domain, State
from kb.terms import Term

logger = logging.getLogger(__name__)


def active_goal(agent: Term, goal: Term) -> Term:
    return Term(ACTIVE_GOAL, (agent, goal))


def replanned(agent: Term, goal: Term) -> Term:
    return Term(REPLANNED, (agent, goal))


def mental(name: str, agent: Term, subject: Term | None = None) -> Term:
    """Build a mental action term: ``mental("start", nicole, c_act(...))``."""
    return Term(name, (agent,) if subject is None else (agent, subject))


@dataclass(frozen=True)
class MentalView:
    """Derived mental fluents of one state."""
    domain: Domain
    state: State

    @cached_property
    def active(self) -> frozenset[tuple[Term, Term]]:
        return frozenset(self.state.status_map)

    @cached_property
    def children(self) -> dict[tuple[Term, Term], tuple[Term, ...]]:
        """(agent, activity) -> its started sub-activities."""
        result = {}
        for agent, m in self.active:
            subs = self.domain.activities[m].subactivities
            result[(agent, m)] = tuple(sorted(s for s in subs if (agent, s) in self.active))
        return result

    @cached_property
    def minor(self) -> frozenset[tuple[Term, Term]]:
        return frozenset((agent, s) for (agent, _), subs in self.children.items() for s in subs)

    @cached_property
    def minor_goals(self) -> frozenset[tuple[Term, Term]]:
        return frozenset((agent, self.domain.activities[m].goal) for agent, m in self.minor)

    @cached_property
    def active_goals(self) -> frozenset[tuple[Term, Term]]:
        return frozenset(f.args for f in self.state.holds if f.name == ACTIVE_GOAL)

    @cached_property
    def in_progress(self) -> frozenset[tuple[Term, Term]]:
        return frozenset((agent, m) for agent, m in self.active
                         if (agent, self.domain.activities[m].goal) in self.active_goals)

    def descendants(self, agent: Term, m: Term) -> list[Term]:
        """Started sub-activities of ``m``, transitively."""
        found, stack = [], list(self.children.get((agent, m), ()))
        while stack:
            sub = stack.pop()
            if sub not in found:
                found.append(sub)
                stack.extend(self.children.get((agent, sub), ()))
        return sorted(found)

    def top_level(self, agent: Term) -> list[Term]:
        """Started activities of ``agent`` that are not sub-activities of another."""
        return sorted(m for a, m in self.active if a == agent and (a, m) not in self.minor)

    def top_goals(self, agent: Term) -> list[Term]:
        return sorted(g for a, g in self.active_goals if a == agent and (a, g) not in self.minor_goals)

    def parent(self, agent: Term, sub: Term) -> Term | None:
        for (a, m), subs in self.children.items():
            if a == agent and sub in subs:
                return m
        return None


def derived_mental(domain: Domain, state: State) -> MentalView:
    return MentalView(domain, state)


# -- next action --------------------------------------------------------------

def next_step(domain: Domain, state: State, agent: Term, m: Term) -> tuple[Term, Term] | None:
    """(next action, activity it belongs to) for ``m``, descending into sub-activities."""
    k = state.status_of(agent, m)
    if k < 0:
        return None
    activity = domain.activities[m]
    comp = activity.component(k + 1)
    if comp is None:
        return None
    if not activity.is_subactivity(comp):
        return comp, m

    sub = domain.activities[comp]
    sub_k = state.status_of(agent, comp)
    if sub_k < 0:
        return mental("start", agent, comp), m
    if active_goal(agent, sub.goal) not in state or sub_k >= sub.length:
        return mental("stop", agent, comp), m
    return next_step(domain, state, agent, comp)


def next_action(domain: Domain, state: State, agent: Term, m: Term) -> Term | None:
    """The action ``agent`` intends next as part of activity ``m``, or None.

    None means every component is done (stopping the activity itself is the
    reader's decision) or ``m`` has not been started.
    """
    step = next_step(domain, state, agent, m)
    return step[0] if step else None


# -- mental actions -----------------------------------------------------------

def mental_impossible(domain: Domain, state: State, action: Term,
                      occurrences: Iterable[Term] = ()) -> bool:
    """Whether a mental action is ruled out in ``state`` alongside ``occurrences``."""
    view = derived_mental(domain, state)
    agent = action.args[0]
    others = [a for a in occurrences if a != action]
    match action.name:
        case "select":
            if any(a == agent for a, _ in view.active_goals):
                return True
            return any(o.name == "select" and o.args[0] == agent for o in others)
        case "abandon":
            return (agent, action.args[1]) not in view.active_goals
        case "start":
            return (agent, action.args[1]) in view.active
        case "stop":
            return (agent, action.args[1]) not in view.active
        case "replan":
            if replanned(agent, action.args[1]) in state:
                return True
            return any(o.name == "start" and o.args[0] == agent for o in others)
        case _:
            return False


def mental_legal(domain: Domain, state: State, occurrences: Iterable[Term]) -> bool:
    occ = list(occurrences)
    return not any(domain.is_mental(a) and mental_impossible(domain, state, a, occ) for a in occ)


def apply_mental(domain: Domain, state: State, action: Term,
                 holds: set[Term], status: dict[tuple[Term, Term], int]) -> None:
    """Apply the effects of one mental action, judged in ``state``, to ``holds``/``status``."""
    view = derived_mental(domain, state)
    agent = action.args[0]
    match action.name:
        case "select":
            goal = action.args[1]
            if goal not in state:
                holds.add(active_goal(agent, goal))
        case "abandon":
            holds.discard(active_goal(agent, action.args[1]))
        case "start":
            m = action.args[1]
            status[(agent, m)] = 0
            goal = domain.activities[m].goal
            is_sub = any((agent, p) in view.active for p in domain.parents.get(m, ()))
            if is_sub and goal not in state:
                holds.add(active_goal(agent, goal))
        case "stop":
            m = action.args[1]
            for sub in view.descendants(agent, m):
                status.pop((agent, sub), None)
                holds.discard(active_goal(agent, domain.activities[sub].goal))
            status.pop((agent, m), None)
            if (agent, m) in view.minor:
                holds.discard(active_goal(agent, domain.activities[m].goal))
                parent = view.parent(agent, m)
                if parent is not None and (agent, parent) in status:
                    status[(agent, parent)] += 1
        case "replan":
            holds.add(replanned(agent, action.args[1]))
        case "wait":
            pass


def progress(domain: Domain, before: State, occurrences: Iterable[Term], after: State) -> State:
    """Mental successor: ``after`` is the physical successor of ``before``.

    Executed physical actions that were an agent's next action advance the
    activity they belong to; mental actions take effect; goals that hold in
    ``after`` stop being active.
    """
    occ = sorted(occurrences)
    holds = set(after.holds)
    status = dict(before.status_map)
    view = derived_mental(domain, before)

    for action in occ:
        if domain.is_mental(action) or domain.is_exogenous(action):
            continue
        for agent in domain.agent_actors(action):
            for m in view.top_level(agent):
                step = next_step(domain, before, agent, m)
                if step and step[0] == action:
                    status[(agent, step[1])] = status.get((agent, step[1]), 0) + 1

    for action in occ:
        if domain.is_mental(action):
            apply_mental(domain, before, action, holds, status)

    for fluent in list(holds):
        if fluent.name == ACTIVE_GOAL and fluent.args[1] in after.holds:
            holds.discard(fluent)

    return State(frozenset(holds), frozenset((a, m, k) for (a, m), k in status.items()))


def initial_mental(state: State) -> State:
    """Step-0 mental state: nothing started, no goal active."""
    holds = frozenset(f for f in state.holds if f.name not in (ACTIVE_GOAL, REPLANNED))
    return State(holds, frozenset())
