"""Candidate unobserved exogenous actions.

Two kinds of candidates are proposed. ``cooccurring`` finds exogenous
actions that would complete a multi-action law together with what is about
to happen (``order + interference``); the reader branches on them eagerly.
``explain`` finds exogenous actions that directly cause an observed literal
the trajectory got wrong, placed at every earlier step where they would
change it; the reader restarts from each placement.
"""

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

from kb.domain import Domain, DynamicLaw, Literal, State
from kb.terms import Term
from kb.transition import is_impossible

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Diagnoser:
    domain: Domain

    @cached_property
    def joint_laws(self) -> dict[Term, tuple]:
        """Exogenous action -> multi-trigger laws (dynamic or choice) it takes part in."""
        result: dict[Term, list] = {}
        for law in (*self.domain.dynamic_laws, *self.domain.choice_laws):
            if len(law.triggers) < 2:
                continue
            for action in law.triggers:
                if self.domain.is_exogenous(action):
                    result.setdefault(action, []).append(law)
        return {a: tuple(laws) for a, laws in result.items()}

    @cached_property
    def causes(self) -> dict[Literal, tuple[DynamicLaw, ...]]:
        """Literal -> single-trigger laws of exogenous actions with that head."""
        result: dict[Literal, list[DynamicLaw]] = {}
        for law in self.domain.dynamic_laws:
            if len(law.triggers) == 1 and self.domain.is_exogenous(law.triggers[0]):
                result.setdefault(law.head, []).append(law)
        return {lit: tuple(laws) for lit, laws in result.items()}

    def cooccurring(self, state: State, occurrences: Iterable[Term]) -> list[Term]:
        """Exogenous actions that would fire a joint law with ``occurrences``."""
        occ = frozenset(occurrences)
        found = set()
        for action, laws in self.joint_laws.items():
            if action in occ:
                continue
            for law in laws:
                others = [t for t in law.triggers if t != action]
                if occ.issuperset(others) and state.satisfies_all(law.body):
                    found.add(action)
                    break
        return sorted(found)

    def explain(self, states: Sequence[State], literal: Literal, step: int) -> list[tuple[int, Term]]:
        """(step, exogenous action) placements before ``step`` that would make ``literal`` true."""
        placements = []
        for law in self.causes.get(literal, ()):
            action = law.triggers[0]
            for j in range(min(step, len(states))):
                state = states[j]
                if state.satisfies(literal) or not state.satisfies_all(law.body):
                    continue
                if is_impossible(self.domain, state, action):
                    continue
                placements.append((j, action))
        placements.sort(key=lambda p: (p[0], str(p[1])))
        logger.debug("Placements explaining %s at %d: %d", literal, step, len(placements))
        return placements

