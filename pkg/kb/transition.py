"""Transition semantics over a ground ``Domain``: legality, successors, closure."""

import itertools
import logging
from collections import Counter
from typing import Iterable

from errors import InconsistentTransition
from kb.domain import ChoiceLaw, Domain, DynamicLaw, Literal, State
from kb.terms import Term

logger = logging.getLogger(__name__)


def closure(domain: Domain, holds: Iterable[Term], status: frozenset = frozenset()) -> State:
    """Recompute every defined fluent from the non-defined ones.

    Defined fluents are false unless some rule derives them; strata are
    evaluated in order, each to a fixpoint.
    """
    defined = domain.defined
    current = {f for f in holds if f not in defined}
    for stratum in domain.strata:
        changed = True
        while changed:
            changed = False
            for law in stratum:
                if law.head in current:
                    continue
                if all((l.fluent in current) == l.positive for l in law.body):
                    current.add(law.head)
                    changed = True
    return State(frozenset(current), status)


def is_impossible(domain: Domain, state: State, action: Term) -> bool:
    return any(state.satisfies_all(body) for body in domain.impossible_when.get(action, ()))


def legal(domain: Domain, state: State, occurrences: Iterable[Term]) -> bool:
    """No executability law fires and no actor does two non-exogenous actions."""
    per_actor: Counter = Counter()
    for action in occurrences:
        if action not in domain.actions:
            return False
        if is_impossible(domain, state, action):
            return False
        if not domain.is_exogenous(action):
            per_actor.update(domain.actors.get(action, ()))
    return all(n <= 1 for n in per_actor.values())


def fired_laws(domain: Domain, state: State, occurrences: frozenset[Term]) -> list[DynamicLaw]:
    laws = []
    for action in sorted(occurrences):
        for law in domain.laws_by_trigger.get(action, ()):
            if occurrences.issuperset(law.triggers) and state.satisfies_all(law.body):
                laws.append(law)
    return laws


def fired_choices(domain: Domain, state: State, occurrences: frozenset[Term]) -> list[ChoiceLaw]:
    laws = []
    for action in sorted(occurrences):
        for law in domain.choices_by_trigger.get(action, ()):
            if occurrences.issuperset(law.triggers) and state.satisfies_all(law.body):
                laws.append(law)
    return laws


def _with_functional(domain: Domain, effects: set[Literal], added: Iterable[Literal]) -> bool:
    """Add ``added`` and their functional implications; False on contradiction."""
    for lit in added:
        if lit.complement() in effects:
            return False
        effects.add(lit)
        if lit.positive:
            for other in domain.functional_groups.get(lit.fluent, ()):
                neg = Literal(other, False)
                if Literal(other, True) in effects:
                    return False
                effects.add(neg)
    return True


def successors(domain: Domain, state: State, occurrences: Iterable[Term]) -> list[State]:
    """All successor states of ``state`` under ``occurrences``.

    Strict effects and one member per fired choice law are forced first, then
    functional-fluent implications; a ``default`` effect applies only when its
    complement was not forced. Untouched inertial fluents keep their values.
    Mental status is carried over unchanged.

    Raises:
        InconsistentTransition: when every combination of choices contradicts
            the strict effects (including a choice with no members).
    """
    occ = frozenset(occurrences)
    fired = fired_laws(domain, state, occ)
    choices = fired_choices(domain, state, occ)
    strict = [law.head for law in fired if not law.defeasible]
    defaults = [law.head for law in fired if law.defeasible]

    results: list[State] = []
    seen = set()
    for picks in itertools.product(*(law.members for law in choices)):
        effects: set[Literal] = set()
        forced = list(strict)
        for law, pick in zip(choices, picks):
            forced.append(Literal(pick, True))
            forced.extend(Literal(m, False) for m in law.members if m != pick)
        if not _with_functional(domain, effects, forced):
            continue
        usable = [d for d in defaults if d.complement() not in effects]
        if not _with_functional(domain, effects, usable):
            continue

        holds = set(state.holds - domain.defined)
        for lit in effects:
            if lit.positive:
                holds.add(lit.fluent)
            else:
                holds.discard(lit.fluent)
        nxt = closure(domain, holds, state.status)
        if nxt.holds not in seen:
            seen.add(nxt.holds)
            results.append(nxt)

    if not results:
        logger.debug("No consistent successor for %s", sorted(map(str, occ)))
        raise InconsistentTransition(f"no consistent successor for {{{', '.join(sorted(map(str, occ)))}}}")
    return results


def initial_state(domain: Domain, overrides: Iterable[Literal] = ()) -> State:
    """Step-0 state from the domain's ``initially`` defaults, then ``overrides``."""
    holds = {lit.fluent for lit in domain.initial if lit.positive}
    for lit in overrides:
        if lit.positive:
            holds.add(lit.fluent)
            for other in domain.functional_groups.get(lit.fluent, ()):
                holds.discard(other)
        else:
            holds.discard(lit.fluent)
    return closure(domain, holds)
