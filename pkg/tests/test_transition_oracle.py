"""successors() and legal() against brute-force enumeration on random micro-domains."""

import itertools
import random

import pytest

from errors import InconsistentTransition
from kb.domain import Literal, State
from kb.terms import term
from kb.transition import legal, successors
from tests.helpers import ground

OBJECTS = ("o1", "o2", "o3")
FLUENTS = ("p", "q", "c")
ACTIONS = ("a", "b")

HEADER = """
sort obj
instance o1 obj
instance o2 obj
instance o3 obj
var X, Y obj
static other(Y, X) <- Y != X
fluent p(obj) inertial physical
fluent q(obj) inertial physical
fluent r(obj) defined physical
fluent t(obj) defined physical
action a(obj) exogenous
action b(obj) exogenous
"""


def _literal(rng: random.Random) -> tuple[str, bool]:
    return rng.choice(FLUENTS), rng.random() >= 0.4


def _text(literal: tuple[str, bool]) -> str:
    name, positive = literal
    return ("" if positive else "-") + f"{name}(X)"


def random_domain(rng: random.Random) -> tuple[str, bool, list[tuple[str, str, bool]]]:
    """Domain text, whether ``c`` is functional, and the executability rules as tuples."""
    functional = rng.random() < 0.6
    lines = [HEADER, "fluent c(obj) inertial physical" + (" functional=1" if functional else "")]
    for _ in range(rng.randint(1, 5)):
        triggers = "a(X) + b(X)" if rng.random() < 0.2 else f"{rng.choice(ACTIONS)}(X)"
        line = f"causes {triggers} -> {_text(_literal(rng))}"
        if rng.random() < 0.5:
            line += f" if {_text(_literal(rng))}"
        if rng.random() < 0.3:
            line += " default"
        lines.append(line)
    for _ in range(rng.choice((0, 1, 1, 2))):
        triggers = "a(X) + b(X)" if rng.random() < 0.5 else f"{rng.choice(ACTIONS)}(X)"
        line = f"choice {triggers} -> c(Y) for other(Y, X)"
        if rng.random() < 0.4:
            line += f" if {_text(_literal(rng))}"
        lines.append(line)
    if rng.random() < 0.5:
        lines.append("if r(X) <- p(X), -q(X)")
        if rng.random() < 0.5:
            lines.append("if t(X) <- r(X), c(X)")
    impossible = []
    for _ in range(rng.randint(0, 2)):
        action = rng.choice(ACTIONS)
        fluent, positive = _literal(rng)
        impossible.append((action, fluent, positive))
        lines.append(f"impossible_if {action}(X) <- {_text((fluent, positive))}")
    return "\n".join(lines) + "\n", functional, impossible


def _holds(holds, body) -> bool:
    return all((lit.fluent in holds) == lit.positive for lit in body)


def derive(domain, holds) -> frozenset:
    """Inertial fluents plus every defined fluent their rules derive.

    Negated body fluents are all inertial here, so one fixpoint suffices.
    """
    rules = [law for stratum in domain.strata for law in stratum]
    current = set(holds)
    changed = True
    while changed:
        changed = False
        for law in rules:
            if law.head not in current and _holds(current, law.body):
                current.add(law.head)
                changed = True
    return frozenset(current)


def brute_force(domain, holds, occurrences, functional: bool) -> set[frozenset]:
    """Every assignment to the inertial fluents a transition may produce, closed."""
    occ = frozenset(occurrences)
    fired = [law for law in domain.dynamic_laws if occ.issuperset(law.triggers) and _holds(holds, law.body)]
    choices = [law for law in domain.choice_laws if occ.issuperset(law.triggers) and _holds(holds, law.body)]
    group = {term("c", o) for o in OBJECTS} if functional else set()
    strict = {law.head for law in fired if not law.defeasible}
    defaults = {law.head for law in fired if law.defeasible}
    inertial = sorted(domain.inertial)

    def implied(literals):
        result = set(literals)
        for lit in literals:
            if lit.positive and lit.fluent in group:
                result |= {Literal(g, False) for g in group if g != lit.fluent}
        return result

    found = set()
    for values in itertools.product((False, True), repeat=len(inertial)):
        nxt = {f for f, v in zip(inertial, values) if v}
        if len(nxt & group) > 1:
            continue
        if any(len(nxt & set(law.members)) != 1 for law in choices):
            continue
        forced = set(strict)
        for law in choices:
            for m in law.members:
                forced.add(Literal(m, m in nxt))
        forced = implied(forced)
        usable = {d for d in defaults if d.complement() not in forced}
        effects = implied(forced | usable)
        if any((lit.fluent in nxt) != lit.positive for lit in effects):
            continue
        touched = {lit.fluent for lit in effects}
        if any((f in nxt) != (f in holds) for f in inertial if f not in touched):
            continue
        found.add(derive(domain, nxt))
    return found


def oracle_legal(holds, occurrences, impossible) -> bool:
    for action in occurrences:
        for name, fluent, positive in impossible:
            if action.name == name and (term(fluent, *action.args) in holds) == positive:
                return False
    return True


def random_state(rng: random.Random, domain, functional: bool) -> frozenset:
    holds = {term(name, o) for name in ("p", "q") for o in OBJECTS if rng.random() < 0.5}
    if functional:
        chosen = rng.choice((None,) + OBJECTS)
        if chosen:
            holds.add(term("c", chosen))
    else:
        holds |= {term("c", o) for o in OBJECTS if rng.random() < 0.5}
    return derive(domain, holds)


@pytest.mark.parametrize("seed", range(200))
def test_successors_match_brute_force(seed):
    rng = random.Random(seed)
    text, functional, impossible = random_domain(rng)
    domain = ground(text)
    for _ in range(3):
        holds = random_state(rng, domain, functional)
        state = State(holds)
        occurrences = frozenset(term(name, rng.choice(OBJECTS)) for name in ACTIONS if rng.random() < 0.6)
        assert legal(domain, state, occurrences) == oracle_legal(holds, occurrences, impossible), text
        expected = brute_force(domain, holds, occurrences, functional)
        try:
            got = {s.holds for s in successors(domain, state, occurrences)}
        except InconsistentTransition:
            got = set()
        assert got == expected, (text, sorted(map(str, holds)), sorted(map(str, occurrences)))


def test_generator_covers_choice_and_functional():
    texts = [random_domain(random.Random(seed)) for seed in range(200)]
    assert any("choice " in text and functional for text, functional, _ in texts)
    assert any("choice " in text and not functional for text, functional, _ in texts)
    assert any(impossible for _, _, impossible in texts)


def test_functional_choice_conflict_has_no_successor():
    domain = ground(HEADER + "fluent c(obj) inertial physical functional=1\n"
                    "causes a(X) -> c(X)\n"
                    "choice b(X) -> c(Y) for other(Y, X)\n")
    state = State(frozenset())
    occurrences = {term("a", "o1"), term("b", "o1")}
    assert brute_force(domain, state.holds, occurrences, True) == set()
    with pytest.raises(InconsistentTransition):
        successors(domain, state, occurrences)
