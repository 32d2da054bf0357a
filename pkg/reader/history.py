"""Story-side input (``History``) and the reader's output (``Model``)."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import TYPE_CHECKING, Iterator

from errors import NarrativeError
from kb.domain import Domain, Literal, State
from kb.terms import Term
from utils import map_atom, occurs_atom, atom_sort_key

if TYPE_CHECKING:
    from qa.questions import Question


@dataclass(frozen=True)
class StoryFact:
    """``hpd``/``obs`` fact on the story timeline."""
    term: Term
    value: bool
    step: int
    line: int | None = field(default=None, compare=False)

    @property
    def literal(self) -> Literal:
        return Literal(self.term, self.value)


@dataclass
class History:
    instances: dict[str, str] = field(default_factory=dict)
    hpd: list[StoryFact] = field(default_factory=list)
    obs: list[StoryFact] = field(default_factory=list)
    next_st: list[tuple[int, int]] = field(default_factory=list)
    initially: list[Literal] = field(default_factory=list)
    questions: list["Question"] = field(default_factory=list)

    @property
    def story_steps(self) -> list[int]:
        steps = {f.step for f in self.hpd} | {f.step for f in self.obs}
        return list(range(max(steps) + 1)) if steps else []

    def hpd_at(self, step: int) -> list[StoryFact]:
        return [f for f in self.hpd if f.step == step]

    def obs_at(self, step: int) -> list[StoryFact]:
        return [f for f in self.obs if f.step == step]

    def forced_next(self, step: int) -> bool:
        """Whether story step ``step`` must directly follow ``step - 1``."""
        return (step - 1, step) in self.next_st

    def validate(self, domain: Domain) -> None:
        """Check the history against a grounded domain.

        Raises:
            NarrativeError: unknown actions or fluents, missing required
                sorts, story steps without facts, bad ``next`` pairs.
        """
        for sort in domain.required_sorts:
            if not domain.members(sort):
                raise NarrativeError(f"no {sort} declared")

        for fact in self.hpd:
            if fact.term not in domain.actions or domain.is_mental(fact.term):
                raise NarrativeError(f"unknown action {fact.term}", line=fact.line)
        for fact in self.obs:
            if fact.term not in domain.fluents:
                raise NarrativeError(f"unknown fluent {fact.term}", line=fact.line)
        for lit in self.initially:
            if lit.fluent not in domain.inertial:
                raise NarrativeError(f"initially needs an inertial fluent, got {lit.fluent}")

        steps = set(self.story_steps)
        used = {f.step for f in self.hpd} | {f.step for f in self.obs}
        for step in sorted(steps - used):
            raise NarrativeError(f"story step {step} has no hpd or obs facts")
        for s, s1 in self.next_st:
            if s1 != s + 1 or s not in steps or s1 not in steps:
                raise NarrativeError(f"next {s} {s1} must name adjacent story steps")

        seen: dict[tuple[str, Term, int], StoryFact] = {}
        for kind, facts in (("hpd", self.hpd), ("obs", self.obs)):
            for fact in facts:
                other = seen.setdefault((kind, fact.term, fact.step), fact)
                if other.value != fact.value:
                    raise NarrativeError(
                        f"contradictory facts: {kind} {fact.term} true and false at step {fact.step}",
                        line=fact.line)


@dataclass(frozen=True, order=True)
class TimelineMapping:
    """Story step ``s`` is read at reasoning step ``steps[s]``."""
    steps: tuple[int, ...] = ()

    def __len__(self) -> int:
        return len(self.steps)

    def __getitem__(self, story_step: int) -> int:
        return self.steps[story_step]

    @property
    def last_assigned(self) -> int:
        return self.steps[-1] if self.steps else -1

    def story_step_at(self, step: int) -> int | None:
        try:
            return self.steps.index(step)
        except ValueError:
            return None

    def as_dict(self) -> dict[int, int]:
        return dict(enumerate(self.steps))

    def extend(self, step: int) -> "TimelineMapping":
        return TimelineMapping(self.steps + (step,))

    def truncate(self, step: int) -> "TimelineMapping":
        """Keep only story steps read before reasoning step ``step``."""
        return TimelineMapping(tuple(i for i in self.steps if i < step))


@dataclass(frozen=True, order=True)
class ActivityChoice:
    """At ``step`` ``agent`` started ``activity`` for ``goal``."""
    step: int
    agent: Term
    goal: Term
    activity: Term


@dataclass(frozen=True)
class Model:
    id: int
    mapping: TimelineMapping
    states: tuple[State, ...]
    occurrences: tuple[frozenset[Term], ...]
    abduced: tuple[tuple[int, Term], ...] = ()
    choices: tuple[ActivityChoice, ...] = ()
    quiescent: bool = True

    @property
    def last_step(self) -> int:
        return len(self.states) - 1

    def steps_of(self, action: Term) -> list[int]:
        return [i for i, occ in enumerate(self.occurrences) if action in occ]

    def iter_occurrences(self) -> Iterator[tuple[int, Term]]:
        for i, occ in enumerate(self.occurrences):
            for action in sorted(occ):
                yield i, action

    @cached_property
    def atoms(self) -> list[str]:
        """``map(s,i)`` atoms, then ``occurs(a,i)`` atoms by step and text."""
        maps = [map_atom(s, i) for s, i in enumerate(self.mapping.steps)]
        occurs = sorted((occurs_atom(a, i) for i, a in self.iter_occurrences()), key=atom_sort_key)
        return maps + occurs

    @property
    def signature(self) -> tuple:
        """Identity of a model for de-duplication."""
        return (self.mapping, self.occurrences, tuple(sorted(self.abduced)))

    def sort_key(self) -> tuple:
        return (
            self.mapping.steps,
            tuple((i, str(a)) for i, a in sorted(self.abduced, key=lambda x: (x[0], str(x[1])))),
            tuple((c.step, str(c.agent), str(c.goal), str(c.activity)) for c in self.choices),
            tuple(tuple(sorted(map(str, occ))) for occ in self.occurrences),
        )
